pub mod field;
pub mod matrix;
pub mod subspace;
pub mod digraph;
pub mod instance;
pub mod mds;
pub mod minrank;
pub mod reduction;
pub mod lp;
pub mod clique;
pub mod design;
pub mod schemes;
pub mod report;
pub mod cli;
