//! Generator matrices of MDS codes.

use thiserror::Error;

use crate::digraph::subsets_of_size;
use crate::field::{FieldError, FieldSpec};
use crate::matrix::FqMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdsError {
    #[error("no [{s},{k}] MDS generator over a field of order {q}")]
    FieldTooSmall { s: usize, k: usize, q: u32 },
    #[error("dimension {k} exceeds length {s}")]
    BadDimension { s: usize, k: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Largest length for which generators are checked minor by minor.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 12;

/// A `k×s` generator of an `[s,k]` MDS code: every `k` columns are
/// independent.
///
/// Constructions, in order of preference: identity (`k = s`), all-ones row
/// (`k = 1`), `[I | 1]` (`k = s−1`), Vandermonde on the first `s` field
/// elements in canonical order (`q ≥ s`), and the doubly extended
/// Reed–Solomon code (`q = s−1`).
pub fn rs_generator(s: usize, k: usize, field: &FieldSpec) -> Result<FqMatrix, MdsError> {
    if k > s {
        return Err(MdsError::BadDimension { s, k });
    }
    let q = field.q() as usize;
    let g = if k == s {
        FqMatrix::identity(field, s)
    } else if k == 0 {
        FqMatrix::zeros(field, 0, s)
    } else if k == 1 {
        FqMatrix::from_rows(field, s, &[vec![1; s]])
    } else if k == s - 1 {
        let mut g = FqMatrix::zeros(field, k, s);
        for r in 0..k {
            g.set(r, r, 1);
            g.set(r, s - 1, 1);
        }
        g
    } else if q >= s {
        vandermonde(field, k, &(0..s as u32).collect::<Vec<_>>())
    } else if q + 1 == s {
        let mut g = vandermonde(field, k, &(0..q as u32).collect::<Vec<_>>());
        let mut rows = g.row_vecs();
        for (r, row) in rows.iter_mut().enumerate() {
            row.push(if r == k - 1 { 1 } else { 0 });
        }
        g = FqMatrix::from_rows(field, s, &rows);
        g
    } else {
        return Err(MdsError::FieldTooSmall { s, k, q: field.q() });
    };
    if s <= EXHAUSTIVE_CHECK_LIMIT {
        debug_assert!(is_mds(&g), "construction is not MDS: {g:?}");
    }
    Ok(g)
}

fn vandermonde(field: &FieldSpec, k: usize, points: &[u32]) -> FqMatrix {
    let rows: Vec<Vec<u32>> = (0..k)
        .map(|r| points.iter().map(|&x| field.pow(x, r as u64)).collect())
        .collect();
    FqMatrix::from_rows(field, points.len(), &rows)
}

/// Checks every `k×k` column minor.
pub fn is_mds(g: &FqMatrix) -> bool {
    let (k, s) = (g.rows(), g.cols());
    subsets_of_size(s, k).all(|mask| {
        let cols: Vec<usize> = crate::digraph::bits(mask).collect();
        g.select_cols(&cols).rank() == k
    })
}

/// The smallest extension of `field` over which an `[s,k]` MDS generator
/// exists via [`rs_generator`]; `field` itself when it already suffices.
pub fn field_for_mds(field: &FieldSpec, s: usize, k: usize) -> Result<FieldSpec, MdsError> {
    let mut degree = 1;
    loop {
        let candidate = if degree == 1 { field.clone() } else { field.extension(degree)? };
        if rs_generator(s, k, &candidate).is_ok() {
            return Ok(candidate);
        }
        degree += 1;
    }
}
