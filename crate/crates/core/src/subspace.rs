//! Row spaces kept in reduced row echelon form, so that equal subspaces
//! compare equal structurally.

use crate::field::FieldSpec;
use crate::matrix::{FqMatrix, LinAlgError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: FqMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Subspace { basis: FqMatrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Self::row_space(&FqMatrix::identity(field, ambient))
    }

    pub fn row_space(m: &FqMatrix) -> Self {
        let (basis, pivots) = m.rref_with_pivots();
        Subspace { basis, pivots }
    }

    pub fn span(field: &FieldSpec, ambient: usize, vectors: &[Vec<u32>]) -> Self {
        Self::row_space(&FqMatrix::from_rows(field, ambient, vectors))
    }

    pub fn field(&self) -> &FieldSpec {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// The rref basis.
    pub fn basis(&self) -> &FqMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the space.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field();
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = out[p];
            if c != 0 {
                crate::matrix::vec_axpy(f, &mut out, f.neg(c), self.basis.row(r));
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient_dim());
        crate::matrix::is_zero(&self.reduce(v))
    }

    /// Coordinates with respect to the rref basis. Only meaningful when `v` is contained.
    pub fn coordinates(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&p| v[p]).collect()
    }

    /// Element of the space with the given coordinates.
    pub fn combine(&self, coords: &[u32]) -> Vec<u32> {
        self.basis.left_mul_vec(coords)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        (0..self.dim()).all(|r| other.contains(self.basis.row(r)))
    }

    fn check(&self, other: &Subspace) -> Result<(), LinAlgError> {
        if self.field() != other.field() {
            return Err(LinAlgError::FieldMismatch);
        }
        if self.ambient_dim() != other.ambient_dim() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check(other)?;
        Ok(Self::row_space(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection by the kernel method: pairs `(x, y)` with `x·U = y·W`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check(other)?;
        let f = self.field();
        let n = self.ambient_dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(f, n));
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let vectors: Vec<Vec<u32>> = stacked
            .left_kernel()
            .iter()
            .map(|k| self.basis.left_mul_vec(&k[..self.dim()]))
            .collect();
        Ok(Self::span(f, n, &vectors))
    }

    /// `{x : x·u = 0 for all u}` under the standard bilinear form.
    pub fn orthogonal(&self) -> Subspace {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(self.field(), n);
        }
        Self::span(self.field(), n, &self.basis.kernel())
    }

    /// All `q^dim` elements, in coordinate order. Intended for small spaces.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let q = self.field().q() as u64;
        let d = self.dim();
        let count = q.pow(d as u32);
        (0..count).map(move |idx| self.combine(&crate::matrix::vector_from_index(q as u32, d, idx)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_example() {
        let f = FieldSpec::prime(2).unwrap();
        let u = Subspace::span(&f, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        let w = Subspace::span(&f, 3, &[vec![1, 0, 1]]);
        assert_eq!(u.intersect(&w).unwrap(), w);
        assert_eq!(u.intersect(&u).unwrap(), u);
        assert_eq!(u.sum(&w).unwrap(), u);
    }

    #[test]
    fn orthogonal_complement() {
        let f = FieldSpec::prime(3).unwrap();
        let u = Subspace::span(&f, 3, &[vec![1, 2, 0]]);
        let perp = u.orthogonal();
        assert_eq!(perp.dim(), 2);
        for x in perp.elements() {
            assert_eq!(crate::matrix::dot(&f, &x, &[1, 2, 0]), 0);
        }
        assert_eq!(perp.orthogonal(), u);
    }

    #[test]
    fn coordinates_round_trip() {
        let f = FieldSpec::of_order(4).unwrap();
        let u = Subspace::span(&f, 4, &[vec![1, 2, 0, 3], vec![0, 0, 1, 1]]);
        for v in u.elements() {
            assert!(u.contains(&v));
            assert_eq!(u.combine(&u.coordinates(&v)), v);
        }
        assert_eq!(u.elements().count(), 16);
    }

    #[test]
    fn mismatched_dimensions() {
        let f = FieldSpec::prime(2).unwrap();
        let a = Subspace::full(&f, 2);
        let b = Subspace::full(&f, 3);
        assert!(a.sum(&b).is_err());
        assert!(a.intersect(&b).is_err());
    }
}
