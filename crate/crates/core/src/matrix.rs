//! Dense matrices over a [`FieldSpec`].

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::FieldSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("system has no solution")]
    Infeasible,
}

/// Row-major matrix with entries in canonical encoding.
#[derive(Clone, PartialEq, Eq)]
pub struct FqMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

/// All solutions of a linear system: `particular + span(kernel)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<u32>,
    pub kernel: Vec<Vec<u32>>,
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

// Vector helpers shared across modules.

pub fn vec_add(f: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vec_sub(f: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn vec_scale(f: &FieldSpec, c: u32, a: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

/// `acc += c * a`
pub fn vec_axpy(f: &FieldSpec, acc: &mut [u32], c: u32, a: &[u32]) {
    if c == 0 {
        return;
    }
    for (x, &y) in acc.iter_mut().zip(a) {
        if y != 0 {
            *x = f.add(*x, f.mul(c, y));
        }
    }
}

pub fn dot(f: &FieldSpec, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Scales `v` so that its first nonzero entry is 1. Zero stays zero.
pub fn normalize(f: &FieldSpec, v: &[u32]) -> Vec<u32> {
    match v.iter().find(|&&x| x != 0) {
        Some(&lead) => vec_scale(f, f.inv(lead), v),
        None => v.to_vec(),
    }
}

/// Decodes `idx` as a base-`q` vector of length `n`, first coordinate most significant.
pub fn vector_from_index(q: u32, n: usize, mut idx: u64) -> Vec<u32> {
    let mut v = vec![0; n];
    for slot in v.iter_mut().rev() {
        *slot = (idx % q as u64) as u32;
        idx /= q as u64;
    }
    v
}

impl FqMatrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        FqMatrix { field: field.clone(), rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        entries: Vec<u32>,
    ) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= field.q()) {
            return Err(LinAlgError::DimensionMismatch(format!(
                "entry {bad} is not an element of {field}"
            )));
        }
        Ok(FqMatrix { field: field.clone(), rows, cols, entries })
    }

    /// Builds a matrix from row vectors; `cols` is needed when `rows` is empty.
    pub fn from_rows(field: &FieldSpec, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend_from_slice(r);
        }
        FqMatrix { field: field.clone(), rows: rows.len(), cols, entries }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn push_row(&mut self, row: &[u32]) {
        assert_eq!(row.len(), self.cols);
        self.entries.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<Vec<u32>> = idx.iter().map(|&r| self.row(r).to_vec()).collect();
        Self::from_rows(&self.field, self.cols, &rows)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|r| idx.iter().map(|&c| self.get(r, c)).collect())
            .collect();
        Self::from_rows(&self.field, idx.len(), &rows)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &FqMatrix) -> Result<Self, LinAlgError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(FqMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &FqMatrix) -> Result<Self, LinAlgError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|r| [self.row(r), other.row(r)].concat())
            .collect();
        Ok(Self::from_rows(&self.field, self.cols + other.cols, &rows))
    }

    fn check_field(&self, other: &FqMatrix) -> Result<(), LinAlgError> {
        if self.field != other.field {
            Err(LinAlgError::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, other: &FqMatrix) -> Result<Self, LinAlgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            let acc = out.row_mut(r);
            for k in 0..self.cols {
                vec_axpy(f, acc, self.get(r, k), other.row(k));
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let mut acc = vec![0; self.cols];
        for (r, &c) in v.iter().enumerate() {
            vec_axpy(&self.field, &mut acc, c, self.row(r));
        }
        acc
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(&self.field, self.row(r), v)).collect()
    }

    /// Reduced row echelon form (zero rows dropped) and its pivot columns.
    pub fn rref_with_pivots(&self) -> (FqMatrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if p != lead {
                for k in 0..m.cols {
                    m.entries.swap(p * m.cols + k, lead * m.cols + k);
                }
            }
            let inv = f.inv(m.get(lead, c));
            for k in 0..m.cols {
                let x = m.get(lead, k);
                m.set(lead, k, f.mul(inv, x));
            }
            let pivot_row = m.row(lead).to_vec();
            for r in 0..m.rows {
                if r != lead {
                    let factor = m.get(r, c);
                    if factor != 0 {
                        vec_axpy(f, m.row_mut(r), f.neg(factor), &pivot_row);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        m.entries.truncate(lead * m.cols);
        m.rows = lead;
        (m, pivots)
    }

    pub fn rref(&self) -> FqMatrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref_with_pivots();
        kernel_from_rref(&r, &pivots)
    }

    /// Basis of `{y : y · self = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<u32>> {
        self.transpose().kernel()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<FqMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let aug = self.hstack(&Self::identity(&self.field, self.rows)).ok()?;
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() < self.rows || pivots[self.rows - 1] >= self.rows {
            return None;
        }
        let idx: Vec<usize> = (self.cols..2 * self.cols).collect();
        Some(r.select_cols(&idx))
    }

    /// Converts entries through an element map, e.g. a field embedding.
    pub fn map_into(&self, target: &FieldSpec, map: &[u32]) -> FqMatrix {
        FqMatrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| map[e as usize]).collect(),
        }
    }
}

fn kernel_from_rref(r: &FqMatrix, pivots: &[usize]) -> Vec<Vec<u32>> {
    let f = r.field();
    let n = r.cols();
    let mut out = Vec::new();
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0; n];
        v[free] = 1;
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(r.get(row, free));
        }
        out.push(v);
    }
    out
}

/// Solves `A · x = b`.
pub fn solve(a: &FqMatrix, b: &[u32]) -> Result<Solution, LinAlgError> {
    if b.len() != a.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "rhs of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let bcol = FqMatrix::from_rows(a.field(), 1, &b.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    let aug = a.hstack(&bcol)?;
    let (r, pivots) = aug.rref_with_pivots();
    if pivots.last() == Some(&n) {
        return Err(LinAlgError::Infeasible);
    }
    let mut particular = vec![0; n];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = r.get(row, n);
    }
    let a_part = r.select_cols(&(0..n).collect::<Vec<_>>());
    Ok(Solution { particular, kernel: kernel_from_rref(&a_part, &pivots) })
}

/// Coefficients `y` with `y · m = v`, if `v` lies in the row space of `m`.
pub fn express_in_rows(m: &FqMatrix, v: &[u32]) -> Result<Option<Vec<u32>>, LinAlgError> {
    if v.len() != m.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            v.len(),
            m.cols()
        )));
    }
    match solve(&m.transpose(), v) {
        Ok(s) => Ok(Some(s.particular)),
        Err(LinAlgError::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn in_rowspace(v: &[u32], m: &FqMatrix) -> Result<bool, LinAlgError> {
    if v.len() != m.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            v.len(),
            m.cols()
        )));
    }
    let mut stacked = m.clone();
    stacked.push_row(v);
    Ok(stacked.rank() == m.rank())
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    p: u32,
    ell: u32,
    modulus: Vec<u32>,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl Serialize for FqMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            p: self.field.p(),
            ell: self.field.ell(),
            modulus: self.field.modulus().to_vec(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FqMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = MatrixRepr::deserialize(d)?;
        let field = FieldSpec::new(r.p, r.ell, Some(r.modulus)).map_err(D::Error::custom)?;
        FqMatrix::from_entries(&field, r.rows, r.cols, r.entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    #[test]
    fn ranks() {
        let f = gf(2);
        assert_eq!(FqMatrix::identity(&f, 5).rank(), 5);
        let ones = FqMatrix::from_entries(&f, 3, 3, vec![1; 9]).unwrap();
        assert_eq!(ones.rank(), 1);
        assert_eq!(FqMatrix::zeros(&f, 2, 3).rank(), 0);
    }

    #[test]
    fn rowspace_membership() {
        let f = gf(2);
        let m = FqMatrix::from_rows(&f, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        assert!(in_rowspace(&[1, 0, 1], &m).unwrap());
        assert!(!in_rowspace(&[1, 0, 0], &m).unwrap());
        assert_eq!(express_in_rows(&m, &[1, 0, 1]).unwrap(), Some(vec![1, 1]));
        assert!(in_rowspace(&[1, 0], &m).is_err());
    }

    #[test]
    fn solve_identity_and_kernel() {
        let f = gf(3);
        let b = vec![2, 0, 1];
        let s = solve(&FqMatrix::identity(&f, 3), &b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.kernel.is_empty());

        let a = FqMatrix::from_rows(&f, 3, &[vec![1, 2, 0], vec![0, 1, 1]]);
        let s = solve(&a, &[1, 2]).unwrap();
        assert_eq!(a.mul_vec(&s.particular), vec![1, 2]);
        assert_eq!(s.kernel.len(), 1);
        assert!(is_zero(&a.mul_vec(&s.kernel[0])));

        let inconsistent = FqMatrix::from_rows(&f, 2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(solve(&inconsistent, &[0, 1]), Err(LinAlgError::Infeasible));
    }

    #[test]
    fn inverse_round_trip() {
        let f = gf(4);
        let a = FqMatrix::from_rows(&f, 2, &[vec![1, 2], vec![2, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), FqMatrix::identity(&f, 2));
        let singular = FqMatrix::from_rows(&f, 2, &[vec![1, 2], vec![2, 3]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn json_round_trip() {
        let f = gf(4);
        let a = FqMatrix::from_rows(&f, 3, &[vec![0, 1, 2], vec![3, 0, 1]]);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"modulus\":[1,1,1]"));
        let back: FqMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"p":2,"ell":1,"modulus":[0,1],"rows":1,"cols":2,"entries":[1,2]}"#;
        assert!(serde_json::from_str::<FqMatrix>(bad).is_err());
    }
}
