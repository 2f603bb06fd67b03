//! Prime field arithmetic and dense linear algebra over GF(p).
//!
//! Residues are stored as `u32` in `[0, p)`. Matrices carry their field so that
//! operations on operands of different characteristic fail instead of coercing.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest characteristic accepted. Products of two residues must fit in `u64`
/// with room to spare, and the presentation format never needs more.
pub const MAX_CHARACTERISTIC: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("characteristic {0} is not a prime below 2^16")]
    BadCharacteristic(u32),
    #[error("characteristic mismatch: {0} vs {1}")]
    CharacteristicMismatch(u32, u32),
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, LinAlgError> {
        if !is_prime(p) || p >= MAX_CHARACTERISTIC {
            return Err(LinAlgError::BadCharacteristic(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, value: i64) -> u32 {
        value.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by Fermat. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in GF({})", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `(-1)^k` as a residue.
    #[inline]
    pub fn sign(&self, k: u32) -> u32 {
        if k.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }

    pub fn element(&self, value: i64) -> FieldElement {
        FieldElement {
            residue: self.reduce(value),
            p: self.p,
        }
    }

    /// `dst += c * src`, entrywise.
    pub fn axpy(&self, dst: &mut [u32], c: u32, src: &[u32]) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = self.add(*d, self.mul(c, s));
            }
        }
    }

    pub fn scale(&self, row: &mut [u32], c: u32) {
        for x in row.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

/// A single element of GF(p) that remembers its characteristic.
///
/// The arithmetic operators panic when the characteristics differ; use the
/// `try_*` methods where the operands come from untrusted input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    residue: u32,
    p: u32,
}

impl FieldElement {
    pub fn residue(&self) -> u32 {
        self.residue
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    fn check(&self, other: &Self) -> Result<PrimeField, LinAlgError> {
        if self.p != other.p {
            return Err(LinAlgError::CharacteristicMismatch(self.p, other.p));
        }
        Ok(self.field())
    }

    pub fn try_add(self, other: Self) -> Result<Self, LinAlgError> {
        let f = self.check(&other)?;
        Ok(FieldElement {
            residue: f.add(self.residue, other.residue),
            p: self.p,
        })
    }

    pub fn try_mul(self, other: Self) -> Result<Self, LinAlgError> {
        let f = self.check(&other)?;
        Ok(FieldElement {
            residue: f.mul(self.residue, other.residue),
            p: self.p,
        })
    }

    pub fn inverse(self) -> Option<Self> {
        (!self.is_zero()).then(|| FieldElement {
            residue: self.field().inv(self.residue),
            p: self.p,
        })
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("mixed characteristics")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        self.try_add(-rhs).expect("mixed characteristics")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("mixed characteristics")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement {
            residue: self.field().neg(self.residue),
            p: self.p,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// Dense row-major matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from rows of residues; entries are reduced mod p.
    pub fn from_rows(
        field: PrimeField,
        cols: usize,
        rows: &[Vec<u32>],
    ) -> Result<Self, LinAlgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinAlgError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| x % field.characteristic()));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            self.data.swap(a * c + j, b * c + j);
        }
    }

    /// Reduced row echelon form and sorted pivot columns.
    ///
    /// Pivots are searched column by column from the left; within a column the
    /// topmost candidate row wins, so the result depends only on the input.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..cols {
            if next == self.rows {
                break;
            }
            let Some(found) = (next..self.rows).find(|&r| self.data[r * cols + col] != 0) else {
                continue;
            };
            self.swap_rows(next, found);
            let inv = f.inv(self.data[next * cols + col]);
            f.scale(&mut self.data[next * cols..(next + 1) * cols], inv);
            let pivot_row = self.row(next).to_vec();
            for r in 0..self.rows {
                if r == next {
                    continue;
                }
                let c = self.data[r * cols + col];
                if c != 0 {
                    f.axpy(
                        &mut self.data[r * cols..(r + 1) * cols],
                        f.neg(c),
                        &pivot_row,
                    );
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// The nonzero rows of the reduced echelon form.
    pub fn row_space_basis(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, coeffs: &[u32]) -> Result<Vec<u32>, LinAlgError> {
        if coeffs.len() != self.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                got: coeffs.len(),
            });
        }
        let mut out = vec![0; self.cols];
        for (r, &c) in coeffs.iter().enumerate() {
            self.field.axpy(&mut out, c, self.row(r));
        }
        Ok(out)
    }
}

/// Pairs a matrix with a vector and asks whether the vector lies in the row
/// space. On success, returns coefficients `c` with `c * span = v`; free
/// coefficients are set to zero. `Ok(None)` means "not in span".
pub fn solve_membership(span: &Matrix, v: &[u32]) -> Result<Option<Vec<u32>>, LinAlgError> {
    if v.len() != span.cols {
        return Err(LinAlgError::DimensionMismatch {
            expected: span.cols,
            got: v.len(),
        });
    }
    let f = span.field;
    // Solve span^T * c^T = v^T through the augmented system [span^T | v].
    let n = span.rows;
    let mut aug = Matrix::zero(f, span.cols, n + 1);
    for (r, &x) in v.iter().enumerate() {
        for c in 0..n {
            aug.data[r * (n + 1) + c] = span.get(c, r);
        }
        aug.data[r * (n + 1) + n] = x % f.characteristic();
    }
    let pivots = aug.rref_in_place();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut coeffs = vec![0; n];
    for (i, &pc) in pivots.iter().enumerate() {
        coeffs[pc] = aug.get(i, n);
    }
    Ok(Some(coeffs))
}

/// Incrementally maintained echelon basis of a subspace of GF(p)^n.
///
/// Each stored row has a leading 1 at its pivot and zeros at the pivots of all
/// earlier rows, so reducing a vector against the rows in insertion order
/// clears every pivot.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: PrimeField,
    len: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: PrimeField, len: usize) -> Self {
        EchelonBasis {
            field,
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.len
    }

    /// Stored rows in insertion order.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn reduce(&self, v: &mut [u32]) {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                self.field.axpy(v, self.field.neg(c), row);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.len);
        if self.is_full() {
            return false;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(w[pc]);
        self.field.scale(&mut w, inv);
        self.rows.push(w);
        self.pivots.push(pc);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_composite_and_huge_characteristic() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(65537).is_err());
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn field_element_ops_stay_reduced() {
        let f = gf(7);
        let a = f.element(-1);
        assert_eq!(a.residue(), 6);
        assert_eq!((a * a).residue(), 1);
        assert_eq!((a + f.element(3)).residue(), 2);
        assert_eq!(a.inverse().unwrap().residue(), 6);
        assert!(f.element(14).inverse().is_none());
    }

    #[test]
    fn mixed_characteristic_is_an_error() {
        let a = gf(2).element(1);
        let b = gf(3).element(1);
        assert_eq!(a.try_add(b), Err(LinAlgError::CharacteristicMismatch(2, 3)));
    }

    #[test]
    fn rref_of_empty_matrix() {
        let m = Matrix::zero(gf(2), 0, 3);
        let (r, piv) = m.rref();
        assert_eq!(r, m);
        assert!(piv.is_empty());
    }

    #[test]
    fn rref_duplicate_rows_gf2() {
        let m = Matrix::from_rows(gf(2), 2, &[vec![1, 1], vec![1, 1]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(r.row_vecs(), vec![vec![1, 1], vec![0, 0]]);
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn rref_gf3_dependent_rows() {
        let m = Matrix::from_rows(gf(3), 2, &[vec![1, 2], vec![2, 1]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(r.row_vecs(), vec![vec![1, 2], vec![0, 0]]);
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn membership_examples() {
        let id = Matrix::identity(gf(2), 2);
        assert_eq!(solve_membership(&id, &[1, 0]).unwrap(), Some(vec![1, 0]));
        let span = Matrix::from_rows(gf(2), 2, &[vec![1, 1]]).unwrap();
        assert_eq!(solve_membership(&span, &[0, 1]).unwrap(), None);
        assert_eq!(solve_membership(&span, &[1, 1]).unwrap(), Some(vec![1]));
        assert!(matches!(
            solve_membership(&span, &[1]),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn membership_sets_free_coefficients_to_zero() {
        let span = Matrix::from_rows(gf(3), 2, &[vec![1, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(
            solve_membership(&span, &[2, 1]).unwrap(),
            Some(vec![2, 0, 1])
        );
    }

    #[test]
    fn echelon_basis_tracks_rank() {
        let mut e = EchelonBasis::new(gf(3), 3);
        assert!(e.insert(&[0, 1, 2]));
        assert!(e.insert(&[1, 1, 0]));
        assert!(!e.insert(&[1, 2, 2]));
        assert!(e.contains(&[2, 0, 2]));
        assert_eq!(e.rank(), 2);
    }
}
