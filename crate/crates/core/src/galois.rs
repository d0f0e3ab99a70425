//! Arithmetic and dense linear algebra over a prime field `F_q`.
//!
//! Elements are stored as `u32` residues in `[0, q)`. Every vector and matrix
//! carries its modulus, and binary operations reject operands with different
//! moduli.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(q: u32) -> Result<()> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(Error::NotPrime(q))
    }
}

fn check_same(a: u32, b: u32) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch(a, b))
    }
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, q: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % q as u64) as u32
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, q: u32) -> u32 {
    add_mod(a, q - b, q)
}

#[inline]
pub(crate) fn neg_mod(a: u32, q: u32) -> u32 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

/// Multiplicative inverse by Fermat's little theorem; `a` must be nonzero.
pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    let mut base = a as u64 % q as u64;
    let mut exp = q as u64 - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q as u64;
        }
        base = base * base % q as u64;
        exp >>= 1;
    }
    acc as u32
}

/// A single element of `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    modulus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the left operand; the right operand only fixes the modulus.
    Inv,
}

impl FieldScalar {
    pub fn new(value: u32, modulus: u32) -> Result<Self> {
        check_prime(modulus)?;
        if value >= modulus {
            return Err(Error::OutOfRange { value, modulus });
        }
        Ok(Self { value, modulus })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn add(self, rhs: Self) -> Result<Self> {
        check_same(self.modulus, rhs.modulus)?;
        Ok(self.with(add_mod(self.value, rhs.value, self.modulus)))
    }

    pub fn sub(self, rhs: Self) -> Result<Self> {
        check_same(self.modulus, rhs.modulus)?;
        Ok(self.with(sub_mod(self.value, rhs.value, self.modulus)))
    }

    pub fn mul(self, rhs: Self) -> Result<Self> {
        check_same(self.modulus, rhs.modulus)?;
        Ok(self.with(mul_mod(self.value, rhs.value, self.modulus)))
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.with(inv_mod(self.value, self.modulus)))
    }

    fn with(self, value: u32) -> Self {
        Self {
            value,
            modulus: self.modulus,
        }
    }
}

pub fn field_arith(a: FieldScalar, b: FieldScalar, op: ArithOp) -> Result<FieldScalar> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Inv => {
            check_same(a.modulus, b.modulus)?;
            a.inv()
        }
    }
}

/// A vector in `F_q^len`. Serializes as a plain array of residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    modulus: u32,
    entries: Vec<u32>,
}

impl Serialize for FieldVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(&self.entries)
    }
}

impl FieldVector {
    pub fn new(entries: Vec<u32>, modulus: u32) -> Result<Self> {
        check_prime(modulus)?;
        if let Some(&value) = entries.iter().find(|&&v| v >= modulus) {
            return Err(Error::OutOfRange { value, modulus });
        }
        Ok(Self { modulus, entries })
    }

    pub(crate) fn from_raw(entries: Vec<u32>, modulus: u32) -> Self {
        debug_assert!(entries.iter().all(|&v| v < modulus));
        Self { modulus, entries }
    }

    pub fn zeros(len: usize, modulus: u32) -> Self {
        Self {
            modulus,
            entries: vec![0; len],
        }
    }

    /// The `index`-th vector of `F_q^len` in lexicographic order (first
    /// coordinate most significant).
    pub fn from_index(mut index: u64, len: usize, modulus: u32) -> Self {
        let mut entries = vec![0u32; len];
        for slot in entries.iter_mut().rev() {
            *slot = (index % modulus as u64) as u32;
            index /= modulus as u64;
        }
        Self { modulus, entries }
    }

    /// Iterates all of `F_q^len` in lexicographic order.
    pub fn all(len: usize, modulus: u32) -> impl Iterator<Item = FieldVector> {
        let count = (modulus as u64).pow(len as u32);
        (0..count).map(move |i| FieldVector::from_index(i, len, modulus))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> FieldScalar {
        FieldScalar {
            value: self.entries[i],
            modulus: self.modulus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn check_compatible(&self, rhs: &Self) -> Result<()> {
        check_same(self.modulus, rhs.modulus)?;
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                rhs.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(self.zip_with(rhs, add_mod))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(self.zip_with(rhs, sub_mod))
    }

    fn zip_with(&self, rhs: &Self, f: fn(u32, u32, u32) -> u32) -> Self {
        let q = self.modulus;
        Self {
            modulus: q,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b, q))
                .collect(),
        }
    }
}

/// A dense row-major matrix over `F_q`. Zero rows or columns are allowed so
/// that degenerate hash splits stay representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    modulus: u32,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FieldMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>, modulus: u32) -> Result<Self> {
        check_prime(modulus)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(&value) = entries.iter().find(|&&v| v >= modulus) {
            return Err(Error::OutOfRange { value, modulus });
        }
        Ok(Self {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<u32>], modulus: u32) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat(), modulus)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, entries: Vec<u32>, modulus: u32) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            modulus,
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize, modulus: u32) -> Self {
        Self::from_raw(rows, cols, vec![0; rows * cols], modulus)
    }

    pub fn identity(size: usize, modulus: u32) -> Self {
        let mut m = Self::zeros(size, size, modulus);
        for i in 0..size {
            m.entries[i * size + i] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) -> Result<()> {
        if value >= self.modulus {
            return Err(Error::OutOfRange {
                value,
                modulus: self.modulus,
            });
        }
        self.entries[r * self.cols + c] = value;
        Ok(())
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let mut seen = vec![false; self.rows];
        for &p in perm {
            if p >= self.rows || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(self.select_rows(perm))
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Result<Self> {
        Ok(self.transpose().permute_rows(perm)?.transpose())
    }

    pub(crate) fn select_rows(&self, idx: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            entries.extend_from_slice(self.row(r));
        }
        Self::from_raw(idx.len(), self.cols, entries, self.modulus)
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        check_same(self.modulus, rhs.modulus)?;
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch("hstack row counts".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + rhs.cols));
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(rhs.row(r));
        }
        Ok(Self::from_raw(
            self.rows,
            self.cols + rhs.cols,
            entries,
            self.modulus,
        ))
    }

    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        check_same(self.modulus, v.modulus)?;
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(FieldVector::from_raw(
            self.mul_slice(v.entries()),
            self.modulus,
        ))
    }

    /// Unchecked product with a raw residue slice of length `cols`.
    pub(crate) fn mul_slice(&self, v: &[u32]) -> Vec<u32> {
        let q = self.modulus as u64;
        (0..self.rows)
            .map(|r| {
                let acc = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % q);
                acc as u32
            })
            .collect()
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        check_same(self.modulus, rhs.modulus)?;
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.modulus;
        let mut out = Self::zeros(self.rows, rhs.cols, q);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = 0u32;
                for t in 0..self.cols {
                    acc = add_mod(acc, mul_mod(self.get(r, t), rhs.get(t, c), q), q);
                }
                out.entries[r * rhs.cols + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// Pivot columns of the reduced row echelon form, i.e. a maximal set of
    /// linearly independent columns chosen greedily from the left.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut work = self.entries.clone();
        reduce_rows(&mut work, self.rows, self.cols, self.cols, self.modulus)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        reduce_rows(&mut work, self.rows, self.cols, self.cols, self.modulus).len()
    }

    /// Finds `v` with `self * v = x`, or `None` when `x` is outside the column
    /// space. Free variables are set to zero, so the answer is deterministic.
    pub fn solve(&self, x: &FieldVector) -> Result<Option<FieldVector>> {
        check_same(self.modulus, x.modulus)?;
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}-row matrix against length-{} vector",
                self.rows,
                x.len()
            )));
        }
        let width = self.cols + 1;
        let mut aug = Vec::with_capacity(self.rows * width);
        for r in 0..self.rows {
            aug.extend_from_slice(self.row(r));
            aug.push(x.entries[r]);
        }
        let pivots = reduce_rows(&mut aug, self.rows, width, self.cols, self.modulus);
        // A zero row with nonzero right-hand side means no solution.
        for r in pivots.len()..self.rows {
            if aug[r * width + self.cols] != 0 {
                return Ok(None);
            }
        }
        let mut v = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = aug[r * width + self.cols];
        }
        Ok(Some(FieldVector::from_raw(v, self.modulus)))
    }

    /// A basis of the right null space `{v : self * v = 0}`, returned as the
    /// columns of a `cols x dim` matrix.
    pub fn null_space(&self) -> Self {
        let q = self.modulus;
        let mut work = self.entries.clone();
        let pivots = reduce_rows(&mut work, self.rows, self.cols, self.cols, q);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len(), q);
        for (j, &f) in free.iter().enumerate() {
            basis.entries[f * free.len() + j] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                basis.entries[p * free.len() + j] = neg_mod(work[r * self.cols + f], q);
            }
        }
        basis
    }

    /// Serializes to the matrix text format: a `q rows cols` header followed
    /// by one line of space-separated residues per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.modulus, self.rows, self.cols);
        for r in 0..self.rows {
            let mut first = true;
            for &v in self.row(r) {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims = parse_numbers(header)?;
        let [q, rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let (rows, cols) = (rows as usize, cols as usize);
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {r}")))?;
            let row = parse_numbers(line)?;
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing content after last row".into()));
        }
        Self::new(rows, cols, entries, q)
    }
}

fn parse_numbers(line: &str) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        })
        .collect()
}

/// Reduces a row-major `rows x width` buffer to reduced row echelon form,
/// pivoting only within the first `pivot_cols` columns. Returns the pivot
/// column of each nonzero row, in order.
fn reduce_rows(m: &mut [u32], rows: usize, width: usize, pivot_cols: usize, q: u32) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i * width + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..width {
                m.swap(p * width + j, r * width + j);
            }
        }
        let inv = inv_mod(m[r * width + c], q);
        for j in 0..width {
            m[r * width + j] = mul_mod(m[r * width + j], inv, q);
        }
        for i in 0..rows {
            let factor = m[i * width + c];
            if i == r || factor == 0 {
                continue;
            }
            for j in 0..width {
                let sub = mul_mod(factor, m[r * width + j], q);
                m[i * width + j] = sub_mod(m[i * width + j], sub, q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: u32, q: u32) -> FieldScalar {
        FieldScalar::new(v, q).unwrap()
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(field_arith(s(1, 2), s(1, 2), ArithOp::Add).unwrap().value(), 0);
        assert_eq!(field_arith(s(3, 5), s(0, 5), ArithOp::Inv).unwrap().value(), 2);
        assert_eq!(field_arith(s(2, 3), s(2, 3), ArithOp::Mul).unwrap().value(), 1);
        assert_eq!(s(1, 7).sub(s(3, 7)).unwrap().value(), 5);
    }

    #[test]
    fn scalar_errors() {
        assert_eq!(s(1, 2).add(s(1, 3)), Err(Error::ModulusMismatch(2, 3)));
        assert_eq!(s(0, 5).inv(), Err(Error::InverseOfZero));
        assert_eq!(FieldScalar::new(1, 4), Err(Error::NotPrime(4)));
        assert!(matches!(FieldScalar::new(5, 5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn every_nonzero_has_an_inverse() {
        for q in [2, 3, 5, 7, 11, 13, 251] {
            for a in 1..q {
                assert_eq!(mul_mod(a, inv_mod(a, q), q), 1, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(2, 2).rank(), 2);
        assert_eq!(FieldMatrix::zeros(3, 3, 2).rank(), 0);
        let m = FieldMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 2).unwrap();
        assert_eq!(m.rank(), 2);
        // Same rows are independent over F_3: det = 2.
        let m3 = FieldMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3).unwrap();
        assert_eq!(m3.rank(), 3);
    }

    #[test]
    fn solve_examples() {
        let x = FieldVector::new(vec![1, 0, 1], 2).unwrap();
        assert_eq!(FieldMatrix::identity(3, 2).solve(&x).unwrap(), Some(x.clone()));
        assert_eq!(FieldMatrix::zeros(3, 3, 2).solve(&x).unwrap(), None);
        let rep = FieldMatrix::from_rows(&[vec![1], vec![1], vec![1]], 2).unwrap();
        let ones = FieldVector::new(vec![1, 1, 1], 2).unwrap();
        assert_eq!(
            rep.solve(&ones).unwrap(),
            Some(FieldVector::new(vec![1], 2).unwrap())
        );
        assert_eq!(rep.solve(&x).unwrap(), None);
        assert!(matches!(
            rep.solve(&FieldVector::zeros(2, 2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn null_space_is_annihilated() {
        let h = FieldMatrix::from_rows(
            &[
                vec![1, 0, 1, 0, 1, 0, 1],
                vec![0, 1, 1, 0, 0, 1, 1],
                vec![0, 0, 0, 1, 1, 1, 1],
            ],
            2,
        )
        .unwrap();
        let g = h.null_space();
        assert_eq!((g.rows(), g.cols()), (7, 4));
        assert_eq!(g.rank(), 4);
        assert!(h.mul(&g).unwrap().is_zero());
    }

    #[test]
    fn text_format_round_trip() {
        let m = FieldMatrix::from_rows(&[vec![1, 0, 2], vec![4, 3, 0]], 5).unwrap();
        let text = m.to_text();
        assert_eq!(text, "5 2 3\n1 0 2\n4 3 0\n");
        assert_eq!(FieldMatrix::parse_text(&text).unwrap(), m);
        let empty = FieldMatrix::zeros(0, 3, 2);
        assert_eq!(FieldMatrix::parse_text(&empty.to_text()).unwrap(), empty);
    }

    #[test]
    fn text_format_rejects_malformed() {
        assert!(FieldMatrix::parse_text("").is_err());
        assert!(FieldMatrix::parse_text("2 2 2\n1 0\n").is_err());
        assert!(FieldMatrix::parse_text("2 1 2\n1 2\n").is_err());
        assert!(FieldMatrix::parse_text("4 1 1\n1\n").is_err());
        assert!(FieldMatrix::parse_text("2 1 2\n1 0 1\n").is_err());
    }

    /// Exhaustive round trip for invertible square matrices.
    #[test]
    fn invertible_solve_round_trips_exhaustively() {
        for (q, size) in [(2u32, 3usize), (2, 4), (3, 2), (5, 2)] {
            let cells = (size * size) as u32;
            let total = (q as u64).pow(cells);
            let mut checked = 0;
            for idx in (0..total).step_by(7) {
                let m = FieldMatrix::from_raw(
                    size,
                    size,
                    FieldVector::from_index(idx, size * size, q).entries,
                    q,
                );
                if m.rank() != size {
                    continue;
                }
                checked += 1;
                for x in FieldVector::all(size, q) {
                    let v = m.solve(&x).unwrap().expect("invertible");
                    assert_eq!(m.mul_vec(&v).unwrap(), x);
                }
            }
            assert!(checked > 0);
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = (FieldMatrix, Vec<usize>, Vec<usize>)> {
        (1usize..6, 1usize..6, prop::sample::select(vec![2u32, 3, 5])).prop_flat_map(
            |(rows, cols, q)| {
                (
                    prop::collection::vec(0..q, rows * cols),
                    Just(Vec::from_iter(0..rows)).prop_shuffle(),
                    Just(Vec::from_iter(0..cols)).prop_shuffle(),
                )
                    .prop_map(move |(e, pr, pc)| {
                        (FieldMatrix::new(rows, cols, e, q).unwrap(), pr, pc)
                    })
            },
        )
    }

    proptest! {
        #[test]
        fn rank_is_permutation_invariant((m, pr, pc) in matrix_strategy()) {
            let permuted = m.permute_rows(&pr).unwrap().permute_cols(&pc).unwrap();
            prop_assert_eq!(permuted.rank(), m.rank());
            prop_assert_eq!(m.transpose().rank(), m.rank());
        }

        #[test]
        fn solve_returns_preimage_of_column_space((m, _pr, _pc) in matrix_strategy(), seed in any::<u64>()) {
            let q = m.modulus();
            let v = FieldVector::from_index(seed % (q as u64).pow(m.cols() as u32), m.cols(), q);
            let x = m.mul_vec(&v).unwrap();
            let w = m.solve(&x).unwrap().expect("x is in the column space");
            prop_assert_eq!(m.mul_vec(&w).unwrap(), x);
        }
    }
}
