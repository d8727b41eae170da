//! Exact linear algebra over a prime field F_p, p an odd prime.
//!
//! All arithmetic is on canonical residues in `{0, …, p−1}`. Row reduction
//! uses first-nonzero pivoting with pivots scaled to 1, which makes the
//! reduced row-echelon form — and everything built on it, like the canonical
//! subspace representation — fully deterministic.

use crate::budget::EnumerationBudget;
use crate::error::Error;
use crate::Result;

/// An odd prime modulus with element arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

/// Largest supported modulus; keeps products inside `u64` with headroom.
const MAX_MODULUS: u64 = (1 << 31) - 1;

impl PrimeField {
    /// Constructs the field, checking by trial division that `p` is an odd
    /// prime (and small enough for overflow-free `u64` arithmetic).
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 || p > MAX_MODULUS {
            return Err(Error::InvalidModulus(p));
        }
        let mut d = 3;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::InvalidModulus(p));
            }
            d += 2;
        }
        Ok(PrimeField { p })
    }

    /// The modulus `p`.
    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Canonical residue of a (possibly negative) integer.
    pub fn reduce_i64(self, x: i64) -> u64 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        a * b % self.p
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    /// Panics on 0 — inverting zero is a programming error, not bad input.
    pub fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "attempted to invert 0 mod {}", self.p);
        debug_assert!(a < self.p);
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "{} is not invertible mod {}", a, self.p);
        self.reduce_i64(t0)
    }

    /// The residue 2⁻¹, used to symmetrize matrices (p is odd, so it exists).
    pub fn half(self) -> u64 {
        self.inv(2 % self.p)
    }
}

/// A vector with entries in F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldVector {
    field: PrimeField,
    entries: Vec<u64>,
}

impl FieldVector {
    /// Wraps entries, reducing each one mod p.
    pub fn new(field: PrimeField, entries: Vec<u64>) -> Self {
        let p = field.modulus();
        let entries = entries.into_iter().map(|e| e % p).collect();
        FieldVector { field, entries }
    }

    /// Builds a vector from possibly-negative integers.
    pub fn from_ints(field: PrimeField, entries: &[i64]) -> Self {
        FieldVector { field, entries: entries.iter().map(|&e| field.reduce_i64(e)).collect() }
    }

    /// The zero vector of length `n`.
    pub fn zero(field: PrimeField, n: usize) -> Self {
        FieldVector { field, entries: vec![0; n] }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u64) {
        self.entries[i] = value % self.field.modulus();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Standard inner product Σ aᵢbᵢ in F_p.
    pub fn dot(&self, other: &FieldVector) -> u64 {
        assert_eq!(self.len(), other.len(), "dot of unequal lengths");
        let f = self.field;
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn add(&self, other: &FieldVector) -> FieldVector {
        assert_eq!(self.len(), other.len(), "sum of unequal lengths");
        let f = self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        FieldVector { field: f, entries }
    }

    pub fn sub(&self, other: &FieldVector) -> FieldVector {
        assert_eq!(self.len(), other.len(), "difference of unequal lengths");
        let f = self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect();
        FieldVector { field: f, entries }
    }

    pub fn scale(&self, c: u64) -> FieldVector {
        let f = self.field;
        let c = c % f.modulus();
        FieldVector { field: f, entries: self.entries.iter().map(|&a| f.mul(a, c)).collect() }
    }
}

/// Result of row reduction: the reduced matrix, its rank, and pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: FieldMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A row-major matrix with entries in F_p, indexed as `m[[row, col]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl std::ops::Index<[usize; 2]> for FieldMatrix {
    type Output = u64;

    fn index(&self, idx: [usize; 2]) -> &u64 {
        debug_assert!(idx[0] < self.rows && idx[1] < self.cols);
        &self.data[idx[0] * self.cols + idx[1]]
    }
}

impl FieldMatrix {
    /// The zero matrix.
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    /// The n×n identity.
    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FieldMatrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing each one mod p.
    pub fn from_entries(field: PrimeField, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows·cols");
        let data = entries.iter().map(|&e| field.reduce_i64(e)).collect();
        FieldMatrix { field, rows, cols, data }
    }

    /// Stacks vectors as rows. `cols` fixes the ambient dimension so the
    /// empty list is unambiguous.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[FieldVector]) -> Self {
        let mut m = FieldMatrix::zero(field, rows.len(), cols);
        for (i, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row {i} has length {} ≠ {cols}", v.len());
            for j in 0..cols {
                m.set(i, j, v.get(j));
            }
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

    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value % self.field.modulus();
    }

    /// Copies row `i` out as a vector.
    pub fn row(&self, i: usize) -> FieldVector {
        let start = i * self.cols;
        FieldVector { field: self.field, entries: self.data[start..start + self.cols].to_vec() }
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self[[i, j]]);
            }
        }
        t
    }

    /// Matrix–vector product A·x.
    pub fn mul_vector(&self, x: &FieldVector) -> FieldVector {
        assert_eq!(self.cols, x.len(), "A·x dimension mismatch");
        let f = self.field;
        let entries = (0..self.rows).map(|i| self.row(i).dot(x)).collect();
        FieldVector { field: f, entries }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: u64) {
        let f = self.field;
        for j in 0..self.cols {
            let v = f.mul(self[[i, j]], c);
            self.set(i, j, v);
        }
    }

    /// row_i ← row_i − c·row_k
    fn sub_scaled_row(&mut self, i: usize, k: usize, c: u64) {
        let f = self.field;
        for j in 0..self.cols {
            let v = f.sub(self[[i, j]], f.mul(c, self[[k, j]]));
            self.set(i, j, v);
        }
    }

    /// Reduced row-echelon form with first-nonzero pivoting, pivots scaled
    /// to 1 and cleared above and below. Deterministic, hence canonical.
    pub fn reduced_row_echelon(&self) -> Echelon {
        let mut m = self.clone();
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| m[[i, c]] != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m[[r, c]]);
            m.scale_row(r, inv);
            for i in 0..self.rows {
                if i != r && m[[i, c]] != 0 {
                    let coeff = m[[i, c]];
                    m.sub_scaled_row(i, r, coeff);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, rank: r, pivots }
    }

    /// Rank over F_p.
    pub fn rank(&self) -> usize {
        self.reduced_row_echelon().rank
    }

    /// Some solution of A·x = b when the system is consistent, with free
    /// variables set to 0; `None` when inconsistent.
    pub fn solve(&self, b: &FieldVector) -> Result<Option<FieldVector>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "solve: {} rows vs right-hand side of length {}",
                self.rows,
                b.len()
            )));
        }
        let mut aug = FieldMatrix::zero(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self[[i, j]]);
            }
            aug.set(i, self.cols, b.get(i));
        }
        let ech = aug.reduced_row_echelon();
        if ech.pivots.contains(&self.cols) {
            return Ok(None); // a pivot in the augmented column: 0 = 1 row
        }
        let mut x = FieldVector::zero(self.field, self.cols);
        for (i, &pc) in ech.pivots.iter().enumerate() {
            x.set(pc, ech.matrix[[i, self.cols]]);
        }
        Ok(Some(x))
    }
}

/// True iff the vectors are linearly independent over F_p (the stacked
/// matrix has full row rank). The empty list is independent.
pub fn is_independent(vectors: &[FieldVector]) -> bool {
    let Some(first) = vectors.first() else {
        return true;
    };
    let m = FieldMatrix::from_rows(first.field(), first.len(), vectors);
    m.rank() == vectors.len()
}

/// `p^n` as a budget-checked point count.
pub fn vector_count(field: PrimeField, n: usize, budget: EnumerationBudget) -> Result<u64> {
    budget.check_pow(field.modulus(), n as u32)
}

/// The `index`-th vector of F_p^n in lexicographic order (first coordinate
/// most significant): index 0 is the zero vector, index p^n − 1 is all p−1.
pub fn unrank_vector(field: PrimeField, n: usize, index: u64) -> FieldVector {
    let p = field.modulus();
    let mut entries = vec![0u64; n];
    let mut idx = index;
    for e in entries.iter_mut().rev() {
        *e = idx % p;
        idx /= p;
    }
    debug_assert_eq!(idx, 0, "vector index out of range");
    FieldVector { field, entries }
}

/// The lexicographic index of a vector (inverse of [`unrank_vector`]).
pub fn vector_index(v: &FieldVector) -> u64 {
    let p = v.field().modulus();
    v.entries().iter().fold(0, |acc, &e| acc * p + e)
}

/// Iterator over all of F_p^n in lexicographic order.
pub struct VectorIter {
    field: PrimeField,
    n: usize,
    next: u64,
    total: u64,
}

impl Iterator for VectorIter {
    type Item = FieldVector;

    fn next(&mut self) -> Option<FieldVector> {
        if self.next == self.total {
            return None;
        }
        let v = unrank_vector(self.field, self.n, self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

/// Enumerates all p^n vectors exactly once, lexicographically, refusing
/// when p^n exceeds the budget.
pub fn enumerate_vectors(
    field: PrimeField,
    n: usize,
    budget: EnumerationBudget,
) -> Result<VectorIter> {
    let total = vector_count(field, n, budget)?;
    Ok(VectorIter { field, n, next: 0, total })
}
