//! Symmetric quadratic forms over F_p: evaluation, the degree-2 Veronese
//! correspondence, Gauss sums, rank censuses, and quadric point sets.
//!
//! The pair coordinates (i,j), i ≤ j are ordered lexicographically. A form
//! M and its coordinate vector v_M are paired so that dᵀMd = φ(d)·v_M,
//! where φ is the literal entrywise Veronese map d ↦ (d_i d_j); the
//! factor 2 this identity forces sits on the off-diagonal entries of v_M.

use crate::budget::EnumerationBudget;
use crate::error::Error;
use crate::exec;
use crate::field::{unrank_vector, vector_count, FieldMatrix, FieldVector, PrimeField};
use crate::progressions::{DenseSet, Domain};
use crate::Result;
use num_complex::Complex64;
use rand::Rng;

/// n(n+1)/2: the number of pairs (i,j) with i ≤ j < n.
pub fn triangle_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Flat index of the pair (i,j), i ≤ j, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    assert!(i <= j && j < n, "pair ({i},{j}) out of range for n = {n}");
    // Rows 0..i contribute n−t entries each; then offset j−i within row i.
    i * (2 * n - i + 1) / 2 + (j - i)
}

/// Inverse of [`pair_index`].
pub fn index_pair(n: usize, t: usize) -> (usize, usize) {
    assert!(t < triangle_dim(n), "triangle index {t} out of range for n = {n}");
    let mut i = 0;
    let mut base = 0;
    while base + (n - i) <= t {
        base += n - i;
        i += 1;
    }
    (i, i + (t - base))
}

/// The dimension n with n(n+1)/2 = `len`, if one exists.
pub fn dimension_from_triangle(len: usize) -> Result<usize> {
    let mut n = 0;
    while triangle_dim(n) < len {
        n += 1;
    }
    if triangle_dim(n) == len {
        Ok(n)
    } else {
        Err(Error::Dimension(format!("{len} is not a triangular number n(n+1)/2")))
    }
}

/// A symmetric n×n matrix over F_p, stored as its upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    field: PrimeField,
    n: usize,
    upper: Vec<u64>,
}

impl SymmetricForm {
    /// The zero form.
    pub fn zero(field: PrimeField, n: usize) -> Self {
        SymmetricForm { field, n, upper: vec![0; triangle_dim(n)] }
    }

    /// The identity form Σ d_i².
    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = SymmetricForm::zero(field, n);
        for i in 0..n {
            m.set_entry(i, i, 1);
        }
        m
    }

    /// Builds a form from upper-triangle entries in pair order.
    pub fn from_upper(field: PrimeField, n: usize, upper: &[i64]) -> Self {
        assert_eq!(upper.len(), triangle_dim(n), "upper triangle has n(n+1)/2 entries");
        SymmetricForm { field, n, upper: upper.iter().map(|&e| field.reduce_i64(e)).collect() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry M_{ij} with symmetric access (arguments in either order).
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.upper[pair_index(self.n, a, b)]
    }

    /// Sets M_{ij} (and by symmetry M_{ji}).
    pub fn set_entry(&mut self, i: usize, j: usize, value: u64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.upper[pair_index(self.n, a, b)] = value % self.field.modulus();
    }

    /// The full n×n matrix.
    pub fn matrix(&self) -> FieldMatrix {
        let mut m = FieldMatrix::zero(self.field, self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.entry(i, j));
            }
        }
        m
    }

    /// Rank of the form as a matrix over F_p.
    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }

    /// dᵀMd on raw residue entries (no allocation; inner-loop form).
    pub fn evaluate_entries(&self, d: &[u64]) -> u64 {
        assert_eq!(d.len(), self.n, "form dimension mismatch");
        let f = self.field;
        let mut acc = 0;
        let mut t = 0;
        for i in 0..self.n {
            let di = d[i];
            if di != 0 {
                // Diagonal term M_ii·d_i²; off-diagonal pairs appear twice.
                acc = f.add(acc, f.mul(f.mul(self.upper[t], di), di));
                for j in i + 1..self.n {
                    let m = self.upper[t + (j - i)];
                    if m != 0 && d[j] != 0 {
                        let term = f.mul(f.mul(m, di), d[j]);
                        acc = f.add(acc, f.add(term, term));
                    }
                }
            }
            t += self.n - i;
        }
        acc
    }

    /// dᵀMd mod p.
    pub fn evaluate(&self, d: &FieldVector) -> u64 {
        self.evaluate_entries(d.entries())
    }
}

/// The Veronese image φ(d) = (d_i d_j)_{i ≤ j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VeroneseVector(FieldVector);

impl VeroneseVector {
    pub fn vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn into_vector(self) -> FieldVector {
        self.0
    }
}

/// A coordinate vector v_M of a symmetric form, same pair indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormVector(FieldVector);

impl FormVector {
    /// Wraps a vector, checking its length is triangular.
    pub fn new(v: FieldVector) -> Result<Self> {
        dimension_from_triangle(v.len())?;
        Ok(FormVector(v))
    }

    pub fn vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn into_vector(self) -> FieldVector {
        self.0
    }
}

/// φ(d): entry at pair (i,j) is d_i·d_j. Zero exactly when d = 0 (the
/// diagonal carries d_i²).
pub fn veronese(d: &FieldVector) -> VeroneseVector {
    let f = d.field();
    let n = d.len();
    let mut out = FieldVector::zero(f, triangle_dim(n));
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            out.set(t, f.mul(d.get(i), d.get(j)));
            t += 1;
        }
    }
    VeroneseVector(out)
}

/// M′ = (M + Mᵀ)/2, the symmetric form with the same values dᵀM′d = dᵀMd.
pub fn symmetrize(m: &FieldMatrix) -> Result<SymmetricForm> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension(format!("symmetrize of {}×{} matrix", m.rows(), m.cols())));
    }
    let f = m.field();
    let half = f.half();
    let n = m.rows();
    let mut out = SymmetricForm::zero(f, n);
    for i in 0..n {
        for j in i..n {
            out.set_entry(i, j, f.mul(f.add(m[[i, j]], m[[j, i]]), half));
        }
    }
    Ok(out)
}

/// v_M: diagonal entries M_ii, off-diagonal entries 2·M_ij, so that
/// φ(d)·v_M = dᵀMd for every d.
pub fn vec_of_form(m: &SymmetricForm) -> FormVector {
    let f = m.field();
    let n = m.dim();
    let mut v = FieldVector::zero(f, triangle_dim(n));
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            let e = m.entry(i, j);
            v.set(t, if i == j { e } else { f.add(e, e) });
            t += 1;
        }
    }
    FormVector(v)
}

/// Exact inverse of [`vec_of_form`]: divide off-diagonal coordinates by 2.
pub fn form_of_vec(v: &FormVector) -> SymmetricForm {
    let f = v.0.field();
    let n = dimension_from_triangle(v.0.len()).expect("checked at FormVector construction");
    let half = f.half();
    let mut m = SymmetricForm::zero(f, n);
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            let e = v.0.get(t);
            m.set_entry(i, j, if i == j { e } else { f.mul(e, half) });
            t += 1;
        }
    }
    m
}

/// Histogram of form values: slot t counts the x ∈ F_p^n with xᵀMx = t.
///
/// This is the common exact core of [`gauss_sum`] and
/// [`quadric_density_exact`]; the enumeration is partitioned into fixed
/// chunks whose integer histograms are summed, so the result is identical
/// at any worker count.
pub fn value_histogram(m: &SymmetricForm, budget: EnumerationBudget) -> Result<Vec<u64>> {
    let f = m.field();
    let p = f.modulus();
    let total = vector_count(f, m.dim(), budget)?;
    let hist = exec::histogram_chunked(total, exec::DEFAULT_CHUNK, p as usize, |start, end, h| {
        let mut digits = unrank_vector(f, m.dim(), start).entries().to_vec();
        for idx in start..end {
            if idx != start {
                // Odometer step through lexicographic order.
                for d in digits.iter_mut().rev() {
                    *d += 1;
                    if *d == p {
                        *d = 0;
                    } else {
                        break;
                    }
                }
            }
            h[m.evaluate_entries(&digits) as usize] += 1;
        }
    });
    Ok(hist)
}

/// |E_x ω^{xᵀMx}| with ω = exp(2πi/p), by exhaustive summation.
pub fn gauss_sum(m: &SymmetricForm, budget: EnumerationBudget) -> Result<f64> {
    let hist = value_histogram(m, budget)?;
    let p = m.field().modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    for (t, &count) in hist.iter().enumerate() {
        let angle = 2.0 * std::f64::consts::PI * t as f64 / p as f64;
        sum += Complex64::from_polar(count as f64, angle);
    }
    let points: u64 = hist.iter().sum();
    Ok(sum.norm() / points as f64)
}

/// The magnitude the Gauss-sum law predicts: p^{−rank(M)/2}.
pub fn gauss_sum_predicted(m: &SymmetricForm) -> f64 {
    (m.field().modulus() as f64).powf(-(m.rank() as f64) / 2.0)
}

/// Counts all n×n matrices over F_p by rank: slot r holds the number of
/// matrices of rank exactly r. Enumerates all p^{n²} matrices.
pub fn rank_census(field: PrimeField, n: usize, budget: EnumerationBudget) -> Result<Vec<u64>> {
    let total = budget.check_pow(field.modulus(), (n * n) as u32)?;
    let census =
        exec::histogram_chunked(total, exec::DEFAULT_CHUNK, n + 1, |start, end, h| {
            for idx in start..end {
                let entries = unrank_vector(field, n * n, idx);
                let mut m = FieldMatrix::zero(field, n, n);
                for i in 0..n {
                    for j in 0..n {
                        m.set(i, j, entries.get(i * n + j));
                    }
                }
                h[m.rank()] += 1;
            }
        });
    Ok(census)
}

/// The number of n×n matrices of rank at most r, with the coarse upper
/// bound p^{2nr} it is compared against.
pub fn count_rank_at_most(
    field: PrimeField,
    n: usize,
    r: usize,
    budget: EnumerationBudget,
) -> Result<(u64, u128)> {
    let census = rank_census(field, n, budget)?;
    let count = census.iter().take(r.min(n) + 1).sum();
    let mut bound: u128 = 1;
    for _ in 0..2 * n * r {
        bound = bound.checked_mul(field.modulus() as u128).expect("rank bound overflows u128");
    }
    Ok((count, bound))
}

/// Density measurement of the quadric A_M = {x : xᵀMx = 0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadricDensity {
    /// Points found on the quadric.
    pub zeros: u64,
    /// Points inspected (p^n when exact).
    pub points: u64,
    /// `None` for exact enumeration, `Some(samples)` for Monte Carlo.
    pub sampled: Option<u64>,
}

impl QuadricDensity {
    pub fn density(&self) -> f64 {
        self.zeros as f64 / self.points as f64
    }
}

/// Exact density |A_M|/p^n by enumeration.
pub fn quadric_density_exact(m: &SymmetricForm, budget: EnumerationBudget) -> Result<QuadricDensity> {
    let hist = value_histogram(m, budget)?;
    let points: u64 = hist.iter().sum();
    Ok(QuadricDensity { zeros: hist[0], points, sampled: None })
}

/// Monte-Carlo density estimate from `samples` uniform points.
pub fn quadric_density_sampled<R: Rng>(
    m: &SymmetricForm,
    samples: u64,
    rng: &mut R,
) -> QuadricDensity {
    let p = m.field().modulus();
    let mut digits = vec![0u64; m.dim()];
    let mut zeros = 0;
    for _ in 0..samples {
        for d in digits.iter_mut() {
            *d = rng.random_range(0..p);
        }
        if m.evaluate_entries(&digits) == 0 {
            zeros += 1;
        }
    }
    QuadricDensity { zeros, points: samples, sampled: Some(samples) }
}

/// The quadric A_M = {x : xᵀMx = 0} as a dense subset of the vector domain
/// F_p^n (lexicographic element indexing).
pub fn quadric_set(m: &SymmetricForm, budget: EnumerationBudget) -> Result<DenseSet> {
    let f = m.field();
    let domain = Domain::vector(f, m.dim());
    let total = vector_count(f, m.dim(), budget)?;
    let p = f.modulus();
    let mut set = DenseSet::empty(domain);
    let mut digits = vec![0u64; m.dim()];
    for idx in 0..total {
        if idx != 0 {
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d == p {
                    *d = 0;
                } else {
                    break;
                }
            }
        }
        if m.evaluate_entries(&digits) == 0 {
            set.insert(idx as usize);
        }
    }
    Ok(set)
}

/// Iterator over all symmetric forms in dimension n, ordered
/// lexicographically by upper-triangle entries.
pub struct FormIter {
    field: PrimeField,
    n: usize,
    next: u64,
    total: u64,
}

impl Iterator for FormIter {
    type Item = SymmetricForm;

    fn next(&mut self) -> Option<SymmetricForm> {
        if self.next == self.total {
            return None;
        }
        let upper = unrank_vector(self.field, triangle_dim(self.n), self.next);
        self.next += 1;
        Some(SymmetricForm { field: self.field, n: self.n, upper: upper.entries().to_vec() })
    }
}

/// Enumerates all p^{n(n+1)/2} symmetric forms once, budget-checked.
pub fn enumerate_symmetric_forms(
    field: PrimeField,
    n: usize,
    budget: EnumerationBudget,
) -> Result<FormIter> {
    let total = budget.check_pow(field.modulus(), triangle_dim(n) as u32)?;
    Ok(FormIter { field, n, next: 0, total })
}
