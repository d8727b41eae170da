//! Arithmetic-progression counting and dual functions over three domains:
//! the integer interval [N] = {1,…,N} with zero-extension, the cyclic group
//! Z_N, and the vector space F_p^n.
//!
//! Counting is exact: a k-term progression with difference d is detected by
//! intersecting the set with its own shifts (interval), rotations (cyclic),
//! or translate permutations (vector space) and popcounting. Dual-function
//! values are kept as exact counts over the domain size and only converted
//! to floating point at reporting boundaries.

use crate::bitset::BitSet;
use crate::error::Error;
use crate::field::{unrank_vector, vector_index, FieldVector, PrimeField};
use crate::Result;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rustfft::FftPlanner;

/// An ambient domain for sets of integers or vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// The interval [N] = {1,…,N}; progressions leaving it simply don't count.
    Interval { n: usize },
    /// The cyclic group Z_N = {0,…,N−1} with wraparound.
    Cyclic { n: usize },
    /// The vector space F_p^n, elements indexed lexicographically.
    Vector { field: PrimeField, dim: usize },
}

impl Domain {
    pub fn interval(n: usize) -> Domain {
        assert!(n >= 1, "interval domain needs N ≥ 1");
        Domain::Interval { n }
    }

    pub fn cyclic(n: usize) -> Domain {
        assert!(n >= 1, "cyclic domain needs N ≥ 1");
        Domain::Cyclic { n }
    }

    pub fn vector(field: PrimeField, dim: usize) -> Domain {
        let mut size: usize = 1;
        for _ in 0..dim {
            size = size
                .checked_mul(field.modulus() as usize)
                .expect("vector domain size overflows usize");
        }
        Domain::Vector { field, dim }
    }

    /// Number of elements (and of difference slots).
    pub fn size(&self) -> usize {
        match *self {
            Domain::Interval { n } | Domain::Cyclic { n } => n,
            Domain::Vector { field, dim } => {
                let mut size: usize = 1;
                for _ in 0..dim {
                    size *= field.modulus() as usize;
                }
                size
            }
        }
    }

    /// Whether difference slot 0 means the trivial difference d = 0.
    /// Interval differences run over {1,…,N}, so every slot is nontrivial.
    pub fn has_trivial_difference(&self) -> bool {
        !matches!(self, Domain::Interval { .. })
    }

    /// Human/file label of the element at `index`.
    pub fn element_label(&self, index: usize) -> String {
        debug_assert!(index < self.size());
        match *self {
            Domain::Interval { .. } => (index + 1).to_string(),
            Domain::Cyclic { .. } => index.to_string(),
            Domain::Vector { field, dim } => {
                let v = unrank_vector(field, dim, index as u64);
                v.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            }
        }
    }

    /// Label of difference slot `slot` (differs from element labels only on
    /// intervals, where slot t is the difference t+1).
    pub fn difference_label(&self, slot: usize) -> String {
        match self {
            Domain::Interval { .. } => (slot + 1).to_string(),
            _ => self.element_label(slot),
        }
    }

    /// Parses one set-file line into an element index.
    pub fn parse_element(&self, text: &str) -> Result<usize> {
        let text = text.trim();
        match *self {
            Domain::Interval { n } => {
                let v: usize = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("expected an integer, got {text:?}")))?;
                if v >= 1 && v <= n {
                    Ok(v - 1)
                } else {
                    Err(Error::Parse(format!("element {v} outside [1, {n}]")))
                }
            }
            Domain::Cyclic { n } => {
                let v: usize = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("expected an integer, got {text:?}")))?;
                if v < n {
                    Ok(v)
                } else {
                    Err(Error::Parse(format!("residue {v} outside [0, {}]", n - 1)))
                }
            }
            Domain::Vector { field, dim } => {
                let parts: Vec<&str> = text.split(',').collect();
                if parts.len() != dim {
                    return Err(Error::Parse(format!(
                        "expected {dim} comma-separated residues, got {}",
                        parts.len()
                    )));
                }
                let mut v = FieldVector::zero(field, dim);
                for (i, part) in parts.iter().enumerate() {
                    let r: u64 = part.trim().parse().map_err(|_| {
                        Error::Parse(format!("expected a residue, got {:?}", part.trim()))
                    })?;
                    if r >= field.modulus() {
                        return Err(Error::Parse(format!(
                            "residue {r} outside [0, {}]",
                            field.modulus() - 1
                        )));
                    }
                    v.set(i, r);
                }
                Ok(vector_index(&v) as usize)
            }
        }
    }

    /// Index of the j-th term x + j·d of a progression, where `x` is an
    /// element index and `slot` a difference slot; `None` when the term
    /// leaves an interval domain.
    pub fn progression_term(&self, x: usize, slot: usize, j: usize) -> Option<usize> {
        match *self {
            Domain::Interval { n } => {
                let value = (x + 1) + j * (slot + 1);
                if value <= n {
                    Some(value - 1)
                } else {
                    None
                }
            }
            Domain::Cyclic { n } => Some((x + j * slot % n) % n),
            Domain::Vector { field, dim } => {
                let xv = unrank_vector(field, dim, x as u64);
                let dv = unrank_vector(field, dim, slot as u64);
                let step = dv.scale((j as u64) % field.modulus());
                Some(vector_index(&xv.add(&step)) as usize)
            }
        }
    }
}

/// A subset of a domain, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSet {
    domain: Domain,
    bits: BitSet,
}

impl DenseSet {
    pub fn empty(domain: Domain) -> DenseSet {
        DenseSet { bits: BitSet::new(domain.size()), domain }
    }

    pub fn full(domain: Domain) -> DenseSet {
        let mut s = DenseSet::empty(domain);
        for i in 0..domain.size() {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(domain: Domain, indices: &[usize]) -> DenseSet {
        DenseSet { bits: BitSet::from_indices(domain.size(), indices), domain }
    }

    /// Independent coin flips: each element joins with probability `prob`.
    pub fn random_bernoulli<R: Rng>(domain: Domain, prob: f64, rng: &mut R) -> DenseSet {
        assert!((0.0..=1.0).contains(&prob), "probability outside [0,1]");
        let mut s = DenseSet::empty(domain);
        for i in 0..domain.size() {
            if rng.random::<f64>() < prob {
                s.insert(i);
            }
        }
        s
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn insert(&mut self, index: usize) {
        self.bits.insert(index);
    }

    pub fn remove(&mut self, index: usize) {
        self.bits.remove(index);
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn count(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.domain.size() as f64
    }

    /// Member indices in increasing order.
    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Serializes as one element label per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in self.iter_indices() {
            out.push_str(&self.domain.element_label(i));
            out.push('\n');
        }
        out
    }

    /// Parses the set-file format: one element per line, `#` comments and
    /// blank lines ignored. Errors carry 1-based line numbers.
    pub fn parse_text(domain: Domain, text: &str) -> Result<DenseSet> {
        let mut s = DenseSet::empty(domain);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let idx = domain
                .parse_element(line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            s.insert(idx);
        }
        Ok(s)
    }
}

/// Exact result of a progression count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgressionCount {
    /// Pairs (x, d) with d ∈ S and all k terms in A, counting d = 0.
    pub pairs: u64,
    /// The same with trivial differences excluded (equals `pairs` on
    /// interval domains, whose differences are all nonzero).
    pub nontrivial_pairs: u64,
}

/// Counts pairs (x, d), d ∈ S, whose k-term progression x, x+d, …,
/// x+(k−1)d stays inside A.
pub fn count_kaps(a: &DenseSet, s: &DenseSet, k: usize) -> Result<ProgressionCount> {
    if a.domain != s.domain {
        return Err(Error::Dimension("progression count across different domains".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("progression length k must be ≥ 1".into()));
    }
    let mut pairs: u64 = 0;
    let mut trivial: u64 = 0;
    match a.domain {
        Domain::Interval { .. } => {
            for slot in s.iter_indices() {
                let d = slot + 1;
                let mut acc = a.bits.clone();
                for j in 1..k {
                    acc.and_assign(&a.bits.shift_down(j * d));
                }
                pairs += acc.count_ones();
            }
        }
        Domain::Cyclic { n } => {
            for d in s.iter_indices() {
                let mut acc = a.bits.clone();
                for j in 1..k {
                    acc.and_assign(&a.bits.rotate_down(j * d % n));
                }
                let c = acc.count_ones();
                pairs += c;
                if d == 0 {
                    trivial = c;
                }
            }
        }
        Domain::Vector { field, dim } => {
            let size = a.domain.size();
            for slot in s.iter_indices() {
                let perm = translate_permutation(field, dim, slot);
                let mut c = 0u64;
                for x in 0..size {
                    if !a.bits.contains(x) {
                        continue;
                    }
                    let mut cur = x;
                    let mut ok = true;
                    for _ in 1..k {
                        cur = perm[cur] as usize;
                        if !a.bits.contains(cur) {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        c += 1;
                    }
                }
                pairs += c;
                if slot == 0 {
                    trivial = c;
                }
            }
        }
    }
    Ok(ProgressionCount { pairs, nontrivial_pairs: pairs - trivial })
}

/// The permutation x ↦ x + d of F_p^n at the index level.
fn translate_permutation(field: PrimeField, dim: usize, d_index: usize) -> Vec<u32> {
    let p = field.modulus();
    let size = {
        let mut s = 1usize;
        for _ in 0..dim {
            s *= p as usize;
        }
        s
    };
    let d = unrank_vector(field, dim, d_index as u64);
    let mut perm = Vec::with_capacity(size);
    let mut digits = vec![0u64; dim];
    for x in 0..size {
        if x != 0 {
            for t in digits.iter_mut().rev() {
                *t += 1;
                if *t == p {
                    *t = 0;
                } else {
                    break;
                }
            }
        }
        // Rank of (digits + d) by Horner's rule.
        let mut idx: u64 = 0;
        for i in 0..dim {
            let e = digits[i] + d.get(i);
            let e = if e >= p { e - p } else { e };
            idx = idx * p + e;
        }
        perm.push(idx as u32);
    }
    perm
}

/// A dual function: for each difference slot, the count of start points
/// whose k-term progression stays in A, over the domain size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualFunction {
    domain: Domain,
    arity: usize,
    counts: Vec<u64>,
}

impl DualFunction {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of progression terms (2 or 3).
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Raw start-point count at a difference slot.
    pub fn count(&self, slot: usize) -> u64 {
        self.counts[slot]
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Exact value at a slot: count over domain size.
    pub fn value(&self, slot: usize) -> Ratio<u128> {
        Ratio::new(self.counts[slot] as u128, self.domain.size() as u128)
    }

    pub fn value_f64(&self, slot: usize) -> f64 {
        self.counts[slot] as f64 / self.domain.size() as f64
    }
}

fn dual_k(a: &DenseSet, arity: usize) -> DualFunction {
    let size = a.domain.size();
    let counts: Vec<u64> = match a.domain {
        Domain::Interval { .. } => (0..size)
            .map(|slot| {
                let d = slot + 1;
                let mut acc = a.bits.clone();
                for j in 1..arity {
                    acc.and_assign(&a.bits.shift_down(j * d));
                }
                acc.count_ones()
            })
            .collect(),
        Domain::Cyclic { n } => (0..size)
            .map(|d| {
                let mut acc = a.bits.clone();
                for j in 1..arity {
                    acc.and_assign(&a.bits.rotate_down(j * d % n));
                }
                acc.count_ones()
            })
            .collect(),
        Domain::Vector { field, dim } => (0..size)
            .map(|slot| {
                let perm = translate_permutation(field, dim, slot);
                let mut c = 0u64;
                for x in 0..size {
                    if !a.bits.contains(x) {
                        continue;
                    }
                    let mut cur = x;
                    let mut ok = true;
                    for _ in 1..arity {
                        cur = perm[cur] as usize;
                        if !a.bits.contains(cur) {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        c += 1;
                    }
                }
                c
            })
            .collect(),
    };
    DualFunction { domain: a.domain, arity, counts }
}

/// The 3-term dual F(d) = E_x 1_A(x) 1_A(x+d) 1_A(x+2d).
pub fn dual3(a: &DenseSet) -> DualFunction {
    dual_k(a, 3)
}

/// The 2-term dual (autocorrelation) F⁽²⁾(d) = E_x 1_A(x) 1_A(x+d).
pub fn dual2(a: &DenseSet) -> DualFunction {
    dual_k(a, 2)
}

/// The k-term dual for any arity ≥ 1 (arity 1 degenerates to the constant
/// density; 2 and 3 are [`dual2`] and [`dual3`]).
pub fn dual_function(a: &DenseSet, arity: usize) -> Result<DualFunction> {
    if arity == 0 {
        return Err(Error::InvalidParameter("dual function needs arity ≥ 1".into()));
    }
    Ok(dual_k(a, arity))
}

/// ⟨F, 1_S⟩ = E_d F(d)·1_S(d), exactly.
pub fn inner_with_indicator(f: &DualFunction, s: &DenseSet) -> Result<Ratio<u128>> {
    if f.domain != s.domain() {
        return Err(Error::Dimension("inner product across different domains".into()));
    }
    let size = f.domain.size() as u128;
    let sum: u128 = s.iter_indices().map(|slot| f.counts[slot] as u128).sum();
    Ok(Ratio::new(sum, size * size))
}

/// The average number of 3-term progressions, E_{x,d} over the full domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionAverage {
    /// E_{x,d} with d over every slot (including d = 0 where it exists).
    pub with_trivial: Ratio<u128>,
    /// The same sum restricted to nonzero d, over the same denominator.
    pub nontrivial: Ratio<u128>,
}

/// E_{x,d} 1_A(x)1_A(x+d)1_A(x+2d), reported with and without the trivial
/// difference (identical on interval domains).
pub fn varnavides_average(a: &DenseSet) -> ProgressionAverage {
    let f = dual3(a);
    let size = a.domain.size() as u128;
    let total: u128 = f.counts.iter().map(|&c| c as u128).sum();
    let trivial = if a.domain.has_trivial_difference() { f.counts[0] as u128 } else { 0 };
    ProgressionAverage {
        with_trivial: Ratio::new(total, size * size),
        nontrivial: Ratio::new(total - trivial, size * size),
    }
}

/// Normalized Fourier coefficients hat(1_A)(ξ) = E_x 1_A(x)·e(−xξ/N) over
/// a cyclic domain.
pub fn spectrum(a: &DenseSet) -> Result<Vec<Complex64>> {
    let Domain::Cyclic { n } = a.domain else {
        return Err(Error::DomainKind("spectrum requires a cyclic domain".into()));
    };
    let mut buffer: Vec<Complex64> = (0..n)
        .map(|x| Complex64::new(if a.contains(x) { 1.0 } else { 0.0 }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let scale = 1.0 / n as f64;
    Ok(buffer.into_iter().map(|z| z * scale).collect())
}

/// A character expansion of the 2-term dual with an explicit error term.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Frequencies whose coefficient was kept, increasing.
    pub frequencies: Vec<usize>,
    /// c_ξ = |hat(1_A)(ξ)|² for each kept frequency, same order.
    pub coefficients: Vec<f64>,
    /// Kept part Σ c_ξ e(dξ/N) evaluated at every d.
    pub kept: Vec<f64>,
    /// Residual e(d) = F⁽²⁾(d) − kept(d) at every d.
    pub residual: Vec<f64>,
}

impl SpectralDecomposition {
    /// Max-norm of the residual.
    pub fn residual_sup(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, &r| m.max(r.abs()))
    }

    /// Kept part plus residual: reconstructs the dual value at `d`.
    pub fn reconstruction(&self, d: usize) -> f64 {
        self.kept[d] + self.residual[d]
    }
}

/// Expands the 2-term dual over characters: keeps every frequency with
/// |hat(1_A)(ξ)| ≥ ε·density, with coefficients |hat(1_A)(ξ)|², and returns
/// the pointwise residual against the exact dual.
pub fn decompose_dual2(a: &DenseSet, eps: f64) -> Result<SpectralDecomposition> {
    let Domain::Cyclic { n } = a.domain else {
        return Err(Error::DomainKind("spectral decomposition requires a cyclic domain".into()));
    };
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold ε = {eps} must be ≥ 0")));
    }
    let hat = spectrum(a)?;
    let density = a.density();
    let threshold = eps * density;
    let mut frequencies = Vec::new();
    let mut coefficients = Vec::new();
    let mut masked: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for (xi, z) in hat.iter().enumerate() {
        if z.norm() >= threshold {
            frequencies.push(xi);
            coefficients.push(z.norm_sqr());
            masked[xi] = Complex64::new(z.norm_sqr(), 0.0);
        }
    }
    // F⁽²⁾(d) = Σ_ξ |hat(ξ)|² e(+dξ/N): an unnormalized inverse transform
    // of the kept coefficients gives the kept part directly.
    FftPlanner::new().plan_fft_inverse(n).process(&mut masked);
    let kept: Vec<f64> = masked.iter().map(|z| z.re).collect();
    let exact = dual2(a);
    let residual: Vec<f64> = (0..n).map(|d| exact.value_f64(d) - kept[d]).collect();
    Ok(SpectralDecomposition { frequencies, coefficients, kept, residual })
}
