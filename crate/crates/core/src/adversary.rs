//! The adversarial construction: sample a random difference set S ⊂ F_p^n,
//! certify that its image under the degree-2 embedding is linearly
//! independent, solve for a symmetric form M with dᵀMd ≠ 0 for every d ∈ S,
//! and verify that the quadric {x : xᵀMx = 0} — which has density ≥ p^{−2} —
//! contains no 3-term progression with common difference in S.
//!
//! The counting lemmas behind the construction are implemented exactly:
//! union sizes of independent hyperplanes, and the spectral bound on the
//! probability that the embedded image of a random point lands in a fixed
//! subspace, compared in exact arithmetic over Q(√p).

use crate::budget::EnumerationBudget;
use crate::error::Error;
use crate::exec;
use crate::field::{
    is_independent, unrank_vector, vector_count, vector_index, FieldMatrix, FieldVector,
    PrimeField,
};
use crate::forms::{
    dimension_from_triangle, form_of_vec, quadric_density_exact, quadric_density_sampled,
    quadric_set, triangle_dim, veronese, FormVector, QuadricDensity, SymmetricForm,
};
use crate::progressions::{count_kaps, DenseSet, Domain};
use crate::seeds;
use crate::stats;
use crate::subspace::Subspace;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// Default slack multiplier in the sample-size formula
/// K = C(n+1,2) − ⌈slack·n·log_p n⌉.
pub const DEFAULT_SLACK: f64 = 11.0;

/// Sample count for Monte-Carlo density estimates when the quadric is too
/// large to enumerate.
pub const MONTE_CARLO_DENSITY_SAMPLES: u64 = 1 << 12;

/// An ordered multiset of difference vectors in F_p^n (repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceSample {
    field: PrimeField,
    n: usize,
    draws: Vec<FieldVector>,
}

impl DifferenceSample {
    pub fn from_draws(field: PrimeField, n: usize, draws: Vec<FieldVector>) -> Result<Self> {
        for d in &draws {
            if d.len() != n {
                return Err(Error::Dimension(format!(
                    "draw of length {} in a sample over dimension {n}",
                    d.len()
                )));
            }
        }
        Ok(DifferenceSample { field, n, draws })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The number of draws K (with multiplicity).
    pub fn size(&self) -> usize {
        self.draws.len()
    }

    pub fn draws(&self) -> &[FieldVector] {
        &self.draws
    }

    /// Degree-2 embedded images of the draws, in draw order.
    pub fn embedded_rows(&self) -> Vec<FieldVector> {
        self.draws.iter().map(|d| veronese(d).into_vector()).collect()
    }
}

/// K i.i.d. uniform draws from F_p^n, with replacement. Deterministic given
/// the generator state.
pub fn sample_differences<R: Rng>(
    field: PrimeField,
    n: usize,
    k: usize,
    rng: &mut R,
) -> DifferenceSample {
    let p = field.modulus();
    let draws = (0..k)
        .map(|_| FieldVector::new(field, (0..n).map(|_| rng.random_range(0..p)).collect()))
        .collect();
    DifferenceSample { field, n, draws }
}

/// K = max(0, C(n+1,2) − ⌈slack·n·log_p n⌉): the largest sample size for
/// which independence of the embedded image is expected to hold almost
/// surely as n grows. Clamped at 0 when the slack term dominates.
pub fn independence_sample_size(p: u64, n: usize, slack: f64) -> usize {
    assert!(p >= 2, "logarithm base must be at least 2");
    let tri = triangle_dim(n) as i128;
    let cost = if n <= 1 {
        0
    } else {
        let log_p_n = (n as f64).ln() / (p as f64).ln();
        (slack * n as f64 * log_p_n).max(0.0).ceil() as i128
    };
    (tri - cost).max(0) as usize
}

/// Whether the embedded images {φ(d) : d ∈ S} are linearly independent.
/// Repeats and the zero vector always fail; K > C(n+1,2) fails by counting.
pub fn independence_certificate(sample: &DifferenceSample) -> bool {
    is_independent(&sample.embedded_rows())
}

/// A symmetric form M with dᵀMd = 1 for every d ∈ S, found by solving the
/// linear system [φ(d)]·v = 1⃗ over the embedded rows. `None` when the rows
/// are dependent (the system may then be inconsistent). An empty sample
/// returns the identity form by convention.
pub fn find_avoiding_form(sample: &DifferenceSample) -> Option<SymmetricForm> {
    let field = sample.field();
    if sample.size() == 0 {
        return Some(SymmetricForm::identity(field, sample.dim()));
    }
    if !independence_certificate(sample) {
        return None;
    }
    let tri = triangle_dim(sample.dim());
    let rows = sample.embedded_rows();
    let matrix = FieldMatrix::from_rows(field, tri, &rows);
    let ones = FieldVector::new(field, vec![1; sample.size()]);
    let v = matrix
        .solve(&ones)
        .expect("row and right-hand-side counts agree by construction")
        .expect("full row rank makes the system consistent");
    let encoded = FormVector::new(v).expect("solution length is triangular by construction");
    Some(form_of_vec(&encoded))
}

/// |v_1^⊥ ∪ … ∪ v_k^⊥| = p^m − p^{m−k}(p−1)^k for independent normals,
/// as an exact integer.
pub fn hyperplane_union_count(
    field: PrimeField,
    m: usize,
    normals: &[FieldVector],
) -> Result<u128> {
    for v in normals {
        if v.len() != m {
            return Err(Error::Dimension(format!(
                "normal of length {} in ambient dimension {m}",
                v.len()
            )));
        }
    }
    if !is_independent(normals) {
        return Err(Error::InvalidParameter(
            "hyperplane union requires independent normals".into(),
        ));
    }
    let p = field.modulus() as u128;
    let k = normals.len();
    let overflow = || Error::InvalidParameter("hyperplane union count overflows".into());
    let pow = |base: u128, exp: usize| -> Result<u128> {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.checked_mul(base).ok_or_else(overflow)?;
        }
        Ok(acc)
    };
    let total = pow(p, m)?;
    let missed = pow(p, m - k)?.checked_mul(pow(p - 1, k)?).ok_or_else(overflow)?;
    Ok(total - missed)
}

/// An exact value a + b·√r with rational a, b and a prime radicand r, closed
/// under the few operations the spectral bound needs. Comparisons are exact:
/// the sign of a + b√r is decided by sign analysis and squaring, never by
/// floating-point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtExpr {
    radicand: u64,
    rational: BigRational,
    surd: BigRational,
}

impl SqrtExpr {
    pub fn new(radicand: u64, rational: BigRational, surd: BigRational) -> Self {
        SqrtExpr { radicand, rational, surd }
    }

    pub fn zero(radicand: u64) -> Self {
        SqrtExpr::new(radicand, BigRational::zero(), BigRational::zero())
    }

    /// r^{−e/2}: rational for even e, a pure surd multiple for odd e
    /// (r^{−e/2} = √r · r^{−(e+1)/2}).
    pub fn inv_sqrt_pow(radicand: u64, exponent: usize) -> Self {
        let power = |e: usize| num_traits::pow(BigInt::from(radicand), e);
        if exponent % 2 == 0 {
            let rational = BigRational::new(BigInt::one(), power(exponent / 2));
            SqrtExpr::new(radicand, rational, BigRational::zero())
        } else {
            let surd = BigRational::new(BigInt::one(), power((exponent + 1) / 2));
            SqrtExpr::new(radicand, BigRational::zero(), surd)
        }
    }

    pub fn add(&self, other: &SqrtExpr) -> SqrtExpr {
        assert_eq!(self.radicand, other.radicand, "mismatched radicands");
        SqrtExpr::new(
            self.radicand,
            &self.rational + &other.rational,
            &self.surd + &other.surd,
        )
    }

    pub fn div_count(&self, count: u64) -> SqrtExpr {
        assert!(count > 0, "division by zero count");
        let d = BigRational::from_integer(BigInt::from(count));
        SqrtExpr::new(self.radicand, &self.rational / &d, &self.surd / &d)
    }

    /// Exact sign test for a + b√r ≥ 0. When the signs of a and b disagree
    /// the comparison squares both sides; equality of a² and r·b² cannot
    /// occur with b ≠ 0 because √r is irrational.
    pub fn is_nonneg(&self) -> bool {
        let a = &self.rational;
        let b = &self.surd;
        if !a.is_negative() && !b.is_negative() {
            return true;
        }
        if a.is_negative() && !b.is_positive() {
            return false;
        }
        let a2 = a * a;
        let rb2 = b * b * BigRational::from_integer(BigInt::from(self.radicand));
        if b.is_negative() {
            a2 >= rb2
        } else {
            rb2 >= a2
        }
    }

    /// Exact test self ≥ q.
    pub fn at_least(&self, q: &BigRational) -> bool {
        SqrtExpr::new(self.radicand, &self.rational - q, self.surd.clone()).is_nonneg()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        let b = self.surd.to_f64().unwrap_or(f64::NAN);
        a + b * (self.radicand as f64).sqrt()
    }
}

/// The two sides of the spectral containment bound for a subspace W of the
/// embedding target F_p^{C(n+1,2)}.
#[derive(Debug, Clone, PartialEq)]
pub struct HitProbability {
    /// |{d ∈ F_p^n : φ(d) ∈ W}| / p^n, exact.
    pub hit: BigRational,
    /// Average of p^{−rank(M_v)/2} over v ∈ W^⊥ (exact when enumerated).
    pub bound: SqrtExpr,
    /// How many dual vectors entered the average.
    pub dual_points: u64,
    /// True when the dual side was sampled instead of enumerated.
    pub dual_sampled: bool,
}

impl HitProbability {
    /// Whether hit ≤ bound, compared exactly.
    pub fn sound(&self) -> bool {
        self.bound.at_least(&self.hit)
    }
}

/// Evaluates both sides of the containment bound: the exact probability that
/// the embedded image of a uniform point lands in W, and the average of
/// p^{−rank(M_v)/2} over the dual space W^⊥ (enumerated when it fits the
/// budget, otherwise sampled).
pub fn subspace_hit_probability<R: Rng>(
    w: &Subspace,
    budget: EnumerationBudget,
    rng: &mut R,
) -> Result<HitProbability> {
    let field = w.field();
    let p = field.modulus();
    let n = dimension_from_triangle(w.ambient())?;
    let total = vector_count(field, n, budget)?;
    let mut hits: u64 = 0;
    for idx in 0..total {
        let d = unrank_vector(field, n, idx);
        if w.contains(veronese(&d).vector()) {
            hits += 1;
        }
    }
    let hit = BigRational::new(BigInt::from(hits), BigInt::from(total));

    let complement = w.orthogonal_complement();
    let (dual_points, dual_sampled) = match complement.element_count(budget) {
        Ok(count) => (count, false),
        Err(_) => (budget.points(), true),
    };
    if dual_points == 0 {
        return Err(Error::InvalidParameter("enumeration budget of zero points".into()));
    }
    let mut acc = SqrtExpr::zero(p);
    for i in 0..dual_points {
        let v = if dual_sampled {
            complement.random_element(rng)
        } else {
            complement.element_at(i)
        };
        let form = form_of_vec(&FormVector::new(v)?);
        acc = acc.add(&SqrtExpr::inv_sqrt_pow(p, form.rank()));
    }
    let bound = acc.div_count(dual_points);
    Ok(HitProbability { hit, bound, dual_points, dual_sampled })
}

/// Everything one trial of the construction records.
#[derive(Debug, Clone, PartialEq)]
pub struct AvoidanceCertificate {
    pub sample: DifferenceSample,
    /// Whether the embedded images were independent.
    pub independent: bool,
    /// The avoiding form, when one was produced.
    pub form: Option<SymmetricForm>,
    /// dᵀMd per draw, in draw order (empty without a form).
    pub witnesses: Vec<u64>,
    /// Density of the quadric (exact when it fits the budget).
    pub density: Option<QuadricDensity>,
    /// Progressions x, x+d, x+2d ⊂ quadric with d ∈ S found by exhaustive
    /// scan; `None` when the domain exceeded the budget.
    pub triples_found: Option<u64>,
}

impl AvoidanceCertificate {
    /// Unconditional soundness: an independence certificate always comes
    /// with a form whose witnesses are all nonzero.
    pub fn sound(&self) -> bool {
        !self.independent
            || (self.form.is_some() && self.witnesses.iter().all(|&w| w != 0))
    }

    /// Fully verified avoidance: independent, nonzero witnesses, and no
    /// counterexample progression where the scan ran.
    pub fn verified_avoidance(&self) -> bool {
        self.independent
            && self.form.is_some()
            && self.witnesses.iter().all(|&w| w != 0)
            && self.triples_found.is_none_or(|t| t == 0)
    }
}

/// Runs certification, form construction, and verification on a sample. The
/// generator is consumed only for Monte-Carlo density estimation of quadrics
/// too large to enumerate.
pub fn certify_sample<R: Rng>(
    sample: DifferenceSample,
    budget: EnumerationBudget,
    rng: &mut R,
) -> AvoidanceCertificate {
    let field = sample.field();
    let n = sample.dim();
    let independent = independence_certificate(&sample);
    let form = find_avoiding_form(&sample);
    let witnesses: Vec<u64> = match &form {
        Some(m) => sample.draws().iter().map(|d| m.evaluate(d)).collect(),
        None => Vec::new(),
    };
    let density = form.as_ref().map(|m| match quadric_density_exact(m, budget) {
        Ok(exact) => exact,
        Err(_) => quadric_density_sampled(m, MONTE_CARLO_DENSITY_SAMPLES, rng),
    });
    let triples_found = match &form {
        Some(m) => match quadric_set(m, budget) {
            Ok(quadric) => {
                let domain = Domain::vector(field, n);
                let mut diffs = DenseSet::empty(domain);
                for d in sample.draws() {
                    diffs.insert(vector_index(d) as usize);
                }
                let count = count_kaps(&quadric, &diffs, 3)
                    .expect("matching domains and k = 3 cannot fail");
                Some(count.pairs)
            }
            Err(_) => None,
        },
        None => None,
    };
    AvoidanceCertificate { sample, independent, form, witnesses, density, triples_found }
}

/// One complete trial: sample K differences and certify them. Deterministic
/// in the seed, byte for byte.
pub fn adversary_trial(
    field: PrimeField,
    n: usize,
    k: usize,
    seed: u64,
    budget: EnumerationBudget,
) -> AvoidanceCertificate {
    let mut rng = seeds::trial_rng(seed, &[]);
    let sample = sample_differences(field, n, k, &mut rng);
    certify_sample(sample, budget, &mut rng)
}

/// Aggregate results for one (n, K) cell of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    /// Trials whose independence certificate held.
    pub independent: u64,
    /// Trials with fully verified avoidance.
    pub verified: u64,
    /// 95% Wilson intervals for the two rates.
    pub independence_ci: (f64, f64),
    pub verified_ci: (f64, f64),
    /// Mean quadric density over trials that produced a form (0 when none).
    pub mean_density: f64,
}

struct TrialOutcome {
    independent: bool,
    verified: bool,
    density: Option<f64>,
    size: u64,
}

fn outcome_of(cert: &AvoidanceCertificate) -> TrialOutcome {
    TrialOutcome {
        independent: cert.independent,
        verified: cert.verified_avoidance(),
        density: cert.density.as_ref().map(|d| d.density()),
        size: cert.sample.size() as u64,
    }
}

fn summarize(outcomes: &[TrialOutcome]) -> (u64, u64, (f64, f64), (f64, f64), f64, f64) {
    let trials = outcomes.len() as u64;
    let independent = outcomes.iter().filter(|o| o.independent).count() as u64;
    let verified = outcomes.iter().filter(|o| o.verified).count() as u64;
    let mut density_sum = 0.0;
    let mut density_count = 0u64;
    for o in outcomes {
        if let Some(d) = o.density {
            density_sum += d;
            density_count += 1;
        }
    }
    let mean_density = if density_count > 0 { density_sum / density_count as f64 } else { 0.0 };
    let mean_size = outcomes.iter().map(|o| o.size as f64).sum::<f64>() / trials.max(1) as f64;
    let independence_ci = stats::wilson_interval(independent, trials, stats::Z_95);
    let verified_ci = stats::wilson_interval(verified, trials, stats::Z_95);
    (independent, verified, independence_ci, verified_ci, mean_density, mean_size)
}

/// Fixed-size scan: for each (n, K) cell, the independence and verified-
/// avoidance rates over `trials` trials with 95% intervals and the mean
/// quadric density. Bit-identical at any worker count: every trial derives
/// its stream from (master seed, n, K, trial index).
pub fn success_rate_scan(
    field: PrimeField,
    cells: &[(usize, usize)],
    trials: u64,
    master_seed: u64,
    budget: EnumerationBudget,
) -> Vec<ScanRow> {
    cells
        .iter()
        .map(|&(n, k)| {
            let outcomes = exec::map_indexed(trials as usize, |t| {
                let seed =
                    seeds::derive_seed(master_seed, &[n as u64, k as u64, t as u64]);
                outcome_of(&adversary_trial(field, n, k, seed, budget))
            });
            let (independent, verified, independence_ci, verified_ci, mean_density, _) =
                summarize(&outcomes);
            ScanRow {
                n,
                k,
                trials,
                independent,
                verified,
                independence_ci,
                verified_ci,
                mean_density,
            }
        })
        .collect()
}

/// Aggregate results for one n of a Bernoulli-model scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliRow {
    pub n: usize,
    /// Per-element inclusion probability min(1, c·n²/p^n).
    pub sigma: f64,
    pub trials: u64,
    /// Mean number of sampled differences.
    pub mean_size: f64,
    pub independent: u64,
    pub verified: u64,
    pub independence_ci: (f64, f64),
    pub verified_ci: (f64, f64),
    pub mean_density: f64,
}

/// Bernoulli-model scan: S includes each element of F_p^n independently
/// with probability σ = min(1, c·n²/p^n); each sampled set is certified
/// like a fixed-size sample (elements are distinct by construction, so
/// only genuine dependence fails). Deterministic in the master seed.
pub fn bernoulli_rate_scan(
    field: PrimeField,
    ns: &[usize],
    c: f64,
    trials: u64,
    master_seed: u64,
    budget: EnumerationBudget,
) -> Result<Vec<BernoulliRow>> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c} must be finite and ≥ 0")));
    }
    let p = field.modulus() as f64;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let sigma = (c * (n * n) as f64 / p.powi(n as i32)).min(1.0);
        let domain = Domain::vector(field, n);
        let outcomes = exec::map_indexed(trials as usize, |t| {
            let mut rng = seeds::trial_rng(master_seed, &[n as u64, t as u64]);
            let set = DenseSet::random_bernoulli(domain, sigma, &mut rng);
            let draws: Vec<FieldVector> = set
                .iter_indices()
                .map(|i| unrank_vector(field, n, i as u64))
                .collect();
            let sample = DifferenceSample { field, n, draws };
            outcome_of(&certify_sample(sample, budget, &mut rng))
        });
        let (independent, verified, independence_ci, verified_ci, mean_density, mean_size) =
            summarize(&outcomes);
        rows.push(BernoulliRow {
            n,
            sigma,
            trials,
            mean_size,
            independent,
            verified,
            independence_ci,
            verified_ci,
            mean_density,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn vecs(field: PrimeField, rows: &[&[i64]]) -> Vec<FieldVector> {
        rows.iter().map(|r| FieldVector::from_ints(field, r)).collect()
    }

    #[test]
    fn empty_sample_and_determinism() {
        let s = sample_differences(f3(), 4, 0, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(s.size(), 0);
        let a = sample_differences(f3(), 4, 50, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_differences(f3(), 4, 50, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn draws_are_coordinatewise_uniform() {
        let k = 10_000;
        let s = sample_differences(f3(), 4, k, &mut ChaCha8Rng::seed_from_u64(11));
        let sigma = (k as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for coord in 0..4 {
            for residue in 0..3u64 {
                let count =
                    s.draws().iter().filter(|d| d.get(coord) == residue).count() as f64;
                let expected = k as f64 / 3.0;
                assert!(
                    (count - expected).abs() < 3.0 * sigma,
                    "coordinate {coord} residue {residue}: {count} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(independence_sample_size(3, 1, DEFAULT_SLACK), 1);
        assert_eq!(independence_sample_size(3, 7, 0.0), triangle_dim(7));
        // 78 − ⌈132·log₃12⌉ = 78 − 299, clamped at zero.
        assert_eq!(independence_sample_size(3, 12, 11.0), 0);
        assert_eq!(independence_sample_size(3, 0, 5.0), 0);
    }

    #[test]
    fn independence_examples() {
        let field = f3();
        let basis = vecs(field, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let s = DifferenceSample::from_draws(field, 3, basis).unwrap();
        assert!(independence_certificate(&s));

        let with_zero = vecs(field, &[&[1, 0, 0], &[0, 0, 0]]);
        let s = DifferenceSample::from_draws(field, 3, with_zero).unwrap();
        assert!(!independence_certificate(&s));

        let repeated = vecs(field, &[&[1, 2, 0], &[1, 2, 0]]);
        let s = DifferenceSample::from_draws(field, 3, repeated).unwrap();
        assert!(!independence_certificate(&s));
    }

    #[test]
    fn avoiding_form_for_standard_pair_is_identity() {
        let field = f3();
        let s =
            DifferenceSample::from_draws(field, 2, vecs(field, &[&[1, 0], &[0, 1]])).unwrap();
        let m = find_avoiding_form(&s).unwrap();
        assert_eq!(m, SymmetricForm::identity(field, 2));
        for d in s.draws() {
            assert_eq!(m.evaluate(d), 1);
        }
    }

    #[test]
    fn avoiding_form_absent_on_dependence() {
        let field = f3();
        let s =
            DifferenceSample::from_draws(field, 2, vecs(field, &[&[0, 0]])).unwrap();
        assert!(find_avoiding_form(&s).is_none());
    }

    #[test]
    fn avoiding_form_witnesses_are_all_one() {
        let field = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut seen = 0;
        while seen < 200 {
            let s = sample_differences(field, 3, 4, &mut rng);
            if let Some(m) = find_avoiding_form(&s) {
                seen += 1;
                for d in s.draws() {
                    assert_eq!(m.evaluate(d), 1);
                }
            }
        }
    }

    #[test]
    fn hyperplane_union_examples() {
        let field = f3();
        assert_eq!(hyperplane_union_count(field, 2, &[]).unwrap(), 0);
        let one = vecs(field, &[&[1, 0]]);
        assert_eq!(hyperplane_union_count(field, 2, &one).unwrap(), 3);
        let two = vecs(field, &[&[1, 0], &[0, 1]]);
        assert_eq!(hyperplane_union_count(field, 2, &two).unwrap(), 5);
        let dependent = vecs(field, &[&[1, 0], &[2, 0]]);
        assert!(hyperplane_union_count(field, 2, &dependent).is_err());
    }

    #[test]
    fn hyperplane_union_matches_brute_force() {
        let budget = EnumerationBudget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut families = 0;
        while families < 100 {
            let p = if rng.random_range(0..2u32) == 0 { 3 } else { 5 };
            let field = PrimeField::new(p).unwrap();
            let m = rng.random_range(1..=4usize);
            let k = rng.random_range(0..=m);
            let normals: Vec<FieldVector> = (0..k)
                .map(|_| {
                    FieldVector::new(
                        field,
                        (0..m).map(|_| rng.random_range(0..p)).collect(),
                    )
                })
                .collect();
            if !is_independent(&normals) {
                continue;
            }
            families += 1;
            let predicted = hyperplane_union_count(field, m, &normals).unwrap();
            let total = vector_count(field, m, budget).unwrap();
            let mut union = 0u128;
            for idx in 0..total {
                let x = unrank_vector(field, m, idx);
                if normals.iter().any(|v| v.dot(&x) == 0) {
                    union += 1;
                }
            }
            assert_eq!(predicted, union, "p {p} m {m} k {k}");
        }
    }

    #[test]
    fn sqrt_expr_signs_are_exact() {
        let q = |n: i64, d: i64| {
            BigRational::new(BigInt::from(n), BigInt::from(d))
        };
        // 1 − (1/2)√3 > 0 since 3/4 < 1.
        assert!(SqrtExpr::new(3, q(1, 1), q(-1, 2)).is_nonneg());
        // 1 − (2/3)√3 < 0 since 4/3 > 1.
        assert!(!SqrtExpr::new(3, q(1, 1), q(-2, 3)).is_nonneg());
        // −2 + (6/5)√3 > 0 since 108/25 > 4.
        assert!(SqrtExpr::new(3, q(-2, 1), q(6, 5)).is_nonneg());
        // −2 + √3 < 0.
        assert!(!SqrtExpr::new(3, q(-2, 1), q(1, 1)).is_nonneg());
        assert!(SqrtExpr::zero(3).is_nonneg());
        // 3^{−1/2} = √3/3 and 3^{−1} round-trip through to_f64.
        let half = SqrtExpr::inv_sqrt_pow(3, 1);
        assert!((half.to_f64() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(half.at_least(&q(1, 2)));
        assert!(!half.at_least(&q(3, 5)));
        let whole = SqrtExpr::inv_sqrt_pow(3, 2);
        assert!((whole.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hit_probability_extremes() {
        let field = f3();
        let budget = EnumerationBudget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        // Full target space: both sides are exactly 1.
        let full = Subspace::full(field, triangle_dim(2));
        let hp = subspace_hit_probability(&full, budget, &mut rng).unwrap();
        assert_eq!(hp.hit, BigRational::one());
        assert!(hp.bound.at_least(&BigRational::one()));
        assert!(hp.sound());
        assert!(!hp.dual_sampled);

        // Zero subspace: only d = 0 embeds to 0 (diagonal entries are d_i²).
        let zero = Subspace::zero_space(field, triangle_dim(2));
        let hp = subspace_hit_probability(&zero, budget, &mut rng).unwrap();
        assert_eq!(hp.hit, BigRational::new(BigInt::one(), BigInt::from(9)));
        assert!(hp.sound());
        assert_eq!(hp.dual_points, 27);
    }

    #[test]
    fn hit_probability_bound_holds_on_random_subspaces() {
        let field = f3();
        let budget = EnumerationBudget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for trial in 0..50 {
            let n = 2 + (trial % 3) as usize; // 2, 3, 4
            let ambient = triangle_dim(n);
            let dim = rng.random_range(ambient.saturating_sub(2)..=ambient);
            let w = crate::subspace::random_subspace(field, ambient, dim, &mut rng);
            let hp = subspace_hit_probability(&w, budget, &mut rng).unwrap();
            assert!(
                hp.sound(),
                "containment bound failed: n {n} dim {dim} hit {} bound ≈ {}",
                hp.hit,
                hp.bound.to_f64()
            );
        }
    }

    #[test]
    fn trial_with_no_draws_is_vacuous_success() {
        let cert = adversary_trial(f3(), 3, 0, 5, EnumerationBudget::default());
        assert!(cert.independent);
        assert_eq!(cert.form, Some(SymmetricForm::identity(f3(), 3)));
        assert!(cert.witnesses.is_empty());
        assert!(cert.sound());
        assert!(cert.verified_avoidance());
        assert_eq!(cert.triples_found, Some(0));
    }

    #[test]
    fn trials_are_reproducible() {
        let budget = EnumerationBudget::default();
        let a = adversary_trial(f3(), 4, 8, 99, budget);
        let b = adversary_trial(f3(), 4, 8, 99, budget);
        assert_eq!(a, b);
        let c = adversary_trial(f3(), 4, 8, 100, budget);
        assert_ne!(a.sample, c.sample);
    }

    #[test]
    fn verified_trials_have_no_progressions_and_dense_quadrics() {
        let field = f3();
        let budget = EnumerationBudget::default();
        for seed in 0..100 {
            let cert = adversary_trial(field, 4, 8, seed, budget);
            assert!(cert.sound(), "seed {seed}");
            if cert.independent {
                assert_eq!(cert.triples_found, Some(0), "seed {seed}");
                let density = cert.density.unwrap();
                assert!(density.sampled.is_none());
                assert!(
                    density.density() >= 1.0 / 9.0,
                    "seed {seed}: density {}",
                    density.density()
                );
            }
        }
    }

    #[test]
    fn scan_rates_match_theory() {
        let field = f3();
        let budget = EnumerationBudget::default();
        // K above the embedding dimension can never be independent.
        let rows = success_rate_scan(field, &[(2, triangle_dim(2) + 1)], 50, 3, budget);
        assert_eq!(rows[0].independent, 0);

        // K = 1 fails only on the zero draw: rate 1 − p^{−n}.
        let rows = success_rate_scan(field, &[(2, 1)], 2000, 4, budget);
        let rate = rows[0].independent as f64 / 2000.0;
        let expected = 1.0 - 1.0 / 9.0;
        let sigma: f64 = (expected * (1.0 - expected) / 2000.0f64).sqrt();
        assert!((rate - expected).abs() < 4.0 * sigma, "rate {rate} vs {expected}");
        assert!(rows[0].mean_density >= 1.0 / 9.0);
    }

    #[test]
    fn scans_are_deterministic() {
        let field = f3();
        let budget = EnumerationBudget::default();
        let cells = [(3, 4), (4, 8)];
        let a = success_rate_scan(field, &cells, 30, 77, budget);
        let b = success_rate_scan(field, &cells, 30, 77, budget);
        assert_eq!(a, b);
        let c = bernoulli_rate_scan(field, &[3, 4], 2.0, 30, 77, budget).unwrap();
        let d = bernoulli_rate_scan(field, &[3, 4], 2.0, 30, 77, budget).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn bernoulli_scan_degenerate_and_formula() {
        let field = f3();
        let budget = EnumerationBudget::default();
        // c = 0 → σ = 0 → empty samples are vacuously independent.
        let rows = bernoulli_rate_scan(field, &[3], 0.0, 20, 1, budget).unwrap();
        assert_eq!(rows[0].independent, 20);
        assert_eq!(rows[0].verified, 20);
        assert_eq!(rows[0].mean_size, 0.0);
        assert_eq!(rows[0].sigma, 0.0);

        let rows = bernoulli_rate_scan(field, &[4], 2.0, 5, 1, budget).unwrap();
        assert!((rows[0].sigma - 2.0 * 16.0 / 81.0).abs() < 1e-15);
        assert!(bernoulli_rate_scan(field, &[3], -1.0, 5, 1, budget).is_err());
    }
}
