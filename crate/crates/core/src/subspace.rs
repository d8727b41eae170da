//! Linear subspaces of F_p^m with a canonical representation.
//!
//! A subspace is stored as the reduced row-echelon basis of its row space.
//! Row reduction is deterministic, so two `Subspace` values are equal as
//! Rust values exactly when they are equal as subspaces — `span` of any
//! spanning set of the same space produces the identical struct.

use crate::budget::EnumerationBudget;
use crate::error::Error;
use crate::field::{unrank_vector, FieldMatrix, FieldVector, PrimeField};
use crate::Result;
use rand::Rng;

/// A subspace of F_p^m, canonically represented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    /// `dim × ambient` matrix in reduced row-echelon form with no zero rows.
    basis: FieldMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The span of an arbitrary list of vectors in F_p^`ambient`.
    pub fn span(field: PrimeField, ambient: usize, vectors: &[FieldVector]) -> Subspace {
        let stacked = FieldMatrix::from_rows(field, ambient, vectors);
        let ech = stacked.reduced_row_echelon();
        let rows: Vec<FieldVector> = (0..ech.rank).map(|i| ech.matrix.row(i)).collect();
        Subspace {
            field,
            ambient,
            basis: FieldMatrix::from_rows(field, ambient, &rows),
            pivots: ech.pivots,
        }
    }

    /// The zero subspace {0}.
    pub fn zero_space(field: PrimeField, ambient: usize) -> Subspace {
        Subspace::span(field, ambient, &[])
    }

    /// All of F_p^m.
    pub fn full(field: PrimeField, ambient: usize) -> Subspace {
        let rows: Vec<FieldVector> = (0..ambient)
            .map(|i| {
                let mut v = FieldVector::zero(field, ambient);
                v.set(i, 1);
                v
            })
            .collect();
        Subspace::span(field, ambient, &rows)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    /// The canonical reduced row-echelon basis (one row per dimension).
    pub fn basis(&self) -> &FieldMatrix {
        &self.basis
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &FieldVector) -> bool {
        assert_eq!(v.len(), self.ambient, "vector/ambient dimension mismatch");
        let mut rem = v.clone();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let coef = rem.get(pc);
            if coef != 0 {
                rem = rem.sub(&self.basis.row(i).scale(coef));
            }
        }
        rem.is_zero()
    }

    /// The orthogonal complement W^⊥ = {v : v·w = 0 for all w ∈ W} under
    /// the standard inner product.
    pub fn orthogonal_complement(&self) -> Subspace {
        // Null space of the basis matrix, read off the echelon form: one
        // generator per free column. Re-spanning makes the result canonical.
        let mut generators = Vec::with_capacity(self.ambient - self.dim());
        for j in 0..self.ambient {
            if self.pivots.contains(&j) {
                continue;
            }
            let mut v = FieldVector::zero(self.field, self.ambient);
            v.set(j, 1);
            for (i, &pc) in self.pivots.iter().enumerate() {
                v.set(pc, self.field.neg(self.basis[[i, j]]));
            }
            generators.push(v);
        }
        Subspace::span(self.field, self.ambient, &generators)
    }

    /// Number of elements `p^dim`, budget-checked.
    pub fn element_count(&self, budget: EnumerationBudget) -> Result<u64> {
        budget.check_pow(self.field.modulus(), self.dim() as u32)
    }

    /// The `index`-th element: coefficients of the basis rows are the
    /// lexicographic digits of `index`. Index 0 is the zero vector.
    pub fn element_at(&self, index: u64) -> FieldVector {
        let coeffs = unrank_vector(self.field, self.dim(), index);
        let mut v = FieldVector::zero(self.field, self.ambient);
        for i in 0..self.dim() {
            if coeffs.get(i) != 0 {
                v = v.add(&self.basis.row(i).scale(coeffs.get(i)));
            }
        }
        v
    }

    /// A uniformly random element.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> FieldVector {
        let p = self.field.modulus();
        let mut v = FieldVector::zero(self.field, self.ambient);
        for i in 0..self.dim() {
            let c = rng.random_range(0..p);
            if c != 0 {
                v = v.add(&self.basis.row(i).scale(c));
            }
        }
        v
    }
}

/// A uniformly random subspace of the given dimension, by drawing basis
/// vectors until they are independent.
pub fn random_subspace<R: Rng>(
    field: PrimeField,
    ambient: usize,
    dim: usize,
    rng: &mut R,
) -> Subspace {
    assert!(dim <= ambient, "subspace dimension exceeds ambient dimension");
    let p = field.modulus();
    loop {
        let vs: Vec<FieldVector> = (0..dim)
            .map(|_| {
                let mut v = FieldVector::zero(field, ambient);
                for j in 0..ambient {
                    v.set(j, rng.random_range(0..p));
                }
                v
            })
            .collect();
        let w = Subspace::span(field, ambient, &vs);
        if w.dim() == dim {
            return w;
        }
    }
}

/// The Gaussian binomial coefficient: the number of `k`-dimensional
/// subspaces of F_p^m, computed exactly.
pub fn subspace_count(p: u64, m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    let pow = |e: usize| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = acc.checked_mul(p as u128).expect("subspace_count overflow");
        }
        acc
    };
    for i in 0..k {
        num = num.checked_mul(pow(m - i) - 1).expect("subspace_count overflow");
        den = den.checked_mul(pow(i + 1) - 1).expect("subspace_count overflow");
    }
    debug_assert_eq!(num % den, 0);
    num / den
}

/// Advances `c` to the next `k`-combination of `0..m` in lexicographic
/// order; returns false after the last one.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Enumerates every `k`-dimensional subspace of F_p^m exactly once.
///
/// Subspaces are generated cell by cell: for each choice of pivot columns
/// the echelon basis has forced zeros and ones, and the remaining free
/// positions range over all of F_p. The basis matrices are therefore built
/// directly in reduced row-echelon form.
pub fn enumerate_subspaces(
    field: PrimeField,
    m: usize,
    k: usize,
    budget: EnumerationBudget,
) -> Result<Vec<Subspace>> {
    if k > m {
        return Err(Error::InvalidParameter(format!(
            "subspace dimension {k} exceeds ambient dimension {m}"
        )));
    }
    let total = subspace_count(field.modulus(), m, k);
    budget.check(total)?;
    let mut out = Vec::with_capacity(total as usize);
    if k == 0 {
        out.push(Subspace::zero_space(field, m));
        return Ok(out);
    }
    let p = field.modulus();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // Free positions: to the right of each pivot, excluding pivot columns.
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pivots = &pivots;
                (pivots[i] + 1..m)
                    .filter(move |j| !pivots.contains(j))
                    .map(move |j| (i, j))
            })
            .collect();
        let combos = {
            let mut acc: u64 = 1;
            for _ in 0..free.len() {
                acc *= p;
            }
            acc
        };
        for idx in 0..combos {
            let digits = unrank_vector(field, free.len(), idx);
            let mut basis = FieldMatrix::zero(field, k, m);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(i, pc, 1);
            }
            for (t, &(i, j)) in free.iter().enumerate() {
                basis.set(i, j, digits.get(t));
            }
            out.push(Subspace { field, ambient: m, basis, pivots: pivots.clone() });
        }
        if !next_combination(&mut pivots, m) {
            break;
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}
