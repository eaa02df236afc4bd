//! Evaluation of free-algebra polynomials on block algebras and matrix
//! rings, and the verdict machinery built on it: identity testing,
//! centrality, quasi-linearity, radical-annihilation diagnostics,
//! admissibility, characteristic-coefficient absorption, and budgeted
//! T-ideal membership with replayable certificates.
//!
//! Verdicts are tri-state. Over a finite field a non-multilinear polynomial
//! can only be certified an identity by full enumeration, so every search
//! mode states exactly what it proved: exhaustive modes return definitive
//! verdicts, randomized modes return a witness or `Inconclusive`, never
//! `Identity`. Searches enumerate assignment tuples in a fixed lexicographic
//! order (per-variable candidate index, first variable least significant);
//! the reported witness is the first in that order regardless of how the
//! search is partitioned among worker threads, and all sampling flows from
//! the caller's seed.

use crate::coeffring::{CoeffError, FieldScalar, FieldSpec, SpecScalars};
use crate::freealg::{AlgError, NcPolynomial, SubstitutionMap, Word};
use crate::matalg::{char_poly, left_regular, MatError, SquareMatrix};
use crate::polylib::{is_t_alternating, PolyLibError};
use crate::quiver::{
    compare_degree_vectors, maximal_path_vectors, BlockAlgebra, PureKind, QuiverError,
};
use crate::seeding::{child_seed, rng_from_seed};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PitestError {
    #[error("indeterminate x{0} has no assigned value")]
    UnassignedVariable(u64),
    #[error("indeterminate x{0} has no usable purity tag")]
    UnknownPurity(u64),
    #[error("polynomial is not multilinear alternating in the designated variables")]
    NotAlternating,
    #[error("operation requires field coefficients")]
    NotAField,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parameter {0} exceeds the cap {1}")]
    CapTooLarge(u32, u32),
    #[error("coefficients and matrices belong to incompatible rings")]
    MixedFields,
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    PolyLib(#[from] PolyLibError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Semisimple,
    Radical,
    Mixed,
    Unknown,
}

/// A finitely supported map from indeterminates to matrices of a common
/// ambient size, with per-variable purity tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    entries: BTreeMap<u64, (SquareMatrix, Purity)>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, var: u64, value: SquareMatrix, tag: Purity) {
        self.entries.insert(var, (value, tag));
    }

    pub fn get(&self, var: u64) -> Option<&SquareMatrix> {
        self.entries.get(&var).map(|(m, _)| m)
    }

    pub fn tag(&self, var: u64) -> Purity {
        self.entries
            .get(&var)
            .map(|(_, t)| *t)
            .unwrap_or(Purity::Unknown)
    }

    pub fn vars(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|(v, (m, t))| {
                (
                    format!("x{v}"),
                    serde_json::json!({
                        "matrix": m.to_json(),
                        "tag": serde_json::to_value(t).unwrap(),
                    }),
                )
            })
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Assignment, PitestError> {
        let bad = || PitestError::Coeff(CoeffError::Parse {
            text: value.to_string(),
            what: "assignment JSON",
        });
        let obj = value.as_object().ok_or_else(bad)?;
        let mut out = Assignment::new();
        for (key, entry) in obj {
            let var: u64 = key.strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let matrix = SquareMatrix::from_json(entry.get("matrix").ok_or_else(bad)?)?;
            let tag = entry
                .get("tag")
                .and_then(|t| serde_json::from_value(t.clone()).ok())
                .unwrap_or(Purity::Unknown);
            out.insert(var, matrix, tag);
        }
        Ok(out)
    }
}

impl Default for Assignment {
    fn default() -> Self {
        Assignment::new()
    }
}

/// Embed a polynomial coefficient into the evaluation field: identical
/// specs, integers into anything, and prime-subfield scalars into any field
/// of the same characteristic.
fn embed_scalar(c: &FieldScalar, field: &Arc<FieldSpec>) -> Result<FieldScalar, PitestError> {
    if c.spec() == field {
        return Ok(c.clone());
    }
    if c.spec().is_integers() {
        return Ok(field.from_bigint(c.as_integer().expect("integer repr")));
    }
    if c.spec().characteristic() == field.characteristic() {
        if let Some(v) = c.as_integer() {
            return Ok(field.from_bigint(v));
        }
    }
    Err(PitestError::MixedFields)
}

/// Evaluate a polynomial under an assignment into `M_n(field)`. The empty
/// word maps to the identity matrix (unital contexts only, which is
/// guaranteed by the polynomial's own invariant).
pub fn evaluate(
    f: &NcPolynomial,
    a: &Assignment,
    field: &Arc<FieldSpec>,
    n: usize,
) -> Result<SquareMatrix, PitestError> {
    let mut acc = SquareMatrix::zero(field.clone(), n);
    for (word, coeff) in f.terms() {
        let c = embed_scalar(coeff, field)?;
        let mut prod = SquareMatrix::identity(field.clone(), n).scale(&c);
        for &letter in word.letters() {
            let value = a
                .get(letter)
                .ok_or(PitestError::UnassignedVariable(letter))?;
            prod = prod.mul(value);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// search targets
// ---------------------------------------------------------------------------

/// What a polynomial is evaluated over: a realized block algebra or a full
/// matrix ring.
#[derive(Clone)]
pub enum AlgebraTarget<'a> {
    Block(&'a BlockAlgebra),
    MatrixRing { field: Arc<FieldSpec>, n: usize },
}

impl<'a> AlgebraTarget<'a> {
    pub fn field(&self) -> Arc<FieldSpec> {
        match self {
            AlgebraTarget::Block(b) => b.field.clone(),
            AlgebraTarget::MatrixRing { field, .. } => field.clone(),
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            AlgebraTarget::Block(b) => b.ambient,
            AlgebraTarget::MatrixRing { n, .. } => *n,
        }
    }

    /// Spanning basis with purity tags: block algebras list the semisimple
    /// then the radical basis; a full matrix ring lists its matrix units
    /// (all semisimple — its radical is zero).
    pub fn basis(&self) -> Vec<(SquareMatrix, Purity)> {
        match self {
            AlgebraTarget::Block(b) => {
                let mut v: Vec<(SquareMatrix, Purity)> = b
                    .semisimple
                    .iter()
                    .map(|m| (m.clone(), Purity::Semisimple))
                    .collect();
                v.extend(b.radical.iter().map(|m| (m.clone(), Purity::Radical)));
                v
            }
            AlgebraTarget::MatrixRing { field, n } => {
                let mut v = Vec::with_capacity(n * n);
                for i in 0..*n {
                    for j in 0..*n {
                        v.push((
                            SquareMatrix::unit(field.clone(), *n, i, j),
                            Purity::Semisimple,
                        ));
                    }
                }
                v
            }
        }
    }

    /// Total number of algebra elements, `None` when it overflows `u128`.
    pub fn element_count(&self) -> Option<u128> {
        match self {
            AlgebraTarget::Block(b) => Some(b.algebra_size()),
            AlgebraTarget::MatrixRing { field, n } => {
                let order = field.order()? as u128;
                order.checked_pow((n * n) as u32)
            }
        }
    }

    /// The element at an enumeration index.
    pub fn element_at(&self, idx: u128) -> SquareMatrix {
        match self {
            AlgebraTarget::Block(b) => b.span_element(&b.full_basis(), idx),
            AlgebraTarget::MatrixRing { field, n } => {
                let order = field.order().expect("finite field") as u128;
                let mut m = SquareMatrix::zero(field.clone(), *n);
                let mut k = idx;
                for i in 0..*n {
                    for j in 0..*n {
                        let digit = (k % order) as u64;
                        k /= order;
                        m.set(i, j, field.scalar_from_index(digit));
                    }
                }
                m
            }
        }
    }

    /// All pure elements (semisimple span, then nonzero radical span), when
    /// the spans are enumerable within the budget.
    pub fn pure_elements(&self, budget: u64) -> Option<Vec<(SquareMatrix, Purity)>> {
        match self {
            AlgebraTarget::Block(b) => {
                let s_count = b.span_size(b.semisimple.len());
                let j_count = b.span_size(b.radical.len());
                if s_count + j_count > budget as u128 {
                    return None;
                }
                let mut out: Vec<(SquareMatrix, Purity)> = b
                    .enumerate_pure(PureKind::Semisimple, budget, 0)
                    .into_iter()
                    .map(|m| (m, Purity::Semisimple))
                    .collect();
                for m in b.enumerate_pure(PureKind::Radical, budget, 0) {
                    if !m.is_zero() {
                        out.push((m, Purity::Radical));
                    }
                }
                Some(out)
            }
            AlgebraTarget::MatrixRing { .. } => {
                let count = self.element_count()?;
                if count > budget as u128 {
                    return None;
                }
                Some(
                    (0..count)
                        .map(|i| (self.element_at(i), Purity::Semisimple))
                        .collect(),
                )
            }
        }
    }

    /// Nilpotence index when known (1 for matrix rings: zero radical).
    pub fn nilpotence_index(&self) -> usize {
        match self {
            AlgebraTarget::Block(b) => b.nilpotence_index,
            AlgebraTarget::MatrixRing { .. } => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// deterministic parallel search
// ---------------------------------------------------------------------------

/// Run under the configured worker pool (`PIFORGE_THREADS`, default: all
/// cores). Results must not depend on the pool size; searches guarantee this
/// by reducing to the minimum enumeration index.
pub fn run_in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("PIFORGE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1);
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

/// Smallest index in `0..total` where `test` holds, scanning chunks in
/// parallel; `find_map_first` keeps the answer the leftmost one.
fn search_first<F>(total: u128, test: F) -> Option<u128>
where
    F: Fn(u128) -> bool + Sync,
{
    const CHUNK: u128 = 1024;
    let chunks = total.div_ceil(CHUNK);
    run_in_pool(|| {
        (0..chunks as u64)
            .into_par_iter()
            .find_map_first(|c| {
                let start = c as u128 * CHUNK;
                let end = (start + CHUNK).min(total);
                (start..end).find(|&i| test(i))
            })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Identity,
    NonIdentity,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Auto,
    ExhaustiveBasis,
    ExhaustivePure,
    ExhaustiveAll,
    Randomized,
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub verdict: Verdict,
    pub mode: SearchMode,
    pub witness: Option<Assignment>,
    pub witness_value: Option<SquareMatrix>,
    pub trials: u64,
    pub seed: u64,
}

impl IdentityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": serde_json::to_value(self.verdict).unwrap(),
            "mode": serde_json::to_value(self.mode).unwrap(),
            "witness": self.witness.as_ref().map(|w| w.to_json()),
            "witness_value": self.witness_value.as_ref().map(|m| m.to_json()),
            "trials": self.trials,
            "seed": self.seed,
        })
    }
}

/// Mixed-radix tuple: digit `i` indexes the candidate list of variable `i`.
fn tuple_assignment(
    vars: &[u64],
    candidates: &[(SquareMatrix, Purity)],
    mut index: u128,
) -> Assignment {
    let base = candidates.len() as u128;
    let mut a = Assignment::new();
    for &v in vars {
        let digit = (index % base) as usize;
        index /= base;
        let (m, tag) = &candidates[digit];
        a.insert(v, m.clone(), *tag);
    }
    a
}

fn assignment_from_elements(vars: &[u64], target: &AlgebraTarget, mut index: u128) -> Assignment {
    let count = target.element_count().expect("enumerable");
    let mut a = Assignment::new();
    for &v in vars {
        let digit = index % count;
        index /= count;
        a.insert(v, target.element_at(digit), Purity::Unknown);
    }
    a
}

/// Identity testing with the mode ladder: multilinear polynomials are
/// checked exhaustively on basis tuples (sound and complete); quasi-linear
/// polynomials exhaustively on pure elements; small algebras exhaustively on
/// everything; anything else by seeded sampling, which can only ever return
/// `NonIdentity` or `Inconclusive`.
pub fn is_identity(
    f: &NcPolynomial,
    target: &AlgebraTarget,
    mode: SearchMode,
    budget: u64,
    trials: u64,
    seed: u64,
) -> Result<IdentityReport, PitestError> {
    let vars: Vec<u64> = f.vars().into_iter().collect();
    let field = target.field();
    let n = target.ambient();
    if f.is_zero() {
        return Ok(IdentityReport {
            verdict: Verdict::Identity,
            mode: SearchMode::ExhaustiveBasis,
            witness: None,
            witness_value: None,
            trials: 0,
            seed,
        });
    }
    let multilinear = f.is_multilinear_in(&vars);
    let resolved = match mode {
        SearchMode::Auto => {
            let basis_count = (target.basis().len() as u128)
                .checked_pow(vars.len() as u32);
            if multilinear && basis_count.map(|c| c <= budget as u128).unwrap_or(false) {
                SearchMode::ExhaustiveBasis
            } else if quasi_linear_everywhere(f, target, &vars, budget, seed)?
                && pure_tuple_count(target, vars.len(), budget).is_some()
            {
                SearchMode::ExhaustivePure
            } else if target
                .element_count()
                .and_then(|c| c.checked_pow(vars.len() as u32))
                .map(|c| c <= budget as u128)
                .unwrap_or(false)
            {
                SearchMode::ExhaustiveAll
            } else {
                SearchMode::Randomized
            }
        }
        m => m,
    };
    match resolved {
        SearchMode::Auto => unreachable!(),
        SearchMode::ExhaustiveBasis => {
            let candidates = target.basis();
            let total = (candidates.len() as u128)
                .checked_pow(vars.len() as u32)
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| {
                    PitestError::BudgetExceeded(format!(
                        "basis tuple space exceeds budget {budget}"
                    ))
                })?;
            let hit = search_first(total, |i| {
                let a = tuple_assignment(&vars, &candidates, i);
                evaluate(f, &a, &field, n).map(|v| !v.is_zero()).unwrap_or(false)
            });
            finish_report(f, target, resolved, hit.map(|i| tuple_assignment(&vars, &candidates, i)), total as u64, seed, multilinear)
        }
        SearchMode::ExhaustivePure => {
            let candidates = target.pure_elements(budget).ok_or_else(|| {
                PitestError::BudgetExceeded(format!("pure spans exceed budget {budget}"))
            })?;
            let total = (candidates.len() as u128)
                .checked_pow(vars.len() as u32)
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| {
                    PitestError::BudgetExceeded(format!(
                        "pure tuple space exceeds budget {budget}"
                    ))
                })?;
            let hit = search_first(total, |i| {
                let a = tuple_assignment(&vars, &candidates, i);
                evaluate(f, &a, &field, n).map(|v| !v.is_zero()).unwrap_or(false)
            });
            let complete = multilinear
                || quasi_linear_everywhere(f, target, &vars, budget, seed)?;
            finish_report(f, target, resolved, hit.map(|i| tuple_assignment(&vars, &candidates, i)), total as u64, seed, complete)
        }
        SearchMode::ExhaustiveAll => {
            let total = target
                .element_count()
                .and_then(|c| c.checked_pow(vars.len() as u32))
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| {
                    PitestError::BudgetExceeded(format!(
                        "full tuple space exceeds budget {budget}"
                    ))
                })?;
            let hit = search_first(total, |i| {
                let a = assignment_from_elements(&vars, target, i);
                evaluate(f, &a, &field, n).map(|v| !v.is_zero()).unwrap_or(false)
            });
            finish_report(f, target, resolved, hit.map(|i| assignment_from_elements(&vars, target, i)), total as u64, seed, true)
        }
        SearchMode::Randomized => {
            let count = target.element_count();
            let mut rng = rng_from_seed(child_seed(seed, 1));
            let samples: Vec<u128> = (0..trials)
                .map(|_| match count {
                    Some(c) => {
                        // one element index per variable, packed later
                        let mut idx = 0u128;
                        for _ in 0..vars.len() {
                            idx = idx
                                .wrapping_mul(c)
                                .wrapping_add(rng.gen_range(0..c));
                        }
                        idx
                    }
                    None => 0,
                })
                .collect();
            let hit = run_in_pool(|| {
                samples
                    .par_iter()
                    .position_first(|&i| {
                        let a = assignment_from_elements(&vars, target, i);
                        evaluate(f, &a, &field, n).map(|v| !v.is_zero()).unwrap_or(false)
                    })
            });
            let witness = hit.map(|pos| assignment_from_elements(&vars, target, samples[pos]));
            finish_report(f, target, resolved, witness, trials, seed, false)
        }
    }
}

fn finish_report(
    f: &NcPolynomial,
    target: &AlgebraTarget,
    mode: SearchMode,
    witness: Option<Assignment>,
    trials: u64,
    seed: u64,
    complete: bool,
) -> Result<IdentityReport, PitestError> {
    let (verdict, witness_value) = match &witness {
        Some(a) => {
            let value = evaluate(f, a, &target.field(), target.ambient())?;
            debug_assert!(!value.is_zero());
            (Verdict::NonIdentity, Some(value))
        }
        None if complete => (Verdict::Identity, None),
        None => (Verdict::Inconclusive, None),
    };
    Ok(IdentityReport {
        verdict,
        mode,
        witness,
        witness_value,
        trials,
        seed,
    })
}

fn pure_tuple_count(target: &AlgebraTarget, nvars: usize, budget: u64) -> Option<u128> {
    let pures = target.pure_elements(budget)?;
    (pures.len() as u128)
        .checked_pow(nvars as u32)
        .filter(|&c| c <= budget as u128)
}

fn quasi_linear_everywhere(
    f: &NcPolynomial,
    target: &AlgebraTarget,
    vars: &[u64],
    budget: u64,
    seed: u64,
) -> Result<bool, PitestError> {
    for (k, &v) in vars.iter().enumerate() {
        let (verdict, _) = is_quasi_linear(f, target, v, budget, child_seed(seed, 100 + k as u64))?;
        if verdict != QlVerdict::Yes {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QlVerdict {
    Yes,
    No,
    Inconclusive,
}

/// Additivity of `f` in variable `i` over the target: tests
/// `f(..., a + a', ...) = f(..., a, ...) + f(..., a', ...)`. Exhaustive over
/// element pairs when the square of the algebra fits the budget (then a
/// `Yes` additionally requires the sweep of the other variables to have been
/// exhaustive too); otherwise seeded sampling, which cannot return `Yes`.
pub fn is_quasi_linear(
    f: &NcPolynomial,
    target: &AlgebraTarget,
    var: u64,
    budget: u64,
    seed: u64,
) -> Result<(QlVerdict, Option<(Assignment, SquareMatrix, SquareMatrix)>), PitestError> {
    if f.deg_in(var) <= 1 {
        // structurally linear in the variable
        return Ok((QlVerdict::Yes, None));
    }
    let field = target.field();
    let n = target.ambient();
    let others: Vec<u64> = f.vars().into_iter().filter(|&v| v != var).collect();
    let count = target.element_count();
    let pairs_exhaustive = count
        .and_then(|c| c.checked_mul(c))
        .map(|c| c <= budget as u128)
        .unwrap_or(false);
    let others_space = count.and_then(|c| c.checked_pow(others.len() as u32));
    let others_exhaustive = others_space.map(|c| c <= budget as u128).unwrap_or(false);
    let mut rng = rng_from_seed(child_seed(seed, 2));
    let other_assignments: Vec<Assignment> = if others.is_empty() {
        vec![Assignment::new()]
    } else if others_exhaustive {
        (0..others_space.unwrap())
            .map(|i| assignment_from_elements(&others, target, i))
            .collect()
    } else {
        let c = count.unwrap_or(u128::MAX);
        (0..32.min(budget))
            .map(|_| {
                let mut a = Assignment::new();
                for &v in &others {
                    a.insert(v, target.element_at(rng.gen_range(0..c)), Purity::Unknown);
                }
                a
            })
            .collect()
    };
    let pair_indices: Vec<(u128, u128)> = if pairs_exhaustive {
        let c = count.unwrap();
        (0..c)
            .flat_map(|a| (0..c).map(move |b| (a, b)))
            .collect()
    } else {
        let c = count.unwrap_or(u128::MAX);
        (0..budget.min(4096))
            .map(|_| (rng.gen_range(0..c), rng.gen_range(0..c)))
            .collect()
    };
    for (ai, bi) in pair_indices {
        let a = target.element_at(ai);
        let b = target.element_at(bi);
        for base in &other_assignments {
            let mut left = base.clone();
            left.insert(var, a.add(&b), Purity::Unknown);
            let mut ra = base.clone();
            ra.insert(var, a.clone(), Purity::Unknown);
            let mut rb = base.clone();
            rb.insert(var, b.clone(), Purity::Unknown);
            let lhs = evaluate(f, &left, &field, n)?;
            let rhs = evaluate(f, &ra, &field, n)?.add(&evaluate(f, &rb, &field, n)?);
            if lhs != rhs {
                return Ok((QlVerdict::No, Some((left, a, b))));
            }
        }
    }
    if pairs_exhaustive && (others.is_empty() || others_exhaustive) {
        Ok((QlVerdict::Yes, None))
    } else {
        Ok((QlVerdict::Inconclusive, None))
    }
}

/// Centrality report: whether every evaluation commutes with the whole
/// target (equivalently is scalar on a full matrix ring), plus whether the
/// polynomial is a non-identity (a central polynomial must be one).
#[derive(Debug, Clone)]
pub struct CentralReport {
    pub central: Verdict,
    pub central_witness: Option<Assignment>,
    pub nonidentity: Verdict,
    pub nonidentity_witness: Option<Assignment>,
    pub mode: SearchMode,
    pub seed: u64,
}

impl CentralReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "central": serde_json::to_value(self.central).unwrap(),
            "central_witness": self.central_witness.as_ref().map(|w| w.to_json()),
            "nonidentity": serde_json::to_value(self.nonidentity).unwrap(),
            "nonidentity_witness": self.nonidentity_witness.as_ref().map(|w| w.to_json()),
            "mode": serde_json::to_value(self.mode).unwrap(),
            "seed": self.seed,
        })
    }
}

pub fn is_central(
    f: &NcPolynomial,
    target: &AlgebraTarget,
    mode: SearchMode,
    budget: u64,
    trials: u64,
    seed: u64,
) -> Result<CentralReport, PitestError> {
    let field = target.field();
    let n = target.ambient();
    let basis: Vec<SquareMatrix> = target.basis().into_iter().map(|(m, _)| m).collect();
    // f is central iff [f(x), b] vanishes for every basis element b;
    // commuting with a spanning set is commuting with everything
    let commutes = |value: &SquareMatrix| basis.iter().all(|b| value.commutes_with(b));
    let vars: Vec<u64> = f.vars().into_iter().collect();
    let multilinear = f.is_multilinear_in(&vars);
    let resolved = match mode {
        SearchMode::Auto => {
            let basis_count = (basis.len() as u128).checked_pow(vars.len() as u32);
            if multilinear && basis_count.map(|c| c <= budget as u128).unwrap_or(false) {
                SearchMode::ExhaustiveBasis
            } else if target
                .element_count()
                .and_then(|c| c.checked_pow(vars.len() as u32))
                .map(|c| c <= budget as u128)
                .unwrap_or(false)
            {
                SearchMode::ExhaustiveAll
            } else {
                SearchMode::Randomized
            }
        }
        m => m,
    };
    let candidates = target.basis();
    let (central, central_witness) = match resolved {
        SearchMode::ExhaustiveBasis => {
            let total = (candidates.len() as u128)
                .checked_pow(vars.len() as u32)
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| {
                    PitestError::BudgetExceeded("basis tuple space exceeds budget".into())
                })?;
            let hit = search_first(total, |i| {
                let a = tuple_assignment(&vars, &candidates, i);
                evaluate(f, &a, &field, n)
                    .map(|v| !commutes(&v))
                    .unwrap_or(false)
            });
            match hit {
                Some(i) => (Verdict::NonIdentity, Some(tuple_assignment(&vars, &candidates, i))),
                None if multilinear => (Verdict::Identity, None),
                None => (Verdict::Inconclusive, None),
            }
        }
        SearchMode::ExhaustiveAll | SearchMode::Auto | SearchMode::ExhaustivePure => {
            let total = target
                .element_count()
                .and_then(|c| c.checked_pow(vars.len() as u32))
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| {
                    PitestError::BudgetExceeded("full tuple space exceeds budget".into())
                })?;
            let hit = search_first(total, |i| {
                let a = assignment_from_elements(&vars, target, i);
                evaluate(f, &a, &field, n)
                    .map(|v| !commutes(&v))
                    .unwrap_or(false)
            });
            match hit {
                Some(i) => (
                    Verdict::NonIdentity,
                    Some(assignment_from_elements(&vars, target, i)),
                ),
                None => (Verdict::Identity, None),
            }
        }
        SearchMode::Randomized => {
            let count = target.element_count().unwrap_or(u128::MAX);
            let mut rng = rng_from_seed(child_seed(seed, 3));
            let mut found = None;
            for _ in 0..trials {
                let mut a = Assignment::new();
                for &v in &vars {
                    a.insert(v, target.element_at(rng.gen_range(0..count)), Purity::Unknown);
                }
                let value = evaluate(f, &a, &field, n)?;
                if !commutes(&value) {
                    found = Some(a);
                    break;
                }
            }
            match found {
                Some(a) => (Verdict::NonIdentity, Some(a)),
                None => (Verdict::Inconclusive, None),
            }
        }
    };
    // `Identity` in the centrality slot means: no non-central value exists
    // (search was complete), i.e. the polynomial is central
    let id_report = is_identity(f, target, SearchMode::Auto, budget, trials, child_seed(seed, 4))?;
    Ok(CentralReport {
        central,
        central_witness,
        nonidentity: id_report.verdict,
        nonidentity_witness: id_report.witness,
        mode: resolved,
        seed,
    })
}

/// Per-monomial radical-substitution counts: a monomial whose count reaches
/// the nilpotence index is flagged, and its evaluation is checked to vanish.
#[derive(Debug, Clone, Serialize)]
pub struct NilpotenceRow {
    pub word: String,
    pub radical_count: usize,
    pub flagged: bool,
    pub value_is_zero: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NilpotenceReport {
    pub nilpotence_index: usize,
    pub rows: Vec<NilpotenceRow>,
    pub all_flagged_zero: bool,
}

pub fn nilpotence_diagnostics(
    f: &NcPolynomial,
    alg: &BlockAlgebra,
    a: &Assignment,
) -> Result<NilpotenceReport, PitestError> {
    for v in f.vars() {
        match a.tag(v) {
            Purity::Unknown => return Err(PitestError::UnknownPurity(v)),
            _ => {}
        }
    }
    let index = alg.nilpotence_index;
    let mut rows = Vec::new();
    let mut all_zero = true;
    for (word, coeff) in f.terms() {
        let radical_count = word
            .letters()
            .iter()
            .filter(|&&l| a.tag(l) == Purity::Radical)
            .count();
        let flagged = radical_count >= index;
        let value_is_zero = if flagged {
            let monomial = NcPolynomial::monomial(f.spec().clone(), word.clone(), coeff.clone());
            let value = evaluate(&monomial, a, &alg.field, alg.ambient)?;
            let z = value.is_zero();
            all_zero &= z;
            Some(z)
        } else {
            None
        };
        rows.push(NilpotenceRow {
            word: word.to_text(),
            radical_count,
            flagged,
            value_is_zero,
        });
    }
    Ok(NilpotenceReport {
        nilpotence_index: index,
        rows,
        all_flagged_zero: all_zero,
    })
}

/// A successful admissibility search: a pure assignment with a nonzero
/// value whose nonzero entry connects blocks along a path of maximal degree
/// vector.
#[derive(Debug, Clone)]
pub struct AdmissibleWitness {
    pub assignment: Assignment,
    pub value: SquareMatrix,
    pub path: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AdmissibleReport {
    pub witness: Option<AdmissibleWitness>,
    pub exhaustive: bool,
    pub seed: u64,
}

/// All directed paths from block `u` to block `v` (vertex indices).
fn paths_between(alg: &BlockAlgebra, u: usize, v: usize) -> Vec<Vec<usize>> {
    let spec = &alg.quiver;
    let n = spec.vertices.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &spec.edges {
        if let (Some(a), Some(b)) = (spec.vertex_index(&e.from), spec.vertex_index(&e.to)) {
            succ[a].push(b);
        }
    }
    let mut out = Vec::new();
    let mut stack = vec![u];
    fn dfs(
        cur: usize,
        goal: usize,
        succ: &[Vec<usize>],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur == goal {
            out.push(stack.clone());
        }
        for &w in &succ[cur] {
            stack.push(w);
            dfs(w, goal, succ, stack, out);
            stack.pop();
        }
    }
    dfs(u, v, &succ, &mut stack, &mut out);
    out
}

/// Search pure assignments for a nonzero evaluation whose induced path has
/// a maximal degree vector.
pub fn is_admissible(
    f: &NcPolynomial,
    alg: &BlockAlgebra,
    budget: u64,
    seed: u64,
) -> Result<AdmissibleReport, PitestError> {
    let target = AlgebraTarget::Block(alg);
    let vars: Vec<u64> = f.vars().into_iter().collect();
    let field = alg.field.clone();
    let n = alg.ambient;
    let vectors = maximal_path_vectors(&alg.quiver);
    let vmax = vectors
        .iter()
        .max_by(|a, b| compare_degree_vectors(a, b))
        .cloned();
    let Some(vmax) = vmax else {
        return Ok(AdmissibleReport {
            witness: None,
            exhaustive: true,
            seed,
        });
    };
    let check = |a: &Assignment| -> Result<Option<AdmissibleWitness>, PitestError> {
        let value = evaluate(f, a, &field, n)?;
        if value.is_zero() {
            return Ok(None);
        }
        for i in 0..n {
            for j in 0..n {
                if value.get(i, j).is_zero() {
                    continue;
                }
                let (bu, bv) = (alg.block_of(i), alg.block_of(j));
                for path in paths_between(alg, bu, bv) {
                    let ids: Vec<String> = path
                        .iter()
                        .map(|&k| alg.quiver.vertices[k].id.clone())
                        .collect();
                    let dv = crate::quiver::path_degree_vector(&alg.quiver, &ids)?;
                    if compare_degree_vectors(&dv, &vmax) == std::cmp::Ordering::Equal {
                        return Ok(Some(AdmissibleWitness {
                            assignment: a.clone(),
                            value: value.clone(),
                            path: ids,
                        }));
                    }
                }
            }
        }
        Ok(None)
    };
    if vars.is_empty() {
        let witness = check(&Assignment::new())?;
        return Ok(AdmissibleReport {
            witness,
            exhaustive: true,
            seed,
        });
    }
    match target.pure_elements(budget) {
        Some(candidates) => {
            let total = (candidates.len() as u128).checked_pow(vars.len() as u32);
            match total.filter(|&c| c <= budget as u128) {
                Some(total) => {
                    for i in 0..total {
                        let a = tuple_assignment(&vars, &candidates, i);
                        if let Some(w) = check(&a)? {
                            return Ok(AdmissibleReport {
                                witness: Some(w),
                                exhaustive: true,
                                seed,
                            });
                        }
                    }
                    Ok(AdmissibleReport {
                        witness: None,
                        exhaustive: true,
                        seed,
                    })
                }
                None => {
                    let mut rng = rng_from_seed(child_seed(seed, 5));
                    let space = (candidates.len() as u128).pow(vars.len() as u32);
                    for _ in 0..budget {
                        let a = tuple_assignment(&vars, &candidates, rng.gen_range(0..space));
                        if let Some(w) = check(&a)? {
                            return Ok(AdmissibleReport {
                                witness: Some(w),
                                exhaustive: false,
                                seed,
                            });
                        }
                    }
                    Ok(AdmissibleReport {
                        witness: None,
                        exhaustive: false,
                        seed,
                    })
                }
            }
        }
        None => Ok(AdmissibleReport {
            witness: None,
            exhaustive: false,
            seed,
        }),
    }
}

// ---------------------------------------------------------------------------
// characteristic-coefficient absorption
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AbsorptionReport {
    pub n: usize,
    pub t: usize,
    pub field: String,
    pub qbar: u64,
    pub trials: u64,
    pub seed: u64,
    /// Which sign convention made the per-level identity exact in every
    /// trial: elementary-symmetric (`(-1)^k α_{t-k}`), unsigned (`α_{t-k}`),
    /// both, or neither.
    pub convention: String,
    pub elementary_symmetric_ok: bool,
    pub unsigned_ok: bool,
    pub telescope_ok: bool,
}

/// Verify the coefficient-absorption identity for a `t`-alternating
/// multilinear polynomial `f(x_1..x_t; y...)` with `t = n^2`, where the
/// transformation `T` acts on the matrix ring `M_n` by left multiplication:
/// for each level `k`, compare `coeff_k(T) * f(a_1..a_t; r)` with the sum of
/// `f` over all ways of applying `T` to exactly `k` of the alternating
/// slots. Both sign conventions for `coeff_k` are tried and the report says
/// which one is exact. The Cayley-Hamilton telescope
/// `Σ_k α_k f(T^k a_1, a_2, ..., a_t; r) = 0` (with `α_t = 1`) is checked in
/// the same trials.
pub fn absorption_check(
    f: &NcPolynomial,
    n: usize,
    field: &Arc<FieldSpec>,
    trials: u64,
    seed: u64,
    qbar: u64,
) -> Result<AbsorptionReport, PitestError> {
    let t = n * n;
    let alt_vars: Vec<u64> = (1..=t as u64).collect();
    if !f.is_multilinear_in(&alt_vars) || !is_t_alternating(f, t as u32)? {
        return Err(PitestError::NotAlternating);
    }
    let other_vars: Vec<u64> = f
        .vars()
        .into_iter()
        .filter(|v| !alt_vars.contains(v))
        .collect();
    let mut es_ok = true;
    let mut unsigned_ok = true;
    let mut telescope_ok = true;
    for trial in 0..trials {
        let mut rng = rng_from_seed(child_seed(seed, 10_000 + trial));
        let t_mat = SquareMatrix::random(field, n, &mut rng).pow(qbar);
        let reg = left_regular(&t_mat)?;
        let cp = char_poly(&reg)?;
        let mut base = Assignment::new();
        for &v in &alt_vars {
            base.insert(v, SquareMatrix::random(field, n, &mut rng), Purity::Mixed);
        }
        for &v in &other_vars {
            base.insert(v, SquareMatrix::random(field, n, &mut rng), Purity::Mixed);
        }
        let f_base = evaluate(f, &base, field, n)?;
        // per-level subset sums
        for k in 1..=t {
            let mut rhs = SquareMatrix::zero(field.clone(), n);
            for subset in subsets_of_size(t, k) {
                let mut a = base.clone();
                for &slot in &subset {
                    let var = slot as u64 + 1;
                    let applied = t_mat.mul(base.get(var).unwrap());
                    a.insert(var, applied, Purity::Mixed);
                }
                rhs = rhs.add(&evaluate(f, &a, field, n)?);
            }
            // convention A: elementary symmetric e_k = (-1)^k α_{t-k}
            let alpha = if k == 0 {
                field.one()
            } else {
                cp.alpha(t - k).clone()
            };
            let e_k = if k % 2 == 1 { alpha.neg() } else { alpha.clone() };
            if f_base.scale(&e_k) != rhs {
                es_ok = false;
            }
            if f_base.scale(&alpha) != rhs {
                unsigned_ok = false;
            }
        }
        // Cayley-Hamilton telescope on the first slot:
        // Σ_{k<t} α_k f(T^k a_1, ...) + f(T^t a_1, ...) = 0
        let mut telescope = SquareMatrix::zero(field.clone(), n);
        for k in 0..=t {
            let mut a = base.clone();
            let powered = t_mat.pow(k as u64).mul(base.get(1).unwrap());
            a.insert(1, powered, Purity::Mixed);
            let term = evaluate(f, &a, field, n)?;
            let coeff = if k == t {
                field.one()
            } else {
                cp.alpha(k).clone()
            };
            telescope = telescope.add(&term.scale(&coeff));
        }
        if !telescope.is_zero() {
            telescope_ok = false;
        }
    }
    let convention = match (es_ok, unsigned_ok) {
        (true, true) => "both",
        (true, false) => "elementary-symmetric",
        (false, true) => "unsigned",
        (false, false) => "none",
    };
    Ok(AbsorptionReport {
        n,
        t,
        field: field.designator(),
        qbar,
        trials,
        seed,
        convention: convention.to_string(),
        elementary_symmetric_ok: es_ok,
        unsigned_ok: unsigned_ok,
        telescope_ok,
    })
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The formal alternating-sign aggregate over all ways of applying a fresh
/// transformation letter `T` to the multilinear slots `x_1..x_t`:
/// `Σ_{S ⊆ [t]} (-1)^{|S|} f(T^{[1 ∈ S]} x_1, ..., T^{[t ∈ S]} x_t)`,
/// `2^t` substituted copies of `f`.
pub fn induced_hc_identity(f: &NcPolynomial, t: u32) -> Result<NcPolynomial, PitestError> {
    if t > 6 {
        return Err(PitestError::CapTooLarge(t, 6));
    }
    let vars: Vec<u64> = (1..=t as u64).collect();
    if !f.is_multilinear_in(&vars) {
        return Err(PitestError::NotAlternating);
    }
    let spec = f.spec().clone();
    let t_letter = f.max_letter() + 1;
    let t_poly = NcPolynomial::variable(spec.clone(), t_letter);
    let mut out = NcPolynomial::zero(spec.clone(), f.is_unital());
    for mask in 0u32..(1 << t) {
        let mut sigma = SubstitutionMap::identity();
        for (slot, &v) in vars.iter().enumerate() {
            if mask & (1 << slot) != 0 {
                let xv = NcPolynomial::variable(spec.clone(), v);
                sigma.insert(v, t_poly.mul(&xv));
            }
        }
        let term = f.substitute(&sigma);
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        out = out.add(&term.scale(&spec.from_int(sign)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// budgeted T-ideal membership
// ---------------------------------------------------------------------------

pub const TIDEAL_MAX_DEG: u32 = 8;
pub const TIDEAL_MAX_VARS: u64 = 6;

/// How a span element was produced; indices refer to earlier elements of the
/// same certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    Generator(usize),
    MonomialSub {
        parent: usize,
        var: u64,
        word: Word,
    },
    TwoTermSub {
        parent: usize,
        var: u64,
        c1: FieldScalar,
        w1: Word,
        c2: FieldScalar,
        w2: Word,
    },
    Linearize {
        parent: usize,
        var: u64,
        rename: BTreeMap<u64, u64>,
    },
    LeftMul {
        parent: usize,
        word: Word,
    },
    RightMul {
        parent: usize,
        word: Word,
    },
}

#[derive(Debug, Clone)]
pub struct SpanElement {
    pub poly: NcPolynomial,
    pub recipe: Recipe,
}

/// A membership certificate: the produced span elements and the linear
/// combination of them that equals the target.
#[derive(Debug, Clone)]
pub struct MembershipCertificate {
    pub elements: Vec<SpanElement>,
    pub combination: Vec<(usize, FieldScalar)>,
}

impl MembershipCertificate {
    /// Rebuild every element from its recipe and re-evaluate the recorded
    /// combination; true exactly when it reproduces the target.
    pub fn replay(&self, gens: &[NcPolynomial], target: &NcPolynomial) -> bool {
        let mut rebuilt: Vec<NcPolynomial> = Vec::with_capacity(self.elements.len());
        for e in &self.elements {
            let poly = match &e.recipe {
                Recipe::Generator(i) => match gens.get(*i) {
                    Some(g) => g.clone(),
                    None => return false,
                },
                Recipe::MonomialSub { parent, var, word } => {
                    let Some(parent) = rebuilt.get(*parent) else { return false };
                    let image = NcPolynomial::monomial(
                        parent.spec().clone(),
                        word.clone(),
                        parent.spec().one(),
                    );
                    parent.substitute(&SubstitutionMap::single(*var, image))
                }
                Recipe::TwoTermSub {
                    parent,
                    var,
                    c1,
                    w1,
                    c2,
                    w2,
                } => {
                    let Some(parent) = rebuilt.get(*parent) else { return false };
                    let image = NcPolynomial::monomial(parent.spec().clone(), w1.clone(), c1.clone())
                        .add(&NcPolynomial::monomial(
                            parent.spec().clone(),
                            w2.clone(),
                            c2.clone(),
                        ));
                    parent.substitute(&SubstitutionMap::single(*var, image))
                }
                Recipe::Linearize {
                    parent,
                    var,
                    rename,
                } => {
                    let Some(parent) = rebuilt.get(*parent) else { return false };
                    match parent.partial_linearization(*var) {
                        Ok(delta) => delta.rename(rename),
                        Err(_) => return false,
                    }
                }
                Recipe::LeftMul { parent, word } => {
                    let Some(parent) = rebuilt.get(*parent) else { return false };
                    let m = NcPolynomial::monomial(
                        parent.spec().clone(),
                        word.clone(),
                        parent.spec().one(),
                    );
                    m.mul(parent)
                }
                Recipe::RightMul { parent, word } => {
                    let Some(parent) = rebuilt.get(*parent) else { return false };
                    let m = NcPolynomial::monomial(
                        parent.spec().clone(),
                        word.clone(),
                        parent.spec().one(),
                    );
                    parent.mul(&m)
                }
            };
            if poly != e.poly {
                return false;
            }
            rebuilt.push(poly);
        }
        let spec = target.spec().clone();
        let mut acc = NcPolynomial::zero(spec, target.is_unital());
        for (idx, c) in &self.combination {
            let Some(e) = rebuilt.get(*idx) else { return false };
            acc = acc.add(&e.scale(c));
        }
        acc == *target
    }

    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|e| {
                let recipe = match &e.recipe {
                    Recipe::Generator(i) => serde_json::json!({"op": "generator", "index": i}),
                    Recipe::MonomialSub { parent, var, word } => serde_json::json!({
                        "op": "monomial-sub", "parent": parent, "var": var, "word": word.to_text(),
                    }),
                    Recipe::TwoTermSub { parent, var, c1, w1, c2, w2 } => serde_json::json!({
                        "op": "two-term-sub", "parent": parent, "var": var,
                        "c1": c1.to_text(), "w1": w1.to_text(),
                        "c2": c2.to_text(), "w2": w2.to_text(),
                    }),
                    Recipe::Linearize { parent, var, rename } => serde_json::json!({
                        "op": "linearize", "parent": parent, "var": var,
                        "rename": rename.iter().map(|(a, b)| (a.to_string(), b)).collect::<BTreeMap<_, _>>(),
                    }),
                    Recipe::LeftMul { parent, word } => serde_json::json!({
                        "op": "left-mul", "parent": parent, "word": word.to_text(),
                    }),
                    Recipe::RightMul { parent, word } => serde_json::json!({
                        "op": "right-mul", "parent": parent, "word": word.to_text(),
                    }),
                };
                serde_json::json!({"poly": e.poly.to_text(), "recipe": recipe})
            })
            .collect();
        serde_json::json!({
            "elements": elements,
            "combination": self.combination.iter()
                .map(|(i, c)| serde_json::json!({"index": i, "coeff": c.to_text()}))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub enum Membership {
    Member(MembershipCertificate),
    /// Not found within the explored span; inconclusive unless `exhausted`
    /// (and even then only relative to the degree/variable caps).
    NotFound { exhausted: bool },
}

/// Decide membership of `target` in the linear span of a budgeted sub-T-ideal
/// closure of `gens`: substitution instances by monomials and two-term
/// combinations, partial linearizations, and one-sided monomial multiples,
/// all degree-capped, followed by exact Gaussian elimination.
pub fn tideal_member(
    gens: &[NcPolynomial],
    target: &NcPolynomial,
    deg: u32,
    vars: u64,
    budget: u64,
) -> Result<Membership, PitestError> {
    let spec = target.spec().clone();
    if !spec.is_field() {
        return Err(PitestError::NotAField);
    }
    if deg > TIDEAL_MAX_DEG {
        return Err(PitestError::BudgetExceeded(format!(
            "degree cap {deg} exceeds {TIDEAL_MAX_DEG}"
        )));
    }
    if vars > TIDEAL_MAX_VARS {
        return Err(PitestError::BudgetExceeded(format!(
            "variable cap {vars} exceeds {TIDEAL_MAX_VARS}"
        )));
    }
    let total_deg = |p: &NcPolynomial| p.terms().map(|(w, _)| w.len()).max().unwrap_or(0) as u32;
    if total_deg(target) > deg {
        return Err(PitestError::BudgetExceeded(format!(
            "target degree exceeds the cap {deg}"
        )));
    }
    let budget = budget.max(16) as usize;
    let mut elements: Vec<SpanElement> = Vec::new();
    let mut seen: BTreeSet<NcPolynomial> = BTreeSet::new();
    let mut truncated = false;
    let push = |poly: NcPolynomial,
                    recipe: Recipe,
                    elements: &mut Vec<SpanElement>,
                    seen: &mut BTreeSet<NcPolynomial>,
                    truncated: &mut bool| {
        if poly.is_zero() || total_deg(&poly) > deg {
            return;
        }
        if poly.vars().into_iter().any(|v| v > vars) {
            return;
        }
        if elements.len() >= budget {
            *truncated = true;
            return;
        }
        if seen.insert(poly.clone()) {
            elements.push(SpanElement { poly, recipe });
        }
    };
    for (i, g) in gens.iter().enumerate() {
        push(
            g.clone(),
            Recipe::Generator(i),
            &mut elements,
            &mut seen,
            &mut truncated,
        );
    }
    // all words over the variable alphabet up to a length cap
    let words_up_to = |max_len: u32| -> Vec<Word> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for v in 1..=vars {
                    let mut w2 = w.clone();
                    w2.push(v);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned().map(Word::from_letters));
            frontier = next;
        }
        out
    };
    let nonzero_scalars: Vec<FieldScalar> = spec
        .elements()
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    let mut frontier = 0usize;
    while frontier < elements.len() && !truncated {
        let e = elements[frontier].clone();
        let parent_idx = frontier;
        frontier += 1;
        let e_deg = total_deg(&e.poly);
        for v in e.poly.vars() {
            let dv = e.poly.deg_in(v).max(1);
            // monomial substitutions within the degree cap
            let slack = (deg - e_deg) / dv;
            for w in words_up_to(1 + slack) {
                if w.len() == 1 && w.letters()[0] == v {
                    continue; // identity substitution
                }
                let image =
                    NcPolynomial::monomial(spec.clone(), w.clone(), spec.one());
                let out = e.poly.substitute(&SubstitutionMap::single(v, image));
                push(
                    out,
                    Recipe::MonomialSub {
                        parent: parent_idx,
                        var: v,
                        word: w,
                    },
                    &mut elements,
                    &mut seen,
                    &mut truncated,
                );
            }
            // two-term substitutions x_v -> c1 w1 + c2 w2
            let short_words = words_up_to(1 + slack.min(1));
            for (wi, w1) in short_words.iter().enumerate() {
                for w2 in short_words.iter().skip(wi + 1) {
                    for c1 in &nonzero_scalars {
                        for c2 in &nonzero_scalars {
                            let image = NcPolynomial::monomial(spec.clone(), w1.clone(), c1.clone())
                                .add(&NcPolynomial::monomial(
                                    spec.clone(),
                                    w2.clone(),
                                    c2.clone(),
                                ));
                            let out =
                                e.poly.substitute(&SubstitutionMap::single(v, image));
                            push(
                                out,
                                Recipe::TwoTermSub {
                                    parent: parent_idx,
                                    var: v,
                                    c1: c1.clone(),
                                    w1: w1.clone(),
                                    c2: c2.clone(),
                                    w2: w2.clone(),
                                },
                                &mut elements,
                                &mut seen,
                                &mut truncated,
                            );
                        }
                    }
                }
            }
            // partial linearization, renamed back into the alphabet
            if e.poly.deg_in(v) >= 2 {
                if let Ok(delta) = e.poly.partial_linearization(v) {
                    let (canon, rename) = delta.canonical_rename();
                    push(
                        canon,
                        Recipe::Linearize {
                            parent: parent_idx,
                            var: v,
                            rename,
                        },
                        &mut elements,
                        &mut seen,
                        &mut truncated,
                    );
                }
            }
        }
        // one-sided monomial multiples
        if e_deg < deg {
            for w in words_up_to(deg - e_deg) {
                let m = NcPolynomial::monomial(spec.clone(), w.clone(), spec.one());
                push(
                    m.mul(&e.poly),
                    Recipe::LeftMul {
                        parent: parent_idx,
                        word: w.clone(),
                    },
                    &mut elements,
                    &mut seen,
                    &mut truncated,
                );
                push(
                    e.poly.mul(&m),
                    Recipe::RightMul {
                        parent: parent_idx,
                        word: w,
                    },
                    &mut elements,
                    &mut seen,
                    &mut truncated,
                );
            }
        }
    }
    // exact linear algebra: solve Σ c_i elem_i = target over the field
    let mut words: BTreeSet<Word> = BTreeSet::new();
    for e in &elements {
        words.extend(e.poly.terms().map(|(w, _)| w.clone()));
    }
    words.extend(target.terms().map(|(w, _)| w.clone()));
    let word_list: Vec<Word> = words.into_iter().collect();
    let word_index: BTreeMap<&Word, usize> =
        word_list.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rows = word_list.len();
    let cols = elements.len();
    let mut matrix: Vec<Vec<FieldScalar>> = vec![vec![spec.zero(); cols + 1]; rows];
    for (j, e) in elements.iter().enumerate() {
        for (w, c) in e.poly.terms() {
            matrix[word_index[w]][j] = c.clone();
        }
    }
    for (w, c) in target.terms() {
        matrix[word_index[w]][cols] = c.clone();
    }
    // Gauss-Jordan
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(pivot_row, r);
        let inv = matrix[pivot_row][col].inv().map_err(PitestError::Coeff)?;
        for x in matrix[pivot_row].iter_mut() {
            *x = x.mul(&inv);
        }
        for r2 in 0..rows {
            if r2 != pivot_row && !matrix[r2][col].is_zero() {
                let factor = matrix[r2][col].clone();
                for c2 in 0..=cols {
                    let sub = matrix[pivot_row][c2].mul(&factor);
                    matrix[r2][c2] = matrix[r2][c2].sub(&sub);
                }
            }
        }
        pivot_of_col[col] = Some(pivot_row);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    // consistency: any row with zero coefficients but nonzero rhs kills it
    let consistent = matrix.iter().all(|row| {
        row[..cols].iter().any(|c| !c.is_zero()) || row[cols].is_zero()
    });
    if !consistent {
        return Ok(Membership::NotFound {
            exhausted: !truncated,
        });
    }
    let mut combination = Vec::new();
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pivot {
            let c = matrix[*r][cols].clone();
            if !c.is_zero() {
                combination.push((col, c));
            }
        }
    }
    let certificate = MembershipCertificate {
        elements,
        combination,
    };
    if certificate.replay(gens, target) {
        Ok(Membership::Member(certificate))
    } else {
        Ok(Membership::NotFound {
            exhausted: !truncated,
        })
    }
}
