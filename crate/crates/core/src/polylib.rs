//! Constructors for the classical identity polynomials — Capelli, standard,
//! central polynomials — and the hiking substitutions that force evaluations
//! into radical positions of a block algebra.
//!
//! Variable conventions: constructors take an explicit first fresh index and
//! lay their variables out contiguously from it, so callers can keep
//! substitution variables disjoint from an ambient polynomial. `capelli` on
//! base `b` uses `x`-slots `b..b+k` and `y`-slots `b+k..b+2k`.
//!
//! The stage-1/3/expand hikes substitute into a polynomial and return a
//! [`HikeRecord`] that replays: applying the recorded substitution to the
//! recorded input reproduces the output. The stage-2/4 builders return open
//! terms that the caller wires into a polynomial.

use crate::coeffring::{FieldSpec, SpecScalars};
use crate::freealg::{AlgError, NcPolynomial, SubstitutionMap};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyLibError {
    #[error("degree parameter {0} exceeds the cap {1}")]
    CapTooLarge(u32, u32),
    #[error("no central polynomial constructor for n = {0}")]
    UnsupportedN(u32),
    #[error("indeterminate x{0} does not occur")]
    VariableAbsent(u64),
    #[error("polynomial is not linear in the designated variables")]
    NotLinear,
    #[error("polynomial is not multilinear in the designated variables")]
    NotMultilinear,
    #[error("operation requires a unital context")]
    NotUnital,
    #[error("index {0} out of range")]
    BadIndex(u64),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

pub const CAPELLI_MAX_K: u32 = 6;
pub const STANDARD_MAX_K: u32 = 8;

/// All permutations of `0..k` in lexicographic order, each with its sign
/// (parity of the inversion count).
fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn build(
        prefix: &mut Vec<usize>,
        remaining: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, i64)>,
    ) {
        if remaining.is_empty() {
            let mut inversions = 0usize;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for idx in 0..remaining.len() {
            let v = remaining.remove(idx);
            prefix.push(v);
            build(prefix, remaining, out);
            prefix.pop();
            remaining.insert(idx, v);
        }
    }
    let mut out = Vec::new();
    build(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

/// The Capelli polynomial
/// `c_k = Σ_{π} sgn(π) x_{π(1)} y_1 x_{π(2)} y_2 ... x_{π(k)} y_k`
/// with `x_i = base + i - 1` and `y_i = base + k + i - 1`.
pub fn capelli(
    spec: &Arc<FieldSpec>,
    k: u32,
    base: u64,
) -> Result<NcPolynomial, PolyLibError> {
    if k == 0 || k > CAPELLI_MAX_K {
        return Err(PolyLibError::CapTooLarge(k, CAPELLI_MAX_K));
    }
    let k = k as usize;
    let mut out = NcPolynomial::zero(spec.clone(), false);
    for (perm, sign) in signed_permutations(k) {
        let mut letters = Vec::with_capacity(2 * k);
        for (slot, &p) in perm.iter().enumerate() {
            letters.push(base + p as u64);
            letters.push(base + (k + slot) as u64);
        }
        let term = NcPolynomial::monomial(
            spec.clone(),
            crate::freealg::Word::from_letters(letters),
            spec.from_int(sign),
        );
        out = out.add(&term);
    }
    Ok(out)
}

/// The standard polynomial `s_k = Σ_{π} sgn(π) x_{π(1)} ... x_{π(k)}` on
/// `x_i = base + i - 1`.
pub fn standard(
    spec: &Arc<FieldSpec>,
    k: u32,
    base: u64,
) -> Result<NcPolynomial, PolyLibError> {
    if k == 0 || k > STANDARD_MAX_K {
        return Err(PolyLibError::CapTooLarge(k, STANDARD_MAX_K));
    }
    let k = k as usize;
    let mut out = NcPolynomial::zero(spec.clone(), false);
    for (perm, sign) in signed_permutations(k) {
        let letters: Vec<u64> = perm.iter().map(|&p| base + p as u64).collect();
        let term = NcPolynomial::monomial(
            spec.clone(),
            crate::freealg::Word::from_letters(letters),
            spec.from_int(sign),
        );
        out = out.add(&term);
    }
    Ok(out)
}

/// Number of variables a `central_h(n, ...)` constructor consumes.
pub fn central_h_span(n: u32) -> u64 {
    match n {
        0 => 0,
        1 => 1,
        2 => 12,
        _ => 0,
    }
}

/// The full multilinearization of the square of a commutator: linearize
/// `(uv - vu)^2` first in `u`, then in `v`, producing a multilinear
/// polynomial in four variables `base..base+4`. Its values on 2x2 matrices
/// are scalar.
pub fn commutator_square_multilinearization(
    spec: &Arc<FieldSpec>,
    base: u64,
) -> NcPolynomial {
    let u = NcPolynomial::variable(spec.clone(), 1);
    let v = NcPolynomial::variable(spec.clone(), 2);
    let comm = u.mul(&v).sub(&v.mul(&u));
    let square = comm.mul(&comm);
    let lin1 = square.partial_linearization(1).expect("degree 2 in u");
    let lin2 = lin1.partial_linearization(2).expect("degree 2 in v");
    // rename the four split letters onto the requested contiguous range
    let mut map = std::collections::BTreeMap::new();
    map.insert(crate::freealg::pair_index(1, 1), base);
    map.insert(crate::freealg::pair_index(1, 2), base + 1);
    map.insert(crate::freealg::pair_index(2, 1), base + 2);
    map.insert(crate::freealg::pair_index(2, 2), base + 3);
    lin2.rename(&map)
}

/// The central polynomial `h_n` on matrices of size `n`, on fresh variables
/// starting at `base`: `h_0 = 1`, `h_1 = x_base`, and `h_2` is the product
/// of a Capelli `c_4` (fresh slots) with the multilinearized commutator
/// square. Sizes `n >= 3` are not constructed.
pub fn central_h(
    spec: &Arc<FieldSpec>,
    n: u32,
    base: u64,
) -> Result<NcPolynomial, PolyLibError> {
    match n {
        0 => Ok(NcPolynomial::one(spec.clone())),
        1 => Ok(NcPolynomial::variable(spec.clone(), base)),
        2 => {
            let c4 = capelli(spec, 4, base)?;
            let g = commutator_square_multilinearization(spec, base + 8);
            Ok(c4.mul(&g))
        }
        n => Err(PolyLibError::UnsupportedN(n)),
    }
}

/// `a*b - b^t*a`; `power = None` (or `Some(1)`) is the plain commutator.
pub fn frobenius_commutator(
    a: &NcPolynomial,
    b: &NcPolynomial,
    power: Option<u64>,
) -> NcPolynomial {
    let t = power.unwrap_or(1).max(1);
    a.mul(b).sub(&b.pow(t as u32).mul(a))
}

/// Antisymmetrize over the cyclic insertions of `x_{t+1}`:
/// `Σ_{i=1}^{t+1} ± f(x_1,...,x_{i-1},x_{i+1},...,x_{t+1},x_i; y)`, with the
/// overall sign normalized so the identity arrangement (`i = t+1`) enters
/// with `+1`.
pub fn alternator(f: &NcPolynomial, t: u32) -> Result<NcPolynomial, PolyLibError> {
    let t = t as u64;
    for v in 1..=t + 1 {
        if f.deg_in(v) == 0 {
            return Err(PolyLibError::VariableAbsent(v));
        }
    }
    let spec = f.spec().clone();
    let mut out = NcPolynomial::zero(spec.clone(), f.is_unital());
    for i in 1..=t + 1 {
        let mut sigma = SubstitutionMap::identity();
        for j in i..=t {
            sigma.insert(j, NcPolynomial::variable(spec.clone(), j + 1));
        }
        if i <= t {
            sigma.insert(t + 1, NcPolynomial::variable(spec.clone(), i));
        }
        let term = f.substitute(&sigma);
        // (-1)^i normalized by (-1)^{t+1}
        let sign = if (i + t + 1) % 2 == 0 { 1 } else { -1 };
        out = out.add(&term.scale(&spec.from_int(sign)));
    }
    Ok(out)
}

/// True when substituting `x_j -> x_i` annihilates `f` for all
/// `1 <= i < j <= t`. Requires `f` linear in `x_1..x_t`.
pub fn is_t_alternating(f: &NcPolynomial, t: u32) -> Result<bool, PolyLibError> {
    let vars: Vec<u64> = (1..=t as u64).collect();
    if !f.is_linear_in(&vars) {
        return Err(PolyLibError::NotLinear);
    }
    for i in 1..=t as u64 {
        for j in i + 1..=t as u64 {
            let sigma = SubstitutionMap::single(j, NcPolynomial::variable(f.spec().clone(), i));
            if !f.substitute(&sigma).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The degree-`k` slice in `z` of `f((z+1)x_1, ..., (z+1)x_n)`, for `f`
/// multilinear in `x_1..x_n` and a fresh letter `z`.
pub fn zubrilin_delta(
    f: &NcPolynomial,
    n: u32,
    k: u32,
    z: u64,
) -> Result<NcPolynomial, PolyLibError> {
    let vars: Vec<u64> = (1..=n as u64).collect();
    if !f.is_multilinear_in(&vars) {
        return Err(PolyLibError::NotMultilinear);
    }
    if !f.is_unital() {
        return Err(PolyLibError::NotUnital);
    }
    if k > n {
        return Err(PolyLibError::BadIndex(k as u64));
    }
    let spec = f.spec().clone();
    let zvar = NcPolynomial::variable(spec.clone(), z);
    let mut sigma = SubstitutionMap::identity();
    for &v in &vars {
        let xv = NcPolynomial::variable(spec.clone(), v);
        sigma.insert(v, zvar.mul(&xv).add(&xv));
    }
    let expanded = f.substitute(&sigma);
    let mut out = NcPolynomial::zero(spec, f.is_unital());
    for (w, c) in expanded.terms() {
        if w.deg_of(z) == k {
            out = out.add(&NcPolynomial::monomial(
                f.spec().clone(),
                w.clone(),
                c.clone(),
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HikeStage {
    One,
    Three,
    Expand,
}

/// Parameters of a hiking substitution, for reporting and replay.
#[derive(Debug, Clone)]
pub struct HikeParams {
    pub n: u32,
    pub t: Option<u64>,
    pub power: Option<u64>,
    pub qbar: Option<u64>,
    pub fresh_range: (u64, u64),
}

/// A replayable record of one hiking substitution.
#[derive(Debug, Clone)]
pub struct HikeRecord {
    pub stage: HikeStage,
    pub variable: u64,
    pub params: HikeParams,
    pub before: NcPolynomial,
    pub after: NcPolynomial,
    pub subst: SubstitutionMap,
}

impl HikeRecord {
    pub fn replay(&self) -> bool {
        self.before.substitute(&self.subst) == self.after
    }
}

/// Stage 1: substitute `x_i -> [x_i, h_n]` (plain or Frobenius commutator),
/// with the central polynomial on fresh variables.
pub fn hike_stage1(
    f: &NcPolynomial,
    i: u64,
    n: u32,
    power: Option<u64>,
) -> Result<(NcPolynomial, HikeRecord), PolyLibError> {
    if !(1..=2).contains(&n) {
        return Err(PolyLibError::UnsupportedN(n));
    }
    let spec = f.spec().clone();
    let base = f.max_letter() + 1;
    let h = central_h(&spec, n, base)?;
    let xi = NcPolynomial::variable(spec.clone(), i);
    let image = frobenius_commutator(&xi, &h, power);
    let sigma = SubstitutionMap::single(i, image);
    let after = f.substitute(&sigma);
    let record = HikeRecord {
        stage: HikeStage::One,
        variable: i,
        params: HikeParams {
            n,
            t: None,
            power,
            qbar: None,
            fresh_range: (base, base + central_h_span(n)),
        },
        before: f.clone(),
        after: after.clone(),
        subst: sigma,
    };
    Ok((after, record))
}

/// Stage 2 open term: the difference
/// `z1 [h_{n_i}, y] z2 (interior) H^{q1}  -  z1 H^{q2} [h_{n_i}, y] z2 (interior)`
/// with `H = h_{n_j}^{qbar}`. Evaluated inside an `n_j` block the two terms
/// cancel (H is central there); inside an `n_i < n_j` block `H` vanishes and
/// only the first term survives.
pub fn hike_stage2_term(
    spec: &Arc<FieldSpec>,
    n_i: u32,
    n_j: u32,
    q1: u32,
    q2: u32,
    qbar: u32,
    interior: &[NcPolynomial],
    base: u64,
) -> Result<NcPolynomial, PolyLibError> {
    if n_i >= n_j || n_j > 2 {
        return Err(PolyLibError::UnsupportedN(n_j));
    }
    let z1 = NcPolynomial::variable(spec.clone(), base);
    let z2 = NcPolynomial::variable(spec.clone(), base + 1);
    let y = NcPolynomial::variable(spec.clone(), base + 2);
    let mut next = base + 3;
    let h_i = central_h(spec, n_i, next)?;
    next += central_h_span(n_i);
    let h_j = central_h(spec, n_j, next)?;
    let big_h = h_j.pow(qbar);
    let bracket = h_i.mul(&y).sub(&y.mul(&h_i));
    let mut tail = z2.clone();
    for g in interior {
        tail = tail.mul(g);
    }
    let first = z1.mul(&bracket).mul(&tail).mul(&big_h.pow(q1));
    let second = z1.mul(&big_h.pow(q2)).mul(&bracket).mul(&tail);
    Ok(first.sub(&second))
}

/// Stage 3: substitute `x_i -> (h_n^t - h_n) x_i`, separating base fields of
/// different sizes (`t` is the order of the competing field).
pub fn hike_stage3(
    f: &NcPolynomial,
    i: u64,
    n: u32,
    t: u64,
) -> Result<(NcPolynomial, HikeRecord), PolyLibError> {
    if !(1..=2).contains(&n) {
        return Err(PolyLibError::UnsupportedN(n));
    }
    let spec = f.spec().clone();
    let base = f.max_letter() + 1;
    let h = central_h(&spec, n, base)?;
    let xi = NcPolynomial::variable(spec.clone(), i);
    let image = h.pow(t as u32).sub(&h).mul(&xi);
    let sigma = SubstitutionMap::single(i, image);
    let after = f.substitute(&sigma);
    let record = HikeRecord {
        stage: HikeStage::Three,
        variable: i,
        params: HikeParams {
            n,
            t: Some(t),
            power: None,
            qbar: None,
            fresh_range: (base, base + central_h_span(n)),
        },
        before: f.clone(),
        after: after.clone(),
        subst: sigma,
    };
    Ok((after, record))
}

/// Stage 4 open term: with `A = c_{n_i^2}(group 1) x_i c_{n'_i^2}(group 2)`
/// and `B` the same shape on disjoint fresh groups (standing for the
/// coefficient-scaled copies), returns `AB - BA`. Specializing both groups
/// identically, or into a single commutative block, gives zero.
pub fn hike_stage4_term(
    spec: &Arc<FieldSpec>,
    i: u64,
    n_i: u32,
    n_pi: u32,
    base: u64,
) -> Result<NcPolynomial, PolyLibError> {
    if !(1..=2).contains(&n_i) || !(1..=2).contains(&n_pi) {
        return Err(PolyLibError::UnsupportedN(n_i.max(n_pi)));
    }
    let k_left = n_i * n_i;
    let k_right = n_pi * n_pi;
    let xi = NcPolynomial::variable(spec.clone(), i);
    let mut next = base;
    let sandwich = |k: u32, next: &mut u64| -> Result<NcPolynomial, PolyLibError> {
        let c = capelli(spec, k, *next)?;
        *next += 2 * k as u64;
        Ok(c)
    };
    let a = sandwich(k_left, &mut next)?
        .mul(&xi)
        .mul(&sandwich(k_right, &mut next)?);
    let b = sandwich(k_left, &mut next)?
        .mul(&xi)
        .mul(&sandwich(k_right, &mut next)?);
    Ok(a.mul(&b).sub(&b.mul(&a)))
}

/// Radical-forcing expansion: substitute
/// `x_i -> h_n x_{i,1}^{qbar} x_{i,2} ... x_{i,t} h_n x_i` with fresh
/// variables; specializing the inserted slots to identities recovers the
/// original evaluation, while `qbar` beyond the nilpotence index kills
/// radical values of `x_{i,1}`.
pub fn hike_expand(
    f: &NcPolynomial,
    i: u64,
    n: u32,
    t: u64,
    qbar: u64,
) -> Result<(NcPolynomial, HikeRecord), PolyLibError> {
    if !(1..=2).contains(&n) {
        return Err(PolyLibError::UnsupportedN(n));
    }
    if t == 0 {
        return Err(PolyLibError::BadIndex(t));
    }
    let spec = f.spec().clone();
    let mut next = f.max_letter() + 1;
    let base = next;
    let h1 = central_h(&spec, n, next)?;
    next += central_h_span(n);
    let h2 = central_h(&spec, n, next)?;
    next += central_h_span(n);
    let slots: Vec<u64> = (0..t).map(|j| next + j).collect();
    next += t;
    let mut image = h1.mul(&NcPolynomial::variable(spec.clone(), slots[0]).pow(qbar as u32));
    for &s in &slots[1..] {
        image = image.mul(&NcPolynomial::variable(spec.clone(), s));
    }
    image = image
        .mul(&h2)
        .mul(&NcPolynomial::variable(spec.clone(), i));
    let sigma = SubstitutionMap::single(i, image);
    let after = f.substitute(&sigma);
    let record = HikeRecord {
        stage: HikeStage::Expand,
        variable: i,
        params: HikeParams {
            n,
            t: Some(t),
            power: None,
            qbar: Some(qbar),
            fresh_range: (base, next),
        },
        before: f.clone(),
        after: after.clone(),
        subst: sigma,
    };
    Ok((after, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::FieldSpec;

    fn z() -> Arc<FieldSpec> {
        FieldSpec::integers()
    }

    fn var(spec: &Arc<FieldSpec>, i: u64) -> NcPolynomial {
        NcPolynomial::variable(spec.clone(), i)
    }

    #[test]
    fn capelli_small() {
        let s = z();
        // c_1 = x y on slots 1, 2
        assert_eq!(
            capelli(&s, 1, 1).unwrap(),
            var(&s, 1).mul(&var(&s, 2))
        );
        // c_2 = x1 y1 x2 y2 - x2 y1 x1 y2 with y-slots 3, 4
        let c2 = capelli(&s, 2, 1).unwrap();
        let expected = NcPolynomial::parse(&s, "x1.x3.x2.x4 - x2.x3.x1.x4").unwrap();
        assert_eq!(c2, expected);
        // c_3: six terms, signs matching permutation parity
        let c3 = capelli(&s, 3, 1).unwrap();
        assert_eq!(c3.num_terms(), 6);
        let positive = c3
            .terms()
            .filter(|(_, c)| **c == s.from_int(1))
            .count();
        assert_eq!(positive, 3);
        assert!(capelli(&s, 7, 1).is_err());
    }

    #[test]
    fn standard_small() {
        let s = z();
        assert_eq!(standard(&s, 1, 1).unwrap(), var(&s, 1));
        assert_eq!(
            standard(&s, 2, 1).unwrap(),
            NcPolynomial::parse(&s, "x1.x2 - x2.x1").unwrap()
        );
        assert_eq!(standard(&s, 3, 1).unwrap().num_terms(), 6);
    }

    #[test]
    fn capelli_and_standard_are_alternating() {
        let s = z();
        for k in 1..=4 {
            let c = capelli(&s, k, 1).unwrap();
            assert!(is_t_alternating(&c, k).unwrap(), "capelli({k})");
            let st = standard(&s, k, 1).unwrap();
            assert!(is_t_alternating(&st, k).unwrap(), "standard({k})");
        }
        assert!(!is_t_alternating(&var(&z(), 1).mul(&var(&z(), 2)), 2).unwrap());
        // the linearity precondition is enforced
        assert_eq!(
            is_t_alternating(&var(&z(), 1).pow(2), 1),
            Err(PolyLibError::NotLinear)
        );
    }

    #[test]
    fn central_h_base_cases() {
        let s = z();
        assert_eq!(central_h(&s, 0, 1).unwrap(), NcPolynomial::one(s.clone()));
        assert_eq!(central_h(&s, 1, 1).unwrap(), var(&s, 1));
        let h2 = central_h(&s, 2, 1).unwrap();
        // 12 distinct variables: 8 capelli slots and 4 multilinear slots
        assert_eq!(h2.vars().len(), 12);
        assert_eq!(central_h(&s, 3, 1), Err(PolyLibError::UnsupportedN(3)));
    }

    #[test]
    fn commutator_square_multilinearization_is_multilinear() {
        let s = FieldSpec::make(3, 1).unwrap();
        let g = commutator_square_multilinearization(&s, 1);
        assert!(g.is_multilinear_in(&[1, 2, 3, 4]));
        assert!(!g.is_zero());
    }

    #[test]
    fn frobenius_commutator_examples() {
        let s = z();
        let (x1, x2) = (var(&s, 1), var(&s, 2));
        assert_eq!(
            frobenius_commutator(&x1, &x2, None),
            NcPolynomial::parse(&s, "x1.x2 - x2.x1").unwrap()
        );
        assert_eq!(
            frobenius_commutator(&x1, &x2, Some(2)),
            NcPolynomial::parse(&s, "x1.x2 - x2.x2.x1").unwrap()
        );
        let one = NcPolynomial::one(s.clone());
        assert!(frobenius_commutator(&x1, &one, None).is_zero());
    }

    #[test]
    fn alternator_examples() {
        let s = z();
        let f = var(&s, 1).mul(&var(&s, 2));
        assert_eq!(
            alternator(&f, 1).unwrap(),
            NcPolynomial::parse(&s, "x1.x2 - x2.x1").unwrap()
        );
        let sym = NcPolynomial::parse(&s, "x1.x2 + x2.x1").unwrap();
        assert!(alternator(&sym, 1).unwrap().is_zero());
        // alternation property: substituting x_i -> x_j kills the output
        let alt = alternator(&f, 1).unwrap();
        let sigma = SubstitutionMap::single(2, var(&s, 1));
        assert!(alt.substitute(&sigma).is_zero());
        assert_eq!(
            alternator(&var(&s, 1), 1),
            Err(PolyLibError::VariableAbsent(2))
        );
    }

    #[test]
    fn zubrilin_delta_examples() {
        let s = z();
        let f = var(&s, 1)
            .mul(&var(&s, 2))
            .with_unital(true)
            .unwrap();
        let d0 = zubrilin_delta(&f, 2, 0, 3).unwrap();
        assert_eq!(d0, NcPolynomial::parse(&s, "x1.x2").unwrap());
        let d1 = zubrilin_delta(&f, 2, 1, 3).unwrap();
        assert_eq!(d1, NcPolynomial::parse(&s, "x3.x1.x2 + x1.x3.x2").unwrap());
        let d2 = zubrilin_delta(&f, 2, 2, 3).unwrap();
        assert_eq!(d2, NcPolynomial::parse(&s, "x3.x1.x3.x2").unwrap());
        // multilinearity and unitality are enforced
        assert_eq!(
            zubrilin_delta(&var(&s, 1).pow(2).with_unital(true).unwrap(), 1, 0, 3),
            Err(PolyLibError::NotMultilinear)
        );
        assert_eq!(
            zubrilin_delta(&var(&s, 1).mul(&var(&s, 2)), 2, 0, 3),
            Err(PolyLibError::NotUnital)
        );
    }

    #[test]
    fn hike_stage1_examples() {
        let s = FieldSpec::make(3, 1).unwrap();
        let f = var(&s, 1);
        let (hiked, rec) = hike_stage1(&f, 1, 1, None).unwrap();
        // [x1, y] with the fresh y at index 2
        assert_eq!(hiked, NcPolynomial::parse(&s, "x1.x2 - x2.x1").unwrap());
        assert!(rec.replay());

        // hiking again on x1 nests the commutator
        let (double, rec2) = hike_stage1(&hiked, 1, 1, None).unwrap();
        let inner = frobenius_commutator(&var(&s, 1), &var(&s, 3), None);
        let outer = frobenius_commutator(&inner, &var(&s, 2), None);
        assert_eq!(double, outer);
        assert!(rec2.replay());

        let g = var(&s, 1).mul(&var(&s, 2));
        let (hiked2, _) = hike_stage1(&g, 2, 1, None).unwrap();
        assert_eq!(
            hiked2,
            NcPolynomial::parse(&s, "x1.x2.x3 - x1.x3.x2").unwrap()
        );
        assert_eq!(
            hike_stage1(&f, 1, 3, None).unwrap_err(),
            PolyLibError::UnsupportedN(3)
        );
    }

    #[test]
    fn hike_stage2_structure() {
        let s = FieldSpec::make(2, 1).unwrap();
        let term = hike_stage2_term(&s, 1, 2, 1, 1, 1, &[], 100).unwrap();
        assert!(!term.is_zero());
        // specializing the bracket variables identically cancels nothing
        // structurally; the builder only promises the two-term shape
        assert!(term.num_terms() > 2);
        assert_eq!(
            hike_stage2_term(&s, 2, 2, 1, 1, 1, &[], 100).unwrap_err(),
            PolyLibError::UnsupportedN(2)
        );
    }

    #[test]
    fn hike_stage3_examples() {
        let s = FieldSpec::make(2, 1).unwrap();
        let f = var(&s, 1);
        let (hiked, rec) = hike_stage3(&f, 1, 1, 2).unwrap();
        // (y^2 - y) x1 with fresh y at index 2
        assert_eq!(hiked, NcPolynomial::parse(&s, "x2.x2.x1 - x2.x1").unwrap());
        assert!(rec.replay());
    }

    #[test]
    fn hike_stage4_antisymmetry() {
        let s = FieldSpec::make(3, 1).unwrap();
        let term = hike_stage4_term(&s, 1, 1, 1, 10).unwrap();
        // identical specialization of the two sandwich groups gives zero:
        // substitute group 2 variables onto group 1
        let mut sigma = SubstitutionMap::identity();
        for off in 0..4u64 {
            sigma.insert(14 + off, var(&s, 10 + off));
        }
        assert!(term.substitute(&sigma).is_zero());
    }

    #[test]
    fn hike_expand_shape() {
        let s = FieldSpec::make(2, 1).unwrap();
        let f = var(&s, 1);
        let (expanded, rec) = hike_expand(&f, 1, 1, 1, 2).unwrap();
        // y1 x_slot^2 y2 x1 with fresh letters 2, 3, 4
        assert_eq!(expanded, NcPolynomial::parse(&s, "x2.x4.x4.x3.x1").unwrap());
        assert!(rec.replay());
    }

    #[test]
    fn commutator_expansion_identity_for_monomials() {
        // f(..., [a, b1 b2 b3], ...) = sum over positions of
        // f(..., b1 ... [a, b_j] ... b3, ...) for monomial f
        let s = z();
        let a = var(&s, 9);
        for k in 1..=3u64 {
            let bs: Vec<NcPolynomial> = (1..=k).map(|j| var(&s, j)).collect();
            let prod = bs
                .iter()
                .cloned()
                .reduce(|x, y| x.mul(&y))
                .unwrap();
            // Σ_j b1 ... [a, b_j] ... bk: the intermediate terms telescope
            let mut rhs = NcPolynomial::zero(s.clone(), false);
            for j in 0..k as usize {
                let mut factors: Vec<NcPolynomial> = bs.clone();
                factors[j] = a.mul(&bs[j]).sub(&bs[j].mul(&a));
                let term = factors.into_iter().reduce(|x, y| x.mul(&y)).unwrap();
                rhs = rhs.add(&term);
            }
            let lhs = a.mul(&prod).sub(&prod.mul(&a));
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn signed_permutation_count_and_parity() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().filter(|(_, s)| *s == 1).count(), 12);
        // a word-level check: capelli word count equals k!
        let s = z();
        assert_eq!(capelli(&s, 4, 1).unwrap().num_terms(), 24);
    }
}
