//! The free noncommutative algebra over an exact coefficient ring.
//!
//! Polynomials are finitely supported maps from words (sequences of
//! indeterminate indices) to nonzero scalars, kept in a canonical term order
//! (length, then lexicographic) so equality is structural. Indeterminates are
//! positive integers; the two-level names `x<i>_<j>` produced by partial
//! linearization are flattened into the same index space by the fixed pairing
//! `(i, j) -> 2^20 * i + j`.
//!
//! A polynomial carries a `unital` context flag: the empty word (the constant
//! `1`) is only representable in unital contexts, and the operations that
//! substitute `1` check the flag. The flag is context, not data — it does not
//! participate in equality.

use crate::coeffring::{CoeffError, FieldScalar, FieldSpec, SpecScalars};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

/// Pairing base for two-level indeterminate names: `x<i>_<j>` is letter
/// `PAIR_BASE * i + j`.
pub const PAIR_BASE: u64 = 1 << 20;

/// Flatten a two-level name into the letter space.
pub fn pair_index(i: u64, j: u64) -> u64 {
    debug_assert!(i >= 1 && (1..PAIR_BASE).contains(&j));
    PAIR_BASE * i + j
}

/// Recover `(i, j)` from a flattened two-level letter, if it is one.
pub fn split_index(letter: u64) -> Option<(u64, u64)> {
    if letter >= PAIR_BASE {
        Some((letter / PAIR_BASE, letter % PAIR_BASE))
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgError {
    #[error("operands belong to different coefficient rings")]
    MixedFields,
    #[error("indeterminate x{0} does not occur")]
    VariableAbsent(u64),
    #[error("operation requires positive characteristic")]
    CharacteristicZero,
    #[error("binomial({degree},{k}) vanishes modulo the characteristic")]
    BinomialVanishes { degree: u32, k: u32 },
    #[error("operation requires a unital context")]
    NotUnital,
    #[error("cannot parse {text:?} as {what}")]
    Parse { text: String, what: &'static str },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A word over the indeterminates; multiplication is concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u64>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(i: u64) -> Word {
        debug_assert!(i >= 1);
        Word(vec![i])
    }

    pub fn from_letters(letters: Vec<u64>) -> Word {
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word(letters)
    }

    pub fn letters(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Degree of the given letter in this word.
    pub fn deg_of(&self, letter: u64) -> u32 {
        self.0.iter().filter(|&&l| l == letter).count() as u32
    }

    pub fn multidegree(&self) -> BTreeMap<u64, u32> {
        let mut md = BTreeMap::new();
        for &l in &self.0 {
            *md.entry(l).or_insert(0) += 1;
        }
        md
    }

    pub fn to_text(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&l| match split_index(l) {
                Some((i, j)) => format!("x{i}_{j}"),
                None => format!("x{l}"),
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // canonical term order: degree (= length), then lexicographic
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A sparse polynomial in the free noncommutative algebra.
#[derive(Debug, Clone)]
pub struct NcPolynomial {
    spec: Arc<FieldSpec>,
    unital: bool,
    terms: BTreeMap<Word, FieldScalar>,
}

impl PartialEq for NcPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.terms == other.terms
    }
}

impl Eq for NcPolynomial {}

impl PartialOrd for NcPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NcPolynomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = (self.spec.characteristic(), self.spec.extension_degree());
        let rhs = (other.spec.characteristic(), other.spec.extension_degree());
        lhs.cmp(&rhs)
            .then_with(|| self.terms.iter().cmp(other.terms.iter()))
    }
}

impl std::hash::Hash for NcPolynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.spec.hash(state);
        for (w, c) in &self.terms {
            w.hash(state);
            c.hash(state);
        }
    }
}

impl NcPolynomial {
    pub fn zero(spec: Arc<FieldSpec>, unital: bool) -> NcPolynomial {
        NcPolynomial {
            spec,
            unital,
            terms: BTreeMap::new(),
        }
    }

    /// The constant `1` (empty word); the context becomes unital.
    pub fn one(spec: Arc<FieldSpec>) -> NcPolynomial {
        let one = spec.one();
        let mut terms = BTreeMap::new();
        terms.insert(Word::empty(), one);
        NcPolynomial {
            spec,
            unital: true,
            terms,
        }
    }

    pub fn constant(spec: Arc<FieldSpec>, value: FieldScalar) -> NcPolynomial {
        let mut p = NcPolynomial::one(spec);
        p = p.scale(&value);
        p.unital = true;
        p
    }

    pub fn variable(spec: Arc<FieldSpec>, i: u64) -> NcPolynomial {
        let one = spec.one();
        let mut terms = BTreeMap::new();
        terms.insert(Word::letter(i), one);
        NcPolynomial {
            spec,
            unital: false,
            terms,
        }
    }

    pub fn monomial(spec: Arc<FieldSpec>, word: Word, coeff: FieldScalar) -> NcPolynomial {
        let mut p = NcPolynomial::zero(spec, word.is_empty());
        p.add_term(word, coeff);
        p
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// Mark the context unital (always allowed) or non-unital (only when no
    /// empty word is present).
    pub fn with_unital(mut self, unital: bool) -> Result<NcPolynomial, AlgError> {
        if !unital && self.terms.contains_key(&Word::empty()) {
            return Err(AlgError::NotUnital);
        }
        self.unital = unital;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &FieldScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, word: &Word) -> Option<&FieldScalar> {
        self.terms.get(word)
    }

    fn add_term(&mut self, word: Word, coeff: FieldScalar) {
        if coeff.is_zero() {
            return;
        }
        if word.is_empty() {
            self.unital = true;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    fn check_spec(&self, other: &NcPolynomial) {
        assert_eq!(
            self.spec, other.spec,
            "polynomial operands from different coefficient rings"
        );
    }

    pub fn add(&self, other: &NcPolynomial) -> NcPolynomial {
        self.check_spec(other);
        let mut out = self.clone();
        out.unital = self.unital || other.unital;
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPolynomial) -> NcPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPolynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, s: &FieldScalar) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.mul(s));
        }
        out
    }

    pub fn mul(&self, other: &NcPolynomial) -> NcPolynomial {
        self.check_spec(other);
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital || other.unital);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> NcPolynomial {
        if e == 0 {
            return NcPolynomial::one(self.spec.clone());
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// Checked arithmetic entry with a `MixedFields` error on spec mismatch.
    pub fn checked_op(op: &str, f: &NcPolynomial, g: &NcPolynomial) -> Result<NcPolynomial, AlgError> {
        if f.spec != g.spec {
            return Err(AlgError::MixedFields);
        }
        match op {
            "add" => Ok(f.add(g)),
            "sub" => Ok(f.sub(g)),
            "mul" => Ok(f.mul(g)),
            _ => Err(AlgError::Parse {
                text: op.to_string(),
                what: "polynomial operation",
            }),
        }
    }

    /// The set of indeterminates occurring in the polynomial.
    pub fn vars(&self) -> BTreeSet<u64> {
        let mut vars = BTreeSet::new();
        for w in self.terms.keys() {
            vars.extend(w.letters().iter().copied());
        }
        vars
    }

    /// Largest letter index present (0 when constant or zero).
    pub fn max_letter(&self) -> u64 {
        self.terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Maximal degree of `x_i` over the monomials.
    pub fn deg_in(&self, i: u64) -> u32 {
        self.terms.keys().map(|w| w.deg_of(i)).max().unwrap_or(0)
    }

    /// Sum of the monomials attaining the maximal degree in `x_i`.
    pub fn leading_part(&self, i: u64) -> NcPolynomial {
        let d = self.deg_in(i);
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &self.terms {
            if w.deg_of(i) == d {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    /// True when every monomial contains each of `vars` exactly once.
    pub fn is_multilinear_in(&self, vars: &[u64]) -> bool {
        self.terms
            .keys()
            .all(|w| vars.iter().all(|&v| w.deg_of(v) == 1))
    }

    /// True when no monomial contains any of `vars` more than once.
    pub fn is_linear_in(&self, vars: &[u64]) -> bool {
        self.terms
            .keys()
            .all(|w| vars.iter().all(|&v| w.deg_of(v) <= 1))
    }

    /// Apply the algebra endomorphism determined by a substitution map.
    pub fn substitute(&self, sigma: &SubstitutionMap) -> NcPolynomial {
        if sigma.map.is_empty() {
            return self.clone();
        }
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &self.terms {
            let mut acc = NcPolynomial::constant(self.spec.clone(), c.clone());
            for &l in w.letters() {
                let factor = match sigma.map.get(&l) {
                    Some(p) => p.clone(),
                    None => NcPolynomial::variable(self.spec.clone(), l),
                };
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        out.unital = self.unital
            || sigma.map.values().any(|p| p.unital)
            || out.terms.contains_key(&Word::empty());
        out
    }

    /// Partition the monomials by the exact set of occurring indeterminates.
    pub fn blended_components(&self) -> Vec<NcPolynomial> {
        let mut groups: BTreeMap<BTreeSet<u64>, NcPolynomial> = BTreeMap::new();
        for (w, c) in &self.terms {
            let support: BTreeSet<u64> = w.letters().iter().copied().collect();
            groups
                .entry(support)
                .or_insert_with(|| NcPolynomial::zero(self.spec.clone(), self.unital))
                .add_term(w.clone(), c.clone());
        }
        groups.into_values().collect()
    }

    /// Partition the monomials by multidegree vector.
    pub fn homogeneous_components(&self) -> Vec<NcPolynomial> {
        self.homogeneous_components_with_degrees()
            .into_iter()
            .map(|(_, p)| p)
            .collect()
    }

    pub fn homogeneous_components_with_degrees(
        &self,
    ) -> Vec<(BTreeMap<u64, u32>, NcPolynomial)> {
        let mut groups: BTreeMap<BTreeMap<u64, u32>, NcPolynomial> = BTreeMap::new();
        for (w, c) in &self.terms {
            groups
                .entry(w.multidegree())
                .or_insert_with(|| NcPolynomial::zero(self.spec.clone(), self.unital))
                .add_term(w.clone(), c.clone());
        }
        groups.into_iter().collect()
    }

    /// The homogeneous component with the given multidegree (zero if absent).
    pub fn homogeneous_component(&self, md: &BTreeMap<u64, u32>) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &self.terms {
            if &w.multidegree() == md {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    /// Fresh two-level letters `x_{i,1}..x_{i,d}` for splitting `x_i`, falling
    /// back to letters above the maximum present when the pair space is taken.
    fn fresh_split_letters(&self, i: u64, d: u32) -> Vec<u64> {
        let pairs_free = i < PAIR_BASE
            && split_index(i).is_none()
            && !self
                .terms
                .keys()
                .flat_map(|w| w.letters())
                .any(|&l| split_index(l).map(|(a, _)| a) == Some(i));
        if pairs_free && (d as u64) < PAIR_BASE {
            (1..=d as u64).map(|j| pair_index(i, j)).collect()
        } else {
            let base = self.max_letter() + 1;
            (0..d as u64).map(|k| base + k).collect()
        }
    }

    /// The difference operator splitting `x_i` into `d = deg_i` fresh
    /// variables: substitute their sum, then subtract the single-variable
    /// substitutions. Every fresh variable has degree `< d` in the result.
    pub fn partial_linearization(&self, i: u64) -> Result<NcPolynomial, AlgError> {
        Ok(self.partial_linearization_with_vars(i)?.0)
    }

    pub fn partial_linearization_with_vars(
        &self,
        i: u64,
    ) -> Result<(NcPolynomial, Vec<u64>), AlgError> {
        let d = self.deg_in(i);
        if d == 0 {
            return Err(AlgError::VariableAbsent(i));
        }
        let fresh = self.fresh_split_letters(i, d);
        let sum = fresh
            .iter()
            .map(|&l| NcPolynomial::variable(self.spec.clone(), l))
            .reduce(|a, b| a.add(&b))
            .unwrap();
        let mut delta = self.substitute(&SubstitutionMap::single(i, sum));
        for &l in &fresh {
            let single = NcPolynomial::variable(self.spec.clone(), l);
            delta = delta.sub(&self.substitute(&SubstitutionMap::single(i, single)));
        }
        debug_assert!(fresh.iter().all(|&l| delta.deg_in(l) < d));
        Ok((delta, fresh))
    }

    /// Recover the leading `i`-part through the two-variable slice of the
    /// partial linearization: select the component of degree `(k, d-k)` in
    /// the first two fresh variables (all others absent) and substitute both
    /// back to `x_i`. The result is `binom(d, k)` times the leading `i`-part.
    pub fn recover_leading(&self, i: u64, k: u32) -> Result<NcPolynomial, AlgError> {
        if !self.unital {
            return Err(AlgError::NotUnital);
        }
        let d = self.deg_in(i);
        if d == 0 {
            return Err(AlgError::VariableAbsent(i));
        }
        let k = k.min(d);
        let p = self.spec.characteristic();
        if p > 0 && binomial_mod(d, k, p) == 0 {
            return Err(AlgError::BinomialVanishes { degree: d, k });
        }
        let (delta, fresh) = self.partial_linearization_with_vars(i)?;
        let (a, b) = (fresh[0], *fresh.get(1).unwrap_or(&fresh[0]));
        let mut slice = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &delta.terms {
            if w.deg_of(a) == k
                && w.deg_of(b) == d - k
                && fresh[2..].iter().all(|&l| w.deg_of(l) == 0)
            {
                slice.add_term(w.clone(), c.clone());
            }
        }
        let xi = NcPolynomial::variable(self.spec.clone(), i);
        let mut sigma = SubstitutionMap::identity();
        sigma.insert(a, xi.clone());
        sigma.insert(b, xi);
        Ok(slice.substitute(&sigma))
    }

    /// Repeatedly split every indeterminate whose degree is not a power of
    /// the characteristic, keeping the two-variable slice of each partial
    /// linearization, until every degree is a `p`-power. Returns the result
    /// together with a replayable derivation trace; every step is a
    /// difference of substitution instances followed by a substitution.
    pub fn quasi_linearize(&self) -> Result<QuasiLinearization, AlgError> {
        let p = self.spec.characteristic();
        if p == 0 {
            return Err(AlgError::CharacteristicZero);
        }
        let mut steps = Vec::new();
        let mut cur = self.clone();
        loop {
            let offender = cur
                .vars()
                .into_iter()
                .find(|&v| !is_p_power(cur.deg_in(v), p));
            let Some(v) = offender else { break };
            let d = cur.deg_in(v);
            let (delta, fresh) = cur.partial_linearization_with_vars(v)?;
            let kept = (fresh[0], fresh[1]);
            let dropped: Vec<u64> = fresh[2..].to_vec();
            let mut zero_out = SubstitutionMap::identity();
            for &l in &dropped {
                zero_out.insert(l, NcPolynomial::zero(cur.spec().clone(), cur.unital));
            }
            let after = delta.substitute(&zero_out);
            steps.push(QlStep {
                variable: v,
                degree: d,
                kept,
                dropped,
                before: cur.clone(),
                after: after.clone(),
            });
            cur = after;
        }
        Ok(QuasiLinearization {
            result: cur,
            steps,
        })
    }

    /// Relabel the distinct letters as `1, 2, 3, ...` in order of first
    /// appearance (canonical term order, left to right within each word).
    pub fn canonical_rename(&self) -> (NcPolynomial, BTreeMap<u64, u64>) {
        let mut map = BTreeMap::new();
        let mut next = 1u64;
        for w in self.terms.keys() {
            for &l in w.letters() {
                map.entry(l).or_insert_with(|| {
                    let v = next;
                    next += 1;
                    v
                });
            }
        }
        (self.rename(&map), map)
    }

    /// Apply an injective letter relabeling.
    pub fn rename(&self, map: &BTreeMap<u64, u64>) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.spec.clone(), self.unital);
        for (w, c) in &self.terms {
            let letters = w
                .letters()
                .iter()
                .map(|l| *map.get(l).unwrap_or(l))
                .collect();
            out.add_term(Word::from_letters(letters), c.clone());
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (w, c)) in self.terms.iter().enumerate() {
            let (neg, coeff_text) = scalar_term_text(c);
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (coeff_text.as_deref(), w.is_empty()) {
                (None, _) => out.push_str(&w.to_text()),
                (Some(t), true) => out.push_str(t),
                (Some(t), false) => {
                    out.push_str(t);
                    out.push('*');
                    out.push_str(&w.to_text());
                }
            }
        }
        out
    }

    /// Parse polynomial text such as `2*x1.x2 - x2.x1.x1 + g*x3`. The
    /// context becomes unital exactly when a constant term appears.
    pub fn parse(spec: &Arc<FieldSpec>, text: &str) -> Result<NcPolynomial, AlgError> {
        let err = |what: &'static str| AlgError::Parse {
            text: text.to_string(),
            what,
        };
        let mut out = NcPolynomial::zero(spec.clone(), false);
        let mut term = String::new();
        let mut sign = 1i64;
        let mut depth = 0i32;
        let flush = |term: &str, sign: i64, out: &mut NcPolynomial| -> Result<(), AlgError> {
            let term = term.trim();
            if term.is_empty() {
                return Err(err("polynomial term"));
            }
            let mut coeff = spec.from_int(sign);
            let mut word: Option<Word> = None;
            for piece in split_top_level(term, '*') {
                let piece = piece.trim();
                if piece.is_empty() {
                    return Err(err("polynomial term"));
                }
                if piece.starts_with('x') {
                    if word.is_some() {
                        return Err(err("polynomial term"));
                    }
                    word = Some(parse_word(piece).ok_or_else(|| err("word"))?);
                } else if piece == "1" && !piece.contains('(') {
                    if word.is_none() {
                        word = Some(Word::empty());
                    } else {
                        return Err(err("polynomial term"));
                    }
                } else {
                    let inner = piece
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .unwrap_or(piece);
                    let s = spec.parse_scalar(inner).map_err(AlgError::Coeff)?;
                    coeff = coeff.mul(&s);
                }
            }
            let word = word.unwrap_or_else(Word::empty);
            out.add_term(word, coeff);
            Ok(())
        };
        for c in text.chars() {
            match c {
                '(' => {
                    depth += 1;
                    term.push(c);
                }
                ')' => {
                    depth -= 1;
                    term.push(c);
                }
                '+' | '-' if depth == 0 => {
                    if term.trim().is_empty() {
                        if c == '-' {
                            sign = -sign;
                        }
                        continue;
                    }
                    flush(&term, sign, &mut out)?;
                    term.clear();
                    sign = if c == '-' { -1 } else { 1 };
                }
                c if c.is_whitespace() => {}
                c => term.push(c),
            }
        }
        if !term.trim().is_empty() {
            flush(&term, sign, &mut out)?;
        } else if out.terms.is_empty() && text.trim() == "0" {
            // explicit zero
        } else if out.terms.is_empty() && !text.trim().is_empty() && text.trim() != "0" {
            return Err(err("polynomial"));
        }
        Ok(out)
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Coefficient rendering: returns (print as subtraction, optional factor
/// text). `None` factor means the bare word carries the term.
fn scalar_term_text(c: &FieldScalar) -> (bool, Option<String>) {
    let text = c.to_text();
    if let Some(stripped) = text.strip_prefix('-') {
        // negative integers print via subtraction
        if stripped == "1" {
            return (true, None);
        }
        return (true, Some(stripped.to_string()));
    }
    if c.is_one() {
        return (false, None);
    }
    if text.contains('+') || text.contains('-') {
        (false, Some(format!("({text})")))
    } else {
        (false, Some(text))
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_word(s: &str) -> Option<Word> {
    let mut letters = Vec::new();
    for piece in s.split('.') {
        let rest = piece.strip_prefix('x')?;
        let letter = if let Some((i, j)) = rest.split_once('_') {
            pair_index(i.parse().ok()?, j.parse().ok()?)
        } else {
            rest.parse().ok()?
        };
        if letter == 0 {
            return None;
        }
        letters.push(letter);
    }
    Some(Word::from_letters(letters))
}

fn is_p_power(d: u32, p: u64) -> bool {
    if d == 0 {
        return true;
    }
    let mut d = d as u64;
    while d % p == 0 {
        d /= p;
    }
    d == 1
}

/// `binom(n, k) mod p` for positive `p`.
fn binomial_mod(n: u32, k: u32, p: u64) -> u64 {
    let mut num = BigInt::from(1);
    for i in 0..k {
        num *= BigInt::from(n - i);
        num /= BigInt::from(i + 1);
    }
    use num_integer::Integer as _;
    num.mod_floor(&BigInt::from(p))
        .try_into()
        .unwrap_or_default()
}

/// A finitely supported indeterminate substitution; unmapped letters map to
/// themselves.
#[derive(Debug, Clone, Default)]
pub struct SubstitutionMap {
    map: BTreeMap<u64, NcPolynomial>,
}

impl SubstitutionMap {
    pub fn identity() -> SubstitutionMap {
        SubstitutionMap::default()
    }

    pub fn single(i: u64, image: NcPolynomial) -> SubstitutionMap {
        let mut s = SubstitutionMap::identity();
        s.insert(i, image);
        s
    }

    pub fn insert(&mut self, i: u64, image: NcPolynomial) {
        self.map.insert(i, image);
    }

    pub fn get(&self, i: u64) -> Option<&NcPolynomial> {
        self.map.get(&i)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&u64, &NcPolynomial)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// One step of the quasi-linearization derivation: a partial linearization
/// of `variable` followed by zeroing all but the first two fresh variables.
#[derive(Debug, Clone)]
pub struct QlStep {
    pub variable: u64,
    pub degree: u32,
    pub kept: (u64, u64),
    pub dropped: Vec<u64>,
    pub before: NcPolynomial,
    pub after: NcPolynomial,
}

#[derive(Debug, Clone)]
pub struct QuasiLinearization {
    pub result: NcPolynomial,
    pub steps: Vec<QlStep>,
}

impl QuasiLinearization {
    /// Re-execute the recorded derivation from `origin` and confirm that it
    /// reproduces each intermediate polynomial and the final result.
    pub fn replay(&self, origin: &NcPolynomial) -> bool {
        let mut cur = origin.clone();
        for step in &self.steps {
            if cur != step.before {
                return false;
            }
            let Ok((delta, fresh)) = cur.partial_linearization_with_vars(step.variable) else {
                return false;
            };
            if fresh.first() != Some(&step.kept.0) || fresh.get(1) != Some(&step.kept.1) {
                return false;
            }
            let mut zero_out = SubstitutionMap::identity();
            for &l in &step.dropped {
                zero_out.insert(l, NcPolynomial::zero(cur.spec().clone(), cur.is_unital()));
            }
            cur = delta.substitute(&zero_out);
            if cur != step.after {
                return false;
            }
        }
        cur == self.result
    }
}

/// One derivation step of the ultra-homogeneous closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureStep {
    /// Select the homogeneous component of the given multidegree.
    Component { multidegree: BTreeMap<u64, u32> },
    /// Apply the partial linearization in `variable`.
    Linearize { variable: u64 },
    /// Canonically relabel letters.
    Rename { map: BTreeMap<u64, u64> },
}

/// A member of the ultra-homogeneous closure, with its derivation from the
/// seed set.
#[derive(Debug, Clone)]
pub struct ClosureMember {
    pub poly: NcPolynomial,
    pub origin: usize,
    pub steps: Vec<ClosureStep>,
}

impl ClosureMember {
    pub fn replay(&self, seeds: &[NcPolynomial]) -> bool {
        let Some(mut cur) = seeds.get(self.origin).cloned() else {
            return false;
        };
        for step in &self.steps {
            match step {
                ClosureStep::Component { multidegree } => {
                    cur = cur.homogeneous_component(multidegree);
                }
                ClosureStep::Linearize { variable } => {
                    let Ok(next) = cur.partial_linearization(*variable) else {
                        return false;
                    };
                    cur = next;
                }
                ClosureStep::Rename { map } => {
                    cur = cur.rename(map);
                }
            }
        }
        cur == self.poly
    }
}

/// Smallest set of homogeneous polynomials containing every homogeneous
/// component of the seeds and closed under homogeneous components of partial
/// linearizations. Members are deduplicated up to canonical letter renaming
/// and returned in canonical order, each with a replayable derivation.
pub fn ultra_homogeneous_closure(
    seeds: &[NcPolynomial],
) -> Result<Vec<ClosureMember>, AlgError> {
    if let Some(f) = seeds.first() {
        if !f.spec().is_field() {
            return Err(AlgError::CharacteristicZero);
        }
    }
    let mut seen: BTreeSet<NcPolynomial> = BTreeSet::new();
    let mut members: Vec<ClosureMember> = Vec::new();
    let mut queue: VecDeque<(NcPolynomial, usize, Vec<ClosureStep>)> = VecDeque::new();
    for (idx, f) in seeds.iter().enumerate() {
        queue.push_back((f.clone(), idx, Vec::new()));
    }
    while let Some((g, origin, steps)) = queue.pop_front() {
        for (md, comp) in g.homogeneous_components_with_degrees() {
            let (canon, map) = comp.canonical_rename();
            if canon.is_zero() || !seen.insert(canon.clone()) {
                continue;
            }
            let mut member_steps = steps.clone();
            member_steps.push(ClosureStep::Component {
                multidegree: md.clone(),
            });
            member_steps.push(ClosureStep::Rename { map });
            members.push(ClosureMember {
                poly: canon.clone(),
                origin,
                steps: member_steps.clone(),
            });
            for v in canon.vars() {
                if canon.deg_in(v) >= 2 {
                    let delta = canon.partial_linearization(v)?;
                    if !delta.is_zero() {
                        let mut next_steps = member_steps.clone();
                        next_steps.push(ClosureStep::Linearize { variable: v });
                        queue.push_back((delta, origin, next_steps));
                    }
                }
            }
        }
    }
    members.sort_by(|a, b| a.poly.cmp(&b.poly));
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::FieldSpec;
    use proptest::prelude::*;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::make(2, 1).unwrap()
    }

    fn z() -> Arc<FieldSpec> {
        FieldSpec::integers()
    }

    fn var(spec: &Arc<FieldSpec>, i: u64) -> NcPolynomial {
        NcPolynomial::variable(spec.clone(), i)
    }

    #[test]
    fn multiplication_is_noncommutative() {
        let s = z();
        let x1x2 = var(&s, 1).mul(&var(&s, 2));
        let x2x1 = var(&s, 2).mul(&var(&s, 1));
        assert_ne!(x1x2, x2x1);
        assert!(x1x2.add(&x1x2.neg()).is_zero());
    }

    #[test]
    fn square_of_sum_over_f2() {
        let s = f2();
        let expanded = var(&s, 1).add(&var(&s, 2)).pow(2);
        // cross terms survive: they are distinct words
        let expected = NcPolynomial::parse(&s, "x1.x1 + x1.x2 + x2.x1 + x2.x2").unwrap();
        assert_eq!(expanded, expected);
    }

    #[test]
    fn substitution_examples() {
        let s = z();
        let f = var(&s, 1).mul(&var(&s, 2));
        let mut swap = SubstitutionMap::identity();
        swap.insert(1, var(&s, 2));
        swap.insert(2, var(&s, 1));
        assert_eq!(f.substitute(&swap), var(&s, 2).mul(&var(&s, 1)));
        // identity substitution
        assert_eq!(var(&s, 1).substitute(&SubstitutionMap::identity()), var(&s, 1));
        // x1^2 under x1 -> x1 + x2 over F_2 matches the power expansion
        let s2 = f2();
        let sq = var(&s2, 1).pow(2);
        let sub = SubstitutionMap::single(1, var(&s2, 1).add(&var(&s2, 2)));
        assert_eq!(sq.substitute(&sub), var(&s2, 1).add(&var(&s2, 2)).pow(2));
    }

    #[test]
    fn blended_and_homogeneous_components() {
        let s = z();
        let f = NcPolynomial::parse(&s, "x1.x2 + x1").unwrap();
        let comps = f.blended_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], var(&s, 1));
        assert_eq!(comps[1], var(&s, 1).mul(&var(&s, 2)));

        let g = NcPolynomial::parse(&s, "x1.x2 + x2.x1").unwrap();
        assert_eq!(g.blended_components().len(), 1);
        assert_eq!(g.homogeneous_components().len(), 1);
        assert!(NcPolynomial::zero(s.clone(), false).blended_components().is_empty());

        // x1.x2.x1 + x1.x1.x2 share multidegree (2,1)
        let h = NcPolynomial::parse(&s, "x1.x2.x1 + x1.x1.x2").unwrap();
        assert_eq!(h.homogeneous_components().len(), 1);
        let fh = NcPolynomial::parse(&s, "x1.x1 + x1").unwrap();
        assert_eq!(fh.homogeneous_components().len(), 2);
    }

    #[test]
    fn partial_linearization_of_square() {
        let s = z();
        let f = var(&s, 1).pow(2);
        let delta = f.partial_linearization(1).unwrap();
        let expected = NcPolynomial::parse(&s, "x1_1.x1_2 + x1_2.x1_1").unwrap();
        assert_eq!(delta, expected);
    }

    #[test]
    fn partial_linearization_of_linear_vanishes() {
        let s = z();
        assert!(var(&s, 1).partial_linearization(1).unwrap().is_zero());
        assert_eq!(
            var(&s, 1).partial_linearization(2),
            Err(AlgError::VariableAbsent(2))
        );
    }

    #[test]
    fn partial_linearization_of_cube_matches_brute_force() {
        // oracle: expand (a+b+c)^3 - a^3 - b^3 - c^3 directly
        let s = f2();
        let f = var(&s, 1).pow(3);
        let delta = f.partial_linearization(1).unwrap();
        let a = pair_index(1, 1);
        let b = pair_index(1, 2);
        let c = pair_index(1, 3);
        let sum = var(&s, a).add(&var(&s, b)).add(&var(&s, c));
        let brute = sum
            .pow(3)
            .sub(&var(&s, a).pow(3))
            .sub(&var(&s, b).pow(3))
            .sub(&var(&s, c).pow(3));
        assert_eq!(delta, brute);
        // 6 mixed cubic words + 18 square-linear words
        assert_eq!(delta.num_terms(), 24);
        for l in [a, b, c] {
            assert!(delta.deg_in(l) < 3);
        }
    }

    #[test]
    fn quasi_linearize_fixed_points() {
        let s = f2();
        // degree 2 is already a 2-power
        let sq = var(&s, 1).pow(2);
        let ql = sq.quasi_linearize().unwrap();
        assert_eq!(ql.result, sq);
        assert!(ql.steps.is_empty());
        // multilinear is untouched
        let f = var(&s, 1).mul(&var(&s, 2));
        assert_eq!(f.quasi_linearize().unwrap().result, f);
        // characteristic zero is rejected
        assert_eq!(
            var(&z(), 1).pow(3).quasi_linearize().unwrap_err(),
            AlgError::CharacteristicZero
        );
    }

    #[test]
    fn quasi_linearize_cube_over_f2() {
        let s = f2();
        let f = var(&s, 1).pow(3);
        let ql = f.quasi_linearize().unwrap();
        assert!(!ql.result.is_zero());
        for v in ql.result.vars() {
            let d = ql.result.deg_in(v);
            assert!(d == 1 || d == 2, "degree {d} is not a 2-power");
        }
        assert!(ql.replay(&f));
    }

    #[test]
    fn recover_leading_examples() {
        let s = f2();
        let cube = var(&s, 1).pow(3).with_unital(true).unwrap();
        // binom(3,1) = 3 = 1 mod 2; the leading part is x1^3 itself
        assert_eq!(cube.recover_leading(1, 1).unwrap(), var(&s, 1).pow(3));

        let sq = var(&s, 1).pow(2).with_unital(true).unwrap();
        assert_eq!(
            sq.recover_leading(1, 1),
            Err(AlgError::BinomialVanishes { degree: 2, k: 1 })
        );

        let mixed = NcPolynomial::parse(&s, "x1.x1.x1 + x1")
            .unwrap()
            .with_unital(true)
            .unwrap();
        assert_eq!(mixed.recover_leading(1, 1).unwrap(), var(&s, 1).pow(3));

        // the unital flag is required
        assert_eq!(
            var(&s, 1).pow(3).recover_leading(1, 1),
            Err(AlgError::NotUnital)
        );
    }

    #[test]
    fn ultra_closure_of_multilinear_is_itself() {
        let s = f2();
        let f = var(&s, 1).mul(&var(&s, 2));
        let members = ultra_homogeneous_closure(&[f.clone()]).unwrap();
        assert_eq!(members.len(), 1);
        assert_eq!(members[0].poly, f);
        assert!(members[0].replay(&[f]));
    }

    #[test]
    fn ultra_closure_of_boolean_polynomial() {
        // the two spellings x^2 + x and x^2 - x coincide over F_2
        let s = f2();
        let f = NcPolynomial::parse(&s, "x1.x1 + x1").unwrap();
        let members = ultra_homogeneous_closure(&[f.clone()]).unwrap();
        let polys: Vec<_> = members.iter().map(|m| m.poly.clone()).collect();
        let expected = [
            NcPolynomial::parse(&s, "x1").unwrap(),
            NcPolynomial::parse(&s, "x1.x1").unwrap(),
            NcPolynomial::parse(&s, "x1.x2 + x2.x1").unwrap(),
        ];
        assert_eq!(polys.len(), 3);
        for e in &expected {
            assert!(polys.contains(e), "missing {e}");
        }
        for m in &members {
            assert!(m.replay(&[f.clone()]));
        }
    }

    #[test]
    fn ultra_closure_idempotent() {
        let s = f2();
        let f = NcPolynomial::parse(&s, "x1.x1 + x1").unwrap();
        let first = ultra_homogeneous_closure(&[f]).unwrap();
        let polys: Vec<_> = first.iter().map(|m| m.poly.clone()).collect();
        let second = ultra_homogeneous_closure(&polys).unwrap();
        let again: Vec<_> = second.iter().map(|m| m.poly.clone()).collect();
        assert_eq!(polys, again);
    }

    #[test]
    fn parse_print_round_trip_on_canonical_text() {
        let s = FieldSpec::make(2, 2).unwrap();
        let f = NcPolynomial::parse(&s, "2*x1.x2 - x2.x1.x1 + g*x3").unwrap();
        let text = f.to_text();
        let g = NcPolynomial::parse(&s, &text).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_text(), text);
    }

    #[test]
    fn unital_flag_round_trip() {
        let s = f2();
        let f = NcPolynomial::parse(&s, "1 + x1").unwrap();
        assert!(f.is_unital());
        assert_eq!(f.to_text(), "1 + x1");
        assert!(!NcPolynomial::parse(&s, "x1").unwrap().is_unital());
        assert!(NcPolynomial::parse(&s, "1 + x1")
            .unwrap()
            .with_unital(false)
            .is_err());
    }

    #[test]
    fn mixed_specs_rejected() {
        let a = var(&f2(), 1);
        let b = var(&FieldSpec::make(3, 1).unwrap(), 1);
        assert_eq!(
            NcPolynomial::checked_op("add", &a, &b),
            Err(AlgError::MixedFields)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// substitution is an algebra homomorphism: multiplicative on products
        #[test]
        fn substitute_is_multiplicative(seed in 0u64..1u64 << 48) {
            use rand::Rng;
            let s = FieldSpec::make(3, 1).unwrap();
            let mut rng = crate::seeding::rng_from_seed(seed);
            let rand_poly = |rng: &mut rand_chacha::ChaCha12Rng| {
                let mut p = NcPolynomial::zero(s.clone(), false);
                for _ in 0..rng.gen_range(1..4) {
                    let len = rng.gen_range(1..5);
                    let letters: Vec<u64> = (0..len).map(|_| rng.gen_range(1..4u64)).collect();
                    let coeff = s.from_int(rng.gen_range(1..3));
                    p.add_term(Word::from_letters(letters), coeff);
                }
                p
            };
            let f = rand_poly(&mut rng);
            let g = rand_poly(&mut rng);
            let mut sigma = SubstitutionMap::identity();
            for v in 1..4u64 {
                sigma.insert(v, rand_poly(&mut rng));
            }
            prop_assert_eq!(
                f.mul(&g).substitute(&sigma),
                f.substitute(&sigma).mul(&g.substitute(&sigma))
            );
        }

        /// components always sum back to the polynomial
        #[test]
        fn components_sum_to_whole(seed in 0u64..1u64 << 48) {
            use rand::Rng;
            let s = FieldSpec::make(5, 1).unwrap();
            let mut rng = crate::seeding::rng_from_seed(seed);
            let mut p = NcPolynomial::zero(s.clone(), false);
            for _ in 0..rng.gen_range(1..6) {
                let len = rng.gen_range(1..5);
                let letters: Vec<u64> = (0..len).map(|_| rng.gen_range(1..4u64)).collect();
                p.add_term(Word::from_letters(letters), s.from_int(rng.gen_range(1..5)));
            }
            let blended = p.blended_components().into_iter()
                .fold(NcPolynomial::zero(s.clone(), false), |a, b| a.add(&b));
            prop_assert_eq!(&blended, &p);
            let homog = p.homogeneous_components().into_iter()
                .fold(NcPolynomial::zero(s.clone(), false), |a, b| a.add(&b));
            prop_assert_eq!(&homog, &p);
        }
    }
}
