//! Exact coefficient arithmetic: the integers `Z`, prime fields `F_p`, and
//! extension fields `GF(p^m)` with the Frobenius endomorphism.
//!
//! A [`FieldSpec`] pins down the ring once and is shared behind an `Arc`;
//! every [`FieldScalar`] carries its spec so mixed-ring operations are
//! detected. Extension fields are `F_p[g]` modulo the lexicographically
//! smallest monic irreducible polynomial of the requested degree
//! (coefficients compared constant term first), so `GF(p, m)` is identical
//! across runs without a lookup table. Extension sizes are capped at `2^20`,
//! which keeps the exhaustive irreducibility search trivial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// Largest allowed field order `p^m` for extension fields.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("field of order {p}^{m} exceeds the cap 2^20")]
    ExtensionTooLarge { p: u64, m: u32 },
    #[error("division by zero or non-invertible element")]
    DivisionByZero,
    #[error("operands belong to different coefficient rings")]
    MixedFields,
    #[error("operation requires positive characteristic")]
    CharacteristicZero,
    #[error("cannot parse {text:?} as {what}")]
    Parse { text: String, what: &'static str },
}

/// Description of a coefficient ring: `Z` (p = 0), `F_p`, or `GF(p^m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    m: u32,
    /// Monic irreducible modulus of degree `m` over `F_p`, stored
    /// low-degree-first with length `m + 1`. Present only when `m >= 2`.
    modulus: Option<Vec<u64>>,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- dense polynomial helpers over F_p, low-degree-first, for the modulus search ----

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `d` over `F_p`.
fn fp_rem(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*d.last().unwrap(), 1, "divisor must be monic");
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    while r.len() >= d.len() {
        let lead = *r.last().unwrap();
        let shift = r.len() - d.len();
        for (i, &c) in d.iter().enumerate() {
            let sub = (lead * c) % p;
            let idx = shift + i;
            r[idx] = (r[idx] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

/// Exhaustive trial division by every monic polynomial of degree `1..=m/2`.
fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    for d in 1..=(m / 2) {
        // enumerate monic divisors of degree d: coefficient vectors base p
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut k = idx;
            for _ in 0..d {
                div.push(k % p);
                k /= p;
            }
            div.push(1);
            if fp_rem(f, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// comparing coefficient vectors constant term first.
fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let count = p.pow(m as u32);
    for idx in 0..count {
        // digits of idx, least significant first, with c_0 the most
        // significant position of the lexicographic order
        let mut coeffs = vec![0u64; m + 1];
        coeffs[m] = 1;
        let mut k = idx;
        for slot in (0..m).rev() {
            coeffs[slot] = k % p;
            k /= p;
        }
        if fp_is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

impl FieldSpec {
    /// The ring of integers.
    pub fn integers() -> Arc<FieldSpec> {
        Arc::new(FieldSpec {
            p: 0,
            m: 1,
            modulus: None,
        })
    }

    /// Build `Z` (p = 0, m = 1), `F_p` (m = 1), or `GF(p^m)`.
    pub fn make(p: u64, m: u32) -> Result<Arc<FieldSpec>, CoeffError> {
        if p == 0 {
            if m != 1 {
                return Err(CoeffError::ExtensionTooLarge { p, m });
            }
            return Ok(Self::integers());
        }
        if !is_prime(p) {
            return Err(CoeffError::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(CoeffError::ExtensionTooLarge { p, m });
        }
        let order = (p as u128).checked_pow(m).filter(|&o| o <= MAX_FIELD_ORDER as u128);
        if order.is_none() {
            return Err(CoeffError::ExtensionTooLarge { p, m });
        }
        let modulus = if m >= 2 {
            Some(smallest_irreducible(p, m))
        } else {
            None
        };
        Ok(Arc::new(FieldSpec { p, m, modulus }))
    }

    /// Parse a field designator: `Z`, `F7`, or `GF(2,3)`.
    pub fn parse_designator(s: &str) -> Result<Arc<FieldSpec>, CoeffError> {
        let s = s.trim();
        let err = || CoeffError::Parse {
            text: s.to_string(),
            what: "field designator",
        };
        if s == "Z" {
            return Ok(Self::integers());
        }
        if let Some(rest) = s.strip_prefix('F') {
            let p: u64 = rest.parse().map_err(|_| err())?;
            return Self::make(p, 1);
        }
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = rest.splitn(2, ',');
            let p: u64 = parts.next().ok_or_else(err)?.trim().parse().map_err(|_| err())?;
            let m: u32 = parts.next().ok_or_else(err)?.trim().parse().map_err(|_| err())?;
            return Self::make(p, m);
        }
        Err(err())
    }

    pub fn designator(&self) -> String {
        if self.p == 0 {
            "Z".to_string()
        } else if self.m == 1 {
            format!("F{}", self.p)
        } else {
            format!("GF({},{})", self.p, self.m)
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.m
    }

    pub fn is_integers(&self) -> bool {
        self.p == 0
    }

    pub fn is_field(&self) -> bool {
        self.p != 0
    }

    /// Number of elements; `None` for the integers.
    pub fn order(&self) -> Option<u64> {
        if self.p == 0 {
            None
        } else {
            Some(self.p.pow(self.m))
        }
    }

    /// Modulus coefficients, low-degree-first (extension fields only).
    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.designator())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    /// Arbitrary-precision integer (for `Z`).
    Int(BigInt),
    /// Canonical residue in `[0, p)` (for `F_p`).
    Mod(u64),
    /// Coefficient vector of length `m`, low-degree-first (for `GF(p^m)`).
    Ext(Vec<u64>),
}

/// An exact scalar in `Z`, `F_p`, or `GF(p^m)`, always in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    spec: Arc<FieldSpec>,
    repr: Repr,
}

impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldScalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.spec.p, self.spec.m, &self.repr).cmp(&(other.spec.p, other.spec.m, &other.repr))
    }
}

pub trait SpecScalars {
    fn zero(&self) -> FieldScalar;
    fn one(&self) -> FieldScalar;
    fn from_int(&self, v: i64) -> FieldScalar;
    fn from_bigint(&self, v: BigInt) -> FieldScalar;
    /// The scalar at a given position of the canonical enumeration
    /// (fields only; the index is the base-`p` encoding of the
    /// coefficient vector, low digit = constant term).
    fn scalar_from_index(&self, idx: u64) -> FieldScalar;
    /// All field elements in canonical enumeration order (empty for `Z`).
    fn elements(&self) -> Vec<FieldScalar>;
    /// The adjoined generator `g` (extension fields only).
    fn generator(&self) -> Option<FieldScalar>;
    fn parse_scalar(&self, s: &str) -> Result<FieldScalar, CoeffError>;
}

impl SpecScalars for Arc<FieldSpec> {
    fn zero(&self) -> FieldScalar {
        let repr = match (self.p, self.m) {
            (0, _) => Repr::Int(BigInt::zero()),
            (_, 1) => Repr::Mod(0),
            (_, m) => Repr::Ext(vec![0; m as usize]),
        };
        FieldScalar {
            spec: self.clone(),
            repr,
        }
    }

    fn one(&self) -> FieldScalar {
        self.from_int(1)
    }

    fn from_int(&self, v: i64) -> FieldScalar {
        self.from_bigint(BigInt::from(v))
    }

    fn from_bigint(&self, v: BigInt) -> FieldScalar {
        let repr = match (self.p, self.m) {
            (0, _) => Repr::Int(v),
            (p, 1) => Repr::Mod(v.mod_floor(&BigInt::from(p)).to_u64().unwrap()),
            (p, m) => {
                let mut coeffs = vec![0u64; m as usize];
                coeffs[0] = v.mod_floor(&BigInt::from(p)).to_u64().unwrap();
                Repr::Ext(coeffs)
            }
        };
        FieldScalar {
            spec: self.clone(),
            repr,
        }
    }

    fn scalar_from_index(&self, idx: u64) -> FieldScalar {
        assert!(self.is_field(), "enumeration is defined for fields only");
        let order = self.order().unwrap();
        let idx = idx % order;
        let repr = if self.m == 1 {
            Repr::Mod(idx)
        } else {
            let mut coeffs = Vec::with_capacity(self.m as usize);
            let mut k = idx;
            for _ in 0..self.m {
                coeffs.push(k % self.p);
                k /= self.p;
            }
            Repr::Ext(coeffs)
        };
        FieldScalar {
            spec: self.clone(),
            repr,
        }
    }

    fn elements(&self) -> Vec<FieldScalar> {
        match self.order() {
            None => vec![],
            Some(order) => (0..order).map(|i| self.scalar_from_index(i)).collect(),
        }
    }

    fn generator(&self) -> Option<FieldScalar> {
        if self.m >= 2 {
            Some(self.scalar_from_index(self.p))
        } else {
            None
        }
    }

    fn parse_scalar(&self, s: &str) -> Result<FieldScalar, CoeffError> {
        parse_scalar_text(self, s)
    }
}

impl FieldScalar {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Int(v) => v.is_zero(),
            Repr::Mod(v) => *v == 0,
            Repr::Ext(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Int(v) => v.is_one(),
            Repr::Mod(v) => *v == 1,
            Repr::Ext(v) => v[0] == 1 && v[1..].iter().all(|&c| c == 0),
        }
    }

    /// The value as an integer, when it lives in `Z` or a prime subfield
    /// representative (`None` for proper extension-field elements).
    pub fn as_integer(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Int(v) => Some(v.clone()),
            Repr::Mod(v) => Some(BigInt::from(*v)),
            Repr::Ext(v) => {
                if v[1..].iter().all(|&c| c == 0) {
                    Some(BigInt::from(v[0]))
                } else {
                    None
                }
            }
        }
    }

    /// Position in the canonical field enumeration (`None` for `Z`).
    pub fn index(&self) -> Option<u64> {
        match &self.repr {
            Repr::Int(_) => None,
            Repr::Mod(v) => Some(*v),
            Repr::Ext(v) => {
                let p = self.spec.p;
                Some(v.iter().rev().fold(0u64, |acc, &c| acc * p + c))
            }
        }
    }

    fn check_spec(&self, other: &FieldScalar) {
        assert_eq!(
            self.spec, other.spec,
            "scalar operands from different coefficient rings"
        );
    }

    pub fn add(&self, other: &FieldScalar) -> FieldScalar {
        self.check_spec(other);
        let repr = match (&self.repr, &other.repr) {
            (Repr::Int(a), Repr::Int(b)) => Repr::Int(a + b),
            (Repr::Mod(a), Repr::Mod(b)) => Repr::Mod((a + b) % self.spec.p),
            (Repr::Ext(a), Repr::Ext(b)) => Repr::Ext(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x + y) % self.spec.p)
                    .collect(),
            ),
            _ => unreachable!(),
        };
        FieldScalar {
            spec: self.spec.clone(),
            repr,
        }
    }

    pub fn sub(&self, other: &FieldScalar) -> FieldScalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldScalar {
        let p = self.spec.p;
        let repr = match &self.repr {
            Repr::Int(a) => Repr::Int(-a),
            Repr::Mod(a) => Repr::Mod((p - a) % p),
            Repr::Ext(a) => Repr::Ext(a.iter().map(|&c| (p - c) % p).collect()),
        };
        FieldScalar {
            spec: self.spec.clone(),
            repr,
        }
    }

    pub fn mul(&self, other: &FieldScalar) -> FieldScalar {
        self.check_spec(other);
        let repr = match (&self.repr, &other.repr) {
            (Repr::Int(a), Repr::Int(b)) => Repr::Int(a * b),
            (Repr::Mod(a), Repr::Mod(b)) => Repr::Mod((a * b) % self.spec.p),
            (Repr::Ext(a), Repr::Ext(b)) => {
                let p = self.spec.p;
                let modulus = self.spec.modulus.as_ref().unwrap();
                let prod = fp_mul(a, b, p);
                let mut rem = fp_rem(&prod, modulus, p);
                rem.resize(self.spec.m as usize, 0);
                Repr::Ext(rem)
            }
            _ => unreachable!(),
        };
        FieldScalar {
            spec: self.spec.clone(),
            repr,
        }
    }

    pub fn pow(&self, e: u64) -> FieldScalar {
        let mut result = self.spec.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Multiplicative inverse. In `Z` only `1` and `-1` are invertible.
    pub fn inv(&self) -> Result<FieldScalar, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        match &self.repr {
            Repr::Int(v) => {
                if v.is_one() || (-v).is_one() {
                    Ok(self.clone())
                } else {
                    Err(CoeffError::DivisionByZero)
                }
            }
            _ => {
                let order = self.spec.order().unwrap();
                Ok(self.pow(order - 2))
            }
        }
    }

    /// Checked binary operation with a `MixedFields` error on spec mismatch.
    pub fn try_binop(op: &str, a: &FieldScalar, b: &FieldScalar) -> Result<FieldScalar, CoeffError> {
        if a.spec != b.spec {
            return Err(CoeffError::MixedFields);
        }
        match op {
            "add" => Ok(a.add(b)),
            "sub" => Ok(a.sub(b)),
            "mul" => Ok(a.mul(b)),
            _ => Err(CoeffError::Parse {
                text: op.to_string(),
                what: "scalar operation",
            }),
        }
    }

    /// The Frobenius power `a^(p^e)`. Requires positive characteristic;
    /// `frobenius(a, m)` is the identity on `GF(p^m)`.
    pub fn frobenius(&self, e: u32) -> Result<FieldScalar, CoeffError> {
        if !self.spec.is_field() {
            return Err(CoeffError::CharacteristicZero);
        }
        let e = e % self.spec.m;
        Ok(self.pow(self.spec.p.pow(e)))
    }

    pub fn to_text(&self) -> String {
        match &self.repr {
            Repr::Int(v) => v.to_string(),
            Repr::Mod(v) => v.to_string(),
            Repr::Ext(v) => {
                let mut parts = Vec::new();
                for (i, &c) in v.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let part = match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "g".to_string(),
                        (1, c) => format!("{c}*g"),
                        (i, 1) => format!("g^{i}"),
                        (i, c) => format!("{c}*g^{i}"),
                    };
                    parts.push(part);
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            }
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parse scalar text: integers for `Z`/`F_p`; polynomials in `g` such as
/// `g+1`, `g^2+2*g`, or plain integers, for `GF(p^m)`.
fn parse_scalar_text(spec: &Arc<FieldSpec>, s: &str) -> Result<FieldScalar, CoeffError> {
    let s = s.trim();
    let err = || CoeffError::Parse {
        text: s.to_string(),
        what: "scalar",
    };
    if s.is_empty() {
        return Err(err());
    }
    if spec.m == 1 || !s.contains('g') {
        // integer text; for extension fields it lands in the prime subfield
        let v: BigInt = s.parse().map_err(|_| err())?;
        return Ok(spec.from_bigint(v));
    }
    // additive terms over g with optional signs
    let mut acc = spec.zero();
    let mut term = String::new();
    let mut sign = 1i64;
    let mut chars = s.chars();
    let flush = |term: &str, sign: i64, acc: &FieldScalar| -> Result<FieldScalar, CoeffError> {
        if term.is_empty() {
            return Err(err());
        }
        let (coeff_txt, power) = if let Some(pos) = term.find('g') {
            let before = term[..pos].trim_end_matches('*').trim();
            let after = &term[pos + 1..];
            let power: u32 = if let Some(e) = after.strip_prefix('^') {
                e.parse().map_err(|_| err())?
            } else if after.is_empty() {
                1
            } else {
                return Err(err());
            };
            (before, power)
        } else {
            (term, 0)
        };
        let coeff: i64 = if coeff_txt.is_empty() {
            1
        } else {
            coeff_txt.parse().map_err(|_| err())?
        };
        let g = spec.generator().ok_or_else(err)?;
        let val = spec.from_int(coeff * sign).mul(&g.pow(power as u64));
        Ok(acc.add(&val))
    };
    while let Some(c) = chars.next() {
        match c {
            '+' | '-' => {
                if term.trim().is_empty() && c == '-' && acc.is_zero() {
                    // leading minus
                    sign = -1;
                    continue;
                }
                acc = flush(term.trim(), sign, &acc)?;
                term.clear();
                sign = if c == '-' { -1 } else { 1 };
            }
            c if c.is_whitespace() => {}
            c => term.push(c),
        }
    }
    acc = flush(term.trim(), sign, &acc)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Arc<FieldSpec> {
        FieldSpec::make(2, 2).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        assert_eq!(f2.designator(), "F2");
        assert!(f2.modulus().is_none());

        let f4 = gf4();
        // the single monic irreducible quadratic over F_2: g^2 + g + 1
        assert_eq!(f4.modulus().unwrap(), &[1, 1, 1]);

        assert_eq!(
            FieldSpec::make(4, 1),
            Err(CoeffError::NonPrimeCharacteristic(4))
        );
        assert!(matches!(
            FieldSpec::make(2, 21),
            Err(CoeffError::ExtensionTooLarge { .. })
        ));
    }

    #[test]
    fn gf4_matches_brute_force_table() {
        // build the full multiplication table of F_2[g]/(g^2+g+1) by hand
        let f4 = gf4();
        let g = f4.generator().unwrap();
        let one = f4.one();
        // g * g = g + 1
        assert_eq!(g.mul(&g), g.add(&one));
        // inv(g) = g + 1 from the same table
        assert_eq!(g.inv().unwrap(), g.add(&one));
        // exhaustive check: products reduce mod g^2+g+1 as polynomials
        for a in f4.elements() {
            for b in f4.elements() {
                let prod = a.mul(&b);
                // brute force: multiply coefficient vectors, reduce
                let (av, bv) = (a.index().unwrap(), b.index().unwrap());
                let (a0, a1) = (av % 2, av / 2);
                let (b0, b1) = (bv % 2, bv / 2);
                // (a0 + a1 g)(b0 + b1 g) = a0b0 + (a0b1 + a1b0) g + a1b1 g^2,
                // g^2 = g + 1
                let c0 = (a0 * b0 + a1 * b1) % 2;
                let c1 = (a0 * b1 + a1 * b0 + a1 * b1) % 2;
                assert_eq!(prod.index().unwrap(), c0 + 2 * c1);
            }
        }
    }

    #[test]
    fn f2_addition() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        assert!(f2.one().add(&f2.one()).is_zero());
    }

    #[test]
    fn frobenius_examples() {
        let f4 = gf4();
        let g = f4.generator().unwrap();
        let one = f4.one();
        assert_eq!(one.frobenius(1).unwrap(), one);
        // g^2 = g + 1
        assert_eq!(g.frobenius(1).unwrap(), g.add(&one));
        // Frobenius has order m = 2
        assert_eq!(g.frobenius(2).unwrap(), g);
        let z = FieldSpec::integers();
        assert_eq!(z.one().frobenius(1), Err(CoeffError::CharacteristicZero));
    }

    #[test]
    fn frobenius_is_ring_homomorphism_exhaustive() {
        // exhaustive for all field orders p^m <= 256
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (7, 1), (2, 4), (13, 1), (3, 4), (2, 8), (5, 3), (11, 2)] {
            let f = FieldSpec::make(p, m).unwrap();
            if f.order().unwrap() > 256 {
                continue;
            }
            for e in 0..=m {
                for a in f.elements() {
                    for b in f.elements() {
                        assert_eq!(
                            a.mul(&b).frobenius(e).unwrap(),
                            a.frobenius(e).unwrap().mul(&b.frobenius(e).unwrap())
                        );
                        assert_eq!(
                            a.add(&b).frobenius(e).unwrap(),
                            a.frobenius(e).unwrap().add(&b.frobenius(e).unwrap())
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_composes() {
        let f8 = FieldSpec::make(2, 3).unwrap();
        for a in f8.elements() {
            for e1 in 0..4 {
                for e2 in 0..4 {
                    assert_eq!(
                        a.frobenius(e1).unwrap().frobenius(e2).unwrap(),
                        a.frobenius(e1 + e2).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (2, 5), (2, 6)] {
            let f = FieldSpec::make(p, m).unwrap();
            let order = f.order().unwrap();
            assert!(order <= 64);
            let elems = f.elements();
            for a in &elems {
                // inverses
                if !a.is_zero() {
                    assert!(a.mul(&a.inv().unwrap()).is_one());
                }
                for b in &elems {
                    assert_eq!(a.add(b), b.add(a));
                    assert_eq!(a.mul(b), b.mul(a));
                    for c in &elems {
                        assert_eq!(a.add(&b.add(c)), a.add(b).add(c));
                        assert_eq!(a.mul(&b.mul(c)), a.mul(b).mul(c));
                        assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_fields_rejected() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        let f3 = FieldSpec::make(3, 1).unwrap();
        assert_eq!(
            FieldScalar::try_binop("add", &f2.one(), &f3.one()),
            Err(CoeffError::MixedFields)
        );
    }

    #[test]
    fn integer_ring() {
        let z = FieldSpec::integers();
        let a = z.from_int(-3);
        let b = z.from_int(7);
        assert_eq!(a.mul(&b), z.from_int(-21));
        assert_eq!(z.from_int(2).inv(), Err(CoeffError::DivisionByZero));
        assert_eq!(z.from_int(-1).inv().unwrap(), z.from_int(-1));
    }

    #[test]
    fn scalar_text_round_trip() {
        let f9 = FieldSpec::make(3, 2).unwrap();
        for a in f9.elements() {
            let text = a.to_text();
            assert_eq!(f9.parse_scalar(&text).unwrap(), a, "text {text}");
        }
        let z = FieldSpec::integers();
        assert_eq!(z.parse_scalar("-3").unwrap(), z.from_int(-3));
        let f4 = gf4();
        assert_eq!(
            f4.parse_scalar("g+1").unwrap(),
            f4.generator().unwrap().add(&f4.one())
        );
    }

    #[test]
    fn designator_round_trip() {
        for d in ["Z", "F2", "F7", "GF(2,2)", "GF(3,3)"] {
            assert_eq!(FieldSpec::parse_designator(d).unwrap().designator(), d);
        }
    }
}
