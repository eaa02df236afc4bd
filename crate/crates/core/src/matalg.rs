//! Exact matrix algebra over the coefficient rings: division-free
//! characteristic polynomials, q-power characteristic coefficients, the
//! left-regular representation, and semisimplicity testing.
//!
//! The characteristic polynomial is stored in the fixed convention
//! `f_a(λ) = λ^n + Σ_{k<n} α_k λ^k`, i.e. the coefficients of
//! `det(λI - a)`; under this convention the trace is `-α_{n-1}` and the
//! determinant is `(-1)^n α_0`. The signed accessor
//! [`CharPoly::signed_coeff`] exposes the view `(-1)^{n-k} α_k`, which
//! recovers the plain trace and determinant.
//!
//! The main algorithm is a Berkowitz-style division-free recursion, so the
//! same code path is valid over `Z` and in any characteristic; a cofactor
//! expansion of `det(λI - a)` is kept alongside as an independent oracle.

use crate::coeffring::{CoeffError, FieldScalar, FieldSpec, SpecScalars};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatError {
    #[error("matrix size {0} exceeds the cap {1} for this operation")]
    SizeTooLarge(usize, usize),
    #[error("{0} is not a power of the characteristic")]
    NotPPower(u64),
    #[error("operation requires positive characteristic")]
    CharacteristicZero,
    #[error("matrices have mixed sizes or coefficient rings")]
    MixedSizes,
    #[error("operation requires field coefficients")]
    NotAField,
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A dense square matrix over a fixed coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    spec: Arc<FieldSpec>,
    n: usize,
    entries: Vec<FieldScalar>,
}

impl SquareMatrix {
    pub fn zero(spec: Arc<FieldSpec>, n: usize) -> SquareMatrix {
        let entries = vec![spec.zero(); n * n];
        SquareMatrix { spec, n, entries }
    }

    pub fn identity(spec: Arc<FieldSpec>, n: usize) -> SquareMatrix {
        let mut m = SquareMatrix::zero(spec, n);
        for i in 0..n {
            let one = m.spec.one();
            m.set(i, i, one);
        }
        m
    }

    /// The matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(spec: Arc<FieldSpec>, n: usize, i: usize, j: usize) -> SquareMatrix {
        let mut m = SquareMatrix::zero(spec, n);
        let one = m.spec.one();
        m.set(i, j, one);
        m
    }

    pub fn from_rows(spec: Arc<FieldSpec>, rows: Vec<Vec<FieldScalar>>) -> SquareMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        let entries = rows.into_iter().flatten().collect::<Vec<_>>();
        assert!(entries.iter().all(|e| e.spec() == &spec));
        SquareMatrix { spec, n, entries }
    }

    pub fn from_ints(spec: &Arc<FieldSpec>, rows: &[&[i64]]) -> SquareMatrix {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&v| spec.from_int(v)).collect())
            .collect();
        SquareMatrix::from_rows(spec.clone(), data)
    }

    pub fn diagonal(spec: &Arc<FieldSpec>, diag: &[i64]) -> SquareMatrix {
        let mut m = SquareMatrix::zero(spec.clone(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, spec.from_int(v));
        }
        m
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldScalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldScalar) {
        assert_eq!(v.spec(), &self.spec);
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check_compatible(&self, other: &SquareMatrix) -> Result<(), MatError> {
        if self.n != other.n || self.spec != other.spec {
            return Err(MatError::MixedSizes);
        }
        Ok(())
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        self.check_compatible(other).expect("incompatible matrices");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        SquareMatrix {
            spec: self.spec.clone(),
            n: self.n,
            entries,
        }
    }

    pub fn sub(&self, other: &SquareMatrix) -> SquareMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SquareMatrix {
        SquareMatrix {
            spec: self.spec.clone(),
            n: self.n,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, s: &FieldScalar) -> SquareMatrix {
        SquareMatrix {
            spec: self.spec.clone(),
            n: self.n,
            entries: self.entries.iter().map(|e| e.mul(s)).collect(),
        }
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        self.check_compatible(other).expect("incompatible matrices");
        let n = self.n;
        let mut out = SquareMatrix::zero(self.spec.clone(), n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a.mul(other.get(k, j));
                    let cur = out.get(i, j).add(&prod);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> SquareMatrix {
        let mut result = SquareMatrix::identity(self.spec.clone(), self.n);
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

    pub fn trace(&self) -> FieldScalar {
        let mut t = self.spec.zero();
        for i in 0..self.n {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Does this matrix commute with `other`?
    pub fn commutes_with(&self, other: &SquareMatrix) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Is this a scalar multiple of the identity?
    pub fn is_scalar(&self) -> bool {
        let d = self.get(0, 0).clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let expect = if i == j { d.clone() } else { self.spec.zero() };
                if self.get(i, j) != &expect {
                    return false;
                }
            }
        }
        true
    }

    /// Uniform random matrix over a finite field.
    pub fn random<R: Rng>(spec: &Arc<FieldSpec>, n: usize, rng: &mut R) -> SquareMatrix {
        let order = spec.order().expect("random matrices need a finite field");
        let entries = (0..n * n)
            .map(|_| spec.scalar_from_index(rng.gen_range(0..order)))
            .collect();
        SquareMatrix {
            spec: spec.clone(),
            n,
            entries,
        }
    }

    /// Random matrix with integer entries drawn from `lo..=hi`.
    pub fn random_int_range<R: Rng>(
        spec: &Arc<FieldSpec>,
        n: usize,
        lo: i64,
        hi: i64,
        rng: &mut R,
    ) -> SquareMatrix {
        let entries = (0..n * n)
            .map(|_| spec.from_int(rng.gen_range(lo..=hi)))
            .collect();
        SquareMatrix {
            spec: spec.clone(),
            n,
            entries,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_text()).collect())
            .collect();
        serde_json::json!({
            "n": self.n,
            "field": self.spec.designator(),
            "rows": rows,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<SquareMatrix, MatError> {
        let bad = || MatError::Coeff(CoeffError::Parse {
            text: value.to_string(),
            what: "matrix JSON",
        });
        let n = value.get("n").and_then(|v| v.as_u64()).ok_or_else(bad)? as usize;
        let field = value.get("field").and_then(|v| v.as_str()).ok_or_else(bad)?;
        let spec = FieldSpec::parse_designator(field)?;
        let rows = value.get("rows").and_then(|v| v.as_array()).ok_or_else(bad)?;
        if rows.len() != n {
            return Err(bad());
        }
        let mut data = Vec::with_capacity(n);
        for row in rows {
            let row = row.as_array().ok_or_else(bad)?;
            if row.len() != n {
                return Err(bad());
            }
            let mut out_row = Vec::with_capacity(n);
            for cell in row {
                let text = cell.as_str().ok_or_else(bad)?;
                out_row.push(spec.parse_scalar(text)?);
            }
            data.push(out_row);
        }
        Ok(SquareMatrix::from_rows(spec, data))
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_text()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// dense univariate polynomials over a coefficient ring (internal helper)
// ---------------------------------------------------------------------------

/// Coefficients low-degree-first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    spec: Arc<FieldSpec>,
    coeffs: Vec<FieldScalar>,
}

impl UniPoly {
    pub fn zero(spec: Arc<FieldSpec>) -> UniPoly {
        UniPoly {
            spec,
            coeffs: vec![],
        }
    }

    pub fn from_coeffs(spec: Arc<FieldSpec>, coeffs: Vec<FieldScalar>) -> UniPoly {
        let mut p = UniPoly { spec, coeffs };
        p.trim();
        p
    }

    pub fn constant(spec: Arc<FieldSpec>, c: FieldScalar) -> UniPoly {
        UniPoly::from_coeffs(spec, vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 encoded as None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldScalar] {
        &self.coeffs
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| self.spec.zero());
            let b = other.coeffs.get(i).cloned().unwrap_or_else(|| self.spec.zero());
            out.push(a.add(&b));
        }
        UniPoly::from_coeffs(self.spec.clone(), out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.spec.clone());
        }
        let mut out = vec![self.spec.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::from_coeffs(self.spec.clone(), out)
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut out = UniPoly::constant(self.spec.clone(), self.spec.one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Polynomial remainder; requires field coefficients.
    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly, MatError> {
        if !self.spec.is_field() {
            return Err(MatError::NotAField);
        }
        let d = divisor.degree().ok_or(MatError::Coeff(CoeffError::DivisionByZero))?;
        let lead_inv = divisor.coeffs[d].inv().map_err(MatError::Coeff)?;
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < d {
                break;
            }
            let factor = r.coeffs[rd].mul(&lead_inv);
            let shift = rd - d;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                let sub = factor.mul(c);
                r.coeffs[shift + i] = r.coeffs[shift + i].sub(&sub);
            }
            r.trim();
        }
        Ok(r)
    }

    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly, MatError> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        // normalize monic
        if let Some(d) = a.degree() {
            let inv = a.coeffs[d].inv().map_err(MatError::Coeff)?;
            a = a.mul(&UniPoly::constant(a.spec.clone(), inv));
        }
        Ok(a)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero(self.spec.clone());
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let k = self.spec.from_int(i as i64);
                c.mul(&k)
            })
            .collect();
        UniPoly::from_coeffs(self.spec.clone(), coeffs)
    }

    /// Evaluate at a square matrix (constant term times the identity).
    pub fn eval_matrix(&self, a: &SquareMatrix) -> SquareMatrix {
        let mut acc = SquareMatrix::zero(a.spec().clone(), a.size());
        // Horner from the top coefficient
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a);
            let id = SquareMatrix::identity(a.spec().clone(), a.size());
            acc = acc.add(&id.scale(c));
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// characteristic polynomials
// ---------------------------------------------------------------------------

/// Characteristic polynomial in the convention `λ^n + Σ_{k<n} α_k λ^k`
/// (the coefficients of `det(λI - a)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    n: usize,
    alphas: Vec<FieldScalar>,
}

impl CharPoly {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `α_k`, `0 <= k < n`.
    pub fn alpha(&self, k: usize) -> &FieldScalar {
        &self.alphas[k]
    }

    pub fn alphas(&self) -> &[FieldScalar] {
        &self.alphas
    }

    /// The signed view `(-1)^{n-k} α_k`: index `n-1` is the trace and index
    /// `0` is the determinant.
    pub fn signed_coeff(&self, k: usize) -> FieldScalar {
        let a = self.alphas[k].clone();
        if (self.n - k) % 2 == 1 {
            a.neg()
        } else {
            a
        }
    }

    /// All coefficients low-degree-first, including the leading `1`.
    pub fn full_coeffs(&self) -> Vec<FieldScalar> {
        let spec = self.alphas[0].spec().clone();
        let mut v = self.alphas.clone();
        v.push(spec.one());
        v
    }

    pub fn to_unipoly(&self) -> UniPoly {
        let spec = self.alphas[0].spec().clone();
        UniPoly::from_coeffs(spec, self.full_coeffs())
    }

    /// Evaluate `a^n + Σ α_k a^k` (zero by Cayley-Hamilton when `a` is the
    /// source matrix).
    pub fn eval_at(&self, a: &SquareMatrix) -> SquareMatrix {
        self.to_unipoly().eval_matrix(a)
    }

    /// Apply `c -> c^qbar` to every coefficient.
    pub fn coeff_power(&self, qbar: u64) -> CharPoly {
        CharPoly {
            n: self.n,
            alphas: self.alphas.iter().map(|a| a.pow(qbar)).collect(),
        }
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![format!("L^{}", self.n)];
        for (k, a) in self.alphas.iter().enumerate().rev() {
            if !a.is_zero() {
                parts.push(format!("({})*L^{}", a.to_text(), k));
            }
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Cap for the division-free characteristic polynomial.
pub const CHAR_POLY_MAX_N: usize = 16;
/// Cap for the left-regular representation.
pub const LEFT_REGULAR_MAX_N: usize = 4;
/// Cap for the literal matrix-unit characteristic coefficient sum.
pub const MATRIX_COEFF_MAX_N: usize = 3;

/// Division-free characteristic polynomial (Berkowitz recursion); valid over
/// any integral domain, in particular over `Z` and in characteristic `p`.
pub fn char_poly(a: &SquareMatrix) -> Result<CharPoly, MatError> {
    let n = a.size();
    if n == 0 || n > CHAR_POLY_MAX_N {
        return Err(MatError::SizeTooLarge(n, CHAR_POLY_MAX_N));
    }
    let spec = a.spec().clone();
    // v holds the coefficients of the leading principal r x r block,
    // highest power first, length r + 1
    let mut v = vec![spec.one(), a.get(0, 0).neg()];
    for r in 2..=n {
        // row R = a[r-1][0..r-1], column C = a[0..r-1][r-1], corner a[r-1][r-1]
        let mut s = vec![spec.one(), a.get(r - 1, r - 1).neg()];
        // iteratively accumulate R * sub^j * C
        let mut w: Vec<FieldScalar> = (0..r - 1).map(|i| a.get(i, r - 1).clone()).collect();
        for _ in 0..r - 1 {
            // dot R . w
            let mut dot = spec.zero();
            for (i, wi) in w.iter().enumerate() {
                dot = dot.add(&a.get(r - 1, i).mul(wi));
            }
            s.push(dot.neg());
            // w = sub * w
            let mut next = vec![spec.zero(); r - 1];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, wj) in w.iter().enumerate() {
                    *slot = slot.add(&a.get(i, j).mul(wj));
                }
            }
            w = next;
        }
        // multiply the (r+1) x r Toeplitz matrix built from s into v
        let mut next_v = vec![spec.zero(); r + 1];
        for (i, slot) in next_v.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if i >= j && i - j < s.len() {
                    *slot = slot.add(&s[i - j].mul(vj));
                }
            }
        }
        v = next_v;
    }
    debug_assert!(v[0].is_one());
    // v is highest-first: v[n - k] is the coefficient of λ^k
    let alphas = (0..n).map(|k| v[n - k].clone()).collect();
    Ok(CharPoly { n, alphas })
}

/// Independent oracle: cofactor expansion of `det(λI - a)` with polynomial
/// entries. Exponential in `n`; intended for cross-checking small sizes.
pub fn char_poly_via_cofactors(a: &SquareMatrix) -> Result<CharPoly, MatError> {
    let n = a.size();
    if n == 0 || n > 6 {
        return Err(MatError::SizeTooLarge(n, 6));
    }
    let spec = a.spec().clone();
    // build λI - a as a polynomial matrix
    let mut entries: Vec<UniPoly> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut coeffs = vec![a.get(i, j).neg()];
            if i == j {
                coeffs.push(spec.one());
            }
            entries.push(UniPoly::from_coeffs(spec.clone(), coeffs));
        }
    }
    fn det_general(
        entries: &[UniPoly],
        rows: &[usize],
        cols: &[usize],
        spec: &Arc<FieldSpec>,
        n: usize,
    ) -> UniPoly {
        if rows.is_empty() {
            return UniPoly::constant(spec.clone(), spec.one());
        }
        let mut acc = UniPoly::zero(spec.clone());
        let row = rows[0];
        for (pos, &col) in cols.iter().enumerate() {
            let sub_rows: Vec<usize> = rows[1..].to_vec();
            let sub_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| c != col)
                .collect();
            let sub = det_general(entries, &sub_rows, &sub_cols, spec, n);
            let term = entries[row * n + col].mul(&sub);
            if pos % 2 == 0 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        acc
    }
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    let poly = det_general(&entries, &rows, &cols, &spec, n);
    let mut coeffs = poly.coeffs().to_vec();
    coeffs.resize(n + 1, spec.zero());
    debug_assert!(coeffs[n].is_one());
    let alphas = coeffs[..n].to_vec();
    Ok(CharPoly { n, alphas })
}

/// The q-power characteristic coefficients `(α_0^qbar, ..., α_{n-1}^qbar)`;
/// these coincide with the characteristic polynomial of `a^qbar`.
pub fn q_char_coeffs(a: &SquareMatrix, qbar: u64) -> Result<CharPoly, MatError> {
    let p = a.spec().characteristic();
    if p == 0 {
        return Err(MatError::CharacteristicZero);
    }
    let mut q = qbar;
    while q > 1 && q % p == 0 {
        q /= p;
    }
    if q != 1 {
        return Err(MatError::NotPPower(qbar));
    }
    Ok(char_poly(a)?.coeff_power(qbar))
}

/// The `n^2 x n^2` matrix of left multiplication by `a` on the matrix ring,
/// in the row-major matrix-unit basis `e_11, e_12, ..., e_nn`.
pub fn left_regular(a: &SquareMatrix) -> Result<SquareMatrix, MatError> {
    let n = a.size();
    if n > LEFT_REGULAR_MAX_N {
        return Err(MatError::SizeTooLarge(n, LEFT_REGULAR_MAX_N));
    }
    let big = n * n;
    let mut m = SquareMatrix::zero(a.spec().clone(), big);
    for i in 0..n {
        for k in 0..n {
            let v = a.get(i, k).clone();
            if v.is_zero() {
                continue;
            }
            for l in 0..n {
                // a e_{kl} = Σ_i a_{ik} e_{il}
                m.set(i * n + l, k * n + l, v.clone());
            }
        }
    }
    Ok(m)
}

/// Apply the left-regular action to an element of the matrix ring,
/// flattened row-major: returns `a * x`.
pub fn regular_apply(a: &SquareMatrix, x: &SquareMatrix) -> SquareMatrix {
    a.mul(x)
}

/// The literal matrix-unit sum
/// `Σ_j Σ_{i_1..i_k} e_{j,i_1} a e_{i_2,i_2} a ... a e_{i_k,i_k} a e_{i_1,j}`.
/// For `k = 1` this is `Σ_{i,j} e_{ji} a e_{ij} = tr(a) I`.
pub fn matrix_char_coeff(a: &SquareMatrix, k: usize) -> Result<SquareMatrix, MatError> {
    let n = a.size();
    if n > MATRIX_COEFF_MAX_N {
        return Err(MatError::SizeTooLarge(n, MATRIX_COEFF_MAX_N));
    }
    if k == 0 || k > n {
        return Err(MatError::BadIndex(k));
    }
    let spec = a.spec().clone();
    let mut acc = SquareMatrix::zero(spec.clone(), n);
    let mut index = vec![0usize; k];
    loop {
        for j in 0..n {
            // word: e_{j,i1} a e_{i2,i2} a ... a e_{ik,ik} a e_{i1,j}
            let mut prod = SquareMatrix::unit(spec.clone(), n, j, index[0]);
            prod = prod.mul(a);
            for &i in index.iter().skip(1) {
                prod = prod.mul(&SquareMatrix::unit(spec.clone(), n, i, i));
                prod = prod.mul(a);
            }
            prod = prod.mul(&SquareMatrix::unit(spec.clone(), n, index[0], j));
            acc = acc.add(&prod);
        }
        // advance the index vector
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(acc);
            }
            index[pos] += 1;
            if index[pos] < n {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// The `j`-th elementary symmetric function of the signed `t`-th
/// characteristic coefficients of the given matrices.
pub fn symmetrized_char_coeffs(
    mats: &[SquareMatrix],
    t: usize,
    j: usize,
) -> Result<FieldScalar, MatError> {
    let first = mats.first().ok_or(MatError::MixedSizes)?;
    if j == 0 || j > mats.len() {
        return Err(MatError::BadIndex(j));
    }
    for m in mats {
        if m.size() != first.size() || m.spec() != first.spec() {
            return Err(MatError::MixedSizes);
        }
    }
    let spec = first.spec().clone();
    let values: Vec<FieldScalar> = mats
        .iter()
        .map(|m| Ok(char_poly(m)?.signed_coeff(t)))
        .collect::<Result<_, MatError>>()?;
    // elementary symmetric functions by the product expansion of Π (1 + v y)
    let mut e = vec![spec.zero(); mats.len() + 1];
    e[0] = spec.one();
    for v in &values {
        for idx in (1..e.len()).rev() {
            let add = e[idx - 1].mul(v);
            e[idx] = e[idx].add(&add);
        }
    }
    Ok(e[j].clone())
}

/// Minimal polynomial over a field, monic, by incremental linear dependence
/// of the powers `I, a, a^2, ...`.
pub fn minimal_polynomial(a: &SquareMatrix) -> Result<UniPoly, MatError> {
    let spec = a.spec().clone();
    if !spec.is_field() {
        return Err(MatError::NotAField);
    }
    let n = a.size();
    let dim = n * n;
    // rows of the echelon together with the combination that produced them
    let mut echelon: Vec<(usize, Vec<FieldScalar>, Vec<FieldScalar>)> = Vec::new();
    let mut power = SquareMatrix::identity(spec.clone(), n);
    for deg in 0..=dim {
        let mut vec: Vec<FieldScalar> = power.entries.clone();
        let mut combo = vec![spec.zero(); dim + 2];
        combo[deg] = spec.one();
        // reduce against the echelon
        for (lead, row, row_combo) in &echelon {
            if vec[*lead].is_zero() {
                continue;
            }
            let factor = vec[*lead].clone();
            for i in 0..dim {
                let s = row[i].mul(&factor);
                vec[i] = vec[i].sub(&s);
            }
            for i in 0..combo.len() {
                let s = row_combo[i].mul(&factor);
                combo[i] = combo[i].sub(&s);
            }
        }
        match vec.iter().position(|c| !c.is_zero()) {
            Some(lead) => {
                let inv = vec[lead].inv().map_err(MatError::Coeff)?;
                for c in vec.iter_mut() {
                    *c = c.mul(&inv);
                }
                for c in combo.iter_mut() {
                    *c = c.mul(&inv);
                }
                echelon.push((lead, vec, combo));
            }
            None => {
                // dependency found: combo gives the minimal polynomial
                let coeffs: Vec<FieldScalar> = combo[..=deg].to_vec();
                let mut p = UniPoly::from_coeffs(spec, coeffs);
                // normalize monic
                let d = p.degree().unwrap();
                let inv = p.coeffs[d].inv().map_err(MatError::Coeff)?;
                p = p.mul(&UniPoly::constant(p.spec.clone(), inv));
                return Ok(p);
            }
        }
        power = power.mul(a);
    }
    unreachable!("a dependency arises by dimension count")
}

/// True when the minimal polynomial is squarefree (coprime to its formal
/// derivative; an identically zero derivative already implies a repeated
/// factor over a field of positive characteristic).
pub fn is_semisimple(a: &SquareMatrix) -> Result<bool, MatError> {
    let m = minimal_polynomial(a)?;
    let d = m.derivative();
    if d.is_zero() {
        return Ok(false);
    }
    let g = m.gcd(&d)?;
    Ok(g.degree() == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::FieldSpec;
    use crate::seeding::rng_from_seed;

    #[test]
    fn char_poly_identity_over_z() {
        let z = FieldSpec::integers();
        let i2 = SquareMatrix::identity(z.clone(), 2);
        let cp = char_poly(&i2).unwrap();
        // λ^2 - 2λ + 1
        assert_eq!(cp.alpha(0), &z.from_int(1));
        assert_eq!(cp.alpha(1), &z.from_int(-2));
    }

    #[test]
    fn char_poly_fibonacci_matrix_over_f2() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        let a = SquareMatrix::from_ints(&f2, &[&[0, 1], &[1, 1]]);
        let cp = char_poly(&a).unwrap();
        // λ(λ+1) - 1 = λ^2 + λ + 1 over F_2
        assert_eq!(cp.alphas(), &[f2.from_int(1), f2.from_int(1)]);
    }

    #[test]
    fn char_poly_diagonal_over_f5() {
        let f5 = FieldSpec::make(5, 1).unwrap();
        let a = SquareMatrix::diagonal(&f5, &[1, 2]);
        let cp = char_poly(&a).unwrap();
        // (λ-1)(λ-2) = λ^2 - 3λ + 2 = λ^2 + 2λ + 2 mod 5
        assert_eq!(cp.alphas(), &[f5.from_int(2), f5.from_int(2)]);
    }

    #[test]
    fn char_poly_matches_cofactor_oracle() {
        let specs = [
            FieldSpec::integers(),
            FieldSpec::make(2, 1).unwrap(),
            FieldSpec::make(3, 1).unwrap(),
            FieldSpec::make(5, 1).unwrap(),
            FieldSpec::make(2, 2).unwrap(),
        ];
        let mut rng = rng_from_seed(11);
        for spec in &specs {
            for n in 1..=4 {
                for _ in 0..20 {
                    let a = if spec.is_field() {
                        SquareMatrix::random(spec, n, &mut rng)
                    } else {
                        SquareMatrix::random_int_range(spec, n, -3, 3, &mut rng)
                    };
                    let fast = char_poly(&a).unwrap();
                    let oracle = char_poly_via_cofactors(&a).unwrap();
                    assert_eq!(fast, oracle);
                    // Cayley-Hamilton
                    assert!(fast.eval_at(&a).is_zero());
                }
            }
        }
    }

    #[test]
    fn frobenius_coefficient_law_samples() {
        let mut rng = rng_from_seed(23);
        for p in [2u64, 3, 5] {
            let spec = FieldSpec::make(p, 1).unwrap();
            for n in 2..=4 {
                for _ in 0..20 {
                    let a = SquareMatrix::random(&spec, n, &mut rng);
                    let base = char_poly(&a).unwrap();
                    let powered = char_poly(&a.pow(p)).unwrap();
                    assert_eq!(base.coeff_power(p), powered);
                }
            }
        }
    }

    #[test]
    fn q_char_coeffs_examples() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        let a = SquareMatrix::from_ints(&f2, &[&[0, 1], &[1, 1]]);
        let qc = q_char_coeffs(&a, 2).unwrap();
        assert_eq!(qc.alphas(), &[f2.from_int(1), f2.from_int(1)]);
        assert_eq!(qc, char_poly(&a.pow(2)).unwrap());
        // qbar = 1 returns the characteristic polynomial itself
        assert_eq!(q_char_coeffs(&a, 1).unwrap(), char_poly(&a).unwrap());
        assert_eq!(q_char_coeffs(&a, 3), Err(MatError::NotPPower(3)));
        let z = FieldSpec::integers();
        let b = SquareMatrix::identity(z, 2);
        assert_eq!(q_char_coeffs(&b, 2), Err(MatError::CharacteristicZero));
    }

    #[test]
    fn left_regular_examples() {
        let f5 = FieldSpec::make(5, 1).unwrap();
        let i2 = SquareMatrix::identity(f5.clone(), 2);
        assert_eq!(left_regular(&i2).unwrap(), SquareMatrix::identity(f5.clone(), 4));

        let a = SquareMatrix::diagonal(&f5, &[1, 2]);
        let reg = left_regular(&a).unwrap();
        let cp = char_poly(&reg).unwrap();
        let base = char_poly(&a).unwrap();
        // eigenvalue doubling: f_reg = f_a^2
        let squared = base.to_unipoly().pow(2);
        assert_eq!(cp.to_unipoly(), squared);
    }

    #[test]
    fn regular_representation_law_random() {
        let mut rng = rng_from_seed(37);
        let f3 = FieldSpec::make(3, 1).unwrap();
        for _ in 0..50 {
            let a = SquareMatrix::random(&f3, 2, &mut rng);
            let reg = left_regular(&a).unwrap();
            let lhs = char_poly(&reg).unwrap().to_unipoly();
            let rhs = char_poly(&a).unwrap().to_unipoly().pow(2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn matrix_char_coeff_trace_level() {
        let z = FieldSpec::integers();
        let a = SquareMatrix::from_ints(&z, &[&[1, 2], &[3, 4]]);
        let t = matrix_char_coeff(&a, 1).unwrap();
        assert_eq!(t, SquareMatrix::identity(z.clone(), 2).scale(&z.from_int(5)));
        let e12 = SquareMatrix::unit(z.clone(), 2, 0, 1);
        assert!(matrix_char_coeff(&e12, 1).unwrap().is_zero());

        let f3 = FieldSpec::make(3, 1).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let m = SquareMatrix::random(&f3, 2, &mut rng);
            let t = matrix_char_coeff(&m, 1).unwrap();
            assert!(t.is_scalar());
            assert_eq!(t.get(0, 0), &m.trace());
        }
    }

    #[test]
    fn symmetrized_coeff_examples() {
        let f7 = FieldSpec::make(7, 1).unwrap();
        let a = SquareMatrix::diagonal(&f7, &[1, 1]); // trace 2
        let b = SquareMatrix::diagonal(&f7, &[1, 2]); // trace 3
        let mats = vec![a.clone(), b.clone()];
        assert_eq!(symmetrized_char_coeffs(&mats, 1, 1).unwrap(), f7.from_int(5));
        assert_eq!(symmetrized_char_coeffs(&mats, 1, 2).unwrap(), f7.from_int(6));
        // permutation invariance
        let swapped = vec![b.clone(), a.clone()];
        assert_eq!(
            symmetrized_char_coeffs(&mats, 1, 1).unwrap(),
            symmetrized_char_coeffs(&swapped, 1, 1).unwrap()
        );
        // single matrix: the signed coefficient itself
        assert_eq!(
            symmetrized_char_coeffs(&[b], 1, 1).unwrap(),
            f7.from_int(3)
        );
    }

    #[test]
    fn semisimple_examples() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        let e12 = SquareMatrix::unit(f2.clone(), 2, 0, 1);
        assert!(!is_semisimple(&e12).unwrap());
        assert!(is_semisimple(&SquareMatrix::identity(f2.clone(), 2)).unwrap());
        let z = FieldSpec::integers();
        assert_eq!(
            is_semisimple(&SquareMatrix::identity(z, 2)),
            Err(MatError::NotAField)
        );
        // powers beyond the size are semisimple
        let mut rng = rng_from_seed(13);
        for _ in 0..50 {
            let a = SquareMatrix::random(&f2, 2, &mut rng);
            assert!(is_semisimple(&a.pow(4)).unwrap());
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let f2 = FieldSpec::make(2, 1).unwrap();
        let a = SquareMatrix::from_ints(&f2, &[&[0, 1], &[1, 1]]);
        let json = a.to_json();
        assert_eq!(
            json,
            serde_json::json!({"n": 2, "field": "F2", "rows": [["0","1"],["1","1"]]})
        );
        assert_eq!(SquareMatrix::from_json(&json).unwrap(), a);
    }
}
