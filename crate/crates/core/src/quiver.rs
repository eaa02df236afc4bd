//! Labeled, glued DAGs and their realizations as Wedderburn block-form
//! algebras.
//!
//! A [`QuiverSpec`] is a directed acyclic graph without double edges whose
//! vertices carry a matrix degree `n_i` and a field exponent `t_i` (the
//! vertex's block is `n_i x n_i` over `GF(q^{t_i})`). Vertices and edges are
//! partitioned into gluing classes: glued diagonal blocks hold identical
//! entries up to a per-vertex Frobenius twist, and glued edges hold identical
//! coefficients up to a Frobenius twist or a proportionality factor.
//!
//! [`realize`] builds the corresponding subalgebra of `M_N(K)` over the
//! common field `K = GF(q^L)`, `L = lcm(t_i)`: a semisimple basis of glued
//! diagonal matrix units and a radical basis of glued off-diagonal slots,
//! closed under multiplication, together with the nilpotence index of the
//! radical.
//!
//! Degree vectors of paths are ordered by the counts of each matrix degree
//! after discarding glue duplicates, largest degree first. Reduction steps
//! (gluing, degree lowering, twist shrinking, dropping isolated vertices)
//! strictly decrease the composite measure returned by [`reduction_measure`],
//! which is the engine of the termination arguments; the [`fuzz`] helpers
//! generate random quivers and legal reduction chains to exercise it.

use crate::coeffring::{is_prime, CoeffError, FieldScalar, FieldSpec, SpecScalars};
use crate::matalg::{MatError, SquareMatrix};
use crate::seeding::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("quiver is invalid: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("realization too large: {0}")]
    TooLarge(String),
    #[error("quiver carries symbolic linear relations; realization is not defined")]
    HasRelations,
    #[error("vertex sequence is not a directed path")]
    NotAPath,
    #[error("illegal reduction step: {0}")]
    InvalidStep(String),
    #[error("cannot parse {text:?} as {what}")]
    Parse { text: String, what: &'static str },
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

pub const MAX_AMBIENT: usize = 12;
pub const MAX_REALIZATION_FIELD: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseField {
    pub p: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    pub n: u32,
    pub t: u32,
    pub glue: String,
    #[serde(default)]
    pub twist: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GlueKind {
    Identical,
    Frobenius { e: u32 },
    Proportional { factor: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub glue: String,
    #[serde(flatten)]
    pub kind: GlueKind,
}

/// An abstract glued quiver over `F_q`, `q = p^s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub base: BaseField,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    /// Symbolic linear relations among vertices; tracked for bookkeeping
    /// only and rejected by realization.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

fn violation(element: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation {
        element: element.into(),
        message: message.into(),
    }
}

impl QuiverSpec {
    pub fn from_json_str(text: &str) -> Result<QuiverSpec, QuiverError> {
        serde_json::from_str(text).map_err(|e| QuiverError::Parse {
            text: e.to_string(),
            what: "quiver JSON",
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("quiver serializes")
    }

    pub fn vertex(&self, id: &str) -> Option<&VertexSpec> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_between(&self, from: &str, to: &str) -> Option<&EdgeSpec> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    /// `s` with `q = p^s`, when the base is consistent.
    pub fn base_exponent(&self) -> Option<u32> {
        let (p, mut q) = (self.base.p, self.base.q);
        if p < 2 || q < 2 {
            return None;
        }
        let mut s = 0;
        while q > 1 {
            if q % p != 0 {
                return None;
            }
            q /= p;
            s += 1;
        }
        Some(s)
    }

    /// Vertex glue classes in order of first appearance: (class id, member
    /// vertex indices).
    pub fn vertex_classes(&self) -> Vec<(String, Vec<usize>)> {
        let mut order: Vec<String> = Vec::new();
        let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !members.contains_key(&v.glue) {
                order.push(v.glue.clone());
            }
            members.entry(v.glue.clone()).or_default().push(i);
        }
        order
            .into_iter()
            .map(|id| {
                let m = members[&id].clone();
                (id, m)
            })
            .collect()
    }

    /// Edge glue classes in order of first appearance.
    pub fn edge_classes(&self) -> Vec<(String, Vec<usize>)> {
        let mut order: Vec<String> = Vec::new();
        let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !members.contains_key(&e.glue) {
                order.push(e.glue.clone());
            }
            members.entry(e.glue.clone()).or_default().push(i);
        }
        order
            .into_iter()
            .map(|id| {
                let m = members[&id].clone();
                (id, m)
            })
            .collect()
    }

    /// All maximal directed paths (in-degree-0 start, out-degree-0 end), as
    /// vertex index sequences.
    pub fn maximal_paths(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            let (Some(a), Some(b)) = (self.vertex_index(&e.from), self.vertex_index(&e.to)) else {
                continue;
            };
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut paths = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn dfs(
            v: usize,
            succ: &[Vec<usize>],
            stack: &mut Vec<usize>,
            paths: &mut Vec<Vec<usize>>,
        ) {
            stack.push(v);
            if succ[v].is_empty() {
                paths.push(stack.clone());
            } else {
                for &w in &succ[v] {
                    dfs(w, succ, stack, paths);
                }
            }
            stack.pop();
        }
        for v in 0..n {
            if indeg[v] == 0 {
                dfs(v, &succ, &mut stack, &mut paths);
            }
        }
        paths
    }
}

/// Check every structural invariant; the returned list is empty exactly when
/// the spec is valid.
pub fn validate(spec: &QuiverSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.base.p < 2 || !is_prime(spec.base.p) {
        out.push(violation("base", format!("p = {} is not prime", spec.base.p)));
    } else if spec.base_exponent().is_none() {
        out.push(violation(
            "base",
            format!("q = {} is not a power of p = {}", spec.base.q, spec.base.p),
        ));
    }
    let mut seen_ids = BTreeSet::new();
    for v in &spec.vertices {
        if !seen_ids.insert(&v.id) {
            out.push(violation(&v.id, "duplicate vertex id"));
        }
        if v.n == 0 {
            out.push(violation(&v.id, "matrix degree must be positive"));
        }
        if v.t == 0 {
            out.push(violation(&v.id, "field exponent must be positive"));
        }
        if v.t > 0 && v.twist >= v.t {
            out.push(violation(
                &v.id,
                format!("twist {} must be less than the field exponent {}", v.twist, v.t),
            ));
        }
    }
    // glued vertices share labels
    for (class, members) in spec.vertex_classes() {
        let first = &spec.vertices[members[0]];
        for &m in &members[1..] {
            let v = &spec.vertices[m];
            if v.n != first.n || v.t != first.t {
                out.push(violation(
                    &v.id,
                    format!("glue class {class:?} mixes labels ({},{}) and ({},{})",
                        first.n, first.t, v.n, v.t),
                ));
            }
        }
    }
    let mut seen_pairs = BTreeSet::new();
    for (i, e) in spec.edges.iter().enumerate() {
        let name = format!("edge#{i} {}->{}", e.from, e.to);
        let (from, to) = (spec.vertex_index(&e.from), spec.vertex_index(&e.to));
        if from.is_none() || to.is_none() {
            out.push(violation(&name, "edge endpoint does not exist"));
            continue;
        }
        if e.from == e.to {
            out.push(violation(&name, "edge endpoints must be distinct"));
        }
        if !seen_pairs.insert((e.from.clone(), e.to.clone())) {
            out.push(violation(&name, "double edge"));
        }
    }
    // edge glue classes relate edges whose endpoint classes match positionally
    for (class, members) in spec.edge_classes() {
        let glue_of = |idx: usize| -> Option<(String, String)> {
            let e = &spec.edges[idx];
            Some((
                spec.vertex(&e.from)?.glue.clone(),
                spec.vertex(&e.to)?.glue.clone(),
            ))
        };
        let Some(first) = glue_of(members[0]) else { continue };
        for &m in &members[1..] {
            if glue_of(m) != Some(first.clone()) {
                out.push(violation(
                    format!("edge#{m}"),
                    format!("edge glue class {class:?} mixes endpoint classes"),
                ));
            }
        }
    }
    // acyclicity
    let n = spec.vertices.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &spec.edges {
        if let (Some(a), Some(b)) = (spec.vertex_index(&e.from), spec.vertex_index(&e.to)) {
            succ[a].push(b);
        }
    }
    let mut state = vec![0u8; n]; // 0 unvisited, 1 active, 2 done
    fn has_cycle(v: usize, succ: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &succ[v] {
            if state[w] == 1 || (state[w] == 0 && has_cycle(w, succ, state)) {
                return true;
            }
        }
        state[v] = 2;
        false
    }
    for v in 0..n {
        if state[v] == 0 && has_cycle(v, &succ, &mut state) {
            out.push(violation("graph", "directed cycle detected"));
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// realization
// ---------------------------------------------------------------------------

/// F_p-echelon over flattened matrix coordinates, used for F_q-span
/// bookkeeping (a vector is in the F_q-span of a set iff it is in the
/// F_p-span of the set's F_q-multiples).
struct FpEchelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl FpEchelon {
    fn new(p: u64) -> FpEchelon {
        FpEchelon { p, rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [u64]) {
        for (lead, row) in &self.rows {
            if v[*lead] == 0 {
                continue;
            }
            let factor = v[*lead];
            for (i, &r) in row.iter().enumerate() {
                if r != 0 {
                    v[i] = (v[i] + self.p - (factor * r) % self.p) % self.p;
                }
            }
        }
    }

    /// Insert (after reduction); returns true when the vector was
    /// independent of the current span.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(lead) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        // normalize the leading coefficient to 1
        let inv = mod_inv(v[lead], self.p);
        for c in v.iter_mut() {
            *c = (*c * inv) % self.p;
        }
        self.rows.push((lead, v));
        self.rows.sort_by_key(|(l, _)| *l);
        true
    }

    fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&c| c == 0)
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime, a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn scalar_coords(a: &FieldScalar, m: usize, p: u64) -> Vec<u64> {
    let mut idx = a.index().expect("field scalar");
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn matrix_coords(mat: &SquareMatrix, m: usize, p: u64) -> Vec<u64> {
    let n = mat.size();
    let mut out = Vec::with_capacity(n * n * m);
    for i in 0..n {
        for j in 0..n {
            out.extend(scalar_coords(mat.get(i, j), m, p));
        }
    }
    out
}

fn matrix_from_coords(
    spec: &Arc<FieldSpec>,
    n: usize,
    m: usize,
    p: u64,
    coords: &[u64],
) -> SquareMatrix {
    let mut mat = SquareMatrix::zero(spec.clone(), n);
    for i in 0..n {
        for j in 0..n {
            let off = (i * n + j) * m;
            let mut idx = 0u64;
            for k in (0..m).rev() {
                idx = idx * p + coords[off + k];
            }
            mat.set(i, j, spec.scalar_from_index(idx));
        }
    }
    mat
}

/// Elements of `K` fixed by `x -> x^order`: the subfield of that order.
fn subfield_elements(k_spec: &Arc<FieldSpec>, order: u64) -> Vec<FieldScalar> {
    k_spec
        .elements()
        .into_iter()
        .filter(|a| a.pow(order) == *a)
        .collect()
}

/// A basis of the subfield `GF(q^t)` of `K` as a vector space over `F_q`.
fn subfield_basis_over_fq(
    k_spec: &Arc<FieldSpec>,
    q: u64,
    s: u32,
    t: u32,
    fq_fp_basis: &[FieldScalar],
) -> Vec<FieldScalar> {
    let p = k_spec.characteristic();
    let m = k_spec.extension_degree() as usize;
    if t == 1 {
        return vec![k_spec.one()];
    }
    if s == 1 && t == k_spec.extension_degree() {
        // the polynomial basis of K is an F_p basis
        let g = k_spec.generator().expect("extension field");
        return (0..t as u64).map(|e| g.pow(e)).collect();
    }
    let sub_order = q.pow(t);
    let candidates = subfield_elements(k_spec, sub_order);
    let mut span = FpEchelon::new(p);
    let mut basis = Vec::new();
    for e in candidates {
        if e.is_zero() {
            continue;
        }
        if !span.contains(&scalar_coords(&e, m, p)) {
            for u in fq_fp_basis {
                span.insert(scalar_coords(&e.mul(u), m, p));
            }
            basis.push(e);
        }
        if basis.len() == t as usize {
            break;
        }
    }
    basis
}

/// A realized Wedderburn block-form algebra: semisimple basis along the
/// block diagonal, radical basis strictly above it (closed under
/// multiplication), over the common realization field `K`.
#[derive(Debug, Clone)]
pub struct BlockAlgebra {
    pub quiver: QuiverSpec,
    /// The realization field `K = GF(q^L)`.
    pub field: Arc<FieldSpec>,
    pub base_q: u64,
    pub base_s: u32,
    pub ambient: usize,
    pub semisimple: Vec<SquareMatrix>,
    pub radical: Vec<SquareMatrix>,
    /// (vertex id, first diagonal index, block size)
    pub layout: Vec<(String, usize, usize)>,
    pub nilpotence_index: usize,
    /// Elements of the coefficient subfield `F_q` inside `K`, enumeration
    /// order; spans of the bases are taken over these.
    fq_elements: Vec<FieldScalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureKind {
    Semisimple,
    Radical,
}

impl BlockAlgebra {
    /// The vertex index owning a given ambient row/column.
    pub fn block_of(&self, index: usize) -> usize {
        self.layout
            .iter()
            .position(|(_, start, len)| (*start..start + len).contains(&index))
            .expect("index inside the ambient range")
    }

    pub fn fq_elements(&self) -> &[FieldScalar] {
        &self.fq_elements
    }

    pub fn basis(&self, kind: PureKind) -> &[SquareMatrix] {
        match kind {
            PureKind::Semisimple => &self.semisimple,
            PureKind::Radical => &self.radical,
        }
    }

    /// Every basis element, semisimple first.
    pub fn full_basis(&self) -> Vec<SquareMatrix> {
        let mut v = self.semisimple.clone();
        v.extend(self.radical.iter().cloned());
        v
    }

    pub fn span_size(&self, basis_len: usize) -> u128 {
        (self.base_q as u128).pow(basis_len as u32)
    }

    /// Number of elements of the whole algebra (the F_q-span of all basis
    /// elements).
    pub fn algebra_size(&self) -> u128 {
        self.span_size(self.semisimple.len() + self.radical.len())
    }

    /// The span element at a mixed-radix index: digit `i` (base `q`,
    /// enumeration order of `F_q`) scales basis element `i`.
    pub fn span_element(&self, basis: &[SquareMatrix], mut index: u128) -> SquareMatrix {
        let q = self.base_q as u128;
        let mut acc = SquareMatrix::zero(self.field.clone(), self.ambient);
        for b in basis {
            let digit = (index % q) as u64;
            index /= q;
            if digit != 0 {
                let c = &self.fq_elements[digit as usize];
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    /// Enumerate a span: exhaustive in index order when it fits the budget,
    /// otherwise `budget` seeded uniform samples. Deterministic either way.
    pub fn enumerate_span(
        &self,
        basis: &[SquareMatrix],
        budget: u64,
        seed: u64,
    ) -> Vec<SquareMatrix> {
        let total = self.span_size(basis.len());
        if total <= budget as u128 {
            (0..total).map(|i| self.span_element(basis, i)).collect()
        } else {
            let mut rng = rng_from_seed(seed);
            (0..budget)
                .map(|_| self.span_element(basis, rng.gen_range(0..total)))
                .collect()
        }
    }

    /// Enumerate the pure elements of one kind.
    pub fn enumerate_pure(&self, kind: PureKind, budget: u64, seed: u64) -> Vec<SquareMatrix> {
        self.enumerate_span(self.basis(kind), budget, seed)
    }
}

/// Build the block-form algebra of a valid quiver over `K = GF(q^L)`.
pub fn realize(spec: &QuiverSpec) -> Result<BlockAlgebra, QuiverError> {
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(QuiverError::Invalid(violations));
    }
    if !spec.relations.is_empty() {
        return Err(QuiverError::HasRelations);
    }
    let p = spec.base.p;
    let s = spec.base_exponent().expect("validated");
    let q = spec.base.q;
    let ambient: usize = spec.vertices.iter().map(|v| v.n as usize).sum();
    if ambient == 0 || ambient > MAX_AMBIENT {
        return Err(QuiverError::TooLarge(format!(
            "ambient size {ambient} exceeds {MAX_AMBIENT}"
        )));
    }
    let l = spec
        .vertices
        .iter()
        .map(|v| v.t as u64)
        .fold(1u64, num_integer::lcm);
    let field_order = (q as u128).pow(l as u32);
    if field_order > MAX_REALIZATION_FIELD as u128 {
        return Err(QuiverError::TooLarge(format!(
            "realization field of order q^L = {field_order} exceeds {MAX_REALIZATION_FIELD}"
        )));
    }
    let k_spec = FieldSpec::make(p, s * l as u32)?;
    let m = k_spec.extension_degree() as usize;
    // layout
    let mut layout = Vec::new();
    let mut cursor = 0usize;
    for v in &spec.vertices {
        layout.push((v.id.clone(), cursor, v.n as usize));
        cursor += v.n as usize;
    }
    let start_of = |idx: usize| layout[idx].1;

    // the F_q subfield of K and its F_p basis
    let fq_elements = if s == 1 && m == 1 {
        k_spec.elements()
    } else {
        subfield_elements(&k_spec, q)
    };
    let fq_fp_basis: Vec<FieldScalar> = if s == 1 {
        vec![k_spec.one()]
    } else {
        let mut span = FpEchelon::new(p);
        let mut basis = Vec::new();
        for e in &fq_elements {
            if !e.is_zero() && span.insert(scalar_coords(e, m, p)) {
                basis.push(e.clone());
            }
        }
        basis
    };

    // semisimple basis: glued diagonal matrix units over subfield bases
    let mut semisimple = Vec::new();
    for (_, members) in spec.vertex_classes() {
        let rep = &spec.vertices[members[0]];
        let basis_t = subfield_basis_over_fq(&k_spec, q, s, rep.t, &fq_fp_basis);
        for u in 0..rep.n as usize {
            for v in 0..rep.n as usize {
                for b in &basis_t {
                    let mut mat = SquareMatrix::zero(k_spec.clone(), ambient);
                    for &mi in &members {
                        let vert = &spec.vertices[mi];
                        let entry = b
                            .frobenius(s * vert.twist)
                            .expect("positive characteristic");
                        let off = start_of(mi);
                        mat.set(off + u, off + v, entry);
                    }
                    semisimple.push(mat);
                }
            }
        }
    }

    // initial radical basis: glued off-diagonal slots over a K-basis
    let basis_k = subfield_basis_over_fq(&k_spec, q, s, l as u32, &fq_fp_basis);
    let mut radical_seed = Vec::new();
    for (_, members) in spec.edge_classes() {
        let rep = &spec.edges[members[0]];
        let from_idx = spec.vertex_index(&rep.from).expect("validated");
        let to_idx = spec.vertex_index(&rep.to).expect("validated");
        let n_from = spec.vertices[from_idx].n as usize;
        let n_to = spec.vertices[to_idx].n as usize;
        for u in 0..n_from {
            for v in 0..n_to {
                for b in &basis_k {
                    let mut mat = SquareMatrix::zero(k_spec.clone(), ambient);
                    for &ei in &members {
                        let e = &spec.edges[ei];
                        let coeff = match &e.kind {
                            GlueKind::Identical => b.clone(),
                            GlueKind::Frobenius { e } => {
                                b.frobenius(s * *e).expect("positive characteristic")
                            }
                            GlueKind::Proportional { factor } => {
                                let f = k_spec.parse_scalar(factor)?;
                                f.mul(b)
                            }
                        };
                        let fi = spec.vertex_index(&e.from).expect("validated");
                        let ti = spec.vertex_index(&e.to).expect("validated");
                        mat.set(start_of(fi) + u, start_of(ti) + v, coeff);
                    }
                    radical_seed.push(mat);
                }
            }
        }
    }

    // close the radical span under products with the semisimple part and
    // itself, keeping a canonical reduced basis
    let mut span = FpEchelon::new(p);
    let mut radical: Vec<SquareMatrix> = Vec::new();
    let mut queue: Vec<SquareMatrix> = Vec::new();
    let absorb = |mat: &SquareMatrix,
                      span: &mut FpEchelon,
                      radical: &mut Vec<SquareMatrix>,
                      queue: &mut Vec<SquareMatrix>| {
        if mat.is_zero() {
            return;
        }
        let coords = matrix_coords(mat, m, p);
        if span.contains(&coords) {
            return;
        }
        let mut reduced = coords;
        span.reduce(&mut reduced);
        let lead = reduced.iter().position(|&c| c != 0).expect("independent");
        let inv = mod_inv(reduced[lead], p);
        for c in reduced.iter_mut() {
            *c = (*c * inv) % p;
        }
        let canon = matrix_from_coords(&k_spec, ambient, m, p, &reduced);
        for u in &fq_fp_basis {
            span.insert(matrix_coords(&canon.scale(u), m, p));
        }
        radical.push(canon.clone());
        queue.push(canon);
    };
    for mat in &radical_seed {
        absorb(mat, &mut span, &mut radical, &mut queue);
    }
    while let Some(x) = queue.pop() {
        let mut products = Vec::new();
        for s_mat in &semisimple {
            products.push(x.mul(s_mat));
            products.push(s_mat.mul(&x));
        }
        for y in &radical {
            products.push(x.mul(y));
            products.push(y.mul(&x));
        }
        for prod in products {
            absorb(&prod, &mut span, &mut radical, &mut queue);
        }
    }

    // nilpotence index: smallest k with all k-fold radical products zero
    let nilpotence_index = if radical.is_empty() {
        1
    } else {
        let mut level: Vec<SquareMatrix> = radical.clone();
        let mut k = 1usize;
        while !level.is_empty() {
            let mut next = Vec::new();
            let mut next_span = FpEchelon::new(p);
            for a in &level {
                for b in &radical {
                    let prod = a.mul(b);
                    if !prod.is_zero() && next_span.insert(matrix_coords(&prod, m, p)) {
                        next.push(prod);
                    }
                }
            }
            level = next;
            k += 1;
        }
        k
    };

    Ok(BlockAlgebra {
        quiver: spec.clone(),
        field: k_spec,
        base_q: q,
        base_s: s,
        ambient,
        semisimple,
        radical,
        layout,
        nilpotence_index,
        fq_elements,
    })
}

// ---------------------------------------------------------------------------
// degree vectors
// ---------------------------------------------------------------------------

/// The matrix degrees along a path together with the partition of positions
/// induced by vertex gluing (equal labels = glued positions).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub entries: Vec<u32>,
    pub glue_labels: Vec<usize>,
}

impl DegreeVector {
    /// Counts of each degree after discarding glue duplicates.
    fn degree_counts(&self) -> BTreeMap<u32, usize> {
        let mut seen_labels = BTreeSet::new();
        let mut counts = BTreeMap::new();
        for (i, &d) in self.entries.iter().enumerate() {
            if seen_labels.insert(self.glue_labels[i]) {
                *counts.entry(d).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Text form: entries comma-joined, then optional `|` and `=`-joined
    /// 1-based position groups separated by `;`, e.g. `3,2,2,3,2,3,3|4=6=7`.
    pub fn to_text(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in self.glue_labels.iter().enumerate() {
            groups.entry(l).or_default().push(i + 1);
        }
        let parts: Vec<String> = groups
            .values()
            .filter(|g| g.len() > 1)
            .map(|g| {
                g.iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("=")
            })
            .collect();
        if parts.is_empty() {
            entries
        } else {
            format!("{entries}|{}", parts.join(";"))
        }
    }

    pub fn parse(text: &str) -> Result<DegreeVector, QuiverError> {
        let err = || QuiverError::Parse {
            text: text.to_string(),
            what: "degree vector",
        };
        let (entry_part, glue_part) = match text.split_once('|') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let entries: Vec<u32> = entry_part
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        let mut glue_labels: Vec<usize> = (0..entries.len()).collect();
        if let Some(glue) = glue_part {
            for group in glue.split(';') {
                let positions: Vec<usize> = group
                    .split('=')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| err()))
                    .collect::<Result<_, _>>()?;
                let Some(&first) = positions.first() else { continue };
                for &pos in &positions {
                    if pos == 0 || pos > entries.len() {
                        return Err(err());
                    }
                    glue_labels[pos - 1] = first - 1;
                }
            }
        }
        Ok(DegreeVector {
            entries,
            glue_labels,
        })
    }
}

/// Order degree vectors by the counts of each matrix degree (glue
/// duplicates discarded), compared from the largest degree downward.
pub fn compare_degree_vectors(a: &DegreeVector, b: &DegreeVector) -> Ordering {
    let ca = a.degree_counts();
    let cb = b.degree_counts();
    let kmax = ca
        .keys()
        .chain(cb.keys())
        .copied()
        .max()
        .unwrap_or(0);
    for k in (1..=kmax).rev() {
        let da = ca.get(&k).copied().unwrap_or(0);
        let db = cb.get(&k).copied().unwrap_or(0);
        match da.cmp(&db) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// The degree vector of a directed path given by vertex ids.
pub fn path_degree_vector(
    spec: &QuiverSpec,
    path: &[String],
) -> Result<DegreeVector, QuiverError> {
    if path.is_empty() {
        return Err(QuiverError::NotAPath);
    }
    for pair in path.windows(2) {
        if spec.edge_between(&pair[0], &pair[1]).is_none() {
            return Err(QuiverError::NotAPath);
        }
    }
    let mut entries = Vec::with_capacity(path.len());
    let mut labels = Vec::with_capacity(path.len());
    let mut label_of: BTreeMap<String, usize> = BTreeMap::new();
    for id in path {
        let v = spec.vertex(id).ok_or(QuiverError::NotAPath)?;
        entries.push(v.n);
        let next = label_of.len();
        let label = *label_of.entry(v.glue.clone()).or_insert(next);
        labels.push(label);
    }
    Ok(DegreeVector {
        entries,
        glue_labels: labels,
    })
}

/// Degree vectors of all maximal paths (vertex-index form resolved to ids).
pub fn maximal_path_vectors(spec: &QuiverSpec) -> Vec<DegreeVector> {
    spec.maximal_paths()
        .into_iter()
        .map(|path| {
            let ids: Vec<String> = path
                .iter()
                .map(|&i| spec.vertices[i].id.clone())
                .collect();
            path_degree_vector(spec, &ids).expect("maximal path is a path")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// reductions and the termination measure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReductionStep {
    /// Merge the glue classes of two vertices with equal labels.
    GlueVertices { a: String, b: String },
    /// Merge the glue classes of two edges (by index) whose endpoint
    /// classes match positionally.
    GlueEdges { a: usize, b: usize },
    /// Record a symbolic linear relation among vertices.
    LinearRelation { description: String },
    /// Lower the matrix degree of a vertex's whole glue class.
    LowerMatrixDegree { vertex: String, new_n: u32 },
    /// Remove an isolated vertex.
    DropVertex { vertex: String },
    /// Shrink the field exponent of a vertex's whole glue class to a proper
    /// divisor.
    ShrinkTwist { vertex: String, new_t: u32 },
}

/// Apply one reduction step, checking legality and re-validating the result.
pub fn apply_reduction(
    spec: &QuiverSpec,
    step: &ReductionStep,
) -> Result<QuiverSpec, QuiverError> {
    let mut out = spec.clone();
    let bad = |msg: &str| QuiverError::InvalidStep(msg.to_string());
    match step {
        ReductionStep::GlueVertices { a, b } => {
            let (va, vb) = (
                spec.vertex(a).ok_or_else(|| bad("vertex a missing"))?,
                spec.vertex(b).ok_or_else(|| bad("vertex b missing"))?,
            );
            if va.glue == vb.glue {
                return Err(bad("vertices already glued"));
            }
            if (va.n, va.t) != (vb.n, vb.t) {
                return Err(bad("glued vertices must share labels"));
            }
            let (target, source) = (va.glue.clone(), vb.glue.clone());
            for v in &mut out.vertices {
                if v.glue == source {
                    v.glue = target.clone();
                }
            }
        }
        ReductionStep::GlueEdges { a, b } => {
            if *a >= spec.edges.len() || *b >= spec.edges.len() || a == b {
                return Err(bad("edge index out of range"));
            }
            let (ea, eb) = (&spec.edges[*a], &spec.edges[*b]);
            if ea.glue == eb.glue {
                return Err(bad("edges already glued"));
            }
            let classes = |e: &EdgeSpec| -> Option<(String, String)> {
                Some((
                    spec.vertex(&e.from)?.glue.clone(),
                    spec.vertex(&e.to)?.glue.clone(),
                ))
            };
            if classes(ea) != classes(eb) || classes(ea).is_none() {
                return Err(bad("edge endpoint classes do not match"));
            }
            let (target, source) = (ea.glue.clone(), eb.glue.clone());
            for e in &mut out.edges {
                if e.glue == source {
                    e.glue = target.clone();
                }
            }
        }
        ReductionStep::LinearRelation { description } => {
            out.relations.push(description.clone());
        }
        ReductionStep::LowerMatrixDegree { vertex, new_n } => {
            let v = spec.vertex(vertex).ok_or_else(|| bad("vertex missing"))?;
            if *new_n == 0 || *new_n >= v.n {
                return Err(bad("new degree must be positive and smaller"));
            }
            let class = v.glue.clone();
            for v in &mut out.vertices {
                if v.glue == class {
                    v.n = *new_n;
                }
            }
        }
        ReductionStep::DropVertex { vertex } => {
            let _ = spec.vertex(vertex).ok_or_else(|| bad("vertex missing"))?;
            let touched = spec
                .edges
                .iter()
                .any(|e| &e.from == vertex || &e.to == vertex);
            if touched {
                return Err(bad("only isolated vertices can be dropped"));
            }
            out.vertices.retain(|v| &v.id != vertex);
        }
        ReductionStep::ShrinkTwist { vertex, new_t } => {
            let v = spec.vertex(vertex).ok_or_else(|| bad("vertex missing"))?;
            if *new_t == 0 || *new_t >= v.t || v.t % *new_t != 0 {
                return Err(bad("new exponent must be a proper divisor"));
            }
            let class = v.glue.clone();
            for v in &mut out.vertices {
                if v.glue == class {
                    v.t = *new_t;
                    v.twist %= *new_t;
                }
            }
        }
    }
    let violations = validate(&out);
    if !violations.is_empty() {
        return Err(QuiverError::Invalid(violations));
    }
    Ok(out)
}

/// The composite well-founded measure `(M1, M2, M3, M4)`:
/// maximal-path degree vectors (sorted descending, compared
/// lexicographically), vertex classes + vertices, edge classes + edges, and
/// the total field exponent over class representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub path_vectors: Vec<DegreeVector>,
    pub vertex_weight: usize,
    pub edge_weight: usize,
    pub twist_weight: u64,
}

pub fn reduction_measure(spec: &QuiverSpec) -> Measure {
    let mut vectors = maximal_path_vectors(spec);
    vectors.sort_by(|a, b| compare_degree_vectors(b, a));
    let vertex_weight = spec.vertex_classes().len() + spec.vertices.len();
    let edge_weight = spec.edge_classes().len() + spec.edges.len();
    let twist_weight = spec
        .vertex_classes()
        .iter()
        .map(|(_, members)| spec.vertices[members[0]].t as u64)
        .sum();
    Measure {
        path_vectors: vectors,
        vertex_weight,
        edge_weight,
        twist_weight,
    }
}

impl Measure {
    pub fn cmp(&self, other: &Measure) -> Ordering {
        let len = self.path_vectors.len().min(other.path_vectors.len());
        for i in 0..len {
            match compare_degree_vectors(&self.path_vectors[i], &other.path_vectors[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.path_vectors
            .len()
            .cmp(&other.path_vectors.len())
            .then(self.vertex_weight.cmp(&other.vertex_weight))
            .then(self.edge_weight.cmp(&other.edge_weight))
            .then(self.twist_weight.cmp(&other.twist_weight))
    }

    /// A scalar summary used for chain-length sanity bounds.
    pub fn weight_sum(&self) -> u64 {
        let path_part: u64 = self
            .path_vectors
            .iter()
            .map(|v| v.entries.iter().map(|&d| d as u64).sum::<u64>())
            .sum();
        path_part + self.vertex_weight as u64 + self.edge_weight as u64 + self.twist_weight
    }
}

// ---------------------------------------------------------------------------
// fuzzing support
// ---------------------------------------------------------------------------

pub mod fuzz {
    //! Seeded random quivers and random legal reduction chains.

    use super::*;

    /// A random valid quiver with at most `max_vertices` vertices.
    pub fn random_quiver<R: Rng>(rng: &mut R, max_vertices: usize) -> QuiverSpec {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let q = p; // prime base keeps realizations cheap
        let nv = rng.gen_range(1..=max_vertices.max(1));
        let mut vertices = Vec::new();
        for i in 0..nv {
            let n = rng.gen_range(1..=3u32);
            let t = [1u32, 2, 4][rng.gen_range(0..3)];
            vertices.push(VertexSpec {
                id: format!("v{}", i + 1),
                n,
                t,
                glue: format!("c{}", i + 1),
                twist: 0,
            });
        }
        // randomly glue some pairs with equal labels
        for i in 0..nv {
            for j in i + 1..nv {
                if vertices[i].n == vertices[j].n
                    && vertices[i].t == vertices[j].t
                    && rng.gen_bool(0.25)
                {
                    let target = vertices[i].glue.clone();
                    let source = vertices[j].glue.clone();
                    for v in &mut vertices {
                        if v.glue == source {
                            v.glue = target.clone();
                        }
                    }
                }
            }
        }
        // a twist inside a class is legal when t > 1
        for v in &mut vertices {
            if v.t > 1 && rng.gen_bool(0.3) {
                v.twist = rng.gen_range(0..v.t);
            }
        }
        let mut edges = Vec::new();
        let mut counter = 0usize;
        for i in 0..nv {
            for j in i + 1..nv {
                if rng.gen_bool(0.4) {
                    counter += 1;
                    edges.push(EdgeSpec {
                        from: format!("v{}", i + 1),
                        to: format!("v{}", j + 1),
                        glue: format!("e{counter}"),
                        kind: GlueKind::Identical,
                    });
                }
            }
        }
        let spec = QuiverSpec {
            base: BaseField { p, q },
            vertices,
            edges,
            relations: Vec::new(),
        };
        debug_assert!(validate(&spec).is_empty());
        spec
    }

    /// Every measure-tracked legal step from this spec.
    pub fn legal_steps(spec: &QuiverSpec) -> Vec<ReductionStep> {
        let mut steps = Vec::new();
        for (i, a) in spec.vertices.iter().enumerate() {
            for b in spec.vertices.iter().skip(i + 1) {
                if a.glue != b.glue && (a.n, a.t) == (b.n, b.t) {
                    steps.push(ReductionStep::GlueVertices {
                        a: a.id.clone(),
                        b: b.id.clone(),
                    });
                }
            }
        }
        for (i, ea) in spec.edges.iter().enumerate() {
            for (j, eb) in spec.edges.iter().enumerate().skip(i + 1) {
                if ea.glue == eb.glue {
                    continue;
                }
                let classes = |e: &EdgeSpec| -> Option<(String, String)> {
                    Some((
                        spec.vertex(&e.from)?.glue.clone(),
                        spec.vertex(&e.to)?.glue.clone(),
                    ))
                };
                if classes(ea).is_some() && classes(ea) == classes(eb) {
                    steps.push(ReductionStep::GlueEdges { a: i, b: j });
                }
            }
        }
        for v in &spec.vertices {
            if v.n > 1 {
                steps.push(ReductionStep::LowerMatrixDegree {
                    vertex: v.id.clone(),
                    new_n: v.n - 1,
                });
            }
            let isolated = !spec
                .edges
                .iter()
                .any(|e| e.from == v.id || e.to == v.id);
            if isolated {
                steps.push(ReductionStep::DropVertex {
                    vertex: v.id.clone(),
                });
            }
            for d in 1..v.t {
                if v.t % d == 0 {
                    steps.push(ReductionStep::ShrinkTwist {
                        vertex: v.id.clone(),
                        new_t: d,
                    });
                }
            }
        }
        steps
    }

    /// Run a random legal chain, checking that every step strictly decreases
    /// the measure. Returns the number of steps taken.
    pub fn run_random_chain<R: Rng>(
        spec: &QuiverSpec,
        rng: &mut R,
        max_steps: usize,
    ) -> Result<usize, QuiverError> {
        let mut cur = spec.clone();
        let mut measure = reduction_measure(&cur);
        for taken in 0..max_steps {
            let steps = legal_steps(&cur);
            if steps.is_empty() {
                return Ok(taken);
            }
            let step = &steps[rng.gen_range(0..steps.len())];
            let next = apply_reduction(&cur, step)?;
            let next_measure = reduction_measure(&next);
            if next_measure.cmp(&measure) != Ordering::Less {
                return Err(QuiverError::InvalidStep(format!(
                    "measure did not decrease at {step:?}"
                )));
            }
            cur = next;
            measure = next_measure;
        }
        Err(QuiverError::InvalidStep(
            "chain exceeded the step bound".to_string(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_vertex(p: u64, n: u32, t: u32) -> QuiverSpec {
        QuiverSpec {
            base: BaseField { p, q: p },
            vertices: vec![VertexSpec {
                id: "v1".into(),
                n,
                t,
                glue: "I".into(),
                twist: 0,
            }],
            edges: vec![],
            relations: vec![],
        }
    }

    fn grassmann_quiver() -> QuiverSpec {
        let vert = |id: &str| VertexSpec {
            id: id.into(),
            n: 1,
            t: 1,
            glue: "I".into(),
            twist: 0,
        };
        QuiverSpec {
            base: BaseField { p: 3, q: 3 },
            vertices: vec![vert("v1"), vert("v2"), vert("v3"), vert("v4")],
            edges: vec![
                EdgeSpec {
                    from: "v1".into(),
                    to: "v2".into(),
                    glue: "a".into(),
                    kind: GlueKind::Identical,
                },
                EdgeSpec {
                    from: "v3".into(),
                    to: "v4".into(),
                    glue: "a".into(),
                    kind: GlueKind::Identical,
                },
                EdgeSpec {
                    from: "v1".into(),
                    to: "v3".into(),
                    glue: "b".into(),
                    kind: GlueKind::Identical,
                },
                EdgeSpec {
                    from: "v2".into(),
                    to: "v4".into(),
                    glue: "b".into(),
                    kind: GlueKind::Proportional {
                        factor: "-1".into(),
                    },
                },
            ],
            relations: vec![],
        }
    }

    #[test]
    fn validate_accepts_single_vertex() {
        assert!(validate(&single_vertex(2, 1, 1)).is_empty());
    }

    #[test]
    fn validate_rejects_cycles_and_glue_mismatches() {
        let mut spec = single_vertex(2, 1, 1);
        spec.vertices.push(VertexSpec {
            id: "v2".into(),
            n: 1,
            t: 1,
            glue: "J".into(),
            twist: 0,
        });
        spec.edges.push(EdgeSpec {
            from: "v1".into(),
            to: "v2".into(),
            glue: "a".into(),
            kind: GlueKind::Identical,
        });
        spec.edges.push(EdgeSpec {
            from: "v2".into(),
            to: "v1".into(),
            glue: "b".into(),
            kind: GlueKind::Identical,
        });
        let violations = validate(&spec);
        assert!(violations.iter().any(|v| v.message.contains("cycle")));

        let mut spec2 = single_vertex(2, 1, 1);
        spec2.vertices.push(VertexSpec {
            id: "v2".into(),
            n: 2,
            t: 1,
            glue: "I".into(),
            twist: 0,
        });
        let violations2 = validate(&spec2);
        assert!(violations2.iter().any(|v| v.message.contains("mixes labels")));
    }

    #[test]
    fn realize_single_vertex() {
        let alg = realize(&single_vertex(2, 1, 1)).unwrap();
        assert_eq!(alg.ambient, 1);
        assert_eq!(alg.semisimple.len(), 1);
        assert!(alg.radical.is_empty());
        assert_eq!(alg.nilpotence_index, 1);
    }

    #[test]
    fn realize_grassmann_quiver() {
        let alg = realize(&grassmann_quiver()).unwrap();
        assert_eq!(alg.ambient, 4);
        // S = { I_4 }
        assert_eq!(alg.semisimple.len(), 1);
        assert_eq!(
            alg.semisimple[0],
            SquareMatrix::identity(alg.field.clone(), 4)
        );
        // J basis: e12 + e34, e13 - e24, e14
        assert_eq!(alg.radical.len(), 3);
        let f3 = alg.field.clone();
        let a = SquareMatrix::unit(f3.clone(), 4, 0, 1)
            .add(&SquareMatrix::unit(f3.clone(), 4, 2, 3));
        let b = SquareMatrix::unit(f3.clone(), 4, 0, 2)
            .sub(&SquareMatrix::unit(f3.clone(), 4, 1, 3));
        let e = SquareMatrix::unit(f3.clone(), 4, 0, 3);
        for want in [&a, &b, &e] {
            assert!(
                alg.radical.contains(want),
                "missing radical element\n{want}"
            );
        }
        // products: AB = -E, BA = E, A^2 = B^2 = 0
        assert_eq!(a.mul(&b), e.neg());
        assert_eq!(b.mul(&a), e);
        assert!(a.mul(&a).is_zero());
        assert!(b.mul(&b).is_zero());
        assert_eq!(alg.nilpotence_index, 3);
    }

    #[test]
    fn realize_chain_quiver() {
        let mut spec = single_vertex(2, 1, 1);
        spec.vertices.push(VertexSpec {
            id: "v2".into(),
            n: 2,
            t: 1,
            glue: "II".into(),
            twist: 0,
        });
        spec.edges.push(EdgeSpec {
            from: "v1".into(),
            to: "v2".into(),
            glue: "a".into(),
            kind: GlueKind::Identical,
        });
        let alg = realize(&spec).unwrap();
        assert_eq!(alg.ambient, 3);
        assert_eq!(alg.semisimple.len(), 1 + 4);
        assert_eq!(alg.radical.len(), 2);
        assert_eq!(alg.nilpotence_index, 2);
    }

    #[test]
    fn radical_span_is_nilpotent_with_reported_index() {
        let alg = realize(&grassmann_quiver()).unwrap();
        let t = alg.nilpotence_index;
        // all t-fold products vanish, and some (t-1)-fold product does not
        let mut level = alg.radical.clone();
        for _ in 1..t {
            let mut next = Vec::new();
            for a in &level {
                for b in &alg.radical {
                    let prod = a.mul(b);
                    if !prod.is_zero() {
                        next.push(prod);
                    }
                }
            }
            level = next;
        }
        assert!(level.is_empty(), "J^{t} must vanish");
    }

    #[test]
    fn semisimple_products_stay_in_the_algebra() {
        let alg = realize(&grassmann_quiver()).unwrap();
        let p = alg.field.characteristic();
        let m = alg.field.extension_degree() as usize;
        let mut span = FpEchelon::new(p);
        for mat in alg.full_basis() {
            for u in alg.fq_elements() {
                if !u.is_zero() {
                    span.insert(matrix_coords(&mat.scale(u), m, p));
                }
            }
        }
        for a in &alg.semisimple {
            for b in &alg.semisimple {
                let prod = a.mul(b);
                if !prod.is_zero() {
                    assert!(span.contains(&matrix_coords(&prod, m, p)));
                }
            }
        }
    }

    #[test]
    fn degree_vector_ordering_examples() {
        // (3,1,3,3) unglued > (3,2,2,3,2,3,3) with positions 4,6,7 glued
        let a = DegreeVector::parse("3,1,3,3").unwrap();
        let b = DegreeVector::parse("3,2,2,3,2,3,3|4=6=7").unwrap();
        assert_eq!(compare_degree_vectors(&a, &b), Ordering::Greater);
        assert_eq!(compare_degree_vectors(&a, &a), Ordering::Equal);
        // (2) > (1,1,1)
        let c = DegreeVector::parse("2").unwrap();
        let d = DegreeVector::parse("1,1,1").unwrap();
        assert_eq!(compare_degree_vectors(&c, &d), Ordering::Greater);
    }

    #[test]
    fn degree_vector_text_round_trip() {
        for text in ["3,1,3,3", "3,2,2,3,2,3,3|4=6=7", "1", "2,2|1=2"] {
            let v = DegreeVector::parse(text).unwrap();
            assert_eq!(DegreeVector::parse(&v.to_text()).unwrap(), v);
        }
    }

    #[test]
    fn path_degree_vectors() {
        let g = grassmann_quiver();
        let path: Vec<String> = ["v1", "v2", "v4"].iter().map(|s| s.to_string()).collect();
        let dv = path_degree_vector(&g, &path).unwrap();
        assert_eq!(dv.entries, vec![1, 1, 1]);
        // all glued
        assert!(dv.glue_labels.iter().all(|&l| l == 0));
        let bad: Vec<String> = ["v2", "v3"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            path_degree_vector(&g, &bad),
            Err(QuiverError::NotAPath)
        ));
        // single-vertex path
        let single: Vec<String> = vec!["v1".into()];
        assert_eq!(path_degree_vector(&g, &single).unwrap().entries, vec![1]);
    }

    #[test]
    fn reductions_strictly_decrease_measure() {
        let mut rng = rng_from_seed(99);
        for _ in 0..60 {
            let spec = fuzz::random_quiver(&mut rng, 6);
            let measure = reduction_measure(&spec);
            for step in fuzz::legal_steps(&spec) {
                let next = apply_reduction(&spec, &step).unwrap();
                let next_measure = reduction_measure(&next);
                assert_eq!(
                    next_measure.cmp(&measure),
                    Ordering::Less,
                    "step {step:?} did not decrease the measure"
                );
            }
        }
    }

    #[test]
    fn random_chains_terminate() {
        let mut rng = rng_from_seed(7);
        for _ in 0..40 {
            let spec = fuzz::random_quiver(&mut rng, 6);
            let steps = fuzz::run_random_chain(&spec, &mut rng, 10_000).unwrap();
            assert!(steps < 10_000);
        }
    }

    #[test]
    fn enumerate_pure_examples() {
        let alg = realize(&grassmann_quiver()).unwrap();
        // semisimple span: the three scalar matrices
        let semis = alg.enumerate_pure(PureKind::Semisimple, 100, 0);
        assert_eq!(semis.len(), 3);
        // radical span: 3^3 = 27 elements
        let rads = alg.enumerate_pure(PureKind::Radical, 100, 0);
        assert_eq!(rads.len(), 27);
        // budget smaller than the span: seeded samples, reproducible
        let s1 = alg.enumerate_pure(PureKind::Radical, 10, 42);
        let s2 = alg.enumerate_pure(PureKind::Radical, 10, 42);
        assert_eq!(s1.len(), 10);
        assert_eq!(s1, s2);
    }

    #[test]
    fn quiver_json_round_trip() {
        let g = grassmann_quiver();
        let json = serde_json::to_string(&g).unwrap();
        let back = QuiverSpec::from_json_str(&json).unwrap();
        assert_eq!(back, g);
        // the documented shape parses
        let text = r#"{"base":{"p":3,"q":3},
            "vertices":[{"id":"v1","n":1,"t":1,"glue":"I","twist":0},
                        {"id":"v2","n":1,"t":1,"glue":"I","twist":0}],
            "edges":[{"from":"v1","to":"v2","glue":"a","kind":"identical"}]}"#;
        let spec = QuiverSpec::from_json_str(text).unwrap();
        assert!(validate(&spec).is_empty());
    }

    #[test]
    fn apply_reduction_examples() {
        let g = grassmann_quiver();
        // dropping a wired vertex is illegal
        assert!(matches!(
            apply_reduction(&g, &ReductionStep::DropVertex { vertex: "v1".into() }),
            Err(QuiverError::InvalidStep(_))
        ));
        // lower a matrix degree on a chain quiver
        let mut chain = single_vertex(2, 1, 1);
        chain.vertices.push(VertexSpec {
            id: "v2".into(),
            n: 2,
            t: 1,
            glue: "II".into(),
            twist: 0,
        });
        let lowered = apply_reduction(
            &chain,
            &ReductionStep::LowerMatrixDegree {
                vertex: "v2".into(),
                new_n: 1,
            },
        )
        .unwrap();
        assert_eq!(lowered.vertex("v2").unwrap().n, 1);
        // now the two vertices can be glued, and the class count drops
        let glued = apply_reduction(
            &lowered,
            &ReductionStep::GlueVertices {
                a: "v1".into(),
                b: "v2".into(),
            },
        )
        .unwrap();
        assert_eq!(glued.vertex_classes().len(), 1);
    }
}
