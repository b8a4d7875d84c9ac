//! Oriented ribbon hypergraphs as permutation pairs with labels.
//!
//! Edges are `0..k`. Vertices are the cycles of `sigma0`, hyperedges the
//! cycles of `sigma1`, boundaries the cycles of `sigma0⁻¹ ∘ sigma1`. Vertices
//! and boundaries are keyed by their minimal edge. Edgeless components (one
//! vertex, one boundary) are listed separately as units.

use crate::permcore::{sequence_sign, Perm, PermError};
use crate::scalar::{q_to_string, qser, LinComb, Q};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{0}")]
    Perm(#[from] PermError),
    #[error("sigma{0} has size {1}, expected {2}")]
    Size(u8, usize, usize),
    #[error("vertex labels do not match the cycles of sigma0: {0}")]
    VertexLabels(String),
    #[error("boundary labels do not match the cycles of sigma_inf: {0}")]
    BoundaryLabels(String),
    #[error("malformed orientation: {0}")]
    Orientation(String),
    #[error("a graph without edges must be a union of unit components")]
    Empty,
    #[error("mixed signatures: ({0},{1},{2}) vs ({3},{4},{5})")]
    MixedSignature(usize, usize, i32, usize, usize, i32),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("parity mismatch: d={0} vs d={1}")]
    Parity(i32, i32),
    #[error("unknown boundary {0}")]
    UnknownBoundary(usize),
    #[error("internal gluing error: {0}")]
    Gluing(String),
    #[error("bad graph json: {0}")]
    Json(String),
}

/// A labelled, oriented ribbon hypergraph with a rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    sigma0: Perm,
    sigma1: Perm,
    vertex_labels: BTreeMap<usize, usize>,
    boundary_labels: BTreeMap<usize, usize>,
    units: Vec<(usize, usize)>,
    d: i32,
    orientation: Vec<usize>,
    coeff: Q,
}

/// A corner of a vertex crossed by a boundary walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Corner {
    /// The gap after edge `after`, before `before = σ₀(after)`, at vertex `vertex`.
    Gap { vertex: usize, after: usize, before: usize },
    /// The whole circle of an edgeless vertex.
    Full { vertex: usize },
}

pub fn is_odd(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

fn check_labels(
    keys: &BTreeSet<usize>,
    labels: &BTreeMap<usize, usize>,
    unit_labels: &[usize],
) -> Result<usize, String> {
    let got: BTreeSet<usize> = labels.keys().copied().collect();
    if &got != keys {
        return Err(format!("expected keys {keys:?}, got {got:?}"));
    }
    let total = labels.len() + unit_labels.len();
    let mut all: Vec<usize> = labels.values().copied().chain(unit_labels.iter().copied()).collect();
    all.sort_unstable();
    if all != (0..total).collect::<Vec<_>>() {
        return Err(format!("labels {all:?} are not a bijection onto 0..{total}"));
    }
    Ok(total)
}

impl Hypergraph {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        k: usize,
        sigma0: Perm,
        sigma1: Perm,
        vertex_labels: BTreeMap<usize, usize>,
        boundary_labels: BTreeMap<usize, usize>,
        d: i32,
        orientation: Vec<usize>,
        coeff: Q,
    ) -> Result<Self, GraphError> {
        Self::build_with_units(k, sigma0, sigma1, vertex_labels, boundary_labels, Vec::new(), d, orientation, coeff)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn build_with_units(
        k: usize,
        sigma0: Perm,
        sigma1: Perm,
        vertex_labels: BTreeMap<usize, usize>,
        boundary_labels: BTreeMap<usize, usize>,
        mut units: Vec<(usize, usize)>,
        d: i32,
        orientation: Vec<usize>,
        coeff: Q,
    ) -> Result<Self, GraphError> {
        if sigma0.len() != k {
            return Err(GraphError::Size(0, sigma0.len(), k));
        }
        if sigma1.len() != k {
            return Err(GraphError::Size(1, sigma1.len(), k));
        }
        if k == 0 && units.is_empty() {
            return Err(GraphError::Empty);
        }
        units.sort_unstable();
        let g = Hypergraph { k, sigma0, sigma1, vertex_labels, boundary_labels, units, d, orientation, coeff };
        let vkeys: BTreeSet<usize> = g.sigma0.cycles().iter().map(|c| c[0]).collect();
        let uv: Vec<usize> = g.units.iter().map(|u| u.0).collect();
        check_labels(&vkeys, &g.vertex_labels, &uv).map_err(GraphError::VertexLabels)?;
        let bkeys: BTreeSet<usize> = g.sigma_inf().cycles().iter().map(|c| c[0]).collect();
        let ub: Vec<usize> = g.units.iter().map(|u| u.1).collect();
        check_labels(&bkeys, &g.boundary_labels, &ub).map_err(GraphError::BoundaryLabels)?;
        let mut want = g.carrier_keys();
        let mut got = g.orientation.clone();
        want.sort_unstable();
        got.sort_unstable();
        if want != got {
            return Err(GraphError::Orientation(format!("expected a total order of {want:?}, got {:?}", g.orientation)));
        }
        Ok(g)
    }

    /// The edgeless graph with one vertex and one boundary.
    pub fn unit(d: i32) -> Self {
        Hypergraph {
            k: 0,
            sigma0: Perm::identity(0),
            sigma1: Perm::identity(0),
            vertex_labels: BTreeMap::new(),
            boundary_labels: BTreeMap::new(),
            units: vec![(0, 0)],
            d,
            orientation: Vec::new(),
            coeff: Q::one(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.k
    }
    pub fn sigma0(&self) -> &Perm {
        &self.sigma0
    }
    pub fn sigma1(&self) -> &Perm {
        &self.sigma1
    }
    pub fn d(&self) -> i32 {
        self.d
    }
    pub fn coeff(&self) -> &Q {
        &self.coeff
    }
    pub fn orientation(&self) -> &[usize] {
        &self.orientation
    }
    pub fn units(&self) -> &[(usize, usize)] {
        &self.units
    }
    pub fn vertex_labels(&self) -> &BTreeMap<usize, usize> {
        &self.vertex_labels
    }
    pub fn boundary_labels(&self) -> &BTreeMap<usize, usize> {
        &self.boundary_labels
    }

    pub fn with_coeff(mut self, c: Q) -> Self {
        self.coeff = c;
        self
    }

    pub fn sigma_inf(&self) -> Perm {
        self.sigma0.inverse().compose(&self.sigma1).expect("same size")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_labels.len() + self.units.len()
    }
    pub fn n_boundaries(&self) -> usize {
        self.boundary_labels.len() + self.units.len()
    }
    pub fn n_hyperedges(&self) -> usize {
        self.sigma1.cycle_count()
    }

    /// `(d+1)·#H − d·#E`.
    pub fn degree(&self) -> i64 {
        (self.d as i64 + 1) * self.n_hyperedges() as i64 - self.d as i64 * self.k as i64
    }

    /// Tokens carrying the orientation: edges for odd d, hyperedge keys for even d.
    pub fn carrier_keys(&self) -> Vec<usize> {
        if is_odd(self.d) {
            (0..self.k).collect()
        } else {
            self.sigma1.cycles().iter().map(|c| c[0]).collect()
        }
    }

    /// Vertex cycles (starting at the minimal edge) by label; units have empty cycles.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_vertices()];
        for c in self.sigma0.cycles() {
            let l = self.vertex_labels[&c[0]];
            out[l] = c;
        }
        out
    }

    /// Boundary cycles of σ∞ by label; units have empty cycles.
    pub fn boundaries(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_boundaries()];
        for c in self.sigma_inf().cycles() {
            let l = self.boundary_labels[&c[0]];
            out[l] = c;
        }
        out
    }

    /// Label of the vertex containing each edge.
    pub fn vertex_of_edge(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for (label, c) in self.vertices().iter().enumerate() {
            for &e in c {
                out[e] = label;
            }
        }
        out
    }

    /// Label of the boundary containing each edge.
    pub fn boundary_of_edge(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for (label, c) in self.boundaries().iter().enumerate() {
            for &e in c {
                out[e] = label;
            }
        }
        out
    }

    /// Corners of boundary `b` in reading order: starting at its minimal edge
    /// `a`, the corner `(a, σ₀(a))`, then the corner after `σ∞⁻¹(a)`, and so on.
    /// The boundary word is the concatenation of the corner intervals in this order.
    pub fn boundary_corners(&self, b: usize) -> Result<Vec<Corner>, GraphError> {
        if b >= self.n_boundaries() {
            return Err(GraphError::UnknownBoundary(b));
        }
        if let Some(u) = self.units.iter().find(|u| u.1 == b) {
            return Ok(vec![Corner::Full { vertex: u.0 }]);
        }
        let back = self.sigma_inf().inverse();
        let vof = self.vertex_of_edge();
        let start = self.boundaries()[b][0];
        let mut out = Vec::new();
        let mut a = start;
        loop {
            out.push(Corner::Gap { vertex: vof[a], after: a, before: self.sigma0.apply(a) });
            a = back.apply(a);
            if a == start {
                break;
            }
        }
        Ok(out)
    }

    /// Canonical form: `self = coeff · sign · key` with the key's canonical orientation.
    /// `None` when an automorphism reverses the orientation.
    pub fn canonicalize(&self) -> Option<(GraphKey, i32)> {
        let verts = self.vertices();
        let live: Vec<(usize, &Vec<usize>)> = verts.iter().enumerate().filter(|(_, c)| !c.is_empty()).collect();
        let bcycles = self.sigma_inf().cycles();
        let blabel: Vec<usize> = bcycles.iter().map(|c| self.boundary_labels[&c[0]]).collect();
        let hyper = self.sigma1.cycles();
        let hyper_of_key: BTreeMap<usize, usize> = hyper.iter().enumerate().map(|(i, c)| (c[0], i)).collect();
        let odd = is_odd(self.d);

        let mut rot = vec![0usize; live.len()];
        let mut best: Option<(Vec<usize>, Vec<usize>, i32)> = None;
        let mut clash = false;
        let mut pi = vec![0usize; self.k];
        loop {
            let mut off = 0;
            for (vi, (_, c)) in live.iter().enumerate() {
                let len = c.len();
                for t in 0..len {
                    pi[c[(rot[vi] + t) % len]] = off + t;
                }
                off += len;
            }
            let mut s1 = vec![0usize; self.k];
            for e in 0..self.k {
                s1[pi[e]] = pi[self.sigma1.apply(e)];
            }
            let mut bl: Vec<(usize, usize)> =
                bcycles.iter().zip(&blabel).map(|(c, &l)| (c.iter().map(|&e| pi[e]).min().unwrap(), l)).collect();
            bl.sort_unstable();
            let bl: Vec<usize> = bl.into_iter().map(|x| x.1).collect();
            let sign = if odd {
                let seq: Vec<usize> = self.orientation.iter().map(|&e| pi[e]).collect();
                sequence_sign(&seq)
            } else {
                let seq: Vec<usize> = self
                    .orientation
                    .iter()
                    .map(|key| hyper[hyper_of_key[key]].iter().map(|&e| pi[e]).min().unwrap())
                    .collect();
                sequence_sign(&seq)
            };
            match &best {
                None => best = Some((s1, bl, sign)),
                Some((bs, bb, bsign)) => match (&s1, &bl).cmp(&(bs, bb)) {
                    std::cmp::Ordering::Less => {
                        best = Some((s1, bl, sign));
                        clash = false;
                    }
                    std::cmp::Ordering::Equal if sign != *bsign => clash = true,
                    _ => {}
                },
            }
            // next rotation tuple
            let mut i = 0;
            loop {
                if i == live.len() {
                    break;
                }
                rot[i] += 1;
                if rot[i] < live[i].1.len() {
                    break;
                }
                rot[i] = 0;
                i += 1;
            }
            if i == live.len() {
                break;
            }
        }
        if clash {
            return None;
        }
        let (s1, bl, sign) = best.unwrap_or((Vec::new(), Vec::new(), 1));
        let valencies = live.iter().map(|(l, c)| (*l, c.len())).collect();
        Some((GraphKey { d: self.d, k: self.k, valencies, sigma1: s1, blabels: bl, units: self.units.clone() }, sign))
    }

    /// Relabels vertices (`vmap[old] = new`) and boundaries (`bmap[old] = new`).
    pub fn relabel(&self, vmap: &[usize], bmap: &[usize]) -> Hypergraph {
        let mut g = self.clone();
        g.vertex_labels = self.vertex_labels.iter().map(|(&e, &l)| (e, vmap[l])).collect();
        g.boundary_labels = self.boundary_labels.iter().map(|(&e, &l)| (e, bmap[l])).collect();
        g.units = self.units.iter().map(|&(v, b)| (vmap[v], bmap[b])).collect();
        g.units.sort_unstable();
        g
    }

    /// Same graph with the reversed orientation class.
    pub fn opposite(&self) -> Hypergraph {
        let mut g = self.clone();
        if g.orientation.len() >= 2 {
            g.orientation.swap(0, 1);
        } else {
            g.coeff = -g.coeff;
        }
        g
    }

    /// Renames edges by `pi` (`pi[old] = new`), transporting all structure.
    pub fn permute_edges(&self, pi: &Perm) -> Hypergraph {
        let k = self.k;
        let mut s0 = vec![0; k];
        let mut s1 = vec![0; k];
        for e in 0..k {
            s0[pi.apply(e)] = pi.apply(self.sigma0.apply(e));
            s1[pi.apply(e)] = pi.apply(self.sigma1.apply(e));
        }
        let sigma0 = Perm::new(s0).unwrap();
        let sigma1 = Perm::new(s1).unwrap();
        let rekey = |old: &BTreeMap<usize, usize>, cycles: Vec<Vec<usize>>| -> BTreeMap<usize, usize> {
            let mut out = BTreeMap::new();
            for c in cycles {
                let lab = old[&c[0]];
                let newkey = c.iter().map(|&e| pi.apply(e)).min().unwrap();
                out.insert(newkey, lab);
            }
            out
        };
        let vertex_labels = rekey(&self.vertex_labels, self.sigma0.cycles());
        let boundary_labels = rekey(&self.boundary_labels, self.sigma_inf().cycles());
        let orientation = if is_odd(self.d) {
            self.orientation.iter().map(|&e| pi.apply(e)).collect()
        } else {
            let hyper = self.sigma1.cycles();
            self.orientation
                .iter()
                .map(|key| {
                    let c = hyper.iter().find(|c| c[0] == *key).unwrap();
                    c.iter().map(|&e| pi.apply(e)).min().unwrap()
                })
                .collect()
        };
        Hypergraph {
            k,
            sigma0,
            sigma1,
            vertex_labels,
            boundary_labels,
            units: self.units.clone(),
            d: self.d,
            orientation,
            coeff: self.coeff.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("graph serialises")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GraphError> {
        let gj: GraphJson = serde_json::from_value(v.clone()).map_err(|e| GraphError::Json(e.to_string()))?;
        gj.try_into()
    }
}

/// Canonical data of a graph up to label-preserving isomorphism; the
/// orientation is implicit (edges `0..k` for odd d, hyperedges by minimal edge
/// for even d).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphKey {
    pub d: i32,
    pub k: usize,
    /// `(label, valency)` for each vertex with edges, by label; vertices occupy
    /// consecutive edge blocks in this order.
    pub valencies: Vec<(usize, usize)>,
    pub sigma1: Vec<usize>,
    /// Boundary labels in order of minimal edge.
    pub blabels: Vec<usize>,
    pub units: Vec<(usize, usize)>,
}

impl GraphKey {
    pub fn to_graph(&self, coeff: Q) -> Hypergraph {
        let mut s0 = vec![0; self.k];
        let mut vertex_labels = BTreeMap::new();
        let mut off = 0;
        for &(label, val) in &self.valencies {
            for t in 0..val {
                s0[off + t] = off + (t + 1) % val;
            }
            vertex_labels.insert(off, label);
            off += val;
        }
        let sigma0 = Perm::new(s0).expect("block permutation");
        let sigma1 = Perm::new(self.sigma1.clone()).expect("canonical sigma1");
        let sinf = sigma0.inverse().compose(&sigma1).unwrap();
        let boundary_labels = sinf.cycles().iter().zip(&self.blabels).map(|(c, &l)| (c[0], l)).collect();
        let orientation =
            if is_odd(self.d) { (0..self.k).collect() } else { sigma1.cycles().iter().map(|c| c[0]).collect() };
        Hypergraph {
            k: self.k,
            sigma0,
            sigma1,
            vertex_labels,
            boundary_labels,
            units: self.units.clone(),
            d: self.d,
            orientation,
            coeff,
        }
    }
}

/// Formal rational combination of canonical graphs in `RH_d(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSum {
    pub m: usize,
    pub n: usize,
    pub d: i32,
    pub terms: LinComb<GraphKey>,
}

impl HSum {
    pub fn zero(m: usize, n: usize, d: i32) -> Self {
        HSum { m, n, d, terms: LinComb::new() }
    }

    pub fn add_graph(&mut self, g: &Hypergraph) -> Result<(), GraphError> {
        if (g.n_boundaries(), g.n_vertices(), g.d) != (self.m, self.n, self.d) {
            return Err(GraphError::MixedSignature(
                self.m,
                self.n,
                self.d,
                g.n_boundaries(),
                g.n_vertices(),
                g.d,
            ));
        }
        if let Some((key, s)) = g.canonicalize() {
            let c = if s < 0 { -g.coeff.clone() } else { g.coeff.clone() };
            self.terms.add_term(key, c);
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &HSum, s: &Q) -> Result<(), GraphError> {
        if (other.m, other.n, other.d) != (self.m, self.n, self.d) {
            return Err(GraphError::MixedSignature(self.m, self.n, self.d, other.m, other.n, other.d));
        }
        self.terms.add_scaled(&other.terms, s);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as graphs with canonical orientation.
    pub fn graphs(&self) -> Vec<Hypergraph> {
        self.terms.iter().map(|(k, c)| k.to_graph(c.clone())).collect()
    }

    pub fn from_graph(g: &Hypergraph) -> HSum {
        let mut s = HSum::zero(g.n_boundaries(), g.n_vertices(), g.d);
        s.add_graph(g).expect("own signature");
        s
    }

    /// `{"m", "n", "d", "terms"}`; the signature survives an empty sum.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "terms": self.graphs().iter().map(|g| g.to_json()).collect::<Vec<_>>(),
        })
    }

    /// Accepts the object form or a nonempty bare array of graphs.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, GraphError> {
        let graphs = |a: &serde_json::Value| -> Result<Vec<Hypergraph>, GraphError> {
            let arr = a.as_array().ok_or_else(|| GraphError::Json("expected an array of graphs".into()))?;
            arr.iter().map(Hypergraph::from_json).collect()
        };
        if v.is_array() {
            return hsum_normalize(&graphs(v)?);
        }
        let num = |k: &str| {
            v.get(k).and_then(|x| x.as_i64()).ok_or_else(|| GraphError::Json(format!("missing integer field {k:?}")))
        };
        let (m, n, d) = (num("m")?, num("n")?, num("d")?);
        if m < 0 || n < 0 {
            return Err(GraphError::Json("negative arity".into()));
        }
        let mut s = HSum::zero(m as usize, n as usize, d as i32);
        for g in graphs(v.get("terms").ok_or_else(|| GraphError::Json("missing field \"terms\"".into()))?)? {
            s.add_graph(&g)?;
        }
        Ok(s)
    }
}

/// Canonicalizes and accumulates; all terms must share `(m, n, d)`.
pub fn hsum_normalize(terms: &[Hypergraph]) -> Result<HSum, GraphError> {
    let Some(first) = terms.first() else {
        return Err(GraphError::Arity("empty term list has no signature".into()));
    };
    let mut s = HSum::zero(first.n_boundaries(), first.n_vertices(), first.d);
    for g in terms {
        s.add_graph(g)?;
    }
    Ok(s)
}

/// JSON form; labels are 1-based, keyed by the minimal edge of the cycle.
#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    pub edges: usize,
    pub sigma0: Vec<usize>,
    pub sigma1: Vec<usize>,
    pub vertex_labels: BTreeMap<String, usize>,
    pub boundary_labels: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub units: Vec<(usize, usize)>,
    pub d: i32,
    pub orientation: Vec<usize>,
    #[serde(with = "qser")]
    pub coeff: Q,
}

impl From<&Hypergraph> for GraphJson {
    fn from(g: &Hypergraph) -> Self {
        GraphJson {
            edges: g.k,
            sigma0: g.sigma0.images().to_vec(),
            sigma1: g.sigma1.images().to_vec(),
            vertex_labels: g.vertex_labels.iter().map(|(e, l)| (e.to_string(), l + 1)).collect(),
            boundary_labels: g.boundary_labels.iter().map(|(e, l)| (e.to_string(), l + 1)).collect(),
            units: g.units.iter().map(|&(v, b)| (v + 1, b + 1)).collect(),
            d: g.d,
            orientation: g.orientation.clone(),
            coeff: g.coeff.clone(),
        }
    }
}

impl TryFrom<GraphJson> for Hypergraph {
    type Error = GraphError;
    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        let parse = |m: &BTreeMap<String, usize>, what: &str| -> Result<BTreeMap<usize, usize>, GraphError> {
            m.iter()
                .map(|(k, &l)| {
                    let e = k.parse::<usize>().map_err(|_| GraphError::Json(format!("bad {what} key {k:?}")))?;
                    if l == 0 {
                        return Err(GraphError::Json(format!("{what} labels are 1-based")));
                    }
                    Ok((e, l - 1))
                })
                .collect()
        };
        let vl = parse(&j.vertex_labels, "vertex")?;
        let bl = parse(&j.boundary_labels, "boundary")?;
        if j.units.iter().any(|&(v, b)| v == 0 || b == 0) {
            return Err(GraphError::Json("unit labels are 1-based".into()));
        }
        let units = j.units.iter().map(|&(v, b)| (v - 1, b - 1)).collect();
        Hypergraph::build_with_units(
            j.edges,
            Perm::new(j.sigma0)?,
            Perm::new(j.sigma1)?,
            vl,
            bl,
            units,
            j.d,
            j.orientation,
            j.coeff,
        )
    }
}

impl std::fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}·[k={} s0={:?} s1={:?} V={:?} B={:?} U={:?} o={:?}]",
            q_to_string(&self.coeff),
            self.k,
            self.sigma0.images(),
            self.sigma1.images(),
            self.vertex_labels,
            self.boundary_labels,
            self.units,
            self.orientation
        )
    }
}

/// Builds a term whose labels follow the order of the minimal edges.
pub fn simple_graph(sigma0: Vec<usize>, sigma1: Vec<usize>, d: i32) -> Result<Hypergraph, GraphError> {
    let k = sigma0.len();
    let s0 = Perm::new(sigma0)?;
    let s1 = Perm::new(sigma1)?;
    let vl = s0.cycles().iter().enumerate().map(|(i, c)| (c[0], i)).collect();
    let sinf = s0.inverse().compose(&s1)?;
    let bl = sinf.cycles().iter().enumerate().map(|(i, c)| (c[0], i)).collect();
    let orientation = if is_odd(d) { (0..k).collect() } else { s1.cycles().iter().map(|c| c[0]).collect() };
    Hypergraph::build(k, s0, s1, vl, bl, d, orientation, Q::one())
}

/// A random graph with `k` edges spread over exactly `n_vertices` vertices
/// (`extra_units` edgeless components added on top), random labels and orientation.
pub fn random_graph<R: rand::Rng>(rng: &mut R, k: usize, n_vertices: usize, extra_units: usize, d: i32) -> Hypergraph {
    use rand::seq::SliceRandom;
    assert!(n_vertices <= k && (k > 0 || extra_units > 0));
    let mut edges: Vec<usize> = (0..k).collect();
    edges.shuffle(rng);
    // cut points splitting the shuffled edges into n nonempty cycles
    let mut cuts: Vec<usize> = (1..k).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(n_vertices.saturating_sub(1)).collect();
    cuts.sort_unstable();
    let mut cycles = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(k)) {
        if k > 0 {
            cycles.push(edges[start..c].to_vec());
        }
        start = c;
    }
    let s0 = Perm::from_cycles(k, &cycles).unwrap();
    let mut img: Vec<usize> = (0..k).collect();
    img.shuffle(rng);
    let s1 = Perm::new(img).unwrap();
    let sinf = s0.inverse().compose(&s1).unwrap();
    let nv = s0.cycle_count() + extra_units;
    let nb = sinf.cycle_count() + extra_units;
    let mut vlab: Vec<usize> = (0..nv).collect();
    vlab.shuffle(rng);
    let mut blab: Vec<usize> = (0..nb).collect();
    blab.shuffle(rng);
    let vl: BTreeMap<usize, usize> = s0.cycles().iter().zip(&vlab).map(|(c, &l)| (c[0], l)).collect();
    let bl: BTreeMap<usize, usize> = sinf.cycles().iter().zip(&blab).map(|(c, &l)| (c[0], l)).collect();
    let units: Vec<(usize, usize)> = vlab[vl.len()..].iter().copied().zip(blab[bl.len()..].iter().copied()).collect();
    let mut orientation = if is_odd(d) { (0..k).collect::<Vec<_>>() } else { s1.cycles().iter().map(|c| c[0]).collect() };
    orientation.shuffle(rng);
    Hypergraph::build_with_units(k, s0, s1, vl, bl, units, d, orientation, Q::one()).expect("random graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn gamma1() -> Hypergraph {
        simple_graph(vec![0, 1, 2], vec![1, 2, 0], 1).unwrap()
    }
    fn gamma2() -> Hypergraph {
        simple_graph(vec![1, 2, 0], vec![1, 2, 0], 1).unwrap()
    }
    fn gamma3() -> Hypergraph {
        simple_graph(vec![1, 2, 0], vec![1, 0, 2], 1).unwrap()
    }

    #[test]
    fn displayed_graph_counts() {
        let g = gamma1();
        assert_eq!((g.n_vertices(), g.n_hyperedges(), g.n_boundaries(), g.edge_count()), (3, 1, 1, 3));
        let g = gamma2();
        assert_eq!((g.n_vertices(), g.n_hyperedges(), g.n_boundaries()), (1, 1, 3));
        let g = gamma3();
        assert_eq!((g.n_vertices(), g.n_hyperedges(), g.n_boundaries()), (1, 2, 2));
        assert_eq!(g.boundaries(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn unit_graph() {
        let u = Hypergraph::unit(1);
        assert_eq!((u.n_vertices(), u.n_boundaries(), u.degree()), (1, 1, 0));
        assert_eq!(u.boundary_corners(0).unwrap(), vec![Corner::Full { vertex: 0 }]);
    }

    #[test]
    fn degrees() {
        assert_eq!(gamma2().degree(), -1);
        let g = simple_graph(vec![1, 2, 0], vec![1, 0, 2], 0).unwrap();
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn corners() {
        let g = gamma3();
        assert_eq!(g.boundary_corners(0).unwrap(), vec![Corner::Gap { vertex: 0, after: 0, before: 1 }]);
        let g = gamma2();
        for b in 0..3 {
            assert_eq!(g.boundary_corners(b).unwrap().len(), 1);
        }
        assert!(g.boundary_corners(3).is_err());
    }

    #[test]
    fn build_rejects() {
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        let s = Perm::identity(2);
        let err = Hypergraph::build(2, s.clone(), s, BTreeMap::new(), BTreeMap::new(), 1, vec![0, 1], q(1));
        assert!(matches!(err, Err(GraphError::VertexLabels(_))));
    }

    #[test]
    fn canonical_idempotent_and_relabel_sign() {
        let g = gamma3();
        let (key, s) = g.canonicalize().unwrap();
        let (key2, s2) = key.to_graph(q(1)).canonicalize().unwrap();
        assert_eq!((key2, s2), (key.clone(), 1));
        let t = Perm::new(vec![1, 0, 2]).unwrap();
        let h = g.permute_edges(&t);
        let (hk, hs) = h.canonicalize().unwrap();
        assert_eq!(hk, key);
        assert_eq!(hs, s);
        // relabelled edges with the original orientation list differs by the transposition
        let mut h2 = h.clone();
        h2.orientation = vec![0, 1, 2];
        assert_eq!(h2.canonicalize().unwrap().1, -s);
    }

    #[test]
    fn orientation_reversing_automorphism_kills() {
        // one vertex, two singleton hyperedges, one boundary: rotation swaps the edges
        let g = simple_graph(vec![1, 0], vec![0, 1], 1).unwrap();
        assert!(g.canonicalize().is_none());
        let mut s = HSum::from_graph(&g);
        assert!(s.is_zero());
        s.add_graph(&g).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn opposite_cancels() {
        let g = gamma3();
        let s = hsum_normalize(&[g.clone(), g.opposite()]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let g = gamma3();
        let back = Hypergraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let u = Hypergraph::unit(1);
        assert_eq!(Hypergraph::from_json(&u.to_json()).unwrap(), u);
    }
}
