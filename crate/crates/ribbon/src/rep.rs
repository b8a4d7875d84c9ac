//! The representation of ribbon hypergraphs on tuples of cyclic words.
//!
//! A graph acts on one word per vertex. Each vertex places its cyclically
//! ordered edges on distinct letters of its word (in cyclic order); each
//! hyperedge multiplies in `Θ` of the letters it meets, read along `σ₁` from
//! its minimal edge; each boundary outputs the letters left in the corners it
//! passes. Signs are Koszul signs for moving the orientation carriers and the
//! input letters into the order "per hyperedge: carrier, letters; then
//! outputs".

use crate::hypergraph::{is_odd, Corner, GraphError, HSum, Hypergraph};
use crate::permcore::inversion_sign;
use crate::scalar::{LinComb, Q};
use crate::theta::ThetaFamily;
use crate::words::{CycWord, Letter, WordSum};
use itertools::Itertools;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("graph has {0} vertices but {1} input words were given")]
    InputCount(usize, usize),
    #[error("graph has d={0} but the family has d={1}")]
    Parity(i32, i32),
    #[error("{0}")]
    Graph(#[from] GraphError),
}

/// Cyclically ordered position choices of `r` edges on a word of length `len`.
fn placements(len: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if r > len {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p0 in 0..len {
        for rest in (1..len).combinations(r - 1) {
            let mut v = Vec::with_capacity(r);
            v.push(p0);
            v.extend(rest.iter().map(|&o| (p0 + o) % len));
            out.push(v);
        }
    }
    out
}

/// Precomputed combinatorics of a graph used by every evaluation.
struct Shape {
    verts: Vec<Vec<usize>>,
    hyper: Vec<Vec<usize>>,
    corners: Vec<Vec<Corner>>,
    carriers_odd_edges: bool,
}

impl Shape {
    fn new(g: &Hypergraph) -> Result<Shape, GraphError> {
        let corners = (0..g.n_boundaries()).map(|b| g.boundary_corners(b)).collect::<Result<_, _>>()?;
        Ok(Shape { verts: g.vertices(), hyper: g.sigma1().cycles(), corners, carriers_odd_edges: is_odd(g.d()) })
    }
}

/// Evaluates one graph on one tuple of words (one per vertex, by label).
pub fn eval_graph(g: &Hypergraph, theta: &ThetaFamily, inputs: &[CycWord]) -> Result<WordSum, RepError> {
    if theta.d != g.d() {
        return Err(RepError::Parity(g.d(), theta.d));
    }
    if inputs.len() != g.n_vertices() {
        return Err(RepError::InputCount(g.n_vertices(), inputs.len()));
    }
    let shape = Shape::new(g)?;
    let mut out = WordSum::new();
    eval_into(g, &shape, theta, inputs, g.coeff(), &mut out);
    Ok(out)
}

fn eval_into(g: &Hypergraph, shape: &Shape, theta: &ThetaFamily, inputs: &[CycWord], scale: &Q, out: &mut WordSum) {
    let k = g.edge_count();
    // symbol numbering: carriers 0..c, then letters of each input in label order
    let ncar = g.orientation().len();
    let mut letter_base = Vec::with_capacity(inputs.len());
    let mut odd: Vec<bool> = vec![true; ncar];
    for w in inputs {
        letter_base.push(odd.len());
        odd.extend(w.letters().iter().map(|l| l.is_odd()));
    }
    // carrier symbol of each edge (odd d) or hyperedge key (even d)
    let mut carrier_of = vec![usize::MAX; k];
    for (i, &c) in g.orientation().iter().enumerate() {
        carrier_of[c] = i;
    }

    let per_vertex: Vec<Vec<Vec<usize>>> = shape
        .verts
        .iter()
        .zip(inputs)
        .map(|(cyc, w)| if cyc.is_empty() { vec![Vec::new()] } else { placements(w.len(), cyc.len()) })
        .collect();
    if per_vertex.iter().any(|p| p.is_empty()) {
        return;
    }
    let n = inputs.len();
    let mut idx = vec![0usize; n];
    let mut pos = vec![0usize; k];
    let mut vof = vec![0usize; k];
    for (v, cyc) in shape.verts.iter().enumerate() {
        for &e in cyc {
            vof[e] = v;
        }
    }
    'outer: loop {
        for (v, cyc) in shape.verts.iter().enumerate() {
            for (t, &e) in cyc.iter().enumerate() {
                pos[e] = per_vertex[v][idx[v]][t];
            }
        }
        let letter = |e: usize| -> &Letter { &inputs[vof[e]].letters()[pos[e]] };
        let mut val = scale.clone();
        for h in &shape.hyper {
            let ls: Vec<Letter> = h.iter().map(|&e| *letter(e)).collect();
            let x = theta.eval(&ls);
            if x.is_zero() {
                val = Q::zero();
                break;
            }
            val *= x;
        }
        if !val.is_zero() {
            let mut tgt: Vec<usize> = Vec::with_capacity(odd.len());
            for h in &shape.hyper {
                if !shape.carriers_odd_edges {
                    tgt.push(carrier_of[h[0]]);
                }
                for &e in h {
                    if shape.carriers_odd_edges {
                        tgt.push(carrier_of[e]);
                    }
                    tgt.push(letter_base[vof[e]] + pos[e]);
                }
            }
            let mut outs = Vec::with_capacity(shape.corners.len());
            let mut sign = 1;
            for cs in &shape.corners {
                let mut word: Vec<Letter> = Vec::new();
                for c in cs {
                    let (v, from, to) = match *c {
                        Corner::Full { vertex } => {
                            let len = inputs[vertex].len();
                            for i in 0..len {
                                tgt.push(letter_base[vertex] + i);
                                word.push(inputs[vertex].letters()[i]);
                            }
                            continue;
                        }
                        Corner::Gap { vertex, after, before } => (vertex, pos[after], pos[before]),
                    };
                    let len = inputs[v].len();
                    let mut i = (from + 1) % len;
                    while i != to {
                        tgt.push(letter_base[v] + i);
                        word.push(inputs[v].letters()[i]);
                        i = (i + 1) % len;
                    }
                }
                match CycWord::canonical(&word) {
                    Some((w, s)) => {
                        sign *= s;
                        outs.push(w);
                    }
                    None => {
                        sign = 0;
                        break;
                    }
                }
            }
            if sign != 0 {
                debug_assert_eq!(tgt.len(), odd.len());
                sign *= inversion_sign(&tgt, |i| odd[i]);
                if sign < 0 {
                    val = -val;
                }
                out.add_term(outs, val);
            }
        }
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] < per_vertex[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
            i += 1;
        }
        break;
    }
}

/// Linear extension of `eval_graph` to a combination of input tuples.
pub fn apply_graph(g: &Hypergraph, theta: &ThetaFamily, inputs: &WordSum) -> Result<WordSum, RepError> {
    if theta.d != g.d() {
        return Err(RepError::Parity(g.d(), theta.d));
    }
    let shape = Shape::new(g)?;
    let mut out = WordSum::new();
    for (tuple, c) in inputs.iter() {
        if tuple.len() != g.n_vertices() {
            return Err(RepError::InputCount(g.n_vertices(), tuple.len()));
        }
        let scale = g.coeff() * c;
        eval_into(g, &shape, theta, tuple, &scale, &mut out);
    }
    Ok(out)
}

pub fn eval_sum(h: &HSum, theta: &ThetaFamily, inputs: &[CycWord]) -> Result<WordSum, RepError> {
    let mut out = WordSum::new();
    for g in h.graphs() {
        out.add_assign(&eval_graph(&g, theta, inputs)?);
    }
    Ok(out)
}

pub fn apply_sum(h: &HSum, theta: &ThetaFamily, inputs: &WordSum) -> Result<WordSum, RepError> {
    let mut out = WordSum::new();
    for g in h.graphs() {
        out.add_assign(&apply_graph(&g, theta, inputs)?);
    }
    Ok(out)
}

/// A graph sum with its combinatorics precomputed, for repeated evaluation.
pub struct Prepared {
    terms: Vec<(Hypergraph, Shape)>,
    pub n: usize,
    pub m: usize,
    pub d: i32,
}

impl Prepared {
    pub fn new(h: &HSum) -> Prepared {
        let terms = h
            .graphs()
            .into_iter()
            .map(|g| {
                let s = Shape::new(&g).expect("canonical graphs are valid");
                (g, s)
            })
            .collect();
        Prepared { terms, n: h.n, m: h.m, d: h.d }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, theta: &ThetaFamily, inputs: &[CycWord]) -> Result<WordSum, RepError> {
        if theta.d != self.d {
            return Err(RepError::Parity(self.d, theta.d));
        }
        if inputs.len() != self.n {
            return Err(RepError::InputCount(self.n, inputs.len()));
        }
        let mut out = WordSum::new();
        for (g, s) in &self.terms {
            eval_into(g, s, theta, inputs, g.coeff(), &mut out);
        }
        Ok(out)
    }
}

/// `eval(g2) ∘ eval(g1)` on a single input tuple.
pub fn compose_operators(
    g2: &Hypergraph,
    g1: &Hypergraph,
    theta: &ThetaFamily,
    inputs: &[CycWord],
) -> Result<WordSum, RepError> {
    let mid = eval_graph(g1, theta, inputs)?;
    apply_graph(g2, theta, &mid)
}

/// A single input tuple as a combination.
pub fn tuple(words: Vec<CycWord>) -> WordSum {
    LinComb::single(words, Q::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::simple_graph;
    use crate::prop::{unit, unit_power, vcompose};
    use crate::scalar::q;

    fn free(id: u32, deg: i32) -> Letter {
        Letter::Free { id, deg }
    }

    #[test]
    fn placements_count() {
        assert_eq!(placements(4, 2).len(), 4 * 3);
        assert_eq!(placements(3, 3).len(), 3);
        assert!(placements(2, 3).is_empty());
    }

    #[test]
    fn unit_acts_as_identity() {
        let th = ThetaFamily::zero(1);
        let w = CycWord::canonical(&[free(0, 0), free(1, 1)]).unwrap().0;
        let out = eval_graph(&unit(1), &th, std::slice::from_ref(&w)).unwrap();
        assert_eq!(out, tuple(vec![w.clone()]));
        let out = eval_graph(&unit_power(2, 1), &th, &[w.clone(), CycWord::empty()]).unwrap();
        assert_eq!(out, tuple(vec![w, CycWord::empty()]));
    }

    #[test]
    fn pairing_on_single_vertex() {
        // one vertex, one hyperedge with two edges; d = 1, letters of degree 0 pair to Θ_2
        let th = ThetaFamily::table(1, &[(vec![free(0, 0), free(1, 0)], q(1))]).unwrap();
        let g = simple_graph(vec![1, 0], vec![1, 0], 1).unwrap();
        assert_eq!((g.n_vertices(), g.n_boundaries()), (1, 2));
        let w = CycWord::canonical(&[free(0, 0), free(2, 0), free(1, 0), free(3, 0)]).unwrap().0;
        let out = eval_graph(&g, &th, &[w]).unwrap();
        assert!(!out.is_zero());
        for (t, _) in out.iter() {
            assert_eq!(t.len(), 2);
        }
    }

    #[test]
    fn functorial_small() {
        let th = ThetaFamily::table(1, &[(vec![free(0, 0), free(1, 0)], q(1))]).unwrap();
        let g1 = simple_graph(vec![1, 0], vec![1, 0], 1).unwrap();
        let g2 = simple_graph(vec![0, 1], vec![1, 0], 1).unwrap();
        let w = CycWord::canonical(&[free(0, 0), free(1, 0), free(0, 0), free(1, 0), free(1, 0), free(0, 0)])
            .unwrap()
            .0;
        let comp = vcompose(&g2, &g1).unwrap();
        let lhs = eval_sum(&comp, &th, std::slice::from_ref(&w)).unwrap();
        let rhs = compose_operators(&g2, &g1, &th, &[w]).unwrap();
        assert_eq!(lhs, rhs);
    }
}
