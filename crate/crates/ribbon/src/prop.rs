//! Horizontal and vertical composition of ribbon hypergraphs.
//!
//! `vcompose(g2, g1)` glues boundary `i` of `g1` to vertex `i` of `g2`: the
//! cyclically ordered edges at that vertex are distributed over the corners of
//! the boundary in every order-preserving way. Edges of `g2` are renumbered
//! after those of `g1`; the orientation is that of `g2` followed by `g1`.

use crate::hypergraph::{Corner, GraphError, HSum, Hypergraph};
use crate::permcore::Perm;
use std::collections::BTreeMap;

pub fn unit(d: i32) -> Hypergraph {
    Hypergraph::unit(d)
}

/// Disjoint union of `j ≥ 1` units.
pub fn unit_power(j: usize, d: i32) -> Hypergraph {
    assert!(j >= 1, "the empty graph is not representable");
    let mut g = unit(d);
    for _ in 1..j {
        g = hcompose(&g, &unit(d)).expect("same parity");
    }
    g
}

/// Disjoint union; labels, edges and orientation of `b` come after those of `a`.
pub fn hcompose(a: &Hypergraph, b: &Hypergraph) -> Result<Hypergraph, GraphError> {
    if a.d() != b.d() {
        return Err(GraphError::Parity(a.d(), b.d()));
    }
    let (k1, n1, m1) = (a.edge_count(), a.n_vertices(), a.n_boundaries());
    let k = k1 + b.edge_count();
    let mut s0: Vec<usize> = a.sigma0().images().to_vec();
    s0.extend(b.sigma0().images().iter().map(|&x| x + k1));
    let mut s1: Vec<usize> = a.sigma1().images().to_vec();
    s1.extend(b.sigma1().images().iter().map(|&x| x + k1));
    let mut vl = a.vertex_labels().clone();
    vl.extend(b.vertex_labels().iter().map(|(&e, &l)| (e + k1, l + n1)));
    let mut bl = a.boundary_labels().clone();
    bl.extend(b.boundary_labels().iter().map(|(&e, &l)| (e + k1, l + m1)));
    let mut units = a.units().to_vec();
    units.extend(b.units().iter().map(|&(v, c)| (v + n1, c + m1)));
    let mut orientation = a.orientation().to_vec();
    orientation.extend(b.orientation().iter().map(|&e| e + k1));
    Hypergraph::build_with_units(
        k,
        Perm::new(s0)?,
        Perm::new(s1)?,
        vl,
        bl,
        units,
        a.d(),
        orientation,
        a.coeff() * b.coeff(),
    )
}

/// One way of gluing a vertex of `g2` into a boundary of `g1`.
#[derive(Clone)]
enum Placement {
    /// Nothing to insert (the vertex of `g2` has no edges).
    None,
    /// The boundary is a unit of `g1` at vertex `u`; it becomes the vertex cycle.
    Whole { u: usize, cycle: Vec<usize> },
    /// Lists of edges inserted after the given `g1` edges.
    Insert(Vec<(usize, Vec<usize>)>),
}

/// All cyclic interleavings of `cycle` into the corner list `after`.
fn interleavings(cycle: &[usize], after: &[usize]) -> Vec<Placement> {
    let r = cycle.len();
    let s = after.len();
    let mut out = Vec::new();
    // compositions of r into s nonnegative parts
    let mut parts = vec![0usize; s];
    fn rec(i: usize, left: usize, parts: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if i + 1 == parts.len() {
            parts[i] = left;
            acc.push(parts.clone());
            return;
        }
        for x in 0..=left {
            parts[i] = x;
            rec(i + 1, left - x, parts, acc);
        }
    }
    let mut comps = Vec::new();
    rec(0, r, &mut parts, &mut comps);
    for start in 0..r {
        let seq: Vec<usize> = (0..r).map(|t| cycle[(start + t) % r]).collect();
        for comp in &comps {
            let mut pos = 0;
            let mut ins = Vec::new();
            for (ci, &len) in comp.iter().enumerate() {
                if len > 0 {
                    ins.push((after[ci], seq[pos..pos + len].to_vec()));
                }
                pos += len;
            }
            out.push(Placement::Insert(ins));
        }
    }
    out
}

/// `g2 ∘ g1`: outputs of `g1` feed the inputs of `g2`.
pub fn vcompose(g2: &Hypergraph, g1: &Hypergraph) -> Result<HSum, GraphError> {
    if g1.d() != g2.d() {
        return Err(GraphError::Parity(g2.d(), g1.d()));
    }
    let d = g1.d();
    if g2.n_vertices() != g1.n_boundaries() {
        return Err(GraphError::Arity(format!(
            "{} outputs cannot feed {} inputs",
            g1.n_boundaries(),
            g2.n_vertices()
        )));
    }
    let k1 = g1.edge_count();
    let k = k1 + g2.edge_count();
    let m2 = g2.n_boundaries();
    let mut out = HSum::zero(m2, g1.n_vertices(), d);

    let verts2 = g2.vertices();
    let mut choices: Vec<Vec<Placement>> = Vec::new();
    for (b, v2) in verts2.iter().enumerate() {
        let cyc: Vec<usize> = v2.iter().map(|&x| x + k1).collect();
        let corners = g1.boundary_corners(b)?;
        if cyc.is_empty() {
            choices.push(vec![Placement::None]);
            continue;
        }
        match corners.as_slice() {
            [Corner::Full { vertex }] => choices.push(vec![Placement::Whole { u: *vertex, cycle: cyc }]),
            _ => {
                let after: Vec<usize> = corners
                    .iter()
                    .map(|c| match c {
                        Corner::Gap { after, .. } => *after,
                        Corner::Full { .. } => unreachable!("full corners only on units"),
                    })
                    .collect();
                choices.push(interleavings(&cyc, &after));
            }
        }
    }

    let mut s1: Vec<usize> = g1.sigma1().images().to_vec();
    s1.extend(g2.sigma1().images().iter().map(|&x| x + k1));
    let sigma1 = Perm::new(s1)?;
    let mut orientation: Vec<usize> = g2.orientation().iter().map(|&e| e + k1).collect();
    orientation.extend_from_slice(g1.orientation());
    let coeff = g1.coeff() * g2.coeff();
    let b2_of: Vec<usize> = g2.boundary_of_edge();
    let b1_of: Vec<usize> = g1.boundary_of_edge();
    // g2 unit vertex -> its boundary label
    let unit2: BTreeMap<usize, usize> = g2.units().iter().copied().collect();
    let unit1_b: BTreeMap<usize, usize> = g1.units().iter().map(|&(v, b)| (b, v)).collect();

    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut s0: Vec<usize> = (0..k).collect();
        s0[..k1].copy_from_slice(g1.sigma0().images());
        let mut vl = g1.vertex_labels().clone();
        let mut units = Vec::new();
        for (b, ch) in choices.iter().enumerate() {
            match &ch[idx[b]] {
                Placement::None => {
                    if let Some(&u) = unit1_b.get(&b) {
                        units.push((u, unit2[&b]));
                    }
                }
                Placement::Whole { u, cycle } => {
                    for (t, &x) in cycle.iter().enumerate() {
                        s0[x] = cycle[(t + 1) % cycle.len()];
                    }
                    vl.insert(cycle[0], *u);
                }
                Placement::Insert(ins) => {
                    for (a, list) in ins {
                        let next = s0[*a];
                        s0[*a] = list[0];
                        for w in list.windows(2) {
                            s0[w[0]] = w[1];
                        }
                        s0[*list.last().unwrap()] = next;
                    }
                }
            }
        }
        let sigma0 = Perm::new(s0)?;
        let sinf = sigma0.inverse().compose(&sigma1)?;
        let mut bl = BTreeMap::new();
        for c in sinf.cycles() {
            let mut label = None;
            for &e in &c {
                let l = if e >= k1 {
                    b2_of[e - k1]
                } else {
                    // only boundaries of g1 glued to edgeless vertices stay free of g2 edges
                    match unit2.get(&b1_of[e]) {
                        Some(&l) => l,
                        None => continue,
                    }
                };
                match label {
                    None => label = Some(l),
                    Some(x) if x != l => {
                        return Err(GraphError::Gluing(format!("boundary {c:?} meets labels {x} and {l}")));
                    }
                    _ => {}
                }
            }
            let l = label.ok_or_else(|| GraphError::Gluing(format!("unlabelled boundary {c:?}")))?;
            bl.insert(c[0], l);
        }
        let g = Hypergraph::build_with_units(
            k,
            sigma0,
            sigma1.clone(),
            vl,
            bl,
            units,
            d,
            orientation.clone(),
            coeff.clone(),
        )?;
        out.add_graph(&g)?;

        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
    }
    Ok(out)
}

pub fn hcompose_sums(a: &HSum, b: &HSum) -> Result<HSum, GraphError> {
    let mut out = HSum::zero(a.m + b.m, a.n + b.n, a.d);
    for ga in a.graphs() {
        for gb in b.graphs() {
            out.add_graph(&hcompose(&ga, &gb)?)?;
        }
    }
    Ok(out)
}

pub fn vcompose_sums(a2: &HSum, a1: &HSum) -> Result<HSum, GraphError> {
    if a2.n != a1.m {
        return Err(GraphError::Arity(format!("{} outputs cannot feed {} inputs", a1.m, a2.n)));
    }
    let mut out = HSum::zero(a2.m, a1.n, a1.d);
    for g2 in a2.graphs() {
        for g1 in a1.graphs() {
            let s = vcompose(&g2, &g1)?;
            out.add_scaled(&s, &num_traits::One::one())?;
        }
    }
    Ok(out)
}

/// Number of terms before cancellation: `Π r·C(r+s−1, r)` over glued pairs.
pub fn gluing_count(g2: &Hypergraph, g1: &Hypergraph) -> usize {
    let mut total = 1usize;
    for (b, v) in g2.vertices().iter().enumerate() {
        let r = v.len();
        if r == 0 {
            continue;
        }
        let s = g1.boundaries()[b].len();
        if s == 0 {
            continue;
        }
        let mut c = 1usize;
        for i in 0..r {
            c = c * (r + s - 1 - i) / (i + 1);
        }
        total *= r * c;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::simple_graph;

    fn corolla(n_edges: usize, d: i32) -> Hypergraph {
        // one vertex, one hyperedge through all edges in vertex order
        let s: Vec<usize> = (0..n_edges).map(|i| (i + 1) % n_edges).collect();
        simple_graph(s.clone(), s, d).unwrap()
    }

    #[test]
    fn unit_is_identity() {
        let g = simple_graph(vec![1, 2, 0], vec![1, 0, 2], 1).unwrap();
        let u = unit_power(g.n_boundaries(), 1);
        let left = vcompose(&u, &g).unwrap();
        assert_eq!(left, HSum::from_graph(&g));
        let u = unit_power(g.n_vertices(), 1);
        let right = vcompose(&g, &u).unwrap();
        assert_eq!(right, HSum::from_graph(&g));
    }

    #[test]
    fn hcompose_counts() {
        let a = corolla(2, 0);
        let b = corolla(3, 0);
        let h = hcompose(&a, &b).unwrap();
        assert_eq!(h.n_vertices(), a.n_vertices() + b.n_vertices());
        assert_eq!(h.n_boundaries(), a.n_boundaries() + b.n_boundaries());
        assert_eq!(h.degree(), a.degree() + b.degree());
        assert!(hcompose(&a, &corolla(2, 1)).is_err());
    }

    #[test]
    fn vcompose_degree_and_arity() {
        let g1 = simple_graph(vec![1, 2, 0], vec![1, 2, 0], 0).unwrap();
        let g2 = simple_graph(vec![0, 1], vec![1, 0], 0).unwrap();
        assert!(vcompose(&g2, &g1).is_err());
        let g2 = unit_power(3, 0);
        let c = vcompose(&g2, &g1).unwrap();
        assert_eq!(c.len(), 1);
        let g2 = simple_graph(vec![0, 1, 2], vec![1, 0, 2], 0).unwrap();
        let c = vcompose(&g2, &g1).unwrap();
        for g in c.graphs() {
            assert_eq!(g.degree(), g1.degree() + g2.degree());
            assert_eq!((g.n_vertices(), g.n_boundaries()), (1, g2.n_boundaries()));
        }
        assert_eq!(gluing_count(&g2, &g1), 1);
    }
}
