//! Verification suites. Every suite returns a [`Report`]; passing means every
//! residue is identically zero.

use crate::holieb::{
    d_squared_by_key, graded_necklace_op, graph_relation, necklace_bracket, necklace_cobracket, GenKey, HolieError,
    SymSum,
};
use crate::hypergraph::{random_graph, HSum, Hypergraph};
use crate::prop::vcompose;
use crate::rep::{compose_operators, eval_sum};
use crate::scalar::{q, q_to_string};
use crate::theta::ThetaFamily;
use crate::words::{sym_canon, CycWord, Letter};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// Failures kept in a report; the total is still counted.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub instance: String,
    pub residue: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub failure_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(suite: &str) -> Report {
        Report { suite: suite.into(), cases: 0, failures: Vec::new(), failure_count: 0, seed: None }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn fail(&mut self, instance: String, residue: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(Failure { instance, residue });
        }
    }

    /// Folds in a sub-report; failures keep their order.
    pub fn absorb(&mut self, other: Report) {
        self.cases += other.cases;
        for f in other.failures {
            if self.failures.len() < MAX_LISTED {
                self.failures.push(f);
            }
        }
        self.failure_count += other.failure_count;
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn show_mono(ws: &[CycWord]) -> String {
    ws.iter().map(|w| w.to_string()).join(" ")
}

fn show_sum(s: &SymSum) -> String {
    let parts: Vec<String> = s.iter().take(4).map(|(m, c)| format!("{}·{}", q_to_string(c), show_mono(m))).collect();
    let more = if s.len() > 4 { format!(" + … ({} terms)", s.len()) } else { String::new() };
    format!("{}{more}", parts.join(" + "))
}

fn diff(a: &SymSum, b: &SymSum) -> SymSum {
    let mut r = a.clone();
    r.add_scaled(b, &q(-1));
    r
}

/// All nonvanishing cyclic words over `alphabet` of length `≤ max_len`, empty word included.
pub fn basis_words(alphabet: &[Letter], max_len: usize) -> Vec<CycWord> {
    let mut out = BTreeSet::new();
    for len in 0..=max_len {
        for seq in (0..len).map(|_| alphabet.iter().cloned()).multi_cartesian_product() {
            if let Some((w, _)) = CycWord::canonical(&seq) {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

/// Basis monomials of the symmetric algebra: `n` words, total length `≤ max_total`.
pub fn monomials(words: &[CycWord], n: usize, max_total: usize, d: i32) -> Vec<Vec<CycWord>> {
    let mut sorted: Vec<&CycWord> = words.iter().filter(|w| w.len() <= max_total).collect();
    sorted.sort_by_key(|w| w.len());
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    grow(&sorted, 0, n, max_total, d, &mut cur, &mut out);
    out
}

fn grow(
    words: &[&CycWord],
    from: usize,
    n: usize,
    budget: usize,
    d: i32,
    cur: &mut Vec<CycWord>,
    out: &mut Vec<Vec<CycWord>>,
) {
    if cur.len() == n {
        if let Some((m, _)) = sym_canon(cur.clone(), d) {
            out.push(m);
        }
        return;
    }
    for (i, w) in words.iter().enumerate().skip(from) {
        // sorted by length, so nothing further fits either
        if w.len() > budget {
            break;
        }
        cur.push((*w).clone());
        grow(words, i, n, budget - w.len(), d, cur, out);
        cur.pop();
    }
}

/// Runs `D∘D` on every monomial and reports nonzero residues for composite
/// keys accepted by `check` (and for disconnected terms).
fn d_squared_suite(
    suite: &str,
    theta: &ThetaFamily,
    monos: &[Vec<CycWord>],
    allow: &(dyn Fn(GenKey) -> bool + Sync),
    check: &(dyn Fn(GenKey) -> bool + Sync),
) -> Result<Report, HolieError> {
    let found: Vec<Vec<(String, String)>> = monos
        .par_iter()
        .map(|mono| {
            let res = d_squared_by_key(theta, mono, allow, true)?;
            Ok(res
                .into_iter()
                .filter(|(k, _)| k.is_none_or(check))
                .map(|(k, v)| {
                    let name = k.map_or_else(|| "disconnected".to_string(), |k| k.to_string());
                    (format!("{name} on {}", show_mono(mono)), show_sum(&v))
                })
                .collect())
        })
        .collect::<Result<_, HolieError>>()?;
    let mut rep = Report::new(suite);
    rep.cases = monos.len();
    for (inst, res) in found.into_iter().flatten() {
        rep.fail(inst, res);
    }
    Ok(rep)
}

/// Jacobi, co-Jacobi, compatibility and involutivity of the bracket/cobracket
/// induced by `theta`, on all monomials of at most three words over the doubled
/// alphabet of `n_letters` letters with total length `≤ max_len`.
pub fn check_lieb_axioms(theta: &ThetaFamily, n_letters: u32, max_len: usize) -> Result<Report, HolieError> {
    let alphabet = crate::theta::darboux_alphabet(n_letters);
    let words = basis_words(&alphabet, max_len);
    let mut monos = Vec::new();
    for n in 1..=3 {
        monos.extend(monomials(&words, n, max_len, theta.d));
    }
    d_squared_suite("lieb", theta, &monos, &|k: GenKey| k.is_exceptional(), &|_| true)
}

/// Bounds for the relation suite.
#[derive(Debug, Clone)]
pub struct WordBounds {
    pub alphabet: Vec<Letter>,
    pub max_total_len: usize,
}

/// IBL∞ relations: operator level on all monomials within `bounds` for every
/// composite key with `m+n+2a ≤ max_weight`, and graph level for every key with
/// at most `max_edges` edges.
pub fn check_ibl_relations(
    theta: &ThetaFamily,
    max_weight: usize,
    bounds: &WordBounds,
    max_edges: usize,
) -> Result<Report, HolieError> {
    let words = basis_words(&bounds.alphabet, bounds.max_total_len);
    let mut monos = Vec::new();
    for n in 1..max_weight {
        monos.extend(monomials(&words, n, bounds.max_total_len, theta.d));
    }
    // components of a composite of weight w have weight at most w - 1
    let mut rep = d_squared_suite(
        "ibl",
        theta,
        &monos,
        &|k: GenKey| k.weight() < max_weight,
        &|k: GenKey| k.weight() <= max_weight,
    )?;
    rep.absorb(check_graph_relations(theta.d, max_edges)?);
    rep.suite = "ibl".into();
    Ok(rep)
}

/// `ρ(δ gen) = 0` in the prop for every key with at most `max_edges` edges.
pub fn check_graph_relations(d: i32, max_edges: usize) -> Result<Report, HolieError> {
    let keys: Vec<GenKey> = GenKey::all_up_to(max_edges + 1).into_iter().filter(|k| k.edges() <= max_edges).collect();
    let sums: Vec<HSum> = keys.par_iter().map(|&k| graph_relation(k, d)).collect::<Result<_, _>>()?;
    let mut rep = Report::new("ibl-graph");
    rep.cases = keys.len();
    for (k, s) in keys.iter().zip(sums) {
        if !s.is_zero() {
            rep.fail(format!("graph relation {k}, d={d}"), format!("{} surviving graphs", s.len()));
        }
    }
    Ok(rep)
}

/// How the functoriality suite composes graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composer {
    Exact,
    /// Drops the first gluing term; the suite must notice.
    DropOneGluing,
}

fn without_fixed_points(g: &Hypergraph) -> bool {
    g.sigma1().images().iter().enumerate().all(|(i, &x)| i != x)
}

fn random_pair(rng: &mut ChaCha8Rng, d: i32, max_edges: usize) -> (Hypergraph, Hypergraph) {
    let top = max_edges.max(2);
    let g1 = loop {
        let k = rng.gen_range(2..=top);
        let n = rng.gen_range(1..=k.min(3));
        let units = rng.gen_range(0..2);
        let g = random_graph(rng, k, n, units, d);
        if without_fixed_points(&g) {
            break g;
        }
    };
    let m = g1.n_boundaries();
    let g2 = loop {
        let k = rng.gen_range(2..=top);
        let nv = m.min(k).min(rng.gen_range(1..=m));
        let g = random_graph(rng, k, nv, m - nv, d);
        if without_fixed_points(&g) {
            break g;
        }
    };
    (g1, g2)
}

/// `ρ(Γ₂ ∘ Γ₁) = ρ(Γ₂) ∘ ρ(Γ₁)` on `samples` random pairs with at most
/// `max_edges` edges each and random words of length 2 to `max_word_len`.
pub fn check_functoriality(
    theta: &ThetaFamily,
    alphabet: &[Letter],
    samples: usize,
    max_edges: usize,
    max_word_len: usize,
    seed: u64,
    composer: Composer,
) -> Result<Report, HolieError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new("functoriality");
    rep.seed = Some(seed);
    for i in 0..samples {
        let (g1, g2) = random_pair(&mut rng, theta.d, max_edges);
        let inputs: Vec<CycWord> = (0..g1.n_vertices())
            .map(|_| {
                let len = rng.gen_range(2..=max_word_len.max(2));
                let ls: Vec<Letter> = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
                CycWord::canonical(&ls).map(|x| x.0).unwrap_or_else(CycWord::empty)
            })
            .collect();
        let mut comp = vcompose(&g2, &g1)?;
        if composer == Composer::DropOneGluing {
            let gs = comp.graphs();
            let mut cut = HSum::zero(comp.m, comp.n, comp.d);
            for g in gs.iter().skip(1) {
                cut.add_graph(g)?;
            }
            comp = cut;
        }
        let lhs = eval_sum(&comp, theta, &inputs).map_err(HolieError::from)?;
        let rhs = compose_operators(&g2, &g1, theta, &inputs).map_err(HolieError::from)?;
        rep.cases += 1;
        if lhs != rhs {
            rep.fail(
                format!("sample {i}: g1={g1}, g2={g2}, words={}", show_mono(&inputs)),
                format!("{} vs {} terms", lhs.len(), rhs.len()),
            );
        }
    }
    Ok(rep)
}

/// Bounds for the graded necklace suite.
#[derive(Debug, Clone)]
pub struct ClosureBounds {
    pub max_p: u32,
    pub max_weight: usize,
    pub max_total_len: usize,
    /// Word length bound for the comparison with the necklace operations.
    pub schedler_len: usize,
}

/// Graded necklace words over `n_letters` letters with `p ≤ max_p`.
pub fn graded_words(n_letters: u32, max_p: u32, max_len: usize) -> Vec<CycWord> {
    let alphabet: Vec<Letter> =
        (1..=n_letters).flat_map(|alpha| (0..=max_p).map(move |p| Letter::Shifted { alpha, p })).collect();
    basis_words(&alphabet, max_len)
}

/// Closure of the image of `u`, weight drop 1, homological shift
/// `m+n+2a−3`, and agreement with the necklace operations in degree 0.
pub fn check_closure_weight(n_letters: u32, bounds: &ClosureBounds) -> Result<Report, HolieError> {
    let words = graded_words(n_letters, bounds.max_p, bounds.max_total_len);
    let keys = GenKey::all_up_to(bounds.max_weight);
    let mut jobs = Vec::new();
    for &key in &keys {
        for tuple in (0..key.n).map(|_| 0..words.len()).multi_cartesian_product() {
            if tuple.iter().map(|&i| words[i].len()).sum::<usize>() <= bounds.max_total_len {
                jobs.push((key, tuple));
            }
        }
    }
    let results: Vec<Vec<(String, String)>> = jobs
        .par_iter()
        .map(|(key, tuple)| {
            let ins: Vec<CycWord> = tuple.iter().map(|&i| words[i].clone()).collect();
            let inst = format!("{key} on {}", show_mono(&ins));
            let mut bad = Vec::new();
            match graded_necklace_op(n_letters, *key, &ins) {
                Err(HolieError::ClosureViolation(msg)) => bad.push((inst, format!("closure violation: {msg}"))),
                Err(e) => return Err(e),
                Ok(out) => {
                    let w_in: usize = ins.iter().map(|w| w.len()).sum();
                    let deg_in: i64 = ins.iter().map(|w| w.degree()).sum();
                    let shift = key.weight() as i64 - 3;
                    for (mono, _) in out.iter() {
                        let w_out: usize = mono.iter().map(|w| w.len()).sum();
                        let deg_out: i64 = mono.iter().map(|w| w.degree()).sum();
                        if w_out + 1 != w_in {
                            bad.push((inst.clone(), format!("weight {w_in} -> {w_out} in {}", show_mono(mono))));
                        }
                        if deg_in - deg_out != shift {
                            bad.push((inst.clone(), format!("degree {deg_in} -> {deg_out} in {}", show_mono(mono))));
                        }
                    }
                }
            }
            Ok(bad)
        })
        .collect::<Result<_, HolieError>>()?;
    let mut rep = Report::new("closure");
    rep.cases = jobs.len();
    for (i, r) in results.into_iter().flatten() {
        rep.fail(i, r);
    }
    rep.absorb(check_schedler_reduction(n_letters, bounds.schedler_len)?);
    rep.suite = "closure".into();
    Ok(rep)
}

/// Degree-0 inputs: the graded (1,2,0)/(2,1,0) operations equal the necklace
/// bracket and cobracket.
pub fn check_schedler_reduction(n_letters: u32, max_len: usize) -> Result<Report, HolieError> {
    let words = graded_words(n_letters, 0, max_len);
    let bracket = GenKey { m: 1, n: 2, a: 0 };
    let cobracket = GenKey { m: 2, n: 1, a: 0 };
    let mut rep = Report::new("schedler-reduction");
    for w in &words {
        rep.cases += 1;
        let a = graded_necklace_op(n_letters, cobracket, std::slice::from_ref(w))?;
        let b = necklace_cobracket(n_letters, w)?;
        if a != b {
            rep.fail(format!("cobracket on {w}"), show_sum(&diff(&a, &b)));
        }
        for v in &words {
            if w.len() + v.len() > max_len {
                continue;
            }
            rep.cases += 1;
            let a = graded_necklace_op(n_letters, bracket, &[w.clone(), v.clone()])?;
            let b = necklace_bracket(n_letters, w, v)?;
            if a != b {
                rep.fail(format!("bracket on {w} {v}"), show_sum(&diff(&a, &b)));
            }
        }
    }
    Ok(rep)
}

/// The doubling construction against the direct necklace formulas.
pub fn check_schedler_direct(n_letters: u32, max_len: usize) -> Result<Report, HolieError> {
    use crate::holieb::{necklace_bracket_direct, necklace_cobracket_direct};
    let words = graded_words(n_letters, 0, max_len);
    let mut rep = Report::new("schedler-direct");
    for w in &words {
        rep.cases += 1;
        let (a, b) = (necklace_cobracket(n_letters, w)?, necklace_cobracket_direct(n_letters, w)?);
        if a != b {
            rep.fail(format!("cobracket on {w}"), format!("{} vs {}", show_sum(&a), show_sum(&b)));
        }
        for v in &words {
            if w.len() + v.len() > max_len {
                continue;
            }
            rep.cases += 1;
            let (a, b) = (necklace_bracket(n_letters, w, v)?, necklace_bracket_direct(n_letters, w, v)?);
            if a != b {
                rep.fail(format!("bracket on {w} {v}"), format!("{} vs {}", show_sum(&a), show_sum(&b)));
            }
        }
    }
    Ok(rep)
}
