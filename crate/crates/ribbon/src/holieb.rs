//! Generators of the strongly homotopy involutive Lie bialgebra prop, their
//! images as sums of one-hyperedge graphs, and the induced operations on
//! cyclic words.
//!
//! Conventions, in the shifted picture where words have degree `|w| + d`:
//! the generator `(m, n, a)` maps to the sum over all `σ₀` with `n` cycles and
//! `m` boundaries against the fixed `K`-cycle `σ₁ = (0 1 … K−1)`,
//! `K = m + n + 2a − 1`, over all vertex and boundary labellings, each with
//! weight `ε·G/(K·m!)`. Here `ε = (−1)^a` for odd `d` and `G` is the sign
//! comparing the graph orientation with the order "edge, vertex and boundary
//! symbols by first visit along σ₁". The induced operation is
//! `δ ∘ eval ∘ δ` with the décalage sign `δ(W) = (−1)^{d Σ_{u<v} |W_u|}`.

use crate::hypergraph::{is_odd, GraphError, HSum, Hypergraph};
use crate::prop::{hcompose_sums, unit_power, vcompose_sums};
use crate::permcore::{inversion_sign, sequence_sign, Perm};
use crate::rep::{Prepared, RepError};
use crate::scalar::{binomial, factorial, q, LinComb, Q};
use crate::theta::ThetaFamily;
use crate::words::{sym_canon, CycWord, Letter, WordSum};
use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolieError {
    #[error("invalid generator key ({0},{1},{2})")]
    InvalidKey(usize, usize, usize),
    #[error("letter {0} is not a degree-0 necklace letter")]
    BadLetter(String),
    #[error("closure violation: {0}")]
    ClosureViolation(String),
    #[error("{0}")]
    Rep(#[from] RepError),
    #[error("{0}")]
    Graph(#[from] GraphError),
}

/// Generator `(m, n, a)`: `m` outputs, `n` inputs, genus weight `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenKey {
    pub m: usize,
    pub n: usize,
    pub a: usize,
}

impl GenKey {
    pub fn new(m: usize, n: usize, a: usize) -> Result<GenKey, HolieError> {
        let k = GenKey { m, n, a };
        if k.is_valid() {
            Ok(k)
        } else {
            Err(HolieError::InvalidKey(m, n, a))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.m >= 1 && self.n >= 1 && (self.m + self.n + self.a >= 3)
    }

    pub fn is_exceptional(&self) -> bool {
        self.a == 0 && self.m + self.n == 3
    }

    /// Number of edges `m + n + 2a − 1` of the image graphs.
    pub fn edges(&self) -> usize {
        self.m + self.n + 2 * self.a - 1
    }

    /// `1 − d(m + n + 2a − 2)`.
    pub fn degree(&self, d: i32) -> i64 {
        1 - d as i64 * (self.m + self.n + 2 * self.a) as i64 + 2 * d as i64
    }

    /// `m + n + 2a`, the size used to bound relation checks.
    pub fn weight(&self) -> usize {
        self.m + self.n + 2 * self.a
    }

    /// All valid keys with `m + n + 2a ≤ max`.
    pub fn all_up_to(max: usize) -> Vec<GenKey> {
        let mut out = Vec::new();
        for m in 1..=max {
            for n in 1..=max {
                for a in 0..=max / 2 {
                    let k = GenKey { m, n, a };
                    if k.is_valid() && k.weight() <= max {
                        out.push(k);
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

impl std::fmt::Display for GenKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.m, self.n, self.a)
    }
}

fn eps(key: GenKey, d: i32) -> i32 {
    if is_odd(d) && key.a % 2 == 1 {
        -1
    } else {
        1
    }
}

/// Sign of the first-visit symbol order against "edges; (Sb_v, S_v) per vertex; T_b".
fn first_visit_sign(k: usize, vlab: &[usize], blab: &[usize], n: usize, m: usize) -> i32 {
    // symbols: E_t = t, Sb_v = k + 2v, S_v = k + 2v + 1, T_b = k + 2n + b
    let mut src = Vec::with_capacity(k + 2 * n + m);
    let mut seen_v = vec![false; n];
    let mut seen_b = vec![false; m];
    for t in 0..k {
        src.push(t);
        if !seen_v[vlab[t]] {
            seen_v[vlab[t]] = true;
            src.push(k + 2 * vlab[t]);
        }
        if !seen_b[blab[t]] {
            seen_b[blab[t]] = true;
            src.push(k + 2 * n + blab[t]);
        }
    }
    src.extend((0..n).map(|v| k + 2 * v + 1));
    // positions of each symbol in src; target order is the natural numbering
    let mut pos = vec![0usize; src.len()];
    for (i, &s) in src.iter().enumerate() {
        pos[s] = i;
    }
    let s = inversion_sign(&pos, |_| true);
    if (m * k) % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Image of a generator: a canonical sum of one-hyperedge graphs.
pub fn rho_generator(key: GenKey, d: i32) -> Result<HSum, HolieError> {
    if !key.is_valid() {
        return Err(HolieError::InvalidKey(key.m, key.n, key.a));
    }
    let (m, n) = (key.m, key.n);
    let k = key.edges();
    let sigma1 = Perm::long_cycle(k);
    let odd = is_odd(d);
    let base = q(eps(key, d) as i64) / (q(k as i64) * factorial(m));
    let mut out = HSum::zero(m, n, d);
    let orientation: Vec<usize> = if odd { (0..k).collect() } else { vec![0] };
    for img in (0..k).permutations(k) {
        let sigma0 = Perm::new(img).unwrap();
        let vcyc = sigma0.cycles();
        if vcyc.len() != n {
            continue;
        }
        let sinf = sigma0.inverse().compose(&sigma1).unwrap();
        let bcyc = sinf.cycles();
        if bcyc.len() != m {
            continue;
        }
        let vidx = sigma0.orbit_index();
        let bidx = sinf.orbit_index();
        for vperm in (0..n).permutations(n) {
            for bperm in (0..m).permutations(m) {
                let vl: BTreeMap<usize, usize> = vcyc.iter().enumerate().map(|(i, c)| (c[0], vperm[i])).collect();
                let bl: BTreeMap<usize, usize> = bcyc.iter().enumerate().map(|(i, c)| (c[0], bperm[i])).collect();
                let g = if odd {
                    let vlab: Vec<usize> = (0..k).map(|t| vperm[vidx[t]]).collect();
                    let blab: Vec<usize> = (0..k).map(|t| bperm[bidx[t]]).collect();
                    first_visit_sign(k, &vlab, &blab, n, m)
                } else {
                    1
                };
                let coeff = if g < 0 { -base.clone() } else { base.clone() };
                let graph = Hypergraph::build(
                    k,
                    sigma0.clone(),
                    sigma1.clone(),
                    vl,
                    bl,
                    d,
                    orientation.clone(),
                    coeff,
                )?;
                out.add_graph(&graph)?;
            }
        }
    }
    Ok(out)
}

type RhoCache = Mutex<HashMap<(GenKey, i32), Arc<Prepared>>>;

fn rho_cache() -> &'static RhoCache {
    static CACHE: OnceLock<RhoCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached, evaluation-ready image of a generator.
pub fn rho_prepared(key: GenKey, d: i32) -> Result<Arc<Prepared>, HolieError> {
    if let Some(p) = rho_cache().lock().unwrap().get(&(key, d)) {
        return Ok(p.clone());
    }
    let p = Arc::new(Prepared::new(&rho_generator(key, d)?));
    rho_cache().lock().unwrap().insert((key, d), p.clone());
    Ok(p)
}

/// `(−1)^{d Σ_{u<v} |W_u|}`.
pub fn decalage_sign(d: i32, degrees: &[i64]) -> i32 {
    if !is_odd(d) {
        return 1;
    }
    let n = degrees.len();
    let s: i64 = degrees.iter().enumerate().map(|(u, x)| x * (n - 1 - u) as i64).sum();
    if s.rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

fn word_degrees(ws: &[CycWord]) -> Vec<i64> {
    ws.iter().map(|w| w.degree()).collect()
}

/// The operation of generator `key` on an ordered tuple of `n` words, with
/// ordered output tuples.
pub fn induced_op(theta: &ThetaFamily, key: GenKey, words: &[CycWord]) -> Result<WordSum, HolieError> {
    let rho = rho_prepared(key, theta.d)?;
    let raw = rho.eval(theta, words)?;
    let din = decalage_sign(theta.d, &word_degrees(words));
    Ok(raw
        .iter()
        .map(|(t, c)| {
            let s = din * decalage_sign(theta.d, &word_degrees(t));
            (t.clone(), if s < 0 { -c.clone() } else { c.clone() })
        })
        .collect())
}

/// Combination of graded-symmetric monomials (sorted words, shifted degrees).
pub type SymSum = LinComb<Vec<CycWord>>;

/// Projects ordered tuples to the graded-symmetric algebra.
pub fn symmetrize(ws: &WordSum, d: i32) -> SymSum {
    let mut out = SymSum::new();
    for (t, c) in ws.iter() {
        if let Some((m, s)) = sym_canon(t.clone(), d) {
            out.add_term(m, if s < 0 { -c.clone() } else { c.clone() });
        }
    }
    out
}

fn odd_word(w: &CycWord, d: i32) -> bool {
    w.shifted_degree(d).rem_euclid(2) == 1
}

/// Sign of moving the words at positions `sel` (increasing) to the front.
fn front_sign(words: &[CycWord], sel: &[usize], d: i32) -> i32 {
    let mut s = 1;
    let mut passed_odd = 0usize;
    let mut j = 0;
    for (i, w) in words.iter().enumerate() {
        if j < sel.len() && sel[j] == i {
            if odd_word(w, d) && passed_odd % 2 == 1 {
                s = -s;
            }
            j += 1;
        } else if odd_word(w, d) {
            passed_odd += 1;
        }
    }
    s
}

/// Keys that can act on `n` words of total length `len`.
pub fn keys_for(n: usize, len: usize) -> Vec<GenKey> {
    let mut out = Vec::new();
    for m in 1..=len + 1 {
        for a in 0..=len {
            let k = GenKey { m, n, a };
            if k.is_valid() && k.edges() <= len {
                out.push(k);
            }
        }
    }
    out
}

/// One application of a generator inside a product of words.
#[derive(Debug, Clone)]
pub struct Action {
    pub key: GenKey,
    /// Positions consumed in the list acted on.
    pub consumed: Vec<usize>,
    /// New list: outputs first, then untouched words in order.
    pub result: Vec<CycWord>,
    pub coeff: Q,
}

/// All generator actions on a list of words (not necessarily sorted).
pub fn actions(
    theta: &ThetaFamily,
    words: &[CycWord],
    allow: &dyn Fn(GenKey) -> bool,
) -> Result<Vec<Action>, HolieError> {
    let d = theta.d;
    let r = words.len();
    let mut out = Vec::new();
    for size in 1..=r {
        for sel in (0..r).combinations(size) {
            let len: usize = sel.iter().map(|&i| words[i].len()).sum();
            let keys: Vec<GenKey> = keys_for(size, len)
                .into_iter()
                .filter(|k| allow(*k) && theta.may_act(k.edges(), sel.iter().flat_map(|&i| words[i].letters())))
                .collect();
            if keys.is_empty() {
                continue;
            }
            let fs = front_sign(words, &sel, d);
            let input: Vec<CycWord> = sel.iter().map(|&i| words[i].clone()).collect();
            let rest: Vec<CycWord> = (0..r).filter(|i| !sel.contains(i)).map(|i| words[i].clone()).collect();
            for key in keys {
                let res = induced_op(theta, key, &input)?;
                for (t, c) in res.iter() {
                    let mut result = t.clone();
                    result.extend(rest.iter().cloned());
                    let c = if fs < 0 { -c.clone() } else { c.clone() };
                    out.push(Action { key, consumed: sel.clone(), result, coeff: c });
                }
            }
        }
    }
    Ok(out)
}

/// The total operator `D = Σ_keys D_key` on one monomial, restricted to allowed keys.
pub fn sym_op(theta: &ThetaFamily, mono: &[CycWord], allow: &dyn Fn(GenKey) -> bool) -> Result<SymSum, HolieError> {
    let mut out = SymSum::new();
    for act in actions(theta, mono, allow)? {
        if let Some((m, s)) = sym_canon(act.result, theta.d) {
            out.add_term(m, if s < 0 { -act.coeff } else { act.coeff });
        }
    }
    Ok(out)
}

/// Operator of a single key on a monomial.
pub fn sym_op_key(theta: &ThetaFamily, key: GenKey, mono: &[CycWord]) -> Result<SymSum, HolieError> {
    sym_op(theta, mono, &|k| k == key)
}

/// Connected composite of `lower` (applied first) feeding `l ≥ 1` outputs into `upper`.
pub fn composite_key(lower: GenKey, upper: GenKey, l: usize) -> GenKey {
    GenKey { m: lower.m + upper.m - l, n: lower.n + upper.n - l, a: lower.a + upper.a + l - 1 }
}

/// `D∘D` on a monomial, split by connected composite key; disconnected terms
/// are collected under `None`.
pub fn d_squared_by_key(
    theta: &ThetaFamily,
    mono: &[CycWord],
    allow: &dyn Fn(GenKey) -> bool,
    whole_only: bool,
) -> Result<BTreeMap<Option<GenKey>, SymSum>, HolieError> {
    let d = theta.d;
    let mut out: BTreeMap<Option<GenKey>, SymSum> = BTreeMap::new();
    for first in actions(theta, mono, allow)? {
        let m1 = first.key.m;
        let mid = &first.result;
        for second in actions(theta, mid, allow)? {
            let l = second.consumed.iter().filter(|&&i| i < m1).count();
            if whole_only {
                // the composite must consume every input word
                if (m1..mid.len()).any(|i| !second.consumed.contains(&i)) {
                    continue;
                }
            }
            let key = if l == 0 { None } else { Some(composite_key(first.key, second.key, l)) };
            if let Some((m, s)) = sym_canon(second.result, d) {
                let c = &first.coeff * &second.coeff;
                out.entry(key).or_default().add_term(m, if s < 0 { -c } else { c });
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Residue of the relation for `key` on a monomial of exactly `key.n` words.
pub fn relation_residue(
    theta: &ThetaFamily,
    key: GenKey,
    mono: &[CycWord],
    allow: &dyn Fn(GenKey) -> bool,
) -> Result<SymSum, HolieError> {
    let all = d_squared_by_key(theta, mono, allow, true)?;
    Ok(all.get(&Some(key)).cloned().unwrap_or_default())
}

/// Reference implementation of all operations at once, enumerating ordered
/// position sequences whose first entry is minimal; keyed output monomials.
pub fn direct_op(theta: &ThetaFamily, words: &[CycWord]) -> LinComb<(GenKey, Vec<CycWord>)> {
    let d = theta.d;
    let odd = is_odd(d);
    let n = words.len();
    let positions: Vec<(usize, usize)> =
        words.iter().enumerate().flat_map(|(v, w)| (0..w.len()).map(move |i| (v, i))).collect();
    let mut out = LinComb::new();
    for k in n.max(1)..=positions.len() {
        for qs in positions.iter().copied().permutations(k) {
            if qs[0] != *qs.iter().min().unwrap() {
                continue;
            }
            let mut hit = vec![false; n];
            for &(v, _) in &qs {
                hit[v] = true;
            }
            if hit.iter().any(|h| !h) {
                continue;
            }
            if let Some((key, mono, c)) = direct_term(theta, words, &qs, odd) {
                if key.is_valid() {
                    out.add_term((key, mono), c);
                }
            }
        }
    }
    out
}

fn direct_term(
    theta: &ThetaFamily,
    words: &[CycWord],
    qs: &[(usize, usize)],
    odd: bool,
) -> Option<(GenKey, Vec<CycWord>, Q)> {
    let d = theta.d;
    let k = qs.len();
    let n = words.len();
    let letters: Vec<Letter> = qs.iter().map(|&(v, i)| words[v].letters()[i]).collect();
    let val = theta.eval(&letters);
    if val.is_zero() {
        return None;
    }
    // σ0 from the position order at each vertex, σ1 the long cycle
    let mut s0 = vec![0usize; k];
    let mut by_v: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (t, &(v, i)) in qs.iter().enumerate() {
        by_v[v].push((i, t));
    }
    for lst in by_v.iter_mut() {
        lst.sort_unstable();
        for j in 0..lst.len() {
            s0[lst[j].1] = lst[(j + 1) % lst.len()].1;
        }
    }
    let sigma0 = Perm::new(s0).unwrap();
    let sinf = sigma0.inverse().compose(&Perm::long_cycle(k)).unwrap();
    let bcyc = sinf.cycles();
    let m = bcyc.len();
    if (k + 1 < n + m) || (k + 1 - n - m) % 2 == 1 {
        return None;
    }
    let key = GenKey { m, n, a: (k + 1 - n - m) / 2 };
    let back = sinf.inverse();
    // symbols: E_t, Sb_v, T_b (carriers), then S_v and letters (v,i)
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Sym {
        E(usize),
        Sb(usize),
        S(usize),
        T(usize),
        H,
        L(usize, usize),
    }
    let par = |s: &Sym| -> bool {
        match s {
            Sym::E(_) | Sym::Sb(_) | Sym::S(_) | Sym::T(_) => odd,
            Sym::H => !odd,
            Sym::L(v, i) => words[*v].letters()[*i].is_odd(),
        }
    };
    let bidx = sinf.orbit_index();
    let mut src: Vec<Sym> = Vec::new();
    if odd {
        let mut sv = vec![false; n];
        let mut sb = vec![false; m];
        for (t, &(v, _)) in qs.iter().enumerate() {
            src.push(Sym::E(t));
            if !sv[v] {
                sv[v] = true;
                src.push(Sym::Sb(v));
            }
            let b = bidx[t];
            if !sb[b] {
                sb[b] = true;
                src.push(Sym::T(b));
            }
        }
    } else {
        src.push(Sym::H);
        src.extend((0..n).map(Sym::Sb));
        src.extend((0..m).map(Sym::T));
        src.extend((0..k).map(Sym::E));
    }
    for (v, w) in words.iter().enumerate() {
        src.push(Sym::S(v));
        src.extend((0..w.len()).map(|i| Sym::L(v, i)));
    }
    let mut tgt: Vec<Sym> = Vec::new();
    if !odd {
        tgt.push(Sym::H);
    }
    for (t, &(v, i)) in qs.iter().enumerate() {
        tgt.push(Sym::E(t));
        tgt.push(Sym::L(v, i));
    }
    for v in 0..n {
        tgt.push(Sym::Sb(v));
        tgt.push(Sym::S(v));
    }
    let mut outs = Vec::with_capacity(m);
    let mut sign = 1;
    for (b, c) in bcyc.iter().enumerate() {
        tgt.push(Sym::T(b));
        let mut word = Vec::new();
        let start = c[0];
        let mut a = start;
        loop {
            let (v, i) = qs[a];
            let (_, j) = qs[sigma0.apply(a)];
            let len = words[v].len();
            let count = if sigma0.apply(a) == a { len - 1 } else { (j + len - i - 1) % len };
            for step in 0..count {
                let x = (i + 1 + step) % len;
                tgt.push(Sym::L(v, x));
                word.push(words[v].letters()[x]);
            }
            a = back.apply(a);
            if a == start {
                break;
            }
        }
        let (w, s) = CycWord::canonical(&word)?;
        sign *= s;
        outs.push(w);
    }
    let index: HashMap<Sym, usize> = src.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let seq: Vec<usize> = tgt.iter().map(|s| index[s]).collect();
    sign *= inversion_sign(&seq, |i| par(&src[i]));
    let (mono, s2) = sym_canon(outs, d)?;
    sign *= s2 * eps(key, d);
    Some((key, mono, if sign < 0 { -val } else { val }))
}

/// The direct operator restricted to one key, as a graded-symmetric sum.
pub fn direct_op_key(theta: &ThetaFamily, key: GenKey, words: &[CycWord]) -> SymSum {
    direct_op(theta, words).iter().filter(|((k, _), _)| *k == key).map(|((_, m), c)| (m.clone(), c.clone())).collect()
}

/// Total of a map of sums.
pub fn total(parts: &BTreeMap<Option<GenKey>, SymSum>) -> SymSum {
    let mut out = SymSum::new();
    for v in parts.values() {
        out.add_assign(v);
    }
    out
}

// ---- necklace operations via doubling ----

fn necklace_alpha(l: &Letter, n_letters: u32) -> Result<u32, HolieError> {
    match *l {
        Letter::Shifted { alpha, p: 0 } if alpha >= 1 && alpha <= n_letters => Ok(alpha),
        _ => Err(HolieError::BadLetter(l.to_string())),
    }
}

/// `x_α ↦ x⁽¹⁾_α x⁽²⁾_α` on a degree-0 word.
pub fn double_word(n_letters: u32, w: &CycWord) -> Result<CycWord, HolieError> {
    let mut ls = Vec::with_capacity(2 * w.len());
    for l in w.letters() {
        let alpha = necklace_alpha(l, n_letters)?;
        ls.push(Letter::Doubled { alpha, copy: 1 });
        ls.push(Letter::Doubled { alpha, copy: 2 });
    }
    Ok(CycWord::canonical(&ls).expect("degree-0 words never vanish").0)
}

/// Inverse of `double_word` on the (12)-subspace.
pub fn undouble_word(w: &CycWord) -> Option<CycWord> {
    let ls = w.letters();
    if ls.len() % 2 == 1 {
        return None;
    }
    if ls.is_empty() {
        return Some(CycWord::empty());
    }
    'rot: for r in 0..2 {
        let mut out = Vec::with_capacity(ls.len() / 2);
        for i in 0..ls.len() / 2 {
            match (ls[(r + 2 * i) % ls.len()], ls[(r + 2 * i + 1) % ls.len()]) {
                (Letter::Doubled { alpha: a, copy: 1 }, Letter::Doubled { alpha: b, copy: 2 }) if a == b => {
                    out.push(Letter::Shifted { alpha: a, p: 0 })
                }
                _ => continue 'rot,
            }
        }
        return Some(CycWord::canonical(&out).unwrap().0);
    }
    None
}

fn pull_back(s: &SymSum, d: i32) -> Result<SymSum, HolieError> {
    let mut out = SymSum::new();
    for (mono, c) in s.iter() {
        let mut ws = Vec::with_capacity(mono.len());
        for w in mono {
            ws.push(undouble_word(w).ok_or_else(|| HolieError::ClosureViolation(format!("{w} is not doubled")))?);
        }
        if let Some((m, sg)) = sym_canon(ws, d) {
            out.add_term(m, if sg < 0 { -c.clone() } else { c.clone() });
        }
    }
    Ok(out)
}

/// Necklace bracket on `Cyc(W_N)`, computed by doubling.
pub fn necklace_bracket(n_letters: u32, w1: &CycWord, w2: &CycWord) -> Result<SymSum, HolieError> {
    let th = ThetaFamily::darboux();
    let ins = [double_word(n_letters, w1)?, double_word(n_letters, w2)?];
    let out = symmetrize(&induced_op(&th, GenKey { m: 1, n: 2, a: 0 }, &ins)?, 1);
    pull_back(&out, 1)
}

/// Necklace cobracket on `Cyc(W_N)`, computed by doubling.
pub fn necklace_cobracket(n_letters: u32, w: &CycWord) -> Result<SymSum, HolieError> {
    let th = ThetaFamily::darboux();
    let ins = [double_word(n_letters, w)?];
    let out = symmetrize(&induced_op(&th, GenKey { m: 2, n: 1, a: 0 }, &ins)?, 1);
    pull_back(&out, 1)
}

fn cyc(ls: &[Letter]) -> CycWord {
    CycWord::canonical(ls).expect("degree-0 words never vanish").0
}

/// Direct bracket formula: `Σ_{α_i = α'_j} (T₁ − T₂)` with
/// `T₁ = (…w_{i−1} w'_{j+1}…w'_{j−1} α w_{i+1}…)` and
/// `T₂ = (…w_{i−1} α w'_{j+1}…w'_{j−1} w_{i+1}…)`.
pub fn necklace_bracket_direct(n_letters: u32, w1: &CycWord, w2: &CycWord) -> Result<SymSum, HolieError> {
    let (a, b) = (w1.letters(), w2.letters());
    for l in a.iter().chain(b) {
        necklace_alpha(l, n_letters)?;
    }
    let mut out = SymSum::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            if a[i] != b[j] {
                continue;
            }
            let wa: Vec<Letter> = (1..a.len()).map(|t| a[(i + t) % a.len()]).collect();
            let wb: Vec<Letter> = (1..b.len()).map(|t| b[(j + t) % b.len()]).collect();
            let mut t1 = wa.clone();
            t1.extend(wb.iter().copied());
            t1.push(a[i]);
            let mut t2 = wa;
            t2.push(a[i]);
            t2.extend(wb);
            out.add_term(vec![cyc(&t1)], Q::from_integer(1.into()));
            out.add_term(vec![cyc(&t2)], Q::from_integer((-1).into()));
        }
    }
    Ok(out)
}

/// Direct cobracket formula: `Σ_{α_i = α_j} (x_{i+1}…x_j) ∧ (x_{j+1}…x_{i−1})`,
/// where `i = j` gives the correction terms `1 ∧ (w without x_i)`.
pub fn necklace_cobracket_direct(n_letters: u32, w: &CycWord) -> Result<SymSum, HolieError> {
    let x = w.letters();
    for l in x {
        necklace_alpha(l, n_letters)?;
    }
    let n = x.len();
    let mut out = SymSum::new();
    for i in 0..n {
        for j in 0..n {
            if x[i] != x[j] {
                continue;
            }
            let t = (j + n - i) % n;
            let first: Vec<Letter> = (1..=t).map(|s| x[(i + s) % n]).collect();
            let second: Vec<Letter> = (1..n - t).map(|s| x[(j + s) % n]).collect();
            if let Some((m, s)) = sym_canon(vec![cyc(&first), cyc(&second)], 1) {
                out.add_term(m, Q::from_integer(s.into()));
            }
        }
    }
    Ok(out)
}

// ---- graded necklace words and the embedding u ----

/// `e_α[−p] ↦ e^{0_p}_α e^{1_p}_α … e^{(p+1)_p}_α`, with the rotation sign.
pub fn embed_u(w: &CycWord) -> Result<(CycWord, i32), HolieError> {
    let mut ls = Vec::new();
    for l in w.letters() {
        match *l {
            Letter::Shifted { alpha, p } => ls.extend((0..=p + 1).map(|l| Letter::Expanded { alpha, l, p })),
            _ => return Err(HolieError::BadLetter(l.to_string())),
        }
    }
    CycWord::canonical(&ls).ok_or_else(|| HolieError::ClosureViolation("embedded word vanishes".into()))
}

/// Inverse of `embed_u`: `word = sign · embed_u(result)`; `None` outside the image.
pub fn project_u(w: &CycWord) -> Option<(CycWord, i32)> {
    let ls = w.letters();
    let len = ls.len();
    if len == 0 {
        return Some((CycWord::empty(), 1));
    }
    let degs: Vec<i64> = ls.iter().map(|l| l.degree()).collect();
    'rot: for r in 0..len {
        if !matches!(ls[r], Letter::Expanded { l: 0, .. }) {
            continue;
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < len {
            let Letter::Expanded { alpha, l: 0, p } = ls[(r + i) % len] else { continue 'rot };
            let block = p as usize + 2;
            if i + block > len {
                continue 'rot;
            }
            for t in 0..block {
                if ls[(r + i + t) % len] != (Letter::Expanded { alpha, l: t as u32, p }) {
                    continue 'rot;
                }
            }
            out.push(Letter::Shifted { alpha, p });
            i += block;
        }
        // w = rot_sign⁻¹ · (rotation by r); rotation by r = embed(out) letterwise
        let s_r = crate::words::rotation_sign(&degs, r);
        let (wc, s_w) = CycWord::canonical(&out)?;
        let (ec, s_e) = embed_u(&wc).ok()?;
        debug_assert_eq!(&ec, w);
        return Some((wc, s_r * s_w * s_e));
    }
    None
}

/// Letter count of the shifted word after embedding: `Σ(p_i + 2)`.
pub fn embedded_length(w: &CycWord) -> usize {
    w.letters()
        .iter()
        .map(|l| match *l {
            Letter::Shifted { p, .. } => p as usize + 2,
            _ => 1,
        })
        .sum()
}

/// Weight of a shifted word: its number of letters.
pub fn weight(w: &CycWord) -> usize {
    w.len()
}

/// The induced operation on graded necklace words: embed, act with the graded
/// family, project back. Fails with a closure violation outside the image.
pub fn graded_necklace_op(n_letters: u32, key: GenKey, words: &[CycWord]) -> Result<SymSum, HolieError> {
    let th = ThetaFamily::graded();
    let mut ins = Vec::with_capacity(words.len());
    let mut sign = 1;
    for w in words {
        for l in w.letters() {
            match *l {
                Letter::Shifted { alpha, .. } if alpha >= 1 && alpha <= n_letters => {}
                _ => return Err(HolieError::BadLetter(l.to_string())),
            }
        }
        let (e, s) = embed_u(w)?;
        sign *= s;
        ins.push(e);
    }
    let raw = symmetrize(&induced_op(&th, key, &ins)?, 1);
    let mut out = SymSum::new();
    for (mono, c) in raw.iter() {
        let mut ws = Vec::with_capacity(mono.len());
        let mut s = sign;
        for w in mono {
            let (p, sp) = project_u(w).ok_or_else(|| HolieError::ClosureViolation(format!("{key}: {w} is not in the image")))?;
            s *= sp;
            ws.push(p);
        }
        if let Some((m, s2)) = sym_canon(ws, 1) {
            s *= s2;
            out.add_term(m, if s < 0 { -c.clone() } else { c.clone() });
        }
    }
    Ok(out)
}

// ---- the differential on generators ----

/// One term of the differential: the lower corolla `(|I₁|+l, |J₁|, b)` feeds `l`
/// of its outputs into the upper corolla `(|I₂|, |J₂|+l, c)`. Index sets are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub b: usize,
    pub c: usize,
    pub l: usize,
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
}

impl Splitting {
    pub fn lower(&self) -> GenKey {
        GenKey { m: self.i1.len() + self.l, n: self.j1.len(), a: self.b }
    }

    pub fn upper(&self) -> GenKey {
        GenKey { m: self.i2.len(), n: self.j2.len() + self.l, a: self.c }
    }
}

fn split_set(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0..1usize << n)
        .map(|mask| (0..n).partition::<Vec<usize>, _>(|&i| mask >> i & 1 == 1))
        .collect()
}

/// All splittings with `l ≥ 1`, `a = b + c + l − 1` and both corollas valid.
pub fn ibl_differential(key: GenKey) -> Result<Vec<Splitting>, HolieError> {
    if !key.is_valid() {
        return Err(HolieError::InvalidKey(key.m, key.n, key.a));
    }
    let mut out = Vec::new();
    for l in 1..=key.a + 1 {
        for b in 0..=key.a + 1 - l {
            let c = key.a + 1 - l - b;
            for (i1, i2) in split_set(key.m) {
                for (j1, j2) in split_set(key.n) {
                    let s = Splitting { b, c, l, i1: i1.clone(), i2: i2.clone(), j1, j2 };
                    if s.lower().is_valid() && s.upper().is_valid() {
                        out.push(s);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The image of one splitting: `ρ(upper) ∘_l ρ(lower)` with pass-through units,
/// relabelled onto `I₁ ⊔ I₂` and `J₁ ⊔ J₂`, with the shifted-picture sign and
/// the multiplicity `C(m₁, l) / C(m, |I₁|)`.
pub fn splitting_image(key: GenKey, s: &Splitting, d: i32) -> Result<HSum, HolieError> {
    let (lo, up) = (s.lower(), s.upper());
    let mut g1 = rho_generator(lo, d)?;
    if !s.j2.is_empty() {
        g1 = hcompose_sums(&g1, &HSum::from_graph(&unit_power(s.j2.len(), d)))?;
    }
    let mut g2 = rho_generator(up, d)?;
    let pass = lo.m - s.l;
    if pass > 0 {
        g2 = hcompose_sums(&HSum::from_graph(&unit_power(pass, d)), &g2)?;
    }
    let glued = vcompose_sums(&g2, &g1)?;
    let vmap: Vec<usize> = s.j1.iter().chain(&s.j2).copied().collect();
    let bmap: Vec<usize> = s.i1.iter().chain(&s.i2).copied().collect();
    let mut sign = 1;
    if is_odd(d) {
        let (k1, k2) = (lo.edges() as i64, up.edges() as i64);
        let pu = 2 - k2 + up.m as i64 - up.n as i64;
        sign = sequence_sign(&vmap) * sequence_sign(&bmap);
        if (s.j2.len() as i64 * (k1 - 2)) % 2 != 0 {
            sign = -sign;
        }
        if (pass as i64 * pu) % 2 != 0 {
            sign = -sign;
        }
    }
    let coeff = binomial(lo.m, s.l) / binomial(key.m, s.i1.len()) * q(sign as i64);
    let mut out = HSum::zero(key.m, key.n, d);
    for g in glued.graphs() {
        let c = g.coeff() * &coeff;
        out.add_graph(&g.relabel(&vmap, &bmap).with_coeff(c))?;
    }
    Ok(out)
}

/// `ρ(δ gen)`: the sum of all splitting images. Vanishes when ρ is a chain map.
pub fn graph_relation(key: GenKey, d: i32) -> Result<HSum, HolieError> {
    let mut out = HSum::zero(key.m, key.n, d);
    for s in ibl_differential(key)? {
        out.add_scaled(&splitting_image(key, &s, d)?, &Q::from_integer(1.into()))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::darboux_alphabet;

    fn w(ls: &[Letter]) -> CycWord {
        CycWord::canonical(ls).unwrap().0
    }

    #[test]
    fn key_basics() {
        assert!(GenKey::new(1, 1, 0).is_err());
        assert!(GenKey::new(1, 2, 0).unwrap().is_exceptional());
        assert_eq!(GenKey::new(1, 1, 1).unwrap().edges(), 3);
        assert_eq!(GenKey::new(2, 2, 0).unwrap().degree(1), -1);
    }

    #[test]
    fn rho_small_keys() {
        let r = rho_generator(GenKey::new(1, 2, 0).unwrap(), 1).unwrap();
        assert_eq!(r.len(), 1);
        let r = rho_generator(GenKey::new(1, 1, 1).unwrap(), 1).unwrap();
        assert_eq!(r.len(), 1);
        let g = &r.graphs()[0];
        assert_eq!((g.n_vertices(), g.n_boundaries(), g.edge_count()), (1, 1, 3));
    }

    #[test]
    fn induced_matches_direct() {
        let th = ThetaFamily::darboux();
        let al = darboux_alphabet(1);
        let words = vec![w(&[al[0], al[1], al[0], al[1]])];
        for key in keys_for(1, 4) {
            let a = symmetrize(&induced_op(&th, key, &words).unwrap(), 1);
            let b = direct_op_key(&th, key, &words);
            assert_eq!(a, b, "key {key}");
        }
    }

    fn x(alpha: u32) -> Letter {
        Letter::Shifted { alpha, p: 0 }
    }

    #[test]
    fn necklace_small() {
        let a = w(&[x(1)]);
        assert!(necklace_bracket(1, &a, &a).unwrap().is_zero());
        assert!(necklace_cobracket(1, &a).unwrap().is_zero());
        assert!(necklace_cobracket_direct(1, &a).unwrap().is_zero());
        assert!(necklace_bracket(1, &w(&[x(2)]), &a).is_err());
        let ab = w(&[x(1), x(2)]);
        let c = necklace_cobracket(2, &ab).unwrap();
        assert_eq!(c, necklace_cobracket_direct(2, &ab).unwrap());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn doubling_round_trip() {
        let v = w(&[x(1), x(2), x(2)]);
        let dv = double_word(2, &v).unwrap();
        assert_eq!(dv.len(), 6);
        assert_eq!(undouble_word(&dv), Some(v));
        let bad = w(&[Letter::Doubled { alpha: 1, copy: 2 }, Letter::Doubled { alpha: 2, copy: 1 }]);
        assert_eq!(undouble_word(&bad), None);
    }

    #[test]
    fn embedding() {
        let (e, s) = embed_u(&w(&[x(1)])).unwrap();
        assert_eq!(s, 1);
        assert_eq!(e.letters(), &[Letter::Expanded { alpha: 1, l: 0, p: 0 }, Letter::Expanded { alpha: 1, l: 1, p: 0 }]);
        let v = w(&[Letter::Shifted { alpha: 1, p: 1 }, x(1), Letter::Shifted { alpha: 1, p: 2 }]);
        assert_eq!(embedded_length(&v), 3 + 4 + 2);
        let (e, s) = embed_u(&v).unwrap();
        assert_eq!(e.len(), 9);
        assert_eq!(project_u(&e), Some((v, s)));
        let stray = w(&[Letter::Expanded { alpha: 1, l: 1, p: 1 }, Letter::Expanded { alpha: 1, l: 0, p: 1 }, Letter::Expanded { alpha: 1, l: 2, p: 1 }]);
        assert_eq!(project_u(&stray), None);
    }

    #[test]
    fn differential_records() {
        let inv = ibl_differential(GenKey::new(1, 1, 1).unwrap()).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!((inv[0].lower(), inv[0].upper(), inv[0].l), (GenKey { m: 2, n: 1, a: 0 }, GenKey { m: 1, n: 2, a: 0 }, 2));
        let recs = ibl_differential(GenKey::new(1, 2, 1).unwrap()).unwrap();
        assert!(!recs.is_empty());
        assert!(recs.iter().all(|r| r.l == 1 || r.l == 2));
        assert!(ibl_differential(GenKey::new(1, 2, 0).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn chain_map_on_graphs() {
        for d in [0, 1] {
            for key in GenKey::all_up_to(5) {
                assert!(graph_relation(key, d).unwrap().is_zero(), "{key} d={d}");
            }
        }
    }
}
