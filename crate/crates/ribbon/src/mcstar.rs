//! Graded polynomials in `x_i, p^i, ħ` with the normal-ordered star product,
//! the ħ-bracket, and Maurer–Cartan checks.

use crate::holieb::{sym_op_key, GenKey, HolieError};
use crate::scalar::{factorial, q_to_string, LinComb, Q};
use crate::theta::ThetaFamily;
use crate::verify::Report;
use crate::words::CycWord;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("ħ does not divide the commutator; sign conventions are inconsistent")]
    NotDivisible,
    #[error("support condition violated by {0}")]
    Support(String),
    #[error("bad polynomial description: {0}")]
    Parse(String),
    #[error("{0}")]
    Holie(#[from] HolieError),
}

/// Variable names and degrees. Generator `i < n` is `x_i`, generator `n + i` is `p^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCtx {
    pub d: i32,
    pub names: Vec<String>,
    pub x_degrees: Vec<i64>,
}

impl PolyCtx {
    /// `|p^i| = 2d − |x_i|` holds by construction.
    pub fn new(d: i32, names: Vec<String>, x_degrees: Vec<i64>) -> Arc<PolyCtx> {
        assert_eq!(names.len(), x_degrees.len());
        Arc::new(PolyCtx { d, names, x_degrees })
    }

    pub fn n_vars(&self) -> usize {
        self.x_degrees.len()
    }

    fn gen_degree(&self, g: usize) -> i64 {
        let n = self.n_vars();
        if g < n {
            self.x_degrees[g]
        } else {
            2 * self.d as i64 - self.x_degrees[g - n]
        }
    }

    fn gen_odd(&self, g: usize) -> bool {
        self.gen_degree(g).rem_euclid(2) == 1
    }

    fn gen_name(&self, g: usize) -> String {
        let n = self.n_vars();
        if g < n {
            format!("x_{}", self.names[g])
        } else {
            format!("p^{}", self.names[g - n])
        }
    }
}

/// Normal-ordered monomial: generators in increasing index with exponents, then `ħ^hbar`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    pub gens: Vec<(usize, u32)>,
    pub hbar: u32,
}

impl Mono {
    pub fn gen(g: usize) -> Mono {
        Mono { gens: vec![(g, 1)], hbar: 0 }
    }

    pub fn hbar(k: u32) -> Mono {
        Mono { gens: Vec::new(), hbar: k }
    }

    /// Polynomial degree (number of x and p factors).
    pub fn poly_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.1).sum()
    }

    fn degree(&self, ctx: &PolyCtx) -> i64 {
        self.gens.iter().map(|&(g, e)| ctx.gen_degree(g) * e as i64).sum::<i64>() + 2 * ctx.d as i64 * self.hbar as i64
    }

    fn odd_count(&self, ctx: &PolyCtx, pred: impl Fn(usize) -> bool) -> usize {
        self.gens.iter().filter(|&&(g, _)| pred(g) && ctx.gen_odd(g)).count()
    }
}

fn mul_mono(ctx: &PolyCtx, a: &Mono, b: &Mono) -> Option<(Mono, i32)> {
    let mut sign = 1;
    for &(gb, _) in &b.gens {
        if !ctx.gen_odd(gb) {
            continue;
        }
        if a.gens.iter().any(|&(ga, _)| ga == gb) {
            return None;
        }
        if a.odd_count(ctx, |ga| ga > gb) % 2 == 1 {
            sign = -sign;
        }
    }
    let mut map: BTreeMap<usize, u32> = a.gens.iter().copied().collect();
    for &(g, e) in &b.gens {
        *map.entry(g).or_insert(0) += e;
    }
    Some((Mono { gens: map.into_iter().collect(), hbar: a.hbar + b.hbar }, sign))
}

/// Derivative by `g` from the left (`left = true`) or from the right.
fn derive(ctx: &PolyCtx, m: &Mono, g: usize, left: bool) -> Option<(Mono, i64)> {
    let pos = m.gens.iter().position(|&(h, _)| h == g)?;
    let e = m.gens[pos].1;
    let mut c = e as i64;
    if ctx.gen_odd(g) {
        let passed = if left { m.odd_count(ctx, |h| h < g) } else { m.odd_count(ctx, |h| h > g) };
        if passed % 2 == 1 {
            c = -c;
        }
    }
    let mut out = m.clone();
    if e == 1 {
        out.gens.remove(pos);
    } else {
        out.gens[pos].1 -= 1;
    }
    Some((out, c))
}

/// Finite sum of monomials with truncation bounds on the ħ power and on the
/// weight `poly degree + 2·(ħ power)`; both are ideals for the star product.
#[derive(Debug, Clone)]
pub struct PolySeries {
    pub ctx: Arc<PolyCtx>,
    pub terms: LinComb<Mono>,
    pub max_hbar: Option<u32>,
    pub max_weight: Option<u32>,
}

impl PartialEq for PolySeries {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl PolySeries {
    pub fn zero(ctx: &Arc<PolyCtx>) -> PolySeries {
        PolySeries { ctx: ctx.clone(), terms: LinComb::new(), max_hbar: None, max_weight: None }
    }

    pub fn constant(ctx: &Arc<PolyCtx>, c: Q) -> PolySeries {
        PolySeries::monomial(ctx, Mono::default(), c)
    }

    pub fn monomial(ctx: &Arc<PolyCtx>, m: Mono, c: Q) -> PolySeries {
        let mut p = PolySeries::zero(ctx);
        p.terms.add_term(m, c);
        p
    }

    pub fn x(ctx: &Arc<PolyCtx>, i: usize) -> PolySeries {
        PolySeries::monomial(ctx, Mono::gen(i), Q::one())
    }

    pub fn p(ctx: &Arc<PolyCtx>, i: usize) -> PolySeries {
        PolySeries::monomial(ctx, Mono::gen(ctx.n_vars() + i), Q::one())
    }

    pub fn truncated(mut self, max_hbar: Option<u32>, max_weight: Option<u32>) -> PolySeries {
        self.max_hbar = max_hbar;
        self.max_weight = max_weight;
        self.apply_truncation();
        self
    }

    fn keeps(&self, m: &Mono) -> bool {
        self.max_hbar.is_none_or(|h| m.hbar <= h) && self.max_weight.is_none_or(|w| m.poly_degree() + 2 * m.hbar <= w)
    }

    fn apply_truncation(&mut self) {
        let keep: LinComb<Mono> = self.terms.iter().filter(|(m, _)| self.keeps(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        self.terms = keep;
    }

    fn like(&self, other: &PolySeries) -> Result<PolySeries, McError> {
        if self.ctx != other.ctx {
            return Err(McError::ContextMismatch);
        }
        let min = |a: Option<u32>, b: Option<u32>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        let mut out = PolySeries::zero(&self.ctx);
        out.max_hbar = min(self.max_hbar, other.max_hbar);
        out.max_weight = min(self.max_weight, other.max_weight);
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn add(&self, other: &PolySeries) -> Result<PolySeries, McError> {
        self.add_scaled(other, &Q::one())
    }

    pub fn add_scaled(&self, other: &PolySeries, s: &Q) -> Result<PolySeries, McError> {
        let mut out = self.like(other)?;
        out.terms = self.terms.clone();
        out.terms.add_scaled(&other.terms, s);
        out.apply_truncation();
        Ok(out)
    }

    pub fn scaled(&self, s: &Q) -> PolySeries {
        let mut out = self.clone();
        out.terms = self.terms.scaled(s);
        out
    }

    /// Graded commutative product.
    pub fn mul(&self, other: &PolySeries) -> Result<PolySeries, McError> {
        let mut out = self.like(other)?;
        for (a, ca) in self.terms.iter() {
            for (b, cb) in other.terms.iter() {
                if let Some((m, s)) = mul_mono(&self.ctx, a, b) {
                    if out.keeps(&m) {
                        let c = ca * cb;
                        out.terms.add_term(m, if s < 0 { -c } else { c });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Degrees of the homogeneous components.
    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.terms.keys().map(|m| m.degree(&self.ctx)).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn homogeneous_part(&self, deg: i64) -> PolySeries {
        let mut out = self.clone();
        out.terms = self.terms.iter().filter(|(m, _)| m.degree(&self.ctx) == deg).map(|(m, c)| (m.clone(), c.clone())).collect();
        out
    }

    /// Divides by ħ; fails if some term has no ħ.
    pub fn div_hbar(&self) -> Result<PolySeries, McError> {
        let mut out = self.clone();
        out.terms = LinComb::new();
        for (m, c) in self.terms.iter() {
            if m.hbar == 0 {
                return Err(McError::NotDivisible);
            }
            let mut m = m.clone();
            m.hbar -= 1;
            out.terms.add_term(m, c.clone());
        }
        Ok(out)
    }

    /// Sets every `p` to zero.
    pub fn at_p_zero(&self) -> PolySeries {
        let n = self.ctx.n_vars();
        let mut out = self.clone();
        out.terms = self.terms.iter().filter(|(m, _)| m.gens.iter().all(|&(g, _)| g < n)).map(|(m, c)| (m.clone(), c.clone())).collect();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "coeff": q_to_string(c),
                    "gens": m.gens.iter().map(|&(g, e)| serde_json::json!([self.ctx.gen_name(g), e])).collect::<Vec<_>>(),
                    "hbar": m.hbar,
                })
            })
            .collect();
        serde_json::json!({
            "context": &*self.ctx,
            "max_hbar": self.max_hbar,
            "max_weight": self.max_weight,
            "terms": terms,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PolySeries, McError> {
        let perr = |s: &str| McError::Parse(s.to_string());
        let ctx: PolyCtx = serde_json::from_value(v["context"].clone()).map_err(|e| McError::Parse(e.to_string()))?;
        if ctx.names.len() != ctx.x_degrees.len() {
            return Err(perr("names and degrees differ in length"));
        }
        let ctx = Arc::new(ctx);
        let lookup = |name: &str| -> Option<usize> { (0..2 * ctx.n_vars()).find(|&g| ctx.gen_name(g) == name) };
        let mut out = PolySeries::zero(&ctx);
        out.max_hbar = v["max_hbar"].as_u64().map(|x| x as u32);
        out.max_weight = v["max_weight"].as_u64().map(|x| x as u32);
        for t in v["terms"].as_array().ok_or_else(|| perr("terms must be a list"))? {
            let c = crate::scalar::q_parse(t["coeff"].as_str().ok_or_else(|| perr("coeff must be a string"))?)
                .map_err(|e| McError::Parse(e.to_string()))?;
            let mut m = PolySeries::monomial(&ctx, Mono::hbar(t["hbar"].as_u64().unwrap_or(0) as u32), c);
            for g in t["gens"].as_array().ok_or_else(|| perr("gens must be a list"))? {
                let name = g[0].as_str().ok_or_else(|| perr("generator name"))?;
                let e = g[1].as_u64().ok_or_else(|| perr("exponent"))?;
                let gi = lookup(name).ok_or_else(|| McError::Parse(format!("unknown generator {name}")))?;
                for _ in 0..e {
                    m = m.mul(&PolySeries::monomial(&ctx, Mono::gen(gi), Q::one()))?;
                }
            }
            out = out.add(&m)?;
        }
        out.apply_truncation();
        Ok(out)
    }
}

impl fmt::Display for PolySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = q_to_string(c);
                for &(g, e) in &m.gens {
                    s.push('·');
                    s.push_str(&self.ctx.gen_name(g));
                    if e > 1 {
                        s.push_str(&format!("^{e}"));
                    }
                }
                if m.hbar > 0 {
                    s.push_str(&format!("·ħ^{}", m.hbar));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `f ⋆ g = Σ_k ħ^k/k! Σ (f ∂⃖_{p^{i₁}}…∂⃖_{p^{i_k}}) (∂⃗_{x_{i_k}}…∂⃗_{x_{i₁}} g)`.
pub fn star(f: &PolySeries, g: &PolySeries) -> Result<PolySeries, McError> {
    let mut out = f.like(g)?;
    let ctx = f.ctx.clone();
    let n = ctx.n_vars();
    for (a, ca) in f.terms.iter() {
        for (b, cb) in g.terms.iter() {
            // pairs after k contractions, with accumulated integer factors
            let mut level: Vec<(Mono, Mono, i64)> = vec![(a.clone(), b.clone(), 1)];
            let mut k = 0u32;
            while !level.is_empty() {
                let norm = Q::from_integer(1.into()) / factorial(k as usize);
                for (fa, gb, c) in &level {
                    if let Some((m, s)) = mul_mono(&ctx, fa, gb) {
                        let mut m = m;
                        m.hbar += k;
                        if out.keeps(&m) {
                            let v = ca * cb * &norm * Q::from_integer((c * s as i64).into());
                            out.terms.add_term(m, v);
                        }
                    }
                }
                let mut next = Vec::new();
                for (fa, gb, c) in &level {
                    for &(gp, _) in fa.gens.iter().filter(|&&(g, _)| g >= n) {
                        let i = gp - n;
                        if let (Some((f2, c1)), Some((g2, c2))) = (derive(&ctx, fa, gp, false), derive(&ctx, gb, i, true)) {
                            next.push((f2, g2, c * c1 * c2));
                        }
                    }
                }
                level = next;
                k += 1;
            }
        }
    }
    Ok(out)
}

/// `[f, g] = (f ⋆ g − (−1)^{|f||g|} g ⋆ f) / ħ`, bilinear over homogeneous parts.
pub fn hbar_bracket(f: &PolySeries, g: &PolySeries) -> Result<PolySeries, McError> {
    let mut out = f.like(g)?;
    // the quotient by ħ may reach one ħ beyond the operands' bound
    let mut wide = out.clone();
    wide.max_hbar = wide.max_hbar.map(|h| h + 1);
    wide.max_weight = wide.max_weight.map(|w| w + 2);
    for df in f.degrees() {
        for dg in g.degrees() {
            let (mut fp, mut gp) = (f.homogeneous_part(df), g.homogeneous_part(dg));
            fp.max_hbar = wide.max_hbar;
            fp.max_weight = wide.max_weight;
            gp.max_hbar = wide.max_hbar;
            gp.max_weight = wide.max_weight;
            let sign = if (df * dg).rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            let comm = star(&fp, &gp)?.add_scaled(&star(&gp, &fp)?, &-sign)?;
            let mut q = comm.div_hbar()?;
            q.max_hbar = out.max_hbar;
            q.max_weight = out.max_weight;
            q.apply_truncation();
            out = out.add(&q)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub passed: bool,
    pub residue_terms: usize,
    pub residue: String,
    pub degrees: Vec<i64>,
}

/// `Γ ⋆ Γ` up to the truncation carried by `gamma`.
pub fn check_mc(gamma: &PolySeries) -> Result<McReport, McError> {
    check_mc_filtered(gamma, None)
}

/// Sum of `weights[i]` over the `p^i` factors of `m`.
pub fn p_weight(ctx: &PolyCtx, m: &Mono, weights: &[u32]) -> u32 {
    let n = ctx.n_vars();
    m.gens.iter().filter(|&&(g, _)| g >= n).map(|&(g, e)| weights[g - n] * e).sum()
}

/// `Γ ⋆ Γ` restricted to p-weight `≤ max`, with `Γ` cut at the same bound.
/// Exact on that range whenever every term of `Γ` has x-weight below its
/// p-weight: then both factors of any contribution lie within the bound.
pub fn check_mc_p_weight(gamma: &PolySeries, weights: &[u32], max: u32) -> Result<McReport, McError> {
    check_mc_filtered(gamma, Some((weights, max)))
}

fn check_mc_filtered(gamma: &PolySeries, filter: Option<(&[u32], u32)>) -> Result<McReport, McError> {
    let n = gamma.ctx.n_vars();
    for (m, _) in gamma.terms.iter() {
        let has_x = m.gens.iter().any(|&(g, _)| g < n);
        let has_p = m.gens.iter().any(|&(g, _)| g >= n);
        if !(has_x && has_p) {
            return Err(McError::Support(PolySeries::monomial(&gamma.ctx, m.clone(), Q::one()).to_string()));
        }
    }
    let cut = |f: &PolySeries| -> PolySeries {
        let mut out = f.clone();
        if let Some((w, max)) = filter {
            out.terms = f.terms.iter().filter(|(m, _)| p_weight(&f.ctx, m, w) <= max).map(|(m, c)| (m.clone(), c.clone())).collect();
        }
        out
    };
    let g = cut(gamma);
    let r = cut(&star(&g, &g)?);
    let shown: String = if r.len() > 6 { format!("{} terms", r.len()) } else { r.to_string() };
    Ok(McReport { passed: r.is_zero(), residue_terms: r.len(), residue: shown, degrees: gamma.degrees() })
}

/// Variable context with one `x_w` per basis word, `|x_w|` the shifted word degree.
pub fn word_context(d: i32, basis: &[CycWord]) -> Arc<PolyCtx> {
    let names = basis.iter().map(|w| w.to_string()).collect();
    let degs = basis.iter().map(|w| w.shifted_degree(d)).collect();
    PolyCtx::new(d, names, degs)
}

/// Encodes the operations of `keys` induced by `theta` on the span of `basis`
/// on inputs of total length `≤ max_input_len` as `Γ = Σ ħ^a c · x^{outputs} p^{inputs}`.
/// Each coefficient is normalized so that the Fock action `Γ ▹ x^I = (Γ ⋆ x^I)|_{p=0}`
/// reproduces the operation on `x^I`.
pub fn encode_operations(
    theta: &ThetaFamily,
    basis: &[CycWord],
    keys: &[GenKey],
    max_input_len: usize,
) -> Result<PolySeries, McError> {
    let ctx = word_context(theta.d, basis);
    let index: BTreeMap<&CycWord, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let var_mono = |ws: &[CycWord]| -> Result<PolySeries, McError> {
        let mut m = PolySeries::constant(&ctx, Q::one());
        for w in ws {
            let i = *index.get(w).ok_or_else(|| McError::Parse(format!("{w} is outside the basis")))?;
            m = m.mul(&PolySeries::x(&ctx, i))?;
        }
        Ok(m)
    };
    let mut gamma = PolySeries::zero(&ctx);
    for &key in keys {
        for mono in crate::verify::monomials(basis, key.n, max_input_len, theta.d) {
            let out = sym_op_key(theta, key, &mono)?;
            if out.is_zero() {
                continue;
            }
            let xi = var_mono(&mono)?;
            let mut ps = PolySeries::constant(&ctx, Q::one());
            for w in &mono {
                ps = ps.mul(&PolySeries::p(&ctx, index[w]))?;
            }
            // action of the bare p-monomial on x^I
            let unit = star(&ps, &xi)?.at_p_zero();
            let (um, uc) = unit.terms.iter().next().map(|(m, c)| (m.clone(), c.clone())).expect("full contraction");
            debug_assert!(um.gens.is_empty());
            for (outs, c) in out.iter() {
                let xo = var_mono(outs)?;
                let term = xo.mul(&ps)?.mul(&PolySeries::monomial(&ctx, Mono::hbar(key.a as u32), Q::one()))?;
                gamma = gamma.add_scaled(&term, &(c / &uc))?;
            }
        }
    }
    Ok(gamma)
}

/// Encodes bracket and cobracket of `theta` on words of length `≤ weight` and
/// checks `Γ ⋆ Γ = 0` up to p-weight `weight`.
pub fn check_mc_encoding(theta: &ThetaFamily, alphabet: &[crate::words::Letter], weight: usize) -> Result<Report, McError> {
    let basis = crate::verify::basis_words(alphabet, weight);
    let keys = [GenKey { m: 1, n: 2, a: 0 }, GenKey { m: 2, n: 1, a: 0 }];
    let gamma = encode_operations(theta, &basis, &keys, weight)?;
    let weights: Vec<u32> = basis.iter().map(|w| w.len() as u32).collect();
    let r = check_mc_p_weight(&gamma, &weights, weight as u32)?;
    let mut rep = Report::new("mc");
    rep.cases = gamma.len();
    if !r.passed {
        rep.fail(format!("Γ⋆Γ at p-weight ≤ {weight}"), r.residue);
    }
    Ok(rep)
}

/// Applies `f` to an x-polynomial through the Fock action, forgetting ħ.
pub fn fock_action(f: &PolySeries, g: &PolySeries) -> Result<LinComb<Mono>, McError> {
    let r = star(f, g)?.at_p_zero();
    let mut out = LinComb::new();
    for (m, c) in r.terms.iter() {
        let mut m = m.clone();
        m.hbar = 0;
        out.add_term(m, c.clone());
    }
    Ok(out)
}


/// Random polynomial with at most `terms` monomials of polynomial degree in `1..=max_deg`.
pub fn random_poly<R: rand::Rng>(rng: &mut R, ctx: &Arc<PolyCtx>, terms: usize, max_deg: u32) -> PolySeries {
    let gens = 2 * ctx.n_vars();
    let mut out = PolySeries::zero(ctx);
    for _ in 0..terms {
        let deg = rng.gen_range(1..=max_deg.max(1));
        let mut m = PolySeries::monomial(ctx, Mono::hbar(rng.gen_range(0..2)), Q::from_integer(rng.gen_range(-3i64..=3).into()));
        for _ in 0..deg {
            m = m.mul(&PolySeries::monomial(ctx, Mono::gen(rng.gen_range(0..gens)), Q::one())).expect("same context");
        }
        out = out.add(&m).expect("same context");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_ctx() -> Arc<PolyCtx> {
        PolyCtx::new(1, vec!["a".into(), "b".into()], vec![0, 1])
    }

    fn ctx() -> Arc<PolyCtx> {
        PolyCtx::new(1, vec!["a".into(), "b".into(), "c".into()], vec![0, 1, 3])
    }

    #[test]
    fn canonical_commutator() {
        let c = PolyCtx::new(1, vec!["a".into()], vec![0]);
        let (x, p) = (PolySeries::x(&c, 0), PolySeries::p(&c, 0));
        let px = star(&p, &x).unwrap();
        let expect = p.mul(&x).unwrap().add(&PolySeries::monomial(&c, Mono::hbar(1), q(1))).unwrap();
        assert_eq!(px, expect);
        assert_eq!(star(&x, &p).unwrap(), x.mul(&p).unwrap());
        assert_eq!(hbar_bracket(&p, &x).unwrap(), PolySeries::constant(&c, q(1)));
    }

    #[test]
    fn p_free_factor_multiplies() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_poly(&mut rng, &c, 4, 3).at_p_zero();
        let g = random_poly(&mut rng, &c, 4, 3);
        assert_eq!(star(&f, &g).unwrap(), f.mul(&g).unwrap());
    }

    #[test]
    fn associative_and_jacobi() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = random_poly(&mut rng, &c, 3, 3);
            let g = random_poly(&mut rng, &c, 3, 3);
            let h = random_poly(&mut rng, &c, 3, 3);
            let l = star(&star(&f, &g).unwrap(), &h).unwrap();
            let r = star(&f, &star(&g, &h).unwrap()).unwrap();
            assert_eq!(l, r);
        }
    }

    fn homogeneous(f: PolySeries) -> (PolySeries, i64) {
        let d = f.degrees().into_iter().max_by_key(|&d| f.homogeneous_part(d).len()).unwrap_or(0);
        (f.homogeneous_part(d), d)
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi() {
        let c = small_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut nonzero = 0;
        for _ in 0..30 {
            let (f, df) = homogeneous(random_poly(&mut rng, &c, 8, 4));
            let (g, dg) = homogeneous(random_poly(&mut rng, &c, 8, 4));
            let (h, _) = homogeneous(random_poly(&mut rng, &c, 8, 4));
            let fg = hbar_bracket(&f, &g).unwrap();
            let gf = hbar_bracket(&g, &f).unwrap();
            // [f,g] = -(-1)^{|f||g|} [g,f]
            let s = if (df * dg).rem_euclid(2) == 1 { q(-1) } else { q(1) };
            assert!(fg.add_scaled(&gf, &s).unwrap().is_zero());
            let lhs = hbar_bracket(&f, &hbar_bracket(&g, &h).unwrap()).unwrap();
            let r1 = hbar_bracket(&fg, &h).unwrap();
            let r2 = hbar_bracket(&g, &hbar_bracket(&f, &h).unwrap()).unwrap();
            let sign = if (df * dg).rem_euclid(2) == 1 { q(-1) } else { q(1) };
            let res = lhs.add_scaled(&r1, &q(-1)).unwrap().add_scaled(&r2, &-sign).unwrap();
            assert!(res.is_zero(), "{res}");
            if !lhs.is_zero() {
                nonzero += 1;
            }
        }
        assert!(nonzero > 5, "{nonzero}");
    }

    #[test]
    fn mc_trivial_and_support() {
        let c = ctx();
        assert!(check_mc(&PolySeries::zero(&c)).unwrap().passed);
        assert!(matches!(check_mc(&PolySeries::x(&c, 0)), Err(McError::Support(_))));
    }
}
