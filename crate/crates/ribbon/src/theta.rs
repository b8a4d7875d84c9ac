//! Families of cyclically (skew)invariant products `Θ_k` on letters.

use crate::scalar::{q, q_to_string, qser, LinComb, Q};
use crate::words::{canonical_rotation, rotation_sign, total_degree, Letter};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type ThetaFn = Arc<dyn Fn(&[Letter]) -> Q + Send + Sync>;

#[derive(Clone)]
pub enum ThetaKind {
    Zero,
    /// Symplectic pairing on the doubled alphabet.
    Darboux,
    /// The graded family on expanded letters `e^{l_p}_α`.
    Graded,
    /// Values on canonical (minimal) rotations, extended by the cyclic rule.
    Table(BTreeMap<Vec<Letter>, Q>),
    /// Arbitrary rule; used for mutation tests.
    Custom(ThetaFn),
}

#[derive(Clone)]
pub struct ThetaFamily {
    pub d: i32,
    kind: ThetaKind,
    lambdas: BTreeMap<usize, Q>,
    tag: String,
}

impl fmt::Debug for ThetaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ThetaFamily({}, d={})", self.tag, self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThetaError {
    #[error("entry {0} is outside the degree support")]
    OutOfSupport(String),
    #[error("entry {0} is killed by its cyclic symmetry")]
    SymmetryClash(String),
    #[error("conflicting values for the cyclic class of {0}")]
    Conflict(String),
    #[error("empty letter sequence")]
    Empty,
}

/// Shifted degrees `|w| - d` used by the cyclic rule.
pub fn shifted_degrees(d: i32, letters: &[Letter]) -> Vec<i64> {
    letters.iter().map(|l| l.degree() - d as i64).collect()
}

/// Whether `Σ|w| = dk - d - 1` for a sequence of length `k`.
pub fn in_support(d: i32, letters: &[Letter]) -> bool {
    let k = letters.len() as i64;
    let d = d as i64;
    total_degree(letters) == d * k - d - 1
}

fn show(letters: &[Letter]) -> String {
    let v: Vec<String> = letters.iter().map(|l| l.to_string()).collect();
    format!("[{}]", v.join(" "))
}

impl ThetaFamily {
    pub fn zero(d: i32) -> Self {
        ThetaFamily { d, kind: ThetaKind::Zero, lambdas: BTreeMap::new(), tag: "zero".into() }
    }

    /// `Θ₂(x^{(1)}_α, x^{(2)}_α) = 1 = -Θ₂(x^{(2)}_α, x^{(1)}_α)`, d = 1.
    pub fn darboux() -> Self {
        ThetaFamily { d: 1, kind: ThetaKind::Darboux, lambdas: BTreeMap::new(), tag: "darboux".into() }
    }

    /// Graded family on expanded letters, d = 1.
    pub fn graded() -> Self {
        ThetaFamily { d: 1, kind: ThetaKind::Graded, lambdas: BTreeMap::new(), tag: "graded".into() }
    }

    pub fn custom(d: i32, tag: &str, f: ThetaFn) -> Self {
        ThetaFamily { d, kind: ThetaKind::Custom(f), lambdas: BTreeMap::new(), tag: tag.into() }
    }

    /// Builds a family from values on arbitrary representatives.
    pub fn table(d: i32, entries: &[(Vec<Letter>, Q)]) -> Result<Self, ThetaError> {
        let mut vals: BTreeMap<Vec<Letter>, Q> = BTreeMap::new();
        for (seq, v) in entries {
            if seq.is_empty() {
                return Err(ThetaError::Empty);
            }
            if v.is_zero() {
                continue;
            }
            if !in_support(d, seq) {
                return Err(ThetaError::OutOfSupport(show(seq)));
            }
            let (rep, s) =
                canonical_rotation(seq, &shifted_degrees(d, seq)).ok_or_else(|| ThetaError::SymmetryClash(show(seq)))?;
            let val = if s < 0 { -v.clone() } else { v.clone() };
            if let Some(old) = vals.get(&rep) {
                if *old != val {
                    return Err(ThetaError::Conflict(show(seq)));
                }
            }
            vals.insert(rep, val);
        }
        Ok(ThetaFamily { d, kind: ThetaKind::Table(vals), lambdas: BTreeMap::new(), tag: "table".into() })
    }

    /// Random integer values in `[-3, 3]` on the support over `alphabet`, arities `2..=max_arity`.
    pub fn random_table(d: i32, alphabet: &[Letter], max_arity: usize, seed: u64, density: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for k in 2..=max_arity {
            for seq in sequences(alphabet, k) {
                if !in_support(d, &seq) {
                    continue;
                }
                let Some((rep, _)) = canonical_rotation(&seq, &shifted_degrees(d, &seq)) else { continue };
                if !seen.insert(rep.clone()) {
                    continue;
                }
                if rng.gen_bool(density) {
                    let v: i64 = rng.gen_range(-3..=3);
                    entries.push((rep, q(v)));
                }
            }
        }
        let mut f = Self::table(d, &entries).expect("canonical representatives are consistent");
        f.tag = format!("random(seed={seed})");
        f
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn kind(&self) -> &ThetaKind {
        &self.kind
    }

    /// Multiplies `Θ_k` by `λ_k` for every listed arity.
    pub fn rescale(&self, lambdas: &[(usize, Q)]) -> Self {
        let mut out = self.clone();
        for (k, l) in lambdas {
            let cur = out.lambdas.get(k).cloned().unwrap_or_else(Q::one);
            out.lambdas.insert(*k, cur * l);
        }
        let desc: Vec<String> = lambdas.iter().map(|(k, l)| format!("{k}:{}", q_to_string(l))).collect();
        out.tag = format!("{}*[{}]", self.tag, desc.join(","));
        out
    }

    /// Cheap necessary condition for `Θ_k` to be nonzero on some `k` of `letters`.
    pub fn may_act<'a>(&self, k: usize, letters: impl IntoIterator<Item = &'a Letter>) -> bool {
        if self.lambdas.get(&k).is_some_and(|l| l.is_zero()) {
            return false;
        }
        match &self.kind {
            ThetaKind::Zero => false,
            ThetaKind::Darboux => k == 2 && letters.into_iter().filter(|l| matches!(l, Letter::Doubled { .. })).count() >= 2,
            ThetaKind::Graded => {
                k >= 2
                    && letters.into_iter().filter(|l| matches!(l, Letter::Expanded { p, .. } if *p as usize + 2 == k)).count()
                        >= k
            }
            ThetaKind::Table(vals) => vals.keys().any(|s| s.len() == k),
            ThetaKind::Custom(_) => true,
        }
    }

    pub fn eval(&self, letters: &[Letter]) -> Q {
        if letters.is_empty() || !in_support(self.d, letters) {
            return Q::zero();
        }
        let base = match &self.kind {
            ThetaKind::Zero => return Q::zero(),
            ThetaKind::Darboux => darboux_value(letters),
            ThetaKind::Graded => graded_value(letters),
            ThetaKind::Table(vals) => {
                match canonical_rotation(letters, &shifted_degrees(self.d, letters)) {
                    Some((rep, s)) => match vals.get(&rep) {
                        Some(v) => {
                            if s < 0 {
                                -v.clone()
                            } else {
                                v.clone()
                            }
                        }
                        None => Q::zero(),
                    },
                    None => Q::zero(),
                }
            }
            ThetaKind::Custom(f) => f(letters),
        };
        match self.lambdas.get(&letters.len()) {
            Some(l) => base * l,
            None => base,
        }
    }

    pub fn to_json(&self, alphabet: &[Letter], max_arity: usize) -> serde_json::Value {
        let mut entries = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for k in 1..=max_arity {
            for seq in sequences(alphabet, k) {
                let Some((rep, _)) = canonical_rotation(&seq, &shifted_degrees(self.d, &seq)) else { continue };
                if !seen.insert(rep.clone()) {
                    continue;
                }
                let v = self.eval(&rep);
                if !v.is_zero() {
                    entries.push(TableEntry { letters: rep, value: v });
                }
            }
        }
        serde_json::to_value(FamilyJson { d: self.d, entries }).expect("family serialises")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let fj: FamilyJson = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let entries: Vec<(Vec<Letter>, Q)> = fj.entries.into_iter().map(|e| (e.letters, e.value)).collect();
        Self::table(fj.d, &entries).map_err(|e| e.to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    letters: Vec<Letter>,
    #[serde(with = "qser")]
    value: Q,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    d: i32,
    entries: Vec<TableEntry>,
}

fn darboux_value(letters: &[Letter]) -> Q {
    match letters {
        [Letter::Doubled { alpha: a, copy: 1 }, Letter::Doubled { alpha: b, copy: 2 }] if a == b => Q::one(),
        [Letter::Doubled { alpha: a, copy: 2 }, Letter::Doubled { alpha: b, copy: 1 }] if a == b => -Q::one(),
        _ => Q::zero(),
    }
}

/// `Θ_{k+2}` on `(e^{l_1}_{k}, …)`: nonzero only when every letter has the same
/// α and p = k, and the l-indices read `(j, j+1, …, k+1, 0, …, j-1)`. The value
/// is 1 for j = 0 and `(-1)^{j+k}` otherwise. Tags increase along the hyperedge
/// cycle because boundaries leave a consumed letter towards `σ₁⁻¹` of its edge.
fn graded_value(letters: &[Letter]) -> Q {
    let n = letters.len();
    if n < 2 {
        return Q::zero();
    }
    let k = (n - 2) as u32;
    let mut ls = Vec::with_capacity(n);
    let mut alpha0 = None;
    for l in letters {
        match *l {
            Letter::Expanded { alpha, l, p } if p == k => {
                if *alpha0.get_or_insert(alpha) != alpha {
                    return Q::zero();
                }
                ls.push(l);
            }
            _ => return Q::zero(),
        }
    }
    let j = ls[0];
    if j > k + 1 {
        return Q::zero();
    }
    for (i, &l) in ls.iter().enumerate() {
        let want = (j + i as u32) % (k + 2);
        if l != want {
            return Q::zero();
        }
    }
    if j == 0 || (j + k).is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

/// All sequences of length `k` over `alphabet`.
pub fn sequences(alphabet: &[Letter], k: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for s in &out {
            for &a in alphabet {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub fn darboux_alphabet(n: u32) -> Vec<Letter> {
    (1..=n).flat_map(|alpha| [Letter::Doubled { alpha, copy: 1 }, Letter::Doubled { alpha, copy: 2 }]).collect()
}

pub fn graded_alphabet(n: u32, pmax: u32) -> Vec<Letter> {
    let mut out = Vec::new();
    for alpha in 1..=n {
        for p in 0..=pmax {
            for l in 0..=p + 1 {
                out.push(Letter::Expanded { alpha, l, p });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl InvarianceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Θ(rotate(s)) = κ·Θ(s)` and the degree support on every sequence up to `max_len`.
pub fn check_cyclic_invariance(f: &ThetaFamily, max_len: usize, alphabet: &[Letter]) -> InvarianceReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for k in 1..=max_len {
        for seq in sequences(alphabet, k) {
            checked += 1;
            let v = f.eval(&seq);
            if !v.is_zero() && !in_support(f.d, &seq) {
                violations.push(format!("{} = {} outside support", show(&seq), q_to_string(&v)));
            }
            let mut rot = seq[1..].to_vec();
            rot.push(seq[0]);
            let kappa = rotation_sign(&shifted_degrees(f.d, &seq), 1);
            let lhs = f.eval(&rot);
            let rhs = if kappa < 0 { -v.clone() } else { v.clone() };
            if lhs != rhs {
                violations.push(format!(
                    "Θ{} = {} but rotation rule gives {}",
                    show(&rot),
                    q_to_string(&lhs),
                    q_to_string(&rhs)
                ));
            }
        }
    }
    InvarianceReport { checked, violations }
}

/// Θ values of a family on all canonical representatives up to `max_len`.
pub fn value_table(f: &ThetaFamily, alphabet: &[Letter], max_len: usize) -> LinComb<Vec<Letter>> {
    let mut out = LinComb::new();
    for k in 1..=max_len {
        for seq in sequences(alphabet, k) {
            out.add_term(seq.clone(), f.eval(&seq));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dbl(alpha: u32, copy: u8) -> Letter {
        Letter::Doubled { alpha, copy }
    }

    fn e(l: u32, p: u32) -> Letter {
        Letter::Expanded { alpha: 1, l, p }
    }

    #[test]
    fn darboux_values() {
        let f = ThetaFamily::darboux();
        assert_eq!(f.eval(&[dbl(1, 1), dbl(1, 2)]), q(1));
        assert_eq!(f.eval(&[dbl(1, 2), dbl(1, 1)]), q(-1));
        assert_eq!(f.eval(&[dbl(1, 1), dbl(2, 1)]), q(0));
        assert!(check_cyclic_invariance(&f, 2, &darboux_alphabet(2)).ok());
    }

    #[test]
    fn graded_values() {
        let f = ThetaFamily::graded();
        assert_eq!(f.eval(&[e(0, 0), e(1, 0)]), q(1));
        assert_eq!(f.eval(&[e(1, 0), e(0, 0)]), q(-1));
        assert_eq!(f.eval(&[e(1, 1), e(2, 1), e(0, 1)]), q(1));
        assert_eq!(f.eval(&[e(0, 1), e(1, 1), e(2, 1)]), q(1));
        // the rotation rule forces the j = 2, k = 1 value
        assert_eq!(f.eval(&[e(2, 1), e(0, 1), e(1, 1)]), q(-1));
        assert_eq!(f.eval(&[e(1, 1), e(0, 1), e(2, 1)]), q(0));
        let rep = check_cyclic_invariance(&f, 5, &graded_alphabet(1, 2));
        assert!(rep.ok(), "{:?}", rep.violations);
    }

    #[test]
    fn table_extension_is_invariant() {
        let alphabet = [Letter::Free { id: 0, deg: 0 }, Letter::Free { id: 1, deg: 1 }, Letter::Free { id: 2, deg: -1 }];
        let f = ThetaFamily::random_table(1, &alphabet, 4, 5, 0.7);
        assert!(check_cyclic_invariance(&f, 4, &alphabet).ok());
    }

    #[test]
    fn rescale_scales_by_arity() {
        let f = ThetaFamily::darboux().rescale(&[(2, q(2))]);
        assert_eq!(f.eval(&[dbl(1, 1), dbl(1, 2)]), q(2));
        assert!(check_cyclic_invariance(&f, 3, &darboux_alphabet(1)).ok());
    }

    #[test]
    fn table_rejects_bad_entries() {
        let a = Letter::Free { id: 0, deg: 0 };
        assert!(matches!(ThetaFamily::table(1, &[(vec![a, a, a], q(1))]), Err(ThetaError::OutOfSupport(_))));
        let b = Letter::Free { id: 1, deg: 0 };
        assert!(matches!(ThetaFamily::table(1, &[(vec![b, b], q(1))]), Err(ThetaError::SymmetryClash(_))));
    }
}
