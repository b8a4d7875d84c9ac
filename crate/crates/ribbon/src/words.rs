//! Graded letters, cyclic words and formal sums of tensor products of cyclic words.

use crate::permcore::{Perm, PermError};
use crate::scalar::{q_to_string, qser, LinComb, Q};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A homogeneous basis letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "LetterJson", into = "LetterJson")]
pub enum Letter {
    /// `x_α[-p]`, degree `p`.
    Shifted { alpha: u32, p: u32 },
    /// `x^{(copy)}_α` in the doubled alphabet, degree 0.
    Doubled { alpha: u32, copy: u8 },
    /// `e^{l_p}_α`, degree `p` when `l = 0` and 0 otherwise.
    Expanded { alpha: u32, l: u32, p: u32 },
    /// Anonymous letter with an explicit degree.
    Free { id: u32, deg: i32 },
}

impl Letter {
    pub fn plain(alpha: u32) -> Letter {
        Letter::Shifted { alpha, p: 0 }
    }

    pub fn degree(&self) -> i64 {
        match *self {
            Letter::Shifted { p, .. } => p as i64,
            Letter::Doubled { .. } => 0,
            Letter::Expanded { l, p, .. } => {
                if l == 0 {
                    p as i64
                } else {
                    0
                }
            }
            Letter::Free { deg, .. } => deg as i64,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree().rem_euclid(2) == 1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Shifted { alpha, p } => write!(f, "x{alpha}[{p}]"),
            Letter::Doubled { alpha, copy } => write!(f, "x{alpha}^{copy}"),
            Letter::Expanded { alpha, l, p } => write!(f, "e{alpha}^{l}_{p}"),
            Letter::Free { id, deg } => write!(f, "f{id}<{deg}>"),
        }
    }
}

#[derive(Serialize, Deserialize, Default)]
struct LetterJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    copy: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deg: Option<i32>,
}

impl TryFrom<LetterJson> for Letter {
    type Error = String;
    fn try_from(j: LetterJson) -> Result<Letter, String> {
        match j {
            LetterJson { alpha: Some(alpha), l: Some(l), p: Some(p), copy: None, id: None, deg: None } => {
                if l > p + 1 {
                    return Err(format!("letter index l={l} exceeds p+1={}", p + 1));
                }
                Ok(Letter::Expanded { alpha, l, p })
            }
            LetterJson { alpha: Some(alpha), l: None, p: Some(p), copy: None, id: None, deg: None } => {
                Ok(Letter::Shifted { alpha, p })
            }
            LetterJson { alpha: Some(alpha), l: None, p: None, copy: Some(copy), id: None, deg: None } => {
                if copy != 1 && copy != 2 {
                    return Err(format!("copy must be 1 or 2, got {copy}"));
                }
                Ok(Letter::Doubled { alpha, copy })
            }
            LetterJson { alpha: None, l: None, p: None, copy: None, id: Some(id), deg: Some(deg) } => {
                Ok(Letter::Free { id, deg })
            }
            _ => Err("unrecognised letter fields".into()),
        }
    }
}

impl From<Letter> for LetterJson {
    fn from(l: Letter) -> LetterJson {
        match l {
            Letter::Shifted { alpha, p } => LetterJson { alpha: Some(alpha), p: Some(p), ..Default::default() },
            Letter::Doubled { alpha, copy } => LetterJson { alpha: Some(alpha), copy: Some(copy), ..Default::default() },
            Letter::Expanded { alpha, l, p } => {
                LetterJson { alpha: Some(alpha), l: Some(l), p: Some(p), ..Default::default() }
            }
            Letter::Free { id, deg } => LetterJson { id: Some(id), deg: Some(deg), ..Default::default() },
        }
    }
}

pub fn total_degree(letters: &[Letter]) -> i64 {
    letters.iter().map(|l| l.degree()).sum()
}

/// Koszul sign of moving the element at position `i` to position `perm(i)`.
pub fn koszul_sign(perm: &Perm, degrees: &[i64]) -> Result<i32, PermError> {
    if perm.len() != degrees.len() {
        return Err(PermError::ArityMismatch(perm.len(), degrees.len()));
    }
    let mut s = 1;
    for i in 0..degrees.len() {
        if degrees[i].rem_euclid(2) == 0 {
            continue;
        }
        for (j, dj) in degrees.iter().enumerate().skip(i + 1) {
            if dj.rem_euclid(2) == 1 && perm.apply(i) > perm.apply(j) {
                s = -s;
            }
        }
    }
    Ok(s)
}

/// Sign of rotating `degrees` left by `r` places (first `r` items moved to the end).
pub fn rotation_sign(degrees: &[i64], r: usize) -> i32 {
    let a: i64 = degrees[..r].iter().sum();
    let b: i64 = degrees[r..].iter().sum();
    if (a * b).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Minimal rotation of `items` with its Koszul sign, or `None` when a
/// rotation fixing the sequence carries sign −1.
pub fn canonical_rotation<T: Ord + Clone>(items: &[T], degrees: &[i64]) -> Option<(Vec<T>, i32)> {
    let n = items.len();
    if n == 0 {
        return Some((Vec::new(), 1));
    }
    let rot = |r: usize| -> Vec<T> { items[r..].iter().chain(items[..r].iter()).cloned().collect() };
    let mut best = rot(0);
    let mut best_sign = 1;
    let mut clash = false;
    for r in 1..n {
        let cand = rot(r);
        let s = rotation_sign(degrees, r);
        match cand.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = cand;
                best_sign = s;
                clash = false;
            }
            std::cmp::Ordering::Equal if s != best_sign => clash = true,
            _ => {}
        }
    }
    if clash {
        None
    } else {
        Some((best, best_sign))
    }
}

/// A cyclic word stored in canonical (lexicographically minimal) rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycWord {
    letters: Vec<Letter>,
}

impl CycWord {
    pub fn empty() -> CycWord {
        CycWord { letters: Vec::new() }
    }

    /// Canonical form of the cyclic class of `letters`; the sign `s` satisfies `letters = s · word`.
    pub fn canonical(letters: &[Letter]) -> Option<(CycWord, i32)> {
        let degs: Vec<i64> = letters.iter().map(|l| l.degree()).collect();
        canonical_rotation(letters, &degs).map(|(v, s)| (CycWord { letters: v }, s))
    }

    /// Wraps letters that are already in canonical rotation.
    pub fn from_canonical(letters: Vec<Letter>) -> CycWord {
        CycWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn degree(&self) -> i64 {
        total_degree(&self.letters)
    }

    /// Degree in the shifted picture, `|w| + d`.
    pub fn shifted_degree(&self, d: i32) -> i64 {
        self.degree() + d as i64
    }
}

impl fmt::Display for CycWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

pub fn canonical_cyclic(letters: &[Letter]) -> Option<(CycWord, i32)> {
    CycWord::canonical(letters)
}

/// Sorts a product of cyclic words in the graded-symmetric algebra with word
/// degrees `|w| + d`; `None` when an odd word repeats.
pub fn sym_canon(mut words: Vec<CycWord>, d: i32) -> Option<(Vec<CycWord>, i32)> {
    let odd = |w: &CycWord| w.shifted_degree(d).rem_euclid(2) == 1;
    let mut s = 1;
    for i in 1..words.len() {
        let mut j = i;
        while j > 0 && words[j - 1] > words[j] {
            if odd(&words[j - 1]) && odd(&words[j]) {
                s = -s;
            }
            words.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in words.windows(2) {
        if w[0] == w[1] && odd(&w[0]) {
            return None;
        }
    }
    Some((words, s))
}

/// Formal combination of tensor tuples of cyclic words.
pub type WordSum = LinComb<Vec<CycWord>>;

#[derive(Serialize, Deserialize)]
pub struct WordSumEntry {
    pub tuple: Vec<Vec<Letter>>,
    #[serde(with = "qser")]
    pub coeff: Q,
}

pub fn wordsum_to_json(ws: &WordSum) -> serde_json::Value {
    let entries: Vec<WordSumEntry> = ws
        .iter()
        .map(|(t, c)| WordSumEntry { tuple: t.iter().map(|w| w.letters().to_vec()).collect(), coeff: c.clone() })
        .collect();
    serde_json::to_value(entries).expect("word sums serialise")
}

pub fn wordsum_from_json(v: &serde_json::Value) -> Result<WordSum, String> {
    let entries: Vec<WordSumEntry> = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    let mut out = WordSum::new();
    for e in entries {
        let mut c = e.coeff;
        let mut tuple = Vec::new();
        for w in &e.tuple {
            match CycWord::canonical(w) {
                Some((cw, s)) => {
                    tuple.push(cw);
                    if s < 0 {
                        c = -c;
                    }
                }
                None => {
                    tuple.clear();
                    break;
                }
            }
        }
        if tuple.len() == e.tuple.len() {
            out.add_term(tuple, c);
        }
    }
    Ok(out)
}

pub fn format_wordsum(ws: &WordSum) -> String {
    if ws.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (t, c) in ws.iter() {
        let body: Vec<String> = t.iter().map(|w| w.to_string()).collect();
        parts.push(format!("{}*{}", q_to_string(c), body.join("⊗")));
    }
    parts.join(" + ")
}
