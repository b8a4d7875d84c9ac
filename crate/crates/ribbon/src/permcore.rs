//! Finite permutations of `{0,…,k-1}` in image form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("not a bijection: {0:?}")]
    NotBijection(Vec<usize>),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
}

/// A permutation stored as its image array: `images[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<usize>);

impl TryFrom<Vec<usize>> for Perm {
    type Error = PermError;
    fn try_from(v: Vec<usize>) -> Result<Self, PermError> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.0
    }
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(PermError::NotBijection(images));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn identity(k: usize) -> Self {
        Perm((0..k).collect())
    }

    /// Builds a permutation from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(k: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut img: Vec<usize> = (0..k).collect();
        let mut used = vec![false; k];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= k || used[x] {
                    return Err(PermError::NotBijection(c.clone()));
                }
                used[x] = true;
                img[x] = c[(i + 1) % c.len()];
            }
        }
        Perm::new(img)
    }

    /// The `k`-cycle `0 -> 1 -> … -> k-1 -> 0`.
    pub fn long_cycle(k: usize) -> Self {
        Perm((0..k).map(|i| (i + 1) % k.max(1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// `self ∘ q`, i.e. `i ↦ self(q(i))`.
    pub fn compose(&self, q: &Perm) -> Result<Perm, PermError> {
        if self.len() != q.len() {
            return Err(PermError::ArityMismatch(self.len(), q.len()));
        }
        Ok(Perm(q.0.iter().map(|&i| self.0[i]).collect()))
    }

    /// Orbits, each starting at its minimal element, sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.0.len();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for s in 0..k {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut u = s;
            while !seen[u] {
                seen[u] = true;
                c.push(u);
                u = self.0[u];
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// `(-1)^(k - #cycles)`.
    pub fn parity(&self) -> i32 {
        if (self.0.len() - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Map from each point to the index of its cycle in `cycles()`.
    pub fn orbit_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.0.len()];
        for (ci, c) in self.cycles().iter().enumerate() {
            for &x in c {
                idx[x] = ci;
            }
        }
        idx
    }
}

pub fn compose(p: &Perm, q: &Perm) -> Result<Perm, PermError> {
    p.compose(q)
}

pub fn cycles(p: &Perm) -> Vec<Vec<usize>> {
    p.cycles()
}

pub fn parity(p: &Perm) -> i32 {
    p.parity()
}

/// Sign of the sequence `seq` (a rearrangement of distinct integers) relative
/// to its sorted order, counting only inversions among entries flagged odd.
pub fn inversion_sign(seq: &[usize], odd: impl Fn(usize) -> bool) -> i32 {
    let mut s = 1;
    for i in 0..seq.len() {
        if !odd(seq[i]) {
            continue;
        }
        for j in i + 1..seq.len() {
            if odd(seq[j]) && seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

/// Plain sign of a sequence of distinct integers viewed as a permutation of its sorted order.
pub fn sequence_sign(seq: &[usize]) -> i32 {
    inversion_sign(seq, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let q = p(&[1, 2, 0]);
        assert_eq!(compose(&Perm::identity(3), &q).unwrap(), q);
        assert_eq!(compose(&p(&[2, 0, 1]), &q).unwrap(), Perm::identity(3));
        let s0 = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        let s1 = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let sinf = s0.inverse().compose(&s1).unwrap();
        assert_eq!(sinf.cycles(), vec![vec![0], vec![1, 2]]);
        assert!(matches!(
            compose(&Perm::identity(2), &q),
            Err(PermError::ArityMismatch(2, 3))
        ));
    }

    #[test]
    fn cycle_and_parity_examples() {
        assert_eq!(Perm::identity(3).cycles(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(p(&[1, 2, 0]).cycles(), vec![vec![0, 1, 2]]);
        assert_eq!(p(&[1, 0, 2]).cycles(), vec![vec![0, 1], vec![2]]);
        assert_eq!(Perm::identity(3).parity(), 1);
        assert_eq!(p(&[1, 0, 2]).parity(), -1);
        assert_eq!(p(&[1, 2, 0]).parity(), 1);
    }

    #[test]
    fn rejects_non_bijection() {
        let e = Perm::new(vec![0, 0, 1]).unwrap_err();
        assert!(e.to_string().contains("not a bijection"));
    }

    #[test]
    fn sequence_sign_matches_parity() {
        let q = p(&[2, 0, 3, 1]);
        assert_eq!(sequence_sign(q.images()), q.parity());
    }
}
