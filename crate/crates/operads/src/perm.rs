//! Permutations of `{1..n}`, stored 0-based.
//!
//! Conventions used throughout the crate:
//!
//! - `Perm` is a bijection of `{0..n-1}`; `p.apply(i)` is the image of `i`.
//! - Composition `a.compose(&b)` is the function `a ∘ b` (apply `b` first).
//! - A right Σₙ-action on a space is recorded through matrices `A(σ)` with
//!   `A(στ) = A(τ)·A(σ)` (an anti-homomorphism); see [`crate::qlinalg::SigmaRep`].
//! - Operadic slot indices in public APIs are 1-based, matching the usual
//!   `∘ᵢ` notation; this module is 0-based internally.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Build from the image vector (0-based). Panics if not a bijection.
    pub fn from_images(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            assert!(x < n && !seen[x], "not a permutation: {images:?}");
            seen[x] = true;
        }
        Perm(images)
    }

    /// The adjacent transposition swapping `k` and `k+1` (0-based), in Σₙ.
    pub fn adjacent(n: usize, k: usize) -> Self {
        assert!(k + 1 < n);
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(k, k + 1);
        Perm(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// All of Σₙ in lexicographic order of the image vector.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            if n < 2 {
                break;
            }
            let mut i = n - 1;
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// Decompose into adjacent transpositions: returns `w` with
    /// `self = s_{w[0]} ∘ s_{w[1]} ∘ … ∘ s_{w[m-1]}` (function composition,
    /// rightmost applied first).
    pub fn adjacent_word(&self) -> Vec<usize> {
        // Bubble self down to the identity by post-composing with adjacent
        // swaps; the recorded swaps, reversed, give the word.
        let mut v = self.0.clone();
        let mut swaps = Vec::new();
        loop {
            let mut done = true;
            for k in 0..v.len().saturating_sub(1) {
                if v[k] > v[k + 1] {
                    v.swap(k, k + 1);
                    swaps.push(k);
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        swaps.reverse();
        swaps
    }

    /// Delete the strand at input position `i` (0-based): returns the induced
    /// permutation of `{0..n-2}` together with the output position `self(i)`.
    pub fn delete_strand(&self, i: usize) -> (Perm, usize) {
        let n = self.degree();
        let img = self.0[i];
        let mut v = Vec::with_capacity(n - 1);
        for x in 0..n {
            if x == i {
                continue;
            }
            let y = self.0[x];
            v.push(if y > img { y - 1 } else { y });
        }
        (Perm(v), img)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let s0 = Perm::adjacent(3, 0);
        let s1 = Perm::adjacent(3, 1);
        let c = s0.compose(&s1); // apply s1 first
        assert_eq!(c.apply(1), 2); // 1 -> 2 -> 2? s1: 1->2, s0: 2->2
        assert!(c.compose(&c.inverse()).is_identity());
    }

    #[test]
    fn enumeration_is_complete_and_ordered() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn word_reconstructs_permutation() {
        for p in Perm::all(5) {
            let w = p.adjacent_word();
            let mut acc = Perm::identity(5);
            for &k in &w {
                acc = acc.compose(&Perm::adjacent(5, k));
            }
            // self = s_{w0} ∘ ... ∘ s_{wm-1}; composing left to right applies
            // the later letters first, so rebuild in the same order.
            let mut rebuilt = Perm::identity(5);
            for &k in &w {
                rebuilt = rebuilt.compose(&Perm::adjacent(5, k));
            }
            assert_eq!(acc, rebuilt);
            assert_eq!(rebuilt, p, "word {w:?} fails for {p:?}");
        }
    }

    #[test]
    fn delete_strand_matches_hand_example() {
        // σ = [2,3,1] (0-based images [1,2,0]); delete strand at input 1:
        // remaining inputs {0,2} map to {2,0}, renumbered past image 2.
        let p = Perm::from_images(vec![1, 2, 0]);
        let (r, img) = p.delete_strand(1);
        assert_eq!(img, 2);
        assert_eq!(r, Perm::from_images(vec![1, 0]));
    }
}
