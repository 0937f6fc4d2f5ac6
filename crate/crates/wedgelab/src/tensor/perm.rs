use crate::error::{Error, Result};

/// Permutation of {0..n}; `apply(m)` is σ(m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(Error::Structural(format!("{map:?} is not a permutation of 0..{n}")));
            }
            seen[m] = true;
        }
        Ok(Permutation { map })
    }

    /// Full reversal m ↦ n−1−m.
    pub fn reversal(n: usize) -> Self {
        Permutation { map: (0..n).rev().collect() }
    }

    /// Adjacent transposition τ_j exchanging j and j+1.
    pub fn adjacent(n: usize, j: usize) -> Result<Self> {
        if j + 1 >= n {
            return Err(Error::Structural(format!("adjacent transposition {j} out of range for n = {n}")));
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(j, j + 1);
        Ok(Permutation { map })
    }

    /// The product τ_{w0} ∘ τ_{w1} ∘ … of adjacent transpositions.
    pub fn from_word(n: usize, word: &[usize]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &j in word {
            p = p.compose(&Self::adjacent(n, j)?);
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, m: usize) -> usize {
        self.map[m]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// (self ∘ other)(m) = self(other(m)).
    pub fn compose(&self, other: &Self) -> Self {
        Permutation { map: other.map.iter().map(|&m| self.map[m]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (m, &s) in self.map.iter().enumerate() {
            inv[s] = m;
        }
        Permutation { map: inv }
    }

    /// A reduced word w with self = τ_{w0} ∘ τ_{w1} ∘ …, found by bubble sort.
    pub fn word(&self) -> Vec<usize> {
        let mut a = self.map.clone();
        let mut swaps = Vec::new();
        let n = a.len();
        for pass in 0..n {
            for j in 0..n.saturating_sub(pass + 1) {
                if a[j] > a[j + 1] {
                    a.swap(j, j + 1);
                    swaps.push(j);
                }
            }
        }
        swaps.reverse();
        swaps
    }

    /// All n! permutations in lexicographic order of their maps.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { map: cur.clone() });
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_reproduce_permutations() {
        for n in 1..6 {
            for p in Permutation::all(n) {
                assert_eq!(Permutation::from_word(n, &p.word()).unwrap(), p);
                assert_eq!(p.compose(&p.inverse()), Permutation::identity(n));
            }
        }
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::from_vec(vec![0, 0]).is_err());
        assert!(Permutation::from_vec(vec![2, 0]).is_err());
        assert!(Permutation::adjacent(3, 2).is_err());
    }
}
