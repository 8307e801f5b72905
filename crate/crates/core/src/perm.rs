//! Bijections of `{0, …, n-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation stored as its image list: `self.apply(i) == images[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n {
                return Err(Error::NotBijection(format!("image {y} out of range for size {n}")));
            }
            if seen[y] {
                return Err(Error::NotBijection(format!("image {y} repeated")));
            }
            seen[y] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The cyclic shift `i ↦ i + step (mod n)`.
    pub fn shift(n: usize, step: isize) -> Self {
        let n_i = n as isize;
        Permutation((0..n).map(|i| ((i as isize + step).rem_euclid(n_i)) as usize).collect())
    }

    /// Transposition of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::InvalidInput(format!("transposition ({a} {b}) out of range {n}")));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Permutation(images))
    }

    /// Parses whitespace- or comma-separated images such as `"1 0 2 3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let images = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad permutation entry {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &y) in self.0.iter().enumerate() {
            inv[y] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn power(&self, k: usize) -> Self {
        let mut out = Permutation::identity(self.len());
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// Points moved by the permutation.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(i, y)| i != *y).map(|(i, _)| i).collect()
    }

    /// Order in the symmetric group (lcm of cycle lengths).
    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut order = 1usize;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    /// All permutations of `n` points in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(current.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
