use std::fmt;

use crate::error::{Result, TensorError};

/// A bijection on `[m]` with its parity cached.
///
/// Stored 0-based; constructors and [`Permutation::apply`] speak 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
    parity: i8,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            image: (0..m).collect(),
            parity: 1,
        }
    }

    /// From one-line notation: `images[k-1] = σ(k)`, 1-based.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &x in images {
            if x == 0 || x > m || std::mem::replace(&mut seen[x - 1], true) {
                return Err(TensorError::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 1..={m}"
                )));
            }
        }
        Ok(Self::from_zero_based(images.iter().map(|x| x - 1).collect()))
    }

    /// From disjoint cycles on `[m]`, e.g. `[[2,3,4,1]]` sends 2→3→4→1→2.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..m).collect();
        let mut touched = vec![false; m];
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x == 0 || x > m || std::mem::replace(&mut touched[x - 1], true) {
                    return Err(TensorError::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on 1..={m}"
                    )));
                }
                let next = cycle[(pos + 1) % cycle.len()];
                image[x - 1] = next - 1;
            }
        }
        Ok(Self::from_zero_based(image))
    }

    fn from_zero_based(image: Vec<usize>) -> Self {
        let mut inv = 0usize;
        for i in 0..image.len() {
            for j in i + 1..image.len() {
                if image[i] > image[j] {
                    inv += 1;
                }
            }
        }
        Permutation {
            image,
            parity: if inv % 2 == 0 { 1 } else { -1 },
        }
    }

    /// Transposition of the 1-based positions `a` and `b`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        Self::from_cycles(m, &[vec![a, b]])
    }

    /// All of `P_m` in lexicographic order of one-line notation.
    pub fn all(m: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..m).collect();
        loop {
            out.push(Self::from_zero_based(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..m).rev().find(|&j| cur[j] > cur[i]).expect("successor");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `σ(k)` for 1-based `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.image[k - 1] + 1
    }

    /// 1-based one-line notation.
    pub fn images(&self) -> Vec<usize> {
        self.image.iter().map(|x| x + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.image
    }

    /// `(−1)^{inversions}`.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn sign(&self) -> f64 {
        f64::from(self.parity)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &x)| k == x)
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(TensorError::InvalidPermutation(format!(
                "cannot compose permutations on {} and {} points",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&k| self.image[k]).collect(),
            parity: self.parity * other.parity,
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &x) in self.image.iter().enumerate() {
            inv[x] = k;
        }
        Permutation {
            image: inv,
            parity: self.parity,
        }
    }

    /// Parses one-line notation, `2341` (single digits) or `2,3,4,1`.
    pub fn parse_images(s: &str) -> Result<Self> {
        Self::from_images(&parse_list(s)?)
    }

    /// Parses cycle notation on `[m]`, e.g. `(2341)` or `(12)(34)`.
    pub fn parse_cycles(m: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(Self::identity(m));
        }
        let mut cycles = Vec::new();
        for part in s.split(')') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let inner = part.strip_prefix('(').ok_or_else(|| {
                TensorError::InvalidPermutation(format!("bad cycle notation {s:?}"))
            })?;
            cycles.push(parse_list(inner)?);
        }
        Self::from_cycles(m, &cycles)
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    let bad = || TensorError::InvalidPermutation(format!("cannot parse {s:?}"));
    let s = s.trim();
    if s.contains(',') || s.contains(' ') {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images().iter().map(usize::to_string).collect();
        write!(f, "[{}]", imgs.join(","))
    }
}
