//! Permutations of `0..n`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinPerm {
    img: Vec<usize>,
}

impl FinPerm {
    pub fn new(img: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; img.len()];
        for &i in &img {
            if i >= img.len() || seen[i] {
                return Err(Error::NotPermutation("image list is not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(FinPerm { img })
    }

    pub fn identity(n: usize) -> Self {
        FinPerm { img: (0..n).collect() }
    }

    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                img[x] = c[(i + 1) % c.len()];
            }
        }
        FinPerm::new(img)
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinPerm) -> FinPerm {
        FinPerm { img: first.img.iter().map(|&i| self.img[i]).collect() }
    }

    pub fn inverse(&self) -> FinPerm {
        let mut inv = vec![0; self.img.len()];
        for (i, &j) in self.img.iter().enumerate() {
            inv[j] = i;
        }
        FinPerm { img: inv }
    }

    pub fn pow(&self, k: u64) -> FinPerm {
        let mut out = FinPerm::identity(self.len());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = base.after(&out);
            }
            base = base.after(&base);
            k >>= 1;
        }
        out
    }

    /// All cycles including fixed points, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.img.len()];
        let mut out = Vec::new();
        for start in 0..self.img.len() {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.img[x];
            }
            out.push(c);
        }
        out
    }

    /// Lengths of the nontrivial cycles, ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().into_iter().map(|c| c.len()).filter(|&l| l > 1).collect();
        t.sort_unstable();
        t
    }

    pub fn parity(&self) -> u8 {
        (self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2) as u8
    }
}

/// Parity of a cycle type.
pub fn parity_of(cycle_type: &[usize]) -> u8 {
    (cycle_type.iter().map(|l| l.saturating_sub(1)).sum::<usize>() % 2) as u8
}
