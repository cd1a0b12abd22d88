//! Residuals of near free near actions of the quasi-cyclic group `C_{m^∞}`, built from
//! blocks `Z/m^q` inside copies of `C_{m^∞}`.

use serde::Serialize;

use crate::error::{Error, Result};

fn power(m: u64, n: u32) -> Result<u128> {
    u128::from(m).checked_pow(n).ok_or_else(|| Error::InvalidInput(format!("{m}^{n} overflows")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QcConstruction {
    m: u64,
    q: Vec<u32>,
}

impl QcConstruction {
    pub fn new(m: u64, q: Vec<u32>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("base {m} must be at least 2")));
        }
        if q.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("block exponents must be nondecreasing".into()));
        }
        Ok(QcConstruction { m, q })
    }

    /// `b[j]` blocks of exponent `j`.
    pub fn from_block_counts(m: u64, b: &[u64]) -> Result<Self> {
        let q = b.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j as u32, c as usize)).collect();
        QcConstruction::new(m, q)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.q
    }

    pub fn concat(&self, other: &QcConstruction) -> Result<QcConstruction> {
        if self.m != other.m {
            return Err(Error::InvalidInput("different bases".into()));
        }
        let mut q = [self.q.clone(), other.q.clone()].concat();
        q.sort();
        QcConstruction::new(self.m, q)
    }

    /// Residual of the `Z/m^n` realization, reduced mod `m^n`.
    pub fn residual_truncation(&self, n: u32) -> Result<u128> {
        let modulus = power(self.m, n)?;
        let mut s = 0u128;
        for &q in self.q.iter().filter(|&&q| q < n) {
            s = (s + power(self.m, q)?) % modulus;
        }
        Ok(s)
    }

    /// Points with nontrivial stabilizer in the explicit `Z/m^n` model, unreduced.
    pub fn direct_count_oracle(&self, n: u32) -> Result<u128> {
        let order = power(self.m, n)?;
        let mut count = 0u128;
        for &q in &self.q {
            let size = power(self.m, q)? as usize;
            // generator: translation by m^(q-n) on Z/m^q, or the identity
            let step = if q >= n { power(self.m, q - n)? as usize } else { 0 };
            let mut orbit_len = vec![0u128; size];
            for x in 0..size {
                if orbit_len[x] != 0 {
                    continue;
                }
                let mut orbit = vec![x];
                let mut y = (x + step) % size;
                while y != x {
                    orbit.push(y);
                    y = (y + step) % size;
                }
                for &y in &orbit {
                    orbit_len[y] = orbit.len() as u128;
                }
            }
            count += orbit_len.iter().filter(|&&l| l < order).count() as u128;
        }
        Ok(count)
    }

    pub fn table(&self, n_max: u32) -> Result<ResidueTable> {
        let rows = (1..=n_max)
            .map(|n| Ok(ResidueRow { n, modulus: power(self.m, n)?, residue: self.residual_truncation(n)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(ResidueTable::new(self.m, rows))
    }
}

/// Representatives `s_n ∈ [0, m^n)` of an `m`-adic integer, with `digits[0] = s_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitStream {
    m: u64,
    digits: Vec<u128>,
}

impl DigitStream {
    /// `s` lists `s_1, s_2, ...`.
    pub fn new(m: u64, s: &[u128]) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("base {m} must be at least 2")));
        }
        let mut digits = vec![0u128];
        digits.extend_from_slice(s);
        for n in 1..digits.len() {
            let modulus = power(m, n as u32)?;
            if digits[n] >= modulus {
                return Err(Error::InvalidInput(format!("s_{n} = {} is not below {modulus}", digits[n])));
            }
            let prev = power(m, n as u32 - 1)?;
            if digits[n] % prev != digits[n - 1] {
                return Err(Error::InvalidInput(format!(
                    "s_{n} = {} is not congruent to s_{} = {} mod {prev}",
                    digits[n],
                    n - 1,
                    digits[n - 1]
                )));
            }
        }
        Ok(DigitStream { m, digits })
    }

    /// Representatives of a natural number.
    pub fn from_natural(m: u64, s: u128, len: u32) -> Result<Self> {
        let s: Vec<u128> = (1..=len).map(|n| power(m, n).map(|mn| s % mn)).collect::<Result<_>>()?;
        DigitStream::new(m, &s)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> u32 {
        (self.digits.len() - 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn s(&self, n: u32) -> u128 {
        self.digits[n as usize]
    }

    /// `b_n = (s_n - s_{n-1}) / m^{n-1}` for `n = 1..=n_max`; `b_n` counts blocks of exponent `n - 1`.
    pub fn digits_to_blocks(&self, n_max: u32) -> Result<Vec<u64>> {
        if n_max > self.len() {
            return Err(Error::InvalidInput(format!("stream only has {} terms", self.len())));
        }
        (1..=n_max as usize)
            .map(|n| {
                let b = (self.digits[n] - self.digits[n - 1]) / power(self.m, n as u32 - 1)?;
                u64::try_from(b).map_err(|_| Error::InvalidInput("block count overflows".into()))
            })
            .collect()
    }

    pub fn to_construction(&self, n_max: u32) -> Result<QcConstruction> {
        QcConstruction::from_block_counts(self.m, &self.digits_to_blocks(n_max)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueRow {
    pub n: u32,
    pub modulus: u128,
    pub residue: u128,
}

/// Residues by level. Finitely many levels never decide whether the `m`-adic limit is an
/// integer, so `bounded` only says whether the residues stopped growing within range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueTable {
    pub m: u64,
    pub rows: Vec<ResidueRow>,
    pub bounded: bool,
    pub note: String,
}

impl ResidueTable {
    fn new(m: u64, rows: Vec<ResidueRow>) -> Self {
        let bounded = rows.len() >= 2 && rows[rows.len() - 1].residue == rows[rows.len() - 2].residue;
        let note = if bounded {
            format!(
                "consistent at precision {} with a natural residual {}; realizability is not certified",
                rows.len(),
                rows[rows.len() - 1].residue
            )
        } else {
            format!("consistent at precision {} with a residual outside N; nothing is certified", rows.len())
        };
        ResidueTable { m, rows, bounded, note }
    }
}
