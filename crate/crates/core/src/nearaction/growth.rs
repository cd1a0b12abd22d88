use std::collections::HashSet;

use num_rational::Ratio;
use serde::Serialize;

use super::NearAction;
use crate::carrier::Point;
use crate::error::{Error, Result};

/// Size of the radius-`r` word ball in the free abelian group of rank `d`.
pub fn ball_growth_z(d: usize, r: u64) -> u64 {
    let mut total = 0u64;
    for k in 0..=d.min(r as usize) {
        total += (1u64 << k) * binom(d as u64, k as u64) * binom(r, k as u64);
    }
    total
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut c = 1u64;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSample {
    pub r: u64,
    /// `b(r)`
    pub ball: u64,
    /// `b(floor(3r/2))`
    pub ball_larger: u64,
    /// `b(r) * (1 + b0(floor(2r/3)))`
    pub bound: u64,
    pub holds: bool,
    /// Whether `r` is at or above the threshold, so a failure would count.
    pub checked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub rank: usize,
    pub threshold: u64,
    pub samples: Vec<GrowthSample>,
    pub ok: bool,
}

impl NearAction {
    /// Largest coordinate any lift or inverse lift refers to.
    pub fn horizon(&self) -> i64 {
        self.lifts.iter().chain(&self.inverses).map(|f| f.horizon()).max().unwrap_or(0)
    }

    /// Edges joining the most central point of each orbit component meeting the central
    /// window to that of the first component.
    pub fn key_fob_edges(&self) -> Vec<(Point, Point)> {
        let r0 = self.horizon() + 2;
        let t = self.schreier_truncation(2 * r0 + 2);
        let reps: Vec<Point> = t
            .components()
            .into_iter()
            .filter_map(|c| c.into_iter().map(|i| &t.vertices[i]).filter(|p| p.norm() <= r0).min_by_key(|p| p.norm()).cloned())
            .collect();
        reps.iter().skip(1).map(|r| (reps[0].clone(), r.clone())).collect()
    }

    /// Ball sizes `b(0..=rmax)` around `basepoint` in the key-fob completed graph.
    pub fn ball_growth(&self, basepoint: &Point, rmax: usize) -> Result<Vec<u64>> {
        self.carrier.check(basepoint)?;
        let extra = self.key_fob_edges();
        let dist = self.bfs(basepoint, rmax, &extra);
        let mut counts = vec![0u64; rmax + 1];
        for &d in dist.values() {
            counts[d] += 1;
        }
        for r in 1..=rmax {
            counts[r] += counts[r - 1];
        }
        Ok(counts)
    }

    /// `|∂F| / |F|` where `∂F` is the set of points of `F` that some generator lift sends
    /// outside `F` (or leaves undefined).
    pub fn folner_ratio(&self, f: &[Point]) -> Result<Ratio<u64>> {
        if f.is_empty() {
            return Err(Error::InvalidInput("empty set".into()));
        }
        for p in f {
            self.carrier.check(p)?;
        }
        let set: HashSet<&Point> = f.iter().collect();
        let boundary = set
            .iter()
            .filter(|x| self.lifts.iter().any(|g| g.at(x).is_none_or(|y| !set.contains(&y))))
            .count();
        Ok(Ratio::new(boundary as u64, set.len() as u64))
    }

    pub fn growth_inequality_check(&self, basepoint: &Point, samples: &[u64]) -> Result<GrowthReport> {
        let rank = self.group.abelian_rank.unwrap_or(self.rank());
        let region = self.exception_region()?;
        let extra = self.key_fob_edges();
        let limit = 4 * (self.horizon() as usize + 4) + 64;
        let dist = self.bfs(basepoint, limit, &extra);
        let mut far = 0usize;
        for p in &region {
            match dist.get(p) {
                Some(&d) => far = far.max(d),
                None => {
                    return Err(Error::WindowExhausted {
                        radius: limit as i64,
                        reason: format!("exceptional point {} not reached", self.carrier.show(p)),
                    })
                }
            }
        }
        let threshold = 3 * far as u64;
        let rmax = samples.iter().map(|&r| 3 * r / 2).max().unwrap_or(0) as usize;
        let b = self.ball_growth(basepoint, rmax)?;
        let mut out = Vec::new();
        for &r in samples {
            let ball = b[r as usize];
            let ball_larger = b[(3 * r / 2) as usize];
            let bound = ball * (1 + ball_growth_z(rank, 2 * r / 3));
            out.push(GrowthSample { r, ball, ball_larger, bound, holds: ball_larger <= bound, checked: r >= threshold });
        }
        let ok = out.iter().all(|s| s.holds || !s.checked);
        Ok(GrowthReport { rank, threshold, samples: out, ok })
    }
}
