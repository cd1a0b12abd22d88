//! Near actions of finitely presented groups, given by one near permutation per generator.

mod growth;
mod rigidity;
mod schreier;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::carrier::{Carrier, Point, Rect, RectSet};
use crate::error::{Error, Result};
use crate::nearmap::{ExtendedInt, NearMap};

pub use growth::{ball_growth_z, GrowthReport, GrowthSample};
pub use rigidity::rigidity_conjugator;
pub use schreier::SchreierTruncation;

/// A word as a list of `(generator index, exponent)` letters, read left to right as a
/// product acting on the left.
pub type Word = Vec<(usize, i64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub abelian_rank: Option<usize>,
}

impl GroupSpec {
    pub fn new(generators: Vec<String>, relators: Vec<Word>, abelian_rank: Option<usize>) -> Result<Self> {
        let n = generators.len();
        if relators.iter().flatten().any(|&(g, _)| g >= n) {
            return Err(Error::InvalidInput("relator uses an undeclared generator".into()));
        }
        if let Some(d) = abelian_rank {
            if d != n {
                return Err(Error::InvalidInput(format!("abelian rank {d} needs {d} generators, got {n}")));
            }
        }
        let unique: BTreeSet<&String> = generators.iter().collect();
        if unique.len() != n {
            return Err(Error::InvalidInput("duplicate generator names".into()));
        }
        Ok(GroupSpec { generators, relators, abelian_rank })
    }

    /// Free abelian group on the given generators.
    pub fn free_abelian(names: &[&str]) -> Self {
        GroupSpec {
            generators: names.iter().map(|s| s.to_string()).collect(),
            relators: Vec::new(),
            abelian_rank: Some(names.len()),
        }
    }

    /// Declared relators, plus pairwise commutators when the group is declared free abelian.
    pub fn all_relators(&self) -> Vec<Word> {
        let mut out = self.relators.clone();
        if self.abelian_rank.is_some() {
            let n = self.generators.len();
            for i in 0..n {
                for j in i + 1..n {
                    let c = vec![(i, 1), (j, 1), (i, -1), (j, -1)];
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    pub fn generator(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{name}`")))
    }

    pub fn show_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| if e == 1 { self.generators[g].clone() } else { format!("{}^{}", self.generators[g], e) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatorReport {
    pub relator: String,
    pub finitely_supported: bool,
    pub support_size: Option<usize>,
    /// An infinite rectangle on which the relator moves points, when it fails.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub relators: Vec<RelatorReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommReport {
    pub commensurated: bool,
    /// `|g(Y) △ Y|` per generator, `None` when infinite.
    pub boundary_sizes: Vec<Option<u64>>,
    pub restricted_index: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearAction {
    carrier: Arc<Carrier>,
    group: GroupSpec,
    lifts: Vec<NearMap>,
    inverses: Vec<NearMap>,
}

impl NearAction {
    pub fn new(carrier: Arc<Carrier>, group: GroupSpec, lifts: Vec<NearMap>) -> Result<Self> {
        if lifts.len() != group.generators.len() {
            return Err(Error::InvalidAction(format!(
                "{} generators but {} lifts",
                group.generators.len(),
                lifts.len()
            )));
        }
        let mut inverses = Vec::with_capacity(lifts.len());
        for (name, f) in group.generators.iter().zip(&lifts) {
            if **f.src() != *carrier || **f.dst() != *carrier {
                return Err(Error::InvalidAction(format!("lift `{name}` is not a self-map of the carrier")));
            }
            let inv = f.invert().map_err(|_| Error::InvalidAction(format!("lift `{name}` is not closely bijective")))?;
            inverses.push(inv);
        }
        Ok(NearAction { carrier, group, lifts, inverses })
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn lifts(&self) -> &[NearMap] {
        &self.lifts
    }

    pub fn lift(&self, i: usize) -> &NearMap {
        &self.lifts[i]
    }

    pub fn inverse_lift(&self, i: usize) -> &NearMap {
        &self.inverses[i]
    }

    pub fn rank(&self) -> usize {
        self.lifts.len()
    }

    /// Apply a signed generator (`sign > 0` for the lift, otherwise its inverse).
    pub fn step(&self, g: usize, sign: i64, x: &Point) -> Option<Point> {
        if sign > 0 {
            self.lifts[g].at(x)
        } else {
            self.inverses[g].at(x)
        }
    }

    /// Neighbors along all lifts and inverse lifts, in generator order.
    pub fn neighbors(&self, x: &Point) -> Vec<Point> {
        let mut out = Vec::with_capacity(2 * self.rank());
        for g in 0..self.rank() {
            out.extend(self.lifts[g].at(x));
            out.extend(self.inverses[g].at(x));
        }
        out
    }

    pub fn word_map(&self, w: &Word) -> Result<NearMap> {
        let mut out = NearMap::identity(self.carrier.clone());
        for &(g, e) in w.iter().rev() {
            let base = if e < 0 { &self.inverses[g] } else { &self.lifts[g] };
            for _ in 0..e.unsigned_abs() {
                out = base.after(&out)?;
            }
        }
        Ok(out)
    }

    pub fn verify(&self) -> Result<VerifyReport> {
        let id = NearMap::identity(self.carrier.clone());
        let mut reports = Vec::new();
        for w in self.group.all_relators() {
            let m = self.word_map(&w)?;
            let r = match m.disagreement(&id)? {
                Ok(pts) => RelatorReport {
                    relator: self.group.show_word(&w),
                    finitely_supported: true,
                    support_size: Some(pts.len()),
                    witness: None,
                },
                Err(rect) => RelatorReport {
                    relator: self.group.show_word(&w),
                    finitely_supported: false,
                    support_size: None,
                    witness: Some(show_rect(&self.carrier, &rect)),
                },
            };
            reports.push(r);
        }
        Ok(VerifyReport { ok: reports.iter().all(|r| r.finitely_supported), relators: reports })
    }

    /// Lifts are permutations and every relator holds exactly.
    pub fn is_genuine(&self) -> Result<bool> {
        if !self.lifts.iter().all(|f| f.is_permutation()) {
            return Ok(false);
        }
        let id = NearMap::identity(self.carrier.clone());
        for w in self.group.all_relators() {
            if !self.word_map(&w)?.graph_equal(&id)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn index_character(&self) -> Result<Vec<i64>> {
        self.lifts
            .iter()
            .map(|f| match f.index()? {
                ExtendedInt::Finite(n) => Ok(n),
                _ => Err(Error::NotCloselyBijective),
            })
            .collect()
    }

    pub fn index_number(&self) -> Result<u64> {
        Ok(self.index_character()?.into_iter().fold(0i64, |a, b| a.gcd(&b)).unsigned_abs())
    }

    pub fn commensurated_test(&self, y: &RectSet) -> Result<CommReport> {
        let sizes: Vec<Option<u64>> = self.lifts.iter().map(|f| f.boundary_of(y).card().finite()).collect();
        let commensurated = sizes.iter().all(|s| s.is_some());
        let restricted_index = if commensurated {
            let mut v = Vec::new();
            for f in &self.lifts {
                match f.restricted_index(y)? {
                    ExtendedInt::Finite(n) => v.push(n),
                    _ => return Err(Error::NotCloselyBijective),
                }
            }
            Some(v)
        } else {
            None
        };
        Ok(CommReport { commensurated, boundary_sizes: sizes, restricted_index })
    }

    /// Points where some lift or inverse lift is undefined, or some relator fails.
    pub fn exception_region(&self) -> Result<Vec<Point>> {
        let id = NearMap::identity(self.carrier.clone());
        let mut out: BTreeSet<Point> = BTreeSet::new();
        for f in self.lifts.iter().chain(&self.inverses) {
            out.extend(f.undefined());
        }
        for w in self.group.all_relators() {
            match self.word_map(&w)?.disagreement(&id)? {
                Ok(pts) => out.extend(pts),
                Err(r) => return Err(Error::InvalidAction(format!("relator fails on {}", show_rect(&self.carrier, &r)))),
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Replace the lifts, keeping the carrier and group.
    pub fn with_lifts(&self, lifts: Vec<NearMap>) -> Result<NearAction> {
        NearAction::new(self.carrier.clone(), self.group.clone(), lifts)
    }

    /// Exchange two generators (names and lifts).
    pub fn swap_generators(&self, i: usize, j: usize) -> NearAction {
        let mut a = self.clone();
        a.group.generators.swap(i, j);
        a.lifts.swap(i, j);
        a.inverses.swap(i, j);
        let relabel = |g: usize| if g == i { j } else if g == j { i } else { g };
        a.group.relators = a.group.relators.iter().map(|w| w.iter().map(|&(g, e)| (relabel(g), e)).collect()).collect();
        a
    }

    /// Every nonzero element of the free abelian group of word length at most `max_len`
    /// fixes only finitely many points.
    pub fn near_free_up_to(&self, max_len: usize) -> Result<bool> {
        if self.group.abelian_rank.is_none() {
            return Err(Error::Unsupported("near-freeness check needs a free abelian group".into()));
        }
        let d = self.rank();
        let mut vectors: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..d {
            vectors = vectors
                .into_iter()
                .flat_map(|v| {
                    let used: i64 = v.iter().map(|x: &i64| x.abs()).sum();
                    let room = max_len as i64 - used;
                    (-room..=room).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        for v in vectors {
            if v.iter().all(|&a| a == 0) {
                continue;
            }
            let w: Word = v.iter().enumerate().filter(|(_, &a)| a != 0).map(|(g, &a)| (g, a)).collect();
            if !self.word_map(&w)?.fixed_set()?.is_finite() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Distance in the Schreier graph from `from` to each target found within `limit` steps.
    pub fn distances_to(&self, from: &Point, targets: &[Point], limit: usize) -> Vec<Option<usize>> {
        let dist = self.bfs(from, limit, &[]);
        targets.iter().map(|t| dist.get(t).copied()).collect()
    }

    pub(crate) fn bfs(&self, from: &Point, limit: usize, extra: &[(Point, Point)]) -> std::collections::HashMap<Point, usize> {
        let mut dist = std::collections::HashMap::new();
        dist.insert(from.clone(), 0usize);
        let mut frontier = vec![from.clone()];
        for r in 1..=limit {
            let mut next = Vec::new();
            for x in &frontier {
                let mut nb = self.neighbors(x);
                for (a, b) in extra {
                    if a == x {
                        nb.push(b.clone());
                    }
                    if b == x {
                        nb.push(a.clone());
                    }
                }
                for y in nb {
                    if !dist.contains_key(&y) {
                        dist.insert(y.clone(), r);
                        next.push(y);
                    }
                }
            }
            next.sort();
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        dist
    }
}

pub(crate) fn show_rect(c: &Carrier, r: &Rect) -> String {
    let axes: Vec<String> = r.axes.iter().map(|a| a.to_string()).collect();
    format!("{}{{{}}}", c.cell(r.cell).id, axes.join(" x "))
}
