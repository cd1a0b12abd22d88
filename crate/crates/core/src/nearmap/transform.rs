use crate::carrier::{AxisConstraint, Rect};
use crate::error::{Error, Result};

/// A signed permutation matrix followed by a translation:
/// `y[k] = sign[k] * x[perm[k]] + t[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transform {
    perm: Vec<usize>,
    sign: Vec<i64>,
    t: Vec<i64>,
}

impl Transform {
    pub fn new(perm: Vec<usize>, sign: Vec<i64>, t: Vec<i64>) -> Result<Self> {
        let d = perm.len();
        if sign.len() != d || t.len() != d {
            return Err(Error::InvalidMap("transform dimensions disagree".into()));
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidMap("transform matrix is not a signed permutation".into()));
            }
            seen[p] = true;
        }
        if sign.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidMap("transform signs must be +1 or -1".into()));
        }
        Ok(Transform { perm, sign, t })
    }

    /// Build from a matrix whose row `k` has its single nonzero entry in column `perm[k]`.
    pub fn from_matrix(m: &[Vec<i64>], t: Vec<i64>) -> Result<Self> {
        let mut perm = Vec::with_capacity(m.len());
        let mut sign = Vec::with_capacity(m.len());
        for row in m {
            if row.len() != m.len() {
                return Err(Error::InvalidMap("transform matrix is not square".into()));
            }
            let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0).collect();
            if nz.len() != 1 {
                return Err(Error::InvalidMap("transform matrix is not a signed permutation".into()));
            }
            perm.push(nz[0]);
            sign.push(row[nz[0]]);
        }
        Transform::new(perm, sign, t)
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        (0..d)
            .map(|k| (0..d).map(|j| if self.perm[k] == j { self.sign[k] } else { 0 }).collect())
            .collect()
    }

    pub fn identity(d: usize) -> Self {
        Transform { perm: (0..d).collect(), sign: vec![1; d], t: vec![0; d] }
    }

    pub fn translation(t: Vec<i64>) -> Self {
        let d = t.len();
        Transform { perm: (0..d).collect(), sign: vec![1; d], t }
    }

    pub fn linear(perm: Vec<usize>, sign: Vec<i64>) -> Result<Self> {
        let d = perm.len();
        Transform::new(perm, sign, vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn offset(&self) -> &[i64] {
        &self.t
    }

    pub fn is_identity(&self) -> bool {
        self.is_translation() && self.t.iter().all(|&x| x == 0)
    }

    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &p)| p == k) && self.sign.iter().all(|&s| s == 1)
    }

    /// The linear part with translation dropped.
    pub fn linear_part(&self) -> Transform {
        Transform { perm: self.perm.clone(), sign: self.sign.clone(), t: vec![0; self.dim()] }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        (0..self.dim()).map(|k| self.sign[k] * x[self.perm[k]] + self.t[k]).collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Transform) -> Transform {
        let d = self.dim();
        let mut perm = Vec::with_capacity(d);
        let mut sign = Vec::with_capacity(d);
        let mut t = Vec::with_capacity(d);
        for k in 0..d {
            let j = self.perm[k];
            perm.push(first.perm[j]);
            sign.push(self.sign[k] * first.sign[j]);
            t.push(self.sign[k] * first.t[j] + self.t[k]);
        }
        Transform { perm, sign, t }
    }

    pub fn inverse(&self) -> Transform {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut sign = vec![1; d];
        let mut t = vec![0; d];
        for k in 0..d {
            let j = self.perm[k];
            perm[j] = k;
            sign[j] = self.sign[k];
            t[j] = -self.sign[k] * self.t[k];
        }
        Transform { perm, sign, t }
    }

    pub fn image_rect(&self, r: &Rect, cell: usize) -> Rect {
        let axes = (0..self.dim()).map(|k| r.axes[self.perm[k]].map(self.sign[k], self.t[k])).collect();
        Rect::new(cell, axes)
    }

    /// Whether `self` and `other` agree at every point of `r`.
    pub fn agrees_on(&self, other: &Transform, r: &Rect) -> bool {
        for k in 0..self.dim() {
            let (j1, s1, t1) = (self.perm[k], self.sign[k], self.t[k]);
            let (j2, s2, t2) = (other.perm[k], other.sign[k], other.t[k]);
            if j1 == j2 && s1 == s2 {
                if t1 != t2 {
                    return false;
                }
                continue;
            }
            let (Some(a), Some(b)) = (r.axes[j1].single(), r.axes[j2].single()) else {
                return false;
            };
            if s1 * a + t1 != s2 * b + t2 {
                return false;
            }
        }
        true
    }

    /// Fixed points inside `r` (source and target in the same cell), as disjoint rectangles.
    pub fn fixed_in(&self, r: &Rect) -> Result<Vec<Rect>> {
        let mut axes: Vec<AxisConstraint> = r.axes.clone();
        let mut linked = Vec::new();
        for k in 0..self.dim() {
            let (j, s, t) = (self.perm[k], self.sign[k], self.t[k]);
            if j != k {
                linked.push(k);
            } else if s == 1 {
                if t != 0 {
                    return Ok(Vec::new());
                }
            } else if t % 2 != 0 {
                return Ok(Vec::new());
            } else {
                match axes[k].intersect(&AxisConstraint::point(t / 2)) {
                    Some(c) => axes[k] = c,
                    None => return Ok(Vec::new()),
                }
            }
        }
        let restricted = Rect::new(r.cell, axes);
        if linked.is_empty() {
            return Ok(vec![restricted]);
        }
        if linked.iter().any(|&k| !restricted.axes[k].is_finite()) {
            return Err(Error::Unsupported("fixed set along an infinite diagonal".into()));
        }
        // Cycles of the permutation only involve linked axes, so solve on those alone.
        let mut probe = restricted.clone();
        for k in 0..probe.dim() {
            if !linked.contains(&k) {
                probe.axes[k] = AxisConstraint::point(probe.axes[k].sample());
            }
        }
        let mut out = Vec::new();
        for p in probe.points() {
            let y = self.apply(&p.coords);
            if linked.iter().all(|&k| y[k] == p.coords[k]) {
                let mut rect = restricted.clone();
                for &k in &linked {
                    rect.axes[k] = AxisConstraint::point(p.coords[k]);
                }
                out.push(rect);
            }
        }
        Ok(out)
    }
}
