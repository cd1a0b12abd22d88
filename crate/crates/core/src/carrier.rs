//! Carriers (finite unions of product cells) and the algebra of strided rectangles on them.

use std::collections::HashMap;
use std::fmt;
use std::ops::Add;

use num_integer::Integer;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisDomain {
    FullLine,
    HalfLine,
    Bounded(u64),
}

impl AxisDomain {
    pub fn constraint(self) -> AxisConstraint {
        match self {
            AxisDomain::FullLine => AxisConstraint::all(),
            AxisDomain::HalfLine => AxisConstraint::new(Some(0), None, 0, 1).unwrap(),
            AxisDomain::Bounded(n) => AxisConstraint::new(Some(0), Some(n as i64 - 1), 0, 1).unwrap(),
        }
    }

    pub fn contains(self, x: i64) -> bool {
        match self {
            AxisDomain::FullLine => true,
            AxisDomain::HalfLine => x >= 0,
            AxisDomain::Bounded(n) => x >= 0 && x < n as i64,
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, AxisDomain::Bounded(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: String,
    pub axes: Vec<AxisDomain>,
}

impl Cell {
    pub fn new(id: impl Into<String>, axes: Vec<AxisDomain>) -> Self {
        Cell { id: id.into(), axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn is_finite(&self) -> bool {
        self.axes.iter().all(|a| a.is_bounded())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Carrier {
    cells: Vec<Cell>,
}

impl Carrier {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &cells {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidCarrier(format!("duplicate cell id `{}`", c.id)));
            }
            if c.dim() > MAX_DIM {
                return Err(Error::InvalidCarrier(format!(
                    "cell `{}` has dimension {} (max {MAX_DIM})",
                    c.id,
                    c.dim()
                )));
            }
            if c.axes.contains(&AxisDomain::Bounded(0)) {
                return Err(Error::InvalidCarrier(format!("cell `{}` has an empty axis", c.id)));
            }
        }
        Ok(Carrier { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_index(&self, id: &str) -> Result<usize> {
        self.cells
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    pub fn dim(&self, cell: usize) -> usize {
        self.cells[cell].dim()
    }

    pub fn full_rect(&self, cell: usize) -> Rect {
        Rect {
            cell,
            axes: self.cells[cell].axes.iter().map(|a| a.constraint()).collect(),
        }
    }

    pub fn full(&self) -> RectSet {
        RectSet::from_disjoint((0..self.cells.len()).map(|c| self.full_rect(c)).collect())
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self.cells.get(p.cell) {
            Some(c) => c.dim() == p.coords.len() && c.axes.iter().zip(&p.coords).all(|(a, &x)| a.contains(x)),
            None => false,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutside(self.show(p)))
        }
    }

    pub fn point(&self, cell: &str, coords: &[i64]) -> Result<Point> {
        let p = Point::new(self.cell_index(cell)?, coords.to_vec());
        self.check(&p)?;
        Ok(p)
    }

    pub fn window(&self, radius: i64) -> Vec<Point> {
        self.full().enumerate_window(self, radius)
    }

    pub fn show(&self, p: &Point) -> String {
        let id = self.cells.get(p.cell).map(|c| c.id.as_str()).unwrap_or("?");
        format!("{id}{:?}", p.coords)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub cell: usize,
    pub coords: Vec<i64>,
}

impl Point {
    pub fn new(cell: usize, coords: Vec<i64>) -> Self {
        Point { cell, coords }
    }

    /// Largest absolute coordinate.
    pub fn norm(&self) -> i64 {
        self.coords.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Card {
    Finite(u64),
    Infinite,
}

impl Card {
    pub fn is_finite(self) -> bool {
        matches!(self, Card::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Card::Finite(n) => Some(n),
            Card::Infinite => None,
        }
    }
}

impl Add for Card {
    type Output = Card;
    fn add(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a.saturating_add(b)),
            _ => Card::Infinite,
        }
    }
}

impl std::iter::Sum for Card {
    fn sum<I: Iterator<Item = Card>>(iter: I) -> Card {
        iter.fold(Card::Finite(0), |a, b| a + b)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Infinite => write!(f, "inf"),
        }
    }
}

/// The set `{x : lo <= x <= hi, x = r mod q}`. Always nonempty; finite bounds are
/// tightened onto the progression and `0 <= r < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisConstraint {
    lo: Option<i64>,
    hi: Option<i64>,
    r: i64,
    q: i64,
}

impl AxisConstraint {
    pub fn new(lo: Option<i64>, hi: Option<i64>, r: i64, q: i64) -> Option<Self> {
        assert!(q >= 1, "stride must be positive");
        let r = r.rem_euclid(q);
        let lo = lo.map(|l| l + (r - l).rem_euclid(q));
        let hi = hi.map(|h| h - (h - r).rem_euclid(q));
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return None;
            }
            if l == h {
                return Some(AxisConstraint::point(l));
            }
        }
        Some(AxisConstraint { lo, hi, r, q })
    }

    pub fn all() -> Self {
        AxisConstraint { lo: None, hi: None, r: 0, q: 1 }
    }

    pub fn point(x: i64) -> Self {
        AxisConstraint { lo: Some(x), hi: Some(x), r: 0, q: 1 }
    }

    pub fn interval(lo: Option<i64>, hi: Option<i64>) -> Option<Self> {
        Self::new(lo, hi, 0, 1)
    }

    pub fn lo(&self) -> Option<i64> {
        self.lo
    }

    pub fn hi(&self) -> Option<i64> {
        self.hi
    }

    pub fn residue(&self) -> i64 {
        self.r
    }

    pub fn stride(&self) -> i64 {
        self.q
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo.is_none_or(|l| x >= l) && self.hi.is_none_or(|h| x <= h) && (x - self.r).rem_euclid(self.q) == 0
    }

    pub fn card(&self) -> Card {
        match (self.lo, self.hi) {
            (Some(l), Some(h)) => Card::Finite(((h - l) / self.q + 1) as u64),
            _ => Card::Infinite,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    /// Some element of the progression, preferring the lower end.
    pub fn sample(&self) -> i64 {
        self.lo.or(self.hi).unwrap_or(self.r)
    }

    /// The only element, if there is exactly one.
    pub fn single(&self) -> Option<i64> {
        match (self.lo, self.hi) {
            (Some(l), Some(h)) if l == h => Some(l),
            _ => None,
        }
    }

    pub fn values(&self) -> Vec<i64> {
        let (l, h) = (self.lo.expect("finite constraint"), self.hi.expect("finite constraint"));
        (0..=(h - l) / self.q).map(|i| l + i * self.q).collect()
    }

    pub fn clip(&self, lo: i64, hi: i64) -> Option<Self> {
        self.intersect(&AxisConstraint::interval(Some(lo), Some(hi))?)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (r, q) = crt(self.r, self.q, other.r, other.q)?;
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        AxisConstraint::new(lo, hi, r, q)
    }

    /// Disjoint pieces covering `self \ other`.
    pub fn diff(&self, other: &Self) -> Vec<Self> {
        match self.intersect(other) {
            None => vec![*self],
            Some(i) => self.diff_sub(&i),
        }
    }

    fn diff_sub(&self, i: &Self) -> Vec<Self> {
        let mut out = Vec::new();
        if let Some(l) = i.lo {
            out.extend(self.intersect(&AxisConstraint::interval(None, Some(l - 1)).unwrap()));
        }
        if let Some(h) = i.hi {
            out.extend(self.intersect(&AxisConstraint::interval(Some(h + 1), None).unwrap()));
        }
        let mut x = self.r;
        while x < i.q {
            if x.rem_euclid(i.q) != i.r {
                out.extend(AxisConstraint::new(i.lo, i.hi, x, i.q));
            }
            x += self.q;
        }
        out
    }

    /// Image under `x -> sign * x + t`.
    pub fn map(&self, sign: i64, t: i64) -> Self {
        if sign > 0 {
            AxisConstraint::new(self.lo.map(|x| x + t), self.hi.map(|x| x + t), self.r + t, self.q).unwrap()
        } else {
            AxisConstraint::new(self.hi.map(|x| t - x), self.lo.map(|x| t - x), t - self.r, self.q).unwrap()
        }
    }

    /// Try to express the union of two disjoint constraints as one.
    fn merge(&self, other: &Self) -> Option<Self> {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let (x, y) = (self.sample(), other.sample());
        let eff = |c: &Self| if c.single().is_some() { 0 } else { c.q };
        let g = eff(self).gcd(&eff(other)).gcd(&(x - y).abs());
        let g = if g == 0 { 1 } else { g };
        let m = AxisConstraint::new(lo, hi, x, g)?;
        let rest: Vec<Self> = m.diff(self).iter().flat_map(|p| p.diff(other)).collect();
        rest.is_empty().then_some(m)
    }
}

fn crt(r1: i64, q1: i64, r2: i64, q2: i64) -> Option<(i64, i64)> {
    let g = q1.gcd(&q2);
    if (r2 - r1).rem_euclid(g) != 0 {
        return None;
    }
    let l = q1.lcm(&q2);
    let (a, b, d) = (q1 as i128 / g as i128, q2 as i128 / g as i128, (r2 - r1) as i128 / g as i128);
    let inv = if b == 1 { 0 } else { mod_inverse(a.rem_euclid(b), b) };
    let k = (d * inv).rem_euclid(b.max(1));
    let x = (r1 as i128 + q1 as i128 * k).rem_euclid(l as i128);
    Some((x as i64, l))
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

impl fmt::Display for AxisConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.map_or("-inf".to_string(), |x| x.to_string());
        let hi = self.hi.map_or("inf".to_string(), |x| x.to_string());
        if self.q == 1 {
            write!(f, "[{lo},{hi}]")
        } else {
            write!(f, "[{lo},{hi}]~{}mod{}", self.r, self.q)
        }
    }
}

/// A product of axis constraints inside one cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub cell: usize,
    pub axes: Vec<AxisConstraint>,
}

impl Rect {
    pub fn new(cell: usize, axes: Vec<AxisConstraint>) -> Self {
        Rect { cell, axes }
    }

    pub fn point(p: &Point) -> Self {
        Rect { cell: p.cell, axes: p.coords.iter().map(|&x| AxisConstraint::point(x)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.cell == self.cell && p.coords.len() == self.axes.len() && self.axes.iter().zip(&p.coords).all(|(a, &x)| a.contains(x))
    }

    pub fn card(&self) -> Card {
        let mut n: u64 = 1;
        for a in &self.axes {
            match a.card() {
                Card::Finite(k) => n = n.saturating_mul(k),
                Card::Infinite => return Card::Infinite,
            }
        }
        Card::Finite(n)
    }

    pub fn is_finite(&self) -> bool {
        self.axes.iter().all(|a| a.is_finite())
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        if self.cell != other.cell || self.axes.len() != other.axes.len() {
            return None;
        }
        let axes = self.axes.iter().zip(&other.axes).map(|(a, b)| a.intersect(b)).collect::<Option<Vec<_>>>()?;
        Some(Rect { cell: self.cell, axes })
    }

    /// Disjoint rectangles covering `self \ other`.
    pub fn diff(&self, other: &Rect) -> Vec<Rect> {
        let Some(i) = self.intersect(other) else {
            return vec![self.clone()];
        };
        let mut out = Vec::new();
        let mut rem = self.clone();
        for k in 0..self.axes.len() {
            for part in rem.axes[k].diff_sub(&i.axes[k]) {
                let mut r = rem.clone();
                r.axes[k] = part;
                out.push(r);
            }
            rem.axes[k] = i.axes[k];
        }
        out
    }

    pub fn points(&self) -> Vec<Point> {
        let mut out = vec![Vec::new()];
        for a in &self.axes {
            let vals = a.values();
            out = out
                .into_iter()
                .flat_map(|c| {
                    vals.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        out.into_iter().map(|c| Point::new(self.cell, c)).collect()
    }

    /// Some point of the rectangle, close to the origin on unbounded axes.
    pub fn sample(&self) -> Point {
        Point::new(self.cell, self.axes.iter().map(|a| a.sample()).collect())
    }

    fn window(&self, carrier: &Carrier, radius: i64) -> Vec<Point> {
        let cell = carrier.cell(self.cell);
        let mut clipped = Vec::with_capacity(self.axes.len());
        for (a, dom) in self.axes.iter().zip(&cell.axes) {
            let c = if dom.is_bounded() { Some(*a) } else { a.clip(-radius, radius) };
            match c {
                Some(c) => clipped.push(c),
                None => return Vec::new(),
            }
        }
        Rect::new(self.cell, clipped).points()
    }
}

/// A finite set of pairwise disjoint rectangles, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RectSet {
    rects: Vec<Rect>,
}

impl RectSet {
    pub fn empty() -> Self {
        RectSet { rects: Vec::new() }
    }

    /// Normalize an arbitrary list of rectangles.
    pub fn normalize(rects: Vec<Rect>) -> Self {
        let mut out: Vec<Rect> = Vec::new();
        for r in rects {
            let mut pieces = vec![r];
            for o in &out {
                pieces = pieces.into_iter().flat_map(|p| p.diff(o)).collect();
                if pieces.is_empty() {
                    break;
                }
            }
            out.extend(pieces);
        }
        Self::from_disjoint(out)
    }

    /// Canonicalize a list already known to be pairwise disjoint.
    pub fn from_disjoint(rects: Vec<Rect>) -> Self {
        RectSet { rects: merge_all(rects) }
    }

    pub fn from_rect(r: Rect) -> Self {
        RectSet { rects: vec![r] }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut pts: Vec<&Point> = points.into_iter().collect();
        pts.sort();
        pts.dedup();
        Self::from_disjoint(pts.into_iter().map(Rect::point).collect())
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn into_rects(self) -> Vec<Rect> {
        self.rects
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.rects.iter().any(|r| r.contains(p))
    }

    pub fn card(&self) -> Card {
        self.rects.iter().map(|r| r.card()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.rects.iter().all(|r| r.is_finite())
    }

    pub fn union(&self, other: &RectSet) -> RectSet {
        let mut rects = self.rects.clone();
        rects.extend(other.diff(self).rects);
        Self::from_disjoint(rects)
    }

    pub fn intersect(&self, other: &RectSet) -> RectSet {
        let mut out = Vec::new();
        for a in &self.rects {
            for b in &other.rects {
                out.extend(a.intersect(b));
            }
        }
        Self::from_disjoint(out)
    }

    pub fn intersect_rect(&self, r: &Rect) -> RectSet {
        Self::from_disjoint(self.rects.iter().filter_map(|a| a.intersect(r)).collect())
    }

    pub fn diff(&self, other: &RectSet) -> RectSet {
        let mut out = Vec::new();
        for a in &self.rects {
            let mut pieces = vec![a.clone()];
            for b in &other.rects {
                pieces = pieces.into_iter().flat_map(|p| p.diff(b)).collect();
                if pieces.is_empty() {
                    break;
                }
            }
            out.extend(pieces);
        }
        Self::from_disjoint(out)
    }

    /// Cardinality of the intersection, without building it canonically.
    pub fn overlap(&self, other: &RectSet) -> Card {
        let mut c = Card::Finite(0);
        for a in &self.rects {
            for b in &other.rects {
                if let Some(i) = a.intersect(b) {
                    c = c + i.card();
                }
            }
        }
        c
    }

    pub fn subset_of(&self, other: &RectSet) -> bool {
        self.diff(other).is_empty()
    }

    pub fn same_set(&self, other: &RectSet) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    /// All points of a finite set, sorted.
    pub fn points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self.rects.iter().flat_map(|r| r.points()).collect();
        v.sort();
        v
    }

    /// Points with every unbounded coordinate in `[-radius, radius]`; bounded axes are
    /// enumerated whole.
    pub fn enumerate_window(&self, carrier: &Carrier, radius: i64) -> Vec<Point> {
        let mut v: Vec<Point> = self.rects.iter().flat_map(|r| r.window(carrier, radius)).collect();
        v.sort();
        v
    }

    pub fn restrict_cell(&self, cell: usize) -> RectSet {
        RectSet { rects: self.rects.iter().filter(|r| r.cell == cell).cloned().collect() }
    }
}

fn merge_all(mut rects: Vec<Rect>) -> Vec<Rect> {
    loop {
        rects.sort();
        let dim = rects.iter().map(|r| r.dim()).max().unwrap_or(0);
        let mut changed = false;
        for k in 0..dim {
            let mut groups: HashMap<(usize, Vec<AxisConstraint>), Vec<Rect>> = HashMap::new();
            let mut order = Vec::new();
            for r in rects.drain(..) {
                if r.dim() <= k {
                    order.push((r.cell, r.axes.clone()));
                    groups.entry((r.cell, r.axes.clone())).or_default().push(r);
                    continue;
                }
                let mut key = r.axes.clone();
                key.remove(k);
                let key = (r.cell, key);
                if !groups.contains_key(&key) {
                    order.push(key.clone());
                }
                groups.entry(key).or_default().push(r);
            }
            for key in order {
                let Some(mut group) = groups.remove(&key) else { continue };
                if group.len() == 1 || group[0].dim() <= k {
                    rects.append(&mut group);
                    continue;
                }
                group.sort_by(|a, b| a.axes[k].cmp(&b.axes[k]));
                let mut cur = group[0].clone();
                for r in group.into_iter().skip(1) {
                    match cur.axes[k].merge(&r.axes[k]) {
                        Some(m) => {
                            cur.axes[k] = m;
                            changed = true;
                        }
                        None => rects.push(std::mem::replace(&mut cur, r)),
                    }
                }
                rects.push(cur);
            }
        }
        if !changed {
            rects.sort();
            return rects;
        }
    }
}
