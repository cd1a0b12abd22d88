//! Near maps between carriers: piecewise signed-affine maps with finitely many
//! exceptional points, and their calculus (composition, inversion, index, parity).

mod transform;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::carrier::{Card, Carrier, Point, Rect, RectSet};
use crate::error::{Error, Result};
use crate::finperm::FinPerm;

pub use transform::Transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtendedInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedInt::Finite(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for ExtendedInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedInt::NegInf => write!(f, "-inf"),
            ExtendedInt::Finite(n) => write!(f, "{n}"),
            ExtendedInt::PosInf => write!(f, "+inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Piece {
    pub source: Rect,
    pub target_cell: usize,
    pub transform: Transform,
}

impl Piece {
    pub fn new(source: Rect, target_cell: usize, transform: Transform) -> Self {
        Piece { source, target_cell, transform }
    }

    pub fn image(&self) -> Rect {
        self.transform.image_rect(&self.source, self.target_cell)
    }

    pub fn apply(&self, x: &Point) -> Point {
        Point::new(self.target_cell, self.transform.apply(&x.coords))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bijectivity {
    pub closely_injective: bool,
    pub closely_surjective: bool,
}

/// Fixed points of a near map: `rects` with `removed` taken out and `added` put in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSet {
    pub rects: RectSet,
    pub added: Vec<Point>,
    pub removed: Vec<Point>,
}

impl FixedSet {
    pub fn contains(&self, p: &Point) -> bool {
        self.added.contains(p) || (self.rects.contains(p) && !self.removed.contains(p))
    }

    pub fn card(&self) -> Card {
        match self.rects.card() {
            Card::Finite(n) => Card::Finite(n + self.added.len() as u64 - self.removed.len() as u64),
            Card::Infinite => Card::Infinite,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rects.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearMap {
    src: Arc<Carrier>,
    dst: Arc<Carrier>,
    pieces: Vec<Piece>,
    exceptions: BTreeMap<Point, Option<Point>>,
}

/// Restricted image bookkeeping used by the index and bijectivity tests.
struct ImageData {
    union: RectSet,
    excess: Card,
    dropped: Card,
}

impl NearMap {
    pub fn new(
        src: Arc<Carrier>,
        dst: Arc<Carrier>,
        pieces: Vec<Piece>,
        exceptions: BTreeMap<Point, Option<Point>>,
    ) -> Result<Self> {
        let m = NearMap { src, dst, pieces, exceptions };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(
        src: Arc<Carrier>,
        dst: Arc<Carrier>,
        pieces: Vec<Piece>,
        exceptions: BTreeMap<Point, Option<Point>>,
    ) -> Self {
        NearMap { src, dst, pieces, exceptions }
    }

    pub fn identity(carrier: Arc<Carrier>) -> Self {
        let pieces = (0..carrier.len())
            .map(|c| Piece::new(carrier.full_rect(c), c, Transform::identity(carrier.dim(c))))
            .collect();
        NearMap { src: carrier.clone(), dst: carrier, pieces, exceptions: BTreeMap::new() }
    }

    pub fn src(&self) -> &Arc<Carrier> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Carrier> {
        &self.dst
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn exceptions(&self) -> &BTreeMap<Point, Option<Point>> {
        &self.exceptions
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidMap(s));
        let mut sources = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let c = p.source.cell;
            if c >= self.src.len() || p.target_cell >= self.dst.len() {
                return bad(format!("piece {i} refers to a missing cell"));
            }
            let d = self.src.dim(c);
            if p.source.dim() != d || self.dst.dim(p.target_cell) != d || p.transform.dim() != d {
                return bad(format!("piece {i} has inconsistent dimensions"));
            }
            if !p.source.diff(&self.src.full_rect(c)).is_empty() {
                return bad(format!("piece {i} source leaves its cell"));
            }
            if !p.image().diff(&self.dst.full_rect(p.target_cell)).is_empty() {
                return bad(format!("piece {i} image leaves the target cell"));
            }
            for (j, q) in sources.iter().enumerate() {
                if p.source.intersect(q).is_some() {
                    return bad(format!("pieces {j} and {i} overlap"));
                }
            }
            sources.push(p.source.clone());
        }
        for (k, v) in &self.exceptions {
            if !self.src.contains(k) {
                return bad(format!("exception key {} outside source", self.src.show(k)));
            }
            if let Some(v) = v {
                if !self.dst.contains(v) {
                    return bad(format!("exception value {} outside target", self.dst.show(v)));
                }
            }
        }
        let uncovered = self.src.full().diff(&RectSet::normalize(sources));
        if !uncovered.is_finite() {
            return bad("pieces do not cover a cofinite subset".into());
        }
        for p in uncovered.points() {
            if !self.exceptions.contains_key(&p) {
                return bad(format!("point {} is neither covered nor listed", self.src.show(&p)));
            }
        }
        Ok(())
    }

    fn eval_raw(&self, x: &Point) -> Option<Point> {
        if let Some(v) = self.exceptions.get(x) {
            return v.clone();
        }
        self.pieces.iter().find(|p| p.source.contains(x)).map(|p| p.apply(x))
    }

    pub fn evaluate(&self, x: &Point) -> Result<Option<Point>> {
        self.src.check(x)?;
        Ok(self.eval_raw(x))
    }

    /// Evaluate a point known to lie in the source.
    pub fn at(&self, x: &Point) -> Option<Point> {
        self.eval_raw(x)
    }

    fn keys(&self) -> RectSet {
        RectSet::from_points(self.exceptions.keys())
    }

    /// Points where the map is undefined.
    pub fn undefined(&self) -> Vec<Point> {
        self.exceptions.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect()
    }

    fn image_data(&self, dom: &RectSet, cod: &RectSet) -> ImageData {
        let keys = self.keys();
        let mut images: Vec<RectSet> = Vec::new();
        let mut dropped = Card::Finite(0);
        for p in &self.pieces {
            let d = dom.intersect_rect(&p.source).diff(&keys);
            if d.is_empty() {
                continue;
            }
            let inv = p.transform.inverse();
            let pulled = RectSet::from_disjoint(
                cod.restrict_cell(p.target_cell).rects().iter().map(|r| inv.image_rect(r, p.source.cell)).collect(),
            );
            let kept = d.intersect(&pulled);
            dropped = dropped + d.diff(&kept).card();
            images.push(RectSet::from_disjoint(
                kept.rects().iter().map(|r| p.transform.image_rect(r, p.target_cell)).collect(),
            ));
        }
        for (k, v) in &self.exceptions {
            if !dom.contains(k) {
                continue;
            }
            match v {
                Some(y) if cod.contains(y) => images.push(RectSet::from_rect(Rect::point(y))),
                _ => dropped = dropped + Card::Finite(1),
            }
        }
        let mut union = RectSet::empty();
        let mut excess = Card::Finite(0);
        for s in images {
            excess = excess + s.overlap(&union);
            union = union.union(&s);
        }
        ImageData { union, excess, dropped }
    }

    pub fn classify_bijectivity(&self) -> Bijectivity {
        let data = self.image_data(&self.src.full(), &self.dst.full());
        Bijectivity {
            closely_injective: data.excess.is_finite(),
            closely_surjective: self.dst.full().diff(&data.union).is_finite(),
        }
    }

    pub fn is_closely_bijective(&self) -> bool {
        let b = self.classify_bijectivity();
        b.closely_injective && b.closely_surjective
    }

    /// Exact bijection of the source onto the target.
    pub fn is_permutation(&self) -> bool {
        let data = self.image_data(&self.src.full(), &self.dst.full());
        data.excess == Card::Finite(0)
            && data.dropped == Card::Finite(0)
            && self.dst.full().diff(&data.union).is_empty()
    }

    fn index_on(&self, dom: &RectSet, cod: &RectSet) -> Result<ExtendedInt> {
        let data = self.image_data(dom, cod);
        let missing = cod.diff(&data.union).card();
        match (data.excess, missing, data.dropped) {
            (Card::Finite(e), Card::Finite(m), Card::Finite(d)) => {
                Ok(ExtendedInt::Finite(m as i64 - d as i64 - e as i64))
            }
            (Card::Finite(_), Card::Infinite, Card::Finite(_)) => Ok(ExtendedInt::PosInf),
            (Card::Infinite, Card::Finite(_), _) => Ok(ExtendedInt::NegInf),
            _ => Err(Error::IndexUndefined),
        }
    }

    /// The banker index: `|target \ image| - |source \ domain|` of an injective representative.
    pub fn index(&self) -> Result<ExtendedInt> {
        self.index_on(&self.src.full(), &self.dst.full())
    }

    /// Index of the restriction to a subset `y` of a square map's carrier.
    pub fn restricted_index(&self, y: &RectSet) -> Result<ExtendedInt> {
        if !self.preserves_up_to_finite(y) {
            return Err(Error::NotCommensurated("subset is not preserved up to a finite set".into()));
        }
        self.index_on(y, y)
    }

    /// Image of a subset of the source.
    pub fn image_of(&self, y: &RectSet) -> RectSet {
        self.image_data(y, &self.dst.full()).union
    }

    /// Symmetric difference `f(y) △ y` for a square map.
    pub fn boundary_of(&self, y: &RectSet) -> RectSet {
        let img = self.image_of(y);
        img.diff(y).union(&y.diff(&img))
    }

    pub fn preserves_up_to_finite(&self, y: &RectSet) -> bool {
        let img = self.image_of(y);
        img.diff(y).is_finite() && y.diff(&img).is_finite()
    }

    /// Points of `y` sent outside `target`, or where the map is undefined.
    pub fn escaping(&self, y: &RectSet, target: &RectSet) -> Card {
        self.image_data(y, target).dropped
    }

    /// Drop redundant exceptions and merge pieces sharing a transform.
    pub fn simplify(self) -> Self {
        let NearMap { src, dst, pieces, mut exceptions } = self;
        exceptions.retain(|k, v| {
            let by_piece = pieces.iter().find(|p| p.source.contains(k)).map(|p| p.apply(k));
            match by_piece {
                Some(y) => v.as_ref() != Some(&y),
                None => true,
            }
        });
        let mut groups: BTreeMap<(usize, usize, Transform), Vec<Rect>> = BTreeMap::new();
        for p in pieces {
            groups.entry((p.source.cell, p.target_cell, p.transform)).or_default().push(p.source);
        }
        let mut pieces: Vec<Piece> = Vec::new();
        for ((_, target, t), rects) in groups {
            for r in RectSet::from_disjoint(rects).into_rects() {
                pieces.push(Piece::new(r, target, t.clone()));
            }
        }
        pieces.sort_by(|a, b| a.source.cmp(&b.source));
        NearMap { src, dst, pieces, exceptions }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &NearMap) -> Result<NearMap> {
        if first.dst != self.src {
            return Err(Error::CarrierMismatch);
        }
        compose(self, first)
    }

    pub fn invert(&self) -> Result<NearMap> {
        if !self.is_closely_bijective() {
            return Err(Error::NotCloselyBijective);
        }
        let keys = self.keys();
        let mut claimed = RectSet::empty();
        let mut pieces = Vec::new();
        let mut special: BTreeSet<Point> = BTreeSet::new();
        for p in &self.pieces {
            let img = RectSet::from_rect(p.image());
            let fresh = img.diff(&claimed);
            let inv = p.transform.inverse();
            for r in fresh.into_rects() {
                pieces.push(Piece::new(r, p.source.cell, inv.clone()));
            }
            claimed = claimed.union(&img);
            for k in keys.intersect_rect(&p.source).points() {
                special.insert(p.apply(&k));
            }
        }
        special.extend(self.exceptions.values().flatten().cloned());
        special.extend(self.dst.full().diff(&claimed).points());
        let mut exceptions = BTreeMap::new();
        for y in special {
            exceptions.insert(y.clone(), self.preimage_point(&y));
        }
        Ok(NearMap { src: self.dst.clone(), dst: self.src.clone(), pieces, exceptions }.simplify())
    }

    /// The first preimage of `y` in piece order, then in exception order.
    fn preimage_point(&self, y: &Point) -> Option<Point> {
        for p in &self.pieces {
            if p.target_cell != y.cell {
                continue;
            }
            let x = Point::new(p.source.cell, p.transform.inverse().apply(&y.coords));
            if p.source.contains(&x) && !self.exceptions.contains_key(&x) {
                return Some(x);
            }
        }
        self.exceptions.iter().find(|(_, v)| v.as_ref() == Some(y)).map(|(k, _)| k.clone())
    }

    /// The points where two maps with the same carriers differ, or an infinite
    /// rectangle on which they disagree.
    pub fn disagreement(&self, other: &NearMap) -> Result<std::result::Result<Vec<Point>, Rect>> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::CarrierMismatch);
        }
        let mut out: BTreeSet<Point> = BTreeSet::new();
        for k in self.exceptions.keys().chain(other.exceptions.keys()) {
            if self.eval_raw(k) != other.eval_raw(k) {
                out.insert(k.clone());
            }
        }
        for p in &self.pieces {
            for q in &other.pieces {
                let Some(i) = p.source.intersect(&q.source) else { continue };
                if p.target_cell == q.target_cell && p.transform.agrees_on(&q.transform, &i) {
                    continue;
                }
                if !i.is_finite() {
                    return Ok(Err(i));
                }
                for x in i.points() {
                    if !self.exceptions.contains_key(&x) && !other.exceptions.contains_key(&x) && p.apply(&x) != q.apply(&x) {
                        out.insert(x);
                    }
                }
            }
        }
        Ok(Ok(out.into_iter().collect()))
    }

    pub fn near_equal(&self, other: &NearMap) -> Result<bool> {
        Ok(self.disagreement(other)?.is_ok())
    }

    pub fn graph_equal(&self, other: &NearMap) -> Result<bool> {
        Ok(matches!(self.disagreement(other)?, Ok(v) if v.is_empty()))
    }

    fn require_square(&self) -> Result<()> {
        if self.src != self.dst {
            return Err(Error::CarrierMismatch);
        }
        Ok(())
    }

    /// Points moved or left undefined, if finitely many.
    pub fn support(&self) -> Result<Vec<Point>> {
        self.require_square()?;
        match self.disagreement(&NearMap::identity(self.src.clone()))? {
            Ok(v) => Ok(v),
            Err(_) => Err(Error::InfiniteSupport),
        }
    }

    pub fn is_finitely_supported(&self) -> Result<bool> {
        match self.support() {
            Ok(_) => Ok(true),
            Err(Error::InfiniteSupport) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// The permutation induced on the finite support.
    pub fn support_permutation(&self) -> Result<(Vec<Point>, FinPerm)> {
        let support = self.support()?;
        if !self.is_permutation() {
            return Err(Error::NotPermutation("map is not a bijection of its carrier".into()));
        }
        let pos: BTreeMap<&Point, usize> = support.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut img = Vec::with_capacity(support.len());
        for x in &support {
            let y = self.eval_raw(x).ok_or_else(|| Error::NotPermutation("undefined point".into()))?;
            img.push(*pos.get(&y).ok_or_else(|| Error::NotPermutation("support not invariant".into()))?);
        }
        let perm = FinPerm::new(img)?;
        Ok((support, perm))
    }

    pub fn cycle_type(&self) -> Result<Vec<usize>> {
        Ok(self.support_permutation()?.1.cycle_type())
    }

    pub fn parity(&self) -> Result<u8> {
        Ok(self.support_permutation()?.1.parity())
    }

    pub fn power(&self, n: i64) -> Result<NearMap> {
        self.require_square()?;
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut out = NearMap::identity(self.src.clone());
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                out = sq.after(&out)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.after(&sq)?;
            }
        }
        Ok(out)
    }

    /// `self ∘ g ∘ self⁻¹ ∘ g⁻¹`.
    pub fn commutator(&self, g: &NearMap) -> Result<NearMap> {
        self.require_square()?;
        let fi = self.invert()?;
        let gi = g.invert()?;
        self.after(&g.after(&fi.after(&gi)?)?)
    }

    pub fn fixed_set(&self) -> Result<FixedSet> {
        self.require_square()?;
        let mut rects = Vec::new();
        for p in &self.pieces {
            if p.target_cell == p.source.cell {
                rects.extend(p.transform.fixed_in(&p.source)?);
            }
        }
        let rects = RectSet::from_disjoint(rects);
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for (k, v) in &self.exceptions {
            let fixed = v.as_ref() == Some(k);
            match (fixed, rects.contains(k)) {
                (true, false) => added.push(k.clone()),
                (false, true) => removed.push(k.clone()),
                _ => {}
            }
        }
        Ok(FixedSet { rects, added, removed })
    }

    /// Largest absolute coordinate mentioned by any finite bound, exception, or translation.
    pub fn horizon(&self) -> i64 {
        let mut h = 0;
        for p in &self.pieces {
            for a in &p.source.axes {
                h = h.max(a.lo().map_or(0, i64::abs)).max(a.hi().map_or(0, i64::abs));
            }
            h = h.max(p.transform.offset().iter().map(|t| t.abs()).max().unwrap_or(0));
        }
        for (k, v) in &self.exceptions {
            h = h.max(k.norm());
            if let Some(v) = v {
                h = h.max(v.norm());
            }
        }
        h
    }
}

fn compose(g: &NearMap, f: &NearMap) -> Result<NearMap> {
    let fkeys = f.keys();
    let mut pieces = Vec::new();
    let mut exceptions: BTreeMap<Point, Option<Point>> = BTreeMap::new();
    for pf in &f.pieces {
        let live = RectSet::from_rect(pf.source.clone()).diff(&fkeys);
        if live.is_empty() {
            continue;
        }
        let img = RectSet::from_disjoint(live.rects().iter().map(|r| pf.transform.image_rect(r, pf.target_cell)).collect());
        let inv = pf.transform.inverse();
        for pg in g.pieces.iter().filter(|pg| pg.source.cell == pf.target_cell) {
            for r in img.intersect_rect(&pg.source).into_rects() {
                pieces.push(Piece::new(inv.image_rect(&r, pf.source.cell), pg.target_cell, pg.transform.after(&pf.transform)));
            }
        }
        for k in g.exceptions.keys().filter(|k| img.contains(k)) {
            let x = Point::new(pf.source.cell, inv.apply(&k.coords));
            exceptions.insert(x, g.eval_raw(k));
        }
    }
    for (x, y) in &f.exceptions {
        exceptions.insert(x.clone(), y.as_ref().and_then(|y| g.eval_raw(y)));
    }
    Ok(NearMap::new_unchecked(f.src.clone(), g.dst.clone(), pieces, exceptions).simplify())
}

#[cfg(test)]
mod tests;
