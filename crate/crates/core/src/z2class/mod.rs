//! Ends, corner graphs, winding number and additive holonomy of near Z²-sets given
//! as graded atlases.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::Serialize;

use crate::carrier::{AxisConstraint, AxisDomain, Card, Point, Rect, RectSet};
use crate::error::{Error, Result};
use crate::nearaction::NearAction;
use crate::nearmap::{NearMap, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Corner {
    UR,
    UL,
    LL,
    LR,
}

impl Corner {
    /// Next corner along an edge of the corner graph.
    pub fn successor(self) -> Corner {
        match self {
            Corner::UR => Corner::UL,
            Corner::UL => Corner::LL,
            Corner::LL => Corner::LR,
            Corner::LR => Corner::UR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StripDir {
    Up,
    Left,
    Down,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RectKind {
    Corner(Corner),
    Strip(StripDir),
}

impl fmt::Display for RectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RectKind::Corner(c) => write!(f, "{c:?}"),
            RectKind::Strip(s) => write!(f, "{s:?} strip"),
        }
    }
}

/// An infinite strict rectangle of one cell together with the cell grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRectangle {
    pub rect: Rect,
    pub kind: RectKind,
    /// Cell coordinates to Z², with `u` acting as `+(1,0)` and `v` as `+(0,1)`.
    pub grading: Transform,
}

/// Grading-space bounds of a rectangle, `[x, y]` each as `(lo, hi)`.
type Bounds = [(Option<i64>, Option<i64>); 2];

impl GradedRectangle {
    fn bounds(&self) -> Bounds {
        let m = self.grading.matrix();
        let mut out = [(None, None); 2];
        for (j, row) in m.iter().enumerate() {
            let k = row.iter().position(|&e| e != 0).expect("signed permutation");
            let a = &self.rect.axes[k];
            out[j] = if row[k] > 0 { (a.lo(), a.hi()) } else { (a.hi().map(|h| -h), a.lo().map(|l| -l)) };
        }
        out
    }

    fn cell_axis(&self, j: usize) -> (usize, i64) {
        let row = &self.grading.matrix()[j];
        let k = row.iter().position(|&e| e != 0).expect("signed permutation");
        (k, row[k])
    }

    /// Grading axis and side (`false` = low, `true` = high) of the left and right boundaries.
    fn sides(&self) -> [(usize, bool); 2] {
        use Corner::*;
        use StripDir::*;
        match self.kind {
            RectKind::Corner(UR) => [(0, false), (1, false)],
            RectKind::Corner(UL) => [(1, false), (0, true)],
            RectKind::Corner(LL) => [(0, true), (1, true)],
            RectKind::Corner(LR) => [(1, true), (0, false)],
            RectKind::Strip(Up) => [(0, false), (0, true)],
            RectKind::Strip(Left) => [(1, false), (1, true)],
            RectKind::Strip(Down) => [(0, true), (0, false)],
            RectKind::Strip(Right) => [(1, true), (1, false)],
        }
    }

    fn boundary(&self, (j, high): (usize, bool)) -> Rect {
        let b = self.bounds()[j];
        let v = if high { b.1 } else { b.0 }.expect("boundary side is finite");
        let (k, s) = self.cell_axis(j);
        let mut r = self.rect.clone();
        r.axes[k] = AxisConstraint::point(s * v);
        r
    }

    pub fn left_boundary(&self) -> Rect {
        self.boundary(self.sides()[0])
    }

    pub fn right_boundary(&self) -> Rect {
        self.boundary(self.sides()[1])
    }

    /// The generator and sign pushing the left boundary out of the rectangle.
    pub fn outward(&self) -> (usize, i64) {
        let (j, high) = self.sides()[0];
        (j, if high { 1 } else { -1 })
    }

    pub fn grade(&self, p: &Point) -> [i64; 2] {
        let g = self.grading.apply(&p.coords);
        [g[0], g[1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub rects: Vec<GradedRectangle>,
    /// Finite rectangles left over by the split.
    pub leftover: Vec<Rect>,
}

/// Vertices are infinite graded rectangles; an edge `(p, q, δ)` says `(P, Q)` is adjacent
/// and `Q`'s grading must be shifted by `δ` to continue `P`'s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerGraph {
    pub vertices: Vec<GradedRectangle>,
    pub edges: Vec<(usize, usize, [i64; 2])>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Z2Component {
    pub winding: u64,
    pub holonomy: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Z2Class {
    pub ends: usize,
    pub components: Vec<Z2Component>,
}

fn require_plane_action(a: &NearAction) -> Result<()> {
    if a.rank() != 2 {
        return Err(Error::Unsupported(format!("expected two generators, got {}", a.rank())));
    }
    if let Some(c) = a.carrier().cells().iter().find(|c| c.dim() != 2) {
        return Err(Error::Atlas(format!("cell `{}` is not two dimensional", c.id)));
    }
    Ok(())
}

/// One grading per cell, read off the in-cell unit translations of `u` and `v`.
pub fn cell_gradings(a: &NearAction) -> Result<Vec<Transform>> {
    require_plane_action(a)?;
    let c = a.carrier();
    let mut out = Vec::new();
    for (ci, cell) in c.cells().iter().enumerate() {
        let mut axes = [(0usize, 0i64); 2];
        for (g, slot) in axes.iter_mut().enumerate() {
            let best = a
                .lift(g)
                .pieces()
                .iter()
                .filter(|p| p.source.cell == ci && p.target_cell == ci && p.transform.is_translation())
                .filter(|p| p.transform.offset().iter().map(|x| x.abs()).sum::<i64>() == 1)
                .max_by_key(|p| p.source.axes.iter().filter(|x| !x.is_finite()).count());
            let Some(p) = best else {
                return Err(Error::Atlas(format!(
                    "`{}` has no unit translation inside cell `{}`",
                    a.group().generators[g],
                    cell.id
                )));
            };
            let t = p.transform.offset();
            let k = t.iter().position(|&x| x != 0).expect("unit offset");
            *slot = (k, t[k]);
        }
        if axes[0].0 == axes[1].0 {
            return Err(Error::Atlas(format!("`u` and `v` move along the same axis in cell `{}`", cell.id)));
        }
        out.push(Transform::linear(vec![axes[0].0, axes[1].0], vec![axes[0].1, axes[1].1])?);
    }
    Ok(out)
}

fn split_axis(d: AxisDomain) -> Vec<AxisConstraint> {
    let iv = |lo, hi| AxisConstraint::interval(lo, hi).expect("nonempty");
    match d {
        AxisDomain::FullLine => vec![iv(None, Some(0)), iv(Some(1), None)],
        AxisDomain::HalfLine => vec![iv(Some(0), None)],
        AxisDomain::Bounded(n) => vec![iv(Some(0), Some(n as i64 - 1))],
    }
}

fn kind_of(b: &Bounds) -> Option<RectKind> {
    let side = |(lo, hi): (Option<i64>, Option<i64>)| match (lo, hi) {
        (Some(_), None) => Some(true),
        (None, Some(_)) => Some(false),
        _ => None,
    };
    let bounded = |(lo, hi): (Option<i64>, Option<i64>)| lo.is_some() && hi.is_some();
    Some(match (side(b[0]), side(b[1])) {
        (Some(true), Some(true)) => RectKind::Corner(Corner::UR),
        (Some(false), Some(true)) => RectKind::Corner(Corner::UL),
        (Some(false), Some(false)) => RectKind::Corner(Corner::LL),
        (Some(true), Some(false)) => RectKind::Corner(Corner::LR),
        (None, Some(true)) if bounded(b[0]) => RectKind::Strip(StripDir::Up),
        (None, Some(false)) if bounded(b[0]) => RectKind::Strip(StripDir::Down),
        (Some(true), None) if bounded(b[1]) => RectKind::Strip(StripDir::Right),
        (Some(false), None) if bounded(b[1]) => RectKind::Strip(StripDir::Left),
        _ => return None,
    })
}

/// Split every cell into strict rectangles (full lines are cut between 0 and 1) and
/// check that both generators act as standard unit translations on each of them.
pub fn corner_decomposition(a: &NearAction) -> Result<Decomposition> {
    let gradings = cell_gradings(a)?;
    let c = a.carrier();
    let mut rects = Vec::new();
    let mut leftover = Vec::new();
    for (ci, cell) in c.cells().iter().enumerate() {
        let xs = split_axis(cell.axes[0]);
        let ys = split_axis(cell.axes[1]);
        for x in &xs {
            for y in &ys {
                let rect = Rect::new(ci, vec![*x, *y]);
                let mut g = GradedRectangle { rect, kind: RectKind::Corner(Corner::UR), grading: gradings[ci].clone() };
                match kind_of(&g.bounds()) {
                    Some(k) => {
                        g.kind = k;
                        check_graded(a, &g)?;
                        rects.push(g);
                    }
                    None => leftover.push(g.rect),
                }
            }
        }
    }
    Ok(Decomposition { rects, leftover })
}

/// Inside `P`, every step that stays in `P` must be the standard one, up to finitely many points.
fn check_graded(a: &NearAction, p: &GradedRectangle) -> Result<()> {
    let inv = p.grading.inverse();
    for g in 0..2 {
        for sign in [1i64, -1] {
            let mut d = vec![0i64; 2];
            d[g] = sign;
            let step = inv.apply(&d);
            let back = Transform::translation(step.iter().map(|x| -x).collect());
            let Some(inside) = back.image_rect(&p.rect, p.rect.cell).intersect(&p.rect) else { continue };
            let map = if sign > 0 { a.lift(g) } else { a.inverse_lift(g) };
            let expected = Transform::translation(step.clone());
            for piece in map.pieces() {
                let Some(part) = piece.source.intersect(&inside) else { continue };
                if part.is_finite() || (piece.target_cell == p.rect.cell && piece.transform == expected) {
                    continue;
                }
                let name = &a.group().generators[g];
                return Err(Error::Atlas(format!(
                    "`{name}{}` is not a unit translation on the {} in cell `{}`",
                    if sign > 0 { "" } else { "^-1" },
                    p.kind,
                    a.carrier().cell(p.rect.cell).id
                )));
            }
        }
    }
    Ok(())
}

fn far_point(r: &Rect, t: i64) -> Point {
    let coords = r
        .axes
        .iter()
        .map(|a| match (a.lo(), a.hi()) {
            (Some(l), Some(h)) if l == h => l,
            (Some(l), None) => l + t,
            (None, Some(h)) => h - t,
            _ => unreachable!("boundary rays are half-infinite"),
        })
        .collect();
    Point::new(r.cell, coords)
}

fn near_equal_sets(a: &RectSet, b: &RectSet) -> bool {
    a.diff(b).is_finite() && b.diff(a).is_finite()
}

/// Adjacency: the outward move carries a tail of `∂_L P` onto a tail of `∂_R Q`.
pub fn corner_graph(a: &NearAction, dec: &Decomposition) -> Result<CornerGraph> {
    let c = a.carrier();
    let reach = a.horizon() + 4;
    let mut edges = Vec::new();
    for (i, p) in dec.rects.iter().enumerate() {
        let (g, sign) = p.outward();
        let map: &NearMap = if sign > 0 { a.lift(g) } else { a.inverse_lift(g) };
        let left = p.left_boundary();
        let img = map.image_of(&RectSet::from_rect(left.clone()));
        let targets: Vec<usize> = (0..dec.rects.len())
            .filter(|&j| near_equal_sets(&img, &RectSet::from_rect(dec.rects[j].right_boundary())))
            .collect();
        let describe = |r: &GradedRectangle| format!("{} in `{}`", r.kind, c.cell(r.rect.cell).id);
        let j = match targets.as_slice() {
            [j] => *j,
            _ => {
                return Err(Error::CornerGraph(format!(
                    "left boundary of the {} is not carried onto a single right boundary",
                    describe(p)
                )))
            }
        };
        if j == i {
            return Err(Error::CornerGraph(format!("self-loop at the {}; the action is not near free", describe(p))));
        }
        let q = &dec.rects[j];
        let mut delta: Option<[i64; 2]> = None;
        for t in reach..reach + 3 {
            let x = far_point(&left, t);
            let Some(y) = map.at(&x) else {
                return Err(Error::CornerGraph(format!("outward move undefined far out on the {}", describe(p))));
            };
            let (gp, gq) = (p.grade(&x), q.grade(&y));
            let mut d = [gp[0] - gq[0], gp[1] - gq[1]];
            d[g] += sign;
            match delta {
                None => delta = Some(d),
                Some(e) if e != d => {
                    return Err(Error::Atlas(format!("gradings of the {} and the {} do not line up", describe(p), describe(q))))
                }
                _ => {}
            }
        }
        edges.push((i, j, delta.expect("sampled")));
    }
    let mut indeg = vec![0usize; dec.rects.len()];
    for &(_, j, _) in &edges {
        indeg[j] += 1;
    }
    if let Some(j) = indeg.iter().position(|&d| d != 1) {
        return Err(Error::CornerGraph(format!(
            "the {} in `{}` has in-degree {}; the action is not near free",
            dec.rects[j].kind,
            c.cell(dec.rects[j].rect.cell).id,
            indeg[j]
        )));
    }
    Ok(CornerGraph { vertices: dec.rects.clone(), edges })
}

impl CornerGraph {
    fn next(&self, i: usize) -> (usize, [i64; 2]) {
        let &(_, j, d) = self.edges.iter().find(|e| e.0 == i).expect("out-degree one");
        (j, d)
    }

    /// The cycles, each starting at its least vertex.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.next(i).0;
            }
            out.push(cyc);
        }
        out
    }

    /// Contract every strip into the edge it lies on, summing the grading shifts.
    pub fn glue_strips(&self) -> Result<CornerGraph> {
        let corners: Vec<usize> =
            (0..self.vertices.len()).filter(|&i| matches!(self.vertices[i].kind, RectKind::Corner(_))).collect();
        for cyc in self.cycles() {
            if cyc.iter().all(|&i| !corners.contains(&i)) {
                return Err(Error::CornerGraph("a cycle made of strips only".into()));
            }
        }
        let mut edges = Vec::new();
        for (ni, &i) in corners.iter().enumerate() {
            let (mut j, mut d) = self.next(i);
            while !corners.contains(&j) {
                let (k, e) = self.next(j);
                d = [d[0] + e[0], d[1] + e[1]];
                j = k;
            }
            let nj = corners.iter().position(|&x| x == j).expect("corner");
            edges.push((ni, nj, d));
        }
        let vertices = corners.iter().map(|&i| self.vertices[i].clone()).collect();
        Ok(CornerGraph { vertices, edges })
    }

    pub fn to_dot(&self, a: &NearAction) -> String {
        let c = a.carrier();
        let mut s = String::from("digraph corners {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  r{i} [label=\"{} {}\"];", c.cell(v.rect.cell).id, v.kind);
        }
        for &(i, j, d) in &self.edges {
            let _ = writeln!(s, "  r{i} -> r{j} [label=\"({},{})\"];", d[0], d[1]);
        }
        s.push_str("}\n");
        s
    }
}

fn read_cycle(g: &CornerGraph, cyc: &[usize]) -> Result<Z2Component> {
    let kinds: Vec<Corner> = cyc
        .iter()
        .map(|&i| match g.vertices[i].kind {
            RectKind::Corner(k) => k,
            RectKind::Strip(_) => unreachable!("strips are glued"),
        })
        .collect();
    for w in 0..kinds.len() {
        let next = kinds[(w + 1) % kinds.len()];
        if kinds[w].successor() != next {
            return Err(Error::CornerGraph(format!("{:?} is followed by {:?}", kinds[w], next)));
        }
    }
    let mut s = [0i64; 2];
    for &i in cyc {
        let d = g.next(i).1;
        s = [s[0] + d[0], s[1] + d[1]];
    }
    Ok(Z2Component { winding: (kinds.len() / 4) as u64, holonomy: s })
}

pub fn classify(a: &NearAction) -> Result<Z2Class> {
    let dec = corner_decomposition(a)?;
    let glued = corner_graph(a, &dec)?.glue_strips()?;
    let components = glued.cycles().iter().map(|c| read_cycle(&glued, c)).collect::<Result<Vec<_>>>()?;
    Ok(Z2Class { ends: components.len(), components })
}

/// Refuses actions where some short nonzero word fixes infinitely many points.
pub fn check_near_free(a: &NearAction, depth: usize) -> Result<()> {
    if a.near_free_up_to(depth)? {
        Ok(())
    } else {
        Err(Error::CornerGraph(format!("some nonzero word of length at most {depth} fixes infinitely many points")))
    }
}

/// Number of ends. One-dimensional carriers are handled through ray germs, two-dimensional
/// ones through the corner graph.
pub fn ends(a: &NearAction) -> Result<usize> {
    let dims: BTreeSet<usize> = a.carrier().cells().iter().map(|c| c.dim()).collect();
    match dims.into_iter().collect::<Vec<_>>().as_slice() {
        [1] => Ok(ray_germ_classes(a).len()),
        [2] => Ok(corner_graph(a, &corner_decomposition(a)?)?.cycles().len()),
        _ => Err(Error::Unsupported("ends are computed for carriers of one- or two-dimensional cells".into())),
    }
}

/// Classes of rays (half lines of the cells) joined whenever some lift or inverse lift
/// carries infinitely many points of one into the other.
pub fn ray_germ_classes(a: &NearAction) -> Vec<Vec<Rect>> {
    let c = a.carrier();
    let mut rays = Vec::new();
    for (ci, cell) in c.cells().iter().enumerate() {
        for ax in cell.axes.iter().flat_map(|d| split_axis(*d)) {
            if !ax.is_finite() {
                rays.push(Rect::new(ci, vec![ax]));
            }
        }
    }
    let mut parent: Vec<usize> = (0..rays.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for f in a.lifts().iter().chain((0..a.rank()).map(|g| a.inverse_lift(g))) {
        for (i, r) in rays.iter().enumerate() {
            let img = f.image_of(&RectSet::from_rect(r.clone()));
            for (j, s) in rays.iter().enumerate() {
                if img.intersect_rect(s).card() == Card::Infinite {
                    let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut classes: Vec<Vec<Rect>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..rays.len() {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => classes[k].push(rays[i].clone()),
            None => {
                roots.push(r);
                classes.push(vec![rays[i].clone()]);
            }
        }
    }
    classes
}

/// The complement of the regular set: points where some lift fails to invert its partner or to commute with another lift,
/// including points where a needed value is undefined.
pub fn irregular_points(a: &NearAction) -> Result<Vec<Point>> {
    let id = NearMap::identity(a.carrier().clone());
    let s = |g: usize, e: i64| if e > 0 { a.lift(g) } else { a.inverse_lift(g) };
    let mut pairs: Vec<(NearMap, NearMap)> = Vec::new();
    for i in 0..a.rank() {
        pairs.push((s(i, 1).after(s(i, -1))?, id.clone()));
        pairs.push((s(i, -1).after(s(i, 1))?, id.clone()));
        for j in i + 1..a.rank() {
            for e in [1i64, -1] {
                for f in [1i64, -1] {
                    pairs.push((s(i, e).after(s(j, f))?, s(j, f).after(s(i, e))?));
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (l, r) in &pairs {
        out.extend(l.undefined());
        out.extend(r.undefined());
        match l.disagreement(r)? {
            Ok(pts) => out.extend(pts),
            Err(_) => return Err(Error::InfiniteSupport),
        }
    }
    Ok(out.into_iter().collect())
}

/// Parity of the commutator `[u, v]` of the two permutation lifts.
pub fn kapoudjian_parity(a: &NearAction) -> Result<u8> {
    if a.rank() != 2 {
        return Err(Error::Unsupported("parity needs exactly two generators".into()));
    }
    for g in 0..2 {
        if !a.lift(g).is_permutation() {
            return Err(Error::NotPermutation(format!("lift `{}` is not a permutation", a.group().generators[g])));
        }
    }
    a.lift(0).commutator(a.lift(1))?.parity()
}
