//! Constructors for the standard example near actions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::carrier::{AxisConstraint, AxisDomain, Carrier, Cell, Point, Rect};
use crate::error::{Error, Result};
use crate::finperm::FinPerm;
use crate::nearaction::{GroupSpec, NearAction};
use crate::nearmap::{NearMap, Piece, Transform};

/// Incremental construction of a near map on one carrier.
pub struct MapBuilder {
    carrier: Arc<Carrier>,
    pieces: Vec<Piece>,
    exceptions: BTreeMap<Point, Option<Point>>,
}

impl MapBuilder {
    pub fn new(carrier: &Arc<Carrier>) -> Self {
        MapBuilder { carrier: carrier.clone(), pieces: Vec::new(), exceptions: BTreeMap::new() }
    }

    fn cell(&self, id: &str) -> usize {
        self.carrier.cell_index(id).expect("catalog cell exists")
    }

    /// Translate the rectangle `axes` of cell `from` into cell `to`.
    pub fn shift(mut self, from: &str, axes: Vec<AxisConstraint>, to: &str, t: Vec<i64>) -> Self {
        let (a, b) = (self.cell(from), self.cell(to));
        self.pieces.push(Piece::new(Rect::new(a, axes), b, Transform::translation(t)));
        self
    }

    pub fn piece(mut self, from: &str, axes: Vec<AxisConstraint>, to: &str, t: Transform) -> Self {
        let (a, b) = (self.cell(from), self.cell(to));
        self.pieces.push(Piece::new(Rect::new(a, axes), b, t));
        self
    }

    /// Translate a whole cell within itself.
    pub fn translate_cell(self, id: &str, t: Vec<i64>) -> Self {
        let c = self.cell(id);
        let axes = self.carrier.full_rect(c).axes;
        self.shift(id, axes, id, t)
    }

    pub fn send(mut self, from: (&str, Vec<i64>), to: Option<(&str, Vec<i64>)>) -> Self {
        let x = Point::new(self.cell(from.0), from.1);
        let y = to.map(|(c, v)| Point::new(self.cell(c), v));
        self.exceptions.insert(x, y);
        self
    }

    pub fn build(self) -> Result<NearMap> {
        NearMap::new(self.carrier.clone(), self.carrier, self.pieces, self.exceptions)
    }
}

fn iv(lo: Option<i64>, hi: Option<i64>) -> AxisConstraint {
    AxisConstraint::interval(lo, hi).expect("nonempty interval")
}

fn at(x: i64) -> AxisConstraint {
    AxisConstraint::point(x)
}

fn from(lo: i64) -> AxisConstraint {
    iv(Some(lo), None)
}

fn upto(hi: i64) -> AxisConstraint {
    iv(None, Some(hi))
}

const AXIS_NAMES: [&str; 4] = ["u", "v", "w", "x"];

fn unit(d: usize, i: usize, s: i64) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = s;
    v
}

pub fn build_shift_n() -> Result<NearAction> {
    let c = Arc::new(Carrier::new(vec![Cell::new("N", vec![AxisDomain::HalfLine])])?);
    let t = MapBuilder::new(&c).translate_cell("N", vec![1]).build()?;
    NearAction::new(c, GroupSpec::free_abelian(&["t"]), vec![t])
}

pub fn build_simply_transitive(d: usize) -> Result<NearAction> {
    build_free_orbits(d, 1)
}

/// `k` disjoint copies of the translation action of Z^d on itself.
pub fn build_free_orbits(d: usize, k: usize) -> Result<NearAction> {
    if d == 0 || d > 4 || k == 0 {
        return Err(Error::InvalidInput("need 1 <= d <= 4 and k >= 1".into()));
    }
    let ids: Vec<String> = if k == 1 { vec!["Z".to_string()] } else { (0..k).map(|i| format!("Z{i}")).collect() };
    let c = Arc::new(Carrier::new(ids.iter().map(|id| Cell::new(id.clone(), vec![AxisDomain::FullLine; d])).collect())?);
    let mut lifts = Vec::new();
    for g in 0..d {
        let mut b = MapBuilder::new(&c);
        for id in &ids {
            b = b.translate_cell(id, unit(d, g, 1));
        }
        lifts.push(b.build()?);
    }
    NearAction::new(c, GroupSpec::free_abelian(&AXIS_NAMES[..d]), lifts)
}

/// Z × Z/2 acting on two lines `p` (height +1) and `m` (height −1); `b` swaps the lines
/// over the non-negative integers.
pub fn build_exzz2() -> Result<NearAction> {
    let c = Arc::new(Carrier::new(vec![
        Cell::new("p", vec![AxisDomain::FullLine]),
        Cell::new("m", vec![AxisDomain::FullLine]),
    ])?);
    let a = MapBuilder::new(&c).translate_cell("p", vec![1]).translate_cell("m", vec![1]).build()?;
    let b = MapBuilder::new(&c)
        .shift("p", vec![from(0)], "m", vec![0])
        .shift("m", vec![from(0)], "p", vec![0])
        .shift("p", vec![upto(-1)], "p", vec![0])
        .shift("m", vec![upto(-1)], "m", vec![0])
        .build()?;
    let group = GroupSpec::new(
        vec!["a".into(), "b".into()],
        vec![vec![(0, 1), (1, 1), (0, -1), (1, -1)], vec![(1, 2)]],
        None,
    )?;
    NearAction::new(c, group, vec![a, b])
}

/// Z^d acting on `d + 1` rays named `1..=d+1`: generator `f_i` pushes ray `i` outward
/// and pulls ray `d + 1` inward, feeding its origin into ray `i`.
pub fn build_houghton_near_zd(d: usize) -> Result<NearAction> {
    if d == 0 || d > 4 {
        return Err(Error::InvalidInput("need 1 <= d <= 4".into()));
    }
    let ids: Vec<String> = (1..=d + 1).map(|i| i.to_string()).collect();
    let c = Arc::new(Carrier::new(ids.iter().map(|id| Cell::new(id.clone(), vec![AxisDomain::HalfLine])).collect())?);
    let last = &ids[d];
    let mut lifts = Vec::new();
    for i in 0..d {
        let mut b = MapBuilder::new(&c);
        for (j, id) in ids.iter().enumerate().take(d) {
            b = b.translate_cell(id, vec![i64::from(i == j)]);
        }
        b = b.shift(last, vec![from(1)], last, vec![-1]).send((last, vec![0]), Some((&ids[i], vec![0])));
        lifts.push(b.build()?);
    }
    let names: Vec<String> = (1..=d).map(|i| format!("f{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    NearAction::new(c, GroupSpec::free_abelian(&refs), lifts)
}

/// The two Houghton permutations of `N × {1,2,3}`.
pub fn build_houghton_gens() -> Result<(NearMap, NearMap)> {
    let a = build_houghton_near_zd(2)?;
    Ok((a.lift(0).clone(), a.lift(1).clone()))
}

/// The 1-ended near Z² set with winding `m` and holonomy `s`, as a cyclic chain of
/// `4m` quadrants `UR_k, UL_k, LL_k, LR_k`. Quadrant coordinates `(a, b)` sit in the
/// plane at `(a, b)`, `(-1-a, b)`, `(-1-a, -1-b)` and `(a, -1-b)` respectively.
pub fn build_x_ms(m: usize, s: (i64, i64)) -> Result<NearAction> {
    if m == 0 {
        return Err(Error::InvalidInput("winding must be at least 1".into()));
    }
    let (s1, s2) = s;
    let name = |q: &str, k: usize| format!("{q}{k}");
    let mut cells = Vec::new();
    for k in 0..m {
        for q in ["UR", "UL", "LL", "LR"] {
            cells.push(Cell::new(name(q, k), vec![AxisDomain::HalfLine; 2]));
        }
    }
    let c = Arc::new(Carrier::new(cells)?);
    let all = || vec![from(0), from(0)];
    let mut u = MapBuilder::new(&c);
    let mut v = MapBuilder::new(&c);
    for k in 0..m {
        let (ur, ul, ll, lr) = (name("UR", k), name("UL", k), name("LL", k), name("LR", k));
        let last = k + 1 == m;
        u = u
            .shift(&ur, all(), &ur, vec![1, 0])
            .shift(&ul, vec![from(1), from(0)], &ul, vec![-1, 0])
            .shift(&ul, vec![at(0), from(0)], &ur, vec![0, 0])
            .shift(&ll, vec![from(1), from(0)], &ll, vec![-1, 0])
            .shift(&lr, all(), &lr, vec![1, 0]);
        let lift_up = if last { s2 } else { 0 };
        u = u.shift(&ll, vec![at(0), from((-lift_up).max(0))], &lr, vec![0, lift_up]);
        for b in 0..(-lift_up).max(0) {
            u = u.send((&ll, vec![0, b]), None);
        }
        let next = name("UR", (k + 1) % m);
        let slide = if last { -s1 } else { 0 };
        v = v
            .shift(&ur, all(), &ur, vec![0, 1])
            .shift(&ul, all(), &ul, vec![0, 1])
            .shift(&ll, vec![from(0), from(1)], &ll, vec![0, -1])
            .shift(&ll, vec![from(0), at(0)], &ul, vec![0, 0])
            .shift(&lr, vec![from(0), from(1)], &lr, vec![0, -1])
            .shift(&lr, vec![from((-slide).max(0)), at(0)], &next, vec![slide, 0]);
        for a in 0..(-slide).max(0) {
            v = v.send((&lr, vec![a, 0]), None);
        }
    }
    NearAction::new(c, GroupSpec::free_abelian(&["u", "v"]), vec![u.build()?, v.build()?])
}

/// Z² on the plane where `v` skips `ℓ` columns across the negative half of the row `y = 0`.
pub fn build_k(l: i64) -> Result<NearAction> {
    if l < 1 {
        return Err(Error::InvalidInput("ℓ must be at least 1".into()));
    }
    let c = Arc::new(Carrier::new(vec![Cell::new("Z2", vec![AxisDomain::FullLine; 2])])?);
    let u = MapBuilder::new(&c).translate_cell("Z2", vec![1, 0]).build()?;
    let all = AxisConstraint::all();
    let mut v = MapBuilder::new(&c)
        .shift("Z2", vec![all, from(1)], "Z2", vec![0, 1])
        .shift("Z2", vec![all, upto(-1)], "Z2", vec![0, 1])
        .shift("Z2", vec![from(1), at(0)], "Z2", vec![0, 1])
        .shift("Z2", vec![upto(-l), at(0)], "Z2", vec![l, 1]);
    for x in (1 - l)..=0 {
        v = v.send(("Z2", vec![x, 0]), None);
    }
    NearAction::new(c, GroupSpec::free_abelian(&["u", "v"]), vec![u, v.build()?])
}

/// Blocks `Z/2^n` for `n = 0..=n_max` together with the family `f_0..=f_{n_max}`.
#[derive(Debug, Clone)]
pub struct ScottTower {
    pub carrier: Arc<Carrier>,
    pub maps: Vec<NearMap>,
}

fn scott_carrier(n_max: u32) -> Result<Arc<Carrier>> {
    if !(1..=20).contains(&n_max) {
        return Err(Error::InvalidInput("need 1 <= n_max <= 20".into()));
    }
    Ok(Arc::new(Carrier::new((0..=n_max).map(|n| Cell::new(format!("B{n}"), vec![AxisDomain::Bounded(1 << n)])).collect())?))
}

/// Rotation of each block `Z/2^n` by `shift(n)`.
fn block_rotation(c: &Arc<Carrier>, n_max: u32, shift: impl Fn(u32) -> i64) -> Result<NearMap> {
    let mut b = MapBuilder::new(c);
    for n in 0..=n_max {
        let size = 1i64 << n;
        let t = shift(n).rem_euclid(size);
        let id = format!("B{n}");
        if t == 0 {
            b = b.translate_cell(&id, vec![0]);
        } else {
            b = b.shift(&id, vec![iv(Some(0), Some(size - t - 1))], &id, vec![t]);
            b = b.shift(&id, vec![iv(Some(size - t), Some(size - 1))], &id, vec![t - size]);
        }
    }
    b.build()
}

/// `f_k` adds `2^(n-k-1)` on blocks `n > k` and fixes blocks `n <= k`, so that `f_k²`
/// and `f_{k-1}` differ exactly on block `k`.
pub fn build_scott_tower(n_max: u32) -> Result<ScottTower> {
    let c = scott_carrier(n_max)?;
    let maps = (0..=n_max)
        .map(|k| block_rotation(&c, n_max, |n| if n > k { 1i64 << (n - k - 1) } else { 0 }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScottTower { carrier: c, maps })
}

/// The permutation adding 1 on every block.
pub fn scott_plus_one(n_max: u32) -> Result<NearMap> {
    let c = scott_carrier(n_max)?;
    block_rotation(&c, n_max, |_| 1)
}

/// Whether the cycle-count criterion allows a `2^k`-th root: every even cycle length
/// must occur a multiple of `2^k` times.
pub fn root_obstruction(p: &FinPerm, k: u32) -> bool {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for c in p.cycles() {
        *counts.entry(c.len()).or_default() += 1;
    }
    counts.iter().all(|(&len, &n)| len % 2 == 1 || n % (1u64 << k) == 0)
}

/// The infinite dihedral group on Z: `u_eo` swaps `2j` and `2j+1`, `u_oe` swaps `2j-1` and `2j`.
pub fn build_dinfty_on_z() -> Result<NearAction> {
    dinfty(false)
}

/// As [`build_dinfty_on_z`] but with `u_eo` fixing 0 and 1, which splits Z into two orbits.
pub fn build_dinfty_split() -> Result<NearAction> {
    dinfty(true)
}

fn dinfty(split: bool) -> Result<NearAction> {
    let c = Arc::new(Carrier::new(vec![Cell::new("Z", vec![AxisDomain::FullLine])])?);
    let evens = AxisConstraint::new(None, None, 0, 2).expect("nonempty");
    let odds = AxisConstraint::new(None, None, 1, 2).expect("nonempty");
    let mut eo = MapBuilder::new(&c).shift("Z", vec![evens], "Z", vec![1]).shift("Z", vec![odds], "Z", vec![-1]);
    if split {
        eo = eo.send(("Z", vec![0]), Some(("Z", vec![0]))).send(("Z", vec![1]), Some(("Z", vec![1])));
    }
    let oe = MapBuilder::new(&c).shift("Z", vec![odds], "Z", vec![1]).shift("Z", vec![evens], "Z", vec![-1]);
    let group = GroupSpec::new(vec!["u_eo".into(), "u_oe".into()], vec![vec![(0, 2)], vec![(1, 2)]], None)?;
    NearAction::new(c, group, vec![eo.build()?, oe.build()?])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub doc: &'static str,
}

pub fn list() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry { name: "shift_N", params: "", doc: "Z acting on N by n -> n+1 (index 1)" },
        CatalogEntry { name: "simply_transitive", params: "--d", doc: "Z^d acting on itself by translations" },
        CatalogEntry { name: "free_orbits", params: "--d --k", doc: "k disjoint copies of the simply transitive Z^d action" },
        CatalogEntry { name: "exzz2", params: "", doc: "Z x Z/2 on Z x {1,-1}; the commutator is a transposition" },
        CatalogEntry { name: "houghton", params: "--d", doc: "balanced near Z^d action on d+1 rays" },
        CatalogEntry { name: "X_ms", params: "--m --s S1 S2", doc: "1-ended near Z^2 set with winding m and holonomy s" },
        CatalogEntry { name: "K", params: "--l", doc: "near Z^2 action on the plane with a skip of l columns (index -l on v)" },
        CatalogEntry { name: "dinfty", params: "", doc: "infinite dihedral group on Z by parity swaps" },
        CatalogEntry { name: "dinfty_split", params: "", doc: "dinfty with u_eo fixing 0 and 1 (two orbits)" },
    ]
}

#[derive(Debug, Clone, Default)]
pub struct Params {
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub s: Option<(i64, i64)>,
    pub l: Option<i64>,
}

pub fn build(name: &str, p: &Params) -> Result<NearAction> {
    match name {
        "shift_N" => build_shift_n(),
        "simply_transitive" => build_simply_transitive(p.d.unwrap_or(2)),
        "free_orbits" => build_free_orbits(p.d.unwrap_or(1), p.k.unwrap_or(2)),
        "exzz2" => build_exzz2(),
        "houghton" => build_houghton_near_zd(p.d.unwrap_or(2)),
        "X_ms" => build_x_ms(p.m.unwrap_or(1), p.s.unwrap_or((0, 0))),
        "K" => build_k(p.l.unwrap_or(1)),
        "dinfty" => build_dinfty_on_z(),
        "dinfty_split" => build_dinfty_split(),
        other => Err(Error::InvalidInput(format!("unknown catalog entry `{other}`"))),
    }
}
