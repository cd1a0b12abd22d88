//! File formats. Every top-level document carries `"schema": "nearperm/1"`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::carrier::{AxisConstraint, AxisDomain, Carrier, Cell, Point, Rect, RectSet};
use crate::error::{Error, Result};
use crate::nearaction::{GroupSpec, NearAction};
use crate::nearmap::{NearMap, Piece, Transform};

pub const SCHEMA: &str = "nearperm/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    pub id: String,
    pub axes: Vec<AxisJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierJson {
    pub cells: Vec<CellJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub r: i64,
    pub q: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectJson {
    pub cell: String,
    pub axes: Vec<ConstraintJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub cell: String,
    pub coords: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub source: RectJson,
    pub target_cell: String,
    #[serde(rename = "P")]
    pub p: Vec<Vec<i64>>,
    pub t: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionJson {
    pub from: PointJson,
    pub to: Option<PointJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMapJson {
    pub src: CarrierJson,
    pub dst: CarrierJson,
    pub pieces: Vec<PieceJson>,
    pub exceptions: Vec<ExceptionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(String, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftJson {
    pub generator: String,
    pub map: NearMapJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFile {
    pub schema: String,
    pub carrier: CarrierJson,
    pub group: GroupJson,
    pub lifts: Vec<LiftJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMapFile {
    pub schema: String,
    #[serde(flatten)]
    pub map: NearMapJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetFile {
    pub schema: String,
    pub rects: Vec<RectJson>,
}

fn check_schema(s: &str) -> Result<()> {
    if s != SCHEMA {
        return Err(Error::InvalidInput(format!("unsupported schema `{s}`, expected `{SCHEMA}`")));
    }
    Ok(())
}

pub fn carrier_to_json(c: &Carrier) -> CarrierJson {
    let axis = |a: &AxisDomain| match *a {
        AxisDomain::FullLine => AxisJson { kind: "FullLine".into(), n: None },
        AxisDomain::HalfLine => AxisJson { kind: "HalfLine".into(), n: None },
        AxisDomain::Bounded(n) => AxisJson { kind: "Bounded".into(), n: Some(n) },
    };
    CarrierJson { cells: c.cells().iter().map(|cell| CellJson { id: cell.id.clone(), axes: cell.axes.iter().map(axis).collect() }).collect() }
}

pub fn carrier_from_json(j: &CarrierJson) -> Result<Carrier> {
    let mut cells = Vec::new();
    for c in &j.cells {
        let mut axes = Vec::new();
        for a in &c.axes {
            axes.push(match (a.kind.as_str(), a.n) {
                ("FullLine", None) => AxisDomain::FullLine,
                ("HalfLine", None) => AxisDomain::HalfLine,
                ("Bounded", Some(n)) => AxisDomain::Bounded(n),
                (k, _) => return Err(Error::InvalidCarrier(format!("bad axis `{k}` in cell `{}`", c.id))),
            });
        }
        cells.push(Cell::new(c.id.clone(), axes));
    }
    Carrier::new(cells)
}

pub fn rect_to_json(c: &Carrier, r: &Rect) -> RectJson {
    RectJson {
        cell: c.cell(r.cell).id.clone(),
        axes: r.axes.iter().map(|a| ConstraintJson { lo: a.lo(), hi: a.hi(), r: a.residue(), q: a.stride() }).collect(),
    }
}

pub fn rect_from_json(c: &Carrier, j: &RectJson) -> Result<Rect> {
    let cell = c.cell_index(&j.cell)?;
    if j.axes.len() != c.dim(cell) {
        return Err(Error::InvalidMap(format!("rectangle in `{}` has the wrong dimension", j.cell)));
    }
    let mut axes = Vec::new();
    for a in &j.axes {
        if a.q < 1 {
            return Err(Error::InvalidMap("stride must be positive".into()));
        }
        axes.push(AxisConstraint::new(a.lo, a.hi, a.r, a.q).ok_or_else(|| Error::InvalidMap("empty rectangle".into()))?);
    }
    Ok(Rect::new(cell, axes))
}

pub fn point_to_json(c: &Carrier, p: &Point) -> PointJson {
    PointJson { cell: c.cell(p.cell).id.clone(), coords: p.coords.clone() }
}

pub fn point_from_json(c: &Carrier, j: &PointJson) -> Result<Point> {
    c.point(&j.cell, &j.coords)
}

pub fn nearmap_to_json(m: &NearMap) -> NearMapJson {
    let (s, d) = (m.src(), m.dst());
    NearMapJson {
        src: carrier_to_json(s),
        dst: carrier_to_json(d),
        pieces: m
            .pieces()
            .iter()
            .map(|p| PieceJson {
                source: rect_to_json(s, &p.source),
                target_cell: d.cell(p.target_cell).id.clone(),
                p: p.transform.matrix(),
                t: p.transform.offset().to_vec(),
            })
            .collect(),
        exceptions: m
            .exceptions()
            .iter()
            .map(|(x, y)| ExceptionJson { from: point_to_json(s, x), to: y.as_ref().map(|y| point_to_json(d, y)) })
            .collect(),
    }
}

/// Decode a near map, reusing `src`/`dst` when the embedded carriers match them.
pub fn nearmap_from_json(j: &NearMapJson, carrier: Option<&Arc<Carrier>>) -> Result<NearMap> {
    let resolve = |cj: &CarrierJson| -> Result<Arc<Carrier>> {
        let c = carrier_from_json(cj)?;
        match carrier {
            Some(a) if **a == c => Ok(a.clone()),
            Some(_) => Err(Error::CarrierMismatch),
            None => Ok(Arc::new(c)),
        }
    };
    let src = resolve(&j.src)?;
    let dst = if j.dst == j.src { src.clone() } else { resolve(&j.dst)? };
    let mut pieces = Vec::new();
    for p in &j.pieces {
        let source = rect_from_json(&src, &p.source)?;
        let target = dst.cell_index(&p.target_cell)?;
        pieces.push(Piece::new(source, target, Transform::from_matrix(&p.p, p.t.clone())?));
    }
    let mut exceptions = BTreeMap::new();
    for e in &j.exceptions {
        let x = point_from_json(&src, &e.from)?;
        let y = e.to.as_ref().map(|y| point_from_json(&dst, y)).transpose()?;
        if exceptions.insert(x, y).is_some() {
            return Err(Error::InvalidMap("duplicate exception".into()));
        }
    }
    NearMap::new(src, dst, pieces, exceptions)
}

pub fn group_to_json(g: &GroupSpec) -> GroupJson {
    GroupJson {
        generators: g.generators.clone(),
        relators: g.relators.iter().map(|w| w.iter().map(|&(i, e)| (g.generators[i].clone(), e)).collect()).collect(),
        abelian_rank: g.abelian_rank,
    }
}

pub fn group_from_json(j: &GroupJson) -> Result<GroupSpec> {
    let provisional = GroupSpec::new(j.generators.clone(), Vec::new(), None)?;
    let mut relators = Vec::new();
    for w in &j.relators {
        relators.push(w.iter().map(|(n, e)| Ok((provisional.generator(n)?, *e))).collect::<Result<Vec<_>>>()?);
    }
    GroupSpec::new(j.generators.clone(), relators, j.abelian_rank)
}

pub fn action_to_json(a: &NearAction) -> ActionFile {
    ActionFile {
        schema: SCHEMA.into(),
        carrier: carrier_to_json(a.carrier()),
        group: group_to_json(a.group()),
        lifts: a
            .lifts()
            .iter()
            .zip(&a.group().generators)
            .map(|(m, g)| LiftJson { generator: g.clone(), map: nearmap_to_json(m) })
            .collect(),
    }
}

pub fn action_from_json(f: &ActionFile) -> Result<NearAction> {
    check_schema(&f.schema)?;
    let carrier = Arc::new(carrier_from_json(&f.carrier)?);
    let group = group_from_json(&f.group)?;
    if f.lifts.len() != group.generators.len() {
        return Err(Error::InvalidAction("one lift per generator is required".into()));
    }
    let mut lifts = Vec::new();
    for (l, g) in f.lifts.iter().zip(&group.generators) {
        if &l.generator != g {
            return Err(Error::InvalidAction(format!("lift for `{}` where `{g}` was expected", l.generator)));
        }
        lifts.push(nearmap_from_json(&l.map, Some(&carrier))?);
    }
    NearAction::new(carrier, group, lifts)
}

pub fn subset_to_json(c: &Carrier, y: &RectSet) -> SubsetFile {
    SubsetFile { schema: SCHEMA.into(), rects: y.rects().iter().map(|r| rect_to_json(c, r)).collect() }
}

pub fn subset_from_json(c: &Carrier, f: &SubsetFile) -> Result<RectSet> {
    check_schema(&f.schema)?;
    let rects = f.rects.iter().map(|r| rect_from_json(c, r)).collect::<Result<Vec<_>>>()?;
    Ok(RectSet::normalize(rects))
}

pub fn write_action(a: &NearAction) -> String {
    serde_json::to_string_pretty(&action_to_json(a)).expect("action serializes")
}

pub fn read_action(s: &str) -> Result<NearAction> {
    action_from_json(&serde_json::from_str(s)?)
}

pub fn write_nearmap(m: &NearMap) -> String {
    serde_json::to_string_pretty(&NearMapFile { schema: SCHEMA.into(), map: nearmap_to_json(m) }).expect("map serializes")
}

pub fn read_nearmap(s: &str) -> Result<NearMap> {
    let f: NearMapFile = serde_json::from_str(s)?;
    check_schema(&f.schema)?;
    nearmap_from_json(&f.map, None)
}

pub fn read_subset(c: &Carrier, s: &str) -> Result<RectSet> {
    subset_from_json(c, &serde_json::from_str(s)?)
}
