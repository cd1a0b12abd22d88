use std::collections::{BTreeMap, HashMap};

use super::NearAction;
use crate::carrier::{AxisDomain, Point};
use crate::error::{Error, Result};
use crate::nearmap::NearMap;

const START_WINDOW: i64 = 8;
const MAX_WINDOW: i64 = 512;

fn check_alpha(alpha: &NearAction) -> Result<()> {
    let c = alpha.carrier();
    let plane = c.len() == 1 && c.cell(0).axes == vec![AxisDomain::FullLine; 2];
    if !plane || alpha.rank() != 2 {
        return Err(Error::Unsupported("reference action must be Z^2 acting on a single plane".into()));
    }
    for (g, e) in [(0usize, [1i64, 0]), (1, [0, 1])] {
        let f = alpha.lift(g);
        let translated = f.pieces().iter().all(|p| p.transform.is_translation() && p.transform.offset() == e);
        if !translated || !f.exceptions().is_empty() || !f.is_permutation() {
            return Err(Error::Unsupported("reference action must be the standard translation action".into()));
        }
    }
    Ok(())
}

/// The finitely supported permutation `σ` with `σ α(g) σ⁻¹ = β(g)` for both generators,
/// where `α` is the simply transitive action of Z² on the plane and `β` is a genuine
/// action near it.
pub fn rigidity_conjugator(alpha: &NearAction, beta: &NearAction) -> Result<NearMap> {
    check_alpha(alpha)?;
    if beta.carrier() != alpha.carrier() || beta.rank() != 2 {
        return Err(Error::CarrierMismatch);
    }
    for g in 0..2 {
        if !beta.lift(g).near_equal(alpha.lift(g))? {
            return Err(Error::NotConjugate(format!("lift `{}` is not near the reference", beta.group().generators[g])));
        }
    }
    if !beta.is_genuine()? {
        return Err(Error::NotConjugate("second action is not a genuine action".into()));
    }
    let mut w = START_WINDOW.max(alpha.horizon().max(beta.horizon()) + 2);
    let mut last_reason = String::new();
    while w <= MAX_WINDOW {
        match attempt(alpha, beta, w)? {
            Ok(sigma) => return Ok(sigma),
            Err(reason) => last_reason = reason,
        }
        w *= 2;
    }
    Err(Error::WindowExhausted { radius: w / 2, reason: last_reason })
}

/// One attempt at window radius `w`: read `σ⁻¹(0)` off the orbit map of the origin.
fn attempt(alpha: &NearAction, beta: &NearAction, w: i64) -> Result<std::result::Result<NearMap, String>> {
    let origin = Point::new(0, vec![0, 0]);
    // orbit[h] = β(h)(0)
    let mut orbit: HashMap<(i64, i64), Point> = HashMap::new();
    orbit.insert((0, 0), origin.clone());
    for y in 1..=w {
        let prev = orbit[&(0, y - 1)].clone();
        let Some(p) = beta.step(1, 1, &prev) else { return Ok(Err("orbit leaves the domain".into())) };
        orbit.insert((0, y), p);
        let prev = orbit[&(0, 1 - y)].clone();
        let Some(p) = beta.step(1, -1, &prev) else { return Ok(Err("orbit leaves the domain".into())) };
        orbit.insert((0, -y), p);
    }
    for y in -w..=w {
        for x in 1..=w {
            for s in [1i64, -1] {
                let prev = orbit[&(s * (x - 1), y)].clone();
                let Some(p) = beta.step(0, s, &prev) else { return Ok(Err("orbit leaves the domain".into())) };
                orbit.insert((s * x, y), p);
            }
        }
    }
    let mut shift: Option<(i64, i64)> = None;
    for (&(x, y), p) in &orbit {
        if x.abs() != w && y.abs() != w {
            continue;
        }
        let d = (p.coords[0] - x, p.coords[1] - y);
        match shift {
            None => shift = Some(d),
            Some(s) if s != d => return Ok(Err("orbit map is not eventually a translation".into())),
            _ => {}
        }
    }
    let (cx, cy) = shift.expect("nonempty ring");
    let inner = w - cx.abs().max(cy.abs());
    if inner <= 0 {
        return Ok(Err("window too small for the offset".into()));
    }
    let mut exceptions = BTreeMap::new();
    for x in -inner..=inner {
        for y in -inner..=inner {
            let img = orbit[&(x - cx, y - cy)].clone();
            if img.coords != [x, y] {
                exceptions.insert(Point::new(0, vec![x, y]), Some(img));
            }
        }
    }
    let carrier = alpha.carrier().clone();
    let id = NearMap::identity(carrier.clone());
    let sigma = NearMap::new(carrier, id.dst().clone(), id.pieces().to_vec(), exceptions)?;
    if !sigma.is_permutation() {
        return Ok(Err("candidate is not a permutation".into()));
    }
    let sigma_inv = sigma.invert()?;
    for g in 0..2 {
        let conj = sigma.after(&alpha.lift(g).after(&sigma_inv)?)?;
        if !conj.graph_equal(beta.lift(g))? {
            return Ok(Err("candidate does not conjugate".into()));
        }
    }
    Ok(Ok(sigma))
}
