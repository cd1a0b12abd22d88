//! The mod-p invariant of near actions of `C_{pn} *_{C_p} C_{p²} = <t, u | t^{pn}, u^{p²}, t^n = u^p>`
//! on finite windows, and the standard non-realizable model.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finperm::FinPerm;

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `t` and `u` on a finite window. Points in `boundary` are truncation artifacts: the
/// relations may fail there and no admissible subset may touch them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamData {
    p: u64,
    n: u64,
    t: FinPerm,
    u: FinPerm,
    boundary: BTreeSet<usize>,
}

impl AmalgamData {
    pub fn new(p: u64, n: u64, t: FinPerm, u: FinPerm, boundary: BTreeSet<usize>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if n == 0 || !n.is_multiple_of(p) {
            return Err(Error::InvalidInput(format!("n = {n} must be a positive multiple of p = {p}")));
        }
        if t.len() != u.len() {
            return Err(Error::InvalidInput("t and u act on windows of different sizes".into()));
        }
        if t.pow(p * n) != FinPerm::identity(t.len()) {
            return Err(Error::InvalidInput(format!("t^{} is not the identity", p * n)));
        }
        if u.pow(p * p) != FinPerm::identity(u.len()) {
            return Err(Error::InvalidInput(format!("u^{} is not the identity", p * p)));
        }
        if boundary.iter().any(|&b| b >= t.len()) {
            return Err(Error::InvalidInput("boundary point outside the window".into()));
        }
        Ok(AmalgamData { p, n, t, u, boundary })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &FinPerm {
        &self.t
    }

    pub fn u(&self) -> &FinPerm {
        &self.u
    }

    pub fn boundary(&self) -> &BTreeSet<usize> {
        &self.boundary
    }

    /// Interior points where `t^n` and `u^p` disagree.
    pub fn f_set(&self) -> Vec<usize> {
        let tn = self.t.pow(self.n);
        let up = self.u.pow(self.p);
        (0..self.len()).filter(|x| !self.boundary.contains(x) && tn.apply(*x) != up.apply(*x)).collect()
    }

    /// `u`-orbits avoiding the boundary, each sorted.
    pub fn interior_u_orbits(&self) -> Vec<Vec<usize>> {
        self.u
            .cycles()
            .into_iter()
            .filter(|c| c.iter().all(|x| !self.boundary.contains(x)))
            .map(|mut c| {
                c.sort();
                c
            })
            .collect()
    }

    /// Number of `p`-cycles of `t^n` on `y`, mod `p`.
    pub fn invariant(&self, y: &[usize]) -> Result<u64> {
        let set: BTreeSet<usize> = y.iter().copied().collect();
        if let Some(x) = set.iter().find(|&&x| x >= self.len() || self.boundary.contains(&x)) {
            return Err(Error::InvalidInput(format!("point {x} is not an interior point of the window")));
        }
        if set.iter().any(|&x| !set.contains(&self.u.apply(x))) {
            return Err(Error::InvalidInput("subset is not u-invariant".into()));
        }
        if let Some(x) = self.f_set().into_iter().find(|x| !set.contains(x)) {
            return Err(Error::InvalidInput(format!("subset misses point {x} where t^n and u^p differ")));
        }
        let tn = self.t.pow(self.n);
        if set.iter().any(|&x| !set.contains(&tn.apply(x))) {
            return Err(Error::InvalidInput("subset is not t^n-invariant".into()));
        }
        let mut seen = BTreeSet::new();
        let mut count = 0u64;
        for &x in &set {
            if seen.contains(&x) {
                continue;
            }
            let mut len = 0u64;
            let mut y = x;
            loop {
                seen.insert(y);
                len += 1;
                y = tn.apply(y);
                if y == x {
                    break;
                }
            }
            count += u64::from(len == self.p);
        }
        Ok(count % self.p)
    }

    /// Disjoint union, with `other` shifted past `self`.
    pub fn disjoint_union(&self, other: &AmalgamData) -> Result<AmalgamData> {
        if (self.p, self.n) != (other.p, other.n) {
            return Err(Error::InvalidInput("different amalgams".into()));
        }
        let k = self.len();
        let join = |a: &FinPerm, b: &FinPerm| {
            FinPerm::new(a.images().iter().copied().chain(b.images().iter().map(|x| x + k)).collect())
        };
        let boundary = self.boundary.iter().copied().chain(other.boundary.iter().map(|x| x + k)).collect();
        AmalgamData::new(self.p, self.n, join(&self.t, &other.t)?, join(&self.u, &other.u)?, boundary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    T(u64),
    U(u64),
}

/// An element `z^central * w` with `z = t^n = u^p` and `w` a reduced word of `C_n * C_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub central: u64,
    pub word: Vec<Letter>,
}

impl Element {
    /// Whether the word is empty or ends with a power of `t`.
    pub fn in_model(&self) -> bool {
        !matches!(self.word.last(), Some(Letter::U(_)))
    }

    pub fn show(&self) -> String {
        let mut s = format!("z^{}", self.central);
        for l in &self.word {
            match l {
                Letter::T(a) => s.push_str(&format!(" t^{a}")),
                Letter::U(b) => s.push_str(&format!(" u^{b}")),
            }
        }
        s
    }
}

struct Amalgam {
    p: u64,
    n: u64,
}

impl Amalgam {
    /// Left multiplication by `t` (`is_t`) or `u`.
    fn mul(&self, is_t: bool, x: &Element) -> Element {
        let order = if is_t { self.n } else { self.p };
        let mut y = x.clone();
        let head = match (is_t, y.word.first()) {
            (true, Some(Letter::T(a))) => Some(*a),
            (false, Some(Letter::U(b))) => Some(*b),
            _ => None,
        };
        match head {
            Some(a) if a + 1 == order => {
                y.word.remove(0);
                y.central = (y.central + 1) % self.p;
            }
            Some(a) => y.word[0] = if is_t { Letter::T(a + 1) } else { Letter::U(a + 1) },
            None => y.word.insert(0, if is_t { Letter::T(1) } else { Letter::U(1) }),
        }
        y
    }

    fn mul_pow(&self, is_t: bool, k: u64, x: &Element) -> Element {
        (0..k).fold(x.clone(), |y, _| self.mul(is_t, &y))
    }

    fn inverse_mul(&self, is_t: bool, x: &Element) -> Element {
        let order = if is_t { self.p * self.n } else { self.p * self.p };
        self.mul_pow(is_t, order - 1, x)
    }

    /// All elements with words of length at most `r`.
    fn ball(&self, r: usize) -> Vec<Element> {
        let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut layer = words.clone();
        for _ in 0..r {
            let mut next = Vec::new();
            for w in &layer {
                let ts = !matches!(w.first(), Some(Letter::T(_)));
                let us = !matches!(w.first(), Some(Letter::U(_)));
                if ts {
                    for a in 1..self.n {
                        next.push([vec![Letter::T(a)], w.clone()].concat());
                    }
                }
                if us {
                    for b in 1..self.p {
                        next.push([vec![Letter::U(b)], w.clone()].concat());
                    }
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let mut out: Vec<Element> =
            words.into_iter().flat_map(|w| (0..self.p).map(move |c| Element { central: c, word: w.clone() })).collect();
        out.sort();
        out
    }
}

/// Sizes of `gX △ X` inside the radius-`radius` ball for `g = t, u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceRow {
    pub radius: usize,
    pub t_boundary: usize,
    pub u_boundary: usize,
}

#[derive(Debug, Clone)]
pub struct AmalgamModel {
    pub data: AmalgamData,
    pub elements: Vec<Element>,
    /// The central subgroup `<t^n>`, as window indices.
    pub designated: Vec<usize>,
    pub evidence: Vec<EvidenceRow>,
    /// First radius from which the evidence rows stop changing.
    pub stable_from: usize,
}

/// The model on words ending with a power of `t`, truncated to words of length at most `l`.
/// `t` acts by left translation and `u` by left translation except on `<t^n>`, which it fixes.
pub fn build_amalgam_model(p: u64, n: u64, l: usize) -> Result<AmalgamModel> {
    if !is_prime(p) || n == 0 || !n.is_multiple_of(p) || l < 3 {
        return Err(Error::InvalidInput("need p prime, p | n and L >= 3".into()));
    }
    let g = Amalgam { p, n };
    let elements: Vec<Element> = g.ball(l).into_iter().filter(|e| e.in_model()).collect();
    let index: HashMap<&Element, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let k = elements.len();
    let mut t_img: Vec<usize> = (0..k).collect();
    let mut u_img: Vec<usize> = (0..k).collect();
    let mut boundary = BTreeSet::new();
    for (i, e) in elements.iter().enumerate() {
        for is_t in [true, false] {
            if !is_t && e.word.is_empty() {
                continue;
            }
            let mut orbit = vec![e.clone()];
            loop {
                let next = g.mul(is_t, orbit.last().expect("nonempty"));
                if &next == e {
                    break;
                }
                orbit.push(next);
            }
            if orbit.iter().all(|x| index.contains_key(x)) {
                let img = index[&g.mul(is_t, e)];
                if is_t {
                    t_img[i] = img;
                } else {
                    u_img[i] = img;
                }
            } else {
                boundary.insert(i);
            }
        }
    }
    let data = AmalgamData::new(p, n, FinPerm::new(t_img)?, FinPerm::new(u_img)?, boundary)?;
    let designated = elements.iter().enumerate().filter(|(_, e)| e.word.is_empty()).map(|(i, _)| i).collect();
    let evidence: Vec<EvidenceRow> = (1..=l)
        .map(|r| {
            let ball = g.ball(r);
            let count = |is_t: bool| {
                ball.iter().filter(|y| y.in_model() != g.inverse_mul(is_t, y).in_model()).count()
            };
            EvidenceRow { radius: r, t_boundary: count(true), u_boundary: count(false) }
        })
        .collect();
    let last = evidence.last().expect("l >= 3");
    let stable_from = evidence
        .iter()
        .position(|row| (row.t_boundary, row.u_boundary) == (last.t_boundary, last.u_boundary))
        .map(|i| evidence[i].radius)
        .expect("last row matches itself");
    Ok(AmalgamModel { data, elements, designated, evidence, stable_from })
}

/// A genuine action on a finite set: `t` a product of `pn`-cycles and `u` a product of
/// `p²`-cycles with `u^p = t^n`, built on `copies` disjoint copies of `Z/pn`.
pub fn realizable_window(p: u64, n: u64, copies: usize) -> Result<AmalgamData> {
    if !is_prime(p) || n == 0 || !n.is_multiple_of(p) {
        return Err(Error::InvalidInput("need p prime and p | n".into()));
    }
    let size = (p * n) as usize;
    let mut t = vec![0usize; size * copies];
    let mut u = vec![0usize; size * copies];
    for c in 0..copies {
        let base = c * size;
        for x in 0..size {
            t[base + x] = base + (x + 1) % size;
        }
        // t^n adds n; residues mod n split into n/p groups of p, and u cycles through
        // each group of p residues before adding n.
        let n_us = n as usize;
        let p_us = p as usize;
        for x in 0..size {
            let r = x % n_us;
            let q = x / n_us;
            let (grp, pos) = (r / p_us, r % p_us);
            let next = if pos + 1 < p_us { (q, grp * p_us + pos + 1) } else { ((q + 1) % p_us, grp * p_us) };
            u[base + x] = base + next.0 * n_us + next.1;
        }
    }
    AmalgamData::new(p, n, FinPerm::new(t)?, FinPerm::new(u)?, BTreeSet::new())
}
