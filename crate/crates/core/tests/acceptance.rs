use std::collections::{BTreeMap, HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearperm::amalgam::{build_amalgam_model, realizable_window};
use nearperm::carrier::{AxisConstraint, AxisDomain, Carrier, Cell, Point, Rect, RectSet};
use nearperm::catalog;
use nearperm::finperm::FinPerm;
use nearperm::nearaction::{rigidity_conjugator, NearAction};
use nearperm::nearmap::{ExtendedInt, NearMap, Piece, Transform};
use nearperm::qcyclic::{DigitStream, QcConstruction};
use nearperm::z2class::{classify, ends, kapoudjian_parity, Z2Class, Z2Component};
use nearperm::Error;

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + salt)
}

// ---------- 1. index calculus ----------

fn line_carrier() -> Arc<Carrier> {
    Arc::new(
        Carrier::new(vec![
            Cell::new("z", vec![AxisDomain::FullLine]),
            Cell::new("n", vec![AxisDomain::HalfLine]),
            Cell::new("b", vec![AxisDomain::Bounded(5)]),
        ])
        .unwrap(),
    )
}

fn iv(lo: Option<i64>, hi: Option<i64>) -> AxisConstraint {
    AxisConstraint::interval(lo, hi).unwrap()
}

fn elementary(c: &Arc<Carrier>, k: usize) -> NearMap {
    let tr = |t: i64| Transform::translation(vec![t]);
    let keep = |cells: &[usize]| -> Vec<Piece> { cells.iter().map(|&i| Piece::new(c.full_rect(i), i, tr(0))).collect() };
    let r = |cell: usize, a: AxisConstraint| Rect::new(cell, vec![a]);
    let (pieces, ex): (Vec<Piece>, Vec<(Point, Option<Point>)>) = match k {
        0 => ([keep(&[0, 2]), vec![Piece::new(c.full_rect(1), 1, tr(1))]].concat(), vec![]),
        1 => (
            [keep(&[0, 2]), vec![Piece::new(r(1, iv(Some(1), None)), 1, tr(-1))]].concat(),
            vec![(Point::new(1, vec![0]), None)],
        ),
        2 => ([keep(&[1, 2]), vec![Piece::new(c.full_rect(0), 0, tr(3))]].concat(), vec![]),
        3 => (
            [keep(&[1, 2]), vec![Piece::new(c.full_rect(0), 0, Transform::new(vec![0], vec![-1], vec![1]).unwrap())]]
                .concat(),
            vec![],
        ),
        4 => (
            [
                keep(&[2]),
                vec![
                    Piece::new(r(0, iv(Some(0), None)), 1, tr(0)),
                    Piece::new(r(0, iv(None, Some(-1))), 0, tr(0)),
                    Piece::new(c.full_rect(1), 0, tr(0)),
                ],
            ]
            .concat(),
            vec![],
        ),
        5 => (
            [
                keep(&[1, 2]),
                vec![
                    Piece::new(r(0, AxisConstraint::new(None, None, 0, 2).unwrap()), 0, tr(1)),
                    Piece::new(r(0, AxisConstraint::new(None, None, 1, 2).unwrap()), 0, tr(-1)),
                ],
            ]
            .concat(),
            vec![],
        ),
        _ => (
            [
                keep(&[0, 1]),
                vec![Piece::new(r(2, iv(Some(0), Some(3))), 2, tr(1)), Piece::new(r(2, iv(Some(4), Some(4))), 2, tr(-4))],
            ]
            .concat(),
            vec![],
        ),
    };
    NearMap::new(c.clone(), c.clone(), pieces, ex.into_iter().collect()).unwrap()
}

fn random_point(c: &Arc<Carrier>, rng: &mut ChaCha8Rng) -> Point {
    let cell = rng.gen_range(0..3);
    let x = rng.gen_range(-8i64..=8);
    let x = match cell {
        1 => x.abs(),
        2 => x.rem_euclid(5),
        _ => x,
    };
    c.point(&c.cell(cell).id, &[x]).unwrap()
}

fn perturb(c: &Arc<Carrier>, f: &NearMap, rng: &mut ChaCha8Rng) -> NearMap {
    let mut ex = f.exceptions().clone();
    for _ in 0..rng.gen_range(1..4) {
        let x = random_point(c, rng);
        let y = if rng.gen_bool(0.2) { None } else { Some(random_point(c, rng)) };
        ex.insert(x, y);
    }
    NearMap::new(c.clone(), c.clone(), f.pieces().to_vec(), ex).unwrap()
}

fn random_map(c: &Arc<Carrier>, rng: &mut ChaCha8Rng) -> NearMap {
    let mut f = NearMap::identity(c.clone());
    for _ in 0..rng.gen_range(0..4) {
        f = elementary(c, rng.gen_range(0..7)).after(&f).unwrap();
    }
    if rng.gen_bool(0.5) {
        f = perturb(c, &f, rng);
    }
    f
}

/// `|core \ image| - |undefined points in core|`, counted pointwise on a large window.
fn index_by_counting(c: &Arc<Carrier>, f: &NearMap) -> i64 {
    let mut pre: HashMap<Point, i64> = HashMap::new();
    let mut undefined = 0;
    for x in c.window(90) {
        match f.at(&x) {
            Some(y) => *pre.entry(y).or_default() += 1,
            None => undefined += i64::from(x.norm() <= 50),
        }
    }
    c.window(50).iter().map(|y| 1 - pre.get(y).copied().unwrap_or(0)).sum::<i64>() - undefined
}

fn criterion_1() {
    let s = catalog::build_shift_n().unwrap();
    assert_eq!(s.lift(0).index().unwrap(), ExtendedInt::Finite(1));
    let c = line_carrier();
    let mut rng = rng(1);
    for _ in 0..200 {
        let f = random_map(&c, &mut rng);
        let g = random_map(&c, &mut rng);
        let (i, j) = (f.index().unwrap().finite().unwrap(), g.index().unwrap().finite().unwrap());
        assert_eq!(i, index_by_counting(&c, &f));
        let h = g.after(&f).unwrap();
        assert_eq!(h.index().unwrap(), ExtendedInt::Finite(i + j));
        assert_eq!(index_by_counting(&c, &h), i + j);
    }
    for _ in 0..100 {
        let f = random_map(&c, &mut rng);
        let f2 = perturb(&c, &f, &mut rng);
        assert!(f.near_equal(&f2).unwrap());
        assert_eq!(f.index().unwrap(), f2.index().unwrap());
    }
}

// ---------- 2. rectangle algebra ----------

#[derive(Clone, Copy)]
struct Ap {
    lo: Option<i64>,
    hi: Option<i64>,
    r: i64,
    q: i64,
}

impl Ap {
    fn has(self, x: i64) -> bool {
        self.lo.is_none_or(|l| x >= l) && self.hi.is_none_or(|h| x <= h) && (x - self.r).rem_euclid(self.q) == 0
    }
}

struct RawRect {
    cell: usize,
    axes: Vec<Ap>,
}

fn plane_carrier() -> Arc<Carrier> {
    Arc::new(
        Carrier::new(vec![
            Cell::new("P", vec![AxisDomain::FullLine, AxisDomain::HalfLine]),
            Cell::new("L", vec![AxisDomain::FullLine]),
        ])
        .unwrap(),
    )
}

fn random_raw(c: &Carrier, rng: &mut ChaCha8Rng) -> (RawRect, Rect) {
    loop {
        let cell = rng.gen_range(0..2);
        let mut raw = Vec::new();
        let mut axes = Vec::new();
        for _ in 0..c.cell(cell).dim() {
            let bound = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(-25i64..=25)) };
            let (lo, hi) = (bound(rng), bound(rng));
            let q = rng.gen_range(1i64..=4);
            let r = rng.gen_range(0..q);
            raw.push(Ap { lo, hi, r, q });
            axes.push(AxisConstraint::new(lo, hi, r, q));
        }
        if let Some(axes) = axes.into_iter().collect::<Option<Vec<_>>>() {
            return (RawRect { cell, axes: raw }, Rect::new(cell, axes));
        }
    }
}

fn raw_has(list: &[RawRect], p: &Point) -> bool {
    list.iter().any(|r| r.cell == p.cell && r.axes.iter().zip(&p.coords).all(|(a, &x)| a.has(x)))
}

fn criterion_2() {
    let c = plane_carrier();
    let window = c.window(30);
    let mut rng = rng(2);
    for _ in 0..500 {
        let (xs, xr): (Vec<RawRect>, Vec<Rect>) = (0..rng.gen_range(1..4)).map(|_| random_raw(&c, &mut rng)).unzip();
        let (ys, yr): (Vec<RawRect>, Vec<Rect>) = (0..rng.gen_range(1..4)).map(|_| random_raw(&c, &mut rng)).unzip();
        let x = RectSet::normalize(xr);
        let y = RectSet::normalize(yr);
        let d = x.diff(&y);
        let i = x.intersect(&y);
        for p in &window {
            let (inx, iny) = (raw_has(&xs, p), raw_has(&ys, p));
            assert_eq!(x.contains(p), inx);
            assert_eq!(d.contains(p), inx && !iny);
            assert_eq!(i.contains(p), inx && iny);
            assert!(x.rects().iter().filter(|r| r.contains(p)).count() <= 1);
            assert!(d.rects().iter().filter(|r| r.contains(p)).count() <= 1);
        }
    }
}

// ---------- 3. Houghton ----------

fn criterion_3() {
    let (f1, f2) = catalog::build_houghton_gens().unwrap();
    let c = f1.src().clone();
    let comm = f1.commutator(&f2).unwrap();
    assert_eq!(comm.cycle_type().unwrap(), vec![2]);
    assert_eq!(comm.parity().unwrap(), 1);
    let (a, b) = (c.point("1", &[0]).unwrap(), c.point("2", &[0]).unwrap());
    assert_eq!(comm.support().unwrap(), vec![a.clone(), b.clone()]);
    assert_eq!(comm.at(&a), Some(b));
    for d in 2..=3 {
        let h = catalog::build_houghton_near_zd(d).unwrap();
        assert!(h.verify().unwrap().ok);
        assert_eq!(h.index_character().unwrap(), vec![0; d]);
        assert_eq!(ends(&h).unwrap(), d + 1);
    }
}

// ---------- 4, 5. Z² classification ----------

fn one_ended(m: u64, s: [i64; 2]) -> Z2Class {
    Z2Class { ends: 1, components: vec![Z2Component { winding: m, holonomy: s }] }
}

fn criterion_4() {
    let mut seen = HashSet::new();
    for m in 1..=4usize {
        for s1 in -3..=3 {
            for s2 in -3..=3 {
                let a = catalog::build_x_ms(m, (s1, s2)).unwrap();
                let c = classify(&a).unwrap();
                assert_eq!(c, one_ended(m as u64, [s1, s2]), "m={m} s=({s1},{s2})");
                assert!(seen.insert(c));
                let swapped = classify(&a.swap_generators(0, 1)).unwrap();
                assert_eq!(swapped, one_ended(m as u64, [-s2, -s1]), "swap m={m} s=({s1},{s2})");
            }
        }
    }
    assert_eq!(seen.len(), 196);
}

fn criterion_5() {
    for l in 1..=3 {
        let k = catalog::build_k(l).unwrap();
        assert_eq!(classify(&k).unwrap(), one_ended(1, [l, 0]));
        assert_eq!(k.index_character().unwrap(), vec![0, -l]);
        // u^a v^b -> s2 a - s1 b with s = (l, 0)
        let x = catalog::build_x_ms(1, (l, 0)).unwrap();
        assert_eq!(x.index_character().unwrap(), vec![0, -l]);
    }
}

// ---------- 6. Kapoudjian parity ----------

fn criterion_6() {
    for m in 2..=5usize {
        let x = catalog::build_x_ms(m, (0, 0)).unwrap();
        assert_eq!(kapoudjian_parity(&x).unwrap() as usize, (m - 1) % 2, "m={m}");
    }
    let a = catalog::build_exzz2().unwrap();
    let c = a.carrier();
    let comm = a.lift(0).commutator(a.lift(1)).unwrap();
    let (p, q) = (c.point("p", &[0]).unwrap(), c.point("m", &[0]).unwrap());
    assert_eq!(comm.support().unwrap(), vec![p.clone(), q.clone()]);
    assert_eq!(comm.at(&p), Some(q.clone()));
    assert_eq!(comm.at(&q), Some(p));
    assert_eq!(comm.parity().unwrap(), 1);
    assert_eq!(kapoudjian_parity(&a).unwrap(), 1);
}

// ---------- 7. Scott tower ----------

/// Restriction of a permutation of a finite carrier to its first `cells` cells.
fn finperm_on_blocks(f: &NearMap, cells: usize) -> FinPerm {
    let c = f.src();
    let pts: Vec<Point> = c.window(1 << 20).into_iter().filter(|p| p.cell < cells).collect();
    let idx: HashMap<&Point, usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    FinPerm::new(pts.iter().map(|p| idx[&f.at(p).unwrap()]).collect()).unwrap()
}

/// Exhaustive search for `r` with `r² = f`. Fixing `r(x) = y` forces `r(y) = f(x)`,
/// `r(f(x)) = f(y)`, ..., so each branch closes a cycle of `r`; dead sets of free points
/// are remembered.
fn brute_square_root(f: &FinPerm) -> Option<FinPerm> {
    const FREE: usize = usize::MAX;
    fn assign(f: &FinPerm, r: &mut [usize], ri: &mut [usize], x: usize, y: usize, log: &mut Vec<usize>) -> bool {
        let (mut a, mut b) = (x, y);
        loop {
            if r[a] != FREE {
                return r[a] == b;
            }
            if ri[b] != FREE {
                return false;
            }
            r[a] = b;
            ri[b] = a;
            log.push(a);
            let next = f.apply(a);
            a = b;
            b = next;
        }
    }
    fn go(f: &FinPerm, r: &mut Vec<usize>, ri: &mut Vec<usize>, dead: &mut HashSet<Vec<bool>>) -> bool {
        let Some(x) = r.iter().position(|&v| v == FREE) else {
            return true;
        };
        let key: Vec<bool> = r.iter().map(|&v| v == FREE).collect();
        if dead.contains(&key) {
            return false;
        }
        for y in 0..r.len() {
            if ri[y] != FREE {
                continue;
            }
            let mut log = Vec::new();
            if assign(f, r, ri, x, y, &mut log) && go(f, r, ri, dead) {
                return true;
            }
            for a in log {
                ri[r[a]] = FREE;
                r[a] = FREE;
            }
        }
        dead.insert(key);
        false
    }
    let mut r = vec![FREE; f.len()];
    let mut ri = vec![FREE; f.len()];
    go(f, &mut r, &mut ri, &mut HashSet::new()).then(|| FinPerm::new(r).unwrap())
}

fn criterion_7() {
    let t = catalog::build_scott_tower(8).unwrap();
    for k in 1..=6usize {
        let sq = t.maps[k].after(&t.maps[k]).unwrap();
        let diff = sq.disagreement(&t.maps[k - 1]).unwrap().unwrap();
        let block = t.carrier.cell_index(&format!("B{k}")).unwrap();
        let want: Vec<Point> = (0..1i64 << k).map(|x| Point::new(block, vec![x])).collect();
        assert_eq!(diff, want, "k={k}");
    }
    let f0 = finperm_on_blocks(&t.maps[0], 9);
    assert_eq!(f0.len(), 511);
    assert!(!catalog::root_obstruction(&f0, 1));
    let plus = catalog::scott_plus_one(8).unwrap();
    assert!(!catalog::root_obstruction(&finperm_on_blocks(&plus, 9), 1));
    for n in 1..=4usize {
        for f in [finperm_on_blocks(&t.maps[0], n + 1), finperm_on_blocks(&plus, n + 1)] {
            assert_eq!(catalog::root_obstruction(&f, 1), brute_square_root(&f).is_some(), "blocks <= {n}");
            assert!(brute_square_root(&f).is_none());
        }
    }
    // criterion against brute force on random small permutations, and a positive control
    let mut rng = rng(7);
    for _ in 0..300 {
        let n = rng.gen_range(1..=9);
        let mut img: Vec<usize> = (0..n).collect();
        img.shuffle(&mut rng);
        let f = FinPerm::new(img).unwrap();
        let root = brute_square_root(&f);
        assert_eq!(catalog::root_obstruction(&f, 1), root.is_some());
        if let Some(r) = root {
            assert_eq!(r.after(&r), f);
        }
    }
    let f4 = finperm_on_blocks(&t.maps[0], 5);
    let doubled = FinPerm::new(f4.images().iter().copied().chain(f4.images().iter().map(|x| x + f4.len())).collect()).unwrap();
    let r = brute_square_root(&doubled).expect("two copies have a square root");
    assert_eq!(r.after(&r), doubled);
}

// ---------- 8. amalgam ----------

fn criterion_8() {
    let mut rng = rng(8);
    for (p, n, l) in [(2u64, 2u64, 8usize), (3, 3, 6)] {
        let m = build_amalgam_model(p, n, l).unwrap();
        assert_eq!(m.data.invariant(&m.designated).unwrap(), 1);
        assert!(m.stable_from <= l - 2);
        let d = m.data.disjoint_union(&m.data).unwrap();
        let k = m.data.len();
        let y2: Vec<usize> = m.designated.iter().copied().chain(m.designated.iter().map(|x| x + k)).collect();
        assert_eq!(d.invariant(&y2).unwrap(), 2 % p);
        let mut orbits: Vec<Vec<usize>> =
            m.data.interior_u_orbits().into_iter().filter(|o| o.iter().all(|x| !m.designated.contains(x))).collect();
        for _ in 0..20 {
            orbits.shuffle(&mut rng);
            let take = rng.gen_range(1..=orbits.len());
            let mut y = m.designated.clone();
            y.extend(orbits[..take].iter().flatten());
            assert_eq!(m.data.invariant(&y).unwrap(), 1);
        }
        for copies in 1..=3 {
            let w = realizable_window(p, n, copies).unwrap();
            let all: Vec<usize> = (0..w.len()).collect();
            assert_eq!(w.invariant(&all).unwrap(), 0);
            assert_eq!(w.invariant(&[]).unwrap(), 0);
        }
    }
}

// ---------- 9. quasi-cyclic ----------

fn random_construction(rng: &mut ChaCha8Rng, m: u64) -> QcConstruction {
    let mut q: Vec<u32> = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..8)).collect();
    q.sort();
    QcConstruction::new(m, q).unwrap()
}

fn criterion_9() {
    let mut rng = rng(9);
    for _ in 0..50 {
        let m = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let c = random_construction(&mut rng, m);
        for n in 1..=6u32 {
            let modulus = u128::from(m).pow(n);
            assert_eq!(c.residual_truncation(n).unwrap(), c.direct_count_oracle(n).unwrap() % modulus);
        }
        let other = random_construction(&mut rng, m);
        let joined = c.concat(&other).unwrap();
        for n in 1..=6u32 {
            let modulus = u128::from(m).pow(n);
            assert_eq!(
                joined.residual_truncation(n).unwrap(),
                (c.residual_truncation(n).unwrap() + other.residual_truncation(n).unwrap()) % modulus
            );
        }
        let mut s = Vec::new();
        let mut acc = 0u128;
        for n in 1..=6u32 {
            acc += u128::from(rng.gen_range(0..m)) * u128::from(m).pow(n - 1);
            s.push(acc);
        }
        let d = DigitStream::new(m, &s).unwrap();
        let rebuilt = d.to_construction(6).unwrap();
        for n in 1..=6u32 {
            assert_eq!(rebuilt.residual_truncation(n).unwrap(), d.s(n));
        }
    }
}

// ---------- 10. rigidity ----------

fn random_sigma(c: &Arc<Carrier>, rng: &mut ChaCha8Rng) -> NearMap {
    let n = rng.gen_range(2..12);
    let mut pts: Vec<Point> = Vec::new();
    while pts.len() < n {
        let p = Point::new(0, vec![rng.gen_range(-10..=10), rng.gen_range(-10..=10)]);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut imgs = pts.clone();
    imgs.shuffle(rng);
    let ex: BTreeMap<Point, Option<Point>> = pts.into_iter().zip(imgs.into_iter().map(Some)).collect();
    NearMap::new(c.clone(), c.clone(), NearMap::identity(c.clone()).pieces().to_vec(), ex).unwrap()
}

fn conjugate(alpha: &NearAction, sigma: &NearMap) -> NearAction {
    let inv = sigma.invert().unwrap();
    let lifts = (0..2).map(|g| sigma.after(&alpha.lift(g).after(&inv).unwrap()).unwrap()).collect();
    alpha.with_lifts(lifts).unwrap()
}

fn criterion_10() {
    let alpha = catalog::build_simply_transitive(2).unwrap();
    let c = alpha.carrier().clone();
    let mut rng = rng(10);
    for i in 0..100 {
        let sigma = random_sigma(&c, &mut rng);
        let got = rigidity_conjugator(&alpha, &conjugate(&alpha, &sigma)).unwrap();
        assert!(got.graph_equal(&sigma).unwrap(), "sample {i}");
    }
    // a two-point orbit split off the plane, with bypass edges around it
    let p = |x: i64, y: i64| Point::new(0, vec![x, y]);
    let mk = |m: BTreeMap<Point, Option<Point>>, t: &NearMap| NearMap::new(c.clone(), c.clone(), t.pieces().to_vec(), m).unwrap();
    let u = mk(BTreeMap::from([(p(0, 0), Some(p(1, 0))), (p(1, 0), Some(p(0, 0))), (p(-1, 0), Some(p(2, 0)))]), alpha.lift(0));
    let v = mk(
        BTreeMap::from([
            (p(0, 0), Some(p(0, 0))),
            (p(1, 0), Some(p(1, 0))),
            (p(0, -1), Some(p(0, 1))),
            (p(1, -1), Some(p(1, 1))),
        ]),
        alpha.lift(1),
    );
    let beta = alpha.with_lifts(vec![u, v]).unwrap();
    assert!(matches!(rigidity_conjugator(&alpha, &beta), Err(Error::NotConjugate(_))));
}

// ---------- 11. ends and commensuration ----------

fn criterion_11() {
    assert_eq!(ends(&catalog::build_simply_transitive(1).unwrap()).unwrap(), 2);
    assert_eq!(ends(&catalog::build_free_orbits(1, 2).unwrap()).unwrap(), 4);
    let a = catalog::build_free_orbits(1, 2).unwrap();
    let top = RectSet::from_rect(Rect::new(0, vec![AxisConstraint::all()]));
    let mixed = RectSet::normalize(vec![
        Rect::new(0, vec![iv(Some(0), None)]),
        Rect::new(1, vec![iv(None, Some(-1))]),
    ]);
    for y in [&top, &mixed] {
        let r = a.commensurated_test(y).unwrap();
        assert!(r.commensurated);
        assert_eq!(r.restricted_index, Some(vec![0]));
    }
    let both = a.commensurated_test(&top.intersect(&mixed)).unwrap();
    assert!(both.commensurated);
    assert_eq!(both.restricted_index, Some(vec![1]));
}

// ---------- 12. growth ----------

fn criterion_12() {
    let samples: Vec<u64> = (1..=30).collect();
    for (a, cell) in [
        (catalog::build_x_ms(2, (0, 0)).unwrap(), "UR0"),
        (catalog::build_k(1).unwrap(), "Z2"),
        (catalog::build_simply_transitive(2).unwrap(), "Z"),
    ] {
        let base = a.carrier().point(cell, &[0, 0]).unwrap();
        let report = a.growth_inequality_check(&base, &samples).unwrap();
        assert!(report.threshold <= 30);
        let checked: Vec<_> = report.samples.iter().filter(|s| s.r >= report.threshold).collect();
        assert!(!checked.is_empty());
        assert!(checked.iter().all(|s| s.checked && s.holds && s.ball_larger <= s.bound), "{cell}");
        assert!(report.ok);
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 12] = [
        ("index calculus", criterion_1),
        ("rectangle algebra", criterion_2),
        ("Houghton", criterion_3),
        ("Z^2 classification round trip", criterion_4),
        ("K_l family", criterion_5),
        ("Kapoudjian parity", criterion_6),
        ("Scott tower", criterion_7),
        ("amalgam invariant", criterion_8),
        ("quasi-cyclic residual", criterion_9),
        ("rigidity", criterion_10),
        ("ends and commensuration", criterion_11),
        ("growth inequality", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        println!("criterion {:>2} {:<32} {}", i + 1, name, if ok { "pass" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
