use super::*;
use crate::carrier::{AxisConstraint, AxisDomain, Cell};
use proptest::prelude::*;

fn carrier() -> Arc<Carrier> {
    Arc::new(
        Carrier::new(vec![
            Cell::new("z", vec![AxisDomain::FullLine]),
            Cell::new("n", vec![AxisDomain::HalfLine]),
            Cell::new("b", vec![AxisDomain::Bounded(5)]),
        ])
        .unwrap(),
    )
}

const Z: usize = 0;
const N: usize = 1;
const B: usize = 2;

fn iv(lo: Option<i64>, hi: Option<i64>) -> AxisConstraint {
    AxisConstraint::interval(lo, hi).unwrap()
}

fn r1(cell: usize, c: AxisConstraint) -> Rect {
    Rect::new(cell, vec![c])
}

fn tr(t: i64) -> Transform {
    Transform::translation(vec![t])
}

fn pt(cell: usize, x: i64) -> Point {
    Point::new(cell, vec![x])
}

fn build(pieces: Vec<Piece>, exceptions: Vec<(Point, Option<Point>)>) -> NearMap {
    let c = carrier();
    NearMap::new(c.clone(), c, pieces, exceptions.into_iter().collect()).unwrap()
}

fn fixed(cells: &[usize]) -> Vec<Piece> {
    let c = carrier();
    cells.iter().map(|&k| Piece::new(c.full_rect(k), k, Transform::identity(1))).collect()
}

/// Elementary closely bijective maps on the test carrier.
fn elementary(k: usize) -> NearMap {
    let c = carrier();
    match k {
        // shift on the ray
        0 => {
            let mut p = fixed(&[Z, B]);
            p.push(Piece::new(c.full_rect(N), N, tr(1)));
            build(p, vec![])
        }
        // partial inverse shift on the ray
        1 => {
            let mut p = fixed(&[Z, B]);
            p.push(Piece::new(r1(N, iv(Some(1), None)), N, tr(-1)));
            build(p, vec![(pt(N, 0), None)])
        }
        // translations of the line
        2 | 3 => {
            let mut p = fixed(&[N, B]);
            p.push(Piece::new(c.full_rect(Z), Z, tr(if k == 2 { 2 } else { -3 })));
            build(p, vec![])
        }
        // reflection of the line
        4 => {
            let mut p = fixed(&[N, B]);
            p.push(Piece::new(c.full_rect(Z), Z, Transform::new(vec![0], vec![-1], vec![1]).unwrap()));
            build(p, vec![])
        }
        // swap the positive half of the line with the ray
        5 => {
            let mut p = fixed(&[B]);
            p.push(Piece::new(r1(Z, iv(Some(0), None)), N, tr(0)));
            p.push(Piece::new(r1(Z, iv(None, Some(-1))), Z, tr(0)));
            p.push(Piece::new(c.full_rect(N), Z, tr(0)));
            build(p, vec![])
        }
        // parity swap on the line
        6 => {
            let mut p = fixed(&[N, B]);
            p.push(Piece::new(r1(Z, AxisConstraint::new(None, None, 0, 2).unwrap()), Z, tr(1)));
            p.push(Piece::new(r1(Z, AxisConstraint::new(None, None, 1, 2).unwrap()), Z, tr(-1)));
            build(p, vec![])
        }
        // rotation of the finite block
        7 => {
            let mut p = fixed(&[Z, N]);
            p.push(Piece::new(r1(B, iv(Some(0), Some(3))), B, tr(1)));
            p.push(Piece::new(r1(B, iv(Some(4), Some(4))), B, tr(-4)));
            build(p, vec![])
        }
        // non-injective collapse of two ray points onto one line point, plus a hole
        _ => {
            let mut p = fixed(&[B]);
            p.push(Piece::new(c.full_rect(Z), Z, tr(0)));
            p.push(Piece::new(c.full_rect(N), N, tr(0)));
            build(p, vec![(pt(N, 2), Some(pt(Z, 7))), (pt(N, 3), Some(pt(Z, 7))), (pt(B, 1), None)])
        }
    }
}

fn perturb(f: &NearMap, moves: &[(usize, i64, Option<(usize, i64)>)]) -> NearMap {
    let mut ex = f.exceptions.clone();
    for &(cell, x, to) in moves {
        let x = clamp(cell, x);
        ex.insert(pt(cell, x), to.map(|(c, y)| pt(c, clamp(c, y))));
    }
    NearMap::new(f.src.clone(), f.dst.clone(), f.pieces.clone(), ex).unwrap()
}

fn clamp(cell: usize, x: i64) -> i64 {
    match cell {
        N => x.abs(),
        B => x.rem_euclid(5),
        _ => x,
    }
}

fn word(ks: &[usize]) -> NearMap {
    let mut f = NearMap::identity(carrier());
    for &k in ks {
        f = elementary(k).after(&f).unwrap();
    }
    f
}

fn window(r: i64) -> Vec<Point> {
    carrier().window(r)
}

/// Index counted directly from preimage multiplicities on a large window.
fn index_oracle(f: &NearMap) -> i64 {
    let core = window(40);
    let mut pre: BTreeMap<Point, i64> = BTreeMap::new();
    let mut undefined = 0;
    for x in window(70) {
        match f.at(&x) {
            Some(y) => *pre.entry(y).or_default() += 1,
            None => undefined += i64::from(x.norm() <= 40),
        }
    }
    core.iter().map(|y| 1 - pre.get(y).copied().unwrap_or(0)).sum::<i64>() - undefined
}

fn arb_word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..9, 0..4)
}

fn arb_moves() -> impl Strategy<Value = Vec<(usize, i64, Option<(usize, i64)>)>> {
    prop::collection::vec((0usize..3, -6i64..6, prop::option::of((0usize..3, -6i64..6))), 0..4)
}

fn arb_map() -> impl Strategy<Value = NearMap> {
    (arb_word(), arb_moves()).prop_map(|(w, m)| perturb(&word(&w), &m))
}

#[test]
fn shift_has_index_one() {
    let s = elementary(0);
    assert_eq!(s.index().unwrap(), ExtendedInt::Finite(1));
    assert_eq!(s.at(&pt(N, 5)), Some(pt(N, 6)));
    let b = s.classify_bijectivity();
    assert!(b.closely_injective && b.closely_surjective);
    assert_eq!(s.invert().unwrap().index().unwrap(), ExtendedInt::Finite(-1));
    assert_eq!(s.power(3).unwrap().index().unwrap(), ExtendedInt::Finite(3));
    assert_eq!(s.after(&s).unwrap().index().unwrap(), ExtendedInt::Finite(2));
    assert_eq!(NearMap::identity(carrier()).index().unwrap(), ExtendedInt::Finite(0));
}

#[test]
fn identity_laws() {
    let id = NearMap::identity(carrier());
    assert!(id.invert().unwrap().graph_equal(&id).unwrap());
    for k in 0..9 {
        let f = elementary(k);
        assert!(id.after(&f).unwrap().graph_equal(&f).unwrap());
        assert!(f.after(&id).unwrap().graph_equal(&f).unwrap());
    }
    let fs = id.fixed_set().unwrap();
    assert!(fs.rects.same_set(&carrier().full()));
}

#[test]
fn overlapping_images_are_not_closely_injective() {
    let z2 = Arc::new(Carrier::new(vec![Cell::new("p", vec![AxisDomain::FullLine; 2])]).unwrap());
    let quad = |lo: i64| Rect::new(0, vec![iv(Some(lo), None), iv(Some(0), None)]);
    let rest = RectSet::from_rect(Rect::new(0, vec![AxisConstraint::all(); 2])).diff(&RectSet::normalize(vec![quad(0)]));
    let mut pieces: Vec<Piece> = rest.into_rects().into_iter().map(|r| Piece::new(r, 0, Transform::identity(2))).collect();
    pieces.push(Piece::new(quad(0), 0, Transform::identity(2)));
    let ok = NearMap::new(z2.clone(), z2.clone(), pieces.clone(), BTreeMap::new()).unwrap();
    assert!(ok.classify_bijectivity().closely_injective);
    // Send the lower half plane onto the upper one as well.
    let lower = Rect::new(0, vec![AxisConstraint::all(), iv(None, Some(-1))]);
    let upper_shift = Transform::new(vec![0, 1], vec![1, -1], vec![0, -1]).unwrap();
    let pieces: Vec<Piece> = pieces
        .into_iter()
        .flat_map(|p| {
            let mut out = Vec::new();
            for r in RectSet::from_rect(p.source.clone()).diff(&RectSet::from_rect(lower.clone())).into_rects() {
                out.push(Piece::new(r, 0, p.transform.clone()));
            }
            out
        })
        .chain(std::iter::once(Piece::new(lower.clone(), 0, upper_shift)))
        .collect();
    let bad = NearMap::new(z2.clone(), z2, pieces, BTreeMap::new()).unwrap();
    let b = bad.classify_bijectivity();
    assert!(!b.closely_injective);
    assert!(!b.closely_surjective);
    assert_eq!(bad.index(), Err(Error::IndexUndefined));
}

#[test]
fn rejects_malformed_maps() {
    let c = carrier();
    let overlapping = vec![Piece::new(c.full_rect(Z), Z, tr(0)), Piece::new(r1(Z, iv(Some(0), Some(3))), Z, tr(0))];
    assert!(NearMap::new(c.clone(), c.clone(), overlapping, BTreeMap::new()).is_err());
    let escaping = vec![Piece::new(c.full_rect(N), N, tr(-1))];
    assert!(NearMap::new(c.clone(), c.clone(), escaping, BTreeMap::new()).is_err());
    assert!(NearMap::new(c.clone(), c.clone(), fixed(&[Z, N]), BTreeMap::new()).is_err());
}

#[test]
fn exceptions_close_to_pieces() {
    let f = elementary(0);
    let g = perturb(&f, &[(N, 1, Some((N, 2))), (N, 2, Some((N, 9))), (N, 4, None)]);
    assert!(f.near_equal(&g).unwrap());
    assert!(!f.graph_equal(&g).unwrap());
    assert_eq!(f.disagreement(&g).unwrap().unwrap(), vec![pt(N, 2), pt(N, 4)]);
    assert!(!f.near_equal(&NearMap::identity(carrier())).unwrap());
}

#[test]
fn fixed_set_of_parity_swap_is_empty_on_the_line() {
    let f = elementary(6);
    let fs = f.fixed_set().unwrap();
    assert!(!fs.rects.rects().iter().any(|r| r.cell == Z));
    let refl = elementary(4);
    let fs = refl.fixed_set().unwrap();
    assert!(!fs.contains(&pt(Z, 0)));
    let refl2 = build(
        {
            let mut p = fixed(&[N, B]);
            p.push(Piece::new(carrier().full_rect(Z), Z, Transform::new(vec![0], vec![-1], vec![4]).unwrap()));
            p
        },
        vec![],
    );
    assert!(refl2.fixed_set().unwrap().contains(&pt(Z, 2)));
}

#[test]
fn finite_permutations() {
    let t = perturb(&NearMap::identity(carrier()), &[(Z, 0, Some((N, 0))), (N, 0, Some((Z, 0)))]);
    assert_eq!(t.cycle_type().unwrap(), vec![2]);
    assert_eq!(t.parity().unwrap(), 1);
    let rot = elementary(7);
    assert_eq!(rot.cycle_type().unwrap(), vec![5]);
    assert_eq!(rot.parity().unwrap(), 0);
    assert_eq!(elementary(0).support(), Err(Error::InfiniteSupport));
    let hole = perturb(&NearMap::identity(carrier()), &[(Z, 0, None)]);
    assert!(matches!(hole.parity(), Err(Error::NotPermutation(_))));
}

#[test]
fn commutator_of_commuting_maps_is_trivial() {
    let c = elementary(2).commutator(&elementary(7)).unwrap();
    assert!(c.graph_equal(&NearMap::identity(carrier())).unwrap());
    // The inverse of the shift is undefined at the origin of the ray.
    let c = elementary(2).commutator(&elementary(0)).unwrap();
    assert_eq!(c.support().unwrap(), vec![pt(N, 0)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn index_matches_preimage_count(f in arb_map()) {
        prop_assert_eq!(f.index().unwrap(), ExtendedInt::Finite(index_oracle(&f)));
    }

    #[test]
    fn index_is_additive(f in arb_map(), g in arb_map()) {
        let h = g.after(&f).unwrap();
        let sum = f.index().unwrap().finite().unwrap() + g.index().unwrap().finite().unwrap();
        prop_assert_eq!(h.index().unwrap(), ExtendedInt::Finite(sum));
    }

    #[test]
    fn composition_evaluates_pointwise(f in arb_map(), g in arb_map()) {
        let h = g.after(&f).unwrap();
        for x in window(25) {
            prop_assert_eq!(h.at(&x), f.at(&x).and_then(|y| g.at(&y)));
        }
    }

    #[test]
    fn composition_is_associative(f in arb_map(), g in arb_map(), h in arb_map()) {
        let a = h.after(&g).unwrap().after(&f).unwrap();
        let b = h.after(&g.after(&f).unwrap()).unwrap();
        prop_assert!(a.graph_equal(&b).unwrap());
    }

    #[test]
    fn near_equality_is_a_congruence(f in arb_map(), g in arb_map(), m1 in arb_moves(), m2 in arb_moves()) {
        let f2 = perturb(&f, &m1);
        let g2 = perturb(&g, &m2);
        prop_assert!(f.near_equal(&f2).unwrap());
        prop_assert_eq!(f.index().unwrap(), f2.index().unwrap());
        prop_assert!(g.after(&f).unwrap().near_equal(&g2.after(&f2).unwrap()).unwrap());
        let a = f.fixed_set().unwrap();
        let b = f2.fixed_set().unwrap();
        prop_assert!(a.rects.diff(&b.rects).is_finite() && b.rects.diff(&a.rects).is_finite());
    }

    #[test]
    fn inverse_is_a_near_inverse(f in arb_map()) {
        let fi = f.invert().unwrap();
        let id = NearMap::identity(carrier());
        prop_assert!(fi.after(&f).unwrap().near_equal(&id).unwrap());
        prop_assert!(f.after(&fi).unwrap().near_equal(&id).unwrap());
        prop_assert_eq!(fi.index().unwrap().finite().unwrap(), -f.index().unwrap().finite().unwrap());
        for y in window(20) {
            if let Some(x) = fi.at(&y) {
                prop_assert_eq!(f.at(&x), Some(y));
            }
        }
    }

    #[test]
    fn near_equality_matches_window_disagreement(f in arb_map(), m in arb_moves()) {
        let g = perturb(&f, &m);
        let listed = f.disagreement(&g).unwrap().unwrap();
        let brute: Vec<Point> = window(30).into_iter().filter(|x| f.at(x) != g.at(x)).collect();
        prop_assert_eq!(listed, brute);
    }
}
