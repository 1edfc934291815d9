mod common;

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use common::*;
use iet_core::constructions::lamplighter::{build_lamplighter, LampSpec};
use iet_core::constructions::obstruction::build_naive_lamplighter;
use iet_core::group::finite::{nonabelian_quotient_locus, nonnormal_locus, product_orbit_bound, stab_partition};
use iet_core::group::regular::RegularContext;
use iet_core::group::stability::{relative_stability, Verdict};
use iet_core::{
    cut_domain, Cell, Component, Domain, ExactReal, FinGenGroup, FiniteIetGroup, GroupTable, Iet, Point, Subdomain,
    SymbolBasis,
};

fn half() -> ExactReal {
    ExactReal::ratio(1, 2)
}

fn s3_on_circles(support: ExactReal) -> (FiniteIetGroup, Vec<Vec<usize>>) {
    let (basis, a) = alpha_basis();
    let perms = GroupTable::symmetric_permutations(3);
    let table = GroupTable::from_permutations(&perms).unwrap();
    let naive = build_naive_lamplighter(basis, table, &perms, &a, &[(ExactReal::zero(), support)]).unwrap();
    (FiniteIetGroup::verify(naive.lamps().to_vec()).unwrap(), perms)
}

#[test]
fn trivial_group_has_one_piece() {
    let (basis, _) = alpha_basis();
    let dom = Domain::unit_circles(basis, ["c"]).unwrap();
    let f = FiniteIetGroup::verify(vec![Iet::identity(dom.clone())]).unwrap();
    let pieces = stab_partition(&f).unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0].region, Subdomain::whole(&dom));
    assert_eq!(pieces[0].stabilizer, vec![0]);
    assert!(nonnormal_locus(&f).unwrap().is_empty());
}

#[test]
fn lamp_stabilizer_is_trivial_on_the_support() {
    let (basis, a) = alpha_basis();
    let ll = build_lamplighter(basis, LampSpec::cyclic(3, a).unwrap()).unwrap();
    let sigma = ll.lamp(&[1], &[0]).unwrap();
    let f = FiniteIetGroup::generate(ll.domain().clone(), &[sigma], 10).unwrap();
    assert_eq!(f.order(), 3);
    let id = f.elements().iter().position(|g| g.is_identity()).unwrap();
    let pieces = stab_partition(&f).unwrap();
    // the support of sigma is A x J
    let support = Subdomain::from_arcs(ll.domain(), (0..3).map(|c| (c, ExactReal::zero(), half()))).unwrap();
    for piece in &pieces {
        if piece.region == support {
            assert_eq!(piece.stabilizer, vec![id]);
        } else {
            assert_eq!(piece.region, support.complement(ll.domain()).unwrap());
            assert_eq!(piece.stabilizer, vec![0, 1, 2]);
        }
    }
    assert_eq!(pieces.len(), 2);
    // abelian: both loci empty
    assert!(nonnormal_locus(&f).unwrap().is_empty());
    assert!(nonabelian_quotient_locus(&f).unwrap().is_empty());
}

#[test]
fn symmetric_group_on_three_circles() {
    let (f, perms) = s3_on_circles(half());
    let dom = f.domain().clone();
    let pieces = stab_partition(&f).unwrap();
    // on circle 1 inside the support the stabilizer is {id, (0 2)}
    let x = Point::new(1, ExactReal::ratio(1, 4));
    let piece = pieces.iter().find(|p| p.region.contains(&dom, &x).unwrap()).unwrap();
    let expected: Vec<usize> = (0..perms.len()).filter(|&g| perms[g][1] == 1).collect();
    assert_eq!(expected.len(), 2);
    assert_eq!(piece.stabilizer, expected);
    // constant on the piece: endpoints and midpoints of every arc agree
    for p in &pieces {
        for arc in p.region.arcs() {
            let mid = (&arc.start + &arc.end).scale(&q(1, 2));
            for t in [arc.start.clone(), mid] {
                assert_eq!(f.stabilizer(&Point::new(arc.component, t)).unwrap(), p.stabilizer);
            }
        }
    }
    // transposition subgroups are not normal
    let locus = nonnormal_locus(&f).unwrap();
    assert_eq!(locus.measure(), ExactReal::ratio(3, 2));
    assert_eq!(nonabelian_quotient_locus(&f).unwrap(), locus);
}

#[test]
fn left_multiplication_has_normal_trivial_stabilizers() {
    let (basis, a) = alpha_basis();
    let perms = GroupTable::symmetric_permutations(3);
    let table = GroupTable::from_permutations(&perms).unwrap();
    let action: Vec<Vec<usize>> = (0..6).map(|g| (0..6).map(|h| table.mul(g, h)).collect()).collect();
    let naive = build_naive_lamplighter(basis, table, &action, &a, &[(ExactReal::zero(), half())]).unwrap();
    let f = FiniteIetGroup::verify(naive.lamps().to_vec()).unwrap();
    assert!(nonnormal_locus(&f).unwrap().is_empty());
    let locus = nonabelian_quotient_locus(&f).unwrap();
    assert_eq!(locus.measure(), ExactReal::from(3));
    assert_eq!(locus.component_set(), (0..6).collect::<Vec<_>>());
}

#[test]
fn point_outside_supports_is_fixed() {
    let (f, _) = s3_on_circles(half());
    let x = Point::new(0, ExactReal::ratio(3, 4));
    let rep = product_orbit_bound(std::slice::from_ref(&f), &x).unwrap();
    assert_eq!(rep.orbit_size, 1);
    assert_eq!(rep.lower_bound, 1);
    assert!(rep.bound_holds);
}

/// Breadth-first regular closure written directly from the definition.
fn regular_closure(gens: &[Iet], x: &Point, cap: usize) -> Option<usize> {
    let dom = gens[0].domain();
    let discs: Vec<HashSet<Point>> = gens.iter().map(|g| g.disc_points().into_iter().collect()).collect();
    let mut seen = HashSet::from([x.clone()]);
    let mut queue = VecDeque::from([x.clone()]);
    if dom.is_boundary(x) {
        return Some(1);
    }
    while let Some(y) = queue.pop_front() {
        for (g, disc) in gens.iter().zip(&discs) {
            if disc.contains(&y) || dom.is_boundary(&y) {
                continue;
            }
            let z = g.apply(&y).unwrap();
            if seen.insert(z.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(z);
            }
        }
    }
    Some(seen.len())
}

fn three_cell(dom: &Arc<Domain>, l0: ExactReal, l1: ExactReal) -> Iet {
    // pieces of lengths l0, l1, rest laid back in reverse order
    let one = ExactReal::one();
    let b1 = l0.clone();
    let b2 = &l0 + &l1;
    let l2 = &one - &b2;
    Iet::from_cells(
        dom.clone(),
        vec![
            Cell { src: 0, start: ExactReal::zero(), end: b1.clone(), dst: 0, dst_start: &one - &l0 },
            Cell { src: 0, start: b1, end: b2.clone(), dst: 0, dst_start: l2.clone() },
            Cell { src: 0, start: b2, end: one, dst: 0, dst_start: ExactReal::zero() },
        ],
    )
    .unwrap()
}

fn unit_interval(basis: Arc<SymbolBasis>) -> Arc<Domain> {
    Domain::new(basis, vec![Component::interval("I", ExactReal::one())]).unwrap()
}

#[test]
fn d_f_of_rotations_is_empty() {
    for file in [include_str!("../../../scenes/two_circles.json"), include_str!("../../../scenes/two_rotations.json")] {
        let (dom, gens) = scene(file).build(None).unwrap();
        let g = FinGenGroup::new(dom.clone(), gens).unwrap();
        // no generator has a discontinuity, so there is nothing to explore
        assert!(g.iets().all(|t| t.discontinuities() == 0));
        let df = RegularContext::new(dom, g.generators()).d_f_set(1000).unwrap();
        assert!(df.finite.is_empty() && df.capped.is_empty() && df.infinite.is_empty());
    }
}

#[test]
fn d_f_matches_hand_exploration_and_empties_after_cutting() {
    let (basis, a) = alpha_basis();
    let dom = unit_interval(basis);
    let cases = [
        three_cell(&dom, ExactReal::ratio(1, 4), ExactReal::ratio(1, 4)),
        three_cell(&dom, ExactReal::ratio(1, 3), ExactReal::ratio(1, 6)),
        three_cell(&dom, a.scale(&q(1, 2)), ExactReal::ratio(1, 4)),
    ];
    for t in cases {
        let g = FinGenGroup::new(dom.clone(), [("T".to_string(), t)]).unwrap();
        let all: Vec<Iet> = g.iets().cloned().collect();
        let ctx = RegularContext::new(dom.clone(), g.generators());
        let df = ctx.d_f_set(1000).unwrap();
        let disc = ctx.disc_points().unwrap();
        assert!(!disc.is_empty());
        for p in &disc {
            let finite = regular_closure(&all, p, 1000).is_some();
            assert_eq!(df.finite.contains(p), finite, "{p:?}");
            assert_eq!(df.capped.contains(p) || df.infinite.contains(p), !finite, "{p:?}");
        }
        let cuts: Vec<Point> = df.cut_points().into_iter().filter(|p| !dom.is_boundary(p)).collect();
        let ex = cut_domain(&dom, &cuts).unwrap();
        let gens: Vec<(String, Iet)> =
            g.generators().iter().map(|s| (s.name.clone(), ex.conjugate(&s.iet).unwrap())).collect();
        let cut = FinGenGroup::new(ex.target().clone(), gens).unwrap();
        let df_cut = RegularContext::new(ex.target().clone(), cut.generators()).d_f_set(1000).unwrap();
        assert!(df_cut.finite.is_empty(), "{:?}", df_cut.finite);
    }
}

#[test]
fn norm_estimate_is_subadditive() {
    let (basis, a) = alpha_basis();
    let dom = unit_interval(basis);
    let t = three_cell(&dom, a.scale(&q(1, 2)), ExactReal::ratio(1, 4));
    let d1 = t.discontinuities();
    assert_eq!(d1, 2);
    let est = t.norm_estimate(12).unwrap();
    let d: Vec<usize> = est.samples.iter().map(|s| s.discontinuities.unwrap()).collect();
    assert_eq!(d.len(), 12);
    for m in 1..=12 {
        assert!(d[m - 1] <= m * d1);
        for n in 1..=12 - m {
            assert!(d[m + n - 1] <= d[m - 1] + d[n - 1], "d(T^{}) > d(T^{m}) + d(T^{n})", m + n);
        }
        // each ratio is the count over n
        assert_eq!(est.samples[m - 1].ratio.clone().unwrap(), q(d[m - 1] as i64, m as i64));
    }
    assert!(est.limit.is_some());
    assert!(!est.all_zero());
}

#[test]
fn rotation_pair_components_survive_squaring() {
    let sc = scene(include_str!("../../../scenes/two_rotations.json"));
    let (dom, gens) = sc.build(None).unwrap();
    let sub = iet_core::scene::build_generators(sc.subgroup.as_ref().unwrap(), &dom).unwrap();
    let g = FinGenGroup::new(dom.clone(), gens).unwrap();
    let rep = relative_stability(&g, &sub, 2000).unwrap();
    assert_eq!(rep.components.len(), 2);
    assert!(rep.components.iter().all(|c| c.preserved == Verdict::Yes));
    assert_eq!(rep.stable(), Verdict::Yes);
}

#[test]
fn swap_component_splits_under_rotation_pair() {
    let (dom, gens) = scene(include_str!("../../../scenes/two_circles.json")).build(None).unwrap();
    let g = FinGenGroup::new(dom.clone(), gens).unwrap();
    let (_, a) = alpha_basis();
    let h = [
        ("R0".to_string(), Iet::rotation(dom.clone(), 0, &a).unwrap()),
        ("R1".to_string(), Iet::rotation(dom.clone(), 1, &a).unwrap()),
    ];
    let rep = relative_stability(&g, &h, 2000).unwrap();
    assert_eq!(rep.components.len(), 1);
    assert_eq!(rep.components[0].restricted.irreducible.len(), 2);
    assert_eq!(rep.stable(), Verdict::No);
}

#[test]
fn lamplighter_ball_matches_abstract_wreath_ball() {
    let (basis, a) = alpha_basis();
    let ll = build_lamplighter(basis, LampSpec::cyclic(3, a).unwrap()).unwrap();
    let ball = ll.group().ball(3, None).unwrap();
    assert_eq!(ball.sizes, wreath3_ball_sizes(3));
}
