mod common;

use std::cmp::Ordering;
use std::sync::Arc;

use common::*;
use iet_core::constructions::hj::{build_hj, hj_base_domain, Hj, HjElement};
use iet_core::constructions::ll_like::build_ll_like;
use iet_core::{
    cut_domain, in_q_span, restrict, subdomain_exchange, AbelianGroup, ExactReal, FinGenGroup, Iet, Point, Rational,
    Subdomain, Symbol, SymbolBasis,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_symbols() -> Arc<SymbolBasis> {
    Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha"), Symbol::sqrt3_minus_1("beta")], true).unwrap())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn exact_value() -> impl Strategy<Value = ExactReal> {
    (small_rational(), small_rational(), small_rational()).prop_map(|(u, a, b)| {
        let basis = two_symbols();
        let ids = [basis.symbol_id("alpha").unwrap(), basis.symbol_id("beta").unwrap()];
        ExactReal::from_parts(u, [(ids[0], a), (ids[1], b)])
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(x in exact_value(), y in exact_value(), z in exact_value(), s in small_rational(), t in small_rational()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x + &ExactReal::zero(), x.clone());
        prop_assert!((&x - &x).is_zero());
        prop_assert_eq!(-&(-&x), x.clone());
        prop_assert_eq!(&x - &y, &x + &(-&y));
        prop_assert_eq!((&x + &y).scale(&s), &x.scale(&s) + &y.scale(&s));
        prop_assert_eq!(x.scale(&(&s + &t)), &x.scale(&s) + &x.scale(&t));
        prop_assert_eq!(x.scale(&s).scale(&t), x.scale(&(&s * &t)));
        prop_assert_eq!(x.scale(&q(1, 1)), x);
    }

    #[test]
    fn comparison_is_a_total_order(x in exact_value(), y in exact_value(), z in exact_value()) {
        let basis = two_symbols();
        let xy = basis.cmp(&x, &y).unwrap();
        prop_assert_eq!(basis.cmp(&y, &x).unwrap(), xy.reverse());
        prop_assert_eq!(xy == Ordering::Equal, x == y);
        let yz = basis.cmp(&y, &z).unwrap();
        if xy != Ordering::Greater && yz != Ordering::Greater {
            prop_assert_ne!(basis.cmp(&x, &z).unwrap(), Ordering::Greater);
        }
        // translation invariance
        prop_assert_eq!(basis.cmp(&(&x + &z), &(&y + &z)).unwrap(), xy);
        // agrees with a floating evaluation when the gap is wide
        let gap = x.to_f64_lossy(&basis) - y.to_f64_lossy(&basis);
        if gap.abs() > 1e-9 {
            prop_assert_eq!(xy, gap.partial_cmp(&0.0).unwrap());
        }
    }

    #[test]
    fn q_span_reconstructs(u in small_rational(), v in small_rational(), w in small_rational()) {
        let basis = two_symbols();
        let (a, b) = (basis.var("alpha").unwrap(), basis.var("beta").unwrap());
        let gens = [ExactReal::one(), a.scale_int(2), &a + &b];
        let x = &(&ExactReal::from(u) + &gens[1].scale(&v)) + &gens[2].scale(&w);
        let coeffs = in_q_span(&x, &gens).expect("x lies in the span");
        let back = gens.iter().zip(&coeffs).fold(ExactReal::zero(), |acc, (g, c)| &acc + &g.scale(c));
        prop_assert_eq!(back, x.clone());
        // beta is outside the span of 1 and alpha
        prop_assert!(in_q_span(&b, &[ExactReal::one(), basis.var("alpha").unwrap()]).is_none());
    }

    #[test]
    fn group_laws_on_random_products(seed in any::<u64>()) {
        let (basis, a) = alpha_basis();
        let dom = mixed_domain(basis);
        let mut r = rng(seed);
        let (f, g, h) = (random_iet(&mut r, &dom, &a), random_iet(&mut r, &dom, &a), random_iet(&mut r, &dom, &a));
        let id = Iet::identity(dom.clone());
        prop_assert!(tiles_domain(&f) && tiles_domain(&g) && tiles_domain(&h));
        prop_assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        prop_assert!(f.compose(&f.inverse()).unwrap().is_identity());
        prop_assert!(f.inverse().compose(&f).unwrap().is_identity());
        prop_assert_eq!(f.compose(&id).unwrap(), f.clone());
        prop_assert_eq!(id.compose(&f).unwrap(), f.clone());
        prop_assert_eq!(f.compose(&g).unwrap().inverse(), g.inverse().compose(&f.inverse()).unwrap());
        let fg = f.compose(&g).unwrap();
        prop_assert!(tiles_domain(&fg));
        prop_assert!(fg.discontinuities() <= f.discontinuities() + g.discontinuities());
        for _ in 0..8 {
            let p = random_point(&mut r, &dom, &a);
            prop_assert_eq!(fg.apply(&p).unwrap(), f.apply(&g.apply(&p).unwrap()).unwrap());
            prop_assert_eq!(f.inverse().apply(&f.apply(&p).unwrap()).unwrap(), p);
        }
    }

    #[test]
    fn restriction_is_a_homomorphism(seed in any::<u64>()) {
        let (basis, a) = alpha_basis();
        let dom = mixed_domain(basis);
        let mut r = rng(seed);
        let (g, h) = (random_iet(&mut r, &dom, &a), random_iet(&mut r, &dom, &a));
        // every builder preserves the pair of circles and the interval
        for s in [Subdomain::components(&dom, [0, 1]), Subdomain::components(&dom, [2])] {
            let (rg, ex) = restrict(&g, &s).unwrap();
            let (rh, _) = restrict(&h, &s).unwrap();
            let (rgh, _) = restrict(&g.compose(&h).unwrap(), &s).unwrap();
            prop_assert_eq!(rgh, rg.compose(&rh).unwrap());
            prop_assert_eq!(ex.conjugate(&g.inverse()).unwrap(), rg.inverse());
        }
    }

    #[test]
    fn exchange_preserves_measure_and_points(seed in any::<u64>()) {
        let (basis, a) = alpha_basis();
        let dom = mixed_domain(basis);
        let mut r = rng(seed);
        let x = random_offset(&mut r, dom.basis(), &a);
        let y = random_offset(&mut r, dom.basis(), &a);
        let (s, e) = if dom.lt(&x, &y).unwrap() { (x, y) } else { (y, x) };
        prop_assume!(s != e);
        let sub = Subdomain::from_arcs(&dom, [(1, s, e)]).unwrap();
        let ex = subdomain_exchange(&dom, &sub).unwrap();
        prop_assert_eq!(ex.target().total_length(), sub.measure());
        let inside = ex.unmap_subdomain(&Subdomain::whole(ex.target())).unwrap();
        prop_assert_eq!(inside, sub);
    }

    #[test]
    fn semidirect_law_and_normal_forms(word_a in prop::collection::vec(0usize..5, 0..=6), word_b in prop::collection::vec(0usize..5, 0..=6)) {
        let hj = sample_hj();
        let (ia, na) = evaluate_word(&hj, &word_a);
        let (ib, nb) = evaluate_word(&hj, &word_b);
        // normal-form soundness
        prop_assert_eq!(hj.normal_form(&ia).unwrap(), na.clone());
        prop_assert_eq!(hj.evaluate(&na).unwrap(), ia.clone());
        // the realized product matches the symbolic one
        let prod = ia.compose(&ib).unwrap();
        prop_assert_eq!(hj.normal_form(&prod).unwrap(), hj.product(&na, &nb).unwrap());
    }

    #[test]
    fn conjugated_lamps_commute_with_tau(word in prop::collection::vec(0usize..5, 0..=6), s in 0i64..6, t in 0i64..6) {
        let hj = sample_hj();
        let (h, _) = evaluate_word(&hj, &word);
        let tau = hj.rotation().pow(s).unwrap().conjugate(hj.tau_j()).unwrap();
        let tau2 = hj.rotation().pow(-t).unwrap().conjugate(hj.tau_j()).unwrap().compose(hj.tau_j()).unwrap();
        prop_assert!(tau.commutes_with(&tau2).unwrap());
        let lhs = h.compose(&tau).unwrap().commutator(&tau2).unwrap();
        prop_assert_eq!(lhs, h.commutator(&tau2).unwrap());
    }
}

fn sample_hj() -> Hj {
    let (basis, a) = alpha_basis();
    let base = hj_base_domain(basis.clone()).unwrap();
    let j = Subdomain::from_arcs(&base, [(0, ExactReal::ratio(1, 10), ExactReal::ratio(3, 10))]).unwrap();
    build_hj(basis, a, &j).unwrap()
}

/// Letters: 0 = sigma, 1 = sigma^-1, 2 = R, 3 = R^-1, 4 = tau. Returns the
/// realized map and the product of the letters' normal forms.
fn evaluate_word(hj: &Hj, word: &[usize]) -> (Iet, HjElement) {
    let letters =
        [hj.sigma().clone(), hj.sigma().inverse(), hj.rotation().clone(), hj.rotation().inverse(), hj.tau_j().clone()];
    let forms: Vec<HjElement> = letters.iter().map(|l| hj.normal_form(l).unwrap()).collect();
    let mut map = Iet::identity(hj.domain().clone());
    let mut nf = HjElement::identity();
    for &l in word {
        map = map.compose(&letters[l]).unwrap();
        nf = hj.product(&nf, &forms[l]).unwrap();
    }
    (map, nf)
}

#[test]
fn cut_conjugation_is_an_isomorphism_on_the_ball() {
    let (dom, gens) = scene(include_str!("../../../scenes/two_circles.json")).build(None).unwrap();
    let g = FinGenGroup::new(dom.clone(), gens.clone()).unwrap();
    let (_, a) = alpha_basis();
    let cuts = [Point::new(0, ExactReal::ratio(1, 3)), Point::new(1, a.clone()), Point::new(1, ExactReal::ratio(1, 7))];
    let ex = cut_domain(&dom, &cuts).unwrap();
    let cut_gens: Vec<(String, Iet)> = gens.iter().map(|(n, t)| (n.clone(), ex.conjugate(t).unwrap())).collect();
    let g_cut = FinGenGroup::new(ex.target().clone(), cut_gens).unwrap();
    let ball = g.ball(4, None).unwrap();
    let ball_cut = g_cut.ball(4, None).unwrap();
    assert_eq!(ball.sizes, ball_cut.sizes);
    for (x, y) in ball.elements.iter().zip(&ball_cut.elements) {
        assert_eq!(&ex.conjugate(x).unwrap(), y);
        assert_eq!(&ex.pull_back(y).unwrap(), x);
    }
    // products are carried to products
    for x in ball.elements.iter().take(20) {
        for y in ball.elements.iter().take(20) {
            let xy = ex.conjugate(&x.compose(y).unwrap()).unwrap();
            assert_eq!(xy, ex.conjugate(x).unwrap().compose(&ex.conjugate(y).unwrap()).unwrap());
        }
    }
}

#[test]
fn lamp_functions_commute_on_a_grid() {
    let (basis, a) = alpha_basis();
    let base = iet_core::Domain::unit_circles(basis, ["c"]).unwrap();
    let g = FinGenGroup::new(base.clone(), [("R".to_string(), Iet::rotation(base.clone(), 0, &a).unwrap())]).unwrap();
    let lamps = AbelianGroup::new(vec![3, 2]).unwrap();
    let j = Subdomain::from_arcs(&base, [(0, ExactReal::zero(), ExactReal::ratio(1, 2))]).unwrap();
    let ll = build_ll_like(&g, &lamps, &j).unwrap();
    let mut r = rng(7);
    let mut arcs = Vec::new();
    while arcs.len() < 20 {
        let s = random_offset(&mut r, base.basis(), &a);
        let len = ExactReal::ratio(r.gen_range(1..8), 8);
        let e = &s + &len;
        // wrapping arcs are split into two pieces
        let pieces = if base.lt(&ExactReal::one(), &e).unwrap() {
            vec![(0, s.clone(), ExactReal::one()), (0, ExactReal::zero(), &e - &ExactReal::one())]
        } else {
            vec![(0, s, e)]
        };
        arcs.push(Subdomain::from_arcs(&base, pieces).unwrap());
    }
    for (i, x) in arcs.iter().enumerate() {
        let y = &arcs[(i * 7 + 3) % arcs.len()];
        for u in 1..lamps.order() {
            for v in 1..lamps.order() {
                let fx = ll.lamp_function(&[(x.clone(), lamps.element(u))]).unwrap();
                let fy = ll.lamp_function(&[(y.clone(), lamps.element(v))]).unwrap();
                assert!(fx.commutes_with(&fy).unwrap(), "arcs {i} and {}", (i * 7 + 3) % arcs.len());
            }
        }
    }
}
