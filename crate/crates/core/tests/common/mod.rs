#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use iet_core::scene::GroupScene;
use iet_core::{Cell, Domain, ExactReal, Iet, Point, Rational, Symbol, SymbolBasis};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn alpha_basis() -> (Arc<SymbolBasis>, ExactReal) {
    let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
    let a = basis.var("alpha").unwrap();
    (basis, a)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn scene(text: &str) -> GroupScene {
    serde_json::from_str(text).expect("scene parses")
}

/// Two unit circles and a unit interval.
pub fn mixed_domain(basis: Arc<SymbolBasis>) -> Arc<Domain> {
    Domain::new(
        basis,
        vec![
            iet_core::Component::circle("a", ExactReal::one()),
            iet_core::Component::circle("b", ExactReal::one()),
            iet_core::Component::interval("i", ExactReal::one()),
        ],
    )
    .unwrap()
}

/// A random value in `[0, 1)`: a rational with small denominator, plus
/// sometimes a multiple of `alpha`, reduced mod 1.
pub fn random_offset(rng: &mut impl Rng, basis: &SymbolBasis, alpha: &ExactReal) -> ExactReal {
    let den = rng.gen_range(1..=24);
    let mut x = ExactReal::ratio(rng.gen_range(0..den), den);
    if rng.gen_bool(0.4) {
        x = &x + &alpha.scale_int(rng.gen_range(-3..=3));
    }
    basis.mod_interval(&x, &ExactReal::one()).unwrap()
}

pub fn random_point(rng: &mut impl Rng, dom: &Domain, alpha: &ExactReal) -> Point {
    let c = rng.gen_range(0..dom.len());
    Point::new(c, random_offset(rng, dom.basis(), alpha))
}

/// Cuts component `c` (length 1) at random points and lays the pieces back
/// in a random order.
pub fn random_exchange(rng: &mut impl Rng, dom: &Arc<Domain>, c: usize, alpha: &ExactReal) -> Iet {
    let basis = dom.basis();
    let k = rng.gen_range(1..=4);
    let mut cuts: Vec<ExactReal> = Vec::new();
    while cuts.len() < k {
        let x = random_offset(rng, basis, alpha);
        if !x.is_zero() && !cuts.contains(&x) {
            cuts.push(x);
        }
    }
    cuts.sort_by(|x, y| basis.cmp(x, y).unwrap());
    let mut bounds = vec![ExactReal::zero()];
    bounds.extend(cuts);
    bounds.push(ExactReal::one());
    let pieces: Vec<(ExactReal, ExactReal)> = bounds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.shuffle(rng);
    let mut cells = Vec::new();
    let mut cursor = ExactReal::zero();
    for &p in &order {
        let (s, e) = &pieces[p];
        cells.push(Cell { src: c, start: s.clone(), end: e.clone(), dst: c, dst_start: cursor.clone() });
        cursor = &cursor + &(e - s);
    }
    for other in (0..dom.len()).filter(|&o| o != c) {
        cells.push(Cell {
            src: other,
            start: ExactReal::zero(),
            end: ExactReal::one(),
            dst: other,
            dst_start: ExactReal::zero(),
        });
    }
    Iet::from_cells(dom.clone(), cells).unwrap()
}

/// One random builder on the mixed domain.
pub fn random_builder(rng: &mut impl Rng, dom: &Arc<Domain>, alpha: &ExactReal) -> Iet {
    match rng.gen_range(0..4) {
        0 => {
            let c = rng.gen_range(0..2);
            let angle = random_offset(rng, dom.basis(), alpha);
            Iet::rotation(dom.clone(), c, &angle).unwrap()
        }
        1 => {
            // only the two circles may trade places
            let perm: Vec<usize> = if rng.gen_bool(0.5) { vec![1, 0, 2] } else { vec![0, 1, 2] };
            Iet::permutation(dom.clone(), &perm).unwrap()
        }
        2 => {
            let c = rng.gen_range(0..dom.len());
            random_exchange(rng, dom, c, alpha)
        }
        _ => {
            let x = random_offset(rng, dom.basis(), alpha);
            let y = random_offset(rng, dom.basis(), alpha);
            let (s, e) = if dom.basis().lt(&x, &y).unwrap() { (x, y) } else { (y, x) };
            Iet::vertical(dom.clone(), vec![(0, s.clone(), e.clone(), 1), (1, s, e, 0)]).unwrap()
        }
    }
}

/// A product of one to three random builders.
pub fn random_iet(rng: &mut impl Rng, dom: &Arc<Domain>, alpha: &ExactReal) -> Iet {
    let mut t = random_builder(rng, dom, alpha);
    for _ in 0..rng.gen_range(0..3) {
        t = random_builder(rng, dom, alpha).compose(&t).unwrap();
    }
    t
}

/// Source and image cells each tile the domain.
pub fn tiles_domain(t: &Iet) -> bool {
    let dom = t.domain();
    let basis = dom.basis();
    for c in 0..dom.len() {
        let src: Vec<(ExactReal, ExactReal)> =
            t.cells().iter().filter(|cell| cell.src == c).map(|cell| (cell.start.clone(), cell.end.clone())).collect();
        let mut dst: Vec<(ExactReal, ExactReal)> = t
            .cells()
            .iter()
            .filter(|cell| cell.dst == c)
            .map(|cell| (cell.dst_start.clone(), cell.dst_end()))
            .collect();
        dst.sort_by(|x, y| basis.cmp(&x.0, &y.0).unwrap());
        for list in [src, dst] {
            let mut cursor = ExactReal::zero();
            for (s, e) in list {
                if s != cursor || !basis.lt(&s, &e).unwrap() {
                    return false;
                }
                cursor = e;
            }
            if cursor != *dom.length(c) {
                return false;
            }
        }
    }
    true
}

/// Abstract `Z/3 ≀ Z`: lamps at integer positions, then a shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wreath3 {
    pub lamps: BTreeMap<i64, u8>,
    pub shift: i64,
}

impl Wreath3 {
    pub fn mul(&self, other: &Wreath3) -> Wreath3 {
        let mut lamps = self.lamps.clone();
        for (&p, &v) in &other.lamps {
            let e = lamps.entry(p + self.shift).or_insert(0);
            *e = (*e + v) % 3;
        }
        lamps.retain(|_, v| *v != 0);
        Wreath3 { lamps, shift: self.shift + other.shift }
    }
}

/// Sizes of the balls of radius `0..=depth` in `Z/3 ≀ Z` for generators
/// `σ^±1`, `R^±1`.
pub fn wreath3_ball_sizes(depth: usize) -> Vec<usize> {
    let id = Wreath3 { lamps: BTreeMap::new(), shift: 0 };
    let gens = [
        Wreath3 { lamps: BTreeMap::from([(0, 1)]), shift: 0 },
        Wreath3 { lamps: BTreeMap::from([(0, 2)]), shift: 0 },
        Wreath3 { lamps: BTreeMap::new(), shift: 1 },
        Wreath3 { lamps: BTreeMap::new(), shift: -1 },
    ];
    let mut seen: HashSet<Wreath3> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut sizes = vec![1];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
        sizes.push(seen.len());
    }
    sizes
}

/// Whether the arc `[s, s + len)` taken mod 1 meets `[0, 1/2)` in a set of
/// positive measure; rational endpoints only.
pub fn arc_meets_half(s: &Rational, len: &Rational) -> bool {
    let start = s - s.floor();
    // [start, min(end, 1)) meets it iff start < 1/2; a wrapped piece
    // [0, end - 1) always does
    start < q(1, 2) || &start + len > q(1, 1)
}
