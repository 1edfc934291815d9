//! Decomposition of a domain into irreducible components and a finite-orbit
//! part.
//!
//! Pipeline: cut the domain along the complete regular orbits of the
//! generators' discontinuity points, group the pieces into classes linked by
//! generators, then decide each class:
//!
//! * no generator is discontinuous inside the class: every generator moves
//!   whole pieces rigidly, and orbits are finite exactly when all holonomy
//!   angles around the class graph are rational multiples of the piece
//!   length;
//! * otherwise the class is irreducible provided every interior
//!   discontinuity has a certified infinite regular orbit.
//!
//! Irreducible verdicts are corroborated by an epsilon-density check of one
//! orbit, finite verdicts by measuring orbit sizes; a class failing its check
//! (or touching a capped regular orbit) is reported as undecided.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::domain::{try_sort_by, Domain, Point, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{in_q_span, ExactReal, Rational};
use crate::exchange::{cut_domain, Exchange};
use crate::group::regular::{OrbitStatus, RegularContext};
use crate::group::FinGenGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassVerdict {
    Irreducible,
    Finite { cardinality: usize },
    Undecided { reason: String },
}

#[derive(Clone, Debug)]
pub struct ClassReport {
    /// The class as a subdomain of the original domain.
    pub region: Subdomain,
    /// Labels of the pieces of the cut domain forming the class.
    pub pieces: Vec<String>,
    pub verdict: ClassVerdict,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub irreducible: Vec<Subdomain>,
    pub finite_part: Vec<(Subdomain, usize)>,
    pub residual_undecided: Vec<Subdomain>,
    pub classes: Vec<ClassReport>,
    /// Points the domain was cut along.
    pub cut_points: Vec<Point>,
    /// Discontinuity points with a capped regular orbit.
    pub capped_points: Vec<Point>,
}

impl Decomposition {
    pub fn is_resolved(&self) -> bool {
        self.residual_undecided.is_empty()
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups components linked by some generator cell.
fn classes(g: &FinGenGroup) -> Vec<Vec<usize>> {
    let n = g.domain().len();
    let mut parent: Vec<usize> = (0..n).collect();
    for iet in g.iets() {
        for cell in iet.cells() {
            let (a, b) = (find(&mut parent, cell.src), find(&mut parent, cell.dst));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..n {
        let r = find(&mut parent, c);
        groups.entry(r).or_default().push(c);
    }
    groups.into_values().collect()
}

/// Orbit cardinality of a class on which every generator moves whole pieces
/// rigidly, or `None` if some holonomy angle is irrational.
fn holonomy_cardinality(g: &FinGenGroup, comps: &[usize]) -> Result<Option<usize>> {
    let dom = g.domain();
    let basis = dom.basis();
    let len = dom.length(comps[0]).clone();
    let mut offset: HashMap<usize, ExactReal> = HashMap::from([(comps[0], ExactReal::zero())]);
    let mut queue = VecDeque::from([comps[0]]);
    let mut period = BigInt::one();
    while let Some(c) = queue.pop_front() {
        for iet in g.iets() {
            let row = iet.cells_on(c);
            let target = row[0].dst;
            if row.iter().any(|cell| cell.dst != target) || !row[0].start.is_zero() {
                return Err(Error::Precondition("generator splits a piece of a continuous class".into()));
            }
            let turned = &offset[&c] + &row[0].dst_start;
            match offset.get(&target) {
                None => {
                    let off = if dom.is_circle(target) { basis.mod_interval(&turned, &len)? } else { turned };
                    offset.insert(target, off);
                    queue.push_back(target);
                }
                Some(prev) => {
                    let h = &turned - prev;
                    match in_q_span(&h, std::slice::from_ref(&len)) {
                        None => return Ok(None),
                        Some(q) => {
                            let frac: Rational = &q[0] - q[0].floor();
                            period = period.lcm(frac.denom());
                        }
                    }
                }
            }
        }
    }
    let period = period.to_usize().ok_or_else(|| Error::Precondition("orbit period too large".into()))?;
    Ok(Some(comps.len() * period))
}

/// Largest gap between consecutive orbit points on component `c`,
/// including the gaps at the ends (joined through the wrap on a circle).
fn max_gap(dom: &Domain, c: usize, offsets: &mut [ExactReal]) -> Result<ExactReal> {
    let len = dom.length(c);
    if offsets.is_empty() {
        return Ok(len.clone());
    }
    try_sort_by(offsets, |a, b| dom.cmp(a, b))?;
    let basis = dom.basis();
    let mut best = ExactReal::zero();
    for w in offsets.windows(2) {
        let gap = &w[1] - &w[0];
        if basis.lt(&best, &gap)? {
            best = gap;
        }
    }
    let head = offsets[0].clone();
    let tail = len - &offsets[offsets.len() - 1];
    let ends = if dom.is_circle(c) { vec![&head + &tail] } else { vec![head, tail] };
    for gap in ends {
        if basis.lt(&best, &gap)? {
            best = gap;
        }
    }
    Ok(best)
}

/// Checks that the orbit of the class midpoint comes within
/// `measure / 100` of every point of the class.
fn density_check(g: &FinGenGroup, comps: &[usize], cap: usize) -> Result<Option<String>> {
    let dom = g.domain();
    let measure = comps.iter().fold(ExactReal::zero(), |acc, &c| acc + dom.length(c).clone());
    let eps = measure.scale(&Rational::new(1.into(), 100.into()));
    let orbit = g.orbit_until(&dom.midpoint(comps[0]), cap)?;
    let mut by_comp: BTreeMap<usize, Vec<ExactReal>> = comps.iter().map(|&c| (c, Vec::new())).collect();
    for p in orbit.points {
        by_comp.entry(p.component).or_default().push(p.offset);
    }
    for (c, mut offs) in by_comp {
        let gap = max_gap(dom, c, &mut offs)?;
        if dom.lt(&eps, &gap)? {
            return Ok(Some(format!(
                "orbit of {} points leaves a gap of {} on `{}`",
                cap,
                dom.basis().to_decimal(&gap, 6),
                dom.component(c).label
            )));
        }
    }
    Ok(None)
}

/// Checks that the midpoint orbit of every piece of the class has the
/// predicted size.
fn finite_check(g: &FinGenGroup, comps: &[usize], cardinality: usize, cap: usize) -> Result<Option<String>> {
    let dom = g.domain();
    for &c in comps {
        let orbit = g.orbit_until(&dom.midpoint(c), cap.max(cardinality + 1))?;
        if !orbit.complete || orbit.points.len() != cardinality {
            return Ok(Some(format!(
                "midpoint orbit on `{}` has {} points, expected {}",
                dom.component(c).label,
                orbit.points.len(),
                cardinality
            )));
        }
    }
    Ok(None)
}

/// Decomposes the domain of `g`. `cap` bounds both regular-orbit
/// explorations and the orbits used for corroboration.
pub fn imanishi_decompose(g: &FinGenGroup, cap: usize) -> Result<Decomposition> {
    let dom = g.domain().clone();
    let ctx = RegularContext::new(dom.clone(), g.generators());
    let df = ctx.d_f_set(cap)?;
    let cut_points: Vec<Point> = df.cut_points().into_iter().filter(|p| !dom.is_boundary(p)).collect();
    let ex: Exchange = cut_domain(&dom, &cut_points)?;
    let cut: Arc<Domain> = ex.target().clone();
    let gens =
        g.generators().iter().map(|gen| Ok((gen.name.clone(), ex.conjugate(&gen.iet)?))).collect::<Result<Vec<_>>>()?;
    let g_cut = FinGenGroup::new(cut.clone(), gens)?;
    let ctx_cut = RegularContext::new(cut.clone(), g_cut.generators());
    let disc = ctx_cut.disc_points()?;

    let mut out = Decomposition {
        irreducible: Vec::new(),
        finite_part: Vec::new(),
        residual_undecided: Vec::new(),
        classes: Vec::new(),
        cut_points,
        capped_points: df.capped.clone(),
    };
    for comps in classes(&g_cut) {
        let inside: Vec<&Point> = disc.iter().filter(|p| comps.contains(&p.component)).collect();
        let mut verdict = if inside.is_empty() {
            match holonomy_cardinality(&g_cut, &comps)? {
                Some(cardinality) => ClassVerdict::Finite { cardinality },
                None => ClassVerdict::Irreducible,
            }
        } else {
            let mut v = ClassVerdict::Irreducible;
            for p in inside {
                let status = ctx_cut.regular_orbit(p, cap)?.status;
                if status != OrbitStatus::Infinite {
                    v = ClassVerdict::Undecided {
                        reason: format!(
                            "regular orbit of discontinuity at `{}` {} is {:?}",
                            cut.component(p.component).label,
                            cut.basis().display(&p.offset),
                            status
                        ),
                    };
                    break;
                }
            }
            v
        };
        let failure = match verdict {
            ClassVerdict::Irreducible => density_check(&g_cut, &comps, cap)?,
            ClassVerdict::Finite { cardinality } => finite_check(&g_cut, &comps, cardinality, cap)?,
            ClassVerdict::Undecided { .. } => None,
        };
        if let Some(reason) = failure {
            verdict = ClassVerdict::Undecided { reason };
        }
        let region = ex.unmap_subdomain(&Subdomain::components(&cut, comps.iter().copied()))?;
        for gen in g.iets() {
            if !gen.is_invariant(&region)? {
                return Err(Error::NotInvariant("decomposition class moved by a generator".into()));
            }
        }
        match &verdict {
            ClassVerdict::Irreducible => out.irreducible.push(region.clone()),
            ClassVerdict::Finite { cardinality } => out.finite_part.push((region.clone(), *cardinality)),
            ClassVerdict::Undecided { .. } => out.residual_undecided.push(region.clone()),
        }
        out.classes.push(ClassReport {
            region,
            pieces: comps.iter().map(|&c| cut.component(c).label.clone()).collect(),
            verdict,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Component;
    use crate::exact::{Symbol, SymbolBasis};
    use crate::iet::{Cell, Iet};

    fn two_circles() -> (Arc<Domain>, ExactReal) {
        let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
        let a = basis.var("alpha").unwrap();
        (Domain::unit_circles(basis, ["c0", "c1"]).unwrap(), a)
    }

    #[test]
    fn swap_gives_finite_part_of_cardinality_two() {
        let (dom, _) = two_circles();
        let tau = Iet::permutation(dom.clone(), &[1, 0]).unwrap();
        let g = FinGenGroup::new(dom.clone(), [("tau".into(), tau)]).unwrap();
        let d = imanishi_decompose(&g, 1000).unwrap();
        assert!(d.irreducible.is_empty() && d.residual_undecided.is_empty());
        assert_eq!(d.finite_part, vec![(Subdomain::whole(&dom), 2)]);
    }

    #[test]
    fn swap_and_rotation_is_irreducible() {
        let (dom, a) = two_circles();
        let tau = Iet::permutation(dom.clone(), &[1, 0]).unwrap();
        let r0 = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let g = FinGenGroup::new(dom.clone(), [("tau".into(), tau), ("R0".into(), r0)]).unwrap();
        let d = imanishi_decompose(&g, 2000).unwrap();
        assert_eq!(d.irreducible, vec![Subdomain::whole(&dom)]);
        assert!(d.finite_part.is_empty() && d.residual_undecided.is_empty());
    }

    #[test]
    fn rational_rotation_class_counts_orbit() {
        let (dom, _) = two_circles();
        let tau = Iet::permutation(dom.clone(), &[1, 0]).unwrap();
        let r0 = Iet::rotation(dom.clone(), 0, &ExactReal::ratio(1, 3)).unwrap();
        let g = FinGenGroup::new(dom.clone(), [("tau".into(), tau), ("R0".into(), r0)]).unwrap();
        let d = imanishi_decompose(&g, 1000).unwrap();
        assert_eq!(d.finite_part, vec![(Subdomain::whole(&dom), 6)]);
    }

    #[test]
    fn interval_swap_finite_part_after_cutting() {
        // exchange the halves of [0, 1): every orbit has two points, and the
        // discontinuity at 1/2 has a finite regular orbit
        let basis = Arc::new(SymbolBasis::rational());
        let dom = Domain::new(basis, vec![Component::interval("I", ExactReal::one())]).unwrap();
        let h = ExactReal::ratio(1, 2);
        let swap = Iet::from_cells(
            dom.clone(),
            vec![
                Cell { src: 0, start: ExactReal::zero(), end: h.clone(), dst: 0, dst_start: h.clone() },
                Cell { src: 0, start: h.clone(), end: ExactReal::one(), dst: 0, dst_start: ExactReal::zero() },
            ],
        )
        .unwrap();
        let g = FinGenGroup::new(dom.clone(), [("s".into(), swap)]).unwrap();
        let d = imanishi_decompose(&g, 100).unwrap();
        assert_eq!(d.cut_points, vec![Point::new(0, h)]);
        assert_eq!(d.finite_part, vec![(Subdomain::whole(&dom), 2)]);
    }
}
