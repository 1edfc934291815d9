//! Regular orbits: points reachable from `x` along generators that are
//! continuous at every intermediate point.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::domain::{Domain, Point};
use crate::error::Result;
use crate::exact::in_q_span;
use crate::group::Generator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbitStatus {
    /// The regular orbit closed with at most `cap` points.
    Complete,
    /// The exploration stopped at `cap` points.
    Capped,
    /// Certified infinite: the orbit reaches a circle on which some
    /// generator is a rotation by an angle incommensurable with its length.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitEdge {
    pub from: usize,
    pub to: Point,
    pub generator: usize,
    pub regular: bool,
}

/// The explored part of the orbit graph of `root`: vertices are the regular
/// orbit found so far, edges record every generator applied to them.
#[derive(Clone, Debug)]
pub struct RegularOrbit {
    pub root: Point,
    pub points: Vec<Point>,
    pub edges: Vec<OrbitEdge>,
    pub status: OrbitStatus,
}

/// Per-generator discontinuity data shared by regular-orbit searches.
pub struct RegularContext<'a> {
    domain: Arc<Domain>,
    gens: &'a [Generator],
    disc: Vec<HashSet<Point>>,
    rotating: Vec<bool>,
}

impl<'a> RegularContext<'a> {
    pub fn new(domain: Arc<Domain>, gens: &'a [Generator]) -> Self {
        let disc: Vec<HashSet<Point>> = gens.iter().map(|g| g.iet.disc_points().into_iter().collect()).collect();
        let rotating = (0..domain.len())
            .map(|c| {
                domain.is_circle(c)
                    && gens.iter().zip(&disc).any(|(g, d)| {
                        let row = g.iet.cells_on(c);
                        row.iter().all(|cell| cell.dst == c)
                            && !d.iter().any(|p| p.component == c)
                            && in_q_span(&row[0].dst_start, std::slice::from_ref(domain.length(c))).is_none()
                    })
            })
            .collect();
        RegularContext { domain, gens, disc, rotating }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn is_regular(&self, generator: usize, p: &Point) -> bool {
        !self.disc[generator].contains(p)
    }

    /// Union of the generators' discontinuity points, sorted.
    pub fn disc_points(&self) -> Result<Vec<Point>> {
        let mut all: Vec<Point> = self.disc.iter().flatten().cloned().collect::<HashSet<_>>().into_iter().collect();
        self.domain.sort_points(&mut all)?;
        Ok(all)
    }

    /// Breadth-first closure of `x` along regular edges.
    pub fn regular_orbit(&self, x: &Point, cap: usize) -> Result<RegularOrbit> {
        let cap = cap.max(1);
        let mut points = vec![x.clone()];
        let mut edges = Vec::new();
        if self.domain.is_boundary(x) {
            return Ok(RegularOrbit { root: x.clone(), points, edges, status: OrbitStatus::Complete });
        }
        let mut index: HashMap<Point, usize> = HashMap::from([(x.clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if self.rotating[points[i].component] {
                return Ok(RegularOrbit { root: x.clone(), points, edges, status: OrbitStatus::Infinite });
            }
            for (k, g) in self.gens.iter().enumerate() {
                let y = &points[i];
                let regular = self.is_regular(k, y);
                let z = g.iet.apply(y)?;
                edges.push(OrbitEdge { from: i, to: z.clone(), generator: k, regular });
                if regular && !index.contains_key(&z) {
                    if points.len() >= cap {
                        return Ok(RegularOrbit { root: x.clone(), points, edges, status: OrbitStatus::Capped });
                    }
                    index.insert(z.clone(), points.len());
                    queue.push_back(points.len());
                    points.push(z);
                }
            }
        }
        Ok(RegularOrbit { root: x.clone(), points, edges, status: OrbitStatus::Complete })
    }

    /// Classifies every discontinuity point by the fate of its regular
    /// orbit. Points sharing an orbit are explored once.
    pub fn d_f_set(&self, cap: usize) -> Result<DfReport> {
        let mut report = DfReport::default();
        let mut known: HashMap<Point, (usize, OrbitStatus)> = HashMap::new();
        for p in self.disc_points()? {
            let status = match known.get(&p) {
                Some(&(_, s)) => s,
                None => {
                    let orbit = self.regular_orbit(&p, cap)?;
                    let s = orbit.status;
                    if s == OrbitStatus::Complete {
                        for q in &orbit.points {
                            known.insert(q.clone(), (report.orbits.len(), s));
                        }
                        report.orbits.push(orbit);
                    }
                    s
                }
            };
            match status {
                OrbitStatus::Complete => report.finite.push(p),
                OrbitStatus::Capped => report.capped.push(p),
                OrbitStatus::Infinite => report.infinite.push(p),
            }
        }
        Ok(report)
    }
}

/// Discontinuity points split by regular-orbit status. `finite` is `D_f(S)`.
#[derive(Clone, Debug, Default)]
pub struct DfReport {
    pub finite: Vec<Point>,
    pub infinite: Vec<Point>,
    pub capped: Vec<Point>,
    /// The distinct complete regular orbits met.
    pub orbits: Vec<RegularOrbit>,
}

impl DfReport {
    /// All points of the complete regular orbits, the cut locus that empties
    /// `D_f`.
    pub fn cut_points(&self) -> Vec<Point> {
        self.orbits.iter().flat_map(|o| o.points.iter().cloned()).collect()
    }
}
