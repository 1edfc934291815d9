//! Finitely generated groups of interval exchanges and the analyses run on
//! them.

pub mod birkhoff;
pub mod finite;
pub mod imanishi;
pub mod regular;
pub mod stability;

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::iet::Iet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub iet: Iet,
}

/// A group given by a symmetric generating set. Identity generators are
/// dropped, duplicates (in canonical form) keep their first name, and a
/// missing inverse of `g` is added as `g^-1`.
#[derive(Clone, Debug)]
pub struct FinGenGroup {
    domain: Arc<Domain>,
    generators: Vec<Generator>,
}

impl FinGenGroup {
    pub fn new(domain: Arc<Domain>, gens: impl IntoIterator<Item = (String, Iet)>) -> Result<Self> {
        let mut seen: HashSet<Iet> = HashSet::new();
        let mut base = Vec::new();
        for (name, iet) in gens {
            if !(Arc::ptr_eq(iet.domain(), &domain) || **iet.domain() == *domain) {
                return Err(Error::DomainMismatch);
            }
            if iet.is_identity() || !seen.insert(iet.clone()) {
                continue;
            }
            base.push(Generator { name, iet });
        }
        let mut generators = base.clone();
        for g in &base {
            let inv = g.iet.inverse();
            if seen.insert(inv.clone()) {
                generators.push(Generator { name: format!("{}^-1", g.name), iet: inv });
            }
        }
        Ok(FinGenGroup { domain, generators })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn iets(&self) -> impl Iterator<Item = &Iet> {
        self.generators.iter().map(|g| &g.iet)
    }

    pub fn generator(&self, name: &str) -> Option<&Iet> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.iet)
    }

    /// Elements of word length at most `radius`, in breadth-first order.
    /// Stops early (flagging `complete = false`) once more than
    /// `max_elements` elements have been found.
    pub fn ball(&self, radius: usize, max_elements: Option<usize>) -> Result<Ball> {
        let id = Iet::identity(self.domain.clone());
        let mut seen: HashSet<Iet> = HashSet::from([id.clone()]);
        let mut elements = vec![id];
        let mut sizes = vec![1];
        let mut frontier = 0..1;
        for _ in 0..radius {
            let products: Vec<Vec<Iet>> = elements[frontier.clone()]
                .par_iter()
                .map(|w| self.generators.iter().map(|g| g.iet.compose(w)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let start = elements.len();
            for p in products.into_iter().flatten() {
                if seen.contains(&p) {
                    continue;
                }
                if max_elements.is_some_and(|m| elements.len() >= m) {
                    return Ok(Ball { elements, sizes, complete: false });
                }
                seen.insert(p.clone());
                elements.push(p);
            }
            sizes.push(elements.len());
            frontier = start..elements.len();
            if frontier.is_empty() {
                // finite group exhausted; later spheres are empty
                while sizes.len() <= radius {
                    sizes.push(elements.len());
                }
                break;
            }
        }
        Ok(Ball { elements, sizes, complete: true })
    }

    /// Orbit of `x` under the ball of radius `radius`, with the cumulative
    /// growth `#(B_r . x)` for each `r`.
    pub fn orbit(&self, x: &Point, radius: usize, max_points: Option<usize>) -> Result<Orbit> {
        let mut orbit = self.explore(x, Some(radius), max_points)?;
        if orbit.complete {
            orbit.growth.resize(radius + 1, orbit.points.len());
        }
        Ok(orbit)
    }

    /// Breadth-first orbit of `x` until it closes or holds `cap` points.
    pub fn orbit_until(&self, x: &Point, cap: usize) -> Result<Orbit> {
        self.explore(x, None, Some(cap))
    }

    fn explore(&self, x: &Point, radius: Option<usize>, max_points: Option<usize>) -> Result<Orbit> {
        self.domain.point(x.component, x.offset.clone())?;
        let mut seen: HashSet<Point> = HashSet::from([x.clone()]);
        let mut points = vec![x.clone()];
        let mut growth = vec![1];
        let mut frontier = 0..1;
        for _ in 0..radius.unwrap_or(usize::MAX) {
            let images: Vec<Vec<Point>> = points[frontier.clone()]
                .par_iter()
                .map(|p| self.generators.iter().map(|g| g.iet.apply(p)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let start = points.len();
            for q in images.into_iter().flatten() {
                if seen.contains(&q) {
                    continue;
                }
                if max_points.is_some_and(|m| points.len() >= m) {
                    return Ok(Orbit { points, growth, complete: false });
                }
                seen.insert(q.clone());
                points.push(q);
            }
            growth.push(points.len());
            frontier = start..points.len();
            if frontier.is_empty() {
                growth.pop();
                break;
            }
        }
        Ok(Orbit { points, growth, complete: true })
    }
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub elements: Vec<Iet>,
    /// `sizes[r] = |B_r|`.
    pub sizes: Vec<usize>,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<Point>,
    /// `growth[r] = #(B_r . x)`.
    pub growth: Vec<usize>,
    pub complete: bool,
}

/// One row of a growth series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub r: usize,
    pub ball_size: Option<usize>,
    pub orbit_size: usize,
}

/// Ball and orbit growth side by side. Ball sizes are reported while the
/// ball stays below `ball_cap` elements.
pub fn growth_series(g: &FinGenGroup, x: &Point, radius: usize, ball_cap: usize) -> Result<Vec<GrowthRow>> {
    let orbit = g.orbit(x, radius, None)?;
    let ball = g.ball(radius, Some(ball_cap))?;
    Ok((0..=radius)
        .map(|r| GrowthRow { r, ball_size: ball.sizes.get(r).copied(), orbit_size: orbit.growth[r] })
        .collect())
}
