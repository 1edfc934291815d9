//! `F_J ⋊ G` on `A x D`: generators of `G` act diagonally, and `σ_b` adds
//! `b` to the `A` coordinate over `A x J`.

use std::sync::Arc;

use crate::constructions::AbelianGroup;
use crate::domain::{Component, Domain, Subdomain};
use crate::error::{Error, Result};
use crate::group::FinGenGroup;
use crate::iet::{Cell, Iet};

#[derive(Clone, Debug)]
pub struct LlLike {
    base: Arc<Domain>,
    lamps: AbelianGroup,
    domain: Arc<Domain>,
    support: Subdomain,
    group: FinGenGroup,
}

impl LlLike {
    pub fn base(&self) -> &Arc<Domain> {
        &self.base
    }

    pub fn lamps(&self) -> &AbelianGroup {
        &self.lamps
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn support(&self) -> &Subdomain {
        &self.support
    }

    pub fn group(&self) -> &FinGenGroup {
        &self.group
    }

    /// Index of component `(a, c)` of `A x D`.
    pub fn component(&self, a: usize, c: usize) -> usize {
        a * self.base.len() + c
    }

    /// `g` acting on every copy of `D`.
    pub fn lift(&self, g: &Iet) -> Result<Iet> {
        if **g.domain() != *self.base {
            return Err(Error::DomainMismatch);
        }
        let mut cells = Vec::with_capacity(g.cells().len() * self.lamps.order());
        for a in 0..self.lamps.order() {
            for cell in g.cells() {
                cells.push(Cell {
                    src: self.component(a, cell.src),
                    start: cell.start.clone(),
                    end: cell.end.clone(),
                    dst: self.component(a, cell.dst),
                    dst_start: cell.dst_start.clone(),
                });
            }
        }
        Iet::from_cells(self.domain.clone(), cells)
    }

    /// `(a, x) -> (a + v(x), x)` for the step function `v` given as
    /// disjoint `(region of D, value)` pairs.
    pub fn lamp_function(&self, pieces: &[(Subdomain, Vec<u32>)]) -> Result<Iet> {
        let mut moves = Vec::new();
        for (region, v) in pieces {
            if AbelianGroup::is_zero(v) {
                continue;
            }
            for a in 0..self.lamps.order() {
                let target = self.lamps.index(&self.lamps.add(&self.lamps.element(a), v));
                for arc in region.arcs() {
                    moves.push((
                        self.component(a, arc.component),
                        arc.start.clone(),
                        arc.end.clone(),
                        self.component(target, arc.component),
                    ));
                }
            }
        }
        Iet::vertical(self.domain.clone(), moves)
    }

    /// `σ_b = b 1_J`.
    pub fn sigma(&self, b: &[u32]) -> Result<Iet> {
        self.lamp_function(&[(self.support.clone(), b.to_vec())])
    }
}

/// Builds `F_J ⋊ G` for `G = g`, lamp group `a` and support `j ⊂ D`.
pub fn build_ll_like(g: &FinGenGroup, a: &AbelianGroup, j: &Subdomain) -> Result<LlLike> {
    let base = g.domain().clone();
    for arc in j.arcs() {
        if arc.component >= base.len() {
            return Err(Error::InvalidConstruction("support outside the base domain".into()));
        }
    }
    let mut comps = Vec::with_capacity(a.order() * base.len());
    for i in 0..a.order() {
        let lamp = AbelianGroup::label(&a.element(i));
        for c in base.components() {
            let label = format!("{lamp}:{}", c.label);
            comps.push(if c.is_circle() {
                Component::circle(label, c.length.clone())
            } else {
                Component::interval(label, c.length.clone())
            });
        }
    }
    let domain = Domain::new(base.basis_arc().clone(), comps)?;
    let mut ll = LlLike {
        base: base.clone(),
        lamps: a.clone(),
        domain: domain.clone(),
        support: j.clone(),
        group: FinGenGroup::new(domain.clone(), [])?,
    };
    let mut gens = Vec::new();
    for gen in g.generators() {
        gens.push((gen.name.clone(), ll.lift(&gen.iet)?));
    }
    for b in 1..a.order() {
        let v = a.element(b);
        gens.push((format!("sigma[{}]", AbelianGroup::label(&v)), ll.sigma(&v)?));
    }
    ll.group = FinGenGroup::new(domain, gens)?;
    Ok(ll)
}
