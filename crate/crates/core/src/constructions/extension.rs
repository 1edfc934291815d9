//! `H^Q ⋊ Q` on `Q x D`: tuples of elements of `H` act copy by copy and `Q`
//! permutes the copies by left multiplication.

use std::sync::Arc;

use crate::domain::{Component, Domain};
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::group::finite::GroupTable;
use crate::iet::{Cell, Iet};

#[derive(Clone, Debug)]
pub struct FiniteExtension {
    pub domain: Arc<Domain>,
    /// `h` acting on copy `q` only, named `{h}@{q}`, then left
    /// multiplication by each non-identity `q`, named `q{q}`.
    pub generators: Vec<(String, Iet)>,
}

/// Builds the generators of `H^Q ⋊ Q` from generators of `H` on `D`.
/// Copy `q` of component `c` has index `q |D| + c` and label `{q}:{label}`.
pub fn induce_finite_extension(h_gens: &[(String, Iet)], q: &GroupTable) -> Result<FiniteExtension> {
    let base = h_gens
        .first()
        .ok_or_else(|| Error::InvalidConstruction("need at least one generator of H".into()))?
        .1
        .domain()
        .clone();
    if h_gens.iter().any(|(_, t)| **t.domain() != *base) {
        return Err(Error::DomainMismatch);
    }
    let m = base.len();
    let mut comps = Vec::with_capacity(q.order() * m);
    for copy in 0..q.order() {
        for c in base.components() {
            let label = format!("{copy}:{}", c.label);
            comps.push(if c.is_circle() {
                Component::circle(label, c.length.clone())
            } else {
                Component::interval(label, c.length.clone())
            });
        }
    }
    let domain = Domain::new(base.basis_arc().clone(), comps)?;
    let base_ref = &base;
    let identity_cells = |copy: usize| {
        (0..m).map(move |c| Cell {
            src: copy * m + c,
            start: ExactReal::zero(),
            end: base_ref.length(c).clone(),
            dst: copy * m + c,
            dst_start: ExactReal::zero(),
        })
    };
    let mut generators = Vec::new();
    for (name, h) in h_gens {
        for copy in 0..q.order() {
            let mut cells: Vec<Cell> = (0..q.order()).filter(|&o| o != copy).flat_map(identity_cells).collect();
            cells.extend(h.cells().iter().map(|cell| Cell {
                src: copy * m + cell.src,
                start: cell.start.clone(),
                end: cell.end.clone(),
                dst: copy * m + cell.dst,
                dst_start: cell.dst_start.clone(),
            }));
            generators.push((format!("{name}@{copy}"), Iet::from_cells(domain.clone(), cells)?));
        }
    }
    for g in (0..q.order()).filter(|&g| g != q.identity()) {
        let perm: Vec<usize> = (0..q.order() * m).map(|i| q.mul(g, i / m) * m + i % m).collect();
        generators.push((format!("q{g}"), Iet::permutation(domain.clone(), &perm)?));
    }
    Ok(FiniteExtension { domain, generators })
}
