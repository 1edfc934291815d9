//! The naive lamplighter construction for a non-abelian lamp group `F`:
//! `F` acts on `m` circles by permuting them over a support `I`, and `R`
//! rotates all circles. When `R^n(I)` meets `I`, conjugated lamps stop
//! commuting and the wreath relations fail.

use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{Domain, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{ExactReal, SymbolBasis};
use crate::group::finite::GroupTable;
use crate::iet::{FiberStep, Iet};

#[derive(Clone, Debug)]
pub struct NaiveLamplighter {
    table: GroupTable,
    domain: Arc<Domain>,
    support: Subdomain,
    lamps: Vec<Iet>,
    rotation: Iet,
}

/// One shift `n` of the search.
#[derive(Clone, Debug)]
pub struct OverlapRow {
    pub n: usize,
    /// `|R^n(I) ∩ I|` on one circle.
    pub overlap: ExactReal,
    /// Pairs `(g, h)` with `[R^n g R^-n, h] != id`.
    pub noncommuting_pairs: usize,
}

/// A failed wreath relation `[R^n g R^-n, h] = id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionWitness {
    pub n: usize,
    pub g: usize,
    pub h: usize,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub abelian: bool,
    pub rows: Vec<OverlapRow>,
    /// The smallest `n`, then lexicographically smallest `(g, h)`.
    pub witness: Option<ObstructionWitness>,
}

/// Builds the construction: `perms[g]` is the permutation of the `m`
/// circles by which element `g` of `table` acts over `support` (arcs on
/// the first circle, reused on every circle).
pub fn build_naive_lamplighter(
    basis: Arc<SymbolBasis>,
    table: GroupTable,
    perms: &[Vec<usize>],
    angle: &ExactReal,
    support: &[(ExactReal, ExactReal)],
) -> Result<NaiveLamplighter> {
    table.check_action(perms)?;
    let m = perms.first().map_or(0, Vec::len);
    if m == 0 {
        return Err(Error::InvalidConstruction("the action needs at least one circle".into()));
    }
    let domain = Domain::unit_circles(basis, (0..m).map(|i| i.to_string()))?;
    let support = Subdomain::from_arcs(&domain, support.iter().map(|(s, e)| (0, s.clone(), e.clone())))?;
    let lamps = perms
        .iter()
        .map(|p| {
            let steps = support
                .arcs()
                .iter()
                .map(|a| FiberStep { start: a.start.clone(), end: a.end.clone(), perm: p.clone() })
                .collect();
            Iet::fiberwise(domain.clone(), steps)
        })
        .collect::<Result<Vec<_>>>()?;
    let rotation = Iet::synchronized_rotation(domain.clone(), angle)?;
    Ok(NaiveLamplighter { table, domain, support, lamps, rotation })
}

impl NaiveLamplighter {
    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn support(&self) -> &Subdomain {
        &self.support
    }

    pub fn lamps(&self) -> &[Iet] {
        &self.lamps
    }

    pub fn rotation(&self) -> &Iet {
        &self.rotation
    }

    /// Checks `[R^n g R^-n, h]` for all `g, h` and `1 <= n <= depth`.
    pub fn search(&self, depth: usize) -> Result<ObstructionReport> {
        let k = self.lamps.len();
        let mut rows = Vec::with_capacity(depth);
        let mut witness = None;
        let mut rn = Iet::identity(self.domain.clone());
        for n in 1..=depth {
            rn = self.rotation.compose(&rn)?;
            let moved = rn.image(&self.support)?;
            let overlap = moved.intersection(&self.domain, &self.support)?.measure();
            let shifted = self.lamps.iter().map(|g| rn.conjugate(g)).collect::<Result<Vec<_>>>()?;
            let bad: Vec<(usize, usize)> = (0..k * k)
                .into_par_iter()
                .map(|idx| {
                    let (g, h) = (idx / k, idx % k);
                    Ok((!shifted[g].commutes_with(&self.lamps[h])?).then_some((g, h)))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            if witness.is_none() {
                witness = bad.first().map(|&(g, h)| ObstructionWitness { n, g, h });
            }
            rows.push(OverlapRow { n, overlap, noncommuting_pairs: bad.len() });
        }
        Ok(ObstructionReport { abelian: self.table.is_abelian(), rows, witness })
    }
}

/// Builds the naive construction and searches for a failed wreath relation.
pub fn wreath_obstruction_witness(
    basis: Arc<SymbolBasis>,
    table: GroupTable,
    perms: &[Vec<usize>],
    angle: &ExactReal,
    support: &[(ExactReal, ExactReal)],
    depth: usize,
) -> Result<ObstructionReport> {
    build_naive_lamplighter(basis, table, perms, angle, support)?.search(depth)
}
