//! Stability checks: finite orbits trivial, and irreducible components of
//! `G` staying irreducible for a supplied subgroup.

use crate::domain::Subdomain;
use crate::error::Result;
use crate::exchange::subdomain_exchange;
use crate::group::imanishi::{imanishi_decompose, ClassVerdict, Decomposition};
use crate::group::FinGenGroup;
use crate::iet::Iet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Whether every finite orbit of `g` is a single point.
pub fn finite_orbit_triviality(g: &FinGenGroup, cap: usize) -> Result<(Verdict, Decomposition)> {
    let d = imanishi_decompose(g, cap)?;
    Ok((finite_orbits_trivial(&d), d))
}

/// The same verdict read off an existing decomposition.
pub fn finite_orbits_trivial(d: &Decomposition) -> Verdict {
    if d.finite_part.iter().any(|(_, k)| *k > 1) {
        Verdict::No
    } else if d.residual_undecided.is_empty() {
        Verdict::Yes
    } else {
        Verdict::Unknown
    }
}

#[derive(Clone, Debug)]
pub struct ComponentStability {
    /// An irreducible component of `G`.
    pub region: Subdomain,
    /// `Yes` when the subgroup still acts irreducibly on it.
    pub preserved: Verdict,
    /// The subgroup's decomposition of the component (in the component's
    /// own coordinates).
    pub restricted: Decomposition,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub group: Decomposition,
    pub components: Vec<ComponentStability>,
}

impl StabilityReport {
    pub fn stable(&self) -> Verdict {
        if self.components.iter().any(|c| c.preserved == Verdict::No) {
            Verdict::No
        } else if self.group.is_resolved() && self.components.iter().all(|c| c.preserved == Verdict::Yes) {
            Verdict::Yes
        } else {
            Verdict::Unknown
        }
    }
}

/// For each irreducible component of `g`, decomposes the restriction of the
/// subgroup generated by `h_gens` (assumed to lie in `g`).
pub fn relative_stability(g: &FinGenGroup, h_gens: &[(String, Iet)], cap: usize) -> Result<StabilityReport> {
    let group = imanishi_decompose(g, cap)?;
    let mut components = Vec::new();
    for region in &group.irreducible {
        let ex = subdomain_exchange(g.domain(), region)?;
        let gens = h_gens.iter().map(|(name, t)| Ok((name.clone(), ex.conjugate(t)?))).collect::<Result<Vec<_>>>()?;
        let h = FinGenGroup::new(ex.target().clone(), gens)?;
        let restricted = imanishi_decompose(&h, cap)?;
        let preserved = match restricted.classes.as_slice() {
            [only] => match only.verdict {
                ClassVerdict::Irreducible => Verdict::Yes,
                ClassVerdict::Finite { .. } => Verdict::No,
                ClassVerdict::Undecided { .. } => Verdict::Unknown,
            },
            _ => Verdict::No,
        };
        components.push(ComponentStability { region: region.clone(), preserved, restricted });
    }
    Ok(StabilityReport { group, components })
}
