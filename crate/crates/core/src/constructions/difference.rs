//! Minkowski difference sets `J - I = {j - i mod L}` of arcs on one circle.

use std::sync::Arc;

use crate::domain::{Domain, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::ExactReal;

/// Measure of `J - I` where `J`, `I` lie on one circle of `dom`.
pub fn difference_set_measure(dom: &Arc<Domain>, j: &Subdomain, i: &Subdomain) -> Result<ExactReal> {
    difference_measure_arcs(dom, j.arcs(), i.arcs())
}

pub(crate) fn difference_measure_arcs(dom: &Domain, j: &[Segment], i: &[Segment]) -> Result<ExactReal> {
    Ok(difference_set(dom, j, i)?.measure())
}

/// `J - I` as a subdomain. Each pair of arcs contributes the arc
/// `[j_start - i_end, j_end - i_start)`; the open and half-open versions
/// differ by finitely many points.
pub fn difference_set(dom: &Domain, j: &[Segment], i: &[Segment]) -> Result<Subdomain> {
    let Some(c) = j.first().or(i.first()).map(|a| a.component) else {
        return Ok(Subdomain::empty());
    };
    if j.iter().chain(i).any(|a| a.component != c) || !dom.is_circle(c) {
        return Err(Error::Precondition("difference sets need arcs on a single circle".into()));
    }
    let mut pieces = Vec::new();
    for ja in j {
        for ia in i {
            pieces.push((c, &ja.start - &ia.end, &ja.end - &ia.start));
        }
    }
    Subdomain::from_arcs(dom, pieces)
}
