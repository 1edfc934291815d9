//! Isometric reparametrizations between domains: cutting a domain along
//! finitely many points, and presenting an invariant subdomain as a domain
//! of its own. Either way transformations are carried across by conjugation.
//!
//! Labelling of new components: the first piece cut from a component keeps
//! its label, later pieces get `label/1`, `label/2`, ... On a circle the
//! pieces run from the smallest cut upward and the piece through the wrap
//! point comes last.

use std::sync::Arc;

use crate::domain::{try_sort_by, Component, Domain, Point, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::iet::{cells_on, compose_cells, image_segments, merge_cells, Cell, Iet};

/// One component of the target domain, assembled from consecutive source
/// segments.
struct Piece {
    label: String,
    circle: bool,
    segments: Vec<Segment>,
}

/// An isometry from (part of) `source` onto `target`, stored as cells in
/// both directions.
#[derive(Clone, Debug)]
pub struct Exchange {
    source: Arc<Domain>,
    target: Arc<Domain>,
    forward: Vec<Cell>,
    backward: Vec<Cell>,
    total: bool,
}

impl Exchange {
    fn from_pieces(source: Arc<Domain>, pieces: Vec<Piece>, total: bool) -> Result<Self> {
        let basis = source.basis_arc().clone();
        let mut comps = Vec::with_capacity(pieces.len());
        let mut forward = Vec::new();
        for (idx, piece) in pieces.into_iter().enumerate() {
            let mut cursor = ExactReal::zero();
            for seg in piece.segments {
                let len = seg.length();
                forward.push(Cell {
                    src: seg.component,
                    start: seg.start,
                    end: seg.end,
                    dst: idx,
                    dst_start: cursor.clone(),
                });
                cursor = cursor + len;
            }
            comps.push(if piece.circle {
                Component::circle(piece.label, cursor)
            } else {
                Component::interval(piece.label, cursor)
            });
        }
        let target = Domain::new(basis.clone(), comps)?;
        try_sort_by(&mut forward, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))?;
        let mut backward: Vec<Cell> = forward
            .iter()
            .map(|c| Cell {
                src: c.dst,
                start: c.dst_start.clone(),
                end: c.dst_end(),
                dst: c.src,
                dst_start: c.start.clone(),
            })
            .collect();
        try_sort_by(&mut backward, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))?;
        Ok(Exchange { source, target, forward, backward, total })
    }

    pub fn source(&self) -> &Arc<Domain> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Domain> {
        &self.target
    }

    /// Cells from source to target (only covering the exchanged part).
    pub fn forward_cells(&self) -> &[Cell] {
        &self.forward
    }

    /// Carries `t` (on the source) to the target: `phi ∘ t ∘ phi^-1`.
    pub fn conjugate(&self, t: &Iet) -> Result<Iet> {
        if !(Arc::ptr_eq(t.domain(), &self.source) || **t.domain() == *self.source) {
            return Err(Error::DomainMismatch);
        }
        let basis = self.source.basis();
        let inner = compose_cells(basis, t.cells(), &self.backward)?;
        let cells = compose_cells(basis, &self.forward, &inner)
            .map_err(|_| Error::NotInvariant("transformation leaves the exchanged region".into()))?;
        let mut cells = cells;
        try_sort_by(&mut cells, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))?;
        Ok(Iet::from_canonical(self.target.clone(), merge_cells(cells)))
    }

    /// Carries `t` (on the target) back to the source. Only defined when the
    /// exchange covers the whole source.
    pub fn pull_back(&self, t: &Iet) -> Result<Iet> {
        if !self.total {
            return Err(Error::Precondition("exchange does not cover the source domain".into()));
        }
        if !(Arc::ptr_eq(t.domain(), &self.target) || **t.domain() == *self.target) {
            return Err(Error::DomainMismatch);
        }
        let basis = self.source.basis();
        let inner = compose_cells(basis, t.cells(), &self.forward)?;
        let mut cells = compose_cells(basis, &self.backward, &inner)?;
        try_sort_by(&mut cells, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))?;
        Ok(Iet::from_canonical(self.source.clone(), merge_cells(cells)))
    }

    fn map_with(cells: &[Cell], dom: &Domain, p: &Point) -> Result<Point> {
        let row = cells_on(cells, p.component);
        for c in row {
            if dom.le(&c.start, &p.offset)? && dom.lt(&p.offset, &c.end)? {
                return Ok(Point { component: c.dst, offset: &c.dst_start + &(&p.offset - &c.start) });
            }
        }
        Err(Error::InvalidPoint("point outside the exchanged region".into()))
    }

    pub fn map_point(&self, p: &Point) -> Result<Point> {
        Self::map_with(&self.forward, &self.source, p)
    }

    pub fn unmap_point(&self, p: &Point) -> Result<Point> {
        Self::map_with(&self.backward, &self.target, p)
    }

    /// Image in the target of the exchanged part of `s`.
    pub fn map_subdomain(&self, s: &Subdomain) -> Result<Subdomain> {
        let segs = image_segments(self.source.basis(), &self.forward, s.arcs())?;
        Subdomain::normalize(&self.target, segs)
    }

    pub fn unmap_subdomain(&self, s: &Subdomain) -> Result<Subdomain> {
        let segs = image_segments(self.source.basis(), &self.backward, s.arcs())?;
        Subdomain::normalize(&self.source, segs)
    }
}

fn piece_label(label: &str, k: usize) -> String {
    if k == 0 {
        label.to_string()
    } else {
        format!("{label}/{k}")
    }
}

/// Cuts `dom` at `cuts`: circles become intervals, intervals split. Duplicate
/// points are merged; left endpoints of intervals are rejected.
pub fn cut_domain(dom: &Arc<Domain>, cuts: &[Point]) -> Result<Exchange> {
    let mut pts: Vec<Point> = Vec::with_capacity(cuts.len());
    for p in cuts {
        let p = dom.point(p.component, p.offset.clone())?;
        if dom.is_boundary(&p) {
            return Err(Error::Precondition(format!(
                "cut point at the left end of interval `{}`",
                dom.component(p.component).label
            )));
        }
        pts.push(p);
    }
    dom.sort_points(&mut pts)?;
    pts.dedup();
    let mut pieces = Vec::new();
    for c in 0..dom.len() {
        let comp = dom.component(c);
        let len = dom.length(c);
        let here: Vec<&ExactReal> = pts.iter().filter(|p| p.component == c).map(|p| &p.offset).collect();
        if here.is_empty() {
            pieces.push(Piece {
                label: comp.label.clone(),
                circle: comp.is_circle(),
                segments: vec![Segment { component: c, start: ExactReal::zero(), end: len.clone() }],
            });
            continue;
        }
        let mut k = 0;
        if !comp.is_circle() {
            pieces.push(Piece {
                label: piece_label(&comp.label, k),
                circle: false,
                segments: vec![Segment { component: c, start: ExactReal::zero(), end: here[0].clone() }],
            });
            k += 1;
        }
        for w in here.windows(2) {
            pieces.push(Piece {
                label: piece_label(&comp.label, k),
                circle: false,
                segments: vec![Segment { component: c, start: w[0].clone(), end: w[1].clone() }],
            });
            k += 1;
        }
        let last = here[here.len() - 1].clone();
        let mut segments = vec![Segment { component: c, start: last, end: len.clone() }];
        if comp.is_circle() && !here[0].is_zero() {
            segments.push(Segment { component: c, start: ExactReal::zero(), end: here[0].clone() });
        }
        pieces.push(Piece { label: piece_label(&comp.label, k), circle: false, segments });
    }
    Exchange::from_pieces(dom.clone(), pieces, true)
}

/// Presents the subdomain `s` as a domain of its own. A whole component keeps
/// its kind and label; on a circle the arcs through the wrap point are joined
/// into one interval.
pub fn subdomain_exchange(dom: &Arc<Domain>, s: &Subdomain) -> Result<Exchange> {
    if s.is_empty() {
        return Err(Error::InvalidSubdomain("empty subdomain".into()));
    }
    let mut pieces = Vec::new();
    for c in s.component_set() {
        let comp = dom.component(c);
        let len = dom.length(c);
        let arcs = s.arcs_on(c);
        if arcs.len() == 1 && arcs[0].start.is_zero() && arcs[0].end == *len {
            pieces.push(Piece { label: comp.label.clone(), circle: comp.is_circle(), segments: arcs.to_vec() });
            continue;
        }
        let wraps = comp.is_circle() && arcs.len() > 1 && arcs[0].start.is_zero() && arcs[arcs.len() - 1].end == *len;
        let inner = if wraps { &arcs[1..arcs.len() - 1] } else { arcs };
        let mut k = 0;
        for a in inner {
            pieces.push(Piece { label: piece_label(&comp.label, k), circle: false, segments: vec![a.clone()] });
            k += 1;
        }
        if wraps {
            pieces.push(Piece {
                label: piece_label(&comp.label, k),
                circle: false,
                segments: vec![arcs[arcs.len() - 1].clone(), arcs[0].clone()],
            });
        }
    }
    let total = *s == Subdomain::whole(dom);
    Exchange::from_pieces(dom.clone(), pieces, total)
}

/// Restriction of `t` to an invariant subdomain, as a transformation of the
/// subdomain presented as a domain.
pub fn restrict(t: &Iet, s: &Subdomain) -> Result<(Iet, Exchange)> {
    if !t.is_invariant(s)? {
        return Err(Error::NotInvariant("restriction needs an invariant subdomain".into()));
    }
    let ex = subdomain_exchange(t.domain(), s)?;
    let r = ex.conjugate(t)?;
    Ok((r, ex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Symbol, SymbolBasis};

    fn circle() -> (Arc<Domain>, ExactReal) {
        let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
        let a = basis.var("alpha").unwrap();
        (Domain::unit_circles(basis, ["c"]).unwrap(), a)
    }

    #[test]
    fn cut_interval_in_half() {
        let basis = Arc::new(SymbolBasis::rational());
        let dom = Domain::new(basis, vec![Component::interval("I", ExactReal::one())]).unwrap();
        let ex = cut_domain(&dom, &[Point::new(0, ExactReal::ratio(1, 2))]).unwrap();
        let t = ex.target();
        assert_eq!(t.len(), 2);
        assert_eq!(t.component(0).label, "I");
        assert_eq!(t.component(1).label, "I/1");
        assert!(t.components().iter().all(|c| !c.is_circle() && c.length == ExactReal::ratio(1, 2)));
    }

    #[test]
    fn cut_circle_once_gives_interval() {
        let (dom, a) = circle();
        let ex =
            cut_domain(&dom, &[Point::new(0, ExactReal::ratio(1, 3)), Point::new(0, ExactReal::ratio(1, 3))]).unwrap();
        assert_eq!(ex.target().len(), 1);
        assert!(!ex.target().is_circle(0));
        assert_eq!(ex.target().component(0).label, "c");
        let r = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let rc = ex.conjugate(&r).unwrap();
        assert_eq!(rc.cells().len(), 2);
        assert_eq!(rc.discontinuities(), 1);
        for k in 0..200 {
            let p = Point::new(0, ExactReal::ratio(k, 200));
            let via = ex.unmap_point(&rc.apply(&ex.map_point(&p).unwrap()).unwrap()).unwrap();
            assert_eq!(via, r.apply(&p).unwrap());
        }
        assert_eq!(ex.pull_back(&rc).unwrap(), r);
    }

    #[test]
    fn boundary_cut_rejected() {
        let basis = Arc::new(SymbolBasis::rational());
        let dom = Domain::new(basis, vec![Component::interval("I", ExactReal::one())]).unwrap();
        assert!(cut_domain(&dom, &[Point::new(0, ExactReal::zero())]).is_err());
    }

    #[test]
    fn conjugation_is_a_homomorphism() {
        let (dom, a) = circle();
        let ex =
            cut_domain(&dom, &[Point::new(0, ExactReal::ratio(1, 5)), Point::new(0, ExactReal::ratio(3, 4))]).unwrap();
        let r = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let s = Iet::rotation(dom.clone(), 0, &ExactReal::ratio(1, 3)).unwrap();
        let lhs = ex.conjugate(&r.compose(&s).unwrap()).unwrap();
        let rhs = ex.conjugate(&r).unwrap().compose(&ex.conjugate(&s).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn restrict_to_component_and_reject_non_invariant() {
        let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
        let a = basis.var("alpha").unwrap();
        let dom = Domain::unit_circles(basis, ["c0", "c1"]).unwrap();
        let r = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let (rr, ex) = restrict(&r, &Subdomain::components(&dom, [0])).unwrap();
        assert_eq!(ex.target().len(), 1);
        assert!(ex.target().is_circle(0));
        assert_eq!(rr, Iet::rotation(ex.target().clone(), 0, &a).unwrap());
        let half = Subdomain::from_arcs(&dom, [(0, ExactReal::zero(), ExactReal::ratio(1, 2))]).unwrap();
        assert!(matches!(restrict(&r, &half), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn restrict_wrapping_support() {
        let (dom, _) = circle();
        let s = Subdomain::from_arcs(&dom, [(0, ExactReal::ratio(3, 4), ExactReal::ratio(1, 4))]).unwrap();
        let id = Iet::identity(dom.clone());
        let (r, ex) = restrict(&id, &s).unwrap();
        assert_eq!(ex.target().len(), 1);
        assert_eq!(*ex.target().length(0), ExactReal::ratio(1, 2));
        assert!(r.is_identity());
    }
}
