//! Phase spaces: finite disjoint unions of oriented circles and half-open
//! intervals, points on them, and finite unions of half-open arcs.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{ExactReal, SymbolBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Circle,
    Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub label: String,
    pub kind: ComponentKind,
    pub length: ExactReal,
}

impl Component {
    pub fn circle(label: impl Into<String>, length: ExactReal) -> Self {
        Component { label: label.into(), kind: ComponentKind::Circle, length }
    }

    pub fn interval(label: impl Into<String>, length: ExactReal) -> Self {
        Component { label: label.into(), kind: ComponentKind::Interval, length }
    }

    pub fn is_circle(&self) -> bool {
        self.kind == ComponentKind::Circle
    }
}

/// A domain: ordered components over a shared symbol basis.
#[derive(Clone, Debug)]
pub struct Domain {
    basis: Arc<SymbolBasis>,
    components: Vec<Component>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && *self.basis == *other.basis
    }
}

impl Domain {
    pub fn new(basis: Arc<SymbolBasis>, components: Vec<Component>) -> Result<Arc<Self>> {
        if components.is_empty() {
            return Err(Error::InvalidDomain("a domain needs at least one component".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if components[..i].iter().any(|d| d.label == c.label) {
                return Err(Error::InvalidDomain(format!("duplicate label `{}`", c.label)));
            }
            if basis.sign(&c.length)? != Ordering::Greater {
                return Err(Error::InvalidDomain(format!("component `{}` has non-positive length", c.label)));
            }
        }
        Ok(Arc::new(Domain { basis, components }))
    }

    /// `n` circles of length one labelled by `labels`.
    pub fn unit_circles<S: Into<String>>(
        basis: Arc<SymbolBasis>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Self>> {
        let comps = labels.into_iter().map(|l| Component::circle(l, ExactReal::one())).collect();
        Domain::new(basis, comps)
    }

    pub fn basis(&self) -> &SymbolBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<SymbolBasis> {
        &self.basis
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.components[i]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn length(&self, i: usize) -> &ExactReal {
        &self.components[i].length
    }

    pub fn is_circle(&self, i: usize) -> bool {
        self.components[i].is_circle()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.components.iter().position(|c| c.label == label)
    }

    pub fn total_length(&self) -> ExactReal {
        self.components.iter().fold(ExactReal::zero(), |acc, c| &acc + &c.length)
    }

    pub fn cmp(&self, x: &ExactReal, y: &ExactReal) -> Result<Ordering> {
        self.basis.cmp(x, y)
    }

    pub fn lt(&self, x: &ExactReal, y: &ExactReal) -> Result<bool> {
        self.basis.lt(x, y)
    }

    pub fn le(&self, x: &ExactReal, y: &ExactReal) -> Result<bool> {
        self.basis.le(x, y)
    }

    /// A validated point `0 <= offset < length` on component `c`.
    pub fn point(&self, c: usize, offset: ExactReal) -> Result<Point> {
        if c >= self.components.len() {
            return Err(Error::InvalidPoint(format!("component index {c} out of range")));
        }
        if self.basis.sign(&offset)? == Ordering::Less || !self.lt(&offset, self.length(c))? {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside component `{}`",
                self.basis.display(&offset),
                self.components[c].label
            )));
        }
        Ok(Point { component: c, offset })
    }

    /// Point at `offset` reduced into the component (circles wrap, intervals
    /// must already contain it).
    pub fn wrap_point(&self, c: usize, offset: &ExactReal) -> Result<Point> {
        if self.is_circle(c) {
            let off = self.basis.mod_interval(offset, self.length(c))?;
            Ok(Point { component: c, offset: off })
        } else {
            self.point(c, offset.clone())
        }
    }

    /// Boundary points are the left endpoints of interval components.
    pub fn is_boundary(&self, p: &Point) -> bool {
        !self.is_circle(p.component) && p.offset.is_zero()
    }

    /// Midpoint of a component.
    pub fn midpoint(&self, c: usize) -> Point {
        Point { component: c, offset: self.length(c).scale(&crate::exact::rat(1, 2)) }
    }

    /// Sorts points by (component, offset).
    pub fn sort_points(&self, points: &mut [Point]) -> Result<()> {
        try_sort_by(points, |a, b| Ok(a.component.cmp(&b.component).then(self.cmp(&a.offset, &b.offset)?)))
    }
}

/// A point of a domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub component: usize,
    pub offset: ExactReal,
}

impl Point {
    pub fn new(component: usize, offset: ExactReal) -> Self {
        Point { component, offset }
    }
}

/// A half-open arc `[start, end)` inside one component, never wrapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub component: usize,
    pub start: ExactReal,
    pub end: ExactReal,
}

impl Segment {
    pub fn length(&self) -> ExactReal {
        &self.end - &self.start
    }
}

/// A finite union of half-open arcs in canonical form: sorted by
/// (component, start), pairwise disjoint, no empty or touching arcs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Subdomain {
    arcs: Vec<Segment>,
}

impl Subdomain {
    pub fn empty() -> Self {
        Subdomain { arcs: Vec::new() }
    }

    pub fn whole(dom: &Domain) -> Self {
        Subdomain {
            arcs: (0..dom.len())
                .map(|c| Segment { component: c, start: ExactReal::zero(), end: dom.length(c).clone() })
                .collect(),
        }
    }

    /// Whole components `cs`.
    pub fn components(dom: &Domain, cs: impl IntoIterator<Item = usize>) -> Self {
        let mut cs: Vec<usize> = cs.into_iter().collect();
        cs.sort_unstable();
        cs.dedup();
        Subdomain {
            arcs: cs
                .into_iter()
                .map(|c| Segment { component: c, start: ExactReal::zero(), end: dom.length(c).clone() })
                .collect(),
        }
    }

    /// Builds a subdomain from `(component, start, end)` triples. On a circle
    /// `end < start` denotes the wrapping arc `[start, L) u [0, end)` and
    /// offsets are reduced modulo the length; on an interval the arc must lie
    /// inside `[0, L]`. Overlapping input is merged.
    pub fn from_arcs(dom: &Domain, arcs: impl IntoIterator<Item = (usize, ExactReal, ExactReal)>) -> Result<Self> {
        let mut out = Vec::new();
        for (c, start, end) in arcs {
            if c >= dom.len() {
                return Err(Error::InvalidSubdomain(format!("component index {c} out of range")));
            }
            let len = dom.length(c);
            if dom.is_circle(c) {
                let s = dom.basis().mod_interval(&start, len)?;
                let full_turn =
                    dom.basis().sign(&(&end - &start))? != Ordering::Less && dom.le(len, &(&end - &start))?;
                if full_turn {
                    out.push(Segment { component: c, start: ExactReal::zero(), end: len.clone() });
                    continue;
                }
                let e = if end == *len { len.clone() } else { dom.basis().mod_interval(&end, len)? };
                match dom.cmp(&s, &e)? {
                    Ordering::Less => out.push(Segment { component: c, start: s, end: e }),
                    Ordering::Equal => {}
                    Ordering::Greater => {
                        out.push(Segment { component: c, start: s, end: len.clone() });
                        if !e.is_zero() {
                            out.push(Segment { component: c, start: ExactReal::zero(), end: e });
                        }
                    }
                }
            } else {
                if dom.basis().sign(&start)? == Ordering::Less || dom.lt(len, &end)? {
                    return Err(Error::InvalidSubdomain(format!(
                        "arc leaves interval component `{}`",
                        dom.component(c).label
                    )));
                }
                match dom.cmp(&start, &end)? {
                    Ordering::Less => out.push(Segment { component: c, start, end }),
                    Ordering::Equal => {}
                    Ordering::Greater => {
                        return Err(Error::InvalidSubdomain("interval arcs cannot wrap".into()));
                    }
                }
            }
        }
        Subdomain::normalize(dom, out)
    }

    /// Canonicalizes non-wrapping arcs (possibly overlapping or unsorted).
    pub(crate) fn normalize(dom: &Domain, mut arcs: Vec<Segment>) -> Result<Self> {
        arcs.retain(|a| a.start != a.end);
        try_sort_by(&mut arcs, |a, b| Ok(a.component.cmp(&b.component).then(dom.cmp(&a.start, &b.start)?)))?;
        let mut out: Vec<Segment> = Vec::with_capacity(arcs.len());
        for a in arcs {
            if let Some(last) = out.last_mut() {
                if last.component == a.component && dom.le(&a.start, &last.end)? {
                    if dom.lt(&last.end, &a.end)? {
                        last.end = a.end;
                    }
                    continue;
                }
            }
            out.push(a);
        }
        Ok(Subdomain { arcs: out })
    }

    pub fn arcs(&self) -> &[Segment] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs_on(&self, c: usize) -> &[Segment] {
        let lo = self.arcs.partition_point(|a| a.component < c);
        let hi = self.arcs.partition_point(|a| a.component <= c);
        &self.arcs[lo..hi]
    }

    pub fn measure(&self) -> ExactReal {
        self.arcs.iter().fold(ExactReal::zero(), |acc, a| &acc + &a.length())
    }

    /// Component indices touched by this subdomain.
    pub fn component_set(&self) -> Vec<usize> {
        let mut cs: Vec<usize> = self.arcs.iter().map(|a| a.component).collect();
        cs.dedup();
        cs
    }

    pub fn contains(&self, dom: &Domain, p: &Point) -> Result<bool> {
        let arcs = self.arcs_on(p.component);
        // first arc with end > offset
        let mut lo = 0;
        let mut hi = arcs.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if dom.le(&arcs[mid].end, &p.offset)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        match arcs.get(lo) {
            Some(a) => dom.le(&a.start, &p.offset),
            None => Ok(false),
        }
    }

    pub fn union(&self, dom: &Domain, other: &Subdomain) -> Result<Subdomain> {
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().cloned());
        Subdomain::normalize(dom, arcs)
    }

    pub fn intersection(&self, dom: &Domain, other: &Subdomain) -> Result<Subdomain> {
        let mut out = Vec::new();
        for c in self.component_set() {
            let a = self.arcs_on(c);
            let b = other.arcs_on(c);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                let start = dom.basis().max(&a[i].start, &b[j].start)?.clone();
                let a_first = dom.le(&a[i].end, &b[j].end)?;
                let end = if a_first { a[i].end.clone() } else { b[j].end.clone() };
                if dom.lt(&start, &end)? {
                    out.push(Segment { component: c, start, end });
                }
                if a_first {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
        Ok(Subdomain { arcs: out })
    }

    pub fn complement(&self, dom: &Domain) -> Result<Subdomain> {
        let mut out = Vec::new();
        for c in 0..dom.len() {
            let mut cursor = ExactReal::zero();
            for a in self.arcs_on(c) {
                if a.start != cursor {
                    out.push(Segment { component: c, start: cursor.clone(), end: a.start.clone() });
                }
                cursor = a.end.clone();
            }
            if cursor != *dom.length(c) {
                out.push(Segment { component: c, start: cursor, end: dom.length(c).clone() });
            }
        }
        Ok(Subdomain { arcs: out })
    }

    pub fn difference(&self, dom: &Domain, other: &Subdomain) -> Result<Subdomain> {
        self.intersection(dom, &other.complement(dom)?)
    }

    pub fn is_disjoint(&self, dom: &Domain, other: &Subdomain) -> Result<bool> {
        Ok(self.intersection(dom, other)?.is_empty())
    }

    /// True when every arc of `self` lies inside `other`.
    pub fn is_subset(&self, dom: &Domain, other: &Subdomain) -> Result<bool> {
        Ok(self.difference(dom, other)?.is_empty())
    }
}

/// Stable sort with a fallible comparator; the first error aborts the sort.
pub(crate) fn try_sort_by<T>(v: &mut [T], mut f: impl FnMut(&T, &T) -> Result<Ordering>) -> Result<()> {
    let mut err = None;
    v.sort_by(|a, b| {
        if err.is_some() {
            return Ordering::Equal;
        }
        match f(a, b) {
            Ok(o) => o,
            Err(e) => {
                err = Some(e);
                Ordering::Equal
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
