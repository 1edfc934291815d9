//! Interval exchange transformations stored as canonical cell lists.
//!
//! A cell `[start, end) -> dst_start` on components `src -> dst` translates
//! every point of the source arc. Cells are sorted by `(src, start)`, tile
//! the domain, and adjacent cells carrying the same translation are merged,
//! so two transformations are equal as maps iff their cell lists are equal.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::domain::{try_sort_by, Domain, Point, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{ExactReal, Rational, SymbolBasis};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub src: usize,
    pub start: ExactReal,
    pub end: ExactReal,
    pub dst: usize,
    pub dst_start: ExactReal,
}

impl Cell {
    pub fn len(&self) -> ExactReal {
        &self.end - &self.start
    }

    pub fn dst_end(&self) -> ExactReal {
        &self.dst_start + &self.len()
    }

    pub fn translation(&self) -> ExactReal {
        &self.dst_start - &self.start
    }
}

/// Index range of the cells whose `src` is `c` (cells sorted by source).
pub(crate) fn cells_on(cells: &[Cell], c: usize) -> &[Cell] {
    let lo = cells.partition_point(|x| x.src < c);
    let hi = cells.partition_point(|x| x.src <= c);
    &cells[lo..hi]
}

/// First index `k` of `row` with `row[k].end > y`.
fn first_ending_after(basis: &SymbolBasis, row: &[Cell], y: &ExactReal) -> Result<usize> {
    let (mut lo, mut hi) = (0, row.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if basis.le(&row[mid].end, y)? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Cells of `outer ∘ inner`. `outer` must be sorted by source and cover the
/// image of every inner cell; the output follows the order of `inner`.
pub(crate) fn compose_cells(basis: &SymbolBasis, outer: &[Cell], inner: &[Cell]) -> Result<Vec<Cell>> {
    let mut out = Vec::with_capacity(inner.len() + outer.len());
    for c in inner {
        let row = cells_on(outer, c.dst);
        let y0 = &c.dst_start;
        let y1 = c.dst_end();
        let shift = &c.start - y0;
        let mut k = first_ending_after(basis, row, y0)?;
        let mut lo = y0.clone();
        loop {
            let o = row.get(k).ok_or_else(|| Error::InvalidIet("composition leaves the covered region".into()))?;
            let covered = if lo == *y0 { basis.le(&o.start, &lo)? } else { o.start == lo };
            if !covered {
                return Err(Error::InvalidIet("composition leaves the covered region".into()));
            }
            let (hi, last) = match basis.cmp(&o.end, &y1)? {
                Ordering::Less => (o.end.clone(), false),
                _ => (y1.clone(), true),
            };
            out.push(Cell {
                src: c.src,
                start: &lo + &shift,
                end: &hi + &shift,
                dst: o.dst,
                dst_start: &o.dst_start + &(&lo - &o.start),
            });
            if last {
                break;
            }
            lo = hi;
            k += 1;
        }
    }
    Ok(out)
}

/// Images of `arcs` under the cells; parts of arcs not covered by any
/// cell are dropped.
pub(crate) fn image_segments(basis: &SymbolBasis, cells: &[Cell], arcs: &[Segment]) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    for arc in arcs {
        let row = cells_on(cells, arc.component);
        let mut k = first_ending_after(basis, row, &arc.start)?;
        while let Some(cell) = row.get(k) {
            if !basis.lt(&cell.start, &arc.end)? {
                break;
            }
            let lo = basis.max(&cell.start, &arc.start)?;
            let hi = basis.min(&cell.end, &arc.end)?;
            if basis.lt(lo, hi)? {
                let shift = cell.translation();
                out.push(Segment { component: cell.dst, start: lo + &shift, end: hi + &shift });
            }
            k += 1;
        }
    }
    Ok(out)
}

/// Merges consecutive cells that continue the same translation.
pub(crate) fn merge_cells(cells: Vec<Cell>) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::with_capacity(cells.len());
    for c in cells {
        if let Some(prev) = out.last_mut() {
            if prev.src == c.src && prev.dst == c.dst && prev.end == c.start && prev.dst_end() == c.dst_start {
                prev.end = c.end;
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Checks that `segs` (already sorted by start) tile `[0, len)` exactly.
fn check_tiling(segs: &[(&ExactReal, ExactReal)], len: &ExactReal, what: &str, label: &str) -> Result<()> {
    let mut cursor = ExactReal::zero();
    for (start, end) in segs {
        if **start != cursor {
            return Err(Error::InvalidIet(format!("{what} cells leave a gap or overlap on `{label}`")));
        }
        cursor = end.clone();
    }
    if cursor != *len {
        return Err(Error::InvalidIet(format!("{what} cells do not cover `{label}`")));
    }
    Ok(())
}

/// One piece of a fiberwise transformation: on `[start, end)` of the common
/// base coordinate, component `c` is sent to `perm[c]`.
#[derive(Clone, Debug)]
pub struct FiberStep {
    pub start: ExactReal,
    pub end: ExactReal,
    pub perm: Vec<usize>,
}

/// An interval exchange transformation of a domain.
#[derive(Clone, Debug)]
pub struct Iet {
    domain: Arc<Domain>,
    cells: Vec<Cell>,
}

impl PartialEq for Iet {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for Iet {}

impl Hash for Iet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cells.hash(state);
    }
}

impl Iet {
    /// Validates and canonicalizes a cell list.
    pub fn from_cells(domain: Arc<Domain>, mut cells: Vec<Cell>) -> Result<Self> {
        let basis = domain.basis();
        for c in &cells {
            if c.src >= domain.len() || c.dst >= domain.len() {
                return Err(Error::InvalidIet("cell refers to a missing component".into()));
            }
            if !basis.lt(&c.start, &c.end)? {
                return Err(Error::InvalidIet("cell with empty or reversed source".into()));
            }
            if basis.sign(&c.dst_start)? == Ordering::Less || basis.lt(domain.length(c.dst), &c.dst_end())? {
                return Err(Error::InvalidIet("cell image leaves its component".into()));
            }
        }
        try_sort_by(&mut cells, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))?;
        for comp in 0..domain.len() {
            let label = &domain.component(comp).label;
            let src: Vec<(&ExactReal, ExactReal)> =
                cells_on(&cells, comp).iter().map(|c| (&c.start, c.end.clone())).collect();
            check_tiling(&src, domain.length(comp), "source", label)?;
            let mut img: Vec<(&ExactReal, ExactReal)> =
                cells.iter().filter(|c| c.dst == comp).map(|c| (&c.dst_start, c.dst_end())).collect();
            try_sort_by(&mut img, |a, b| basis.cmp(a.0, b.0))?;
            check_tiling(&img, domain.length(comp), "image", label)?;
        }
        Ok(Iet { domain, cells: merge_cells(cells) })
    }

    /// Wraps cells already known to be canonical for `domain`.
    pub(crate) fn from_canonical(domain: Arc<Domain>, cells: Vec<Cell>) -> Self {
        Iet { domain, cells }
    }

    pub fn identity(domain: Arc<Domain>) -> Self {
        let cells = (0..domain.len())
            .map(|c| Cell {
                src: c,
                start: ExactReal::zero(),
                end: domain.length(c).clone(),
                dst: c,
                dst_start: ExactReal::zero(),
            })
            .collect();
        Iet { domain, cells }
    }

    /// Rotation by `angle` on circle `c`, identity elsewhere.
    pub fn rotation(domain: Arc<Domain>, c: usize, angle: &ExactReal) -> Result<Self> {
        Self::rotations(domain, &[(c, angle.clone())])
    }

    /// Every circle rotated by the same `angle` (reduced modulo its length).
    pub fn synchronized_rotation(domain: Arc<Domain>, angle: &ExactReal) -> Result<Self> {
        if let Some(c) = (0..domain.len()).find(|&c| !domain.is_circle(c)) {
            return Err(Error::InvalidIet(format!(
                "synchronized rotation needs circles only; `{}` is an interval",
                domain.component(c).label
            )));
        }
        let rots: Vec<(usize, ExactReal)> = (0..domain.len()).map(|c| (c, angle.clone())).collect();
        Self::rotations(domain, &rots)
    }

    fn rotations(domain: Arc<Domain>, rots: &[(usize, ExactReal)]) -> Result<Self> {
        let mut cells = Vec::new();
        for c in 0..domain.len() {
            let len = domain.length(c).clone();
            let angle = rots.iter().find(|(rc, _)| *rc == c).map(|(_, a)| a);
            let r = match angle {
                Some(a) => {
                    if !domain.is_circle(c) {
                        return Err(Error::InvalidIet(format!("`{}` is not a circle", domain.component(c).label)));
                    }
                    domain.basis().mod_interval(a, &len)?
                }
                None => ExactReal::zero(),
            };
            if r.is_zero() {
                cells.push(Cell { src: c, start: ExactReal::zero(), end: len, dst: c, dst_start: ExactReal::zero() });
            } else {
                let cut = &len - &r;
                cells.push(Cell { src: c, start: ExactReal::zero(), end: cut.clone(), dst: c, dst_start: r });
                cells.push(Cell { src: c, start: cut, end: len, dst: c, dst_start: ExactReal::zero() });
            }
        }
        Ok(Iet { domain, cells })
    }

    /// Sends component `c` onto component `perm[c]` isometrically.
    pub fn permutation(domain: Arc<Domain>, perm: &[usize]) -> Result<Self> {
        check_perm(perm, domain.len())?;
        for (c, &d) in perm.iter().enumerate() {
            if domain.length(c) != domain.length(d) || domain.is_circle(c) != domain.is_circle(d) {
                return Err(Error::InvalidIet("permuted components must have equal length and kind".into()));
            }
        }
        let cells = perm
            .iter()
            .enumerate()
            .map(|(c, &d)| Cell {
                src: c,
                start: ExactReal::zero(),
                end: domain.length(c).clone(),
                dst: d,
                dst_start: ExactReal::zero(),
            })
            .collect();
        Ok(Iet { domain, cells: merge_cells(cells) })
    }

    /// A map of a product domain `F x [0, L)` (all components of equal
    /// length) that keeps the base coordinate and permutes components on each
    /// step; identity off the steps.
    pub fn fiberwise(domain: Arc<Domain>, mut steps: Vec<FiberStep>) -> Result<Self> {
        let basis = domain.basis();
        let len = domain.length(0).clone();
        if (0..domain.len()).any(|c| *domain.length(c) != len || domain.is_circle(c) != domain.is_circle(0)) {
            return Err(Error::InvalidIet("fiberwise maps need components of equal length and kind".into()));
        }
        for s in &steps {
            check_perm(&s.perm, domain.len())?;
        }
        steps.retain(|s| s.start != s.end);
        try_sort_by(&mut steps, |a, b| basis.cmp(&a.start, &b.start))?;
        let mut prev_end = ExactReal::zero();
        for s in &steps {
            if basis.lt(&s.start, &prev_end)? || !basis.lt(&s.start, &s.end)? || basis.lt(&len, &s.end)? {
                return Err(Error::InvalidIet("fiber steps must be disjoint arcs inside [0, L)".into()));
            }
            prev_end = s.end.clone();
        }
        let mut cells = Vec::new();
        for c in 0..domain.len() {
            let mut cursor = ExactReal::zero();
            for s in &steps {
                if s.start != cursor {
                    cells.push(Cell {
                        src: c,
                        start: cursor.clone(),
                        end: s.start.clone(),
                        dst: c,
                        dst_start: cursor.clone(),
                    });
                }
                cells.push(Cell {
                    src: c,
                    start: s.start.clone(),
                    end: s.end.clone(),
                    dst: s.perm[c],
                    dst_start: s.start.clone(),
                });
                cursor = s.end.clone();
            }
            if cursor != len {
                cells.push(Cell { src: c, start: cursor.clone(), end: len.clone(), dst: c, dst_start: cursor });
            }
        }
        Ok(Iet { domain, cells: merge_cells(cells) })
    }

    /// A map keeping every offset and moving `[start, end)` of component
    /// `c` onto component `dst`, for each listed `(c, start, end, dst)`;
    /// identity elsewhere. The pieces must not overlap.
    pub fn vertical(domain: Arc<Domain>, mut pieces: Vec<(usize, ExactReal, ExactReal, usize)>) -> Result<Self> {
        let basis = domain.basis();
        pieces.retain(|p| p.1 != p.2);
        try_sort_by(&mut pieces, |a, b| Ok(a.0.cmp(&b.0).then(basis.cmp(&a.1, &b.1)?)))?;
        let mut cells = Vec::with_capacity(pieces.len() * 2 + domain.len());
        let mut it = pieces.into_iter().peekable();
        for c in 0..domain.len() {
            let mut cursor = ExactReal::zero();
            while let Some((_, start, end, dst)) = it.next_if(|p| p.0 == c) {
                if basis.lt(&start, &cursor)? {
                    return Err(Error::InvalidIet("overlapping vertical pieces".into()));
                }
                if start != cursor {
                    cells.push(Cell { src: c, start: cursor.clone(), end: start.clone(), dst: c, dst_start: cursor });
                }
                cells.push(Cell { src: c, start: start.clone(), end: end.clone(), dst, dst_start: start });
                cursor = end;
            }
            if cursor != *domain.length(c) {
                cells.push(Cell {
                    src: c,
                    start: cursor.clone(),
                    end: domain.length(c).clone(),
                    dst: c,
                    dst_start: cursor,
                });
            }
        }
        if it.next().is_some() {
            return Err(Error::InvalidIet("vertical piece on a missing component".into()));
        }
        Iet::from_cells(domain, cells)
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn basis(&self) -> &SymbolBasis {
        self.domain.basis()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cells_on(&self, c: usize) -> &[Cell] {
        cells_on(&self.cells, c)
    }

    pub fn is_identity(&self) -> bool {
        self.cells.len() == self.domain.len()
            && self.cells.iter().all(|c| c.src == c.dst && c.start.is_zero() && c.dst_start.is_zero())
    }

    fn same_domain(&self, other: &Iet) -> Result<()> {
        if Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// The cell containing `p`.
    pub fn cell_at(&self, p: &Point) -> Result<&Cell> {
        let row = self.cells_on(p.component);
        let k = first_ending_after(self.basis(), row, &p.offset)?;
        row.get(k).ok_or_else(|| Error::InvalidPoint("point outside the domain".into()))
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        let cell = self.cell_at(p)?;
        Ok(Point { component: cell.dst, offset: &cell.dst_start + &(&p.offset - &cell.start) })
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Iet) -> Result<Iet> {
        self.same_domain(other)?;
        let cells = compose_cells(self.basis(), &self.cells, &other.cells)?;
        Ok(Iet { domain: self.domain.clone(), cells: merge_cells(cells) })
    }

    pub fn inverse(&self) -> Iet {
        let mut cells: Vec<Cell> = self
            .cells
            .iter()
            .map(|c| Cell {
                src: c.dst,
                start: c.dst_start.clone(),
                end: c.dst_end(),
                dst: c.src,
                dst_start: c.start.clone(),
            })
            .collect();
        let basis = self.basis();
        // Image cells of a valid map never tie on start within a component.
        try_sort_by(&mut cells, |a, b| Ok(a.src.cmp(&b.src).then(basis.cmp(&a.start, &b.start)?)))
            .expect("image starts of a valid map are comparable");
        Iet { domain: self.domain.clone(), cells: merge_cells(cells) }
    }

    pub fn pow(&self, n: i64) -> Result<Iet> {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Iet::identity(self.domain.clone());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }

    /// `[self, other] = self other self^-1 other^-1`.
    pub fn commutator(&self, other: &Iet) -> Result<Iet> {
        self.compose(other)?.compose(&self.inverse())?.compose(&other.inverse())
    }

    pub fn commutes_with(&self, other: &Iet) -> Result<bool> {
        Ok(self.compose(other)? == other.compose(self)?)
    }

    /// `self ∘ other ∘ self^-1`.
    pub fn conjugate(&self, other: &Iet) -> Result<Iet> {
        self.compose(other)?.compose(&self.inverse())
    }

    fn continuous_across(&self, left: &Cell, right: &Cell) -> bool {
        if left.dst != right.dst {
            return false;
        }
        let limit = left.dst_end();
        limit == right.dst_start
            || (self.domain.is_circle(left.dst) && limit == *self.domain.length(left.dst) && right.dst_start.is_zero())
    }

    /// Interior points where the map is not continuous, sorted. Cell
    /// boundaries across which the translation continues (including through
    /// the wrap point of a circle) are not discontinuities.
    pub fn disc_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for c in 0..self.domain.len() {
            let row = self.cells_on(c);
            if self.domain.is_circle(c) {
                let (first, last) = (&row[0], &row[row.len() - 1]);
                if !self.continuous_across(last, first) {
                    out.push(Point { component: c, offset: ExactReal::zero() });
                }
            }
            for w in row.windows(2) {
                if !self.continuous_across(&w[0], &w[1]) {
                    out.push(Point { component: c, offset: w[1].start.clone() });
                }
            }
        }
        out
    }

    /// Number of discontinuity points, `d(T)`.
    pub fn discontinuities(&self) -> usize {
        self.disc_points().len()
    }

    /// Image of a subdomain.
    pub fn image(&self, s: &Subdomain) -> Result<Subdomain> {
        let segs = image_segments(self.basis(), &self.cells, s.arcs())?;
        Subdomain::normalize(&self.domain, segs)
    }

    pub fn is_invariant(&self, s: &Subdomain) -> Result<bool> {
        Ok(self.image(s)? == *s)
    }

    /// Sample of `d(T^n)/n` for `n = 1..=n_max`.
    pub fn norm_estimate(&self, n_max: usize) -> Result<NormEstimate> {
        if n_max == 0 {
            return Err(Error::Precondition("n_max must be at least 1".into()));
        }
        let mut samples = Vec::with_capacity(n_max);
        let mut power = Iet::identity(self.domain.clone());
        for n in 1..=n_max {
            match self.compose(&power) {
                Ok(p) => {
                    power = p;
                    let d = power.discontinuities();
                    samples.push(NormSample {
                        n,
                        discontinuities: Some(d),
                        ratio: Some(Rational::new(BigInt::from(d), BigInt::from(n))),
                        error: None,
                    });
                }
                Err(e) => {
                    samples.push(NormSample { n, discontinuities: None, ratio: None, error: Some(e.to_string()) });
                    break;
                }
            }
        }
        let limit = samples.iter().rev().find_map(|s| s.ratio.clone());
        Ok(NormEstimate { samples, limit })
    }
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidIet("permutation has the wrong size".into()));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidIet("not a permutation".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormSample {
    pub n: usize,
    pub discontinuities: Option<usize>,
    pub ratio: Option<Rational>,
    pub error: Option<String>,
}

/// `d(T^n)/n` sequence; `limit` is the last computed ratio, not a proof of
/// the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub samples: Vec<NormSample>,
    pub limit: Option<Rational>,
}

impl NormEstimate {
    pub fn all_zero(&self) -> bool {
        self.samples.iter().all(|s| s.ratio.as_ref().is_some_and(|r| r.is_zero()))
    }
}
