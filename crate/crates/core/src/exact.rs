//! Exact arithmetic in the rational span of `1` and finitely many declared
//! irrational symbols.
//!
//! An [`ExactReal`] is a vector of rational coefficients over the basis
//! `{1, s_1, ..., s_m}`. Equality is coefficient-wise. Ordering is decided by
//! evaluating the difference on rational enclosures of the symbols, refining
//! the enclosures until the sign is certain or the budget runs out. When the
//! basis is declared rationally independent, distinct coefficient vectors are
//! distinct reals and the refinement terminates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default number of enclosure refinements tried before a comparison is
/// reported as undecided.
pub const DEFAULT_MAX_REFINEMENTS: usize = 64;

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.41"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        let int_abs: BigInt = if int_abs.is_empty() { BigInt::zero() } else { int_abs.parse().map_err(|_| bad())? };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(int_abs * &den + frac_num, den);
        return Ok(if negative { -mag } else { mag });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Renders a rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders a rational in decimal with `digits` fractional digits, truncated
/// toward zero.
pub fn rational_to_decimal(q: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q.abs() * Rational::from_integer(scale.clone())).trunc().to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if q.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Index of a symbol inside its [`SymbolBasis`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub(crate) u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Deterministic source of shrinking rational enclosures for a symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refiner {
    /// Simple continued fraction `[a0; a1, a2, ...]`. When `repeat > 0` the
    /// last `repeat` terms repeat forever (quadratic irrationals); otherwise
    /// refinement stops once the listed terms are used up.
    ContinuedFraction { terms: Vec<BigInt>, repeat: usize },
}

impl Refiner {
    fn term(&self, j: usize) -> Option<&BigInt> {
        match self {
            Refiner::ContinuedFraction { terms, repeat } => {
                if j < terms.len() {
                    Some(&terms[j])
                } else if *repeat > 0 && *repeat <= terms.len() {
                    let start = terms.len() - repeat;
                    Some(&terms[start + (j - terms.len()) % repeat])
                } else {
                    None
                }
            }
        }
    }

    /// Convergents `p_j / q_j` for `j < count` (fewer if the expansion ends).
    fn convergents(&self, count: usize) -> Vec<Rational> {
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let Some(a) = self.term(j) else { break };
            let h_next = a * &h + &h_prev;
            let k_next = a * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            out.push(Rational::new(h.clone(), k.clone()));
        }
        out
    }
}

/// A declared irrational with a certified rational enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
    pub refiner: Refiner,
}

impl Symbol {
    pub fn new(name: impl Into<String>, lo: Rational, hi: Rational, refiner: Refiner) -> Self {
        Symbol { name: name.into(), lo, hi, refiner }
    }

    /// `sqrt(2) - 1 = [0; 2, 2, 2, ...]`, enclosed in `[0.41, 0.42]`.
    pub fn sqrt2_minus_1(name: impl Into<String>) -> Self {
        Symbol::new(
            name,
            rat(41, 100),
            rat(42, 100),
            Refiner::ContinuedFraction { terms: vec![0.into(), 2.into()], repeat: 1 },
        )
    }

    /// `sqrt(3) - 1 = [0; 1, 2, 1, 2, ...]`, enclosed in `[0.73, 0.74]`.
    pub fn sqrt3_minus_1(name: impl Into<String>) -> Self {
        Symbol::new(
            name,
            rat(73, 100),
            rat(74, 100),
            Refiner::ContinuedFraction { terms: vec![0.into(), 1.into(), 2.into()], repeat: 2 },
        )
    }

    /// `(sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]`, enclosed in `[0.61, 0.62]`.
    pub fn golden_conjugate(name: impl Into<String>) -> Self {
        Symbol::new(
            name,
            rat(61, 100),
            rat(62, 100),
            Refiner::ContinuedFraction { terms: vec![0.into(), 1.into()], repeat: 1 },
        )
    }
}

/// The ordered list of symbols every [`ExactReal`] of a computation is
/// expressed over, together with their precomputed enclosure ladders.
#[derive(Clone, Debug)]
pub struct SymbolBasis {
    symbols: Vec<Symbol>,
    independent: bool,
    max_refinements: usize,
    // levels[s][k] is the enclosure of symbol s after k refinements.
    levels: Vec<Vec<(Rational, Rational)>>,
}

impl PartialEq for SymbolBasis {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.independent == other.independent
            && self.max_refinements == other.max_refinements
    }
}

impl SymbolBasis {
    /// Builds a basis. `independent` is the caller's assertion that
    /// `{1, s_1, ..., s_m}` is linearly independent over the rationals.
    pub fn new(symbols: Vec<Symbol>, independent: bool) -> Result<Self> {
        Self::with_budget(symbols, independent, DEFAULT_MAX_REFINEMENTS)
    }

    pub fn with_budget(symbols: Vec<Symbol>, independent: bool, max_refinements: usize) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::InvalidBasis("empty symbol name".into()));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::InvalidBasis(format!("duplicate symbol `{}`", s.name)));
            }
            if s.lo >= s.hi {
                return Err(Error::InvalidBasis(format!("enclosure of `{}` must have lo < hi", s.name)));
            }
        }
        let levels = symbols.iter().map(|s| Self::ladder(s, max_refinements)).collect::<Result<Vec<_>>>()?;
        Ok(SymbolBasis { symbols, independent, max_refinements, levels })
    }

    /// A basis with no symbols: plain rational arithmetic.
    pub fn rational() -> Self {
        SymbolBasis {
            symbols: Vec::new(),
            independent: true,
            max_refinements: DEFAULT_MAX_REFINEMENTS,
            levels: Vec::new(),
        }
    }

    fn ladder(s: &Symbol, max_refinements: usize) -> Result<Vec<(Rational, Rational)>> {
        let mut ladder = vec![(s.lo.clone(), s.hi.clone())];
        let convergents = s.refiner.convergents(max_refinements + 1);
        for pair in convergents.windows(2) {
            let (a, b) = if pair[0] <= pair[1] { (&pair[0], &pair[1]) } else { (&pair[1], &pair[0]) };
            let (prev_lo, prev_hi) = ladder.last().expect("non-empty");
            let lo = if a > prev_lo { a.clone() } else { prev_lo.clone() };
            let hi = if b < prev_hi { b.clone() } else { prev_hi.clone() };
            if lo > hi {
                return Err(Error::InvalidBasis(format!(
                    "continued fraction of `{}` leaves the declared enclosure",
                    s.name
                )));
            }
            if lo == hi {
                return Err(Error::InvalidBasis(format!("continued fraction of `{}` collapses to a rational", s.name)));
            }
            ladder.push((lo, hi));
        }
        Ok(ladder)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_independent(&self) -> bool {
        self.independent
    }

    pub fn max_refinements(&self) -> usize {
        self.max_refinements
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s.name == name).map(|i| SymbolId(i as u32))
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    /// The symbol `name` as an exact value.
    pub fn var(&self, name: &str) -> Result<ExactReal> {
        self.symbol_id(name).map(ExactReal::symbol).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    fn enclosure(&self, id: SymbolId, level: usize) -> &(Rational, Rational) {
        let ladder = &self.levels[id.index()];
        &ladder[level.min(ladder.len() - 1)]
    }

    fn available_levels(&self, x: &ExactReal) -> usize {
        x.syms.iter().map(|(id, _)| self.levels[id.index()].len() - 1).min().unwrap_or(0).min(self.max_refinements)
    }

    /// Interval evaluation of `x` at refinement `level`.
    pub fn enclose(&self, x: &ExactReal, level: usize) -> (Rational, Rational) {
        let mut lo = x.unit.clone();
        let mut hi = x.unit.clone();
        for (id, c) in &x.syms {
            let (l, h) = self.enclosure(*id, level);
            if c.is_positive() {
                lo += c * l;
                hi += c * h;
            } else {
                lo += c * h;
                hi += c * l;
            }
        }
        (lo, hi)
    }

    /// Sign of the lower (or upper) end of the enclosure of `x` at `level`,
    /// in integer arithmetic over a common denominator.
    fn bound_sign(&self, x: &ExactReal, level: usize, upper: bool) -> Ordering {
        let mut num = x.unit.numer().clone();
        let mut den = x.unit.denom().clone();
        for (id, c) in &x.syms {
            let (l, h) = self.enclosure(*id, level);
            let e = if c.is_positive() == upper { h } else { l };
            let tn = c.numer() * e.numer();
            let td = c.denom() * e.denom();
            num = num * &td + tn * &den;
            den *= td;
        }
        num.sign().cmp(&num_bigint::Sign::NoSign)
    }

    /// Sign of `x` as an ordering against zero.
    pub fn sign(&self, x: &ExactReal) -> Result<Ordering> {
        if x.syms.is_empty() {
            return Ok(x.unit.cmp(&Rational::zero()));
        }
        let top = self.available_levels(x);
        // enclosures are nested, so skipping levels never changes the verdict
        let mut level = 0;
        loop {
            if self.bound_sign(x, level, false) == Ordering::Greater {
                return Ok(Ordering::Greater);
            }
            if self.bound_sign(x, level, true) == Ordering::Less {
                return Ok(Ordering::Less);
            }
            if level == top {
                break;
            }
            level = (2 * level + 2).min(top);
        }
        Err(Error::Undecided { value: self.display(x), refinements: top })
    }

    /// Total order on exact values. Equal coefficient vectors compare `Equal`
    /// without any numerics.
    pub fn cmp(&self, x: &ExactReal, y: &ExactReal) -> Result<Ordering> {
        if x == y {
            return Ok(Ordering::Equal);
        }
        if x.syms.is_empty() && y.syms.is_empty() {
            return Ok(x.unit.cmp(&y.unit));
        }
        self.sign(&(x - y))
    }

    pub fn lt(&self, x: &ExactReal, y: &ExactReal) -> Result<bool> {
        Ok(self.cmp(x, y)? == Ordering::Less)
    }

    pub fn le(&self, x: &ExactReal, y: &ExactReal) -> Result<bool> {
        Ok(self.cmp(x, y)? != Ordering::Greater)
    }

    pub fn min<'a>(&self, x: &'a ExactReal, y: &'a ExactReal) -> Result<&'a ExactReal> {
        Ok(if self.le(x, y)? { x } else { y })
    }

    pub fn max<'a>(&self, x: &'a ExactReal, y: &'a ExactReal) -> Result<&'a ExactReal> {
        Ok(if self.le(x, y)? { y } else { x })
    }

    /// Rational approximation of `x` (midpoint of the finest enclosure).
    pub fn approx(&self, x: &ExactReal) -> Rational {
        let (lo, hi) = self.enclose(x, self.available_levels(x));
        (lo + hi) / Rational::from_integer(2.into())
    }

    /// The integer `n` with `n * len <= x < (n + 1) * len`.
    pub fn floor_div(&self, x: &ExactReal, len: &ExactReal) -> Result<BigInt> {
        if self.sign(len)? != Ordering::Greater {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let mut n = if x.is_rational() && len.is_rational() {
            (&x.unit / &len.unit).floor().to_integer()
        } else {
            (self.approx(x) / self.approx(len)).floor().to_integer()
        };
        loop {
            let r = x - &len.scale(&Rational::from_integer(n.clone()));
            if self.sign(&r)? == Ordering::Less {
                n -= 1;
            } else if self.cmp(&r, len)? != Ordering::Less {
                n += 1;
            } else {
                return Ok(n);
            }
        }
    }

    /// Reduces `x` into `[0, len)` by subtracting an integer multiple of `len`.
    pub fn mod_interval(&self, x: &ExactReal, len: &ExactReal) -> Result<ExactReal> {
        let n = self.floor_div(x, len)?;
        if n.is_zero() {
            return Ok(x.clone());
        }
        Ok(x - &len.scale(&Rational::from_integer(n)))
    }

    /// Decimal rendering of `x` from its finest enclosure.
    pub fn to_decimal(&self, x: &ExactReal, digits: usize) -> String {
        rational_to_decimal(&self.approx(x), digits)
    }

    /// Human-readable form such as `1/2 + 3*alpha`.
    pub fn display(&self, x: &ExactReal) -> String {
        let mut parts = Vec::new();
        if !x.unit.is_zero() || x.syms.is_empty() {
            parts.push(format_rational(&x.unit));
        }
        for (id, c) in &x.syms {
            let name = self.symbols.get(id.index()).map(|s| s.name.clone()).unwrap_or_else(|| format!("s{}", id.0));
            if c.is_one() {
                parts.push(name);
            } else {
                parts.push(format!("{}*{}", format_rational(c), name));
            }
        }
        parts.join(" + ")
    }
}

/// An element of `Q + Q s_1 + ... + Q s_m`, kept normalized (no zero
/// coefficients stored, symbols sorted by id).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactReal {
    unit: Rational,
    syms: Vec<(SymbolId, Rational)>,
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.unit))?;
        for (id, c) in &self.syms {
            write!(f, " + {}*s{}", format_rational(c), id.0)?;
        }
        Ok(())
    }
}

impl Default for ExactReal {
    fn default() -> Self {
        ExactReal::zero()
    }
}

impl From<Rational> for ExactReal {
    fn from(q: Rational) -> Self {
        ExactReal { unit: q, syms: Vec::new() }
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::from(Rational::from_integer(n.into()))
    }
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal { unit: Rational::zero(), syms: Vec::new() }
    }

    pub fn one() -> Self {
        ExactReal::from(1i64)
    }

    /// `n / d` as an exact value.
    pub fn ratio(n: i64, d: i64) -> Self {
        ExactReal::from(rat(n, d))
    }

    pub fn symbol(id: SymbolId) -> Self {
        ExactReal { unit: Rational::zero(), syms: vec![(id, Rational::one())] }
    }

    /// Builds a value from a unit coefficient and symbol coefficients in any
    /// order; duplicates are summed and zeros dropped.
    pub fn from_parts(unit: Rational, syms: impl IntoIterator<Item = (SymbolId, Rational)>) -> Self {
        let mut v: Vec<(SymbolId, Rational)> = syms.into_iter().collect();
        v.sort_by_key(|(id, _)| *id);
        let mut out: Vec<(SymbolId, Rational)> = Vec::with_capacity(v.len());
        for (id, c) in v {
            match out.last_mut() {
                Some((last, acc)) if *last == id => *acc += c,
                _ => out.push((id, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        ExactReal { unit, syms: out }
    }

    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    pub fn coeff(&self, id: SymbolId) -> Rational {
        self.syms.iter().find(|(s, _)| *s == id).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn sym_coeffs(&self) -> impl Iterator<Item = (SymbolId, &Rational)> {
        self.syms.iter().map(|(id, c)| (*id, c))
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.syms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.unit)
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, q: &Rational) -> ExactReal {
        if q.is_zero() {
            return ExactReal::zero();
        }
        ExactReal { unit: &self.unit * q, syms: self.syms.iter().map(|(id, c)| (*id, c * q)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> ExactReal {
        self.scale(&Rational::from_integer(n.into()))
    }

    fn combine(&self, other: &ExactReal, negate_other: bool) -> ExactReal {
        let unit = if negate_other { &self.unit - &other.unit } else { &self.unit + &other.unit };
        let mut syms = Vec::with_capacity(self.syms.len() + other.syms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.syms.len() || j < other.syms.len() {
            let take_left = j >= other.syms.len() || (i < self.syms.len() && self.syms[i].0 < other.syms[j].0);
            let take_right = i >= self.syms.len() || (j < other.syms.len() && other.syms[j].0 < self.syms[i].0);
            if take_left {
                syms.push(self.syms[i].clone());
                i += 1;
            } else if take_right {
                let (id, c) = &other.syms[j];
                syms.push((*id, if negate_other { -c } else { c.clone() }));
                j += 1;
            } else {
                let id = self.syms[i].0;
                let c =
                    if negate_other { &self.syms[i].1 - &other.syms[j].1 } else { &self.syms[i].1 + &other.syms[j].1 };
                if !c.is_zero() {
                    syms.push((id, c));
                }
                i += 1;
                j += 1;
            }
        }
        ExactReal { unit, syms }
    }

    /// Approximate value as `f64`, for diagnostics only.
    pub fn to_f64_lossy(&self, basis: &SymbolBasis) -> f64 {
        basis.approx(self).to_f64().unwrap_or(f64::NAN)
    }
}

impl Add<&ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &ExactReal) -> ExactReal {
        self.combine(rhs, false)
    }
}

impl Sub<&ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &ExactReal) -> ExactReal {
        self.combine(rhs, true)
    }
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: ExactReal) -> ExactReal {
        self.combine(&rhs, false)
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        self.combine(&rhs, true)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { unit: -&self.unit, syms: self.syms.iter().map(|(id, c)| (*id, -c)).collect() }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

/// Solves `x = sum q_i * gens_i` over the rationals, one equation per basis
/// coordinate. Returns `None` when no rational solution exists. When the
/// solution is not unique, free coefficients are set to zero.
pub fn in_q_span(x: &ExactReal, gens: &[ExactReal]) -> Option<Vec<Rational>> {
    let mut coords: Vec<Option<SymbolId>> = vec![None];
    for v in gens.iter().chain(std::iter::once(x)) {
        for (id, _) in &v.syms {
            if !coords.contains(&Some(*id)) {
                coords.push(Some(*id));
            }
        }
    }
    let coord_of = |v: &ExactReal, c: Option<SymbolId>| match c {
        None => v.unit.clone(),
        Some(id) => v.coeff(id),
    };
    let cols = gens.len();
    let mut m: Vec<Vec<Rational>> = coords
        .iter()
        .map(|c| {
            let mut row: Vec<Rational> = gens.iter().map(|g| coord_of(g, *c)).collect();
            row.push(coord_of(x, *c));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][cols].clone();
    }
    Some(sol)
}
