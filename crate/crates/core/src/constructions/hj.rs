//! The groups `H_J = <σ, R, τ_J>` on `Z/2 x Z/3 x circle`.
//!
//! `σ` and `R` generate `Z/3 ≀ Z` (lamp support `I = [0, 1/2)`, rotation by
//! `α`) acting on the last two coordinates, and `τ_J` flips the `Z/2`
//! coordinate over `J ⊂ {0} x circle`. Every element is uniquely
//! `R^n S_f τ`: `τ` flips over a subdomain of `Z/3 x circle`, `S_f` adds
//! `f(x) = sum_p f_p 1_{R^p I}(x)` to the `Z/3` coordinate, and `R^n`
//! rotates.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::constructions::lamplighter::{build_lamplighter, LampSpec, Lamplighter, WreathNormalForm};
use crate::constructions::ll_like::{build_ll_like, LlLike};
use crate::constructions::AbelianGroup;
use crate::domain::{Domain, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{in_q_span, ExactReal, Rational, SymbolBasis};
use crate::group::FinGenGroup;
use crate::iet::Iet;

#[derive(Clone, Debug)]
pub struct Hj {
    alpha: ExactReal,
    lamplighter: Lamplighter,
    lifted: LlLike,
    j: Subdomain,
    group: FinGenGroup,
}

/// Normal form `R^n S_f τ` of an element of `H_J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HjElement {
    pub n: i64,
    /// Lamp values `f_p` in `Z/3` (zeros not stored).
    pub f: BTreeMap<i64, u32>,
    /// Where the `Z/2` coordinate flips, as a subdomain of `Z/3 x circle`.
    pub tau: Subdomain,
}

/// Builds `H_J` for `J` on the circle labelled `0` of the base domain
/// returned by [`hj_base_domain`] (or any equal domain).
pub fn build_hj(basis: Arc<SymbolBasis>, alpha: ExactReal, j: &Subdomain) -> Result<Hj> {
    let lamplighter = build_lamplighter(basis, LampSpec::cyclic(3, alpha.clone())?)?;
    let base = lamplighter.domain().clone();
    if j.arcs().iter().any(|a| a.component != 0) {
        return Err(Error::InvalidConstruction("J must lie on the circle {0} x circle".into()));
    }
    let g = FinGenGroup::new(
        base.clone(),
        [
            ("sigma".to_string(), lamplighter.group().generator("sigma").expect("lamp generator").clone()),
            ("R".to_string(), lamplighter.group().generator("R").expect("rotation generator").clone()),
        ],
    )?;
    let lifted = build_ll_like(&g, &AbelianGroup::cyclic(2)?, j)?;
    let tau = lifted.sigma(&[1])?;
    let group = FinGenGroup::new(
        lifted.domain().clone(),
        [
            ("sigma".to_string(), lifted.group().generator("sigma").expect("lifted lamp").clone()),
            ("R".to_string(), lifted.group().generator("R").expect("lifted rotation").clone()),
            ("tau".to_string(), tau),
        ],
    )?;
    Ok(Hj { alpha, lamplighter, lifted, j: j.clone(), group })
}

/// The base domain `Z/3 x circle` (circles labelled `0`, `1`, `2`).
pub fn hj_base_domain(basis: Arc<SymbolBasis>) -> Result<Arc<Domain>> {
    Domain::unit_circles(basis, ["0", "1", "2"])
}

impl Hj {
    pub fn alpha(&self) -> &ExactReal {
        &self.alpha
    }

    pub fn j(&self) -> &Subdomain {
        &self.j
    }

    pub fn base(&self) -> &Arc<Domain> {
        self.lamplighter.domain()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.lifted.domain()
    }

    pub fn group(&self) -> &FinGenGroup {
        &self.group
    }

    pub fn lamplighter(&self) -> &Lamplighter {
        &self.lamplighter
    }

    pub fn sigma(&self) -> &Iet {
        self.group.generator("sigma").expect("sigma")
    }

    pub fn rotation(&self) -> &Iet {
        self.group.generator("R").expect("R")
    }

    pub fn tau_j(&self) -> &Iet {
        self.group.generator("tau").expect("tau")
    }

    /// `τ_K = b 1_K` for any subdomain `K` of the base.
    pub fn tau_k(&self, k: &Subdomain) -> Result<Iet> {
        self.lifted.lamp_function(&[(k.clone(), vec![1])])
    }

    /// The lamp support `I` of `σ`.
    pub fn lamp_support(&self) -> Subdomain {
        self.lamplighter.support()
    }

    /// Realizes `R^n S_f τ`.
    pub fn evaluate(&self, h: &HjElement) -> Result<Iet> {
        let lamps = h.f.iter().map(|(&p, &v)| (vec![p], vec![v])).collect();
        let s = self.lifted.lift(&self.lamplighter.evaluate(&WreathNormalForm { lamps, shift: vec![0] })?)?;
        let r = self.lifted.lift(&self.lamplighter.rotation_power(&[h.n])?)?;
        r.compose(&s)?.compose(&self.tau_k(&h.tau)?)
    }

    /// Decomposes an element of `H_J` as `R^n S_f τ`; fails if `h` is not
    /// of that shape.
    pub fn normal_form(&self, h: &Iet) -> Result<HjElement> {
        if **h.domain() != **self.domain() {
            return Err(Error::DomainMismatch);
        }
        let basis = self.base().basis();
        let gens = [ExactReal::one(), self.alpha.clone()];
        let bad = |what: &str| Error::NotDecomposable(what.to_string());
        let first = &h.cells()[0];
        let n = match in_q_span(&first.translation(), &gens) {
            Some(q) if q[1].is_integer() => {
                q[1].to_integer().to_i64().ok_or_else(|| bad("rotation power too large"))?
            }
            _ => return Err(bad("translation is not an integer multiple of alpha")),
        };
        // f from the copy with b = 0, a = 0
        let row = h.cells_on(self.lifted.component(0, 0));
        let value = |dst: usize| (dst % 3) as i64;
        let mut f: BTreeMap<i64, i64> = BTreeMap::new();
        for (k, cell) in row.iter().enumerate() {
            let prev = if k == 0 { &row[row.len() - 1] } else { &row[k - 1] };
            let jump = value(cell.dst) - value(prev.dst);
            if jump.rem_euclid(3) == 0 {
                continue;
            }
            let Some(q) = in_q_span(&cell.start, &gens) else {
                return Err(bad("lamp boundary off the alpha orbit"));
            };
            if q[0].is_integer() && q[1].is_integer() {
                let p = q[1].to_integer().to_i64().ok_or_else(|| bad("lamp position too large"))?;
                *f.entry(p).or_default() += jump;
            } else if !(&q[0] - Rational::new(BigInt::from(1), BigInt::from(2))).is_integer() || !q[1].is_integer() {
                return Err(bad("lamp boundary off the alpha orbit"));
            }
        }
        let f: BTreeMap<i64, u32> =
            f.into_iter().map(|(p, v)| (p, v.rem_euclid(3) as u32)).filter(|(_, v)| *v != 0).collect();
        let mut flips = Vec::new();
        for a in 0..3 {
            for cell in h.cells_on(self.lifted.component(0, a)) {
                if cell.dst / 3 == 1 {
                    flips.push(Segment { component: a, start: cell.start.clone(), end: cell.end.clone() });
                }
            }
        }
        let tau = Subdomain::normalize(self.base(), flips)?;
        let out = HjElement { n, f, tau };
        if self.evaluate(&out)? != *h {
            let _ = basis;
            return Err(bad("element is not of the form R^n S_f tau"));
        }
        Ok(out)
    }

    /// The product of normal forms computed without realizing `H_J`
    /// elements: `n = n1 + n2`, lamps of the first factor move by `-n2`,
    /// and `τ1` is pulled back by `R^{n2} S_{f2}` before adding `τ2`.
    pub fn product(&self, x: &HjElement, y: &HjElement) -> Result<HjElement> {
        let mut f: BTreeMap<i64, u32> = BTreeMap::new();
        for (&p, &v) in &x.f {
            f.insert(p - y.n, v);
        }
        for (&p, &v) in &y.f {
            let e = f.entry(p).or_insert(0);
            *e = (*e + v) % 3;
        }
        f.retain(|_, v| *v != 0);
        let lamps = y.f.iter().map(|(&p, &v)| (vec![p], vec![v])).collect();
        let s2 = self.lamplighter.evaluate(&WreathNormalForm { lamps, shift: vec![0] })?;
        let g2 = self.lamplighter.rotation_power(&[y.n])?.compose(&s2)?;
        let pulled = g2.inverse().image(&x.tau)?;
        let base = self.base();
        let tau = pulled.difference(base, &y.tau)?.union(base, &y.tau.difference(base, &pulled)?)?;
        Ok(HjElement { n: x.n + y.n, f, tau })
    }
}

/// `n` with `[σ, R^n τ_J R^-n]` nontrivial, by two independent routes.
#[derive(Clone, Debug)]
pub struct CommutationSet {
    pub n_max: usize,
    /// From canonical-form commutator tests.
    pub nontrivial: Vec<bool>,
    /// From the arithmetic predicate `nα ∈ I - J` (open arcs mod 1).
    pub predicate: Vec<bool>,
    pub mismatches: Vec<usize>,
    pub count: usize,
    pub frequency: Rational,
    /// `|I - J|`.
    pub difference_measure: ExactReal,
}

const CHUNK: usize = 256;

/// Whether `x mod 1` lies in the open arc `(start, start + len)`.
fn in_open_arc(basis: &SymbolBasis, x: &ExactReal, start: &ExactReal, len: &ExactReal) -> Result<bool> {
    let one = ExactReal::one();
    if basis.lt(&one, len)? {
        return Ok(true);
    }
    let u = basis.mod_interval(&(x - start), &one)?;
    Ok(!u.is_zero() && basis.lt(&u, len)?)
}

impl Hj {
    /// The commutation set for `0 <= n < n_max`.
    pub fn commutation_set(&self, n_max: usize) -> Result<CommutationSet> {
        if n_max == 0 {
            return Err(Error::Precondition("N must be at least 1".into()));
        }
        let basis = self.base().basis();
        let sigma = self.sigma();
        let r = self.rotation();
        let r_inv = r.inverse();
        let starts: Vec<usize> = (0..n_max).step_by(CHUNK).collect();
        let chunks: Vec<Vec<bool>> = starts
            .par_iter()
            .map(|&start| {
                let rs = r.pow(start as i64)?;
                let mut x = rs.conjugate(self.tau_j())?;
                let mut out = Vec::with_capacity(CHUNK);
                for n in start..(start + CHUNK).min(n_max) {
                    if n > start {
                        x = r.compose(&x)?.compose(&r_inv)?;
                    }
                    out.push(sigma.compose(&x)? != x.compose(sigma)?);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let nontrivial: Vec<bool> = chunks.into_iter().flatten().collect();
        let i_arcs = self.lamp_support();
        let mut arcs = Vec::new();
        for ja in self.j.arcs() {
            for ia in i_arcs.arcs() {
                arcs.push((&ia.start - &ja.end, ja.length() + ia.length()));
            }
        }
        let predicate: Vec<bool> = (0..n_max)
            .into_par_iter()
            .map(|n| {
                let x = self.alpha.scale_int(n as i64);
                for (start, len) in &arcs {
                    if in_open_arc(basis, &x, start, len)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect::<Result<_>>()?;
        let mismatches: Vec<usize> = (0..n_max).filter(|&n| nontrivial[n] != predicate[n]).collect();
        let count = nontrivial.iter().filter(|&&b| b).count();
        let circle = self.base();
        let j_on_circle: Vec<Segment> = self.j.arcs().to_vec();
        let difference_measure =
            crate::constructions::difference::difference_measure_arcs(circle, &j_on_circle, i_arcs.arcs())?;
        Ok(CommutationSet {
            n_max,
            nontrivial,
            predicate,
            mismatches,
            count,
            frequency: Rational::new(BigInt::from(count), BigInt::from(n_max)),
            difference_measure,
        })
    }
}

/// Comparison of `|J1|` and `|J2|` through the invariants of `H_J1`, `H_J2`.
#[derive(Clone, Debug)]
pub struct DistinguishReport {
    pub len1: ExactReal,
    pub len2: ExactReal,
    /// `|J_i - I|`, the density of the commutation set of `H_Ji`.
    pub invariant1: ExactReal,
    pub invariant2: ExactReal,
    pub below_half: bool,
    /// Measured commutation-set frequencies, when requested.
    pub frequency1: Option<Rational>,
    pub frequency2: Option<Rational>,
    /// Coefficients of `|J1|` in `span_Q(1, α, a2, b2)` where `J2 = [a2, b2)`;
    /// `None` is consistent with `H_J1` and `H_J2` being non-isomorphic.
    pub span: Option<Vec<Rational>>,
}

/// Computes the invariants for single arcs `J1 = [a1, b1)`, `J2 = [a2, b2)`
/// on the circle `{0} x circle`. The density `|J - I|` equals
/// `|J| + 1/2` only when `|J| < 1/2`; `below_half` records whether that holds.
pub fn distinguish_invariant(
    basis: Arc<SymbolBasis>,
    alpha: ExactReal,
    j1: (ExactReal, ExactReal),
    j2: (ExactReal, ExactReal),
    n_max: Option<usize>,
) -> Result<DistinguishReport> {
    let half = ExactReal::ratio(1, 2);
    let len1 = &j1.1 - &j1.0;
    let len2 = &j2.1 - &j2.0;
    let base = hj_base_domain(basis.clone())?;
    let support = Subdomain::from_arcs(&base, [(0, ExactReal::zero(), half.clone())])?;
    let mut invariants = Vec::new();
    let mut below_half = true;
    for (j, len) in [(&j1, &len1), (&j2, &len2)] {
        if basis.sign(len)? != std::cmp::Ordering::Greater {
            return Err(Error::Precondition("arcs must have positive length".into()));
        }
        below_half &= basis.lt(len, &half)?;
        let sub = Subdomain::from_arcs(&base, [(0, j.0.clone(), j.1.clone())])?;
        invariants.push(crate::constructions::difference::difference_set_measure(&base, &sub, &support)?);
    }
    let invariant2 = invariants.pop().expect("two arcs");
    let invariant1 = invariants.pop().expect("two arcs");
    let mut freqs = [None, None];
    if let Some(n) = n_max {
        for (slot, j) in freqs.iter_mut().zip([&j1, &j2]) {
            let sub = Subdomain::from_arcs(&base, [(0, j.0.clone(), j.1.clone())])?;
            let hj = build_hj(basis.clone(), alpha.clone(), &sub)?;
            *slot = Some(hj.commutation_set(n)?.frequency);
        }
    }
    let [frequency1, frequency2] = freqs;
    let span = in_q_span(&len1, &[ExactReal::one(), alpha.clone(), j2.0.clone(), j2.1.clone()]);
    Ok(DistinguishReport { invariant1, invariant2, below_half, len1, len2, frequency1, frequency2, span })
}

impl HjElement {
    pub fn identity() -> Self {
        HjElement { n: 0, f: BTreeMap::new(), tau: Subdomain::empty() }
    }

    pub fn is_identity(&self) -> bool {
        self.n == 0 && self.f.is_empty() && self.tau.is_empty()
    }
}
