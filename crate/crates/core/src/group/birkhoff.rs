//! Visit frequencies of orbits in a target subdomain.

use num_bigint::BigInt;

use crate::domain::{Point, Subdomain};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::iet::Iet;

/// Number of `0 <= i < n` with `T^i(x)` in `e`.
pub fn visit_count(t: &Iet, x: &Point, e: &Subdomain, n: usize) -> Result<usize> {
    let dom = t.domain();
    let mut p = dom.point(x.component, x.offset.clone())?;
    let mut hits = 0;
    for i in 0..n {
        if e.contains(dom, &p)? {
            hits += 1;
        }
        if i + 1 < n {
            p = t.apply(&p)?;
        }
    }
    Ok(hits)
}

/// Exact frequency `#{0 <= i < n : T^i(x) in E} / n`.
pub fn birkhoff_frequency(t: &Iet, x: &Point, e: &Subdomain, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let hits = visit_count(t, x, e, n)?;
    Ok(Rational::new(BigInt::from(hits), BigInt::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::exact::{ExactReal, Symbol, SymbolBasis};
    use num_traits::{One, Zero};
    use std::sync::Arc;

    #[test]
    fn trivial_targets() {
        let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
        let a = basis.var("alpha").unwrap();
        let dom = Domain::unit_circles(basis, ["c"]).unwrap();
        let r = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let x = Point::new(0, ExactReal::zero());
        assert!(birkhoff_frequency(&r, &x, &Subdomain::whole(&dom), 50).unwrap().is_one());
        assert!(birkhoff_frequency(&r, &x, &Subdomain::empty(), 50).unwrap().is_zero());
        assert!(birkhoff_frequency(&r, &x, &Subdomain::empty(), 0).is_err());
    }

    #[test]
    fn short_rotation_count_matches_hand_count() {
        let basis = Arc::new(SymbolBasis::new(vec![Symbol::sqrt2_minus_1("alpha")], true).unwrap());
        let a = basis.var("alpha").unwrap();
        let dom = Domain::unit_circles(basis, ["c"]).unwrap();
        let r = Iet::rotation(dom.clone(), 0, &a).unwrap();
        let e = Subdomain::from_arcs(&dom, [(0, ExactReal::zero(), ExactReal::ratio(3, 10))]).unwrap();
        // k * 0.41421 mod 1 for k = 0..10: 0, .414, .828, .243, .657, .071, .485, .899, .314, .728
        let hits = visit_count(&r, &Point::new(0, ExactReal::zero()), &e, 10).unwrap();
        assert_eq!(hits, 3);
    }
}
