//! Explicit groups of interval exchanges: lamplighters `A ≀ Z^k`, the
//! lamplighter-like groups `F_J ⋊ G`, the `H_J` family, and the naive
//! construction for non-abelian lamps.

pub mod difference;
pub mod extension;
pub mod hj;
pub mod lamplighter;
pub mod ll_like;
pub mod obstruction;

use std::sync::Arc;

use crate::domain::{Domain, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::ExactReal;

/// A finite abelian group `Z/n_1 x ... x Z/n_r`. Elements are indexed in
/// mixed radix with the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    orders: Vec<u32>,
}

impl AbelianGroup {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&n| n < 2) {
            return Err(Error::InvalidConstruction("cyclic factor orders must be at least 2".into()));
        }
        Ok(AbelianGroup { orders })
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&n| n as usize).product()
    }

    pub fn element(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.orders.len()];
        for (slot, &n) in out.iter_mut().zip(&self.orders).rev() {
            *slot = (idx % n as usize) as u32;
            idx /= n as usize;
        }
        out
    }

    pub fn index(&self, a: &[u32]) -> usize {
        a.iter().zip(&self.orders).fold(0, |acc, (&x, &n)| acc * n as usize + (x % n) as usize)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).zip(&self.orders).map(|((&x, &y), &n)| (x + y) % n).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().zip(&self.orders).map(|(&x, &n)| (n - x % n) % n).collect()
    }

    pub fn reduce(&self, a: &[i64]) -> Vec<u32> {
        a.iter().zip(&self.orders).map(|(&x, &n)| x.rem_euclid(n as i64) as u32).collect()
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn unit(&self, i: usize) -> Vec<u32> {
        let mut e = vec![0; self.orders.len()];
        e[i] = 1;
        e
    }

    pub fn label(a: &[u32]) -> String {
        a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Permutation of element indices given by adding `v`.
    pub fn translation_perm(&self, v: &[u32]) -> Vec<usize> {
        (0..self.order()).map(|i| self.index(&self.add(&self.element(i), v))).collect()
    }
}

/// Arcs of `s` on component `c` translated by `shift` (wrapping on a
/// circle).
pub(crate) fn translate_arcs(dom: &Arc<Domain>, arcs: &[Segment], shift: &ExactReal) -> Result<Subdomain> {
    Subdomain::from_arcs(dom, arcs.iter().map(|a| (a.component, &a.start + shift, &a.end + shift)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_roundtrip() {
        let a = AbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(a.order(), 6);
        for i in 0..6 {
            assert_eq!(a.index(&a.element(i)), i);
        }
        assert_eq!(a.element(5), vec![1, 2]);
        assert_eq!(a.add(&[1, 2], &[1, 2]), vec![0, 1]);
        assert_eq!(a.neg(&[1, 1]), vec![1, 2]);
        assert!(AbelianGroup::new(vec![1]).is_err());
    }
}
