//! Finite groups: abstract multiplication tables, explicit finite subgroups
//! of IET(D), stabilizer partitions and the orbit bounds for products of
//! commuting finite groups.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::domain::{try_sort_by, Domain, Point, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::iet::Iet;

/// A finite group as a multiplication table, `mul[a][b] = a * b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validates closure, identity, inverses and associativity.
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroupTable("table must be square with entries below its order".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::InvalidGroupTable("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroupTable(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::InvalidGroupTable(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(GroupTable { mul, identity, inverse })
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(mul).expect("cyclic table is a group")
    }

    /// Table of a group of permutations (composition `(p q)(i) = p(q(i))`),
    /// in the given element order.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self> {
        let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        if index.len() != perms.len() {
            return Err(Error::InvalidGroupTable("repeated permutation".into()));
        }
        let mut mul = Vec::with_capacity(perms.len());
        for p in perms {
            let mut row = Vec::with_capacity(perms.len());
            for q in perms {
                let pq: Vec<usize> = q.iter().map(|&i| p[i]).collect();
                row.push(*index.get(&pq).ok_or_else(|| Error::InvalidGroupTable("permutations not closed".into()))?);
            }
            mul.push(row);
        }
        GroupTable::new(mul)
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn symmetric_permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for i in 0..n {
                if !prefix.contains(&i) {
                    prefix.push(i);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Whether `sub` (a subgroup, given as element indices) is normal.
    pub fn is_normal(&self, sub: &[usize]) -> bool {
        let set: HashSet<usize> = sub.iter().copied().collect();
        (0..self.order()).all(|g| sub.iter().all(|&s| set.contains(&self.mul(self.mul(g, s), self.inv(g)))))
    }

    /// Whether `G / sub` is abelian, i.e. every commutator lies in `sub`.
    /// Meaningful for normal `sub`.
    pub fn quotient_is_abelian(&self, sub: &[usize]) -> bool {
        let set: HashSet<usize> = sub.iter().copied().collect();
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| set.contains(&self.commutator(a, b))))
    }

    /// Checks that `perms[g]` (permutations of `0..m`) is a homomorphism.
    pub fn check_action(&self, perms: &[Vec<usize>]) -> Result<()> {
        if perms.len() != self.order() {
            return Err(Error::InvalidGroupTable("action needs one permutation per element".into()));
        }
        for a in 0..self.order() {
            for b in 0..self.order() {
                let composed: Vec<usize> = perms[b].iter().map(|&i| perms[a][i]).collect();
                if composed != perms[self.mul(a, b)] {
                    return Err(Error::InvalidGroupTable(format!("action is not a homomorphism at ({a}, {b})")));
                }
            }
        }
        Ok(())
    }
}

/// An explicit finite subgroup of IET(D) with its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteIetGroup {
    domain: Arc<Domain>,
    elements: Vec<Iet>,
    table: GroupTable,
}

impl FiniteIetGroup {
    /// Verifies that `elements` (distinct) form a subgroup.
    pub fn verify(elements: Vec<Iet>) -> Result<Self> {
        let domain = elements.first().ok_or_else(|| Error::NotSubgroup("empty element list".into()))?.domain().clone();
        let index: HashMap<&Iet, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        if index.len() != elements.len() {
            return Err(Error::NotSubgroup("repeated element".into()));
        }
        if !elements.iter().any(|g| g.is_identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        let mut mul = Vec::with_capacity(elements.len());
        for a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for b in &elements {
                let ab = a.compose(b)?;
                row.push(*index.get(&ab).ok_or_else(|| Error::NotSubgroup("not closed under composition".into()))?);
            }
            mul.push(row);
        }
        for a in &elements {
            if !index.contains_key(&a.inverse()) {
                return Err(Error::NotSubgroup("not closed under inverses".into()));
            }
        }
        let table = GroupTable::new(mul).map_err(|e| Error::NotSubgroup(e.to_string()))?;
        Ok(FiniteIetGroup { domain, elements, table })
    }

    /// The group generated by `gens`, enumerated up to `limit` elements.
    pub fn generate(domain: Arc<Domain>, gens: &[Iet], limit: usize) -> Result<Self> {
        let id = Iet::identity(domain);
        let mut seen: HashSet<Iet> = HashSet::from([id.clone()]);
        let mut elements = vec![id];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = g.compose(&elements[i])?;
                if seen.insert(p.clone()) {
                    if elements.len() >= limit {
                        return Err(Error::NotSubgroup(format!("more than {limit} elements")));
                    }
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        Self::verify(elements)
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn elements(&self) -> &[Iet] {
        &self.elements
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Indices of the elements fixing `x`.
    pub fn stabilizer(&self, x: &Point) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, g) in self.elements.iter().enumerate() {
            if g.apply(x)? == *x {
                out.push(i);
            }
        }
        Ok(out)
    }
}

/// A piece of the domain on which the point stabilizer is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabPiece {
    pub region: Subdomain,
    /// Element indices of the stabilizer, ascending.
    pub stabilizer: Vec<usize>,
}

/// Splits the domain at every cell boundary of every element; each element
/// is a single translation on each resulting interval, so the stabilizer is
/// constant there. Intervals are grouped by stabilizer, in order of first
/// appearance.
pub fn stab_partition(f: &FiniteIetGroup) -> Result<Vec<StabPiece>> {
    let dom = f.domain();
    let mut groups: Vec<(Vec<usize>, Vec<Segment>)> = Vec::new();
    let mut where_: HashMap<Vec<usize>, usize> = HashMap::new();
    for c in 0..dom.len() {
        let mut cuts: Vec<ExactReal> =
            f.elements().iter().flat_map(|g| g.cells_on(c).iter().map(|cell| cell.start.clone())).collect();
        try_sort_by(&mut cuts, |a, b| dom.cmp(a, b))?;
        cuts.dedup();
        for (k, start) in cuts.iter().enumerate() {
            let end = cuts.get(k + 1).cloned().unwrap_or_else(|| dom.length(c).clone());
            let stab = f.stabilizer(&Point::new(c, start.clone()))?;
            let slot = *where_.entry(stab.clone()).or_insert_with(|| {
                groups.push((stab, Vec::new()));
                groups.len() - 1
            });
            groups[slot].1.push(Segment { component: c, start: start.clone(), end });
        }
    }
    groups
        .into_iter()
        .map(|(stabilizer, segs)| Ok(StabPiece { region: Subdomain::normalize(dom, segs)?, stabilizer }))
        .collect()
}

/// Points whose stabilizer is not normal in `F`.
pub fn nonnormal_locus(f: &FiniteIetGroup) -> Result<Subdomain> {
    let dom = f.domain();
    let mut out = Subdomain::empty();
    for piece in stab_partition(f)? {
        if !f.table().is_normal(&piece.stabilizer) {
            out = out.union(dom, &piece.region)?;
        }
    }
    Ok(out)
}

/// Points where `F / Stab(x)` is not an abelian group; points with a
/// non-normal stabilizer are included.
pub fn nonabelian_quotient_locus(f: &FiniteIetGroup) -> Result<Subdomain> {
    let dom = f.domain();
    let mut out = Subdomain::empty();
    for piece in stab_partition(f)? {
        let t = f.table();
        if !t.is_normal(&piece.stabilizer) || !t.quotient_is_abelian(&piece.stabilizer) {
            out = out.union(dom, &piece.region)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorReport {
    pub stabilizer: Vec<usize>,
    pub stabilizer_normal: bool,
    /// `F_i / S_i` abelian; only computed for a normal stabilizer.
    pub quotient_abelian: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductOrbitReport {
    pub orbit_size: usize,
    pub factors: Vec<FactorReport>,
    /// Factors whose stabilizer is not normal.
    pub nonnormal_triggers: usize,
    /// Factors with normal stabilizer and non-abelian quotient.
    pub nonabelian_triggers: usize,
    /// Whether the stabilizer of `x` in the whole product is normal in it;
    /// `None` when the orbit was too large to test.
    pub product_stabilizer_normal: Option<bool>,
    /// `max(2^nonnormal, 2^nonabelian)`, the second term only when the
    /// product stabilizer is normal.
    pub lower_bound: u128,
    pub bound_holds: bool,
}

const NORMALITY_WORK_LIMIT: usize = 400_000_000;

/// Orbit of `x` under the product of pairwise commuting finite groups,
/// checked against the lower bounds from coordinate stabilizers.
pub fn product_orbit_bound(factors: &[FiniteIetGroup], x: &Point) -> Result<ProductOrbitReport> {
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            for g in a.elements().iter().filter(|g| !g.is_identity()) {
                for h in b.elements().iter().filter(|h| !h.is_identity()) {
                    if !g.commutes_with(h)? {
                        return Err(Error::Precondition("factors do not commute".into()));
                    }
                }
            }
        }
    }
    let movers: Vec<&Iet> = factors.iter().flat_map(|f| f.elements().iter().filter(|g| !g.is_identity())).collect();
    let mut index: HashMap<Point, usize> = HashMap::from([(x.clone(), 0)]);
    let mut orbit = vec![x.clone()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &movers {
            let y = g.apply(&orbit[i])?;
            if !index.contains_key(&y) {
                index.insert(y.clone(), orbit.len());
                queue.push_back(orbit.len());
                orbit.push(y);
            }
        }
    }
    let mut reports = Vec::with_capacity(factors.len());
    for f in factors {
        let stabilizer = f.stabilizer(x)?;
        let normal = f.table().is_normal(&stabilizer);
        let quotient_abelian = normal.then(|| f.table().quotient_is_abelian(&stabilizer));
        reports.push(FactorReport { stabilizer, stabilizer_normal: normal, quotient_abelian });
    }
    let nonnormal = reports.iter().filter(|r| !r.stabilizer_normal).count();
    let nonabelian = reports.iter().filter(|r| r.quotient_abelian == Some(false)).count();
    let product_normal = if orbit.len() * orbit.len() * movers.len().max(1) <= NORMALITY_WORK_LIMIT {
        Some(stabilizer_acts_trivially(&orbit, &index, &movers)?)
    } else {
        None
    };
    let pow = |k: usize| -> Result<u128> {
        1u128.checked_shl(k as u32).filter(|_| k < 128).ok_or_else(|| Error::Precondition("too many factors".into()))
    };
    let mut lower_bound = pow(nonnormal)?;
    if product_normal == Some(true) {
        lower_bound = lower_bound.max(pow(nonabelian)?);
    }
    Ok(ProductOrbitReport {
        orbit_size: orbit.len(),
        factors: reports,
        nonnormal_triggers: nonnormal,
        nonabelian_triggers: nonabelian,
        product_stabilizer_normal: product_normal,
        lower_bound,
        bound_holds: orbit.len() as u128 >= lower_bound,
    })
}

/// The stabilizer of `orbit[0]` is normal iff it fixes the whole orbit;
/// checked on Schreier generators of the permutation action.
fn stabilizer_acts_trivially(orbit: &[Point], index: &HashMap<Point, usize>, movers: &[&Iet]) -> Result<bool> {
    let n = orbit.len();
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(movers.len());
    for g in movers {
        let mut p = Vec::with_capacity(n);
        for y in orbit {
            p.push(index[&g.apply(y)?]);
        }
        perms.push(p);
    }
    // transversal[k] maps orbit[0] to orbit[k]
    let mut transversal: Vec<Option<Vec<usize>>> = vec![None; n];
    transversal[0] = Some((0..n).collect());
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let u = transversal[k].clone().expect("visited");
        for p in &perms {
            let j = p[k];
            if transversal[j].is_none() {
                transversal[j] = Some(u.iter().map(|&i| p[i]).collect());
                queue.push_back(j);
            }
        }
    }
    let inverses: Vec<Vec<usize>> = transversal
        .iter()
        .map(|u| {
            let u = u.as_ref().expect("orbit is connected");
            let mut inv = vec![0; n];
            for (i, &v) in u.iter().enumerate() {
                inv[v] = i;
            }
            inv
        })
        .collect();
    for (k, u) in transversal.iter().enumerate() {
        let u = u.as_ref().expect("orbit is connected");
        for p in &perms {
            let j = p[k];
            // u_j^-1 p u_k fixes orbit[0]; it must fix everything
            if (0..n).any(|i| inverses[j][p[u[i]]] != i) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
