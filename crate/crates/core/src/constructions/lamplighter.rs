//! `A ≀ Z^k` inside IET(A x circle): lamps `σ_{a,J}` add `a` to the fiber
//! coordinate over `J`, and `k` synchronized rotations by independent
//! angles shift the lamp positions.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::constructions::{translate_arcs, AbelianGroup};
use crate::domain::{try_sort_by, Component, Domain, Segment, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{in_q_span, ExactReal, SymbolBasis};
use crate::group::FinGenGroup;
use crate::iet::{FiberStep, Iet};

#[derive(Clone, Debug)]
pub struct LampSpec {
    pub lamps: AbelianGroup,
    /// One angle per `Z` factor.
    pub angles: Vec<ExactReal>,
    /// The support `J` as arcs `[start, end)` of the circle (wrapping
    /// allowed).
    pub support: Vec<(ExactReal, ExactReal)>,
}

impl LampSpec {
    /// `A = Z/n`, one angle, `J = [0, 1/2)`.
    pub fn cyclic(n: u32, angle: ExactReal) -> Result<Self> {
        Ok(LampSpec {
            lamps: AbelianGroup::cyclic(n)?,
            angles: vec![angle],
            support: vec![(ExactReal::zero(), ExactReal::ratio(1, 2))],
        })
    }

    pub fn rank(&self) -> usize {
        self.angles.len()
    }
}

/// An element `(f, k)` of `A ≀ Z^k`: lamp configuration `f: Z^k -> A`
/// (zero values not stored) and shift `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathNormalForm {
    pub lamps: BTreeMap<Vec<i64>, Vec<u32>>,
    pub shift: Vec<i64>,
}

impl WreathNormalForm {
    pub fn identity(rank: usize) -> Self {
        WreathNormalForm { lamps: BTreeMap::new(), shift: vec![0; rank] }
    }

    pub fn lamp(rank: usize, position: Vec<i64>, a: Vec<u32>) -> Self {
        let mut lamps = BTreeMap::new();
        if !AbelianGroup::is_zero(&a) {
            lamps.insert(position, a);
        }
        WreathNormalForm { lamps, shift: vec![0; rank] }
    }

    pub fn translation(shift: Vec<i64>) -> Self {
        WreathNormalForm { lamps: BTreeMap::new(), shift }
    }

    pub fn is_identity(&self) -> bool {
        self.lamps.is_empty() && self.shift.iter().all(|&s| s == 0)
    }

    /// `(f, k)(f', k') = (f + f'(. - k), k + k')`.
    pub fn mul(&self, other: &Self, group: &AbelianGroup) -> Self {
        let mut lamps = self.lamps.clone();
        for (pos, a) in &other.lamps {
            let moved: Vec<i64> = pos.iter().zip(&self.shift).map(|(p, k)| p + k).collect();
            let sum = match lamps.get(&moved) {
                Some(b) => group.add(b, a),
                None => a.clone(),
            };
            if AbelianGroup::is_zero(&sum) {
                lamps.remove(&moved);
            } else {
                lamps.insert(moved, sum);
            }
        }
        let shift = self.shift.iter().zip(&other.shift).map(|(a, b)| a + b).collect();
        WreathNormalForm { lamps, shift }
    }

    pub fn inverse(&self, group: &AbelianGroup) -> Self {
        let shift: Vec<i64> = self.shift.iter().map(|s| -s).collect();
        let lamps = self
            .lamps
            .iter()
            .map(|(pos, a)| (pos.iter().zip(&shift).map(|(p, k)| p + k).collect(), group.neg(a)))
            .collect();
        WreathNormalForm { lamps, shift }
    }
}

#[derive(Clone, Debug)]
pub struct Lamplighter {
    spec: LampSpec,
    domain: Arc<Domain>,
    support: Vec<Segment>,
    group: FinGenGroup,
}

fn check_independent(basis: &SymbolBasis, angles: &[ExactReal]) -> Result<()> {
    if !basis.is_independent() {
        return Err(Error::InvalidConstruction("the symbol basis is not declared rationally independent".into()));
    }
    let mut span = vec![ExactReal::one()];
    for a in angles {
        if in_q_span(a, &span).is_some() {
            return Err(Error::InvalidConstruction(format!(
                "angle {} is rationally dependent on 1 and the previous angles",
                basis.display(a)
            )));
        }
        span.push(a.clone());
    }
    Ok(())
}

/// Builds the lamplighter group, checking that the angles are rationally
/// independent together with 1.
pub fn build_lamplighter(basis: Arc<SymbolBasis>, spec: LampSpec) -> Result<Lamplighter> {
    check_independent(&basis, &spec.angles)?;
    build_lamplighter_unchecked(basis, spec)
}

/// Same construction without the independence check, for control runs
/// with rational angles.
pub fn build_lamplighter_unchecked(basis: Arc<SymbolBasis>, spec: LampSpec) -> Result<Lamplighter> {
    if spec.angles.is_empty() {
        return Err(Error::InvalidConstruction("at least one rotation angle is needed".into()));
    }
    let a = &spec.lamps;
    let comps =
        (0..a.order()).map(|i| Component::circle(AbelianGroup::label(&a.element(i)), ExactReal::one())).collect();
    let domain = Domain::new(basis, comps)?;
    let support = Subdomain::from_arcs(&domain, spec.support.iter().map(|(s, e)| (0, s.clone(), e.clone())))?;
    if support.is_empty() {
        return Err(Error::InvalidConstruction("lamp support is empty".into()));
    }
    let mut ll = Lamplighter {
        spec,
        domain: domain.clone(),
        support: support.arcs().to_vec(),
        group: FinGenGroup::new(domain.clone(), [])?,
    };
    let mut gens = Vec::new();
    let single = |base: &str, i: usize, n: usize| if n == 1 { base.to_string() } else { format!("{base}{}", i + 1) };
    for i in 0..ll.spec.lamps.rank() {
        let e = ll.spec.lamps.unit(i);
        gens.push((single("sigma", i, ll.spec.lamps.rank()), ll.lamp(&e, &vec![0; ll.spec.rank()])?));
    }
    for j in 0..ll.spec.rank() {
        let mut e = vec![0; ll.spec.rank()];
        e[j] = 1;
        gens.push((single("R", j, ll.spec.rank()), ll.rotation_power(&e)?));
    }
    ll.group = FinGenGroup::new(domain, gens)?;
    Ok(ll)
}

impl Lamplighter {
    pub fn spec(&self) -> &LampSpec {
        &self.spec
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn group(&self) -> &FinGenGroup {
        &self.group
    }

    /// `J` as a subdomain of the circle labelled by the zero lamp.
    pub fn support(&self) -> Subdomain {
        Subdomain::from_arcs(&self.domain, self.support.iter().map(|a| (a.component, a.start.clone(), a.end.clone())))
            .expect("support arcs are valid")
    }

    fn offset(&self, position: &[i64]) -> ExactReal {
        self.spec.angles.iter().zip(position).fold(ExactReal::zero(), |acc, (a, &p)| acc + a.scale_int(p))
    }

    /// `R^shift`, the synchronized rotation by `sum shift_j * angle_j`.
    pub fn rotation_power(&self, shift: &[i64]) -> Result<Iet> {
        Iet::synchronized_rotation(self.domain.clone(), &self.offset(shift))
    }

    /// `J` moved to lamp position `p`, i.e. `R^p(J)`, as arcs on the circle.
    pub fn support_at(&self, position: &[i64]) -> Result<Vec<Segment>> {
        Ok(translate_arcs(&self.domain, &self.support, &self.offset(position))?.arcs().to_vec())
    }

    /// The map adding, at base point `x`, the sum of the values of all
    /// `(arcs, value)` pairs whose arcs contain `x`.
    pub fn step_map(&self, lamps: &[(Vec<Segment>, Vec<u32>)]) -> Result<Iet> {
        let dom = &self.domain;
        let a = &self.spec.lamps;
        let mut cuts: Vec<ExactReal> = vec![ExactReal::zero()];
        for (arcs, _) in lamps {
            for s in arcs {
                cuts.push(s.start.clone());
                if s.end != *dom.length(0) {
                    cuts.push(s.end.clone());
                }
            }
        }
        try_sort_by(&mut cuts, |x, y| dom.cmp(x, y))?;
        cuts.dedup();
        let mut steps = Vec::new();
        for (k, start) in cuts.iter().enumerate() {
            let end = cuts.get(k + 1).cloned().unwrap_or_else(ExactReal::one);
            let mut value = vec![0; a.rank()];
            for (arcs, v) in lamps {
                for s in arcs {
                    if dom.le(&s.start, start)? && dom.lt(start, &s.end)? {
                        value = a.add(&value, v);
                    }
                }
            }
            if !AbelianGroup::is_zero(&value) {
                steps.push(FiberStep { start: start.clone(), end, perm: a.translation_perm(&value) });
            }
        }
        Iet::fiberwise(dom.clone(), steps)
    }

    /// `σ_{a, R^p J}`.
    pub fn lamp(&self, a: &[u32], position: &[i64]) -> Result<Iet> {
        self.step_map(&[(self.support_at(position)?, a.to_vec())])
    }

    /// Realizes `(f, k)` as `prod_p σ_{f(p), R^p J} ∘ R^k`.
    pub fn evaluate(&self, nf: &WreathNormalForm) -> Result<Iet> {
        let lamps =
            nf.lamps.iter().map(|(pos, a)| Ok((self.support_at(pos)?, a.clone()))).collect::<Result<Vec<_>>>()?;
        let step = self.step_map(&lamps)?;
        if nf.shift.iter().all(|&s| s == 0) {
            Ok(step)
        } else {
            step.compose(&self.rotation_power(&nf.shift)?)
        }
    }

    /// Abstract generators matching the group's generating set.
    pub fn abstract_generators(&self) -> Vec<(String, WreathNormalForm)> {
        let k = self.spec.rank();
        let a = &self.spec.lamps;
        let mut out: Vec<(String, WreathNormalForm)> = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |name: String, nf: WreathNormalForm| {
            if !nf.is_identity() && seen.insert(nf.clone()) {
                out.push((name, nf));
            }
        };
        let name = |base: &str, i: usize, n: usize| if n == 1 { base.to_string() } else { format!("{base}{}", i + 1) };
        let mut inverses = Vec::new();
        for i in 0..a.rank() {
            let e = a.unit(i);
            push(name("sigma", i, a.rank()), WreathNormalForm::lamp(k, vec![0; k], e.clone()));
            inverses
                .push((format!("{}^-1", name("sigma", i, a.rank())), WreathNormalForm::lamp(k, vec![0; k], a.neg(&e))));
        }
        for j in 0..k {
            let mut e = vec![0; k];
            e[j] = 1;
            push(name("R", j, k), WreathNormalForm::translation(e.clone()));
            inverses.push((
                format!("{}^-1", name("R", j, k)),
                WreathNormalForm::translation(e.iter().map(|x| -x).collect()),
            ));
        }
        for (n, nf) in inverses {
            push(n, nf);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// Two distinct normal forms realize the same transformation.
    Collision,
    /// Composing generators disagrees with the evaluator.
    NotHomomorphic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub kind: WitnessKind,
    /// Words as generator names, leftmost applied last.
    pub word_a: Vec<String>,
    pub word_b: Vec<String>,
    pub form_a: WreathNormalForm,
    pub form_b: WreathNormalForm,
}

#[derive(Clone, Debug)]
pub struct WreathReport {
    pub depth: usize,
    /// `sphere_sizes[r]` counts normal forms of word length exactly `r`.
    pub sphere_sizes: Vec<usize>,
    pub forms_checked: usize,
    /// False when the enumeration stopped at the form budget.
    pub complete: bool,
    pub witness: Option<EmbeddingWitness>,
}

impl WreathReport {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

fn word(parents: &[Option<(usize, usize)>], names: &[String], mut i: usize) -> Vec<String> {
    let mut out = Vec::new();
    while let Some((p, g)) = parents[i] {
        out.push(names[g].clone());
        i = p;
    }
    out
}

/// Enumerates the ball of radius `depth` of the abstract wreath product by
/// normal forms and checks that realization is injective and agrees with
/// composing generator transformations along every word.
pub fn verify_wreath_embedding(ll: &Lamplighter, depth: usize, max_forms: usize) -> Result<WreathReport> {
    let a = &ll.spec.lamps;
    let gens = ll.abstract_generators();
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let gen_iets = gens.iter().map(|(_, nf)| ll.evaluate(nf)).collect::<Result<Vec<_>>>()?;
    for (name, iet) in names.iter().zip(&gen_iets) {
        if ll.group.generator(name) != Some(iet) {
            return Err(Error::InvalidConstruction(format!("generator `{name}` does not match its normal form")));
        }
    }
    let id = WreathNormalForm::identity(ll.spec.rank());
    let mut forms = vec![id.clone()];
    let mut iets = vec![Iet::identity(ll.domain.clone())];
    let mut parents: Vec<Option<(usize, usize)>> = vec![None];
    let mut index: HashMap<WreathNormalForm, usize> = HashMap::from([(id, 0)]);
    let mut by_iet: HashMap<Iet, usize> = HashMap::from([(iets[0].clone(), 0)]);
    let mut sphere_sizes = vec![1];
    let mut frontier = 0..1;
    let mut complete = true;
    'layers: for _ in 0..depth {
        let mut candidates: Vec<(WreathNormalForm, usize, usize)> = Vec::new();
        let mut fresh: HashSet<WreathNormalForm> = HashSet::new();
        for w in frontier.clone() {
            for (g, (_, gnf)) in gens.iter().enumerate() {
                let nf = gnf.mul(&forms[w], a);
                if !index.contains_key(&nf) && fresh.insert(nf.clone()) {
                    candidates.push((nf, w, g));
                }
            }
        }
        let realized: Vec<(Iet, Iet)> = candidates
            .par_iter()
            .map(|(nf, w, g)| Ok((ll.evaluate(nf)?, gen_iets[*g].compose(&iets[*w])?)))
            .collect::<Result<_>>()?;
        let start = forms.len();
        for ((nf, w, g), (direct, composed)) in candidates.into_iter().zip(realized) {
            if forms.len() >= max_forms {
                complete = false;
                break 'layers;
            }
            let i = forms.len();
            forms.push(nf);
            parents.push(Some((w, g)));
            index.insert(forms[i].clone(), i);
            if direct != composed {
                let witness = EmbeddingWitness {
                    kind: WitnessKind::NotHomomorphic,
                    word_a: word(&parents, &names, i),
                    word_b: word(&parents, &names, i),
                    form_a: forms[i].clone(),
                    form_b: forms[i].clone(),
                };
                sphere_sizes.push(forms.len() - start);
                return Ok(WreathReport {
                    depth,
                    sphere_sizes,
                    forms_checked: forms.len(),
                    complete,
                    witness: Some(witness),
                });
            }
            if let Some(&j) = by_iet.get(&direct) {
                let witness = EmbeddingWitness {
                    kind: WitnessKind::Collision,
                    word_a: word(&parents, &names, j),
                    word_b: word(&parents, &names, i),
                    form_a: forms[j].clone(),
                    form_b: forms[i].clone(),
                };
                sphere_sizes.push(forms.len() - start);
                return Ok(WreathReport {
                    depth,
                    sphere_sizes,
                    forms_checked: forms.len(),
                    complete,
                    witness: Some(witness),
                });
            }
            by_iet.insert(direct.clone(), i);
            iets.push(direct);
        }
        sphere_sizes.push(forms.len() - start);
        frontier = start..forms.len();
    }
    if !complete {
        sphere_sizes.push(forms.len() - frontier.end);
    }
    Ok(WreathReport { depth, sphere_sizes, forms_checked: forms.len(), complete, witness: None })
}
