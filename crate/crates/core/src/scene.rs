//! JSON scene files: symbol bases, domains, interval exchanges and
//! construction specs. Rationals are strings `"p/q"`; an exact real is
//! either such a string or `{"unit": "p/q", "syms": {"alpha": "p/q"}}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::constructions::hj::{build_hj, hj_base_domain, Hj};
use crate::constructions::lamplighter::{build_lamplighter, build_lamplighter_unchecked, LampSpec, Lamplighter};
use crate::constructions::obstruction::{build_naive_lamplighter, NaiveLamplighter};
use crate::constructions::AbelianGroup;
use crate::domain::{Component, Domain, Point, Subdomain};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, ExactReal, Rational, Refiner, Symbol, SymbolBasis};
use crate::group::finite::GroupTable;
use crate::iet::{Cell, Iet};

pub const SCENE_VERSION: u32 = 1;

/// Named generators, in scene order.
pub type Generators = Vec<(String, Iet)>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ExactJson {
    Rational(String),
    Combination {
        #[serde(default)]
        unit: Option<String>,
        #[serde(default)]
        syms: BTreeMap<String, String>,
    },
}

impl ExactJson {
    pub fn to_exact(&self, basis: &SymbolBasis) -> Result<ExactReal> {
        match self {
            ExactJson::Rational(s) => Ok(ExactReal::from(parse_rational(s)?)),
            ExactJson::Combination { unit, syms } => {
                let unit = unit.as_deref().map(parse_rational).transpose()?.unwrap_or_default();
                let syms = syms
                    .iter()
                    .map(|(name, q)| {
                        let id = basis.symbol_id(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                        Ok((id, parse_rational(q)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ExactReal::from_parts(unit, syms))
            }
        }
    }

    /// Always the object form, with every coefficient spelled out.
    pub fn from_exact(x: &ExactReal, basis: &SymbolBasis) -> Self {
        ExactJson::Combination {
            unit: Some(format_rational(x.unit())),
            syms: x.sym_coeffs().map(|(id, q)| (basis.symbol(id).name.clone(), format_rational(q))).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinerJson {
    pub kind: String,
    pub terms: Vec<i64>,
    #[serde(default)]
    pub repeat: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub name: String,
    pub lo: String,
    pub hi: String,
    pub refiner: RefinerJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    #[serde(default)]
    pub symbols: Vec<SymbolJson>,
    /// Assertion that `{1, symbols...}` is rationally independent.
    pub independent: bool,
}

impl BasisJson {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<Arc<SymbolBasis>> {
        let symbols = self
            .symbols
            .iter()
            .map(|s| {
                if s.refiner.kind != "continued_fraction" {
                    return Err(Error::InvalidBasis(format!("unknown refiner kind `{}`", s.refiner.kind)));
                }
                let refiner = Refiner::ContinuedFraction {
                    terms: s.refiner.terms.iter().map(|&t| BigInt::from(t)).collect(),
                    repeat: s.refiner.repeat,
                };
                Ok(Symbol::new(s.name.clone(), parse_rational(&s.lo)?, parse_rational(&s.hi)?, refiner))
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = match max_refinements {
            Some(b) => SymbolBasis::with_budget(symbols, self.independent, b)?,
            None => SymbolBasis::new(symbols, self.independent)?,
        };
        Ok(Arc::new(basis))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Circle,
    Interval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub label: String,
    pub kind: KindJson,
    pub length: ExactJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub components: Vec<ComponentJson>,
}

impl DomainJson {
    pub fn build(&self, basis: Arc<SymbolBasis>) -> Result<Arc<Domain>> {
        let comps = self
            .components
            .iter()
            .map(|c| {
                let len = c.length.to_exact(&basis)?;
                Ok(match c.kind {
                    KindJson::Circle => Component::circle(c.label.clone(), len),
                    KindJson::Interval => Component::interval(c.label.clone(), len),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Domain::new(basis, comps)
    }

    pub fn from_domain(dom: &Domain) -> Self {
        DomainJson {
            components: dom
                .components()
                .iter()
                .map(|c| ComponentJson {
                    label: c.label.clone(),
                    kind: if c.is_circle() { KindJson::Circle } else { KindJson::Interval },
                    length: ExactJson::from_exact(&c.length, dom.basis()),
                })
                .collect(),
        }
    }
}

fn component_index(dom: &Domain, label: &str) -> Result<usize> {
    dom.index_of(label).ok_or_else(|| Error::InvalidDomain(format!("no component labelled `{label}`")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellJson {
    pub src_c: String,
    pub src_start: ExactJson,
    pub src_end: ExactJson,
    pub dst_c: String,
    pub dst_start: ExactJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationJson {
    pub c: String,
    pub angle: ExactJson,
}

/// An interval exchange: explicit cells or one of the builders. Exactly
/// one field must be present.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IetJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationJson>,
    /// Rotates every component by the same angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synchronized_rotation: Option<ExactJson>,
    /// Target label of each component, in domain order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<bool>,
}

impl IetJson {
    pub fn build(&self, dom: &Arc<Domain>) -> Result<Iet> {
        let basis = dom.basis();
        let given = [
            self.cells.is_some(),
            self.rotation.is_some(),
            self.synchronized_rotation.is_some(),
            self.permutation.is_some(),
            self.identity.is_some(),
        ];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::InvalidIet(
                "give exactly one of cells, rotation, synchronized_rotation, permutation, identity".into(),
            ));
        }
        if let Some(cells) = &self.cells {
            let cells = cells
                .iter()
                .map(|c| {
                    Ok(Cell {
                        src: component_index(dom, &c.src_c)?,
                        start: c.src_start.to_exact(basis)?,
                        end: c.src_end.to_exact(basis)?,
                        dst: component_index(dom, &c.dst_c)?,
                        dst_start: c.dst_start.to_exact(basis)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Iet::from_cells(dom.clone(), cells);
        }
        if let Some(r) = &self.rotation {
            return Iet::rotation(dom.clone(), component_index(dom, &r.c)?, &r.angle.to_exact(basis)?);
        }
        if let Some(angle) = &self.synchronized_rotation {
            return Iet::synchronized_rotation(dom.clone(), &angle.to_exact(basis)?);
        }
        if let Some(p) = &self.permutation {
            let perm = p.iter().map(|l| component_index(dom, l)).collect::<Result<Vec<_>>>()?;
            return Iet::permutation(dom.clone(), &perm);
        }
        Ok(Iet::identity(dom.clone()))
    }

    pub fn from_iet(t: &Iet) -> Self {
        let dom = t.domain();
        let basis = dom.basis();
        IetJson {
            cells: Some(
                t.cells()
                    .iter()
                    .map(|c| CellJson {
                        src_c: dom.component(c.src).label.clone(),
                        src_start: ExactJson::from_exact(&c.start, basis),
                        src_end: ExactJson::from_exact(&c.end, basis),
                        dst_c: dom.component(c.dst).label.clone(),
                        dst_start: ExactJson::from_exact(&c.dst_start, basis),
                    })
                    .collect(),
            ),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub name: String,
    pub iet: IetJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub c: String,
    pub offset: ExactJson,
}

impl PointJson {
    pub fn build(&self, dom: &Domain) -> Result<Point> {
        dom.point(component_index(dom, &self.c)?, self.offset.to_exact(dom.basis())?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcJson {
    pub c: String,
    pub start: ExactJson,
    pub end: ExactJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdomainJson {
    pub arcs: Vec<ArcJson>,
}

impl SubdomainJson {
    pub fn build(&self, dom: &Domain) -> Result<Subdomain> {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Ok((component_index(dom, &a.c)?, a.start.to_exact(dom.basis())?, a.end.to_exact(dom.basis())?)))
            .collect::<Result<Vec<_>>>()?;
        Subdomain::from_arcs(dom, arcs)
    }

    pub fn from_subdomain(s: &Subdomain, dom: &Domain) -> Self {
        SubdomainJson {
            arcs: s
                .arcs()
                .iter()
                .map(|a| ArcJson {
                    c: dom.component(a.component).label.clone(),
                    start: ExactJson::from_exact(&a.start, dom.basis()),
                    end: ExactJson::from_exact(&a.end, dom.basis()),
                })
                .collect(),
        }
    }
}

/// An arc `[start, end)` on the construction's designated circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanJson {
    pub start: ExactJson,
    pub end: ExactJson,
}

impl SpanJson {
    pub fn build(&self, basis: &SymbolBasis) -> Result<(ExactReal, ExactReal)> {
        Ok((self.start.to_exact(basis)?, self.end.to_exact(basis)?))
    }
}

/// Basis, domain and generators; the input of `decompose`, `growth` and
/// `verify`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupScene {
    pub version: u32,
    pub basis: BasisJson,
    pub domain: DomainJson,
    pub generators: Vec<GeneratorJson>,
    /// Generators of a subgroup to test stability against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<GeneratorJson>>,
    /// Points for orbit growth; sampled from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirkhoffScene {
    pub version: u32,
    pub basis: BasisJson,
    pub domain: DomainJson,
    pub map: IetJson,
    pub point: PointJson,
    pub target: SubdomainJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LamplighterScene {
    pub version: u32,
    pub basis: BasisJson,
    /// Cyclic factor orders of the lamp group `A`.
    pub lamps: Vec<u32>,
    pub angles: Vec<ExactJson>,
    /// Lamp support on the base circle; `[0, 1/2)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SpanJson>>,
    /// Skip the independence check (for control runs with rational angles).
    #[serde(default)]
    pub unchecked: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjScene {
    pub version: u32,
    pub basis: BasisJson,
    pub alpha: ExactJson,
    /// `J`, as arcs on the circle labelled `0`.
    pub j: Vec<SpanJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistinguishScene {
    pub version: u32,
    pub basis: BasisJson,
    pub alpha: ExactJson,
    pub j1: SpanJson,
    pub j2: SpanJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructionScene {
    pub version: u32,
    pub basis: BasisJson,
    /// Multiplication table; derived from `action` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    /// Permutation of the circles for each group element.
    pub action: Vec<Vec<usize>>,
    pub angle: ExactJson,
    pub support: Vec<SpanJson>,
}

/// Rejects scenes written for a different format version.
pub fn check_version(version: u32) -> Result<()> {
    if version != SCENE_VERSION {
        return Err(Error::Precondition(format!(
            "scene version {version} is not supported (expected {SCENE_VERSION})"
        )));
    }
    Ok(())
}

impl GroupScene {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<(Arc<Domain>, Generators)> {
        check_version(self.version)?;
        let basis = self.basis.build(max_refinements)?;
        let dom = self.domain.build(basis)?;
        let gens = build_generators(&self.generators, &dom)?;
        Ok((dom, gens))
    }
}

impl BirkhoffScene {
    /// Domain, map, start point and target set.
    pub fn build(&self, max_refinements: Option<usize>) -> Result<(Arc<Domain>, Iet, Point, Subdomain)> {
        check_version(self.version)?;
        let dom = self.domain.build(self.basis.build(max_refinements)?)?;
        let map = self.map.build(&dom)?;
        let point = self.point.build(&dom)?;
        let target = self.target.build(&dom)?;
        Ok((dom, map, point, target))
    }
}

impl LamplighterScene {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<Lamplighter> {
        check_version(self.version)?;
        let basis = self.basis.build(max_refinements)?;
        let angles = self.angles.iter().map(|a| a.to_exact(&basis)).collect::<Result<Vec<_>>>()?;
        let support = match &self.support {
            Some(spans) => spans.iter().map(|s| s.build(&basis)).collect::<Result<Vec<_>>>()?,
            None => vec![(ExactReal::zero(), ExactReal::ratio(1, 2))],
        };
        let spec = LampSpec { lamps: AbelianGroup::new(self.lamps.clone())?, angles, support };
        if self.unchecked {
            build_lamplighter_unchecked(basis, spec)
        } else {
            build_lamplighter(basis, spec)
        }
    }
}

impl HjScene {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<Hj> {
        check_version(self.version)?;
        let basis = self.basis.build(max_refinements)?;
        let alpha = self.alpha.to_exact(&basis)?;
        let base = hj_base_domain(basis.clone())?;
        let arcs = self
            .j
            .iter()
            .map(|s| Ok((0, s.start.to_exact(&basis)?, s.end.to_exact(&basis)?)))
            .collect::<Result<Vec<_>>>()?;
        let j = Subdomain::from_arcs(&base, arcs)?;
        build_hj(basis, alpha, &j)
    }
}

/// The inputs of `distinguish_invariant`.
pub struct DistinguishInput {
    pub basis: Arc<SymbolBasis>,
    pub alpha: ExactReal,
    pub j1: (ExactReal, ExactReal),
    pub j2: (ExactReal, ExactReal),
}

impl DistinguishScene {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<DistinguishInput> {
        check_version(self.version)?;
        let basis = self.basis.build(max_refinements)?;
        Ok(DistinguishInput {
            alpha: self.alpha.to_exact(&basis)?,
            j1: self.j1.build(&basis)?,
            j2: self.j2.build(&basis)?,
            basis,
        })
    }
}

impl ObstructionScene {
    pub fn build(&self, max_refinements: Option<usize>) -> Result<NaiveLamplighter> {
        check_version(self.version)?;
        let basis = self.basis.build(max_refinements)?;
        let table = match &self.table {
            Some(t) => GroupTable::new(t.clone())?,
            None => GroupTable::from_permutations(&self.action)?,
        };
        let angle = self.angle.to_exact(&basis)?;
        let support = self.support.iter().map(|s| s.build(&basis)).collect::<Result<Vec<_>>>()?;
        build_naive_lamplighter(basis, table, &self.action, &angle, &support)
    }
}

pub fn build_generators(gens: &[GeneratorJson], dom: &Arc<Domain>) -> Result<Generators> {
    gens.iter().map(|g| Ok((g.name.clone(), g.iet.build(dom)?))).collect()
}

/// `"p/q"` for a rational.
pub fn rational_json(q: &Rational) -> String {
    format_rational(q)
}
