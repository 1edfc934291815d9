use std::path::Path;

use iet_core::constructions::hj::distinguish_invariant;
use iet_core::constructions::lamplighter::{verify_wreath_embedding, WitnessKind, WreathNormalForm};
use iet_core::group::birkhoff::visit_count;
use iet_core::group::stability::{finite_orbits_trivial, relative_stability, StabilityReport, Verdict};
use iet_core::scene::{
    build_generators, BirkhoffScene, DistinguishScene, GroupScene, HjScene, IetJson, LamplighterScene, ObstructionScene,
};
use iet_core::{imanishi_decompose, ClassVerdict, Decomposition, Domain, ExactReal, FinGenGroup, Iet, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::load;
use crate::report;
use crate::{Command, Config, Format};

/// Output format revision, written into every JSON result.
pub const OUTPUT_VERSION: u32 = 1;

const SAMPLE_DENOMINATOR: i64 = 1 << 20;
const VERIFY_SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Undecided,
    Capped,
    Mismatch,
    Violation,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Ok => "OK",
            Status::Undecided => "UNDECIDED",
            Status::Capped => "CAPPED",
            Status::Mismatch => "MISMATCH",
            Status::Violation => "VIOLATION",
        }
    }
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

pub struct Outcome {
    command: Command,
    status: Status,
    body: Value,
    table: Option<Table>,
}

impl Outcome {
    fn new(command: Command, status: Status, body: Value, table: Option<Table>) -> Self {
        Outcome { command, status, body, table }
    }

    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Undecided | Status::Capped | Status::Mismatch => 2,
        }
    }

    pub fn note(&self) -> Option<String> {
        (self.status != Status::Ok).then(|| format!("status: {}", self.status.label()))
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let doc = json!({
                    "version": OUTPUT_VERSION,
                    "command": command_name(self.command),
                    "status": self.status.label(),
                    "result": self.body,
                });
                let mut text = serde_json::to_string_pretty(&doc).expect("plain data");
                text.push('\n');
                Ok(text)
            }
            Format::Csv => {
                let Some(table) = &self.table else {
                    return Ok(String::new());
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.header).map_err(|e| e.to_string())?;
                for row in &table.rows {
                    w.write_record(row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
            }
        }
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Decompose => "decompose",
        Command::Growth => "growth",
        Command::Birkhoff => "birkhoff",
        Command::Lamplighter => "lamplighter",
        Command::Hj => "hj",
        Command::Distinguish => "distinguish",
        Command::Obstruction => "obstruction",
        Command::Verify => "verify",
    }
}

fn has_series(c: Command) -> bool {
    matches!(c, Command::Growth | Command::Hj | Command::Lamplighter | Command::Obstruction)
}

enum Failure {
    Input(String),
    Undecided(String),
}

impl From<iet_core::Error> for Failure {
    fn from(e: iet_core::Error) -> Self {
        if e.is_undecided() {
            Failure::Undecided(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Input(msg)
    }
}

type Run = Result<Outcome, Failure>;

/// Runs one command. `Err` is an input error; undecided comparisons become
/// an `UNDECIDED` outcome.
pub fn run(cfg: &Config) -> Result<Outcome, String> {
    if cfg.format == Format::Csv && !has_series(cfg.command) {
        return Err(format!("{} has no CSV form; use --format json", command_name(cfg.command)));
    }
    let result = match cfg.command {
        Command::Decompose => decompose(cfg),
        Command::Growth => growth(cfg),
        Command::Birkhoff => birkhoff(cfg),
        Command::Lamplighter => lamplighter(cfg),
        Command::Hj => hj(cfg),
        Command::Distinguish => distinguish(cfg),
        Command::Obstruction => obstruction(cfg),
        Command::Verify => verify(cfg),
    };
    match result {
        Ok(outcome) => Ok(outcome),
        Err(Failure::Input(msg)) => Err(msg),
        Err(Failure::Undecided(msg)) => Ok(Outcome::new(cfg.command, Status::Undecided, json!({ "error": msg }), None)),
    }
}

fn scene<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    Ok(load(path)?)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Unknown => "unknown",
    }
}

fn decomposition_json(d: &Decomposition, dom: &Domain) -> Value {
    let classes: Vec<Value> = d
        .classes
        .iter()
        .map(|c| {
            let mut v = json!({ "region": report::subdomain(&c.region, dom), "pieces": c.pieces });
            let m = v.as_object_mut().expect("object");
            match &c.verdict {
                ClassVerdict::Irreducible => {
                    m.insert("verdict".into(), "irreducible".into());
                }
                ClassVerdict::Finite { cardinality } => {
                    m.insert("verdict".into(), "finite".into());
                    m.insert("cardinality".into(), (*cardinality).into());
                }
                ClassVerdict::Undecided { reason } => {
                    m.insert("verdict".into(), "undecided".into());
                    m.insert("reason".into(), reason.clone().into());
                }
            }
            v
        })
        .collect();
    json!({
        "irreducible": d.irreducible.iter().map(|s| report::subdomain(s, dom)).collect::<Vec<_>>(),
        "finite_part": d.finite_part.iter()
            .map(|(s, k)| json!({ "region": report::subdomain(s, dom), "cardinality": k }))
            .collect::<Vec<_>>(),
        "residual": d.residual_undecided.iter().map(|s| report::subdomain(s, dom)).collect::<Vec<_>>(),
        "classes": classes,
        "cut_points": d.cut_points.iter().map(|p| report::point(p, dom)).collect::<Vec<_>>(),
        "capped_points": d.capped_points.iter().map(|p| report::point(p, dom)).collect::<Vec<_>>(),
        "finite_orbits_trivial": verdict(finite_orbits_trivial(d)),
    })
}

fn stability_json(rep: &StabilityReport, dom: &Domain) -> Value {
    let components: Vec<Value> = rep
        .components
        .iter()
        .map(|c| {
            json!({
                "region": report::subdomain(&c.region, dom),
                "preserved": verdict(c.preserved),
                "restricted_irreducible": c.restricted.irreducible.len(),
                "restricted_finite": c.restricted.finite_part.len(),
                "restricted_residual": c.restricted.residual_undecided.len(),
            })
        })
        .collect();
    json!({ "stable": verdict(rep.stable()), "components": components })
}

fn decompose(cfg: &Config) -> Run {
    let sc: GroupScene = scene(&cfg.input)?;
    let (dom, gens) = sc.build(cfg.budget_refine)?;
    let g = FinGenGroup::new(dom.clone(), gens)?;
    let (d, stability) = match &sc.subgroup {
        Some(sub) => {
            let h = build_generators(sub, &dom)?;
            let rep = relative_stability(&g, &h, cfg.cap)?;
            (rep.group.clone(), Some(rep))
        }
        None => (imanishi_decompose(&g, cfg.cap)?, None),
    };
    let mut body = decomposition_json(&d, &dom);
    let mut status = if d.is_resolved() { Status::Ok } else { Status::Undecided };
    if let Some(rep) = &stability {
        if rep.stable() == Verdict::Unknown {
            status = Status::Undecided;
        }
        body.as_object_mut().expect("object").insert("stability".into(), stability_json(rep, &dom));
    }
    Ok(Outcome::new(cfg.command, status, body, None))
}

/// `count` points drawn from the seed: a uniform component, then an offset
/// on a grid of `2^20` steps along it.
pub fn sample_points(dom: &Domain, count: usize, seed: u64) -> Result<Vec<Point>, iet_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = rng.gen_range(0..dom.len());
            let k = rng.gen_range(0..SAMPLE_DENOMINATOR);
            let u = ExactReal::ratio(k, SAMPLE_DENOMINATOR);
            let offset = dom.length(c).scale(u.as_rational().expect("rational"));
            dom.point(c, offset)
        })
        .collect()
}

fn scene_points(sc: &GroupScene, dom: &Domain, cfg: &Config) -> Result<Vec<Point>, Failure> {
    match &sc.points {
        Some(points) => Ok(points.iter().map(|p| p.build(dom)).collect::<Result<Vec<_>, _>>()?),
        None => Ok(sample_points(dom, cfg.n.unwrap_or(1), cfg.seed)?),
    }
}

fn growth(cfg: &Config) -> Run {
    let sc: GroupScene = scene(&cfg.input)?;
    let (dom, gens) = sc.build(cfg.budget_refine)?;
    let g = FinGenGroup::new(dom.clone(), gens)?;
    let depth = cfg.depth.unwrap_or(8);
    let points = scene_points(&sc, &dom, cfg)?;
    let ball = g.ball(depth, Some(cfg.cap))?;
    let mut orbits = Vec::new();
    let mut rows = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let orbit = g.orbit(x, depth, None)?;
        for r in 0..=depth {
            rows.push(vec![
                i.to_string(),
                r.to_string(),
                ball.sizes.get(r).map(|s| s.to_string()).unwrap_or_default(),
                orbit.growth[r].to_string(),
            ]);
        }
        orbits.push(json!({ "point": report::point(x, &dom), "orbit_sizes": orbit.growth }));
    }
    let status = if ball.complete { Status::Ok } else { Status::Capped };
    let body = json!({
        "depth": depth,
        "ball_sizes": ball.sizes,
        "ball_complete": ball.complete,
        "orbits": orbits,
    });
    let table = Table { header: vec!["point", "r", "ball_size", "orbit_size"], rows };
    Ok(Outcome::new(cfg.command, status, body, Some(table)))
}

fn birkhoff(cfg: &Config) -> Run {
    let n = cfg.n.unwrap_or(100_000);
    if n == 0 {
        return Err(Failure::Input("birkhoff needs --n of at least 1".into()));
    }
    let sc: BirkhoffScene = scene(&cfg.input)?;
    let (dom, t, x, e) = sc.build(cfg.budget_refine)?;
    let visits = visit_count(&t, &x, &e, n)?;
    let frequency = ExactReal::ratio(visits as i64, n as i64);
    let body = json!({
        "n": n,
        "point": report::point(&x, &dom),
        "visits": visits,
        "frequency": report::rational(frequency.as_rational().expect("rational")),
        "target": report::subdomain(&e, &dom),
        "domain_length": report::exact(&dom.total_length(), dom.basis()),
    });
    Ok(Outcome::new(cfg.command, Status::Ok, body, None))
}

fn normal_form_json(f: &WreathNormalForm) -> Value {
    let lamps: Vec<Value> = f.lamps.iter().map(|(pos, a)| json!({ "position": pos, "value": a })).collect();
    json!({ "shift": f.shift, "lamps": lamps })
}

fn lamplighter(cfg: &Config) -> Run {
    let sc: LamplighterScene = scene(&cfg.input)?;
    let ll = sc.build(cfg.budget_refine)?;
    let depth = cfg.depth.unwrap_or(6);
    let rep = verify_wreath_embedding(&ll, depth, cfg.cap)?;
    let witness = rep.witness.as_ref().map(|w| {
        json!({
            "kind": match w.kind {
                WitnessKind::Collision => "collision",
                WitnessKind::NotHomomorphic => "not_homomorphic",
            },
            "word_a": w.word_a,
            "word_b": w.word_b,
            "form_a": normal_form_json(&w.form_a),
            "form_b": normal_form_json(&w.form_b),
        })
    });
    let status = if rep.witness.is_none() && !rep.complete { Status::Capped } else { Status::Ok };
    let body = json!({
        "depth": rep.depth,
        "sphere_sizes": rep.sphere_sizes,
        "forms_checked": rep.forms_checked,
        "complete": rep.complete,
        "injective": rep.ok(),
        "witness": witness,
    });
    let rows = rep.sphere_sizes.iter().enumerate().map(|(r, s)| vec![r.to_string(), s.to_string()]).collect();
    Ok(Outcome::new(cfg.command, status, body, Some(Table { header: vec!["r", "sphere_size"], rows })))
}

fn hj(cfg: &Config) -> Run {
    let sc: HjScene = scene(&cfg.input)?;
    let h = sc.build(cfg.budget_refine)?;
    let n = cfg.n.unwrap_or(10_000);
    let set = h.commutation_set(n)?;
    let basis = h.base().basis();
    let nontrivial: Vec<usize> = set.nontrivial.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
    let status = if set.mismatches.is_empty() { Status::Ok } else { Status::Mismatch };
    let body = json!({
        "alpha": report::exact(h.alpha(), basis),
        "j": report::subdomain(h.j(), h.base()),
        "n_max": set.n_max,
        "count": set.count,
        "frequency": report::rational(&set.frequency),
        "difference_measure": report::exact(&set.difference_measure, basis),
        "mismatches": set.mismatches,
        "nontrivial": nontrivial,
    });
    let bit = |b: bool| if b { "1" } else { "0" }.to_string();
    let rows = set
        .nontrivial
        .iter()
        .zip(&set.predicate)
        .enumerate()
        .map(|(i, (a, b))| vec![i.to_string(), bit(*a), bit(*b)])
        .collect();
    Ok(Outcome::new(cfg.command, status, body, Some(Table { header: vec!["n", "nontrivial", "predicate"], rows })))
}

fn distinguish(cfg: &Config) -> Run {
    let sc: DistinguishScene = scene(&cfg.input)?;
    let input = sc.build(cfg.budget_refine)?;
    let basis = input.basis.clone();
    let rep = distinguish_invariant(input.basis, input.alpha, input.j1, input.j2, cfg.n)?;
    let body = json!({
        "len1": report::exact(&rep.len1, &basis),
        "len2": report::exact(&rep.len2, &basis),
        "invariant1": report::exact(&rep.invariant1, &basis),
        "invariant2": report::exact(&rep.invariant2, &basis),
        "below_half": rep.below_half,
        "frequency1": rep.frequency1.as_ref().map(report::rational),
        "frequency2": rep.frequency2.as_ref().map(report::rational),
        "span": rep.span.as_ref().map(|cs| cs.iter().map(report::rational).collect::<Vec<_>>()),
        "distinguished": rep.span.is_none(),
    });
    Ok(Outcome::new(cfg.command, Status::Ok, body, None))
}

fn obstruction(cfg: &Config) -> Run {
    let sc: ObstructionScene = scene(&cfg.input)?;
    let naive = sc.build(cfg.budget_refine)?;
    let depth = cfg.depth.unwrap_or(3);
    let rep = naive.search(depth)?;
    let basis = naive.domain().basis();
    let rows_json: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| json!({ "n": r.n, "overlap": report::exact(&r.overlap, basis), "noncommuting_pairs": r.noncommuting_pairs }))
        .collect();
    let body = json!({
        "abelian": rep.abelian,
        "rows": rows_json,
        "witness": rep.witness.as_ref().map(|w| json!({ "n": w.n, "g": w.g, "h": w.h })),
    });
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                basis.display(&r.overlap),
                basis.to_decimal(&r.overlap, 12),
                r.noncommuting_pairs.to_string(),
            ]
        })
        .collect();
    let header = vec!["n", "overlap", "overlap_decimal", "noncommuting_pairs"];
    Ok(Outcome::new(cfg.command, Status::Ok, body, Some(Table { header, rows })))
}

struct Checks {
    list: Vec<Value>,
    failed: bool,
}

impl Checks {
    fn record(&mut self, name: &str, subject: &str, passed: bool) {
        self.failed |= !passed;
        self.list.push(json!({ "check": name, "subject": subject, "passed": passed }));
    }
}

fn verify(cfg: &Config) -> Run {
    let sc: GroupScene = scene(&cfg.input)?;
    let (dom, gens) = sc.build(cfg.budget_refine)?;
    let n = cfg.n.unwrap_or(16);
    let depth = cfg.depth.unwrap_or(3);
    let mut checks = Checks { list: Vec::new(), failed: false };
    let mut generators = Vec::new();
    for (name, t) in &gens {
        let inv = t.inverse();
        checks.record("inverse", name, t.compose(&inv)?.is_identity() && inv.compose(t)?.is_identity());
        checks.record("canonical_round_trip", name, IetJson::from_iet(t).build(&dom)? == *t);
        let est = t.norm_estimate(n)?;
        let d: Vec<usize> = est.samples.iter().map_while(|s| s.discontinuities).collect();
        let subadditive =
            (0..d.len()).all(|i| (0..d.len()).all(|j| i + j + 1 >= d.len() || d[i + j + 1] <= d[i] + d[j]));
        checks.record("power_subadditivity", name, subadditive);
        generators.push(json!({
            "name": name,
            "discontinuities": t.discontinuities(),
            "power_discontinuities": d,
            "norm_ratio": est.limit.as_ref().map(report::rational),
        }));
    }
    let g = FinGenGroup::new(dom.clone(), gens)?;
    let ball = g.ball(depth, Some(cfg.cap))?;
    let monotone = ball.sizes.windows(2).all(|w| w[0] <= w[1]);
    let first = ball.sizes.get(1).is_none_or(|&s| s <= 1 + g.generators().len());
    checks.record("ball_sizes", "ball", ball.sizes.first() == Some(&1) && monotone && first);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points = sample_points(&dom, VERIFY_SAMPLES, cfg.seed)?;
    let elements: &[Iet] = &ball.elements;
    let mut assoc = true;
    let mut action = true;
    for p in &points {
        let pick = |rng: &mut ChaCha8Rng| &elements[rng.gen_range(0..elements.len())];
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        assoc &= a.compose(b)?.compose(c)? == a.compose(&b.compose(c)?)?;
        action &= a.compose(b)?.apply(p)? == a.apply(&b.apply(p)?)?;
    }
    checks.record("associativity", "sampled triples", assoc);
    checks.record("apply_compose", "sampled points", action);

    let status = if checks.failed {
        Status::Violation
    } else if ball.complete {
        Status::Ok
    } else {
        Status::Capped
    };
    let body = json!({
        "generators": generators,
        "ball_sizes": ball.sizes,
        "ball_complete": ball.complete,
        "samples": VERIFY_SAMPLES,
        "checks": checks.list,
        "passed": !checks.failed,
    });
    Ok(Outcome::new(cfg.command, status, body, None))
}
