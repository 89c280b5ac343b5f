//! Synthetic problem generation: staged random construction scripts,
//! saturation, filtering and one traced record per surviving conclusion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::{apply_clause, clause_for};
use crate::catalog::{Catalog, Category, ConstructionDef};
use crate::engine::replay::check_record;
use crate::engine::{Budget, Clock, Engine, EngineConfig, RuleSet, Source};
use crate::figure::Figure;
use crate::filter::{dedupe, judge, FilterReport, Reason};
use crate::lang::{Construction, Record};
use crate::numeric::Tolerances;
use crate::statement::{Predicate, Statement};
use crate::traceback::{build_record, ProblemScope};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig {
    /// Number of free points added after the base shape.
    pub free_points: RangeInclusive<usize>,
    /// Number of stage-three steps.
    pub steps: RangeInclusive<usize>,
    /// Probability that a stage-three step is an intersection pair rather
    /// than one determined construction.
    pub p_intersect_pair: f64,
    /// Draws tried per step before the seed is abandoned.
    pub step_retries: usize,
    pub budget: Budget,
    /// Records kept per figure, in fact order.
    pub max_records: usize,
    pub tol: Tolerances,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            free_points: 0..=2,
            steps: 2..=5,
            p_intersect_pair: 0.5,
            step_retries: 64,
            budget: Budget {
                max_rounds: 16,
                max_facts: 20_000,
                max_millis: u64::MAX,
            },
            max_records: 16,
            tol: Tolerances::default(),
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let ok = (0.0..=1.0).contains(&self.p_intersect_pair)
            && !self.free_points.is_empty()
            && !self.steps.is_empty()
            && self.step_retries > 0;
        if ok {
            Ok(())
        } else {
            Err(GenError::BadConfig)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenError {
    BadConfig,
    /// A category the sampler needs has no construction.
    EmptyCategory(Category),
    /// Every draw for one stage failed; the stage is 1, 2 or 3.
    SamplingStuck {
        stage: u8,
    },
    Engine,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::BadConfig => f.write_str("invalid sampling configuration"),
            GenError::EmptyCategory(c) => write!(f, "catalog has no {c} construction"),
            GenError::SamplingStuck { stage } => write!(f, "sampling stuck in stage {stage}"),
            GenError::Engine => f.write_str("figure rejected by the engine"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenError {}

/// A sampled script with its figure, already built step by step.
#[derive(Clone, Debug)]
pub struct Sample {
    pub script: Vec<Construction>,
    pub figure: Figure,
    /// Kind of each stage-three step: `Intersect` for a pair, `Others` for one.
    pub steps: Vec<Category>,
}

/// Point names in order: a..z, then a1..z1, a2..
pub fn point_name(i: usize) -> String {
    let c = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => format!("{c}"),
        k => format!("{c}{k}"),
    }
}

fn construction(def: &ConstructionDef, outs: Vec<String>, args: Vec<String>) -> Construction {
    Construction {
        name: def.name.clone(),
        outs,
        args,
        category: def.category,
    }
}

fn random_args<R: Rng + ?Sized>(fig: &Figure, n: usize, rng: &mut R) -> Option<Vec<String>> {
    if n > fig.len() {
        return None;
    }
    Some(
        sample(rng, fig.len(), n)
            .into_iter()
            .map(|i| fig.names()[i].clone())
            .collect(),
    )
}

fn pick<'c, R: Rng + ?Sized>(defs: &[&'c ConstructionDef], rng: &mut R) -> &'c ConstructionDef {
    defs[rng.gen_range(0..defs.len())]
}

struct Sampler<'c> {
    catalog: &'c Catalog,
    tol: Tolerances,
    retries: usize,
    basic: Vec<&'c ConstructionDef>,
    free: Vec<&'c ConstructionDef>,
    inter: Vec<&'c ConstructionDef>,
    others: Vec<&'c ConstructionDef>,
}

impl<'c> Sampler<'c> {
    fn new(catalog: &'c Catalog, cfg: &SampleConfig) -> Result<Self, GenError> {
        let of = |c: Category| -> Result<Vec<&'c ConstructionDef>, GenError> {
            let v: Vec<_> = catalog.of_category(c).collect();
            if v.is_empty() {
                Err(GenError::EmptyCategory(c))
            } else {
                Ok(v)
            }
        };
        Ok(Sampler {
            catalog,
            tol: cfg.tol,
            retries: cfg.step_retries,
            basic: of(Category::Basic)?,
            free: of(Category::BasicFree)?,
            inter: of(Category::Intersect)?,
            others: of(Category::Others)?,
        })
    }

    /// Applies `group` as one clause; the figure is unchanged on failure.
    fn try_apply<R: Rng + ?Sized>(
        &self,
        fig: &mut Figure,
        group: &[Construction],
        rng: &mut R,
    ) -> bool {
        match clause_for(group, self.catalog) {
            Ok(c) => apply_clause(fig, c, self.catalog, &self.tol, rng).is_ok(),
            Err(_) => false,
        }
    }

    fn draw_one<R: Rng + ?Sized>(
        &self,
        defs: &[&'c ConstructionDef],
        fig: &Figure,
        rng: &mut R,
    ) -> Option<Construction> {
        let def = pick(defs, rng);
        let args = random_args(fig, def.in_arity(), rng)?;
        let outs = (0..def.out_arity())
            .map(|k| point_name(fig.len() + k))
            .collect();
        Some(construction(def, outs, args))
    }

    /// Retries a draw until it applies. Returns the applied group.
    fn step<R: Rng + ?Sized>(
        &self,
        fig: &mut Figure,
        rng: &mut R,
        stage: u8,
        mut draw: impl FnMut(&Figure, &mut R) -> Option<Vec<Construction>>,
    ) -> Result<Vec<Construction>, GenError> {
        for _ in 0..self.retries {
            if let Some(g) = draw(fig, rng) {
                if self.try_apply(fig, &g, rng) {
                    return Ok(g);
                }
            }
        }
        Err(GenError::SamplingStuck { stage })
    }

    fn pair<R: Rng + ?Sized>(&self, fig: &Figure, rng: &mut R) -> Option<Vec<Construction>> {
        let a = self.draw_one(&self.inter, fig, rng)?;
        let mut b = self.draw_one(&self.inter, fig, rng)?;
        // Identical loci never meet in a point.
        if a.name == b.name && a.args == b.args {
            return None;
        }
        b.outs = a.outs.clone();
        Some(alloc::vec![a, b])
    }
}

/// Samples a script in three stages and builds it as it goes: one base
/// shape, some free points, then steps that are either two intersecting
/// loci for one new point or one determined construction.
pub fn sample_script<R: Rng + ?Sized>(
    cfg: &SampleConfig,
    catalog: &Catalog,
    rng: &mut R,
) -> Result<Sample, GenError> {
    cfg.validate()?;
    let s = Sampler::new(catalog, cfg)?;
    let mut fig = Figure::new();
    let mut script = Vec::new();
    script.extend(s.step(&mut fig, rng, 1, |f, r| {
        s.draw_one(&s.basic, f, r).map(|c| alloc::vec![c])
    })?);
    let nfree = rng.gen_range(cfg.free_points.clone());
    for _ in 0..nfree {
        script.extend(s.step(&mut fig, rng, 2, |f, r| {
            s.draw_one(&s.free, f, r).map(|c| alloc::vec![c])
        })?);
    }
    let nsteps = rng.gen_range(cfg.steps.clone());
    let mut steps = Vec::with_capacity(nsteps);
    for _ in 0..nsteps {
        let kind = if rng.gen_bool(cfg.p_intersect_pair) {
            Category::Intersect
        } else {
            Category::Others
        };
        let g = match kind {
            Category::Intersect => s.step(&mut fig, rng, 3, |f, r| s.pair(f, r))?,
            _ => s.step(&mut fig, rng, 3, |f, r| {
                s.draw_one(&s.others, f, r).map(|c| alloc::vec![c])
            })?,
        };
        script.extend(g);
        steps.push(kind);
    }
    fig.normalize();
    Ok(Sample {
        script,
        figure: fig,
        steps,
    })
}

/// Per-record summary for manifests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordMeta {
    pub goal: Predicate,
    pub points: usize,
    pub aux: usize,
    pub proof_len: usize,
}

impl RecordMeta {
    pub fn of(rec: &Record) -> RecordMeta {
        let points = rec
            .problem
            .clauses
            .iter()
            .chain(&rec.aux)
            .map(|c| c.points.len())
            .sum();
        RecordMeta {
            goal: rec.problem.goal.predicate,
            points,
            aux: rec.aux.len(),
            proof_len: rec.proof.len(),
        }
    }
}

/// Everything one seed produced.
#[derive(Clone, Debug, Default)]
pub struct SeedOutput {
    pub seed: u64,
    /// The sampled figure, when sampling succeeded.
    pub figure: Option<Figure>,
    pub records: Vec<Record>,
    pub steps: Vec<Category>,
    pub report: FilterReport,
    /// Traced records that failed replay; always zero unless there is a bug.
    pub rejected: usize,
    pub error: Option<GenError>,
    pub micros: u64,
}

/// Saturates a figure and emits one checked record per kept conclusion.
pub fn records_for_figure(
    fig: &Figure,
    rules: &RuleSet,
    cfg: &SampleConfig,
    clock: &dyn Clock,
    report: &mut FilterReport,
) -> Result<(Vec<Record>, usize), GenError> {
    let ecfg = EngineConfig {
        tol: cfg.tol,
        budget: cfg.budget,
        ..EngineConfig::default()
    };
    let mut engine = Engine::new(fig, rules, ecfg).map_err(|_| GenError::Engine)?;
    engine.saturate(clock);
    let db = engine.db();
    let mut kept: Vec<Statement> = Vec::new();
    for (id, f) in db.facts().iter().enumerate() {
        if matches!(f.source, Source::Premise | Source::NumericCheck) {
            continue;
        }
        let s = engine.statement(id as u32);
        let v = judge(&s, fig, db, &cfg.tol);
        if v.keep {
            kept.push(s);
        } else {
            report.add(v.reason);
        }
    }
    let unique = dedupe(&kept, fig, &cfg.tol);
    for _ in unique.len()..kept.len() {
        report.add(Reason::EquivalentDuplicate);
    }
    let mut out = Vec::new();
    let mut rejected = 0;
    for s in unique {
        if out.len() >= cfg.max_records {
            break;
        }
        let Some(id) = engine.db().lookup(
            s.predicate,
            &engine.indices(&s).map_err(|_| GenError::Engine)?,
            s.literal,
        ) else {
            continue;
        };
        let Some(rec) = build_record(&engine, id, ProblemScope::GoalPoints) else {
            continue;
        };
        match check_record(&rec, rules) {
            Ok(()) => {
                report.add(Reason::Keep);
                out.push(rec);
            }
            Err(_) => rejected += 1,
        }
    }
    Ok((out, rejected))
}

/// Runs the whole pipeline for one seed. Failures are reported in the
/// output, never raised.
pub fn generate_seed(
    cfg: &SampleConfig,
    catalog: &Catalog,
    rules: &RuleSet,
    seed: u64,
    clock: &dyn Clock,
) -> SeedOutput {
    let t0 = clock.micros();
    let mut out = SeedOutput {
        seed,
        ..SeedOutput::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = sample_script(cfg, catalog, &mut rng).and_then(|s| {
        out.steps = s.steps;
        let r = records_for_figure(&s.figure, rules, cfg, clock, &mut out.report);
        out.figure = Some(s.figure);
        r
    });
    match res {
        Ok((recs, rejected)) => {
            out.records = recs;
            out.rejected = rejected;
        }
        Err(e) => out.error = Some(e),
    }
    out.micros = clock.micros().saturating_sub(t0);
    out
}

/// Seeds `first..first + n` in order.
pub fn generate<'a>(
    cfg: &'a SampleConfig,
    catalog: &'a Catalog,
    rules: &'a RuleSet,
    first: u64,
    n: u64,
    clock: &'a dyn Clock,
) -> impl Iterator<Item = SeedOutput> + 'a {
    (first..first.saturating_add(n)).map(move |s| generate_seed(cfg, catalog, rules, s, clock))
}
