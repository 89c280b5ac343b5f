//! Forward-chaining saturation over a figure.
//!
//! Each round proves pending numerical candidates by linear chasing, then
//! matches every rule against a snapshot of the database and inserts the
//! numerically valid conclusions in a fixed order.

pub mod ar;
pub mod fact;
pub(crate) mod matcher;
pub mod preid;
pub mod replay;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use fact::{Fact, FactDb, FactId, Key, Source};
pub use preid::Candidate;

use crate::figure::Figure;
use crate::lang::{parse_rules, ParseError, ParseErrorKind, Rule};
use crate::numeric::Tolerances;
use crate::statement::{Predicate, Rational, Statement};
use ar::Chase;

pub const DEFAULT_RULES: &str = include_str!("../../data/default.rules");

/// Maximum number of variables in one rule.
pub const MAX_VARS: usize = 8;
pub(crate) const UNBOUND: u8 = u8::MAX;
pub(crate) type Binding = [u8; MAX_VARS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatchMode {
    /// Enumerates every point assignment, then checks premises.
    Naive,
    /// Joins premises over the fact index in ascending cardinality order.
    Partial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_rounds: u32,
    pub max_facts: usize,
    pub max_millis: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_rounds: 64,
            max_facts: 200_000,
            max_millis: u64::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineConfig {
    pub mode: MatchMode,
    pub tol: Tolerances,
    pub budget: Budget,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: MatchMode::Partial,
            tol: Tolerances::default(),
            budget: Budget::default(),
        }
    }
}

/// Monotonic time source in microseconds.
pub trait Clock {
    fn micros(&self) -> u64;
}

/// A clock that never advances: time budgets never trigger and timings read zero.
pub struct NoClock;

impl Clock for NoClock {
    fn micros(&self) -> u64 {
        0
    }
}

#[cfg(feature = "std")]
pub struct StdClock(pub std::time::Instant);

#[cfg(feature = "std")]
impl StdClock {
    pub fn new() -> Self {
        StdClock(std::time::Instant::now())
    }
}

#[cfg(feature = "std")]
impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(feature = "std")]
impl Clock for StdClock {
    fn micros(&self) -> u64 {
        self.0.elapsed().as_micros() as u64
    }
}

/// A rule template with variables replaced by indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledTemplate {
    pub pred: Predicate,
    pub vars: [u8; 8],
    pub literal: Option<Rational>,
}

impl CompiledTemplate {
    pub fn vars(&self) -> &[u8] {
        &self.vars[..self.pred.arity()]
    }

    pub(crate) fn instantiate(&self, b: &Binding) -> [u8; 8] {
        let mut out = [0u8; 8];
        for (o, &v) in out.iter_mut().zip(self.vars()) {
            *o = b[v as usize];
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub rule: Rule,
    pub premises: Vec<CompiledTemplate>,
    pub guards: Vec<CompiledTemplate>,
    pub conclusions: Vec<CompiledTemplate>,
    pub nvars: usize,
}

impl CompiledRule {
    pub fn name(&self) -> &str {
        &self.rule.name
    }

    fn compile(rule: Rule) -> Option<CompiledRule> {
        let vars: Vec<String> = rule.variables().into_iter().map(String::from).collect();
        if vars.len() > MAX_VARS {
            return None;
        }
        let comp = |ts: &[crate::lang::Template]| -> Vec<CompiledTemplate> {
            ts.iter()
                .map(|t| {
                    let mut v = [0u8; 8];
                    for (slot, a) in v.iter_mut().zip(&t.args) {
                        *slot = vars.iter().position(|x| x == a).unwrap_or(0) as u8;
                    }
                    CompiledTemplate {
                        pred: t.predicate,
                        vars: v,
                        literal: t.literal,
                    }
                })
                .collect()
        };
        Some(CompiledRule {
            premises: comp(&rule.premises),
            guards: comp(&rule.numeric_guards),
            conclusions: comp(&rule.conclusions),
            nvars: vars.len(),
            rule,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RuleSet {
    rules: Vec<CompiledRule>,
}

impl RuleSet {
    pub fn parse(text: &str) -> Result<RuleSet, ParseError> {
        let mut rules = Vec::new();
        for r in parse_rules(text)? {
            let name = r.name.clone();
            rules.push(
                CompiledRule::compile(r)
                    .ok_or_else(|| ParseError::new(ParseErrorKind::TooManyVariables(name), 0))?,
            );
        }
        Ok(RuleSet { rules })
    }

    /// The bundled rule file.
    pub fn default_rules() -> RuleSet {
        RuleSet::parse(DEFAULT_RULES).expect("bundled rule file parses")
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn get(&self, i: usize) -> &CompiledRule {
        &self.rules[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name() == name)
    }
}

/// Counters for one rule in one round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleStats {
    /// Partial or complete bindings proposed.
    pub candidates: u64,
    /// Proposed bindings rejected before completion.
    pub pruned: u64,
    /// Premise lookups performed.
    pub checks: u64,
    /// New facts inserted.
    pub emitted: u64,
    /// Conclusions rejected as degenerate or numerically false.
    pub rejected: u64,
    pub micros: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundStats {
    pub round: u32,
    pub rules: Vec<RuleStats>,
    pub preid_micros: u64,
    pub chase_micros: u64,
    pub match_micros: u64,
    pub insert_micros: u64,
    pub new_facts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    FixedPoint,
    GoalReached,
    RoundLimit,
    FactLimit,
    TimeLimit,
}

impl Outcome {
    pub fn is_complete(self) -> bool {
        matches!(self, Outcome::FixedPoint | Outcome::GoalReached)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    UnknownPoint(String),
    TooManyPoints(usize),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::UnknownPoint(p) => write!(f, "unknown point `{p}`"),
            EngineError::TooManyPoints(n) => {
                write!(f, "figure has {n} points, at most 128 are supported")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EngineError {}

pub const MAX_POINTS: usize = 128;

pub struct Engine<'a> {
    fig: &'a Figure,
    rules: &'a RuleSet,
    config: EngineConfig,
    db: FactDb,
    chase: Chase,
    cached: Option<Vec<Candidate>>,
    queried_ranks: Option<(usize, usize)>,
    round: u32,
    stats: Vec<RoundStats>,
}

impl<'a> Engine<'a> {
    /// Loads the figure's premises as facts.
    pub fn new(
        fig: &'a Figure,
        rules: &'a RuleSet,
        config: EngineConfig,
    ) -> Result<Self, EngineError> {
        if fig.len() > MAX_POINTS {
            return Err(EngineError::TooManyPoints(fig.len()));
        }
        let mut e = Engine {
            fig,
            rules,
            config,
            db: FactDb::new(),
            chase: Chase::default(),
            cached: None,
            queried_ranks: None,
            round: 0,
            stats: Vec::new(),
        };
        for s in fig.premises() {
            let args = e.indices(s)?;
            e.insert_original(s.predicate, &args, s.literal, Source::Premise, Vec::new());
        }
        Ok(e)
    }

    pub fn figure(&self) -> &'a Figure {
        self.fig
    }

    pub fn rules(&self) -> &'a RuleSet {
        self.rules
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn db(&self) -> &FactDb {
        &self.db
    }

    pub fn stats(&self) -> &[RoundStats] {
        &self.stats
    }

    pub fn rounds(&self) -> u32 {
        self.round
    }

    /// Point indices of a statement's arguments.
    pub fn indices(&self, s: &Statement) -> Result<Vec<u8>, EngineError> {
        s.args
            .iter()
            .map(|a| {
                self.fig
                    .index_of(a)
                    .map(|i| i as u8)
                    .ok_or_else(|| EngineError::UnknownPoint(a.clone()))
            })
            .collect()
    }

    /// The fact as a statement over point names.
    pub fn statement(&self, id: FactId) -> Statement {
        let f = self.db.get(id);
        let names = self.fig.names();
        Statement {
            predicate: f.pred,
            args: f
                .args()
                .iter()
                .map(|&i| names[i as usize].clone())
                .collect(),
            literal: f.literal,
        }
    }

    /// Canonical keys of all facts, sorted.
    pub fn canonical_facts(&self) -> Vec<Key> {
        let mut v: Vec<Key> = (0..self.db.len() as FactId)
            .map(|i| *self.db.canonical(i))
            .collect();
        v.sort_unstable();
        v
    }

    fn insert_original(
        &mut self,
        pred: Predicate,
        args: &[u8],
        literal: Option<Rational>,
        source: Source,
        deps: Vec<FactId>,
    ) -> (FactId, bool) {
        let mut a = [0u8; 8];
        a[..args.len()].copy_from_slice(args);
        let (id, new) = self.db.insert(Fact {
            pred,
            args: a,
            literal,
            source,
            deps,
            round: self.round,
        });
        if new {
            self.chase.add_fact(id, pred, args, literal.as_ref());
        }
        (id, new)
    }

    fn holds(&self, pred: Predicate, args: &[u8], literal: Option<&Rational>) -> bool {
        matches!(
            self.fig.eval_indices(pred, args, literal, &self.config.tol),
            Ok(true)
        )
    }

    fn candidates(&mut self) -> Vec<Candidate> {
        match self.config.mode {
            MatchMode::Naive => preid::brute_force_candidates(self.fig, &self.config.tol),
            MatchMode::Partial => {
                if self.cached.is_none() {
                    self.cached = Some(preid::pre_identify(self.fig, &self.config.tol));
                }
                self.cached.clone().unwrap_or_default()
            }
        }
    }

    /// One round; returns the number of new facts.
    pub fn step(&mut self, clock: &dyn Clock) -> usize {
        self.round += 1;
        let mut st = RoundStats {
            round: self.round,
            rules: alloc::vec![RuleStats::default(); self.rules.len()],
            ..Default::default()
        };
        let t0 = clock.micros();
        let cands = self.candidates();
        let t1 = clock.micros();
        st.preid_micros = t1 - t0;

        let mut added = 0;
        let ranks = self.chase.ranks();
        if self.queried_ranks != Some(ranks) {
            self.queried_ranks = Some(ranks);
            for c in &cands {
                if self.db.lookup(c.pred, c.args(), None).is_some() {
                    continue;
                }
                if let Some((angle, deps)) = self.chase.prove(c.pred, c.args(), None) {
                    let source = if angle {
                        Source::AngleChase
                    } else {
                        Source::RatioChase
                    };
                    self.db.insert(Fact {
                        pred: c.pred,
                        args: c.args,
                        literal: None,
                        source,
                        deps,
                        round: self.round,
                    });
                    added += 1;
                }
            }
        }
        let t2 = clock.micros();
        st.chase_micros = t2 - t1;

        let snap = self.db.len();
        let mut found: Vec<(u16, Binding)> = Vec::new();
        for (ri, rule) in self.rules.rules().iter().enumerate() {
            let r0 = clock.micros();
            let rs = &mut st.rules[ri];
            let bindings = match self.config.mode {
                MatchMode::Partial => matcher::partial(rule, &self.db, snap, rs),
                MatchMode::Naive => matcher::naive(rule, &self.db, snap, self.fig.len(), rs),
            };
            for b in bindings {
                let ok = rule.guards.iter().all(|g| {
                    let a = g.instantiate(&b);
                    self.holds(g.pred, &a[..g.pred.arity()], None)
                });
                if ok {
                    found.push((ri as u16, b));
                } else {
                    rs.pruned += 1;
                }
            }
            rs.micros += clock.micros() - r0;
        }
        found.sort_unstable();
        found.dedup();
        let t3 = clock.micros();
        st.match_micros = t3 - t2;

        for (ri, b) in found {
            let rule = self.rules.get(ri as usize);
            let mut deps: Option<Vec<FactId>> = None;
            for c in &rule.conclusions {
                let args = c.instantiate(&b);
                let a = &args[..c.pred.arity()];
                if self.db.lookup(c.pred, a, c.literal).is_some() {
                    continue;
                }
                if fact::is_degenerate(c.pred, a) || !self.holds(c.pred, a, c.literal.as_ref()) {
                    st.rules[ri as usize].rejected += 1;
                    continue;
                }
                if deps.is_none() {
                    let mut d: Vec<FactId> = rule
                        .premises
                        .iter()
                        .filter_map(|p| {
                            let pa = p.instantiate(&b);
                            self.db.lookup(p.pred, &pa[..p.pred.arity()], p.literal)
                        })
                        .collect();
                    for g in &rule.guards {
                        let ga = g.instantiate(&b);
                        let (gid, _) = self.db.insert(Fact {
                            pred: g.pred,
                            args: ga,
                            literal: None,
                            source: Source::NumericCheck,
                            deps: Vec::new(),
                            round: self.round,
                        });
                        d.push(gid);
                    }
                    deps = Some(d);
                }
                let d = deps.clone().unwrap_or_default();
                self.insert_original(c.pred, a, c.literal, Source::Rule(ri), d);
                st.rules[ri as usize].emitted += 1;
                added += 1;
            }
        }
        st.insert_micros = clock.micros() - t3;
        st.new_facts = added;
        self.stats.push(st);
        added
    }

    fn exhausted(&self, start: u64, clock: &dyn Clock) -> Option<Outcome> {
        let b = &self.config.budget;
        if self.db.len() >= b.max_facts {
            Some(Outcome::FactLimit)
        } else if self.round >= b.max_rounds {
            Some(Outcome::RoundLimit)
        } else if (clock.micros() - start) / 1000 >= b.max_millis {
            Some(Outcome::TimeLimit)
        } else {
            None
        }
    }

    /// Runs rounds to a fixed point or until the budget runs out.
    pub fn saturate(&mut self, clock: &dyn Clock) -> Outcome {
        self.saturate_until(None, clock)
    }

    /// Like `saturate`, stopping early once the goal holds.
    pub fn saturate_until(&mut self, goal: Option<&Statement>, clock: &dyn Clock) -> Outcome {
        let start = clock.micros();
        loop {
            if let Some(g) = goal {
                if self.query(g).is_some() {
                    return Outcome::GoalReached;
                }
            }
            if let Some(o) = self.exhausted(start, clock) {
                return o;
            }
            if self.step(clock) == 0 {
                if let Some(g) = goal {
                    if self.query(g).is_some() {
                        return Outcome::GoalReached;
                    }
                }
                return Outcome::FixedPoint;
            }
        }
    }

    /// The fact proving the goal, found directly or by chasing.
    pub fn query(&mut self, goal: &Statement) -> Option<FactId> {
        let args = self.indices(goal).ok()?;
        if args.len() != goal.predicate.arity() {
            return None;
        }
        if let Some(id) = self.db.lookup(goal.predicate, &args, goal.literal) {
            return Some(id);
        }
        let (angle, deps) = self
            .chase
            .prove(goal.predicate, &args, goal.literal.as_ref())?;
        if !self.holds(goal.predicate, &args, goal.literal.as_ref()) {
            return None;
        }
        let source = if angle {
            Source::AngleChase
        } else {
            Source::RatioChase
        };
        let mut a = [0u8; 8];
        a[..args.len()].copy_from_slice(&args);
        let (id, _) = self.db.insert(Fact {
            pred: goal.predicate,
            args: a,
            literal: goal.literal,
            source,
            deps,
            round: self.round,
        });
        Some(id)
    }
}
