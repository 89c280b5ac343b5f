//! Proof search: saturate, and while the goal is open, extend the figure
//! with proposed auxiliary clauses, keeping the best states per depth.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHasher;

use crate::builder::{
    build_problem_figure, check_prerequisites, clause_for, extend_figure, group_script,
    recognize_clause, BuildError, DEFAULT_MAX_RETRIES,
};
use crate::catalog::{Catalog, Category};
use crate::engine::replay::check_record;
use crate::engine::{Budget, Clock, Engine, EngineConfig, RuleSet};
use crate::figure::{Figure, FigureClause};
use crate::generator::point_name;
use crate::lang::{
    parse_construction_script, parse_premise_clause, serialize_request, Construction, Problem,
    Record,
};
use crate::numeric::{Point, Tolerances};
use crate::statement::Statement;
use crate::traceback::{build_record, ProblemScope};

/// One candidate auxiliary clause with its score; higher is better.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub score: f64,
    /// Script form (`x = foot x a b c`) or clause form (`x : perp x a b c, coll x b c`).
    pub clause: String,
}

/// A search node: the figure with the aux clauses applied so far.
#[derive(Clone, Debug)]
pub struct ProofState {
    pub figure: Figure,
    pub goal: Statement,
    /// Clauses of the original problem; the rest of the figure is aux.
    pub given: usize,
    /// Applied clause texts, in order.
    pub aux: Vec<String>,
    pub score: f64,
}

impl ProofState {
    /// The problem as given plus the current aux clauses.
    pub fn problem(&self) -> (Problem, Vec<crate::lang::PremiseClause>) {
        let mut p = self.figure.to_problem(self.goal.clone());
        let aux = p.clauses.split_off(self.given.min(p.clauses.len()));
        (p, aux)
    }

    /// The request text sent to external proposers.
    pub fn request(&self) -> String {
        let (p, aux) = self.problem();
        serialize_request(&p, &aux)
    }

    fn rank_cmp(&self, other: &ProofState) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.aux.len().cmp(&other.aux.len()))
            .then_with(|| self.aux.cmp(&other.aux))
    }
}

pub trait Proposer {
    /// At most `k` candidates for `state`.
    fn propose(&mut self, state: &ProofState, k: usize) -> Vec<Proposal>;
}

/// Proposes nothing: plain saturation.
pub struct NoProposer;

impl Proposer for NoProposer {
    fn propose(&mut self, _: &ProofState, _: usize) -> Vec<Proposal> {
        Vec::new()
    }
}

/// Proposes the same list every call.
#[derive(Clone, Debug, Default)]
pub struct FixedProposer(pub Vec<Proposal>);

impl Proposer for FixedProposer {
    fn propose(&mut self, _: &ProofState, k: usize) -> Vec<Proposal> {
        self.0.iter().take(k).cloned().collect()
    }
}

/// Alternates the ranked lists of two proposers.
pub struct Interleave<A, B>(pub A, pub B);

impl<A: Proposer, B: Proposer> Proposer for Interleave<A, B> {
    fn propose(&mut self, state: &ProofState, k: usize) -> Vec<Proposal> {
        let a = self.0.propose(state, k);
        let b = self.1.propose(state, k);
        let mut out = Vec::with_capacity(k);
        let (mut ia, mut ib) = (a.into_iter(), b.into_iter());
        while out.len() < k {
            match (ia.next(), ib.next()) {
                (None, None) => break,
                (x, y) => out.extend(x.into_iter().chain(y).take(k - out.len())),
            }
        }
        out
    }
}

/// Parses reply lines `score TAB clause`. Returns the candidates and the
/// number of malformed lines.
pub fn parse_reply(text: &str) -> (Vec<Proposal>, usize) {
    let mut out = Vec::new();
    let mut bad = 0;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line.split_once('\t').and_then(|(s, c)| {
            let score: f64 = s.trim().parse().ok()?;
            let clause = c.trim();
            (score.is_finite() && !clause.is_empty()).then(|| Proposal {
                score,
                clause: clause.to_string(),
            })
        });
        match parsed {
            Some(p) => out.push(p),
            None => bad += 1,
        }
    }
    (out, bad)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvalidProposal {
    Parse,
    /// The clause is not one construction step, or matches none.
    Unrecognized,
    /// It names no new point, or reuses an existing one.
    NoNewPoint,
    Build,
}

impl fmt::Display for InvalidProposal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidProposal::Parse => "unparsable clause",
            InvalidProposal::Unrecognized => "clause matches no construction",
            InvalidProposal::NoNewPoint => "clause introduces no fresh point",
            InvalidProposal::Build => "clause cannot be built on the figure",
        })
    }
}

/// Turns a proposed clause into a figure clause over `fig`.
pub fn proposal_clause(
    text: &str,
    fig: &Figure,
    catalog: &Catalog,
) -> Result<FigureClause, InvalidProposal> {
    let clause = if text.contains('=') {
        let script =
            parse_construction_script(text, catalog).map_err(|_| InvalidProposal::Parse)?;
        let groups = group_script(&script);
        if groups.len() != 1 {
            return Err(InvalidProposal::Unrecognized);
        }
        clause_for(&groups[0], catalog).map_err(|_| InvalidProposal::Unrecognized)?
    } else {
        let declared: BTreeSet<String> = fig.names().iter().cloned().collect();
        let pc = parse_premise_clause(text, &declared).map_err(|_| InvalidProposal::Parse)?;
        let stmts: Vec<Statement> = pc.statements.into_iter().map(|p| p.statement).collect();
        let constructions =
            recognize_clause(&pc.points, &stmts, catalog).ok_or(InvalidProposal::Unrecognized)?;
        FigureClause {
            points: pc.points,
            constructions,
            statements: stmts,
        }
    };
    if clause.points.is_empty() || clause.points.iter().any(|p| fig.index_of(p).is_some()) {
        return Err(InvalidProposal::NoNewPoint);
    }
    Ok(clause)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub beam: usize,
    pub depth: usize,
    /// Proposals requested per state.
    pub proposals: usize,
    /// Engine budget for each state.
    pub engine: Budget,
    /// Wall-clock cap for the whole search.
    pub max_millis: u64,
    pub tol: Tolerances,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            beam: 4,
            depth: 2,
            proposals: 8,
            engine: Budget {
                max_rounds: 32,
                max_facts: 50_000,
                max_millis: u64::MAX,
            },
            max_millis: u64::MAX,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveOutcome {
    pub record: Option<Record>,
    /// Depth of the solving state, or the last depth searched.
    pub depth: usize,
    pub states: usize,
    pub invalid: usize,
    pub timed_out: bool,
}

impl SolveOutcome {
    pub fn solved(&self) -> bool {
        self.record.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    Build(BuildError),
    /// The goal mentions a point the problem does not declare.
    BadGoal,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Build(e) => write!(f, "{e}"),
            SolveError::BadGoal => f.write_str("goal mentions an undeclared point"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolveError {}

fn state_seed(seed: u64, aux: &[String]) -> u64 {
    let mut h = FxHasher::default();
    seed.hash(&mut h);
    aux.hash(&mut h);
    h.finish()
}

/// Saturates a state; a checked record when the goal follows.
fn try_prove(
    state: &ProofState,
    rules: &RuleSet,
    budget: &SearchBudget,
    clock: &dyn Clock,
) -> Option<Record> {
    let cfg = EngineConfig {
        tol: budget.tol,
        budget: budget.engine,
        ..EngineConfig::default()
    };
    let mut e = Engine::new(&state.figure, rules, cfg).ok()?;
    e.saturate_until(Some(&state.goal), clock);
    let id = e.query(&state.goal)?;
    let rec = build_record(&e, id, ProblemScope::Given(state.given))?;
    check_record(&rec, rules).ok().map(|_| rec)
}

/// Beam search over aux clauses. The problem figure and every extension
/// are sampled from `seed`, so the outcome is a function of the inputs
/// unless the wall-clock cap interrupts it.
pub fn solve(
    problem: &Problem,
    catalog: &Catalog,
    rules: &RuleSet,
    proposer: &mut dyn Proposer,
    budget: &SearchBudget,
    seed: u64,
    clock: &dyn Clock,
) -> Result<SolveOutcome, SolveError> {
    let t0 = clock.micros();
    let out_of_time = || clock.micros().saturating_sub(t0) / 1000 >= budget.max_millis;
    let tol = budget.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let figure = build_problem_figure(problem, catalog, &tol, &mut rng, DEFAULT_MAX_RETRIES)
        .map_err(SolveError::Build)?;
    if problem
        .goal
        .args
        .iter()
        .any(|p| figure.index_of(p).is_none())
    {
        return Err(SolveError::BadGoal);
    }
    let root = ProofState {
        figure,
        goal: problem.goal.clone(),
        given: problem.clauses.len(),
        aux: Vec::new(),
        score: 0.0,
    };
    let mut out = SolveOutcome {
        states: 1,
        ..SolveOutcome::default()
    };
    if let Some(r) = try_prove(&root, rules, budget, clock) {
        out.record = Some(r);
        return Ok(out);
    }
    let mut beam = alloc::vec![root];
    for depth in 1..=budget.depth {
        out.depth = depth;
        let mut children: Vec<(ProofState, Option<Record>)> = Vec::new();
        let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
        for parent in &beam {
            if out_of_time() {
                out.timed_out = true;
                return Ok(out);
            }
            let mut props = proposer.propose(parent, budget.proposals.max(1));
            props.truncate(budget.proposals.max(1));
            for p in props {
                if !p.score.is_finite() {
                    out.invalid += 1;
                    continue;
                }
                let clause = match proposal_clause(&p.clause, &parent.figure, catalog) {
                    Ok(c) => c,
                    Err(_) => {
                        out.invalid += 1;
                        continue;
                    }
                };
                let mut aux = parent.aux.clone();
                aux.push(p.clause.clone());
                let mut key = aux.clone();
                key.sort();
                if !seen.insert(key) {
                    continue;
                }
                let mut crng = ChaCha8Rng::seed_from_u64(state_seed(seed, &aux));
                let fig = match extend_figure(
                    &parent.figure,
                    &clause,
                    catalog,
                    &tol,
                    &mut crng,
                    DEFAULT_MAX_RETRIES,
                ) {
                    Ok(f) => f,
                    Err(_) => {
                        out.invalid += 1;
                        continue;
                    }
                };
                let child = ProofState {
                    figure: fig,
                    goal: parent.goal.clone(),
                    given: parent.given,
                    aux,
                    score: parent.score + p.score,
                };
                out.states += 1;
                let rec = try_prove(&child, rules, budget, clock);
                children.push((child, rec));
                if out_of_time() {
                    out.timed_out = true;
                    break;
                }
            }
        }
        children.sort_by(|a, b| a.0.rank_cmp(&b.0));
        if let Some((_, rec)) = children.iter_mut().find(|c| c.1.is_some()) {
            out.record = rec.take();
            return Ok(out);
        }
        if out.timed_out {
            return Ok(out);
        }
        beam = children
            .into_iter()
            .take(budget.beam.max(1))
            .map(|c| c.0)
            .collect();
        if beam.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Enumerates determined constructions over the existing points and ranks
/// them by how many numeric coincidences the new point creates.
pub struct EnumProposer<'c> {
    catalog: &'c Catalog,
    tol: Tolerances,
}

impl<'c> EnumProposer<'c> {
    pub fn new(catalog: &'c Catalog, tol: Tolerances) -> Self {
        EnumProposer { catalog, tol }
    }

    fn fresh_name(fig: &Figure) -> String {
        (fig.len()..)
            .map(point_name)
            .find(|n| fig.index_of(n).is_none())
            .unwrap_or_default()
    }

    /// Every applicable construction with its new point.
    pub fn candidates(&self, fig: &Figure) -> Vec<(Construction, Point)> {
        let x = Self::fresh_name(fig);
        let n = fig.len();
        let mut out: Vec<(Construction, Point)> = Vec::new();
        let mut at: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for def in self.catalog.of_category(Category::Others) {
            if def.out_arity() != 1 || def.in_arity() > n {
                continue;
            }
            let mut idx = alloc::vec![0usize; def.in_arity()];
            loop {
                let distinct = idx.iter().enumerate().all(|(i, a)| !idx[..i].contains(a));
                if distinct {
                    let c = Construction {
                        name: def.name.clone(),
                        outs: alloc::vec![x.clone()],
                        args: idx.iter().map(|&i| fig.names()[i].clone()).collect(),
                        category: def.category,
                    };
                    if let Some(p) = self.place(&c, fig) {
                        // one construction per location; the first in enumeration order wins
                        let key = (libm::round(p.x * 1e7) as i64, libm::round(p.y * 1e7) as i64);
                        if let alloc::collections::btree_map::Entry::Vacant(v) = at.entry(key) {
                            v.insert(out.len());
                            out.push((c, p));
                        }
                    }
                }
                if !odometer(&mut idx, n) {
                    break;
                }
            }
        }
        out
    }

    fn place(&self, c: &Construction, fig: &Figure) -> Option<Point> {
        if !check_prerequisites(c, self.catalog, fig, &self.tol) {
            return None;
        }
        let clause = clause_for(core::slice::from_ref(c), self.catalog).ok()?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = extend_figure(fig, &clause, self.catalog, &self.tol, &mut rng, 0).ok()?;
        f.point(&c.outs[0])
    }
}

fn odometer(idx: &mut [usize], n: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

/// Numeric coincidences a new point creates, counted over distinct lines
/// and lengths: existing lines it lies on, new lines parallel or
/// perpendicular to existing ones, and new lengths equal to existing ones
/// or to each other. Items touching a goal point count twice.
pub fn coincidence_score(fig: &Figure, x: Point, goal_points: &[usize], tol: &Tolerances) -> u32 {
    let pts = fig.coords();
    let n = pts.len();
    let eps = tol.eps_eq;
    let w = |i: usize| if goal_points.contains(&i) { 2 } else { 1 };
    let coll = |a: Point, b: Point, c: Point| b.sub(a).unit().cross(c.sub(a).unit()).abs() < eps;
    // existing lines as (first point, direction), one per maximal collinear set
    let mut lines: Vec<(usize, Point)> = Vec::new();
    let mut lens: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !lines.iter().any(|&(k, d)| {
                let q = pts[k];
                (k == i || coll(q, q.add(d), pts[i])) && coll(q, q.add(d), pts[j])
            }) {
                lines.push((i, pts[j].sub(pts[i]).unit()));
            }
            let l = pts[i].dist(pts[j]);
            if !lens.iter().any(|m| (m - l).abs() < eps) {
                lens.push(l);
            }
        }
    }
    let mut score = 0;
    for &(k, d) in &lines {
        if coll(pts[k], pts[k].add(d), x) {
            score += w(k);
        }
    }
    let mut new_lines: Vec<usize> = Vec::new();
    let mut new_lens: Vec<usize> = Vec::new();
    for i in 0..n {
        if x.dist(pts[i]) < eps {
            return 0;
        }
        let on_old = lines
            .iter()
            .any(|&(k, d)| coll(pts[k], pts[k].add(d), x) && coll(pts[k], pts[k].add(d), pts[i]));
        if !on_old && !new_lines.iter().any(|&j| coll(x, pts[j], pts[i])) {
            new_lines.push(i);
            let u = pts[i].sub(x).unit();
            for &(_, d) in &lines {
                if u.cross(d).abs() < eps || u.dot(d).abs() < eps {
                    score += w(i);
                }
            }
        }
        let l = x.dist(pts[i]);
        if lens.iter().any(|m| (m - l).abs() < eps) {
            score += w(i);
        }
        if new_lens.iter().any(|&j| (x.dist(pts[j]) - l).abs() < eps) {
            score += w(i);
        }
        new_lens.push(i);
    }
    score
}

impl Proposer for EnumProposer<'_> {
    fn propose(&mut self, state: &ProofState, k: usize) -> Vec<Proposal> {
        let fig = &state.figure;
        let goal_points: Vec<usize> = state
            .goal
            .args
            .iter()
            .filter_map(|p| fig.index_of(p))
            .collect();
        let mut scored: Vec<(u32, String)> = self
            .candidates(fig)
            .into_iter()
            .map(|(c, p)| {
                (
                    coincidence_score(fig, p, &goal_points, &self.tol),
                    format_construction(&c),
                )
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        scored
            .into_iter()
            .take(k)
            .map(|(s, clause)| Proposal {
                score: s as f64,
                clause,
            })
            .collect()
    }
}

fn format_construction(c: &Construction) -> String {
    crate::lang::format_script(core::slice::from_ref(c))
        .trim_end()
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::NoClock;
    use crate::lang::parse_problem;

    const FIG2: &str = "a : ; b : ; c : ; d : coll b c d [000] ;
e : eqangle a d d e d e b d [001] eqangle a b a e a e a d [002] ;
f : coll a b f [003] perp a b f e [004] ;
g : coll b d g [005] perp b d g e [006]
? cong f e g e";

    fn small() -> SearchBudget {
        SearchBudget {
            beam: 2,
            depth: 1,
            proposals: 4,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn reply_lines() {
        let (p, bad) = parse_reply(
            "1.0\th : coll a d h, perp a d h e\nnonsense\n0.5\tx = midpoint x a b\nnan\tx\n\n",
        );
        assert_eq!(p.len(), 2);
        assert_eq!(bad, 2);
        assert_eq!(p[0].score, 1.0);
        assert_eq!(p[1].clause, "x = midpoint x a b");
    }

    #[test]
    fn interleave_alternates() {
        let a = FixedProposer(alloc::vec![
            Proposal {
                score: 1.0,
                clause: "a1".into()
            },
            Proposal {
                score: 0.9,
                clause: "a2".into()
            }
        ]);
        let b = FixedProposer(alloc::vec![Proposal {
            score: 0.5,
            clause: "b1".into()
        }]);
        let st = ProofState {
            figure: Figure::new(),
            goal: Statement::from_strs(crate::statement::Predicate::Coll, &["a", "b", "c"]),
            given: 0,
            aux: Vec::new(),
            score: 0.0,
        };
        let got: Vec<String> = Interleave(a, b)
            .propose(&st, 3)
            .into_iter()
            .map(|p| p.clause)
            .collect();
        assert_eq!(got, ["a1", "b1", "a2"]);
    }

    #[test]
    fn fixed_aux_solves_worked_example() {
        let p = parse_problem(FIG2).unwrap();
        let cat = Catalog::default_catalog();
        let rules = RuleSet::default_rules();
        let mut none = NoProposer;
        let o = solve(&p, &cat, &rules, &mut none, &small(), 0, &NoClock).unwrap();
        assert!(!o.solved());
        let mut fixed = FixedProposer(alloc::vec![Proposal {
            score: 1.0,
            clause: "h : coll a d h, perp a d h e".into()
        }]);
        let o = solve(&p, &cat, &rules, &mut fixed, &small(), 0, &NoClock).unwrap();
        let rec = o.record.expect("solved");
        assert_eq!(rec.aux.len(), 1);
        assert_eq!(rec.aux[0].points, ["h"]);
        assert_eq!(check_record(&rec, &rules), Ok(()));
    }

    #[test]
    fn enumeration_finds_a_foot() {
        let p = parse_problem(FIG2).unwrap();
        let cat = Catalog::default_catalog();
        let rules = RuleSet::default_rules();
        let b = SearchBudget {
            beam: 4,
            depth: 1,
            proposals: 16,
            ..SearchBudget::default()
        };
        let mut e = EnumProposer::new(&cat, Tolerances::default());
        let o = solve(&p, &cat, &rules, &mut e, &b, 0, &NoClock).unwrap();
        let rec = o.record.expect("solved");
        assert_eq!(rec.aux.len(), 1);
        assert_eq!(check_record(&rec, &rules), Ok(()));
    }

    #[test]
    fn premise_goal_at_depth_zero() {
        let p = parse_problem("a : ; b : ; c : ; d : coll b c d [000] ? coll d c b").unwrap();
        let o = solve(
            &p,
            &Catalog::default_catalog(),
            &RuleSet::default_rules(),
            &mut NoProposer,
            &small(),
            0,
            &NoClock,
        )
        .unwrap();
        assert_eq!(o.depth, 0);
        assert!(o.record.unwrap().aux.is_empty());
    }

    #[test]
    fn zero_depth_needs_no_proposer() {
        let p = parse_problem(FIG2).unwrap();
        let cat = Catalog::default_catalog();
        let b = SearchBudget {
            depth: 0,
            ..small()
        };
        let mut fixed = FixedProposer(alloc::vec![Proposal {
            score: 1.0,
            clause: "h : coll a d h, perp a d h e".into()
        }]);
        let o = solve(
            &p,
            &cat,
            &RuleSet::default_rules(),
            &mut fixed,
            &b,
            0,
            &NoClock,
        )
        .unwrap();
        assert!(!o.solved());
    }

    #[test]
    fn foot_outranks_free_point() {
        let cat = Catalog::default_catalog();
        let tol = Tolerances::default();
        let script = parse_construction_script("a b c = triangle a b c", &cat).unwrap();
        let fig =
            crate::builder::build_figure(&script, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(1), 4)
                .unwrap();
        let e = EnumProposer::new(&cat, tol);
        let cands = e.candidates(&fig);
        let foot = cands
            .iter()
            .find(|(c, _)| c.name == "foot" && c.args == ["a", "b", "c"])
            .unwrap()
            .1;
        let gp: Vec<usize> = (0..3).collect();
        let free = Point {
            x: 0.3141,
            y: -0.2718,
        };
        assert!(
            coincidence_score(&fig, foot, &gp, &tol) > coincidence_score(&fig, free, &gp, &tol)
        );
        // small figures only admit constructions with few inputs
        let two = crate::builder::build_figure(
            &parse_construction_script("a b = segment a b", &cat).unwrap(),
            &cat,
            &tol,
            &mut ChaCha8Rng::seed_from_u64(1),
            4,
        )
        .unwrap();
        assert!(e.candidates(&two).iter().all(|(c, _)| c.args.len() <= 2));
    }

    #[test]
    fn bad_proposals_are_skipped() {
        let p = parse_problem(FIG2).unwrap();
        let cat = Catalog::default_catalog();
        let junk = [
            "",
            "h",
            "h : ;;",
            "a : coll a b c",
            "h : perp a b c d",
            "h = nope h a",
            "h : coll a d h, perp a d h e, cong a b c d",
            "h = midpoint h a a",
            "h : cong h a h b, cong h a h c, cong h a h d",
        ];
        let mut fixed = FixedProposer(
            junk.iter()
                .map(|c| Proposal {
                    score: 1.0,
                    clause: c.to_string(),
                })
                .collect(),
        );
        let b = SearchBudget {
            proposals: junk.len(),
            ..small()
        };
        let o = solve(
            &p,
            &cat,
            &RuleSet::default_rules(),
            &mut fixed,
            &b,
            0,
            &NoClock,
        )
        .unwrap();
        assert!(!o.solved());
        assert_eq!(o.invalid, junk.len());
    }
}
