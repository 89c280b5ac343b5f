//! Proof extraction: the facts a goal depends on, the clauses they come
//! from, and the record that replays them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::engine::ar::{is_angle_goal, minimize_deps};
use crate::engine::{Engine, FactId, Key, Source};
use crate::figure::Figure;
use crate::lang::{
    NumericCheck, PremiseClause, Problem, ProofStep, Record, ANGLE_CHASE, RATIO_CHASE,
};
use crate::statement::{Predicate, Rational};

/// The facts a goal depends on, each list in id order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofDag {
    pub premises: Vec<FactId>,
    pub checks: Vec<FactId>,
    pub steps: Vec<FactId>,
    /// Dependencies actually used by each step, after chase minimization.
    pub deps: BTreeMap<FactId, Vec<FactId>>,
}

/// Dependencies of a derived fact; chase steps keep only what the chase needs.
pub fn step_deps(engine: &Engine<'_>, id: FactId) -> Vec<FactId> {
    let db = engine.db();
    let f = db.get(id);
    match f.source {
        Source::AngleChase | Source::RatioChase => {
            let ds: Vec<(FactId, Predicate, &[u8], Option<&Rational>)> = f
                .deps
                .iter()
                .map(|&d| {
                    (
                        d,
                        db.get(d).pred,
                        db.get(d).args(),
                        db.get(d).literal.as_ref(),
                    )
                })
                .collect();
            let angle = f.source == Source::AngleChase;
            debug_assert!(!angle || is_angle_goal(f.pred));
            minimize_deps(&ds, (f.pred, f.args(), f.literal.as_ref()), angle)
        }
        _ => f.deps.clone(),
    }
}

/// Backward reachability from the goal.
pub fn trace(engine: &Engine<'_>, goal: FactId) -> ProofDag {
    let db = engine.db();
    let mut dag = ProofDag::default();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![goal];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        match db.get(id).source {
            Source::Premise => dag.premises.push(id),
            Source::NumericCheck => dag.checks.push(id),
            _ => {
                let d = step_deps(engine, id);
                stack.extend(d.iter().copied());
                dag.steps.push(id);
                dag.deps.insert(id, d);
            }
        }
    }
    dag.premises.sort_unstable();
    dag.checks.sort_unstable();
    dag.steps.sort_unstable();
    dag
}

/// Clause indices that a clause needs to be stated: the clauses creating
/// the points it mentions.
fn clause_parents(fig: &Figure, ci: usize) -> BTreeSet<usize> {
    let c = &fig.clauses()[ci];
    let mut out = BTreeSet::new();
    let mentioned = c
        .constructions
        .iter()
        .flat_map(|k| k.args.iter())
        .chain(c.statements.iter().flat_map(|s| s.args.iter()));
    for p in mentioned {
        if let Some(pc) = fig.provenance(p) {
            if pc != ci {
                out.insert(pc);
            }
        }
    }
    out
}

/// Closes a clause set under the clauses needed to state it.
pub fn clause_closure(fig: &Figure, seed: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<usize> = seed.into_iter().collect();
    while let Some(c) = stack.pop() {
        if out.insert(c) {
            stack.extend(clause_parents(fig, c));
        }
    }
    out
}

/// Which clause introduced each premise fact.
fn premise_clauses(engine: &Engine<'_>) -> BTreeMap<FactId, usize> {
    let fig = engine.figure();
    let mut out = BTreeMap::new();
    for (ci, c) in fig.clauses().iter().enumerate() {
        for s in &c.statements {
            if let Ok(args) = engine.indices(s) {
                if let Some(id) = engine.db().lookup(s.predicate, &args, s.literal) {
                    out.entry(id).or_insert(ci);
                }
            }
        }
    }
    out
}

/// Which clauses form the problem statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemScope {
    /// The clauses needed to state the goal's points.
    GoalPoints,
    /// The first `n` clauses: the problem as given, before proposals.
    Given(usize),
}

/// Builds the record proving `goal`. None when the proof uses no premise.
pub fn build_record(engine: &Engine<'_>, goal: FactId, scope: ProblemScope) -> Option<Record> {
    let fig = engine.figure();
    let db = engine.db();
    let dag = trace(engine, goal);
    if dag.premises.is_empty() {
        return None;
    }
    let origin = premise_clauses(engine);
    let used: BTreeSet<usize> = dag
        .premises
        .iter()
        .filter_map(|p| origin.get(p).copied())
        .collect();
    let goal_stmt = engine.statement(goal);
    let r: BTreeSet<usize> = match scope {
        ProblemScope::GoalPoints => {
            clause_closure(fig, goal_stmt.args.iter().filter_map(|p| fig.provenance(p)))
        }
        ProblemScope::Given(n) => (0..n.min(fig.clauses().len())).collect(),
    };
    let k = clause_closure(fig, used.iter().copied().chain(r.iter().copied()));

    let mut map: BTreeMap<Key, u32> = BTreeMap::new();
    let mut next = 0u32;
    let clause_of = |ci: usize, next: &mut u32, map: &mut BTreeMap<Key, u32>| -> PremiseClause {
        let pc = fig.clauses()[ci].to_premise_clause(*next);
        for p in &pc.statements {
            if let Ok(args) = engine.indices(&p.statement) {
                if let Some(id) = db.lookup(p.statement.predicate, &args, p.statement.literal) {
                    map.entry(*db.canonical(id)).or_insert(*next);
                }
            }
            *next += 1;
        }
        pc
    };
    let problem_clauses: Vec<PremiseClause> = r
        .iter()
        .map(|&ci| clause_of(ci, &mut next, &mut map))
        .collect();
    let aux: Vec<PremiseClause> = k
        .difference(&r)
        .map(|&ci| clause_of(ci, &mut next, &mut map))
        .collect();

    let mut numerical_checks = Vec::new();
    for &c in &dag.checks {
        map.insert(*db.canonical(c), next);
        numerical_checks.push(NumericCheck {
            statement: engine.statement(c),
            id: next,
        });
        next += 1;
    }
    let mut proof = Vec::new();
    for &s in &dag.steps {
        let deps: Option<Vec<u32>> = dag.deps[&s]
            .iter()
            .map(|d| map.get(db.canonical(*d)).copied())
            .collect();
        let rule = match db.get(s).source {
            Source::AngleChase => ANGLE_CHASE.to_string(),
            Source::RatioChase => RATIO_CHASE.to_string(),
            Source::Rule(ri) => engine.rules().get(ri as usize).name().to_string(),
            Source::Premise | Source::NumericCheck => unreachable!("steps are derived facts"),
        };
        map.insert(*db.canonical(s), next);
        proof.push(ProofStep {
            conclusion: engine.statement(s),
            id: next,
            rule,
            deps: deps?,
        });
        next += 1;
    }
    Some(Record {
        problem: Problem {
            clauses: problem_clauses,
            goal: goal_stmt,
        },
        aux,
        numerical_checks,
        proof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_problem_figure;
    use crate::catalog::Catalog;
    use crate::engine::replay::check_record;
    use crate::engine::{EngineConfig, NoClock, RuleSet};
    use crate::lang::{parse_problem, serialize_record};
    use crate::numeric::Tolerances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FIG2: &str = "a : ; b : ; c : ; d : coll b c d [000] ;
e : eqangle a d d e d e b d [001] eqangle a b a e a e a d [002] ;
f : coll a b f [003] perp a b f e [004] ;
g : coll b d g [005] perp b d g e [006] ;
h : coll a d h [007] perp a d h e [008]
? cong f e g e";

    fn solved() -> (crate::figure::Figure, RuleSet, crate::statement::Statement) {
        let p = parse_problem(FIG2).unwrap();
        let fig = build_problem_figure(
            &p,
            &Catalog::default_catalog(),
            &Tolerances::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
            16,
        )
        .unwrap();
        (fig, RuleSet::default_rules(), p.goal)
    }

    #[test]
    fn figure2_record() {
        let (fig, rules, goal) = solved();
        let mut e = Engine::new(&fig, &rules, EngineConfig::default()).unwrap();
        e.saturate(&NoClock);
        let id = e.query(&goal).unwrap();
        for scope in [ProblemScope::Given(7), ProblemScope::GoalPoints] {
            let rec = build_record(&e, id, scope).unwrap();
            assert_eq!(rec.aux.len(), 1, "{}", serialize_record(&rec).unwrap());
            assert_eq!(rec.aux[0].points, ["h"]);
            assert_eq!(rec.numerical_checks.len(), 2);
            for n in &rec.numerical_checks {
                assert_eq!(n.statement.predicate, Predicate::SameClock);
            }
            assert_eq!(check_record(&rec, &rules), Ok(()));
            assert_eq!(rec.problem.clauses.len(), 7);
        }
    }

    #[test]
    fn premise_goal_has_empty_proof() {
        let (fig, rules, _) = solved();
        let mut e = Engine::new(&fig, &rules, EngineConfig::default()).unwrap();
        let g = crate::statement::Statement::from_strs(Predicate::Perp, &["a", "b", "f", "e"]);
        let id = e.query(&g).unwrap();
        let rec = build_record(&e, id, ProblemScope::GoalPoints).unwrap();
        assert!(rec.proof.is_empty());
        assert!(rec.aux.is_empty());
        assert_eq!(check_record(&rec, &rules), Ok(()));
    }

    #[test]
    fn closure_follows_point_origins() {
        let (fig, _, _) = solved();
        // clause f (index 5) mentions a, b, e; e needs a, b, d; d needs b, c
        let c = clause_closure(&fig, [5]);
        assert_eq!(c.into_iter().collect::<Vec<_>>(), [0, 1, 2, 3, 4, 5]);
    }
}
