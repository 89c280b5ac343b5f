//! Symbolic replay of a record: every proof step must follow from exactly
//! its cited facts by its cited rule.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ar::chase_proves;
use super::fact::{canonical_key, Fact, FactDb, Key, Source};
use super::{matcher, RuleSet, RuleStats};
use crate::lang::{lint_record, Record, RecordError, ANGLE_CHASE, RATIO_CHASE};
use crate::statement::{Predicate, Rational, Statement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckError {
    Record(RecordError),
    UnknownPoint(String),
    TooManyPoints,
    ArityMismatch(u32),
    NotSameclock(u32),
    UnknownRule { step: u32, rule: String },
    NotDerived { step: u32 },
    GoalMismatch,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::Record(e) => write!(f, "malformed record: {e}"),
            CheckError::UnknownPoint(p) => write!(f, "undeclared point `{p}`"),
            CheckError::TooManyPoints => f.write_str("too many points"),
            CheckError::ArityMismatch(id) => write!(f, "[{id:03}] has the wrong number of points"),
            CheckError::NotSameclock(id) => {
                write!(f, "numerical check [{id:03}] is not a sameclock fact")
            }
            CheckError::UnknownRule { step, rule } => {
                write!(f, "step [{step:03}] cites unknown rule `{rule}`")
            }
            CheckError::NotDerived { step } => {
                write!(f, "step [{step:03}] does not follow from its dependencies")
            }
            CheckError::GoalMismatch => f.write_str("the proof does not end in the goal"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CheckError {}

type Indexed = (Predicate, [u8; 8], Option<Rational>);

fn index(s: &Statement, names: &BTreeMap<&str, u8>, id: u32) -> Result<Indexed, CheckError> {
    if s.args.len() != s.predicate.arity() {
        return Err(CheckError::ArityMismatch(id));
    }
    let mut a = [0u8; 8];
    for (slot, n) in a.iter_mut().zip(&s.args) {
        *slot = *names
            .get(n.as_str())
            .ok_or_else(|| CheckError::UnknownPoint(n.clone()))?;
    }
    Ok((s.predicate, a, s.literal))
}

fn key(x: &Indexed) -> Key {
    canonical_key(x.0, &x.1, x.2)
}

/// Checks a record against a rule set without any coordinates.
pub fn check_record(rec: &Record, rules: &RuleSet) -> Result<(), CheckError> {
    lint_record(rec).map_err(CheckError::Record)?;
    let mut names: BTreeMap<&str, u8> = BTreeMap::new();
    let points = rec.problem.points().chain(
        rec.aux
            .iter()
            .flat_map(|c| c.points.iter().map(|p| p.as_str())),
    );
    for p in points {
        let n = names.len();
        if n >= super::MAX_POINTS {
            return Err(CheckError::TooManyPoints);
        }
        names.entry(p).or_insert(n as u8);
    }
    let mut stmts: Vec<Indexed> = Vec::new();
    for (id, s) in rec.statements() {
        stmts.push(index(s, &names, id.unwrap_or(0))?);
    }
    for n in &rec.numerical_checks {
        if n.statement.predicate != Predicate::SameClock {
            return Err(CheckError::NotSameclock(n.id));
        }
    }
    for step in &rec.proof {
        let concl = &stmts[step.id as usize];
        let deps: Vec<&Indexed> = step.deps.iter().map(|&d| &stmts[d as usize]).collect();
        let ok = if step.rule == ANGLE_CHASE || step.rule == RATIO_CHASE {
            let angle = step.rule == ANGLE_CHASE;
            let d: Vec<(u32, Predicate, &[u8], Option<&Rational>)> = step
                .deps
                .iter()
                .zip(&deps)
                .map(|(&i, x)| (i, x.0, &x.1[..x.0.arity()], x.2.as_ref()))
                .collect();
            chase_proves(
                &d,
                (concl.0, &concl.1[..concl.0.arity()], concl.2.as_ref()),
                angle,
            )
        } else {
            let ri = rules
                .index_of(&step.rule)
                .ok_or_else(|| CheckError::UnknownRule {
                    step: step.id,
                    rule: step.rule.clone(),
                })?;
            derives(rules, ri, &deps, concl)
        };
        if !ok {
            return Err(CheckError::NotDerived { step: step.id });
        }
    }
    let goal = index(&rec.problem.goal, &names, u32::MAX)?;
    let goal_key = key(&goal);
    let proved = match rec.proof.last() {
        Some(last) => key(&stmts[last.id as usize]) == goal_key,
        None => {
            let n_premises = rec.problem.premise_statements().count()
                + rec.aux.iter().map(|c| c.statements.len()).sum::<usize>();
            stmts[..n_premises].iter().any(|s| key(s) == goal_key)
        }
    };
    if proved {
        Ok(())
    } else {
        Err(CheckError::GoalMismatch)
    }
}

/// Whether the rule, matched against only `deps`, concludes `concl`.
fn derives(rules: &RuleSet, ri: usize, deps: &[&Indexed], concl: &Indexed) -> bool {
    let rule = rules.get(ri);
    let mut db = FactDb::new();
    for d in deps {
        db.insert(Fact {
            pred: d.0,
            args: d.1,
            literal: d.2,
            source: Source::Premise,
            deps: Vec::new(),
            round: 0,
        });
    }
    let target = key(concl);
    let mut st = RuleStats::default();
    matcher::partial(rule, &db, db.len(), &mut st)
        .iter()
        .any(|b| {
            let guarded = rule.guards.iter().all(|g| {
                let a = g.instantiate(b);
                db.lookup(g.pred, &a[..g.pred.arity()], None).is_some()
            });
            guarded
                && rule.conclusions.iter().any(|c| {
                    let a = c.instantiate(b);
                    canonical_key(c.pred, &a, c.literal) == target
                })
        })
}
