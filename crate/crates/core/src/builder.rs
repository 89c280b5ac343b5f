//! Building validated figures from construction scripts and problem clauses.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::catalog::{
    locus_of, point_on_locus, prerequisite_holds, sketch_points, Catalog, Category,
    ConstructionDef, SketchError, MAX_COORD,
};
use crate::figure::{Figure, FigureClause};
use crate::lang::{Construction, Problem, Template};
use crate::numeric::{eval_points, intersect, Point, Tolerances};
use crate::statement::{permute, Statement};

pub const DEFAULT_MAX_RETRIES: usize = 16;

/// New points closer than this to an existing point are rejected.
pub const MIN_SEPARATION: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildFailure {
    NameCollision(String),
    UnknownPoint(String),
    UnknownConstruction(String),
    /// A prerequisite of the named construction does not hold.
    PrerequisiteFailed(String),
    NumericallyInfeasible,
    /// No catalog construction produces the clause's statements.
    UnrecognizedClause,
}

impl fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildFailure::NameCollision(p) => write!(f, "point `{p}` already exists"),
            BuildFailure::UnknownPoint(p) => write!(f, "unknown point `{p}`"),
            BuildFailure::UnknownConstruction(c) => write!(f, "unknown construction `{c}`"),
            BuildFailure::PrerequisiteFailed(c) => write!(f, "prerequisite of `{c}` fails"),
            BuildFailure::NumericallyInfeasible => f.write_str("numerically infeasible"),
            BuildFailure::UnrecognizedClause => f.write_str("clause matches no construction"),
        }
    }
}

impl BuildFailure {
    /// Failures that no amount of resampling can fix.
    fn is_logical(&self) -> bool {
        matches!(
            self,
            BuildFailure::NameCollision(_)
                | BuildFailure::UnknownPoint(_)
                | BuildFailure::UnknownConstruction(_)
                | BuildFailure::UnrecognizedClause
        )
    }
}

impl From<SketchError> for BuildFailure {
    fn from(_: SketchError) -> Self {
        BuildFailure::NumericallyInfeasible
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildError {
    pub step: usize,
    pub reason: BuildFailure,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "build failed at step {}: {}", self.step, self.reason)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BuildError {}

/// Points placed so far while applying one clause.
struct Scratch<'a> {
    fig: &'a Figure,
    new: Vec<(String, Point)>,
}

impl Scratch<'_> {
    fn get(&self, name: &str) -> Option<Point> {
        self.fig
            .point(name)
            .or_else(|| self.new.iter().find(|(n, _)| n == name).map(|(_, p)| *p))
    }

    fn exists(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Coordinates by definition slot; output slots not yet placed are zero.
    fn slots(&self, def: &ConstructionDef, c: &Construction) -> Result<Vec<Point>, BuildFailure> {
        let mut out = Vec::with_capacity(c.outs.len() + c.args.len());
        for o in &c.outs {
            out.push(self.get(o).unwrap_or_default());
        }
        for a in &c.args {
            out.push(
                self.get(a)
                    .ok_or_else(|| BuildFailure::UnknownPoint(a.clone()))?,
            );
        }
        debug_assert_eq!(out.len(), def.out_arity() + def.in_arity());
        Ok(out)
    }
}

fn check_one(
    c: &Construction,
    def: &ConstructionDef,
    s: &Scratch<'_>,
    tol: &Tolerances,
) -> Result<(), BuildFailure> {
    if c.outs.len() != def.out_arity() || c.args.len() != def.in_arity() {
        return Err(BuildFailure::UnknownConstruction(c.name.clone()));
    }
    for (i, o) in c.outs.iter().enumerate() {
        if s.exists(o) || c.outs[..i].contains(o) {
            return Err(BuildFailure::NameCollision(o.clone()));
        }
    }
    let p = s.slots(def, c)?;
    if def
        .prerequisites
        .iter()
        .all(|pre| prerequisite_holds(def, pre, &p, tol))
    {
        Ok(())
    } else {
        Err(BuildFailure::PrerequisiteFailed(c.name.clone()))
    }
}

/// Whether `c` can be applied to `fig`: names are fresh, arguments exist and
/// every prerequisite holds numerically. The error names the reason.
pub fn prerequisite_check(
    c: &Construction,
    catalog: &Catalog,
    fig: &Figure,
    tol: &Tolerances,
) -> Result<(), BuildFailure> {
    let def = catalog
        .get(&c.name)
        .ok_or_else(|| BuildFailure::UnknownConstruction(c.name.clone()))?;
    check_one(
        c,
        def,
        &Scratch {
            fig,
            new: Vec::new(),
        },
        tol,
    )
}

pub fn check_prerequisites(
    c: &Construction,
    catalog: &Catalog,
    fig: &Figure,
    tol: &Tolerances,
) -> bool {
    prerequisite_check(c, catalog, fig, tol).is_ok()
}

/// The added predicates of a construction, instantiated on its points.
pub fn instantiate_added(c: &Construction, def: &ConstructionDef) -> Vec<Statement> {
    let names: Vec<&String> = c.outs.iter().chain(&c.args).collect();
    def.added
        .iter()
        .map(|t| {
            let args = t
                .args
                .iter()
                .map(|v| {
                    let slot = def.variables().position(|x| x == v).unwrap_or(0);
                    names[slot].clone()
                })
                .collect();
            Statement {
                predicate: t.predicate,
                args,
                literal: t.literal,
            }
        })
        .collect()
}

/// Groups a script into clauses: one construction each, except that
/// consecutive INTERSECT constructions on the same output form one clause.
pub fn group_script(script: &[Construction]) -> Vec<Vec<Construction>> {
    let mut out: Vec<Vec<Construction>> = Vec::new();
    for c in script {
        if let Some(last) = out.last_mut() {
            let pairable = last.len() == 1
                && last[0].category == Category::Intersect
                && c.category == Category::Intersect
                && last[0].outs == c.outs;
            if pairable {
                last.push(c.clone());
                continue;
            }
        }
        out.push(alloc::vec![c.clone()]);
    }
    out
}

/// The figure clause for one group of constructions, statements instantiated.
pub fn clause_for(group: &[Construction], catalog: &Catalog) -> Result<FigureClause, BuildFailure> {
    let mut points: Vec<String> = Vec::new();
    let mut statements = Vec::new();
    for c in group {
        let def = catalog
            .get(&c.name)
            .ok_or_else(|| BuildFailure::UnknownConstruction(c.name.clone()))?;
        for o in &c.outs {
            if !points.contains(o) {
                points.push(o.clone());
            }
        }
        statements.extend(instantiate_added(c, def));
    }
    Ok(FigureClause {
        points,
        constructions: group.to_vec(),
        statements,
    })
}

fn separated(p: Point, s: &Scratch<'_>) -> bool {
    p.is_finite()
        && p.norm() < MAX_COORD
        && s.fig
            .coords()
            .iter()
            .chain(s.new.iter().map(|(_, q)| q))
            .all(|q| q.dist(p) >= MIN_SEPARATION)
}

/// Places the clause's points on `fig` and checks its statements. The figure
/// is unchanged on error.
pub fn apply_clause<R: Rng + ?Sized>(
    fig: &mut Figure,
    clause: FigureClause,
    catalog: &Catalog,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<(), BuildFailure> {
    let mut s = Scratch {
        fig,
        new: Vec::new(),
    };
    let cons = &clause.constructions;
    let mut i = 0;
    while i < cons.len() {
        let c = &cons[i];
        let def = catalog
            .get(&c.name)
            .ok_or_else(|| BuildFailure::UnknownConstruction(c.name.clone()))?;
        check_one(c, def, &s, tol)?;
        let slots = s.slots(def, c)?;
        let recipe_pts: Vec<Point> = def.recipe.slots.iter().map(|&k| slots[k]).collect();
        let placed: Vec<Point> = match def.category {
            Category::Basic | Category::BasicFree | Category::Others => {
                sketch_points(def.recipe.kind, &recipe_pts, rng)?
            }
            Category::Intersect => {
                let l1 = locus_of(def.recipe.kind, &recipe_pts)
                    .ok_or(BuildFailure::NumericallyInfeasible)?;
                let partner = cons
                    .get(i + 1)
                    .filter(|n| n.category == Category::Intersect && n.outs == c.outs);
                match partner {
                    Some(n) => {
                        let d2 = catalog
                            .get(&n.name)
                            .ok_or_else(|| BuildFailure::UnknownConstruction(n.name.clone()))?;
                        check_one(n, d2, &s, tol)?;
                        let slots2 = s.slots(d2, n)?;
                        let rp2: Vec<Point> = d2.recipe.slots.iter().map(|&k| slots2[k]).collect();
                        let l2 = locus_of(d2.recipe.kind, &rp2)
                            .ok_or(BuildFailure::NumericallyInfeasible)?;
                        let sols: Vec<Point> = intersect(&l1, &l2)
                            .into_iter()
                            .filter(|p| separated(*p, &s))
                            .collect();
                        if sols.is_empty() {
                            return Err(BuildFailure::NumericallyInfeasible);
                        }
                        i += 1;
                        alloc::vec![sols[rng.gen_range(0..sols.len())]]
                    }
                    None => alloc::vec![point_on_locus(&l1, rng)],
                }
            }
        };
        for (o, p) in c.outs.iter().zip(placed) {
            if !separated(p, &s) {
                return Err(BuildFailure::NumericallyInfeasible);
            }
            s.new.push((o.clone(), p));
        }
        i += 1;
    }
    for p in &clause.points {
        if !s.new.iter().any(|(n, _)| n == p) {
            return Err(BuildFailure::UnrecognizedClause);
        }
    }
    for st in &clause.statements {
        let mut pts = Vec::with_capacity(st.args.len());
        for a in &st.args {
            pts.push(
                s.get(a)
                    .ok_or_else(|| BuildFailure::UnknownPoint(a.clone()))?,
            );
        }
        if eval_points(st.predicate, &pts, st.literal.as_ref(), tol) != Ok(true) {
            return Err(BuildFailure::NumericallyInfeasible);
        }
    }
    let coords: Vec<Point> = clause
        .points
        .iter()
        .map(|p| {
            s.new
                .iter()
                .find(|(n, _)| n == p)
                .map(|(_, q)| *q)
                .unwrap_or_default()
        })
        .collect();
    fig.push_clause(clause, &coords);
    Ok(())
}

fn build_clauses<R: Rng + ?Sized>(
    clauses: &[FigureClause],
    catalog: &Catalog,
    tol: &Tolerances,
    rng: &mut R,
    max_retries: usize,
) -> Result<Figure, BuildError> {
    let mut last = BuildError {
        step: 0,
        reason: BuildFailure::NumericallyInfeasible,
    };
    for _ in 0..=max_retries {
        let mut fig = Figure::new();
        let mut failed = None;
        for (step, c) in clauses.iter().enumerate() {
            if let Err(reason) = apply_clause(&mut fig, c.clone(), catalog, tol, rng) {
                failed = Some(BuildError { step, reason });
                break;
            }
        }
        match failed {
            None => {
                fig.normalize();
                return Ok(fig);
            }
            Some(e) if e.reason.is_logical() => return Err(e),
            Some(e) => last = e,
        }
    }
    Err(last)
}

/// Builds a figure from a construction script, resampling the whole script
/// up to `max_retries` times. The result is normalized.
pub fn build_figure<R: Rng + ?Sized>(
    script: &[Construction],
    catalog: &Catalog,
    tol: &Tolerances,
    rng: &mut R,
    max_retries: usize,
) -> Result<Figure, BuildError> {
    let mut clauses = Vec::new();
    for (step, g) in group_script(script).iter().enumerate() {
        clauses.push(clause_for(g, catalog).map_err(|reason| BuildError { step, reason })?);
    }
    build_clauses(&clauses, catalog, tol, rng, max_retries)
}

type Binding = BTreeMap<String, String>;

fn unify(t: &Template, s: &Statement, b: &Binding) -> Vec<Binding> {
    let mut out = Vec::new();
    if t.predicate != s.predicate || t.literal != s.literal {
        return out;
    }
    'perm: for perm in s.predicate.symmetries() {
        let args = permute(&s.args, perm);
        let mut nb = b.clone();
        for (v, a) in t.args.iter().zip(&args) {
            match nb.get(v) {
                Some(x) if x != a => continue 'perm,
                Some(_) => {}
                None => {
                    if nb.values().any(|x| x == a) {
                        continue 'perm;
                    }
                    nb.insert(v.clone(), a.clone());
                }
            }
        }
        if !out.contains(&nb) {
            out.push(nb);
        }
    }
    out
}

fn unify_all(
    ts: &[Template],
    ss: &[Statement],
    used: &mut Vec<bool>,
    b: Binding,
) -> Option<Binding> {
    let Some((t, rest)) = ts.split_first() else {
        return Some(b);
    };
    for i in 0..ss.len() {
        if used[i] {
            continue;
        }
        for nb in unify(t, &ss[i], &b) {
            used[i] = true;
            if let Some(r) = unify_all(rest, ss, used, nb) {
                return Some(r);
            }
            used[i] = false;
        }
    }
    None
}

fn try_def(def: &ConstructionDef, outs: &[String], stmts: &[Statement]) -> Option<Construction> {
    if def.added.len() != stmts.len() || def.out_arity() != outs.len() {
        return None;
    }
    let mut seed = Binding::new();
    for (v, o) in def.outputs.iter().zip(outs) {
        seed.insert(v.clone(), o.clone());
    }
    let b = unify_all(
        &def.added,
        stmts,
        &mut alloc::vec![false; stmts.len()],
        seed,
    )?;
    let args: Option<Vec<String>> = def.inputs.iter().map(|v| b.get(v).cloned()).collect();
    Some(Construction {
        name: def.name.clone(),
        outs: outs.to_vec(),
        args: args?,
        category: def.category,
    })
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return alloc::vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// Finds constructions whose added predicates are exactly the clause's
/// statements, up to statement symmetry.
pub fn recognize_clause(
    points: &[String],
    stmts: &[Statement],
    catalog: &Catalog,
) -> Option<Vec<Construction>> {
    let free = |p: &String| Construction {
        name: "free".to_string(),
        outs: alloc::vec![p.clone()],
        args: Vec::new(),
        category: Category::BasicFree,
    };
    if stmts.is_empty() {
        catalog.get("free")?;
        return Some(points.iter().map(free).collect());
    }
    if points.len() == 1 {
        for def in catalog.of_category(Category::Others) {
            if let Some(c) = try_def(def, points, stmts) {
                return Some(alloc::vec![c]);
            }
        }
        if stmts.len() <= 2 {
            let mut found = Vec::new();
            for s in stmts {
                let c = catalog
                    .of_category(Category::Intersect)
                    .find_map(|def| try_def(def, points, core::slice::from_ref(s)))?;
                found.push(c);
            }
            return Some(found);
        }
        return None;
    }
    for def in catalog.of_category(Category::Basic) {
        for perm in permutations(points) {
            if let Some(c) = try_def(def, &perm, stmts) {
                return Some(alloc::vec![c]);
            }
        }
    }
    None
}

/// Recognizes every clause of a problem as constructions; statements keep
/// their problem form.
pub fn problem_clauses(
    problem: &Problem,
    catalog: &Catalog,
) -> Result<Vec<FigureClause>, BuildError> {
    problem
        .clauses
        .iter()
        .enumerate()
        .map(|(step, c)| {
            let stmts: Vec<Statement> = c.statements.iter().map(|p| p.statement.clone()).collect();
            let constructions = recognize_clause(&c.points, &stmts, catalog).ok_or(BuildError {
                step,
                reason: BuildFailure::UnrecognizedClause,
            })?;
            Ok(FigureClause {
                points: c.points.clone(),
                constructions,
                statements: stmts,
            })
        })
        .collect()
}

/// Builds the figure of a problem file.
pub fn build_problem_figure<R: Rng + ?Sized>(
    problem: &Problem,
    catalog: &Catalog,
    tol: &Tolerances,
    rng: &mut R,
    max_retries: usize,
) -> Result<Figure, BuildError> {
    let clauses = problem_clauses(problem, catalog)?;
    let fig = build_clauses(&clauses, catalog, tol, rng, max_retries)?;
    let goal_ok = crate::figure::eval_statement(&problem.goal, &fig, tol);
    if goal_ok != Ok(true) {
        return Err(BuildError {
            step: clauses.len(),
            reason: BuildFailure::NumericallyInfeasible,
        });
    }
    Ok(fig)
}

/// A copy of `fig` with one more clause, resampling only that clause.
pub fn extend_figure<R: Rng + ?Sized>(
    fig: &Figure,
    clause: &FigureClause,
    catalog: &Catalog,
    tol: &Tolerances,
    rng: &mut R,
    max_retries: usize,
) -> Result<Figure, BuildFailure> {
    let mut last = BuildFailure::NumericallyInfeasible;
    for _ in 0..=max_retries {
        let mut f = fig.clone();
        match apply_clause(&mut f, clause.clone(), catalog, tol, rng) {
            Ok(()) => return Ok(f),
            Err(e) if e.is_logical() => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figure::eval_statement;
    use crate::lang::{parse_construction_script, parse_problem};
    use crate::statement::Predicate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FIG2: &str = "a : ; b : ; c : ; d : coll b c d [000] ;
e : eqangle a d d e d e b d [001] eqangle a b a e a e a d [002] ;
f : coll a b f [003] perp a b f e [004] ;
g : coll b d g [005] perp b d g e [006]
? cong f e g e";

    #[test]
    fn orthocenter_script() {
        let cat = Catalog::default_catalog();
        let script =
            parse_construction_script("a b c = triangle a b c\nx = orthocenter x a b c", &cat)
                .unwrap();
        let tol = Tolerances::default();
        let fig = build_figure(&script, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(1), 16).unwrap();
        assert_eq!(fig.len(), 4);
        let perp1 = Statement::from_strs(Predicate::Perp, &["a", "x", "b", "c"]);
        let perp2 = Statement::from_strs(Predicate::Perp, &["b", "x", "a", "c"]);
        assert_eq!(eval_statement(&perp1, &fig, &tol), Ok(true));
        assert_eq!(eval_statement(&perp2, &fig, &tol), Ok(true));
    }

    #[test]
    fn collinear_orthocenter_rejected() {
        let cat = Catalog::default_catalog();
        let script = parse_construction_script(
            "a b = segment a b\nc = on_line c a b\nx = orthocenter x a b c",
            &cat,
        )
        .unwrap();
        let tol = Tolerances::default();
        let e =
            build_figure(&script, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(1), 4).unwrap_err();
        assert_eq!(e.step, 2);
        assert_eq!(
            e.reason,
            BuildFailure::PrerequisiteFailed("orthocenter".into())
        );
    }

    #[test]
    fn name_collision_and_free() {
        let cat = Catalog::default_catalog();
        let tol = Tolerances::default();
        let script = parse_construction_script("a = free a", &cat).unwrap();
        let fig = build_figure(&script, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(1), 0).unwrap();
        assert!(check_prerequisites(
            &parse_construction_script("b = free b", &cat).unwrap()[0],
            &cat,
            &fig,
            &tol
        ));
        let again = &parse_construction_script("a = free a", &cat).unwrap()[0];
        assert_eq!(
            prerequisite_check(again, &cat, &fig, &tol),
            Err(BuildFailure::NameCollision("a".into()))
        );
    }

    #[test]
    fn disjoint_intersect_pair_fails() {
        let cat = Catalog::default_catalog();
        let tol = Tolerances::default();
        // a circle of radius |oa| around o cannot meet a circle around o of radius |ob| when |oa| != |ob|
        let script = parse_construction_script(
            "o a b = triangle o a b\nx = on_circle x o a, on_circle x o b",
            &cat,
        )
        .unwrap();
        let e =
            build_figure(&script, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(3), 5).unwrap_err();
        assert_eq!(e.reason, BuildFailure::NumericallyInfeasible);
        assert!(
            build_figure(&[], &cat, &tol, &mut ChaCha8Rng::seed_from_u64(3), 5)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn figure2_clauses_recognized() {
        let cat = Catalog::default_catalog();
        let p = parse_problem(FIG2).unwrap();
        let cl = problem_clauses(&p, &cat).unwrap();
        assert_eq!(cl[3].constructions[0].name, "on_line");
        assert_eq!(cl[4].constructions[0].name, "incenter");
        assert_eq!(cl[5].constructions[0].name, "foot");
        let tol = Tolerances::default();
        let fig =
            build_problem_figure(&p, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(0), 16).unwrap();
        assert_eq!(fig.len(), 7);
        for s in fig.premises() {
            assert_eq!(eval_statement(s, &fig, &tol), Ok(true), "{s}");
        }
    }

    #[test]
    fn same_seed_same_figure() {
        let cat = Catalog::default_catalog();
        let tol = Tolerances::default();
        let p = parse_problem(FIG2).unwrap();
        let f1 =
            build_problem_figure(&p, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(9), 16).unwrap();
        let f2 =
            build_problem_figure(&p, &cat, &tol, &mut ChaCha8Rng::seed_from_u64(9), 16).unwrap();
        assert_eq!(f1, f2);
    }
}
