//! Built figures: named points with coordinates and the clauses that placed them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::lang::{Construction, Premise, PremiseClause, Problem};
use crate::numeric::{eval_points, NumericError, Point, Tolerances};
use crate::statement::{Predicate, Rational, Statement};

/// One clause of a figure: the points it introduced, the constructions that
/// placed them and the premise statements it contributes.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureClause {
    pub points: Vec<String>,
    pub constructions: Vec<Construction>,
    pub statements: Vec<Statement>,
}

impl FigureClause {
    pub fn to_premise_clause(&self, first_id: u32) -> PremiseClause {
        PremiseClause {
            points: self.points.clone(),
            statements: self
                .statements
                .iter()
                .enumerate()
                .map(|(i, s)| Premise {
                    statement: s.clone(),
                    id: Some(first_id + i as u32),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Figure {
    names: Vec<String>,
    coords: Vec<Point>,
    index: BTreeMap<String, usize>,
    provenance: Vec<usize>,
    clauses: Vec<FigureClause>,
}

impl Figure {
    pub fn new() -> Self {
        Figure::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn clauses(&self) -> &[FigureClause] {
        &self.clauses
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn point(&self, name: &str) -> Option<Point> {
        self.index_of(name).map(|i| self.coords[i])
    }

    /// Index of the clause that created the point.
    pub fn provenance(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.provenance[i])
    }

    /// Premise statements in id order.
    pub fn premises(&self) -> impl Iterator<Item = &Statement> {
        self.clauses.iter().flat_map(|c| c.statements.iter())
    }

    /// Appends a clause with given coordinates, without any checks.
    pub fn push_clause(&mut self, clause: FigureClause, coords: &[Point]) {
        debug_assert_eq!(clause.points.len(), coords.len());
        let ci = self.clauses.len();
        for (name, p) in clause.points.iter().zip(coords) {
            self.index.insert(name.clone(), self.names.len());
            self.names.push(name.clone());
            self.coords.push(*p);
            self.provenance.push(ci);
        }
        self.clauses.push(clause);
    }

    /// Translates the centroid to the origin and scales the farthest point to
    /// radius one.
    pub fn normalize(&mut self) {
        if self.coords.is_empty() {
            return;
        }
        let n = self.coords.len() as f64;
        let c = self
            .coords
            .iter()
            .fold(Point::default(), |a, p| a.add(*p))
            .scale(1.0 / n);
        let r = self.coords.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
        let k = if r > 0.0 { 1.0 / r } else { 1.0 };
        for p in &mut self.coords {
            *p = p.sub(c).scale(k);
        }
    }

    pub fn eval_indices(
        &self,
        pred: Predicate,
        args: &[u8],
        literal: Option<&Rational>,
        tol: &Tolerances,
    ) -> Result<bool, NumericError> {
        let mut pts = [Point::default(); 8];
        for (slot, &a) in pts.iter_mut().zip(args) {
            *slot = *self
                .coords
                .get(a as usize)
                .ok_or(NumericError::UnknownPoint)?;
        }
        eval_points(pred, &pts[..args.len()], literal, tol)
    }

    /// The problem form of this figure with dense premise ids.
    pub fn to_problem(&self, goal: Statement) -> Problem {
        let mut id = 0;
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let pc = c.to_premise_clause(id);
                id += c.statements.len() as u32;
                pc
            })
            .collect();
        Problem { clauses, goal }
    }

    /// One `name x y` line per point.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (n, p) in self.names.iter().zip(&self.coords) {
            let _ = writeln!(out, "{n} {:.12} {:.12}", p.x, p.y);
        }
        out
    }
}

/// Evaluates a statement on a figure's coordinates.
pub fn eval_statement(s: &Statement, fig: &Figure, tol: &Tolerances) -> Result<bool, NumericError> {
    let mut pts = Vec::with_capacity(s.args.len());
    for a in &s.args {
        pts.push(fig.point(a).ok_or(NumericError::UnknownPoint)?);
    }
    if pts.len() != s.predicate.arity() {
        return Err(NumericError::DegenerateInput);
    }
    eval_points(s.predicate, &pts, s.literal.as_ref(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn fig_of(points: &[(&str, f64, f64)]) -> Figure {
        let mut f = Figure::new();
        for (n, x, y) in points {
            f.push_clause(
                FigureClause {
                    points: vec![n.to_string()],
                    constructions: Vec::new(),
                    statements: Vec::new(),
                },
                &[Point::new(*x, *y)],
            );
        }
        f
    }

    #[test]
    fn eval_by_name() {
        let f = fig_of(&[("a", 0.0, 0.0), ("b", 1.0, 1.0), ("c", 2.0, 2.0)]);
        let tol = Tolerances::default();
        let s = Statement::from_strs(Predicate::Coll, &["a", "b", "c"]);
        assert_eq!(eval_statement(&s, &f, &tol), Ok(true));
        let s = Statement::from_strs(Predicate::Coll, &["a", "b", "z"]);
        assert_eq!(
            eval_statement(&s, &f, &tol),
            Err(NumericError::UnknownPoint)
        );
    }

    #[test]
    fn normalize_centers_and_scales() {
        let mut f = fig_of(&[("a", 2.0, 0.0), ("b", 4.0, 0.0)]);
        f.normalize();
        assert!(f.point("a").unwrap().dist(Point::new(-1.0, 0.0)) < 1e-12);
        assert!(f.point("b").unwrap().dist(Point::new(1.0, 0.0)) < 1e-12);
        assert_eq!(f.dump().lines().count(), 2);
    }
}
