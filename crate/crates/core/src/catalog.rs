//! The construction catalog: definitions, categories and coordinate recipes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;

use crate::lang::{
    content_lines, parse_template_list, tokenize, unexpected, Cursor, ParseError, ParseErrorKind,
    Template, Tok,
};
use crate::numeric::{circumcenter, eval_points, intersect, Locus, Point, Tolerances};
use crate::statement::Predicate;

pub const DEFAULT_DEFS: &str = include_str!("../data/default.defs");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Basic,
    BasicFree,
    Intersect,
    Others,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Basic => "BASIC",
            Category::BasicFree => "BASIC_FREE",
            Category::Intersect => "INTERSECT",
            Category::Others => "OTHERS",
        }
    }

    fn from_name(s: &str) -> Option<Category> {
        match s {
            "BASIC" => Some(Category::Basic),
            "BASIC_FREE" => Some(Category::BasicFree),
            "INTERSECT" => Some(Category::Intersect),
            "OTHERS" => Some(Category::Others),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prerequisite {
    Holds(Template),
    Distinct(String, String),
    NotCollinear([String; 3]),
    NotParallel([String; 4]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    Segment,
    Triangle,
    IsoTriangle,
    RTriangle,
    Rectangle,
    Square,
    Free,
    Line,
    PLine,
    TLine,
    Circle,
    BLine,
    Bisector,
    Dia,
    Circum,
    Midpoint,
    Foot,
    Orthocenter,
    Circumcenter,
    Incenter,
    Mirror,
    Parallelogram,
    IntersectLL,
    EqTriangle,
    PSquare,
}

impl RecipeKind {
    fn parse(s: &str) -> Option<(RecipeKind, usize)> {
        use RecipeKind::*;
        Some(match s {
            "segment" => (Segment, 2),
            "triangle" => (Triangle, 3),
            "iso_triangle" => (IsoTriangle, 3),
            "r_triangle" => (RTriangle, 3),
            "rectangle" => (Rectangle, 4),
            "square" => (Square, 4),
            "free" => (Free, 1),
            "line" => (Line, 2),
            "pline" => (PLine, 3),
            "tline" => (TLine, 3),
            "circle" => (Circle, 2),
            "bline" => (BLine, 2),
            "bisector" => (Bisector, 3),
            "dia" => (Dia, 2),
            "circum" => (Circum, 3),
            "midpoint" => (Midpoint, 2),
            "foot" => (Foot, 3),
            "orthocenter" => (Orthocenter, 3),
            "circumcenter" => (Circumcenter, 3),
            "incenter" => (Incenter, 3),
            "mirror" => (Mirror, 2),
            "parallelogram" => (Parallelogram, 3),
            "intersection_ll" => (IntersectLL, 4),
            "eq_triangle" => (EqTriangle, 2),
            "psquare" => (PSquare, 2),
            _ => return None,
        })
    }

    pub fn is_locus(self) -> bool {
        use RecipeKind::*;
        matches!(
            self,
            Line | PLine | TLine | Circle | BLine | Bisector | Dia | Circum
        )
    }

    pub fn is_circle(self) -> bool {
        matches!(
            self,
            RecipeKind::Circle | RecipeKind::Dia | RecipeKind::Circum
        )
    }
}

/// Numeric recipe: a kind plus the definition variables it reads, as
/// indices into `outputs ++ inputs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub kind: RecipeKind,
    pub slots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionDef {
    pub name: String,
    pub category: Category,
    pub outputs: Vec<String>,
    pub inputs: Vec<String>,
    pub prerequisites: Vec<Prerequisite>,
    pub added: Vec<Template>,
    pub recipe: Recipe,
}

impl ConstructionDef {
    pub fn out_arity(&self) -> usize {
        self.outputs.len()
    }
    pub fn in_arity(&self) -> usize {
        self.inputs.len()
    }
    /// Variables in script order: outputs then inputs.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.outputs
            .iter()
            .chain(self.inputs.iter())
            .map(|s| s.as_str())
    }
    fn slot(&self, var: &str) -> Option<usize> {
        self.variables().position(|v| v == var)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    defs: Vec<ConstructionDef>,
    by_name: BTreeMap<String, usize>,
}

impl Catalog {
    pub fn default_catalog() -> Catalog {
        Catalog::parse(DEFAULT_DEFS).expect("embedded catalog parses")
    }

    pub fn get(&self, name: &str) -> Option<&ConstructionDef> {
        self.by_name.get(name).map(|&i| &self.defs[i])
    }

    pub fn defs(&self) -> &[ConstructionDef] {
        &self.defs
    }

    pub fn of_category(&self, cat: Category) -> impl Iterator<Item = &ConstructionDef> {
        self.defs.iter().filter(move |d| d.category == cat)
    }

    /// Parses a definitions file (see `data/default.defs` for the format).
    pub fn parse(text: &str) -> Result<Catalog, ParseError> {
        let mut cat = Catalog::default();
        for (start, body) in content_lines(text) {
            if body.trim().is_empty() {
                continue;
            }
            let toks = tokenize(body, start)?;
            let mut cur = Cursor::new(toks, start + body.len());
            let (name, name_off) = cur.word()?;
            let (cat_word, cat_off) = cur.word()?;
            let category = Category::from_name(cat_word).ok_or_else(|| {
                ParseError::new(
                    ParseErrorKind::UnexpectedToken(cat_word.to_string()),
                    cat_off,
                )
            })?;
            cur.expect(Tok::Colon)?;
            let outputs = var_list(&mut cur)?;
            cur.expect(Tok::Colon)?;
            let inputs = var_list(&mut cur)?;
            cur.expect(Tok::Colon)?;
            let prerequisites = prereq_list(&mut cur)?;
            cur.expect(Tok::Arrow)?;
            let added: Vec<Template> = parse_template_list(&mut cur, &[Tok::Colon])?
                .into_iter()
                .map(|(t, _)| t)
                .collect();
            cur.expect(Tok::Colon)?;
            let (rname, roff) = cur.word()?;
            let (kind, nargs) = RecipeKind::parse(rname).ok_or_else(|| {
                ParseError::new(ParseErrorKind::UnexpectedToken(rname.to_string()), roff)
            })?;
            let rvars = var_list(&mut cur)?;
            if let Some(t) = cur.next() {
                return Err(unexpected(t));
            }
            let mut def = ConstructionDef {
                name: name.to_string(),
                category,
                outputs,
                inputs,
                prerequisites,
                added,
                recipe: Recipe {
                    kind,
                    slots: Vec::new(),
                },
            };
            if rvars.len() != nargs {
                return Err(ParseError::new(
                    ParseErrorKind::WrongArgCount {
                        construction: rname.to_string(),
                        expected: nargs,
                        found: rvars.len(),
                    },
                    roff,
                ));
            }
            for v in &rvars {
                let s = def.slot(v).ok_or_else(|| {
                    ParseError::new(ParseErrorKind::UndeclaredPoint(v.clone()), roff)
                })?;
                def.recipe.slots.push(s);
            }
            for t in &def.added {
                if let Some(v) = t.args.iter().find(|v| def.slot(v).is_none()) {
                    return Err(ParseError::new(
                        ParseErrorKind::UndeclaredPoint(v.clone()),
                        name_off,
                    ));
                }
            }
            let shape_ok = match category {
                Category::BasicFree => def.in_arity() == 0 && def.out_arity() == 1,
                Category::Intersect => {
                    def.out_arity() == 1 && def.added.len() == 1 && kind.is_locus()
                }
                Category::Others => def.out_arity() == 1 && !kind.is_locus(),
                Category::Basic => def.in_arity() == 0,
            };
            if !shape_ok {
                return Err(ParseError::new(
                    ParseErrorKind::UnexpectedToken(name.to_string()),
                    name_off,
                ));
            }
            if cat
                .by_name
                .insert(def.name.clone(), cat.defs.len())
                .is_some()
            {
                return Err(ParseError::new(
                    ParseErrorKind::DuplicateRuleName(name.to_string()),
                    name_off,
                ));
            }
            cat.defs.push(def);
        }
        Ok(cat)
    }
}

fn var_list(cur: &mut Cursor<'_>) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    while let Some(crate::lang::Token {
        tok: Tok::Word(w), ..
    }) = cur.peek()
    {
        out.push(w.to_string());
        cur.next();
    }
    Ok(out)
}

fn prereq_list(cur: &mut Cursor<'_>) -> Result<Vec<Prerequisite>, ParseError> {
    let mut out = Vec::new();
    while let Some(crate::lang::Token {
        tok: Tok::Word(w),
        offset: off,
    }) = cur.peek()
    {
        let need = match w {
            "diff" => 2,
            "ncoll" => 3,
            "npara" => 4,
            _ => 0,
        };
        if need > 0 {
            cur.next();
            let vars = var_list(cur)?;
            if vars.len() != need {
                return Err(ParseError::new(
                    ParseErrorKind::WrongArgCount {
                        construction: w.to_string(),
                        expected: need,
                        found: vars.len(),
                    },
                    off,
                ));
            }
            out.push(match need {
                2 => Prerequisite::Distinct(vars[0].clone(), vars[1].clone()),
                3 => {
                    Prerequisite::NotCollinear([vars[0].clone(), vars[1].clone(), vars[2].clone()])
                }
                _ => Prerequisite::NotParallel([
                    vars[0].clone(),
                    vars[1].clone(),
                    vars[2].clone(),
                    vars[3].clone(),
                ]),
            });
        } else {
            let mut t = parse_template_list(cur, &[Tok::Arrow, Tok::Comma])?;
            if let Some((tmpl, _)) = t.pop() {
                out.push(Prerequisite::Holds(tmpl));
            }
        }
        if !cur.eat(Tok::Comma) {
            break;
        }
    }
    Ok(out)
}

/// Why a sketch failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchError {
    NumericallyInfeasible,
}

/// Points further than this from the origin are rejected while sketching.
pub const MAX_COORD: f64 = 10.0;

pub fn random_in_disk<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Point {
    let r = libm::sqrt(rng.gen::<f64>()) * scale;
    let th = rng.gen::<f64>() * 2.0 * PI;
    Point::new(r * libm::cos(th), r * libm::sin(th))
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Computes a locus from input coordinates (`p` indexed by definition slot).
pub fn locus_of(kind: RecipeKind, p: &[Point]) -> Option<Locus> {
    use RecipeKind::*;
    let l = match kind {
        Line => Locus::line(p[0], p[1]),
        PLine => Locus::Line {
            through: p[0],
            dir: p[2].sub(p[1]).unit(),
        },
        TLine => Locus::Line {
            through: p[0],
            dir: p[2].sub(p[1]).unit().rot90(),
        },
        Circle => Locus::Circle {
            center: p[0],
            radius: p[0].dist(p[1]),
        },
        BLine => Locus::Line {
            through: p[0].mid(p[1]),
            dir: p[1].sub(p[0]).unit().rot90(),
        },
        Bisector => {
            let d = p[0].sub(p[1]).unit().add(p[2].sub(p[1]).unit());
            if d.norm() < 1e-9 {
                return None;
            }
            Locus::Line {
                through: p[1],
                dir: d.unit(),
            }
        }
        Dia => Locus::Circle {
            center: p[0].mid(p[1]),
            radius: p[0].dist(p[1]) * 0.5,
        },
        Circum => {
            let c = circumcenter(p[0], p[1], p[2])?;
            Locus::Circle {
                center: c,
                radius: c.dist(p[0]),
            }
        }
        _ => return None,
    };
    if l.is_finite() {
        Some(l)
    } else {
        None
    }
}

/// A random point on a locus, used when a single INTERSECT fixes a point.
pub fn point_on_locus<R: Rng + ?Sized>(l: &Locus, rng: &mut R) -> Point {
    match *l {
        Locus::Line { through, dir } => through.add(dir.scale(rng.gen_range(-1.0..1.0))),
        Locus::Circle { center, radius } => {
            let th = rng.gen::<f64>() * 2.0 * PI;
            center.add(Point::new(radius * libm::cos(th), radius * libm::sin(th)))
        }
    }
}

fn nondegenerate_triangle(a: Point, b: Point, c: Point) -> bool {
    let min_side = a.dist(b).min(b.dist(c)).min(c.dist(a));
    min_side > 0.2 && libm::fabs(crate::numeric::orientation(a, b, c)) > 0.1 * min_side * min_side
}

/// Computes coordinates for the outputs of a point-producing recipe.
/// `inputs` holds coordinates for every definition slot; output slots are
/// ignored.
pub fn sketch_points<R: Rng + ?Sized>(
    kind: RecipeKind,
    p: &[Point],
    rng: &mut R,
) -> Result<Vec<Point>, SketchError> {
    use RecipeKind::*;
    let infeasible = Err(SketchError::NumericallyInfeasible);
    let out = match kind {
        Free => alloc::vec![random_in_disk(rng, 1.0)],
        Segment => {
            let a = random_in_disk(rng, 1.0);
            let b = random_in_disk(rng, 1.0);
            if a.dist(b) < 0.2 {
                return infeasible;
            }
            alloc::vec![a, b]
        }
        Triangle => {
            let (a, b, c) = (
                random_in_disk(rng, 1.0),
                random_in_disk(rng, 1.0),
                random_in_disk(rng, 1.0),
            );
            if !nondegenerate_triangle(a, b, c) {
                return infeasible;
            }
            alloc::vec![a, b, c]
        }
        IsoTriangle => {
            let b = random_in_disk(rng, 1.0);
            let c = random_in_disk(rng, 1.0);
            let h = rng.gen_range(0.4..1.5) * b.dist(c) * random_sign(rng);
            let a = b.mid(c).add(c.sub(b).unit().rot90().scale(h));
            if !nondegenerate_triangle(a, b, c) {
                return infeasible;
            }
            alloc::vec![a, b, c]
        }
        RTriangle => {
            let a = random_in_disk(rng, 1.0);
            let b = random_in_disk(rng, 1.0);
            let s = rng.gen_range(0.5..1.5) * random_sign(rng);
            let c = a.add(b.sub(a).rot90().scale(s));
            if !nondegenerate_triangle(a, b, c) {
                return infeasible;
            }
            alloc::vec![a, b, c]
        }
        Rectangle | Square => {
            let a = random_in_disk(rng, 1.0);
            let b = random_in_disk(rng, 1.0);
            let s = if kind == Square {
                random_sign(rng)
            } else {
                rng.gen_range(0.5..1.5) * random_sign(rng)
            };
            let c = b.add(b.sub(a).rot90().scale(s));
            let d = a.add(c.sub(b));
            if !nondegenerate_triangle(a, b, c) {
                return infeasible;
            }
            alloc::vec![a, b, c, d]
        }
        Midpoint => alloc::vec![p[0].mid(p[1])],
        Foot => {
            let d = p[2].sub(p[1]).unit();
            alloc::vec![p[1].add(d.scale(p[0].sub(p[1]).dot(d)))]
        }
        Orthocenter => {
            let l1 = Locus::Line {
                through: p[0],
                dir: p[2].sub(p[1]).rot90(),
            };
            let l2 = Locus::Line {
                through: p[1],
                dir: p[2].sub(p[0]).rot90(),
            };
            let l1 = normalize_line(l1);
            let l2 = normalize_line(l2);
            match intersect(&l1, &l2).first() {
                Some(x) => alloc::vec![*x],
                None => return infeasible,
            }
        }
        Circumcenter => match circumcenter(p[0], p[1], p[2]) {
            Some(o) => alloc::vec![o],
            None => return infeasible,
        },
        Incenter => {
            let a = p[1].dist(p[2]);
            let b = p[0].dist(p[2]);
            let c = p[0].dist(p[1]);
            let s = a + b + c;
            alloc::vec![p[0]
                .scale(a / s)
                .add(p[1].scale(b / s))
                .add(p[2].scale(c / s))]
        }
        Mirror => alloc::vec![p[1].scale(2.0).sub(p[0])],
        Parallelogram => alloc::vec![p[0].add(p[2]).sub(p[1])],
        IntersectLL => {
            match intersect(&Locus::line(p[0], p[1]), &Locus::line(p[2], p[3])).first() {
                Some(x) => alloc::vec![*x],
                None => return infeasible,
            }
        }
        EqTriangle => {
            let th = PI / 3.0 * random_sign(rng);
            alloc::vec![p[0].add(p[1].sub(p[0]).rotate(th))]
        }
        PSquare => alloc::vec![p[0].add(p[1].sub(p[0]).rot90().scale(random_sign(rng)))],
        _ => return infeasible,
    };
    if out.iter().all(|q| q.is_finite() && q.norm() < MAX_COORD) {
        Ok(out)
    } else {
        infeasible
    }
}

fn normalize_line(l: Locus) -> Locus {
    match l {
        Locus::Line { through, dir } => Locus::Line {
            through,
            dir: dir.unit(),
        },
        c => c,
    }
}

/// Checks one prerequisite on resolved coordinates (indexed by definition slot).
pub(crate) fn prerequisite_holds(
    def: &ConstructionDef,
    pre: &Prerequisite,
    p: &[Point],
    tol: &Tolerances,
) -> bool {
    let at = |v: &str| def.slot(v).map(|i| p[i]);
    match pre {
        Prerequisite::Distinct(a, b) => match (at(a), at(b)) {
            (Some(a), Some(b)) => a.dist(b) > tol.eps_deg,
            _ => false,
        },
        Prerequisite::NotCollinear(vs) => {
            let pts: Option<Vec<Point>> = vs.iter().map(|v| at(v)).collect();
            match pts {
                Some(q) => !matches!(
                    eval_points(Predicate::Coll, &q, None, tol),
                    Ok(true) | Err(_)
                ),
                None => false,
            }
        }
        Prerequisite::NotParallel(vs) => {
            let pts: Option<Vec<Point>> = vs.iter().map(|v| at(v)).collect();
            match pts {
                Some(q) => matches!(eval_points(Predicate::Para, &q, None, tol), Ok(false)),
                None => false,
            }
        }
        Prerequisite::Holds(t) => {
            let pts: Option<Vec<Point>> = t.args.iter().map(|v| at(v)).collect();
            match pts {
                Some(q) => matches!(
                    eval_points(t.predicate, &q, t.literal.as_ref(), tol),
                    Ok(true)
                ),
                None => false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_coverage() {
        let c = Catalog::default_catalog();
        assert!(c.of_category(Category::Basic).count() >= 3);
        assert_eq!(c.of_category(Category::BasicFree).count(), 1);
        assert!(c.of_category(Category::Intersect).count() >= 6);
        assert!(c.of_category(Category::Others).count() >= 8);
        for name in [
            "segment",
            "triangle",
            "rectangle",
            "free",
            "on_line",
            "on_circle",
            "on_bline",
            "orthocenter",
            "circumcenter",
            "midpoint",
            "foot",
            "incenter",
        ] {
            assert!(c.get(name).is_some(), "{name}");
        }
    }

    #[test]
    fn right_angle_orthocenter_is_the_vertex() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let p = [
            Point::default(),
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 3.0),
        ];
        let x = sketch_points(RecipeKind::Orthocenter, &p[1..], &mut rng).unwrap()[0];
        assert!(x.dist(Point::new(0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn circumcenter_by_hand() {
        // perpendicular bisectors of (0,0)-(2,0) and (0,0)-(0,2): x = 1, y = 1
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let p = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 2.0),
        ];
        let x = sketch_points(RecipeKind::Circumcenter, &p, &mut rng).unwrap()[0];
        assert!(x.dist(Point::new(1.0, 1.0)) < 1e-12);
    }

    use rand::SeedableRng;
}
