//! Numerical pre-identification of equality candidates.
//!
//! The optimized path sorts angle and ratio values and pairs only values
//! within tolerance; the brute-force path enumerates every tuple. Both
//! return the same deduplicated, canonically sorted candidate list.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::fact::{canonical_args, Key};
use crate::figure::Figure;
use crate::numeric::{direction, eval_points, line_pair_angle, Point, Tolerances};
use crate::statement::Predicate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub pred: Predicate,
    pub args: [u8; 8],
}

impl Candidate {
    fn new(pred: Predicate, a: &[u8]) -> Candidate {
        let mut args = [0u8; 8];
        args[..a.len()].copy_from_slice(a);
        Candidate { pred, args }
    }

    pub fn args(&self) -> &[u8] {
        &self.args[..self.pred.arity()]
    }

    pub fn key(&self) -> Key {
        Key {
            pred: self.pred,
            args: canonical_args(self.pred, &self.args),
            literal: None,
        }
    }
}

/// Numeric line identity: for each point pair, the set of points on it.
pub struct Lines {
    n: usize,
    line_of: Vec<u32>,
    members: Vec<u128>,
}

impl Lines {
    pub fn new(fig: &Figure, tol: &Tolerances) -> Lines {
        let pts = fig.coords();
        let n = pts.len();
        assert!(n <= 128, "figures are limited to 128 points");
        let mut line_of = alloc::vec![u32::MAX; n * n];
        let mut members: Vec<u128> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if line_of[i * n + j] != u32::MAX {
                    continue;
                }
                let mut set = (1u128 << i) | (1u128 << j);
                for (k, p) in pts.iter().enumerate() {
                    if k != i && k != j && collinear(pts[i], pts[j], *p, tol) {
                        set |= 1u128 << k;
                    }
                }
                let id = members.len() as u32;
                members.push(set);
                let on: Vec<usize> = (0..n).filter(|k| set >> k & 1 == 1).collect();
                for &a in &on {
                    for &b in &on {
                        if a != b {
                            line_of[a * n + b] = id;
                        }
                    }
                }
            }
        }
        Lines {
            n,
            line_of,
            members,
        }
    }

    pub fn line(&self, a: u8, b: u8) -> u32 {
        self.line_of[a as usize * self.n + b as usize]
    }

    pub fn members(&self) -> &[u128] {
        &self.members
    }
}

fn collinear(a: Point, b: Point, c: Point, tol: &Tolerances) -> bool {
    matches!(
        eval_points(Predicate::Coll, &[a, b, c], None, tol),
        Ok(true)
    )
}

/// Sorts and deduplicates by canonical form.
fn finish(mut v: Vec<Candidate>) -> Vec<Candidate> {
    let mut keyed: Vec<(Key, Candidate)> = v.drain(..).map(|c| (c.key(), c)).collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, c)| c).collect()
}

/// Index pairs `(i, j)`, `i < j`, whose values differ by at most `window`;
/// `period` adds wrap-around. Callers filter with the exact predicate.
fn close_pairs(values: &[f64], window: f64, period: Option<f64>) -> Vec<(usize, usize)> {
    let mut items: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
    if let Some(p) = period {
        for (i, &v) in values.iter().enumerate() {
            if v <= window {
                items.push((v + p, i));
            }
        }
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    for x in 0..items.len() {
        let mut y = x + 1;
        while y < items.len() && items[y].0 - items[x].0 <= window {
            let (i, j) = (items[x].1, items[y].1);
            if i != j {
                out.push((i.min(j), i.max(j)));
            }
            y += 1;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Log-ratio window: wide enough that every pair passing the ratio test is
/// inside it.
const LOG_RATIO_WINDOW: f64 = 1e-3;

fn same_line_pairs(lines: &Lines, a: u8, b: u8, c: u8, d: u8) -> bool {
    lines.line(a, b) == lines.line(c, d)
}

/// Candidates found by sorting values: collinear triples, parallel and
/// perpendicular pairs, equal segments, and vertex-form angle and ratio
/// equalities.
pub fn pre_identify(fig: &Figure, tol: &Tolerances) -> Vec<Candidate> {
    let pts = fig.coords();
    let n = pts.len();
    let lines = Lines::new(fig, tol);
    let mut out = Vec::new();

    for &set in lines.members() {
        let on: Vec<u8> = (0..n as u8).filter(|k| set >> k & 1 == 1).collect();
        for x in 0..on.len() {
            for y in x + 1..on.len() {
                for z in y + 1..on.len() {
                    out.push(Candidate::new(Predicate::Coll, &[on[x], on[y], on[z]]));
                }
            }
        }
    }

    let mut pairs: Vec<(u8, u8)> = Vec::new();
    for i in 0..n as u8 {
        for j in i + 1..n as u8 {
            if pts[i as usize].dist(pts[j as usize]) >= tol.eps_deg {
                pairs.push((i, j));
            }
        }
    }
    let window = 2.0 * tol.eps_eq;
    let dirs: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| direction(pts[a as usize], pts[b as usize], tol).map_or(0.0, |d| d.0))
        .collect();
    for (x, y) in close_pairs(&dirs, window, Some(PI)) {
        let ((a, b), (c, d)) = (pairs[x], pairs[y]);
        if !same_line_pairs(&lines, a, b, c, d) && eval_ok(Predicate::Para, &[a, b, c, d], pts, tol)
        {
            out.push(Candidate::new(Predicate::Para, &[a, b, c, d]));
        }
    }
    // perpendicular: shift one copy by a quarter turn
    let mut shifted: Vec<f64> = dirs.clone();
    shifted.extend(dirs.iter().map(|v| crate::numeric::mod_pi(v + PI / 2.0)));
    let m = dirs.len();
    for (x, y) in close_pairs(&shifted, window, Some(PI)) {
        if (x < m) == (y < m) {
            continue;
        }
        let (p, q) = if x < m { (x, y - m) } else { (y, x - m) };
        let ((a, b), (c, d)) = if pairs[q] < pairs[p] {
            (pairs[q], pairs[p])
        } else {
            (pairs[p], pairs[q])
        };
        if eval_ok(Predicate::Perp, &[a, b, c, d], pts, tol) {
            out.push(Candidate::new(Predicate::Perp, &[a, b, c, d]));
        }
    }
    let lens: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| pts[a as usize].dist(pts[b as usize]))
        .collect();
    for (x, y) in close_pairs(&lens, window, None) {
        let ((a, b), (c, d)) = (pairs[x], pairs[y]);
        if eval_ok(Predicate::Cong, &[a, b, c, d], pts, tol) {
            out.push(Candidate::new(Predicate::Cong, &[a, b, c, d]));
        }
    }

    let triples = ordered_triples(n);
    let angle_objs: Vec<(u8, u8, u8)> = triples
        .iter()
        .copied()
        .filter(|&(a, b, c)| !collinear(pts[a as usize], pts[b as usize], pts[c as usize], tol))
        .collect();
    let angles: Vec<f64> = angle_objs
        .iter()
        .map(|&(a, b, c)| {
            line_pair_angle(
                pts[a as usize],
                pts[b as usize],
                pts[b as usize],
                pts[c as usize],
                tol,
            )
            .unwrap_or(0.0)
        })
        .collect();
    for (x, y) in close_pairs(&angles, window, Some(PI)) {
        let (a, b, c) = angle_objs[x];
        let (p, q, r) = angle_objs[y];
        if let Some(cand) = angle_candidate(&lines, pts, tol, (a, b, c), (p, q, r)) {
            out.push(cand);
        }
    }
    let ratio_objs = triples;
    let ratios: Vec<f64> = ratio_objs
        .iter()
        .map(|&(a, b, c)| {
            libm::log(pts[b as usize].dist(pts[a as usize]) / pts[b as usize].dist(pts[c as usize]))
        })
        .collect();
    for (x, y) in close_pairs(&ratios, LOG_RATIO_WINDOW, None) {
        if let Some(cand) = ratio_candidate(pts, tol, ratio_objs[x], ratio_objs[y]) {
            out.push(cand);
        }
    }
    finish(out)
}

fn eval_ok(pred: Predicate, a: &[u8], pts: &[Point], tol: &Tolerances) -> bool {
    let mut buf = [Point::default(); 8];
    for (s, &i) in buf.iter_mut().zip(a) {
        *s = pts[i as usize];
    }
    matches!(eval_points(pred, &buf[..a.len()], None, tol), Ok(true))
}

fn ordered_triples(n: usize) -> Vec<(u8, u8, u8)> {
    let mut out = Vec::new();
    for b in 0..n as u8 {
        for a in 0..n as u8 {
            for c in 0..n as u8 {
                if a != b && b != c && a != c {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn angle_candidate(
    lines: &Lines,
    pts: &[Point],
    tol: &Tolerances,
    t1: (u8, u8, u8),
    t2: (u8, u8, u8),
) -> Option<Candidate> {
    let ((a, b, c), (p, q, r)) = if t2 < t1 { (t2, t1) } else { (t1, t2) };
    if (a, b, c) == (p, q, r) {
        return None;
    }
    if lines.line(a, b) == lines.line(p, q) && lines.line(b, c) == lines.line(q, r) {
        return None;
    }
    let args = [a, b, b, c, p, q, q, r];
    if !eval_ok(Predicate::EqAngle, &args, pts, tol) {
        return None;
    }
    Some(Candidate::new(Predicate::EqAngle, &args))
}

fn ratio_candidate(
    pts: &[Point],
    tol: &Tolerances,
    t1: (u8, u8, u8),
    t2: (u8, u8, u8),
) -> Option<Candidate> {
    let ((a, b, c), (p, q, r)) = if t2 < t1 { (t2, t1) } else { (t1, t2) };
    let seg = |x: u8, y: u8| if x < y { (x, y) } else { (y, x) };
    let mut s1 = [seg(b, a), seg(b, c)];
    let mut s2 = [seg(q, p), seg(q, r)];
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 == s2 {
        return None;
    }
    let args = [b, a, q, p, b, c, q, r];
    if !eval_ok(Predicate::EqRatio, &args, pts, tol) {
        return None;
    }
    Some(Candidate::new(Predicate::EqRatio, &args))
}

/// The same candidates by exhaustive enumeration of all tuples.
pub fn brute_force_candidates(fig: &Figure, tol: &Tolerances) -> Vec<Candidate> {
    let pts = fig.coords();
    let n = pts.len() as u8;
    let lines = Lines::new(fig, tol);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if eval_ok(Predicate::Coll, &[a, b, c], pts, tol) {
                    out.push(Candidate::new(Predicate::Coll, &[a, b, c]));
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                for d in c + 1..n {
                    if (a, b) >= (c, d) {
                        continue;
                    }
                    let q = [a, b, c, d];
                    if !same_line_pairs(&lines, a, b, c, d)
                        && eval_ok(Predicate::Para, &q, pts, tol)
                    {
                        out.push(Candidate::new(Predicate::Para, &q));
                    }
                    if eval_ok(Predicate::Perp, &q, pts, tol) {
                        out.push(Candidate::new(Predicate::Perp, &q));
                    }
                    if eval_ok(Predicate::Cong, &q, pts, tol) {
                        out.push(Candidate::new(Predicate::Cong, &q));
                    }
                }
            }
        }
    }
    let triples = ordered_triples(n as usize);
    for &t1 in &triples {
        for &t2 in &triples {
            let (a, b, c) = t1;
            if !collinear(pts[a as usize], pts[b as usize], pts[c as usize], tol)
                && !collinear(
                    pts[t2.0 as usize],
                    pts[t2.1 as usize],
                    pts[t2.2 as usize],
                    tol,
                )
            {
                if let Some(x) = angle_candidate(&lines, pts, tol, t1, t2) {
                    out.push(x);
                }
            }
            if let Some(x) = ratio_candidate(pts, tol, t1, t2) {
                out.push(x);
            }
        }
    }
    finish(out)
}
