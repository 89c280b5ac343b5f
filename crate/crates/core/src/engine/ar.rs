//! Linear chasing of angles and ratios by exact elimination.
//!
//! Angles: one variable per point pair, the direction of that line, with
//! constants in degrees modulo 180. Ratios: one variable per point pair, the
//! log of its length, without constants. Each basis row remembers which
//! source rows it combines, so a successful query yields its premises.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::Ratio;

use super::fact::FactId;
use crate::statement::{Predicate, Rational};

type Q = Ratio<i128>;

fn zero() -> Q {
    Q::from_integer(0)
}

fn pair_var(a: u8, b: u8) -> u32 {
    let (x, y) = if a < b { (a, b) } else { (b, a) };
    ((x as u32) << 8) | y as u32
}

/// Sparse vector sorted by key.
type Sparse<K> = Vec<(K, Q)>;

fn axpy<K: Ord + Copy>(y: &Sparse<K>, k: &Q, x: &Sparse<K>) -> Sparse<K> {
    // y + k * x
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i]);
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            let v = x[j].1 * k;
            if v != zero() {
                out.push((x[j].0, v));
            }
            j += 1;
        } else {
            let v = y[i].1 + x[j].1 * k;
            if v != zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale<K: Copy>(x: &Sparse<K>, k: &Q) -> Sparse<K> {
    x.iter().map(|(v, c)| (*v, c * k)).collect()
}

/// Provenance key: fact id and row index within that fact.
type Prov = u64;

fn prov_key(f: FactId, sub: u8) -> Prov {
    ((f as u64) << 8) | sub as u64
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Sparse<u32>,
    konst: Q,
    prov: Sparse<Prov>,
}

/// An incremental basis of linear relations.
///
/// Without a modulus the rows span a rational vector space in reduced
/// echelon form. With one, coefficients stay integral and the rows span a
/// lattice in echelon form: a relation follows only as an integer
/// combination, so nothing is ever divided modulo the constant and the
/// answer does not depend on insertion order.
#[derive(Clone, Debug)]
pub struct LinearTable {
    modulus: Option<Q>,
    rows: Vec<Row>,
    pivots: BTreeMap<u32, usize>,
    changes: usize,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // (g, x, y) with a x + b y = g >= 0
    let (mut r0, mut r1, mut x0, mut x1, mut y0, mut y1) = (a, b, 1, 0, 0, 1);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

fn int(q: &Q) -> i128 {
    debug_assert!(q.is_integer());
    *q.numer()
}

impl LinearTable {
    pub fn new(modulus: Option<i64>) -> Self {
        LinearTable {
            modulus: modulus.map(|m| Q::from_integer(m as i128)),
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            changes: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Incremented whenever the span grows.
    pub fn changes(&self) -> usize {
        self.changes
    }

    fn reduce_const(&self, k: Q) -> Q {
        match &self.modulus {
            Some(m) => {
                let q = (k / m).floor();
                k - q * m
            }
            None => k,
        }
    }

    /// x a + y b for rows.
    fn comb(&self, x: i128, a: &Row, y: i128, b: &Row) -> Row {
        let (x, y) = (Q::from_integer(x), Q::from_integer(y));
        Row {
            coeffs: axpy(&scale(&a.coeffs, &x), &y, &b.coeffs),
            konst: self.reduce_const(a.konst * x + b.konst * y),
            prov: axpy(&scale(&a.prov, &x), &y, &b.prov),
        }
    }

    /// Expresses `coeffs` against the basis: returns the residual, the
    /// implied constant and the combined provenance.
    fn reduce(&self, coeffs: &Sparse<u32>) -> (Sparse<u32>, Q, Sparse<Prov>) {
        if self.modulus.is_some() {
            return self.reduce_lattice(coeffs);
        }
        let mut res = coeffs.clone();
        let mut k = zero();
        let mut prov: Sparse<Prov> = Vec::new();
        for (v, c) in coeffs {
            if let Some(&ri) = self.pivots.get(v) {
                let row = &self.rows[ri];
                let neg = -*c;
                res = axpy(&res, &neg, &row.coeffs);
                k += row.konst * c;
                prov = axpy(&prov, c, &row.prov);
            }
        }
        (res, self.reduce_const(k), prov)
    }

    /// Integer reduction in pivot order; stops at the first column the
    /// lattice cannot clear.
    fn reduce_lattice(&self, coeffs: &Sparse<u32>) -> (Sparse<u32>, Q, Sparse<Prov>) {
        let mut res = coeffs.clone();
        let mut k = zero();
        let mut prov: Sparse<Prov> = Vec::new();
        while let Some(&(v, c)) = res.first() {
            let Some(&ri) = self.pivots.get(&v) else {
                break;
            };
            let row = &self.rows[ri];
            let (b, a) = (int(&c), int(&row.coeffs[0].1));
            if b % a != 0 {
                break;
            }
            let m = Q::from_integer(b / a);
            res = axpy(&res, &-m, &row.coeffs);
            k += row.konst * m;
            prov = axpy(&prov, &m, &row.prov);
        }
        (res, self.reduce_const(k), prov)
    }

    /// Adds `coeffs . x = konst`. Returns false when the row is implied
    /// by the basis already.
    pub fn add(&mut self, coeffs: Sparse<u32>, konst: Q, source: Prov) -> bool {
        if coeffs.is_empty() {
            return false;
        }
        let grew = if self.modulus.is_some() {
            self.add_lattice(coeffs, konst, source)
        } else {
            self.add_field(coeffs, konst, source)
        };
        if grew {
            self.changes += 1;
        }
        grew
    }

    fn add_lattice(&mut self, coeffs: Sparse<u32>, konst: Q, source: Prov) -> bool {
        let mut r = Row {
            coeffs,
            konst: self.reduce_const(konst),
            prov: alloc::vec![(source, Q::from_integer(1))],
        };
        let mut grew = false;
        while let Some(&(v, c)) = r.coeffs.first() {
            let b = int(&c);
            let Some(&pi) = self.pivots.get(&v) else {
                if b < 0 {
                    r = self.comb(-1, &r, 0, &r);
                }
                self.pivots.insert(v, self.rows.len());
                self.rows.push(r);
                return true;
            };
            let p = &self.rows[pi];
            let a = int(&p.coeffs[0].1);
            if b % a == 0 {
                r = self.comb(1, &r, -(b / a), p);
                continue;
            }
            let (g, x, y) = ext_gcd(a, b);
            let np = self.comb(x, p, y, &r);
            r = self.comb(b / g, p, -(a / g), &r);
            self.rows[pi] = np;
            grew = true;
        }
        grew
    }

    fn add_field(&mut self, coeffs: Sparse<u32>, konst: Q, source: Prov) -> bool {
        let (res, k, prov) = self.reduce(&coeffs);
        if res.is_empty() {
            return false;
        }
        let mut prov = axpy(
            &alloc::vec![(source, Q::from_integer(1))],
            &-Q::from_integer(1),
            &prov,
        );
        let mut konst = self.reduce_const(konst - k);
        let (pv, pc) = res[0];
        let inv = pc.recip();
        let coeffs = scale(&res, &inv);
        konst = self.reduce_const(konst * inv);
        prov = scale(&prov, &inv);
        let new = Row {
            coeffs,
            konst,
            prov,
        };
        for r in &mut self.rows {
            if let Some(c) = r.coeffs.iter().find(|(v, _)| *v == pv).map(|(_, c)| *c) {
                let neg = -c;
                r.coeffs = axpy(&r.coeffs, &neg, &new.coeffs);
                r.konst += neg * new.konst;
                r.prov = axpy(&r.prov, &neg, &new.prov);
            }
        }
        self.pivots.insert(pv, self.rows.len());
        self.rows.push(new);
        true
    }

    /// If `coeffs . x = konst` follows from the basis, the facts used.
    pub fn query(&self, coeffs: &Sparse<u32>, konst: Q) -> Option<Vec<FactId>> {
        let (res, k, prov) = self.reduce(coeffs);
        if !res.is_empty() || self.reduce_const(konst - k) != zero() {
            return None;
        }
        let mut deps: Vec<FactId> = prov.iter().map(|(p, _)| (p >> 8) as FactId).collect();
        deps.dedup();
        Some(deps)
    }
}

fn lin(terms: &[(u32, i128)]) -> Sparse<u32> {
    let mut m: BTreeMap<u32, Q> = BTreeMap::new();
    for &(v, c) in terms {
        *m.entry(v).or_insert_with(zero) += Q::from_integer(c);
    }
    m.into_iter().filter(|(_, c)| *c != zero()).collect()
}

fn angle_diff(a: u8, b: u8, c: u8, d: u8) -> [(u32, i128); 2] {
    // direction(cd) - direction(ab)
    [(pair_var(c, d), 1), (pair_var(a, b), -1)]
}

fn lit_q(l: &Rational) -> Q {
    Q::new(*l.numer() as i128, *l.denom() as i128)
}

/// Rows an angle fact contributes: coefficient vectors and constants.
pub fn angle_rows(pred: Predicate, a: &[u8], lit: Option<&Rational>) -> Vec<(Sparse<u32>, Q)> {
    let mut out = Vec::new();
    match pred {
        Predicate::Coll | Predicate::Midp => {
            let (x, y, z) = (a[0], a[1], a[2]);
            out.push((lin(&angle_diff(x, y, x, z)), zero()));
            out.push((lin(&angle_diff(x, y, y, z)), zero()));
        }
        Predicate::Para => out.push((lin(&angle_diff(a[0], a[1], a[2], a[3])), zero())),
        Predicate::Perp => out.push((
            lin(&angle_diff(a[0], a[1], a[2], a[3])),
            Q::from_integer(90),
        )),
        Predicate::AConst => {
            if let Some(l) = lit {
                out.push((lin(&angle_diff(a[0], a[1], a[2], a[3])), lit_q(l)));
            }
        }
        Predicate::EqAngle => {
            let [p, q] = angle_diff(a[0], a[1], a[2], a[3]);
            let [r, s] = angle_diff(a[4], a[5], a[6], a[7]);
            out.push((lin(&[p, q, (r.0, -r.1), (s.0, -s.1)]), zero()));
        }
        _ => {}
    }
    out.retain(|(c, _)| !c.is_empty());
    out
}

/// Rows a ratio fact contributes.
pub fn ratio_rows(pred: Predicate, a: &[u8]) -> Vec<Sparse<u32>> {
    let mut out = Vec::new();
    match pred {
        Predicate::Cong => out.push(lin(&[
            (pair_var(a[0], a[1]), 1),
            (pair_var(a[2], a[3]), -1),
        ])),
        Predicate::EqRatio => out.push(lin(&[
            (pair_var(a[0], a[1]), 1),
            (pair_var(a[2], a[3]), -1),
            (pair_var(a[4], a[5]), -1),
            (pair_var(a[6], a[7]), 1),
        ])),
        Predicate::Midp => out.push(lin(&[
            (pair_var(a[0], a[1]), 1),
            (pair_var(a[0], a[2]), -1),
        ])),
        _ => {}
    }
    out.retain(|c| !c.is_empty());
    out
}

/// The single-row target of a provable angle statement.
fn angle_target(pred: Predicate, a: &[u8], lit: Option<&Rational>) -> Option<(Sparse<u32>, Q)> {
    match pred {
        Predicate::Coll => Some((lin(&angle_diff(a[0], a[1], a[0], a[2])), zero())),
        Predicate::Para | Predicate::Perp | Predicate::EqAngle | Predicate::AConst => {
            angle_rows(pred, a, lit)
                .pop()
                .or_else(|| Some((Vec::new(), zero())))
        }
        _ => None,
    }
}

fn ratio_target(pred: Predicate, a: &[u8]) -> Option<Sparse<u32>> {
    match pred {
        Predicate::Cong | Predicate::EqRatio => Some(ratio_rows(pred, a).pop().unwrap_or_default()),
        _ => None,
    }
}

pub fn is_angle_goal(pred: Predicate) -> bool {
    matches!(
        pred,
        Predicate::Coll
            | Predicate::Para
            | Predicate::Perp
            | Predicate::EqAngle
            | Predicate::AConst
    )
}

pub fn is_ratio_goal(pred: Predicate) -> bool {
    matches!(pred, Predicate::Cong | Predicate::EqRatio)
}

/// Angle and ratio tables over the facts added so far.
#[derive(Clone, Debug)]
pub struct Chase {
    pub angles: LinearTable,
    pub ratios: LinearTable,
}

impl Default for Chase {
    fn default() -> Self {
        Chase {
            angles: LinearTable::new(Some(180)),
            ratios: LinearTable::new(None),
        }
    }
}

impl Chase {
    pub fn add_fact(&mut self, id: FactId, pred: Predicate, a: &[u8], lit: Option<&Rational>) {
        for (k, (row, c)) in angle_rows(pred, a, lit).into_iter().enumerate() {
            self.angles.add(row, c, prov_key(id, k as u8));
        }
        for (k, row) in ratio_rows(pred, a).into_iter().enumerate() {
            self.ratios.add(row, zero(), prov_key(id, k as u8));
        }
    }

    /// Proves an angle statement; returns the facts used.
    pub fn prove_angle(
        &self,
        pred: Predicate,
        a: &[u8],
        lit: Option<&Rational>,
    ) -> Option<Vec<FactId>> {
        let (t, k) = angle_target(pred, a, lit)?;
        self.angles.query(&t, k)
    }

    pub fn prove_ratio(&self, pred: Predicate, a: &[u8]) -> Option<Vec<FactId>> {
        let t = ratio_target(pred, a)?;
        self.ratios.query(&t, zero())
    }

    pub fn prove(
        &self,
        pred: Predicate,
        a: &[u8],
        lit: Option<&Rational>,
    ) -> Option<(bool, Vec<FactId>)> {
        if is_angle_goal(pred) {
            self.prove_angle(pred, a, lit).map(|d| (true, d))
        } else if is_ratio_goal(pred) {
            self.prove_ratio(pred, a).map(|d| (false, d))
        } else {
            None
        }
    }

    /// Change counters of both tables; equal counters mean equal spans.
    pub fn ranks(&self) -> (usize, usize) {
        (self.angles.changes(), self.ratios.changes())
    }
}

/// Whether the statements (id, pred, args, literal) prove the goal by
/// chasing alone.
pub fn chase_proves(
    deps: &[(FactId, Predicate, &[u8], Option<&Rational>)],
    goal: (Predicate, &[u8], Option<&Rational>),
    angle: bool,
) -> bool {
    let mut c = Chase::default();
    for &(id, p, a, l) in deps {
        if angle {
            for (k, (row, k0)) in angle_rows(p, a, l).into_iter().enumerate() {
                c.angles.add(row, k0, prov_key(id, k as u8));
            }
        } else {
            for (k, row) in ratio_rows(p, a).into_iter().enumerate() {
                c.ratios.add(row, zero(), prov_key(id, k as u8));
            }
        }
    }
    if angle {
        c.prove_angle(goal.0, goal.1, goal.2).is_some()
    } else {
        c.prove_ratio(goal.0, goal.1).is_some()
    }
}

/// Greedily drops dependencies that the chase does not need.
pub fn minimize_deps(
    deps: &[(FactId, Predicate, &[u8], Option<&Rational>)],
    goal: (Predicate, &[u8], Option<&Rational>),
    angle: bool,
) -> Vec<FactId> {
    let mut keep: Vec<(FactId, Predicate, &[u8], Option<&Rational>)> = deps.to_vec();
    let mut i = keep.len();
    while i > 0 {
        i -= 1;
        let mut trial = keep.clone();
        trial.remove(i);
        if chase_proves(&trial, goal, angle) {
            keep = trial;
        }
    }
    keep.iter().map(|d| d.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perpendiculars_to_parallels() {
        // ab perp cd, ef perp cd => ab para ef
        let mut c = Chase::default();
        c.add_fact(0, Predicate::Perp, &[0, 1, 2, 3], None);
        c.add_fact(1, Predicate::Perp, &[4, 5, 2, 3], None);
        assert_eq!(
            c.prove_angle(Predicate::Para, &[0, 1, 4, 5], None),
            Some(alloc::vec![0, 1])
        );
        assert_eq!(c.prove_angle(Predicate::Perp, &[0, 1, 4, 5], None), None);
    }

    #[test]
    fn collinear_rows_keep_provenance() {
        // coll a b c alone gives d(ac) = d(bc) through two rows of one fact
        let mut c = Chase::default();
        c.add_fact(7, Predicate::Coll, &[0, 1, 2], None);
        assert_eq!(
            c.prove_angle(Predicate::Para, &[0, 2, 1, 2], None),
            Some(alloc::vec![7])
        );
    }

    #[test]
    fn ratio_transitivity() {
        let mut c = Chase::default();
        c.add_fact(0, Predicate::Cong, &[0, 1, 2, 3], None);
        c.add_fact(1, Predicate::EqRatio, &[2, 3, 4, 5, 0, 1, 6, 7], None);
        // cd/ef = ab/gh and ab = cd give ef = gh
        assert_eq!(
            c.prove_ratio(Predicate::Cong, &[4, 5, 6, 7]),
            Some(alloc::vec![0, 1])
        );
        assert!(c.prove_ratio(Predicate::Cong, &[0, 1, 4, 5]).is_none());
    }

    #[test]
    fn reflexive_goal_needs_nothing() {
        let c = Chase::default();
        assert_eq!(
            c.prove_ratio(Predicate::Cong, &[0, 1, 1, 0]),
            Some(alloc::vec![])
        );
    }

    #[test]
    fn minimize_drops_redundant() {
        let a: &[u8] = &[0, 1, 2, 3];
        let b: &[u8] = &[4, 5, 2, 3];
        let extra: &[u8] = &[6, 7, 0, 1];
        let deps = [
            (0, Predicate::Perp, a, None),
            (1, Predicate::Para, extra, None),
            (2, Predicate::Perp, b, None),
        ];
        let goal: &[u8] = &[0, 1, 4, 5];
        assert_eq!(
            minimize_deps(&deps, (Predicate::Para, goal, None), true),
            alloc::vec![0, 2]
        );
    }

    #[test]
    fn halving_is_not_derived() {
        // angle(ab, cd) = angle(cd, ab) means twice the angle is 0 mod 180:
        // the lines are parallel or perpendicular, and neither follows.
        let mut c = Chase::default();
        c.add_fact(0, Predicate::EqAngle, &[0, 1, 2, 3, 2, 3, 0, 1], None);
        assert!(c
            .prove_angle(Predicate::Para, &[0, 1, 2, 3], None)
            .is_none());
        assert!(c
            .prove_angle(Predicate::Perp, &[0, 1, 2, 3], None)
            .is_none());
        c.add_fact(
            1,
            Predicate::AConst,
            &[0, 1, 2, 3],
            Some(&Rational::new(90, 1)),
        );
        assert!(c
            .prove_angle(Predicate::Perp, &[0, 1, 2, 3], None)
            .is_some());
    }

    #[test]
    fn gcd_pivots_combine() {
        let mut t = LinearTable::new(Some(180));
        // 2x = 0 and 3x = 0 give x = 0
        t.add(alloc::vec![(1, Q::from_integer(2))], zero(), prov_key(0, 0));
        assert!(t
            .query(&alloc::vec![(1, Q::from_integer(1))], zero())
            .is_none());
        t.add(alloc::vec![(1, Q::from_integer(3))], zero(), prov_key(1, 0));
        assert_eq!(
            t.query(&alloc::vec![(1, Q::from_integer(1))], zero()),
            Some(alloc::vec![0, 1])
        );
        assert_eq!(t.changes(), 2);
    }

    proptest::proptest! {
        #[test]
        fn lattice_answers_ignore_order(
            vals in proptest::collection::vec(0i128..8, 5),
            rows in proptest::collection::vec(proptest::collection::vec((0u32..5, -2i128..=2), 1..4), 1..7),
            goals in proptest::collection::vec((proptest::collection::vec((0u32..5, -2i128..=2), 1..4), 0i128..4), 1..8),
        ) {
            let row = |terms: &[(u32, i128)], k: i128| (lin(terms), Q::from_integer(k * 45));
            // constants from one assignment of the variables keep the system consistent
            let rows: Vec<(Vec<(u32, i128)>, i128)> = rows
                .into_iter()
                .map(|t| {
                    let k = t.iter().map(|&(v, c)| c * vals[v as usize]).sum::<i128>();
                    (t, k)
                })
                .collect();
            let mut fwd = LinearTable::new(Some(180));
            let mut bwd = LinearTable::new(Some(180));
            for (i, (t, k)) in rows.iter().enumerate() {
                let (c, k) = row(t, *k);
                fwd.add(c, k, prov_key(i as u32, 0));
            }
            for (i, (t, k)) in rows.iter().enumerate().rev() {
                let (c, k) = row(t, *k);
                bwd.add(c, k, prov_key(i as u32, 0));
            }
            for (t, k) in &goals {
                let (c, k) = row(t, *k);
                proptest::prop_assert_eq!(fwd.query(&c, k).is_some(), bwd.query(&c, k).is_some());
            }
            // with zero constants the system is consistent and contains its rows
            let mut h = LinearTable::new(Some(180));
            for (i, (t, _)) in rows.iter().enumerate() {
                h.add(lin(t), zero(), prov_key(i as u32, 0));
            }
            for (t, _) in &rows {
                proptest::prop_assert!(h.query(&lin(t), zero()).is_some());
            }
        }
    }
}
