//! Rejection of trivial or reducible conclusions, and deduplication of
//! equivalent angle and ratio equalities.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::fact::{canonical_key, FactDb};
use crate::figure::Figure;
use crate::numeric::Tolerances;
use crate::statement::{Predicate, Rational, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reason {
    TrivialSelf,
    ReducibleToPara,
    ReducibleToCong,
    ReducibleToPerp,
    ReducibleToColl,
    ReducibleToSimilarity,
    SameclockExcluded,
    EquivalentDuplicate,
    Keep,
}

impl Reason {
    pub const ALL: [Reason; 9] = [
        Reason::TrivialSelf,
        Reason::ReducibleToPara,
        Reason::ReducibleToCong,
        Reason::ReducibleToPerp,
        Reason::ReducibleToColl,
        Reason::ReducibleToSimilarity,
        Reason::SameclockExcluded,
        Reason::EquivalentDuplicate,
        Reason::Keep,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Reason::TrivialSelf => "trivial_self",
            Reason::ReducibleToPara => "reducible_to_para",
            Reason::ReducibleToCong => "reducible_to_cong",
            Reason::ReducibleToPerp => "reducible_to_perp",
            Reason::ReducibleToColl => "reducible_to_coll",
            Reason::ReducibleToSimilarity => "reducible_to_similarity",
            Reason::SameclockExcluded => "sameclock_excluded",
            Reason::EquivalentDuplicate => "equivalent_duplicate",
            Reason::Keep => "keep",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub keep: bool,
    pub reason: Reason,
}

impl Verdict {
    fn of(reason: Reason) -> Verdict {
        Verdict {
            keep: reason == Reason::Keep,
            reason,
        }
    }
}

fn same_seg(a: &[u8], b: &[u8]) -> bool {
    (a[0] == b[0] && a[1] == b[1]) || (a[0] == b[1] && a[1] == b[0])
}

struct Geo<'a> {
    fig: &'a Figure,
    tol: &'a Tolerances,
}

impl Geo<'_> {
    fn holds(&self, pred: Predicate, a: &[u8]) -> bool {
        matches!(self.fig.eval_indices(pred, a, None, self.tol), Ok(true))
    }
    fn para(&self, l: &[u8], m: &[u8]) -> bool {
        self.holds(Predicate::Para, &[l[0], l[1], m[0], m[1]])
    }
    fn perp(&self, l: &[u8], m: &[u8]) -> bool {
        self.holds(Predicate::Perp, &[l[0], l[1], m[0], m[1]])
    }
    fn cong(&self, l: &[u8], m: &[u8]) -> bool {
        same_seg(l, m) || self.holds(Predicate::Cong, &[l[0], l[1], m[0], m[1]])
    }
}

fn is_zero_angle(l: &Rational) -> bool {
    (l.numer() % (180 * l.denom())) == 0
}

/// Applies every rejection row to one numerically true conclusion.
pub fn judge(s: &Statement, fig: &Figure, db: &FactDb, tol: &Tolerances) -> Verdict {
    let idx: Option<Vec<u8>> = s
        .args
        .iter()
        .map(|n| fig.index_of(n).map(|i| i as u8))
        .collect();
    match idx {
        Some(a) if a.len() == s.predicate.arity() => {
            judge_indices(s.predicate, &a, s.literal.as_ref(), fig, db, tol)
        }
        _ => Verdict::of(Reason::Keep),
    }
}

pub fn judge_indices(
    pred: Predicate,
    a: &[u8],
    lit: Option<&Rational>,
    fig: &Figure,
    db: &FactDb,
    tol: &Tolerances,
) -> Verdict {
    let g = Geo { fig, tol };
    let r = match pred {
        Predicate::SameClock => Reason::SameclockExcluded,
        Predicate::AConst if lit.is_some_and(is_zero_angle) => Reason::ReducibleToPara,
        Predicate::RConst if lit.is_some_and(|l| *l == Rational::from_integer(1)) => {
            Reason::ReducibleToCong
        }
        Predicate::Cong if same_seg(&a[0..2], &a[2..4]) => Reason::TrivialSelf,
        Predicate::Para => {
            let (l, m) = (&a[0..2], &a[2..4]);
            if same_seg(l, m) {
                Reason::TrivialSelf
            } else if l.iter().any(|p| m.contains(p))
                || g.holds(Predicate::Coll, &[l[0], l[1], m[0]])
            {
                Reason::ReducibleToColl
            } else {
                Reason::Keep
            }
        }
        Predicate::EqRatio => eqratio_reason(a, &g),
        Predicate::EqAngle => eqangle_reason(a, &g, db),
        Predicate::SimTri | Predicate::SimTriR | Predicate::ConTri | Predicate::ConTriR => {
            let mut t1 = [a[0], a[1], a[2]];
            let mut t2 = [a[3], a[4], a[5]];
            t1.sort_unstable();
            t2.sort_unstable();
            if t1 == t2 {
                Reason::TrivialSelf
            } else {
                Reason::Keep
            }
        }
        _ => Reason::Keep,
    };
    Verdict::of(r)
}

fn eqratio_reason(a: &[u8], g: &Geo<'_>) -> Reason {
    let (s1, s2, s3, s4) = (&a[0..2], &a[2..4], &a[4..6], &a[6..8]);
    if (same_seg(s1, s3) && same_seg(s2, s4)) || (same_seg(s1, s2) && same_seg(s3, s4)) {
        Reason::TrivialSelf
    } else if (same_seg(s1, s4) && same_seg(s2, s3))
        || same_seg(s1, s2)
        || same_seg(s3, s4)
        || g.cong(s1, s2)
        || g.cong(s3, s4)
        || g.cong(s1, s3)
        || g.cong(s2, s4)
    {
        Reason::ReducibleToCong
    } else {
        Reason::Keep
    }
}

fn eqangle_reason(a: &[u8], g: &Geo<'_>, db: &FactDb) -> Reason {
    let (l1, l2, l3, l4) = (&a[0..2], &a[2..4], &a[4..6], &a[6..8]);
    if same_seg(l1, l3) && same_seg(l2, l4) {
        Reason::TrivialSelf
    } else if same_seg(l1, l4) && same_seg(l2, l3) {
        Reason::ReducibleToPerp
    } else if same_seg(l1, l2)
        || same_seg(l3, l4)
        || g.para(l1, l2)
        || g.para(l3, l4)
        || (g.para(l1, l3) && g.para(l2, l4))
    {
        Reason::ReducibleToPara
    } else if (g.para(l1, l4) && g.para(l2, l3)) || g.perp(l1, l2) {
        Reason::ReducibleToPerp
    } else if induced_by_similarity(a, db) {
        Reason::ReducibleToSimilarity
    } else {
        Reason::Keep
    }
}

/// The vertex angle equalities a triangle correspondence implies.
pub fn similarity_angles(pred: Predicate, t: &[u8]) -> Vec<[u8; 8]> {
    let (x, y) = (&t[0..3], &t[3..6]);
    let reflected = matches!(pred, Predicate::SimTriR | Predicate::ConTriR);
    let mut out = Vec::new();
    for v in 0..3 {
        let (i, j) = ((v + 1) % 3, (v + 2) % 3);
        let first = [x[v], x[i], x[v], x[j]];
        let second = if reflected {
            [y[v], y[j], y[v], y[i]]
        } else {
            [y[v], y[i], y[v], y[j]]
        };
        let mut args = [0u8; 8];
        args[..4].copy_from_slice(&first);
        args[4..].copy_from_slice(&second);
        out.push(args);
    }
    out
}

fn induced_by_similarity(a: &[u8], db: &FactDb) -> bool {
    let mut args = [0u8; 8];
    args.copy_from_slice(a);
    let key = canonical_key(Predicate::EqAngle, &args, None);
    [
        Predicate::SimTri,
        Predicate::SimTriR,
        Predicate::ConTri,
        Predicate::ConTriR,
    ]
    .iter()
    .any(|&p| {
        db.of_pred(p).iter().any(|&id| {
            similarity_angles(p, db.get(id).args())
                .iter()
                .any(|s| canonical_key(Predicate::EqAngle, s, None) == key)
        })
    })
}

/// Class representatives: the least point pair parallel to (or, for
/// lengths, congruent with) a given pair.
struct Classes<'a> {
    g: Geo<'a>,
    pred: Predicate,
    memo: BTreeMap<(u8, u8), (u8, u8)>,
}

impl Classes<'_> {
    fn of(&mut self, a: u8, b: u8) -> (u8, u8) {
        let k = if a < b { (a, b) } else { (b, a) };
        if let Some(r) = self.memo.get(&k) {
            return *r;
        }
        let n = self.g.fig.len() as u8;
        let mut rep = k;
        'outer: for x in 0..n {
            for y in x + 1..n {
                if (x, y) >= k {
                    break 'outer;
                }
                if self.g.holds(self.pred, &[x, y, k.0, k.1]) {
                    rep = (x, y);
                    break 'outer;
                }
            }
        }
        self.memo.insert(k, rep);
        rep
    }

    fn signature(&mut self, pred: Predicate, a: &[u8]) -> [(u8, u8); 4] {
        let mut best: Option<[(u8, u8); 4]> = None;
        for perm in pred.symmetries() {
            let p: Vec<u8> = (0..8).map(|i| a[perm[i] as usize]).collect();
            let sig = [
                self.of(p[0], p[1]),
                self.of(p[2], p[3]),
                self.of(p[4], p[5]),
                self.of(p[6], p[7]),
            ];
            if best.is_none_or(|b| sig < b) {
                best = Some(sig);
            }
        }
        best.unwrap_or_default()
    }
}

/// Predicate and the four segment classes of a statement.
type Signature = (Predicate, [(u8, u8); 4]);

/// Keeps one representative per equivalence class of eqangle (parallel
/// lines) and eqratio (congruent segments) conclusions. Other statements
/// pass through. The representative is the least canonical form; output
/// order follows the input.
pub fn dedupe(kept: &[Statement], fig: &Figure, tol: &Tolerances) -> Vec<Statement> {
    let mut angle = Classes {
        g: Geo { fig, tol },
        pred: Predicate::Para,
        memo: BTreeMap::new(),
    };
    let mut ratio = Classes {
        g: Geo { fig, tol },
        pred: Predicate::Cong,
        memo: BTreeMap::new(),
    };
    let mut sigs: Vec<Option<Signature>> = Vec::with_capacity(kept.len());
    let mut best: BTreeMap<(Predicate, [(u8, u8); 4]), Statement> = BTreeMap::new();
    for s in kept {
        let idx: Option<Vec<u8>> = s
            .args
            .iter()
            .map(|n| fig.index_of(n).map(|i| i as u8))
            .collect();
        let sig = match (s.predicate, idx) {
            (Predicate::EqAngle, Some(a)) if a.len() == 8 => {
                Some((Predicate::EqAngle, angle.signature(Predicate::EqAngle, &a)))
            }
            (Predicate::EqRatio, Some(a)) if a.len() == 8 => {
                Some((Predicate::EqRatio, ratio.signature(Predicate::EqRatio, &a)))
            }
            _ => None,
        };
        if let Some(k) = sig {
            let c = s.canonical();
            match best.get(&k) {
                Some(b) if b.canonical() <= c => {}
                _ => {
                    best.insert(k, s.clone());
                }
            }
        }
        sigs.push(sig);
    }
    let mut out = Vec::new();
    for (s, sig) in kept.iter().zip(sigs) {
        match sig {
            None => out.push(s.clone()),
            Some(k) => {
                if best.get(&k).is_some_and(|b| b == s) {
                    out.push(s.clone());
                    best.remove(&k);
                }
            }
        }
    }
    out
}

/// Counts of verdicts by reason.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterReport {
    pub counts: BTreeMap<Reason, u64>,
}

impl FilterReport {
    pub fn add(&mut self, r: Reason) {
        *self.counts.entry(r).or_default() += 1;
    }

    pub fn merge(&mut self, other: &FilterReport) {
        for (r, c) in &other.counts {
            *self.counts.entry(*r).or_default() += c;
        }
    }

    pub fn get(&self, r: Reason) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in Reason::ALL {
            writeln!(f, "{} {}", r.code(), self.get(r))?;
        }
        Ok(())
    }
}
