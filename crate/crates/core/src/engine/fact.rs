//! The fact database: append-only facts over point indices, with a lookup
//! table holding every symmetric variant of every fact.

use alloc::vec::Vec;

type FxHashMap<K, V> = hashbrown::HashMap<K, V, rustc_hash::FxBuildHasher>;

use crate::statement::{Predicate, Rational};

pub type FactId = u32;

/// Where a fact came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Premise,
    /// A `sameclock` instance checked on the figure for a rule guard.
    NumericCheck,
    /// A Horn rule, by index into the rule set.
    Rule(u16),
    AngleChase,
    RatioChase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub pred: Predicate,
    /// Arguments as first derived; unused slots are zero.
    pub args: [u8; 8],
    pub literal: Option<Rational>,
    pub source: Source,
    pub deps: Vec<FactId>,
    pub round: u32,
}

impl Fact {
    pub fn args(&self) -> &[u8] {
        &self.args[..self.pred.arity()]
    }
}

/// Lookup key: predicate, argument slots and literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub pred: Predicate,
    pub args: [u8; 8],
    pub literal: Option<Rational>,
}

impl Key {
    pub fn new(pred: Predicate, args: &[u8], literal: Option<Rational>) -> Key {
        let mut a = [0u8; 8];
        a[..args.len()].copy_from_slice(args);
        Key {
            pred,
            args: a,
            literal,
        }
    }
}

pub fn permute_args(args: &[u8; 8], perm: &[u8; 8], n: usize) -> [u8; 8] {
    let mut out = [0u8; 8];
    for i in 0..n {
        out[i] = args[perm[i] as usize];
    }
    out
}

/// Least argument tuple in the symmetry orbit.
pub fn canonical_args(pred: Predicate, args: &[u8; 8]) -> [u8; 8] {
    let n = pred.arity();
    let mut best = *args;
    for perm in pred.symmetries() {
        let c = permute_args(args, perm, n);
        if c < best {
            best = c;
        }
    }
    best
}

pub fn canonical_key(pred: Predicate, args: &[u8; 8], literal: Option<Rational>) -> Key {
    Key {
        pred,
        args: canonical_args(pred, args),
        literal,
    }
}

fn same_seg(a: u8, b: u8, c: u8, d: u8) -> bool {
    (a == c && b == d) || (a == d && b == c)
}

fn distinct3(a: u8, b: u8, c: u8) -> bool {
    a != b && b != c && a != c
}

/// Statements that are degenerate (a required pair coincides) or hold by
/// reflexivity alone. Such statements never enter the database.
pub fn is_degenerate(pred: Predicate, a: &[u8]) -> bool {
    use Predicate::*;
    match pred {
        Coll => !distinct3(a[0], a[1], a[2]),
        Para | Cong => a[0] == a[1] || a[2] == a[3] || same_seg(a[0], a[1], a[2], a[3]),
        Perp | AConst | RConst => a[0] == a[1] || a[2] == a[3],
        Midp => !distinct3(a[0], a[1], a[2]),
        Cyclic => (0..4).any(|i| (i + 1..4).any(|j| a[i] == a[j])),
        EqAngle | EqRatio => {
            a.chunks(2).any(|p| p[0] == p[1])
                || (same_seg(a[0], a[1], a[4], a[5]) && same_seg(a[2], a[3], a[6], a[7]))
        }
        SimTri | SimTriR | ConTri | ConTriR => {
            !distinct3(a[0], a[1], a[2]) || !distinct3(a[3], a[4], a[5]) || a[..3] == a[3..6]
        }
        SameClock => !distinct3(a[0], a[1], a[2]) || !distinct3(a[3], a[4], a[5]),
    }
}

#[derive(Clone, Debug, Default)]
pub struct FactDb {
    facts: Vec<Fact>,
    canon: Vec<Key>,
    variants: FxHashMap<Key, FactId>,
    by_pred: Vec<Vec<FactId>>,
    by_pred_point: Vec<Vec<FactId>>,
}

impl FactDb {
    pub fn new() -> Self {
        FactDb {
            facts: Vec::new(),
            canon: Vec::new(),
            variants: FxHashMap::default(),
            by_pred: (0..Predicate::ALL.len()).map(|_| Vec::new()).collect(),
            by_pred_point: (0..Predicate::ALL.len() * 256)
                .map(|_| Vec::new())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn get(&self, id: FactId) -> &Fact {
        &self.facts[id as usize]
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn canonical(&self, id: FactId) -> &Key {
        &self.canon[id as usize]
    }

    /// Ids of facts with the predicate, in insertion order.
    pub fn of_pred(&self, pred: Predicate) -> &[FactId] {
        &self.by_pred[pred as usize]
    }

    /// Ids of facts with the predicate mentioning the point.
    pub fn of_pred_point(&self, pred: Predicate, p: u8) -> &[FactId] {
        &self.by_pred_point[pred as usize * 256 + p as usize]
    }

    /// Id of the fact equal to the statement up to symmetry.
    pub fn lookup(
        &self,
        pred: Predicate,
        args: &[u8],
        literal: Option<Rational>,
    ) -> Option<FactId> {
        self.variants.get(&Key::new(pred, args, literal)).copied()
    }

    pub fn lookup_key(&self, key: &Key) -> Option<FactId> {
        self.variants.get(key).copied()
    }

    /// Inserts unless an equal fact exists; returns the id and whether it is new.
    pub fn insert(&mut self, fact: Fact) -> (FactId, bool) {
        let key = Key::new(fact.pred, fact.args(), fact.literal);
        if let Some(id) = self.variants.get(&key) {
            return (*id, false);
        }
        let id = self.facts.len() as FactId;
        let n = fact.pred.arity();
        for perm in fact.pred.symmetries() {
            let v = Key {
                pred: fact.pred,
                args: permute_args(&fact.args, perm, n),
                literal: fact.literal,
            };
            self.variants.entry(v).or_insert(id);
        }
        self.canon
            .push(canonical_key(fact.pred, &fact.args, fact.literal));
        self.by_pred[fact.pred as usize].push(id);
        let mut seen = [false; 256];
        for &p in fact.args() {
            if !seen[p as usize] {
                seen[p as usize] = true;
                self.by_pred_point[fact.pred as usize * 256 + p as usize].push(id);
            }
        }
        self.facts.push(fact);
        (id, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fact(pred: Predicate, a: &[u8]) -> Fact {
        let mut args = [0u8; 8];
        args[..a.len()].copy_from_slice(a);
        Fact {
            pred,
            args,
            literal: None,
            source: Source::Premise,
            deps: vec![],
            round: 0,
        }
    }

    #[test]
    fn lookup_any_variant() {
        let mut db = FactDb::new();
        let (id, new) = db.insert(fact(Predicate::Cong, &[1, 0, 3, 2]));
        assert!(new);
        assert_eq!(db.lookup(Predicate::Cong, &[2, 3, 0, 1], None), Some(id));
        assert_eq!(db.insert(fact(Predicate::Cong, &[0, 1, 2, 3])), (id, false));
        assert_eq!(db.canonical(id).args[..4], [0, 1, 2, 3]);
        assert_eq!(db.of_pred_point(Predicate::Cong, 3), &[id]);
    }

    #[test]
    fn degenerate_statements() {
        assert!(is_degenerate(Predicate::Para, &[0, 1, 1, 0]));
        assert!(is_degenerate(Predicate::Coll, &[0, 1, 1]));
        assert!(is_degenerate(Predicate::EqAngle, &[0, 1, 2, 3, 1, 0, 3, 2]));
        assert!(!is_degenerate(
            Predicate::EqAngle,
            &[0, 1, 1, 2, 3, 4, 4, 5]
        ));
        assert!(is_degenerate(Predicate::SimTri, &[0, 1, 2, 0, 1, 2]));
    }
}
