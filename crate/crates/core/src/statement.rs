//! Predicates, statements and their symmetry groups.
//!
//! Every predicate has a fixed arity and a group of argument permutations
//! under which the statement means the same thing. The canonical form of a
//! statement is the lexicographically least member of its orbit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Exact rational literal used by `aconst` (degrees) and `rconst` (ratio).
pub type Rational = num_rational::Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Coll,
    Para,
    Perp,
    Cong,
    Midp,
    Cyclic,
    EqAngle,
    EqRatio,
    AConst,
    RConst,
    SimTri,
    SimTriR,
    ConTri,
    ConTriR,
    SameClock,
}

impl Predicate {
    pub const ALL: [Predicate; 15] = [
        Predicate::Coll,
        Predicate::Para,
        Predicate::Perp,
        Predicate::Cong,
        Predicate::Midp,
        Predicate::Cyclic,
        Predicate::EqAngle,
        Predicate::EqRatio,
        Predicate::AConst,
        Predicate::RConst,
        Predicate::SimTri,
        Predicate::SimTriR,
        Predicate::ConTri,
        Predicate::ConTriR,
        Predicate::SameClock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Coll => "coll",
            Predicate::Para => "para",
            Predicate::Perp => "perp",
            Predicate::Cong => "cong",
            Predicate::Midp => "midp",
            Predicate::Cyclic => "cyclic",
            Predicate::EqAngle => "eqangle",
            Predicate::EqRatio => "eqratio",
            Predicate::AConst => "aconst",
            Predicate::RConst => "rconst",
            Predicate::SimTri => "simtri",
            Predicate::SimTriR => "simtrir",
            Predicate::ConTri => "contri",
            Predicate::ConTriR => "contrir",
            Predicate::SameClock => "sameclock",
        }
    }

    pub fn from_name(name: &str) -> Option<Predicate> {
        Predicate::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// Number of point arguments (literals are not counted).
    pub fn arity(self) -> usize {
        match self {
            Predicate::Coll | Predicate::Midp => 3,
            Predicate::Para
            | Predicate::Perp
            | Predicate::Cong
            | Predicate::Cyclic
            | Predicate::AConst
            | Predicate::RConst => 4,
            Predicate::EqAngle | Predicate::EqRatio => 8,
            Predicate::SimTri
            | Predicate::SimTriR
            | Predicate::ConTri
            | Predicate::ConTriR
            | Predicate::SameClock => 6,
        }
    }

    pub fn has_literal(self) -> bool {
        matches!(self, Predicate::AConst | Predicate::RConst)
    }

    /// Argument permutations preserving the meaning of the statement.
    /// `perm[i]` is the source slot of output slot `i`.
    pub fn symmetries(self) -> &'static [[u8; 8]] {
        match self {
            Predicate::Coll => &COLL_GROUP,
            Predicate::Para | Predicate::Perp | Predicate::Cong => &PAIR_GROUP,
            Predicate::Midp => &MIDP_GROUP,
            Predicate::Cyclic => &CYCLIC_GROUP,
            Predicate::EqAngle | Predicate::EqRatio => &EQ8_GROUP,
            Predicate::AConst | Predicate::RConst => &CONST_GROUP,
            Predicate::SimTri
            | Predicate::SimTriR
            | Predicate::ConTri
            | Predicate::ConTriR
            | Predicate::SameClock => &TRI_GROUP,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const ID: [u8; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

const fn compose(a: [u8; 8], b: [u8; 8]) -> [u8; 8] {
    // apply `b` after `a`: out[i] = a[b[i]]
    let mut out = [0u8; 8];
    let mut i = 0;
    while i < 8 {
        out[i] = a[b[i] as usize];
        i += 1;
    }
    out
}

const fn gen_coll() -> [[u8; 8]; 6] {
    let mut out = [ID; 6];
    let mut n = 0;
    let mut a = 0;
    while a < 3 {
        let mut b = 0;
        while b < 3 {
            let mut c = 0;
            while c < 3 {
                if a != b && b != c && a != c {
                    let mut p = ID;
                    p[0] = a;
                    p[1] = b;
                    p[2] = c;
                    out[n] = p;
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

const fn gen_cyclic() -> [[u8; 8]; 24] {
    let mut out = [ID; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let mut d = 0;
                while d < 4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        let mut p = ID;
                        p[0] = a;
                        p[1] = b;
                        p[2] = c;
                        p[3] = d;
                        out[n] = p;
                        n += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

/// Two unordered pairs, the pairs themselves unordered: `ab ? cd`.
const fn gen_pair() -> [[u8; 8]; 8] {
    let mut out = [ID; 8];
    let mut n = 0;
    while n < 8 {
        let mut p = ID;
        if n & 1 != 0 {
            p[0] = 1;
            p[1] = 0;
        }
        if n & 2 != 0 {
            p[2] = 3;
            p[3] = 2;
        }
        if n & 4 != 0 {
            let q = p;
            p[0] = q[2];
            p[1] = q[3];
            p[2] = q[0];
            p[3] = q[1];
        }
        out[n] = p;
        n += 1;
    }
    out
}

/// Pair flips only; the literal fixes the order of the two pairs.
const fn gen_const() -> [[u8; 8]; 4] {
    let mut out = [ID; 4];
    let mut n = 0;
    while n < 4 {
        let mut p = ID;
        if n & 1 != 0 {
            p[0] = 1;
            p[1] = 0;
        }
        if n & 2 != 0 {
            p[2] = 3;
            p[3] = 2;
        }
        out[n] = p;
        n += 1;
    }
    out
}

/// Four point pairs `p0 p1 p2 p3` with `f(p0,p1) = f(p2,p3)`: flip any pair,
/// swap the sides of both angles/ratios at once, swap the two sides.
const fn gen_eq8() -> [[u8; 8]; 64] {
    let swap_sides: [u8; 8] = [2, 3, 0, 1, 6, 7, 4, 5];
    let swap_halves: [u8; 8] = [4, 5, 6, 7, 0, 1, 2, 3];
    let mut out = [ID; 64];
    let mut n = 0;
    let mut s = 0;
    while s < 4 {
        let mut base = ID;
        if s & 1 != 0 {
            base = compose(base, swap_sides);
        }
        if s & 2 != 0 {
            base = compose(base, swap_halves);
        }
        let mut mask = 0;
        while mask < 16 {
            let mut flip = ID;
            let mut k = 0;
            while k < 4 {
                if mask & (1 << k) != 0 {
                    flip[2 * k] = (2 * k + 1) as u8;
                    flip[2 * k + 1] = (2 * k) as u8;
                }
                k += 1;
            }
            out[n] = compose(base, flip);
            n += 1;
            mask += 1;
        }
        s += 1;
    }
    out
}

/// Simultaneous vertex permutation of two triangles, and triangle swap.
const fn gen_tri() -> [[u8; 8]; 12] {
    let perms: [[u8; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = [ID; 12];
    let mut n = 0;
    let mut swap = 0;
    while swap < 2 {
        let mut k = 0;
        while k < 6 {
            let pm = perms[k];
            let mut p = ID;
            let (first, second) = if swap == 0 { (0u8, 3u8) } else { (3u8, 0u8) };
            let mut i = 0;
            while i < 3 {
                p[i] = first + pm[i];
                p[i + 3] = second + pm[i];
                i += 1;
            }
            out[n] = p;
            n += 1;
            k += 1;
        }
        swap += 1;
    }
    out
}

static COLL_GROUP: [[u8; 8]; 6] = gen_coll();
static PAIR_GROUP: [[u8; 8]; 8] = gen_pair();
static MIDP_GROUP: [[u8; 8]; 2] = [ID, [0, 2, 1, 3, 4, 5, 6, 7]];
static CYCLIC_GROUP: [[u8; 8]; 24] = gen_cyclic();
static EQ8_GROUP: [[u8; 8]; 64] = gen_eq8();
static CONST_GROUP: [[u8; 8]; 4] = gen_const();
static TRI_GROUP: [[u8; 8]; 12] = gen_tri();

/// Apply a symmetry permutation to the first `n` slots of `args`.
pub fn permute<T: Clone>(args: &[T], perm: &[u8; 8]) -> Vec<T> {
    (0..args.len())
        .map(|i| args[perm[i] as usize].clone())
        .collect()
}

/// A statement over named points, as written in problem and record files.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement {
    pub predicate: Predicate,
    pub args: Vec<String>,
    pub literal: Option<Rational>,
}

impl Statement {
    pub fn new(predicate: Predicate, args: Vec<String>) -> Self {
        Statement {
            predicate,
            args,
            literal: None,
        }
    }

    pub fn from_strs(predicate: Predicate, args: &[&str]) -> Self {
        Statement::new(predicate, args.iter().map(|s| String::from(*s)).collect())
    }

    pub fn with_literal(mut self, lit: Rational) -> Self {
        self.literal = Some(lit);
        self
    }

    /// Canonical representative under the predicate's symmetry group.
    pub fn canonical(&self) -> Statement {
        let mut best: Option<Vec<String>> = None;
        for perm in self.predicate.symmetries() {
            let cand = permute(&self.args, perm);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        Statement {
            predicate: self.predicate,
            args: best.unwrap_or_default(),
            literal: self.literal,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(|s| s.as_str())
    }
}

/// Writes `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if *r.denom() == 1 {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate.name())?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        if let Some(lit) = &self.literal {
            f.write_str(" ")?;
            fmt_rational(lit, f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn is_group(perms: &[[u8; 8]], arity: usize) -> bool {
        let set: BTreeSet<Vec<u8>> = perms.iter().map(|p| p[..arity].to_vec()).collect();
        if set.len() != perms.len() {
            return false;
        }
        perms.iter().all(|a| {
            perms.iter().all(|b| {
                let c = compose(*a, *b);
                set.contains(&c[..arity])
            })
        })
    }

    #[test]
    fn symmetry_tables_are_groups() {
        for p in Predicate::ALL {
            assert!(is_group(p.symmetries(), p.arity()), "{p}");
        }
        assert_eq!(Predicate::EqAngle.symmetries().len(), 64);
        assert_eq!(Predicate::Cyclic.symmetries().len(), 24);
    }

    #[test]
    fn cong_pair_sorting() {
        let s = Statement::from_strs(Predicate::Cong, &["b", "a", "d", "c"]);
        assert_eq!(
            s.canonical(),
            Statement::from_strs(Predicate::Cong, &["a", "b", "c", "d"])
        );
    }

    #[test]
    fn eqangle_swap_angles_same_canonical() {
        let s1 = Statement::from_strs(
            Predicate::EqAngle,
            &["a", "b", "c", "d", "e", "f", "g", "h"],
        );
        let s2 = Statement::from_strs(
            Predicate::EqAngle,
            &["e", "f", "g", "h", "a", "b", "c", "d"],
        );
        assert_eq!(s1.canonical(), s2.canonical());
    }

    #[test]
    fn self_parallel_is_its_own_canonical() {
        let s = Statement::from_strs(Predicate::Para, &["x", "y", "x", "y"]);
        assert_eq!(s.canonical(), s);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let s = Statement::from_strs(Predicate::SimTriR, &["a", "f", "e", "a", "h", "e"]);
        let c = s.canonical();
        assert_eq!(c.canonical(), c);
    }
}
