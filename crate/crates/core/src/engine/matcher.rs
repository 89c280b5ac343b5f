//! Rule matching against a database snapshot.

use alloc::vec::Vec;

use super::fact::{permute_args, FactDb, FactId};
use super::{Binding, CompiledRule, CompiledTemplate, RuleStats, UNBOUND};

fn present(db: &FactDb, snap: usize, t: &CompiledTemplate, b: &Binding) -> bool {
    let a = t.instantiate(b);
    matches!(db.lookup(t.pred, &a[..t.pred.arity()], t.literal), Some(id) if (id as usize) < snap)
}

/// Prefix of an ascending id list below the snapshot.
fn below(ids: &[FactId], snap: usize) -> &[FactId] {
    &ids[..ids.partition_point(|&i| (i as usize) < snap)]
}

/// Extends `b` so that the template matches `args`; false on conflict.
fn unify(t: &CompiledTemplate, args: &[u8; 8], b: &mut Binding) -> bool {
    for (&v, &x) in t.vars().iter().zip(args) {
        let slot = &mut b[v as usize];
        if *slot == UNBOUND {
            *slot = x;
        } else if *slot != x {
            return false;
        }
    }
    true
}

/// Premises joined one at a time over the fact index, smallest index first.
pub(crate) fn partial(
    rule: &CompiledRule,
    db: &FactDb,
    snap: usize,
    st: &mut RuleStats,
) -> Vec<Binding> {
    let mut order: Vec<usize> = (0..rule.premises.len()).collect();
    order.sort_by_key(|&i| (below(db.of_pred(rule.premises[i].pred), snap).len(), i));
    let mut out = Vec::new();
    if rule.premises.is_empty() {
        return out;
    }
    join(
        rule,
        &order,
        0,
        db,
        snap,
        &mut [UNBOUND; super::MAX_VARS],
        st,
        &mut out,
    );
    out.sort_unstable();
    out.dedup();
    out
}

#[allow(clippy::too_many_arguments)]
fn join(
    rule: &CompiledRule,
    order: &[usize],
    depth: usize,
    db: &FactDb,
    snap: usize,
    b: &mut Binding,
    st: &mut RuleStats,
    out: &mut Vec<Binding>,
) {
    if depth == order.len() {
        out.push(*b);
        return;
    }
    let t = &rule.premises[order[depth]];
    let bound: Vec<u8> = t
        .vars()
        .iter()
        .map(|&v| b[v as usize])
        .filter(|&x| x != UNBOUND)
        .collect();
    if bound.len() == t.pred.arity() {
        st.candidates += 1;
        st.checks += 1;
        if present(db, snap, t, b) {
            join(rule, order, depth + 1, db, snap, b, st, out);
        } else {
            st.pruned += 1;
        }
        return;
    }
    let list = bound
        .iter()
        .map(|&p| below(db.of_pred_point(t.pred, p), snap))
        .min_by_key(|l| l.len())
        .unwrap_or_else(|| below(db.of_pred(t.pred), snap));
    let n = t.pred.arity();
    for &id in list {
        let f = db.get(id);
        if f.literal != t.literal {
            continue;
        }
        st.checks += 1;
        for perm in t.pred.symmetries() {
            let v = permute_args(&f.args, perm, n);
            st.candidates += 1;
            let saved = *b;
            if unify(t, &v, b) {
                join(rule, order, depth + 1, db, snap, b, st, out);
            } else {
                st.pruned += 1;
            }
            *b = saved;
        }
    }
}

/// Every assignment of points to variables, filtered by premise lookups.
pub(crate) fn naive(
    rule: &CompiledRule,
    db: &FactDb,
    snap: usize,
    npoints: usize,
    st: &mut RuleStats,
) -> Vec<Binding> {
    let mut out = Vec::new();
    let k = rule.nvars;
    if rule.premises.is_empty() || npoints == 0 {
        return out;
    }
    let mut b: Binding = [UNBOUND; super::MAX_VARS];
    for slot in &mut b[..k] {
        *slot = 0;
    }
    loop {
        st.candidates += 1;
        let mut ok = true;
        for t in &rule.premises {
            st.checks += 1;
            if !present(db, snap, t, &b) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(b);
        } else {
            st.pruned += 1;
        }
        // odometer
        let mut i = 0;
        while i < k {
            b[i] += 1;
            if (b[i] as usize) < npoints {
                break;
            }
            b[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    out.sort_unstable();
    out
}
