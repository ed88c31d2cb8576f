use std::collections::HashSet;

use num_rational::BigRational;

use super::{exceeds, precondition, ratio, DensityTarget, ProcedureError};
use crate::mask::SubsetMask;
use crate::matroid::{basis_of, check_subset, local_connectivity, Matroid, MinorView, PointIndex};

/// A subset `A' ⊆ A` skew to `B` with `ε(A') > λ l^(-k) q^r(A')`.
///
/// Each round contracts a set `Z ⊆ B - cl(A)` so that `A` spans what is left
/// of `B`, picks the least non-loop `e` there, and finds a dense subset of
/// `A` skew to `e`. That drops the local connectivity by at least one at a
/// cost of a factor `l` in density.
///
/// Membership of `M` in `U(l)` is assumed. A pencil of more than `l`
/// hyperplanes met along the way proves a longer line minor and is reported
/// as [`ProcedureError::NotInClass`].
pub fn skew_dense_subset<M: Matroid + ?Sized>(
    m: &M,
    a: &SubsetMask,
    b: &SubsetMask,
    target: &DensityTarget,
) -> Result<SubsetMask, ProcedureError> {
    check_subset(m, a)?;
    check_subset(m, b)?;
    let DensityTarget { lambda, q, l, k } = target;
    if !a.is_disjoint(b) {
        return Err(precondition("A and B disjoint", format!("A ∩ B = {}", a.intersection(b))));
    }
    let conn = local_connectivity(m, a, b)?;
    if conn > *k {
        return Err(precondition("⊓(A,B) <= k", format!("⊓(A,B) = {conn}, k = {k}")));
    }
    let eps = PointIndex::within(m, a).count();
    let ra = m.rank(a);
    if !exceeds(eps, lambda, *q, ra) {
        return Err(precondition(
            "ε(A) > λ q^r(A)",
            format!("ε(A) = {eps}, λ q^r(A) = {}", lambda * super::int_pow(*q, ra)),
        ));
    }

    let mut current = a.clone();
    let mut lam = lambda.clone();
    loop {
        if local_connectivity(m, &current, b)? == 0 {
            break;
        }
        let z = spanning_complement(m, &current, b);
        let view = MinorView::new(m, z.clone(), SubsetMask::new())?;
        let rest = view.from_base(&b.difference(&z));
        let e = rest
            .iter()
            .find(|&x| view.rank(&SubsetMask::singleton(x)) == 1)
            .expect("positive connectivity leaves a non-loop of B");
        let found = match skew_to_point(&view, &view.from_base(&current), e, &lam, *q, *l) {
            Ok(found) => found,
            Err(err @ ProcedureError::NoSuchFlat { .. }) => {
                return single_point_off(m, a, b, &target.final_lambda(), *q).ok_or(err);
            }
            Err(err) => return Err(err),
        };
        current = view.to_base(&found);
        lam /= ratio(*l);
    }

    let bound = target.final_lambda();
    let eps = PointIndex::within(m, &current).count();
    let r = m.rank(&current);
    if local_connectivity(m, &current, b)? != 0 || !exceeds(eps, &bound, *q, r) {
        return Err(ProcedureError::PostconditionFailed(format!(
            "A' = {current} has ε = {eps} at rank {r}, bound λ l^-k = {bound}"
        )));
    }
    Ok(current)
}

/// When single points already beat the final bound, a point of `A` outside
/// `cl(B)` is an answer. An earlier round can leave a lone point that a later
/// contraction makes parallel to `e`; this recovers from that dead end. With
/// no such point, only loops of `A` are skew to `B` and no answer exists.
fn single_point_off<M: Matroid + ?Sized>(
    m: &M,
    a: &SubsetMask,
    b: &SubsetMask,
    bound: &BigRational,
    q: u64,
) -> Option<SubsetMask> {
    if !exceeds(1, bound, q, 1) {
        return None;
    }
    let rb = m.rank(b);
    a.iter()
        .map(SubsetMask::singleton)
        .find(|p| m.rank(p) == 1 && m.rank(&b.union(p)) == rb + 1)
}

/// Elements of `B` extending a basis of `A`, chosen by least index. They are
/// skew to `A`, and after contracting them `A` spans the rest of `B`.
fn spanning_complement<M: Matroid + ?Sized>(m: &M, a: &SubsetMask, b: &SubsetMask) -> SubsetMask {
    let mut span = basis_of(m, a);
    let mut z = SubsetMask::new();
    for x in b.iter() {
        let next = span.with(x);
        if m.rank(&next) == next.len() {
            span = next;
            z.insert(x);
        }
    }
    z
}

fn dense<M: Matroid + ?Sized>(m: &M, simple_set: &SubsetMask, lam: &BigRational, q: u64) -> bool {
    exceeds(simple_set.len(), lam, q, m.rank(simple_set))
}

/// The one-element case, inside the ambient set `A + e` with `e ∈ cl(A)`.
fn skew_to_point<M: Matroid + ?Sized>(
    m: &M,
    a: &SubsetMask,
    e: usize,
    lam: &BigRational,
    q: u64,
    l: u64,
) -> Result<SubsetMask, ProcedureError> {
    let original = a.clone();
    // Point representatives carry the same ε and rank as A.
    let mut a: SubsetMask = PointIndex::within(m, a).representatives().into_iter().collect();
    'shrink: loop {
        // Greedy least-index removal until no single point can go.
        loop {
            let before = a.len();
            for p in a.to_vec() {
                let smaller = a.without(p);
                if dense(m, &smaller, lam, q) {
                    a = smaller;
                }
            }
            if a.len() == before {
                break;
            }
        }
        let r = m.rank(&a);
        if m.rank(&a.with(e)) > r {
            return Ok(a);
        }
        if r < 2 {
            // A single point off e: ε = 1 > λ q >= λ q / l.
            return original
                .iter()
                .find(|&p| m.rank(&SubsetMask::singleton(p).with(e)) == 2)
                .map(SubsetMask::singleton)
                .ok_or(ProcedureError::NoSuchFlat { element: e, rank: r });
        }

        let ambient = a.with(e);
        let cl = |s: &SubsetMask| m.closure(s).intersection(&ambient);
        let mut w = cl(&SubsetMask::new());
        while m.rank(&w) + 2 < r {
            let p = a
                .iter()
                .find(|&p| !w.contains(p) && !cl(&w.with(p)).contains(e))
                .ok_or(ProcedureError::NoSuchFlat { element: e, rank: r })?;
            w = cl(&w.with(p));
        }

        let h0 = cl(&w.with(e));
        let in_h0 = a.intersection(&h0);
        if dense(m, &in_h0, lam, q) {
            // A was not minimal after all; continue from the smaller set.
            a = in_h0;
            continue 'shrink;
        }
        let mut seen = HashSet::new();
        let mut best: Option<SubsetMask> = None;
        for p in a.difference(&h0).iter() {
            if seen.iter().any(|h: &SubsetMask| h.contains(p)) {
                continue;
            }
            let h = cl(&w.with(p));
            let part = a.intersection(&h);
            if best.as_ref().is_none_or(|b| part.len() > b.len()) {
                best = Some(part);
            }
            seen.insert(h);
        }
        let count = seen.len();
        if count as u64 > l {
            return Err(ProcedureError::NotInClass { l, points: count + 1 });
        }
        return Ok(best.expect("A - H0 is non-empty"));
    }
}
