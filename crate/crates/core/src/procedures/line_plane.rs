use super::{precondition, ProcedureError};
use crate::certificate::WitnessCertificate;
use crate::geometry::{is_projective_geometry, PgVerdict};
use crate::mask::SubsetMask;
use crate::matroid::{check_subset, is_round, Matroid, MinorView, PointIndex, RestrictionView};

/// A contraction `M / C` with a line of at least `q^2 + 1` points, from a
/// round `M` with a `U_{2,q+2}`-restriction `L` and a plane `P` of order `q`.
///
/// While `r(M / C) > 3`, contract the least element spanned by neither
/// `L + C` nor `P + C`; roundness guarantees one exists, and the contraction
/// keeps both restrictions. At rank 3, contracting the least element off
/// every point of `P` leaves at least `q^2 + 1` points, since the plane is
/// modular and the new element lies on at most one of its lines.
pub fn line_from_line_and_plane<M: Matroid + ?Sized>(
    m: &M,
    l: &SubsetMask,
    p: &SubsetMask,
    q: u64,
) -> Result<WitnessCertificate, ProcedureError> {
    check_subset(m, l)?;
    check_subset(m, p)?;
    let line_size = q as usize + 2;
    let l_points = PointIndex::within(m, l).count();
    if m.rank(l) != 2 || l.len() != line_size || l_points != line_size {
        return Err(precondition(
            "M|L = U(2,q+2)",
            format!("|L| = {}, r(L) = {}, ε(L) = {l_points}, need q + 2 = {line_size}", l.len(), m.rank(l)),
        ));
    }
    let plane = RestrictionView::new(m, p.clone())?;
    match is_projective_geometry(&plane) {
        Ok(PgVerdict::Plane { order }) if order == q => {}
        Ok(v) => return Err(precondition("M|P = PG(2,q)", format!("recognizer verdict {v:?}"))),
        Err(e) => return Err(precondition("M|P = PG(2,q)", e.to_string())),
    }
    if m.full_rank() == 0 || !is_round(m)?.is_round() {
        return Err(precondition("M round", "the ground set splits into two non-spanning sets"));
    }

    let n = m.ground_size();
    let mut c = SubsetMask::new();
    while m.rank(&c) + 3 < m.full_rank() {
        let span_l = m.closure(&l.union(&c));
        let span_p = m.closure(&p.union(&c));
        let Some(e) = (0..n).find(|&e| !span_l.contains(e) && !span_p.contains(e)) else {
            let view = MinorView::new(m, c.clone(), SubsetMask::new())?;
            return Err(ProcedureError::NoFreeElement { round: is_round(&view)?.is_round() });
        };
        c.insert(e);
    }

    let rc = m.rank(&c);
    let off_plane = |e: usize| {
        let with = c.with(e);
        m.rank(&with) == rc + 1 && p.iter().all(|x| m.rank(&with.with(x)) == rc + 2)
    };
    let e = (0..n)
        .filter(|&e| !c.contains(e))
        .find(|&e| off_plane(e))
        .ok_or_else(|| ProcedureError::PostconditionFailed("every element is parallel to the plane".into()))?;
    let contract = c.with(e);
    let line = m.ground_set().difference(&contract);
    let view = MinorView::new(m, contract.clone(), SubsetMask::new())?;
    let points = PointIndex::new(&view).count();
    let needed = (q * q + 1) as usize;
    if points < needed {
        return Err(ProcedureError::PostconditionFailed(format!(
            "M / C has {points} points, fewer than q^2 + 1 = {needed}"
        )));
    }
    Ok(WitnessCertificate::ContractionLine { contract, line, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;
    use crate::geometry::{pg, subfield_subgeometry};
    use crate::matroid::lines;

    /// The Fano subplane of PG(2,4) plus a point on one of its extended lines.
    fn fano_plus_point() -> (crate::matroid::LinearMatroid, SubsetMask, SubsetMask, usize) {
        let big = pg(3, 4).unwrap();
        let fano = subfield_subgeometry(&big, 1).unwrap();
        let long = lines(&big, 5)
            .into_iter()
            .find(|line| line.intersection(&fano).len() == 3)
            .unwrap();
        let x = long.difference(&fano).first().unwrap();
        let keep = fano.with(x);
        let m = big.restrict(&keep);
        let view = RestrictionView::new(&big, keep).unwrap();
        let l = view.from_base(&long.intersection(&fano).with(x));
        let p = view.from_base(&fano);
        (m, l, p, view.from_base(&SubsetMask::singleton(x)).first().unwrap())
    }

    #[test]
    fn fano_plus_point_gives_five_point_line() {
        let (m, l, p, x) = fano_plus_point();
        assert_eq!(m.ground_size(), 8);
        let cert = line_from_line_and_plane(&m, &l, &p, 2).unwrap();
        let WitnessCertificate::ContractionLine { contract, points, .. } = &cert else { unreachable!() };
        assert_eq!(contract, &SubsetMask::singleton(x));
        assert_eq!(*points, 5);
        assert!(verify_certificate(&cert, &m).unwrap());
    }

    #[test]
    fn rejects_bad_hypotheses() {
        let (m, l, p, _) = fano_plus_point();
        let short = l.without(l.first().unwrap());
        assert!(matches!(
            line_from_line_and_plane(&m, &short, &p, 2),
            Err(ProcedureError::PreconditionFailed { condition: "M|L = U(2,q+2)", .. })
        ));
        assert!(matches!(
            line_from_line_and_plane(&m, &l, &p, 3),
            Err(ProcedureError::PreconditionFailed { .. })
        ));
        let not_plane = p.without(p.first().unwrap());
        assert!(matches!(
            line_from_line_and_plane(&m, &l, &not_plane, 2),
            Err(ProcedureError::PreconditionFailed { condition: "M|P = PG(2,q)", .. })
        ));
    }

    #[test]
    fn higher_rank_contracts_down_to_a_plane() {
        // PG(3,4) with a Fano subplane: contract off-span points until rank 3.
        let m = pg(4, 4).unwrap();
        let plane_ambient = crate::matroid::hyperplanes(&m)[0].clone();
        let sub = crate::minors::find_pg_restriction(&RestrictionView::new(&m, plane_ambient.clone()).unwrap(), 3, 2)
            .unwrap()
            .unwrap();
        let view = RestrictionView::new(&m, plane_ambient).unwrap();
        let p = view.to_base(&sub);
        let fano_line = lines(&RestrictionView::new(&m, p.clone()).unwrap(), 3)[0].clone();
        let fano_line = RestrictionView::new(&m, p.clone()).unwrap().to_base(&fano_line);
        let full_line = m.closure(&fano_line);
        let x = full_line.difference(&p).first().unwrap();
        let l = fano_line.with(x);
        let cert = line_from_line_and_plane(&m, &l, &p, 2).unwrap();
        assert!(verify_certificate(&cert, &m).unwrap());
        let WitnessCertificate::ContractionLine { contract, points, .. } = &cert else { unreachable!() };
        assert_eq!(contract.len(), 2);
        assert!(*points >= 5);
    }
}
