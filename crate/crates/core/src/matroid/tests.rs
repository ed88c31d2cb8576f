use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::field::FieldSpec;
use crate::geometry::pg;

fn mask(v: &[usize]) -> SubsetMask {
    v.iter().copied().collect()
}

fn gf(q: u64) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::new(q).unwrap())
}

/// Brute-force rank of a column set by Gaussian elimination over GF(p),
/// independent of the library's reduction code.
fn naive_rank_prime(p: u64, cols: &[Vec<u64>]) -> usize {
    let mut m: Vec<Vec<u64>> = cols.to_vec();
    let mut rank = 0;
    let dim = m.first().map_or(0, Vec::len);
    for c in 0..dim {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] % p != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|&x| x * m[rank][c] % p == 1).unwrap();
        for i in 0..m.len() {
            if i != rank && m[i][c] % p != 0 {
                let f = m[i][c] * inv % p;
                for k in 0..dim {
                    m[i][k] = (m[i][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn fano() -> LinearMatroid {
    pg(3, 2).unwrap()
}

/// U(2,3) (+) U(2,3): rank 4, not round.
fn two_triangles() -> DirectSum<UniformMatroid, UniformMatroid> {
    DirectSum::new(UniformMatroid::new(2, 3).unwrap(), UniformMatroid::new(2, 3).unwrap()).unwrap()
}

#[test]
fn fano_basics() {
    let m = fano();
    assert_eq!(m.ground_size(), 7);
    assert_eq!(m.full_rank(), 3);
    assert_eq!(epsilon(&m), 7);
    assert!(is_simple(&m));
    let ls = lines(&m, 2);
    assert_eq!(ls.len(), 7);
    assert!(ls.iter().all(|l| l.len() == 3 && m.rank(l) == 2));
    assert_eq!(hyperplanes(&m), ls);
    assert_eq!(flats_of_rank(&m, 0).unwrap(), vec![SubsetMask::new()]);
    assert_eq!(flats_of_rank(&m, 3).unwrap(), vec![m.ground_set()]);
    assert_eq!(
        flats_of_rank(&m, 4),
        Err(MatroidError::RankOutOfRange { k: 4, rank: 3 })
    );
}

#[test]
fn closure_examples() {
    let m = fano();
    let l = &lines(&m, 3)[0];
    let two: SubsetMask = l.iter().take(2).collect();
    assert_eq!(m.closure(&two), *l);
    assert_eq!(m.closure(&SubsetMask::new()), SubsetMask::new());
    assert_eq!(
        closure(&m, &mask(&[9])),
        Err(MatroidError::OutOfRange { index: 9, size: 7 })
    );
    let u = UniformMatroid::new(2, 5).unwrap();
    assert_eq!(u.closure(&mask(&[1, 3])), u.ground_set());
    assert_eq!(u.closure(&mask(&[4])), mask(&[4]));
}

#[test]
fn loops_and_parallel_classes() {
    // columns: e0, e1, e0 again, zero, e0+e1 over GF(3)
    let rows = vec![vec![1, 0, 2, 0, 1], vec![0, 1, 0, 0, 1]];
    let m = LinearMatroid::new(gf(3), rows).unwrap();
    assert!(is_loop(&m, 3));
    assert_eq!(points(&m), vec![mask(&[0, 2]), mask(&[1]), mask(&[4])]);
    assert_eq!(epsilon(&m), 3);
    assert!(!is_simple(&m));
    let s = simplify(&m);
    assert_eq!(s.kept(), &mask(&[0, 1, 4]));
    assert!(is_simple(&s));
    assert_eq!(epsilon_restricted(&m, &mask(&[0, 2, 3])).unwrap(), 1);
}

#[test]
fn connectivity_examples() {
    let m = two_triangles();
    let a = mask(&[0, 1, 2]);
    let b = mask(&[3, 4, 5]);
    assert_eq!(local_connectivity(&m, &a, &b).unwrap(), 0);
    assert!(is_skew(&m, &a, &b).unwrap());
    let f = fano();
    let ls = lines(&f, 3);
    assert_eq!(local_connectivity(&f, &ls[0], &ls[1]).unwrap(), 1);
    assert!(local_connectivity(&f, &mask(&[7]), &a).is_err());
}

#[test]
fn roundness_examples() {
    let f = fano();
    assert!(is_round(&f).unwrap().is_round());
    let u = UniformMatroid::new(3, 5).unwrap();
    assert!(is_round(&u).unwrap().is_round());
    let m = two_triangles();
    let verdict = is_round(&m).unwrap();
    let cert = verdict.certificate().expect("a cover").clone();
    assert!(crate::certificate::verify_certificate(&cert, &m).unwrap());
    let (a, b) = verdict.partition(&m.ground_set()).unwrap();
    assert!(a.is_disjoint(&b) && a.union(&b) == m.ground_set());
    assert!(m.rank(&a) < 4 && m.rank(&b) < 4);
    assert_eq!(is_round(&UniformMatroid::new(0, 3).unwrap()), Err(MatroidError::RankZero));
}

#[test]
fn minor_views() {
    let f = fano();
    let e = mask(&[0]);
    let v = minor(&f, &e, &SubsetMask::new()).unwrap();
    assert_eq!(v.ground_size(), 6);
    assert_eq!(v.full_rank(), 2);
    // Contracting a Fano point leaves three parallel pairs.
    assert_eq!(epsilon(&v), 3);
    assert_eq!(
        minor(&f, &mask(&[1]), &mask(&[1, 2])).unwrap_err(),
        MatroidError::Overlap(mask(&[1]))
    );
    let d = minor(&f, &SubsetMask::new(), &mask(&[0, 1])).unwrap();
    assert_eq!(d.ground_size(), 5);
    assert_eq!(d.full_rank(), 3);
    assert_eq!(d.base_index(0), 2);
    assert_eq!(d.from_base(&mask(&[0, 2, 6])), mask(&[0, 4]));
}

#[test]
fn any_matroid_spec_round_trip() {
    let base = AnyMatroid::from(fano());
    let m = AnyMatroid::minor(Arc::new(base), mask(&[0]), mask(&[6])).unwrap();
    let sum = AnyMatroid::direct_sum(m, UniformMatroid::new(1, 2).unwrap().into()).unwrap();
    let spec = sum.to_spec();
    let json = serde_json::to_string(&spec).unwrap();
    let back: MatroidSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(back, spec);
    let rebuilt = back.build().unwrap();
    assert_eq!(
        ExplicitMatroid::from_matroid(&rebuilt).unwrap(),
        ExplicitMatroid::from_matroid(&sum).unwrap()
    );
    assert!(serde_json::from_str::<MatroidSpec>(r#"{"kind":"uniform","rank":1,"size":2,"x":0}"#).is_err());
}

#[test]
fn explicit_rejects_non_matroids() {
    // r({0}) = 2 violates unit increments.
    assert!(ExplicitMatroid::from_table(1, vec![0, 2]).is_err());
    // Submodularity failure on two elements: r(0)=r(1)=0, r(01)=1.
    assert!(ExplicitMatroid::from_table(2, vec![0, 0, 0, 1]).is_err());
    assert!(ExplicitMatroid::from_table(2, vec![0, 1, 1]).is_err());
    assert!(ExplicitMatroid::from_table(2, vec![0, 1, 1, 2]).is_ok());
}

fn check_rank_axioms<M: Matroid>(m: &M) {
    let n = m.ground_size();
    assert!(n <= 12);
    let full = 1u64 << n;
    let r = |b: u64| m.rank(&SubsetMask::from_bits(b));
    for x in 0..full {
        let rx = r(x);
        assert!(rx <= x.count_ones() as usize);
        for e in 0..n {
            if x & (1 << e) == 0 {
                let rxe = r(x | 1 << e);
                assert!(rxe == rx || rxe == rx + 1);
            }
        }
    }
    for x in 0..full {
        for y in 0..full {
            assert!(r(x) + r(y) >= r(x | y) + r(x & y), "submodularity on {x:b} {y:b}");
        }
    }
}

#[test]
fn rank_axioms_on_small_examples() {
    check_rank_axioms(&fano());
    check_rank_axioms(&two_triangles());
    check_rank_axioms(&UniformMatroid::new(3, 6).unwrap());
    check_rank_axioms(&minor(&pg(3, 3).unwrap(), &mask(&[0]), &mask(&[1, 2, 3])).unwrap());
}

fn arb_prime_matrix() -> impl Strategy<Value = (u64, Vec<Vec<u8>>)> {
    prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| {
        (1usize..=4, 1usize..=9).prop_flat_map(move |(r, n)| {
            prop::collection::vec(prop::collection::vec(0..p as u8, n), r).prop_map(move |rows| (p, rows))
        })
    })
}

fn arb_field_matrix() -> impl Strategy<Value = (u64, Vec<Vec<u8>>)> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]).prop_flat_map(|q| {
        (1usize..=4, 1usize..=8).prop_flat_map(move |(r, n)| {
            prop::collection::vec(prop::collection::vec(0..q as u8, n), r).prop_map(move |rows| (q, rows))
        })
    })
}

proptest! {
    #[test]
    fn linear_rank_matches_naive_elimination((p, rows) in arb_prime_matrix(), bits in any::<u16>()) {
        let m = LinearMatroid::new(gf(p), rows.clone()).unwrap();
        let n = m.ground_size();
        let set = SubsetMask::from_bits(bits as u64 & ((1 << n) - 1));
        let cols: Vec<Vec<u64>> = set.iter().map(|j| rows.iter().map(|row| row[j] as u64).collect()).collect();
        prop_assert_eq!(m.rank(&set), naive_rank_prime(p, &cols));
    }

    #[test]
    fn linear_matroids_satisfy_rank_axioms((q, rows) in arb_field_matrix()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        check_rank_axioms(&m);
    }

    #[test]
    fn oracles_agree_with_tables((q, rows) in arb_field_matrix(), bits in any::<u16>()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let t = ExplicitMatroid::from_matroid(&m).unwrap();
        let a = AnyMatroid::from(m.clone());
        let set = SubsetMask::from_bits(bits as u64 & ((1 << m.ground_size()) - 1));
        prop_assert_eq!(m.rank(&set), t.rank(&set));
        prop_assert_eq!(a.rank(&set), t.rank(&set));
        prop_assert_eq!(m.closure(&set), t.closure(&set));
        let naive: SubsetMask = (0..m.ground_size()).filter(|&e| m.rank(&set.with(e)) == m.rank(&set)).collect();
        prop_assert_eq!(m.closure(&set), naive);
    }

    #[test]
    fn minors_compose((q, rows) in arb_field_matrix(), c1 in any::<u16>(), d1 in any::<u16>(), c2 in any::<u16>(), d2 in any::<u16>()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let n = m.ground_size();
        let full = (1u64 << n) - 1;
        let c1 = SubsetMask::from_bits(c1 as u64 & full);
        let d1 = SubsetMask::from_bits(d1 as u64 & full).difference(&c1);
        let v1 = minor(&m, &c1, &d1).unwrap();
        let n1 = v1.ground_size();
        let full1 = if n1 == 0 { 0 } else { (1u64 << n1) - 1 };
        let c2 = SubsetMask::from_bits(c2 as u64 & full1);
        let d2 = SubsetMask::from_bits(d2 as u64 & full1).difference(&c2);
        let v2 = minor(&v1, &c2, &d2).unwrap();
        // (M / C1 \ D1) / C2 \ D2 = M / (C1 u C2') \ (D1 u D2')
        let c = c1.union(&v1.to_base(&c2));
        let d = d1.union(&v1.to_base(&d2));
        let direct = minor(&m, &c, &d).unwrap();
        prop_assert_eq!(v2.ground_size(), direct.ground_size());
        for bits in 0..(1u64 << v2.ground_size()) {
            let s = SubsetMask::from_bits(bits);
            prop_assert_eq!(v2.rank(&s), direct.rank(&s));
        }
    }

    #[test]
    fn simplification_preserves_points((q, rows) in arb_field_matrix()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let s = simplify(&m);
        prop_assert!(is_simple(&s));
        prop_assert_eq!(epsilon(&s), epsilon(&m));
        prop_assert_eq!(s.full_rank(), m.full_rank());
        // Every element is a loop or parallel to a kept one.
        for e in 0..m.ground_size() {
            prop_assert!(is_loop(&m, e) || s.kept().iter().any(|k| m.rank(&SubsetMask::singleton(e).with(k)) == 1));
        }
    }

    #[test]
    fn connectivity_is_symmetric_and_monotone((q, rows) in arb_field_matrix(), a in any::<u16>(), b in any::<u16>(), extra in any::<u16>()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let full = (1u64 << m.ground_size()) - 1;
        let a = SubsetMask::from_bits(a as u64 & full);
        let b = SubsetMask::from_bits(b as u64 & full);
        let a2 = a.union(&SubsetMask::from_bits(extra as u64 & full));
        let ab = local_connectivity(&m, &a, &b).unwrap();
        prop_assert_eq!(ab, local_connectivity(&m, &b, &a).unwrap());
        prop_assert!(local_connectivity(&m, &a2, &b).unwrap() >= ab);
        prop_assert!(ab <= m.rank(&a).min(m.rank(&b)));
    }

    #[test]
    fn roundness_matches_partition_search((q, rows) in arb_field_matrix()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let r = m.full_rank();
        prop_assume!(r > 0);
        let n = m.ground_size();
        let full = (1u64 << n) - 1;
        let splittable = (0..=full).any(|x| {
            m.rank(&SubsetMask::from_bits(x)) < r && m.rank(&SubsetMask::from_bits(full & !x)) < r
        });
        let verdict = is_round(&m).unwrap();
        prop_assert_eq!(verdict.is_round(), !splittable);
        if let Some(cert) = verdict.certificate() {
            prop_assert!(crate::certificate::verify_certificate(cert, &m).unwrap());
        }
    }

    #[test]
    fn flats_are_closed_and_complete((q, rows) in arb_field_matrix()) {
        let m = LinearMatroid::new(gf(q), rows).unwrap();
        let n = m.ground_size();
        for k in 0..=m.full_rank() {
            let found: std::collections::BTreeSet<SubsetMask> = flats_of_rank(&m, k).unwrap().into_iter().collect();
            let naive: std::collections::BTreeSet<SubsetMask> = (0..1u64 << n)
                .map(SubsetMask::from_bits)
                .filter(|s| m.rank(s) == k && is_flat(&m, s))
                .collect();
            prop_assert_eq!(found, naive);
        }
    }
}
