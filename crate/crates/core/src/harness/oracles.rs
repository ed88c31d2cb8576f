//! Brute-force oracles. They share nothing with the fast paths beyond the
//! rank oracle itself, and exist to cross-check them on small inputs.

use rand::Rng;

use super::HarnessError;
use crate::mask::SubsetMask;
use crate::matroid::{ExplicitMatroid, Matroid};

/// Ground set limit for [`oracle_roundness`] and [`oracle_rank_axioms`].
pub const ROUNDNESS_LIMIT: usize = 14;
/// Ground set limit for the minor-search oracles.
pub const MINOR_LIMIT: usize = 10;
/// Largest target for [`oracle_minor_search`].
pub const ORACLE_TARGET_LIMIT: usize = 7;

fn rank_table<M: Matroid + ?Sized>(m: &M) -> Vec<u8> {
    (0u64..1 << m.ground_size())
        .map(|b| m.rank(&SubsetMask::from_bits(b)) as u8)
        .collect()
}

/// Checks the rank axioms on every subset: `0 <= r(X) <= |X|`, unit
/// increments and local submodularity on all triples `(X, e, f)`; for
/// `n <= 10` also monotonicity and submodularity on all pairs `(X, Y)`.
/// Returns the first failure found.
pub fn oracle_rank_axioms<M: Matroid + ?Sized>(m: &M) -> Result<Option<String>, HarnessError> {
    let n = m.ground_size();
    if n > ROUNDNESS_LIMIT {
        return Err(HarnessError::SizeLimit { size: n, limit: ROUNDNESS_LIMIT });
    }
    let r = rank_table(m);
    let full = 1usize << n;
    for x in 0..full {
        if r[x] as u32 > x.count_ones() {
            return Ok(Some(format!("r({x:b}) = {} exceeds its size", r[x])));
        }
        for e in 0..n {
            let xe = x | 1 << e;
            if xe == x {
                continue;
            }
            if r[xe] < r[x] || r[xe] > r[x] + 1 {
                return Ok(Some(format!("adding {e} to {x:b} changes rank by {}", r[xe] as i32 - r[x] as i32)));
            }
            for f in e + 1..n {
                let xf = x | 1 << f;
                if xf == x {
                    continue;
                }
                if (r[xe] as u32 + r[xf] as u32) < (r[xe | xf] as u32 + r[x] as u32) {
                    return Ok(Some(format!("submodularity fails at {x:b} with {e}, {f}")));
                }
            }
        }
    }
    if n <= 10 {
        for x in 0..full {
            for y in 0..full {
                if (r[x] as u32 + r[y] as u32) < (r[x | y] as u32 + r[x & y] as u32) {
                    return Ok(Some(format!("submodularity fails on {x:b}, {y:b}")));
                }
                if x & y == x && r[x] > r[y] {
                    return Ok(Some(format!("monotonicity fails on {x:b} within {y:b}")));
                }
            }
        }
    }
    Ok(None)
}

/// Random pairs of subsets checked for the rank axioms.
pub fn spot_check_rank_axioms<M: Matroid + ?Sized, R: Rng>(m: &M, rng: &mut R, trials: usize) -> Option<String> {
    let n = m.ground_size();
    if m.rank(&SubsetMask::new()) != 0 {
        return Some("rank of the empty set is not 0".into());
    }
    let random_set = |rng: &mut R| -> SubsetMask { (0..n).filter(|_| rng.random_bool(0.5)).collect() };
    for _ in 0..trials {
        let x = random_set(rng);
        let y = random_set(rng);
        let (rx, ry) = (m.rank(&x), m.rank(&y));
        let (ru, ri) = (m.rank(&x.union(&y)), m.rank(&x.intersection(&y)));
        if rx > x.len() || ry > y.len() {
            return Some(format!("rank exceeds size on {x} or {y}"));
        }
        if rx + ry < ru + ri {
            return Some(format!("submodularity fails on {x}, {y}"));
        }
        if ri > rx.min(ry) || ru < rx.max(ry) {
            return Some(format!("monotonicity fails on {x}, {y}"));
        }
    }
    None
}

/// Roundness by trying every partition of the ground set into two sets.
pub fn oracle_roundness<M: Matroid + ?Sized>(m: &M) -> Result<bool, HarnessError> {
    let n = m.ground_size();
    if n > ROUNDNESS_LIMIT {
        return Err(HarnessError::SizeLimit { size: n, limit: ROUNDNESS_LIMIT });
    }
    let r = m.full_rank();
    let full = (1u64 << n) - 1;
    for x in 0..=full {
        let a = SubsetMask::from_bits(x);
        let b = SubsetMask::from_bits(full & !x);
        if m.rank(&a) < r && m.rank(&b) < r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank table of `M / C \ D` on the surviving elements in increasing order.
fn minor_table<M: Matroid + ?Sized>(m: &M, n: usize, c: u32, d: u32) -> Vec<u8> {
    let rest: Vec<usize> = (0..n).filter(|&e| (c | d) & (1 << e) == 0).collect();
    let rc = m.rank(&SubsetMask::from_bits(c as u64));
    (0u32..1 << rest.len())
        .map(|bits| {
            let mut set = c as u64;
            for (i, &e) in rest.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    set |= 1 << e;
                }
            }
            (m.rank(&SubsetMask::from_bits(set)) - rc) as u8
        })
        .collect()
}

fn profile(table: &[u8], t: usize) -> Vec<u32> {
    let mut counts = vec![0u32; (t + 1) * (t + 1)];
    for (bits, &r) in table.iter().enumerate() {
        counts[(bits as u32).count_ones() as usize * (t + 1) + r as usize] += 1;
    }
    counts
}

fn permuted_equal(table: &[u8], target: &ExplicitMatroid, t: usize) -> bool {
    let mut perm: Vec<usize> = (0..t).collect();
    loop {
        let same = (0u32..1 << t).all(|bits| {
            let image: u32 = (0..t).filter(|&i| bits & (1 << i) != 0).map(|i| 1u32 << perm[i]).sum();
            target.rank_bits(bits) == table[image as usize] as usize
        });
        if same {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Whether some `M / C \ D` with `C` independent is isomorphic to `target`,
/// by enumerating every such pair and every bijection onto the target.
pub fn oracle_minor_search<M: Matroid + ?Sized>(m: &M, target: &ExplicitMatroid) -> Result<bool, HarnessError> {
    let n = m.ground_size();
    if n > MINOR_LIMIT {
        return Err(HarnessError::SizeLimit { size: n, limit: MINOR_LIMIT });
    }
    let t = target.ground_size();
    if t > ORACLE_TARGET_LIMIT {
        return Err(HarnessError::SizeLimit { size: t, limit: ORACLE_TARGET_LIMIT });
    }
    let want = profile(target.table(), t);
    let all = (1u32 << n) - 1;
    for c in 0..=all {
        if m.rank(&SubsetMask::from_bits(c as u64)) != c.count_ones() as usize {
            continue;
        }
        let free = all & !c;
        // Every D inside the complement of C, by submask enumeration.
        let mut d = free;
        loop {
            if (free & !d).count_ones() as usize == t {
                let table = minor_table(m, n, c, d);
                if profile(&table, t) == want && permuted_equal(&table, target, t) {
                    return Ok(true);
                }
            }
            if d == 0 {
                break;
            }
            d = (d - 1) & free;
        }
    }
    Ok(false)
}

/// `M / C \ D` is `U_{2,k}`: rank 2, no loops, no parallel pairs.
fn is_line_minor<M: Matroid + ?Sized>(m: &M, n: usize, c: u32, d: u32) -> bool {
    let rest: Vec<usize> = (0..n).filter(|&e| (c | d) & (1 << e) == 0).collect();
    let base = SubsetMask::from_bits(c as u64);
    let rc = m.rank(&base);
    let rank = |extra: &[usize]| m.rank(&extra.iter().fold(base.clone(), |s, &e| s.with(e))) - rc;
    rank(&rest) == 2
        && rest.iter().all(|&x| rank(&[x]) == 1)
        && rest.iter().enumerate().all(|(i, &x)| rest[i + 1..].iter().all(|&y| rank(&[x, y]) == 2))
}

/// The largest `k` such that some `M / C \ D` with `C` independent is the
/// `k`-point line `U_{2,k}`, by enumerating every such pair.
pub fn oracle_max_line<M: Matroid + ?Sized>(m: &M) -> Result<usize, HarnessError> {
    let n = m.ground_size();
    if n > MINOR_LIMIT {
        return Err(HarnessError::SizeLimit { size: n, limit: MINOR_LIMIT });
    }
    let all = (1u32 << n) - 1;
    let mut best = 0;
    for c in 0..=all {
        if m.rank(&SubsetMask::from_bits(c as u64)) != c.count_ones() as usize {
            continue;
        }
        let free = all & !c;
        let mut d = free;
        loop {
            let k = (free & !d).count_ones() as usize;
            if k > best && k >= 2 && is_line_minor(m, n, c, d) {
                best = k;
            }
            if d == 0 {
                break;
            }
            d = (d - 1) & free;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pg;
    use crate::matroid::UniformMatroid;

    fn u(r: usize, n: usize) -> UniformMatroid {
        UniformMatroid::new(r, n).unwrap()
    }

    #[test]
    fn roundness_examples() {
        assert!(!oracle_roundness(&u(2, 2)).unwrap());
        assert!(oracle_roundness(&pg(3, 2).unwrap()).unwrap());
        assert!(oracle_roundness(&u(3, 5)).unwrap());
        assert!(oracle_roundness(&pg(3, 4).unwrap()).is_err());
    }

    #[test]
    fn minor_examples() {
        let fano = pg(3, 2).unwrap();
        let u24 = ExplicitMatroid::from_matroid(&u(2, 4)).unwrap();
        let u23 = ExplicitMatroid::from_matroid(&u(2, 3)).unwrap();
        assert!(!oracle_minor_search(&fano, &u24).unwrap());
        assert!(oracle_minor_search(&fano, &u23).unwrap());
        assert_eq!(oracle_max_line(&fano).unwrap(), 3);
        assert_eq!(oracle_max_line(&u(3, 6)).unwrap(), 5);
        assert_eq!(oracle_max_line(&u(1, 3)).unwrap(), 0);
    }

    #[test]
    fn axioms_pass_and_fail() {
        assert_eq!(oracle_rank_axioms(&pg(3, 2).unwrap()).unwrap(), None);
        assert_eq!(oracle_rank_axioms(&u(2, 5)).unwrap(), None);

        struct Broken;
        impl Matroid for Broken {
            fn ground_size(&self) -> usize {
                3
            }
            fn rank(&self, set: &SubsetMask) -> usize {
                // r = 1 on singletons and the full set, 2 on pairs.
                match set.len() {
                    0 => 0,
                    1 | 3 => 1,
                    _ => 2,
                }
            }
        }
        assert!(oracle_rank_axioms(&Broken).unwrap().is_some());
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        assert!(spot_check_rank_axioms(&Broken, &mut rng, 200).is_some());
        assert!(spot_check_rank_axioms(&pg(3, 3).unwrap(), &mut rng, 200).is_none());
    }

    #[test]
    fn permutation_walk_covers_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
