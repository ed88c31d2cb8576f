//! Matroid catalogs: generator specs, deterministic generation, optional
//! isomorphism reduction and an on-disk cache keyed by a hash of the spec.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::oracles::spot_check_rank_axioms;
use super::HarnessError;
use crate::field::FieldSpec;
use crate::geometry::{pg, subfield_subgeometry};
use crate::mask::SubsetMask;
use crate::matroid::{
    lines, AnyMatroid, ExplicitMatroid, LinearMatroid, Matroid, MatroidSpec,
};

/// Environment variable overriding the default cache directory.
pub const CACHE_DIR_ENV: &str = "LINEMIN_CACHE_DIR";

/// Largest ground set for which isomorphism reduction runs the exact test.
pub const ISO_EXACT_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSpec {
    /// Restrictions of `pg(n, q)` to point subsets with at least
    /// `min_points` points; all of them, or `sample` seeded draws.
    PgRestrictions {
        n: u32,
        q: u64,
        min_points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample: Option<Sample>,
    },
    /// Random matrices over GF(q) with `rank <= max_rank` and
    /// `size <= max_size` columns.
    RandomLinear { q: u64, max_rank: usize, max_size: usize, count: usize, seed: u64 },
    /// Hand-picked instances by name.
    Named { names: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    pub count: usize,
    pub seed: u64,
}

pub const DEFAULT_NAMED: &[&str] = &[
    "fano",
    "fano-plus-point",
    "two-lines-rank-3",
    "pg3q3",
    "pg4q2",
    "u2,6",
    "u3,6",
    "u23+u23",
];

/// Catalog names understood by [`CatalogSpec::from_str`].
pub const BUILTIN_CATALOGS: &[&str] = &[
    "pg3q2-all",
    "pg3q2-restrictions",
    "pg3q3-restrictions",
    "pg3q4-restrictions",
    "pg4q2-all",
    "named",
    "random-gf2",
    "random-gf3",
];

impl FromStr for CatalogSpec {
    type Err = HarnessError;

    /// Parses `pg<n>q<q>-all`, `pg<n>q<q>-restrictions`, `pg<n>q<q>-min<k>`,
    /// `named`, `named:<a>,<b>`, `random-gf<q>` and
    /// `random-gf<q>-<count>-seed<s>`.
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let bad = || HarnessError::UnknownCatalog(s.to_string());
        if s == "named" {
            return Ok(CatalogSpec::Named { names: DEFAULT_NAMED.iter().map(|n| n.to_string()).collect() });
        }
        if let Some(list) = s.strip_prefix("named:") {
            let names: Vec<String> = list.split(',').filter(|n| !n.is_empty()).map(str::to_string).collect();
            // Commas also appear inside uniform names like u2,6; rejoin those.
            return Ok(CatalogSpec::Named { names: rejoin_uniform(names) });
        }
        if let Some(rest) = s.strip_prefix("random-gf") {
            let mut parts = rest.split('-');
            let q: u64 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
            let count = match parts.next() {
                Some(c) => c.parse().map_err(|_| bad())?,
                None => 50,
            };
            let seed = match parts.next() {
                Some(p) => p.strip_prefix("seed").and_then(|x| x.parse().ok()).ok_or_else(bad)?,
                None => 0,
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            return Ok(CatalogSpec::RandomLinear { q, max_rank: 6, max_size: 12, count, seed });
        }
        let rest = s.strip_prefix("pg").ok_or_else(bad)?;
        let (nq, kind) = rest.split_once('-').ok_or_else(bad)?;
        let (n, q) = nq.split_once('q').ok_or_else(bad)?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        let (min_points, sample) = match kind {
            "all" => (1, None),
            "restrictions" => default_floor(n, q),
            other => {
                let k = other.strip_prefix("min").and_then(|k| k.parse().ok()).ok_or_else(bad)?;
                (k, None)
            }
        };
        Ok(CatalogSpec::PgRestrictions { n, q, min_points, sample })
    }
}

fn rejoin_uniform(parts: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in parts {
        let continues = p.chars().all(|c| c.is_ascii_digit())
            && out.last().is_some_and(|l| l.starts_with('u') && !l.contains(',') && !l.contains('+'));
        match out.last_mut() {
            Some(last) if continues => {
                last.push(',');
                last.push_str(&p);
            }
            _ => out.push(p),
        }
    }
    out
}

/// Point floors for the default restriction catalogs. PG(2,4) has 2^21
/// subsets, so above the floor it is sampled.
fn default_floor(n: u32, q: u64) -> (usize, Option<Sample>) {
    match (n, q) {
        (3, 2) => (4, None),
        (3, 3) => (10, None),
        (3, 4) => (15, Some(Sample { count: 256, seed: 0 })),
        _ => (1, None),
    }
}

impl CatalogSpec {
    /// Content hash of the canonical JSON form, used as the cache key.
    pub fn cache_key(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("catalog specs serialize");
        let mut h = Sha256::new();
        h.update(b"linemin-catalog-v1\0");
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(b"\0");
        h.update(&canonical);
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogMember {
    /// Canonical sort key, unique within the catalog.
    pub key: String,
    pub matroid: MatroidSpec,
}

impl CatalogMember {
    pub fn build(&self) -> Result<AnyMatroid, HarnessError> {
        Ok(self.matroid.build()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub name: String,
    pub spec: CatalogSpec,
    pub iso_reduced: bool,
    pub members: Vec<CatalogMember>,
}

impl Catalog {
    pub fn generate(name: &str, spec: &CatalogSpec, iso_reduce: bool) -> Result<Self, HarnessError> {
        let mut members = match spec {
            CatalogSpec::PgRestrictions { n, q, min_points, sample } => {
                pg_restrictions(*n, *q, *min_points, *sample)?
            }
            CatalogSpec::RandomLinear { q, max_rank, max_size, count, seed } => {
                random_linear(*q, *max_rank, *max_size, *count, *seed)?
            }
            CatalogSpec::Named { names } => names
                .iter()
                .map(|n| {
                    Ok(CatalogMember { key: n.clone(), matroid: named_matroid(n)?.to_spec() })
                })
                .collect::<Result<Vec<_>, HarnessError>>()?,
        };
        members.sort_by(|a, b| a.key.cmp(&b.key));
        members.dedup_by(|a, b| a.key == b.key);

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for member in &members {
            let m = member.build()?;
            if let Some(failure) = spot_check_rank_axioms(&m, &mut rng, 64) {
                return Err(HarnessError::InvalidMember { key: member.key.clone(), detail: failure });
            }
        }
        if iso_reduce {
            members = reduce_isomorphic(members)?;
        }
        Ok(Catalog { name: name.to_string(), spec: spec.clone(), iso_reduced: iso_reduce, members })
    }

    /// Loads the catalog from `cache_dir` or generates and stores it.
    /// Writes go to a temporary file that is renamed into place.
    pub fn load_or_generate(
        name: &str,
        spec: &CatalogSpec,
        iso_reduce: bool,
        cache_dir: Option<&Path>,
    ) -> Result<Self, HarnessError> {
        let Some(dir) = cache_dir else {
            return Self::generate(name, spec, iso_reduce);
        };
        let path = cache_path(dir, spec, iso_reduce);
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(cat) = serde_json::from_slice::<Catalog>(&bytes) {
                if cat.spec == *spec && cat.iso_reduced == iso_reduce {
                    return Ok(Catalog { name: name.to_string(), ..cat });
                }
            }
        }
        let cat = Self::generate(name, spec, iso_reduce)?;
        cat.store(dir)?;
        Ok(cat)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("catalogs serialize");
        out.push(b'\n');
        out
    }

    pub fn store(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        fs::create_dir_all(dir)?;
        let path = cache_path(dir, &self.spec, self.iso_reduced);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&self.to_json())?;
        tmp.persist(&path).map_err(|e| HarnessError::Io(e.error.to_string()))?;
        Ok(path)
    }
}

pub fn cache_path(dir: &Path, spec: &CatalogSpec, iso_reduce: bool) -> PathBuf {
    let suffix = if iso_reduce { "-iso" } else { "" };
    dir.join(format!("{}{suffix}.json", spec.cache_key()))
}

/// The cache directory: explicit flag, then the environment, then none.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
}

fn mask_key(prefix: &str, set: &SubsetMask, width: usize) -> String {
    let bits: String = (0..width).map(|i| if set.contains(i) { '1' } else { '0' }).collect();
    format!("{prefix}/{bits}")
}

fn pg_restrictions(n: u32, q: u64, min_points: usize, sample: Option<Sample>) -> Result<Vec<CatalogMember>, HarnessError> {
    let base = pg(n, q)?;
    let size = base.ground_size();
    let prefix = format!("pg{n}q{q}");
    let member = |set: &SubsetMask| CatalogMember {
        key: mask_key(&prefix, set, size),
        matroid: AnyMatroid::Linear(base.restrict(set)).to_spec(),
    };
    if let Some(Sample { count, seed }) = sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let sizes = min_points.max(1)..=size;
        if sizes.is_empty() {
            return Ok(out);
        }
        let mut attempts = 0;
        while out.len() < count && attempts < count * 20 {
            attempts += 1;
            let k = rng.random_range(sizes.clone());
            let set: SubsetMask = rand::seq::index::sample(&mut rng, size, k).into_iter().collect();
            if seen.insert(set.clone()) {
                out.push(member(&set));
            }
        }
        return Ok(out);
    }
    if size > 24 {
        return Err(HarnessError::TooLarge(format!("{size}-point geometry has too many subsets to enumerate")));
    }
    Ok((1u64..1 << size)
        .filter(|bits| bits.count_ones() as usize >= min_points)
        .map(|bits| member(&SubsetMask::from_bits(bits)))
        .collect())
}

fn random_linear(q: u64, max_rank: usize, max_size: usize, count: usize, seed: u64) -> Result<Vec<CatalogMember>, HarnessError> {
    let field = Arc::new(FieldSpec::new(q)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = count.max(1).to_string().len();
    (0..count)
        .map(|i| {
            let r = rng.random_range(1..=max_rank.max(1));
            let n = rng.random_range(1..=max_size.max(1));
            let rows: Vec<Vec<u8>> = (0..r)
                .map(|_| (0..n).map(|_| rng.random_range(0..q) as u8).collect())
                .collect();
            let m = LinearMatroid::new(field.clone(), rows)?;
            Ok(CatalogMember { key: format!("random-gf{q}-s{seed}/{i:0width$}"), matroid: AnyMatroid::Linear(m).to_spec() })
        })
        .collect()
}

/// Builds a named instance: `fano`, `fano-plus-point`, `two-lines-rank-3`,
/// `pg<n>q<q>`, `u<r>,<n>`, and direct sums joined by `+` such as `u23+u23`
/// (`u<r><n>` with single digits is accepted inside sums).
pub fn named_matroid(name: &str) -> Result<AnyMatroid, HarnessError> {
    let bad = || HarnessError::UnknownNamed(name.to_string());
    if name.contains('+') {
        let mut parts = name.split('+');
        let mut acc = named_matroid(parts.next().ok_or_else(bad)?)?;
        for p in parts {
            acc = AnyMatroid::direct_sum(acc, named_matroid(p)?)?;
        }
        return Ok(acc);
    }
    match name {
        "fano" => return Ok(pg(3, 2)?.into()),
        "fano-plus-point" => return Ok(fano_plus_point()?.into()),
        "two-lines-rank-3" => return Ok(two_lines_rank_3()?.into()),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("pg") {
        let (n, q) = rest.split_once('q').ok_or_else(bad)?;
        return Ok(pg(n.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)?.into());
    }
    if let Some(rest) = name.strip_prefix('u') {
        let (r, n) = match rest.split_once(',') {
            Some((r, n)) => (r.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?),
            None if rest.len() == 2 => {
                let d: Vec<usize> = rest.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(bad)?;
                (d[0], d[1])
            }
            None => return Err(bad()),
        };
        return Ok(crate::matroid::UniformMatroid::new(r, n)?.into());
    }
    Err(bad())
}

/// The Fano subplane of PG(2,4) plus one point on a line meeting it in three
/// points.
pub fn fano_plus_point() -> Result<LinearMatroid, HarnessError> {
    let big = pg(3, 4)?;
    let fano = subfield_subgeometry(&big, 1)?;
    let line = lines(&big, 5)
        .into_iter()
        .find(|l| l.intersection(&fano).len() == 3)
        .expect("every Fano line extends to a line of PG(2,4)");
    let x = line.difference(&fano).first().expect("extended lines have new points");
    Ok(big.restrict(&fano.with(x)))
}

/// Two 11-point lines of PG(2,11) through a common point.
pub fn two_lines_rank_3() -> Result<LinearMatroid, HarnessError> {
    let plane = pg(3, 11)?;
    let long = lines(&plane, 12);
    let first = &long[0];
    let second = long[1..]
        .iter()
        .find(|l| !l.is_disjoint(first))
        .expect("lines of a projective plane meet");
    let common = first.intersection(second);
    // Drop one point of each line away from the common point: 11 each.
    let a = first.difference(&common).first().expect("lines have 12 points");
    let b = second.difference(&common).first().expect("lines have 12 points");
    let keep = first.union(second).without(a).without(b);
    Ok(plane.restrict(&keep))
}

/// Cheap isomorphism invariant: the number of subsets of each (size, rank)
/// and the sorted per-element counts of rank-deficient pairs and triples.
fn rank_profile(m: &ExplicitMatroid) -> Vec<u32> {
    let n = m.ground_size();
    let r = m.full_rank();
    let mut counts = vec![0u32; (n + 1) * (r + 1)];
    for bits in 0u32..1 << n {
        counts[bits.count_ones() as usize * (r + 1) + m.rank_bits(bits)] += 1;
    }
    let mut per_element: Vec<u32> = (0..n)
        .map(|e| {
            (0u32..1 << n)
                .filter(|&b| b & (1 << e) != 0 && b.count_ones() <= 3 && (m.rank_bits(b) as u32) < b.count_ones())
                .count() as u32
        })
        .collect();
    per_element.sort_unstable();
    counts.extend(per_element);
    counts
}

/// Exact isomorphism test on rank tables by backtracking over bijections,
/// checking every subset of the already mapped elements.
pub fn isomorphic(a: &ExplicitMatroid, b: &ExplicitMatroid) -> bool {
    let n = a.ground_size();
    if n != b.ground_size() || a.full_rank() != b.full_rank() {
        return false;
    }
    fn extend(a: &ExplicitMatroid, b: &ExplicitMatroid, map: &mut Vec<usize>, used: u32) -> bool {
        let i = map.len();
        if i == a.ground_size() {
            return true;
        }
        for cand in 0..b.ground_size() {
            if used & (1 << cand) != 0 {
                continue;
            }
            map.push(cand);
            let ok = (0u32..1 << i).all(|sub| {
                let s = sub | 1 << i;
                let image: u32 = (0..=i).filter(|&k| s & (1 << k) != 0).map(|k| 1u32 << map[k]).sum();
                a.rank_bits(s) == b.rank_bits(image)
            });
            if ok && extend(a, b, map, used | 1 << cand) {
                return true;
            }
            map.pop();
        }
        false
    }
    extend(a, b, &mut Vec::with_capacity(n), 0)
}

fn reduce_isomorphic(members: Vec<CatalogMember>) -> Result<Vec<CatalogMember>, HarnessError> {
    let mut kept: Vec<(CatalogMember, Option<(Vec<u32>, ExplicitMatroid)>)> = Vec::new();
    for member in members {
        let m = member.build()?;
        let info = if m.ground_size() <= ISO_EXACT_LIMIT {
            let t = ExplicitMatroid::from_matroid(&m)?;
            Some((rank_profile(&t), t))
        } else {
            None
        };
        let duplicate = info.as_ref().is_some_and(|(profile, table)| {
            kept.iter().any(|(_, other)| {
                other.as_ref().is_some_and(|(p, t)| p == profile && isomorphic(table, t))
            })
        });
        if !duplicate {
            kept.push((member, info));
        }
    }
    Ok(kept.into_iter().map(|(m, _)| m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{epsilon, is_round, UniformMatroid};

    #[test]
    fn parse_names() {
        assert_eq!(
            "pg3q2-all".parse::<CatalogSpec>().unwrap(),
            CatalogSpec::PgRestrictions { n: 3, q: 2, min_points: 1, sample: None }
        );
        assert_eq!(
            "pg3q3-min12".parse::<CatalogSpec>().unwrap(),
            CatalogSpec::PgRestrictions { n: 3, q: 3, min_points: 12, sample: None }
        );
        assert_eq!(
            "random-gf3-10-seed7".parse::<CatalogSpec>().unwrap(),
            CatalogSpec::RandomLinear { q: 3, max_rank: 6, max_size: 12, count: 10, seed: 7 }
        );
        assert_eq!(
            "named:fano,u2,6,u23+u23".parse::<CatalogSpec>().unwrap(),
            CatalogSpec::Named { names: vec!["fano".into(), "u2,6".into(), "u23+u23".into()] }
        );
        for name in BUILTIN_CATALOGS {
            assert!(name.parse::<CatalogSpec>().is_ok(), "{name}");
        }
        assert!("pg3-all".parse::<CatalogSpec>().is_err());
        assert!("bogus".parse::<CatalogSpec>().is_err());
    }

    #[test]
    fn exhaustive_fano_catalog_sizes() {
        let all = Catalog::generate("pg3q2-all", &"pg3q2-all".parse().unwrap(), false).unwrap();
        assert_eq!(all.members.len(), 127);
        let floor = Catalog::generate("x", &"pg3q2-restrictions".parse().unwrap(), false).unwrap();
        assert_eq!(floor.members.len(), 64);
        let keys: Vec<&String> = all.members.iter().map(|m| &m.key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn iso_reduction_of_fano_restrictions() {
        // Non-empty point subsets of the Fano plane up to isomorphism: sizes
        // 1..7 give 1, 1, 2, 2, 1, 1, 1 classes (a line or a triangle at 3,
        // and their complements at 4).
        let reduced = Catalog::generate("x", &"pg3q2-all".parse().unwrap(), true).unwrap();
        assert_eq!(reduced.members.len(), 9);
    }

    #[test]
    fn regeneration_is_byte_identical() {
        let spec: CatalogSpec = "random-gf2-8-seed3".parse().unwrap();
        let a = Catalog::generate("r", &spec, false).unwrap().to_json();
        let b = Catalog::generate("r", &spec, false).unwrap().to_json();
        assert_eq!(a, b);
        let other: CatalogSpec = "random-gf2-8-seed4".parse().unwrap();
        assert_ne!(spec.cache_key(), other.cache_key());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec: CatalogSpec = "pg3q2-restrictions".parse().unwrap();
        let first = Catalog::load_or_generate("c", &spec, false, Some(dir.path())).unwrap();
        let path = cache_path(dir.path(), &spec, false);
        assert!(path.exists());
        let bytes = fs::read(&path).unwrap();
        let second = Catalog::load_or_generate("c", &spec, false, Some(dir.path())).unwrap();
        assert_eq!(first, second);
        assert_eq!(fs::read(&path).unwrap(), bytes);
    }

    #[test]
    fn named_instances() {
        let m = named_matroid("two-lines-rank-3").unwrap();
        assert_eq!(m.ground_size(), 21);
        assert_eq!(m.full_rank(), 3);
        assert_eq!(epsilon(&m), 21);
        assert!(!is_round(&m).unwrap().is_round());
        let f = named_matroid("fano-plus-point").unwrap();
        assert_eq!((f.ground_size(), f.full_rank()), (8, 3));
        let s = named_matroid("u23+u23").unwrap();
        assert_eq!((s.ground_size(), s.full_rank()), (6, 4));
        let u = named_matroid("u2,6").unwrap();
        assert_eq!(ExplicitMatroid::from_matroid(&u).unwrap(), ExplicitMatroid::from_matroid(&UniformMatroid::new(2, 6).unwrap()).unwrap());
        assert!(named_matroid("nope").is_err());
        let cat = Catalog::generate("named", &"named".parse().unwrap(), false).unwrap();
        assert_eq!(cat.members.len(), DEFAULT_NAMED.len());
    }

    #[test]
    fn sampled_catalog_is_seeded() {
        let spec: CatalogSpec = "pg3q4-restrictions".parse().unwrap();
        let a = Catalog::generate("s", &spec, false).unwrap();
        assert_eq!(a.members.len(), 256);
        assert!(a.members.iter().all(|m| m.build().unwrap().ground_size() >= 15));
        assert_eq!(a, Catalog::generate("s", &spec, false).unwrap());
    }
}
