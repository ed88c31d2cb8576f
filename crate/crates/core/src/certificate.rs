//! Replayable evidence for structural claims.
//!
//! Every certificate serializes as `{type, sets, claims}` where `sets` maps
//! names to index arrays against the matroid it was issued for.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::mask::SubsetMask;
use crate::matroid::{
    check_subset, is_flat, is_independent, ExplicitMatroid, Matroid, MatroidError, MinorView, PointIndex,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateJson", into = "CertificateJson")]
pub enum WitnessCertificate {
    /// `M / contract \ delete` is isomorphic to `target` via
    /// target element `i` -> base element `image[i]`.
    MinorEmbedding {
        contract: SubsetMask,
        delete: SubsetMask,
        image: Vec<usize>,
        target: ExplicitMatroid,
    },
    /// Two hyperplanes whose union is the ground set.
    HyperplanePairCover { first: SubsetMask, second: SubsetMask },
    /// A partition of the ground set into two parts of rank below `r(M)`.
    Partition { first: SubsetMask, second: SubsetMask },
    /// In `M / contract`, the flat `line` (base indices, excluding
    /// `contract`) has rank 2 and carries `points` points.
    ContractionLine { contract: SubsetMask, line: SubsetMask, points: usize },
}

impl WitnessCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            WitnessCertificate::MinorEmbedding { .. } => "MinorEmbedding",
            WitnessCertificate::HyperplanePairCover { .. } => "HyperplanePairCover",
            WitnessCertificate::Partition { .. } => "Partition",
            WitnessCertificate::ContractionLine { .. } => "ContractionLine",
        }
    }
}

/// The on-the-wire shape shared by all certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub sets: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub claims: BTreeMap<String, Value>,
}

impl From<WitnessCertificate> for CertificateJson {
    fn from(c: WitnessCertificate) -> Self {
        let kind = c.kind().to_string();
        let mut sets = BTreeMap::new();
        let mut claims = BTreeMap::new();
        match c {
            WitnessCertificate::MinorEmbedding { contract, delete, image, target } => {
                sets.insert("contract".into(), contract.to_vec());
                sets.insert("delete".into(), delete.to_vec());
                sets.insert("image".into(), image);
                claims.insert("target_size".into(), json!(target.ground_size()));
                claims.insert("target_ranks".into(), json!(target.table()));
            }
            WitnessCertificate::HyperplanePairCover { first, second }
            | WitnessCertificate::Partition { first, second } => {
                sets.insert("first".into(), first.to_vec());
                sets.insert("second".into(), second.to_vec());
            }
            WitnessCertificate::ContractionLine { contract, line, points } => {
                sets.insert("contract".into(), contract.to_vec());
                sets.insert("line".into(), line.to_vec());
                claims.insert("points".into(), json!(points));
            }
        }
        CertificateJson { kind, sets, claims }
    }
}

impl TryFrom<CertificateJson> for WitnessCertificate {
    type Error = MatroidError;

    fn try_from(mut j: CertificateJson) -> Result<Self, MatroidError> {
        let bad = |msg: String| MatroidError::MalformedCertificate(msg);
        let mut take = |name: &str| -> Result<Vec<usize>, MatroidError> {
            j.sets.remove(name).ok_or_else(|| bad(format!("missing set `{name}`")))
        };
        let mask = |v: Vec<usize>| -> Result<SubsetMask, MatroidError> {
            if let Some(&i) = v.iter().find(|&&i| i >= crate::mask::MAX_GROUND_SIZE) {
                return Err(bad(format!("index {i} out of range")));
            }
            Ok(v.into_iter().collect())
        };
        let claim_usize = |claims: &BTreeMap<String, Value>, name: &str| -> Result<usize, MatroidError> {
            claims
                .get(name)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .ok_or_else(|| bad(format!("missing numeric claim `{name}`")))
        };
        Ok(match j.kind.as_str() {
            "MinorEmbedding" => {
                let contract = mask(take("contract")?)?;
                let delete = mask(take("delete")?)?;
                let image = take("image")?;
                let size = claim_usize(&j.claims, "target_size")?;
                let ranks: Vec<u8> = j
                    .claims
                    .get("target_ranks")
                    .and_then(|v| serde_json::from_value(v.clone()).ok())
                    .ok_or_else(|| bad("missing claim `target_ranks`".into()))?;
                let target = ExplicitMatroid::from_table(size, ranks).map_err(|e| bad(e.to_string()))?;
                WitnessCertificate::MinorEmbedding { contract, delete, image, target }
            }
            "HyperplanePairCover" => WitnessCertificate::HyperplanePairCover {
                first: mask(take("first")?)?,
                second: mask(take("second")?)?,
            },
            "Partition" => WitnessCertificate::Partition {
                first: mask(take("first")?)?,
                second: mask(take("second")?)?,
            },
            "ContractionLine" => WitnessCertificate::ContractionLine {
                contract: mask(take("contract")?)?,
                line: mask(take("line")?)?,
                points: claim_usize(&j.claims, "points")?,
            },
            other => return Err(bad(format!("unknown certificate type `{other}`"))),
        })
    }
}

/// Replays a certificate against `m`.
///
/// Returns `Ok(false)` when the claim does not hold and
/// [`MatroidError::MalformedCertificate`] when it does not refer to `m` at all.
pub fn verify_certificate<M: Matroid + ?Sized>(cert: &WitnessCertificate, m: &M) -> Result<bool, MatroidError> {
    let in_range = |s: &SubsetMask| {
        check_subset(m, s).map_err(|e| MatroidError::MalformedCertificate(e.to_string()))
    };
    let r = m.full_rank();
    let ground = m.ground_set();
    match cert {
        WitnessCertificate::Partition { first, second } => {
            in_range(first)?;
            in_range(second)?;
            Ok(first.is_disjoint(second)
                && first.union(second) == ground
                && m.rank(first) < r
                && m.rank(second) < r)
        }
        WitnessCertificate::HyperplanePairCover { first, second } => {
            in_range(first)?;
            in_range(second)?;
            let hyperplane = |h: &SubsetMask| r >= 1 && m.rank(h) == r - 1 && is_flat(m, h);
            Ok(hyperplane(first) && hyperplane(second) && first.union(second) == ground)
        }
        WitnessCertificate::ContractionLine { contract, line, points } => {
            in_range(contract)?;
            in_range(line)?;
            if !contract.is_disjoint(line) || !is_independent(m, contract) {
                return Ok(false);
            }
            let rc = m.rank(contract);
            let spanned = line.union(contract);
            if m.rank(&spanned) != rc + 2 || m.closure(&spanned) != spanned {
                return Ok(false);
            }
            let view = MinorView::new(m, contract.clone(), SubsetMask::new())?;
            let count = PointIndex::within(&view, &view.from_base(line)).count();
            Ok(count == *points)
        }
        WitnessCertificate::MinorEmbedding { contract, delete, image, target } => {
            in_range(contract)?;
            in_range(delete)?;
            if let Some(&i) = image.iter().find(|&&i| i >= m.ground_size()) {
                return Err(MatroidError::MalformedCertificate(format!("image element {i} out of range")));
            }
            if image.len() != target.ground_size() {
                return Err(MatroidError::MalformedCertificate(format!(
                    "image has {} elements, target has {}",
                    image.len(),
                    target.ground_size()
                )));
            }
            let image_set: SubsetMask = image.iter().copied().collect();
            let rest = ground.difference(contract).difference(delete);
            if !contract.is_disjoint(delete) || image_set.len() != image.len() || image_set != rest {
                return Ok(false);
            }
            let rc = m.rank(contract);
            for bits in 0u32..(1 << image.len()) {
                let mapped: SubsetMask = (0..image.len())
                    .filter(|i| bits & (1 << i) != 0)
                    .map(|i| image[i])
                    .collect();
                if m.rank(&mapped.union(contract)) - rc != target.rank_bits(bits) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
