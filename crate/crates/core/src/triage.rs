//! Ordering claims for attention.
//!
//! Two modes exist. `ParetoOnly` never collapses the five dimensions: it
//! flags the claims no other claim dominates and lists them first.
//! `WeightedScalar` computes a normalized weighted mean under an explicit,
//! named profile and ranks by it. The weighted mode is opt-in; the default
//! profile is Pareto.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{DateTime, Utc};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::assessment::ScoreVector;
use crate::ids::ClaimId;
use crate::num::{big_exact_string, big_to_f64, parse_big_exact, parse_decimal, to_big, to_f64};
use crate::questionnaire::DimensionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankingMode {
    WeightedScalar,
    ParetoOnly,
}

impl RankingMode {
    pub fn token(self) -> &'static str {
        match self {
            RankingMode::WeightedScalar => "weighted",
            RankingMode::ParetoOnly => "pareto",
        }
    }
}

impl Serialize for RankingMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for RankingMode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match String::deserialize(deserializer)?.as_str() {
            "weighted" => Ok(RankingMode::WeightedScalar),
            "pareto" => Ok(RankingMode::ParetoOnly),
            other => Err(serde::de::Error::custom(format!(
                "unknown mode {other:?} (expected \"weighted\" or \"pareto\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriageError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile {0:?} does not use weighted ranking")]
    NotWeighted(String),
    #[error("unknown claim {0}")]
    UnknownClaim(ClaimId),
    #[error("claim {0} listed more than once")]
    DuplicateClaim(ClaimId),
    #[error("hypothetical score must lie in [0, 1]")]
    ScoreOutOfRange,
}

/// An organization's named choice of dimension weights, ranking mode,
/// coverage threshold and tie-break order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityProfile {
    name: String,
    weights: [Rational64; 5],
    mode: RankingMode,
    min_coverage: Rational64,
    tie_break: [DimensionId; 5],
}

impl PriorityProfile {
    pub fn new(
        name: impl Into<String>,
        weights: [Rational64; 5],
        mode: RankingMode,
        min_coverage: Rational64,
        tie_break: [DimensionId; 5],
    ) -> Result<Self, TriageError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(TriageError::InvalidProfile("name must not be empty".into()));
        }
        if let Some(d) = DimensionId::ALL.into_iter().find(|d| weights[d.index()] < Rational64::zero()) {
            return Err(TriageError::InvalidProfile(format!("weight for {} is negative", d.token())));
        }
        if weights.iter().all(Zero::is_zero) {
            return Err(TriageError::InvalidProfile("at least one weight must be positive".into()));
        }
        if min_coverage < Rational64::zero() || min_coverage > Rational64::one() {
            return Err(TriageError::InvalidProfile("min_coverage must lie in [0, 1]".into()));
        }
        if tie_break.iter().collect::<HashSet<_>>().len() != 5 {
            return Err(TriageError::InvalidProfile(
                "tie_break must list each of the five dimensions exactly once".into(),
            ));
        }
        Ok(PriorityProfile {
            name,
            weights,
            mode,
            min_coverage,
            tie_break,
        })
    }

    /// The built-in profile: Pareto ranking, equal weights, coverage 1/2,
    /// tie-break in display order.
    pub fn default_profile() -> Self {
        PriorityProfile::new(
            "default",
            [Rational64::one(); 5],
            RankingMode::ParetoOnly,
            Rational64::new(1, 2),
            DimensionId::ALL,
        )
        .expect("default profile is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> RankingMode {
        self.mode
    }

    pub fn weight(&self, dimension: DimensionId) -> Rational64 {
        self.weights[dimension.index()]
    }

    pub fn min_coverage(&self) -> Rational64 {
        self.min_coverage
    }

    pub fn tie_break(&self) -> &[DimensionId; 5] {
        &self.tie_break
    }

    /// Same profile with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: Rational64) -> Result<Self, TriageError> {
        PriorityProfile::new(
            self.name.clone(),
            self.weights.map(|w| w * factor),
            self.mode,
            self.min_coverage,
            self.tie_break,
        )
    }

    pub fn with_mode(&self, mode: RankingMode) -> Self {
        PriorityProfile { mode, ..self.clone() }
    }

    /// Whether any positively weighted dimension falls below the coverage
    /// threshold.
    pub fn is_provisional(&self, v: &ScoreVector) -> bool {
        DimensionId::ALL
            .into_iter()
            .any(|d| self.weight(d) > Rational64::zero() && v.get(d).coverage < self.min_coverage)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, TriageError> {
        serde_json::from_slice(bytes).map_err(|e| TriageError::InvalidProfile(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    name: String,
    mode: RankingMode,
    weights: BTreeMap<DimensionId, serde_json::Number>,
    min_coverage: serde_json::Number,
    tie_break: Vec<DimensionId>,
}

fn number_of(value: &Rational64) -> serde_json::Number {
    if *value.denom() == 1 {
        serde_json::Number::from(*value.numer())
    } else {
        serde_json::Number::from_f64(to_f64(value)).expect("finite rational")
    }
}

impl Serialize for PriorityProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ProfileDoc {
            name: self.name.clone(),
            mode: self.mode,
            weights: DimensionId::ALL.iter().map(|d| (*d, number_of(&self.weight(*d)))).collect(),
            min_coverage: number_of(&self.min_coverage),
            tie_break: self.tie_break.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PriorityProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = ProfileDoc::deserialize(deserializer)?;
        let decimal = |n: &serde_json::Number| {
            parse_decimal(&n.to_string()).ok_or_else(|| D::Error::custom(format!("number {n} is not representable")))
        };
        let mut weights = [Rational64::zero(); 5];
        for d in DimensionId::ALL {
            let w = doc
                .weights
                .get(&d)
                .ok_or_else(|| D::Error::custom(format!("weights must cover all five dimensions; {} is missing", d.token())))?;
            weights[d.index()] = decimal(w)?;
        }
        let tie_break: [DimensionId; 5] = doc
            .tie_break
            .try_into()
            .map_err(|_| D::Error::custom("tie_break must list each of the five dimensions exactly once"))?;
        PriorityProfile::new(doc.name, weights, doc.mode, decimal(&doc.min_coverage)?, tie_break)
            .map_err(D::Error::custom)
    }
}

/// Normalized weighted mean of the defined, positively weighted dimension
/// scores. `None` when every positively weighted dimension is undefined.
pub fn weighted_score(p: &PriorityProfile, v: &ScoreVector) -> Result<Option<BigRational>, TriageError> {
    if p.mode != RankingMode::WeightedScalar {
        return Err(TriageError::NotWeighted(p.name.clone()));
    }
    Ok(weighted_mean(p, v))
}

fn weighted_mean(p: &PriorityProfile, v: &ScoreVector) -> Option<BigRational> {
    let mut numerator = BigRational::zero();
    let mut denominator = BigRational::zero();
    for d in DimensionId::ALL {
        let w = p.weight(d);
        if w.is_zero() {
            continue;
        }
        if let Some(s) = v.score(d) {
            let w = to_big(&w);
            numerator += &w * to_big(&s);
            denominator += w;
        }
    }
    (!denominator.is_zero()).then(|| numerator / denominator)
}

/// True iff both vectors are fully defined, `a` is at least `b` on every
/// dimension and strictly greater on one.
pub fn dominates(a: &ScoreVector, b: &ScoreVector) -> bool {
    let mut strictly = false;
    for d in DimensionId::ALL {
        match (a.score(d), b.score(d)) {
            (Some(x), Some(y)) if x < y => return false,
            (Some(x), Some(y)) => strictly |= x > y,
            _ => return false,
        }
    }
    strictly
}

/// Indices of the vectors no other vector dominates.
pub fn pareto_frontier(entries: &[ScoreVector]) -> BTreeSet<usize> {
    (0..entries.len())
        .filter(|&i| !entries.iter().any(|other| dominates(other, &entries[i])))
        .collect()
}

/// A claim as seen by the ranking: identity, age and current scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub claim_id: ClaimId,
    pub created_at: DateTime<Utc>,
    pub scores: ScoreVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueEntry {
    pub claim_id: ClaimId,
    pub created_at: DateTime<Utc>,
    pub score_vector: ScoreVector,
    /// Present only in weighted mode, and only when some weighted dimension is defined.
    pub scalar: Option<BigRational>,
    pub pareto_frontier: bool,
    /// 1-based; assigned exactly when `scalar` is present.
    pub rank: Option<u32>,
    pub provisional: bool,
}

#[derive(Serialize, Deserialize)]
struct QueueEntryRepr {
    claim_id: ClaimId,
    created_at: DateTime<Utc>,
    score_vector: ScoreVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar_exact: Option<String>,
    pareto_frontier: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rank: Option<u32>,
    provisional: bool,
}

impl Serialize for QueueEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QueueEntryRepr {
            claim_id: self.claim_id.clone(),
            created_at: self.created_at,
            score_vector: self.score_vector.clone(),
            scalar: self.scalar.as_ref().map(big_to_f64),
            scalar_exact: self.scalar.as_ref().map(big_exact_string),
            pareto_frontier: self.pareto_frontier,
            rank: self.rank,
            provisional: self.provisional,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QueueEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = QueueEntryRepr::deserialize(deserializer)?;
        let scalar = r
            .scalar_exact
            .as_deref()
            .map(|s| parse_big_exact(s).ok_or_else(|| serde::de::Error::custom("bad scalar")))
            .transpose()?;
        Ok(QueueEntry {
            claim_id: r.claim_id,
            created_at: r.created_at,
            score_vector: r.score_vector,
            scalar,
            pareto_frontier: r.pareto_frontier,
            rank: r.rank,
            provisional: r.provisional,
        })
    }
}

/// Descending on `Option`, with undefined values last.
fn desc<T: Ord>(a: &Option<T>, b: &Option<T>) -> Ordering {
    b.cmp(a)
}

/// The queue comparator. Weighted mode: scalar descending. Pareto mode:
/// frontier entries first. Then, in both modes, the tie-break dimensions
/// descending in profile order, `created_at` ascending, `claim_id` ascending.
pub fn compare_entries(p: &PriorityProfile, a: &QueueEntry, b: &QueueEntry) -> Ordering {
    let primary = match p.mode {
        RankingMode::WeightedScalar => desc(&a.scalar, &b.scalar),
        RankingMode::ParetoOnly => b.pareto_frontier.cmp(&a.pareto_frontier),
    };
    primary
        .then_with(|| {
            p.tie_break
                .iter()
                .map(|&d| desc(&a.score_vector.score(d), &b.score_vector.score(d)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| a.created_at.cmp(&b.created_at))
        .then_with(|| a.claim_id.cmp(&b.claim_id))
}

/// Builds the ordered queue for `claims` under `p`.
pub fn rank_queue(p: &PriorityProfile, claims: &[Candidate]) -> Result<Vec<QueueEntry>, TriageError> {
    let mut seen = HashSet::new();
    if let Some(dup) = claims.iter().find(|c| !seen.insert(&c.claim_id)) {
        return Err(TriageError::DuplicateClaim(dup.claim_id.clone()));
    }
    let vectors: Vec<ScoreVector> = claims.iter().map(|c| c.scores.clone()).collect();
    let frontier = pareto_frontier(&vectors);
    let mut entries: Vec<QueueEntry> = claims
        .iter()
        .enumerate()
        .map(|(i, c)| QueueEntry {
            claim_id: c.claim_id.clone(),
            created_at: c.created_at,
            score_vector: c.scores.clone(),
            scalar: match p.mode {
                RankingMode::WeightedScalar => weighted_mean(p, &c.scores),
                RankingMode::ParetoOnly => None,
            },
            pareto_frontier: frontier.contains(&i),
            rank: None,
            provisional: p.is_provisional(&c.scores),
        })
        .collect();
    entries.sort_by(|a, b| compare_entries(p, a, b));
    let mut next_rank = 1;
    for e in entries.iter_mut().filter(|e| e.scalar.is_some()) {
        e.rank = Some(next_rank);
        next_rank += 1;
    }
    Ok(entries)
}

/// A hypothetical value for one dimension of one claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreOverride {
    pub claim_id: ClaimId,
    pub dimension: DimensionId,
    pub score: Rational64,
}

/// [`rank_queue`] with one dimension score replaced. Nothing is persisted.
pub fn what_if(p: &PriorityProfile, claims: &[Candidate], change: &ScoreOverride) -> Result<Vec<QueueEntry>, TriageError> {
    if change.score < Rational64::zero() || change.score > Rational64::one() {
        return Err(TriageError::ScoreOutOfRange);
    }
    if !claims.iter().any(|c| c.claim_id == change.claim_id) {
        return Err(TriageError::UnknownClaim(change.claim_id.clone()));
    }
    let modified: Vec<Candidate> = claims
        .iter()
        .map(|c| {
            if c.claim_id == change.claim_id {
                Candidate {
                    scores: c.scores.with_override(change.dimension, change.score),
                    ..c.clone()
                }
            } else {
                c.clone()
            }
        })
        .collect();
    rank_queue(p, &modified)
}
