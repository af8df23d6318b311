//! Assessments and per-dimension scoring.
//!
//! A dimension's score is the share of *answered* questions that were
//! answered Yes. Unknown answers are left out of the ratio and show up as
//! reduced coverage instead, so a score built on little information is
//! visibly provisional rather than silently low.

mod consensus;
mod explain;

use std::collections::{HashMap, HashSet};

use chrono::{DateTime, Utc};
use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ids::{AssessorId, ClaimId};
use crate::num::{exact_string, parse_exact, to_f64};
use crate::questionnaire::{DimensionId, Questionnaire};

pub use consensus::{consensus, Consensus, ConsensusAnswer, ConsensusValue, VoteTally};
pub use explain::{explain, ContestedQuestion, DimensionExplanation, ExplainSource, Explanation, TriggeringQuestion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerValue {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub question_id: String,
    pub value: AnswerValue,
}

impl Answer {
    pub fn new(question_id: impl Into<String>, value: AnswerValue) -> Self {
        Answer {
            question_id: question_id.into(),
            value,
        }
    }
}

/// One assessor's answers for one claim, bound to a questionnaire version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assessment {
    pub claim_id: ClaimId,
    pub assessor_id: AssessorId,
    pub questionnaire_version: u32,
    pub created_at: DateTime<Utc>,
    pub answers: Vec<Answer>,
}

impl Assessment {
    /// Checks the assessment against `q`: matching version, known question
    /// ids, at most one answer per question.
    pub fn check(&self, q: &Questionnaire) -> Result<(), AssessmentError> {
        if self.questionnaire_version != q.version() {
            return Err(AssessmentError::VersionMismatch {
                expected: q.version(),
                found: self.questionnaire_version,
            });
        }
        let mut seen = HashSet::new();
        for answer in &self.answers {
            if q.question(&answer.question_id).is_none() {
                return Err(AssessmentError::UnknownQuestion(answer.question_id.clone()));
            }
            if !seen.insert(answer.question_id.as_str()) {
                return Err(AssessmentError::DuplicateAnswer(answer.question_id.clone()));
            }
        }
        Ok(())
    }

    pub fn value_of(&self, question_id: &str) -> AnswerValue {
        self.answers
            .iter()
            .find(|a| a.question_id == question_id)
            .map_or(AnswerValue::Unknown, |a| a.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssessmentError {
    #[error("questionnaire version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("unknown question id {0:?}")]
    UnknownQuestion(String),
    #[error("question {0:?} answered more than once")]
    DuplicateAnswer(String),
    #[error("no assessments to combine")]
    NoAssessments,
    #[error("assessments refer to different claims ({0} and {1})")]
    MixedClaims(ClaimId, ClaimId),
    #[error("assessments use different questionnaire versions ({0} and {1})")]
    MixedVersions(u32, u32),
    #[error("score vector does not match the answers it is said to come from ({0})")]
    ExplanationMismatch(DimensionId),
}

/// Score of one dimension. `score` is `None` (undefined) when no question
/// of the dimension has been answered Yes or No.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionScore {
    pub dimension: DimensionId,
    pub yes_count: u32,
    pub answered_count: u32,
    pub total_count: u32,
    pub score: Option<Rational64>,
    pub coverage: Rational64,
}

impl DimensionScore {
    pub fn from_counts(dimension: DimensionId, yes_count: u32, answered_count: u32, total_count: u32) -> Self {
        assert!(yes_count <= answered_count && answered_count <= total_count && total_count >= 1);
        DimensionScore {
            dimension,
            yes_count,
            answered_count,
            total_count,
            score: (answered_count > 0).then(|| Rational64::new(yes_count.into(), answered_count.into())),
            coverage: Rational64::new(answered_count.into(), total_count.into()),
        }
    }

    /// Same counts, with the score replaced by a hypothetical value.
    pub fn with_score(&self, score: Rational64) -> Self {
        DimensionScore {
            score: Some(score),
            ..self.clone()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DimensionScoreRepr {
    dimension: DimensionId,
    yes_count: u32,
    answered_count: u32,
    total_count: u32,
    score: Option<f64>,
    score_exact: Option<String>,
    coverage: f64,
    coverage_exact: String,
}

impl Serialize for DimensionScore {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DimensionScoreRepr {
            dimension: self.dimension,
            yes_count: self.yes_count,
            answered_count: self.answered_count,
            total_count: self.total_count,
            score: self.score.as_ref().map(to_f64),
            score_exact: self.score.as_ref().map(exact_string),
            coverage: to_f64(&self.coverage),
            coverage_exact: exact_string(&self.coverage),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DimensionScore {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = DimensionScoreRepr::deserialize(deserializer)?;
        let exact = |s: &str| parse_exact(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")));
        let score = r.score_exact.as_deref().map(exact).transpose()?;
        let coverage = exact(&r.coverage_exact)?;
        if r.yes_count > r.answered_count || r.answered_count > r.total_count || r.total_count == 0 {
            return Err(D::Error::custom("inconsistent dimension counts"));
        }
        Ok(DimensionScore {
            dimension: r.dimension,
            yes_count: r.yes_count,
            answered_count: r.answered_count,
            total_count: r.total_count,
            score,
            coverage,
        })
    }
}

/// One [`DimensionScore`] per dimension, in F, A, B, L, E order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreVector {
    scores: [DimensionScore; 5],
}

impl ScoreVector {
    pub fn new(scores: [DimensionScore; 5]) -> Self {
        for (d, s) in DimensionId::ALL.iter().zip(&scores) {
            assert_eq!(*d, s.dimension, "score vector entries must follow dimension order");
        }
        ScoreVector { scores }
    }

    /// Vector for a claim nobody has answered yet: every score undefined.
    pub fn unanswered(q: &Questionnaire) -> Self {
        ScoreVector::new(DimensionId::ALL.map(|d| DimensionScore::from_counts(d, 0, 0, q.count_for(d) as u32)))
    }

    pub fn get(&self, dimension: DimensionId) -> &DimensionScore {
        &self.scores[dimension.index()]
    }

    pub fn score(&self, dimension: DimensionId) -> Option<Rational64> {
        self.get(dimension).score
    }

    pub fn iter(&self) -> impl Iterator<Item = &DimensionScore> {
        self.scores.iter()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.scores.iter().all(|s| s.score.is_some())
    }

    pub fn with_override(&self, dimension: DimensionId, score: Rational64) -> Self {
        let mut next = self.clone();
        next.scores[dimension.index()] = self.get(dimension).with_score(score);
        next
    }
}

impl Serialize for ScoreVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.scores.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScoreVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let scores = Vec::<DimensionScore>::deserialize(deserializer)?;
        let scores: [DimensionScore; 5] = scores
            .try_into()
            .map_err(|_| serde::de::Error::custom("score vector needs exactly five entries"))?;
        if DimensionId::ALL.iter().zip(&scores).any(|(d, s)| *d != s.dimension) {
            return Err(serde::de::Error::custom("score vector entries out of dimension order"));
        }
        Ok(ScoreVector { scores })
    }
}

/// Tallies per-question outcomes into a score vector. `outcome` yields
/// `Some(true)` for Yes, `Some(false)` for No, `None` for anything that is
/// not a usable answer.
pub(crate) fn tally(q: &Questionnaire, outcome: impl Fn(&str) -> Option<bool>) -> ScoreVector {
    let mut counts = [(0u32, 0u32, 0u32); 5];
    for question in q.questions() {
        let c = &mut counts[question.dimension.index()];
        c.2 += 1;
        match outcome(&question.id) {
            Some(true) => {
                c.0 += 1;
                c.1 += 1;
            }
            Some(false) => c.1 += 1,
            None => {}
        }
    }
    ScoreVector::new(DimensionId::ALL.map(|d| {
        let (yes, answered, total) = counts[d.index()];
        DimensionScore::from_counts(d, yes, answered, total)
    }))
}

/// Scores one assessment. Questions without an answer count as Unknown.
pub fn score_assessment(q: &Questionnaire, a: &Assessment) -> Result<ScoreVector, AssessmentError> {
    a.check(q)?;
    let values: HashMap<&str, AnswerValue> = a.answers.iter().map(|x| (x.question_id.as_str(), x.value)).collect();
    Ok(tally(q, |id| match values.get(id) {
        Some(AnswerValue::Yes) => Some(true),
        Some(AnswerValue::No) => Some(false),
        Some(AnswerValue::Unknown) | None => None,
    }))
}

/// A dimension whose questions are not all answered Yes or No.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessWarning {
    pub dimension: DimensionId,
    pub unanswered: Vec<String>,
}

/// Lists incomplete dimensions. Unknown question ids are an error, gaps are
/// only warnings.
pub fn validate_assessment(q: &Questionnaire, a: &Assessment) -> Result<Vec<CompletenessWarning>, AssessmentError> {
    a.check(q)?;
    Ok(DimensionId::ALL
        .iter()
        .filter_map(|&dimension| {
            let unanswered: Vec<String> = q
                .questions_for(dimension)
                .filter(|question| a.value_of(&question.id) == AnswerValue::Unknown)
                .map(|question| question.id.clone())
                .collect();
            (!unanswered.is_empty()).then_some(CompletenessWarning { dimension, unanswered })
        })
        .collect())
}
