use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{tally, AnswerValue, Assessment, AssessmentError, ScoreVector};
use crate::num::{exact_string, parse_exact, to_f64};
use crate::questionnaire::Questionnaire;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsensusValue {
    Yes,
    No,
    Unknown,
    /// Yes and No votes tied.
    Unresolved,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteTally {
    pub yes: u32,
    pub no: u32,
    pub unknown: u32,
}

impl VoteTally {
    pub fn record(&mut self, value: AnswerValue) {
        match value {
            AnswerValue::Yes => self.yes += 1,
            AnswerValue::No => self.no += 1,
            AnswerValue::Unknown => self.unknown += 1,
        }
    }

    /// Majority of the non-Unknown votes.
    pub fn outcome(&self) -> ConsensusValue {
        use std::cmp::Ordering::*;
        match self.yes.cmp(&self.no) {
            Greater => ConsensusValue::Yes,
            Less => ConsensusValue::No,
            Equal if self.yes == 0 => ConsensusValue::Unknown,
            Equal => ConsensusValue::Unresolved,
        }
    }

    /// Whether assessors gave at least two distinct non-Unknown answers.
    pub fn is_contested(&self) -> bool {
        self.yes > 0 && self.no > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusAnswer {
    pub question_id: String,
    pub value: ConsensusValue,
    pub votes: VoteTally,
}

/// Per-question majority across assessors of one claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consensus {
    /// One entry per question, in questionnaire order.
    pub answers: Vec<ConsensusAnswer>,
    pub scores: ScoreVector,
    /// Fraction of questions on which assessors disagree.
    pub disagreement: Rational64,
}

impl Consensus {
    /// The consensus of zero assessments: every question Unknown.
    pub fn empty(q: &Questionnaire) -> Self {
        from_tallies(q, vec![VoteTally::default(); q.questions().len()])
    }

    pub fn value_of(&self, question_id: &str) -> Option<ConsensusValue> {
        self.answers.iter().find(|a| a.question_id == question_id).map(|a| a.value)
    }
}

fn from_tallies(q: &Questionnaire, tallies: Vec<VoteTally>) -> Consensus {
    let answers: Vec<ConsensusAnswer> = q
        .questions()
        .iter()
        .zip(tallies)
        .map(|(question, votes)| ConsensusAnswer {
            question_id: question.id.clone(),
            value: votes.outcome(),
            votes,
        })
        .collect();
    let contested = answers.iter().filter(|a| a.votes.is_contested()).count() as i64;
    let scores = scores_from_consensus(q, &answers);
    Consensus {
        disagreement: Rational64::new(contested, answers.len().max(1) as i64),
        answers,
        scores,
    }
}

pub(super) fn scores_from_consensus(q: &Questionnaire, answers: &[ConsensusAnswer]) -> ScoreVector {
    tally(q, |id| {
        answers.iter().find(|a| a.question_id == id).and_then(|a| match a.value {
            ConsensusValue::Yes => Some(true),
            ConsensusValue::No => Some(false),
            ConsensusValue::Unknown | ConsensusValue::Unresolved => None,
        })
    })
}

/// Combines the assessments of one claim by per-question majority. The
/// result does not depend on the order of `assessments`.
pub fn consensus(q: &Questionnaire, assessments: &[Assessment]) -> Result<Consensus, AssessmentError> {
    let first = assessments.first().ok_or(AssessmentError::NoAssessments)?;
    for a in assessments {
        if a.claim_id != first.claim_id {
            return Err(AssessmentError::MixedClaims(first.claim_id.clone(), a.claim_id.clone()));
        }
        if a.questionnaire_version != first.questionnaire_version {
            return Err(AssessmentError::MixedVersions(first.questionnaire_version, a.questionnaire_version));
        }
        a.check(q)?;
    }
    let tallies = q
        .questions()
        .iter()
        .map(|question| {
            let mut votes = VoteTally::default();
            for a in assessments {
                votes.record(a.value_of(&question.id));
            }
            votes
        })
        .collect();
    Ok(from_tallies(q, tallies))
}

#[derive(Serialize, Deserialize)]
struct ConsensusRepr {
    answers: Vec<ConsensusAnswer>,
    scores: ScoreVector,
    disagreement: f64,
    disagreement_exact: String,
}

impl Serialize for Consensus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ConsensusRepr {
            answers: self.answers.clone(),
            scores: self.scores.clone(),
            disagreement: to_f64(&self.disagreement),
            disagreement_exact: exact_string(&self.disagreement),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Consensus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = ConsensusRepr::deserialize(deserializer)?;
        Ok(Consensus {
            answers: r.answers,
            scores: r.scores,
            disagreement: parse_exact(&r.disagreement_exact)
                .ok_or_else(|| serde::de::Error::custom("bad disagreement fraction"))?,
        })
    }
}
