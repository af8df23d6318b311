use serde::{Deserialize, Serialize};

use super::consensus::scores_from_consensus;
use super::{score_assessment, AnswerValue, Assessment, AssessmentError, ConsensusAnswer, ConsensusValue, DimensionScore, ScoreVector, VoteTally};
use crate::questionnaire::{DimensionId, Questionnaire};

/// What a score vector was computed from.
#[derive(Debug, Clone, Copy)]
pub enum ExplainSource<'a> {
    Assessment(&'a Assessment),
    Consensus(&'a [ConsensusAnswer]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggeringQuestion {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionExplanation {
    #[serde(flatten)]
    pub score: DimensionScore,
    /// Questions answered Yes, in questionnaire order.
    pub triggering: Vec<TriggeringQuestion>,
}

/// A question on which assessors tied; it counts toward no score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContestedQuestion {
    pub id: String,
    pub dimension: DimensionId,
    pub text: String,
    pub votes: VoteTally,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub dimensions: Vec<DimensionExplanation>,
    pub contested: Vec<ContestedQuestion>,
}

/// Explains `scores` in terms of the answers behind it. The vector is
/// recomputed from `source` first; a mismatch is an error rather than an
/// explanation of something else.
pub fn explain(q: &Questionnaire, scores: &ScoreVector, source: ExplainSource<'_>) -> Result<Explanation, AssessmentError> {
    let recomputed = match source {
        ExplainSource::Assessment(a) => score_assessment(q, a)?,
        ExplainSource::Consensus(answers) => scores_from_consensus(q, answers),
    };
    if let Some(bad) = DimensionId::ALL.into_iter().find(|d| recomputed.get(*d) != scores.get(*d)) {
        return Err(AssessmentError::ExplanationMismatch(bad));
    }

    let is_yes = |id: &str| match source {
        ExplainSource::Assessment(a) => a.value_of(id) == AnswerValue::Yes,
        ExplainSource::Consensus(answers) => answers
            .iter()
            .any(|c| c.question_id == id && c.value == ConsensusValue::Yes),
    };

    let dimensions = DimensionId::ALL
        .iter()
        .map(|&d| DimensionExplanation {
            score: scores.get(d).clone(),
            triggering: q
                .questions_for(d)
                .filter(|question| is_yes(&question.id))
                .map(|question| TriggeringQuestion {
                    id: question.id.clone(),
                    text: question.text.clone(),
                })
                .collect(),
        })
        .collect();

    let contested = match source {
        ExplainSource::Assessment(_) => Vec::new(),
        ExplainSource::Consensus(answers) => q
            .questions()
            .iter()
            .filter_map(|question| {
                let c = answers.iter().find(|c| c.question_id == question.id)?;
                (c.value == ConsensusValue::Unresolved).then(|| ContestedQuestion {
                    id: question.id.clone(),
                    dimension: question.dimension,
                    text: question.text.clone(),
                    votes: c.votes,
                })
            })
            .collect(),
    };

    Ok(Explanation { dimensions, contested })
}
