//! Claim triage by misinformation harm.
//!
//! Fact-checkers answer a five-dimension yes/no/unknown questionnaire
//! (Fragmentation, Actionability, Believability, Likelihood of spread,
//! Exploitativeness) for each claim. This crate scores those answers per
//! dimension, combines several assessors into a consensus, orders claims
//! either by Pareto dominance or under an explicit weighting profile, and
//! keeps everything in an append-only event log.

pub mod assessment;
pub mod clock;
pub mod ids;
pub mod num;
pub mod questionnaire;
pub mod store;
pub mod triage;

pub use assessment::{
    consensus, explain, score_assessment, validate_assessment, Answer, AnswerValue, Assessment, AssessmentError,
    Consensus, ConsensusAnswer, ConsensusValue, DimensionScore, ExplainSource, Explanation, ScoreVector,
};
pub use ids::{AssessorId, ClaimId};
pub use questionnaire::{canonical_fable, diff_versions, load_questionnaire, DimensionId, Question, Questionnaire};
pub use triage::{dominates, pareto_frontier, rank_queue, weighted_score, what_if, PriorityProfile, QueueEntry, RankingMode};
