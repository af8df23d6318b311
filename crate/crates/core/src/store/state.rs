use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AssessmentRecord, Claim, ClaimStatus, Event, EventRecord, Note, StoreError};
use crate::ids::{AssessorId, ClaimId};
use crate::questionnaire::Questionnaire;
use crate::triage::PriorityProfile;

/// Everything the event log describes, as of `last_seq`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterializedState {
    pub last_seq: u64,
    pub claims: BTreeMap<ClaimId, Claim>,
    /// In log order.
    pub assessments: Vec<AssessmentRecord>,
    /// In log order.
    pub notes: Vec<Note>,
    pub profiles: BTreeMap<String, PriorityProfile>,
    pub questionnaires: BTreeMap<u32, Questionnaire>,
}

impl MaterializedState {
    /// Checks that `record` may follow the current state, without changing it.
    pub fn check(&self, record: &EventRecord) -> Result<(), StoreError> {
        let expected = self.last_seq + 1;
        if record.seq != expected {
            return Err(StoreError::Sequence {
                expected,
                found: record.seq,
            });
        }
        match &record.event {
            Event::ClaimAdded(claim) => {
                if claim.claim_id.as_str().trim().is_empty() {
                    return Err(StoreError::InvalidPayload("claim_id must not be empty".into()));
                }
                if claim.text.trim().is_empty() {
                    return Err(StoreError::InvalidPayload("empty claim text".into()));
                }
                if claim.status != ClaimStatus::Open {
                    return Err(StoreError::InvalidPayload("new claims start Open".into()));
                }
                if self.claims.contains_key(&claim.claim_id) {
                    return Err(StoreError::DuplicateClaim(claim.claim_id.clone()));
                }
            }
            Event::StatusChanged(change) => {
                let claim = self.claim(&change.claim_id)?;
                if !claim.status.can_move_to(change.status) {
                    return Err(StoreError::InvalidTransition {
                        claim_id: change.claim_id.clone(),
                        from: claim.status,
                        to: change.status,
                    });
                }
            }
            Event::AssessmentRecorded(record) => {
                let a = &record.assessment;
                self.claim(&a.claim_id)?;
                let q = self
                    .questionnaires
                    .get(&a.questionnaire_version)
                    .ok_or(StoreError::UnknownQuestionnaire(a.questionnaire_version))?;
                a.check(q)?;
                if let Some(prev) = self.latest_by(&a.claim_id, &a.assessor_id) {
                    if a.created_at < prev.assessment.created_at {
                        return Err(StoreError::OutOfOrderAssessment {
                            claim_id: a.claim_id.clone(),
                            assessor_id: a.assessor_id.clone(),
                        });
                    }
                }
                if let Some(key) = &record.idempotency_key {
                    if self.by_idempotency_key(key).is_some() {
                        return Err(StoreError::DuplicateIdempotencyKey(key.clone()));
                    }
                }
            }
            Event::NoteAdded(note) => {
                self.claim(&note.claim_id)?;
                if note.body.trim().is_empty() {
                    return Err(StoreError::InvalidPayload("note body must not be empty".into()));
                }
                if note.author_id.as_str().trim().is_empty() {
                    return Err(StoreError::InvalidPayload("note author must not be empty".into()));
                }
            }
            Event::ProfileSaved(_) => {}
            Event::QuestionnaireRegistered(q) => {
                if let Some(&latest) = self.questionnaires.keys().next_back() {
                    if q.version() <= latest {
                        return Err(StoreError::QuestionnaireVersion {
                            latest,
                            new: q.version(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a record that has passed [`check`](Self::check).
    pub(super) fn commit(&mut self, record: &EventRecord) {
        self.last_seq = record.seq;
        match &record.event {
            Event::ClaimAdded(claim) => {
                self.claims.insert(claim.claim_id.clone(), claim.clone());
            }
            Event::StatusChanged(change) => {
                if let Some(claim) = self.claims.get_mut(&change.claim_id) {
                    claim.status = change.status;
                }
            }
            Event::AssessmentRecorded(a) => self.assessments.push(a.clone()),
            Event::NoteAdded(note) => self.notes.push(note.clone()),
            Event::ProfileSaved(profile) => {
                self.profiles.insert(profile.name().to_string(), profile.clone());
            }
            Event::QuestionnaireRegistered(q) => {
                self.questionnaires.insert(q.version(), q.clone());
            }
        }
    }

    /// One step of the fold: check, then commit.
    pub fn apply(&mut self, record: &EventRecord) -> Result<(), StoreError> {
        self.check(record)?;
        self.commit(record);
        Ok(())
    }

    pub fn claim(&self, id: &ClaimId) -> Result<&Claim, StoreError> {
        self.claims.get(id).ok_or_else(|| StoreError::UnknownClaim(id.clone()))
    }

    /// Claims ordered by `created_at`, then `claim_id`.
    pub fn claims_in_order(&self) -> Vec<&Claim> {
        let mut claims: Vec<&Claim> = self.claims.values().collect();
        claims.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.claim_id.cmp(&b.claim_id)));
        claims
    }

    /// The highest registered questionnaire version.
    pub fn active_questionnaire(&self) -> Option<&Questionnaire> {
        self.questionnaires.values().next_back()
    }

    pub fn assessments_for<'a>(&'a self, claim_id: &'a ClaimId) -> impl Iterator<Item = &'a AssessmentRecord> + 'a {
        self.assessments.iter().filter(move |a| &a.assessment.claim_id == claim_id)
    }

    /// Each assessor's most recent assessment of `claim_id` under `version`,
    /// ordered by assessor id.
    pub fn current_assessments<'a>(&'a self, claim_id: &'a ClaimId, version: u32) -> Vec<&'a AssessmentRecord> {
        let mut latest: BTreeMap<&AssessorId, &AssessmentRecord> = BTreeMap::new();
        for a in self.assessments_for(claim_id) {
            if a.assessment.questionnaire_version == version {
                latest.insert(&a.assessment.assessor_id, a);
            }
        }
        latest.into_values().collect()
    }

    fn latest_by<'a>(&'a self, claim_id: &'a ClaimId, assessor: &'a AssessorId) -> Option<&'a AssessmentRecord> {
        self.assessments_for(claim_id)
            .filter(|a| &a.assessment.assessor_id == assessor)
            .last()
    }

    pub fn by_idempotency_key(&self, key: &str) -> Option<&AssessmentRecord> {
        self.assessments
            .iter()
            .find(|a| a.idempotency_key.as_deref() == Some(key))
    }

    pub fn notes_for<'a>(&'a self, claim_id: &'a ClaimId) -> impl Iterator<Item = &'a Note> + 'a {
        self.notes.iter().filter(move |n| &n.claim_id == claim_id)
    }
}

/// Folds `log` into a state. Gaps, duplicates and invalid events are
/// errors; nothing is skipped.
pub fn replay(log: &[EventRecord]) -> Result<MaterializedState, StoreError> {
    let mut state = MaterializedState::default();
    for record in log {
        state.apply(record)?;
    }
    Ok(state)
}
