//! Transport-independent request handling.
//!
//! The HTTP router and the CLI's embedded mode both call into [`Api`] and
//! render its replies with [`to_json`], so a given state produces the same
//! bytes over either path.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use chrono::{DateTime, Utc};
use fable_core::assessment::{
    consensus, explain, score_assessment, validate_assessment, Answer, Assessment, CompletenessWarning, Consensus,
    ConsensusAnswer, ExplainSource, Explanation, ScoreVector,
};
use fable_core::ids::{AssessorId, ClaimId};
use fable_core::num::{exact_string, parse_decimal, to_f64};
use fable_core::questionnaire::{canonical_fable, DimensionId, Questionnaire};
use fable_core::store::{
    AssessmentRecord, Claim, ClaimStatus, Event, EventRecord, ImportFormat, ImportReport, MaterializedState, Note,
    StatusChange, Store, StoreError,
};
use fable_core::triage::{rank_queue, what_if, Candidate, PriorityProfile, QueueEntry, RankingMode, ScoreOverride};
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ErrorCode};

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 500;
pub const DEFAULT_PROFILE: &str = "default";

/// Renders a response body. Every JSON reply, HTTP or CLI, goes through here.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("response types serialize");
    out.push('\n');
    out
}

/// A successful reply: HTTP status plus body.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply<T> {
    pub status: u16,
    pub body: T,
}

impl<T> Reply<T> {
    fn ok(body: T) -> Self {
        Reply { status: 200, body }
    }

    fn created(body: T) -> Self {
        Reply { status: 201, body }
    }
}

pub type ApiResult<T> = Result<Reply<T>, ApiError>;

/// Who is calling. `assessor` is set when the caller authenticated with a
/// token bound to an assessor id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Caller {
    pub assessor: Option<AssessorId>,
}

/// Static bearer-token table. Empty means authentication is off.
#[derive(Debug, Clone, Default)]
pub struct Auth {
    tokens: HashMap<String, AssessorId>,
}

impl Auth {
    pub fn new(tokens: impl IntoIterator<Item = (String, AssessorId)>) -> Self {
        Auth {
            tokens: tokens.into_iter().collect(),
        }
    }

    pub fn is_enabled(&self) -> bool {
        !self.tokens.is_empty()
    }

    /// Resolves an `Authorization` header value.
    pub fn authenticate(&self, header: Option<&str>) -> Result<Caller, ApiError> {
        if !self.is_enabled() {
            return Ok(Caller::default());
        }
        let token = header
            .and_then(|h| h.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or_else(|| ApiError::new(ErrorCode::Unauthorized, "missing bearer token"))?;
        self.tokens
            .get(token)
            .map(|assessor| Caller {
                assessor: Some(assessor.clone()),
            })
            .ok_or_else(|| ApiError::new(ErrorCode::Unauthorized, "unknown bearer token"))
    }
}

// ---- request bodies ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewClaim {
    #[serde(default)]
    pub claim_id: Option<String>,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub source_url: Option<String>,
    #[serde(default)]
    pub platform: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatusRequest {
    pub status: ClaimStatus,
}

/// Assessment exchange document. `claim_id` may be omitted (the path names
/// the claim); `assessor_id` may be omitted when the token identifies the
/// assessor; `created_at` defaults to the time of recording.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentRequest {
    #[serde(default)]
    pub claim_id: Option<ClaimId>,
    #[serde(default)]
    pub assessor_id: Option<AssessorId>,
    pub questionnaire_version: u32,
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
    pub answers: Vec<Answer>,
    #[serde(default)]
    pub idempotency_key: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoteRequest {
    #[serde(default)]
    pub author_id: Option<AssessorId>,
    #[serde(default)]
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClaimQuery {
    pub status: Option<String>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
    pub page: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreBy {
    #[default]
    Consensus,
    Assessor,
}

impl ScoreBy {
    pub fn parse(token: &str) -> Result<Self, ApiError> {
        match token {
            "consensus" => Ok(ScoreBy::Consensus),
            "assessor" => Ok(ScoreBy::Assessor),
            other => Err(ApiError::invalid(format!("by must be \"consensus\" or \"assessor\", not {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideRequest {
    pub claim_id: ClaimId,
    pub dimension: DimensionId,
    pub score: serde_json::Number,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    #[serde(default = "default_profile_name")]
    pub profile: String,
    #[serde(rename = "override")]
    pub change: OverrideRequest,
}

fn default_profile_name() -> String {
    DEFAULT_PROFILE.to_string()
}

// ---- response bodies ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimList {
    pub claims: Vec<Claim>,
    pub total: usize,
    pub limit: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReceipt {
    pub assessment: AssessmentRecord,
    pub warnings: Vec<CompletenessWarning>,
}

/// `GET .../score?by=consensus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusScore {
    pub claim_id: ClaimId,
    pub by: ScoreBy,
    pub questionnaire_version: u32,
    pub assessment_count: usize,
    pub profile: String,
    pub score_vector: ScoreVector,
    pub coverage: BTreeMap<DimensionId, f64>,
    pub disagreement: f64,
    pub disagreement_exact: String,
    pub provisional: BTreeMap<DimensionId, bool>,
    pub consensus: Vec<ConsensusAnswer>,
    pub explanation: Explanation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessorScore {
    pub assessor_id: AssessorId,
    pub created_at: DateTime<Utc>,
    pub score_vector: ScoreVector,
    pub provisional: BTreeMap<DimensionId, bool>,
    pub warnings: Vec<CompletenessWarning>,
    pub explanation: Explanation,
}

/// `GET .../score?by=assessor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessorScores {
    pub claim_id: ClaimId,
    pub by: ScoreBy,
    pub questionnaire_version: u32,
    pub profile: String,
    pub assessors: Vec<AssessorScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScoreReport {
    Consensus(Box<ConsensusScore>),
    Assessor(AssessorScores),
}

/// A queue entry plus the claim context a reviewer needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueItem {
    #[serde(flatten)]
    pub entry: QueueEntry,
    pub text: String,
    pub status: ClaimStatus,
    pub disagreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueResponse {
    pub profile: String,
    pub mode: RankingMode,
    pub hypothetical: bool,
    pub entries: Vec<QueueItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileList {
    pub profiles: Vec<PriorityProfile>,
}

/// Shared service state: one writer behind a mutex, and a published
/// read-only view that readers clone without touching the writer.
pub struct Api {
    store: Mutex<Store>,
    view: RwLock<Arc<MaterializedState>>,
    auth: Auth,
}

impl Api {
    /// Wraps `store`, registering `questionnaire` (or the built-in one when
    /// nothing is registered yet) as needed.
    pub fn new(mut store: Store, auth: Auth, questionnaire: Option<Questionnaire>) -> Result<Self, BootstrapError> {
        ensure_questionnaire(&mut store, questionnaire)?;
        let view = RwLock::new(store.state());
        Ok(Api {
            store: Mutex::new(store),
            view,
            auth,
        })
    }

    pub fn auth(&self) -> &Auth {
        &self.auth
    }

    /// Consistent snapshot for one request.
    pub fn view(&self) -> Arc<MaterializedState> {
        Arc::clone(&self.view.read().expect("view lock"))
    }

    /// Number of records in the event log.
    pub fn log_len(&self) -> usize {
        self.writer().records().len()
    }

    fn writer(&self) -> MutexGuard<'_, Store> {
        self.store.lock().expect("store lock")
    }

    fn append(&self, event: Event) -> Result<EventRecord, ApiError> {
        let mut store = self.writer();
        let record = store.append(event)?;
        *self.view.write().expect("view lock") = store.state();
        Ok(record)
    }

    fn now(&self) -> DateTime<Utc> {
        self.writer().now()
    }

    fn active_questionnaire(state: &MaterializedState) -> Result<&Questionnaire, ApiError> {
        state
            .active_questionnaire()
            .ok_or_else(|| ApiError::new(ErrorCode::StorageError, "no questionnaire registered"))
    }

    fn profile(state: &MaterializedState, name: &str) -> Result<PriorityProfile, ApiError> {
        match state.profiles.get(name) {
            Some(p) => Ok(p.clone()),
            None if name == DEFAULT_PROFILE => Ok(PriorityProfile::default_profile()),
            None => Err(ApiError::new(ErrorCode::ProfileNotFound, format!("unknown profile {name:?}"))),
        }
    }

    // ---- claims ----

    pub fn create_claim(&self, _caller: &Caller, req: NewClaim) -> ApiResult<Claim> {
        if req.text.trim().is_empty() {
            return Err(ApiError::new(ErrorCode::ValidationFailed, "empty claim text"));
        }
        let claim_id = match req.claim_id {
            Some(id) if id.trim().is_empty() => {
                return Err(ApiError::new(ErrorCode::ValidationFailed, "claim_id must not be empty"))
            }
            Some(id) => ClaimId::new(id.trim()),
            None => ClaimId::new(uuid::Uuid::new_v4().to_string()),
        };
        let claim = Claim {
            claim_id,
            text: req.text,
            source_url: req.source_url.filter(|s| !s.trim().is_empty()),
            platform: req.platform.filter(|s| !s.trim().is_empty()),
            created_at: self.now(),
            status: ClaimStatus::Open,
        };
        self.append(Event::ClaimAdded(claim.clone()))?;
        Ok(Reply::created(claim))
    }

    pub fn list_claims(&self, query: &ClaimQuery) -> ApiResult<ClaimList> {
        let status = query
            .status
            .as_deref()
            .map(|s| ClaimStatus::parse(s).ok_or_else(|| ApiError::invalid(format!("unknown status {s:?}"))))
            .transpose()?;
        let limit = match query.limit {
            Some(0) => return Err(ApiError::invalid("limit must be positive")),
            Some(l) => l.min(MAX_LIMIT),
            None => DEFAULT_LIMIT,
        };
        let offset = match (query.offset, query.page) {
            (Some(_), Some(_)) => return Err(ApiError::invalid("use either offset or page, not both")),
            (_, Some(0)) => return Err(ApiError::invalid("page numbers start at 1")),
            (_, Some(page)) => (page - 1) * limit,
            (offset, None) => offset.unwrap_or(0),
        };
        let state = self.view();
        let matching: Vec<&Claim> = state
            .claims_in_order()
            .into_iter()
            .filter(|c| status.is_none_or(|s| c.status == s))
            .collect();
        Ok(Reply::ok(ClaimList {
            total: matching.len(),
            claims: matching.into_iter().skip(offset).take(limit).cloned().collect(),
            limit,
            offset,
        }))
    }

    pub fn get_claim(&self, id: &ClaimId) -> ApiResult<Claim> {
        Ok(Reply::ok(self.view().claim(id)?.clone()))
    }

    pub fn change_status(&self, _caller: &Caller, id: &ClaimId, req: StatusRequest) -> ApiResult<Claim> {
        self.append(Event::StatusChanged(StatusChange {
            claim_id: id.clone(),
            status: req.status,
        }))?;
        self.get_claim(id)
    }

    // ---- assessments and scores ----

    pub fn record_assessment(&self, caller: &Caller, id: &ClaimId, req: AssessmentRequest) -> ApiResult<AssessmentReceipt> {
        let state = self.view();
        state.claim(id)?;
        if let Some(body_claim) = &req.claim_id {
            if body_claim != id {
                return Err(ApiError::invalid(format!("body claim_id {body_claim} does not match path {id}")));
            }
        }
        let assessor_id = match (&caller.assessor, req.assessor_id) {
            (Some(bound), Some(given)) if *bound != given => {
                return Err(ApiError::new(
                    ErrorCode::Forbidden,
                    format!("token is bound to assessor {bound}, not {given}"),
                ))
            }
            (Some(bound), _) => bound.clone(),
            (None, Some(given)) if !given.as_str().trim().is_empty() => given,
            (None, _) => return Err(ApiError::new(ErrorCode::ValidationFailed, "assessor_id is required")),
        };
        let q = Self::active_questionnaire(&state)?;
        if req.questionnaire_version != q.version() {
            return Err(ApiError::new(
                ErrorCode::VersionMismatch,
                format!(
                    "assessment uses questionnaire version {}, active version is {}",
                    req.questionnaire_version,
                    q.version()
                ),
            ));
        }

        if let Some(key) = &req.idempotency_key {
            if let Some(prev) = state.by_idempotency_key(key) {
                let p = &prev.assessment;
                if p.claim_id == *id
                    && p.assessor_id == assessor_id
                    && p.questionnaire_version == req.questionnaire_version
                    && p.answers == req.answers
                {
                    let warnings = validate_assessment(q, p)?;
                    return Ok(Reply::ok(AssessmentReceipt {
                        assessment: prev.clone(),
                        warnings,
                    }));
                }
                return Err(ApiError::new(
                    ErrorCode::IdempotencyConflict,
                    format!("idempotency key {key:?} was used for a different assessment"),
                ));
            }
        }

        let assessment = Assessment {
            claim_id: id.clone(),
            assessor_id,
            questionnaire_version: req.questionnaire_version,
            created_at: req.created_at.unwrap_or_else(|| self.now()),
            answers: req.answers,
        };
        let warnings = validate_assessment(q, &assessment)?;
        let record = AssessmentRecord {
            assessment,
            idempotency_key: req.idempotency_key,
        };
        self.append(Event::AssessmentRecorded(record.clone()))?;
        Ok(Reply::created(AssessmentReceipt {
            assessment: record,
            warnings,
        }))
    }

    pub fn score(&self, id: &ClaimId, by: ScoreBy, profile: Option<&str>) -> ApiResult<ScoreReport> {
        let state = self.view();
        state.claim(id)?;
        let q = Self::active_questionnaire(&state)?;
        let profile = Self::profile(&state, profile.unwrap_or(DEFAULT_PROFILE))?;
        let current: Vec<Assessment> = state
            .current_assessments(id, q.version())
            .into_iter()
            .map(|r| r.assessment.clone())
            .collect();
        let report = match by {
            ScoreBy::Consensus => {
                let c = consensus_or_empty(q, &current)?;
                let explanation = explain(q, &c.scores, ExplainSource::Consensus(&c.answers))?;
                ScoreReport::Consensus(Box::new(ConsensusScore {
                    claim_id: id.clone(),
                    by,
                    questionnaire_version: q.version(),
                    assessment_count: current.len(),
                    profile: profile.name().to_string(),
                    coverage: c.scores.iter().map(|s| (s.dimension, to_f64(&s.coverage))).collect(),
                    disagreement: to_f64(&c.disagreement),
                    disagreement_exact: exact_string(&c.disagreement),
                    provisional: provisional_flags(&profile, &c.scores),
                    score_vector: c.scores,
                    consensus: c.answers,
                    explanation,
                }))
            }
            ScoreBy::Assessor => ScoreReport::Assessor(AssessorScores {
                claim_id: id.clone(),
                by,
                questionnaire_version: q.version(),
                profile: profile.name().to_string(),
                assessors: current
                    .iter()
                    .map(|a| {
                        let v = score_assessment(q, a)?;
                        Ok(AssessorScore {
                            assessor_id: a.assessor_id.clone(),
                            created_at: a.created_at,
                            provisional: provisional_flags(&profile, &v),
                            warnings: validate_assessment(q, a)?,
                            explanation: explain(q, &v, ExplainSource::Assessment(a))?,
                            score_vector: v,
                        })
                    })
                    .collect::<Result<_, ApiError>>()?,
            }),
        };
        Ok(Reply::ok(report))
    }

    // ---- queue ----

    fn queue_inputs(state: &MaterializedState) -> Result<(Vec<Candidate>, HashMap<ClaimId, Consensus>), ApiError> {
        let q = Self::active_questionnaire(state)?;
        let mut candidates = Vec::new();
        let mut consensus_by_claim = HashMap::new();
        for claim in state.claims_in_order() {
            if claim.status == ClaimStatus::Dismissed {
                continue;
            }
            let current: Vec<Assessment> = state
                .current_assessments(&claim.claim_id, q.version())
                .into_iter()
                .map(|r| r.assessment.clone())
                .collect();
            let c = consensus_or_empty(q, &current)?;
            candidates.push(Candidate {
                claim_id: claim.claim_id.clone(),
                created_at: claim.created_at,
                scores: c.scores.clone(),
            });
            consensus_by_claim.insert(claim.claim_id.clone(), c);
        }
        Ok((candidates, consensus_by_claim))
    }

    fn queue_response(
        state: &MaterializedState,
        profile: &PriorityProfile,
        entries: Vec<QueueEntry>,
        consensus_by_claim: &HashMap<ClaimId, Consensus>,
        hypothetical: bool,
    ) -> QueueResponse {
        QueueResponse {
            profile: profile.name().to_string(),
            mode: profile.mode(),
            hypothetical,
            entries: entries
                .into_iter()
                .map(|entry| {
                    let claim = &state.claims[&entry.claim_id];
                    QueueItem {
                        text: claim.text.clone(),
                        status: claim.status,
                        disagreement: consensus_by_claim.get(&entry.claim_id).map_or(0.0, |c| to_f64(&c.disagreement)),
                        entry,
                    }
                })
                .collect(),
        }
    }

    pub fn queue(&self, profile: &str) -> ApiResult<QueueResponse> {
        let state = self.view();
        let profile = Self::profile(&state, profile)?;
        let (candidates, consensus_by_claim) = Self::queue_inputs(&state)?;
        let entries = rank_queue(&profile, &candidates)?;
        Ok(Reply::ok(Self::queue_response(&state, &profile, entries, &consensus_by_claim, false)))
    }

    pub fn what_if(&self, req: WhatIfRequest) -> ApiResult<QueueResponse> {
        let state = self.view();
        let profile = Self::profile(&state, &req.profile)?;
        let score = parse_decimal(&req.change.score.to_string())
            .ok_or_else(|| ApiError::invalid("override score is not a representable number"))?;
        let (candidates, consensus_by_claim) = Self::queue_inputs(&state)?;
        if !candidates.iter().any(|c| c.claim_id == req.change.claim_id) {
            return Err(if state.claims.contains_key(&req.change.claim_id) {
                ApiError::invalid(format!("claim {} is dismissed and not in the queue", req.change.claim_id))
            } else {
                ApiError::new(ErrorCode::ClaimNotFound, format!("unknown claim {}", req.change.claim_id))
            });
        }
        let change = ScoreOverride {
            claim_id: req.change.claim_id,
            dimension: req.change.dimension,
            score,
        };
        let entries = what_if(&profile, &candidates, &change)?;
        Ok(Reply::ok(Self::queue_response(&state, &profile, entries, &consensus_by_claim, true)))
    }

    // ---- profiles, notes, audit, questionnaire ----

    pub fn save_profile(&self, _caller: &Caller, profile: PriorityProfile) -> ApiResult<PriorityProfile> {
        self.append(Event::ProfileSaved(profile.clone()))?;
        Ok(Reply::created(profile))
    }

    /// Saved profiles by name, with the built-in default unless a saved
    /// profile replaces it.
    pub fn list_profiles(&self) -> ApiResult<ProfileList> {
        let state = self.view();
        let mut profiles = state.profiles.clone();
        profiles
            .entry(DEFAULT_PROFILE.to_string())
            .or_insert_with(PriorityProfile::default_profile);
        Ok(Reply::ok(ProfileList {
            profiles: profiles.into_values().collect(),
        }))
    }

    pub fn add_note(&self, caller: &Caller, id: &ClaimId, req: NoteRequest) -> ApiResult<Note> {
        self.view().claim(id)?;
        if req.body.trim().is_empty() {
            return Err(ApiError::new(ErrorCode::ValidationFailed, "note body must not be empty"));
        }
        let author_id = match (&caller.assessor, req.author_id) {
            (Some(bound), Some(given)) if *bound != given => {
                return Err(ApiError::new(
                    ErrorCode::Forbidden,
                    format!("token is bound to {bound}, not {given}"),
                ))
            }
            (Some(bound), _) => bound.clone(),
            (None, Some(given)) if !given.as_str().trim().is_empty() => given,
            (None, _) => return Err(ApiError::new(ErrorCode::ValidationFailed, "author_id is required")),
        };
        let note = Note {
            claim_id: id.clone(),
            author_id,
            body: req.body,
            created_at: self.now(),
        };
        self.append(Event::NoteAdded(note.clone()))?;
        Ok(Reply::created(note))
    }

    pub fn audit(&self, id: &ClaimId) -> ApiResult<Vec<EventRecord>> {
        Ok(Reply::ok(self.writer().export_audit(id)?))
    }

    pub fn questionnaire(&self) -> ApiResult<Questionnaire> {
        let state = self.view();
        Ok(Reply::ok(Self::active_questionnaire(&state)?.clone()))
    }

    /// Batch import for embedded use; one `ClaimAdded` per accepted row.
    pub fn import_claims(&self, source: &[u8]) -> Result<ImportReport, ApiError> {
        let mut store = self.writer();
        let report = store.import_claims(source, ImportFormat::detect(source));
        *self.view.write().expect("view lock") = store.state();
        report.map_err(|e| match e {
            StoreError::UnreadableSource(msg) => ApiError::invalid(format!("source is not readable: {msg}")),
            other => other.into(),
        })
    }
}

fn consensus_or_empty(q: &Questionnaire, current: &[Assessment]) -> Result<Consensus, ApiError> {
    if current.is_empty() {
        Ok(Consensus::empty(q))
    } else {
        Ok(consensus(q, current)?)
    }
}

fn provisional_flags(profile: &PriorityProfile, v: &ScoreVector) -> BTreeMap<DimensionId, bool> {
    v.iter()
        .map(|s| {
            let weighted = profile.weight(s.dimension) > num_rational::Rational64::from_integer(0);
            (s.dimension, weighted && s.coverage < profile.min_coverage())
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum BootstrapError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("configured questionnaire version {configured} differs from registered version {registered} with the same number")]
    ConflictingQuestionnaire { configured: u32, registered: u32 },
    #[error("configured questionnaire version {configured} is older than registered version {registered}")]
    StaleQuestionnaire { configured: u32, registered: u32 },
}

/// Makes sure a questionnaire is registered. With none configured the
/// built-in one is registered into an empty store; a configured document
/// with a newer version is registered on top.
pub fn ensure_questionnaire(store: &mut Store, configured: Option<Questionnaire>) -> Result<(), BootstrapError> {
    let state = store.state();
    let latest = state.active_questionnaire();
    match (latest, configured) {
        (None, configured) => {
            store.append(Event::QuestionnaireRegistered(configured.unwrap_or_else(canonical_fable)))?;
        }
        (Some(_), None) => {}
        (Some(registered), Some(configured)) => {
            use std::cmp::Ordering::*;
            match configured.version().cmp(&registered.version()) {
                Greater => {
                    store.append(Event::QuestionnaireRegistered(configured))?;
                }
                Equal if configured == *registered => {}
                Equal => {
                    return Err(BootstrapError::ConflictingQuestionnaire {
                        configured: configured.version(),
                        registered: registered.version(),
                    })
                }
                Less => {
                    return Err(BootstrapError::StaleQuestionnaire {
                        configured: configured.version(),
                        registered: registered.version(),
                    })
                }
            }
        }
    }
    Ok(())
}
