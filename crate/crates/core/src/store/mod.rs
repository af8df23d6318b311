//! Append-only event store.
//!
//! Every change (a claim, a status move, an assessment, a note, a profile, a
//! questionnaire version) is one [`EventRecord`]. Current state is a left
//! fold of the log, so any past decision can be traced to the events that
//! produced it.

mod import;
mod log;
mod snapshot;
mod state;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::assessment::{Assessment, AssessmentError};
use crate::clock::{Clock, SystemClock};
use crate::ids::{AssessorId, ClaimId};
use crate::questionnaire::Questionnaire;
use crate::triage::PriorityProfile;

pub use self::import::{parse_claim_batch, ClaimRow, ImportFormat, ImportReport, RowError};
pub use self::log::{read_log, FileLog, LogBackend, MemoryLog, LOCK_FILE, LOG_FILE, SNAPSHOT_FILE};
pub use self::snapshot::{restore, snapshot, Snapshot};
pub use self::state::{replay, MaterializedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Open,
    InProgress,
    Published,
    Dismissed,
}

impl ClaimStatus {
    pub fn token(self) -> &'static str {
        match self {
            ClaimStatus::Open => "open",
            ClaimStatus::InProgress => "in_progress",
            ClaimStatus::Published => "published",
            ClaimStatus::Dismissed => "dismissed",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        [ClaimStatus::Open, ClaimStatus::InProgress, ClaimStatus::Published, ClaimStatus::Dismissed]
            .into_iter()
            .find(|s| s.token() == token)
    }

    /// Open -> InProgress -> {Published, Dismissed}, and Open -> Dismissed.
    pub fn can_move_to(self, next: ClaimStatus) -> bool {
        use ClaimStatus::*;
        matches!(
            (self, next),
            (Open, InProgress) | (Open, Dismissed) | (InProgress, Published) | (InProgress, Dismissed)
        )
    }
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub claim_id: ClaimId,
    /// Stored verbatim.
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub platform: Option<String>,
    pub created_at: DateTime<Utc>,
    pub status: ClaimStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub claim_id: ClaimId,
    pub author_id: AssessorId,
    pub body: String,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusChange {
    pub claim_id: ClaimId,
    pub status: ClaimStatus,
}

/// An assessment as recorded, with the client's idempotency key if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentRecord {
    #[serde(flatten)]
    pub assessment: Assessment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotency_key: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    ClaimAdded,
    StatusChanged,
    AssessmentRecorded,
    NoteAdded,
    ProfileSaved,
    QuestionnaireRegistered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    ClaimAdded(Claim),
    StatusChanged(StatusChange),
    AssessmentRecorded(AssessmentRecord),
    NoteAdded(Note),
    ProfileSaved(PriorityProfile),
    QuestionnaireRegistered(Questionnaire),
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::ClaimAdded(_) => EventKind::ClaimAdded,
            Event::StatusChanged(_) => EventKind::StatusChanged,
            Event::AssessmentRecorded(_) => EventKind::AssessmentRecorded,
            Event::NoteAdded(_) => EventKind::NoteAdded,
            Event::ProfileSaved(_) => EventKind::ProfileSaved,
            Event::QuestionnaireRegistered(_) => EventKind::QuestionnaireRegistered,
        }
    }

    /// The claim this event concerns, if any.
    pub fn claim_id(&self) -> Option<&ClaimId> {
        match self {
            Event::ClaimAdded(c) => Some(&c.claim_id),
            Event::StatusChanged(s) => Some(&s.claim_id),
            Event::AssessmentRecorded(a) => Some(&a.assessment.claim_id),
            Event::NoteAdded(n) => Some(&n.claim_id),
            Event::ProfileSaved(_) | Event::QuestionnaireRegistered(_) => None,
        }
    }

    fn payload(&self) -> serde_json::Result<serde_json::Value> {
        match self {
            Event::ClaimAdded(x) => serde_json::to_value(x),
            Event::StatusChanged(x) => serde_json::to_value(x),
            Event::AssessmentRecorded(x) => serde_json::to_value(x),
            Event::NoteAdded(x) => serde_json::to_value(x),
            Event::ProfileSaved(x) => serde_json::to_value(x),
            Event::QuestionnaireRegistered(x) => serde_json::to_value(x),
        }
    }

    fn from_payload(kind: EventKind, payload: serde_json::Value) -> serde_json::Result<Self> {
        Ok(match kind {
            EventKind::ClaimAdded => Event::ClaimAdded(serde_json::from_value(payload)?),
            EventKind::StatusChanged => Event::StatusChanged(serde_json::from_value(payload)?),
            EventKind::AssessmentRecorded => Event::AssessmentRecorded(serde_json::from_value(payload)?),
            EventKind::NoteAdded => Event::NoteAdded(serde_json::from_value(payload)?),
            EventKind::ProfileSaved => Event::ProfileSaved(serde_json::from_value(payload)?),
            EventKind::QuestionnaireRegistered => Event::QuestionnaireRegistered(serde_json::from_value(payload)?),
        })
    }
}

/// One line of the event log: `{seq, kind, recorded_at, payload}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub seq: u64,
    pub recorded_at: DateTime<Utc>,
    pub event: Event,
}

impl EventRecord {
    pub fn kind(&self) -> EventKind {
        self.event.kind()
    }
}

#[derive(Serialize, Deserialize)]
struct EventRecordRepr {
    seq: u64,
    kind: EventKind,
    recorded_at: DateTime<Utc>,
    payload: serde_json::Value,
}

impl Serialize for EventRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EventRecordRepr {
            seq: self.seq,
            kind: self.kind(),
            recorded_at: self.recorded_at,
            payload: self.event.payload().map_err(serde::ser::Error::custom)?,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EventRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = EventRecordRepr::deserialize(deserializer)?;
        let event = Event::from_payload(r.kind, r.payload)
            .map_err(|e| serde::de::Error::custom(format!("invalid {:?} payload: {e}", r.kind)))?;
        Ok(EventRecord {
            seq: r.seq,
            recorded_at: r.recorded_at,
            event,
        })
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown claim {0}")]
    UnknownClaim(ClaimId),
    #[error("claim {0} already exists")]
    DuplicateClaim(ClaimId),
    #[error("questionnaire version {0} is not registered")]
    UnknownQuestionnaire(u32),
    #[error("questionnaire version {new} must be greater than the latest registered version {latest}")]
    QuestionnaireVersion { latest: u32, new: u32 },
    #[error("claim {claim_id} cannot move from {from} to {to}")]
    InvalidTransition {
        claim_id: ClaimId,
        from: ClaimStatus,
        to: ClaimStatus,
    },
    #[error("invalid event payload: {0}")]
    InvalidPayload(String),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error("assessment for claim {claim_id} by {assessor_id} is older than the assessor's previous one")]
    OutOfOrderAssessment { claim_id: ClaimId, assessor_id: AssessorId },
    #[error("idempotency key {0:?} already used")]
    DuplicateIdempotencyKey(String),
    #[error("event sequence broken: expected seq {expected}, found {found}")]
    Sequence { expected: u64, found: u64 },
    #[error("event log corrupt at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("snapshot at seq {snapshot_seq} cannot be followed by an event with seq {tail_start}")]
    SnapshotMismatch { snapshot_seq: u64, tail_start: u64 },
    #[error("data directory is locked by another writer")]
    Locked,
    #[error("source is not readable: {0}")]
    UnreadableSource(String),
    #[error("storage failure: {0}")]
    Io(#[from] std::io::Error),
}

/// The event log plus its materialized state. All writes go through
/// [`Store::append`]; there is no way to edit or remove a record.
pub struct Store {
    backend: Box<dyn LogBackend>,
    records: Vec<EventRecord>,
    state: Arc<MaterializedState>,
    clock: Arc<dyn Clock>,
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store")
            .field("records", &self.records.len())
            .field("last_seq", &self.state.last_seq)
            .finish()
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Store::with_backend(Box::new(MemoryLog::default()), Vec::new(), Arc::new(SystemClock))
            .expect("empty log replays")
    }

    /// Opens (creating if needed) the store in `dir`, taking the writer
    /// lock. Uses `snapshot.json` when present, then replays the rest of
    /// the log.
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        Store::open_with_clock(dir, Arc::new(SystemClock))
    }

    pub fn open_with_clock(dir: &Path, clock: Arc<dyn Clock>) -> Result<Self, StoreError> {
        let (backend, records) = FileLog::open(dir)?;
        let snapshot_path = dir.join(SNAPSHOT_FILE);
        let state = if snapshot_path.exists() {
            let snap = Snapshot::read(&snapshot_path)?;
            let tail: Vec<EventRecord> = records.iter().filter(|r| r.seq > snap.seq).cloned().collect();
            if records.last().map_or(0, |r| r.seq) < snap.seq {
                return Err(StoreError::SnapshotMismatch {
                    snapshot_seq: snap.seq,
                    tail_start: records.last().map_or(0, |r| r.seq) + 1,
                });
            }
            restore(snap, &tail)?
        } else {
            replay(&records)?
        };
        Ok(Store {
            backend: Box::new(backend),
            records,
            state: Arc::new(state),
            clock,
        })
    }

    /// Builds a store over an already-loaded log.
    pub fn with_backend(
        backend: Box<dyn LogBackend>,
        records: Vec<EventRecord>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, StoreError> {
        let state = replay(&records)?;
        Ok(Store {
            backend,
            records,
            state: Arc::new(state),
            clock,
        })
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    /// Point-in-time view of the current state. Later appends do not
    /// affect a view already handed out.
    pub fn state(&self) -> Arc<MaterializedState> {
        Arc::clone(&self.state)
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    /// Validates `event`, writes it durably, then applies it. On any error
    /// the log and state are unchanged.
    pub fn append(&mut self, event: Event) -> Result<EventRecord, StoreError> {
        let record = EventRecord {
            seq: self.state.last_seq + 1,
            recorded_at: self.clock.now(),
            event,
        };
        self.state.check(&record)?;
        self.backend.persist(&record)?;
        Arc::make_mut(&mut self.state).commit(&record);
        self.records.push(record.clone());
        Ok(record)
    }

    /// Every event concerning `claim_id`, in seq order.
    pub fn export_audit(&self, claim_id: &ClaimId) -> Result<Vec<EventRecord>, StoreError> {
        if !self.state.claims.contains_key(claim_id) {
            return Err(StoreError::UnknownClaim(claim_id.clone()));
        }
        Ok(self
            .records
            .iter()
            .filter(|r| r.event.claim_id() == Some(claim_id))
            .cloned()
            .collect())
    }

    /// Re-appends the events of an exported audit trail (new seq numbers).
    pub fn import_audit(&mut self, audit: &[EventRecord]) -> Result<Vec<EventRecord>, StoreError> {
        audit.iter().map(|r| self.append(r.event.clone())).collect()
    }

    /// Writes `snapshot.json` for the current state into `dir`.
    pub fn write_snapshot(&self, dir: &Path) -> Result<Snapshot, StoreError> {
        let snap = snapshot(&self.state);
        snap.write(&dir.join(SNAPSHOT_FILE))?;
        Ok(snap)
    }
}
