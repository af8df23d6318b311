use std::fmt;

use fable_core::assessment::AssessmentError;
use fable_core::store::StoreError;
use fable_core::triage::TriageError;
use serde::{Deserialize, Serialize};

/// Stable machine-readable error codes. This set is closed; clients may
/// match on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    InvalidRequest,
    ValidationFailed,
    Unauthorized,
    Forbidden,
    NotFound,
    ClaimNotFound,
    ProfileNotFound,
    ClaimExists,
    VersionMismatch,
    InvalidTransition,
    IdempotencyConflict,
    OutOfOrder,
    UnknownQuestion,
    StorageError,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 14] = [
        ErrorCode::InvalidRequest,
        ErrorCode::ValidationFailed,
        ErrorCode::Unauthorized,
        ErrorCode::Forbidden,
        ErrorCode::NotFound,
        ErrorCode::ClaimNotFound,
        ErrorCode::ProfileNotFound,
        ErrorCode::ClaimExists,
        ErrorCode::VersionMismatch,
        ErrorCode::InvalidTransition,
        ErrorCode::IdempotencyConflict,
        ErrorCode::OutOfOrder,
        ErrorCode::UnknownQuestion,
        ErrorCode::StorageError,
    ];

    pub fn status(self) -> u16 {
        use ErrorCode::*;
        match self {
            InvalidRequest | ValidationFailed => 400,
            Unauthorized => 401,
            Forbidden => 403,
            NotFound | ClaimNotFound | ProfileNotFound => 404,
            ClaimExists | VersionMismatch | InvalidTransition | IdempotencyConflict | OutOfOrder => 409,
            UnknownQuestion => 422,
            StorageError => 500,
        }
    }
}

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            status: code.status(),
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::InvalidRequest, message)
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.status, serde_json::to_value(self.code).unwrap_or_default().as_str().unwrap_or(""), self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        use ErrorCode::*;
        match e {
            StoreError::UnknownClaim(id) => ApiError::new(ClaimNotFound, format!("unknown claim {id}")),
            StoreError::DuplicateClaim(id) => ApiError::new(ClaimExists, format!("claim {id} already exists")),
            StoreError::UnknownQuestionnaire(v) => {
                ApiError::new(VersionMismatch, format!("questionnaire version {v} is not registered"))
            }
            StoreError::InvalidTransition { .. } => ApiError::new(InvalidTransition, e.to_string()),
            StoreError::Assessment(a) => a.into(),
            StoreError::OutOfOrderAssessment { .. } => ApiError::new(OutOfOrder, e.to_string()),
            StoreError::DuplicateIdempotencyKey(_) => ApiError::new(IdempotencyConflict, e.to_string()),
            StoreError::InvalidPayload(msg) => ApiError::new(ValidationFailed, msg),
            StoreError::QuestionnaireVersion { .. } => ApiError::new(VersionMismatch, e.to_string()),
            // never echo file-system detail to clients
            StoreError::Io(_)
            | StoreError::Corrupt { .. }
            | StoreError::Sequence { .. }
            | StoreError::SnapshotMismatch { .. }
            | StoreError::Locked
            | StoreError::UnreadableSource(_) => ApiError::new(StorageError, "storage failure"),
        }
    }
}

impl From<AssessmentError> for ApiError {
    fn from(e: AssessmentError) -> Self {
        let code = match e {
            AssessmentError::UnknownQuestion(_) => ErrorCode::UnknownQuestion,
            AssessmentError::VersionMismatch { .. } | AssessmentError::MixedVersions(..) => ErrorCode::VersionMismatch,
            _ => ErrorCode::ValidationFailed,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<TriageError> for ApiError {
    fn from(e: TriageError) -> Self {
        let code = match e {
            TriageError::UnknownClaim(_) => ErrorCode::ClaimNotFound,
            _ => ErrorCode::InvalidRequest,
        };
        ApiError::new(code, e.to_string())
    }
}
