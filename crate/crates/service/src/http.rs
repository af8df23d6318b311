use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use fable_core::ids::ClaimId;
use fable_core::triage::PriorityProfile;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::api::{to_json, Api, ApiResult, AssessmentRequest, Caller, ClaimQuery, ScoreBy};
use crate::error::{ApiError, ErrorCode};

type Shared = State<Arc<Api>>;
type Params = Query<HashMap<String, String>>;

pub fn router(api: Arc<Api>) -> Router {
    Router::new()
        .route("/api/v1/questionnaire", get(questionnaire))
        .route("/api/v1/claims", post(create_claim).get(list_claims))
        .route("/api/v1/claims/{id}", get(get_claim))
        .route("/api/v1/claims/{id}/status", post(change_status))
        .route("/api/v1/claims/{id}/assessments", post(record_assessment))
        .route("/api/v1/claims/{id}/score", get(score))
        .route("/api/v1/claims/{id}/notes", post(add_note))
        .route("/api/v1/claims/{id}/audit", get(audit))
        .route("/api/v1/queue", get(queue))
        .route("/api/v1/queue/what-if", post(what_if))
        .route("/api/v1/profiles", post(save_profile).get(list_profiles))
        .fallback(not_found)
        .with_state(api)
}

fn json_response(status: u16, body: String) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let mut response = (status, body).into_response();
    response
        .headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    response
}

fn error_response(e: ApiError) -> Response {
    json_response(e.status, to_json(&e))
}

fn respond<T: Serialize>(result: ApiResult<T>) -> Response {
    match result {
        Ok(reply) => json_response(reply.status, to_json(&reply.body)),
        Err(e) => error_response(e),
    }
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid(format!("malformed request body: {e}")))
}

fn caller(api: &Api, headers: &HeaderMap) -> Result<Caller, ApiError> {
    let value = headers.get(header::AUTHORIZATION).and_then(|v| v.to_str().ok());
    api.auth().authenticate(value)
}

fn param_usize(params: &HashMap<String, String>, name: &str) -> Result<Option<usize>, ApiError> {
    params
        .get(name)
        .map(|v| v.parse().map_err(|_| ApiError::invalid(format!("{name} must be a non-negative integer"))))
        .transpose()
}

/// Runs `f` once the caller is authenticated.
fn guarded<T: Serialize>(api: &Api, headers: &HeaderMap, f: impl FnOnce(Caller) -> ApiResult<T>) -> Response {
    match caller(api, headers) {
        Ok(c) => respond(f(c)),
        Err(e) => error_response(e),
    }
}

async fn not_found() -> Response {
    error_response(ApiError::new(ErrorCode::NotFound, "no such endpoint"))
}

async fn questionnaire(State(api): Shared, headers: HeaderMap) -> Response {
    guarded(&api, &headers, |_| api.questionnaire())
}

async fn create_claim(State(api): Shared, headers: HeaderMap, body: Bytes) -> Response {
    guarded(&api, &headers, |c| api.create_claim(&c, parse_body(&body)?))
}

async fn list_claims(State(api): Shared, headers: HeaderMap, Query(params): Params) -> Response {
    guarded(&api, &headers, |_| {
        let query = ClaimQuery {
            status: params.get("status").cloned(),
            limit: param_usize(&params, "limit")?,
            offset: param_usize(&params, "offset")?,
            page: param_usize(&params, "page")?,
        };
        api.list_claims(&query)
    })
}

async fn get_claim(State(api): Shared, headers: HeaderMap, Path(id): Path<String>) -> Response {
    guarded(&api, &headers, |_| api.get_claim(&ClaimId::new(id)))
}

async fn change_status(State(api): Shared, headers: HeaderMap, Path(id): Path<String>, body: Bytes) -> Response {
    guarded(&api, &headers, |c| api.change_status(&c, &ClaimId::new(id), parse_body(&body)?))
}

async fn record_assessment(State(api): Shared, headers: HeaderMap, Path(id): Path<String>, body: Bytes) -> Response {
    guarded(&api, &headers, |c| {
        let mut req: AssessmentRequest = parse_body(&body)?;
        if let Some(key) = headers.get("idempotency-key") {
            let key = key
                .to_str()
                .map_err(|_| ApiError::invalid("Idempotency-Key must be ASCII"))?
                .to_string();
            match &req.idempotency_key {
                Some(k) if *k != key => {
                    return Err(ApiError::invalid("Idempotency-Key header and body idempotency_key differ"))
                }
                _ => req.idempotency_key = Some(key),
            }
        }
        api.record_assessment(&c, &ClaimId::new(id), req)
    })
}

async fn score(State(api): Shared, headers: HeaderMap, Path(id): Path<String>, Query(params): Params) -> Response {
    guarded(&api, &headers, |_| {
        let by = params.get("by").map(|b| ScoreBy::parse(b)).transpose()?.unwrap_or_default();
        api.score(&ClaimId::new(id), by, params.get("profile").map(String::as_str))
    })
}

async fn add_note(State(api): Shared, headers: HeaderMap, Path(id): Path<String>, body: Bytes) -> Response {
    guarded(&api, &headers, |c| api.add_note(&c, &ClaimId::new(id), parse_body(&body)?))
}

async fn audit(State(api): Shared, headers: HeaderMap, Path(id): Path<String>) -> Response {
    guarded(&api, &headers, |_| api.audit(&ClaimId::new(id)))
}

async fn queue(State(api): Shared, headers: HeaderMap, Query(params): Params) -> Response {
    guarded(&api, &headers, |_| {
        api.queue(params.get("profile").map_or(crate::api::DEFAULT_PROFILE, String::as_str))
    })
}

async fn what_if(State(api): Shared, headers: HeaderMap, body: Bytes) -> Response {
    guarded(&api, &headers, |_| api.what_if(parse_body(&body)?))
}

async fn save_profile(State(api): Shared, headers: HeaderMap, body: Bytes) -> Response {
    guarded(&api, &headers, |c| {
        let profile = PriorityProfile::from_json(&body).map_err(|e| ApiError::new(ErrorCode::ValidationFailed, e.to_string()))?;
        api.save_profile(&c, profile)
    })
}

async fn list_profiles(State(api): Shared, headers: HeaderMap) -> Response {
    guarded(&api, &headers, |_| api.list_profiles())
}
