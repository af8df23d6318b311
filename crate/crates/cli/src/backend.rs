//! Where commands are executed: against the local store (embedded) or a
//! running server. Both return the API's JSON body as text.

use std::collections::HashSet;
use std::path::Path;
use std::time::Duration;

use fable_core::ids::ClaimId;
use fable_core::store::{parse_claim_batch, Claim, ImportFormat, ImportReport, RowError, Store};
use fable_core::triage::PriorityProfile;
use fable_service::api::{
    ApiResult, AssessmentRequest, Auth, Caller, ClaimQuery, NewClaim, NoteRequest, ScoreBy, StatusRequest,
    WhatIfRequest,
};
use fable_service::{to_json, Api, ApiError, ErrorCode};
use serde::Serialize;

use crate::CliError;

pub enum Backend {
    Embedded(Box<Api>),
    Remote(Remote),
}

pub struct Remote {
    base: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

fn body<T: Serialize>(result: ApiResult<T>) -> Result<String, CliError> {
    result.map(|reply| to_json(&reply.body)).map_err(CliError::Api)
}

fn query_string(pairs: &[(&str, Option<String>)]) -> String {
    let parts: Vec<String> = pairs
        .iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k}={}", encode(v))))
        .collect();
    if parts.is_empty() {
        String::new()
    } else {
        format!("?{}", parts.join("&"))
    }
}

fn encode(s: &str) -> String {
    s.bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => (b as char).to_string(),
            _ => format!("%{b:02X}"),
        })
        .collect()
}

impl Backend {
    /// Opens the data directory, holding its writer lock until dropped.
    pub fn embedded(data_dir: &Path) -> Result<Backend, CliError> {
        std::fs::create_dir_all(data_dir)
            .map_err(|e| CliError::Io(format!("cannot create data directory {}: {e}", data_dir.display())))?;
        let store = Store::open(data_dir).map_err(|e| match e {
            fable_core::store::StoreError::Locked => CliError::Io(format!(
                "data directory {} is in use by another fable process",
                data_dir.display()
            )),
            other => CliError::Io(format!("cannot open store in {}: {other}", data_dir.display())),
        })?;
        let api = Api::new(store, Auth::default(), None).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Backend::Embedded(Box::new(api)))
    }

    pub fn remote(server: &str, token: Option<String>) -> Result<Backend, CliError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| CliError::Io(format!("cannot build HTTP client: {e}")))?;
        Ok(Backend::Remote(Remote {
            base: server.trim_end_matches('/').to_string(),
            token,
            client,
        }))
    }

    pub fn create_claim(&self, req: NewClaim) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.create_claim(&Caller::default(), req)),
            Backend::Remote(r) => r.send("POST", "/api/v1/claims", Some(&req), &[]),
        }
    }

    pub fn list_claims(&self, query: ClaimQuery) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.list_claims(&query)),
            Backend::Remote(r) => {
                let q = query_string(&[
                    ("status", query.status),
                    ("limit", query.limit.map(|v| v.to_string())),
                    ("offset", query.offset.map(|v| v.to_string())),
                    ("page", query.page.map(|v| v.to_string())),
                ]);
                r.get(&format!("/api/v1/claims{q}"))
            }
        }
    }

    pub fn change_status(&self, id: &ClaimId, req: StatusRequest) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.change_status(&Caller::default(), id, req)),
            Backend::Remote(r) => r.send("POST", &format!("/api/v1/claims/{}/status", encode(id.as_str())), Some(&req), &[]),
        }
    }

    pub fn record_assessment(&self, id: &ClaimId, req: AssessmentRequest) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.record_assessment(&Caller::default(), id, req)),
            Backend::Remote(r) => r.send(
                "POST",
                &format!("/api/v1/claims/{}/assessments", encode(id.as_str())),
                Some(&req),
                &[],
            ),
        }
    }

    pub fn score(&self, id: &ClaimId, by: ScoreBy, profile: Option<String>) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.score(id, by, profile.as_deref())),
            Backend::Remote(r) => {
                let by = match by {
                    ScoreBy::Consensus => "consensus",
                    ScoreBy::Assessor => "assessor",
                };
                let q = query_string(&[("by", Some(by.to_string())), ("profile", profile)]);
                r.get(&format!("/api/v1/claims/{}/score{q}", encode(id.as_str())))
            }
        }
    }

    pub fn queue(&self, profile: &str) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.queue(profile)),
            Backend::Remote(r) => r.get(&format!("/api/v1/queue{}", query_string(&[("profile", Some(profile.to_string()))]))),
        }
    }

    pub fn what_if(&self, req: WhatIfRequest) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.what_if(req)),
            Backend::Remote(r) => r.send("POST", "/api/v1/queue/what-if", Some(&req), &[]),
        }
    }

    pub fn save_profile(&self, profile: PriorityProfile) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.save_profile(&Caller::default(), profile)),
            Backend::Remote(r) => r.send("POST", "/api/v1/profiles", Some(&profile), &[]),
        }
    }

    pub fn list_profiles(&self) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.list_profiles()),
            Backend::Remote(r) => r.get("/api/v1/profiles"),
        }
    }

    pub fn add_note(&self, id: &ClaimId, req: NoteRequest) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.add_note(&Caller::default(), id, req)),
            Backend::Remote(r) => r.send("POST", &format!("/api/v1/claims/{}/notes", encode(id.as_str())), Some(&req), &[]),
        }
    }

    pub fn audit(&self, id: &ClaimId) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.audit(id)),
            Backend::Remote(r) => r.get(&format!("/api/v1/claims/{}/audit", encode(id.as_str()))),
        }
    }

    pub fn questionnaire(&self) -> Result<String, CliError> {
        match self {
            Backend::Embedded(api) => body(api.questionnaire()),
            Backend::Remote(r) => r.get("/api/v1/questionnaire"),
        }
    }

    /// Imports a claim batch. Remotely, rows are sent one by one and the
    /// report is assembled here with the same row reasons.
    pub fn import(&self, source: &[u8]) -> Result<ImportReport, CliError> {
        match self {
            Backend::Embedded(api) => api.import_claims(source).map_err(CliError::Api),
            Backend::Remote(r) => {
                let rows = parse_claim_batch(source, ImportFormat::detect(source))
                    .map_err(|e| CliError::User(format!("source is not readable: {e}")))?;
                let mut report = ImportReport::default();
                let mut seen = HashSet::new();
                for (line, row) in rows {
                    let reject = |reason: String| RowError { line, reason };
                    let row = match row {
                        Ok(row) => row,
                        Err(reason) => {
                            report.errors.push(reject(reason));
                            continue;
                        }
                    };
                    let text = row.text.filter(|t| !t.trim().is_empty());
                    let Some(text) = text else {
                        report.errors.push(reject("empty claim text".into()));
                        continue;
                    };
                    let claim_id = row.claim_id.map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
                    if let Some(id) = &claim_id {
                        if !seen.insert(id.clone()) {
                            report.errors.push(reject(format!("duplicate claim_id {id} in batch")));
                            continue;
                        }
                    }
                    let req = NewClaim {
                        claim_id: claim_id.clone(),
                        text,
                        source_url: row.source_url,
                        platform: row.platform,
                    };
                    match r.send("POST", "/api/v1/claims", Some(&req), &[]) {
                        Ok(text) => report.imported.push(
                            serde_json::from_str::<Claim>(&text)
                                .map_err(|e| CliError::Io(format!("unexpected server response: {e}")))?,
                        ),
                        Err(CliError::Api(e)) if e.code == ErrorCode::ClaimExists => report.errors.push(reject(format!(
                            "claim_id {} already exists",
                            claim_id.unwrap_or_default()
                        ))),
                        Err(CliError::Api(e)) if e.status < 500 => report.errors.push(reject(e.message)),
                        Err(other) => return Err(other),
                    }
                }
                Ok(report)
            }
        }
    }
}

impl Remote {
    fn get(&self, path: &str) -> Result<String, CliError> {
        self.send::<()>("GET", path, None, &[])
    }

    fn send<T: Serialize>(
        &self,
        method: &str,
        path: &str,
        payload: Option<&T>,
        headers: &[(&str, &str)],
    ) -> Result<String, CliError> {
        let url = format!("{}{path}", self.base);
        let mut req = match method {
            "POST" => self.client.post(&url),
            _ => self.client.get(&url),
        };
        if let Some(token) = &self.token {
            req = req.header("authorization", format!("Bearer {token}"));
        }
        for (k, v) in headers {
            req = req.header(*k, *v);
        }
        if let Some(p) = payload {
            let json = serde_json::to_vec(p).map_err(|e| CliError::User(e.to_string()))?;
            req = req.header("content-type", "application/json").body(json);
        }
        let res = req
            .send()
            .map_err(|e| CliError::Io(format!("cannot reach {}: {e}", self.base)))?;
        let status = res.status().as_u16();
        let text = res
            .text()
            .map_err(|e| CliError::Io(format!("cannot read response from {}: {e}", self.base)))?;
        if status >= 400 {
            let err = serde_json::from_str::<ApiError>(&text)
                .unwrap_or_else(|_| ApiError::new(ErrorCode::StorageError, format!("server answered {status}")));
            return Err(CliError::Api(err));
        }
        Ok(text)
    }
}
