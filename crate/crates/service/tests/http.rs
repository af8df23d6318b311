use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use chrono::{Duration, TimeZone, Utc};
use fable_core::clock::SteppingClock;
use fable_core::store::Store;
use fable_service::api::{Api, Auth};
use fable_service::http::router;
use fable_core::ids::AssessorId;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const QUESTION_IDS: [&str; 18] = [
    "frag-1", "frag-2", "frag-3", "frag-4", "frag-5", "frag-6", "act-1", "act-2", "act-3", "bel-1", "bel-2", "bel-3",
    "los-1", "los-2", "exp-1", "exp-2", "exp-3", "exp-4",
];

fn api_with(auth: Auth) -> Arc<Api> {
    let mut store = Store::in_memory();
    store.set_clock(Arc::new(SteppingClock::new(
        Utc.with_ymd_and_hms(2024, 3, 1, 9, 0, 0).unwrap(),
        Duration::seconds(1),
    )));
    Arc::new(Api::new(store, auth, None).unwrap())
}

fn api() -> Arc<Api> {
    api_with(Auth::default())
}

struct Response {
    status: StatusCode,
    text: String,
}

impl Response {
    fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap()
    }
}

async fn call(api: &Arc<Api>, method: &str, uri: &str, body: Option<Value>, headers: &[(&str, &str)]) -> Response {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let body = body.map_or(Body::empty(), |b| Body::from(b.to_string()));
    let res = router(Arc::clone(api)).oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Response {
        status,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

async fn get(api: &Arc<Api>, uri: &str) -> Response {
    call(api, "GET", uri, None, &[]).await
}

async fn post(api: &Arc<Api>, uri: &str, body: Value) -> Response {
    call(api, "POST", uri, Some(body), &[]).await
}

fn answers(pattern: &[(&str, &str)], default: &str) -> Value {
    QUESTION_IDS
        .iter()
        .map(|id| {
            let value = pattern.iter().find(|(q, _)| q == id).map_or(default, |(_, v)| v);
            json!({"question_id": id, "value": value})
        })
        .collect()
}

fn assessment(assessor: &str, answers: Value) -> Value {
    json!({"assessor_id": assessor, "questionnaire_version": 1, "answers": answers})
}

/// Compares against `tests/golden/<name>.json`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

async fn seed(api: &Arc<Api>) {
    for (id, text) in [("a", "Claim A"), ("b", "Claim B"), ("c", "Claim C")] {
        let r = post(api, "/api/v1/claims", json!({"claim_id": id, "text": text})).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    }
}

#[tokio::test]
async fn claim_lifecycle() {
    let api = api();
    seed(&api).await;
    let dup = post(&api, "/api/v1/claims", json!({"claim_id": "a", "text": "again"})).await;
    assert_eq!(dup.status, StatusCode::CONFLICT);
    assert_eq!(dup.json()["code"], "claim_exists");

    let empty = post(&api, "/api/v1/claims", json!({"text": "  "})).await;
    assert_eq!(empty.status, StatusCode::BAD_REQUEST);

    let list = get(&api, "/api/v1/claims?limit=2&page=2").await.json();
    assert_eq!(list["total"], 3);
    assert_eq!(list["offset"], 2);
    assert_eq!(list["claims"][0]["claim_id"], "c");

    let moved = post(&api, "/api/v1/claims/a/status", json!({"status": "in_progress"})).await;
    assert_eq!(moved.json()["status"], "in_progress");
    let back = post(&api, "/api/v1/claims/a/status", json!({"status": "open"})).await;
    assert_eq!(back.status, StatusCode::CONFLICT);
    assert_eq!(back.json()["code"], "invalid_transition");

    let open = get(&api, "/api/v1/claims?status=open").await.json();
    assert_eq!(open["total"], 2);
    assert_eq!(get(&api, "/api/v1/claims?status=bogus").await.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&api, "/api/v1/claims/zzz").await.json()["code"], "claim_not_found");
    assert_eq!(get(&api, "/api/v1/nothing").await.json()["code"], "not_found");
}

#[tokio::test]
async fn list_limit_is_capped() {
    let api = api();
    seed(&api).await;
    let list = get(&api, "/api/v1/claims?limit=100000").await.json();
    assert_eq!(list["limit"], 500);
    assert_eq!(get(&api, "/api/v1/claims?limit=-1").await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn assessment_validation_codes() {
    let api = api();
    seed(&api).await;
    let mut wrong_version = assessment("ana", answers(&[], "yes"));
    wrong_version["questionnaire_version"] = json!(2);
    let r = post(&api, "/api/v1/claims/a/assessments", wrong_version).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "version_mismatch");

    let unknown = assessment("ana", json!([{"question_id": "nope-1", "value": "yes"}]));
    let r = post(&api, "/api/v1/claims/a/assessments", unknown).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "unknown_question");

    let malformed = call(&api, "POST", "/api/v1/claims/a/assessments", None, &[]).await;
    assert_eq!(malformed.status, StatusCode::BAD_REQUEST);
    assert_eq!(malformed.json()["code"], "invalid_request");

    let partial = assessment("ana", json!([{"question_id": "act-1", "value": "no"}]));
    let r = post(&api, "/api/v1/claims/a/assessments", partial).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["warnings"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn idempotent_retry_replays_without_new_event() {
    let api = api();
    seed(&api).await;
    let body = assessment("ana", answers(&[], "yes"));
    let headers = [("idempotency-key", "k-1"), ("content-type", "application/json")];
    let first = call(&api, "POST", "/api/v1/claims/a/assessments", Some(body.clone()), &headers).await;
    assert_eq!(first.status, StatusCode::CREATED);
    let len = api.log_len();
    let second = call(&api, "POST", "/api/v1/claims/a/assessments", Some(body), &headers).await;
    assert_eq!(second.status, StatusCode::OK);
    assert_eq!(second.json()["assessment"], first.json()["assessment"]);
    assert_eq!(api.log_len(), len);

    let other = assessment("ana", answers(&[], "no"));
    let conflict = call(&api, "POST", "/api/v1/claims/a/assessments", Some(other), &headers).await;
    assert_eq!(conflict.status, StatusCode::CONFLICT);
    assert_eq!(conflict.json()["code"], "idempotency_conflict");
}

#[tokio::test]
async fn bearer_tokens_bind_assessors() {
    let api = api_with(Auth::new([("t-ana".to_string(), AssessorId::new("ana"))]));
    assert_eq!(get(&api, "/api/v1/claims").await.status, StatusCode::UNAUTHORIZED);
    let auth = [("authorization", "Bearer t-ana")];
    let bad = [("authorization", "Bearer wrong")];
    assert_eq!(call(&api, "GET", "/api/v1/claims", None, &bad).await.status, StatusCode::UNAUTHORIZED);
    let r = call(&api, "POST", "/api/v1/claims", Some(json!({"claim_id": "a", "text": "x"})), &auth).await;
    assert_eq!(r.status, StatusCode::CREATED);

    let as_bob = assessment("bob", answers(&[], "yes"));
    let r = call(&api, "POST", "/api/v1/claims/a/assessments", Some(as_bob), &auth).await;
    assert_eq!(r.status, StatusCode::FORBIDDEN);

    let implicit = json!({"questionnaire_version": 1, "answers": answers(&[], "yes")});
    let r = call(&api, "POST", "/api/v1/claims/a/assessments", Some(implicit), &auth).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["assessment"]["assessor_id"], "ana");
}

#[tokio::test]
async fn consensus_score_golden() {
    let api = api();
    seed(&api).await;
    let ana = assessment("ana", answers(&[("frag-1", "yes"), ("act-1", "unknown"), ("bel-2", "no")], "yes"));
    let bob = assessment("bob", answers(&[("frag-1", "no"), ("act-1", "unknown"), ("bel-2", "no")], "yes"));
    post(&api, "/api/v1/claims/a/assessments", ana).await;
    post(&api, "/api/v1/claims/a/assessments", bob).await;

    let before = api.log_len();
    let score = get(&api, "/api/v1/claims/a/score").await;
    assert_eq!(score.status, StatusCode::OK);
    assert_eq!(api.log_len(), before, "reads must not append events");
    let v = score.json();
    assert_eq!(v["disagreement_exact"], "1/18");
    assert_eq!(v["assessment_count"], 2);
    let frag1 = v["consensus"].as_array().unwrap().iter().find(|a| a["question_id"] == "frag-1").unwrap();
    assert_eq!(frag1["value"], "unresolved");
    golden("score_consensus", &score.text);

    let per = get(&api, "/api/v1/claims/a/score?by=assessor").await;
    assert_eq!(per.json()["assessors"].as_array().unwrap().len(), 2);
    golden("score_assessor", &per.text);

    let empty = get(&api, "/api/v1/claims/b/score").await.json();
    assert_eq!(empty["assessment_count"], 0);
    assert!(empty["score_vector"][0]["score"].is_null());
    assert_eq!(get(&api, "/api/v1/claims/a/score?by=x").await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn queue_and_what_if() {
    let api = api();
    seed(&api).await;
    post(&api, "/api/v1/claims/a/assessments", assessment("ana", answers(&[], "yes"))).await;
    post(&api, "/api/v1/claims/b/assessments", assessment("ana", answers(&[], "no"))).await;

    let q = get(&api, "/api/v1/queue").await;
    let v = q.json();
    assert_eq!(v["mode"], "pareto");
    assert_eq!(v["hypothetical"], false);
    let ids: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["claim_id"].as_str().unwrap()).collect();
    // c has no defined scores, so nothing dominates it
    assert_eq!(ids, ["a", "c", "b"]);
    assert_eq!(v["entries"][0]["pareto_frontier"], true);
    assert_eq!(v["entries"][1]["pareto_frontier"], true);
    assert_eq!(v["entries"][1]["provisional"], true);
    assert_eq!(v["entries"][2]["pareto_frontier"], false);
    golden("queue_pareto", &q.text);

    let profile = json!({
        "name": "acting",
        "mode": "weighted",
        "weights": {"fragmentation": 1, "actionability": 4, "believability": 1, "likelihood_of_spread": 1, "exploitativeness": 1},
        "min_coverage": 0.5,
        "tie_break": ["actionability", "fragmentation", "believability", "likelihood_of_spread", "exploitativeness"]
    });
    assert_eq!(post(&api, "/api/v1/profiles", profile).await.status, StatusCode::CREATED);
    let names: Vec<Value> = get(&api, "/api/v1/profiles").await.json()["profiles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].clone())
        .collect();
    assert_eq!(names, [json!("acting"), json!("default")]);

    let weighted = get(&api, "/api/v1/queue?profile=acting").await.json();
    assert_eq!(weighted["entries"][0]["rank"], 1);
    assert_eq!(weighted["entries"][0]["scalar_exact"], "1");
    assert!(weighted["entries"][2].get("rank").is_none());

    let before = api.log_len();
    let w = post(
        &api,
        "/api/v1/queue/what-if",
        json!({"profile": "acting", "override": {"claim_id": "b", "dimension": "actionability", "score": 1}}),
    )
    .await;
    assert_eq!(w.status, StatusCode::OK, "{}", w.text);
    let w = w.json();
    assert_eq!(w["hypothetical"], true);
    assert_eq!(w["entries"][1]["claim_id"], "b");
    assert_eq!(w["entries"][1]["scalar_exact"], "1/2");
    assert_eq!(api.log_len(), before);

    assert_eq!(get(&api, "/api/v1/queue?profile=nope").await.json()["code"], "profile_not_found");
    let bad = post(
        &api,
        "/api/v1/queue/what-if",
        json!({"override": {"claim_id": "b", "dimension": "actionability", "score": 2}}),
    )
    .await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn notes_and_audit() {
    let api = api();
    seed(&api).await;
    let r = post(&api, "/api/v1/claims/a/notes", json!({"author_id": "ana", "body": "checked source"})).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let r = post(&api, "/api/v1/claims/a/notes", json!({"author_id": "ana", "body": ""})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    post(&api, "/api/v1/claims/a/status", json!({"status": "dismissed"})).await;

    let audit = get(&api, "/api/v1/claims/a/audit").await;
    let kinds: Vec<Value> = audit.json().as_array().unwrap().iter().map(|e| e["kind"].clone()).collect();
    assert_eq!(kinds, [json!("ClaimAdded"), json!("NoteAdded"), json!("StatusChanged")]);
    golden("audit", &audit.text);

    let q = get(&api, "/api/v1/queue").await.json();
    assert_eq!(q["entries"].as_array().unwrap().len(), 2, "dismissed claims leave the queue");
}

#[tokio::test]
async fn questionnaire_endpoint_serves_active_version() {
    let api = api();
    let q = get(&api, "/api/v1/questionnaire").await.json();
    assert_eq!(q["version"], 1);
    assert_eq!(q["questions"].as_array().unwrap().len(), 18);
}

#[tokio::test]
async fn store_persists_across_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let config = fable_service::Config {
        data_dir: dir.path().to_path_buf(),
        ..Default::default()
    };
    {
        let api = Arc::new(fable_service::open_api(&config).unwrap());
        seed(&api).await;
        assert!(fable_service::open_api(&config).is_err(), "second writer must be refused");
    }
    let api = Arc::new(fable_service::open_api(&config).unwrap());
    assert_eq!(get(&api, "/api/v1/claims").await.json()["total"], 3);
}
