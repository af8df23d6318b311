//! `fable`: operator command line and server entry point.
//!
//! Exit codes: 0 success, 1 validation or user error, 2 I/O or server error.

mod backend;
mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fable_core::assessment::{Answer, AnswerValue};
use fable_core::ids::{AssessorId, ClaimId};
use fable_core::questionnaire::{load_questionnaire, DimensionId};
use fable_core::store::ClaimStatus;
use fable_core::triage::PriorityProfile;
use fable_service::api::{AssessmentRequest, ClaimQuery, NewClaim, NoteRequest, OverrideRequest, ScoreBy, StatusRequest, WhatIfRequest};
use fable_service::{to_json, ApiError, Config};
use serde_json::Value;

use backend::Backend;

#[derive(Debug)]
pub enum CliError {
    /// Bad input from the user: exit 1.
    User(String),
    /// I/O, storage or network failure: exit 2.
    Io(String),
    /// An API error; the exit code follows its status.
    Api(ApiError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Io(_) => 2,
            CliError::Api(e) if e.status >= 500 => 2,
            CliError::Api(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "fable", version, about = "Triage claims by misinformation harm")]
struct Cli {
    /// Local data directory for embedded mode [default: fable-data].
    #[arg(long, global = true, env = "FABLE_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Base URL of a running server; switches to remote mode.
    #[arg(long, global = true, env = "FABLE_SERVER")]
    server: Option<String>,
    /// Bearer token for remote mode.
    #[arg(long, global = true, env = "FABLE_TOKEN", hide_env_values = true)]
    token: Option<String>,
    /// Print the API's JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum By {
    Consensus,
    Assessor,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP server.
    Serve {
        /// TOML file with listen, data_dir, questionnaire, ui_dir and tokens.
        #[arg(long, env = "FABLE_CONFIG")]
        config: Option<PathBuf>,
    },
    /// Import a claim batch (JSON lines or CSV with claim_id,text,source_url,platform).
    Import { file: PathBuf },
    /// Add a single claim.
    Add {
        text: String,
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        source_url: Option<String>,
        #[arg(long)]
        platform: Option<String>,
    },
    /// List claims.
    Claims {
        #[arg(long)]
        status: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        offset: Option<usize>,
    },
    /// Record an assessment from a JSON file.
    Assess {
        claim_id: String,
        #[arg(long)]
        answers: PathBuf,
        #[arg(long)]
        assessor: Option<String>,
        #[arg(long)]
        idempotency_key: Option<String>,
    },
    /// Show a claim's scores with the explanation.
    Score {
        claim_id: String,
        #[arg(long, value_enum, default_value = "consensus")]
        by: By,
        #[arg(long)]
        profile: Option<String>,
    },
    /// Show the triage queue.
    Queue {
        #[arg(long, default_value = "default")]
        profile: String,
    },
    /// Show the queue with one dimension score changed. Nothing is saved.
    WhatIf {
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(long)]
        claim: String,
        #[arg(long)]
        dimension: DimensionId,
        #[arg(long)]
        score: serde_json::Number,
    },
    /// Move a claim to another status.
    Status { claim_id: String, status: String },
    /// Attach a note to a claim.
    Note {
        claim_id: String,
        #[arg(long)]
        author: String,
        body: String,
    },
    /// Save or list priority profiles.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Every event concerning a claim, in order.
    Audit { claim_id: String },
    /// Show the active questionnaire.
    Questionnaire,
    /// Check a questionnaire document without loading it into a store.
    ValidateQuestionnaire { file: PathBuf },
}

#[derive(Subcommand)]
enum ProfileAction {
    Save { file: PathBuf },
    List,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(bytes: &[u8], what: &str) -> Result<Value, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::User(format!("{what} is not valid JSON: {e}")))
}

/// Accepts either the assessment exchange document or a plain
/// `{question_id: "yes"|"no"|"unknown"}` map.
fn assessment_request(
    backend: &Backend,
    claim_id: &ClaimId,
    bytes: &[u8],
    assessor: Option<String>,
    key: Option<String>,
) -> Result<AssessmentRequest, CliError> {
    let doc = parse_json(bytes, "answers file")?;
    let mut req = if doc.get("answers").is_some() {
        serde_json::from_value::<AssessmentRequest>(doc).map_err(|e| CliError::User(format!("answers file: {e}")))?
    } else {
        let map: BTreeMap<String, AnswerValue> =
            serde_json::from_value(doc).map_err(|e| CliError::User(format!("answers file: {e}")))?;
        let q: Value = serde_json::from_str(&backend.questionnaire()?).map_err(|e| CliError::Io(e.to_string()))?;
        AssessmentRequest {
            claim_id: Some(claim_id.clone()),
            assessor_id: None,
            questionnaire_version: q["version"].as_u64().unwrap_or(0) as u32,
            created_at: None,
            answers: map.into_iter().map(|(id, v)| Answer::new(id, v)).collect(),
            idempotency_key: None,
        }
    };
    if let Some(a) = assessor {
        if let Some(existing) = &req.assessor_id {
            if existing.as_str() != a {
                return Err(CliError::User(format!("--assessor {a} contradicts assessor_id {existing} in the file")));
            }
        }
        req.assessor_id = Some(AssessorId::new(a));
    }
    if key.is_some() {
        req.idempotency_key = key;
    }
    Ok(req)
}

fn validate_questionnaire(file: &Path, json: bool) -> Result<String, CliError> {
    let bytes = read(file)?;
    match load_questionnaire(&bytes) {
        Ok(q) => {
            let counts: BTreeMap<&str, usize> = DimensionId::ALL.iter().map(|d| (d.token(), q.count_for(*d))).collect();
            if json {
                Ok(to_json(&serde_json::json!({
                    "valid": true,
                    "version": q.version(),
                    "title": q.title(),
                    "question_count": q.questions().len(),
                    "per_dimension": counts,
                })))
            } else {
                let per: Vec<String> = DimensionId::ALL.iter().map(|d| format!("{} {}", d.letter(), q.count_for(*d))).collect();
                Ok(format!(
                    "valid: {} version {} with {} questions ({})\n",
                    if q.title().is_empty() { "questionnaire" } else { q.title() },
                    q.version(),
                    q.questions().len(),
                    per.join(", ")
                ))
            }
        }
        Err(e) => {
            let problems = match &e {
                fable_core::questionnaire::QuestionnaireError::Invalid(vs) => vs.iter().map(|v| v.to_string()).collect(),
                other => vec![other.to_string()],
            };
            if json {
                println!("{}", to_json(&serde_json::json!({"valid": false, "errors": problems})).trim_end());
            }
            Err(CliError::User(format!("invalid questionnaire {}:\n  {}", file.display(), problems.join("\n  "))))
        }
    }
}

fn serve(config: Option<PathBuf>, data_dir_flag: Option<PathBuf>) -> Result<String, CliError> {
    let config = match config {
        Some(path) => Config::load(&path).map_err(|e| CliError::Io(e.to_string()))?,
        None => Config::default(),
    };
    let mut config = config
        .with_env(|k| std::env::var(k).ok())
        .map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(dir) = data_dir_flag {
        config.data_dir = dir;
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    runtime
        .block_on(fable_service::serve(config))
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::new())
}

fn run(cli: Cli) -> Result<String, CliError> {
    let json = cli.json;
    let output = |text: String, render: fn(&Value) -> String| -> Result<String, CliError> {
        if json {
            return Ok(text);
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("unexpected response: {e}")))?;
        Ok(render(&value))
    };

    let backend = match &cli.command {
        Command::Serve { config } => return serve(config.clone(), cli.data_dir.clone()),
        Command::ValidateQuestionnaire { file } => return validate_questionnaire(file, json),
        _ => match &cli.server {
            Some(url) => Backend::remote(url, cli.token.clone())?,
            None => Backend::embedded(cli.data_dir.as_deref().unwrap_or(Path::new("fable-data")))?,
        },
    };

    match cli.command {
        Command::Serve { .. } | Command::ValidateQuestionnaire { .. } => unreachable!("handled above"),
        Command::Import { file } => {
            let report = backend.import(&read(&file)?)?;
            let text = to_json(&report);
            let rendered = output(text, render::import_report)?;
            if report.errors.is_empty() {
                Ok(rendered)
            } else {
                print!("{rendered}");
                let lines: Vec<String> = report.errors.iter().map(|e| format!("line {}: {}", e.line, e.reason)).collect();
                Err(CliError::User(format!("{} rows rejected:\n  {}", lines.len(), lines.join("\n  "))))
            }
        }
        Command::Add {
            text,
            id,
            source_url,
            platform,
        } => output(
            backend.create_claim(NewClaim {
                claim_id: id,
                text,
                source_url,
                platform,
            })?,
            render::claim,
        ),
        Command::Claims { status, limit, offset } => output(
            backend.list_claims(ClaimQuery {
                status,
                limit,
                offset,
                page: None,
            })?,
            render::claim_list,
        ),
        Command::Assess {
            claim_id,
            answers,
            assessor,
            idempotency_key,
        } => {
            let id = ClaimId::new(claim_id);
            let req = assessment_request(&backend, &id, &read(&answers)?, assessor, idempotency_key)?;
            output(backend.record_assessment(&id, req)?, render::assessment)
        }
        Command::Score { claim_id, by, profile } => {
            let by = match by {
                By::Consensus => ScoreBy::Consensus,
                By::Assessor => ScoreBy::Assessor,
            };
            output(backend.score(&ClaimId::new(claim_id), by, profile)?, render::score)
        }
        Command::Queue { profile } => output(backend.queue(&profile)?, render::queue),
        Command::WhatIf {
            profile,
            claim,
            dimension,
            score,
        } => output(
            backend.what_if(WhatIfRequest {
                profile,
                change: OverrideRequest {
                    claim_id: ClaimId::new(claim),
                    dimension,
                    score,
                },
            })?,
            render::queue,
        ),
        Command::Status { claim_id, status } => {
            let status = ClaimStatus::parse(&status).ok_or_else(|| {
                CliError::User(format!("unknown status {status:?} (open, in_progress, published, dismissed)"))
            })?;
            output(backend.change_status(&ClaimId::new(claim_id), StatusRequest { status })?, render::claim)
        }
        Command::Note { claim_id, author, body } => output(
            backend.add_note(
                &ClaimId::new(claim_id),
                NoteRequest {
                    author_id: Some(AssessorId::new(author)),
                    body,
                },
            )?,
            render::note,
        ),
        Command::Profile { action } => match action {
            ProfileAction::Save { file } => {
                let profile = PriorityProfile::from_json(&read(&file)?).map_err(|e| CliError::User(e.to_string()))?;
                output(backend.save_profile(profile)?, render::profile)
            }
            ProfileAction::List => output(backend.list_profiles()?, render::profiles),
        },
        Command::Audit { claim_id } => output(backend.audit(&ClaimId::new(claim_id))?, render::audit),
        Command::Questionnaire => output(backend.questionnaire()?, render::questionnaire),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.exit_code();
            match e {
                CliError::Api(err) => {
                    if json {
                        print!("{}", to_json(&err));
                    }
                    eprintln!("error: {}", err.message);
                }
                CliError::User(msg) | CliError::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}
