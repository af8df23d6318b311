//! HTTP service for claim triage.
//!
//! [`api::Api`] holds the request logic; [`http::router`] maps it onto
//! `/api/v1`. The CLI drives the same `Api` directly in embedded mode.

pub mod api;
pub mod config;
pub mod error;
pub mod http;

use std::sync::Arc;

use fable_core::questionnaire::load_questionnaire;
use fable_core::store::Store;
use tower_http::services::ServeDir;

pub use api::{to_json, Api, Auth, Caller};
pub use config::Config;
pub use error::{ApiError, ErrorCode};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot read questionnaire {path}: {reason}")]
    Questionnaire { path: String, reason: String },
    #[error(transparent)]
    Store(#[from] fable_core::store::StoreError),
    #[error(transparent)]
    Bootstrap(#[from] api::BootstrapError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Opens the store under `config.data_dir` and wraps it in an [`Api`].
pub fn open_api(config: &Config) -> Result<Api, ServeError> {
    std::fs::create_dir_all(&config.data_dir)?;
    let questionnaire = match &config.questionnaire {
        Some(path) => {
            let err = |reason: String| ServeError::Questionnaire {
                path: path.display().to_string(),
                reason,
            };
            let bytes = std::fs::read(path).map_err(|e| err(e.to_string()))?;
            Some(load_questionnaire(&bytes).map_err(|e| err(e.to_string()))?)
        }
        None => None,
    };
    let store = Store::open(&config.data_dir)?;
    Ok(Api::new(store, config.auth(), questionnaire)?)
}

/// The full application: API routes plus the optional static UI.
pub fn app(api: Arc<Api>, config: &Config) -> axum::Router {
    let router = http::router(api);
    match &config.ui_dir {
        Some(dir) => router.nest_service("/ui", ServeDir::new(dir)),
        None => router,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let api = Arc::new(open_api(&config)?);
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen.to_string(),
            source,
        })?;
    eprintln!("fable listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(api, &config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
