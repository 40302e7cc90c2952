//! HTTP API over a loaded bundle. View bodies are byte-identical to
//! `testscope view --format json`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use thiserror::Error;
use tower_http::services::ServeDir;

use testscope_core::bundle::{LoadedBundle, ViewLookupError};
use testscope_core::views::{to_json, ViewKind};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("cannot bind {addr}: {message}")]
    Bind { addr: String, message: String },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

type Shared = Arc<LoadedBundle>;

const INDEX: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>testscope</title></head>\n<body><h1>testscope</h1><ul>\n<li><a href=\"/api/bundle/meta\">/api/bundle/meta</a></li>\n<li><a href=\"/api/view/system-wide\">/api/view/system-wide</a></li>\n<li>/api/view/unit/{qualifiedName}</li>\n<li>/api/view/testcase/{qualifiedName}</li>\n<li><a href=\"/api/report\">/api/report</a></li>\n</ul></body></html>\n";

/// The API router; viewer assets are served from `assets` when given.
pub fn router(bundle: LoadedBundle, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/bundle/meta", get(meta))
        .route("/api/view/system-wide", get(system_wide))
        .route("/api/view/unit/{qn}", get(unit))
        .route("/api/view/testcase/{qn}", get(test_case))
        .route("/api/report", get(report))
        .with_state(Arc::new(bundle));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX) })),
    }
}

fn json_body(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn problem(status: StatusCode, title: &str, detail: String) -> Response {
    let body = serde_json::json!({
        "type": "about:blank",
        "title": title,
        "status": status.as_u16(),
        "detail": detail,
    });
    (status, [(header::CONTENT_TYPE, "application/problem+json")], body.to_string()).into_response()
}

fn view_response(bundle: &LoadedBundle, kind: ViewKind, focus: Option<&str>) -> Response {
    match bundle.view(kind, focus) {
        Ok(doc) => json_body(to_json(&doc)),
        Err(e @ ViewLookupError::UnknownFocus(_)) => problem(StatusCode::NOT_FOUND, "Unknown focus", e.to_string()),
        Err(e @ ViewLookupError::MissingFocus) => problem(StatusCode::BAD_REQUEST, "Missing focus", e.to_string()),
    }
}

async fn meta(State(b): State<Shared>) -> Response {
    json_body(serde_json::to_string_pretty(&b.meta_json()).expect("meta serializes") + "\n")
}

async fn system_wide(State(b): State<Shared>) -> Response {
    view_response(&b, ViewKind::SystemWide, None)
}

async fn unit(State(b): State<Shared>, Path(qn): Path<String>) -> Response {
    view_response(&b, ViewKind::UnitUnderTest, Some(&qn))
}

async fn test_case(State(b): State<Shared>, Path(qn): Path<String>) -> Response {
    view_response(&b, ViewKind::TestCase, Some(&qn))
}

async fn report(State(b): State<Shared>) -> Response {
    json_body(serde_json::to_string_pretty(&b.bundle.report).expect("report serializes") + "\n")
}

/// Binds and serves until the process is stopped.
pub fn run_blocking(bundle: LoadedBundle, host: &str, port: u16, assets: Option<PathBuf>) -> Result<(), ServeError> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let addr = format!("{host}:{port}");
        let listener = match tokio::net::TcpListener::bind(&addr).await {
            Ok(l) => l,
            Err(e) if e.kind() == std::io::ErrorKind::AddrInUse => return Err(ServeError::PortInUse(port)),
            Err(e) => {
                return Err(ServeError::Bind {
                    addr,
                    message: e.to_string(),
                })
            }
        };
        let local: SocketAddr = listener.local_addr()?;
        eprintln!("serving on http://{local}");
        axum::serve(listener, router(bundle, assets)).await?;
        Ok(())
    })
}
