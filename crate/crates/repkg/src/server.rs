//! HTTP and WebSocket transport for the session protocol.
//!
//! * `GET /api/session` upgrades to a WebSocket carrying one envelope per
//!   text frame. Commands without a `session` field go to the session the
//!   connection opened last; sessions die with their connection.
//! * `POST /api/command` takes one envelope and answers with the array of
//!   reply envelopes.
//! * Everything else is served from the UI directory, or a placeholder page.

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::header;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tokio::sync::watch;
use tower_http::services::ServeDir;

use crate::session::{Envelope, Registry};

const PLACEHOLDER: &str = "<!doctype html>\n<html><head><title>repkg</title></head>\
<body><h1>repkg</h1><p>No UI bundle configured. Start the server with <code>--ui-dir</code> \
or talk to <code>/api/session</code> (WebSocket) and <code>/api/command</code> (POST).</p></body></html>\n";

#[derive(Clone)]
struct AppState {
    registry: Arc<Registry>,
    shutdown: watch::Receiver<bool>,
}

pub fn router(registry: Arc<Registry>, ui_dir: Option<PathBuf>, shutdown: watch::Receiver<bool>) -> Router {
    let api = Router::new()
        .route("/api/session", get(ws_upgrade))
        .route("/api/command", post(command))
        .with_state(AppState { registry, shutdown });
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { Html(PLACEHOLDER) }),
    }
}

async fn dispatch(registry: Arc<Registry>, env: Envelope) -> Vec<Envelope> {
    tokio::task::spawn_blocking(move || registry.handle(&env))
        .await
        .unwrap_or_else(|e| vec![Envelope::error(None, "internal", e.to_string())])
}

async fn command(State(state): State<AppState>, body: String) -> Response {
    let replies = match serde_json::from_str::<Envelope>(&body) {
        Ok(env) => dispatch(state.registry, env).await,
        Err(e) => vec![Envelope::error(None, "bad-request", format!("invalid envelope: {e}"))],
    };
    let body = serde_json::to_string(&replies).expect("envelopes always serialize");
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn ws_upgrade(State(state): State<AppState>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| connection(socket, state))
}

async fn connection(mut socket: WebSocket, mut state: AppState) {
    let mut opened: Vec<String> = Vec::new();
    loop {
        let frame = tokio::select! {
            frame = socket.recv() => frame,
            _ = state.shutdown.changed() => break,
        };
        let text = match frame {
            Some(Ok(Message::Text(t))) => t.to_string(),
            Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
            Some(Ok(_)) => continue,
        };
        let replies = match serde_json::from_str::<Envelope>(&text) {
            Ok(mut env) => {
                if env.session.is_none() {
                    env.session = opened.last().cloned();
                }
                dispatch(state.registry.clone(), env).await
            }
            Err(e) => vec![Envelope::error(None, "bad-request", format!("invalid envelope: {e}"))],
        };
        for reply in replies {
            if reply.kind == "state" {
                if let Some(id) = &reply.session {
                    if !opened.contains(id) {
                        opened.push(id.clone());
                    }
                }
            }
            if socket.send(Message::Text(reply.to_json().into())).await.is_err() {
                break;
            }
        }
    }
    for id in opened {
        state.registry.remove(&id);
    }
}

pub async fn bind(host: &str, port: u16) -> std::io::Result<TcpListener> {
    TcpListener::bind((host, port)).await
}

/// Serves until `shutdown` resolves, then closes open WebSockets and drains
/// in-flight requests.
pub async fn serve(
    listener: TcpListener,
    ui_dir: Option<PathBuf>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let (tx, rx) = watch::channel(false);
    let app = router(Arc::new(Registry::new()), ui_dir, rx);
    axum::serve(listener, app.into_make_service_with_connect_info::<SocketAddr>())
        .with_graceful_shutdown(async move {
            shutdown.await;
            let _ = tx.send(true);
        })
        .await
}
