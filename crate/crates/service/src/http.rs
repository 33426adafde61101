//! HTTP transport.
//!
//! - `POST /session` creates a session, optionally from `{seed}` or `{document}`.
//! - `GET /session/{id}/scene` returns the current state.
//! - `POST /session/{id}/command` runs one command envelope.
//! - `GET /session/{id}/events` streams event envelopes as server-sent
//!   events, starting with a `snapshot`.

use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response as HttpResponse};
use axum::routing::{get, post};
use axum::{Json, Router};
use entangle_core::scene;
use futures::stream::{self, Stream, StreamExt};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::broadcast::error::RecvError;

use crate::error::ServiceError;
use crate::hub::Hub;
use crate::wire::{CommandEnvelope, Event, EventEnvelope, Response};

pub fn router(hub: Arc<Hub>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}/scene", get(get_scene))
        .route("/session/{id}/command", post(command))
        .route("/session/{id}/events", get(events))
        .with_state(hub)
}

pub async fn serve(listener: TcpListener, hub: Arc<Hub>) -> std::io::Result<()> {
    axum::serve(listener, router(hub)).await
}

fn error_response(e: ServiceError) -> HttpResponse {
    let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(json!({ "ok": false, "error": e.body() }))).into_response()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    seed: Option<u64>,
    document: Option<Value>,
}

async fn create_session(State(hub): State<Arc<Hub>>, body: Bytes) -> HttpResponse {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        match serde_json::from_slice(&body) {
            Ok(r) => r,
            Err(e) => return error_response(ServiceError::MalformedCommand(e.to_string())),
        }
    };
    let graph = match req.document.map(scene::from_value).transpose() {
        Ok(g) => g.map(|mut g| {
            if let Some(seed) = req.seed {
                g.set_seed(seed);
            }
            g
        }),
        Err(e) => return error_response(e.into()),
    };
    let (id, handle) = hub.create(req.seed, graph);
    let (seq, state) = handle.state();
    (
        StatusCode::CREATED,
        Json(json!({ "ok": true, "session": id, "seq": seq, "validation": state.validation })),
    )
        .into_response()
}

async fn get_scene(State(hub): State<Arc<Hub>>, Path(id): Path<String>) -> HttpResponse {
    match hub.get(&id) {
        Ok(handle) => {
            let (seq, state) = handle.state();
            Json(json!({ "ok": true, "seq": seq, "result": state })).into_response()
        }
        Err(e) => error_response(e),
    }
}

fn command_response(r: Response) -> HttpResponse {
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(r)).into_response()
}

async fn command(State(hub): State<Arc<Hub>>, Path(id): Path<String>, body: Bytes) -> HttpResponse {
    let handle = match hub.get(&id) {
        Ok(h) => h,
        Err(e) => return error_response(e),
    };
    let envelope: CommandEnvelope = match serde_json::from_slice(&body) {
        Ok(env) => env,
        Err(e) => return error_response(ServiceError::MalformedCommand(e.to_string())),
    };
    // enumeration can take a while; keep it off the async workers
    match tokio::task::spawn_blocking(move || handle.execute(envelope)).await {
        Ok(r) => command_response(r),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

fn sse(envelope: &EventEnvelope) -> SseEvent {
    SseEvent::default()
        .event(envelope.event.kind())
        .id(envelope.seq.to_string())
        .data(serde_json::to_string(envelope).expect("events serialize"))
}

/// The event stream of a session, snapshot first.
pub fn event_stream(hub: &Hub, id: &str) -> Result<impl Stream<Item = EventEnvelope>, ServiceError> {
    let (snapshot, rx) = hub.get(id)?.subscribe();
    let last = snapshot.seq;
    let rest = stream::unfold((rx, last), |(mut rx, last)| async move {
        match rx.recv().await {
            Ok(env) => {
                let seq = env.seq;
                Some((env, (rx, seq)))
            }
            Err(RecvError::Lagged(missed)) => {
                let env = EventEnvelope {
                    seq: last + missed,
                    event: Event::Gap { missed },
                };
                Some((env, (rx, last + missed)))
            }
            Err(RecvError::Closed) => None,
        }
    });
    Ok(stream::once(async move { snapshot }).chain(rest))
}

async fn events(State(hub): State<Arc<Hub>>, Path(id): Path<String>) -> HttpResponse {
    match event_stream(&hub, &id) {
        Ok(s) => Sse::new(s.map(|env| Ok::<_, Infallible>(sse(&env))))
            .keep_alive(KeepAlive::default())
            .into_response(),
        Err(e) => error_response(e),
    }
}
