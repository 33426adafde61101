use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use entangle_core::SceneGraph;
use tokio::sync::broadcast;

use crate::config::ServiceConfig;
use crate::error::ServiceError;
use crate::session::Session;
use crate::wire::{CommandEnvelope, EventEnvelope, Response, SceneState};

pub struct SessionHandle {
    session: Mutex<Session>,
    events: broadcast::Sender<EventEnvelope>,
}

impl SessionHandle {
    fn new(session: Session, buffer: usize) -> Self {
        SessionHandle {
            session: Mutex::new(session),
            events: broadcast::channel(buffer.max(1)).0,
        }
    }

    /// Runs one command. Events are published while the session lock is
    /// held, so subscribers see them in command order.
    pub fn execute(&self, envelope: CommandEnvelope) -> Response {
        let mut session = self.session.lock().expect("session lock");
        let outcome = session.execute(envelope);
        for e in outcome.events {
            let _ = self.events.send(e);
        }
        outcome.response
    }

    /// Snapshot plus a receiver positioned right after it.
    pub fn subscribe(&self) -> (EventEnvelope, broadcast::Receiver<EventEnvelope>) {
        let session = self.session.lock().expect("session lock");
        (session.snapshot(), self.events.subscribe())
    }

    pub fn state(&self) -> (u64, SceneState) {
        let session = self.session.lock().expect("session lock");
        (session.seq(), session.state())
    }
}

pub struct Hub {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<SessionHandle>>>,
    next_id: AtomicU64,
}

impl Hub {
    pub fn new(config: ServiceConfig) -> Self {
        Hub {
            config,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    /// Session ids are consecutive decimal numbers starting at "1".
    pub fn create(&self, seed: Option<u64>, graph: Option<SceneGraph>) -> (String, Arc<SessionHandle>) {
        let session = match graph {
            Some(g) => Session::with_graph(g),
            None => Session::new(seed.unwrap_or(self.config.seed), &self.config.assets),
        };
        let id = self.next_id.fetch_add(1, Ordering::Relaxed).to_string();
        let handle = Arc::new(SessionHandle::new(session, self.config.event_buffer));
        self.sessions
            .lock()
            .expect("session table lock")
            .insert(id.clone(), handle.clone());
        (id, handle)
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionHandle>, ServiceError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::SessionNotFound(id.to_string()))
    }
}
