//! Live session service: scene editing, compilation, observation and
//! enumeration over HTTP, with a server-sent event stream per session.

pub mod config;
pub mod error;
pub mod http;
pub mod hub;
pub mod session;
pub mod wire;

pub use config::{load_asset_catalog, ServiceConfig};
pub use error::ServiceError;
pub use http::{router, serve};
pub use hub::{Hub, SessionHandle};
pub use session::Session;
