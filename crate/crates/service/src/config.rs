use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;

use entangle_core::scene::AssetMeta;

pub const DEFAULT_ADDR: &str = "127.0.0.1:7878";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    /// Seed for sessions created without a document.
    pub seed: u64,
    /// Catalog copied into every new empty session.
    pub assets: BTreeMap<String, AssetMeta>,
    /// Events a slow subscriber may fall behind before it gets a `gap`.
    pub event_buffer: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            addr: DEFAULT_ADDR.parse().expect("valid default address"),
            seed: 0,
            assets: BTreeMap::new(),
            event_buffer: 1024,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read asset catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("asset catalog {path} is not a name -> asset map: {source}")]
    Parse { path: String, source: serde_json::Error },
}

/// Reads a JSON object mapping asset names to metadata.
pub fn load_asset_catalog(path: &Path) -> Result<BTreeMap<String, AssetMeta>, CatalogError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CatalogError::Io {
        path: shown.clone(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| CatalogError::Parse { path: shown, source })
}
