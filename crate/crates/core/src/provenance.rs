//! Construction provenance carried by every artifact.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Where an artifact came from: the builder that produced it, its parameters
/// and the provenance of its inputs.
///
/// `config_hash` is a SHA-256 over the builder name, the parameters and the
/// input hashes, so two artifacts built the same way carry the same hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub builder: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<Provenance>,
    #[serde(default)]
    pub config_hash: String,
}

impl Provenance {
    pub fn new(builder: impl Into<String>, params: Value, inputs: Vec<Provenance>) -> Self {
        let builder = builder.into();
        let config_hash = digest(&builder, &params, &inputs);
        Provenance {
            builder,
            params,
            inputs,
            config_hash,
        }
    }

    /// Provenance for artifacts ingested without any construction record.
    pub fn external() -> Self {
        Provenance::new("external", Value::Null, Vec::new())
    }
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance::external()
    }
}

fn digest(builder: &str, params: &Value, inputs: &[Provenance]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(builder.as_bytes());
    hasher.update([0u8]);
    // serde_json maps are ordered, so this encoding is canonical.
    hasher.update(params.to_string().as_bytes());
    for input in inputs {
        hasher.update([0u8]);
        hasher.update(input.config_hash.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Hex SHA-256 of raw bytes (used to fingerprint ingested files).
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
