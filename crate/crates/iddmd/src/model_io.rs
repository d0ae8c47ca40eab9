//! Versioned model container with content hashing.
//!
//! The model is serialized once to a canonical JSON string; its SHA-256
//! digest is stored next to the raw payload so loads can detect tampering
//! or corruption. Floating-point values survive the round trip bit-exactly
//! (shortest round-trip decimal form).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fit::IdDmdModel;

/// Format tag inside a model file.
pub const MODEL_FORMAT: &str = "iddmd-model";
/// Version written by this crate.
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format: &'a str,
    version: u32,
    sha256: String,
    #[serde(serialize_with = "as_raw")]
    model: &'a str,
}

fn as_raw<S: serde::Serializer>(json: &str, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw: &serde_json::value::RawValue =
        serde_json::from_str(json).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Deserialize)]
struct EnvelopeIn<'a> {
    format: String,
    version: u32,
    sha256: String,
    #[serde(borrow)]
    model: &'a serde_json::value::RawValue,
}

fn digest(payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes the model with format tag, version, and content hash.
pub fn save_model(model: &IdDmdModel, path: &Path) -> Result<()> {
    let payload = serde_json::to_string(model)
        .map_err(|e| Error::Numeric(format!("model serialization failed: {e}")))?;
    let envelope = EnvelopeOut {
        format: MODEL_FORMAT,
        version: MODEL_VERSION,
        sha256: digest(&payload),
        model: &payload,
    };
    let text = serde_json::to_string(&envelope)
        .map_err(|e| Error::Numeric(format!("envelope serialization failed: {e}")))?;
    fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Loads a model, verifying format, version, and content hash.
pub fn load_model(path: &Path) -> Result<IdDmdModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    let envelope: EnvelopeIn<'_> = serde_json::from_str(&text).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        detail: format!("not a model file: {e}"),
    })?;
    if envelope.format != MODEL_FORMAT {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            detail: format!("format tag {:?}, expected {MODEL_FORMAT:?}", envelope.format),
        });
    }
    if envelope.version != MODEL_VERSION {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            detail: format!("unsupported version {}", envelope.version),
        });
    }
    let payload = envelope.model.get();
    if digest(payload) != envelope.sha256 {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            detail: "content hash mismatch (file corrupted or edited)".into(),
        });
    }
    serde_json::from_str(payload).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        detail: format!("model payload: {e}"),
    })
}
