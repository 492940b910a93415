//! Content-addressed result cache for coefficient tables.
//!
//! A table is stored under the SHA-256 of its schema tag, spec, and order,
//! so any change to the inputs lands in a fresh file. Entries carry the
//! schema tag inside the envelope as well; an entry written under a
//! different tag is treated as absent and recomputed rather than trusted.
//! Writes go through a temporary file in the same directory followed by a
//! rename, so readers never observe a half-written entry.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use strange_lab::strange::{StrangeSpec, XiTable};

use crate::Failure;

/// Bumped whenever the stored shape or the table semantics change.
const SCHEMA_TAG: &str = "xitable/v1";

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: String,
    table: serde_json::Value,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Cache {
        Cache { dir: dir.to_path_buf() }
    }

    fn key(spec: &StrangeSpec, order: usize) -> Result<String, Failure> {
        let spec_json = serde_json::to_string(spec).map_err(Failure::encode)?;
        let mut hasher = Sha256::new();
        hasher.update(SCHEMA_TAG.as_bytes());
        hasher.update(b"\n");
        hasher.update(spec_json.as_bytes());
        hasher.update(b"\n");
        hasher.update(order.to_string().as_bytes());
        Ok(format!("{:x}", hasher.finalize()))
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Returns the cached table for the spec and order, or None when the
    /// entry is missing, malformed, or written under another schema tag.
    /// A well-formed entry is served as stored, without recomputation.
    pub fn load(&self, spec: &StrangeSpec, order: usize) -> Result<Option<XiTable>, Failure> {
        let path = self.entry_path(&Self::key(spec, order)?);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(_) => return Ok(None),
        };
        let envelope: Envelope = match serde_json::from_slice(&bytes) {
            Ok(e) => e,
            Err(_) => return Ok(None),
        };
        if envelope.schema != SCHEMA_TAG {
            return Ok(None);
        }
        let table: XiTable = match serde_json::from_value(envelope.table) {
            Ok(t) => t,
            Err(_) => return Ok(None),
        };
        if table.spec != *spec || table.order() != order {
            return Ok(None);
        }
        Ok(Some(table))
    }

    pub fn store(&self, table: &XiTable) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir).map_err(Failure::io)?;
        let key = Self::key(&table.spec, table.order())?;
        let envelope = Envelope {
            schema: SCHEMA_TAG.to_string(),
            table: serde_json::to_value(table).map_err(Failure::encode)?,
        };
        let body = serde_json::to_vec_pretty(&envelope).map_err(Failure::encode)?;
        let final_path = self.entry_path(&key);
        let tmp_path = self.dir.join(format!("{key}.tmp.{}", std::process::id()));
        fs::write(&tmp_path, &body).map_err(Failure::io)?;
        fs::rename(&tmp_path, &final_path).map_err(Failure::io)?;
        Ok(())
    }
}
