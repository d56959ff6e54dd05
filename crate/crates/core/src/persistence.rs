//! Versioned JSON envelopes with a payload checksum, plus CSV writers for
//! scan reports and cohomology dumps.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::homology::ComplexSummary;
use crate::strata::ScanRecord;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadKind {
    Representations,
    Cohomology,
    Bracket,
    Jacobi,
    RankScan,
    Kummer,
    Mcg,
    Flow,
}

impl std::fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = serde_json::to_value(self).map_err(|_| std::fmt::Error)?;
        f.write_str(v.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub kind: PayloadKind,
    pub tool_version: String,
    /// The configuration that produced the payload.
    pub config: Value,
    pub payload: Value,
    /// Hex SHA-256 of the compact serialization of `payload`.
    pub checksum: String,
}

pub fn checksum(payload: &Value) -> String {
    let bytes = serde_json::to_vec(payload).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl Envelope {
    pub fn wrap<T: Serialize, C: Serialize>(kind: PayloadKind, payload: &T, config: &C) -> Result<Self> {
        let payload = serde_json::to_value(payload)?;
        Ok(Envelope {
            schema_version: SCHEMA_VERSION,
            kind,
            tool_version: TOOL_VERSION.to_string(),
            config: serde_json::to_value(config)?,
            checksum: checksum(&payload),
            payload,
        })
    }

    /// Checks the kind and decodes the payload.
    pub fn unwrap<T: DeserializeOwned>(&self, kind: PayloadKind) -> Result<T> {
        if self.kind != kind {
            return Err(Error::InvalidInput(format!("expected a {kind} payload, found {}", self.kind)));
        }
        Ok(serde_json::from_value(self.payload.clone())?)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("JSON values always serialize")
    }

    /// Parses and validates: schema version first, then structure, then checksum.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Corrupted(format!("unreadable envelope: {e}")))?;
        let found = value
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Corrupted("missing schema_version".into()))?;
        if found != SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: SCHEMA_VERSION,
            });
        }
        let env: Envelope =
            serde_json::from_value(value).map_err(|e| Error::Corrupted(format!("malformed envelope: {e}")))?;
        let actual = checksum(&env.payload);
        if actual != env.checksum {
            return Err(Error::Corrupted(format!(
                "checksum mismatch (stored {}, computed {actual})",
                env.checksum
            )));
        }
        Ok(env)
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_string_pretty().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Scan records as CSV with columns `seed, orbit_type, h0, h1, rank, sv_gap`.
pub fn scan_csv(records: &[ScanRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn read_scan_csv(bytes: &[u8]) -> Result<Vec<ScanRecord>> {
    let mut r = csv::Reader::from_reader(bytes);
    Ok(r.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
}

/// One cohomology summary per row; spectra are `;`-separated.
pub fn cohomology_csv(rows: &[(u64, ComplexSummary)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "h0", "h1", "h2", "complex_residual", "d0_spectrum", "d1_spectrum"])?;
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";");
    for (seed, s) in rows {
        w.write_record([
            seed.to_string(),
            s.h0.to_string(),
            s.h1.to_string(),
            s.h2.to_string(),
            format!("{:?}", s.complex_residual),
            join(&s.d0_spectrum),
            join(&s.d1_spectrum),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}
