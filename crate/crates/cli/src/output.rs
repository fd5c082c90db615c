//! Rendering and atomic writing of command outputs.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use qcontrol::io::SCHEMA_VERSION;

/// A fully rendered output file, written only after every file of the
/// invocation has been produced.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// JSON document with `"schema"` as its first key.
pub fn json<T: Serialize>(name: &str, body: &T) -> Result<Artifact, String> {
    let v = serde_json::to_value(body).map_err(|e| e.to_string())?;
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::from(SCHEMA_VERSION));
    match v {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    Ok(Artifact {
        name: name.to_string(),
        bytes,
    })
}

pub fn csv(name: &str, records: &[Vec<String>]) -> Result<Artifact, String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in records {
        w.write_record(r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    Ok(Artifact {
        name: name.to_string(),
        bytes,
    })
}

/// Writes each artifact to a temporary file in `dir` and renames it into place.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&a.bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(&a.name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, path) in staged {
        tmp.persist(&path).map_err(|e| e.error)?;
        written.push(path);
    }
    Ok(written)
}
