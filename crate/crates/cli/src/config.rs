//! Key=value configuration files. Every long flag has a key of the same
//! name; values parse exactly as the flag would. Explicit flags always win
//! over file values.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use dzv_core::error::PipelineError;

/// Parsed configuration file; an empty map when no file was given.
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    // ---- Constructors ----

    pub fn empty() -> Self {
        Config {
            entries: HashMap::new(),
        }
    }

    /// Reads `key = value` lines; `#` starts a comment, blanks are skipped.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::BadRequest(format!("config file {}: {e}", path.display()))
        })?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PipelineError::BadRequest(format!(
                    "config file {} line {}: expected key=value, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    // ---- Lookups ----

    /// Typed lookup; absent keys are None, unparsable values are errors.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, PipelineError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                PipelineError::BadRequest(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }

    /// Boolean lookup accepting true/false, on/off, 1/0.
    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, PipelineError> {
        match self.entries.get(key).map(String::as_str) {
            None => Ok(None),
            Some("true") | Some("on") | Some("1") => Ok(Some(true)),
            Some("false") | Some("off") | Some("0") => Ok(Some(false)),
            Some(raw) => Err(PipelineError::BadRequest(format!(
                "config key {key}: expected a boolean, got {raw:?}"
            ))),
        }
    }
}
