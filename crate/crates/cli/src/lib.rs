//! HTTP API and shared plumbing for the `sentinel` binary.

pub mod api;

use serde::Serialize;
use sentinel_core::Error;

/// Machine-readable error body shared by the API and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl ErrorBody {
    pub fn new(code: impl Into<String>, message: impl Into<String>, path: Option<String>) -> Self {
        Self { code: code.into(), message: message.into(), path }
    }
}

impl From<&Error> for ErrorBody {
    fn from(e: &Error) -> Self {
        Self::new(e.code(), e.to_string(), e.path().map(str::to_string))
    }
}

/// Broad failure classes, mapped to HTTP statuses and exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    NotFound,
    Invalid,
    Internal,
}

pub fn classify(code: &str) -> ErrorKind {
    match code {
        "SessionNotFound" | "ScenarioNotFound" => ErrorKind::NotFound,
        "IoError" | "CsvError" | "JsonError" | "CorruptSession" | "TransitionError" => ErrorKind::Internal,
        _ => ErrorKind::Invalid,
    }
}

/// Parses JSON, reporting the path of the first offending field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &[u8]) -> Result<T, ErrorBody> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ErrorBody::new("InvalidJson", e.into_inner().to_string(), (path != ".").then_some(path))
    })
}

/// Like [`parse_json`] for an already parsed value.
pub fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T, ErrorBody> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, ".") => None,
            (true, _) => Some(inner),
            (false, ".") => Some(prefix.to_string()),
            (false, _) if inner.starts_with('[') => Some(format!("{prefix}{inner}")),
            (false, _) => Some(format!("{prefix}.{inner}")),
        };
        ErrorBody::new("InvalidJson", e.into_inner().to_string(), path)
    })
}
