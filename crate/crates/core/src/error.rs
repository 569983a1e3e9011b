use thiserror::Error;

use crate::alert::AlertError;
use crate::graph::GraphError;
use crate::inference::InferenceError;
use crate::network::NetworkError;
use crate::projection::ProjectionError;
use crate::scenario::ScenarioError;
use crate::session::SessionError;
use crate::transition::TransitionError;

/// Any failure raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Alert(#[from] AlertError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code for API and CLI surfaces.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Network(e) => e.code(),
            Error::Graph(e) => e.code(),
            Error::Transition(_) => "TransitionError",
            Error::Projection(e) => e.code(),
            Error::Inference(e) => e.code(),
            Error::Alert(e) => e.code(),
            Error::Scenario(e) => e.code(),
            Error::Session(e) => e.code(),
            Error::Io(_) => "IoError",
            Error::Csv(_) => "CsvError",
            Error::Json(_) => "JsonError",
        }
    }

    /// Field path of the offending input, when one is known.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::Scenario(e) => e.path(),
            Error::Session(e) => e.path(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
