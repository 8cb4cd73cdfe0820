//! Degradation-aware microgrid investment planning.
//!
//! The pipeline sizes a controllable generator, a PV array and a battery
//! with a multi-year MILP ([`model`]), replays the chosen investment year by
//! year while the battery and PV age ([`validation`], [`degradation`]), and
//! grows the battery until no load is shed over the horizon ([`sizing`]).

pub mod context;
pub mod degradation;
pub mod model;
pub mod report;
pub mod scenario;
pub mod sizing;
pub mod validation;

use thiserror::Error;

pub use context::{PlanningContext, DEFAULT_EUE_TOLERANCE};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Milp(#[from] dbio_milp::MilpError),
    #[error(transparent)]
    Degradation(#[from] degradation::DegradationError),
    #[error("{stage}{}: {source}", .year.map(|y| format!(" (year {y})")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        year: Option<u32>,
        #[source]
        source: model::ModelError,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn stage(stage: &'static str, year: Option<u32>, source: model::ModelError) -> Self {
        Error::Stage {
            stage,
            year,
            source,
        }
    }
}
