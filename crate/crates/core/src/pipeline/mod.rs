//! End-to-end pipelines: realizing finite groups by Weierstrass polynomials,
//! solving semi-topological embedding problems, and the verification
//! commands behind the command-line tool.

pub mod embed;
pub mod realize;
pub mod report;
pub mod seeds;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{ApproxError, DEFAULT_CONSERVATISM, DEFAULT_GRID, DEFAULT_MAX_DENOMINATOR, DEFAULT_T_MESH};
use crate::embedding::EmbeddingError;
use crate::freecover::CoverError;
use crate::monodromy::{MonodromyError, TrackingConfig};
use crate::permgroup::PermError;
use crate::wpoly::{GeometryError, WpolyError};

pub use embed::{cmd_monodromy, cmd_verify_tower, solve_semitop_embedding, SemitopEmbedding, TowerArtifact};
pub use realize::{realize_group, realize_monodromy, Realization};
pub use report::PipelineReport;

/// Largest polynomial degree the pipelines accept.
pub const MAX_DEGREE: usize = 24;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input error: {0}")]
    Input(String),
    #[error("the polynomial g is not irreducible: its monodromy is intransitive")]
    IrreducibilityFailure,
    #[error("verification failed: {}", .0.failed_verdicts().join(", "))]
    Verification(Box<PipelineReport>),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Wpoly(#[from] WpolyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

impl PipelineError {
    /// 2 for failed verification, 3 for numerical trouble, 4 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Verification(_) | PipelineError::IrreducibilityFailure => 2,
            PipelineError::Approx(ApproxError::DegreeExhausted { .. } | ApproxError::Singular { .. }) => 3,
            PipelineError::Monodromy(
                MonodromyError::BadConfig(_) | MonodromyError::BadRep(_) | MonodromyError::LabelMismatch,
            ) => 4,
            PipelineError::Monodromy(_) => 3,
            PipelineError::Wpoly(WpolyError::SingularAt { .. }) => 3,
            PipelineError::Embedding(EmbeddingError::NoSolution) => 2,
            _ => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RealizeOptions {
    pub grid: usize,
    pub max_degree: u32,
    pub conservatism: f64,
    pub max_denominator: u64,
    pub t_mesh: usize,
    pub rng_seed: u64,
    pub tracking: TrackingConfig,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            grid: DEFAULT_GRID,
            max_degree: 16,
            conservatism: DEFAULT_CONSERVATISM,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            t_mesh: DEFAULT_T_MESH,
            rng_seed: 0,
            tracking: TrackingConfig::default(),
        }
    }
}
