//! Regret-guided quality-diversity search for adversarial levels on a small
//! multi-agent football simulator.
//!
//! The core is generic over the real scalar (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

// `!(x > 0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod archive;
pub mod emitters;
pub mod environment;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod orchestrator;
pub mod policies;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Archive = archive::Archive<f64>;
pub type Elite = archive::Elite<f64>;
pub type GridSpec = archive::GridSpec<f64>;
pub type LevelGenotype = environment::LevelGenotype<f64>;
pub type MatchConfig = environment::MatchConfig<f64>;
pub type FieldSpec = environment::FieldSpec<f64>;
pub type MatchState = environment::MatchState<f64>;
pub type RegretEstimate = evaluation::RegretEstimate<f64>;
pub type SearchConfig = orchestrator::SearchConfig<f64>;
pub type SearchResult = orchestrator::SearchResult<f64>;
pub type CmaMeEmitter = emitters::CmaMeEmitter<f64>;
pub type ArchiveFile = io::ArchiveFile<f64>;
