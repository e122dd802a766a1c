//! Row sampling of tall matrices with orthonormal columns: test-matrix
//! generation with prescribed leverage scores, four randomized sampling
//! schemes, measured condition numbers kappa(SQ), and six probabilistic
//! upper bounds, plus a reproducible Monte-Carlo experiment harness with
//! CSV and SVG output.

pub mod batch;
pub mod bounds;
pub mod config;
pub mod csvio;
pub mod error;
pub mod experiment;
pub mod givens;
pub mod linalg;
pub mod matrix;
pub mod plot;
pub mod profile;
pub mod sampling;

pub use error::{Error, Result};
pub use matrix::RealMatrix;
pub use profile::LeverageProfile;
