//! Emotion-conditioned per-word duration generation.
//!
//! The crate ingests word alignments, turns them into durations relative to
//! neutral speech, trains a Wasserstein GAN or an IMLE generator over those
//! sequences, scores generated sequences against real ones and renders them
//! as SSML prosody markup.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod model;
pub mod nn;
pub mod ssml;
pub mod training;

pub use error::{CheckpointError, Error, Result};
