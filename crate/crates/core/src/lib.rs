//! Survey-aligned lexicon scoring for weekly social-media text.
//!
//! The pipeline ingests post streams ([`corpus`]), learns a per-question word
//! dictionary ([`dictionary`]), turns each user-week into 16 Cronbach-alpha
//! scores and fills the DOSPERT / BSSS / VIAS surveys ([`scoring`]), and
//! compares the result against a language-model baseline ([`baseline`]) on
//! stratified splits or a synthetic cohort ([`evaluation`]).

pub mod baseline;
pub mod config;
pub mod corpus;
pub mod dictionary;
pub mod error;
pub mod evaluation;
pub mod scoring;

pub use error::{Error, Result};
