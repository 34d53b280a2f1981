//! Citation-network analytics for journals, publishers and authors.
//!
//! The crate is organised around an immutable [`corpus::Corpus`] that every
//! analysis module reads from:
//!
//! * [`impact`]: journal impact, normalisation, immediacy, half-lives, market share
//! * [`selfcite`]: citation/reference rates and the publication solidarity index
//! * [`matching`]: control-journal selection by category, tercile and impact
//! * [`jnet`]: journal citation networks and centralities
//! * [`novelty`]: atypical reference combinations against a shuffled null model
//! * [`disruption`]: the disruptiveness index and its aggregates
//! * [`authors`]: two-step author disambiguation and author statistics
//! * [`synth`]: synthetic corpora and publisher-biased rewiring
//! * [`pipeline`]: configuration, stage orchestration and report emission

pub mod authors;
pub mod corpus;
pub mod disruption;
mod error;
pub mod impact;
pub mod jnet;
pub mod matching;
pub mod novelty;
pub(crate) mod output;
pub mod pipeline;
pub mod selfcite;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
