//! Implicit entity linking for short texts.
//!
//! An Entity Model Network (EMN) joins every entity of one type to the clues
//! that describe it: phrases and unigrams drawn from knowledge-base facts and
//! from recent tweets that mention the entity explicitly. Each entity also
//! carries its recent page-view count. To link a tweet that refers to an
//! entity without naming it, the tweet's clues select the best-supported
//! candidates from the network, and a linear pairwise ranker orders them by
//! cosine similarity and relative popularity.
//!
//! | module | role |
//! |---|---|
//! | [`corpus`] | file loaders and writers |
//! | [`textprep`] | tweet cleaning and clue extraction |
//! | [`knowledge`] | relation ranking, factual and contextual knowledge, salience, spotting |
//! | [`emn`] | entity models and the network graph, snapshots |
//! | [`pipeline`] | corpora to network in one call |
//! | [`linker`] | candidate selection, features, ranker training and linking |
//! | [`eval`] | recall at k, cross-validation, ablation, combined F1 |
//! | [`config`], [`cli`] | the `emn-linker` binary |
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod emn;
pub mod error;
pub mod eval;
pub mod knowledge;
pub mod linker;
pub mod pipeline;
pub mod textprep;

pub use error::{Error, Result};
