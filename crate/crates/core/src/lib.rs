//! Exact and Monte Carlo machinery for random group presentations.
//!
//! The crate is organised around free-group words ([`words`]), folded
//! labelled graphs ([`graphs`]), the readability and goodness deciders
//! ([`readability`]), small-cancellation checks ([`cancellation`]),
//! genericity-entropy estimation ([`entropy`]), density-model sampling
//! ([`density`]) and modular-group orbit counting ([`modular`]).

pub mod cancellation;
pub mod density;
pub mod entropy;
pub mod error;
pub mod graphs;
pub mod limits;
pub mod modular;
pub mod numeric;
pub mod readability;
pub mod words;

pub use error::{Error, Result};
pub use graphs::LabeledGraph;
pub use limits::Limits;
pub use words::{Alphabet, CyclicWord, Letter, Word};
