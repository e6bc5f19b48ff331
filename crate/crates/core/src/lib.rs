//! Imprecise Markov chains over finite state spaces.
//!
//! An imprecise chain is described by a credal set for the first state and a
//! lower transition operator (one credal set per current state) for every later
//! step; non-Markov processes are supported through per-situation local models.
//! On top of that model the crate computes two joint lower expectations for
//! gambles that depend on finitely many states:
//!
//! * the Williams extension, where a gamble must dominate the capital process
//!   of an almost-desirable selection at some fixed depth, and
//! * the Ville-Vovk-Shafer extension, where it must dominate the limit
//!   superior of such a capital process.
//!
//! Both are computed by backward recursion over the event tree, and every
//! value can be certified: [`witness::lp_witness_search`] produces an explicit
//! selection whose capital process witnesses the value, checkable with
//! [`witness::is_almost_desirable`] and [`witness::dominates`] alone.
//! Monotone event limits (reach a set, stay in a set) are evaluated as
//! converging per-horizon traces, and the constructive devices that transport
//! finite-horizon certificates to limits — truncation, greedy non-negative
//! paths, first-hit cutoffs, stitched selections — are all executable.
//!
//! File formats and certificate (de)serialization live in [`io`]; the `icek`
//! binary in the companion CLI crate exposes the same operations on files.

pub mod chain;
pub mod credal;
pub mod error;
pub mod extension;
pub mod io;
pub mod sampling;
pub mod simplex;
pub mod tree;
pub mod witness;

pub use chain::{ChainModel, Dynamics, LowerTransitionOperator};
pub use credal::{CredalSet, Pmf};
pub use error::Error;
pub use extension::{Direction, LimitResult};
pub use tree::{NGamble, RealProcess, Selection, Situation};
pub use witness::Certificate;

/// Shorthand for results carrying [`enum@Error`].
pub type Result<T> = std::result::Result<T, Error>;
