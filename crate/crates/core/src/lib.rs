//! Bayesian games with no-signaling advice.
//!
//! This crate implements a two-parameter family of two-player Bayesian games
//! together with the machinery needed to study how shared correlations act
//! as advice: classical pure-strategy equilibria, the 2-2-2 no-signaling
//! polytope and its CHSH facets, two-qubit quantum strategies evaluated
//! through the Born rule, and the advantage/feasibility analyses built on
//! top of them.
//!
//! Modules:
//! - [`game`]: the game family G(κ,τ), payoffs under advice, Nash search.
//! - [`nsbox`]: no-signaling boxes, canonical form, CHSH, locality LP.
//! - [`quantum`]: states, measurements, and the boxes they generate.
//! - [`analysis`]: advantage predicates, grid scans, angle optimization.
//! - [`optimize`]: the multistart Nelder-Mead search used by `analysis`.
//! - [`io`]: JSON file formats and CSV emission.
//!
//! The expensive inner loops (grid scans, multistart searches) run on rayon
//! when the default `parallel` feature is enabled and fall back to
//! sequential iteration otherwise; results are identical either way.

pub mod analysis;
pub mod error;
pub mod game;
pub mod io;
pub mod nsbox;
pub mod optimize;
pub mod quantum;

pub use error::{Error, Result};
