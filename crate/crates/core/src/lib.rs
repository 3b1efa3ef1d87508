//! Cut-and-project (model) sets built from lattices and number fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`numfield`] builds Minkowski-embedded lattices from orders in real number fields.
//! * [`lattice`] holds grids (translated lattices), LLL reduction, complete point
//!   enumeration in bounded regions, successive minima and the α-function.
//! * [`cutproject`] defines the splitting of ℝⁿ, windows, model-set generation,
//!   densities and irreducibility diagnostics.
//! * [`chabauty`] measures Chabauty–Fell distances between finite truncations.
//! * [`transforms`] evaluates Siegel–Veech transforms on point sets and on grids.
//! * [`montecarlo`] samples grids along expanding horospheres and estimates
//!   first and second moments of the transforms.
//! * [`counting`] runs counting experiments, patch statistics and box-dimension estimates.
//! * [`cli`] is the experiment front end used by the `modelsets` binary.

// NaN-rejecting comparisons and index loops over matrices are intentional
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chabauty;
pub mod cli;
pub mod config;
pub mod counting;
pub mod cutproject;
pub mod error;
pub mod io;
pub mod lattice;
pub mod montecarlo;
pub mod numfield;
pub mod spatial;
pub mod transforms;

pub use error::{Error, Result};
