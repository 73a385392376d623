//! A laboratory for the two-dimensional lattice Gaussian free field.
//!
//! The field lives on the square box `V_N = {1,…,N}²` with zero boundary
//! values; its covariance is the Green's function of the simple random walk
//! killed on the boundary. This crate provides:
//!
//! - [`lattice`]: domains, inner regions, boxes, disks, tilings and the
//!   nested multiscale box hierarchy.
//! - [`green`]: the exact Green's function table (direct solve of the
//!   interior Laplacian system) plus a random-walk Monte Carlo oracle and
//!   logarithmic covariance diagnostics.
//! - [`sampler`]: exact field samplers (covariance factorization and sine
//!   spectral synthesis), discrete harmonic extension, and conditional
//!   resampling of sub-boxes.
//! - [`extremes`]: high/low level sets, counts in disks, pair counts,
//!   maximal uniform squares, and log-log exponent fits.
//! - [`theory`]: closed-form predictions for every measured exponent,
//!   including the constrained variational form of the pair exponent.
//! - [`entropic`]: heat-bath MCMC for the field conditioned to stay
//!   nonnegative on the inner region (hard wall / entropic repulsion).
//! - [`harness`]: seeded experiment orchestration, CSV/JSON reports, and
//!   pass-band verdicts; the CLI in `src/bin/gff2d.rs` is a thin wrapper.
//!
//! Each major capability has a runnable demo under `examples/`.

pub mod dirichlet;
pub mod dst;
pub mod entropic;
pub mod extremes;
pub mod green;
pub mod harness;
pub mod lattice;
pub mod sampler;
pub mod stream;
pub mod theory;

pub use entropic::{ChainConfig, ChainState, SweepOrder};
pub use extremes::{ExponentEstimate, HighSet};
pub use green::{GreenTable, WalkEstimate};
pub use lattice::{BoxPartition, BoxSpec, GridDomain, MultiscaleHierarchy, Point};
pub use sampler::{Field, Provenance};
pub use theory::TheoryParams;
