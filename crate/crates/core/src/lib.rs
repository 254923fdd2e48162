//! Collaborative exploration of finite networks by independent random walks.
//!
//! The crate compares the expected number of vertices covered by `k`
//! independent walkers against a single walker with the combined lifespan,
//! and related start schemes. Small instances are evaluated exactly through
//! grounded-kernel survival probabilities (with a spectral cross-check and a
//! brute-force trajectory oracle); large ones through seeded, parallel and
//! reproducible Monte Carlo.

pub mod chain;
pub mod error;
pub mod experiments;
pub mod network;
pub mod rng;
pub mod scheme;
pub mod simulate;
pub mod survival;

pub use chain::{TransitionKernel, Variant};
pub use error::{Error, Result};
pub use network::Network;
pub use scheme::{Coupling, StartScheme};
