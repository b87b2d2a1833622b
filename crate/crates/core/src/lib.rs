//! Simulation lab for a family of congestion-window Markov chains and their
//! small-loss-probability limit processes.
//!
//! The chain increases the window by `c1·w^alpha` after a delivered packet and
//! decreases it by `c2·w^beta` after a lost one, never dropping below the
//! floor `ell`; losses are iid with probability `p`. As `p → 0` the rescaled
//! chain `p^gamma · W(t·p^-nu)` approaches either a Poisson-driven jump
//! process (`beta = 1`) or a deterministic fluid path with Gaussian
//! fluctuations of size `p^tau` around it (`beta < 1`). This crate simulates
//! both sides of each of those limits so they can be compared empirically:
//!
//! * [`params`] — parameter validation and every derived constant,
//! * [`chain`] — the discrete chain and its rescaled embeddings,
//! * [`limits`] — the limit processes (jump SDE, fluid ODE, fluctuation SDE,
//!   Ornstein-Uhlenbeck),
//! * [`stats`] — empirical distributions, KS/Wasserstein distances, moments,
//!   and log-log rate fits.

pub mod chain;
pub mod limits;
mod numeric;
pub mod params;
pub mod rng;
pub mod stats;

pub use chain::{ChainError, ChainState, PathSample, RescaledPath};
pub use limits::{FluidCoeffs, LimitError, OdeSolution, PoissonLimitPath};
pub use params::{ModelParams, OuCoefficients, ParamError, ScalingExponents};
pub use rng::RngStream;
pub use stats::{EmpiricalDistribution, Moments, RateFit, StatsError};
