//! The discrete-time congestion-window Markov chain and its rescaled
//! continuous-time embeddings.
//!
//! One step of the chain applies the increment `c1·w^alpha` on a delivered
//! packet or the decrement `c2·w^beta` on a lost one, then clamps at the
//! floor `ell`. The clamp deficit is accumulated as reflection mass so the
//! local-time behaviour of the floor can be inspected after a run.

use crate::numeric::powx;
use crate::params::ModelParams;
use crate::rng::{RngStream, SimRng};
use crate::stats::EmpiricalDistribution;
use rand::RngExt;
use thiserror::Error;

/// Windows above this signal a misconfigured run rather than a value worth
/// clamping; the step that produces one fails.
pub const WINDOW_OVERFLOW_LIMIT: f64 = 1e300;

/// Default cap on the number of chain steps a single rescaled path may take.
pub const DEFAULT_STEP_BUDGET: u64 = 5_000_000_000;

/// Tolerance used when converting a time grid to step indices, so that exact
/// multiples of the grid spacing are not lost to representation error.
const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum GridError {
    #[error("times ({times}) and values ({values}) have different lengths")]
    LengthMismatch { times: usize, values: usize },
    #[error("path must contain at least one point")]
    Empty,
    #[error("times must be strictly increasing (offending index {index})")]
    NonIncreasingTimes { index: usize },
    #[error("path contains a non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ChainError {
    #[error("window became non-finite or exceeded {WINDOW_OVERFLOW_LIMIT:e} at step {step}")]
    NonFiniteWindow { step: u64 },
    #[error("horizon {horizon} requires {required:e} steps, over the budget of {budget}")]
    HorizonTooLarge {
        horizon: f64,
        required: f64,
        budget: u64,
    },
    #[error("initial window {w0} lies below the floor {ell}")]
    StartBelowFloor { w0: f64, ell: f64 },
    #[error("paths are sampled on different time grids")]
    GridMismatch,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// State of the chain after `step_index` transitions, with running floor
/// diagnostics: `reflection_count` steps were clamped, and `reflection_mass`
/// is the accumulated clamp deficit (the discrete local time at `ell`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainState {
    pub w: f64,
    pub step_index: u64,
    pub reflection_count: u64,
    pub reflection_mass: f64,
}

impl ChainState {
    pub fn new(w0: f64) -> Self {
        Self {
            w: w0,
            step_index: 0,
            reflection_count: 0,
            reflection_mass: 0.0,
        }
    }
}

/// A trajectory sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PathSample {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self, GridError> {
        if times.len() != values.len() {
            return Err(GridError::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(GridError::Empty);
        }
        for (index, &value) in times.iter().chain(values.iter()).enumerate() {
            if !value.is_finite() {
                return Err(GridError::NonFinite {
                    index: index % times.len(),
                    value,
                });
            }
        }
        for (index, pair) in times.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(GridError::NonIncreasingTimes { index: index + 1 });
            }
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first_value(&self) -> f64 {
        self.values[0]
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("paths are never empty")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("paths are never empty")
    }
}

/// One transition of the chain. `loss` selects the decrement branch; the
/// increment is *not* applied on a loss step.
// The negated comparison is load-bearing: it sends NaN down the error path.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn step(state: &ChainState, params: &ModelParams, loss: bool) -> Result<ChainState, ChainError> {
    let w = state.w;
    let pre = if loss {
        w - params.c2() * powx(w, params.beta())
    } else {
        w + params.c1() * powx(w, params.alpha())
    };
    // `!(pre <= LIMIT)` also catches NaN.
    if !(pre <= WINDOW_OVERFLOW_LIMIT) {
        return Err(ChainError::NonFiniteWindow {
            step: state.step_index + 1,
        });
    }
    let mut next = ChainState {
        w: pre,
        step_index: state.step_index + 1,
        ..*state
    };
    if pre < params.ell() {
        next.w = params.ell();
        next.reflection_count += 1;
        next.reflection_mass += params.ell() - pre;
    }
    Ok(next)
}

/// Loop body shared by all batched simulators. Field order and arithmetic
/// mirror [`step`] exactly so batched runs stay bit-identical to a fold of
/// `step` over the same loss pattern.
struct Kernel {
    c1: f64,
    c2: f64,
    alpha: f64,
    beta: f64,
    ell: f64,
    p: f64,
}

impl Kernel {
    fn new(params: &ModelParams) -> Self {
        Self {
            c1: params.c1(),
            c2: params.c2(),
            alpha: params.alpha(),
            beta: params.beta(),
            ell: params.ell(),
            p: params.p(),
        }
    }

    /// Advance `state` by `n` steps, drawing one uniform per step
    /// (`loss := uniform < p`).
    // As in `step`, the negated comparison routes NaN to the error path.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    #[inline]
    fn run(&self, state: &mut ChainState, n: u64, rng: &mut SimRng) -> Result<(), ChainError> {
        let mut w = state.w;
        let mut count = state.reflection_count;
        let mut mass = state.reflection_mass;
        for i in 0..n {
            let u: f64 = rng.random();
            // The loss branch must stay a real branch: if the compiler
            // if-converts it, the decrement's power lands on the hot path's
            // dependency chain and the loop runs several times slower.
            let pre = if u < self.p {
                loss_update(w, self.c2, self.beta)
            } else {
                w + self.c1 * powx(w, self.alpha)
            };
            if !(pre <= WINDOW_OVERFLOW_LIMIT) {
                state.w = w;
                state.step_index += i;
                state.reflection_count = count;
                state.reflection_mass = mass;
                return Err(ChainError::NonFiniteWindow {
                    step: state.step_index + 1,
                });
            }
            if pre < self.ell {
                w = self.ell;
                count += 1;
                mass += self.ell - pre;
            } else {
                w = pre;
            }
        }
        state.w = w;
        state.step_index += n;
        state.reflection_count = count;
        state.reflection_mass = mass;
        Ok(())
    }
}

/// Decrement branch of the kernel, arithmetic identical to [`step`].
#[cold]
#[inline(never)]
fn loss_update(w: f64, c2: f64, beta: f64) -> f64 {
    w - c2 * powx(w, beta)
}

fn check_start(w0: f64, params: &ModelParams) -> Result<(), ChainError> {
    if !w0.is_finite() || w0 < params.ell() {
        return Err(ChainError::StartBelowFloor {
            w0,
            ell: params.ell(),
        });
    }
    Ok(())
}

/// Simulate `n_steps` transitions with Bernoulli(`p`) losses, keeping every
/// intermediate state. The result has `n_steps + 1` entries and is a pure
/// function of `(params, w0, n_steps, rng)`.
pub fn simulate_path(
    params: &ModelParams,
    w0: f64,
    n_steps: u64,
    rng: RngStream,
) -> Result<Vec<ChainState>, ChainError> {
    check_start(w0, params)?;
    let mut generator = rng.rng();
    let p = params.p();
    let mut states = Vec::with_capacity(n_steps as usize + 1);
    states.push(ChainState::new(w0));
    for _ in 0..n_steps {
        let u: f64 = generator.random();
        let next = step(states.last().expect("nonempty"), params, u < p)?;
        states.push(next);
    }
    Ok(states)
}

/// A rescaled trajectory together with the final chain state, whose
/// reflection fields cover the *whole* underlying run.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledPath {
    pub sample: PathSample,
    pub final_state: ChainState,
    space_scale: f64,
}

impl RescaledPath {
    /// The exact value of the embedding at the end of the run,
    /// `p^gamma · W_{floor(horizon · p^-nu)}`.
    pub fn terminal(&self) -> f64 {
        self.space_scale * self.final_state.w
    }
}

/// Simulate the chain over `floor(horizon · p^-nu)` steps and sample the
/// embedding `Z_p(t) = p^gamma · W_{floor(t · p^-nu)}` on the grid
/// `0, grid_dt, 2·grid_dt, …` up to `horizon`.
///
/// Only grid snapshots are kept; the raw chain is not stored. Reflections are
/// tracked across the full run and reported in `final_state`.
pub fn rescaled_path(
    params: &ModelParams,
    w0: f64,
    horizon: f64,
    grid_dt: f64,
    rng: RngStream,
    step_budget: u64,
) -> Result<RescaledPath, ChainError> {
    assert!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive");
    assert!(grid_dt > 0.0 && grid_dt.is_finite(), "grid_dt must be positive");
    check_start(w0, params)?;

    let exps = params.exponents();
    let steps_per_unit = params.p().powf(-exps.nu);
    let required = (horizon * steps_per_unit).floor();
    if !required.is_finite() || required > step_budget as f64 {
        return Err(ChainError::HorizonTooLarge {
            horizon,
            required,
            budget: step_budget,
        });
    }
    let n_steps = required as u64;
    let space_scale = params.p().powf(exps.gamma);
    let n_grid = (horizon / grid_dt + GRID_EPS).floor() as u64;

    let kernel = Kernel::new(params);
    let mut generator = rng.rng();
    let mut state = ChainState::new(w0);
    let mut times = Vec::with_capacity(n_grid as usize + 1);
    let mut values = Vec::with_capacity(n_grid as usize + 1);
    let mut done = 0u64;
    for k in 0..=n_grid {
        let t = k as f64 * grid_dt;
        let target = ((t * steps_per_unit).floor() as u64).min(n_steps);
        kernel.run(&mut state, target - done, &mut generator)?;
        done = target;
        times.push(t);
        values.push(space_scale * state.w);
    }
    kernel.run(&mut state, n_steps - done, &mut generator)?;

    Ok(RescaledPath {
        sample: PathSample::new(times, values)?,
        final_state: state,
        space_scale,
    })
}

/// Pointwise fluctuation rescaling `xi_p(t) = p^-tau · (Z_p(t) - zeta_p(t))`.
/// Both paths must be sampled on the identical time grid.
pub fn fluctuation_path(
    params: &ModelParams,
    zeta_p: &PathSample,
    z_p: &PathSample,
) -> Result<PathSample, ChainError> {
    if zeta_p.times() != z_p.times() {
        return Err(ChainError::GridMismatch);
    }
    let scale = params.p().powf(-params.exponents().tau);
    let values = z_p
        .values()
        .iter()
        .zip(zeta_p.values())
        .map(|(&z, &zeta)| scale * (z - zeta))
        .collect();
    Ok(PathSample::new(z_p.times().to_vec(), values)?)
}

/// Draw an approximate stationary sample: run `burn_in` steps, then record
/// the window after every `thin`-th step, `n_samples` times.
///
/// Values are returned raw (unscaled); callers apply `p^gamma` or the
/// `(p^gamma·W - c_p)/p^tau` scaling as needed.
pub fn stationary_sample(
    params: &ModelParams,
    w0: f64,
    burn_in: u64,
    n_samples: usize,
    thin: u64,
    rng: RngStream,
) -> Result<EmpiricalDistribution, ChainError> {
    assert!(thin >= 1, "thin must be at least 1");
    assert!(n_samples >= 1, "need at least one sample");
    check_start(w0, params)?;

    let kernel = Kernel::new(params);
    let mut generator = rng.rng();
    let mut state = ChainState::new(w0);
    kernel.run(&mut state, burn_in, &mut generator)?;
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        kernel.run(&mut state, thin, &mut generator)?;
        samples.push(state.w);
    }
    Ok(EmpiricalDistribution::from_samples(samples)
        .expect("window values are finite by construction"))
}
