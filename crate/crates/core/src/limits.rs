//! The limit processes the rescaled chain converges to: the Poisson-driven
//! jump process (`beta = 1`), the deterministic fluid paths (`beta < 1`), the
//! linear fluctuation SDE around the fluid path, and the Ornstein-Uhlenbeck
//! process reached when the fluid path sits at its equilibrium.
//!
//! Between jumps the `beta = 1` limit follows the closed-form flow of
//! `dz = c1 z^alpha dt`, so its simulation is event-driven and exact: the
//! only randomness is the unit-rate Poisson clock, and no time discretization
//! error enters anywhere.

use crate::chain::{GridError, PathSample};
use crate::numeric::powx;
use crate::params::{ModelParams, OuCoefficients};
use crate::rng::RngStream;
use rand::distr::Distribution;
use rand_distr::{Exp1, StandardNormal};
use thiserror::Error;

/// Default absolute tolerance deciding `equilibrium_reached`.
pub const EQUILIBRIUM_TOL: f64 = 1e-6;

const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum LimitError {
    #[error("the Poisson-driven limit requires beta = 1, got beta={0}")]
    BetaMustBeOne(f64),
    #[error("the fluctuation SDE requires beta < 1, got beta={0}")]
    BetaMustBeBelowOne(f64),
    #[error("fluid state became nonpositive near t={t} (value {value}); reduce dt")]
    NonPositiveState { t: f64, value: f64 },
    #[error("fluid path grid ({zeta_dt}) is coarser than the requested step {dt}")]
    GridTooCoarse { zeta_dt: f64, dt: f64 },
    #[error("fluid path covers [0, {have}] but the simulation needs [0, {needed}]")]
    ZetaPathTooShort { needed: f64, have: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Exact solution of `dz = c1 z^alpha dt` started at `z0`, advanced by `dt`:
/// `(c1 (1-alpha) dt + z0^(1-alpha))^(1/(1-alpha))`.
pub fn flow_map(z0: f64, c1: f64, alpha: f64, dt: f64) -> f64 {
    debug_assert!(z0 > 0.0, "flow_map needs z0 > 0, got {z0}");
    debug_assert!(c1 > 0.0 && alpha < 1.0 && dt >= 0.0);
    if dt == 0.0 {
        return z0;
    }
    let q = 1.0 - alpha;
    (c1 * q * dt + powx(z0, q)).powf(q.recip())
}

/// One realization of the `beta = 1` limit: grows along the closed-form flow
/// between unit-rate Poisson events and drops by the factor `1 - c2` at each
/// event.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonLimitPath {
    pub z0: f64,
    pub horizon: f64,
    /// Poisson event times in `(0, horizon]`.
    pub jump_times: Vec<f64>,
    /// Left limits `Z(s-)` at each jump.
    pub values_before_jump: Vec<f64>,
    /// Values `Z(s) = (1 - c2) Z(s-)` right after each jump.
    pub values_after_jump: Vec<f64>,
    /// The trajectory sampled on the requested grid (right-continuous).
    pub path: PathSample,
    /// Exact value at the horizon.
    pub value_at_horizon: f64,
}

impl PoissonLimitPath {
    /// Exact first time the trajectory reaches `level`, if that happens
    /// within the horizon.
    ///
    /// Between jumps the path grows continuously, so it can only reach the
    /// level from below (solved in closed form by inverting the flow); from
    /// above it must first jump to or below the level.
    pub fn hitting_time(&self, c1: f64, alpha: f64, level: f64) -> Option<f64> {
        let q = 1.0 - alpha;
        let hit_in = |z_start: f64, t_start: f64, t_end: f64| -> Option<f64> {
            if z_start > level {
                return None;
            }
            let dt = ((powx(level, q) - powx(z_start, q)) / (c1 * q)).max(0.0);
            let t_hit = t_start + dt;
            (t_hit <= t_end).then_some(t_hit)
        };
        let mut t = 0.0;
        let mut z = self.z0;
        for (k, &jump) in self.jump_times.iter().enumerate() {
            if let Some(hit) = hit_in(z, t, jump) {
                return Some(hit);
            }
            z = self.values_after_jump[k];
            t = jump;
        }
        hit_in(z, t, self.horizon)
    }
}

/// Event-driven simulation of the `beta = 1` limit. Inter-jump waits are iid
/// Exponential(1); between jumps the closed-form flow is applied, so the grid
/// samples carry no discretization error.
pub fn simulate_poisson_limit(
    params: &ModelParams,
    z0: f64,
    horizon: f64,
    grid_dt: f64,
    rng: RngStream,
) -> Result<PoissonLimitPath, LimitError> {
    if params.beta() != 1.0 {
        return Err(LimitError::BetaMustBeOne(params.beta()));
    }
    assert!(z0 > 0.0 && z0.is_finite(), "z0 must be positive, got {z0}");
    assert!(horizon > 0.0 && horizon.is_finite());
    assert!(grid_dt > 0.0 && grid_dt.is_finite());

    let (c1, alpha) = (params.c1(), params.alpha());
    let keep = 1.0 - params.c2(); // in (0, 1) by validation
    let n_grid = (horizon / grid_dt + GRID_EPS).floor() as u64;
    let mut generator = rng.rng();

    let mut times = Vec::with_capacity(n_grid as usize + 1);
    let mut values = Vec::with_capacity(n_grid as usize + 1);
    let mut jump_times = Vec::new();
    let mut values_before = Vec::new();
    let mut values_after = Vec::new();

    let mut t = 0.0f64;
    let mut z = z0;
    let mut k = 0u64;
    let value_at_horizon = loop {
        let wait: f64 = Exp1.sample(&mut generator);
        let t_next = t + wait;
        // Grid points strictly before the jump take the flow value; a grid
        // point exactly at a jump takes the post-jump value (cadlag).
        while k <= n_grid {
            let tg = k as f64 * grid_dt;
            if tg >= t_next || tg > horizon {
                break;
            }
            times.push(tg);
            values.push(flow_map(z, c1, alpha, tg - t));
            k += 1;
        }
        if t_next >= horizon {
            break flow_map(z, c1, alpha, horizon - t);
        }
        let pre = flow_map(z, c1, alpha, wait);
        jump_times.push(t_next);
        values_before.push(pre);
        z = pre * keep;
        values_after.push(z);
        t = t_next;
    };

    Ok(PoissonLimitPath {
        z0,
        horizon,
        jump_times,
        values_before_jump: values_before,
        values_after_jump: values_after,
        path: PathSample::new(times, values)?,
        value_at_horizon,
    })
}

/// Drift coefficients of the fluid equation `z' = c1 (1-p) z^alpha - c2 z^beta`.
/// A plain tuple of already-validated constants; build one from
/// [`ModelParams`] or directly for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl FluidCoeffs {
    pub fn new(c1: f64, c2: f64, alpha: f64, beta: f64) -> Self {
        assert!(c1 > 0.0 && c2 > 0.0, "coefficients must be positive");
        assert!(alpha < beta && beta <= 1.0, "need alpha < beta <= 1");
        Self { c1, c2, alpha, beta }
    }

    /// Invariant point `(c1 (1-p_factor) / c2)^(1/(beta-alpha))` of the drift.
    pub fn equilibrium(&self, p_factor: f64) -> f64 {
        (self.c1 * (1.0 - p_factor) / self.c2).powf((self.beta - self.alpha).recip())
    }
}

impl From<&ModelParams> for FluidCoeffs {
    fn from(params: &ModelParams) -> Self {
        Self {
            c1: params.c1(),
            c2: params.c2(),
            alpha: params.alpha(),
            beta: params.beta(),
        }
    }
}

/// Fluid trajectory on a uniform grid plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub path: PathSample,
    /// Whether `|zeta(horizon) - c_target|` ended below [`EQUILIBRIUM_TOL`].
    pub equilibrium_reached: bool,
    /// `|zeta_dt(horizon) - zeta_{dt/2}(horizon)|`, a step-halving estimate of
    /// the global integration error.
    pub step_halving_error: f64,
    grid_dt: f64,
}

impl OdeSolution {
    pub fn grid_dt(&self) -> f64 {
        self.grid_dt
    }

    /// Value at the nearest grid point to the left of `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let values = self.path.values();
        let idx = (t / self.grid_dt + GRID_EPS).floor() as usize;
        values[idx.min(values.len() - 1)]
    }

    /// Resample onto an arbitrary grid by nearest-left lookup.
    pub fn sample_on(&self, times: &[f64]) -> Result<PathSample, GridError> {
        let values = times.iter().map(|&t| self.value_at(t)).collect();
        PathSample::new(times.to_vec(), values)
    }
}

/// Classical fixed-step fourth-order Runge-Kutta integration of
/// `zeta' = c1 (1 - p_factor) zeta^alpha - c2 zeta^beta`.
///
/// `p_factor = 0` gives the limit fluid path; `p_factor = p` gives the
/// perturbed path whose increment coefficient is `c1 (1 - p)`. Any stage
/// value dropping to zero or below is an error (the step is too coarse for
/// the state), never a clamp.
pub fn solve_zeta(
    coeffs: &FluidCoeffs,
    zeta0: f64,
    p_factor: f64,
    horizon: f64,
    dt: f64,
) -> Result<OdeSolution, LimitError> {
    assert!(zeta0 > 0.0 && zeta0.is_finite(), "zeta0 must be positive");
    assert!((0.0..1.0).contains(&p_factor), "p_factor must lie in [0, 1)");
    assert!(horizon >= 0.0 && horizon.is_finite());
    assert!(dt > 0.0 && dt.is_finite());

    let mut values = Vec::new();
    let end = integrate(coeffs, zeta0, p_factor, horizon, dt, Some(&mut values))?;
    let end_halved = integrate(coeffs, zeta0, p_factor, horizon, dt / 2.0, None)?;

    let n = values.len();
    let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let c_target = coeffs.equilibrium(p_factor);
    Ok(OdeSolution {
        path: PathSample::new(times, values)?,
        equilibrium_reached: (end - c_target).abs() < EQUILIBRIUM_TOL,
        step_halving_error: (end - end_halved).abs(),
        grid_dt: dt,
    })
}

fn integrate(
    coeffs: &FluidCoeffs,
    zeta0: f64,
    p_factor: f64,
    horizon: f64,
    dt: f64,
    mut record: Option<&mut Vec<f64>>,
) -> Result<f64, LimitError> {
    let a = coeffs.c1 * (1.0 - p_factor);
    let rhs = |z: f64| a * powx(z, coeffs.alpha) - coeffs.c2 * powx(z, coeffs.beta);
    let positive = |z: f64, t: f64| {
        if z > 0.0 {
            Ok(z)
        } else {
            Err(LimitError::NonPositiveState { t, value: z })
        }
    };

    let n = (horizon / dt + GRID_EPS).floor() as u64;
    let mut z = zeta0;
    if let Some(out) = record.as_deref_mut() {
        out.reserve(n as usize + 1);
        out.push(z);
    }
    for k in 0..n {
        let t = k as f64 * dt;
        let k1 = rhs(z);
        let s2 = positive(z + 0.5 * dt * k1, t)?;
        let k2 = rhs(s2);
        let s3 = positive(z + 0.5 * dt * k2, t)?;
        let k3 = rhs(s3);
        let s4 = positive(z + dt * k3, t)?;
        let k4 = rhs(s4);
        z = positive(z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)?;
        if let Some(out) = record.as_deref_mut() {
            out.push(z);
        }
    }
    Ok(z)
}

/// Euler-Maruyama discretization of the fluctuation SDE
/// `d xi = (c1 alpha zeta^(alpha-1) - c2 beta zeta^(beta-1)) xi dt
///         - c2 zeta^beta dB`,
/// with the fluid value read from `zeta` by nearest-left grid lookup.
pub fn simulate_xi(
    zeta: &OdeSolution,
    params: &ModelParams,
    xi0: f64,
    horizon: f64,
    dt: f64,
    rng: RngStream,
) -> Result<PathSample, LimitError> {
    if params.beta() >= 1.0 {
        return Err(LimitError::BetaMustBeBelowOne(params.beta()));
    }
    assert!(horizon >= 0.0 && dt > 0.0);
    if zeta.grid_dt() > dt * (1.0 + GRID_EPS) {
        return Err(LimitError::GridTooCoarse {
            zeta_dt: zeta.grid_dt(),
            dt,
        });
    }
    let covered = zeta.path.last_time();
    if covered + GRID_EPS < horizon {
        return Err(LimitError::ZetaPathTooShort {
            needed: horizon,
            have: covered,
        });
    }

    let (c1, c2, alpha, beta) = (params.c1(), params.c2(), params.alpha(), params.beta());
    let n = (horizon / dt + GRID_EPS).floor() as usize;
    let sqrt_dt = dt.sqrt();
    let mut generator = rng.rng();
    let mut xi = xi0;
    let mut values = Vec::with_capacity(n + 1);
    values.push(xi);
    for k in 0..n {
        let t = k as f64 * dt;
        let z = zeta.value_at(t);
        let drift = (c1 * alpha * powx(z, alpha - 1.0) - c2 * beta * powx(z, beta - 1.0)) * xi;
        let diffusion = c2 * powx(z, beta);
        let gauss: f64 = StandardNormal.sample(&mut generator);
        let dw = sqrt_dt * gauss;
        xi += drift * dt - diffusion * dw;
        values.push(xi);
    }
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    Ok(PathSample::new(times, values)?)
}

/// Exact-transition sampling of the Ornstein-Uhlenbeck process
/// `d xi = -mu xi dt + sigma dW`:
/// `xi_{k+1} = e^(-mu dt) xi_k + sigma sqrt((1 - e^(-2 mu dt)) / (2 mu)) N(0,1)`.
/// There is no discretization bias at the grid points.
pub fn simulate_ou(
    coeffs: &OuCoefficients,
    xi0: f64,
    horizon: f64,
    dt: f64,
    rng: RngStream,
) -> PathSample {
    assert!(horizon >= 0.0 && dt > 0.0);
    let decay = (-coeffs.mu * dt).exp();
    let noise_sd = coeffs.sigma * ((1.0 - (-2.0 * coeffs.mu * dt).exp()) / (2.0 * coeffs.mu)).sqrt();
    let n = (horizon / dt + GRID_EPS).floor() as usize;
    let mut generator = rng.rng();
    let mut xi = xi0;
    let mut values = Vec::with_capacity(n + 1);
    values.push(xi);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut generator);
        xi = decay * xi + noise_sd * z;
        values.push(xi);
    }
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    PathSample::new(times, values).expect("uniform grids with finite values are always valid")
}

/// Parameters of the stationary law of the OU process: `Normal(0, sigma^2/(2 mu))`.
pub fn ou_stationary_law(coeffs: &OuCoefficients) -> (f64, f64) {
    (0.0, coeffs.stationary_variance)
}
