//! Model parameters, their standing assumptions, and every derived constant.
//!
//! A parameter tuple `(c1, c2, alpha, beta, ell, p)` is only usable once it
//! has passed validation; all derived quantities (scaling exponents,
//! equilibria, Ornstein-Uhlenbeck coefficients) are computed from a validated
//! [`ModelParams`], so invalid combinations can never reach the simulators.

use thiserror::Error;

/// Relative tolerance at which the two algebraic forms of the OU drift and
/// diffusion coefficients must agree; both forms are always evaluated.
pub const OU_FORM_AGREEMENT_RTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ParamError {
    #[error("parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("c1 must be strictly positive, got {0}")]
    NonPositiveC1(f64),
    #[error("c2 must be strictly positive, got {0}")]
    NonPositiveC2(f64),
    #[error("alpha must be strictly below beta, got alpha={alpha}, beta={beta}")]
    AlphaNotBelowBeta { alpha: f64, beta: f64 },
    #[error("beta must not exceed 1, got {0}")]
    BetaAboveOne(f64),
    #[error("beta = 1 requires c2 < 1, got c2={0}")]
    BetaOneRequiresC2LessThanOne(f64),
    #[error("beta < 1 requires a strictly positive floor, got ell={0}")]
    BetaBelowOneRequiresPositiveFloor(f64),
    #[error("ell must be nonnegative, got {0}")]
    NegativeFloor(f64),
    #[error("p must lie strictly inside (0, 1), got {0}")]
    POutOfRange(f64),
    #[error("OU coefficients are only defined for beta < 1, got beta={0}")]
    BetaMustBeBelowOne(f64),
}

/// Validated parameters of one congestion-window chain.
///
/// Invariants: `c1 > 0`, `c2 > 0`, `alpha < beta <= 1`, `c2 < 1` when
/// `beta = 1`, `ell > 0` when `beta < 1`, `ell >= 0`, and `0 < p < 1`.
/// Fields are private; construction goes through [`ModelParams::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    c1: f64,
    c2: f64,
    alpha: f64,
    beta: f64,
    ell: f64,
    p: f64,
}

/// Space, time, and fluctuation scales tying the chain to its limits:
/// space scale `p^gamma`, time scale `p^-nu`, fluctuation scale `p^tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    /// `gamma = 1 / (beta - alpha)`
    pub gamma: f64,
    /// `nu = (1 - alpha) * gamma`
    pub nu: f64,
    /// `tau = (nu - 1) / 2`
    pub tau: f64,
}

/// Coefficients of the limiting Ornstein-Uhlenbeck process
/// `d xi = -mu xi dt + sigma dW` (only defined for `beta < 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuCoefficients {
    /// Mean-reversion rate, strictly positive for all valid parameters.
    pub mu: f64,
    /// Diffusion coefficient, strictly positive.
    pub sigma: f64,
    /// `sigma^2 / (2 mu)`, the variance of the stationary Normal law.
    pub stationary_variance: f64,
}

impl ModelParams {
    /// Validate and construct. Each violated assumption maps to its own
    /// [`ParamError`] variant.
    pub fn new(
        c1: f64,
        c2: f64,
        alpha: f64,
        beta: f64,
        ell: f64,
        p: f64,
    ) -> Result<Self, ParamError> {
        for (name, value) in [
            ("c1", c1),
            ("c2", c2),
            ("alpha", alpha),
            ("beta", beta),
            ("ell", ell),
            ("p", p),
        ] {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name, value });
            }
        }
        if c1 <= 0.0 {
            return Err(ParamError::NonPositiveC1(c1));
        }
        if c2 <= 0.0 {
            return Err(ParamError::NonPositiveC2(c2));
        }
        if alpha >= beta {
            return Err(ParamError::AlphaNotBelowBeta { alpha, beta });
        }
        if beta > 1.0 {
            return Err(ParamError::BetaAboveOne(beta));
        }
        if beta == 1.0 && c2 >= 1.0 {
            return Err(ParamError::BetaOneRequiresC2LessThanOne(c2));
        }
        if ell < 0.0 {
            return Err(ParamError::NegativeFloor(ell));
        }
        if beta < 1.0 && ell <= 0.0 {
            return Err(ParamError::BetaBelowOneRequiresPositiveFloor(ell));
        }
        if p <= 0.0 || p >= 1.0 {
            return Err(ParamError::POutOfRange(p));
        }
        Ok(Self {
            c1,
            c2,
            alpha,
            beta,
            ell,
            p,
        })
    }

    /// Classic TCP congestion avoidance: increment `1/w`, halve on loss.
    pub fn tcp(p: f64) -> Result<Self, ParamError> {
        Self::new(1.0, 0.5, -1.0, 1.0, 0.0, p)
    }

    /// Scalable TCP: constant increment, multiplicative decrease.
    pub fn scalable_tcp(c1: f64, c2: f64, p: f64) -> Result<Self, ParamError> {
        Self::new(c1, c2, 0.0, 1.0, 0.0, p)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Derived scaling exponents `(gamma, nu, tau)`.
    pub fn exponents(&self) -> ScalingExponents {
        let gamma = (self.beta - self.alpha).recip();
        let nu = (1.0 - self.alpha) * gamma;
        let tau = (nu - 1.0) / 2.0;
        ScalingExponents { gamma, nu, tau }
    }

    /// Equilibrium `c_at_p = (c1 (1 - at_p) / c2)^gamma` of the perturbed
    /// fluid drift. `at_p = 0` gives `c0`.
    ///
    /// `at_p` is an explicit argument rather than `self.p` because experiments
    /// evaluate the equilibrium along a grid of loss probabilities for one
    /// fixed `(c1, c2, alpha, beta)`.
    pub fn equilibrium(&self, at_p: f64) -> f64 {
        assert!(
            (0.0..1.0).contains(&at_p),
            "equilibrium is defined for at_p in [0, 1), got {at_p}"
        );
        (self.c1 * (1.0 - at_p) / self.c2).powf(self.exponents().gamma)
    }

    /// Drift and diffusion of the limiting Ornstein-Uhlenbeck process.
    ///
    /// Both printed forms of each coefficient are evaluated and must agree to
    /// [`OU_FORM_AGREEMENT_RTOL`] relative; a disagreement would mean the
    /// algebra here is broken, so it panics rather than returning an error.
    pub fn ou_coefficients(&self) -> Result<OuCoefficients, ParamError> {
        if self.beta >= 1.0 {
            return Err(ParamError::BetaMustBeBelowOne(self.beta));
        }
        let (c1, c2, alpha, beta) = (self.c1, self.c2, self.alpha, self.beta);
        let gamma = self.exponents().gamma;
        let ratio = c1 / c2;

        let mu_direct =
            c2 * beta * ratio.powf(gamma * (beta - 1.0)) - c1 * alpha * ratio.powf(gamma * (alpha - 1.0));
        let mu = (beta - alpha)
            * c1.powf(-(1.0 - beta) / (beta - alpha))
            * c2.powf((1.0 - alpha) / (beta - alpha));
        assert!(
            (mu_direct - mu).abs() <= OU_FORM_AGREEMENT_RTOL * mu.abs(),
            "the two forms of mu disagree: {mu_direct} vs {mu}"
        );

        let sigma_direct = c2 * ratio.powf(gamma * beta);
        let sigma = c1.powf(beta / (beta - alpha)) * c2.powf(-alpha / (beta - alpha));
        assert!(
            (sigma_direct - sigma).abs() <= OU_FORM_AGREEMENT_RTOL * sigma.abs(),
            "the two forms of sigma disagree: {sigma_direct} vs {sigma}"
        );

        Ok(OuCoefficients {
            mu,
            sigma,
            stationary_variance: sigma * sigma / (2.0 * mu),
        })
    }
}

impl OuCoefficients {
    /// Variance of the OU marginal at time `t` started from a point mass:
    /// `sigma^2/(2 mu) * (1 - exp(-2 mu t))`.
    pub fn marginal_variance(&self, t: f64) -> f64 {
        self.stationary_variance * (1.0 - (-2.0 * self.mu * t).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tcp_parameters_are_valid() {
        let p = ModelParams::tcp(0.01).unwrap();
        assert_eq!(p.c1(), 1.0);
        assert_eq!(p.c2(), 0.5);
        assert_eq!(p.alpha(), -1.0);
        assert_eq!(p.beta(), 1.0);
        assert_eq!(p.ell(), 0.0);
    }

    #[test]
    fn beta_one_needs_small_c2() {
        let err = ModelParams::new(1.0, 1.5, 0.0, 1.0, 0.0, 0.01).unwrap_err();
        assert_eq!(err, ParamError::BetaOneRequiresC2LessThanOne(1.5));
        // c2 = 1 exactly is also out.
        let err = ModelParams::new(1.0, 1.0, 0.0, 1.0, 0.0, 0.01).unwrap_err();
        assert_eq!(err, ParamError::BetaOneRequiresC2LessThanOne(1.0));
    }

    #[test]
    fn beta_below_one_needs_positive_floor() {
        let err = ModelParams::new(1.0, 1.0, 0.0, 0.5, 0.0, 0.01).unwrap_err();
        assert_eq!(err, ParamError::BetaBelowOneRequiresPositiveFloor(0.0));
    }

    #[test]
    fn alpha_equal_to_beta_is_rejected() {
        let err = ModelParams::new(1.0, 0.5, 1.0, 1.0, 0.0, 0.01).unwrap_err();
        assert_eq!(
            err,
            ParamError::AlphaNotBelowBeta {
                alpha: 1.0,
                beta: 1.0
            }
        );
    }

    #[test]
    fn p_must_be_an_interior_probability() {
        for bad in [0.0, 1.0, -0.2, 1.7] {
            let err = ModelParams::new(1.0, 0.5, -1.0, 1.0, 0.0, bad).unwrap_err();
            assert_eq!(err, ParamError::POutOfRange(bad));
        }
    }

    #[test]
    fn non_finite_inputs_are_rejected_by_name() {
        let err = ModelParams::new(f64::NAN, 0.5, -1.0, 1.0, 0.0, 0.01).unwrap_err();
        assert!(matches!(err, ParamError::NonFinite { name: "c1", .. }));
        let err = ModelParams::new(1.0, 0.5, f64::NEG_INFINITY, 1.0, 0.0, 0.01).unwrap_err();
        assert!(matches!(err, ParamError::NonFinite { name: "alpha", .. }));
    }

    #[test]
    fn exponents_for_the_named_special_cases() {
        let tcp = ModelParams::tcp(0.01).unwrap().exponents();
        assert_eq!(tcp.gamma, 0.5);
        assert_eq!(tcp.nu, 1.0);
        assert_eq!(tcp.tau, 0.0);

        let scalable = ModelParams::scalable_tcp(1.0, 0.5, 0.01).unwrap().exponents();
        assert_eq!(scalable.gamma, 1.0);
        assert_eq!(scalable.nu, 1.0);
        assert_eq!(scalable.tau, 0.0);

        let sqrt_decrease = ModelParams::new(1.0, 1.0, 0.0, 0.5, 0.01, 0.01)
            .unwrap()
            .exponents();
        assert_eq!(sqrt_decrease.gamma, 2.0);
        assert_eq!(sqrt_decrease.nu, 2.0);
        assert_eq!(sqrt_decrease.tau, 0.5);
    }

    #[test]
    fn equilibrium_values() {
        let unit = ModelParams::new(1.0, 1.0, 0.0, 0.5, 0.01, 0.01).unwrap();
        assert_eq!(unit.equilibrium(0.0), 1.0);

        let tcp = ModelParams::tcp(0.01).unwrap();
        assert_relative_eq!(tcp.equilibrium(0.0), 2f64.sqrt(), max_relative = 1e-15);

        let doubled = ModelParams::new(2.0, 1.0, 0.0, 0.5, 0.01, 0.01).unwrap();
        assert_relative_eq!(doubled.equilibrium(0.0), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn equilibrium_is_decreasing_in_p_and_continuous_at_zero() {
        let params = ModelParams::new(1.3, 0.7, -0.8, 0.6, 0.01, 0.01).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..50 {
            let at_p = k as f64 / 50.0;
            let c = params.equilibrium(at_p);
            assert!(c < last, "equilibrium must strictly decrease in p");
            last = c;
        }
        let c0 = params.equilibrium(0.0);
        assert_relative_eq!(params.equilibrium(1e-12), c0, max_relative = 1e-10);
    }

    #[test]
    fn ou_coefficients_for_unit_parameters() {
        let params = ModelParams::new(1.0, 1.0, 0.0, 0.5, 0.01, 0.01).unwrap();
        let ou = params.ou_coefficients().unwrap();
        assert_eq!(ou.mu, 0.5);
        assert_eq!(ou.sigma, 1.0);
        assert_eq!(ou.stationary_variance, 1.0);
    }

    #[test]
    fn ou_coefficients_with_doubled_increment() {
        let params = ModelParams::new(2.0, 1.0, 0.0, 0.5, 0.01, 0.01).unwrap();
        let ou = params.ou_coefficients().unwrap();
        assert_relative_eq!(ou.mu, 0.25, max_relative = 1e-14);
        assert_relative_eq!(ou.sigma, 2.0, max_relative = 1e-14);
        assert_relative_eq!(ou.stationary_variance, 8.0, max_relative = 1e-14);
    }

    // Golden values cross-checked against a 40-digit evaluation of both
    // printed forms of mu and sigma.
    #[test]
    fn ou_coefficients_for_tcp_like_drift_with_sqrt_decrease() {
        let params = ModelParams::new(1.0, 0.5, -1.0, 0.5, 0.01, 0.01).unwrap();
        let ou = params.ou_coefficients().unwrap();
        assert_relative_eq!(ou.mu, 0.5952753944880748, max_relative = 1e-13);
        assert_relative_eq!(ou.sigma, 0.6299605249474366, max_relative = 1e-13);
        assert_relative_eq!(ou.stationary_variance, 1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn ou_coefficients_require_beta_below_one() {
        let err = ModelParams::tcp(0.01).unwrap().ou_coefficients().unwrap_err();
        assert_eq!(err, ParamError::BetaMustBeBelowOne(1.0));
    }

    #[test]
    fn ou_marginal_variance_saturates_to_stationary() {
        let ou = OuCoefficients {
            mu: 0.5,
            sigma: 1.0,
            stationary_variance: 1.0,
        };
        assert_eq!(ou.marginal_variance(0.0), 0.0);
        assert_relative_eq!(ou.marginal_variance(5.0), 1.0 - (-5.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(ou.marginal_variance(1e4), 1.0, max_relative = 1e-12);
    }
}
