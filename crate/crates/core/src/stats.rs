//! Empirical distributions and the statistics used to compare them:
//! Kolmogorov-Smirnov distances (two-sample and against a Normal law),
//! order-statistic Wasserstein-1, sample moments, and log-log rate fits.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum StatsError {
    #[error("sample set is empty")]
    EmptySample,
    #[error("sample contains a non-finite value {0}")]
    NonFiniteSample(f64),
    #[error("sample sizes differ ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("sample is degenerate for the requested statistic")]
    DegenerateSample,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("log-log fit requires strictly positive values, got {0}")]
    NonPositiveValue(f64),
}

/// A sorted sample set supporting CDF queries, distances, and moments.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

/// Sample moments: unbiased mean/variance, standardized central moments for
/// shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Least-squares line through `(log x, log y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl EmpiricalDistribution {
    /// Sorts and validates; every value must be finite and there must be at
    /// least one.
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if let Some(&bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(StatsError::NonFiniteSample(bad));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// The samples in ascending order.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Empirical CDF: fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.samples.partition_point(|&s| s <= x);
        idx as f64 / self.samples.len() as f64
    }

    /// Apply `f` to every sample and re-sort.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, StatsError> {
        Self::from_samples(self.samples.iter().map(|&x| f(x)).collect())
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Unbiased sample variance; needs `n >= 2`.
    pub fn variance(&self) -> Result<f64, StatsError> {
        let n = self.samples.len();
        if n < 2 {
            return Err(StatsError::DegenerateSample);
        }
        let mean = self.mean();
        let ss: f64 = self.samples.iter().map(|&x| (x - mean) * (x - mean)).sum();
        Ok(ss / (n - 1) as f64)
    }

    /// Mean, unbiased variance, skewness, and excess kurtosis. Fails with
    /// [`StatsError::DegenerateSample`] when the central second moment is
    /// zero (constant sample) or `n < 2`.
    pub fn moments(&self) -> Result<Moments, StatsError> {
        let n = self.samples.len();
        if n < 2 {
            return Err(StatsError::DegenerateSample);
        }
        let mean = self.mean();
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in &self.samples {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        let nf = n as f64;
        let variance = m2 / (nf - 1.0);
        m2 /= nf;
        m3 /= nf;
        m4 /= nf;
        if m2 == 0.0 {
            return Err(StatsError::DegenerateSample);
        }
        Ok(Moments {
            mean,
            variance,
            skewness: m3 / m2.powf(1.5),
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        })
    }
}

/// Exact two-sample Kolmogorov-Smirnov statistic: the sup-norm distance
/// between the two empirical CDFs, computed by a merged sweep over both
/// sorted sample sets (ties advance both pointers together).
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (a.samples(), b.samples());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // Whichever sample is exhausted first leaves a tail where the running
    // difference only shrinks toward |1 - 1| = 0, so no further sweep needed.
    d
}

/// Exact one-sample Kolmogorov-Smirnov statistic against `Normal(mean,
/// variance)`. The Normal CDF is evaluated to about 1e-15 absolute accuracy.
pub fn ks_vs_normal(a: &EmpiricalDistribution, mean: f64, variance: f64) -> f64 {
    assert!(
        variance > 0.0 && variance.is_finite(),
        "variance must be positive and finite, got {variance}"
    );
    let sd = variance.sqrt();
    let n = a.n() as f64;
    let mut d = 0.0f64;
    for (i, &x) in a.samples().iter().enumerate() {
        let f = normal_cdf((x - mean) / sd);
        // Taking both one-sided gaps at every index stays exact under ties.
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Exact Wasserstein-1 distance between two equal-size empirical laws:
/// the mean absolute difference of order statistics.
pub fn wasserstein1(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
) -> Result<f64, StatsError> {
    if a.n() != b.n() {
        return Err(StatsError::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let total: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x - y).abs())
        .sum();
    Ok(total / a.n() as f64)
}

/// Least-squares fit of `log y` against `log x`. Needs at least three points,
/// all strictly positive.
pub fn fit_rate(xs: &[f64], ys: &[f64]) -> Result<RateFit, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::SizeMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    for &v in xs.iter().chain(ys) {
        if !v.is_finite() || v <= 0.0 {
            return Err(StatsError::NonPositiveValue(v));
        }
    }
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateSample);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|&y| (y - my) * (y - my)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Standard normal CDF `Phi(x)`, absolute error below 1e-14.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Complementary error function via a power series for small arguments and a
/// continued fraction for the tail; both converge to full double precision
/// on their ranges.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Maclaurin series: `erf(x) = 2/sqrt(pi) · sum (-1)^n x^(2n+1) / (n! (2n+1))`.
/// For `|x| <= 2` the alternating terms lose well under a digit to
/// cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut coeff = x; // x^(2n+1) / n!
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        coeff *= -x2 / n;
        let term = coeff / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

/// Legendre continued fraction for the upper tail (`x > 2`):
/// `sqrt(pi) e^(x^2) erfc(x) = 1 / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x.max(TINY);
    let mut c = f;
    let mut d = 0.0f64;
    let mut a = 0.0f64;
    for _ in 0..500 {
        a += 0.5;
        // Partial numerators 1/2, 1, 3/2, ...; partial denominators all x.
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = d.recip();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dist(values: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(values.to_vec()).unwrap()
    }

    // Values from a 40-digit reference evaluation of Phi.
    #[test]
    fn normal_cdf_matches_reference_values() {
        let golden = [
            (-8.0, 6.220960574271784e-16),
            (-5.0, 2.866515718791939e-7),
            (-3.0, 0.0013498980316300946),
            (-1.96, 0.024997895148220435),
            (-1.0, 0.15865525393145705),
            (-0.5, 0.3085375387259869),
            (0.0, 0.5),
            (0.5, 0.6914624612740131),
            (1.0, 0.8413447460685429),
            (1.96, 0.9750021048517795),
            (3.0, 0.9986501019683699),
            (5.0, 0.9999997133484281),
            (8.0, 0.9999999999999993),
        ];
        for &(x, phi) in &golden {
            assert_abs_diff_eq!(normal_cdf(x), phi, epsilon = 1e-14);
        }
    }

    #[test]
    fn normal_cdf_is_monotone_and_symmetric() {
        let mut last = 0.0;
        for k in -400..=400 {
            let x = k as f64 / 40.0;
            let v = normal_cdf(x);
            assert!(v >= last);
            assert_abs_diff_eq!(v + normal_cdf(-x), 1.0, epsilon = 1e-14);
            last = v;
        }
    }

    #[test]
    fn ks_two_sample_identical_sets_is_zero() {
        let a = dist(&[3.0, 1.0, 2.0]);
        let b = dist(&[2.0, 3.0, 1.0]);
        assert_eq!(ks_two_sample(&a, &b), 0.0);
    }

    #[test]
    fn ks_two_sample_disjoint_point_masses_is_one() {
        assert_eq!(ks_two_sample(&dist(&[0.0]), &dist(&[1.0])), 1.0);
    }

    #[test]
    fn ks_two_sample_half_overlap() {
        // CDFs step at {1,2} and {1,3}; the largest gap is 1/2 on [2,3).
        assert_eq!(ks_two_sample(&dist(&[1.0, 2.0]), &dist(&[1.0, 3.0])), 0.5);
    }

    /// Brute-force oracle: evaluate both empirical CDFs at every breakpoint.
    fn ks_brute_force(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
        let mut points: Vec<f64> = a.samples().iter().chain(b.samples()).copied().collect();
        points.sort_by(f64::total_cmp);
        points
            .iter()
            .map(|&x| (a.cdf(x) - b.cdf(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_two_sample_matches_breakpoint_enumeration() {
        use rand::RngExt;
        let mut rng = crate::rng::RngStream::new(31, 0).rng();
        for trial in 0..200 {
            let n = 1 + (trial % 50);
            let m = 1 + ((trial * 7 + 3) % 50);
            // Draw from a small lattice so ties actually occur.
            let a = dist(&(0..n).map(|_| (rng.random::<f64>() * 8.0).floor()).collect::<Vec<_>>());
            let b = dist(&(0..m).map(|_| (rng.random::<f64>() * 8.0).floor()).collect::<Vec<_>>());
            assert_eq!(ks_two_sample(&a, &b), ks_brute_force(&a, &b), "trial {trial}");
        }
    }

    #[test]
    fn ks_vs_normal_single_point_at_the_mean() {
        assert_eq!(ks_vs_normal(&dist(&[5.0]), 5.0, 2.0), 0.5);
    }

    #[test]
    fn ks_vs_normal_large_normal_sample_is_small() {
        use rand::distr::Distribution;
        let mut rng = crate::rng::RngStream::new(1234, 0).rng();
        let normal = rand_distr::StandardNormal;
        let sample: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
        let d = ks_vs_normal(&dist(&sample), 0.0, 1.0);
        // 1% critical value for n = 10^4.
        assert!(d < 1.63 / 100.0, "KS statistic {d} too large for an iid Normal sample");
    }

    #[test]
    fn ks_vs_normal_huge_variance_approaches_one_half() {
        // With variance -> infinity the Normal CDF is ~1/2 everywhere, so the
        // statistic against any finite sample tends to 1/2. Checked against a
        // hand enumeration of the sweep on five points.
        let d = ks_vs_normal(&dist(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.0, 1e18);
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn wasserstein_identical_sets_is_zero() {
        let a = dist(&[1.0, 4.0, 2.0]);
        assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn wasserstein_point_masses() {
        assert_eq!(wasserstein1(&dist(&[0.0]), &dist(&[1.0])).unwrap(), 1.0);
    }

    #[test]
    fn wasserstein_sorted_matching_beats_the_other_matching() {
        // Brute force over both matchings of {0,0} to {1,3}: both cost 2.
        let got = wasserstein1(&dist(&[0.0, 0.0]), &dist(&[1.0, 3.0])).unwrap();
        assert_eq!(got, 2.0);
    }

    #[test]
    fn wasserstein_requires_equal_sizes() {
        let err = wasserstein1(&dist(&[1.0]), &dist(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, StatsError::SizeMismatch { left: 1, right: 2 });
    }

    #[test]
    fn moments_of_a_symmetric_pair() {
        let m = dist(&[-1.0, 1.0]).moments().unwrap();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.variance, 2.0); // unbiased
    }

    #[test]
    fn moments_of_one_to_four() {
        let m = dist(&[1.0, 2.0, 3.0, 4.0]).moments().unwrap();
        assert_relative_eq!(m.mean, 2.5, max_relative = 1e-15);
        assert_relative_eq!(m.variance, 5.0 / 3.0, max_relative = 1e-15);
        assert_abs_diff_eq!(m.skewness, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn constant_sample_has_zero_variance_but_no_shape() {
        let d = dist(&[2.5, 2.5, 2.5]);
        assert_eq!(d.variance().unwrap(), 0.0);
        assert_eq!(d.moments().unwrap_err(), StatsError::DegenerateSample);
    }

    #[test]
    fn empty_and_non_finite_samples_are_rejected() {
        assert_eq!(
            EmpiricalDistribution::from_samples(vec![]).unwrap_err(),
            StatsError::EmptySample
        );
        assert!(matches!(
            EmpiricalDistribution::from_samples(vec![1.0, f64::INFINITY]).unwrap_err(),
            StatsError::NonFiniteSample(_)
        ));
    }

    #[test]
    fn fit_rate_exact_identity() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let fit = fit_rate(&xs, &xs).unwrap();
        assert_relative_eq!(fit.slope, 1.0, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fit_rate_exact_square_root_law() {
        let xs = [1e-4, 1e-3, 1e-2, 1e-1];
        let ys: Vec<f64> = xs.iter().map(|&x: &f64| 3.7 * x.sqrt()).collect();
        let fit = fit_rate(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 0.5, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 3.7f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn fit_rate_recovers_slope_under_noise() {
        use rand::RngExt;
        let mut rng = crate::rng::RngStream::new(77, 0).rng();
        let xs: Vec<f64> = (0..30).map(|k| 10f64.powf(-4.0 + k as f64 / 10.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| 2.0 * x.powf(0.5) * (1.0 + 0.05 * (rng.random::<f64>() - 0.5)))
            .collect();
        let fit = fit_rate(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.05, "slope {}", fit.slope);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn fit_rate_input_validation() {
        assert_eq!(
            fit_rate(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            StatsError::TooFewPoints { needed: 3, got: 2 }
        );
        assert_eq!(
            fit_rate(&[1.0, 2.0, -3.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            StatsError::NonPositiveValue(-3.0)
        );
    }

    #[test]
    fn cdf_queries() {
        let d = dist(&[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.cdf(5.0), 1.0);
    }
}
