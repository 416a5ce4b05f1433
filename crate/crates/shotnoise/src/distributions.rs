//! Positive jump laws with exact moment-generating-function algebra.
//!
//! Claims and intensity shocks are both described by a [`DistributionSpec`]:
//! a positive law that knows its MGF, the analytic MGF derivative, its mean,
//! how to sample itself, and how to tilt itself exponentially. The whole
//! exponent machinery works against this one abstraction, so adding a new law
//! (gamma, phase-type) only requires an MGF finite on an open interval
//! containing zero.
//!
//! MGF divergence is a value, not an error: `mgf` returns `f64::INFINITY` at
//! and beyond the domain boundary so that root finders can probe freely.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive jump law. Currently only the exponential law is shipped; the
/// method set below is the contract new laws must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Exponential law with the given rate; mean `1/rate`.
    Exponential { rate: f64 },
}

impl DistributionSpec {
    /// Validated exponential law.
    pub fn exponential(rate: f64) -> Result<Self> {
        let spec = DistributionSpec::Exponential { rate };
        spec.validate()?;
        Ok(spec)
    }

    /// Check parameter constraints. Deserialized specs must be validated
    /// before use; [`crate::config::ModelConfig::to_params`] does this.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "exponential rate must be positive and finite, got {rate}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Moment-generating function `E[exp(sZ)]`.
    ///
    /// Returns `f64::INFINITY` at and beyond the divergence boundary
    /// (`s >= rate` for the exponential law).
    pub fn mgf(&self, s: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if s < rate {
                    rate / (rate - s)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Supremum of the set where the MGF is finite.
    pub fn mgf_sup(&self) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => rate,
        }
    }

    /// Analytic derivative of the MGF, `E[Z exp(sZ)]`.
    ///
    /// Unlike [`mgf`](Self::mgf), this errors at the domain boundary: callers
    /// evaluate it only strictly inside the domain.
    pub fn mgf_prime(&self, s: f64) -> Result<f64> {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if s < rate {
                    Ok(rate / ((rate - s) * (rate - s)))
                } else {
                    Err(Error::MgfDomain(format!(
                        "mgf derivative of Exponential({rate}) requested at s = {s} >= rate"
                    )))
                }
            }
        }
    }

    /// Mean of the law; equals `mgf_prime(0)`.
    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => 1.0 / rate,
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
        }
    }

    /// Exponentially tilted law, with MGF `s -> mgf(s + xi) / mgf(xi)`.
    ///
    /// For the exponential law the tilt stays in the family: the rate drops
    /// by `xi`. Negative `xi` is allowed and increases the rate.
    pub fn exp_tilt(&self, xi: f64) -> Result<Self> {
        if !self.mgf(xi).is_finite() {
            return Err(Error::MgfDomain(format!(
                "cannot tilt {self:?} by xi = {xi}: MGF diverges there"
            )));
        }
        match *self {
            DistributionSpec::Exponential { rate } => DistributionSpec::exponential(rate - xi),
        }
    }

    /// Draw one value; strictly positive, reproducible given the stream state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => crate::rng::unit_exponential(rng) / rate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_stream;
    use crate::stats::mean_and_stderr;

    #[test]
    fn mgf_at_zero_is_exactly_one() {
        for rate in [0.25, 1.0, 3.5] {
            let d = DistributionSpec::exponential(rate).unwrap();
            assert_eq!(d.mgf(0.0), 1.0);
        }
    }

    #[test]
    fn mgf_matches_closed_form_inside_domain() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(d.mgf(0.5), 2.0);
        let d = DistributionSpec::exponential(2.0).unwrap();
        assert!((d.mgf(0.5) - 2.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn mgf_diverges_at_and_beyond_rate() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert!(d.mgf(1.0).is_infinite());
        assert!(d.mgf(2.0).is_infinite());
        assert!(d.mgf(0.999_999).is_finite());
    }

    #[test]
    fn mgf_prime_closed_forms() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(d.mgf_prime(0.0).unwrap(), 1.0);
        // kappa/(kappa - s)^2 at kappa = 1, s = 1/3 is 9/4
        assert!((d.mgf_prime(1.0 / 3.0).unwrap() - 2.25).abs() < 1e-14);
        let d2 = DistributionSpec::exponential(2.0).unwrap();
        assert_eq!(d2.mgf_prime(0.0).unwrap(), 0.5);
        assert!(d.mgf_prime(1.0).is_err());
        assert!(d.mgf_prime(1.5).is_err());
    }

    #[test]
    fn mean_agrees_with_mgf_prime_at_zero() {
        for rate in [0.1, 0.75, 1.0, 4.0] {
            let d = DistributionSpec::exponential(rate).unwrap();
            let rel = (d.mean() - d.mgf_prime(0.0).unwrap()).abs() / d.mean();
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn zero_tilt_is_identity() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(d.exp_tilt(0.0).unwrap(), d);
    }

    #[test]
    fn tilt_shifts_exponential_rate() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(d.exp_tilt(0.25).unwrap(), DistributionSpec::Exponential { rate: 0.75 });
        // negative tilt (as applied to shocks) raises the rate
        let tilted = d.exp_tilt(1.0 / 3.0).unwrap();
        match tilted {
            DistributionSpec::Exponential { rate } => assert!((rate - 2.0 / 3.0).abs() < 1e-15),
        }
    }

    #[test]
    fn tilt_at_or_beyond_boundary_errors() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        assert!(d.exp_tilt(1.0).is_err());
        assert!(d.exp_tilt(1.5).is_err());
    }

    #[test]
    fn tilted_mean_matches_weighted_sampling_oracle() {
        // E[Y exp(xi Y)] / M(xi) estimated by brute force must match the
        // tilted law's analytic mean.
        let d = DistributionSpec::exponential(1.0).unwrap();
        let xi = 1.0 / 3.0;
        let m = d.mgf(xi);
        let mut rng = replicate_stream(2024, 0);
        let weighted: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let y = d.sample(&mut rng);
                y * (xi * y).exp() / m
            })
            .collect();
        let (est, se) = mean_and_stderr(&weighted);
        let analytic = d.exp_tilt(xi).unwrap().mean();
        assert!((analytic - 1.5).abs() < 1e-15);
        assert!(
            (est - analytic).abs() <= 4.0 * se,
            "weighted-sample mean {est} +- {se} vs analytic {analytic}"
        );
    }

    #[test]
    fn sampling_is_reproducible_and_positive() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let mut a = replicate_stream(7, 3);
        let mut b = replicate_stream(7, 3);
        for _ in 0..100 {
            let xa = d.sample(&mut a);
            assert!(xa > 0.0);
            assert_eq!(xa, d.sample(&mut b));
        }
    }

    #[test]
    fn sample_mean_obeys_law_of_large_numbers() {
        let d = DistributionSpec::exponential(2.0).unwrap();
        let mut rng = replicate_stream(11, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
        let (m, se) = mean_and_stderr(&xs);
        assert!((m - 0.5).abs() <= 3.0 * se, "mean {m} +- {se} vs 0.5");
    }

    #[test]
    fn tilted_sample_mean_matches_tilted_law() {
        let d = DistributionSpec::exponential(1.0).unwrap().exp_tilt(0.25).unwrap();
        let mut rng = replicate_stream(13, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
        let (m, se) = mean_and_stderr(&xs);
        assert!((m - 4.0 / 3.0).abs() <= 3.0 * se, "mean {m} +- {se} vs 4/3");
    }

    #[test]
    fn empirical_mgf_matches_analytic_at_interior_points() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let mut rng = replicate_stream(17, 0);
        let ys: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
        for s in [-0.5, 0.25, 0.5] {
            let vals: Vec<f64> = ys.iter().map(|&y| (s * y).exp()).collect();
            let (m, se) = mean_and_stderr(&vals);
            let target = d.mgf(s);
            assert!(
                (m - target).abs() <= 4.0 * se,
                "empirical MGF at s = {s}: {m} +- {se} vs {target}"
            );
        }
    }

    #[test]
    fn invalid_rates_are_rejected() {
        assert!(DistributionSpec::exponential(0.0).is_err());
        assert!(DistributionSpec::exponential(-1.0).is_err());
        assert!(DistributionSpec::exponential(f64::NAN).is_err());
        assert!(DistributionSpec::exponential(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_is_zero_at_origin_and_increases() {
        let d = DistributionSpec::exponential(2.0).unwrap();
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert!((d.cdf(1.0) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!(d.cdf(100.0) <= 1.0);
    }

    #[test]
    fn json_round_trip_uses_kind_tag() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"kind":"exponential","rate":1.0}"#);
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // mgf(tilt(d, xi), s) * mgf(d, xi) = mgf(d, s + xi) on the domain
            #[test]
            fn tilt_mgf_identity(rate in 0.2f64..5.0, a in -0.9f64..0.9, b in -0.9f64..0.9) {
                let d = DistributionSpec::exponential(rate).unwrap();
                let xi = a * rate;
                let s = b * (rate - xi).min(rate);
                prop_assume!(xi < rate && s + xi < rate);
                let lhs = d.exp_tilt(xi).unwrap().mgf(s) * d.mgf(xi);
                let rhs = d.mgf(s + xi);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(),
                    "lhs {} vs rhs {}", lhs, rhs);
            }

            // tilt(tilt(d, a), b) = tilt(d, a + b)
            #[test]
            fn tilt_composition(rate in 0.2f64..5.0, fa in -0.5f64..0.5, fb in -0.4f64..0.4) {
                let d = DistributionSpec::exponential(rate).unwrap();
                let a = fa * rate;
                let b = fb * rate;
                prop_assume!(a + b < rate * 0.999 && a < rate * 0.999);
                let two_step = d.exp_tilt(a).unwrap().exp_tilt(b).unwrap();
                let one_step = d.exp_tilt(a + b).unwrap();
                let (DistributionSpec::Exponential { rate: r2 }, DistributionSpec::Exponential { rate: r1 }) =
                    (two_step, one_step);
                prop_assert!((r2 - r1).abs() <= 1e-12 * r1.abs());
            }

            #[test]
            fn samples_are_positive(rate in 0.1f64..10.0, seed: u64) {
                let d = DistributionSpec::exponential(rate).unwrap();
                let mut rng = replicate_stream(seed, 0);
                for _ in 0..64 {
                    prop_assert!(d.sample(&mut rng) > 0.0);
                }
            }
        }
    }
}
