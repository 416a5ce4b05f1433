//! Lundberg exponent machinery for the shot-noise ruin model.
//!
//! The model has premium rate `c`, shock arrival rate `rho`, intensity decay
//! rate `delta`, initial intensity `lambda0`, initial capital `u`, a claim
//! law `U` and a shock law `Y`. For a tilt parameter `r` the exponent pair is
//!
//! ```text
//! alpha(r) = (1 - M_U(r)) / delta
//! theta(r) = -c r + rho (M_Y(-alpha(r)) - 1)
//! ```
//!
//! `theta` is convex with `theta(0) = 0`; under the net profit condition its
//! slope at zero is negative, so a positive root `R` (the adjustment
//! coefficient) is the unique second zero when it exists. `R` drives the
//! exponential upper bound `exp(-alpha(R) lambda0 - R u)` for the ruin
//! probability and the change of measure used by the estimators.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

/// Absolute tolerance on `theta(R)` accepted by the root solver.
pub const THETA_ROOT_TOL: f64 = 1e-12;

/// Model parameters. Construction validates positivity of all rates and the
/// net profit condition `c > (rho/delta) E[U] E[Y]`; every downstream result
/// assumes it. Use [`ModelParams::new_without_net_profit_check`] to bypass
/// the profit check alone for exploratory runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    c: f64,
    rho: f64,
    delta: f64,
    lambda0: f64,
    u: f64,
    claim_dist: DistributionSpec,
    shock_dist: DistributionSpec,
}

impl ModelParams {
    pub fn new(
        c: f64,
        rho: f64,
        delta: f64,
        lambda0: f64,
        u: f64,
        claim_dist: DistributionSpec,
        shock_dist: DistributionSpec,
    ) -> Result<Self> {
        let params = Self::new_without_net_profit_check(c, rho, delta, lambda0, u, claim_dist, shock_dist)?;
        if !(params.net_profit_margin() > 0.0) {
            return Err(Error::NetProfit {
                c,
                required: rho / delta * claim_dist.mean() * shock_dist.mean(),
            });
        }
        Ok(params)
    }

    /// Same validation minus the net profit condition. Exploratory use only:
    /// the Lundberg machinery will refuse such configurations anyway.
    pub fn new_without_net_profit_check(
        c: f64,
        rho: f64,
        delta: f64,
        lambda0: f64,
        u: f64,
        claim_dist: DistributionSpec,
        shock_dist: DistributionSpec,
    ) -> Result<Self> {
        for (name, v) in [("c", c), ("rho", rho), ("delta", delta), ("lambda0", lambda0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "initial capital u must be nonnegative and finite, got {u}"
            )));
        }
        claim_dist.validate()?;
        shock_dist.validate()?;
        Ok(ModelParams { c, rho, delta, lambda0, u, claim_dist, shock_dist })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn claim_dist(&self) -> &DistributionSpec {
        &self.claim_dist
    }
    pub fn shock_dist(&self) -> &DistributionSpec {
        &self.shock_dist
    }

    /// Same model started from a different initial capital.
    pub fn with_u(&self, u: f64) -> Result<Self> {
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::InvalidParams(format!("u must be nonnegative, got {u}")));
        }
        Ok(ModelParams { u, ..*self })
    }

    /// Same model started from a different initial intensity.
    pub fn with_lambda0(&self, lambda0: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda0 must be positive, got {lambda0}")));
        }
        Ok(ModelParams { lambda0, ..*self })
    }

    /// `c - (rho/delta) E[U] E[Y]`: the long-run drift of the surplus, and
    /// the quantity the net profit condition requires to be positive.
    pub fn net_profit_margin(&self) -> f64 {
        self.c - self.rho / self.delta * self.claim_dist.mean() * self.shock_dist.mean()
    }

    /// Exact mean of the intensity at time `t`:
    /// `lambda0 e^{-delta t} + (rho/delta) E[Y] (1 - e^{-delta t})`.
    pub fn mean_intensity(&self, t: f64) -> f64 {
        let decay = (-self.delta * t).exp();
        self.lambda0 * decay + self.rho / self.delta * self.shock_dist.mean() * (1.0 - decay)
    }

    /// Exact mean of the surplus at time `t`.
    pub fn mean_surplus(&self, t: f64) -> f64 {
        let eu = self.claim_dist.mean();
        let ey = self.shock_dist.mean();
        let transient = (self.lambda0 / self.delta - self.rho * ey / (self.delta * self.delta))
            * (1.0 - (-self.delta * t).exp());
        self.u + self.c * t - eu * self.rho / self.delta * ey * t - eu * transient
    }

    /// Evaluator for the exponent pair of this model.
    pub fn exponent_curve(&self) -> ExponentCurve {
        ExponentCurve { params: *self }
    }
}

/// Evaluator for `alpha(r)`, `theta(r)`, `theta'(r)` and the adjustment
/// coefficient of a fixed model.
#[derive(Debug, Clone, Copy)]
pub struct ExponentCurve {
    params: ModelParams,
}

impl ExponentCurve {
    pub fn new(params: &ModelParams) -> Self {
        ExponentCurve { params: *params }
    }

    /// `alpha(r) = (1 - M_U(r)) / delta`. Returns `-inf` where the claim MGF
    /// diverges, which downstream evaluations propagate as `theta = +inf`.
    pub fn alpha(&self, r: f64) -> f64 {
        (1.0 - self.params.claim_dist.mgf(r)) / self.params.delta
    }

    /// `theta(r) = -c r + rho (M_Y(-alpha(r)) - 1)`. Returns `+inf` outside
    /// the admissible domain so that bracketing can probe freely.
    pub fn theta(&self, r: f64) -> f64 {
        let a = self.alpha(r);
        let my = self.params.shock_dist.mgf(-a);
        if !my.is_finite() {
            return f64::INFINITY;
        }
        -self.params.c * r + self.params.rho * (my - 1.0)
    }

    /// Analytic `theta'(r) = -c + (rho/delta) M_Y'(-alpha(r)) M_U'(r)`.
    pub fn theta_prime(&self, r: f64) -> Result<f64> {
        let mu_prime = self.params.claim_dist.mgf_prime(r)?;
        let a = self.alpha(r);
        let my_prime = self.params.shock_dist.mgf_prime(-a)?;
        Ok(-self.params.c + self.params.rho / self.params.delta * my_prime * mu_prime)
    }

    /// Solve `theta(R) = 0` for the positive root and certify the slack
    /// required by the change of measure.
    pub fn solve_adjustment(&self) -> Result<AdjustmentCoefficient> {
        solve_adjustment(&self.params)
    }
}

/// The adjustment coefficient and the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustmentCoefficient {
    /// Positive root of `theta`.
    pub r: f64,
    /// `alpha(R)`; negative, enters the bound through `exp(-alpha(R) lambda0)`.
    pub alpha_r: f64,
    /// `theta'(R)`; positive, the tilted surplus drifts at `-theta'(R)`.
    pub theta_prime_r: f64,
    /// A certified slack: both `M_U(R + eps)` and `M_Y(eps - alpha(R))` are
    /// finite at `eps = epsilon_slack`. Existence only, no maximality claim.
    pub epsilon_slack: f64,
}

impl AdjustmentCoefficient {
    /// Exponential upper bound `exp(-alpha(R) lambda0 - R u)` for the ruin
    /// probability from initial state `(u, lambda0)`.
    pub fn lundberg_bound(&self, u: f64, lambda0: f64) -> f64 {
        (-self.alpha_r * lambda0 - self.r * u).exp()
    }
}

/// Upper bound for the ruin probability of `params` at its own `(u, lambda0)`.
pub fn lundberg_bound(params: &ModelParams, adj: &AdjustmentCoefficient) -> f64 {
    adj.lundberg_bound(params.u(), params.lambda0())
}

/// Closed-form adjustment coefficient for exponential claims (rate `kappa`)
/// and exponential shocks (rate `mu`):
/// `R = (mu delta kappa c - rho) / ((1 + mu delta) c)`.
///
/// Serves as the independent oracle for [`solve_adjustment`] on this family.
pub fn closed_form_r_exp_exp(c: f64, rho: f64, delta: f64, mu: f64, kappa: f64) -> Result<f64> {
    for (name, v) in [("c", c), ("rho", rho), ("delta", delta), ("mu", mu), ("kappa", kappa)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
        }
    }
    // net profit condition for this family reduces to c > rho / (delta kappa mu)
    if !(c > rho / (delta * kappa * mu)) {
        return Err(Error::NetProfit { c, required: rho / (delta * kappa * mu) });
    }
    Ok((mu * delta * kappa * c - rho) / ((1.0 + mu * delta) * c))
}

/// Solve `theta(R) = 0` on `(0, r_sup)` where `r_sup` is the exit of the
/// admissible domain.
///
/// Strategy: `theta` is convex, vanishes at 0 and has negative slope there,
/// so the positive root is unique when it exists. The domain exit is located
/// by bisection on finiteness of `theta`; the first probe with a finite
/// positive value gives the upper bracket end, a geometric walk toward zero
/// gives the lower end, and safeguarded bisection plus one Newton polish
/// finishes to `|theta(R)| <= 1e-12`.
pub fn solve_adjustment(params: &ModelParams) -> Result<AdjustmentCoefficient> {
    if !(params.net_profit_margin() > 0.0) {
        return Err(Error::NetProfit {
            c: params.c(),
            required: params.rho() / params.delta() * params.claim_dist().mean() * params.shock_dist().mean(),
        });
    }
    let curve = params.exponent_curve();

    // A point where theta is finite, walking down from the claim-MGF scale.
    let claim_sup = params.claim_dist().mgf_sup();
    let scale = if claim_sup.is_finite() { claim_sup } else { 1.0 };
    let mut finite_pt = scale * 0.5;
    let mut tries = 0;
    while !curve.theta(finite_pt).is_finite() {
        finite_pt *= 0.5;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoRoot("theta is infinite arbitrarily close to r = 0".into()));
        }
    }

    // Find a finite point with theta > 0 by shrinking an (finite, infinite)
    // bracket around the domain exit; theta -> +inf at the exit whenever the
    // shock MGF explodes there, so the probe lands in (R, r_sup).
    let mut r_pos = None;
    if curve.theta(finite_pt) > 0.0 {
        r_pos = Some(finite_pt);
    } else {
        let mut infinite_pt = if claim_sup.is_finite() {
            claim_sup
        } else {
            // no claim-side exit: grow until theta turns positive or diverges
            let mut hi = finite_pt.max(1.0);
            loop {
                hi *= 2.0;
                let th = curve.theta(hi);
                if th > 0.0 && th.is_finite() {
                    r_pos = Some(hi);
                    break hi;
                }
                if !th.is_finite() {
                    break hi;
                }
                if hi > 1e12 {
                    return Err(Error::NoRoot(format!(
                        "theta stays negative up to r = {hi:.3e} with no domain exit; \
                         sign profile: theta({finite_pt:.6e}) = {:.6e}",
                        curve.theta(finite_pt)
                    )));
                }
            }
        };
        if r_pos.is_none() {
            for _ in 0..2000 {
                let mid = 0.5 * (finite_pt + infinite_pt);
                let th = curve.theta(mid);
                if th.is_finite() {
                    finite_pt = mid;
                    if th > 0.0 {
                        r_pos = Some(mid);
                        break;
                    }
                } else {
                    infinite_pt = mid;
                }
                if (infinite_pt - finite_pt) < f64::EPSILON * infinite_pt.max(1.0) {
                    break;
                }
            }
        }
    }
    let r_hi = r_pos.ok_or_else(|| {
        Error::NoRoot(format!(
            "theta < 0 on the whole admissible interval (0, {finite_pt:.12e}]; \
             theta at the last finite probe = {:.6e}",
            curve.theta(finite_pt)
        ))
    })?;

    // Lower bracket end: walk down geometrically until theta < 0.
    let mut r_lo = r_hi;
    let mut found_neg = false;
    for _ in 0..200 {
        r_lo *= 0.5;
        let th = curve.theta(r_lo);
        if th < 0.0 {
            found_neg = true;
            break;
        }
    }
    if !found_neg {
        return Err(Error::NoRoot(
            "theta is nonnegative arbitrarily close to 0; no sign change to bracket".into(),
        ));
    }

    // Safeguarded bisection on the sign change.
    let (mut lo, mut hi) = (r_lo, r_hi);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if curve.theta(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);

    // One Newton polish; theta' > 0 near the root, clamp inside the bracket.
    if let Ok(slope) = curve.theta_prime(root) {
        if slope > 0.0 {
            let candidate = root - curve.theta(root) / slope;
            if candidate > lo && candidate < hi {
                root = candidate;
            }
        }
    }

    let theta_at_root = curve.theta(root);
    if !(theta_at_root.abs() <= THETA_ROOT_TOL) {
        return Err(Error::Numerical(format!(
            "root polishing left theta({root:.16e}) = {theta_at_root:.3e}, above tolerance {THETA_ROOT_TOL:.0e}"
        )));
    }
    let alpha_r = curve.alpha(root);
    let theta_prime_r = curve.theta_prime(root)?;
    if !(alpha_r < 0.0) {
        return Err(Error::Numerical(format!("alpha(R) = {alpha_r} is not negative")));
    }
    if !(theta_prime_r > 0.0) {
        return Err(Error::Numerical(format!("theta'(R) = {theta_prime_r} is not positive")));
    }

    // Certify the slack: start from min(0.1 R, half the distance to the
    // nearest MGF boundary) and halve until both tilted MGFs are finite.
    let claim_gap = params.claim_dist().mgf_sup() - root;
    let shock_gap = params.shock_dist().mgf_sup() + alpha_r;
    let mut eps = (0.1 * root).min(0.5 * claim_gap.min(shock_gap));
    let mut certified = false;
    for _ in 0..60 {
        if eps > 0.0
            && params.claim_dist().mgf(root + eps).is_finite()
            && params.shock_dist().mgf(eps - alpha_r).is_finite()
        {
            certified = true;
            break;
        }
        eps *= 0.5;
    }
    if !certified {
        return Err(Error::Numerical(
            "could not certify a positive slack epsilon after 60 halvings".into(),
        ));
    }

    Ok(AdjustmentCoefficient { r: root, alpha_r, theta_prime_r, epsilon_slack: eps })
}
