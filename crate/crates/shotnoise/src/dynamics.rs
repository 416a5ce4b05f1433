//! Exact event-driven simulation of the surplus/intensity process.
//!
//! The pair `(X_t, lambda_t)` evolves deterministically between jumps: the
//! surplus grows linearly at the premium rate while the intensity decays
//! exponentially. Shocks arrive at a constant Poisson rate and add a positive
//! jump to the intensity; claims arrive as a Cox process driven by the
//! intensity and subtract a positive jump from the surplus. Both jump times
//! are inverted in closed form, so paths carry no discretization error.
//!
//! The same engine runs the physical measure and any exponentially tilted
//! measure: tilting only changes the shock rate, the two jump laws and a
//! constant multiplier on the claim intensity.

use rand::Rng;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::exponent::ModelParams;
use crate::rng::unit_exponential;

/// Tolerance on `theta(r)` under which a tilted run may omit the horizon:
/// ruin is almost sure only at the adjustment coefficient, where `theta`
/// vanishes.
pub const TILT_ROOT_TOL: f64 = 1e-9;

/// Probability measure the paths are drawn under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Physical,
    /// Exponentially tilted measure with tilt parameter `r`.
    Tilted(f64),
}

/// Per-run simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub measure: Measure,
    /// Stop time. Required under the physical measure and under any tilt
    /// whose `theta(r)` is nonzero; may be `None` only where ruin is almost
    /// sure (tilt at the adjustment coefficient).
    pub horizon: Option<f64>,
    /// Master seed; replicate drivers derive one stream per replicate.
    pub seed: u64,
    /// Keep a per-event log on the result. Off by default: estimators only
    /// need the terminal state.
    pub record_events: bool,
    /// Hard cap on total events per path. Hitting it is an error, never
    /// silently truncated data.
    pub max_events: u64,
}

impl SimConfig {
    pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;

    pub fn physical(horizon: f64, seed: u64) -> Self {
        SimConfig {
            measure: Measure::Physical,
            horizon: Some(horizon),
            seed,
            record_events: false,
            max_events: Self::DEFAULT_MAX_EVENTS,
        }
    }

    /// Tilted run with no horizon; valid at the adjustment coefficient.
    pub fn tilted(r: f64, seed: u64) -> Self {
        SimConfig {
            measure: Measure::Tilted(r),
            horizon: None,
            seed,
            record_events: false,
            max_events: Self::DEFAULT_MAX_EVENTS,
        }
    }
}

/// Instantaneous state of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub t: f64,
    pub x: f64,
    pub lambda: f64,
    pub n_claims: u64,
    pub n_shocks: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Shock,
    Claim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    pub time: f64,
    pub kind: EventKind,
    pub size: f64,
}

/// Outcome of one simulated path.
///
/// Ruin is first passage of the surplus strictly below zero, so `ruined`
/// implies `x_tau < 0`. `integrated_intensity` accumulates the exact hazard
/// integral interval by interval; it must match the closed-form compensator
/// computed from the terminal state.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub ruined: bool,
    pub tau: Option<f64>,
    pub x_tau: Option<f64>,
    pub lambda_tau: Option<f64>,
    pub final_state: PathState,
    /// Exact `integral of lambda_s ds` accumulated during simulation.
    pub integrated_intensity: f64,
    /// Sum of all shock sizes on the path.
    pub shock_sum: f64,
    pub event_log: Option<Vec<PathEvent>>,
}

impl PathResult {
    /// Total number of jump events on the path.
    pub fn events(&self) -> u64 {
        self.final_state.n_claims + self.final_state.n_shocks
    }
}

/// A path plus the state observed at requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub result: PathResult,
    pub snapshots: Vec<PathState>,
}

/// The dynamics the engine actually runs: physical, or tilted with the jump
/// laws reweighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDynamics {
    pub premium_rate: f64,
    pub decay_rate: f64,
    /// Shock arrival rate (`rho` physically, `rho * M_Y(-alpha(r))` tilted).
    pub shock_rate: f64,
    pub shock_dist: DistributionSpec,
    /// Constant multiplier on the claim intensity (`1` physically,
    /// `M_U(r)` tilted): claims arrive at rate `multiplier * lambda_t`.
    pub claim_rate_multiplier: f64,
    pub claim_dist: DistributionSpec,
}

impl EffectiveDynamics {
    pub fn physical(params: &ModelParams) -> Self {
        EffectiveDynamics {
            premium_rate: params.c(),
            decay_rate: params.delta(),
            shock_rate: params.rho(),
            shock_dist: *params.shock_dist(),
            claim_rate_multiplier: 1.0,
            claim_dist: *params.claim_dist(),
        }
    }

    pub fn for_measure(params: &ModelParams, measure: Measure) -> Result<Self> {
        match measure {
            Measure::Physical => Ok(Self::physical(params)),
            Measure::Tilted(r) => {
                let alpha_r = params.exponent_curve().alpha(r);
                tilted_params(params, r, alpha_r)
            }
        }
    }

    /// Mean intensity at time `t` under these dynamics, started at `lambda0`.
    pub fn mean_intensity(&self, lambda0: f64, t: f64) -> f64 {
        let decay = (-self.decay_rate * t).exp();
        lambda0 * decay
            + self.shock_rate / self.decay_rate * self.shock_dist.mean() * (1.0 - decay)
    }
}

/// Dynamics of the model under the tilted measure with tilt `r`.
///
/// `alpha_r` must be `alpha(r)` for the same model; passing the solved value
/// avoids recomputing it against a slightly different root. The tilt scales
/// the shock rate by `M_Y(-alpha(r))`, tilts the shock law by `-alpha(r)`,
/// multiplies the claim intensity by `M_U(r)` and tilts the claim law by `r`;
/// premium and decay rates are unchanged.
pub fn tilted_params(params: &ModelParams, r: f64, alpha_r: f64) -> Result<EffectiveDynamics> {
    let m = params.claim_dist().mgf(r);
    if !m.is_finite() {
        return Err(Error::MgfDomain(format!("claim MGF diverges at tilt r = {r}")));
    }
    let shock_mgf = params.shock_dist().mgf(-alpha_r);
    if !shock_mgf.is_finite() {
        return Err(Error::MgfDomain(format!(
            "shock MGF diverges at -alpha(r) = {}",
            -alpha_r
        )));
    }
    Ok(EffectiveDynamics {
        premium_rate: params.c(),
        decay_rate: params.delta(),
        shock_rate: params.rho() * shock_mgf,
        shock_dist: params.shock_dist().exp_tilt(-alpha_r)?,
        claim_rate_multiplier: m,
        claim_dist: params.claim_dist().exp_tilt(r)?,
    })
}

/// Time offset of the next claim inside an inter-shock interval, inverting
/// the decaying hazard `multiplier * lambda e^{-delta w}` against a unit
/// exponential threshold `e`.
///
/// The total hazard remaining before the next shock is
/// `multiplier * lambda / delta`; if `e` exceeds it there is no claim in the
/// interval and `None` is returned.
pub fn next_claim_candidate(lambda: f64, delta: f64, multiplier: f64, e: f64) -> Option<f64> {
    let budget = delta * e / (multiplier * lambda);
    if budget < 1.0 {
        Some(-(-budget).ln_1p() / delta)
    } else {
        None
    }
}

/// Closed-form integrated compensator
/// `Lambda_t = (lambda0 + sum of shocks - lambda_t) / delta`,
/// equal to the exact hazard integral of a consistent path. A value below
/// `-1e-9` signals inconsistent inputs.
pub fn integrated_compensator(lambda0: f64, shock_sum: f64, lambda_t: f64, delta: f64) -> Result<f64> {
    let value = (lambda0 + shock_sum - lambda_t) / delta;
    if value < -1e-9 {
        return Err(Error::Numerical(format!(
            "integrated compensator is negative ({value:.3e}); path state is inconsistent"
        )));
    }
    Ok(value)
}

struct Engine<'a> {
    dynamics: &'a EffectiveDynamics,
    t: f64,
    x: f64,
    lambda: f64,
    integrated: f64,
    shock_sum: f64,
    n_claims: u64,
    n_shocks: u64,
    ruin: Option<(f64, f64, f64)>,
    log: Option<Vec<PathEvent>>,
    snap_times: &'a [f64],
    snap_idx: usize,
    snapshots: Vec<PathState>,
}

impl<'a> Engine<'a> {
    /// Move the continuous state to `t_new`, flushing any requested
    /// observation times passed on the way. Snapshot states are the
    /// pre-jump (continuous) values; jumps at exactly a snapshot time have
    /// probability zero under continuous jump laws.
    fn advance(&mut self, t_new: f64) {
        let delta = self.dynamics.decay_rate;
        let c = self.dynamics.premium_rate;
        while self.snap_idx < self.snap_times.len() && self.snap_times[self.snap_idx] <= t_new {
            let s = self.snap_times[self.snap_idx];
            let ds = s - self.t;
            self.snapshots.push(PathState {
                t: s,
                x: self.x + c * ds,
                lambda: self.lambda * (-delta * ds).exp(),
                n_claims: self.n_claims,
                n_shocks: self.n_shocks,
            });
            self.snap_idx += 1;
        }
        let dt = t_new - self.t;
        // exact hazard over the interval: lambda (1 - e^{-delta dt}) / delta
        self.integrated += self.lambda * (-(-delta * dt).exp_m1()) / delta;
        self.x += c * dt;
        self.lambda *= (-delta * dt).exp();
        self.t = t_new;
    }

    fn state(&self) -> PathState {
        PathState {
            t: self.t,
            x: self.x,
            lambda: self.lambda,
            n_claims: self.n_claims,
            n_shocks: self.n_shocks,
        }
    }
}

/// Simulate one path, observing the state at each of `snapshot_times`
/// (sorted ascending). With `stop_at_ruin` the path ends at first passage
/// below zero; otherwise it runs to the horizon and only records where ruin
/// first happened.
pub fn simulate_with_snapshots<R: Rng + ?Sized>(
    params: &ModelParams,
    cfg: &SimConfig,
    snapshot_times: &[f64],
    stop_at_ruin: bool,
    rng: &mut R,
) -> Result<SimOutput> {
    let dynamics = EffectiveDynamics::for_measure(params, cfg.measure)?;
    if cfg.horizon.is_none() {
        match cfg.measure {
            Measure::Physical => {
                return Err(Error::HorizonRequired(
                    "the physical measure does not make ruin certain; set a horizon".into(),
                ))
            }
            Measure::Tilted(r) => {
                let theta = params.exponent_curve().theta(r);
                if !(r > 0.0 && theta.abs() <= TILT_ROOT_TOL) {
                    return Err(Error::HorizonRequired(format!(
                        "tilt r = {r} has theta(r) = {theta:.3e}; ruin is almost sure only at \
                         the adjustment coefficient, set a horizon"
                    )));
                }
            }
        }
        if !stop_at_ruin {
            return Err(Error::InvalidConfig(
                "a run that continues past ruin needs a finite horizon".into(),
            ));
        }
    }
    if let Some(h) = cfg.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon must be positive and finite, got {h}")));
        }
    }
    if snapshot_times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("snapshot times must be sorted ascending".into()));
    }
    if let Some(&last) = snapshot_times.last() {
        if !(last >= 0.0 && last.is_finite()) {
            return Err(Error::InvalidConfig("snapshot times must be finite and nonnegative".into()));
        }
        if last > cfg.horizon.unwrap_or(f64::INFINITY) {
            return Err(Error::InvalidConfig("snapshot times must not exceed the horizon".into()));
        }
    }

    let horizon = cfg.horizon.unwrap_or(f64::INFINITY);
    let mut engine = Engine {
        dynamics: &dynamics,
        t: 0.0,
        x: params.u(),
        lambda: params.lambda0(),
        integrated: 0.0,
        shock_sum: 0.0,
        n_claims: 0,
        n_shocks: 0,
        ruin: None,
        log: cfg.record_events.then(Vec::new),
        snap_times: snapshot_times,
        snap_idx: 0,
        snapshots: Vec::with_capacity(snapshot_times.len()),
    };

    'sim: loop {
        let shock_time = engine.t + unit_exponential(rng) / dynamics.shock_rate;
        // claims inside the current inter-shock interval; a fresh unit
        // exponential per candidate is exact by memorylessness
        loop {
            let e = unit_exponential(rng);
            let claim_time = match next_claim_candidate(
                engine.lambda,
                dynamics.decay_rate,
                dynamics.claim_rate_multiplier,
                e,
            ) {
                Some(w) => engine.t + w,
                None => f64::INFINITY,
            };
            if horizon <= claim_time && horizon <= shock_time {
                engine.advance(horizon);
                break 'sim;
            }
            if claim_time <= shock_time {
                engine.advance(claim_time);
                let size = dynamics.claim_dist.sample(rng);
                engine.x -= size;
                engine.n_claims += 1;
                if let Some(log) = engine.log.as_mut() {
                    log.push(PathEvent { time: claim_time, kind: EventKind::Claim, size });
                }
                if engine.x < 0.0 && engine.ruin.is_none() {
                    engine.ruin = Some((engine.t, engine.x, engine.lambda));
                    if stop_at_ruin {
                        break 'sim;
                    }
                }
                if engine.n_claims + engine.n_shocks > cfg.max_events {
                    return Err(Error::MaxEventsExceeded { max_events: cfg.max_events, t: engine.t });
                }
            } else {
                engine.advance(shock_time);
                let size = dynamics.shock_dist.sample(rng);
                engine.lambda += size;
                engine.shock_sum += size;
                engine.n_shocks += 1;
                if let Some(log) = engine.log.as_mut() {
                    log.push(PathEvent { time: shock_time, kind: EventKind::Shock, size });
                }
                if engine.n_claims + engine.n_shocks > cfg.max_events {
                    return Err(Error::MaxEventsExceeded { max_events: cfg.max_events, t: engine.t });
                }
                break;
            }
        }
    }

    let (ruined, tau, x_tau, lambda_tau) = match engine.ruin {
        Some((tau, x, lambda)) => (true, Some(tau), Some(x), Some(lambda)),
        None => (false, None, None, None),
    };
    Ok(SimOutput {
        result: PathResult {
            ruined,
            tau,
            x_tau,
            lambda_tau,
            final_state: engine.state(),
            integrated_intensity: engine.integrated,
            shock_sum: engine.shock_sum,
            event_log: engine.log,
        },
        snapshots: engine.snapshots,
    })
}

/// Simulate one path, stopping at first passage below zero, at the horizon,
/// or erroring at the event cap.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &ModelParams,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<PathResult> {
    simulate_with_snapshots(params, cfg, &[], true, rng).map(|out| out.result)
}
