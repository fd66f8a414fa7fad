//! Mean-field equations of motion, traveltimes, baselines and regime
//! classification.
//!
//! The state is the half-separation `r` of the packet centers and the
//! momentum `p` of the packet at `+r`. The physical separation `d = 2|r|` is
//! canonically conjugate to `p` under the averaged Hamiltonian `E`, so
//!
//! ```text
//! dr/dt =  (1/2) dE/dp,    dp/dt = -(1/2) dE/dr
//! ```
//!
//! which reduces to `dr/dt = p/m` for free packets and to a classical pair
//! of reduced mass `m/2` and relative speed `2p/m` far from the collision.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meanfield::{analytic_gradient, avg_hamiltonian, grad_p, grad_r, EnergyBreakdown, PhaseState};
use crate::numerics::{integrate, rk4_step, Domain, Tolerances};
use crate::pairstate::PairConfig;

/// How the right-hand side obtains the energy gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// Central differences of the averaged Hamiltonian.
    #[default]
    Numeric,
    /// Closed-form derivatives, checked against the numeric ones in tests.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub r: Vector3<f64>,
    pub p: Vector3<f64>,
    pub sigma_t: f64,
    pub overlap: f64,
    pub energy: EnergyBreakdown,
}

impl Sample {
    pub fn separation(&self) -> f64 {
        2.0 * self.r.norm()
    }

    pub fn state(&self, config: PairConfig) -> PhaseState {
        PhaseState {
            r: self.r,
            p: self.p,
            t: self.t,
            config,
        }
    }
}

/// Time series of mean-field states, one sample per RK4 step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub config: PairConfig,
    pub dt: f64,
    pub t_max: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds at least the initial sample")
    }

    pub fn states(&self) -> impl Iterator<Item = PhaseState> + '_ {
        self.samples.iter().map(|s| s.state(self.config))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Return(f64),
    NoReturn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraveltimeResult {
    pub outcome: Outcome,
    pub d_init: f64,
    pub d_min: f64,
}

impl TraveltimeResult {
    pub fn time(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Return(t) => Some(t),
            Outcome::NoReturn => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Reflection at finite separation.
    ClassicalLike,
    /// Passage through coincidence.
    PassThroughLike,
    /// No return, with the separation staying below the packet width.
    Frozen,
    /// No return within the horizon, with the packets resolved.
    NoReturn,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::ClassicalLike => "classical",
            Regime::PassThroughLike => "passthrough",
            Regime::Frozen => "frozen",
            Regime::NoReturn => "noreturn",
        }
    }
}

/// Thresholds of the regime classifier, both relative to the packet width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyThresholds {
    /// Upper bound on `d / sigma_t` over the final quarter for `Frozen`.
    pub frozen_ratio: f64,
    /// Upper bound on `d_min / sigma` for a passage through coincidence.
    pub passthrough_ratio: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self {
            frozen_ratio: 1.0,
            passthrough_ratio: 0.1,
        }
    }
}

fn phase_derivative(state: &PhaseState, mode: GradientMode) -> Result<[f64; 6]> {
    let (gr, gp) = match mode {
        GradientMode::Numeric => (grad_r(state)?, grad_p(state)?),
        GradientMode::Analytic => analytic_gradient(state)?,
    };
    Ok([
        0.5 * gp.x,
        0.5 * gp.y,
        0.5 * gp.z,
        -0.5 * gr.x,
        -0.5 * gr.y,
        -0.5 * gr.z,
    ])
}

fn pack(r: &Vector3<f64>, p: &Vector3<f64>) -> [f64; 6] {
    [r.x, r.y, r.z, p.x, p.y, p.z]
}

fn unpack(y: &[f64; 6]) -> (Vector3<f64>, Vector3<f64>) {
    (Vector3::new(y[0], y[1], y[2]), Vector3::new(y[3], y[4], y[5]))
}

fn sample_of(state: &PhaseState) -> Result<Sample> {
    let energy = avg_hamiltonian(state)?;
    let snap = state.snapshot();
    Ok(Sample {
        t: state.t,
        r: state.r,
        p: state.p,
        sigma_t: snap.width,
        overlap: snap.overlap(),
        energy,
    })
}

/// RK4 integration from `initial.t` to `t_max` recording every step.
pub fn integrate_trajectory(initial: &PhaseState, dt: f64, t_max: f64) -> Result<Trajectory> {
    integrate_until(initial, dt, t_max, GradientMode::default(), |_| false)
}

/// Same as [`integrate_trajectory`] with a choice of gradient and an early
/// stop predicate evaluated on every new sample.
pub fn integrate_until(
    initial: &PhaseState,
    dt: f64,
    t_max: f64,
    mode: GradientMode,
    mut stop: impl FnMut(&Sample) -> bool,
) -> Result<Trajectory> {
    initial.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let span = t_max - initial.t;
    if !(span > dt && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "t_max must exceed the start time by more than dt (t_max = {t_max}, dt = {dt})"
        )));
    }
    // a final step shorter than a millionth of dt is merged into the previous one
    let steps = ((span / dt) - 1e-6).ceil().max(1.0) as usize;
    let config = initial.config;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(sample_of(initial)?);
    let mut y = pack(&initial.r, &initial.p);
    let mut t = initial.t;
    for k in 1..=steps {
        let t_next = if k == steps { t_max } else { initial.t + k as f64 * dt };
        let h = t_next - t;
        y = rk4_step(&y, t, h, |yy, tt| {
            let (r, p) = unpack(yy);
            phase_derivative(&PhaseState { r, p, t: tt, config }, mode)
        })?;
        t = t_next;
        let (r, p) = unpack(&y);
        let sample = sample_of(&PhaseState { r, p, t, config })?;
        let done = stop(&sample);
        samples.push(sample);
        if done {
            break;
        }
    }
    Ok(Trajectory {
        samples,
        config,
        dt,
        t_max,
    })
}

/// Streaming detector for the return to the initial separation.
///
/// Feed samples in order; the detector notes the first separation minimum
/// and then the first crossing of the initial separation.
#[derive(Debug, Clone)]
pub struct ReturnDetector {
    d_init: f64,
    t_start: f64,
    prev: Option<Sample>,
    d_min: f64,
    receding: bool,
    crossing: Option<f64>,
}

impl ReturnDetector {
    pub fn new(first: &Sample) -> Result<Self> {
        let inward = first.r.dot(&first.p);
        if !(inward < 0.0) {
            return Err(Error::MalformedTrajectory(
                "initial relative motion is not inward".into(),
            ));
        }
        Ok(Self {
            d_init: first.separation(),
            t_start: first.t,
            prev: Some(*first),
            d_min: first.separation(),
            receding: false,
            crossing: None,
        })
    }

    pub fn push(&mut self, s: &Sample) {
        if self.crossing.is_some() {
            return;
        }
        let prev = self.prev.replace(*s).expect("detector seeded with a sample");
        if !self.receding {
            self.d_min = self.d_min.min(segment_min_separation(&prev.r, &s.r));
        }
        let (d0, d1) = (prev.separation(), s.separation());
        if !self.receding && d1 > d0 {
            self.receding = true;
        }
        if self.receding && d1 >= self.d_init {
            let frac = if d1 > d0 { (self.d_init - d0) / (d1 - d0) } else { 1.0 };
            self.crossing = Some(prev.t + frac.clamp(0.0, 1.0) * (s.t - prev.t));
        }
    }

    pub fn returned(&self) -> bool {
        self.crossing.is_some()
    }

    pub fn result(&self) -> TraveltimeResult {
        TraveltimeResult {
            outcome: match self.crossing {
                Some(t) => Outcome::Return(t - self.t_start),
                None => Outcome::NoReturn,
            },
            d_init: self.d_init,
            d_min: self.d_min,
        }
    }
}

// Closest approach of the straight segment between two half-separations.
fn segment_min_separation(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let u = if len2 > 0.0 { (-a.dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    2.0 * (a + ab * u).norm()
}

/// Time needed to come back to the initial separation, measured from the
/// first sample.
pub fn traveltime(traj: &Trajectory) -> Result<TraveltimeResult> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::MalformedTrajectory("empty trajectory".into()))?;
    let mut detector = ReturnDetector::new(first)?;
    for s in &traj.samples[1..] {
        detector.push(s);
        if detector.returned() {
            break;
        }
    }
    Ok(detector.result())
}

pub fn classify(traj: &Trajectory, result: &TraveltimeResult) -> Regime {
    classify_with(traj, result, &ClassifyThresholds::default())
}

pub fn classify_with(traj: &Trajectory, result: &TraveltimeResult, th: &ClassifyThresholds) -> Regime {
    match result.outcome {
        Outcome::NoReturn => {
            let n = traj.samples.len();
            let tail = &traj.samples[(3 * n) / 4..];
            let merged = tail.iter().all(|s| s.separation() < th.frozen_ratio * s.sigma_t);
            if merged {
                Regime::Frozen
            } else {
                Regime::NoReturn
            }
        }
        Outcome::Return(t) => {
            let first = &traj.samples[0];
            let t_abs = first.t + t;
            let at_return = traj
                .samples
                .iter()
                .find(|s| s.t >= t_abs)
                .unwrap_or_else(|| traj.last());
            let reversed = at_return.p.dot(&first.p) < 0.0;
            if !reversed && result.d_min < th.passthrough_ratio * traj.config.sigma {
                Regime::PassThroughLike
            } else {
                Regime::ClassicalLike
            }
        }
    }
}

/// Point-charge traveltime for a pair of reduced mass `m/2` starting at
/// separation `d0` with inward relative speed `v0`.
pub fn classical_traveltime(d0: f64, v0: f64, coupling: f64) -> f64 {
    let tol = Tolerances::default();
    let energy = 0.25 * v0 * v0 + coupling / d0;
    if coupling > 0.0 {
        // d = d_min + u^2 removes the turning-point singularity
        let d_min = coupling / energy;
        let upper = (d0 - d_min).max(0.0).sqrt();
        let integral = integrate(|u: f64| (d_min + u * u).sqrt(), Domain::Interval { a: 0.0, b: upper }, &tol)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        2.0 / energy.sqrt() * integral
    } else {
        // d = u^2; attraction or free flight through coincidence
        let upper = d0.sqrt();
        integrate(
            |u: f64| 2.0 * u * u / (energy * u * u - coupling).sqrt(),
            Domain::Interval { a: 0.0, b: upper },
            &tol,
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    }
}

/// Traveltime of free flight through each other: `2 d0 / v0`.
pub fn free_traveltime(d0: f64, v0: f64) -> f64 {
    2.0 * d0 / v0
}

/// Relative speed of the pair for a per-packet momentum `p` (m = 1).
pub fn relative_speed(p: f64) -> f64 {
    2.0 * p
}

/// Template for momentum sweeps: the configuration fixes the width,
/// symmetry, coupling, spreading law and the initial half-separation; the
/// momentum is replaced by `-p * r0/|r0|` for each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub config: PairConfig,
    /// Step; defaults to `t_free / 1000` per grid point.
    pub dt: Option<f64>,
    /// Horizon; defaults to `50 t_free` per grid point.
    pub t_max: Option<f64>,
    pub mode: GradientMode,
    pub thresholds: ClassifyThresholds,
}

impl SweepSettings {
    pub fn new(config: PairConfig) -> Self {
        Self {
            config,
            dt: None,
            t_max: None,
            mode: GradientMode::default(),
            thresholds: ClassifyThresholds::default(),
        }
    }

    pub fn d_init(&self) -> f64 {
        2.0 * self.config.r0.norm()
    }

    /// Configuration for one grid point.
    pub fn config_for(&self, p: f64) -> Result<PairConfig> {
        let r0 = self.config.r0;
        if r0.norm() == 0.0 {
            return Err(Error::InvalidConfig("sweep needs a nonzero initial separation".into()));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidConfig(format!("sweep momentum must be positive, got {p}")));
        }
        let config = PairConfig {
            p0: -r0.normalize() * p,
            ..self.config
        };
        config.validate()?;
        Ok(config)
    }

    pub fn steps_for(&self, p: f64) -> (f64, f64) {
        let t_free = free_traveltime(self.d_init(), relative_speed(p));
        (self.dt.unwrap_or(t_free / 1000.0), self.t_max.unwrap_or(50.0 * t_free))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub p: f64,
    pub result: Result<TraveltimeResult>,
    pub regime: Option<Regime>,
    pub t_classical: f64,
    pub t_free: f64,
}

impl SweepRecord {
    pub fn t_coherent(&self) -> Option<f64> {
        self.result.as_ref().ok().and_then(|r| r.time())
    }
}

/// Trajectory for one sweep point, stopped once the return is detected.
pub fn sweep_trajectory(settings: &SweepSettings, p: f64) -> Result<(Trajectory, TraveltimeResult)> {
    let config = settings.config_for(p)?;
    let (dt, t_max) = settings.steps_for(p);
    let initial = PhaseState {
        r: config.r0,
        p: config.p0,
        t: config.t0,
        config,
    };
    let mut detector = ReturnDetector::new(&sample_of(&initial)?)?;
    let traj = integrate_until(&initial, dt, initial.t + t_max, settings.mode, |s| {
        detector.push(s);
        detector.returned()
    })?;
    Ok((traj, detector.result()))
}

pub fn sweep_point(settings: &SweepSettings, p: f64) -> SweepRecord {
    let d0 = settings.d_init();
    let v0 = relative_speed(p);
    let run = sweep_trajectory(settings, p);
    let (result, regime) = match run {
        Ok((traj, tt)) => {
            let regime = classify_with(&traj, &tt, &settings.thresholds);
            (Ok(tt), Some(regime))
        }
        Err(e) => (Err(e), None),
    };
    SweepRecord {
        p,
        result,
        regime,
        t_classical: classical_traveltime(d0, v0, settings.config.coupling),
        t_free: free_traveltime(d0, v0),
    }
}

/// One record per grid point, in grid order. `jobs = 1` runs serially;
/// larger values use a dedicated thread pool of that size.
pub fn sweep_traveltime(settings: &SweepSettings, grid: &[f64], jobs: usize) -> Result<Vec<SweepRecord>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("momentum grid is empty".into()));
    }
    if jobs <= 1 {
        return Ok(grid.iter().map(|&p| sweep_point(settings, p)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(|&p| sweep_point(settings, p)).collect()))
}

/// Final-state differences for steps `dt`, `dt/2`, `dt/4` over the same span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepHalving {
    /// Relative difference between the `dt` and `dt/2` final states.
    pub coarse: f64,
    /// Relative difference between the `dt/2` and `dt/4` final states.
    pub fine: f64,
}

impl StepHalving {
    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }
}

pub fn step_halving(initial: &PhaseState, dt: f64, t_max: f64, mode: GradientMode) -> Result<StepHalving> {
    let run = |h: f64| -> Result<[f64; 6]> {
        let traj = integrate_until(initial, h, t_max, mode, |_| false)?;
        let last = traj.last();
        Ok(pack(&last.r, &last.p))
    };
    let a = run(dt)?;
    let b = run(dt / 2.0)?;
    let c = run(dt / 4.0)?;
    let rel = |x: &[f64; 6], y: &[f64; 6]| {
        let diff: f64 = x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        diff / norm.max(1e-300)
    };
    Ok(StepHalving {
        coarse: rel(&a, &b),
        fine: rel(&b, &c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairstate::ExchangeSymmetry::*;

    fn head_on(sigma: f64, d0: f64, p: f64, symmetry: crate::pairstate::ExchangeSymmetry) -> PairConfig {
        PairConfig::new(sigma, Vector3::new(0.0, 0.0, 0.5 * d0), Vector3::new(0.0, 0.0, -p), symmetry).unwrap()
    }

    // closed form of the classical traveltime:
    // (2/sqrt(E)) [u sqrt(a + u^2) + a asinh(u / sqrt(a))] / 2 at u = sqrt(d0 - a)
    fn classical_closed_form(d0: f64, v0: f64, c: f64) -> f64 {
        let e = 0.25 * v0 * v0 + c / d0;
        let a = c / e;
        let u = (d0 - a).sqrt();
        (u * (a + u * u).sqrt() + a * (u / a.sqrt()).asinh()) / e.sqrt()
    }

    #[test]
    fn free_motion_is_linear() {
        let config = head_on(1.0, 10.0, 0.3, Distinguishable).with_coupling(0.0);
        let traj = integrate_trajectory(&PhaseState::initial(config), 0.01, 10.0).unwrap();
        assert_eq!(traj.samples.len(), 1001);
        for s in &traj.samples {
            let expected = config.r0 + config.p0 * s.t;
            assert!((s.r - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn free_traveltime_through_coincidence() {
        let config = head_on(1.0, 10.0, 0.5, Distinguishable).with_coupling(0.0);
        let traj = integrate_trajectory(&PhaseState::initial(config), 0.02, 40.0).unwrap();
        let tt = traveltime(&traj).unwrap();
        let expected = free_traveltime(10.0, relative_speed(0.5));
        assert!((tt.time().unwrap() - expected).abs() < 1e-9);
        assert!(tt.d_min < 1e-9);
        assert_eq!(classify(&traj, &tt), Regime::PassThroughLike);
    }

    #[test]
    fn outward_start_is_malformed() {
        let config = PairConfig::new(1.0, Vector3::new(0.0, 0.0, 5.0), Vector3::new(0.0, 0.0, 0.2), Symmetric).unwrap();
        let traj = integrate_trajectory(&PhaseState::initial(config), 0.1, 1.0).unwrap();
        assert!(matches!(traveltime(&traj), Err(Error::MalformedTrajectory(_))));
    }

    #[test]
    fn time_reversal_in_frozen_mode() {
        let config = head_on(1.0, 6.0, 0.4, Symmetric).frozen();
        let start = PhaseState::initial(config);
        let fwd = integrate_trajectory(&start, 0.01, 8.0).unwrap();
        let end = fwd.last();
        let back_start = PhaseState { r: end.r, p: -end.p, t: 0.0, config };
        let back = integrate_trajectory(&back_start, 0.01, 8.0).unwrap();
        let b = back.last();
        assert!((b.r - start.r).norm() < 1e-6);
        assert!((b.p + start.p).norm() < 1e-6);
    }

    #[test]
    fn frozen_energy_conserved() {
        for symmetry in [Symmetric, Antisymmetric, Distinguishable] {
            let config = head_on(1.0, 10.0, 0.3, symmetry).frozen();
            let traj = integrate_until(&PhaseState::initial(config), 0.05, 60.0, GradientMode::Numeric, |_| false).unwrap();
            let e0 = traj.samples[0].energy.total;
            let drift = traj
                .samples
                .iter()
                .map(|s| (s.energy.total - e0).abs() / e0.abs())
                .fold(0.0, f64::max);
            assert!(drift < 1e-6, "{symmetry:?}: {drift}");
        }
    }

    #[test]
    fn classical_baseline_matches_closed_form() {
        for &(d0, v0, c) in &[(10.0, 0.5, 1.0), (1.0, 0.1, 1.0), (1e7, 2.0 * (1.0f64 / 1e7).sqrt(), 1.0), (3.0, 2.0, 0.5)] {
            let got = classical_traveltime(d0, v0, c);
            let want = classical_closed_form(d0, v0, c);
            assert!(((got - want) / want).abs() < 1e-10, "{d0} {v0}: {got} vs {want}");
        }
        assert!((classical_traveltime(4.0, 0.5, 0.0) - free_traveltime(4.0, 0.5)).abs() < 1e-10);
    }

    #[test]
    fn classical_baseline_high_energy_and_monotone() {
        let d0: f64 = 10.0;
        // (1/2)(m/2) v0^2 = k e0^2 / d0; the excess over free flight decays
        // like (ln k)/k and is about 2% at k = 100
        let ratio = |k: f64| {
            let v0 = (4.0 * k / d0).sqrt();
            classical_traveltime(d0, v0, 1.0) / free_traveltime(d0, v0)
        };
        assert!((ratio(100.0) - 1.019_637_062_773).abs() < 1e-9, "{}", ratio(100.0));
        assert!((ratio(1000.0) - 1.0).abs() < 0.01);
        assert!(ratio(1000.0) < ratio(100.0));
        // decreasing once the kinetic energy exceeds the initial potential;
        // slower pairs turn around early and come back sooner
        let v_star = 2.0 / d0.sqrt();
        let grid: Vec<f64> = (0..=40).map(|i| v_star * (1.0 + 0.1 * i as f64)).collect();
        for w in grid.windows(2) {
            assert!(classical_traveltime(d0, w[1], 1.0) < classical_traveltime(d0, w[0], 1.0));
        }
        assert!(classical_traveltime(d0, 0.05, 1.0) < classical_traveltime(d0, 0.5, 1.0));
    }

    #[test]
    fn free_baseline() {
        assert_eq!(free_traveltime(1.0, 1.0), 2.0);
        assert_eq!(free_traveltime(3.0, 1.0), 3.0 * free_traveltime(1.0, 1.0));
        assert_eq!(free_traveltime(2.5, 0.7) * 0.7, 5.0);
    }

    #[test]
    fn single_point_sweep_matches_traveltime() {
        let config = head_on(1.0, 10.0, 0.0, Antisymmetric);
        let settings = SweepSettings::new(PairConfig { p0: Vector3::zeros(), ..config });
        let records = sweep_traveltime(&settings, &[0.6], 1).unwrap();
        assert_eq!(records.len(), 1);
        let (dt, t_max) = settings.steps_for(0.6);
        let full = integrate_trajectory(&PhaseState::initial(settings.config_for(0.6).unwrap()), dt, t_max).unwrap();
        let tt = traveltime(&full).unwrap();
        assert_eq!(records[0].t_coherent(), tt.time());
        assert_eq!(records[0].regime, Some(classify(&full, &tt)));
    }

    #[test]
    fn sweep_errors_are_captured() {
        let config = head_on(1.0, 10.0, 0.5, Symmetric);
        let settings = SweepSettings::new(config);
        let records = sweep_traveltime(&settings, &[-1.0, 0.8], 2).unwrap();
        assert!(records[0].result.is_err());
        assert!(records[1].result.is_ok());
        assert!(sweep_traveltime(&settings, &[], 1).is_err());
    }

    #[test]
    fn step_halving_is_fourth_order() {
        let config = head_on(1.0, 10.0, 0.4, Symmetric);
        let check = step_halving(&PhaseState::initial(config), 0.05, 20.0, GradientMode::Analytic).unwrap();
        assert!(check.coarse < 1e-6, "{check:?}");
        assert!((check.ratio() - 16.0).abs() < 0.3 * 16.0, "{}", check.ratio());
    }
}
