//! C ABI over the coherent-pair simulator.
//!
//! Pair configurations and trajectories are opaque handles created and freed
//! through this interface. Every fallible call returns a [`CpStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`cp_last_error`]. Panics are caught at the boundary and reported as
//! [`CpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use coherent_pair::dynamics::{
    classify, integrate_until, sweep_point, traveltime, GradientMode, Outcome, Regime, SweepSettings, Trajectory,
};
use coherent_pair::meanfield::{avg_hamiltonian, coulomb_bound, EnergyBreakdown, PhaseState};
use coherent_pair::observables::{detect, quadrupole_tensor, quadrupole_timeseries, SeriesKind};
use coherent_pair::pairstate::{ExchangeSymmetry, PairConfig};
use coherent_pair::Error;
use nalgebra::Vector3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    PreconditionViolated = 3,
    DegenerateState = 4,
    NonConvergence = 5,
    NonFinite = 6,
    MalformedTrajectory = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpSpin {
    Antiparallel = 0,
    Parallel = 1,
    Distinguishable = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpGradient {
    Numeric = 0,
    Analytic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpRegime {
    Classical = 0,
    PassThrough = 1,
    Frozen = 2,
    NoReturn = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpSeriesKind {
    Monotone = 0,
    Oscillatory = 1,
    Constant = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpEnergy {
    pub kinetic_classical: f64,
    pub kinetic_uncertainty: f64,
    pub kinetic_exchange: f64,
    pub coulomb_direct: f64,
    pub coulomb_exchange: f64,
    pub total: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpSample {
    pub t: f64,
    pub r: CpVec3,
    pub p: CpVec3,
    pub sigma_t: f64,
    pub overlap: f64,
    pub energy: CpEnergy,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpQuadrupole {
    pub d_xx: f64,
    pub d_yy: f64,
    pub d_zz: f64,
    pub d_xz: f64,
}

/// Traveltime of one sweep point; `t_coherent` is NaN when `returned` is
/// false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpSweepPoint {
    pub p: f64,
    pub returned: bool,
    pub t_coherent: f64,
    pub t_classical: f64,
    pub t_free: f64,
    pub regime: CpRegime,
}

/// Opaque pair configuration.
pub struct CpPair(PairConfig);

/// Opaque integrated trajectory.
pub struct CpTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> CpStatus {
    match err {
        Error::NonConvergence { .. } => CpStatus::NonConvergence,
        Error::NonFinite(_) => CpStatus::NonFinite,
        Error::DegenerateState => CpStatus::DegenerateState,
        Error::MalformedTrajectory(_) => CpStatus::MalformedTrajectory,
        Error::PreconditionViolated(_) => CpStatus::PreconditionViolated,
        Error::InvalidConfig(_) => CpStatus::InvalidConfig,
    }
}

struct Fail(CpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            CpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| Fail(CpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(Fail(CpStatus::NullPointer, format!("{what} is null")));
    }
    ptr.write(value);
    Ok(())
}

fn vec3(v: CpVec3) -> Vector3<f64> {
    Vector3::new(v.x, v.y, v.z)
}

fn cvec(v: &Vector3<f64>) -> CpVec3 {
    CpVec3 { x: v.x, y: v.y, z: v.z }
}

fn energy(e: &EnergyBreakdown) -> CpEnergy {
    CpEnergy {
        kinetic_classical: e.kinetic_classical,
        kinetic_uncertainty: e.kinetic_uncertainty,
        kinetic_exchange: e.kinetic_exchange,
        coulomb_direct: e.coulomb_direct,
        coulomb_exchange: e.coulomb_exchange,
        total: e.total,
    }
}

fn mode(g: CpGradient) -> GradientMode {
    match g {
        CpGradient::Numeric => GradientMode::Numeric,
        CpGradient::Analytic => GradientMode::Analytic,
    }
}

fn regime(r: Regime) -> CpRegime {
    match r {
        Regime::ClassicalLike => CpRegime::Classical,
        Regime::PassThroughLike => CpRegime::PassThrough,
        Regime::Frozen => CpRegime::Frozen,
        Regime::NoReturn => CpRegime::NoReturn,
    }
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length in
/// bytes, excluding the terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn cp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a pair of packets at the culmination moment `t = 0` with
/// half-separation `r0` and momentum `p0`.
///
/// # Safety
/// `out` must be valid for one pointer write. The handle is released with
/// [`cp_pair_free`].
#[no_mangle]
pub unsafe extern "C" fn cp_pair_new(
    sigma: f64,
    r0: CpVec3,
    p0: CpVec3,
    spin: CpSpin,
    coupling: f64,
    frozen_width: bool,
    out: *mut *mut CpPair,
) -> CpStatus {
    guard(|| {
        let symmetry = match spin {
            CpSpin::Antiparallel => ExchangeSymmetry::Symmetric,
            CpSpin::Parallel => ExchangeSymmetry::Antisymmetric,
            CpSpin::Distinguishable => ExchangeSymmetry::Distinguishable,
        };
        let mut config = PairConfig::new(sigma, vec3(r0), vec3(p0), symmetry)?.with_coupling(coupling);
        if frozen_width {
            config = config.frozen();
        }
        config.validate()?;
        PhaseState::initial(config).validate()?;
        write(out, Box::into_raw(Box::new(CpPair(config))), "out")
    })
}

/// # Safety
/// `pair` must be null or a handle from [`cp_pair_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_pair_free(pair: *mut CpPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Averaged Hamiltonian of the initial state.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_pair_energy(pair: *const CpPair, out: *mut CpEnergy) -> CpStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let e = avg_hamiltonian(&PhaseState::initial(pair.0))?;
        write(out, energy(&e), "out")
    })
}

/// Upper bound of the Coulomb energy over separations at width `sigma_x(t)`.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_pair_coulomb_bound(pair: *const CpPair, t: f64, out: *mut f64) -> CpStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        write(out, coulomb_bound(&pair.0, t), "out")
    })
}

/// Integrates the pair from `t = 0` to `t_max` with step `dt`.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for one pointer write. The
/// trajectory is released with [`cp_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn cp_simulate(
    pair: *const CpPair,
    dt: f64,
    t_max: f64,
    gradient: CpGradient,
    out: *mut *mut CpTrajectory,
) -> CpStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let traj = integrate_until(&PhaseState::initial(pair.0), dt, t_max, mode(gradient), |_| false)?;
        write(out, Box::into_raw(Box::new(CpTrajectory(traj))), "out")
    })
}

/// # Safety
/// `traj` must be null or a handle from [`cp_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_free(traj: *mut CpTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples, including the initial one.
///
/// # Safety
/// `traj` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_len(traj: *const CpTrajectory, out: *mut usize) -> CpStatus {
    guard(|| {
        let traj = deref(traj, "trajectory")?;
        write(out, traj.0.samples.len(), "out")
    })
}

unsafe fn sample_at<'a>(traj: *const CpTrajectory, index: usize) -> Result<(&'a CpTrajectory, usize), Fail> {
    let traj: &'a CpTrajectory = deref(traj, "trajectory")?;
    let n = traj.0.samples.len();
    if index >= n {
        return Err(Fail(CpStatus::OutOfRange, format!("sample index {index} out of range (len {n})")));
    }
    Ok((traj, index))
}

/// # Safety
/// `traj` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_sample(traj: *const CpTrajectory, index: usize, out: *mut CpSample) -> CpStatus {
    guard(|| {
        let (traj, i) = sample_at(traj, index)?;
        let s = &traj.0.samples[i];
        let sample = CpSample {
            t: s.t,
            r: cvec(&s.r),
            p: cvec(&s.p),
            sigma_t: s.sigma_t,
            overlap: s.overlap,
            energy: energy(&s.energy),
        };
        write(out, sample, "out")
    })
}

/// Quadrupole tensor at one sample; the configuration must lie in the x-z
/// plane.
///
/// # Safety
/// `traj` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_quadrupole(
    traj: *const CpTrajectory,
    index: usize,
    out: *mut CpQuadrupole,
) -> CpStatus {
    guard(|| {
        let (traj, i) = sample_at(traj, index)?;
        let d = quadrupole_tensor(&traj.0.samples[i].state(traj.0.config))?;
        write(
            out,
            CpQuadrupole {
                d_xx: d.d_xx,
                d_yy: d.d_yy,
                d_zz: d.d_zz,
                d_xz: d.d_xz,
            },
            "out",
        )
    })
}

/// Return time to the initial separation (NaN and `returned = false` when
/// the pair never comes back) and the regime label.
///
/// # Safety
/// `traj` must be a live handle; the out pointers must be valid for one
/// write each.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_traveltime(
    traj: *const CpTrajectory,
    returned: *mut bool,
    t_return: *mut f64,
    out_regime: *mut CpRegime,
) -> CpStatus {
    guard(|| {
        let traj = deref(traj, "trajectory")?;
        let result = traveltime(&traj.0)?;
        let r = regime(classify(&traj.0, &result));
        let (ok, t) = match result.outcome {
            Outcome::Return(t) => (true, t),
            Outcome::NoReturn => (false, f64::NAN),
        };
        write(returned, ok, "returned")?;
        write(t_return, t, "t_return")?;
        write(out_regime, r, "regime")
    })
}

/// Shape of the `d_zz` series over the whole trajectory.
///
/// # Safety
/// `traj` must be a live handle; the out pointers must be valid for one
/// write each.
#[no_mangle]
pub unsafe extern "C" fn cp_trajectory_quadrupole_verdict(
    traj: *const CpTrajectory,
    kind: *mut CpSeriesKind,
    extrema: *mut usize,
) -> CpStatus {
    guard(|| {
        let traj = deref(traj, "trajectory")?;
        let v = detect(&quadrupole_timeseries(&traj.0)?);
        let k = match v.kind {
            SeriesKind::MonotoneAfterTransient => CpSeriesKind::Monotone,
            SeriesKind::Oscillatory => CpSeriesKind::Oscillatory,
            SeriesKind::Constant => CpSeriesKind::Constant,
        };
        write(kind, k, "kind")?;
        write(extrema, v.extrema_count, "extrema")
    })
}

/// Head-on traveltime at momentum `p` toward the partner, with the default
/// step `t_free / 1000` and horizon `50 t_free`. The momentum stored in
/// `pair` is ignored.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_point(
    pair: *const CpPair,
    p: f64,
    gradient: CpGradient,
    out: *mut CpSweepPoint,
) -> CpStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let mut settings = SweepSettings::new(pair.0);
        settings.mode = mode(gradient);
        let rec = sweep_point(&settings, p);
        let result = rec.result?;
        let point = CpSweepPoint {
            p,
            returned: result.time().is_some(),
            t_coherent: result.time().unwrap_or(f64::NAN),
            t_classical: rec.t_classical,
            t_free: rec.t_free,
            regime: regime(rec.regime.expect("regime accompanies a successful result")),
        };
        write(out, point, "out")
    })
}
