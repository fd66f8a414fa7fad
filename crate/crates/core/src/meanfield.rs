//! Averaged Hamiltonian of the relative motion and its phase-space
//! gradients.
//!
//! The relative Hamiltonian is `p^2/m + e0^2/|r1 - r2|`, evaluated in the
//! normalized pair state. With `s` the current width, `r` and `p` the
//! half-separation and momentum, `g` the exchange sign and
//! `N^2 = exp(-r^2/s^2 - 4 s^2 p^2)`:
//!
//! ```text
//! kinetic    p^2 + 3/(8 s^2) - g N^2 (p^2 + r^2/(4 s^4)) / (1 + g N^2)
//! direct     e0^2 erf(|r|/s) / (2|r|)
//! exchange   g e0^2 (X - N^2 V) / (1 + g N^2),  X = e^{-r^2/s^2} F(2|p|s)/(2|p|s sqrt(pi) s)
//! ```
//!
//! where `V` is the direct value without the coupling and `F` is Dawson's
//! integral.

use nalgebra::Vector3;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{central_gradient, dawson_over_x, erf_over_x, Tolerances};
use crate::pairstate::{ExchangeSymmetry, PairConfig, PairSnapshot};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Mean-field canonical pair at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    /// Half-separation of the packet centers.
    pub r: Vector3<f64>,
    pub p: Vector3<f64>,
    pub t: f64,
    pub config: PairConfig,
}

impl PhaseState {
    /// The state described by the configuration at its culmination moment.
    pub fn initial(config: PairConfig) -> Self {
        Self {
            r: config.r0,
            p: config.p0,
            t: config.t0,
            config,
        }
    }

    pub fn width(&self) -> f64 {
        self.config.width_at(self.t)
    }

    pub fn snapshot(&self) -> PairSnapshot {
        PairSnapshot::new(self.width(), self.r, self.p, self.config.symmetry)
    }

    pub fn with_phase(&self, r: Vector3<f64>, p: Vector3<f64>) -> Self {
        Self { r, p, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let finite = self.r.iter().chain(self.p.iter()).all(|v| v.is_finite()) && self.t.is_finite();
        if !finite {
            return Err(Error::NonFinite("phase state"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub kinetic_classical: f64,
    pub kinetic_uncertainty: f64,
    pub kinetic_exchange: f64,
    pub coulomb_direct: f64,
    pub coulomb_exchange: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn kinetic(&self) -> f64 {
        self.kinetic_classical + self.kinetic_uncertainty + self.kinetic_exchange
    }

    pub fn coulomb(&self) -> f64 {
        self.coulomb_direct + self.coulomb_exchange
    }
}

/// `<1/|r1 - r2|>` for the direct product: relative coordinate centered at
/// `2r` with per-axis variance `2 s^2`.
pub(crate) fn direct_potential(r: f64, s: f64) -> f64 {
    erf_over_x(r / s) / (2.0 * s)
}

/// Exchange Coulomb integral `<a(1) b(2)| 1/|r1 - r2| |b(1) a(2)>`.
pub(crate) fn exchange_potential(r: f64, p: f64, s: f64) -> f64 {
    (-(r * r) / (s * s)).exp() * dawson_over_x(2.0 * p * s) * FRAC_1_SQRT_PI / s
}

pub fn energy(snapshot: &PairSnapshot, coupling: f64) -> Result<EnergyBreakdown> {
    let s = snapshot.width;
    let s2 = s * s;
    let r2 = snapshot.r.norm_squared();
    let p2 = snapshot.p.norm_squared();
    let g = snapshot.symmetry.sign();
    let denom = snapshot.norm_factor()?;
    let v_direct = direct_potential(r2.sqrt(), s);

    let kinetic_classical = p2;
    let kinetic_uncertainty = 3.0 / (8.0 * s2);
    let coulomb_direct = coupling * v_direct;
    let (kinetic_exchange, coulomb_exchange) = if snapshot.symmetry == ExchangeSymmetry::Distinguishable {
        (0.0, 0.0)
    } else {
        let n2 = (-snapshot.overlap_exponent()).exp();
        let kin = -g * n2 * (p2 + r2 / (4.0 * s2 * s2)) / denom;
        let x = exchange_potential(r2.sqrt(), p2.sqrt(), s);
        (kin, g * coupling * (x - n2 * v_direct) / denom)
    };
    let total = kinetic_classical + kinetic_uncertainty + kinetic_exchange + coulomb_direct + coulomb_exchange;
    let out = EnergyBreakdown {
        kinetic_classical,
        kinetic_uncertainty,
        kinetic_exchange,
        coulomb_direct,
        coulomb_exchange,
        total,
    };
    if !out.total.is_finite() {
        return Err(Error::NonFinite("averaged Hamiltonian"));
    }
    Ok(out)
}

pub fn avg_hamiltonian(state: &PhaseState) -> Result<EnergyBreakdown> {
    energy(&state.snapshot(), state.config.coupling)
}

fn total_at(state: &PhaseState, r: Vector3<f64>, p: Vector3<f64>) -> Result<f64> {
    avg_hamiltonian(&state.with_phase(r, p)).map(|e| e.total)
}

/// Central-difference gradient of the total energy with respect to `r`.
pub fn grad_r(state: &PhaseState) -> Result<Vector3<f64>> {
    grad_r_with(state, &Tolerances::default())
}

/// Central-difference gradient of the total energy with respect to `p`.
pub fn grad_p(state: &PhaseState) -> Result<Vector3<f64>> {
    grad_p_with(state, &Tolerances::default())
}

pub fn grad_r_with(state: &PhaseState, tol: &Tolerances) -> Result<Vector3<f64>> {
    let g = central_gradient(|x| total_at(state, Vector3::from(*x), state.p), &state.r.into(), tol)?;
    Ok(Vector3::from(g))
}

pub fn grad_p_with(state: &PhaseState, tol: &Tolerances) -> Result<Vector3<f64>> {
    let g = central_gradient(|x| total_at(state, state.r, Vector3::from(*x)), &state.p.into(), tol)?;
    Ok(Vector3::from(g))
}

/// Analytic gradients `(dE/dr, dE/dp)` of the total energy.
pub fn analytic_gradient(state: &PhaseState) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let snap = state.snapshot();
    let c = state.config.coupling;
    let s = snap.width;
    let s2 = s * s;
    let r_vec = snap.r;
    let p_vec = snap.p;
    let r = r_vec.norm();
    let p = p_vec.norm();
    let r2 = r * r;
    let p2 = p * p;

    // everything below is differentiated with respect to r^2 and p^2
    let v = direct_potential(r, s);
    let dv_dr2 = if r < 1e-6 * s {
        -FRAC_1_SQRT_PI / (3.0 * s2 * s)
    } else {
        let xr = r / s;
        (FRAC_1_SQRT_PI * (-xr * xr).exp() / s - v) / (2.0 * r2)
    };
    let mut de_dr2 = c * dv_dr2;
    let mut de_dp2 = 1.0;

    if snap.symmetry != ExchangeSymmetry::Distinguishable {
        let g = snap.symmetry.sign();
        let u = snap.overlap_exponent();
        let n2 = (-u).exp();
        let denom = snap.norm_factor()?;
        let dn2_dr2 = -n2 / s2;
        let dn2_dp2 = -4.0 * s2 * n2;
        let dden_dr2 = g * dn2_dr2;
        let dden_dp2 = g * dn2_dp2;

        // kinetic exchange: -g N^2 K / D, K = p2 + r2/(4 s^4)
        let k = p2 + r2 / (4.0 * s2 * s2);
        let kin = |dn2: f64, dk: f64, dden: f64| -g * ((dn2 * k + n2 * dk) * denom - n2 * k * dden) / (denom * denom);
        de_dr2 += kin(dn2_dr2, 1.0 / (4.0 * s2 * s2), dden_dr2);
        de_dp2 += kin(dn2_dp2, 1.0, dden_dp2);

        // coulomb exchange: g c (X - N^2 V) / D
        let q = 2.0 * p * s;
        let fq = dawson_over_x(q);
        let e_r = (-r2 / s2).exp();
        let x = e_r * fq * FRAC_1_SQRT_PI / s;
        let dx_dr2 = -x / s2;
        // d(F(q)/q)/d(q^2), using F' = 1 - 2qF
        let dfq_dq2 = if q < 1e-4 {
            -2.0 / 3.0 + 8.0 * q * q / 15.0
        } else {
            let f = fq * q;
            ((1.0 - 2.0 * q * f) * q - f) / (2.0 * q * q * q)
        };
        let dx_dp2 = e_r * FRAC_1_SQRT_PI / s * dfq_dq2 * 4.0 * s2;
        let num = x - n2 * v;
        let dnum_dr2 = dx_dr2 - dn2_dr2 * v - n2 * dv_dr2;
        let dnum_dp2 = dx_dp2 - dn2_dp2 * v;
        de_dr2 += g * c * (dnum_dr2 * denom - num * dden_dr2) / (denom * denom);
        de_dp2 += g * c * (dnum_dp2 * denom - num * dden_dp2) / (denom * denom);
    }
    let gr = r_vec * (2.0 * de_dr2);
    let gp = p_vec * (2.0 * de_dp2);
    if gr.iter().chain(gp.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("analytic gradient"));
    }
    Ok((gr, gp))
}

/// Upper bound of the Coulomb part over half-separations at fixed momentum.
///
/// Scans `|r|` over `[0, 10 s]` along the configuration's axis and refines
/// the best bracket by golden-section search.
pub fn coulomb_bound(config: &PairConfig, t: f64) -> f64 {
    if config.coupling == 0.0 {
        return 0.0;
    }
    let s = config.width_at(t);
    let axis = if config.r0.norm() > 0.0 {
        config.r0.normalize()
    } else {
        Vector3::z()
    };
    let value = |a: f64| -> f64 {
        let snap = PairSnapshot::new(s, axis * a, config.p0, config.symmetry);
        match energy(&snap, config.coupling) {
            Ok(e) => e.coulomb(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    const SCAN: usize = 400;
    let h = 10.0 * s / SCAN as f64;
    let samples: Vec<f64> = (0..=SCAN).map(|i| value(i as f64 * h)).collect();
    let (best, _) = samples
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut lo = best.saturating_sub(1) as f64 * h;
    let mut hi = (best + 1).min(SCAN) as f64 * h;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (value(x1), value(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        }
    }
    samples[best].max(f1).max(f2)
}

/// Sanity helper used by tests: the coincident symmetric Coulomb value.
pub fn coincident_coulomb(sigma: f64) -> f64 {
    1.0 / (PI.sqrt() * sigma)
}
