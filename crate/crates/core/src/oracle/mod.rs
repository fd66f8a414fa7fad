//! Brute-force verifiers for the closed forms of the other modules.
//!
//! Everything here is computed by quadrature on the per-axis packet
//! factors of [`Packet::axis_amplitude`]; none of the closed-form code paths
//! is called. Matrix elements between two packets factor over the Cartesian
//! axes, so each three-dimensional integral is a product of one-dimensional
//! quadratures.

mod coulomb;
mod spreading;
pub mod suite;

pub use coulomb::{oracle_coulomb, oracle_coulomb_terms};
pub use spreading::oracle_spreading;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::meanfield::{avg_hamiltonian, PhaseState};
use crate::numerics::{integrate, Domain, Tolerances};
use crate::observables::quadrupole_matrix;
use crate::pairstate::{ExchangeSymmetry, PairConfig, PairSnapshot};
use crate::wavepacket::{kinetic_energy, Packet, PacketParams};

const REL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
    pub nodes_used: usize,
    /// False when the check does not apply to the configuration; the
    /// values are then meaningless.
    pub applicable: bool,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, analytic: f64, numeric: f64, nodes_used: usize) -> Self {
        Self {
            quantity: quantity.into(),
            analytic,
            numeric,
            rel_err: rel_err(analytic, numeric),
            nodes_used,
            applicable: true,
        }
    }

    pub fn not_applicable(quantity: impl Into<String>) -> Self {
        Self {
            quantity: quantity.into(),
            analytic: f64::NAN,
            numeric: f64::NAN,
            rel_err: 0.0,
            nodes_used: 0,
            applicable: false,
        }
    }
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / numeric.abs().max(REL_FLOOR)
}

pub(crate) fn oracle_tolerances() -> Tolerances {
    Tolerances::default().with_rel_tol(1e-13)
}

/// One-dimensional matrix elements `<f| O |h>` along one axis.
#[derive(Debug, Clone, Copy)]
struct AxisElements {
    /// `<f|h>`, `<f|x|h>`, `<f|x^2|h>`
    moment: [Complex64; 3],
    /// `<f| -i d/dx |h>`
    momentum: Complex64,
    /// `<f| -d^2/dx^2 |h>` as `int (f')* h'`
    momentum_sq: Complex64,
}

/// Eighth-order central difference of an axis factor.
fn axis_derivative(packet: &Packet, axis: usize, x: f64) -> Complex64 {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let h = 0.02 * packet.width;
    let f = |d: f64| packet.axis_amplitude(axis, x + d);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, w) in W.iter().enumerate() {
        let d = (k + 1) as f64 * h;
        acc += (f(d) - f(-d)) * *w;
    }
    acc / h
}

/// `floor` is the absolute tolerance, needed when the integral vanishes by
/// symmetry.
fn axis_integral(
    f: impl Fn(f64) -> Complex64,
    center: f64,
    scale: f64,
    floor: f64,
    nodes: &mut usize,
) -> Result<Complex64> {
    let tol = oracle_tolerances().with_abs_tol(floor);
    let out = integrate(f, Domain::RealLine { center, scale }, &tol)?;
    *nodes += out.nodes;
    Ok(out.value)
}

impl AxisElements {
    fn compute(f: &Packet, h: &Packet, axis: usize, nodes: &mut usize) -> Result<Self> {
        let center = 0.5 * (f.center[axis] + h.center[axis]);
        let scale = f.width.max(h.width) + 0.5 * (f.center[axis] - h.center[axis]).abs();
        let pair = |x: f64| f.axis_amplitude(axis, x).conj() * h.axis_amplitude(axis, x);
        let reach = center.abs() + scale;
        let inv_width = 1.0 / f.width.min(h.width) + f.momentum[axis].abs().max(h.momentum[axis].abs());
        let mut moment = [Complex64::new(0.0, 0.0); 3];
        for (k, m) in moment.iter_mut().enumerate() {
            let floor = 1e-14 * reach.powi(k as i32);
            *m = axis_integral(|x| pair(x) * x.powi(k as i32), center, scale, floor, nodes)?;
        }
        let momentum = axis_integral(
            |x| f.axis_amplitude(axis, x).conj() * axis_derivative(h, axis, x) * Complex64::new(0.0, -1.0),
            center,
            scale,
            1e-13 * inv_width,
            nodes,
        )?;
        let momentum_sq = axis_integral(
            |x| axis_derivative(f, axis, x).conj() * axis_derivative(h, axis, x),
            center,
            scale,
            1e-13 * inv_width * inv_width,
            nodes,
        )?;
        Ok(Self {
            moment,
            momentum,
            momentum_sq,
        })
    }
}

/// Three-dimensional matrix elements between two packets.
#[derive(Debug, Clone, Copy)]
struct Elements {
    axes: [AxisElements; 3],
}

impl Elements {
    fn compute(f: &Packet, h: &Packet, nodes: &mut usize) -> Result<Self> {
        Ok(Self {
            axes: [
                AxisElements::compute(f, h, 0, nodes)?,
                AxisElements::compute(f, h, 1, nodes)?,
                AxisElements::compute(f, h, 2, nodes)?,
            ],
        })
    }

    fn product_except(&self, skip: &[usize]) -> Complex64 {
        (0..3)
            .filter(|k| !skip.contains(k))
            .map(|k| self.axes[k].moment[0])
            .product()
    }

    fn overlap(&self) -> Complex64 {
        self.product_except(&[])
    }

    fn second_moment(&self, a: usize, b: usize) -> Complex64 {
        if a == b {
            self.axes[a].moment[2] * self.product_except(&[a])
        } else {
            self.axes[a].moment[1] * self.axes[b].moment[1] * self.product_except(&[a, b])
        }
    }

    fn momentum(&self) -> [Complex64; 3] {
        [0, 1, 2].map(|k| self.axes[k].momentum * self.product_except(&[k]))
    }

    fn momentum_sq(&self) -> Complex64 {
        (0..3).map(|k| self.axes[k].momentum_sq * self.product_except(&[k])).sum()
    }
}

/// Elements `<a|.|a>`, `<b|.|b>` and `<a|.|b>` for the two packets of a pair.
struct PairElements {
    aa: Elements,
    bb: Elements,
    ab: Elements,
    g: f64,
    nodes: usize,
}

impl PairElements {
    fn compute(snapshot: &PairSnapshot) -> Result<Self> {
        let (a, b) = (snapshot.first(), snapshot.second());
        let mut nodes = 0;
        Ok(Self {
            aa: Elements::compute(&a, &a, &mut nodes)?,
            bb: Elements::compute(&b, &b, &mut nodes)?,
            ab: Elements::compute(&a, &b, &mut nodes)?,
            g: snapshot.symmetry.sign(),
            nodes,
        })
    }

    /// `<Psi|Psi>` of `a(1)b(2) + g b(1)a(2)` divided by two.
    fn half_norm(&self) -> f64 {
        let direct = (self.aa.overlap() * self.bb.overlap()).re;
        direct + self.g * self.ab.overlap().norm_sqr()
    }
}

/// Overlap `|<a|b>|` of the mirrored packets at time `t`.
pub fn oracle_overlap(config: &PairConfig, t: f64) -> Result<OracleReport> {
    let snap = config.snapshot(t);
    let (a, b) = (snap.first(), snap.second());
    let mut nodes = 0;
    let numeric = Elements::compute(&a, &b, &mut nodes)?.overlap().norm();
    Ok(OracleReport::new("overlap", snap.overlap(), numeric, nodes))
}

/// Norm of the normalized pair state; the closed-form normalization should
/// make it one.
pub fn oracle_pair_norm(state: &PhaseState) -> Result<OracleReport> {
    let snap = state.snapshot();
    let el = PairElements::compute(&snap)?;
    let numeric = if snap.symmetry == ExchangeSymmetry::Distinguishable {
        (el.aa.overlap() * el.bb.overlap()).re
    } else {
        el.half_norm() / snap.norm_factor()?
    };
    Ok(OracleReport::new("pair_norm", 1.0, numeric, el.nodes))
}

/// One-particle density at `point` from the separable two-particle
/// marginal.
pub fn oracle_density(state: &PhaseState, point: &Vector3<f64>) -> Result<OracleReport> {
    let snap = state.snapshot();
    let (a, b) = (snap.first(), snap.second());
    let ax = |p: &Packet| -> Complex64 { (0..3).map(|k| p.axis_amplitude(k, point[k])).product() };
    let (va, vb) = (ax(&a), ax(&b));
    let el = PairElements::compute(&snap)?;
    let (direct, norm) = if snap.symmetry == ExchangeSymmetry::Distinguishable {
        let d = va.norm_sqr() * el.bb.overlap().re + vb.norm_sqr() * el.aa.overlap().re;
        (d, (el.aa.overlap() * el.bb.overlap()).re)
    } else {
        let d = va.norm_sqr() * el.bb.overlap().re
            + vb.norm_sqr() * el.aa.overlap().re
            + 2.0 * el.g * (va.conj() * vb * el.ab.overlap().conj()).re;
        (d, el.half_norm())
    };
    let analytic = snap.density(point)?;
    Ok(OracleReport::new("density", analytic, direct / norm, el.nodes))
}

/// Relative kinetic energy `(p1 - p2)^2 / 4` in the pair state.
pub fn oracle_kinetic(state: &PhaseState) -> Result<OracleReport> {
    let snap = state.snapshot();
    let el = PairElements::compute(&snap)?;
    let dot = |u: [Complex64; 3], v: [Complex64; 3]| -> Complex64 { (0..3).map(|k| u[k] * v[k]).sum() };
    let direct_sq = (el.aa.momentum_sq() * el.bb.overlap() + el.bb.momentum_sq() * el.aa.overlap()).re;
    let direct_cross = 2.0 * dot(el.aa.momentum(), el.bb.momentum()).re;
    let (sq, cross, norm) = if snap.symmetry == ExchangeSymmetry::Distinguishable {
        (direct_sq, direct_cross, (el.aa.overlap() * el.bb.overlap()).re)
    } else {
        let s = el.ab.overlap();
        // <a(1)b(2)| p1^2 + p2^2 |b(1)a(2)> = 2 <a|p^2|b> <b|a>
        let ex_sq = 2.0 * (el.ab.momentum_sq() * s.conj()).re;
        let m = el.ab.momentum();
        let ex_cross = 2.0 * dot(m, m.map(|c| c.conj())).re;
        (direct_sq + el.g * ex_sq, direct_cross + el.g * ex_cross, el.half_norm())
    };
    let numeric = (sq - cross) / (4.0 * norm);
    let analytic = avg_hamiltonian(state)?.kinetic();
    Ok(OracleReport::new("kinetic", analytic, numeric, el.nodes))
}

/// Single-packet kinetic energy `<p^2>/2`.
pub fn oracle_packet_kinetic(params: &PacketParams) -> Result<OracleReport> {
    let packet = Packet {
        width: params.sigma,
        center: params.r0,
        momentum: params.p0,
    };
    let mut nodes = 0;
    let el = Elements::compute(&packet, &packet, &mut nodes)?;
    let numeric = 0.5 * el.momentum_sq().re / el.overlap().re;
    Ok(OracleReport::new("packet_kinetic", kinetic_energy(params), numeric, nodes))
}

/// Quadrupole components from direct second-moment quadrature of the
/// density, reported as `D_xx, D_yy, D_zz, D_xz` and the trace.
pub fn oracle_moments(state: &PhaseState) -> Result<Vec<OracleReport>> {
    let snap = state.snapshot();
    let el = PairElements::compute(&snap)?;
    let mut m = Matrix3::<f64>::zeros();
    for a in 0..3 {
        for b in 0..3 {
            // two electrons: density = 2 x one-particle marginal
            let direct = (el.aa.second_moment(a, b) * el.bb.overlap() + el.bb.second_moment(a, b) * el.aa.overlap()).re;
            m[(a, b)] = if snap.symmetry == ExchangeSymmetry::Distinguishable {
                direct / (el.aa.overlap() * el.bb.overlap()).re
            } else {
                let ex = 2.0 * el.g * (el.ab.second_moment(a, b) * el.ab.overlap().conj()).re;
                (direct + ex) / el.half_norm()
            };
        }
    }
    let numeric = m * 3.0 - Matrix3::identity() * m.trace();
    let analytic = quadrupole_matrix(&snap)?;
    let mut out: Vec<OracleReport> = [("d_xx", 0, 0), ("d_yy", 1, 1), ("d_zz", 2, 2), ("d_xz", 0, 2)]
        .iter()
        .map(|&(name, i, j)| OracleReport::new(name, analytic[(i, j)], numeric[(i, j)], el.nodes))
        .collect();
    // trace check: analytic zero against the numeric trace, relative to the
    // tensor norm
    let trace = numeric.trace();
    let norm = numeric.norm().max(REL_FLOOR);
    out.push(OracleReport {
        quantity: "trace".into(),
        analytic: 0.0,
        numeric: trace,
        rel_err: trace.abs() / norm,
        nodes_used: el.nodes,
        applicable: true,
    });
    Ok(out)
}

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}
