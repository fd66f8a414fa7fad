//! A single coherent electron: minimum-uncertainty Gaussian packet in
//! atomic units (hbar = m = e0^2 = 1).

use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One Gaussian coherent electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    /// Coordinate uncertainty at the culmination moment.
    pub sigma: f64,
    pub r0: Vector3<f64>,
    pub p0: Vector3<f64>,
    /// Culmination moment: no coordinate-momentum correlation.
    pub t0: f64,
}

impl PacketParams {
    pub fn new(sigma: f64, r0: Vector3<f64>, p0: Vector3<f64>, t0: f64) -> Result<Self> {
        let params = Self { sigma, r0, p0, t0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        let finite = self.r0.iter().chain(self.p0.iter()).all(|v| v.is_finite()) && self.t0.is_finite();
        if !finite {
            return Err(Error::InvalidConfig("packet parameters must be finite".into()));
        }
        Ok(())
    }

    /// The packet as it stands at time `t`: drifted center, spread width.
    pub fn at(&self, law: &SpreadLaw, t: f64) -> Packet {
        Packet {
            width: sigma_t(self, law, t),
            center: self.r0 + self.p0 * (t - self.t0),
            momentum: self.p0,
        }
    }
}

/// How the coordinate uncertainty evolves away from culmination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadLaw {
    pub omega: f64,
    /// When set the width stays at sigma for all times.
    pub frozen: bool,
}

impl SpreadLaw {
    /// Free-particle spreading for a packet of culmination width `sigma`.
    pub fn free(sigma: f64) -> Self {
        Self {
            omega: 1.0 / (2.0 * sigma * sigma),
            frozen: false,
        }
    }

    pub fn frozen() -> Self {
        Self {
            omega: 0.0,
            frozen: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidConfig(format!("omega must be non-negative, got {}", self.omega)));
        }
        if self.frozen && self.omega != 0.0 {
            return Err(Error::InvalidConfig("frozen spreading law requires omega = 0".into()));
        }
        Ok(())
    }

    /// Width at time offset `tau = t - t0` for culmination width `sigma`.
    pub fn width(&self, sigma: f64, tau: f64) -> f64 {
        if self.frozen {
            sigma
        } else {
            let wt = self.omega * tau;
            sigma * (1.0 + wt * wt).sqrt()
        }
    }
}

/// Spreading rate hbar/(2 m sigma^2).
pub fn spreading_rate(params: &PacketParams) -> f64 {
    1.0 / (2.0 * params.sigma * params.sigma)
}

/// sigma * sqrt(1 + omega^2 (t - t0)^2), or sigma in frozen mode.
pub fn sigma_t(params: &PacketParams, law: &SpreadLaw, t: f64) -> f64 {
    law.width(params.sigma, t - params.t0)
}

/// Wave function value at `r` and time `t`.
pub fn amplitude(params: &PacketParams, law: &SpreadLaw, r: &Vector3<f64>, t: f64) -> Complex64 {
    params.at(law, t).amplitude(r)
}

/// p0^2/(2m) + 3 hbar^2/(8 m sigma^2).
pub fn kinetic_energy(params: &PacketParams) -> f64 {
    0.5 * params.p0.norm_squared() + 3.0 / (8.0 * params.sigma * params.sigma)
}

/// Instantaneous packet: Gaussian envelope of standard deviation `width`
/// (in |psi|^2, per axis) around `center`, carrying plane-wave phase
/// `momentum . r`.
///
/// Densities do not depend on the global phase, which is dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet {
    pub width: f64,
    pub center: Vector3<f64>,
    pub momentum: Vector3<f64>,
}

impl Packet {
    pub fn amplitude(&self, r: &Vector3<f64>) -> Complex64 {
        let s2 = self.width * self.width;
        let d = r - self.center;
        let envelope = (2.0 * PI * s2).powf(-0.75) * (-d.norm_squared() / (4.0 * s2)).exp();
        Complex64::from_polar(envelope, self.momentum.dot(r))
    }

    /// Factor of the amplitude along one Cartesian axis; the amplitude is the
    /// product of the three axis factors.
    pub fn axis_amplitude(&self, axis: usize, x: f64) -> Complex64 {
        let s2 = self.width * self.width;
        let d = x - self.center[axis];
        let envelope = (2.0 * PI * s2).powf(-0.25) * (-d * d / (4.0 * s2)).exp();
        Complex64::from_polar(envelope, self.momentum[axis] * x)
    }

    pub fn density(&self, r: &Vector3<f64>) -> f64 {
        let s2 = self.width * self.width;
        let d = r - self.center;
        (2.0 * PI * s2).powf(-1.5) * (-d.norm_squared() / (2.0 * s2)).exp()
    }

    /// The mirror image about the origin: center and momentum reversed.
    pub fn mirrored(&self) -> Packet {
        Packet {
            width: self.width,
            center: -self.center,
            momentum: -self.momentum,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, Domain, Tolerances};

    fn params(sigma: f64) -> PacketParams {
        PacketParams::new(sigma, Vector3::new(0.4, -0.2, 1.0), Vector3::new(0.3, 0.0, -0.7), 0.5).unwrap()
    }

    #[test]
    fn rate_values_and_scaling() {
        assert_eq!(spreading_rate(&params(1.0)), 0.5);
        assert_eq!(spreading_rate(&params(2.0)) / spreading_rate(&params(1.0)), 0.25);
        assert!(spreading_rate(&params(1e8)) < 1e-16);
    }

    #[test]
    fn width_law() {
        let p = params(1.3);
        let law = SpreadLaw::free(p.sigma);
        assert_eq!(sigma_t(&p, &law, p.t0), p.sigma);
        let tau = 1.0 / law.omega;
        assert!((sigma_t(&p, &law, p.t0 + tau) - p.sigma * 2f64.sqrt()).abs() < 1e-14);
        let tau = 10.0 / law.omega;
        let asym = p.sigma * law.omega * tau;
        assert!((sigma_t(&p, &law, p.t0 + tau) - asym).abs() < 0.01 * asym);
        let frozen = SpreadLaw::frozen();
        assert_eq!(sigma_t(&p, &frozen, 123.0), p.sigma);
    }

    #[test]
    fn width_never_below_culmination() {
        let p = params(0.7);
        let law = SpreadLaw::free(p.sigma);
        for i in -50..=50 {
            let t = p.t0 + 0.37 * i as f64;
            let s = sigma_t(&p, &law, t);
            if i == 0 {
                assert_eq!(s, p.sigma);
            } else {
                assert!(s > p.sigma);
            }
        }
    }

    #[test]
    fn kinetic_energy_examples() {
        let at_rest = PacketParams::new(1.0, Vector3::zeros(), Vector3::zeros(), 0.0).unwrap();
        assert!((kinetic_energy(&at_rest) - 0.375).abs() < 1e-15);
        let p0 = Vector3::new(0.0, 1.2, -0.5);
        let moving = PacketParams { p0, ..at_rest };
        assert!((kinetic_energy(&moving) - kinetic_energy(&at_rest) - 0.5 * p0.norm_squared()).abs() < 1e-15);
        let wide = PacketParams { sigma: 1e9, ..moving };
        assert!((kinetic_energy(&wide) - 0.5 * p0.norm_squared()).abs() < 1e-15);
    }

    #[test]
    fn axis_factors_multiply_to_amplitude() {
        let packet = params(0.9).at(&SpreadLaw::free(0.9), 2.0);
        let r = Vector3::new(0.3, 1.1, -0.4);
        let product = packet.axis_amplitude(0, r.x) * packet.axis_amplitude(1, r.y) * packet.axis_amplitude(2, r.z);
        assert!((product - packet.amplitude(&r)).norm() < 1e-15);
        assert!((packet.amplitude(&r).norm_sqr() - packet.density(&r)).abs() < 1e-15);
    }

    #[test]
    fn norm_and_drift_by_quadrature() {
        let p = params(1.0);
        let law = SpreadLaw::free(p.sigma);
        let tol = Tolerances::default();
        for &t in &[p.t0, 3.0, -4.0, p.t0 + 10.0 / law.omega] {
            let packet = p.at(&law, t);
            let drift = p.r0 + p.p0 * (t - p.t0);
            let mut norm = 1.0;
            for axis in 0..3 {
                let domain = Domain::RealLine { center: packet.center[axis], scale: packet.width };
                let n = integrate(|x| packet.axis_amplitude(axis, x).norm_sqr(), domain, &tol).unwrap();
                let m = integrate(|x| x * packet.axis_amplitude(axis, x).norm_sqr(), domain, &tol).unwrap();
                norm *= n.value;
                assert!((m.value / n.value - drift[axis]).abs() < 1e-8, "t={t} axis={axis}");
            }
            assert!((norm - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn density_peak_on_drift_line() {
        let p = params(0.8);
        let law = SpreadLaw::free(p.sigma);
        let packet = p.at(&law, 4.0);
        let peak = packet.density(&packet.center);
        for d in [Vector3::new(1e-3, 0.0, 0.0), Vector3::new(0.0, -1e-3, 0.0), Vector3::new(0.0, 0.0, 1e-3)] {
            assert!(packet.density(&(packet.center + d)) < peak);
        }
    }

    #[test]
    fn invalid_sigma_rejected() {
        assert!(PacketParams::new(0.0, Vector3::zeros(), Vector3::zeros(), 0.0).is_err());
        assert!(PacketParams::new(f64::NAN, Vector3::zeros(), Vector3::zeros(), 0.0).is_err());
        assert!(SpreadLaw { omega: 0.2, frozen: true }.validate().is_err());
    }
}
