//! Free evolution of a one-dimensional Gaussian on a periodic grid, used to
//! measure the spreading rate.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use super::OracleReport;
use crate::error::{Error, Result};
use crate::wavepacket::{Packet, SpreadLaw};

const GRID: usize = 4096;
const HALF_WIDTH: f64 = 40.0;
const SAMPLES: usize = 8;

/// Fitted spreading rate from `sigma_x(t)^2 = sigma^2 (1 + omega^2 t^2)`
/// against the rate of `law`. Frozen laws are reported as not applicable.
pub fn oracle_spreading(sigma: f64, law: &SpreadLaw) -> Result<OracleReport> {
    if law.frozen {
        return Ok(OracleReport::not_applicable("spreading"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let packet = Packet {
        width: sigma,
        center: nalgebra::Vector3::zeros(),
        momentum: nalgebra::Vector3::zeros(),
    };
    let extent = HALF_WIDTH * sigma;
    let dx = 2.0 * extent / GRID as f64;
    let xs: Vec<f64> = (0..GRID).map(|j| -extent + j as f64 * dx).collect();
    let psi0: Vec<Complex64> = xs.iter().map(|&x| packet.axis_amplitude(0, x)).collect();
    let ks: Vec<f64> = (0..GRID)
        .map(|j| {
            let m = if j < GRID / 2 { j as f64 } else { j as f64 - GRID as f64 };
            2.0 * PI * m / (GRID as f64 * dx)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(GRID);
    let inverse = planner.plan_fft_inverse(GRID);
    let mut spectrum = psi0.clone();
    forward.process(&mut spectrum);

    let variance = |psi: &[Complex64]| -> f64 {
        let (mut w, mut m2) = (0.0, 0.0);
        for (x, v) in xs.iter().zip(psi) {
            w += v.norm_sqr();
            m2 += x * x * v.norm_sqr();
        }
        m2 / w
    };
    let base = variance(&psi0);
    // reference rate used only to pick sample times of order one spreading time
    let unit = 2.0 * sigma * sigma;
    let (mut num, mut den) = (0.0, 0.0);
    for j in 1..=SAMPLES {
        let t = 0.25 * j as f64 * unit;
        let mut psi: Vec<Complex64> = spectrum
            .iter()
            .zip(&ks)
            .map(|(c, k)| c * Complex64::from_polar(1.0, -0.5 * k * k * t))
            .collect();
        inverse.process(&mut psi);
        let y = variance(&psi) / base - 1.0;
        num += y * t * t;
        den += t.powi(4);
    }
    let omega = (num / den).sqrt();
    if !omega.is_finite() {
        return Err(Error::NonFinite("fitted spreading rate"));
    }
    Ok(OracleReport::new("spreading", law.omega, omega, GRID * (SAMPLES + 1)))
}
