//! Quadrupole tensor of the pair charge density, its inversions, time
//! series analysis and density maps.
//!
//! The tensor follows `D_ab = sum q (3 x_a x_b - r^2 delta_ab)` with the
//! density normalized to two electrons. For half-separation `r`, momentum
//! `p`, width `s`, exchange sign `g` and overlap `N`:
//!
//! ```text
//! D_ab = [6 r_a r_b - 2 r^2 delta_ab - 8 g N^2 s^4 (3 p_a p_b - p^2 delta_ab)] / (1 + g N^2)
//! ```

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::meanfield::PhaseState;
use crate::pairstate::PairSnapshot;

/// Nonzero components of the tensor in the frame with `r` and `p` in the
/// x-z plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadrupoleTensor {
    pub d_xx: f64,
    pub d_yy: f64,
    pub d_zz: f64,
    pub d_xz: f64,
}

impl QuadrupoleTensor {
    pub fn trace(&self) -> f64 {
        self.d_xx + self.d_yy + self.d_zz
    }

    /// Frobenius norm of the full symmetric matrix.
    pub fn norm(&self) -> f64 {
        (self.d_xx * self.d_xx + self.d_yy * self.d_yy + self.d_zz * self.d_zz + 2.0 * self.d_xz * self.d_xz).sqrt()
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.d_xx, 0.0, self.d_xz, //
            0.0, self.d_yy, 0.0, //
            self.d_xz, 0.0, self.d_zz,
        )
    }
}

/// Full 3x3 tensor for an arbitrary orientation of `r` and `p`.
pub fn quadrupole_matrix(snapshot: &PairSnapshot) -> Result<Matrix3<f64>> {
    let denom = snapshot.norm_factor()?;
    let r = snapshot.r;
    let p = snapshot.p;
    let s2 = snapshot.width * snapshot.width;
    let exch = 8.0 * snapshot.symmetry.sign() * (-snapshot.overlap_exponent()).exp() * s2 * s2;
    let positional = r * r.transpose() * 6.0 - Matrix3::identity() * (2.0 * r.norm_squared());
    let momentum = p * p.transpose() * 3.0 - Matrix3::identity() * p.norm_squared();
    Ok((positional - momentum * exch) / denom)
}

/// Tensor components of a state whose `r` and `p` lie in the x-z plane.
pub fn quadrupole_tensor(state: &PhaseState) -> Result<QuadrupoleTensor> {
    snapshot_tensor(&state.snapshot())
}

pub fn snapshot_tensor(snapshot: &PairSnapshot) -> Result<QuadrupoleTensor> {
    let scale_r = snapshot.r.norm().max(f64::MIN_POSITIVE);
    let scale_p = snapshot.p.norm().max(f64::MIN_POSITIVE);
    if snapshot.r.y.abs() > 1e-12 * scale_r || snapshot.p.y.abs() > 1e-12 * scale_p {
        return Err(Error::PreconditionViolated(
            "r and p must lie in the x-z plane; rotate the configuration first".into(),
        ));
    }
    let m = quadrupole_matrix(snapshot)?;
    Ok(QuadrupoleTensor {
        d_xx: m[(0, 0)],
        d_yy: m[(1, 1)],
        d_zz: m[(2, 2)],
        d_xz: m[(0, 2)],
    })
}

/// Three estimators of the half-separation valid for well separated packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationEstimate {
    pub mean: f64,
    /// (max - min) / mean of the three estimators.
    pub spread: f64,
    pub estimators: [f64; 3],
}

pub fn invert_r0(d: &QuadrupoleTensor) -> Result<SeparationEstimate> {
    if !(d.d_xx < 0.0 && d.d_yy < 0.0 && d.d_zz > 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "separation inversion needs d_xx < 0, d_yy < 0, d_zz > 0 (got {}, {}, {})",
            d.d_xx, d.d_yy, d.d_zz
        )));
    }
    let estimators = [(-d.d_xx / 2.0).sqrt(), (-d.d_yy / 2.0).sqrt(), 0.5 * d.d_zz.sqrt()];
    let mean = estimators.iter().sum::<f64>() / 3.0;
    let max = estimators.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = estimators.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(SeparationEstimate {
        mean,
        spread: (max - min) / mean,
        estimators,
    })
}

/// Momentum components `(p_x, p_z)` of nearly coincident packets of width
/// `sigma`.
pub fn invert_p(d: &QuadrupoleTensor, sigma: f64) -> Result<(f64, f64)> {
    let q = -(d.d_zz + 2.0 * d.d_xx);
    let guard = 1e-10 * d.norm();
    if q.abs() <= guard && d.d_xz.abs() <= guard {
        return Ok((0.0, 0.0));
    }
    if !(q > 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "momentum inversion needs -(d_zz + 2 d_xx) > 0, got {q}"
        )));
    }
    let s2 = sigma * sigma;
    let px = (q / 3.0).sqrt() / (2.0 * s2);
    let pz = -d.d_xz / (2.0 * 3f64.sqrt() * s2 * q.sqrt());
    Ok((px, pz))
}

/// The quadratic form `n . D . n` along the direction `(theta, phi)`.
pub fn directional_quadrupole(d: &QuadrupoleTensor, theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    d.d_zz * ct * ct + (d.d_xx * cp * cp + d.d_yy * sp * sp) * st * st + 2.0 * d.d_xz * ct * st * cp
}

/// Tensor at every sample of the trajectory.
pub fn quadrupole_timeseries(traj: &Trajectory) -> Result<Vec<(f64, QuadrupoleTensor)>> {
    if traj.samples.is_empty() {
        return Err(Error::MalformedTrajectory("empty trajectory".into()));
    }
    traj.states().map(|s| Ok((s.t, quadrupole_tensor(&s)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    MonotoneAfterTransient,
    Oscillatory,
    Constant,
}

impl SeriesKind {
    pub fn label(self) -> &'static str {
        match self {
            SeriesKind::MonotoneAfterTransient => "monotone",
            SeriesKind::Oscillatory => "oscillatory",
            SeriesKind::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesVerdict {
    pub kind: SeriesKind,
    pub extrema_count: usize,
    pub transient_fraction: f64,
}

pub const DEFAULT_TRANSIENT: f64 = 0.1;

pub fn detect(series: &[(f64, QuadrupoleTensor)]) -> SeriesVerdict {
    detect_with(series, DEFAULT_TRANSIENT)
}

/// Extrema counting on `d_zz` after dropping the leading `transient`
/// fraction of the samples. Reversals smaller than `1e-9 max|d_zz|` are
/// ignored.
pub fn detect_with(series: &[(f64, QuadrupoleTensor)], transient: f64) -> SeriesVerdict {
    let values: Vec<f64> = series.iter().map(|(_, d)| d.d_zz).collect();
    let eps = 1e-9 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let skip = ((values.len() as f64) * transient).floor() as usize;
    let tail = &values[skip.min(values.len())..];
    let verdict = |kind, extrema_count| SeriesVerdict {
        kind,
        extrema_count,
        transient_fraction: transient,
    };
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if tail.len() < 2 || hi - lo <= eps {
        return verdict(SeriesKind::Constant, 0);
    }
    // hysteresis walk: a reversal counts once the value has moved more than
    // eps away from the running extreme
    let mut extrema = 0;
    let mut direction = 0i8;
    let mut extreme = tail[0];
    for &v in &tail[1..] {
        match direction {
            0 => {
                if v > extreme + eps {
                    direction = 1;
                    extreme = v;
                } else if v < extreme - eps {
                    direction = -1;
                    extreme = v;
                }
            }
            1 => {
                if v > extreme {
                    extreme = v;
                } else if v < extreme - eps {
                    extrema += 1;
                    direction = -1;
                    extreme = v;
                }
            }
            _ => {
                if v < extreme {
                    extreme = v;
                } else if v > extreme + eps {
                    extrema += 1;
                    direction = 1;
                    extreme = v;
                }
            }
        }
    }
    let kind = if extrema >= 2 {
        SeriesKind::Oscillatory
    } else {
        SeriesKind::MonotoneAfterTransient
    };
    verdict(kind, extrema)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    Xz,
    Xy,
    Yz,
}

impl Plane {
    /// Point of the plane with first coordinate `u` and second `v`.
    pub fn point(self, u: f64, v: f64) -> Vector3<f64> {
        match self {
            Plane::Xz => Vector3::new(u, 0.0, v),
            Plane::Xy => Vector3::new(u, v, 0.0),
            Plane::Yz => Vector3::new(0.0, u, v),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Plane::Xz => "xz",
            Plane::Xy => "xy",
            Plane::Yz => "yz",
        }
    }
}

/// Square grid of the one-particle density on a coordinate plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub plane: Plane,
    pub extent: f64,
    pub n: usize,
    /// Row-major; row `i` at first coordinate `centers[i]`, column `j` at
    /// second coordinate `centers[j]`.
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Riemann sum of the plane section; approximates the integral of the
    /// density over the plane.
    pub fn plane_integral(&self) -> f64 {
        let h = self.spacing();
        self.values.iter().sum::<f64>() * h * h
    }
}

pub const MIN_GRID: usize = 16;

pub fn density_grid(state: &PhaseState, plane: Plane, extent: f64, n: usize) -> Result<DensityGrid> {
    if n < MIN_GRID {
        return Err(Error::InvalidConfig(format!("grid needs n >= {MIN_GRID}, got {n}")));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::InvalidConfig(format!("extent must be positive, got {extent}")));
    }
    let snap = state.snapshot();
    snap.norm_factor()?;
    let h = 2.0 * extent / n as f64;
    let centers: Vec<f64> = (0..n).map(|i| -extent + (i as f64 + 0.5) * h).collect();
    let rows: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|&u| {
            centers
                .iter()
                .map(|&v| snap.density(&plane.point(u, v)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DensityGrid {
        plane,
        extent,
        n,
        values: rows.concat(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairstate::{ExchangeSymmetry, ExchangeSymmetry::*, PairConfig};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn state(sigma: f64, r: Vector3<f64>, p: Vector3<f64>, symmetry: ExchangeSymmetry) -> PhaseState {
        PhaseState {
            r,
            p,
            t: 0.0,
            config: PairConfig {
                sigma,
                r0: r,
                p0: p,
                symmetry,
                coupling: 1.0,
                law: crate::wavepacket::SpreadLaw::free(sigma),
                t0: 0.0,
            },
        }
    }

    #[test]
    fn momentum_free_pattern() {
        let a = 1.3;
        for symmetry in [Symmetric, Antisymmetric] {
            let s = state(1.0, Vector3::new(0.0, 0.0, a), Vector3::zeros(), symmetry);
            let d = quadrupole_tensor(&s).unwrap();
            let denom = s.snapshot().norm_factor().unwrap();
            let k = a * a / denom;
            assert!((d.d_xx + 2.0 * k).abs() < 1e-14);
            assert!((d.d_yy + 2.0 * k).abs() < 1e-14);
            assert!((d.d_zz - 4.0 * k).abs() < 1e-14);
            assert_eq!(d.d_xz, 0.0);
        }
    }

    #[test]
    fn matches_component_formulas() {
        let (a, px, pz) = (0.4, 0.3, -0.2);
        let s = state(0.9, Vector3::new(0.0, 0.0, a), Vector3::new(px, 0.0, pz), Symmetric);
        let snap = s.snapshot();
        let n2 = snap.overlap().powi(2);
        let denom = 1.0 + n2;
        let s4 = 0.9f64.powi(4);
        let d = quadrupole_tensor(&s).unwrap();
        assert!((d.d_xx - (-2.0 * a * a + 8.0 * n2 * s4 * (pz * pz - 2.0 * px * px)) / denom).abs() < 1e-14);
        assert!((d.d_yy - (-2.0 * a * a + 8.0 * n2 * s4 * (px * px + pz * pz)) / denom).abs() < 1e-14);
        assert!((d.d_zz - (4.0 * a * a + 8.0 * n2 * s4 * (px * px - 2.0 * pz * pz)) / denom).abs() < 1e-14);
        assert!((d.d_xz - (-24.0 * n2 * s4 * px * pz) / denom).abs() < 1e-14);
    }

    #[test]
    fn out_of_plane_rejected() {
        let s = state(1.0, Vector3::new(0.0, 0.5, 1.0), Vector3::zeros(), Symmetric);
        assert!(matches!(quadrupole_tensor(&s), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn separation_roundtrip_far_apart() {
        let sigma = 1.0;
        let r0 = 10.0 * sigma;
        let p = 10.0 / (2.0 * sigma);
        for dir in [0.0, 0.6, 1.2] {
            let pv = Vector3::new(p * f64::sin(dir), 0.0, p * f64::cos(dir));
            let s = state(sigma, Vector3::new(0.0, 0.0, r0), pv, Symmetric);
            let est = invert_r0(&quadrupole_tensor(&s).unwrap()).unwrap();
            assert!((est.mean - r0).abs() < 0.01 * r0);
            assert!(est.spread <= 0.01);
        }
        let s = state(sigma, Vector3::zeros(), Vector3::zeros(), Symmetric);
        assert!(matches!(invert_r0(&quadrupole_tensor(&s).unwrap()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn momentum_roundtrip_coincident() {
        let sigma = 1.0;
        let r0 = 0.01 * sigma;
        let unit = 1.0 / (2.0 * sigma);
        for &(px, pz) in &[(0.05 * unit, 0.0), (0.05 * unit, 0.03 * unit), (0.04 * unit, -0.05 * unit)] {
            let s = state(sigma, Vector3::new(0.0, 0.0, r0), Vector3::new(px, 0.0, pz), Symmetric);
            let (gx, gz) = invert_p(&quadrupole_tensor(&s).unwrap(), sigma).unwrap();
            assert!((gx - px).abs() < 0.02 * px, "{gx} vs {px}");
            assert!((gz - pz).abs() <= 0.02 * pz.abs().max(1e-300) || pz == 0.0 && gz.abs() < 1e-12);
        }
        let s = state(sigma, Vector3::new(0.0, 0.0, r0), Vector3::zeros(), Symmetric);
        assert_eq!(invert_p(&quadrupole_tensor(&s).unwrap(), sigma).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn directional_special_angles() {
        let d = QuadrupoleTensor { d_xx: -1.5, d_yy: -0.5, d_zz: 2.0, d_xz: 0.7 };
        assert!((directional_quadrupole(&d, 0.0, 0.0) - d.d_zz).abs() < 1e-15);
        assert!((directional_quadrupole(&d, PI / 2.0, 0.0) - d.d_xx).abs() < 1e-15);
        assert!((directional_quadrupole(&d, PI / 2.0, PI / 2.0) - d.d_yy).abs() < 1e-15);
        // Gauss-Legendre in cos(theta) times uniform phi is exact for this
        // degree-2 polynomial on the sphere
        let nodes = [(-1.0 / 3f64.sqrt(), 1.0), (1.0 / 3f64.sqrt(), 1.0)];
        let mut avg = 0.0;
        for &(c, w) in &nodes {
            for k in 0..8 {
                let phi = 2.0 * PI * k as f64 / 8.0;
                avg += w / 2.0 / 8.0 * directional_quadrupole(&d, c.acos(), phi);
            }
        }
        assert!(avg.abs() < 1e-15);
    }

    #[test]
    fn directional_matches_matrix_form() {
        let d = QuadrupoleTensor { d_xx: -1.5, d_yy: -0.5, d_zz: 2.0, d_xz: 0.7 };
        let (theta, phi): (f64, f64) = (0.7, 2.1);
        let n = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        assert!((directional_quadrupole(&d, theta, phi) - (n.transpose() * d.matrix() * n)[0]).abs() < 1e-14);
    }

    #[test]
    fn reconstruct_from_four_directions() {
        let d = QuadrupoleTensor { d_xx: -1.1, d_yy: -0.4, d_zz: 1.5, d_xz: -0.3 };
        let q = |t: f64, p: f64| directional_quadrupole(&d, t, p);
        let d_zz = q(0.0, 0.0);
        let d_xx = q(PI / 2.0, 0.0);
        let d_yy = q(PI / 2.0, PI / 2.0);
        // theta = pi/4, phi = 0: (d_zz + d_xx)/2 + d_xz
        let d_xz = q(PI / 4.0, 0.0) - 0.5 * (d_zz + d_xx);
        for (a, b) in [(d_zz, d.d_zz), (d_xx, d.d_xx), (d_yy, d.d_yy), (d_xz, d.d_xz)] {
            assert!((a - b).abs() < 1e-10);
        }
    }

    fn series(values: &[f64]) -> Vec<(f64, QuadrupoleTensor)> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64, QuadrupoleTensor { d_zz: v, d_xx: -v / 2.0, d_yy: -v / 2.0, d_xz: 0.0 }))
            .collect()
    }

    #[test]
    fn detector_kinds() {
        let flat = series(&[2.0; 50]);
        assert_eq!(detect(&flat).kind, SeriesKind::Constant);
        let rising: Vec<f64> = (0..100).map(|i| (i as f64 - 5.0).powi(2)).collect();
        let v = detect(&series(&rising));
        assert_eq!(v.kind, SeriesKind::MonotoneAfterTransient);
        assert_eq!(v.extrema_count, 0);
        let wave: Vec<f64> = (0..400).map(|i| 3.0 + (i as f64 * 0.05).sin()).collect();
        let v = detect(&series(&wave));
        assert_eq!(v.kind, SeriesKind::Oscillatory);
        assert!(v.extrema_count >= 2);
        // noise below the guard does not count
        let noisy: Vec<f64> = (0..100).map(|i| 1.0 + if i % 2 == 0 { 1e-12 } else { 0.0 } + i as f64).collect();
        assert_eq!(detect(&series(&noisy)).extrema_count, 0);
    }

    #[test]
    fn grid_symmetry_and_spacing() {
        let s = state(1.0, Vector3::new(0.0, 0.0, 2.0), Vector3::new(0.2, 0.0, -0.3), Symmetric);
        let g = density_grid(&s, Plane::Xz, 6.0, 32).unwrap();
        assert_eq!(g.values.len(), 32 * 32);
        assert!((g.center(1) - g.center(0) - 0.375).abs() < 1e-15);
        for i in 0..32 {
            for j in 0..32 {
                let a = g.at(i, j);
                let b = g.at(31 - i, 31 - j);
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
            }
        }
        assert!(density_grid(&s, Plane::Xz, 6.0, 8).is_err());
        assert!(density_grid(&s, Plane::Xy, 0.0, 16).is_err());
    }

    #[test]
    fn grid_sum_matches_plane_integral() {
        use crate::numerics::{integrate, Domain, Tolerances};
        let s = state(1.0, Vector3::new(0.0, 0.0, 1.5), Vector3::new(0.0, 0.0, 0.4), Antisymmetric);
        let g = density_grid(&s, Plane::Xz, 8.0, 128).unwrap();
        let snap = s.snapshot();
        let tol = Tolerances::default().with_rel_tol(1e-10);
        let exact = integrate(
            |x: f64| {
                integrate(
                    |z: f64| snap.density(&Vector3::new(x, 0.0, z)).unwrap(),
                    Domain::RealLine { center: 0.0, scale: 2.0 },
                    &tol,
                )
                .unwrap()
                .value
            },
            Domain::RealLine { center: 0.0, scale: 1.0 },
            &tol,
        )
        .unwrap()
        .value;
        assert!((g.plane_integral() - exact).abs() < 0.01 * exact);
    }

    fn coords() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (-3.0f64..3.0, -3.0f64..3.0, -1.5f64..1.5, -1.5f64..1.5, 0.3f64..2.5)
    }

    proptest! {
        #[test]
        fn traceless_everywhere((rx, rz, px, pz, sigma) in coords()) {
            for symmetry in [Symmetric, Antisymmetric, Distinguishable] {
                let s = state(sigma, Vector3::new(rx, 0.0, rz), Vector3::new(px, 0.0, pz), symmetry);
                let Ok(d) = quadrupole_tensor(&s) else { continue };
                prop_assert!(d.trace().abs() <= 1e-10 * d.norm().max(1e-300));
            }
        }

        #[test]
        fn matrix_symmetric_any_frame(r in proptest::array::uniform3(-2.0f64..2.0), p in proptest::array::uniform3(-1.0f64..1.0)) {
            let snap = PairSnapshot::new(1.0, Vector3::from(r), Vector3::from(p), Symmetric);
            let m = quadrupole_matrix(&snap).unwrap();
            prop_assert!((m - m.transpose()).norm() == 0.0);
            prop_assert!(m.trace().abs() <= 1e-10 * m.norm());
        }
    }
}
