//! Adaptive Gauss-Kronrod (10/21) quadrature with tanh-type maps for
//! infinite ranges.
//!
//! Refinement always bisects the segment with the largest error estimate,
//! scanning segments in insertion order, so identical inputs produce
//! bit-identical results.

// Kronrod nodes and weights are tabulated to more digits than f64 holds.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::Tolerances;
use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_842_295_520,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights belonging to XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const NODES_PER_SEGMENT: usize = 21;
const INITIAL_SEGMENTS: usize = 8;

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Integration domain. Infinite domains are mapped onto a finite interval
/// by `x = origin + scale * atanh(u)`; `scale` should be comparable to the
/// width of the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    RealLine { center: f64, scale: f64 },
    HalfLine { start: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs: f64,
}

fn kronrod<T: Integrand>(g: &impl Fn(f64) -> T, a: f64, b: f64) -> Result<Segment<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::default();
    let mut abs = fc.magnitude() * WGK[10];
    let mut finite = fc.is_finite_value();
    for (j, &wg) in WG.iter().enumerate() {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (g(center - dx), g(center + dx));
        finite &= f1.is_finite_value() && f2.is_finite_value();
        resg = resg + (f1 + f2) * wg;
        resk = resk + (f1 + f2) * WGK[k];
        abs += (f1.magnitude() + f2.magnitude()) * WGK[k];
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (g(center - dx), g(center + dx));
        finite &= f1.is_finite_value() && f2.is_finite_value();
        resk = resk + (f1 + f2) * WGK[k];
        abs += (f1.magnitude() + f2.magnitude()) * WGK[k];
    }
    if !finite {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    Ok(Segment {
        a,
        b,
        value: resk * half,
        error: ((resk - resg) * half).magnitude(),
        abs: abs * half.abs(),
    })
}

fn adaptive<T: Integrand>(
    g: impl Fn(f64) -> T,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Result<QuadratureResult<T>> {
    let width = (hi - lo) / INITIAL_SEGMENTS as f64;
    let mut segments = Vec::with_capacity(64);
    for i in 0..INITIAL_SEGMENTS {
        let a = lo + width * i as f64;
        let b = if i + 1 == INITIAL_SEGMENTS { hi } else { a + width };
        segments.push(kronrod(&g, a, b)?);
    }
    let min_width = 1e-14 * (hi - lo).abs();
    loop {
        let mut total = T::default();
        let mut error = 0.0;
        let mut abs = 0.0;
        let mut worst = 0;
        for (i, s) in segments.iter().enumerate() {
            total = total + s.value;
            error += s.error;
            abs += s.abs;
            if s.error > segments[worst].error {
                worst = i;
            }
        }
        let nodes = segments.len() * NODES_PER_SEGMENT;
        let target = tol
            .abs_tol
            .max(tol.rel_tol * total.magnitude())
            .max(50.0 * f64::EPSILON * abs);
        if error <= target {
            return Ok(QuadratureResult {
                value: total,
                error,
                nodes,
            });
        }
        if nodes + 2 * NODES_PER_SEGMENT > tol.max_quad_nodes {
            return Err(Error::NonConvergence {
                nodes,
                estimate: error,
            });
        }
        let s = segments[worst];
        if (s.b - s.a).abs() <= min_width {
            // cannot refine further; accept what this segment contributes
            segments[worst].error = 0.0;
            continue;
        }
        let mid = 0.5 * (s.a + s.b);
        segments[worst] = kronrod(&g, s.a, mid)?;
        segments.push(kronrod(&g, mid, s.b)?);
    }
}

/// Integrate `f` over `domain`, returning the estimate with diagnostics.
pub fn integrate<T: Integrand>(
    f: impl Fn(f64) -> T,
    domain: Domain,
    tol: &Tolerances,
) -> Result<QuadratureResult<T>> {
    match domain {
        Domain::Interval { a, b } => adaptive(f, a, b, tol),
        Domain::RealLine { center, scale } => adaptive(
            |u: f64| {
                let jac = scale / ((1.0 - u) * (1.0 + u));
                if !jac.is_finite() {
                    // node rounded onto the mapped endpoint at infinity
                    return T::default();
                }
                f(center + scale * u.atanh()) * jac
            },
            -1.0,
            1.0,
            tol,
        ),
        Domain::HalfLine { start, scale } => adaptive(
            |u: f64| {
                let jac = scale / ((1.0 - u) * (1.0 + u));
                if !jac.is_finite() {
                    // node rounded onto the mapped endpoint at infinity
                    return T::default();
                }
                f(start + scale * u.atanh()) * jac
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

/// Integral of a real function over the finite interval [a, b].
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: &Tolerances) -> Result<f64> {
    integrate(f, Domain::Interval { a, b }, tol).map(|r| r.value)
}

/// Integral over 3-space of `fx(x) fy(y) fz(z)`.
pub fn integrate_3d_separable<T: Integrand + Mul<Output = T>>(
    fx: (impl Fn(f64) -> T, Domain),
    fy: (impl Fn(f64) -> T, Domain),
    fz: (impl Fn(f64) -> T, Domain),
    tol: &Tolerances,
) -> Result<QuadratureResult<T>> {
    let x = integrate(fx.0, fx.1, tol)?;
    let y = integrate(fy.0, fy.1, tol)?;
    let z = integrate(fz.0, fz.1, tol)?;
    Ok(QuadratureResult {
        value: x.value * y.value * z.value,
        error: x.error * (y.value * z.value).magnitude()
            + y.error * (x.value * z.value).magnitude()
            + z.error * (x.value * y.value).magnitude(),
        nodes: x.nodes + y.nodes + z.nodes,
    })
}

/// Integral over 3-space of a radially symmetric function `g(|r|)`.
pub fn integrate_3d_radial(
    g: impl Fn(f64) -> f64,
    scale: f64,
    tol: &Tolerances,
) -> Result<QuadratureResult<f64>> {
    let r = integrate(
        |d: f64| d * d * g(d),
        Domain::HalfLine { start: 0.0, scale },
        tol,
    )?;
    Ok(QuadratureResult {
        value: 4.0 * PI * r.value,
        error: 4.0 * PI * r.error,
        nodes: r.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn gaussian(x: f64, sigma: f64) -> f64 {
        (-0.5 * x * x / (sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_on_unit_interval() {
        let v = integrate_1d(|_| 1.0, 0.0, 1.0, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn high_degree_polynomial_exact() {
        // Kronrod-21 integrates degree 31 exactly on each segment
        let v = integrate_1d(|x| 32.0 * x.powi(31), 0.0, 1.0, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_normalization_on_real_line() {
        for &sigma in &[0.3, 1.0, 7.0] {
            let r = integrate(
                |x| gaussian(x - 2.0, sigma),
                Domain::RealLine { center: 2.0, scale: sigma },
                &tol(),
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "sigma={sigma}: {}", r.value);
        }
    }

    #[test]
    fn half_gaussian_moment() {
        // integral_0^inf d e^{-d^2} dd = 1/2
        let r = integrate(
            |d| d * (-d * d).exp(),
            Domain::HalfLine { start: 0.0, scale: 1.0 },
            &tol(),
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn separable_product_and_variance() {
        let line = Domain::RealLine { center: 0.0, scale: 1.0 };
        let r = integrate_3d_separable(
            (|x| gaussian(x, 1.0), line),
            (|y| gaussian(y, 1.0), line),
            (|z| gaussian(z, 1.0), line),
            &tol(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);

        let sigma = 1.7;
        let m2 = integrate(
            |x| x * x * gaussian(x, sigma),
            Domain::RealLine { center: 0.0, scale: sigma },
            &tol(),
        )
        .unwrap();
        assert!((m2.value - sigma * sigma).abs() < 1e-10);
    }

    #[test]
    fn radial_coulomb_like_integral() {
        // integral of e^{-d^2}/d over 3-space = 2 pi
        let r = integrate_3d_radial(|d| (-d * d).exp() / d, 1.0, &tol()).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn complex_oscillatory_gaussian() {
        // integral e^{-x^2/2} e^{-ikx} dx = sqrt(2 pi) e^{-k^2/2}
        let k = 1.3;
        let r = integrate(
            |x| Complex64::from_polar((-0.5 * x * x).exp(), -k * x),
            Domain::RealLine { center: 0.0, scale: 1.0 },
            &tol(),
        )
        .unwrap();
        let exact = (2.0 * PI).sqrt() * (-0.5 * k * k).exp();
        assert!((r.value.re - exact).abs() < 1e-11);
        assert!(r.value.im.abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_is_integrable() {
        // integral_0^1 x^{-1/2} dx = 2
        let v = integrate_1d(|x| 1.0 / x.sqrt(), 0.0, 1.0, &tol().with_rel_tol(1e-9)).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn node_budget_exhaustion_reports_nonconvergence() {
        let tight = Tolerances {
            max_quad_nodes: 200,
            ..Tolerances::default()
        };
        let err = integrate_1d(|x| (1.0 / x).sin(), 1e-6, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn nonfinite_integrand_reported() {
        let err = integrate_1d(|_| f64::NAN, 0.0, 1.0, &tol()).unwrap_err();
        assert_eq!(err, Error::NonFinite("quadrature integrand"));
    }

    #[test]
    fn bitwise_deterministic() {
        let f = |x: f64| (x.sin() * 3.0).exp() / (1.0 + x * x);
        let a = integrate_1d(f, -3.0, 5.0, &tol()).unwrap();
        let b = integrate_1d(f, -3.0, 5.0, &tol()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
