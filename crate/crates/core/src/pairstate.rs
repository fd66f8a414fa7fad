//! The mirrored two-electron state: packets at `+r` and `-r` carrying `+p`
//! and `-p`, symmetrized according to the mutual spin orientation.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavepacket::{Packet, SpreadLaw};

/// Below this value of `-ln N^2` the antisymmetric state has no norm left.
const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExchangeSymmetry {
    /// Anti-parallel spins: symmetric spatial part.
    Symmetric,
    /// Parallel spins: antisymmetric spatial part.
    Antisymmetric,
    /// No symmetrization; isolates exchange effects.
    Distinguishable,
}

impl ExchangeSymmetry {
    /// Sign in front of the exchanged product, zero when there is none.
    pub fn sign(self) -> f64 {
        match self {
            ExchangeSymmetry::Symmetric => 1.0,
            ExchangeSymmetry::Antisymmetric => -1.0,
            ExchangeSymmetry::Distinguishable => 0.0,
        }
    }
}

/// Two mirrored packets in the center-of-mass frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig {
    pub sigma: f64,
    /// Half-separation at `t0`; packets sit at `+r0` and `-r0`.
    pub r0: Vector3<f64>,
    pub p0: Vector3<f64>,
    pub symmetry: ExchangeSymmetry,
    /// Interaction strength e0^2.
    pub coupling: f64,
    pub law: SpreadLaw,
    /// Culmination moment of both packets.
    pub t0: f64,
}

impl PairConfig {
    /// Interacting pair with free spreading and culmination at `t = 0`.
    pub fn new(sigma: f64, r0: Vector3<f64>, p0: Vector3<f64>, symmetry: ExchangeSymmetry) -> Result<Self> {
        let config = Self {
            sigma,
            r0,
            p0,
            symmetry,
            coupling: 1.0,
            law: SpreadLaw::free(sigma),
            t0: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_law(mut self, law: SpreadLaw) -> Self {
        self.law = law;
        self
    }

    pub fn frozen(self) -> Self {
        self.with_law(SpreadLaw::frozen())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        let finite = self.r0.iter().chain(self.p0.iter()).all(|v| v.is_finite());
        if !finite || !self.t0.is_finite() {
            return Err(Error::InvalidConfig("pair parameters must be finite".into()));
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidConfig(format!("coupling must be finite, got {}", self.coupling)));
        }
        self.law.validate()?;
        if self.symmetry == ExchangeSymmetry::Antisymmetric && self.r0 == Vector3::zeros() && self.p0 == Vector3::zeros() {
            return Err(Error::InvalidConfig(
                "antisymmetric state vanishes identically for r0 = 0 and p0 = 0".into(),
            ));
        }
        Ok(())
    }

    pub fn width_at(&self, t: f64) -> f64 {
        self.law.width(self.sigma, t - self.t0)
    }

    /// The free-flight snapshot at time `t`: drifted centers, spread width.
    pub fn snapshot(&self, t: f64) -> PairSnapshot {
        PairSnapshot {
            width: self.width_at(t),
            r: self.r0 + self.p0 * (t - self.t0),
            p: self.p0,
            symmetry: self.symmetry,
        }
    }
}

/// The pair state at one instant, fully described by the packet width, the
/// half-separation vector and the momentum of the packet at `+r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSnapshot {
    pub width: f64,
    pub r: Vector3<f64>,
    pub p: Vector3<f64>,
    pub symmetry: ExchangeSymmetry,
}

impl PairSnapshot {
    pub fn new(width: f64, r: Vector3<f64>, p: Vector3<f64>, symmetry: ExchangeSymmetry) -> Self {
        Self { width, r, p, symmetry }
    }

    /// `-ln N^2`.
    pub fn overlap_exponent(&self) -> f64 {
        let s2 = self.width * self.width;
        self.r.norm_squared() / s2 + 4.0 * s2 * self.p.norm_squared()
    }

    pub fn overlap(&self) -> f64 {
        (-0.5 * self.overlap_exponent()).exp()
    }

    /// `1 + g N^2`, the norm of the unnormalized (anti)symmetrized product
    /// divided by two.
    pub fn norm_factor(&self) -> Result<f64> {
        let u = self.overlap_exponent();
        match self.symmetry {
            ExchangeSymmetry::Symmetric => Ok(1.0 + (-u).exp()),
            ExchangeSymmetry::Distinguishable => Ok(1.0),
            ExchangeSymmetry::Antisymmetric => {
                if u < DEGENERACY_THRESHOLD {
                    Err(Error::DegenerateState)
                } else {
                    Ok(-(-u).exp_m1())
                }
            }
        }
    }

    /// The packet at `+r` with momentum `+p`.
    pub fn first(&self) -> Packet {
        Packet {
            width: self.width,
            center: self.r,
            momentum: self.p,
        }
    }

    /// The packet at `-r` with momentum `-p`.
    pub fn second(&self) -> Packet {
        self.first().mirrored()
    }

    pub fn amplitude(&self, r1: &Vector3<f64>, r2: &Vector3<f64>) -> Result<Complex64> {
        let (a, b) = (self.first(), self.second());
        let direct = a.amplitude(r1) * b.amplitude(r2);
        if self.symmetry == ExchangeSymmetry::Distinguishable {
            return Ok(direct);
        }
        let exchanged = b.amplitude(r1) * a.amplitude(r2);
        let norm = (2.0 * self.norm_factor()?).sqrt();
        Ok((direct + exchanged * self.symmetry.sign()) / norm)
    }

    /// One-particle density normalized to two electrons.
    pub fn density(&self, r: &Vector3<f64>) -> Result<f64> {
        let (a, b) = (self.first(), self.second());
        let direct = a.density(r) + b.density(r);
        if self.symmetry == ExchangeSymmetry::Distinguishable {
            return Ok(direct);
        }
        let interference = (a.amplitude(r) * b.amplitude(r).conj()).re;
        let g = self.symmetry.sign();
        Ok((direct + 2.0 * g * self.overlap() * interference) / self.norm_factor()?)
    }
}

/// |<psi_1|psi_2>| of the two mirrored packets at time `t`.
pub fn overlap(config: &PairConfig, t: f64) -> f64 {
    config.snapshot(t).overlap()
}

pub fn pair_amplitude(config: &PairConfig, r1: &Vector3<f64>, r2: &Vector3<f64>, t: f64) -> Result<Complex64> {
    config.snapshot(t).amplitude(r1, r2)
}

pub fn one_particle_density(config: &PairConfig, r: &Vector3<f64>, t: f64) -> Result<f64> {
    config.snapshot(t).density(r)
}
