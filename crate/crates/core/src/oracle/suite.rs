//! Validation suite over the committed parameter draws.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Read;

use super::*;
use crate::wavepacket::SpreadLaw;

/// The draws shipped with the crate.
pub const BUNDLED_DRAWS: &str = include_str!("../../data/draws.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DrawSet {
    Overlap,
    Coulomb,
    Quadrupole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Antiparallel,
    Parallel,
    Distinguishable,
}

impl From<Spin> for ExchangeSymmetry {
    fn from(s: Spin) -> Self {
        match s {
            Spin::Antiparallel => ExchangeSymmetry::Symmetric,
            Spin::Parallel => ExchangeSymmetry::Antisymmetric,
            Spin::Distinguishable => ExchangeSymmetry::Distinguishable,
        }
    }
}

/// One parameter draw: culmination width, half-separation, momentum and
/// evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub set: DrawSet,
    pub sigma: f64,
    pub rx: f64,
    pub rz: f64,
    pub px: f64,
    pub pz: f64,
    pub spin: Spin,
    pub t: f64,
}

impl Draw {
    pub fn config(&self) -> Result<PairConfig> {
        PairConfig::new(
            self.sigma,
            Vector3::new(self.rx, 0.0, self.rz),
            Vector3::new(self.px, 0.0, self.pz),
            self.spin.into(),
        )
    }

    /// Phase state with the drifted center and spread width at `t`.
    pub fn state(&self) -> Result<PhaseState> {
        let config = self.config()?;
        let snap = config.snapshot(self.t);
        Ok(PhaseState {
            r: snap.r,
            p: snap.p,
            t: self.t,
            config,
        })
    }
}

pub fn read_draws(reader: impl Read) -> Result<Vec<Draw>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|row| row.map_err(|e| Error::InvalidConfig(format!("draws file: {e}"))))
        .collect()
}

pub fn write_draws(draws: &[Draw], writer: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for d in draws {
        w.serialize(d).map_err(|e| Error::InvalidConfig(format!("draws file: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidConfig(format!("draws file: {e}")))
}

pub fn bundled_draws() -> Vec<Draw> {
    read_draws(BUNDLED_DRAWS.as_bytes()).expect("bundled draws parse")
}

/// One gated check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub report: OracleReport,
    pub gate: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        !self.report.applicable || self.report.rel_err <= self.gate
    }
}

pub const OVERLAP_GATE: f64 = 1e-8;
pub const NORM_GATE: f64 = 1e-10;
pub const DENSITY_GATE: f64 = 1e-8;
pub const KINETIC_GATE: f64 = 1e-8;
pub const COULOMB_GATE: f64 = 1e-6;
pub const MOMENT_GATE: f64 = 1e-6;
pub const TRACE_GATE: f64 = 1e-10;
pub const SPREADING_GATE: f64 = 1e-4;

fn gated(label: String, report: OracleReport, gate: f64) -> Check {
    Check { label, report, gate }
}

fn draw_checks(index: usize, draw: &Draw) -> Result<Vec<Check>> {
    let label = |q: &str| format!("{:?}#{index}:{q}", draw.set).to_lowercase();
    let state = draw.state()?;
    let checks = match draw.set {
        DrawSet::Overlap => {
            let config = draw.config()?;
            let s = draw.sigma;
            let point = state.r + Vector3::new(0.3 * s, 0.2 * s, -0.1 * s);
            vec![
                gated(label("overlap"), oracle_overlap(&config, draw.t)?, OVERLAP_GATE),
                gated(label("pair_norm"), oracle_pair_norm(&state)?, NORM_GATE),
                gated(label("density"), oracle_density(&state, &point)?, DENSITY_GATE),
                gated(label("kinetic"), oracle_kinetic(&state)?, KINETIC_GATE),
            ]
        }
        DrawSet::Coulomb => oracle_coulomb_terms(&state)?
            .into_iter()
            .map(|r| gated(label(&r.quantity), r, COULOMB_GATE))
            .collect(),
        DrawSet::Quadrupole => oracle_moments(&state)?
            .into_iter()
            .map(|r| {
                let gate = if r.quantity == "trace" { TRACE_GATE } else { MOMENT_GATE };
                gated(label(&r.quantity), r, gate)
            })
            .collect(),
    };
    Ok(checks)
}

/// Checks that do not depend on the draws: the spreading rate for three
/// widths, the coincident Coulomb value, the point-charge limit and the
/// single-packet kinetic energy.
fn fixed_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for sigma in [0.5, 1.0, 2.0] {
        out.push(gated(
            format!("spreading:sigma={sigma}"),
            oracle_spreading(sigma, &SpreadLaw::free(sigma))?,
            SPREADING_GATE,
        ));
    }
    let sym = ExchangeSymmetry::Symmetric;
    let coincident = PhaseState::initial(PairConfig::new(1.0, Vector3::zeros(), Vector3::zeros(), sym)?);
    let mut c = oracle_coulomb(&coincident)?;
    c.analytic = 1.0 / std::f64::consts::PI.sqrt();
    c.rel_err = rel_err(c.analytic, c.numeric);
    out.push(gated("coulomb:coincident".into(), c, COULOMB_GATE));
    let far = PhaseState::initial(PairConfig::new(1.0, Vector3::new(0.0, 0.0, 20.0), Vector3::zeros(), sym)?);
    out.push(gated("coulomb:point_charge".into(), oracle_coulomb(&far)?, COULOMB_GATE));
    for (sigma, p) in [(0.5, 0.0), (1.0, 0.7), (2.0, 1.3)] {
        let params = PacketParams::new(sigma, Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.0, p), 0.0)?;
        out.push(gated(format!("packet_kinetic:sigma={sigma}"), oracle_packet_kinetic(&params)?, KINETIC_GATE));
    }
    Ok(out)
}

/// Every check for the given draws plus the fixed checks, in a deterministic
/// order.
pub fn run_suite(draws: &[Draw]) -> Result<Vec<Check>> {
    let per_draw: Vec<Vec<Check>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, d)| draw_checks(i, d))
        .collect::<Result<_>>()?;
    let mut out: Vec<Check> = per_draw.into_iter().flatten().collect();
    out.extend(fixed_checks()?);
    Ok(out)
}
