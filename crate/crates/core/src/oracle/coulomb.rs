//! Coulomb expectation by quadrature in the relative coordinate.
//!
//! With `u = r1 - r2`, the direct part is the average of `1/|u|` over
//! `|a|^2 * |b|^2` convolved, a Gaussian of variance `2 s^2` per axis around
//! `2 r`. The exchange part is the average over the autocorrelation of
//! `a* b`, a Gaussian of the same variance around the origin times
//! `exp(-r^2/s^2 - 2i p.u)`. Both are done as nested (radius, cosine)
//! quadratures with the polar axis along `r` or `p`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use super::{ensure_finite, oracle_tolerances, OracleReport, PairElements};
use crate::error::Result;
use crate::meanfield::{avg_hamiltonian, direct_potential, exchange_potential, PhaseState};
use crate::numerics::{integrate, Domain};
use crate::pairstate::ExchangeSymmetry;

/// `magnitude` bounds the result from above and sets the absolute
/// tolerances.
fn nested(radial: impl Fn(f64, f64) -> f64, lo: f64, hi: f64, magnitude: f64, nodes: &mut usize) -> Result<f64> {
    let tol = oracle_tolerances().with_abs_tol(1e-13 * magnitude);
    let inner_tol = oracle_tolerances().with_abs_tol(1e-13 * magnitude / (hi - lo));
    let inner_nodes = Cell::new(0usize);
    let failure = RefCell::new(None);
    let outer = integrate(
        |rho: f64| match integrate(|mu: f64| radial(rho, mu), Domain::Interval { a: -1.0, b: 1.0 }, &inner_tol) {
            Ok(r) => {
                inner_nodes.set(inner_nodes.get() + r.nodes);
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        Domain::Interval { a: lo, b: hi },
        &tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    *nodes += outer.nodes + inner_nodes.get();
    Ok(outer.value)
}

/// `<1/|u|>` over the direct relative distribution.
fn direct_term(r: f64, s: f64, nodes: &mut usize) -> Result<f64> {
    let pref = 2.0 * PI * (4.0 * PI * s * s).powf(-1.5);
    let center = 2.0 * r;
    let lo = (center - 20.0 * s).max(0.0);
    let hi = center + 20.0 * s;
    nested(
        |rho, mu| {
            let q = ((rho - center).powi(2) + 2.0 * center * rho * (1.0 - mu)) / (4.0 * s * s);
            pref * rho * (-q).exp()
        },
        lo,
        hi,
        1.0 / (center + s),
        nodes,
    )
}

/// `<1/|u|>` over the exchange autocorrelation.
fn exchange_term(r: f64, p: f64, s: f64, nodes: &mut usize) -> Result<f64> {
    let pref = 2.0 * PI * (4.0 * PI * s * s).powf(-1.5) * (-(r * r) / (s * s)).exp();
    nested(
        |rho, mu| pref * rho * (-(rho * rho) / (4.0 * s * s)).exp() * (2.0 * p * rho * mu).cos(),
        0.0,
        20.0 * s,
        (-(r * r) / (s * s)).exp() / s,
        nodes,
    )
}

/// Coulomb part of the averaged Hamiltonian against quadrature.
pub fn oracle_coulomb(state: &PhaseState) -> Result<OracleReport> {
    let mut reports = oracle_coulomb_terms(state)?;
    Ok(reports.pop().expect("total is always reported"))
}

/// Direct integral, exchange integral (when the pair is not
/// distinguishable) and the normalized total, in that order.
pub fn oracle_coulomb_terms(state: &PhaseState) -> Result<Vec<OracleReport>> {
    let snap = state.snapshot();
    let (r, p, s) = (snap.r.norm(), snap.p.norm(), snap.width);
    let mut out = Vec::with_capacity(3);
    let mut nodes = 0;
    let direct = direct_term(r, s, &mut nodes)?;
    out.push(OracleReport::new("coulomb_direct", direct_potential(r, s), direct, nodes));
    let value = if snap.symmetry == ExchangeSymmetry::Distinguishable {
        direct
    } else {
        let mut ex_nodes = 0;
        let exchange = exchange_term(r, p, s, &mut ex_nodes)?;
        out.push(OracleReport::new("coulomb_exchange", exchange_potential(r, p, s), exchange, ex_nodes));
        nodes += ex_nodes;
        let el = PairElements::compute(&snap)?;
        nodes += el.nodes;
        (direct + el.g * exchange) / el.half_norm()
    };
    let numeric = ensure_finite(state.config.coupling * value, "coulomb oracle")?;
    let analytic = avg_hamiltonian(state)?.coulomb();
    out.push(OracleReport::new("coulomb", analytic, numeric, nodes));
    Ok(out)
}
