use crate::error::{Error, Result};

/// One classical fourth-order Runge-Kutta step of `dy/dt = deriv(y, t)`.
pub fn rk4_step<const N: usize>(
    state: &[f64; N],
    t: f64,
    dt: f64,
    mut deriv: impl FnMut(&[f64; N], f64) -> Result<[f64; N]>,
) -> Result<[f64; N]> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::PreconditionViolated(format!("rk4 step must be positive, got {dt}")));
    }
    let offset = |base: &[f64; N], k: &[f64; N], h: f64| {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let checked = |k: [f64; N]| {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::NonFinite("rk4 derivative"))
        }
    };
    let half = 0.5 * dt;
    let k1 = checked(deriv(state, t)?)?;
    let k2 = checked(deriv(&offset(state, &k1, half), t + half)?)?;
    let k3 = checked(deriv(&offset(state, &k2, half), t + half)?)?;
    let k4 = checked(deriv(&offset(state, &k3, dt), t + dt)?)?;
    let mut next = *state;
    for i in 0..N {
        next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::NonFinite("rk4 state"))
    }
}
