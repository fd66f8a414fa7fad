use super::Tolerances;
use crate::error::{Error, Result};

/// Component-wise central differences with step `fd_step * max(1, |x_i|)`.
pub fn central_gradient<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> Result<f64>,
    x: &[f64; N],
    tol: &Tolerances,
) -> Result<[f64; N]> {
    let mut grad = [0.0; N];
    let mut probe = *x;
    for i in 0..N {
        let h = tol.fd_step * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = f(&probe)?;
        probe[i] = x[i] - h;
        let down = f(&probe)?;
        probe[i] = x[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::NonFinite("gradient sample"));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_at_one() {
        let g = central_gradient(|x: &[f64; 1]| Ok(x[0] * x[0]), &[1.0], &Tolerances::default()).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = central_gradient(|_: &[f64; 3]| Ok(4.2), &[1.0, -3.0, 7.0], &Tolerances::default()).unwrap();
        assert_eq!(g, [0.0; 3]);
    }

    #[test]
    fn kinetic_term_gradient() {
        let mass = 1.0;
        let p = [0.3, -1.1, 2.5];
        let g = central_gradient(
            |q: &[f64; 3]| Ok((q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / mass),
            &p,
            &Tolerances::default(),
        )
        .unwrap();
        for i in 0..3 {
            assert!((g[i] - 2.0 * p[i] / mass).abs() < 1e-8);
        }
    }

    #[test]
    fn nonfinite_sample_is_error() {
        let err = central_gradient(|_: &[f64; 1]| Ok(f64::NAN), &[0.0], &Tolerances::default()).unwrap_err();
        assert_eq!(err, Error::NonFinite("gradient sample"));
    }

    proptest! {
        #[test]
        fn quadratic_forms_match_analytic_gradient(
            a in proptest::array::uniform3(-3.0f64..3.0),
            b in proptest::array::uniform3(-3.0f64..3.0),
            x in proptest::array::uniform3(-5.0f64..5.0),
        ) {
            // f = sum_i a_i x_i^2 + b_0 x_0 x_1 + b_1 x_1 x_2 + b_2 x_0 x_2
            let f = |q: &[f64; 3]| Ok(a[0] * q[0] * q[0] + a[1] * q[1] * q[1] + a[2] * q[2] * q[2]
                + b[0] * q[0] * q[1] + b[1] * q[1] * q[2] + b[2] * q[0] * q[2]);
            let exact = [
                2.0 * a[0] * x[0] + b[0] * x[1] + b[2] * x[2],
                2.0 * a[1] * x[1] + b[0] * x[0] + b[1] * x[2],
                2.0 * a[2] * x[2] + b[1] * x[1] + b[2] * x[0],
            ];
            // exact for quadratics at any step; a wide step keeps roundoff
            // in the sampled values below the gate
            let tol = Tolerances { fd_step: 1e-3, ..Tolerances::default() };
            let g = central_gradient(f, &x, &tol).unwrap();
            let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..3 {
                prop_assert!((g[i] - exact[i]).abs() <= 1e-10 * scale);
            }
        }
    }
}
