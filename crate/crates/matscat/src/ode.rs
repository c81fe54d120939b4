//! Adaptive Dormand-Prince 5(4) integration for complex matrix-valued
//! states. The Jost systems are second order, packed as [f; f'] stacked
//! row blocks, so the state is a (2n) x n complex matrix.

use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn rms_error(err: &CMat, y0: &CMat, y1: &CMat, atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    let mut count = 0usize;
    for (e, (a, b)) in err.iter().zip(y0.iter().zip(y1.iter())) {
        let scale = atol + rtol * a.norm().max(b.norm());
        let r = e.norm() / scale;
        acc += r * r;
        count += 1;
    }
    (acc / count.max(1) as f64).sqrt()
}

/// Integrate y' = rhs(x, y) from `x0` to `x1` (either direction), returning
/// the final state and an accumulated local-error estimate.
pub fn integrate<F>(rhs: &F, x0: f64, x1: f64, y0: CMat, opts: &OdeOptions) -> Result<(CMat, f64)>
where
    F: Fn(f64, &CMat) -> CMat,
{
    let mut x = x0;
    let mut y = y0;
    let span = x1 - x0;
    if span == 0.0 {
        return Ok((y, 0.0));
    }
    let dir = span.signum();
    let mut h = (span.abs() * 0.05).clamp(1e-6, 0.1) * dir;
    let mut err_acc = 0.0;
    let mut k1 = rhs(x, &y);
    let mut steps = 0usize;

    while (x1 - x) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::Numerical(format!(
                "ODE integration exceeded {} steps at x = {x:.6}",
                opts.max_steps
            )));
        }
        steps += 1;
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }

        let y2 = &y + &k1 * c(A21 * h);
        let k2 = rhs(x + C2 * h, &y2);
        let y3 = &y + &k1 * c(A31 * h) + &k2 * c(A32 * h);
        let k3 = rhs(x + C3 * h, &y3);
        let y4 = &y + &k1 * c(A41 * h) + &k2 * c(A42 * h) + &k3 * c(A43 * h);
        let k4 = rhs(x + C4 * h, &y4);
        let y5 = &y + &k1 * c(A51 * h) + &k2 * c(A52 * h) + &k3 * c(A53 * h) + &k4 * c(A54 * h);
        let k5 = rhs(x + C5 * h, &y5);
        let y6 = &y
            + &k1 * c(A61 * h)
            + &k2 * c(A62 * h)
            + &k3 * c(A63 * h)
            + &k4 * c(A64 * h)
            + &k5 * c(A65 * h);
        let k6 = rhs(x + h, &y6);
        let y_new =
            &y + &k1 * c(B1 * h) + &k3 * c(B3 * h) + &k4 * c(B4 * h) + &k5 * c(B5 * h) + &k6 * c(B6 * h);
        let k7 = rhs(x + h, &y_new);
        let err_mat = &k1 * c(E1 * h)
            + &k3 * c(E3 * h)
            + &k4 * c(E4 * h)
            + &k5 * c(E5 * h)
            + &k6 * c(E6 * h)
            + &k7 * c(E7 * h);

        let err = rms_error(&err_mat, &y, &y_new, opts.atol, opts.rtol);
        if err <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7; // FSAL
            err_acc += err_mat.norm();
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < 1e-14 * (1.0 + x.abs()) {
            return Err(Error::Numerical(format!(
                "ODE step size collapsed at x = {x:.6} (err = {err:.3e})"
            )));
        }
    }
    Ok((y, err_acc))
}

fn c(v: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(v, 0.0)
}

/// Integrate through an ordered list of checkpoints (monotone in the
/// direction of travel), returning the state at each.
pub fn integrate_checkpoints<F>(
    rhs: &F,
    x0: f64,
    checkpoints: &[f64],
    y0: CMat,
    opts: &OdeOptions,
) -> Result<Vec<(CMat, f64)>>
where
    F: Fn(f64, &CMat) -> CMat,
{
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut x = x0;
    let mut y = y0;
    let mut acc = 0.0;
    for &target in checkpoints {
        let (y_next, e) = integrate(rhs, x, target, y, opts)?;
        acc += e;
        y = y_next;
        x = target;
        out.push((y.clone(), acc));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_exponential_forward_and_backward() {
        let lambda = C64::new(-0.7, 2.3);
        let rhs = |_x: f64, y: &CMat| y * lambda;
        let y0 = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        let (y1, _) = integrate(&rhs, 0.0, 2.0, y0.clone(), &OdeOptions::default()).unwrap();
        let exact = (lambda * 2.0).exp();
        assert!((y1[(0, 0)] - exact).norm() < 1e-9);

        let (y2, _) = integrate(&rhs, 2.0, 0.0, y1, &OdeOptions::default()).unwrap();
        assert!((y2[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_second_order() {
        // f'' = -k^2 f packed as [f; f']
        let k = 3.0;
        let rhs = move |_x: f64, y: &CMat| {
            let f = y[(0, 0)];
            let fp = y[(1, 0)];
            let mut dy = CMat::zeros(2, 1);
            dy[(0, 0)] = fp;
            dy[(1, 0)] = -C64::new(k * k, 0.0) * f;
            dy
        };
        let mut y0 = CMat::zeros(2, 1);
        y0[(0, 0)] = C64::new(1.0, 0.0);
        let (y1, _) = integrate(&rhs, 0.0, 1.0, y0, &OdeOptions::default()).unwrap();
        assert_relative_eq!(y1[(0, 0)].re, (k * 1.0f64).cos(), epsilon = 1e-9);
        assert_relative_eq!(y1[(1, 0)].re, -k * (k * 1.0f64).sin(), epsilon = 1e-8);
    }

    #[test]
    fn checkpoints_match_direct() {
        let lambda = C64::new(0.4, -1.1);
        let rhs = |_x: f64, y: &CMat| y * lambda;
        let y0 = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        let pts = [0.5, 0.2, -0.3];
        let vals =
            integrate_checkpoints(&rhs, 1.0, &pts, y0.clone(), &OdeOptions::default()).unwrap();
        for (&x, (y, _)) in pts.iter().zip(&vals) {
            let exact = (lambda * (x - 1.0)).exp();
            assert!((y[(0, 0)] - exact).norm() < 1e-9, "at x={x}");
        }
    }
}
