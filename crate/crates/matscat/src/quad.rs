//! Quadrature building blocks: adaptive Simpson for scalar integrands,
//! Gauss-Legendre nodes for contour edges, and the sine integral.

/// Adaptive Simpson with a relative/absolute tolerance mix.
/// Returns (value, error estimate).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
        err_acc: &mut f64,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            *err_acc += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1, err_acc)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1, err_acc)
    }

    if a == b {
        return (0.0, 0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let mut err = 0.0;
    let v = recurse(f, a, fa, b, fb, whole, m, fm, tol, 48, &mut err);
    (v, err)
}

/// Integrate a decaying integrand over [a, inf) by marching geometric
/// panels until the panel contribution falls below `tol` relative to the
/// accumulated value. Returns None when the tail fails the decay ratio
/// test (three consecutive non-shrinking panels on geometrically growing
/// windows), signalling a divergent integral.
pub fn semi_infinite<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> Option<(f64, f64, f64)> {
    const GROWTH: f64 = 1.6;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = a;
    let mut hi = a + 0.5_f64.max(a.abs() * 0.25);
    let mut last_panel = f64::INFINITY;
    let mut growth_run = 0usize;
    let mut panel = 0.0;
    for m in 0..48 {
        let (p, e) = adaptive_simpson(f, lo, hi, tol * 0.1 + 1e-300);
        panel = p;
        total += panel;
        err += e;
        let scale = total.abs().max(f(a).abs()).max(1e-30);
        if m >= 3 && panel.abs() < tol * scale {
            return Some((total, err, hi));
        }
        if panel.abs() >= last_panel.abs() * 0.999 && panel.abs() > tol * scale {
            growth_run += 1;
            if growth_run >= 3 {
                return None;
            }
        } else {
            growth_run = 0;
        }
        last_panel = panel;
        lo = hi;
        hi = a + (hi - a) * GROWTH;
    }
    // Panel budget exhausted: classify by the final trend.
    let ratio = panel.abs() / last_panel.abs().max(1e-300);
    if ratio < 0.98 {
        let tail = panel.abs() * ratio / (1.0 - ratio);
        Some((total, err + tail, lo))
    } else {
        None
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
/// Legendre polynomial (Bonnet recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Sine integral Si(x) = ∫_0^x sin t / t dt.
///
/// Three branches: power series (x <= 12, where cancellation stays below
/// ~1e-12), quadrature continuation from Si(12) in the middle, and the
/// asymptotic expansion for x >= 35 (optimal truncation error ~ e^{-x}).
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let s = if ax <= 12.0 {
        si_series(ax)
    } else if ax < 35.0 {
        // cached Si(12) plus an adaptive panel over [12, x]
        static SI12: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
        let si12 = *SI12.get_or_init(|| si_series(12.0));
        let (tail, _) = adaptive_simpson(
            &|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t },
            12.0,
            ax,
            1e-13,
        );
        si12 + tail
    } else {
        // Si(x) = pi/2 - f(x) cos x - g(x) sin x, asymptotic series in 1/x^2
        let inv = 1.0 / ax;
        let inv2 = inv * inv;
        let mut fx = 0.0;
        let mut gx = 0.0;
        let mut num_f = inv; // (2k)! / x^(2k+1)
        let mut num_g = inv2; // (2k+1)! / x^(2k+2)
        let mut sign = 1.0;
        let mut prev_f = f64::INFINITY;
        for k in 0..16 {
            if num_f.abs() > prev_f {
                break; // asymptotic series started diverging
            }
            fx += sign * num_f;
            gx += sign * num_g;
            prev_f = num_f.abs();
            let k2 = 2.0 * k as f64;
            num_f *= (k2 + 1.0) * (k2 + 2.0) * inv2;
            num_g *= (k2 + 2.0) * (k2 + 3.0) * inv2;
            sign = -sign;
        }
        std::f64::consts::FRAC_PI_2 - fx * ax.cos() - gx * ax.sin()
    };
    if x < 0.0 {
        -s
    } else {
        s
    }
}

fn si_series(ax: f64) -> f64 {
    let mut term = ax;
    let mut sum = ax;
    let mut k = 1usize;
    loop {
        let k2 = 2.0 * k as f64;
        term *= -ax * ax / (k2 * (k2 + 1.0));
        let contrib = term / (k2 + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1.0) || k > 120 {
            break;
        }
        k += 1;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_exact() {
        let (v, _) = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(v, 4.0 - 4.0 + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_exponential() {
        let (v, e) = adaptive_simpson(&|x: f64| (6.0 * x).exp(), 0.0, 1.0, 1e-12);
        let exact = (6.0f64.exp() - 1.0) / 6.0;
        assert!((v - exact).abs() < 1e-9, "err {} est {}", (v - exact).abs(), e);
    }

    #[test]
    fn semi_infinite_decay() {
        let (v, _, xm) = semi_infinite(&|x: f64| (-2.0 * x).exp(), 0.0, 1e-10).unwrap();
        assert_relative_eq!(v, 0.5, epsilon = 1e-8);
        assert!(xm >= 10.0);
    }

    #[test]
    fn semi_infinite_flags_divergence() {
        // integrand -> 2 at infinity: divergent
        assert!(semi_infinite(&|x: f64| 2.0 / (1.0 + (-x).exp()), 0.0, 1e-10).is_none());
    }

    #[test]
    fn gauss_legendre_integrates_high_degree() {
        let (xs, ws) = gauss_legendre(8);
        // exact for polynomials of degree <= 15
        let val: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(14)).sum();
        assert_relative_eq!(val, 2.0 / 15.0, epsilon = 1e-13);
    }

    #[test]
    fn sine_integral_reference_values() {
        // Si(1) and Si(10) to published precision, plus the asymptotic regime.
        assert_relative_eq!(sine_integral(1.0), 0.9460830703671830, epsilon = 1e-13);
        assert_relative_eq!(sine_integral(10.0), 1.6583475942188740, epsilon = 1e-12);
        assert_relative_eq!(sine_integral(100.0), 1.5622254668890562, epsilon = 1e-12);
        assert_relative_eq!(sine_integral(-1.0), -0.9460830703671830, epsilon = 1e-13);
    }

    #[test]
    fn sine_integral_matches_direct_quadrature() {
        // independent route: straight quadrature of sin t / t from 0
        for x in [0.5, 11.5, 12.5, 20.0, 34.9, 35.1, 50.0] {
            let (direct, _) = adaptive_simpson(
                &|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t },
                0.0,
                x,
                1e-13,
            );
            let got = sine_integral(x);
            assert!(
                (got - direct).abs() < 5e-12,
                "Si({x}): {got} vs quadrature {direct}"
            );
        }
    }
}
