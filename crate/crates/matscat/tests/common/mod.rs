//! Closed-form reference solutions used as independent oracles. Everything
//! here is derived by hand from plane-wave matching or known exact
//! solutions and deliberately avoids the solver machinery in the crate.

#![allow(dead_code)]

use num_complex::Complex64;

pub type C64 = Complex64;

fn ic() -> C64 {
    C64::new(0.0, 1.0)
}

/// cos(κ d) and sin(κ d)/κ as branch-free functions of κ² (κ² = k² - v0).
fn cos_sinc(kappa2: C64, d: f64) -> (C64, C64) {
    if (kappa2 * d * d).norm() < 1e-12 {
        return (C64::new(1.0, 0.0), C64::new(d, 0.0));
    }
    let kappa = kappa2.sqrt();
    ((kappa * d).cos(), (kappa * d).sin() / kappa)
}

/// Scalar Jost solution f₊(k, x) and derivative for the square well
/// V = v0 on [a, b], zero elsewhere, by exact plane-wave matching.
pub fn square_well_fplus(k: C64, v0: f64, a: f64, b: f64, x: f64) -> (C64, C64) {
    let ik = ic() * k;
    if x >= b {
        let e = (ik * x).exp();
        return (e, ik * e);
    }
    // backpropagate from b through the constant region down to max(x, a):
    // f(b - d) = cos(κd) f(b) - sin(κd)/κ f'(b),
    // f'(b - d) = κ sin(κd) f(b) + cos(κd) f'(b),  κ² = k² - v0
    let eb = (ik * b).exp();
    let (fb, fpb) = (eb, ik * eb);
    let x_in = x.max(a);
    let d = b - x_in;
    let kappa2 = k * k - v0;
    let (c, s) = cos_sinc(kappa2, d);
    let f_in = c * fb - s * fpb;
    let fp_in = kappa2 * s * fb + c * fpb;
    if x >= a {
        return (f_in, fp_in);
    }
    // free region below a: f = α e^{ikx} + β e^{-ikx}
    let alpha = (f_in + fp_in / ik) * 0.5 * (-ik * a).exp();
    let beta = (f_in - fp_in / ik) * 0.5 * (ik * a).exp();
    let ep = (ik * x).exp();
    let em = (-ik * x).exp();
    (alpha * ep + beta * em, ik * (alpha * ep - beta * em))
}

/// Full-line transition coefficients for the square well: with
/// f₊(k, x) = A e^{ikx} + B e^{-ikx} on the left of the support,
/// A(k) and B(k) are exactly those plane-wave coefficients.
pub fn square_well_ab(k: C64, v0: f64, a: f64, b: f64) -> (C64, C64) {
    let ik = ic() * k;
    let x_probe = a - 1.0;
    let (f, fp) = square_well_fplus(k, v0, a, b, x_probe);
    let alpha = (f + fp / ik) * 0.5 * (-ik * x_probe).exp();
    let beta = (f - fp / ik) * 0.5 * (ik * x_probe).exp();
    (alpha, beta)
}

/// Half-line Dirichlet scattering matrix for a real scalar potential:
/// S(k) = -J(-k)/J(k) with J(k) = -i conj(f₊(-k, 0)).
pub fn square_well_dirichlet_s(k: f64, v0: f64, a: f64, b: f64) -> C64 {
    let kk = C64::new(k, 0.0);
    let j_at = |w: C64| -> C64 {
        let (f, _) = square_well_fplus(-w.conj(), v0, a, b, 0.0);
        -ic() * f.conj()
    };
    -j_at(-kk) / j_at(kk)
}

/// Dirichlet bound states of the scalar well on [0, b']: zeros of
/// f₊(iκ, 0) located by bisection of the exact matching expression.
pub fn square_well_dirichlet_bound_states(v0: f64, a: f64, b: f64, k_max: f64) -> Vec<f64> {
    let f = |kappa: f64| square_well_fplus(C64::new(0.0, kappa), v0, a, b, 0.0).0.re;
    bisect_all(&f, 1e-4, k_max, 4000)
}

/// Full-line bound states: zeros of A(iκ).
pub fn square_well_fullline_bound_states(v0: f64, a: f64, b: f64, k_max: f64) -> Vec<f64> {
    let f = |kappa: f64| square_well_ab(C64::new(0.0, kappa), v0, a, b).0.re;
    bisect_all(&f, 1e-4, k_max, 4000)
}

fn bisect_all(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / scan as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=scan {
        let x1 = lo + i as f64 * step;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b) = (x0, x1);
            let (mut fa, _) = (f0, f1);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 || (b - a) < 1e-14 {
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Reflectionless profile V = -2κ² sech²(κx): exact Jost solutions.
pub fn sech2_fplus(kappa: f64, k: C64, x: f64) -> (C64, C64) {
    let ik = ic() * k;
    let th = (kappa * x).tanh();
    let sech2 = 1.0 - th * th;
    let denom = k + ic() * kappa;
    let carrier = (ik * x).exp();
    let core = k + ic() * kappa * th;
    let dcore = ic() * (kappa * kappa * sech2);
    ((carrier * core) / denom, (carrier * (ik * core + dcore)) / denom)
}

pub fn sech2_fminus(kappa: f64, k: C64, x: f64) -> (C64, C64) {
    let ik = ic() * k;
    let th = (kappa * x).tanh();
    let sech2 = 1.0 - th * th;
    let denom = k + ic() * kappa;
    let carrier = (-ik * x).exp();
    let core = k - ic() * kappa * th;
    let dcore = -ic() * (kappa * kappa * sech2);
    ((carrier * core) / denom, (carrier * (-ik * core + dcore)) / denom)
}

/// A(k) = (k - iκ)/(k + iκ); T₊ = A⁻¹; B ≡ 0.
pub fn sech2_a(kappa: f64, k: C64) -> C64 {
    (k - ic() * kappa) / (k + ic() * kappa)
}

/// Robin boundary (V ≡ 0, scalar U = e^{iθ}): S(k) = -(B + ikA)/(B - ikA)
/// with A = (e^{iθ} + 1)/2, B = (i/2)(e^{iθ} - 1).
pub fn robin_s(theta: f64, k: C64) -> C64 {
    let u = (ic() * theta).exp();
    let a = (u + 1.0) * 0.5;
    let b = (u - 1.0) * ic() * 0.5;
    let ik = ic() * k;
    -(b + ik * a) / (b - ik * a)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    /// The oracle itself must solve -f'' + V f = k² f; verify by finite
    /// differences at interior points of each region.
    #[test]
    fn square_well_oracle_satisfies_equation() {
        let k = C64::new(1.3, 0.4);
        let (v0, a, b) = (-1.7, 0.0, 1.0);
        let h = 1e-5;
        for &x in &[0.3, 0.8, -0.6, 1.4] {
            let v = if (a..=b).contains(&x) { v0 } else { 0.0 };
            let (fm, _) = square_well_fplus(k, v0, a, b, x - h);
            let (f0, _) = square_well_fplus(k, v0, a, b, x);
            let (fp, _) = square_well_fplus(k, v0, a, b, x + h);
            let second = (fp - f0 * 2.0 + fm) / (h * h);
            let resid = (-second + f0 * v - k * k * f0).norm();
            assert!(resid < 1e-4, "equation residual {resid:.3e} at x = {x}");
        }
    }

    #[test]
    fn sech2_oracle_satisfies_equation() {
        let k = C64::new(0.9, 0.2);
        let kappa = 1.0_f64;
        let h = 1e-5;
        for &x in &[-1.2, 0.0, 0.7] {
            let th: f64 = (kappa * x).tanh();
            let v = -2.0 * kappa * kappa * (1.0 - th * th);
            let (fm, _) = sech2_fminus(kappa, k, x - h);
            let (f0, d0) = sech2_fminus(kappa, k, x);
            let (fp, _) = sech2_fminus(kappa, k, x + h);
            let second = (fp - f0 * 2.0 + fm) / (h * h);
            assert!((-second + f0 * v - k * k * f0).norm() < 1e-4);
            // derivative consistency
            let fd = (fp - fm) / (2.0 * h);
            assert!((fd - d0).norm() < 1e-6);
        }
    }

    #[test]
    fn square_well_fplus_matches_frozen_value() {
        // v0 = -1 on [0,1], k = 1: f₊(1,0) = e^{i}[cos√2 - (i/√2) sin√2],
        // f₊'(1,0) = e^{i}[√2 sin√2 + i cos√2]
        let s2 = 2.0_f64.sqrt();
        let ei = (C64::new(0.0, 1.0)).exp();
        let expected_f = ei * (C64::new(s2.cos(), 0.0) - C64::new(0.0, s2.sin() / s2));
        let expected_fp = ei * C64::new(s2 * s2.sin(), s2.cos());
        let (f, fp) = square_well_fplus(C64::new(1.0, 0.0), -1.0, 0.0, 1.0, 0.0);
        assert!((f - expected_f).norm() < 1e-14);
        assert!((fp - expected_fp).norm() < 1e-14);
    }

    #[test]
    fn free_limits() {
        // v0 = 0 collapses to plane waves everywhere
        let k = C64::new(0.8, -0.3);
        for &x in &[-0.5, 0.2, 2.0] {
            let (f, fp) = square_well_fplus(k, 0.0, 0.0, 1.0, x);
            let e = (ic() * k * x).exp();
            assert!((f - e).norm() < 1e-12);
            assert!((fp - ic() * k * e).norm() < 1e-12);
        }
        let (a, b) = square_well_ab(C64::new(1.1, 0.0), 0.0, 0.0, 1.0);
        assert!((a - 1.0).norm() < 1e-12);
        assert!(b.norm() < 1e-12);
    }

    #[test]
    fn robin_s_has_expected_form() {
        // θ = π/2: S(k) = -(1 - ik)/(1 + ik); pole at k = i, S(1) = -(1-i)/(1+i) = i... verify numerically
        let s = robin_s(std::f64::consts::FRAC_PI_2, C64::new(1.0, 0.0));
        let expected = -(C64::new(1.0, -1.0)) / C64::new(1.0, 1.0);
        assert!((s - expected).norm() < 1e-14);
    }
}
