//! Contour integration utilities: circle residues by the trapezoid rule
//! (spectrally accurate for analytic integrands), Cauchy reconstruction on
//! rectangles, and zero counting/location via logarithmic derivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::quad;

/// Residue of a matrix-valued meromorphic function at `center` by the
/// composite trapezoid rule on |z - center| = radius, doubling the node
/// count from `nodes_start` until the result changes by less than `tol`
/// (or `max_nodes` is reached). Returns the residue and the last delta.
pub fn circle_residue<F>(
    f: &F,
    center: Complex64,
    radius: f64,
    nodes_start: usize,
    tol: f64,
    max_nodes: usize,
) -> Result<(CMat, f64)>
where
    F: Fn(Complex64) -> Result<CMat>,
{
    if radius <= 0.0 {
        return Err(Error::BadContourRadius { radius, reason: "radius must be positive".into() });
    }
    let mut nodes = nodes_start.max(8);
    let mut prev: Option<CMat> = None;
    let mut delta = f64::INFINITY;
    loop {
        let value = circle_residue_fixed(f, center, radius, nodes)?;
        if let Some(p) = &prev {
            delta = (&value - p).norm();
            if delta < tol {
                return Ok((value, delta));
            }
        }
        prev = Some(value);
        nodes *= 2;
        if nodes > max_nodes {
            return Ok((prev.unwrap(), delta));
        }
    }
}

/// One trapezoid pass: Res = (r / M) Σ f(c + r e^{iθ_m}) e^{iθ_m}.
pub fn circle_residue_fixed<F>(f: &F, center: Complex64, radius: f64, nodes: usize) -> Result<CMat>
where
    F: Fn(Complex64) -> Result<CMat>,
{
    let mut acc: Option<CMat> = None;
    for m in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / nodes as f64;
        let phase = C64::new(0.0, theta).exp();
        let z = center + phase * radius;
        let val = f(z)?.map(|e| e * phase);
        acc = Some(match acc {
            None => val,
            Some(a) => a + val,
        });
    }
    Ok(acc.unwrap().map(|e| e * (radius / nodes as f64)))
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Rectangle {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rectangle {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_lo && z.re < self.re_hi && z.im > self.im_lo && z.im < self.im_hi
    }

    /// Corners in counterclockwise order starting at the lower-left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            C64::new(self.re_lo, self.im_lo),
            C64::new(self.re_hi, self.im_lo),
            C64::new(self.re_hi, self.im_hi),
            C64::new(self.re_lo, self.im_hi),
        ]
    }
}

/// Cauchy reconstruction f(z0) = (1/2πi) ∮ f(z)/(z - z0) dz over the
/// rectangle boundary, with `nodes_per_edge`-point Gauss-Legendre on each
/// edge. Valid when f is analytic on and inside the rectangle and z0 is
/// strictly inside.
pub fn cauchy_rectangle<F>(
    f: &F,
    rect: Rectangle,
    z0: Complex64,
    nodes_per_edge: usize,
) -> Result<CMat>
where
    F: Fn(Complex64) -> Result<CMat>,
{
    if !rect.contains(z0) {
        return Err(Error::BadContourRadius {
            radius: 0.0,
            reason: format!("z0 = {z0} is not inside the rectangle"),
        });
    }
    let (gl_x, gl_w) = quad::gauss_legendre(nodes_per_edge);
    let corners = rect.corners();
    let mut acc: Option<CMat> = None;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let mid = (a + b) * 0.5;
        let half = (b - a) * 0.5;
        for (&x, &w) in gl_x.iter().zip(&gl_w) {
            let z = mid + half * x;
            let val = f(z)?.map(|v| v * (half * w / (z - z0)));
            acc = Some(match acc {
                None => val,
                Some(s) => s + val,
            });
        }
    }
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok(acc.unwrap().map(|v| v / two_pi_i))
}

/// Winding number of φ along the rectangle boundary: the number of zeros
/// inside, counted with multiplicity, when φ is analytic and nonzero on
/// the boundary. Samples adaptively until consecutive phase jumps are
/// below π/2.
pub fn winding_number<F>(phi: &F, rect: Rectangle, start_per_edge: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut per_edge = start_per_edge.max(16);
    'outer: for _ in 0..8 {
        let corners = rect.corners();
        let mut samples: Vec<Complex64> = Vec::with_capacity(4 * per_edge + 1);
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            for i in 0..per_edge {
                let t = i as f64 / per_edge as f64;
                samples.push(a + (b - a) * t);
            }
        }
        samples.push(corners[0]);

        let mut total = 0.0;
        let mut prev = phi(samples[0])?;
        if prev.norm() == 0.0 {
            return Err(Error::Numerical("zero of φ on the contour".into()));
        }
        for &z in &samples[1..] {
            let cur = phi(z)?;
            if cur.norm() == 0.0 {
                return Err(Error::Numerical("zero of φ on the contour".into()));
            }
            let jump = (cur / prev).arg();
            if jump.abs() > std::f64::consts::FRAC_PI_2 {
                per_edge *= 2;
                continue 'outer;
            }
            total += jump;
            prev = cur;
        }
        let winding = total / (2.0 * std::f64::consts::PI);
        let rounded = winding.round();
        if (winding - rounded).abs() > 0.25 {
            per_edge *= 2;
            continue;
        }
        return Ok(rounded as i64);
    }
    Err(Error::Numerical("winding number failed to stabilize".into()))
}

/// Zero count and centroid of zeros inside |z - center| = radius.
///
/// Uses ∮ z φ'/φ dz = 2πi Σ roots, rewritten by parts as
/// z_start·2πi·N - ∮ log φ dz with a branch-continuous log. Splitting off
/// the winding part iNθ leaves a periodic analytic integrand, so the
/// trapezoid rule is spectrally accurate. Robust where Newton degrades
/// (multiple or clustered roots).
pub fn circle_zero_centroid<F>(
    phi: &F,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Result<(i64, Complex64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut m = nodes.max(64);
    'retry: loop {
        let dtheta = 2.0 * std::f64::consts::PI / m as f64;
        let mut log_vals = Vec::with_capacity(m + 1);
        let mut arg_acc = 0.0f64;
        let mut prev: Option<Complex64> = None;
        for j in 0..=m {
            let theta = dtheta * j as f64;
            let z = center + C64::new(0.0, theta).exp() * radius;
            let v = phi(z)?;
            if v.norm() == 0.0 {
                return Err(Error::Numerical("zero of φ on the centroid contour".into()));
            }
            if let Some(p) = prev {
                let jump = (v / p).arg();
                if jump.abs() > 0.8 * std::f64::consts::PI && m < 2048 {
                    m *= 2;
                    continue 'retry;
                }
                arg_acc += jump;
            } else {
                arg_acc = v.arg();
            }
            log_vals.push(C64::new(v.norm().ln(), arg_acc));
            prev = Some(v);
        }
        let winding = (log_vals[m].im - log_vals[0].im) / (2.0 * std::f64::consts::PI);
        let count = winding.round();
        if (winding - count).abs() > 0.2 {
            if m < 2048 {
                m *= 2;
                continue;
            }
            return Err(Error::Numerical(format!(
                "zero count did not stabilize on circle: winding {winding}"
            )));
        }
        if count == 0.0 {
            return Ok((0, center));
        }

        // trapezoid of the periodic part (log φ - iNθ) z'(θ), plus the exact
        // contribution of the winding part: iN ∮ θ z' dθ = iN · 2πr
        let n_winding = count;
        let mut integral = C64::new(0.0, 0.0);
        for j in 0..m {
            let theta = dtheta * j as f64;
            let zp = C64::new(0.0, 1.0) * C64::new(0.0, theta).exp() * radius;
            let periodic = log_vals[j] - C64::new(0.0, n_winding * theta);
            integral += periodic * zp * dtheta;
        }
        integral += C64::new(0.0, n_winding) * (2.0 * std::f64::consts::PI * radius);

        let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
        let z_start = center + radius;
        let roots_sum = z_start * n_winding - integral / two_pi_i;
        let centroid = roots_sum / n_winding;
        return Ok((count as i64, centroid));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(f: impl Fn(Complex64) -> Complex64) -> impl Fn(Complex64) -> Result<CMat> {
        move |z| Ok(CMat::from_element(1, 1, f(z)))
    }

    #[test]
    fn residue_of_simple_pole() {
        // f(z) = 3i/(z - (1+2i)) + e^z
        let pole = C64::new(1.0, 2.0);
        let res = C64::new(0.0, 3.0);
        let f = scalar(move |z| res / (z - pole) + z.exp());
        let (value, delta) = circle_residue(&f, pole, 0.5, 16, 1e-12, 1024).unwrap();
        assert!((value[(0, 0)] - res).norm() < 1e-10, "residue {}", value[(0, 0)]);
        assert!(delta < 1e-10);
    }

    #[test]
    fn residue_of_entire_function_vanishes() {
        let f = scalar(|z| z.exp() * z);
        let (value, _) = circle_residue(&f, C64::new(0.3, 0.1), 0.7, 16, 1e-13, 512).unwrap();
        assert!(value[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn cauchy_rectangle_reconstructs_interior_value() {
        let f = scalar(|z| (z * C64::new(0.7, 0.2)).exp() + z * z);
        let rect = Rectangle { re_lo: -1.0, re_hi: 1.0, im_lo: -1.0, im_hi: 0.5 };
        let z0 = C64::new(0.2, -0.3);
        let got = cauchy_rectangle(&f, rect, z0, 48).unwrap();
        let expected = (z0 * C64::new(0.7, 0.2)).exp() + z0 * z0;
        assert!((got[(0, 0)] - expected).norm() < 1e-12);
    }

    #[test]
    fn winding_counts_zeros_with_multiplicity() {
        // φ(z) = (z - 0.5)^2 (z + 0.25 - 0.1i) e^z has 3 zeros in the box
        let phi = |z: Complex64| -> Result<Complex64> {
            let a = z - C64::new(0.5, 0.0);
            let b = z + C64::new(0.25, -0.1);
            Ok(a * a * b * z.exp())
        };
        let rect = Rectangle { re_lo: -1.0, re_hi: 1.0, im_lo: -0.6, im_hi: 0.6 };
        assert_eq!(winding_number(&phi, rect, 32).unwrap(), 3);

        let rect_empty = Rectangle { re_lo: 2.0, re_hi: 3.0, im_lo: -0.5, im_hi: 0.5 };
        assert_eq!(winding_number(&phi, rect_empty, 32).unwrap(), 0);
    }

    #[test]
    fn centroid_locates_double_root() {
        let root = C64::new(0.4, -0.2);
        let phi = move |z: Complex64| -> Result<Complex64> {
            let d = z - root;
            Ok(d * d * (z + C64::new(3.0, 0.0)).exp())
        };
        let (count, centroid) =
            circle_zero_centroid(&phi, C64::new(0.35, -0.15), 0.3, 128).unwrap();
        assert_eq!(count, 2);
        assert_relative_eq!(centroid.re, root.re, epsilon = 1e-8);
        assert_relative_eq!(centroid.im, root.im, epsilon = 1e-8);
    }
}
