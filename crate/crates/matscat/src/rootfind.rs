//! Root location for analytic functions along the positive imaginary axis,
//! parameterized as φ(κ) = det J(iκ) with κ in a right half-plane where φ
//! is analytic. Scan for |φ| dips, polish by complex Newton with a
//! finite-difference derivative, cross-check the total count with the
//! argument principle, and fall back to circle centroids for clustered or
//! degenerate roots.

use num_complex::Complex64;

use crate::contour::{circle_zero_centroid, winding_number, Rectangle};
use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy)]
pub struct RootFindOptions {
    /// Scan resolution along (0, k_max].
    pub scan_points: usize,
    /// |φ| refinement target relative to the scan scale.
    pub rel_tol: f64,
    pub newton_max_iter: usize,
    /// Half-height of the argument-principle cross-check box.
    pub box_half_height: f64,
}

impl Default for RootFindOptions {
    fn default() -> Self {
        RootFindOptions {
            scan_points: 400,
            rel_tol: 1e-12,
            newton_max_iter: 60,
            box_half_height: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AxisRoot {
    pub kappa: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

/// All roots of φ on the segment (kappa_min, kappa_max], refined until
/// |φ| < rel_tol * scale. The count is verified against the argument
/// principle on the enclosing box; disagreement is an error.
pub fn axis_roots<F>(
    phi: &F,
    kappa_min: f64,
    kappa_max: f64,
    opts: &RootFindOptions,
) -> Result<Vec<AxisRoot>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if kappa_max <= kappa_min {
        return Ok(vec![]);
    }
    let n = opts.scan_points.max(16);
    let step = (kappa_max - kappa_min) / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| kappa_min + i as f64 * step).collect();
    let mut vals = Vec::with_capacity(grid.len());
    for &x in &grid {
        vals.push(phi(C64::new(x, 0.0))?);
    }
    let scale = vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);

    // candidate dips: local minima of |φ| that are small against neighbors
    let mut candidates: Vec<f64> = Vec::new();
    for i in 1..grid.len() - 1 {
        let (a, b, c) = (vals[i - 1].norm(), vals[i].norm(), vals[i + 1].norm());
        if b <= a && b <= c && b < 0.5 * scale {
            candidates.push(grid[i]);
        }
    }
    // sign-change style detection via phase rotation between neighbors
    for i in 0..grid.len() - 1 {
        let rot = (vals[i + 1] / vals[i]).arg().abs();
        if rot > 2.5 && vals[i].norm() > 0.0 {
            candidates.push(0.5 * (grid[i] + grid[i + 1]));
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roots: Vec<AxisRoot> = Vec::new();
    for &c in &candidates {
        match polish_root(phi, C64::new(c, 0.0), scale, opts) {
            Ok(Some(root)) => {
                let kappa = root.kappa;
                if kappa <= kappa_min || kappa > kappa_max + 1e-9 {
                    continue;
                }
                if roots.iter().all(|r| (r.kappa - kappa).abs() > 20.0 * step.min(1e-3)) {
                    roots.push(root);
                }
            }
            Ok(None) => {}
            Err(_) => {}
        }
    }
    roots.sort_by(|a, b| a.kappa.partial_cmp(&b.kappa).unwrap());
    // merge near-duplicates from adjacent candidates
    roots.dedup_by(|a, b| (a.kappa - b.kappa).abs() < 1e-7 * (1.0 + b.kappa.abs()));

    // cross-check the total multiplicity with the argument principle
    let rect = Rectangle {
        re_lo: kappa_min,
        re_hi: kappa_max,
        im_lo: -opts.box_half_height,
        im_hi: opts.box_half_height,
    };
    let winding = winding_number(phi, rect, 4 * n)?;
    let found: i64 = roots.iter().map(|r| r.multiplicity as i64).sum();
    if winding != found {
        return Err(Error::RootCountMismatch {
            refined: found as usize,
            winding: winding.max(0) as usize,
        });
    }
    Ok(roots)
}

/// Newton polish with a centered finite-difference derivative; falls back
/// to a circle-centroid solve when Newton stalls (multiple roots).
fn polish_root<F>(
    phi: &F,
    start: Complex64,
    scale: f64,
    opts: &RootFindOptions,
) -> Result<Option<AxisRoot>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = start;
    let mut best = (f64::INFINITY, z);
    for _ in 0..opts.newton_max_iter {
        let f = phi(z)?;
        let fn_norm = f.norm();
        if fn_norm < best.0 {
            best = (fn_norm, z);
        }
        if fn_norm < opts.rel_tol * scale {
            let multiplicity = confirm_multiplicity(phi, z)?;
            return Ok(Some(AxisRoot {
                kappa: z.re,
                multiplicity: multiplicity.max(1) as usize,
                residual: fn_norm / scale,
            }));
        }
        let h = 1e-7 * (1.0 + z.norm());
        let fp = (phi(z + C64::new(h, 0.0))? - phi(z - C64::new(h, 0.0))?) / (2.0 * h);
        if fp.norm() == 0.0 {
            break;
        }
        let step = f / fp;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    // Newton stalled: try the centroid fallback around the best point
    let radius = 5e-4 * (1.0 + best.1.norm());
    if let Ok((count, centroid)) = circle_zero_centroid(phi, best.1, radius, 128) {
        if count > 0 {
            let res = phi(centroid)?.norm() / scale;
            return Ok(Some(AxisRoot {
                kappa: centroid.re,
                multiplicity: count as usize,
                residual: res,
            }));
        }
        return Ok(None);
    }
    if best.0 < 1e-6 * scale {
        return Ok(Some(AxisRoot { kappa: best.1.re, multiplicity: 1, residual: best.0 / scale }));
    }
    Ok(None)
}

fn confirm_multiplicity<F>(phi: &F, z: Complex64) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let radius = 1e-4 * (1.0 + z.norm());
    match circle_zero_centroid(phi, z, radius, 96) {
        Ok((count, _)) => Ok(count),
        Err(_) => Ok(1),
    }
}
