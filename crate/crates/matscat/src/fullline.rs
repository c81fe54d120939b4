//! Full-line scattering: transition coefficients A(k), B(k), C(k), D(k),
//! the transmission/reflection quartet T±, S±, bound-state residues and
//! weight matrices, normalized Jost solutions, and the Weyl matrix of
//! right-supported potentials computed from the left reflection
//! coefficient alone.
//!
//! Conventions:
//!   A(k) =  (1/2ik) [f₋(-k̄,x)†; f₊(k,x)]      C(k) = -B(k̄)†
//!   B(k) = -(1/2ik) [f₋(k̄,x)†; f₊(k,x)]       D(k) =  A(-k̄)†
//!   T₊ = A⁻¹, T₋ = D⁻¹, S₋ = B A⁻¹, S₊ = C D⁻¹
//! and the 2n x 2n scattering matrix is [[T₊, S₊], [S₋, T₋]]. The
//! Wronskians are evaluated at one x and their constancy verified at
//! three others.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::circle_residue;
use crate::error::{Error, Result};
use crate::jost::{wronskian, JostEvaluation, JostOptions, JostSolver, Side};
use crate::linalg::{self, C64, CMat};
use crate::potential::{DecayCertificate, LineDomain, PotentialModel, Support};
use crate::rootfind::{axis_roots, RootFindOptions};

#[derive(Debug, Clone, Copy)]
pub struct FullLineOptions {
    pub jost: JostOptions,
    /// Error threshold on the x-spread of the defining Wronskians.
    pub wronskian_tol: f64,
    pub singular_rel_tol: f64,
    pub contour_radius_factor: f64,
    pub contour_nodes: usize,
    pub contour_tol: f64,
    pub scan_points: usize,
    /// x-sample count for the least-squares weight solve.
    pub lsq_points: usize,
}

impl Default for FullLineOptions {
    fn default() -> Self {
        FullLineOptions {
            jost: JostOptions::default(),
            wronskian_tol: 1e-6,
            singular_rel_tol: 1e-10,
            contour_radius_factor: 0.5,
            contour_nodes: 64,
            contour_tol: 1e-9,
            scan_points: 400,
            lsq_points: 8,
        }
    }
}

/// A(k), B(k), C(k), D(k) at one wavenumber.
#[derive(Debug, Clone)]
pub struct TransitionCoefficients {
    pub k: Complex64,
    pub ak: CMat,
    pub bk: CMat,
    pub ck: CMat,
    pub dk: CMat,
    /// Max relative drift of the defining Wronskians across the probe xs.
    pub wronskian_spread: f64,
    pub err_est: f64,
}

#[derive(Debug, Clone)]
pub struct QuartetSample {
    pub k: Complex64,
    pub tplus: CMat,
    pub tminus: CMat,
    pub splus: CMat,
    pub sminus: CMat,
    pub err_est: f64,
}

impl QuartetSample {
    /// Block layout [[T₊, S₊], [S₋, T₋]].
    pub fn assembled(&self) -> CMat {
        let n = self.tplus.nrows();
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.tplus);
        m.view_mut((0, n), (n, n)).copy_from(&self.splus);
        m.view_mut((n, 0), (n, n)).copy_from(&self.sminus);
        m.view_mut((n, n), (n, n)).copy_from(&self.tminus);
        m
    }
}

#[derive(Debug, Clone)]
pub struct ScatteringQuartet {
    pub samples: Vec<QuartetSample>,
}

/// Bound state on the line: residues of T± and the weight matrices.
#[derive(Debug, Clone)]
pub struct BoundStateFullLine {
    pub kj: f64,
    pub multiplicity: usize,
    pub rjplus: CMat,
    pub rjminus: CMat,
    pub njplus: CMat,
    pub njminus: CMat,
    pub err_est: f64,
}

#[derive(Debug, Clone)]
pub struct WeylMatrixValue {
    pub k: Complex64,
    pub m: CMat,
    pub err_est: f64,
}

pub struct FullLineProblem<'a> {
    pub model: &'a PotentialModel,
    pub cert: &'a DecayCertificate,
    pub opts: FullLineOptions,
}

impl<'a> FullLineProblem<'a> {
    pub fn new(model: &'a PotentialModel, cert: &'a DecayCertificate) -> Result<FullLineProblem<'a>> {
        if model.line() != LineDomain::FullLine {
            return Err(Error::Config("full-line operations need a full-line model".into()));
        }
        Ok(FullLineProblem { model, cert, opts: FullLineOptions::default() })
    }

    pub fn with_options(mut self, opts: FullLineOptions) -> Self {
        self.opts = opts;
        self
    }

    fn solver(&self) -> JostSolver<'a> {
        JostSolver::new(self.model, self.cert).with_options(self.opts.jost)
    }

    /// Probe points: the Wronskian is formed at xs[0] and checked at the rest.
    fn probe_xs(&self) -> Vec<f64> {
        let scale = self.cert.x_max.clamp(0.5, 3.0);
        vec![0.0, -0.4 * scale, 0.3 * scale, 0.7 * scale]
    }

    /// Evaluate A, B, C, D at k with the constancy cross-check.
    pub fn coefficients(&self, k: Complex64) -> Result<TransitionCoefficients> {
        let xs = self.probe_xs();
        let solver = self.solver();
        let mut cache: HashMap<(u64, u64, bool), Vec<JostEvaluation>> = HashMap::new();
        let mut eval = |kk: Complex64, side: Side| -> Result<Vec<JostEvaluation>> {
            let key = (kk.re.to_bits(), kk.im.to_bits(), side == Side::Plus);
            if let Some(v) = cache.get(&key) {
                return Ok(v.clone());
            }
            let v = match side {
                Side::Plus => solver.jost_plus(kk, &xs)?,
                Side::Minus => solver.jost_minus(kk, &xs)?,
            };
            cache.insert(key, v.clone());
            Ok(v)
        };

        let kc = k.conj();
        let f_plus_k = eval(k, Side::Plus)?;
        let f_minus_mkc = eval(-kc, Side::Minus)?;
        let f_minus_kc = eval(kc, Side::Minus)?;
        // sub-evaluations entering C(k) and D(k) through the adjoint identities
        let f_plus_kc = eval(kc, Side::Plus)?;
        let f_minus_k = eval(k, Side::Minus)?;
        let f_plus_mkc = eval(-kc, Side::Plus)?;

        let inv_2ik = C64::new(1.0, 0.0) / (C64::new(0.0, 2.0) * k);
        let inv_2ikc = C64::new(1.0, 0.0) / (C64::new(0.0, 2.0) * kc);
        let inv_2imkc = C64::new(1.0, 0.0) / (C64::new(0.0, 2.0) * (-kc));

        let mut spread: f64 = 0.0;
        let mut err: f64 = 0.0;

        // A(k) over the probe set
        let ak = self.wronskian_series(&f_minus_mkc, &f_plus_k, inv_2ik, 1.0, &mut spread, &mut err)?;
        // B(k)
        let bk = self.wronskian_series(&f_minus_kc, &f_plus_k, inv_2ik, -1.0, &mut spread, &mut err)?;
        // C(k) = -B(k̄)†: B(k̄) = -(1/2ik̄) [f₋(k)†; f₊(k̄)]
        let b_at_kc =
            self.wronskian_series(&f_minus_k, &f_plus_kc, inv_2ikc, -1.0, &mut spread, &mut err)?;
        let ck = b_at_kc.adjoint().map(|e| -e);
        // D(k) = A(-k̄)†: A(-k̄) = (1/2i(-k̄)) [f₋(k)†... with -(-k̄)‾ = k
        let a_at_mkc =
            self.wronskian_series(&f_minus_k, &f_plus_mkc, inv_2imkc, 1.0, &mut spread, &mut err)?;
        let dk = a_at_mkc.adjoint();

        if spread > self.opts.wronskian_tol {
            return Err(Error::WronskianDrift { spread, tol: self.opts.wronskian_tol });
        }
        Ok(TransitionCoefficients { k, ak, bk, ck, dk, wronskian_spread: spread, err_est: err })
    }

    /// (sign/2ik) [g†; h] at the first probe x, with the spread across the
    /// remaining probes folded into `spread`.
    fn wronskian_series(
        &self,
        g: &[JostEvaluation],
        h: &[JostEvaluation],
        scale: C64,
        sign: f64,
        spread: &mut f64,
        err: &mut f64,
    ) -> Result<CMat> {
        let mut first: Option<CMat> = None;
        for (ge, he) in g.iter().zip(h.iter()) {
            let w = wronskian(ge, he)?.map(|e| e * scale * sign);
            *err += (ge.err_est + he.err_est) * scale.norm();
            match &first {
                None => first = Some(w),
                Some(f0) => {
                    let rel = (&w - f0).norm() / f0.norm().max(1.0);
                    *spread = spread.max(rel);
                }
            }
        }
        Ok(first.unwrap())
    }

    /// T±, S± on a wavenumber grid (parallel across k).
    pub fn quartet(&self, ks: &[f64]) -> Result<ScatteringQuartet> {
        let samples: Vec<QuartetSample> = ks
            .par_iter()
            .map(|&k| self.quartet_at(C64::new(k, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatteringQuartet { samples })
    }

    pub fn quartet_at(&self, k: Complex64) -> Result<QuartetSample> {
        let co = self.coefficients(k)?;
        self.quartet_from_coefficients(&co)
    }

    fn quartet_from_coefficients(&self, co: &TransitionCoefficients) -> Result<QuartetSample> {
        for (name, m) in [("A", &co.ak), ("D", &co.dk)] {
            let svd = m.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
            if smin < self.opts.singular_rel_tol * smax {
                return Err(Error::NearSingularJost { k: co.k, det: linalg::determinant(m).norm() })
                    .map_err(|e| e.in_stage(&format!("{name}(k) inversion")));
            }
        }
        let tplus = linalg::inverse(&co.ak)?;
        let tminus = linalg::inverse(&co.dk)?;
        let sminus = &co.bk * &tplus;
        let splus = &co.ck * &tminus;
        Ok(QuartetSample {
            k: co.k,
            tplus,
            tminus,
            splus,
            sminus,
            err_est: co.err_est,
        })
    }

    /// det A(iκ), analytic for Re κ > 0.
    pub fn det_a_on_axis(&self, kappa: Complex64) -> Result<Complex64> {
        let k = C64::new(0.0, 1.0) * kappa;
        let xs = [0.0];
        let solver = self.solver();
        let f_plus = solver.jost_plus(k, &xs)?.remove(0);
        // -k̄ for k = iκ with κ in the right half-plane stays upper
        let f_minus = solver.jost_minus(-k.conj(), &xs)?.remove(0);
        let w = wronskian(&f_minus, &f_plus)?;
        let a = w.map(|e| e / (C64::new(0.0, 2.0) * k));
        Ok(linalg::determinant(&a))
    }

    /// Zeros of det A on iR⁺, cross-checked against pole dips of T±.
    pub fn find_bound_states(&self, k_max: f64) -> Result<Vec<(f64, usize)>> {
        let phi = |kappa: Complex64| self.det_a_on_axis(kappa);
        let opts = RootFindOptions { scan_points: self.opts.scan_points, ..Default::default() };
        let kappa_min = 1e-3 * k_max.max(1e-3);
        let roots = axis_roots(&phi, kappa_min, k_max, &opts)?;
        let kjs: Vec<(f64, usize)> = roots.iter().map(|r| (r.kappa, r.multiplicity)).collect();

        // pole scan of T± along iR⁺ (both live in the upper half plane)
        let n_pts = self.opts.scan_points;
        let grid: Vec<f64> = (0..=n_pts)
            .map(|i| kappa_min + (k_max - kappa_min) * i as f64 / n_pts as f64)
            .collect();
        let w: Vec<f64> = grid
            .par_iter()
            .map(|&kappa| match self.quartet_at(C64::new(0.0, kappa)) {
                Ok(q) => 1.0 / q.tplus.norm().max(q.tminus.norm()).max(1e-300),
                Err(_) => 0.0,
            })
            .collect();
        let mut sorted = w.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        let dips: Vec<f64> = (1..grid.len() - 1)
            .filter(|&i| w[i] <= w[i - 1] && w[i] <= w[i + 1] && w[i] < 0.3 * median)
            .map(|i| grid[i])
            .collect();
        if dips.len() != kjs.len() {
            return Err(Error::PoleScanMismatch(format!(
                "det A roots {:?} vs T± pole dips {:?}",
                kjs.iter().map(|r| r.0).collect::<Vec<_>>(),
                dips
            )));
        }
        Ok(kjs)
    }

    fn contour_radius(&self, kj: f64, all_kj: &[f64]) -> Result<f64> {
        let gap = all_kj
            .iter()
            .filter(|&&other| (other - kj).abs() > 1e-12)
            .map(|&other| (other - kj).abs())
            .fold(f64::INFINITY, f64::min);
        let radius = self.opts.contour_radius_factor * gap.min(kj);
        if radius <= 0.0 {
            return Err(Error::BadContourRadius { radius, reason: "degenerate radius".into() });
        }
        Ok(radius)
    }

    /// R_j± by contour integration of T± around i k_j, then the weight
    /// matrices N_j⁻ = -i B(i k_j) R_j⁻ and N_j⁺ = i C(i k_j) R_j⁺.
    /// B and C at i k_j live on the continuation, so gamma > k_j is required.
    pub fn weights_from_scattering(&self, kj: f64, all_kj: &[f64]) -> Result<BoundStateFullLine> {
        if !self.cert.strip_available(-kj) {
            return Err(Error::OutsideStrip {
                k: C64::new(0.0, -kj),
                gamma: self.cert.gamma,
                needed: kj,
            });
        }
        let radius = self.contour_radius(kj, all_kj)?;
        let center = C64::new(0.0, kj);
        let t_plus_eval = |z: Complex64| Ok(self.quartet_at(z)?.tplus);
        let t_minus_eval = |z: Complex64| Ok(self.quartet_at(z)?.tminus);
        let (rjplus, d1) = circle_residue(
            &t_plus_eval,
            center,
            radius,
            self.opts.contour_nodes,
            self.opts.contour_tol,
            512,
        )?;
        let (rjminus, d2) = circle_residue(
            &t_minus_eval,
            center,
            radius,
            self.opts.contour_nodes,
            self.opts.contour_tol,
            512,
        )?;

        let co = self.coefficients(center)?;
        let njminus = (&co.bk * &rjminus).map(|e| e * C64::new(0.0, -1.0));
        let njplus = (&co.ck * &rjplus).map(|e| e * C64::new(0.0, 1.0));
        let njminus = psd_check(&njminus, "N_j^-")?;
        let njplus = psd_check(&njplus, "N_j^+")?;
        Ok(BoundStateFullLine {
            kj,
            multiplicity: 1,
            rjplus,
            rjminus,
            njplus,
            njminus,
            err_est: d1 + d2,
        })
    }

    /// Solve f₊(i k_j, x) R_j⁻ = i f₋(i k_j, x) N_j⁻ for N_j⁻ in the
    /// least-squares sense over a spread of x samples.
    pub fn weights_direct(&self, kj: f64, rjminus: &CMat) -> Result<(CMat, f64)> {
        let n = self.model.n();
        let k = C64::new(0.0, kj);
        let span = self.cert.x_max.clamp(0.5, 4.0);
        let m = self.opts.lsq_points.max(4);
        let xs: Vec<f64> = (0..m)
            .map(|i| -span + 2.0 * span * i as f64 / (m - 1) as f64)
            .collect();
        let solver = self.solver();
        let fplus = solver.jost_plus(k, &xs)?;
        let fminus = solver.jost_minus(k, &xs)?;

        let mut lhs = CMat::zeros(m * n, n);
        let mut rhs = CMat::zeros(m * n, n);
        for (s, (fp, fm)) in fplus.iter().zip(fminus.iter()).enumerate() {
            let a_block = fm.f.map(|e| e * C64::new(0.0, 1.0));
            let b_block = &fp.f * rjminus;
            lhs.view_mut((s * n, 0), (n, n)).copy_from(&a_block);
            rhs.view_mut((s * n, 0), (n, n)).copy_from(&b_block);
        }
        let svd = lhs.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < 1e-12 * smax {
            return Err(Error::RankDeficient(format!(
                "stacked weight system has σ_min/σ_max = {:.3e}; sample more x points",
                smin / smax
            )));
        }
        let nj = svd
            .solve(&rhs, 1e-14 * smax)
            .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
        let residual = (&lhs * &nj - &rhs).norm() / rhs.norm().max(1e-300);
        Ok((nj, residual))
    }

    /// f₀± = f± T± at (k, x); optionally verify the completeness relation
    /// f₀± = f∓(-k, x) + f∓(k, x) S∓(k) and return its defect.
    pub fn jost_normalized(
        &self,
        k: Complex64,
        x: f64,
        verify: bool,
    ) -> Result<(CMat, CMat, Option<f64>)> {
        let q = self.quartet_at(k)?;
        let solver = self.solver();
        let fp = solver.jost_plus(k, &[x])?.remove(0);
        let fm = solver.jost_minus(k, &[x])?.remove(0);
        let f0plus = &fp.f * &q.tplus;
        let f0minus = &fm.f * &q.tminus;
        let defect = if verify {
            let fp_neg = solver.jost_plus(-k, &[x])?.remove(0);
            let fm_neg = solver.jost_minus(-k, &[x])?.remove(0);
            let rhs_plus = &fm_neg.f + &fm.f * &q.sminus;
            let rhs_minus = &fp_neg.f + &fp.f * &q.splus;
            let d = (&f0plus - rhs_plus).norm().max((&f0minus - rhs_minus).norm());
            Some(d)
        } else {
            None
        };
        Ok((f0plus, f0minus, defect))
    }

    /// Weyl matrix from the left reflection coefficient for potentials
    /// vanishing on (-inf, 0): M(k) = (I + S₋(k)) [ik (I - S₋(k))]⁻¹.
    ///
    /// The boundary values f₀₊(k,0) = I + S₋ and f₀₊'(k,0) = ik(I - S₋) of
    /// the normalized Jost solution pin the placement of the ik factor: the
    /// free field forces M(k) = (1/ik) I, which this form reproduces.
    pub fn weyl_from_reflection(&self, k: Complex64) -> Result<WeylMatrixValue> {
        self.require_right_support()?;
        let n = self.model.n();
        let q = self.quartet_at(k)?;
        let eye = linalg::eye(n);
        let num = &eye + &q.sminus;
        let den = (&eye - &q.sminus).map(|e| e * (C64::new(0.0, 1.0) * k));
        let svd = den.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < 1e-12 * smax {
            return Err(Error::Numerical(format!(
                "I - S₋(k) is singular at k = {k}: Weyl pole"
            )));
        }
        let m = linalg::solve(&den.transpose(), &num.transpose())?.transpose();
        Ok(WeylMatrixValue { k, m, err_est: q.err_est })
    }

    /// Direct Weyl matrix f₊(k,0) f₊'(k,0)⁻¹ as the cross-check route.
    pub fn weyl_direct(&self, k: Complex64) -> Result<WeylMatrixValue> {
        self.require_right_support()?;
        let ev = self.solver().jost_plus(k, &[0.0])?.remove(0);
        let m = linalg::solve(&ev.fprime.transpose(), &ev.f.transpose())?.transpose();
        Ok(WeylMatrixValue { k, m, err_est: ev.err_est })
    }

    fn require_right_support(&self) -> Result<()> {
        match self.model.support() {
            Support::Compact { x_lo, .. } if x_lo >= -1e-12 => Ok(()),
            _ => Err(Error::Config(
                "Weyl extraction needs a potential vanishing on (-inf, 0)".into(),
            )),
        }
    }
}

fn psd_check(m: &CMat, label: &str) -> Result<CMat> {
    let herm = linalg::hermitian_part(m);
    let scale = herm.norm().max(1e-9);
    let defect = linalg::hermitian_defect(m);
    if defect > 1e-4 * scale {
        return Err(Error::Numerical(format!(
            "{label} is not Hermitian: defect {defect:.3e} at scale {scale:.3e}"
        )));
    }
    let min_eig = linalg::min_eigenvalue_hermitian(&herm);
    if min_eig < -1e-6 * scale {
        return Err(Error::NotPsd { min_eig });
    }
    Ok(herm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{certify_decay, PotentialModel};

    fn free_problem(n: usize) -> (PotentialModel, DecayCertificate) {
        let m = PotentialModel::zero(n, LineDomain::FullLine);
        let c = certify_decay(&m, 5.0, 1e-10).unwrap();
        (m, c)
    }

    #[test]
    fn rejects_halfline_model() {
        let m = PotentialModel::zero(1, crate::potential::LineDomain::HalfLine);
        let c = certify_decay(&m, 5.0, 1e-10).unwrap();
        assert!(FullLineProblem::new(&m, &c).is_err());
    }

    #[test]
    fn free_coefficients_are_identity_and_zero() {
        let (m, c) = free_problem(2);
        let p = FullLineProblem::new(&m, &c).unwrap();
        let co = p.coefficients(C64::new(1.3, 0.0)).unwrap();
        assert!((co.ak.clone() - linalg::eye(2)).norm() < 1e-9);
        assert!(co.bk.norm() < 1e-9);
        assert!(co.ck.norm() < 1e-9);
        assert!((co.dk.clone() - linalg::eye(2)).norm() < 1e-9);
        assert!(co.wronskian_spread < 1e-10);
    }

    #[test]
    fn free_quartet_is_block_identity() {
        let (m, c) = free_problem(2);
        let p = FullLineProblem::new(&m, &c).unwrap();
        let q = p.quartet(&[0.7, 1.9]).unwrap();
        for s in &q.samples {
            let asm = s.assembled();
            assert!((asm - linalg::eye(4)).norm() < 1e-9);
        }
    }

    #[test]
    fn free_line_has_no_bound_states() {
        let (m, c) = free_problem(1);
        let p = FullLineProblem::new(&m, &c).unwrap();
        assert!(p.find_bound_states(1.5).unwrap().is_empty());
    }

    #[test]
    fn free_weyl_matrix_is_identity_over_ik() {
        let (m, c) = free_problem(2);
        let p = FullLineProblem::new(&m, &c).unwrap();
        let k = C64::new(0.6, 0.9);
        let w = p.weyl_from_reflection(k).unwrap();
        let expected = linalg::eye(2).map(|e| e / (C64::new(0.0, 1.0) * k));
        assert!((w.m.clone() - expected.clone()).norm() < 1e-9);
        let wd = p.weyl_direct(k).unwrap();
        assert!((wd.m.clone() - expected).norm() < 1e-9);
    }

    #[test]
    fn weyl_requires_right_support() {
        let m = PotentialModel::sech2(1.0).unwrap(); // supported on all of R
        let c = certify_decay(&m, 0.4, 1e-8).unwrap();
        let p = FullLineProblem::new(&m, &c).unwrap();
        assert!(p.weyl_from_reflection(C64::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn diagonal_well_quartet_decouples() {
        let mut v0 = CMat::zeros(2, 2);
        v0[(0, 0)] = C64::new(-1.0, 0.0);
        v0[(1, 1)] = C64::new(-2.5, 0.0);
        let m = PotentialModel::square_well(v0, 0.0, 1.0, LineDomain::FullLine).unwrap();
        let c = certify_decay(&m, 3.0, 1e-10).unwrap();
        let p = FullLineProblem::new(&m, &c).unwrap();
        let q = p.quartet_at(C64::new(1.4, 0.0)).unwrap();
        assert!(q.tplus[(0, 1)].norm() < 1e-9);
        assert!(q.sminus[(1, 0)].norm() < 1e-9);

        // scalar sub-problem reproduces the (0,0) block
        let ms = PotentialModel::square_well(
            CMat::from_element(1, 1, C64::new(-1.0, 0.0)),
            0.0,
            1.0,
            LineDomain::FullLine,
        )
        .unwrap();
        let cs = certify_decay(&ms, 3.0, 1e-10).unwrap();
        let ps = FullLineProblem::new(&ms, &cs).unwrap();
        let qs = ps.quartet_at(C64::new(1.4, 0.0)).unwrap();
        assert!((q.tplus[(0, 0)] - qs.tplus[(0, 0)]).norm() < 1e-9);
        assert!((q.sminus[(0, 0)] - qs.sminus[(0, 0)]).norm() < 1e-9);
    }

    #[test]
    fn free_normalized_jost_is_plane_wave() {
        let (m, c) = free_problem(1);
        let p = FullLineProblem::new(&m, &c).unwrap();
        let k = C64::new(1.1, 0.0);
        let (f0p, _, defect) = p.jost_normalized(k, 0.4, true).unwrap();
        let expected = (C64::new(0.0, 0.4) * k).exp();
        assert!((f0p[(0, 0)] - expected).norm() < 1e-9);
        assert!(defect.unwrap() < 1e-9);
    }
}
