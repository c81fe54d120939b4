//! Small helpers over `nalgebra` dense complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Frobenius distance from Hermitian symmetry.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// (M + M†)/2.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|e| e * 0.5)
}

/// Symmetrize if the defect is below `tol`, error out otherwise.
pub fn require_hermitian(m: &CMat, tol: f64) -> Result<CMat> {
    let defect = hermitian_defect(m);
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    Ok(hermitian_part(m))
}

pub fn unitary_defect(m: &CMat) -> f64 {
    (m.adjoint() * m - eye(m.nrows())).norm()
}

/// Largest singular value. Matrices here are tiny, so a full SVD is fine.
pub fn op_norm(m: &CMat) -> f64 {
    if m.iter().all(|e| e.norm() == 0.0) {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.max()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_eigenvalue_hermitian(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Inverse square root of a Hermitian positive definite matrix via
/// eigendecomposition. Errors if any eigenvalue is at or below `floor`.
pub fn inv_sqrt_hpd(m: &CMat, floor: f64) -> Result<CMat> {
    let se = hermitian_part(m).symmetric_eigen();
    let mut diag = CMat::zeros(m.nrows(), m.ncols());
    for (i, &lambda) in se.eigenvalues.iter().enumerate() {
        if lambda <= floor {
            return Err(Error::NonPositiveGram(lambda));
        }
        diag[(i, i)] = C64::new(1.0 / lambda.sqrt(), 0.0);
    }
    Ok(&se.eigenvectors * diag * se.eigenvectors.adjoint())
}

/// Orthogonal projector onto the null space of `m`, using singular values
/// below `rel_tol * max(sigma_max, scale_floor)`. The floor keeps the
/// threshold meaningful when m is entirely zero (scalar bound states, where
/// the 1x1 Jost matrix vanishes identically at the root). Returns the
/// projector and the kernel dimension.
pub fn kernel_projector(m: &CMat, rel_tol: f64, scale_floor: f64) -> (CMat, usize) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let sigma_max = svd.singular_values.max();
    let thresh = rel_tol * sigma_max.max(scale_floor).max(f64::MIN_POSITIVE);
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut proj = CMat::zeros(n, n);
    let mut dim = 0;
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] < thresh {
            let row = v_t.row(i);
            // v v† with v the i-th right singular vector (row of V† conjugated)
            let v = row.adjoint();
            proj += &v * v.adjoint();
            dim += 1;
        }
    }
    // Rows of V† only cover min(nrows, ncols); for square inputs that is all of them.
    (proj, dim)
}

/// Solve m x = rhs by LU, with a near-singularity report.
pub fn solve(m: &CMat, rhs: &CMat) -> Result<CMat> {
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Numerical("LU solve failed: singular matrix".into()))
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    solve(m, &eye(m.nrows()))
}

pub fn determinant(m: &CMat) -> C64 {
    m.determinant()
}

/// Flatten to row-major [re, im] pairs, the wire format used everywhere.
pub fn to_pairs(m: &CMat) -> Vec<[f64; 2]> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

/// Rebuild an r x c matrix from row-major [re, im] pairs.
pub fn from_pairs(r: usize, c: usize, pairs: &[[f64; 2]]) -> Result<CMat> {
    if pairs.len() != r * c {
        return Err(Error::Config(format!(
            "matrix payload has {} entries, expected {}",
            pairs.len(),
            r * c
        )));
    }
    let mut m = CMat::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let p = pairs[i * c + j];
            m[(i, j)] = C64::new(p[0], p[1]);
        }
    }
    Ok(m)
}
