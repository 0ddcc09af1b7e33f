//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{PrftError, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// sigma_+ = sigma_x + i sigma_y, no factor 1/2.
pub fn sigma_plus() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(2., 0.), c(0., 0.), c(0., 0.)])
}

pub fn sigma_minus() -> CMat {
    sigma_plus().adjoint()
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// max |U^dagger U - 1|
pub fn unitarity_defect(u: &CMat) -> f64 {
    let d = u.nrows();
    max_abs(&(u.adjoint() * u - CMat::identity(d, d)))
}

/// Unitary polar factor `W V^dag` of `u = W S V^dag`.
pub fn nearest_unitary(u: &CMat) -> CMat {
    let svd = u.clone().svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

pub fn expectation(op: &CMat, psi: &CVec) -> C64 {
    psi.dotc(&(op * psi))
}

/// exp(-i h x) for hermitian x.
pub fn expm_hermitian(x: &CMat, h: f64) -> CMat {
    let d = x.nrows();
    match d {
        1 => CMat::from_element(1, 1, (-I * h * x[(0, 0)]).exp()),
        2 => {
            let m = Matrix2::new(x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
            let e = expm_hermitian_2x2(&m, h);
            CMat::from_row_slice(2, 2, &[e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]])
        }
        3 | 4 => {
            let eig = x.clone().symmetric_eigen();
            let v = &eig.eigenvectors;
            let phases = CVec::from_iterator(d, eig.eigenvalues.iter().map(|&l| (-I * (h * l)).exp()));
            let mut vd = v.clone();
            for (j, mut col) in vd.column_iter_mut().enumerate() {
                col *= phases[j];
            }
            vd * v.adjoint()
        }
        _ => (x * (-I * h)).exp(),
    }
}

/// Closed form exp(-i h x) for a 2x2 hermitian x = x0 + x.sigma.
#[inline]
pub fn expm_hermitian_2x2(x: &Matrix2<C64>, h: f64) -> Matrix2<C64> {
    let x0 = 0.5 * (x[(0, 0)].re + x[(1, 1)].re);
    let xz = 0.5 * (x[(0, 0)].re - x[(1, 1)].re);
    let off = 0.5 * (x[(0, 1)] + x[(1, 0)].conj());
    let s = (xz * xz + off.norm_sqr()).sqrt();
    let (sn, cs) = (h * s).sin_cos();
    let k = if s * h > 1e-300 { sn / s } else { h };
    let ph = (-I * (h * x0)).exp();
    let a = -I * k;
    Matrix2::new(
        ph * (cs + a * xz),
        ph * a * off,
        ph * a * off.conj(),
        ph * (cs - a * xz),
    )
}

/// Eigendecomposition of a general complex square matrix via complex Schur form.
/// Returns eigenvalues and unit-norm eigenvectors as columns.
pub fn eig(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let d = m.nrows();
    if d != m.ncols() {
        return Err(PrftError::DimensionMismatch("eig needs a square matrix".into()));
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| PrftError::Unstable("schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let vals: Vec<C64> = (0..d).map(|k| t[(k, k)]).collect();
    let scale = max_abs(&t).max(1e-300);
    let mut vecs = CMat::zeros(d, d);
    for k in 0..d {
        let lam = vals[k];
        let mut y = CVec::zeros(d);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < 1e-14 * scale {
                den = C64::new(1e-14 * scale, 0.0);
            }
            y[i] = -s / den;
        }
        let v = &q * y;
        let n = v.norm();
        vecs.set_column(k, &(v / C64::new(n, 0.0)));
    }
    Ok((vals, vecs))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}
