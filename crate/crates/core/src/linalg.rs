//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const I: C = C::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cr(re: f64) -> C {
    C::new(re, 0.0)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

pub fn spectral_norm_real(m: &RMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * cr(0.5);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &k) in idx.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn herm_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&v| cr(f(v)))));
    &vecs * d * vecs.adjoint()
}

/// Complex coordinates to the real vector (Re, Im).
pub fn realify(v: &CVec) -> RVec {
    let m = v.len();
    RVec::from_fn(2 * m, |k, _| if k < m { v[k].re } else { v[k - m].im })
}

pub fn complexify(v: &RVec) -> CVec {
    let m = v.len() / 2;
    CVec::from_fn(m, |k, _| c(v[k], v[k + m]))
}

/// Multiplication by i in realified coordinates.
pub fn times_i_real(v: &RMat) -> RMat {
    let m = v.nrows() / 2;
    let mut out = RMat::zeros(v.nrows(), v.ncols());
    for j in 0..v.ncols() {
        for k in 0..m {
            out[(k, j)] = -v[(k + m, j)];
            out[(k + m, j)] = v[(k, j)];
        }
    }
    out
}

/// Orthonormal basis for the column span, dropping singular values below `rel_tol * sigma_max`.
pub fn orth_basis(a: &RMat, rel_tol: f64) -> RMat {
    if a.ncols() == 0 || a.nrows() == 0 {
        return RMat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return RMat::zeros(a.nrows(), 0);
    }
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > rel_tol * smax).collect();
    let mut q = RMat::zeros(a.nrows(), keep.len());
    for (j, &k) in keep.iter().enumerate() {
        q.set_column(j, &u.column(k));
    }
    q
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank_real(a: &RMat, rel_tol: f64) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis of the orthogonal complement of the span of the orthonormal columns `q`.
pub fn orth_complement(q: &RMat) -> RMat {
    let n = q.nrows();
    let k = q.ncols();
    if k == 0 {
        return RMat::identity(n, n);
    }
    let p = RMat::identity(n, n) - q * q.transpose();
    let p = (&p + p.transpose()) * 0.5;
    let eig = p.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut out = RMat::zeros(n, n - k);
    for j in 0..(n - k) {
        out.set_column(j, &eig.eigenvectors.column(idx[j]));
    }
    out
}

/// Sine of the largest principal angle from span(qa) into span(qb), both orthonormal.
pub fn inclusion_sine(qa: &RMat, qb: &RMat) -> f64 {
    if qa.ncols() == 0 {
        return 0.0;
    }
    if qb.ncols() == 0 {
        return 1.0;
    }
    let resid = qa - qb * (qb.transpose() * qa);
    spectral_norm_real(&resid).min(1.0)
}

/// Largest principal angle between two subspaces given by orthonormal bases; pi/2 on a dimension mismatch.
pub fn max_principal_angle(qa: &RMat, qb: &RMat) -> f64 {
    if qa.ncols() != qb.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    inclusion_sine(qa, qb).max(inclusion_sine(qb, qa)).asin()
}

/// All principal angles (ascending) via sines of the residual, accurate near zero.
pub fn principal_angles(qa: &RMat, qb: &RMat) -> Vec<f64> {
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return vec![];
    }
    let cosines = (qa.transpose() * qb).svd(false, false).singular_values;
    let mut cos: Vec<f64> = cosines.iter().cloned().collect();
    cos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (small, large) = if qa.ncols() <= qb.ncols() { (qa, qb) } else { (qb, qa) };
    let resid = small - large * (large.transpose() * small);
    let mut sines: Vec<f64> = resid.svd(false, false).singular_values.iter().cloned().collect();
    sines.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cos.iter()
        .zip(sines.iter())
        .map(|(&cv, &sv)| if cv > std::f64::consts::FRAC_1_SQRT_2 { sv.min(1.0).asin() } else { cv.min(1.0).acos() })
        .collect()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn vec_rel_err(a: &CVec, b: &CVec) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Principal logarithm continued from `prev`: returns the branch closest to `prev`.
pub fn log_near(z: C, prev: C) -> C {
    let l = z.ln();
    let k = ((prev.im - l.im) / std::f64::consts::TAU).round();
    C::new(l.re, l.im + k * std::f64::consts::TAU)
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues_general(m: &CMat) -> Vec<C> {
    let t = m.clone().schur().unpack().1;
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}
