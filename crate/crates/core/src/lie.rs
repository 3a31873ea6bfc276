//! Euler elements and 3-gradings of sp_{2n}(R) for n = 1 (sl2) and n = 2 (sp4),
//! the invariant cone, wedge semigroup elements and the strip map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, spectral_norm_real, CMat, RMat, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LieKind {
    Sl2,
    Sp4,
}

/// sp_{2n}(R) = {X : X^T J + J X = 0} with J = [[0, I], [-I, 0]], graded by h = diag(I, -I)/2.
#[derive(Clone, Debug)]
pub struct GradedLieAlgebra {
    pub kind: LieKind,
    pub n: usize,
    pub h: RMat,
    pub basis: Vec<RMat>,
    /// Degree of each basis element under ad h.
    pub degrees: Vec<i32>,
    pub j_form: RMat,
}

fn blocks(n: usize, a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

fn sym_unit(n: usize, i: usize, j: usize) -> RMat {
    let mut m = RMat::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

pub fn bracket(x: &RMat, y: &RMat) -> RMat {
    x * y - y * x
}

impl GradedLieAlgebra {
    pub fn build(kind: LieKind) -> Self {
        let n = match kind {
            LieKind::Sl2 => 1,
            LieKind::Sp4 => 2,
        };
        let z = RMat::zeros(n, n);
        let id = RMat::identity(n, n);
        let h = blocks(n, &(&id * 0.5), &z, &z, &(&id * -0.5));
        let j_form = blocks(n, &z, &id, &(-&id), &z);
        let mut basis = Vec::new();
        let mut degrees = Vec::new();
        for i in 0..n {
            for j in i..n {
                basis.push(blocks(n, &z, &z, &sym_unit(n, i, j), &z));
                degrees.push(-1);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut a = RMat::zeros(n, n);
                a[(i, j)] = 1.0;
                basis.push(blocks(n, &a, &z, &z, &(-a.transpose())));
                degrees.push(0);
            }
        }
        for i in 0..n {
            for j in i..n {
                basis.push(blocks(n, &z, &sym_unit(n, i, j), &z, &z));
                degrees.push(1);
            }
        }
        GradedLieAlgebra { kind, n, h, basis, degrees, j_form }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn graded_dim(&self, deg: i32) -> usize {
        self.degrees.iter().filter(|&&d| d == deg).count()
    }

    pub fn in_algebra(&self, x: &RMat) -> f64 {
        (x.transpose() * &self.j_form + &self.j_form * x).norm()
    }

    /// Coordinates of x in the basis (least squares; exact on the algebra).
    pub fn coords(&self, x: &RMat) -> Vec<f64> {
        let m = 4 * self.n * self.n;
        let mut a = RMat::zeros(m, self.dim());
        for (k, b) in self.basis.iter().enumerate() {
            a.set_column(k, &RMat::from_column_slice(m, 1, b.as_slice()).column(0));
        }
        let rhs = RMat::from_column_slice(m, 1, x.as_slice());
        let sol = a.svd(true, true).solve(&rhs, 1e-14).expect("svd solve");
        sol.column(0).iter().cloned().collect()
    }

    pub fn from_coords(&self, c: &[f64]) -> RMat {
        let k = 2 * self.n;
        self.basis.iter().zip(c).fold(RMat::zeros(k, k), |acc, (b, &v)| acc + b * v)
    }

    /// ad h as a dim x dim matrix.
    pub fn ad(&self, x: &RMat) -> RMat {
        let nn = self.dim();
        let mut m = RMat::zeros(nn, nn);
        for (k, b) in self.basis.iter().enumerate() {
            let v = self.coords(&bracket(x, b));
            for i in 0..nn {
                m[(i, k)] = v[i];
            }
        }
        m
    }

    /// tau = exp(pi i ad h), computed as a complex matrix exponential.
    pub fn tau(&self) -> CMat {
        let ad = self.ad(&self.h).map(|v| C::new(0.0, std::f64::consts::PI * v));
        ad.exp()
    }

    /// Projection of x onto the degree-`deg` part.
    pub fn project(&self, x: &RMat, deg: i32) -> RMat {
        let c = self.coords(x);
        let k = 2 * self.n;
        self.basis
            .iter()
            .zip(&self.degrees)
            .zip(c)
            .filter(|((_, &d), _)| d == deg)
            .fold(RMat::zeros(k, k), |acc, ((b, _), v)| acc + b * v)
    }

    /// The quadratic form -J X of an element; symmetric on the algebra.
    pub fn cone_form(&self, x: &RMat) -> RMat {
        -(&self.j_form * x)
    }

    /// Membership in the invariant cone C = {X : -J X is positive semidefinite}.
    pub fn in_cone(&self, x: &RMat, tol: f64) -> bool {
        min_sym_eig(&self.cone_form(x)) >= -tol * (1.0 + x.norm())
    }

    pub fn in_cone_interior(&self, x: &RMat, tol: f64) -> bool {
        min_sym_eig(&self.cone_form(x)) > tol * (1.0 + x.norm())
    }

    /// Upper-right block of a degree-1 element.
    pub fn g1_block(&self, x: &RMat) -> RMat {
        x.view((0, self.n), (self.n, self.n)).into_owned()
    }

    /// Lower-left block of a degree -1 element.
    pub fn gm1_block(&self, x: &RMat) -> RMat {
        x.view((self.n, 0), (self.n, self.n)).into_owned()
    }

    pub fn g1_from_block(&self, b: &RMat) -> RMat {
        let z = RMat::zeros(self.n, self.n);
        blocks(self.n, &z, b, &z, &z)
    }

    pub fn gm1_from_block(&self, c: &RMat) -> RMat {
        let z = RMat::zeros(self.n, self.n);
        blocks(self.n, &z, &z, c, &z)
    }

    pub fn g0_from_block(&self, a: &RMat) -> RMat {
        let z = RMat::zeros(self.n, self.n);
        blocks(self.n, a, &z, &z, &(-a.transpose()))
    }

    /// tau_G(g) = S g S^{-1} with S = diag(I, -I).
    pub fn tau_group(&self, g: &RMat) -> RMat {
        let mut out = g.clone();
        let n = self.n;
        for i in 0..2 * n {
            for j in 0..2 * n {
                if (i < n) != (j < n) {
                    out[(i, j)] = -out[(i, j)];
                }
            }
        }
        out
    }
}

pub fn min_sym_eig(m: &RMat) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// exp(x_+) g0 exp(x_-) with g0 in exp(g^0), x_+ in C_+ and x_- in C_-.
#[derive(Clone, Debug)]
pub struct WedgeSemigroupElement {
    pub g0: RMat,
    pub x_plus: RMat,
    pub x_minus: RMat,
    pub product: RMat,
}

impl WedgeSemigroupElement {
    pub fn new(g0: RMat, x_plus: RMat, x_minus: RMat) -> Self {
        let product = x_plus.clone().exp() * &g0 * x_minus.clone().exp();
        WedgeSemigroupElement { g0, x_plus, x_minus, product }
    }
}

/// Polar form g exp(y) with g in G^0 and y = y_1 + y_{-1}.
#[derive(Clone, Debug)]
pub struct PolarForm {
    pub g: RMat,
    pub y1: RMat,
    pub ym1: RMat,
    pub residual: f64,
}

/// Matrix square root by the Denman-Beavers iteration.
/// (log b - log a)/(b - a), stable when a and b are close.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    let z = (b - a) / (b + a);
    if z.abs() < 1e-8 {
        2.0 / (a + b) * (1.0 + z * z / 3.0)
    } else {
        2.0 * z.atanh() / (b - a)
    }
}

/// Real logarithm of a matrix with positive real spectrum: real Schur form, then the Parlett recurrence.
pub fn logm_positive(a: &RMat) -> Result<RMat> {
    let n = a.nrows();
    let (q, t) = a.clone().schur().unpack();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    for i in 1..n {
        if t[(i, i - 1)].abs() > 1e-14 * scale {
            return Err(Error::FactorizationFailed(i));
        }
    }
    if let Some(k) = (0..n).find(|&k| t[(k, k)] <= 0.0) {
        return Err(Error::FactorizationFailed(k));
    }
    let mut f = RMat::zeros(n, n);
    for i in 0..n {
        f[(i, i)] = t[(i, i)].ln();
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let (ti, tj) = (t[(i, i)], t[(j, j)]);
            let mut acc = 0.0;
            for k in (i + 1)..j {
                acc += f[(i, k)] * t[(k, j)] - t[(i, k)] * f[(k, j)];
            }
            f[(i, j)] = t[(i, j)] * log_divided_difference(ti, tj) + if acc == 0.0 { 0.0 } else { acc / (ti - tj) };
        }
    }
    Ok(&q * f * q.transpose())
}

/// Numeric re-factorization M = g exp(y): y = log(tau_G(M)^{-1} M)/2, g = M exp(-y).
pub fn refactor(alg: &GradedLieAlgebra, m: &RMat) -> Result<PolarForm> {
    let t = alg.tau_group(m).try_inverse().ok_or(Error::FactorizationFailed(0))?;
    let l = logm_positive(&(t * m))?;
    let y = l * 0.5;
    let g = m * (-&y).exp();
    let y1 = alg.project(&y, 1);
    let ym1 = alg.project(&y, -1);
    let recon = &g * (&y1 + &ym1).exp();
    let residual = (m - recon).norm() / m.norm();
    Ok(PolarForm { g, y1, ym1, residual })
}

/// Closed-form polar form of exp(a e) diag(l, 1/l) exp(b f) in sl2.
pub fn sl2_polar(a: f64, lam: f64, b: f64) -> PolarForm {
    let m12 = a / lam;
    let m21 = b / lam;
    let omega = (1.0 + a * b / (lam * lam)).sqrt().acosh();
    let mu = lam * omega.cosh();
    let sinhc = if omega < 1e-8 { 1.0 + omega * omega / 6.0 } else { omega.sinh() / omega };
    let alpha = m12 / (mu * sinhc);
    let beta = m21 * mu / sinhc;
    let g = RMat::from_row_slice(2, 2, &[mu, 0.0, 0.0, 1.0 / mu]);
    let y1 = RMat::from_row_slice(2, 2, &[0.0, alpha, 0.0, 0.0]);
    let ym1 = RMat::from_row_slice(2, 2, &[0.0, 0.0, beta, 0.0]);
    let m = RMat::from_row_slice(2, 2, &[1.0, a, 0.0, 1.0])
        * RMat::from_row_slice(2, 2, &[lam, 0.0, 0.0, 1.0 / lam])
        * RMat::from_row_slice(2, 2, &[1.0, 0.0, b, 1.0]);
    let residual = (&m - &g * (&y1 + &ym1).exp()).norm() / m.norm();
    PolarForm { g, y1, ym1, residual }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarCheck {
    pub member: bool,
    pub residual: f64,
    pub g_offdiag: f64,
    pub min_eig_plus: f64,
    pub min_eig_minus: f64,
}

/// Re-factor exp(x_+) g0 exp(x_-) as g exp(y) and test y in C_+ + C_-.
pub fn semigroup_polar_check(alg: &GradedLieAlgebra, s: &WedgeSemigroupElement) -> Result<PolarCheck> {
    check_polar(alg, &s.product)
}

pub fn check_polar(alg: &GradedLieAlgebra, m: &RMat) -> Result<PolarCheck> {
    let pf = refactor(alg, m)?;
    let n = alg.n;
    let g_offdiag = pf.g.view((0, n), (n, n)).norm() + pf.g.view((n, 0), (n, n)).norm();
    let bp = alg.g1_block(&pf.y1);
    let cm = alg.gm1_block(&pf.ym1);
    let min_eig_plus = min_sym_eig(&bp);
    let min_eig_minus = min_sym_eig(&cm);
    let tol = 1e-9 * (1.0 + pf.y1.norm() + pf.ym1.norm());
    // g = M exp(-y) inherits the error of y amplified by |M| |exp(-y)|.
    let g_scale = m.norm() * (-(&pf.y1 + &pf.ym1)).exp().norm();
    Ok(PolarCheck {
        member: pf.residual < 1e-8 && g_offdiag < 1e-8 * g_scale && min_eig_plus >= -tol && min_eig_minus >= -tol,
        residual: pf.residual,
        g_offdiag,
        min_eig_plus,
        min_eig_minus,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct StripValue {
    pub value: CMat,
    /// Im(e^z y_1 + e^{-z} y_{-1}).
    pub imaginary_part: RMat,
    pub certificate: Certificate,
}

/// beta^s(z) = g exp(e^z y_1 + e^{-z} y_{-1}) on the closed strip 0 <= Im z <= pi.
pub fn strip_map(alg: &GradedLieAlgebra, pf: &PolarForm, z: C) -> Result<StripValue> {
    if z.im < -1e-14 || z.im > std::f64::consts::PI + 1e-14 {
        return Err(Error::StripViolation(z.im));
    }
    let arg = pf.y1.map(cr) * z.exp() + pf.ym1.map(cr) * (-z).exp();
    let value = pf.g.map(cr) * arg.clone().exp();
    let im = arg.map(|v| v.im);
    let form = alg.cone_form(&im);
    let scale = 1e-12 * (1.0 + im.norm());
    let me = min_sym_eig(&form);
    let certificate = if me > scale {
        Certificate::Interior
    } else if me >= -scale {
        Certificate::Boundary
    } else {
        Certificate::Outside
    };
    Ok(StripValue { value, imaginary_part: im, certificate })
}

/// Real eigenvalues of ad h (they are real since ad h is diagonal in the basis).
pub fn ad_h_spectrum(alg: &GradedLieAlgebra) -> Vec<f64> {
    let ad = alg.ad(&alg.h).map(cr);
    let (vals, _) = herm_eig(&((&ad + ad.adjoint()) * cr(0.5)));
    vals
}

pub fn grading_residual(alg: &GradedLieAlgebra) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, &dx) in alg.basis.iter().zip(&alg.degrees) {
        for (y, &dy) in alg.basis.iter().zip(&alg.degrees) {
            let br = bracket(x, y);
            let deg = dx + dy;
            let target = if deg.abs() > 1 { RMat::zeros(br.nrows(), br.ncols()) } else { alg.project(&br, deg) };
            worst = worst.max(spectral_norm_real(&(br - target)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_dimensions_and_spectrum() {
        let a = GradedLieAlgebra::build(LieKind::Sl2);
        assert_eq!((a.graded_dim(-1), a.graded_dim(0), a.graded_dim(1)), (1, 1, 1));
        let sp = ad_h_spectrum(&a);
        for (v, e) in sp.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn sp4_g1_is_sym2() {
        let a = GradedLieAlgebra::build(LieKind::Sp4);
        assert_eq!(a.graded_dim(1), 3);
        assert_eq!(a.dim(), 10);
        for b in &a.basis {
            assert!(a.in_algebra(b) < 1e-15);
        }
    }

    #[test]
    fn tau_is_parity() {
        for k in [LieKind::Sl2, LieKind::Sp4] {
            let a = GradedLieAlgebra::build(k);
            let t = a.tau();
            for (i, &d) in a.degrees.iter().enumerate() {
                let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..a.dim() {
                    let expect = if i == j { sign } else { 0.0 };
                    assert!((t[(i, j)] - cr(expect)).norm() < 1e-12);
                }
            }
            let t2 = &t * &t;
            assert!((t2 - CMat::identity(a.dim(), a.dim())).norm() < 1e-12);
        }
    }

    #[test]
    fn grading_brackets() {
        for k in [LieKind::Sl2, LieKind::Sp4] {
            assert!(grading_residual(&GradedLieAlgebra::build(k)) < 1e-12);
        }
    }

    #[test]
    fn sl2_closed_form_polar() {
        let pf = sl2_polar(0.7, 1.3, 0.4);
        assert!(pf.residual < 1e-13);
        assert!(pf.y1[(0, 1)] > 0.0 && pf.ym1[(1, 0)] > 0.0);
        let alg = GradedLieAlgebra::build(LieKind::Sl2);
        let s = WedgeSemigroupElement::new(
            RMat::from_row_slice(2, 2, &[1.3, 0.0, 0.0, 1.0 / 1.3]),
            RMat::from_row_slice(2, 2, &[0.0, 0.7, 0.0, 0.0]),
            RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.4, 0.0]),
        );
        let num = refactor(&alg, &s.product).unwrap();
        assert!((num.y1 - pf.y1).norm() < 1e-10);
        assert!((num.g - pf.g).norm() < 1e-10);
    }

    #[test]
    fn trivial_element_is_member() {
        let alg = GradedLieAlgebra::build(LieKind::Sp4);
        let z = RMat::zeros(4, 4);
        let g0 = alg.g0_from_block(&RMat::from_row_slice(2, 2, &[0.2, 0.1, -0.3, 0.0])).exp();
        let s = WedgeSemigroupElement::new(g0.clone(), z.clone(), z);
        let chk = semigroup_polar_check(&alg, &s).unwrap();
        assert!(chk.member, "{chk:?}");
    }

    #[test]
    fn strip_map_real_line_and_endpoint() {
        let pf = sl2_polar(0.7, 1.3, 0.4);
        let alg = GradedLieAlgebra::build(LieKind::Sl2);
        let s = pf.g.clone() * (&pf.y1 + &pf.ym1).exp();
        let t = 0.6;
        let conj = (&alg.h * t).exp() * &s * (&alg.h * -t).exp();
        let v = strip_map(&alg, &pf, cr(t)).unwrap();
        assert!((v.value.map(|z| z.re) - conj).norm() < 1e-12);
        let end = strip_map(&alg, &pf, C::new(0.0, std::f64::consts::PI)).unwrap();
        assert!((end.value.map(|z| z.re) - alg.tau_group(&s)).norm() < 1e-12);
        let mid = strip_map(&alg, &pf, C::new(0.3, 1.0)).unwrap();
        assert_eq!(mid.certificate, Certificate::Interior);
        assert!(matches!(strip_map(&alg, &pf, C::new(0.0, 4.0)), Err(Error::StripViolation(_))));
    }
}
