//! Simple euclidean Jordan algebras of tube type and their complexifications.
//!
//! Three families are shipped: real symmetric matrices, complex hermitian matrices
//! and spin factors. Elements are coefficient vectors in a fixed basis that is
//! orthonormal for the trace form of the matrix families; the spin factor uses
//! the coordinates (x0, x1, ..., x_{n-1}).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cr, herm_eig, spectral_norm, CMat, CVec, RMat, RVec, C, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SymReal,
    HermComplex,
    SpinFactor,
}

/// Family plus size parameter. For the spin factor, `n` is the dimension of the
/// Minkowski space R^{1, n-1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub family: Family,
    pub n: usize,
}

impl AlgebraDescriptor {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let d = AlgebraDescriptor { family, n };
        match family {
            Family::SymReal | Family::HermComplex if n == 0 => {
                return Err(Error::InvalidDescriptor(format!("{family:?} needs n >= 1")))
            }
            Family::SpinFactor if n < 3 => return Err(Error::InvalidDescriptor("spin factor needs n >= 3".into())),
            _ => {}
        }
        let (r, dd, nn) = (d.rank(), d.peirce_d(), d.dim());
        if nn != r + dd * r * (r.saturating_sub(1)) / 2 {
            return Err(Error::InvalidDescriptor(format!("dimension identity fails for {}", d.name())));
        }
        Ok(d)
    }

    pub fn sym(n: usize) -> Self {
        Self::new(Family::SymReal, n).expect("valid descriptor")
    }

    pub fn herm(n: usize) -> Self {
        Self::new(Family::HermComplex, n).expect("valid descriptor")
    }

    pub fn spin(n: usize) -> Self {
        Self::new(Family::SpinFactor, n).expect("valid descriptor")
    }

    /// Real dimension N of E.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::SymReal => self.n * (self.n + 1) / 2,
            Family::HermComplex => self.n * self.n,
            Family::SpinFactor => self.n,
        }
    }

    pub fn rank(&self) -> usize {
        match self.family {
            Family::SymReal | Family::HermComplex => self.n,
            Family::SpinFactor => 2,
        }
    }

    /// Peirce multiplicity d.
    pub fn peirce_d(&self) -> usize {
        match self.family {
            Family::SymReal => 1,
            Family::HermComplex => 2,
            Family::SpinFactor => self.n - 2,
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            Family::SymReal => format!("Sym{}", self.n),
            Family::HermComplex => format!("Herm{}", self.n),
            Family::SpinFactor => format!("Spin{}", self.n),
        }
    }

    fn check(&self, other: &AlgebraDescriptor) -> Result<()> {
        if self != other {
            Err(Error::DescriptorMismatch(self.name(), other.name()))
        } else {
            Ok(())
        }
    }

    fn off_pairs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                v.push((i, j));
            }
        }
        v
    }

    /// Matrix of a complex coefficient vector (matrix families only).
    pub fn to_matrix(&self, z: &CVec) -> CMat {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMat::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = z[k];
        }
        match self.family {
            Family::SymReal => {
                for (idx, (i, j)) in self.off_pairs().into_iter().enumerate() {
                    let v = z[n + idx] * s;
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            Family::HermComplex => {
                for (idx, (i, j)) in self.off_pairs().into_iter().enumerate() {
                    let a = z[n + 2 * idx] * s;
                    let b = z[n + 2 * idx + 1] * s;
                    m[(i, j)] = a - I * b;
                    m[(j, i)] = a + I * b;
                }
            }
            Family::SpinFactor => panic!("spin factor has no matrix model here"),
        }
        m
    }

    /// Coefficients of a matrix in the canonical basis; inverse of `to_matrix` on its range.
    pub fn from_matrix(&self, m: &CMat) -> CVec {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut z = CVec::zeros(self.dim());
        for k in 0..n {
            z[k] = m[(k, k)];
        }
        match self.family {
            Family::SymReal => {
                for (idx, (i, j)) in self.off_pairs().into_iter().enumerate() {
                    z[n + idx] = (m[(i, j)] + m[(j, i)]) * s;
                }
            }
            Family::HermComplex => {
                for (idx, (i, j)) in self.off_pairs().into_iter().enumerate() {
                    z[n + 2 * idx] = (m[(i, j)] + m[(j, i)]) * s;
                    z[n + 2 * idx + 1] = (I * m[(i, j)] - I * m[(j, i)]) * s;
                }
            }
            Family::SpinFactor => panic!("spin factor has no matrix model here"),
        }
        z
    }

    pub fn unit_coeffs(&self) -> CVec {
        let mut e = CVec::zeros(self.dim());
        match self.family {
            Family::SymReal | Family::HermComplex => {
                for k in 0..self.n {
                    e[k] = cr(1.0);
                }
            }
            Family::SpinFactor => e[0] = cr(1.0),
        }
        e
    }

    pub fn unit(&self) -> CJordanElem {
        CJordanElem { desc: *self, coeffs: self.unit_coeffs() }
    }

    pub fn real_unit(&self) -> JordanElem {
        JordanElem { desc: *self, coeffs: self.unit_coeffs().map(|z| z.re) }
    }

    /// Jordan product on raw coefficient vectors.
    pub fn product_raw(&self, x: &CVec, y: &CVec) -> CVec {
        match self.family {
            Family::SymReal | Family::HermComplex => {
                let a = self.to_matrix(x);
                let b = self.to_matrix(y);
                let p = (&a * &b + &b * &a) * cr(0.5);
                self.from_matrix(&p)
            }
            Family::SpinFactor => {
                let n = self.n;
                let mut out = CVec::zeros(n);
                let mut dot = x[0] * y[0];
                for k in 1..n {
                    dot += x[k] * y[k];
                    out[k] = x[0] * y[k] + y[0] * x[k];
                }
                out[0] = dot;
                out
            }
        }
    }

    /// Jordan determinant on raw coefficients (complex polynomial of degree r).
    pub fn det_raw(&self, z: &CVec) -> C {
        match self.family {
            Family::SymReal | Family::HermComplex => self.to_matrix(z).determinant(),
            Family::SpinFactor => {
                let mut d = z[0] * z[0];
                for k in 1..self.n {
                    d -= z[k] * z[k];
                }
                d
            }
        }
    }

    /// Jordan trace: sum of the r eigenvalues (linear).
    pub fn trace_raw(&self, z: &CVec) -> C {
        match self.family {
            Family::SymReal | Family::HermComplex => (0..self.n).map(|k| z[k]).sum(),
            Family::SpinFactor => z[0] * 2.0,
        }
    }

    /// Bilinear trace form tr(x y).
    pub fn trace_pairing(&self, x: &CVec, y: &CVec) -> C {
        let dot: C = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        match self.family {
            Family::SpinFactor => dot * 2.0,
            _ => dot,
        }
    }

    pub fn inverse_raw(&self, z: &CVec) -> Result<CVec> {
        let det = self.det_raw(z);
        let tol = 1e-12 * z.norm().powi(self.rank() as i32);
        if det.norm() < tol || det.norm() == 0.0 {
            return Err(Error::SingularElement { det: det.norm(), tol });
        }
        match self.family {
            Family::SymReal | Family::HermComplex => {
                let m = self.to_matrix(z);
                let inv = m.try_inverse().ok_or(Error::SingularElement { det: det.norm(), tol })?;
                Ok(self.from_matrix(&inv))
            }
            Family::SpinFactor => {
                let mut out = z.map(|v| -v / det);
                out[0] = z[0] / det;
                Ok(out)
            }
        }
    }

    /// Left multiplication operator L(z) as an N x N complex matrix.
    pub fn mult_op(&self, z: &CVec) -> CMat {
        let nn = self.dim();
        let mut m = CMat::zeros(nn, nn);
        for a in 0..nn {
            let mut ea = CVec::zeros(nn);
            ea[a] = cr(1.0);
            m.set_column(a, &self.product_raw(z, &ea));
        }
        m
    }

    /// Quadratic representation P(z) = 2 L(z)^2 - L(z^2).
    pub fn quad_op(&self, z: &CVec) -> CMat {
        let l = self.mult_op(z);
        let z2 = self.product_raw(z, z);
        &l * &l * cr(2.0) - self.mult_op(&z2)
    }
}

/// Real element of E.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanElem {
    #[serde(flatten)]
    pub desc: AlgebraDescriptor,
    #[serde(with = "real_coeffs")]
    pub coeffs: RVec,
}

/// Element of the complexification E_C.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CJordanElem {
    #[serde(flatten)]
    pub desc: AlgebraDescriptor,
    #[serde(with = "complex_coeffs")]
    pub coeffs: CVec,
}

mod real_coeffs {
    use super::RVec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &RVec, s: S) -> Result<S::Ok, S::Error> {
        v.iter().cloned().collect::<Vec<f64>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RVec, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Ok(RVec::from_vec(v))
    }
}

mod complex_coeffs {
    use super::{c, CVec};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<[f64; 2]>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVec::from_iterator(v.len(), v.iter().map(|p| c(p[0], p[1]))))
    }
}

impl JordanElem {
    pub fn new(desc: AlgebraDescriptor, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != desc.dim() {
            return Err(Error::BadLength { expected: desc.dim(), got: coeffs.len() });
        }
        Ok(JordanElem { desc, coeffs: RVec::from_vec(coeffs) })
    }

    pub fn zero(desc: AlgebraDescriptor) -> Self {
        JordanElem { desc, coeffs: RVec::zeros(desc.dim()) }
    }

    pub fn complexify(&self) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: self.coeffs.map(cr) }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn add(&self, o: &JordanElem) -> JordanElem {
        JordanElem { desc: self.desc, coeffs: &self.coeffs + &o.coeffs }
    }

    pub fn scale(&self, a: f64) -> JordanElem {
        JordanElem { desc: self.desc, coeffs: &self.coeffs * a }
    }

    pub fn product(&self, o: &JordanElem) -> Result<JordanElem> {
        Ok(self.complexify().product(&o.complexify())?.re())
    }

    pub fn det(&self) -> f64 {
        self.desc.det_raw(&self.coeffs.map(cr)).re
    }

    pub fn trace(&self) -> f64 {
        self.desc.trace_raw(&self.coeffs.map(cr)).re
    }
}

impl CJordanElem {
    pub fn new(desc: AlgebraDescriptor, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != desc.dim() {
            return Err(Error::BadLength { expected: desc.dim(), got: coeffs.len() });
        }
        Ok(CJordanElem { desc, coeffs: CVec::from_vec(coeffs) })
    }

    pub fn from_parts(re: &JordanElem, im: &JordanElem) -> CJordanElem {
        CJordanElem {
            desc: re.desc,
            coeffs: CVec::from_iterator(
                re.coeffs.len(),
                re.coeffs.iter().zip(im.coeffs.iter()).map(|(&a, &b)| c(a, b)),
            ),
        }
    }

    pub fn zero(desc: AlgebraDescriptor) -> Self {
        CJordanElem { desc, coeffs: CVec::zeros(desc.dim()) }
    }

    pub fn re(&self) -> JordanElem {
        JordanElem { desc: self.desc, coeffs: self.coeffs.map(|z| z.re) }
    }

    pub fn im(&self) -> JordanElem {
        JordanElem { desc: self.desc, coeffs: self.coeffs.map(|z| z.im) }
    }

    pub fn conj(&self) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: self.coeffs.map(|z| z.conj()) }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn add(&self, o: &CJordanElem) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: &self.coeffs + &o.coeffs }
    }

    pub fn sub(&self, o: &CJordanElem) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: &self.coeffs - &o.coeffs }
    }

    pub fn scale(&self, a: C) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: &self.coeffs * a }
    }

    pub fn product(&self, o: &CJordanElem) -> Result<CJordanElem> {
        self.desc.check(&o.desc)?;
        Ok(CJordanElem { desc: self.desc, coeffs: self.desc.product_raw(&self.coeffs, &o.coeffs) })
    }

    pub fn square(&self) -> CJordanElem {
        CJordanElem { desc: self.desc, coeffs: self.desc.product_raw(&self.coeffs, &self.coeffs) }
    }

    pub fn det(&self) -> C {
        self.desc.det_raw(&self.coeffs)
    }

    pub fn trace(&self) -> C {
        self.desc.trace_raw(&self.coeffs)
    }

    pub fn inverse(&self) -> Result<CJordanElem> {
        Ok(CJordanElem { desc: self.desc, coeffs: self.desc.inverse_raw(&self.coeffs)? })
    }

    pub fn mult_op(&self) -> LinearMapEC {
        LinearMapEC { mat: self.desc.mult_op(&self.coeffs) }
    }

    pub fn quad_rep(&self) -> LinearMapEC {
        LinearMapEC { mat: self.desc.quad_op(&self.coeffs) }
    }
}

/// Complex-linear endomorphism of E_C in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapEC {
    pub mat: CMat,
}

impl LinearMapEC {
    pub fn identity(n: usize) -> Self {
        LinearMapEC { mat: CMat::identity(n, n) }
    }

    pub fn scalar(n: usize, a: C) -> Self {
        LinearMapEC { mat: CMat::identity(n, n) * a }
    }

    pub fn apply(&self, z: &CJordanElem) -> CJordanElem {
        CJordanElem { desc: z.desc, coeffs: &self.mat * &z.coeffs }
    }

    pub fn compose(&self, o: &LinearMapEC) -> LinearMapEC {
        LinearMapEC { mat: &self.mat * &o.mat }
    }

    pub fn adjoint(&self) -> LinearMapEC {
        LinearMapEC { mat: self.mat.adjoint() }
    }

    pub fn inverse(&self) -> Option<LinearMapEC> {
        self.mat.clone().try_inverse().map(|m| LinearMapEC { mat: m })
    }

    pub fn det(&self) -> C {
        self.mat.determinant()
    }

    pub fn op_norm(&self) -> f64 {
        spectral_norm(&self.mat)
    }
}

/// Eigenvalue plus the idempotent of its (possibly grouped) eigenspace.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub pairs: Vec<(f64, JordanElem)>,
    /// True when some eigenvalues were merged by the clustering threshold.
    pub degenerate: bool,
    /// All r eigenvalues with multiplicity, ascending.
    pub eigenvalues: Vec<f64>,
}

const CLUSTER_REL: f64 = 1e-12;

/// Eigenvalues with multiplicity (ascending) of a real element.
pub fn eigenvalues(x: &JordanElem) -> Vec<f64> {
    let d = x.desc;
    match d.family {
        Family::SymReal | Family::HermComplex => {
            let m = d.to_matrix(&x.coeffs.map(cr));
            herm_eig(&m).0
        }
        Family::SpinFactor => {
            let nb: f64 = x.coeffs.iter().skip(1).map(|v| v * v).sum::<f64>().sqrt();
            vec![x.coeffs[0] - nb, x.coeffs[0] + nb]
        }
    }
}

pub fn spectral_decomp(x: &JordanElem) -> SpectralDecomp {
    let d = x.desc;
    let (vals, idems): (Vec<f64>, Vec<CVec>) = match d.family {
        Family::SymReal | Family::HermComplex => {
            let m = d.to_matrix(&x.coeffs.map(cr));
            let (vals, vecs) = herm_eig(&m);
            let idems = (0..d.n)
                .map(|k| {
                    let v = vecs.column(k).into_owned();
                    d.from_matrix(&(&v * v.adjoint()))
                })
                .collect();
            (vals, idems)
        }
        Family::SpinFactor => {
            let nb: f64 = x.coeffs.iter().skip(1).map(|v| v * v).sum::<f64>().sqrt();
            let mut cm = CVec::zeros(d.n);
            let mut cp = CVec::zeros(d.n);
            cm[0] = cr(0.5);
            cp[0] = cr(0.5);
            if nb > 0.0 {
                for k in 1..d.n {
                    cm[k] = cr(-0.5 * x.coeffs[k] / nb);
                    cp[k] = cr(0.5 * x.coeffs[k] / nb);
                }
            } else {
                cm[1] = cr(-0.5);
                cp[1] = cr(0.5);
            }
            (vec![x.coeffs[0] - nb, x.coeffs[0] + nb], vec![cm, cp])
        }
    };
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut pairs: Vec<(f64, CVec, usize)> = Vec::new();
    let mut degenerate = false;
    for (v, c_) in vals.iter().zip(idems) {
        if let Some(last) = pairs.last_mut() {
            if (v - last.0).abs() < CLUSTER_REL * scale {
                let k = last.2 as f64;
                last.0 = (last.0 * k + v) / (k + 1.0);
                last.1 += c_;
                last.2 += 1;
                degenerate = true;
                continue;
            }
        }
        pairs.push((*v, c_, 1));
    }
    SpectralDecomp {
        pairs: pairs.into_iter().map(|(v, c_, _)| (v, JordanElem { desc: d, coeffs: c_.map(|z| z.re) })).collect(),
        degenerate,
        eigenvalues: vals,
    }
}

/// Membership in the open (or closed) positive cone with tolerance 1e-12 |x|.
pub fn in_positive_cone(x: &JordanElem, open: bool) -> bool {
    let tol = 1e-12 * x.norm();
    let ev = eigenvalues(x);
    if open {
        ev.iter().all(|&v| v > tol)
    } else {
        ev.iter().all(|&v| v >= -tol)
    }
}

/// Smallest eigenvalue of a real element.
pub fn min_eigenvalue(x: &JordanElem) -> f64 {
    eigenvalues(x).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn random_elem<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> JordanElem {
    JordanElem { desc: d, coeffs: RVec::from_fn(d.dim(), |_, _| rng.sample(StandardNormal)) }
}

pub fn random_celem<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> CJordanElem {
    CJordanElem::from_parts(&random_elem(d, rng), &random_elem(d, rng))
}

/// y o y + margin e: a random element of the open cone.
pub fn random_positive<R: Rng>(d: AlgebraDescriptor, rng: &mut R, margin: f64) -> JordanElem {
    let y = random_elem(d, rng).scale(1.0 / (d.dim() as f64).sqrt());
    let y2 = y.product(&y).expect("same descriptor");
    y2.add(&d.real_unit().scale(margin))
}

fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let ph = r[(j, j)] / r[(j, j)].norm();
        for i in 0..n {
            q[(i, j)] *= ph.conj();
        }
    }
    q
}

/// Random automorphism of E fixing e (conjugation by SO(n), U(n), or a rotation of the spatial part).
pub fn random_automorphism<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> LinearMapEC {
    let nn = d.dim();
    let mut m = CMat::zeros(nn, nn);
    match d.family {
        Family::SymReal => {
            let o = random_orthogonal(d.n, rng).map(cr);
            for a in 0..nn {
                let mut ea = CVec::zeros(nn);
                ea[a] = cr(1.0);
                let x = d.to_matrix(&ea);
                m.set_column(a, &d.from_matrix(&(&o * x * o.transpose())));
            }
        }
        Family::HermComplex => {
            let u = random_unitary(d.n, rng);
            for a in 0..nn {
                let mut ea = CVec::zeros(nn);
                ea[a] = cr(1.0);
                let x = d.to_matrix(&ea);
                m.set_column(a, &d.from_matrix(&(&u * x * u.adjoint())));
            }
        }
        Family::SpinFactor => {
            let o = random_orthogonal(d.n - 1, rng);
            m[(0, 0)] = cr(1.0);
            for i in 0..(d.n - 1) {
                for j in 0..(d.n - 1) {
                    m[(i + 1, j + 1)] = cr(o[(i, j)]);
                }
            }
        }
    }
    LinearMapEC { mat: m }
}

/// Real matrix of a real element of a matrix family (hermitian for HermComplex).
pub fn element_matrix(x: &JordanElem) -> CMat {
    x.desc.to_matrix(&x.coeffs.map(cr))
}

pub fn dvec(v: &[f64]) -> RVec {
    DVector::from_column_slice(v)
}

pub fn dmat(rows: usize, cols: usize, v: &[f64]) -> RMat {
    DMatrix::from_row_slice(rows, cols, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<AlgebraDescriptor> {
        vec![
            AlgebraDescriptor::sym(1),
            AlgebraDescriptor::sym(2),
            AlgebraDescriptor::sym(3),
            AlgebraDescriptor::herm(2),
            AlgebraDescriptor::herm(3),
            AlgebraDescriptor::spin(3),
            AlgebraDescriptor::spin(5),
        ]
    }

    #[test]
    fn dimension_identity_and_parameters() {
        let s3 = AlgebraDescriptor::sym(3);
        assert_eq!((s3.dim(), s3.rank(), s3.peirce_d()), (6, 3, 1));
        let h2 = AlgebraDescriptor::herm(2);
        assert_eq!((h2.dim(), h2.rank(), h2.peirce_d()), (4, 2, 2));
        let sp = AlgebraDescriptor::spin(4);
        assert_eq!((sp.dim(), sp.rank(), sp.peirce_d()), (4, 2, 2));
        assert!(AlgebraDescriptor::new(Family::SpinFactor, 2).is_err());
    }

    #[test]
    fn unit_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in families() {
            let x = random_celem(d, &mut rng);
            let ex = d.unit().product(&x).unwrap();
            assert!(ex.sub(&x).norm() < 1e-13);
        }
    }

    #[test]
    fn sym2_product_example() {
        let d = AlgebraDescriptor::sym(2);
        let x = JordanElem::new(d, vec![1.0, 2.0, 0.0]).unwrap();
        // offdiag(1) = matrix with ones off the diagonal, coordinate sqrt 2
        let y = JordanElem::new(d, vec![0.0, 0.0, 2f64.sqrt()]).unwrap();
        let p = x.product(&y).unwrap();
        let m = element_matrix(&p);
        assert!((m[(0, 1)].re - 1.5).abs() < 1e-14);
        assert!(m[(0, 0)].norm() < 1e-14 && m[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn quad_rep_of_unit_and_ie() {
        for d in families() {
            let nn = d.dim();
            let p = d.unit().quad_rep();
            assert!((p.mat.clone() - CMat::identity(nn, nn)).norm() < 1e-13);
            let pie = d.unit().scale(I).quad_rep();
            assert!((pie.mat + CMat::identity(nn, nn)).norm() < 1e-13);
        }
    }

    #[test]
    fn sym_quad_rep_is_matrix_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = AlgebraDescriptor::sym(2);
        for _ in 0..10 {
            let y = random_elem(d, &mut rng);
            let x = random_elem(d, &mut rng);
            let lhs = element_matrix(&y.complexify().quad_rep().apply(&x.complexify()).re());
            let (my, mx) = (element_matrix(&y), element_matrix(&x));
            assert!((lhs - &my * mx * &my).norm() < 1e-12);
        }
    }

    #[test]
    fn spin_determinant_closed_form() {
        let d = AlgebraDescriptor::spin(4);
        let x = JordanElem::new(d, vec![3.0, 1.0, -2.0, 0.5]).unwrap();
        assert!((x.det() - (9.0 - 1.0 - 4.0 - 0.25)).abs() < 1e-14);
        let ev = eigenvalues(&x);
        let nb = (1.0f64 + 4.0 + 0.25).sqrt();
        assert!((ev[0] - (3.0 - nb)).abs() < 1e-14 && (ev[1] - (3.0 + nb)).abs() < 1e-14);
        assert!((ev[0] * ev[1] - x.det()).abs() < 1e-12);
        assert!((ev[0] + ev[1] - x.trace()).abs() < 1e-12);
    }

    #[test]
    fn spin_product_spectrum() {
        // x o x has eigenvalues lambda^2 in the same frame
        let d = AlgebraDescriptor::spin(4);
        let x = JordanElem::new(d, vec![0.3, 1.0, -2.0, 0.5]).unwrap();
        let ev = eigenvalues(&x);
        let ev2 = eigenvalues(&x.product(&x).unwrap());
        let mut sq: Vec<f64> = ev.iter().map(|v| v * v).collect();
        sq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sq[0] - ev2[0]).abs() < 1e-12 && (sq[1] - ev2[1]).abs() < 1e-12);
    }

    #[test]
    fn unit_spectral_and_cone() {
        for d in families() {
            let sd = spectral_decomp(&d.real_unit());
            assert_eq!(sd.pairs.len(), 1);
            assert!((sd.pairs[0].0 - 1.0).abs() < 1e-14);
            assert!((sd.pairs[0].1.coeffs.clone() - d.real_unit().coeffs).norm() < 1e-12);
            assert!(in_positive_cone(&d.real_unit(), true));
            assert!(!in_positive_cone(&d.real_unit().scale(-1.0), false));
        }
    }

    #[test]
    fn psd_with_zero_eigenvalue_is_closed_not_open() {
        let d = AlgebraDescriptor::sym(2);
        // [[1,1],[1,1]] has eigenvalues 0, 2
        let x = JordanElem::new(d, vec![1.0, 1.0, 2f64.sqrt()]).unwrap();
        assert!(in_positive_cone(&x, false));
        assert!(!in_positive_cone(&x, true));
    }

    #[test]
    fn inverse_examples() {
        for d in families() {
            let e = d.unit();
            assert!(e.inverse().unwrap().sub(&e).norm() < 1e-13);
            let ie = e.scale(I);
            assert!(ie.inverse().unwrap().add(&ie).norm() < 1e-13);
        }
        let d = AlgebraDescriptor::sym(2);
        let z = CJordanElem::zero(d);
        assert!(matches!(z.inverse(), Err(Error::SingularElement { .. })));
    }

    #[test]
    fn sym_inverse_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = AlgebraDescriptor::sym(2);
        for _ in 0..10 {
            let x = random_elem(d, &mut rng);
            let inv = x.complexify().inverse().unwrap().re();
            let dense = element_matrix(&x).try_inverse().unwrap();
            assert!((element_matrix(&inv) - dense).norm() < 1e-10);
        }
    }

    #[test]
    fn json_form() {
        let d = AlgebraDescriptor::sym(2);
        let x = JordanElem::new(d, vec![1.0, 2.0, 3.0]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"family":"sym_real","n":2,"coeffs":[1.0,2.0,3.0]}"#);
        let z = x.complexify().scale(I);
        let sz = serde_json::to_string(&z).unwrap();
        assert!(sz.contains("[0.0,1.0]"));
        let back: CJordanElem = serde_json::from_str(&sz).unwrap();
        assert_eq!(back, z);
    }
}
