//! Finite-dimensional modular theory on C^m with the standard inner product.
//!
//! Real subspaces are stored through an orthonormal basis of their realification
//! (Re, Im) in R^{2m}. The real inner product there is Re<x, y>, and the
//! symplectic form Im<x, y> equals Re<ix, y>, so the symplectic complement of V
//! is the orthogonal complement of iV.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, herm_eig, herm_fn, inclusion_sine, max_principal_angle, orth_basis, orth_complement, rank_real, realify,
    spectral_norm, spectral_norm_real, times_i_real, CMat, CVec, RMat, C,
};
use crate::quad::{self, Rule};

/// Residual bound for the pair relations.
pub const PAIR_TOL: f64 = 1e-10;
/// Relative threshold for the cyclic and separating rank checks.
pub const RANK_TOL: f64 = 1e-8;
/// Default singular-value threshold when closing a real span.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Relative bound on boundary-value mismatches in the strip test.
pub const KMS_TOL: f64 = 1e-6;

fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Real 2m x 2m matrix of the antilinear map x -> A conj(x).
fn antilinear_real(a: &CMat) -> RMat {
    let m = a.nrows();
    let mut r = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = a[(i, j)];
            r[(i, j)] = z.re;
            r[(i, j + m)] = z.im;
            r[(i + m, j)] = z.im;
            r[(i + m, j + m)] = -z.re;
        }
    }
    r
}

/// Null space of a real square matrix, singular values below `tol * max(1, sigma_max)`.
fn null_space(a: &RMat, tol: f64) -> RMat {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1.0);
    let mut cols = Vec::new();
    for k in 0..svd.singular_values.len() {
        if svd.singular_values[k] <= tol * smax {
            cols.push(vt.row(k).transpose());
        }
    }
    let mut out = RMat::zeros(n, cols.len());
    for (j, v) in cols.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Modular data (Delta, J) with J xi = U conj(xi).
#[derive(Debug, Clone)]
pub struct ModularPair {
    u: CMat,
    delta: CMat,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairResiduals {
    pub unitarity: f64,
    pub involution: f64,
    pub conjugation: f64,
    pub min_eigenvalue: f64,
}

impl ModularPair {
    pub fn new(u: CMat, delta: CMat) -> Result<Self> {
        let m = u.nrows();
        if u.ncols() != m || delta.nrows() != m || delta.ncols() != m {
            return Err(Error::BadLength { expected: m, got: delta.nrows() });
        }
        let pair = ModularPair { u, delta };
        let r = pair.residuals();
        if r.min_eigenvalue <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "modular operator not positive: min eigenvalue {:.3e}",
                r.min_eigenvalue
            )));
        }
        if r.unitarity > PAIR_TOL || r.involution > PAIR_TOL || r.conjugation > PAIR_TOL {
            return Err(Error::InvalidParameter(format!(
                "pair relations fail: unitarity {:.3e}, J^2 {:.3e}, J Delta J {:.3e}",
                r.unitarity, r.involution, r.conjugation
            )));
        }
        Ok(pair)
    }

    /// Entrywise conjugation with the identity operator.
    pub fn trivial(m: usize) -> Self {
        ModularPair { u: CMat::identity(m, m), delta: CMat::identity(m, m) }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn unitary_part(&self) -> &CMat {
        &self.u
    }

    pub fn delta(&self) -> &CMat {
        &self.delta
    }

    pub fn j(&self, v: &CVec) -> CVec {
        &self.u * conj_vec(v)
    }

    pub fn delta_power(&self, t: f64) -> CMat {
        herm_fn(&self.delta, |x| x.powf(t))
    }

    /// Delta^{it}.
    pub fn delta_it(&self, t: f64) -> CMat {
        let (vals, vecs) = herm_eig(&self.delta);
        let d =
            CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&v| C::from_polar(1.0, t * v.ln()))));
        &vecs * d * vecs.adjoint()
    }

    pub fn residuals(&self) -> PairResiduals {
        let m = self.dim();
        let id = CMat::identity(m, m);
        let unitarity = spectral_norm(&(&self.u * self.u.adjoint() - &id));
        let involution = spectral_norm(&(&self.u * conj_mat(&self.u) - &id));
        let (vals, _) = herm_eig(&self.delta);
        let min_eigenvalue = vals.first().cloned().unwrap_or(1.0);
        let inv = herm_fn(&self.delta, |x| 1.0 / x);
        let jdj = &self.u * conj_mat(&self.delta) * conj_mat(&self.u);
        let conjugation = spectral_norm(&(&jdj - &inv)) / spectral_norm(&inv).max(f64::MIN_POSITIVE);
        PairResiduals { unitarity, involution, conjugation, min_eigenvalue }
    }

    /// The pair (Delta^{-1}, J).
    pub fn inverse(&self) -> ModularPair {
        ModularPair { u: self.u.clone(), delta: herm_fn(&self.delta, |x| 1.0 / x) }
    }

    /// Random pair: Delta = W exp(iA) W*, J = W conj W* with A real antisymmetric.
    pub fn random<R: Rng>(m: usize, spread: f64, rng: &mut R) -> Self {
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let x: f64 = rng.sample(StandardNormal);
                a[(i, j)] = spread * x;
                a[(j, i)] = -spread * x;
            }
        }
        let ia = CMat::from_fn(m, m, |i, j| c(0.0, a[(i, j)]));
        let delta0 = herm_fn(&ia, f64::exp);
        let w = random_unitary(m, rng);
        let u = &w * w.transpose();
        let delta = &w * delta0 * w.adjoint();
        let delta = (&delta + delta.adjoint()) * cr(0.5);
        ModularPair { u, delta }
    }

    /// Tomita data of a standard subspace: S(x + iy) = x - iy on V + iV.
    pub fn from_subspace(v: &RealSubspace) -> Result<Self> {
        let m = v.ambient();
        if v.dim() != m {
            return Err(Error::NotStandard(format!("real dimension {} in C^{}", v.dim(), m)));
        }
        let b = v.complex_basis();
        let svd = b.clone().svd(false, false);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        if smin <= RANK_TOL * smax {
            return Err(Error::NotStandard("basis is not complex independent".into()));
        }
        let binv = b.clone().try_inverse().ok_or_else(|| Error::NotStandard("singular basis".into()))?;
        let a = &b * conj_mat(&binv);
        let delta = a.transpose() * conj_mat(&a);
        let delta = (&delta + delta.adjoint()) * cr(0.5);
        let dm12 = herm_fn(&delta, |x| 1.0 / x.sqrt());
        let u = &a * conj_mat(&dm12);
        Ok(ModularPair { u, delta })
    }
}

pub fn random_unitary<R: Rng>(m: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phases so the distribution is Haar.
    let d = CMat::from_diagonal(&CVec::from_iterator(
        m,
        (0..m).map(|k| {
            let z = r[(k, k)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                cr(1.0)
            }
        }),
    ));
    q * d
}

/// A real subspace of C^m given by an orthonormal basis of its realification.
#[derive(Debug, Clone)]
pub struct RealSubspace {
    m: usize,
    basis: RMat,
}

impl RealSubspace {
    pub fn zero(m: usize) -> Self {
        RealSubspace { m, basis: RMat::zeros(2 * m, 0) }
    }

    /// R^m inside C^m.
    pub fn real_coordinates(m: usize) -> Self {
        let mut basis = RMat::zeros(2 * m, m);
        for k in 0..m {
            basis[(k, k)] = 1.0;
        }
        RealSubspace { m, basis }
    }

    /// Real span of complex generators, closed with a relative singular-value threshold.
    pub fn from_generators(m: usize, gens: &[CVec], rel_tol: f64) -> Result<Self> {
        let mut a = RMat::zeros(2 * m, gens.len());
        for (j, g) in gens.iter().enumerate() {
            if g.len() != m {
                return Err(Error::BadLength { expected: m, got: g.len() });
            }
            a.set_column(j, &realify(g));
        }
        Ok(Self::from_realified(&a, rel_tol))
    }

    pub fn from_realified(a: &RMat, rel_tol: f64) -> Self {
        RealSubspace { m: a.nrows() / 2, basis: orth_basis(a, rel_tol) }
    }

    /// Leading `rank` singular directions of the generator span.
    pub fn leading(m: usize, gens: &[CVec], rank: usize) -> Result<Self> {
        let mut a = RMat::zeros(2 * m, gens.len());
        for (j, g) in gens.iter().enumerate() {
            if g.len() != m {
                return Err(Error::BadLength { expected: m, got: g.len() });
            }
            a.set_column(j, &realify(g));
        }
        if gens.is_empty() || rank == 0 {
            return Ok(Self::zero(m));
        }
        let svd = a.svd(true, false);
        let u = svd.u.unwrap();
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&x, &y| svd.singular_values[y].partial_cmp(&svd.singular_values[x]).unwrap());
        let k = rank.min(idx.len());
        let mut basis = RMat::zeros(2 * m, k);
        for j in 0..k {
            basis.set_column(j, &u.column(idx[j]));
        }
        Ok(RealSubspace { m, basis })
    }

    pub fn ambient(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    /// Basis columns as complex vectors.
    pub fn complex_basis(&self) -> CMat {
        let m = self.m;
        CMat::from_fn(m, self.dim(), |i, j| c(self.basis[(i, j)], self.basis[(i + m, j)]))
    }

    pub fn vectors(&self) -> Vec<CVec> {
        let b = self.complex_basis();
        (0..b.ncols()).map(|j| b.column(j).into_owned()).collect()
    }

    /// Relative distance of `v` from the subspace.
    pub fn distance(&self, v: &CVec) -> f64 {
        let x = realify(v);
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        let r = &x - &self.basis * (self.basis.transpose() * &x);
        r.norm() / n
    }

    pub fn contains(&self, v: &CVec, tol: f64) -> bool {
        self.distance(v) <= tol
    }

    /// Sine of the largest angle from self into `other`.
    pub fn inclusion_sine(&self, other: &RealSubspace) -> f64 {
        inclusion_sine(&self.basis, &other.basis)
    }

    /// Largest principal angle; pi/2 when the dimensions differ.
    pub fn max_angle(&self, other: &RealSubspace) -> f64 {
        max_principal_angle(&self.basis, &other.basis)
    }

    /// Image under a complex linear map.
    pub fn transformed(&self, g: &CMat) -> RealSubspace {
        let imgs: Vec<CVec> = self.vectors().iter().map(|v| g * v).collect();
        let mut a = RMat::zeros(2 * self.m, imgs.len());
        for (j, v) in imgs.iter().enumerate() {
            a.set_column(j, &realify(v));
        }
        RealSubspace { m: self.m, basis: orth_basis(&a, CLOSURE_TOL) }
    }

    /// Image under the antilinear map x -> A conj(x).
    pub fn antilinear_image(&self, a: &CMat) -> RealSubspace {
        let r = antilinear_real(a);
        RealSubspace { m: self.m, basis: orth_basis(&(r * &self.basis), CLOSURE_TOL) }
    }

    pub fn times_i(&self) -> RealSubspace {
        RealSubspace { m: self.m, basis: times_i_real(&self.basis) }
    }

    /// Closed sum of two subspaces.
    pub fn sum(&self, other: &RealSubspace) -> RealSubspace {
        let mut a = RMat::zeros(2 * self.m, self.dim() + other.dim());
        a.columns_mut(0, self.dim()).copy_from(&self.basis);
        a.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        RealSubspace { m: self.m, basis: orth_basis(&a, CLOSURE_TOL) }
    }
}

/// Symplectic complement {x : Im<x, y> = 0 for all y in V}, the real null space of the Im-pairing.
pub fn symplectic_complement(v: &RealSubspace) -> RealSubspace {
    let iv = times_i_real(&v.basis);
    let q = orth_basis(&iv, CLOSURE_TOL);
    RealSubspace { m: v.m, basis: orth_complement(&q) }
}

/// Largest |Im<x, y>| over unit vectors x in `a`, y in `b`.
pub fn im_pairing_norm(a: &RealSubspace, b: &RealSubspace) -> f64 {
    if a.dim() == 0 || b.dim() == 0 {
        return 0.0;
    }
    let ia = times_i_real(&a.basis);
    spectral_norm_real(&(ia.transpose() * &b.basis))
}

/// Im<a, b> / (|a| |b|) for a pair of vectors.
pub fn im_pairing_ratio(a: &CVec, b: &CVec) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dotc(b).im.abs() / (na * nb)
}

/// Fix(J Delta^{1/2}) for a modular pair.
pub fn standard_subspace_from_pair(p: &ModularPair) -> Result<RealSubspace> {
    let m = p.dim();
    let half = p.delta_power(0.5);
    let a = p.unitary_part() * conj_mat(&half);
    let r = antilinear_real(&a) - RMat::identity(2 * m, 2 * m);
    let basis = null_space(&r, RANK_TOL);
    let v = RealSubspace { m, basis };
    if v.dim() != m {
        return Err(Error::NotStandard(format!("fixed space has real dimension {} in C^{}", v.dim(), m)));
    }
    let rep = standardness_report(&v);
    if !rep.standard {
        return Err(Error::NotStandard(format!(
            "rank of V + iV is {} of {}",
            rep.rank_v_plus_iv, rep.ambient_real_dim
        )));
    }
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct StandardnessReport {
    pub ambient_real_dim: usize,
    pub dim: usize,
    pub rank_v_plus_iv: usize,
    pub intersection_dim: usize,
    pub cyclic: bool,
    pub separating: bool,
    pub standard: bool,
}

pub fn standardness_report(v: &RealSubspace) -> StandardnessReport {
    standardness_report_tol(v, RANK_TOL)
}

pub fn standardness_report_tol(v: &RealSubspace, tol: f64) -> StandardnessReport {
    let k = v.dim();
    let mut a = RMat::zeros(2 * v.m, 2 * k);
    a.columns_mut(0, k).copy_from(&v.basis);
    a.columns_mut(k, k).copy_from(&times_i_real(&v.basis));
    let rank = rank_real(&a, tol);
    let cyclic = rank == 2 * v.m;
    let separating = rank == 2 * k;
    StandardnessReport {
        ambient_real_dim: 2 * v.m,
        dim: k,
        rank_v_plus_iv: rank,
        intersection_dim: 2 * k - rank,
        cyclic,
        separating,
        standard: cyclic && separating,
    }
}

/// Axis-aligned box in group coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::BadLength { expected: lo.len(), got: hi.len() });
        }
        Ok(BoxRegion { lo, hi })
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| !(b > a))
    }

    pub fn contains_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.dims()).all(|k| lo[k] >= self.lo[k] - 1e-12 && hi[k] <= self.hi[k] + 1e-12)
    }
}

/// Tensor product of normalized bump profiles, optionally differentiated along each axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
    pub orders: Vec<usize>,
}

impl Bump {
    pub fn new(center: Vec<f64>, radius: Vec<f64>) -> Self {
        let orders = vec![0; center.len()];
        Bump { center, radius, orders }
    }

    pub fn with_orders(mut self, orders: Vec<usize>) -> Self {
        self.orders = orders;
        self
    }

    pub fn dims(&self) -> usize {
        self.center.len()
    }

    pub fn support(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = self.center.iter().zip(&self.radius).map(|(c, r)| c - r).collect();
        let hi = self.center.iter().zip(&self.radius).map(|(c, r)| c + r).collect();
        (lo, hi)
    }

    /// One-dimensional factor along `axis`.
    pub fn axis_value(&self, axis: usize, x: f64) -> f64 {
        let r = self.radius[axis];
        let u = (x - self.center[axis]) / r;
        quad::bump_derivative(u, self.orders[axis]) / (r * quad::bump_mass())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (0..self.dims()).map(|k| self.axis_value(k, x[k])).product()
    }

    /// Quadrature rule on the support along `axis` with about `nodes` points.
    pub fn axis_rule(&self, axis: usize, nodes: usize) -> Rule {
        let (lo, hi) = self.support();
        let per = 16.min(nodes.max(1));
        let panels = (nodes / per).max(1);
        quad::composite_gl(lo[axis], hi[axis], panels, per)
    }

    /// Dilated copy: the center and radius along `axis` scaled by `a`.
    pub fn scaled(&self, axis: usize, a: f64) -> Bump {
        let mut b = self.clone();
        b.center[axis] *= a;
        b.radius[axis] *= a;
        b
    }

    pub fn shifted(&self, axis: usize, dx: f64) -> Bump {
        let mut b = self.clone();
        b.center[axis] += dx;
        b
    }
}

/// A region together with the bump family smeared over it.
#[derive(Debug, Clone, Serialize)]
pub struct RegionSmear {
    pub region: Vec<BoxRegion>,
    pub bumps: Vec<Bump>,
    pub nodes_per_axis: usize,
}

impl RegionSmear {
    pub fn new(region: Vec<BoxRegion>, bumps: Vec<Bump>) -> Result<Self> {
        for b in &bumps {
            let (lo, hi) = b.support();
            if !region.iter().any(|r| r.dims() == b.dims() && r.contains_box(&lo, &hi)) {
                return Err(Error::InvalidParameter(format!("bump centered at {:?} leaves the region", b.center)));
            }
        }
        Ok(RegionSmear { region, bumps, nodes_per_axis: 64 })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes_per_axis = nodes;
        self
    }

    /// Bumps on a regular lattice inside each box: `per_axis[k]` centers along axis k,
    /// radius `fill` times half the lattice spacing, one copy per derivative order set.
    pub fn lattice(region: Vec<BoxRegion>, per_axis: &[usize], fill: f64, orders: &[Vec<usize>]) -> Result<Self> {
        let mut bumps = Vec::new();
        for bx in &region {
            if bx.dims() != per_axis.len() {
                return Err(Error::BadLength { expected: bx.dims(), got: per_axis.len() });
            }
            let d = bx.dims();
            let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(d);
            for k in 0..d {
                let n = per_axis[k].max(1);
                let w = (bx.hi[k] - bx.lo[k]) / n as f64;
                axes.push((0..n).map(|i| (bx.lo[k] + (i as f64 + 0.5) * w, 0.5 * w * fill)).collect());
            }
            let mut idx = vec![0usize; d];
            loop {
                let center: Vec<f64> = (0..d).map(|k| axes[k][idx[k]].0).collect();
                let radius: Vec<f64> = (0..d).map(|k| axes[k][idx[k]].1).collect();
                for ord in orders {
                    bumps.push(Bump::new(center.clone(), radius.clone()).with_orders(ord.clone()));
                }
                let mut k = 0;
                while k < d {
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        RegionSmear::new(region, bumps)
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty() || self.region.iter().all(|b| b.is_empty())
    }
}

/// A discretized representation able to smear distribution vectors against bumps.
pub trait SmearModel {
    type Dist;

    fn ambient_dim(&self) -> usize;

    fn smear(&self, bump: &Bump, eta: &Self::Dist, nodes: usize) -> Result<CVec>;
}

pub fn cyclic_generators<M: SmearModel>(model: &M, e: &[M::Dist], region: &RegionSmear) -> Result<Vec<CVec>> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut out = Vec::with_capacity(region.bumps.len() * e.len());
    for b in &region.bumps {
        for eta in e {
            out.push(model.smear(b, eta, region.nodes_per_axis)?);
        }
    }
    Ok(out)
}

/// Real span of all smears of `e` by the region's bumps.
pub fn cyclic_subspace<M: SmearModel>(
    model: &M,
    e: &[M::Dist],
    region: &RegionSmear,
    rel_tol: f64,
) -> Result<RealSubspace> {
    let gens = cyclic_generators(model, e, region)?;
    RealSubspace::from_generators(model.ambient_dim(), &gens, rel_tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionOutcome {
    pub inclusion_sine: f64,
    pub flow_mismatch: f64,
    pub invariance_sine: f64,
    pub angle: f64,
    pub equal: bool,
}

/// Equality test for V1 inside V2 when a one-parameter group with V2's modular operator
/// preserves V1. Every hypothesis is checked before the conclusion is read off.
pub fn longo_inclusion_test(
    v1: &RealSubspace,
    v2: &RealSubspace,
    flow: &dyn Fn(f64) -> CMat,
    samples: &[f64],
    tol: f64,
) -> Result<InclusionOutcome> {
    let inc = v1.inclusion_sine(v2);
    if inc > tol {
        return Err(Error::HypothesisViolated(format!("V1 not inside V2: sine {inc:.3e}")));
    }
    for (name, v) in [("V1", v1), ("V2", v2)] {
        let rep = standardness_report(v);
        if !rep.standard {
            return Err(Error::HypothesisViolated(format!(
                "{name} not standard: rank {} of {}, dim {}",
                rep.rank_v_plus_iv, rep.ambient_real_dim, rep.dim
            )));
        }
    }
    let pair = ModularPair::from_subspace(v2)?;
    let mut flow_mismatch: f64 = 0.0;
    let mut invariance_sine: f64 = 0.0;
    for &t in samples {
        let u = flow(t);
        let d = spectral_norm(&(&u - pair.delta_it(t)));
        if d > tol {
            return Err(Error::HypothesisViolated(format!("flow differs from Delta^it at t = {t}: {d:.3e}")));
        }
        flow_mismatch = flow_mismatch.max(d);
        let s = v1.transformed(&u).inclusion_sine(v1);
        if s > tol {
            return Err(Error::HypothesisViolated(format!("V1 not invariant at t = {t}: sine {s:.3e}")));
        }
        invariance_sine = invariance_sine.max(s);
    }
    let angle = v1.max_angle(v2);
    Ok(InclusionOutcome { inclusion_sine: inc, flow_mismatch, invariance_sine, angle, equal: angle <= tol })
}

/// Models whose modular orbits continue analytically to the boundary of the strip.
pub trait StripModel {
    type Generator;

    fn smeared(&self, g: &Self::Generator) -> Result<CVec>;

    /// The orbit t -> Delta^{-it/2pi} xi continued to t = i pi.
    fn continued_at_i_pi(&self, _g: &Self::Generator) -> Result<CVec> {
        Err(Error::ContinuationUnavailable)
    }

    fn conjugation(&self, v: &CVec) -> CVec;
}

#[derive(Debug, Clone, Serialize)]
pub struct KmsReport {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Compare the continued orbit at i pi against J xi on each probe.
pub fn kms_membership<M: StripModel>(model: &M, g: &M::Generator, probes: &[CVec]) -> Result<KmsReport> {
    let xi = model.smeared(g)?;
    let edge = model.continued_at_i_pi(g)?;
    let jxi = model.conjugation(&xi);
    let nxi = xi.norm();
    let mut residual: f64 = 0.0;
    for chi in probes {
        let d = (chi.dotc(&edge) - chi.dotc(&jxi)).norm() / (chi.norm() * nxi).max(f64::MIN_POSITIVE);
        residual = residual.max(d);
    }
    Ok(KmsReport { residual, threshold: KMS_TOL, pass: residual < KMS_TOL })
}

/// Phase e^{i pi s} attached to continuing p^s to the far edge of the strip.
pub fn strip_phase(s: C) -> C {
    (C::new(0.0, PI) * s).exp()
}
