//! Weighted spaces of holomorphic functions on the upper half-plane with kernel
//! Q(z, w) = ((z - conj w) / 2i)^{-s}, the Moebius action of SL_2 words and the
//! evaluation-at-zero distribution vectors.
//!
//! Hilbert space computations run in two pictures. Frames of kernel sections
//! K_w carry Gram-matrix arithmetic. The L^2 picture F(z) = int e^{i lambda z / 2} f dmu,
//! dmu = lambda^{s-1} d lambda / Gamma(s), is stored on a log grid in p = lambda / 2
//! as g(p) = f(2p) (2p)^{s/2} Gamma(s)^{-1/2}, which is the ax+b model at exponent s/2
//! with translation x acting as b = -x.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::axb::{bump_transform, net_suite_with, AxbDist, AxbModel, AxbNetReport, NetConfig};
use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, CMat, CVec, C, I};
use crate::modular::{kms_membership, Bump, KmsReport};
use crate::quad;

pub const GRAM_PSD_TOL: f64 = 1e-10;
pub const FRAME_RESIDUAL_TOL: f64 = 1e-3;
pub const MAX_FRAME: usize = 64;
/// Relative eigenvalue threshold of the Gram pseudo-inverse.
pub const PINV_TOL: f64 = 1e-13;
const ADAPTED_ROWS: usize = 5;
/// Point spacing over row height, coarse to fine.
const ENLARGEMENT_DENSITIES: [f64; 3] = [2.0, 1.5, 1.0];

/// Q(z, w) on the principal branch; (z - conj w) / 2i has nonnegative real part.
pub fn kernel(s: f64, z: C, w: C) -> C {
    ((z - w.conj()) / (2.0 * I)).powc(cr(-s))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelFrame {
    pub s: f64,
    pub points: Vec<C>,
    #[serde(skip)]
    gram: CMat,
    #[serde(skip)]
    eig: (Vec<f64>, CMat),
    id: u64,
}

fn frame_id(s: f64, points: &[C]) -> u64 {
    let mut h = DefaultHasher::new();
    s.to_bits().hash(&mut h);
    for p in points {
        p.re.to_bits().hash(&mut h);
        p.im.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Coefficients of a combination of the frame's kernel sections.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVector {
    frame: u64,
    pub coeffs: CVec,
}

impl KernelFrame {
    pub fn new(s: f64, points: Vec<C>) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("kernel exponent {s}")));
        }
        for (i, w) in points.iter().enumerate() {
            if !(w.im > 0.0) {
                return Err(Error::LeftDomain(i));
            }
            if points[..i].iter().any(|v| (v - w).norm() < 1e-12) {
                return Err(Error::DuplicatePoints);
            }
        }
        let n = points.len();
        let gram = CMat::from_fn(n, n, |i, j| kernel(s, points[i], points[j]));
        let eig = herm_eig(&gram);
        let id = frame_id(s, &points);
        Ok(KernelFrame { s, points, gram, eig, id })
    }

    /// x in {-3, ..., 3} and y in {0.5, 1, 2}.
    pub fn default_points() -> Vec<C> {
        let mut pts = Vec::new();
        for y in [0.5, 1.0, 2.0] {
            for x in -3..=3 {
                pts.push(C::new(x as f64, y));
            }
        }
        pts
    }

    pub fn default_frame(s: f64) -> Result<Self> {
        Self::new(s, Self::default_points())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// Smallest Gram eigenvalue relative to the largest.
    pub fn min_eigen_ratio(&self) -> f64 {
        let top = self.eig.0.iter().cloned().fold(0.0, f64::max);
        self.eig.0.iter().cloned().fold(f64::INFINITY, f64::min) / top
    }

    pub fn vector(&self, coeffs: CVec) -> Result<FrameVector> {
        if coeffs.len() != self.len() {
            return Err(Error::FrameMismatch);
        }
        Ok(FrameVector { frame: self.id, coeffs })
    }

    /// <u, v> = u* G v.
    pub fn inner(&self, u: &FrameVector, v: &FrameVector) -> Result<C> {
        if u.frame != self.id || v.frame != self.id {
            return Err(Error::FrameMismatch);
        }
        Ok(u.coeffs.dotc(&(&self.gram * &v.coeffs)))
    }

    /// G^+ b on the eigenvalues above the threshold.
    pub fn pinv_apply(&self, b: &CVec) -> CVec {
        let (vals, vecs) = &self.eig;
        let top = vals.iter().cloned().fold(0.0, f64::max);
        let mut out = CVec::zeros(b.len());
        for (k, &l) in vals.iter().enumerate() {
            if l > PINV_TOL * top {
                let v = vecs.column(k);
                let coef = v.dotc(b) / l;
                out += v * coef;
            }
        }
        out
    }

    /// F(z) for F = sum u_j K_{w_j}.
    pub fn evaluate(&self, u: &FrameVector, z: C) -> Result<C> {
        if u.frame != self.id {
            return Err(Error::FrameMismatch);
        }
        Ok(self.points.iter().zip(u.coeffs.iter()).map(|(&w, &c)| c * kernel(self.s, z, w)).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Letter {
    Translate(f64),
    Dilate(f64),
    SpecialConformal(f64),
    Inversion,
}

impl Letter {
    /// SL_2 matrix [[a, b], [c, d]] acting by z -> (az + b) / (cz + d).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        match *self {
            Letter::Translate(x) => [[1.0, x], [0.0, 1.0]],
            Letter::Dilate(t) => [[(t / 2.0).exp(), 0.0], [0.0, (-t / 2.0).exp()]],
            Letter::SpecialConformal(c) => [[1.0, 0.0], [-c, 1.0]],
            Letter::Inversion => [[0.0, -1.0], [1.0, 0.0]],
        }
    }

    pub fn apply(&self, z: C) -> C {
        let [[a, b], [c, d]] = self.matrix();
        (z * a + b) / (z * c + d)
    }

    /// (cz + d)^s on the principal branch.
    pub fn cocycle(&self, s: f64, z: C) -> C {
        let [_, [c, d]] = self.matrix();
        (z * c + d).powc(cr(s))
    }

    /// Letters compressing the wedge: translations x <= 0, all dilations, special conformal c >= 0.
    pub fn in_semigroup(&self) -> bool {
        match *self {
            Letter::Translate(x) => x <= 0.0,
            Letter::Dilate(_) => true,
            Letter::SpecialConformal(c) => c >= 0.0,
            Letter::Inversion => false,
        }
    }
}

/// A product l_1 l_2 ... l_n, acting with l_n first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sl2Word {
    pub letters: Vec<Letter>,
}

impl Sl2Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Sl2Word { letters }
    }

    pub fn identity() -> Self {
        Sl2Word { letters: Vec::new() }
    }

    pub fn then(mut self, l: Letter) -> Self {
        self.letters.insert(0, l);
        self
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        for l in &self.letters {
            let a = l.matrix();
            m = [
                [m[0][0] * a[0][0] + m[0][1] * a[1][0], m[0][0] * a[0][1] + m[0][1] * a[1][1]],
                [m[1][0] * a[0][0] + m[1][1] * a[1][0], m[1][0] * a[0][1] + m[1][1] * a[1][1]],
            ];
        }
        m
    }

    pub fn in_semigroup(&self) -> bool {
        self.letters.iter().all(Letter::in_semigroup)
    }

    /// g.z together with the weight-s cocycle J(g, z) multiplied letter by letter.
    pub fn apply_with_cocycle(&self, s: f64, z: C) -> Result<(C, C)> {
        let mut w = z;
        let mut j = cr(1.0);
        for (k, l) in self.letters.iter().enumerate().rev() {
            j *= l.cocycle(s, w);
            w = l.apply(w);
            if !(w.im > 0.0) || !w.re.is_finite() {
                return Err(Error::LeftDomain(k));
            }
        }
        Ok((w, j))
    }

    pub fn apply(&self, z: C) -> Result<C> {
        Ok(self.apply_with_cocycle(1.0, z)?.0)
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let letters = (0..len)
            .map(|_| match rng.gen_range(0..4) {
                0 => Letter::Translate(rng.gen_range(-2.0..2.0)),
                1 => Letter::Dilate(rng.gen_range(-1.0..1.0)),
                2 => Letter::SpecialConformal(rng.gen_range(-0.5..0.5)),
                _ => Letter::Inversion,
            })
            .collect();
        Sl2Word { letters }
    }
}

/// U(g) K_w = conj(J(g, w))^{-1} K_{g w}: the transported frame and coefficients.
pub fn word_action_on_frame(g: &Sl2Word, frame: &KernelFrame, u: &FrameVector) -> Result<(KernelFrame, FrameVector)> {
    if u.frame != frame.id {
        return Err(Error::FrameMismatch);
    }
    let mut pts = Vec::with_capacity(frame.len());
    let mut coeffs = CVec::zeros(frame.len());
    for (k, &w) in frame.points.iter().enumerate() {
        let (gw, j) = g.apply_with_cocycle(frame.s, w)?;
        pts.push(gw);
        coeffs[k] = u.coeffs[k] / j.conj();
    }
    let moved = KernelFrame::new(frame.s, pts)?;
    let v = moved.vector(coeffs)?;
    Ok((moved, v))
}

/// | |U(g) F|^2 - |F|^2 | / |F|^2 measured through the two Gram matrices.
pub fn gram_invariance(g: &Sl2Word, frame: &KernelFrame, u: &FrameVector) -> Result<f64> {
    let (moved, v) = word_action_on_frame(g, frame, u)?;
    let a = frame.inner(u, u)?.re;
    let b = moved.inner(&v, &v)?.re;
    Ok((a - b).abs() / a)
}

/// ev_0^xi, paired with F as <F(0), xi>.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvZeroHandle {
    pub s: f64,
    pub xi: C,
}

impl EvZeroHandle {
    pub fn new(s: f64, xi: C) -> Result<Self> {
        if !(s > 0.0) || xi == cr(0.0) {
            return Err(Error::InvalidParameter(format!("handle s = {s}, xi = {xi}")));
        }
        Ok(EvZeroHandle { s, xi })
    }

    /// The member r e^{-i pi s / 4} of E.
    pub fn in_e(s: f64, r: f64) -> Result<Self> {
        Self::new(s, C::from_polar(r, -PI * s / 4.0))
    }

    /// |e^{i pi s / 2} xi - conj xi| / |xi|, zero exactly on E.
    pub fn e_defect(&self) -> f64 {
        (C::from_polar(1.0, PI * self.s / 2.0) * self.xi - self.xi.conj()).norm() / self.xi.norm()
    }

    pub fn in_e_flag(&self) -> bool {
        self.e_defect() < 1e-12
    }

    /// The same vector in the L^2 picture: xi 2^{s/2} Gamma(s)^{-1/2} p^{s/2}.
    pub fn to_axb(&self) -> Result<AxbDist> {
        let coef = self.xi * (2f64.powf(self.s / 2.0) / gamma(self.s).sqrt());
        AxbDist::combination(vec![(coef, cr(self.s / 2.0))])
    }
}

/// b -> -x on the translation axis, with the sign of odd derivatives.
pub fn reflect(bump: &Bump) -> (Bump, f64) {
    let mut b = bump.clone();
    b.center[0] = -b.center[0];
    let sign = if bump.orders[0] % 2 == 1 { -1.0 } else { 1.0 };
    (b, sign)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameSmear {
    #[serde(skip)]
    pub vector: FrameVector,
    pub values: Vec<C>,
    pub norm: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfPlaneModel {
    pub s: f64,
    pub phi: AxbModel,
}

impl HalfPlaneModel {
    pub fn new(s: f64, phi: AxbModel) -> Result<Self> {
        if !(s > 0.0 && s <= 8.0) {
            return Err(Error::InvalidParameter(format!("half-plane exponent {s}")));
        }
        Ok(HalfPlaneModel { s, phi })
    }

    pub fn with_default_grid(s: f64) -> Result<Self> {
        Self::new(s, AxbModel::net_default())
    }

    /// K_w in the L^2 picture: e^{-i p conj w} (2p)^{s/2} Gamma(s)^{-1/2}.
    pub fn kernel_vector(&self, w: C) -> CVec {
        let c = 1.0 / gamma(self.s).sqrt();
        let s = self.s;
        self.phi.grid.sample(|p| (-I * p * w.conj()).exp() * ((2.0 * p).powf(s / 2.0) * c))
    }

    /// F(w) = <K_w, F> for a grid vector.
    pub fn value_at(&self, g: &CVec, w: C) -> C {
        self.kernel_vector(w).dotc(g)
    }

    /// Smear of ev_0^xi over T_x D_t (coordinates (x, t)) in the L^2 picture.
    pub fn smear_grid(&self, bump: &Bump, h: &EvZeroHandle) -> Result<CVec> {
        let (r, sign) = reflect(bump);
        Ok(self.phi.smear(&r, &h.to_axb()?, 64)? * cr(sign))
    }

    /// F(w) = xi int int phi(x, t) e^{(s/2 - 1) t} Q(w, x) dx dt by quadrature over boundary sections.
    pub fn smear_values_kernel(&self, bump: &Bump, h: &EvZeroHandle, points: &[C]) -> Vec<C> {
        let t_factor = if bump.dims() == 2 {
            bump.axis_rule(1, 64).integrate(|t| bump.axis_value(1, t) * ((self.s / 2.0 - 1.0) * t).exp())
        } else {
            1.0
        };
        let (lo, hi) = bump.support();
        points
            .iter()
            .map(|&w| {
                let panels = ((2.0 * (hi[0] - lo[0]) / w.im).ceil() as usize).max(8);
                let rule = quad::composite_gl(lo[0], hi[0], panels, 16);
                let acc: C = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &wt)| kernel(self.s, w, cr(x)) * (wt * bump.axis_value(0, x)))
                    .sum();
                acc * h.xi * t_factor
            })
            .collect()
    }

    /// Frame points over the interval [lo, hi]: rows at heights y_k = y0 2^k with spacing
    /// close to `density` y_k, at most `budget` points.
    pub fn adapted_points(lo: f64, hi: f64, y0: f64, density: f64, budget: usize) -> Vec<C> {
        let mut pts = Vec::with_capacity(budget);
        for k in 0..ADAPTED_ROWS {
            let y = y0 * 2f64.powi(k as i32);
            let (a, b) = (lo - y, hi + y);
            let n = ((b - a) / (density * y)).ceil().max(2.0) as usize;
            for i in 0..n {
                if pts.len() >= budget {
                    return pts;
                }
                pts.push(C::new(a + (b - a) * (i as f64 + 0.5) / n as f64, y));
            }
        }
        pts
    }

    /// The default frame plus adapted points over the x-support of the bumps.
    pub fn adapted_frame(&self, bumps: &[&Bump], density: f64) -> Result<KernelFrame> {
        let lo = bumps.iter().map(|b| b.support().0[0]).fold(f64::INFINITY, f64::min);
        let hi = bumps.iter().map(|b| b.support().1[0]).fold(f64::NEG_INFINITY, f64::max);
        let r = bumps.iter().map(|b| b.radius[0]).fold(f64::INFINITY, f64::min);
        let mut pts = KernelFrame::default_points();
        for p in Self::adapted_points(lo, hi, 0.1 * r, density, MAX_FRAME) {
            if pts.len() >= MAX_FRAME {
                break;
            }
            if pts.iter().all(|q| (q - p).norm() > 1e-9) {
                pts.push(p);
            }
        }
        KernelFrame::new(self.s, pts)
    }

    /// Best frame approximation of the smear with the relative residual of the L^2 norm.
    pub fn smear_in_frame(&self, bump: &Bump, h: &EvZeroHandle, frame: &KernelFrame) -> Result<FrameSmear> {
        let values = self.smear_values_kernel(bump, h, &frame.points);
        let b = CVec::from_vec(values.clone());
        let u = frame.pinv_apply(&b);
        let g = self.smear_grid(bump, h)?;
        let norm = g.norm();
        let mut approx = CVec::zeros(g.len());
        for (&w, &c) in frame.points.iter().zip(u.iter()) {
            approx += self.kernel_vector(w) * c;
        }
        let residual = (g - approx).norm() / norm;
        Ok(FrameSmear { vector: frame.vector(u)?, values, norm, residual })
    }

    /// Frame smear on the default frame, enlarged with adapted points until the residual is below
    /// the bound or the frame reaches its maximal size.
    pub fn smear_ev0(&self, bump: &Bump, h: &EvZeroHandle) -> Result<(KernelFrame, FrameSmear)> {
        let frame = KernelFrame::default_frame(self.s)?;
        let mut fs = self.smear_in_frame(bump, h, &frame)?;
        if fs.residual <= FRAME_RESIDUAL_TOL {
            return Ok((frame, fs));
        }
        for density in ENLARGEMENT_DENSITIES {
            let frame = self.adapted_frame(&[bump], density)?;
            fs = self.smear_in_frame(bump, h, &frame)?;
            if fs.residual <= FRAME_RESIDUAL_TOL {
                return Ok((frame, fs));
            }
        }
        Err(Error::FrameInsufficiency(fs.residual))
    }

    /// bo(F)(phi) for a frame vector, by the L^2 picture and by integrating phi against F on the
    /// real line, where F continues analytically because every pole sits below the axis.
    pub fn boundary_values(&self, frame: &KernelFrame, u: &FrameVector, phi: &Bump) -> Result<(C, C)> {
        if u.frame != frame.id {
            return Err(Error::FrameMismatch);
        }
        let s = self.s;
        let y_min = frame.points.iter().map(|w| w.im).fold(f64::INFINITY, f64::min);
        let c = 1.0 / gamma(s);
        let integrand = |p: f64| -> C {
            let ft = bump_transform(phi, 0, p);
            let f: C = frame.points.iter().zip(u.coeffs.iter()).map(|(&w, &a)| a * (-I * p * w.conj()).exp()).sum();
            ft * f * ((2.0 * p).powf(s) * c)
        };
        let mut l2 = cr(0.0);
        let u_lo = -50.0 / s;
        let u_hi = (60.0 / y_min).ln();
        let rule = quad::composite_gl(u_lo, u_hi, 256, 16);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            l2 += integrand(t.exp()) * w;
        }
        let line = phi
            .axis_rule(0, 256)
            .nodes
            .iter()
            .zip(&phi.axis_rule(0, 256).weights)
            .map(|(&x, &w)| frame.evaluate(u, cr(x)).map(|f| f * (w * phi.axis_value(0, x))))
            .sum::<Result<C>>()?;
        Ok((l2, line))
    }

    /// The same limit approached from inside: Richardson extrapolation in y of
    /// int phi(x) F(x + iy) dx at y = y0, y0/2, y0/4.
    pub fn boundary_limit(&self, frame: &KernelFrame, u: &FrameVector, phi: &Bump, y0: f64) -> Result<C> {
        let rule = phi.axis_rule(0, 256);
        let at = |y: f64| -> Result<C> {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| frame.evaluate(u, C::new(x, y)).map(|f| f * (w * phi.axis_value(0, x))))
                .sum()
        };
        let (a, b, c) = (at(y0)?, at(y0 / 2.0)?, at(y0 / 4.0)?);
        let r1 = b * 2.0 - a;
        let r2 = c * 2.0 - b;
        Ok((r2 * 4.0 - r1) / 3.0)
    }
}

/// F(0) = lim F(z), which is unchanged by N^- and scaled by e^{-ts/2} under D_t.
pub fn ev_zero(frame: &KernelFrame, u: &FrameVector) -> Result<C> {
    frame.evaluate(u, cr(0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct EFilterRow {
    pub s: f64,
    pub member: KmsReport,
    pub non_member: KmsReport,
}

/// KMS membership of smears of ev_0^xi for xi inside and outside E.
pub fn e_filter(s_values: &[f64], probes_seed: u64) -> Result<Vec<EFilterRow>> {
    let mut rows = Vec::new();
    for &s in s_values {
        let hp = HalfPlaneModel::new(s, AxbModel::new(crate::spectral::LogGrid::new(1e-12, 1e4, 2048)?))?;
        let probes = crate::axb::probe_vectors(&hp.phi.grid, 4, probes_seed);
        let bump = Bump::new(vec![-1.0, 0.0], vec![0.5, 0.2]);
        let (r, _) = reflect(&bump);
        let inside = EvZeroHandle::in_e(s, 1.0)?;
        let outside = EvZeroHandle::new(s, C::from_polar(1.0, -PI * s / 4.0 + 0.5))?;
        let member = kms_membership(&hp.phi, &(r.clone(), inside.to_axb()?), &probes)?;
        let non_member = kms_membership(&hp.phi, &(r, outside.to_axb()?), &probes)?;
        rows.push(EFilterRow { s, member, non_member });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossModelReport {
    pub pairs: usize,
    pub max_relerr: f64,
    pub max_frame_residual: f64,
}

/// Six plain bumps over x in [-1.5, -0.5] and 20 of their pairs.
pub fn cross_model_sample() -> (Vec<Bump>, Vec<(usize, usize)>) {
    let bumps: Vec<Bump> = [(-1.0, 0.5), (-1.1, 0.4), (-0.9, 0.4), (-1.05, 0.45), (-0.95, 0.45), (-1.0, 0.35)]
        .iter()
        .map(|&(c, r)| Bump::new(vec![c, 0.1 * c], vec![r, 0.2]))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..bumps.len() {
        for j in i..bumps.len() {
            pairs.push((i, j));
        }
    }
    pairs.truncate(20);
    (bumps, pairs)
}

/// Gram values of half-plane frame smears against the ax+b inner products of the
/// corresponding smears of the phased vector at exponent s/2, which differ by the
/// constant 2^s / Gamma(s).
pub fn cross_model_check(hp: &HalfPlaneModel, bumps: &[Bump], pairs: &[(usize, usize)]) -> Result<CrossModelReport> {
    let h = EvZeroHandle::in_e(hp.s, 1.0)?;
    let dist = AxbDist::phased(hp.s / 2.0)?;
    let norm2 = 2f64.powf(hp.s) / gamma(hp.s);
    let frame = hp.adapted_frame(&bumps.iter().collect::<Vec<_>>(), 1.0)?;
    let mut smears = Vec::with_capacity(bumps.len());
    let mut max_frame_residual: f64 = 0.0;
    for b in bumps {
        let fs = hp.smear_in_frame(b, &h, &frame)?;
        max_frame_residual = max_frame_residual.max(fs.residual);
        smears.push(fs);
    }
    let mut axb = Vec::with_capacity(bumps.len());
    for b in bumps {
        let (r, sign) = reflect(b);
        axb.push(hp.phi.smear(&r, &dist, 64)? * cr(sign));
    }
    let mut max_relerr: f64 = 0.0;
    for &(i, j) in pairs {
        let g_hp = frame.inner(&smears[i].vector, &smears[j].vector)?;
        let g_ax = axb[i].dotc(&axb[j]) * norm2;
        let scale = (axb[i].norm() * axb[j].norm() * norm2).max(f64::MIN_POSITIVE);
        max_relerr = max_relerr.max((g_hp - g_ax).norm() / scale);
    }
    Ok(CrossModelReport { pairs: pairs.len(), max_relerr, max_frame_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct WedgeNetReport {
    pub s: f64,
    pub frame_min_eigen_ratio: f64,
    pub gram_invariance: f64,
    pub semigroup_words: usize,
    pub n_minus_invariance: f64,
    pub a_eigen_residual: f64,
    pub route_relerr: f64,
    pub frame_residual: f64,
    pub frame_size: usize,
    pub net: AxbNetReport,
    pub orbit_word: Sl2Word,
}

/// Net properties of the half-plane model at truncation.
pub fn wedge_net_suite<R: Rng>(s: f64, cfg: &NetConfig, rng: &mut R) -> Result<WedgeNetReport> {
    let hp = HalfPlaneModel::with_default_grid(s)?;
    let frame = KernelFrame::default_frame(s)?;
    let frame_min_eigen_ratio = frame.min_eigen_ratio();

    let mut gram_inv: f64 = 0.0;
    let mut semigroup_words = 0;
    let mut words = vec![
        Sl2Word::new(vec![Letter::Translate(1.3)]),
        Sl2Word::new(vec![Letter::Dilate(0.7)]),
        Sl2Word::new(vec![Letter::SpecialConformal(0.4)]),
        Sl2Word::new(vec![Letter::Inversion]),
    ];
    for _ in 0..20 {
        words.push(Sl2Word::random(2, rng));
    }
    for _ in 0..5 {
        let w = Sl2Word::random(3, rng);
        words.push(w);
    }
    let coeffs = CVec::from_iterator(
        frame.len(),
        (0..frame.len()).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    );
    let u = frame.vector(coeffs)?;
    for w in &words {
        match gram_invariance(w, &frame, &u) {
            Ok(d) => gram_inv = gram_inv.max(d),
            Err(Error::LeftDomain(_)) => continue,
            Err(e) => return Err(e),
        }
        if w.in_semigroup() {
            semigroup_words += 1;
        }
    }

    let f0 = ev_zero(&frame, &u)?;
    let mut n_minus: f64 = 0.0;
    for c in [-0.4, 0.2, 0.5] {
        let (moved, v) = word_action_on_frame(&Sl2Word::new(vec![Letter::SpecialConformal(c)]), &frame, &u)?;
        n_minus = n_minus.max((ev_zero(&moved, &v)? - f0).norm() / f0.norm());
    }
    let mut a_eigen: f64 = 0.0;
    for t in [-0.5, 0.3, 1.0] {
        let (moved, v) = word_action_on_frame(&Sl2Word::new(vec![Letter::Dilate(t)]), &frame, &u)?;
        let expect = f0 * (-t * s / 2.0).exp();
        a_eigen = a_eigen.max((ev_zero(&moved, &v)? - expect).norm() / f0.norm());
    }

    let handle = EvZeroHandle::in_e(s, 1.0)?;
    let bump = Bump::new(vec![-1.0, 0.1], vec![0.5, 0.2]);
    let (big, fs) = hp.smear_ev0(&bump, &handle)?;
    let g = hp.smear_grid(&bump, &handle)?;
    let mut route: f64 = 0.0;
    for (w, v) in big.points.iter().zip(&fs.values) {
        let phi_value = hp.value_at(&g, *w);
        route = route.max((phi_value - v).norm() / v.norm().max(f64::MIN_POSITIVE));
    }

    let net_cfg = NetConfig { s: s / 2.0, ..cfg.clone() };
    let net = net_suite_with(&hp.phi, &net_cfg, &handle.to_axb()?)?;
    Ok(WedgeNetReport {
        s,
        frame_min_eigen_ratio,
        gram_invariance: gram_inv,
        semigroup_words,
        n_minus_invariance: n_minus,
        a_eigen_residual: a_eigen,
        route_relerr: route,
        frame_residual: fs.residual,
        frame_size: big.len(),
        net,
        orbit_word: Sl2Word::new(vec![Letter::Translate(1.0)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn kernel_normalization_and_diagonal() {
        assert!((kernel(1.0, I, I) - cr(1.0)).norm() < 1e-15);
        let w = C::new(0.3, 0.7);
        assert!((kernel(2.5, w, w) - cr(0.7f64.powf(-2.5))).norm() < 1e-12);
    }

    #[test]
    fn frame_gram_is_psd_and_cauchy_schwarz_is_tight() {
        for s in [0.3, 1.0, 2.7] {
            let f = KernelFrame::default_frame(s).unwrap();
            assert!(f.min_eigen_ratio() > -GRAM_PSD_TOL);
        }
        let f = KernelFrame::new(1.0, vec![C::new(0.0, 1.0), C::new(1.0, 0.5)]).unwrap();
        let a = f.vector(CVec::from_vec(vec![cr(2.0), cr(0.0)])).unwrap();
        let b = f.vector(CVec::from_vec(vec![C::new(0.0, -1.0), cr(0.0)])).unwrap();
        let ab = f.inner(&a, &b).unwrap().norm();
        let nn = (f.inner(&a, &a).unwrap().re * f.inner(&b, &b).unwrap().re).sqrt();
        assert!((ab - nn).abs() < 1e-10 * nn);
        let other = KernelFrame::default_frame(1.0).unwrap();
        assert_eq!(other.inner(&a, &a), Err(Error::FrameMismatch));
    }

    #[test]
    fn words_preserve_gram_norms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = KernelFrame::default_frame(1.3).unwrap();
        let u = f.vector(CVec::from_fn(f.len(), |k, _| C::new((k as f64).sin(), (k as f64).cos()))).unwrap();
        for _ in 0..30 {
            let w = Sl2Word::random(2, &mut rng);
            if let Ok(d) = gram_invariance(&w, &f, &u) {
                assert!(d < 1e-8, "{w:?}: {d}");
            }
        }
    }

    #[test]
    fn translations_move_sections_exactly() {
        let f = KernelFrame::default_frame(1.0).unwrap();
        let u = f.vector(CVec::from_element(f.len(), cr(1.0))).unwrap();
        let (moved, v) = word_action_on_frame(&Sl2Word::new(vec![Letter::Translate(0.5)]), &f, &u).unwrap();
        assert_eq!(v.coeffs, u.coeffs);
        assert!((moved.points[0] - f.points[0] - cr(0.5)).norm() < 1e-15);
    }

    #[test]
    fn e_condition_flag() {
        let h = EvZeroHandle::in_e(1.0, 2.0).unwrap();
        assert!(h.in_e_flag());
        assert!(!EvZeroHandle::new(1.0, cr(1.0)).unwrap().in_e_flag());
        assert!(EvZeroHandle::new(4.0, cr(1.0)).unwrap().in_e_flag());
    }

    #[test]
    fn kernel_vector_reproduces_gram() {
        let hp =
            HalfPlaneModel::new(1.0, AxbModel::new(crate::spectral::LogGrid::new(1e-14, 1e3, 4096).unwrap())).unwrap();
        let (z, w) = (C::new(0.2, 0.6), C::new(-0.5, 1.1));
        let g = hp.kernel_vector(z).dotc(&hp.kernel_vector(w));
        assert!((g - kernel(1.0, z, w)).norm() < 1e-8, "{g} {}", kernel(1.0, z, w));
    }

    #[test]
    fn left_domain_is_reported() {
        let w = Sl2Word::new(vec![Letter::Inversion]);
        assert!(matches!(w.apply_with_cocycle(1.0, cr(0.0)), Err(Error::LeftDomain(0))));
    }

    #[test]
    fn smear_routes_frame_and_boundary_values() {
        let hp =
            HalfPlaneModel::new(1.0, AxbModel::new(crate::spectral::LogGrid::new(1e-12, 1e4, 4096).unwrap())).unwrap();
        let h = EvZeroHandle::in_e(1.0, 1.0).unwrap();
        let bump = Bump::new(vec![-1.0, 0.1], vec![0.5, 0.2]);
        let (frame, fs) = hp.smear_ev0(&bump, &h).unwrap();
        assert!(fs.residual < FRAME_RESIDUAL_TOL);
        let g = hp.smear_grid(&bump, &h).unwrap();
        for (w, v) in frame.points.iter().zip(&fs.values) {
            assert!((hp.value_at(&g, *w) - v).norm() < 1e-6 * v.norm());
        }
        let phi = Bump::new(vec![0.3], vec![0.7]);
        let (l2, line) = hp.boundary_values(&frame, &fs.vector, &phi).unwrap();
        assert!((l2 - line).norm() < 1e-6 * l2.norm(), "{l2} {line}");
        let lim = hp.boundary_limit(&frame, &fs.vector, &phi, 0.02).unwrap();
        assert!((lim - line).norm() < 1e-4 * l2.norm());
    }

    #[test]
    fn small_frames_report_insufficiency() {
        let hp =
            HalfPlaneModel::new(2.0, AxbModel::new(crate::spectral::LogGrid::new(1e-12, 1e4, 2048).unwrap())).unwrap();
        let h = EvZeroHandle::in_e(2.0, 1.0).unwrap();
        let bump = Bump::new(vec![-1.0, 0.0], vec![0.5, 0.2]).with_orders(vec![2, 0]);
        assert!(matches!(hp.smear_ev0(&bump, &h), Err(Error::FrameInsufficiency(_))));
    }
}
