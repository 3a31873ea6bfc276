//! The ax+b group acting on L^2(R_+, dp/p) and its power-function distribution vectors.
//!
//! Group elements are written (b, a) with a = e^t, acting by x -> ax + b. The
//! representation is (U(b, a) f)(p) = e^{ibp} f(ap), and a < 0 acts through
//! complex conjugation. Left Haar measure is db da / a^2 = e^{-t} db dt and
//! the modular function is 1/a.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, vec_rel_err, CVec, C, I};
use crate::modular::{
    cyclic_generators, im_pairing_ratio, standardness_report_tol, symplectic_complement, BoxRegion, Bump, RealSubspace,
    RegionSmear, SmearModel, StandardnessReport, StripModel,
};
use crate::quad::{self, Rule};
use crate::spectral::{complex_rank, Band, LogGrid};

/// Beyond this frequency the unit bump transform is below 1e-20 and is set to zero.
pub const OMEGA_CUT: f64 = 1500.0;

/// Coordinate window for sampled group functions, |b| and |t| bounds.
pub const WINDOW_B: f64 = 40.0;
pub const WINDOW_T: f64 = 8.0;

fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| quad::gauss_legendre(16))
}

fn panel_sum(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64, f64)) {
    let rule = gl16();
    let w = (b - a) / panels as f64;
    for j in 0..panels {
        let lo = a + j as f64 * w;
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            f(lo + 0.5 * w * (x + 1.0), 0.5 * w * wt);
        }
    }
}

/// Moments int u^{2n} beta(u) du / mass, for the Taylor series of the transform near 0.
fn even_moments() -> &'static [f64] {
    static M: OnceLock<Vec<f64>> = OnceLock::new();
    M.get_or_init(|| {
        let rule = quad::composite_gl(0.0, 1.0, 8, 64);
        let mass = quad::bump_mass();
        (0..SERIES_TERMS)
            .map(|n| 2.0 * rule.integrate(|u| u.powi(2 * n as i32) * quad::bump_profile(u)) / mass)
            .collect()
    })
}

const SERIES_TERMS: usize = 14;
const SERIES_RADIUS: f64 = 1.0;

/// Nodes and weights times the profile on [0, 1] with `panels` 16-point panels.
fn weighted_profile(panels: usize) -> std::sync::Arc<Vec<(f64, f64)>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("profile cache");
    guard
        .entry(panels)
        .or_insert_with(|| {
            let mut v = Vec::with_capacity(16 * panels);
            panel_sum(0.0, 1.0, panels, |u, w| v.push((u, w * quad::bump_profile(u))));
            Arc::new(v)
        })
        .clone()
}

/// B(w) = int beta(u) e^{iwu} du / mass for the normalized unit bump. Real and even.
pub fn unit_bump_transform(w: f64) -> f64 {
    let w = w.abs();
    if w > OMEGA_CUT {
        return 0.0;
    }
    if w <= SERIES_RADIUS {
        let w2 = w * w;
        let mut term = 1.0;
        let mut acc = 0.0;
        for (n, mu) in even_moments().iter().enumerate() {
            acc += term * mu;
            term *= -w2 / (((2 * n + 1) * (2 * n + 2)) as f64);
        }
        return acc;
    }
    let panels = ((w / 8.0).ceil() as usize).max(8);
    let nodes = weighted_profile(panels);
    let acc: f64 = nodes.iter().map(|&(u, wb)| wb * (w * u).cos()).sum();
    2.0 * acc / quad::bump_mass()
}

/// int phi(x) e^{ipx} dx for the factor of `bump` along `axis`.
pub fn bump_transform(bump: &Bump, axis: usize, p: f64) -> C {
    let r = bump.radius[axis];
    let k = bump.orders[axis];
    let w = p * r;
    C::from_polar(1.0, p * bump.center[axis]) * (-I * w).powu(k as u32) * unit_bump_transform(w)
}

/// The same transform by quadrature of phi(x) e^{ipx} over the support.
pub fn bump_transform_direct(bump: &Bump, axis: usize, p: f64) -> C {
    let r = bump.radius[axis];
    let w = (p * r).abs();
    if w > OMEGA_CUT {
        return cr(0.0);
    }
    let (lo, hi) = bump.support();
    let panels = ((w / 2.0).ceil() as usize).max(16);
    let mut acc = cr(0.0);
    panel_sum(lo[axis], hi[axis], panels, |x, wt| {
        acc += C::from_polar(wt * bump.axis_value(axis, x), p * x);
    });
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffElement {
    pub b: f64,
    pub a: f64,
    pub flip: bool,
}

impl AffElement {
    pub fn new(b: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("affine element ({b}, {a})")));
        }
        Ok(AffElement { b, a, flip: false })
    }

    pub fn identity() -> Self {
        AffElement { b: 0.0, a: 1.0, flip: false }
    }

    pub fn translation(b: f64) -> Self {
        AffElement { b, a: 1.0, flip: false }
    }

    pub fn dilation(t: f64) -> Self {
        AffElement { b: 0.0, a: t.exp(), flip: false }
    }

    /// The element (0, -1), acting as the conjugation J.
    pub fn reflection() -> Self {
        AffElement { b: 0.0, a: 1.0, flip: true }
    }

    pub fn signed_a(&self) -> f64 {
        if self.flip {
            -self.a
        } else {
            self.a
        }
    }

    fn from_signed(b: f64, sa: f64) -> Self {
        AffElement { b, a: sa.abs(), flip: sa < 0.0 }
    }

    pub fn compose(&self, o: &AffElement) -> AffElement {
        let sa = self.signed_a();
        Self::from_signed(self.b + sa * o.b, sa * o.signed_a())
    }

    pub fn inverse(&self) -> AffElement {
        let sa = self.signed_a();
        Self::from_signed(-self.b / sa, 1.0 / sa)
    }

    pub fn act(&self, x: f64) -> f64 {
        self.signed_a() * x + self.b
    }

    pub fn modular_function(&self) -> f64 {
        1.0 / self.a
    }

    /// Conjugation by the reflection, (b, a) -> (-b, a).
    pub fn tau(&self) -> AffElement {
        AffElement { b: -self.b, ..*self }
    }

    pub fn log_a(&self) -> f64 {
        self.a.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Plain,
    Phased,
    Paired,
    Combination,
}

/// A finite combination of power functions p^z, never materialized on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxbDist {
    pub s: C,
    pub variant: Variant,
    terms: Vec<(C, C)>,
}

fn check_exponent(s: C) -> Result<()> {
    if s.re > 0.0 && s.re <= 4.0 && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent {s} outside 0 < Re s <= 4")))
    }
}

impl AxbDist {
    /// eta_s = p^s.
    pub fn plain(s: C) -> Result<Self> {
        check_exponent(s)?;
        Ok(AxbDist { s, variant: Variant::Plain, terms: vec![(cr(1.0), s)] })
    }

    /// e^{-i pi s / 2} p^s for real s.
    pub fn phased(s: f64) -> Result<Self> {
        check_exponent(cr(s))?;
        Ok(AxbDist { s: cr(s), variant: Variant::Phased, terms: vec![(C::from_polar(1.0, -PI * s / 2.0), cr(s))] })
    }

    /// eta_s + e^{-i pi conj(s)} eta_{conj(s)}.
    pub fn paired(s: C) -> Result<Self> {
        check_exponent(s)?;
        let phase = (-I * PI * s.conj()).exp();
        Ok(AxbDist { s, variant: Variant::Paired, terms: vec![(cr(1.0), s), (phase, s.conj())] })
    }

    /// A general finite combination of coefficient and exponent pairs.
    pub fn combination(terms: Vec<(C, C)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty combination".into()))?.1;
        for &(_, z) in &terms {
            check_exponent(z)?;
        }
        Ok(AxbDist { s: first, variant: Variant::Combination, terms })
    }

    /// Coefficient and exponent of each power function.
    pub fn terms(&self) -> &[(C, C)] {
        &self.terms
    }

    /// Image under J: coefficients and exponents conjugated.
    pub fn conjugate(&self) -> AxbDist {
        AxbDist {
            s: self.s.conj(),
            variant: self.variant,
            terms: self.terms.iter().map(|(a, z)| (a.conj(), z.conj())).collect(),
        }
    }

    pub fn norm(&self) -> Result<f64> {
        Err(Error::RawDistribution)
    }
}

/// Real test functions on the group in coordinates (b, t).
pub trait GroupFunction {
    fn eval(&self, b: f64, t: f64) -> f64;

    /// Bounding box [b_lo, b_hi, t_lo, t_hi] of the support.
    fn support(&self) -> [f64; 4];
}

impl GroupFunction for Bump {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if b <= lo[0] || b >= hi[0] || t <= lo[1] || t >= hi[1] {
            return 0.0;
        }
        self.value(&[b, t])
    }

    fn support(&self) -> [f64; 4] {
        let (lo, hi) = Bump::support(self);
        [lo[0], hi[0], lo[1], hi[1]]
    }
}

fn inv(b: f64, t: f64) -> (f64, f64) {
    (-b * (-t).exp(), -t)
}

fn mul(x: (f64, f64), y: (f64, f64)) -> (f64, f64) {
    (x.0 + x.1.exp() * y.0, x.1 + y.1)
}

fn corners(s: &[f64; 4]) -> [(f64, f64); 4] {
    [(s[0], s[2]), (s[0], s[3]), (s[1], s[2]), (s[1], s[3])]
}

fn bounding(points: impl Iterator<Item = (f64, f64)>) -> [f64; 4] {
    let mut out = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for (b, t) in points {
        out[0] = out[0].min(b);
        out[1] = out[1].max(b);
        out[2] = out[2].min(t);
        out[3] = out[3].max(t);
    }
    out
}

fn inverse_box(s: &[f64; 4]) -> [f64; 4] {
    bounding(corners(s).into_iter().map(|(b, t)| inv(b, t)))
}

fn product_box(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    bounding(corners(x).into_iter().flat_map(|g| corners(y).into_iter().map(move |h| mul(g, h))))
}

/// phi*(g) = conj(phi(g^{-1})) Delta(g)^{-1}.
pub struct Star<'a>(pub &'a dyn GroupFunction);

impl GroupFunction for Star<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let (bi, ti) = inv(b, t);
        t.exp() * self.0.eval(bi, ti)
    }

    fn support(&self) -> [f64; 4] {
        inverse_box(&self.0.support())
    }
}

/// phi^v(g) = phi(g^{-1}) Delta(g)^{-1}.
pub struct Checked<'a>(pub &'a dyn GroupFunction);

impl GroupFunction for Checked<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let (bi, ti) = inv(b, t);
        self.0.eval(bi, ti) * t.exp()
    }

    fn support(&self) -> [f64; 4] {
        inverse_box(&self.0.support())
    }
}

/// (lambda_g phi)(x) = phi(g^{-1} x).
pub struct LeftTranslate<'a> {
    pub f: &'a dyn GroupFunction,
    pub g: (f64, f64),
}

impl GroupFunction for LeftTranslate<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let (bb, tt) = mul(inv(self.g.0, self.g.1), (b, t));
        self.f.eval(bb, tt)
    }

    fn support(&self) -> [f64; 4] {
        let g = self.g;
        bounding(corners(&self.f.support()).into_iter().map(|x| mul(g, x)))
    }
}

/// phi_g(x) = phi(x g).
pub struct RightTranslate<'a> {
    pub f: &'a dyn GroupFunction,
    pub g: (f64, f64),
}

impl GroupFunction for RightTranslate<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let (bb, tt) = mul((b, t), self.g);
        self.f.eval(bb, tt)
    }

    fn support(&self) -> [f64; 4] {
        let gi = inv(self.g.0, self.g.1);
        bounding(corners(&self.f.support()).into_iter().map(|x| mul(x, gi)))
    }
}

/// Sampling lattice for group functions: b-step `db`, t-step `t_steps` grid steps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lattice {
    pub db: f64,
    pub t_steps: usize,
}

/// A group function stored on lattice nodes (i db, j dt).
#[derive(Debug, Clone, Serialize)]
pub struct SampledFunction {
    pub db: f64,
    pub dt: f64,
    pub i0: i64,
    pub j0: i64,
    pub nb: usize,
    pub nt: usize,
    pub values: Vec<f64>,
}

impl SampledFunction {
    fn at(&self, i: i64, j: i64) -> f64 {
        let (ii, jj) = (i - self.i0, j - self.j0);
        if ii < 0 || jj < 0 || ii >= self.nb as i64 || jj >= self.nt as i64 {
            return 0.0;
        }
        self.values[jj as usize * self.nb + ii as usize]
    }
}

impl GroupFunction for SampledFunction {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let x = b / self.db;
        let y = t / self.dt;
        let (i, j) = (x.floor(), y.floor());
        let (fx, fy) = (x - i, y - j);
        let (i, j) = (i as i64, j as i64);
        (1.0 - fx) * (1.0 - fy) * self.at(i, j)
            + fx * (1.0 - fy) * self.at(i + 1, j)
            + (1.0 - fx) * fy * self.at(i, j + 1)
            + fx * fy * self.at(i + 1, j + 1)
    }

    fn support(&self) -> [f64; 4] {
        [
            (self.i0 - 1) as f64 * self.db,
            (self.i0 + self.nb as i64) as f64 * self.db,
            (self.j0 - 1) as f64 * self.dt,
            (self.j0 + self.nt as i64) as f64 * self.dt,
        ]
    }
}

fn check_window(s: &[f64; 4], what: &str) -> Result<()> {
    if s[0] < -WINDOW_B || s[1] > WINDOW_B || s[2] < -WINDOW_T || s[3] > WINDOW_T {
        return Err(Error::SupportOverflow(format!(
            "{what} support [{:.3}, {:.3}] x [{:.3}, {:.3}] exits the window",
            s[0], s[1], s[2], s[3]
        )));
    }
    Ok(())
}

/// Two evaluations of the same quantity and their relative difference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualRoute {
    pub grid: C,
    pub direct: C,
    pub relerr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxbModel {
    pub grid: LogGrid,
}

impl AxbModel {
    pub fn new(grid: LogGrid) -> Self {
        AxbModel { grid }
    }

    /// Grid for net computations: 8192 nodes on [1e-12, 1e4].
    pub fn net_default() -> Self {
        Self::new(LogGrid::new(1e-12, 1e4, 8192).expect("valid grid"))
    }

    /// Grid for the group-algebra laws: 1536 nodes on [1e-3, 1e3].
    pub fn algebra_default() -> Self {
        Self::new(LogGrid::new(1e-3, 1e3, 1536).expect("valid grid"))
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn rep_apply(&self, g: &AffElement, f: &CVec) -> Result<CVec> {
        let base = if g.flip { f.map(|z| z.conj()) } else { f.clone() };
        let mut out = if g.a == 1.0 { base } else { self.grid.dilate(&base, g.log_a())? };
        for (k, p) in self.grid.nodes().enumerate() {
            out[k] *= C::from_polar(1.0, g.b * p);
        }
        Ok(out)
    }

    pub fn conjugation(&self, f: &CVec) -> CVec {
        f.map(|z| z.conj())
    }

    /// <f, P f> for the translation generator P = multiplication by p.
    pub fn energy(&self, f: &CVec) -> f64 {
        self.grid.nodes().zip(f.iter()).map(|(p, z)| p * z.norm_sqr()).sum()
    }

    /// Dilation factors: coefficient times int phi_t(t) e^{(z-1)t} dt for each power p^z.
    fn dilation_terms(&self, bump: &Bump, eta: &AxbDist, nodes: usize) -> Vec<(C, C)> {
        if bump.dims() == 1 {
            return eta.terms().to_vec();
        }
        let rule = bump.axis_rule(1, nodes);
        eta.terms()
            .iter()
            .map(|&(coef, z)| {
                let m: C = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| ((z - 1.0) * t).exp() * (w * bump.axis_value(1, t)))
                    .sum();
                (coef * m, z)
            })
            .collect()
    }

    fn check_bump(bump: &Bump) -> Result<()> {
        match bump.dims() {
            1 | 2 => Ok(()),
            d => Err(Error::BadLength { expected: 2, got: d }),
        }
    }

    /// U(phi) eta = phi~(p) sum_z c_z m_z p^z, with the b-transform in closed form.
    pub fn smear(&self, bump: &Bump, eta: &AxbDist, nodes: usize) -> Result<CVec> {
        Self::check_bump(bump)?;
        let terms = self.dilation_terms(bump, eta, nodes);
        Ok(self.grid.sample(|p| {
            let ft = bump_transform(bump, 0, p);
            if ft == cr(0.0) {
                return ft;
            }
            ft * terms.iter().map(|&(a, z)| a * cr(p).powc(z)).sum::<C>()
        }))
    }

    /// The same smear by double quadrature of phi(b, t) e^{-t} e^{ibp} (e^t p)^z.
    pub fn smear_direct(&self, bump: &Bump, eta: &AxbDist, nodes: usize) -> Result<CVec> {
        Self::check_bump(bump)?;
        let t_rule = (bump.dims() == 2).then(|| bump.axis_rule(1, nodes));
        Ok(self.grid.sample(|p| {
            let b_part = bump_transform_direct(bump, 0, p);
            let t_part: C = match &t_rule {
                None => eta.terms().iter().map(|&(a, z)| a * cr(p).powc(z)).sum(),
                Some(rule) => rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| {
                        let weight = w * bump.axis_value(1, t) * (-t).exp();
                        eta.terms().iter().map(|&(a, z)| a * cr(t.exp() * p).powc(z)).sum::<C>() * weight
                    })
                    .sum(),
            };
            b_part * t_part
        }))
    }

    /// The dilation orbit of a smear continued to e^{i pi}: phi~(-p) sum_z c_z m_z e^{i pi z} p^z.
    pub fn continued_smear(&self, bump: &Bump, eta: &AxbDist, nodes: usize) -> Result<CVec> {
        Self::check_bump(bump)?;
        let terms = self.dilation_terms(bump, eta, nodes);
        Ok(self.grid.sample(|p| {
            let ft = bump_transform(bump, 0, -p);
            ft * terms.iter().map(|&(a, z)| a * (I * PI * z).exp() * cr(p).powc(z)).sum::<C>()
        }))
    }

    /// D_s paired on two translation bumps: grid inner product of smears against
    /// int conj(phi~) psi~ p^{2 Re s - 1} dp.
    pub fn distribution_d(&self, phi: &Bump, psi: &Bump, s: C) -> Result<DualRoute> {
        let eta = AxbDist::plain(s)?;
        if phi.dims() != 1 || psi.dims() != 1 {
            return Err(Error::InvalidParameter("D_s is paired on translation bumps".into()));
        }
        let a = self.smear(phi, &eta, 0)?;
        let b = self.smear(psi, &eta, 0)?;
        let grid = a.dotc(&b);
        let sigma = 2.0 * s.re;
        let integrand = |p: f64| bump_transform(phi, 0, p).conj() * bump_transform(psi, 0, p) * p.powf(sigma - 1.0);
        let mut direct = cr(0.0);
        // Below p = 1 in u = ln p, where the measure is p^{2 Re s} du.
        let u_lo = -60.0 / sigma;
        panel_sum(u_lo, 0.0, 64, |u, w| {
            let p = u.exp();
            direct += integrand(p) * (w * p);
        });
        let r_min = phi.radius[0].min(psi.radius[0]);
        let p_hi = (400.0 / r_min).max(2.0);
        let rate = (phi.center[0] - psi.center[0]).abs() + phi.radius[0] + psi.radius[0];
        let panels = ((p_hi - 1.0) * rate).ceil().max(8.0) as usize;
        panel_sum(1.0, p_hi, panels, |p, w| direct += integrand(p) * w);
        Ok(DualRoute { grid, direct, relerr: (grid - direct).norm() / direct.norm().max(f64::MIN_POSITIVE) })
    }

    pub fn sample_function(&self, f: &dyn GroupFunction, lat: &Lattice) -> Result<SampledFunction> {
        let s = f.support();
        check_window(&s, "sampled function")?;
        let dt = lat.t_steps as f64 * self.grid.h;
        let i0 = (s[0] / lat.db).floor() as i64;
        let i1 = (s[1] / lat.db).ceil() as i64;
        let j0 = (s[2] / dt).floor() as i64;
        let j1 = (s[3] / dt).ceil() as i64;
        let nb = (i1 - i0 + 1) as usize;
        let nt = (j1 - j0 + 1) as usize;
        let mut values = vec![0.0; nb * nt];
        for jj in 0..nt {
            let t = (j0 + jj as i64) as f64 * dt;
            for ii in 0..nb {
                values[jj * nb + ii] = f.eval((i0 + ii as i64) as f64 * lat.db, t);
            }
        }
        Ok(SampledFunction { db: lat.db, dt, i0, j0, nb, nt, values })
    }

    /// (phi * psi)(x) = int phi(g) psi(g^{-1} x) dmu(g), sampled on the lattice.
    pub fn convolve(
        &self,
        phi: &Bump,
        psi: &dyn GroupFunction,
        lat: &Lattice,
        nodes: usize,
    ) -> Result<SampledFunction> {
        let support = product_box(&GroupFunction::support(phi), &psi.support());
        check_window(&support, "convolution")?;
        let rb = phi.axis_rule(0, nodes);
        let rt = phi.axis_rule(1, nodes);
        let mut quad_pts = Vec::with_capacity(rb.len() * rt.len());
        for (&t, &wt) in rt.nodes.iter().zip(&rt.weights) {
            let ft = wt * phi.axis_value(1, t) * (-t).exp();
            for (&b, &wb) in rb.nodes.iter().zip(&rb.weights) {
                quad_pts.push((b, t, ft * wb * phi.axis_value(0, b)));
            }
        }
        let conv = ConvolutionEval { pts: &quad_pts, psi };
        let mut out = self.sample_function(&BoxedSupport { f: &conv, support }, lat)?;
        out.values.iter_mut().for_each(|v| {
            if v.abs() < 1e-300 {
                *v = 0.0
            }
        });
        Ok(out)
    }

    /// U(chi) f = int chi(g) U(g) f dmu(g) by the lattice trapezoid rule.
    pub fn apply_function(&self, chi: &dyn GroupFunction, f: &CVec, lat: &Lattice) -> Result<CVec> {
        let s = self.sample_function(chi, lat)?;
        let m = self.dim() as i64;
        let mut out = CVec::zeros(self.dim());
        let nodes: Vec<f64> = self.grid.nodes().collect();
        for jj in 0..s.nt {
            let j = s.j0 + jj as i64;
            let t = j as f64 * s.dt;
            let row = &s.values[jj * s.nb..(jj + 1) * s.nb];
            if row.iter().all(|v| *v == 0.0) {
                continue;
            }
            let shift = j * lat.t_steps as i64;
            let weight = s.dt * lat.db * (-t).exp();
            let b0 = s.i0 as f64 * s.db;
            for k in 0..m {
                let src = k + shift;
                if !(0..m).contains(&src) {
                    continue;
                }
                let fv = f[src as usize];
                if fv == cr(0.0) {
                    continue;
                }
                let p = nodes[k as usize];
                let step = C::from_polar(1.0, s.db * p);
                let mut e = C::from_polar(1.0, b0 * p);
                let mut acc = cr(0.0);
                for v in row {
                    acc += e * *v;
                    e *= step;
                }
                out[k as usize] += acc * fv * weight;
            }
        }
        Ok(out)
    }
}

struct ConvolutionEval<'a> {
    pts: &'a [(f64, f64, f64)],
    psi: &'a dyn GroupFunction,
}

impl GroupFunction for ConvolutionEval<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        self.pts
            .iter()
            .map(|&(gb, gt, w)| {
                let (yb, yt) = mul(inv(gb, gt), (b, t));
                w * self.psi.eval(yb, yt)
            })
            .sum()
    }

    fn support(&self) -> [f64; 4] {
        unreachable!("support is supplied by the wrapper")
    }
}

struct BoxedSupport<'a> {
    f: &'a dyn GroupFunction,
    support: [f64; 4],
}

impl GroupFunction for BoxedSupport<'_> {
    fn eval(&self, b: f64, t: f64) -> f64 {
        let s = &self.support;
        if b <= s[0] || b >= s[1] || t <= s[2] || t >= s[3] {
            return 0.0;
        }
        self.f.eval(b, t)
    }

    fn support(&self) -> [f64; 4] {
        self.support
    }
}

impl SmearModel for AxbModel {
    type Dist = AxbDist;

    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn smear(&self, bump: &Bump, eta: &AxbDist, nodes: usize) -> Result<CVec> {
        AxbModel::smear(self, bump, eta, nodes)
    }
}

impl StripModel for AxbModel {
    type Generator = (Bump, AxbDist);

    fn smeared(&self, g: &Self::Generator) -> Result<CVec> {
        self.smear(&g.0, &g.1, 64)
    }

    fn continued_at_i_pi(&self, g: &Self::Generator) -> Result<CVec> {
        self.continued_smear(&g.0, &g.1, 64)
    }

    fn conjugation(&self, v: &CVec) -> CVec {
        AxbModel::conjugation(self, v)
    }
}

/// Residuals of the group-algebra laws on a set of probe vectors.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraLaws {
    pub homomorphism: f64,
    pub adjoint: f64,
    pub right_relation: f64,
    pub left_covariance: f64,
    pub involution: f64,
    pub delta_trend: Vec<f64>,
}

/// Check U(phi * psi) = U(phi)U(psi), U(phi*) = U(phi)^*, the right-translation relation
/// and the approximate identity on the probes.
pub fn algebra_laws(model: &AxbModel, phi: &Bump, psi: &Bump, probes: &[CVec], lat: &Lattice) -> Result<AlgebraLaws> {
    let conv = model.convolve(phi, psi, lat, 48)?;
    let star = Star(phi);
    let star_star = Star(&star);
    let h = model.grid.h;
    let g_shift = (0.3, 10.0 * h);
    let g = AffElement::new(g_shift.0, g_shift.1.exp())?;
    let right = RightTranslate { f: phi, g: g_shift };
    let left = LeftTranslate { f: phi, g: g_shift };
    let mut laws = AlgebraLaws {
        homomorphism: 0.0,
        adjoint: 0.0,
        right_relation: 0.0,
        left_covariance: 0.0,
        involution: 0.0,
        delta_trend: Vec::new(),
    };
    for (n, f) in probes.iter().enumerate() {
        let ups = model.apply_function(psi, f, lat)?;
        let upu = model.apply_function(phi, &ups, lat)?;
        let uc = model.apply_function(&conv, f, lat)?;
        laws.homomorphism = laws.homomorphism.max(vec_rel_err(&uc, &upu));

        let w = &probes[(n + 1) % probes.len()];
        let lhs = w.dotc(&model.apply_function(&star, f, lat)?);
        let uw = model.apply_function(phi, w, lat)?;
        let rhs = uw.dotc(f);
        laws.adjoint = laws.adjoint.max((lhs - rhs).norm() / (uw.norm() * f.norm()));

        let ur = model.apply_function(&right, f, lat)?;
        let rel = model.apply_function(phi, &model.rep_apply(&g.inverse(), f)?, lat)? / cr(g.modular_function());
        laws.right_relation = laws.right_relation.max(vec_rel_err(&ur, &rel));

        let ul = model.apply_function(&left, f, lat)?;
        let cov = model.rep_apply(&g, &model.apply_function(phi, f, lat)?)?;
        laws.left_covariance = laws.left_covariance.max(vec_rel_err(&ul, &cov));
    }
    let sp = GroupFunction::support(phi);
    let mut dev: f64 = 0.0;
    for k in 0..24 {
        for l in 0..24 {
            let b = sp[0] + (sp[1] - sp[0]) * (k as f64 + 0.5) / 24.0;
            let t = sp[2] + (sp[3] - sp[2]) * (l as f64 + 0.5) / 24.0;
            dev = dev.max((star_star.eval(b, t) - phi.eval(b, t)).abs());
        }
    }
    laws.involution = dev;
    if let Some(f) = probes.first() {
        for k in 0..3 {
            let r = 0.4 / 2f64.powi(k);
            // Unit Haar mass: the t-factor carries e^{t} to cancel the density.
            let delta = HaarNormalized(Bump::new(vec![0.0, 0.0], vec![r, r]));
            let ud = model.apply_function(&delta, f, lat)?;
            laws.delta_trend.push((ud - f).norm() / f.norm());
        }
    }
    Ok(laws)
}

struct HaarNormalized(Bump);

impl GroupFunction for HaarNormalized {
    fn eval(&self, b: f64, t: f64) -> f64 {
        t.exp() * self.0.eval(b, t)
    }

    fn support(&self) -> [f64; 4] {
        GroupFunction::support(&self.0)
    }
}

/// Sample parameters for the semigroup S = (0, inf) x R_+ and its translates.
#[derive(Debug, Clone, Serialize)]
pub struct NetConfig {
    pub s: f64,
    pub band_k: usize,
    pub rank_tol: f64,
    pub t_range: f64,
    pub t_step: f64,
    pub centers: Vec<f64>,
    pub radius: f64,
    pub t_radius: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            s: 1.0,
            band_k: 3,
            rank_tol: 1e-7,
            t_range: 3.0,
            t_step: 0.25,
            centers: vec![0.7, 1.2, 2.0],
            radius: 0.5,
            t_radius: 0.1,
        }
    }
}

impl NetConfig {
    fn t_values(&self) -> Vec<f64> {
        let n = (2.0 * self.t_range / self.t_step).round() as i64;
        (0..=n).map(|k| -self.t_range + k as f64 * self.t_step).collect()
    }

    /// Bumps over g S (sign = 1) or g S^{-1} (sign = -1), dilated along the t-sample.
    pub fn wedge_sample(&self, g: &AffElement, sign: f64) -> Result<RegionSmear> {
        let mut bumps = Vec::new();
        for t0 in self.t_values() {
            for &c0 in &self.centers {
                let (b, t) = mul((g.b, g.log_a()), (sign * c0 * t0.exp(), t0));
                bumps.push(Bump::new(vec![b, t], vec![self.radius * t0.exp() * g.a, self.t_radius]));
            }
        }
        let reach = 4.0 * self.t_range.exp() * (1.0 + g.b.abs()) * g.a + 10.0;
        let th = self.t_range + g.log_a().abs() + 1.0;
        let region = if sign > 0.0 {
            BoxRegion::new(vec![g.b, -th], vec![g.b + reach, th])?
        } else {
            BoxRegion::new(vec![g.b - reach, -th], vec![g.b, th])?
        };
        RegionSmear::new(vec![region], bumps)
    }

    /// Translation-only smears over (0, inf), one per scale of the t-sample.
    pub fn translation_sample(&self) -> Result<RegionSmear> {
        let mut bumps = Vec::new();
        for t0 in self.t_values() {
            for &c0 in &self.centers {
                bumps.push(Bump::new(vec![c0 * t0.exp()], vec![self.radius * t0.exp()]));
            }
        }
        let region = BoxRegion::new(vec![0.0], vec![4.0 * self.t_range.exp() + 10.0])?;
        RegionSmear::new(vec![region], bumps)
    }

    /// Bumps over A g S for a few dilations a in A, which is not contained in a wedge when g is not in S.
    pub fn orbit_sample(&self, g: &AffElement) -> Result<RegionSmear> {
        let mut region = Vec::new();
        let mut bumps = Vec::new();
        for t1 in [-1.0, 0.0, 1.0] {
            let ag = AffElement::dilation(t1).compose(g);
            let w = self.wedge_sample(&ag, 1.0)?;
            region.extend(w.region);
            bumps.extend(w.bumps);
        }
        RegionSmear::new(region, bumps)
    }
}

/// Small disjoint boxes in (b, t) used for the cyclicity check.
pub fn reeh_schlieder_boxes() -> Vec<RegionSmear> {
    [(-4.0, -1.0), (-1.5, 0.5), (0.3, 0.0), (2.0, -0.5), (5.0, 1.0)]
        .iter()
        .map(|&(b, t)| {
            let bx = BoxRegion::new(vec![b - 0.4, t - 0.25], vec![b + 0.4, t + 0.25]).expect("valid box");
            RegionSmear::lattice(vec![bx], &[12, 1], 0.9, &[vec![0, 0]]).expect("valid lattice")
        })
        .collect()
}

/// A few well-separated bumps used to compare U(g) H(O) with H(gO).
pub fn covariance_sample() -> Result<RegionSmear> {
    let region = BoxRegion::new(vec![-2.0, -1.0], vec![5.0, 1.0])?;
    let bumps = [(0.5, 0.0, 0.3), (1.5, 0.2, 0.4), (-1.0, -0.3, 0.5), (3.0, 0.5, 1.0)]
        .iter()
        .map(|&(b, t, r)| Bump::new(vec![b, t], vec![r, 0.2]))
        .collect();
    RegionSmear::new(vec![region], bumps)
}

#[derive(Debug, Clone, Serialize)]
pub struct AxbNetReport {
    pub s: f64,
    pub band_dim: usize,
    pub isotony_sine: f64,
    pub covariance_angle: f64,
    pub reeh_schlieder_ranks: Vec<usize>,
    pub wedge_rank: usize,
    pub wedge_angle: f64,
    pub wedge_inclusion: f64,
    pub kms_max_residual: f64,
    pub flow_residual: f64,
    pub translation_angle: f64,
    pub duality_im: f64,
    pub duality_im_conjugate: f64,
    pub complement_angle: f64,
    pub complement_angle_conjugate: f64,
    pub orbit_rank: usize,
    pub orbit: StandardnessReport,
    pub energy_min: f64,
}

fn real_rank(v: &[CVec], m: usize, tol: f64) -> Result<usize> {
    Ok(RealSubspace::from_generators(m, v, tol)?.dim())
}

fn max_pair_im(a: &[CVec], b: &[CVec]) -> f64 {
    let mut out: f64 = 0.0;
    for x in a {
        for y in b {
            out = out.max(im_pairing_ratio(x, y));
        }
    }
    out
}

/// Band-level net checks for the phased distribution vector at real s.
pub fn net_suite(model: &AxbModel, cfg: &NetConfig) -> Result<AxbNetReport> {
    net_suite_with(model, cfg, &AxbDist::phased(cfg.s)?)
}

/// Band-level net checks for E = {eta}, with J E used for the conjugate duality test.
pub fn net_suite_with(model: &AxbModel, cfg: &NetConfig, eta: &AxbDist) -> Result<AxbNetReport> {
    let band = Band::new(&model.grid, cfg.band_k);
    let eta = eta.clone();
    let e = std::slice::from_ref(&eta);
    let je = [eta.conjugate()];
    let id = AffElement::identity();
    let m = model.dim();

    let wedge = cfg.wedge_sample(&id, 1.0)?;
    let gens = cyclic_generators(model, e, &wedge)?;
    let proj = band.project_all(&gens);
    let wedge_rank = real_rank(&proj, band.dim(), cfg.rank_tol)?;
    let v_band = band.standard_subspace();
    let h_band = band.truncated_net(&gens)?;
    let wedge_angle = h_band.max_angle(&v_band);
    let wedge_inclusion = proj.iter().map(|g| v_band.distance(g)).fold(0.0, f64::max);
    let mut kms_max_residual: f64 = 0.0;
    for (b, g) in wedge.bumps.iter().zip(&gens) {
        let edge = model.continued_smear(b, &eta, wedge.nodes_per_axis)?;
        kms_max_residual = kms_max_residual.max(vec_rel_err(&edge, &model.conjugation(g)));
    }
    let flow_residual = band.flow_residual(&h_band, &[0.5, 1.0])?;

    let sub = RegionSmear::new(wedge.region.clone(), wedge.bumps[..wedge.bumps.len() / 2].to_vec())?;
    let small = RealSubspace::from_generators(m, &cyclic_generators(model, e, &sub)?, 1e-10)?;
    let big = RealSubspace::from_generators(m, &gens, 1e-10)?;
    let isotony_sine = small.inclusion_sine(&big);

    let boxes = reeh_schlieder_boxes();
    let g_cov = AffElement::new(0.8, (40.0 * model.grid.h).exp())?;
    let base = covariance_sample()?;
    let moved: Vec<Bump> = base
        .bumps
        .iter()
        .map(|b| {
            let (cb, ct) = mul((g_cov.b, g_cov.log_a()), (b.center[0], b.center[1]));
            Bump::new(vec![cb, ct], vec![b.radius[0] * g_cov.a, b.radius[1]])
        })
        .collect();
    let before = cyclic_generators(model, e, &base)?;
    let mut transported = Vec::with_capacity(before.len());
    for v in &before {
        transported.push(model.rep_apply(&g_cov, v)?);
    }
    let mut after = Vec::with_capacity(moved.len());
    for b in &moved {
        after.push(model.smear(b, &eta, base.nodes_per_axis)?);
    }
    let covariance_angle = RealSubspace::from_generators(m, &transported, 1e-6)?
        .max_angle(&RealSubspace::from_generators(m, &after, 1e-6)?);

    let mut reeh_schlieder_ranks = Vec::new();
    for bx in &boxes {
        let g = cyclic_generators(model, e, bx)?;
        reeh_schlieder_ranks.push(complex_rank(&band.project_all(&g), cfg.rank_tol));
    }

    let tr = cfg.translation_sample()?;
    let tr_band = band.truncated_net(&cyclic_generators(model, e, &tr)?)?;
    let translation_angle = tr_band.max_angle(&h_band);

    let back = cfg.wedge_sample(&id, -1.0)?;
    let back_gens = cyclic_generators(model, e, &back)?;
    let back_conj = cyclic_generators(model, &je, &back)?;
    let duality_im = max_pair_im(&gens, &back_gens);
    let duality_im_conjugate = max_pair_im(&gens, &back_conj);
    let comp = symplectic_complement(&h_band);
    let complement_angle = comp.max_angle(&band.truncated_net(&back_gens)?);
    let complement_angle_conjugate = comp.max_angle(&band.truncated_net(&back_conj)?);

    let orbit = cfg.orbit_sample(&AffElement::translation(-1.0))?;
    let orbit_proj = band.project_all(&cyclic_generators(model, e, &orbit)?);
    let orbit_space = RealSubspace::from_generators(band.dim(), &orbit_proj, cfg.rank_tol)?;
    let orbit_rank = orbit_space.dim();
    let orbit_report = standardness_report_tol(&orbit_space, cfg.rank_tol);

    let energy_min =
        gens.iter().chain(&back_gens).map(|g| model.energy(g) / g.norm_squared()).fold(f64::INFINITY, f64::min);

    Ok(AxbNetReport {
        s: cfg.s,
        band_dim: band.dim(),
        isotony_sine,
        covariance_angle,
        reeh_schlieder_ranks,
        wedge_rank,
        wedge_angle,
        wedge_inclusion,
        kms_max_residual,
        flow_residual,
        translation_angle,
        duality_im,
        duality_im_conjugate,
        complement_angle,
        complement_angle_conjugate,
        orbit_rank,
        orbit: orbit_report,
        energy_min,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub region: BoxRegion,
    pub generators: usize,
    pub band_rank: usize,
    pub band_dim: usize,
    pub kms_max_residual: f64,
    pub standardness: StandardnessReport,
}

/// Band rank, KMS residuals and standardness of H_E for one box in (b, t).
pub fn region_report(model: &AxbModel, cfg: &NetConfig, region: &BoxRegion) -> Result<RegionReport> {
    if region.dims() != 2 {
        return Err(Error::BadLength { expected: 2, got: region.dims() });
    }
    let band = Band::new(&model.grid, cfg.band_k);
    let eta = AxbDist::phased(cfg.s)?;
    let smear = RegionSmear::lattice(vec![region.clone()], &[12, 1], 0.9, &[vec![0, 0]])?;
    let gens = cyclic_generators(model, std::slice::from_ref(&eta), &smear)?;
    let mut kms_max_residual: f64 = 0.0;
    for (b, g) in smear.bumps.iter().zip(&gens) {
        let edge = model.continued_smear(b, &eta, smear.nodes_per_axis)?;
        kms_max_residual = kms_max_residual.max(vec_rel_err(&edge, &model.conjugation(g)));
    }
    let proj = band.project_all(&gens);
    let space = RealSubspace::from_generators(band.dim(), &proj, cfg.rank_tol)?;
    Ok(RegionReport {
        region: region.clone(),
        generators: gens.len(),
        band_rank: complex_rank(&proj, cfg.rank_tol),
        band_dim: band.dim(),
        kms_max_residual,
        standardness: standardness_report_tol(&space, cfg.rank_tol),
    })
}

/// U(0, a) smear(phi, s) against a^s smear(phi(./a)/a, s) with a = e^{j h}.
pub fn eigen_law_residual(model: &AxbModel, bump: &Bump, eta: &AxbDist, steps: i64) -> Result<f64> {
    let ln_a = steps as f64 * model.grid.h;
    let lhs = model.grid.shift(&model.smear(bump, eta, 64)?, steps)?;
    let scaled = bump.scaled(0, ln_a.exp());
    let phase: C = eta.terms()[0].1;
    if eta.terms().iter().any(|&(_, z)| z != phase) {
        return Err(Error::InvalidParameter("eigen law needs a single exponent".into()));
    }
    let rhs = model.smear(&scaled, eta, 64)? * (phase * ln_a).exp();
    Ok(vec_rel_err(&lhs, &rhs))
}

/// J smear(phi, s) against smear(phi o tau, conj s), where tau reflects b.
pub fn conjugation_law_residual(model: &AxbModel, bump: &Bump, s: C) -> Result<f64> {
    let lhs = model.conjugation(&model.smear(bump, &AxbDist::plain(s)?, 64)?);
    let mut reflected = bump.clone();
    reflected.center[0] = -reflected.center[0];
    let sign = if bump.orders[0] % 2 == 1 { -1.0 } else { 1.0 };
    let rhs = model.smear(&reflected, &AxbDist::plain(s.conj())?, 64)? * cr(sign);
    Ok((lhs - &rhs).norm() / rhs.norm())
}

/// Seeded probe vectors: Gaussians in ln p with assorted centers and phases.
pub fn probe_vectors(grid: &LogGrid, count: usize, seed: u64) -> Vec<CVec> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u0: f64 = rng.gen_range(-1.5..1.5);
            let w: f64 = rng.gen_range(0.5..1.2);
            let k: f64 = rng.gen_range(-2.0..2.0);
            let v = grid.sample(|p| {
                let u = p.ln();
                C::from_polar((-(u - u0).powi(2) / (2.0 * w * w)).exp(), k * u)
            });
            let n = v.norm();
            v / c(n, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::kms_membership;

    fn small_model() -> AxbModel {
        AxbModel::new(LogGrid::new(1e-12, 1e4, 2048).unwrap())
    }

    #[test]
    fn group_law_and_inverse() {
        let g = AffElement::new(0.4, 2.0).unwrap();
        let h = AffElement::new(-1.0, 0.5).unwrap().compose(&AffElement::reflection());
        let gh = g.compose(&h);
        assert!((gh.act(0.7) - g.act(h.act(0.7))).abs() < 1e-14);
        let e = gh.compose(&gh.inverse());
        assert!(e.b.abs() < 1e-14 && (e.a - 1.0).abs() < 1e-14 && !e.flip);
        assert_eq!(AffElement::reflection().compose(&AffElement::reflection()), AffElement::identity());
    }

    #[test]
    fn representation_is_a_homomorphism() {
        let m = small_model();
        let f = probe_vectors(&m.grid, 1, 3).remove(0);
        let h = m.grid.h;
        let g1 = AffElement::new(0.3, (5.0 * h).exp()).unwrap();
        let g2 = AffElement::new(-0.7, (-3.0 * h).exp()).unwrap().compose(&AffElement::reflection());
        let lhs = m.rep_apply(&g1, &m.rep_apply(&g2, &f).unwrap()).unwrap();
        let rhs = m.rep_apply(&g1.compose(&g2), &f).unwrap();
        assert!(vec_rel_err(&lhs, &rhs) < 1e-12);
        assert!((m.rep_apply(&g1, &f).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn raw_distribution_has_no_norm() {
        assert_eq!(AxbDist::plain(cr(1.0)).unwrap().norm(), Err(Error::RawDistribution));
        assert!(AxbDist::plain(cr(0.0)).is_err());
        assert!(AxbDist::plain(cr(4.5)).is_err());
    }

    #[test]
    fn bump_transform_routes_agree() {
        let b = Bump::new(vec![0.4], vec![0.3]).with_orders(vec![1]);
        for p in [0.01, 1.0, 17.0, 300.0, 3000.0] {
            let d = (bump_transform(&b, 0, p) - bump_transform_direct(&b, 0, p)).norm();
            assert!(d < 1e-9, "p = {p}: {d}");
        }
        assert!((unit_bump_transform(0.0) - 1.0).abs() < 1e-12);
        let series = unit_bump_transform(SERIES_RADIUS);
        let quad = {
            let nodes = weighted_profile(8);
            2.0 * nodes.iter().map(|&(u, wb)| wb * (SERIES_RADIUS * u).cos()).sum::<f64>() / quad::bump_mass()
        };
        assert!((series - quad).abs() < 1e-13);
    }

    #[test]
    fn smear_routes_agree_in_two_dimensions() {
        let m = small_model();
        let b = Bump::new(vec![1.0, 0.2], vec![0.5, 0.3]);
        let eta = AxbDist::paired(c(0.7, 0.4)).unwrap();
        let fast = m.smear(&b, &eta, 64).unwrap();
        let direct = m.smear_direct(&b, &eta, 64).unwrap();
        assert!(vec_rel_err(&fast, &direct) < 1e-10);
    }

    #[test]
    fn kms_separates_phased_from_plain() {
        let m = small_model();
        let b = Bump::new(vec![1.0, 0.0], vec![0.5, 0.2]);
        let probes = probe_vectors(&m.grid, 4, 1);
        let good = kms_membership(&m, &(b.clone(), AxbDist::phased(1.5).unwrap()), &probes).unwrap();
        let bad = kms_membership(&m, &(b, AxbDist::plain(cr(1.5)).unwrap()), &probes).unwrap();
        assert!(good.pass, "{}", good.residual);
        assert!(bad.residual > 0.1);
    }

    #[test]
    fn conjugation_law_is_exact() {
        let m = small_model();
        let b = Bump::new(vec![0.5, 0.1], vec![0.4, 0.2]).with_orders(vec![1, 0]);
        assert!(conjugation_law_residual(&m, &b, c(1.2, -0.3)).unwrap() < 1e-12);
        let even = Bump::new(vec![0.0], vec![0.4]);
        let s = c(0.8, 0.5);
        let lhs = m.conjugation(&m.smear(&even, &AxbDist::plain(s).unwrap(), 64).unwrap());
        let rhs = m.smear(&even, &AxbDist::plain(s.conj()).unwrap(), 64).unwrap();
        assert!(vec_rel_err(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn star_of_star_is_identity_and_support_guard() {
        let phi = Bump::new(vec![0.5, 0.2], vec![0.3, 0.2]);
        let s = Star(&phi);
        let ss = Star(&s);
        for (b, t) in [(0.5, 0.2), (0.6, 0.1), (0.35, 0.3)] {
            assert!((ss.eval(b, t) - phi.eval(b, t)).abs() < 1e-10);
        }
        let m = AxbModel::algebra_default();
        let far = Bump::new(vec![39.0, 0.0], vec![2.0, 0.1]);
        let lat = Lattice { db: 0.05, t_steps: 2 };
        assert!(matches!(m.sample_function(&far, &lat), Err(Error::SupportOverflow(_))));
    }
}
