//! Positivity of the scalar tube kernels Delta((z - conj w)/2i)^{-s}, Riesz measures
//! and their Laplace transforms.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::jordan::{
    eigenvalues, in_positive_cone, random_elem, random_positive, AlgebraDescriptor, CJordanElem, JordanElem,
};
use crate::linalg::{cr, herm_eig, spectral_norm, CMat, C, I};
use crate::quad::{composite_gl, gauss_jacobi, gauss_legendre, Rule};
use crate::tube::{kernel_log, TrackedScalar, TubePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallachClass {
    DiscretePoint,
    ContinuousPart,
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallachParams {
    pub desc: AlgebraDescriptor,
    pub s: f64,
}

impl WallachParams {
    pub fn classification(&self) -> WallachClass {
        let r = self.desc.rank();
        let half_d = self.desc.peirce_d() as f64 / 2.0;
        let top = (r - 1) as f64 * half_d;
        if self.s > top + 1e-12 {
            return WallachClass::ContinuousPart;
        }
        for j in 0..r {
            if (self.s - j as f64 * half_d).abs() <= 1e-12 {
                return WallachClass::DiscretePoint;
            }
        }
        WallachClass::Gap
    }

    pub fn in_wallach_set(&self) -> bool {
        self.classification() != WallachClass::Gap
    }
}

/// Delta((z - conj w)/2i)^{-s}, continued from 1 at z = w = ie.
pub fn scalar_kernel(z: &TubePoint, w: &TubePoint, s: f64) -> Result<TrackedScalar> {
    if s < 0.0 {
        return Err(Error::InvalidParameter(format!("s = {s} must be nonnegative")));
    }
    Ok(TrackedScalar::from_log(kernel_log(z, w)? * (-s)))
}

/// Hermitian Gram matrix of the kernel on `points`, with the raw asymmetry.
pub fn gram_matrix(points: &[TubePoint], s: f64) -> Result<(CMat, f64)> {
    let m = points.len();
    let mut g = CMat::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            g[(j, k)] = scalar_kernel(&points[j], &points[k], s)?.value;
        }
    }
    let asym = spectral_norm(&(&g - g.adjoint()));
    let h = (&g + g.adjoint()) * cr(0.5);
    Ok((h, asym))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Psd,
    Indefinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub algebra: String,
    pub s: f64,
    pub classification: WallachClass,
    pub min_eig: f64,
    pub norm: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub asymmetry: f64,
    pub duplicate_points: bool,
    #[serde(skip)]
    pub spectrum: Vec<f64>,
}

pub const PSD_TOL: f64 = 1e-8;
pub const WITNESS_TOL: f64 = 1e-6;

fn has_duplicates(points: &[TubePoint]) -> bool {
    for j in 0..points.len() {
        for k in (j + 1)..points.len() {
            if points[j].z.sub(&points[k].z).norm() < 1e-12 * (1.0 + points[j].z.norm()) {
                return true;
            }
        }
    }
    false
}

pub fn gram_report(points: &[TubePoint], s: f64) -> Result<GramReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point set".into()));
    }
    let desc = points[0].desc();
    let (g, asymmetry) = gram_matrix(points, s)?;
    let (spectrum, _) = herm_eig(&g);
    let norm = spectrum.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min_eig = spectrum[0];
    let verdict = if min_eig >= -PSD_TOL * norm { Verdict::Psd } else { Verdict::Indefinite };
    Ok(GramReport {
        algebra: desc.name(),
        s,
        classification: WallachParams { desc, s }.classification(),
        min_eig,
        norm,
        verdict,
        tolerance: PSD_TOL,
        asymmetry,
        duplicate_points: has_duplicates(points),
        spectrum,
    })
}

/// One report per s, sorted by s.
pub fn gram_scan(points: &[TubePoint], s_values: &[f64]) -> Result<Vec<GramReport>> {
    let mut s_sorted = s_values.to_vec();
    s_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s_sorted.iter().map(|&s| gram_report(points, s)).collect()
}

/// Random tube point x + iy with y = e + (random square).
fn search_point<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> TubePoint {
    let x = random_elem(d, rng);
    let y = random_positive(d, rng, 1.0);
    TubePoint { z: CJordanElem::from_parts(&x, &y) }
}

fn min_ratio(g: &CMat) -> f64 {
    let (ev, _) = herm_eig(g);
    let norm = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    ev[0] / norm
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapWitness {
    pub algebra: AlgebraDescriptor,
    pub s: f64,
    pub points: Vec<CJordanElem>,
    /// min eigenvalue / |G| of the Gram matrix.
    pub ratio: f64,
    pub configurations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub points: usize,
    pub budget: usize,
    pub restart: usize,
    pub step: f64,
    /// Stop once the ratio falls below -target.
    pub target: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { points: 12, budget: 10_000, restart: 2_500, step: 0.5, target: 1e-5 }
    }
}

/// Randomized local search for an indefinite Gram matrix. Returns the best configuration found.
pub fn search_gap_witness<R: Rng>(d: AlgebraDescriptor, s: f64, cfg: SearchConfig, rng: &mut R) -> Result<GapWitness> {
    let m = cfg.points;
    let mut best: Option<(Vec<TubePoint>, f64)> = None;
    let mut used = 0;
    while used < cfg.budget {
        let mut pts: Vec<TubePoint> = (0..m).map(|_| search_point(d, rng)).collect();
        let (mut g, _) = gram_matrix(&pts, s)?;
        let mut ratio = min_ratio(&g);
        used += 1;
        let mut local = 0;
        while local < cfg.restart && used < cfg.budget {
            local += 1;
            let k = rng.gen_range(0..m);
            let dx = random_elem(d, rng).scale(cfg.step);
            let dy = random_elem(d, rng).scale(cfg.step);
            let y = pts[k].z.im().add(&dy);
            if eigenvalues(&y)[0] <= 1e-3 {
                continue;
            }
            used += 1;
            let cand = TubePoint { z: CJordanElem::from_parts(&pts[k].z.re().add(&dx), &y) };
            let mut g2 = g.clone();
            for j in 0..m {
                let v = if j == k {
                    scalar_kernel(&cand, &cand, s)?.value
                } else {
                    scalar_kernel(&cand, &pts[j], s)?.value
                };
                g2[(k, j)] = v;
                g2[(j, k)] = v.conj();
            }
            g2[(k, k)] = cr(g2[(k, k)].re);
            let r2 = min_ratio(&g2);
            if r2 < ratio {
                ratio = r2;
                g = g2;
                pts[k] = cand;
            }
            if ratio < -cfg.target {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| ratio < b.1) {
            best = Some((pts, ratio));
        }
        if best.as_ref().unwrap().1 < -cfg.target {
            break;
        }
    }
    let (pts, ratio) = best.expect("budget is positive");
    Ok(GapWitness { algebra: d, s, points: pts.into_iter().map(|p| p.z).collect(), ratio, configurations: used })
}

impl GapWitness {
    /// Recompute the ratio from the stored points.
    pub fn recheck(&self) -> Result<f64> {
        let pts: Vec<TubePoint> = self.points.iter().map(|z| TubePoint::new(z.clone())).collect::<Result<_>>()?;
        let (g, _) = gram_matrix(&pts, self.s)?;
        Ok(min_ratio(&g))
    }

    pub fn is_certificate(&self) -> bool {
        self.ratio < -WITNESS_TOL
    }
}

/// Gamma_Omega(s) = (2 pi)^{(N-r)/2} prod_j Gamma(s - (j-1)d/2).
pub fn gamma_cone(d: AlgebraDescriptor, s: f64) -> f64 {
    let (nn, r, dd) = (d.dim() as f64, d.rank(), d.peirce_d() as f64);
    let mut v = (2.0 * std::f64::consts::PI).powf((nn - r as f64) / 2.0);
    for j in 0..r {
        v *= gamma(s - j as f64 * dd / 2.0);
    }
    v
}

/// Riesz measure Delta(l)^{s - N/r} dl / Gamma_Omega(s), with E* identified with E by the trace form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RieszMeasure {
    pub desc: AlgebraDescriptor,
    pub s: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplaceCheck {
    pub numeric: f64,
    pub exact: f64,
    pub relerr: f64,
    pub level: usize,
}

impl RieszMeasure {
    pub fn new(desc: AlgebraDescriptor, s: f64) -> Result<Self> {
        let p = WallachParams { desc, s };
        if p.classification() != WallachClass::ContinuousPart {
            return Err(Error::InvalidParameter(format!("s = {s} is not in the continuous part for {}", desc.name())));
        }
        if desc.rank() > 2 {
            return Err(Error::InvalidParameter("Riesz quadrature is implemented for rank <= 2".into()));
        }
        Ok(RieszMeasure { desc, s })
    }

    pub fn density(&self, l: &JordanElem) -> f64 {
        if !in_positive_cone(l, true) {
            return 0.0;
        }
        let nn = self.desc.dim() as f64;
        let r = self.desc.rank() as f64;
        l.det().powf(self.s - nn / r) / gamma_cone(self.desc, self.s)
    }
}

/// In u = ln(lambda) the integrand is exp(s u - x e^u), peaked at e^u = s/x.
fn rank1_laplace(s: f64, x: f64, n: usize) -> f64 {
    let peak = (s / x).ln();
    let (lo, hi) = (peak - 1.0 - 30.0 / s, peak + (1.0 + 40.0 / s).ln());
    let rule = composite_gl(lo, hi, n / 4, 8);
    rule.integrate(|u| (s * u - x * u.exp()).exp()) / gamma(s)
}

/// Spectral values (a, b) of x in a rank-2 algebra, as spin coordinates x0 = (a+b)/2, rho = (b-a)/2.
fn rank2_laplace(desc: AlgebraDescriptor, s: f64, x: &JordanElem, level: usize) -> f64 {
    let ev = eigenvalues(x);
    let (x0, rho) = ((ev[0] + ev[1]) / 2.0, (ev[1] - ev[0]) / 2.0);
    let nn = desc.dim();
    let nf = nn as f64;
    let alpha = s - nf / 2.0;
    let nu = 16 << level;
    let nt = 16 << level;
    // u = (1 + v)/2, weight (1-v)^alpha from Gauss-Jacobi; (1+u)^alpha u^{N-2} remains.
    let ju = gauss_jacobi(nu, alpha, 0.0);
    let theta = gauss_legendre(nt).mapped(0.0, std::f64::consts::PI);
    let sphere_lower = sphere_area(nn - 3);
    let mut total = 0.0;
    for (&v, &wv) in ju.nodes.iter().zip(&ju.weights) {
        let u = 0.5 * (1.0 + v);
        let smooth = (1.0 + u).powf(alpha) * u.powi(nn as i32 - 2) * 0.5f64.powf(alpha) * 0.5;
        let mut inner = 0.0;
        for (&th, &wt) in theta.nodes.iter().zip(&theta.weights) {
            let beta = x0 + rho * u * th.cos();
            inner += wt * th.sin().powi(nn as i32 - 3) * (2.0 * beta).powf(-2.0 * s);
        }
        total += wv * smooth * inner;
    }
    let lam0 = gamma(2.0 * s);
    2f64.powf(nf / 2.0) * lam0 * sphere_lower * total / gamma_cone(desc, s)
}

/// Area of the unit sphere S^k.
fn sphere_area(k: usize) -> f64 {
    let m = (k + 1) as f64;
    2.0 * std::f64::consts::PI.powf(m / 2.0) / ln_gamma(m / 2.0).exp()
}

/// Quadrature of the Laplace transform of mu_s at x against Delta(x)^{-s}, refining until stable.
pub fn riesz_laplace_check(m: &RieszMeasure, x: &JordanElem) -> Result<LaplaceCheck> {
    if !in_positive_cone(x, true) {
        return Err(Error::InvalidParameter("x must lie in the open cone".into()));
    }
    let exact = x.det().powf(-m.s);
    let eval = |level: usize| -> f64 {
        if m.desc.rank() == 1 {
            rank1_laplace(m.s, x.coeffs[0], 32 << level)
        } else {
            rank2_laplace(m.desc, m.s, x, level)
        }
    };
    let mut prev = eval(0);
    for level in 1..4 {
        let cur = eval(level);
        if ((cur - prev) / cur).abs() < 1e-8 {
            return Ok(LaplaceCheck { numeric: cur, exact, relerr: ((cur - exact) / exact).abs(), level });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(format!("Laplace transform at s = {}", m.s)))
}

/// Rank-1 quadrature of the L^2(mu_s) picture on [0, lambda_max]: a Gauss-Jacobi panel at
/// the origin absorbs lambda^{s-1}; the density is folded into the weights.
#[derive(Clone, Debug)]
pub struct RieszGrid {
    pub s: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RieszGrid {
    pub fn new(s: f64, lambda_max: f64, panel: f64, per_panel: usize) -> Result<Self> {
        if s <= 0.0 {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        let gs = gamma(s);
        let first = gauss_jacobi(per_panel, 0.0, s - 1.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let h = panel;
        for (&v, &w) in first.nodes.iter().zip(&first.weights) {
            nodes.push(h * (1.0 + v) / 2.0);
            weights.push(w * (h / 2.0).powf(s) / gs);
        }
        let panels = ((lambda_max - h) / panel).ceil().max(1.0) as usize;
        let rest: Rule = composite_gl(h, lambda_max, panels, per_panel);
        for (&l, &w) in rest.nodes.iter().zip(&rest.weights) {
            nodes.push(l);
            weights.push(w * l.powf(s - 1.0) / gs);
        }
        Ok(RieszGrid { s, nodes, weights })
    }

    pub fn default_for(s: f64) -> Result<Self> {
        Self::new(s, 200.0, 0.25, 16)
    }

    pub fn sample(&self, f: impl Fn(f64) -> C) -> Vec<C> {
        self.nodes.iter().map(|&l| f(l)).collect()
    }
}

/// Phi(f)(z) = int e^{i l z/2} f(l) d mu_s(l) for rank 1.
pub fn l2_to_hol(f: &[C], grid: &RieszGrid, z: C) -> Result<C> {
    if f.len() != grid.nodes.len() {
        return Err(Error::BadLength { expected: grid.nodes.len(), got: f.len() });
    }
    if z.im <= 0.0 {
        return Err(Error::InvalidParameter("z must lie in the upper half-plane".into()));
    }
    let mut acc = cr(0.0);
    let mut live = false;
    for ((&l, &w), &fv) in grid.nodes.iter().zip(&grid.weights).zip(f) {
        let e = (I * l * z / 2.0).exp();
        if e.norm() > 1e-300 {
            live = true;
        }
        acc += e * fv * w;
    }
    if !live {
        return Err(Error::GridUnderflow);
    }
    Ok(acc)
}
