//! Log-spaced grids on the half-line and the low-frequency band of the dilation group.
//!
//! A grid vector stores sqrt(h) f(p_k) at midpoint nodes u_k = ln p_k, so the
//! standard inner product on C^M is the quadrature of the inner product of
//! L^2(R_+, dp/p). Dilation by e^{jh} is the index shift k -> k + j.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, spectral_norm, CMat, CVec, C};
use crate::modular::{standard_subspace_from_pair, ModularPair, RealSubspace};

/// Relative mass allowed to leave the grid under a dilation.
pub const COVERAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct LogGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub m: usize,
    pub h: f64,
}

impl LogGrid {
    pub fn new(p_min: f64, p_max: f64, m: usize) -> Result<Self> {
        if !(p_min > 0.0 && p_max > p_min) || m < 2 {
            return Err(Error::InvalidParameter(format!("grid [{p_min}, {p_max}] with {m} nodes")));
        }
        let h = (p_max / p_min).ln() / m as f64;
        Ok(LogGrid { p_min, p_max, m, h })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn u(&self, k: usize) -> f64 {
        self.p_min.ln() + (k as f64 + 0.5) * self.h
    }

    pub fn p(&self, k: usize) -> f64 {
        self.u(k).exp()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |k| self.p(k))
    }

    /// Total weight, the integral of dp/p over the covered range.
    pub fn total_weight(&self) -> f64 {
        self.h * self.m as f64
    }

    /// Length of the grid in log coordinates.
    pub fn period(&self) -> f64 {
        self.total_weight()
    }

    pub fn sample(&self, f: impl Fn(f64) -> C) -> CVec {
        let w = self.h.sqrt();
        CVec::from_iterator(self.m, (0..self.m).map(|k| f(self.p(k)) * w))
    }

    /// Value of f at node k from its grid vector.
    pub fn value(&self, v: &CVec, k: usize) -> C {
        v[k] / self.h.sqrt()
    }

    /// Integer number of steps for ln a, if ln a is a grid multiple.
    pub fn steps_for(&self, ln_a: f64) -> Option<i64> {
        let j = ln_a / self.h;
        let r = j.round();
        if (j - r).abs() < 1e-9 {
            Some(r as i64)
        } else {
            None
        }
    }

    /// f(p) -> f(a p) for a = e^{j h}. Mass pushed off the grid is dropped if negligible.
    pub fn shift(&self, v: &CVec, j: i64) -> Result<CVec> {
        let m = self.m as i64;
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mut lost = 0.0;
        let mut out = CVec::zeros(self.m);
        for k in 0..m {
            let src = k + j;
            if (0..m).contains(&src) {
                out[k as usize] = v[src as usize];
            }
        }
        for k in 0..m {
            let dst = k - j;
            if !(0..m).contains(&dst) {
                lost += v[k as usize].norm_sqr();
            }
        }
        if lost > COVERAGE_TOL * total.max(f64::MIN_POSITIVE) {
            return Err(Error::GridCoverage(format!("relative mass {:.3e} leaves the grid", lost / total)));
        }
        Ok(out)
    }

    /// f(p) -> f(e^{ln_a} p) by monotone cubic interpolation between nodes.
    pub fn dilate(&self, v: &CVec, ln_a: f64) -> Result<CVec> {
        if let Some(j) = self.steps_for(ln_a) {
            return self.shift(v, j);
        }
        let x = ln_a / self.h;
        let base = x.floor() as i64;
        let frac = x - base as f64;
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        let dre = monotone_slopes(&re);
        let dim = monotone_slopes(&im);
        let m = self.m as i64;
        let mut out = CVec::zeros(self.m);
        for k in 0..m {
            let i0 = k + base;
            if i0 < 0 || i0 + 1 >= m {
                continue;
            }
            let (a, b) = (i0 as usize, i0 as usize + 1);
            out[k as usize] =
                c(hermite(re[a], re[b], dre[a], dre[b], frac), hermite(im[a], im[b], dim[a], dim[b], frac));
        }
        let kept: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        let lost = (total - kept).max(0.0);
        if lost > 1e-6 * total.max(f64::MIN_POSITIVE) {
            return Err(Error::GridCoverage(format!("relative mass {:.3e} leaves the grid", lost / total)));
        }
        Ok(out)
    }
}

fn monotone_slopes(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    let delta: Vec<f64> = (0..n - 1).map(|k| y[k + 1] - y[k]).collect();
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] <= 0.0 {
            d[k] = 0.0;
        } else {
            // Fritsch-Carlson harmonic mean.
            d[k] = 2.0 / (1.0 / delta[k - 1] + 1.0 / delta[k]);
        }
    }
    d
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
}

/// The 2K + 1 lowest Fourier modes of the periodized log coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct Band {
    pub k: usize,
    pub period: f64,
    pub m: usize,
    pub h: f64,
}

impl Band {
    pub fn new(grid: &LogGrid, k: usize) -> Self {
        Band { k, period: grid.period(), m: grid.m, h: grid.h }
    }

    pub fn dim(&self) -> usize {
        2 * self.k + 1
    }

    /// Mode frequencies, index j <-> omega_{j - K}.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| 2.0 * PI * (j as f64 - self.k as f64) / self.period).collect()
    }

    /// Coefficients against the orthonormal exponentials e^{i omega (u_k - u_0)} / sqrt(M).
    pub fn project(&self, v: &CVec) -> CVec {
        let w = self.frequencies();
        let norm = 1.0 / (self.m as f64).sqrt();
        CVec::from_iterator(
            self.dim(),
            w.iter().map(|&om| {
                let step = C::from_polar(1.0, -om * self.h);
                let mut e = cr(1.0);
                let mut acc = cr(0.0);
                for x in v.iter() {
                    acc += e * x;
                    e *= step;
                }
                acc * norm
            }),
        )
    }

    /// Delta = e^{-2 pi omega} and J exchanging omega with -omega.
    pub fn modular_pair(&self) -> ModularPair {
        let n = self.dim();
        let w = self.frequencies();
        let delta = CMat::from_diagonal(&CVec::from_iterator(n, w.iter().map(|&om| cr((-2.0 * PI * om).exp()))));
        let mut u = CMat::zeros(n, n);
        for j in 0..n {
            u[(j, n - 1 - j)] = cr(1.0);
        }
        ModularPair::new(u, delta).expect("band pair is valid")
    }

    pub fn standard_subspace(&self) -> RealSubspace {
        standard_subspace_from_pair(&self.modular_pair()).expect("band pair is standard")
    }

    /// Dilation by e^t on band coefficients.
    pub fn dilation(&self, t: f64) -> CMat {
        let w = self.frequencies();
        CMat::from_diagonal(&CVec::from_iterator(self.dim(), w.iter().map(|&om| C::from_polar(1.0, om * t))))
    }

    /// Unit-normalized band coefficients of each nonzero vector.
    pub fn project_all(&self, vs: &[CVec]) -> Vec<CVec> {
        vs.iter()
            .map(|v| self.project(v))
            .filter(|b| b.norm() > 0.0)
            .map(|b| {
                let n = b.norm();
                b / cr(n)
            })
            .collect()
    }

    /// Leading real subspace of the projected generators, of the band's dimension.
    pub fn truncated_net(&self, gens: &[CVec]) -> Result<RealSubspace> {
        RealSubspace::leading(self.dim(), &self.project_all(gens), self.dim())
    }

    /// Largest deviation of the modular flow of `v` from the band dilations at the given times.
    pub fn flow_residual(&self, v: &RealSubspace, ts: &[f64]) -> Result<f64> {
        let pair = ModularPair::from_subspace(v)?;
        Ok(ts.iter().map(|&t| spectral_norm(&(pair.delta_it(-t / (2.0 * PI)) - self.dilation(t)))).fold(0.0, f64::max))
    }
}

/// Singular values of the complex span above `rel_tol` times the largest.
pub fn complex_rank(vs: &[CVec], rel_tol: f64) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let m = CMat::from_columns(vs);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_integrate_exactly() {
        let g = LogGrid::new(1e-4, 1e4, 512).unwrap();
        assert!((g.total_weight() - (1e8f64).ln()).abs() < 1e-12);
        let one = g.sample(|_| cr(1.0));
        assert!((one.norm_squared() - (1e8f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn shift_is_an_index_shift_and_guards_coverage() {
        let g = LogGrid::new(1e-3, 1e3, 400).unwrap();
        let f = g.sample(|p| cr((-(p.ln()).powi(2)).exp()));
        let j = 7;
        let s = g.shift(&f, j).unwrap();
        assert_eq!(s[100], f[107]);
        let wide = g.sample(|_| cr(1.0));
        assert!(matches!(g.shift(&wide, 10), Err(Error::GridCoverage(_))));
    }

    #[test]
    fn fractional_dilation_is_nearly_unitary() {
        let g = LogGrid::new(1e-3, 1e3, 2000).unwrap();
        let f = g.sample(|p| C::from_polar((-(p.ln()).powi(2) / 2.0).exp(), p.ln()));
        let d = g.dilate(&f, 0.3 * g.h + 0.01).unwrap();
        assert!((d.norm() - f.norm()).abs() < 1e-6 * f.norm());
        let exact = g.sample(|p| {
            let q = p * (0.3 * g.h + 0.01).exp();
            C::from_polar((-(q.ln()).powi(2) / 2.0).exp(), q.ln())
        });
        assert!((d - exact).norm() < 1e-4 * f.norm());
    }

    #[test]
    fn band_pair_is_valid_and_standard() {
        let g = LogGrid::new(1e-6, 1e4, 256).unwrap();
        let b = Band::new(&g, 3);
        let v = b.standard_subspace();
        assert_eq!(v.dim(), 7);
        let d = b.dilation(0.4);
        let p = b.modular_pair();
        let flow = p.delta_it(-0.4 / (2.0 * PI));
        assert!((d - flow).norm() < 1e-12);
    }
}
