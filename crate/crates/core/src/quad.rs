//! Gaussian quadrature rules and the smooth bump profile.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine map of a rule on [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|x| m + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss-Legendre on [-1, 1] by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre with `panels` equal panels on [a, b].
pub fn composite_gl(a: f64, b: f64, panels: usize, per_panel: usize) -> Rule {
    let base = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let r = base.mapped(a + k as f64 * h, a + (k + 1) as f64 * h);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        t[(k, k)] = diag[k];
        if k + 1 < n {
            t[(k, k + 1)] = off[k];
            t[(k + 1, k)] = off[k];
        }
    }
    let eig = t.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Gauss-Jacobi on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Rule {
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n {
        let kf = k as f64;
        let den = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        diag[k] = if k == 0 { (beta - alpha) / (ab + 2.0) } else { (beta * beta - alpha * alpha) / den };
    }
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = s * s * (s + 1.0) * (s - 1.0);
        off[k - 1] = (num / den).sqrt();
    }
    let ln_mu0 =
        (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(ab + 2.0);
    golub_welsch(&diag, &off, ln_mu0.exp())
}

/// Generalized Gauss-Laguerre on [0, inf) for the weight x^alpha e^{-x}.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Rule {
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    golub_welsch(&diag, &off, ln_gamma(alpha + 1.0).exp())
}

/// The smooth bump exp(-1/(1-u^2)) on (-1, 1), zero outside.
pub fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Integral of the bump profile over [-1, 1].
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    // Fixed high-order rule; the profile is flat to all orders at the endpoints.
    *MASS.get_or_init(|| composite_gl(-1.0, 1.0, 8, 64).integrate(bump_profile))
}

/// k-th derivative of the bump profile.
pub fn bump_derivative(u: f64, k: usize) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    // f^{(j)} = q_j(u) (1-u^2)^{-2j} exp(-1/(1-u^2)); with w = 1-u^2 the numerator obeys
    // q_{j+1} = q_j' w^2 - 2j q_j w' w - 2u q_j.
    let mut q: Vec<f64> = vec![1.0];
    for j in 0..k {
        let dq = poly_deriv(&q);
        let w = vec![1.0, 0.0, -1.0];
        let w2 = poly_mul(&w, &w);
        let wp = vec![0.0, -2.0];
        let t1 = poly_mul(&dq, &w2);
        let t2 = poly_scale(&poly_mul(&poly_mul(&q, &wp), &w), -2.0 * j as f64);
        let t3 = poly_mul(&q, &[0.0, -2.0]);
        q = poly_add(&poly_add(&t1, &t2), &t3);
    }
    let w = 1.0 - u * u;
    poly_eval(&q, u) / w.powi(2 * k as i32) * (-1.0 / w).exp()
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|k| k as f64 * p[k]).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).cloned().unwrap_or(0.0) + b.get(k).cloned().unwrap_or(0.0)).collect()
}

fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(10);
        let v = r.integrate(|x| x.powi(18));
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        let r = gauss_jacobi(20, -0.5, 0.0);
        // int_{-1}^{1} (1-x)^{-1/2} dx = 2 sqrt 2
        let v = r.integrate(|_| 1.0);
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let v1 = r.integrate(|x| x);
        // int (1-x)^{-1/2} x dx = 2 sqrt2 - (2/3)(2)^{3/2}
        let exact = 2.0 * 2f64.sqrt() - 2.0 / 3.0 * 2f64.powf(1.5);
        assert!((v1 - exact).abs() < 1e-12);
    }

    #[test]
    fn laguerre_gamma_moments() {
        let r = gauss_laguerre(30, 0.5);
        let v = r.integrate(|x| x * x);
        let exact = statrs::function::gamma::gamma(3.5);
        assert!((v - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn bump_derivative_matches_finite_difference() {
        let h = 1e-5;
        for &u in &[-0.7, -0.1, 0.3, 0.8] {
            for k in 0..3 {
                let fd = (bump_derivative(u + h, k) - bump_derivative(u - h, k)) / (2.0 * h);
                let an = bump_derivative(u, k + 1);
                assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "u={u} k={k} {fd} {an}");
            }
        }
    }
}
