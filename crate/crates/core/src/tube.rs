//! Tube domain T = E + iE_+, its Cayley image in E_C, the universal kernel, and
//! conformal words with scalar cocycles tracked along explicit paths.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::jordan::{
    in_positive_cone, random_automorphism, random_elem, random_positive, AlgebraDescriptor, CJordanElem, Family,
    JordanElem, LinearMapEC,
};
use crate::linalg::{c, cr, eigenvalues_general, log_near, CMat, CVec, RMat, C, I};

/// Point of the tube domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub z: CJordanElem,
}

/// Point of the bounded realization D = p(T).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub z: CJordanElem,
}

impl TubePoint {
    pub fn new(z: CJordanElem) -> Result<Self> {
        if !in_positive_cone(&z.im(), true) {
            return Err(Error::InvalidParameter(format!("Im z not in the open cone of {}", z.desc.name())));
        }
        Ok(TubePoint { z })
    }

    /// The base point ie.
    pub fn base(d: AlgebraDescriptor) -> Self {
        TubePoint { z: d.unit().scale(I) }
    }

    pub fn desc(&self) -> AlgebraDescriptor {
        self.z.desc
    }
}

impl BallPoint {
    pub fn new(z: CJordanElem) -> Result<Self> {
        let e = z.desc.unit();
        let den = e.sub(&z).inverse().map_err(|_| Error::NotInBall("e - z is singular".into()))?;
        let cz = e.add(&z).product(&den)?.scale(I);
        if !in_positive_cone(&cz.im(), true) {
            return Err(Error::NotInBall("Cayley image leaves the tube".into()));
        }
        Ok(BallPoint { z })
    }

    pub fn origin(d: AlgebraDescriptor) -> Self {
        BallPoint { z: CJordanElem::zero(d) }
    }
}

/// A complex value together with a continuous logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedScalar {
    pub value: C,
    pub log: C,
}

impl TrackedScalar {
    pub fn from_log(log: C) -> Self {
        TrackedScalar { value: log.exp(), log }
    }

    pub fn one() -> Self {
        TrackedScalar { value: cr(1.0), log: cr(0.0) }
    }

    pub fn mul(&self, o: &TrackedScalar) -> TrackedScalar {
        TrackedScalar::from_log(self.log + o.log)
    }

    pub fn conj(&self) -> TrackedScalar {
        TrackedScalar { value: self.value.conj(), log: self.log.conj() }
    }
}

/// value^alpha on the tracked sheet.
pub fn tracked_power(base: &TrackedScalar, alpha: C) -> C {
    (alpha * base.log).exp()
}

/// Continuous logarithm of t -> f(t) on [0, 1] starting from `log0` (a logarithm of f(0)).
/// Steps are subdivided until consecutive phases differ by at most pi/4.
pub fn track_log(f: impl Fn(f64) -> C, log0: C) -> Result<C> {
    let mut t = 0.0;
    let mut prev = f(0.0);
    if prev == cr(0.0) || !prev.is_finite() {
        return Err(Error::PathLeftDomain { t: 0.0 });
    }
    let mut log = log0;
    let mut h: f64 = 1.0 / 16.0;
    while t < 1.0 {
        let tn = (t + h).min(1.0);
        let v = f(tn);
        if !v.is_finite() || v.norm() == 0.0 {
            return Err(Error::PathLeftDomain { t: tn });
        }
        let step = (v / prev).arg();
        if step.abs() > FRAC_PI_4 || v.norm() < 1e-14 * prev.norm() {
            h *= 0.5;
            if h < 1e-13 {
                return Err(Error::PathLeftDomain { t });
            }
            continue;
        }
        log = log_near(v, log + C::new(0.0, step));
        prev = v;
        t = tn;
        h = (h * 2.0).min(1.0 / 16.0);
    }
    Ok(log)
}

fn lerp(a: &CVec, b: &CVec, t: f64) -> CVec {
    a * cr(1.0 - t) + b * cr(t)
}

/// Continuous log of the Jordan determinant along the segment from `a` to `b`.
pub fn log_det_segment(d: AlgebraDescriptor, a: &CVec, log_a: C, b: &CVec) -> Result<C> {
    track_log(|t| d.det_raw(&lerp(a, b, t)), log_a)
}

/// log Delta(x) on the tube, continued from the principal value i r pi/2 at ie.
pub fn log_det_tube(x: &CJordanElem) -> Result<C> {
    let d = x.desc;
    let ie = d.unit_coeffs() * I;
    log_det_segment(d, &ie, C::new(0.0, d.rank() as f64 * FRAC_PI_2), &x.coeffs)
}

/// log Delta((z - conj w)/2i), continued from the value 0 at z = w = ie.
pub fn kernel_log(z: &TubePoint, w: &TubePoint) -> Result<C> {
    let d = z.desc();
    let u = z.z.sub(&w.z.conj()).scale(cr(1.0) / (I * 2.0));
    log_det_segment(d, &d.unit_coeffs(), cr(0.0), &u.coeffs)
}

/// p(z) = (z - ie)(z + ie)^{-1}.
pub fn cayley_to_ball(z: &TubePoint) -> Result<BallPoint> {
    let ie = z.desc().unit().scale(I);
    let num = z.z.sub(&ie);
    let den = z.z.add(&ie).inverse()?;
    Ok(BallPoint { z: num.product(&den)? })
}

/// c(z) = i(e + z)(e - z)^{-1}.
pub fn cayley_to_tube(z: &BallPoint) -> Result<TubePoint> {
    let e = z.z.desc.unit();
    let den = e.sub(&z.z).inverse()?;
    Ok(TubePoint { z: e.add(&z.z).product(&den)?.scale(I) })
}

/// dp(z) = 2i P(z + ie)^{-1}.
pub fn cayley_differential(z: &TubePoint) -> Result<LinearMapEC> {
    let ie = z.desc().unit().scale(I);
    let p = z.z.add(&ie).quad_rep();
    let inv = p.inverse().ok_or(Error::SingularElement { det: 0.0, tol: 0.0 })?;
    Ok(LinearMapEC { mat: inv.mat * (I * 2.0) })
}

/// Q(z, w) = P((z - conj w)/2i).
pub fn universal_kernel(z: &TubePoint, w: &TubePoint) -> LinearMapEC {
    z.z.sub(&w.z.conj()).scale(cr(1.0) / (I * 2.0)).quad_rep()
}

/// Generators of the conformal group of the tube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Letter {
    /// z -> z + v.
    Trans { v: Vec<f64> },
    /// z -> P(a) z.
    #[serde(rename = "struct")]
    StructP { a: Vec<f64> },
    /// z -> e^t z.
    Dilate { t: f64 },
    /// z -> k z for a Jordan automorphism k, row-major.
    Aut { m: Vec<Vec<f64>> },
    /// z -> -z^{-1}.
    #[serde(rename = "inv")]
    Inversion,
}

/// A word in the generators. The rightmost letter acts first.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConformalWord(pub Vec<Letter>);

/// Result of evaluating a word: image point, matrix cocycle J(g, z), and
/// lambda(g, z), a continuous logarithm of det J(g, z)^{r/2N}.
#[derive(Clone, Debug)]
pub struct WordEval {
    pub point: TubePoint,
    pub cocycle: LinearMapEC,
    pub lambda: TrackedScalar,
}

fn check_len(d: AlgebraDescriptor, v: &[f64]) -> Result<()> {
    if v.len() != d.dim() {
        Err(Error::BadLength { expected: d.dim(), got: v.len() })
    } else {
        Ok(())
    }
}

fn aut_matrix(d: AlgebraDescriptor, m: &[Vec<f64>]) -> Result<CMat> {
    let nn = d.dim();
    if m.len() != nn || m.iter().any(|r| r.len() != nn) {
        return Err(Error::BadLength { expected: nn, got: m.len() });
    }
    Ok(CMat::from_fn(nn, nn, |i, j| cr(m[i][j])))
}

impl Letter {
    pub fn inverse(&self, d: AlgebraDescriptor) -> Result<Letter> {
        Ok(match self {
            Letter::Trans { v } => Letter::Trans { v: v.iter().map(|x| -x).collect() },
            Letter::StructP { a } => {
                check_len(d, a)?;
                let inv = JordanElem::new(d, a.clone())?.complexify().inverse()?;
                Letter::StructP { a: inv.re().coeffs.iter().cloned().collect() }
            }
            Letter::Dilate { t } => Letter::Dilate { t: -t },
            Letter::Aut { m } => {
                let nn = m.len();
                Letter::Aut { m: (0..nn).map(|i| (0..nn).map(|j| m[j][i]).collect()).collect() }
            }
            Letter::Inversion => Letter::Inversion,
        })
    }

    /// Image of z, derivative at z, and the increment of lambda.
    fn act(&self, z: &CJordanElem) -> Result<(CJordanElem, CMat, C)> {
        let d = z.desc;
        let nn = d.dim();
        let ratio = d.rank() as f64 / (2.0 * nn as f64);
        match self {
            Letter::Trans { v } => {
                check_len(d, v)?;
                let v = JordanElem::new(d, v.clone())?.complexify();
                Ok((z.add(&v), CMat::identity(nn, nn), cr(0.0)))
            }
            Letter::StructP { a } => {
                check_len(d, a)?;
                let a = JordanElem::new(d, a.clone())?.complexify();
                let p = a.quad_rep();
                let lam = log_det_segment(d, &d.unit_coeffs(), cr(0.0), &a.coeffs)?;
                Ok((p.apply(z), p.mat, lam))
            }
            Letter::Dilate { t } => {
                let s = t.exp();
                Ok((z.scale(cr(s)), CMat::identity(nn, nn) * cr(s), cr(t * d.rank() as f64 / 2.0)))
            }
            Letter::Aut { m } => {
                let k = aut_matrix(d, m)?;
                let det = k.determinant();
                let out = CJordanElem { desc: d, coeffs: &k * &z.coeffs };
                Ok((out, k, det.ln() * ratio))
            }
            Letter::Inversion => {
                let inv = z.inverse()?;
                let pz = z.quad_rep();
                let j = pz.inverse().ok_or(Error::SingularElement { det: 0.0, tol: 0.0 })?;
                let e = d.unit_coeffs();
                let path = |th: f64| {
                    let th = th * FRAC_PI_2;
                    d.det_raw(&(&e * cr(th.cos()) + &z.coeffs * cr(th.sin())))
                };
                let lam = -track_log(path, cr(0.0))?;
                Ok((inv.scale(cr(-1.0)), j.mat, lam))
            }
        }
    }
}

impl ConformalWord {
    pub fn identity() -> Self {
        ConformalWord(Vec::new())
    }

    /// g1 g2: the letters of `o` act first.
    pub fn then_after(&self, o: &ConformalWord) -> ConformalWord {
        let mut v = self.0.clone();
        v.extend(o.0.iter().cloned());
        ConformalWord(v)
    }

    pub fn inverse(&self, d: AlgebraDescriptor) -> Result<ConformalWord> {
        let mut v = Vec::with_capacity(self.0.len());
        for l in self.0.iter().rev() {
            v.push(l.inverse(d)?);
        }
        Ok(ConformalWord(v))
    }

    pub fn is_structure(&self) -> bool {
        self.0.iter().all(|l| !matches!(l, Letter::Inversion | Letter::Trans { .. }))
    }
}

/// Evaluate g.z and J(g, z), letter by letter from the right.
pub fn apply_word(g: &ConformalWord, z: &TubePoint) -> Result<WordEval> {
    let d = z.desc();
    let nn = d.dim();
    let mut cur = z.z.clone();
    let mut jac = CMat::identity(nn, nn);
    let mut lam = cr(0.0);
    for (k, letter) in g.0.iter().enumerate().rev() {
        let (next, dj, dl) = letter.act(&cur).map_err(|e| match e {
            Error::SingularElement { .. } => Error::LeftTube { letter: k },
            other => other,
        })?;
        if !next.coeffs.iter().all(|v| v.is_finite()) || !in_positive_cone(&next.im(), true) {
            return Err(Error::LeftTube { letter: k });
        }
        jac = dj * jac;
        lam += dl;
        cur = next;
    }
    Ok(WordEval {
        point: TubePoint { z: cur },
        cocycle: LinearMapEC { mat: jac },
        lambda: TrackedScalar::from_log(lam),
    })
}

/// Scalar cocycle j_s(g, z) = det J(g, z)^{-rs/2N} on the tracked sheet.
pub fn scalar_cocycle(g: &ConformalWord, z: &TubePoint, s: f64) -> Result<C> {
    let ev = apply_word(g, z)?;
    Ok((-s * ev.lambda.log).exp())
}

/// Scalar kernel Delta((z - conj w)/2i)^{-s}.
pub fn scalar_kernel_value(z: &TubePoint, w: &TubePoint, s: f64) -> Result<TrackedScalar> {
    Ok(TrackedScalar::from_log(kernel_log(z, w)? * (-s)))
}

/// The factor beta(x) = Delta((c(x) + ie)/2)^s on the ball, continued from i^{rs} at 0.
pub fn gamma_factor(x: &BallPoint, s: f64) -> Result<C> {
    let t = cayley_to_tube(x)?;
    let ie = t.desc().unit().scale(I);
    let m = t.z.add(&ie).scale(cr(0.5));
    Ok((log_det_tube(&m)? * s).exp())
}

/// Tube function to ball function: Gamma(F)(x) = beta(x) F(c(x)).
pub fn gamma_intertwiner(f: impl Fn(&TubePoint) -> Result<C>, x: &BallPoint, s: f64) -> Result<C> {
    let t = cayley_to_tube(x)?;
    Ok(gamma_factor(x, s)? * f(&t)?)
}

/// Ball function to tube function: Gamma^{-1}(f)(z) = beta(p(z))^{-1} f(p(z)).
pub fn gamma_inverse(f: impl Fn(&BallPoint) -> Result<C>, z: &TubePoint, s: f64) -> Result<C> {
    let x = cayley_to_ball(z)?;
    Ok(f(&x)? / gamma_factor(&x, s)?)
}

/// Scalar ball cocycle of the translation by v, det(d(p t_v c)(x))^{-rs/2N}, continued
/// along the path of translations t v from the identity.
pub fn ball_translation_cocycle(v: &JordanElem, x: &BallPoint, s: f64) -> Result<C> {
    let d = v.desc;
    let ratio = d.rank() as f64 / (2.0 * d.dim() as f64);
    let cx = cayley_to_tube(x)?;
    let dc = cayley_differential(&cx)?.inverse().ok_or(Error::SingularElement { det: 0.0, tol: 0.0 })?;
    let vc = v.complexify();
    let det_at = |t: f64| -> C {
        let moved = TubePoint { z: cx.z.add(&vc.scale(cr(t))) };
        match cayley_differential(&moved) {
            Ok(dp) => dp.compose(&dc).det(),
            Err(_) => cr(0.0),
        }
    };
    let l = track_log(det_at, cr(0.0))?;
    Ok((-s * ratio * l).exp())
}

/// Bounded-side kernel h(x, y)^{-s} with h the generic norm, computed independently of the tube.
pub fn ball_kernel(x: &BallPoint, y: &BallPoint, s: f64) -> Result<C> {
    let d = x.z.desc;
    match d.family {
        Family::SymReal | Family::HermComplex => {
            let zx = d.to_matrix(&x.z.coeffs);
            let zy = d.to_matrix(&y.z.coeffs);
            let m = &zx * zy.adjoint();
            let l: C = eigenvalues_general(&m).iter().map(|mu| (cr(1.0) - mu).ln()).sum();
            Ok((-s * l).exp())
        }
        Family::SpinFactor => {
            let h = |t: f64| {
                let a = &x.z.coeffs * cr(t);
                let b = &y.z.coeffs * cr(t);
                let dot: C = a.iter().zip(b.iter()).map(|(p, q)| p * q.conj()).sum();
                cr(1.0) - dot * 2.0 + d.det_raw(&a) * d.det_raw(&b).conj()
            };
            Ok((-s * track_log(h, cr(0.0))?).exp())
        }
    }
}

/// Random tube point x + iy with y drawn from the open cone.
pub fn random_tube_point<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> TubePoint {
    let x = random_elem(d, rng);
    let y = random_positive(d, rng, 0.3);
    TubePoint { z: CJordanElem::from_parts(&x, &y) }
}

pub fn random_ball_point<R: Rng>(d: AlgebraDescriptor, rng: &mut R) -> BallPoint {
    cayley_to_ball(&random_tube_point(d, rng)).expect("tube points have invertible z + ie")
}

/// Random letter of each class; `class` cycles trans, struct, dilate, aut, inv.
pub fn random_letter<R: Rng>(d: AlgebraDescriptor, class: usize, rng: &mut R) -> Letter {
    let vecf = |e: &JordanElem| e.coeffs.iter().cloned().collect::<Vec<f64>>();
    match class % 5 {
        0 => Letter::Trans { v: vecf(&random_elem(d, rng)) },
        1 => Letter::StructP { a: vecf(&random_positive(d, rng, 0.5)) },
        2 => Letter::Dilate { t: rng.gen_range(-1.0..1.0) },
        3 => {
            let k = random_automorphism(d, rng);
            let nn = d.dim();
            let m: RMat = k.mat.map(|z| z.re);
            Letter::Aut { m: (0..nn).map(|i| (0..nn).map(|j| m[(i, j)]).collect()).collect() }
        }
        _ => Letter::Inversion,
    }
}

pub fn random_word<R: Rng>(d: AlgebraDescriptor, len: usize, rng: &mut R) -> ConformalWord {
    ConformalWord(
        (0..len)
            .map(|_| {
                let k = rng.gen_range(0..5);
                random_letter(d, k, rng)
            })
            .collect(),
    )
}

/// Central finite-difference complex Jacobian of a holomorphic map of E_C.
pub fn fd_jacobian(f: impl Fn(&CVec) -> Result<CVec>, z: &CVec, h: f64) -> Result<CMat> {
    let nn = z.len();
    let mut jac = CMat::zeros(nn, nn);
    for a in 0..nn {
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[a] += cr(h);
        zm[a] -= cr(h);
        let col = (f(&zp)? - f(&zm)?) / c(2.0 * h, 0.0);
        jac.set_column(a, &col);
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<AlgebraDescriptor> {
        vec![
            AlgebraDescriptor::sym(1),
            AlgebraDescriptor::sym(2),
            AlgebraDescriptor::herm(2),
            AlgebraDescriptor::spin(4),
        ]
    }

    fn rel(a: &CMat, b: &CMat) -> f64 {
        spectral_norm(&(a - b)) / spectral_norm(b).max(1e-300)
    }

    #[test]
    fn cayley_base_points_and_rank_one() {
        for d in families() {
            let b = cayley_to_ball(&TubePoint::base(d)).unwrap();
            assert!(b.z.norm() < 1e-14);
            let t = cayley_to_tube(&BallPoint::origin(d)).unwrap();
            assert!(t.z.sub(&d.unit().scale(I)).norm() < 1e-14);
        }
        let d = AlgebraDescriptor::sym(1);
        let z = TubePoint::new(CJordanElem::new(d, vec![c(0.0, 3.0)]).unwrap()).unwrap();
        let p = cayley_to_ball(&z).unwrap();
        assert!((p.z.coeffs[0] - cr(0.5)).norm() < 1e-15);
        let back = cayley_to_tube(&BallPoint::new(p.z).unwrap()).unwrap();
        assert!((back.z.coeffs[0] - c(0.0, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn cayley_differential_at_base() {
        for d in families() {
            let nn = d.dim();
            let dp = cayley_differential(&TubePoint::base(d)).unwrap();
            assert!((dp.mat - CMat::identity(nn, nn) * c(0.0, -0.5)).norm() < 1e-14);
        }
    }

    #[test]
    fn rank_one_differential() {
        let d = AlgebraDescriptor::sym(1);
        let zv = c(0.4, 1.3);
        let z = TubePoint::new(CJordanElem::new(d, vec![zv]).unwrap()).unwrap();
        let dp = cayley_differential(&z).unwrap();
        let expect = I * 2.0 / ((zv + I) * (zv + I));
        assert!((dp.mat[(0, 0)] - expect).norm() < 1e-14);
    }

    #[test]
    fn kernel_base_and_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in families() {
            let nn = d.dim();
            let base = TubePoint::base(d);
            assert!((universal_kernel(&base, &base).mat - CMat::identity(nn, nn)).norm() < 1e-14);
            let z = random_tube_point(d, &mut rng);
            let w = random_tube_point(d, &mut rng);
            let u = random_elem(d, &mut rng).complexify();
            let zu = TubePoint { z: z.z.add(&u) };
            let wu = TubePoint { z: w.z.add(&u) };
            assert!(rel(&universal_kernel(&zu, &wu).mat, &universal_kernel(&z, &w).mat) < 1e-12);
            let tz = TubePoint { z: z.z.conj().scale(cr(-1.0)) };
            let tw = TubePoint { z: w.z.conj().scale(cr(-1.0)) };
            assert_eq!(universal_kernel(&tz, &tw).mat, universal_kernel(&w, &z).mat);
        }
    }

    #[test]
    fn word_json_round_trip() {
        let w =
            ConformalWord(vec![Letter::Trans { v: vec![1.0, 2.0, 3.0] }, Letter::Inversion, Letter::Dilate { t: 0.5 }]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"[{"op":"trans","v":[1.0,2.0,3.0]},{"op":"inv"},{"op":"dilate","t":0.5}]"#);
        let back: ConformalWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn inversion_letter() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in families() {
            let z = random_tube_point(d, &mut rng);
            let ev = apply_word(&ConformalWord(vec![Letter::Inversion]), &z).unwrap();
            let expect = z.z.inverse().unwrap().scale(cr(-1.0));
            assert!(ev.point.z.sub(&expect).norm() < 1e-12 * expect.norm().max(1.0));
            let pinv = z.z.quad_rep().inverse().unwrap();
            assert!(rel(&ev.cocycle.mat, &pinv.mat) < 1e-12);
        }
    }

    #[test]
    fn principal_power_at_base() {
        let d = AlgebraDescriptor::sym(1);
        let l = log_det_tube(&d.unit().scale(I)).unwrap();
        let v = tracked_power(&TrackedScalar::from_log(l), cr(-0.7));
        assert!((v - C::from_polar(1.0, -0.7 * FRAC_PI_2)).norm() < 1e-15);
    }

    #[test]
    fn winding_loop_accumulates_two_pi() {
        let l = track_log(|t| C::from_polar(2.0, std::f64::consts::TAU * t) * I, C::new(2f64.ln(), FRAC_PI_2)).unwrap();
        assert!((l - C::new(2f64.ln(), FRAC_PI_2 + std::f64::consts::TAU)).norm() < 1e-12);
    }

    #[test]
    fn tracked_log_matches_principal_on_safe_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in families() {
            for _ in 0..10 {
                let z = random_tube_point(d, &mut rng);
                let w = random_tube_point(d, &mut rng);
                let u = z.z.sub(&w.z.conj()).scale(cr(1.0) / (I * 2.0));
                // Re u is in the cone, so the eigenvalues have positive real part.
                let oracle: C = match d.family {
                    Family::SpinFactor => {
                        let x0 = u.coeffs[0];
                        let q: C = u.coeffs.iter().skip(1).map(|v| v * v).sum();
                        let r = q.sqrt();
                        (x0 - r).ln() + (x0 + r).ln()
                    }
                    _ => eigenvalues_general(&d.to_matrix(&u.coeffs)).iter().map(|v| v.ln()).sum(),
                };
                let tracked = kernel_log(&z, &w).unwrap();
                assert!((tracked - oracle).norm() < 1e-10, "{:?} {tracked} {oracle}", d);
            }
        }
    }

    #[test]
    fn scalar_kernel_covariance_under_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = 0.37;
        for d in families() {
            for _ in 0..10 {
                let g = random_word(d, 3, &mut rng);
                let z = random_tube_point(d, &mut rng);
                let w = random_tube_point(d, &mut rng);
                let (gz, gw) = (apply_word(&g, &z).unwrap(), apply_word(&g, &w).unwrap());
                let lhs = scalar_kernel_value(&gz.point, &gw.point, s).unwrap().value;
                let jz = (-s * gz.lambda.log).exp();
                let jw = (-s * gw.lambda.log).exp();
                let rhs = jz * scalar_kernel_value(&z, &w, s).unwrap().value * jw.conj();
                assert!((lhs - rhs).norm() < 1e-9 * rhs.norm(), "{:?} {:?}", d, g);
            }
        }
    }

    #[test]
    fn ball_gram_matches_tube_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = 0.8;
        for d in families() {
            let pts: Vec<BallPoint> = (0..4).map(|_| random_ball_point(d, &mut rng)).collect();
            for x in &pts {
                for y in &pts {
                    let cx = cayley_to_tube(x).unwrap();
                    let cy = cayley_to_tube(y).unwrap();
                    let tube = gamma_factor(x, s).unwrap()
                        * scalar_kernel_value(&cx, &cy, s).unwrap().value
                        * gamma_factor(y, s).unwrap().conj();
                    let ball = ball_kernel(x, y, s).unwrap();
                    assert!((tube - ball).norm() < 1e-9 * ball.norm(), "{:?} {tube} {ball}", d);
                }
            }
        }
    }
}
