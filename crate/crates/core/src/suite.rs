//! The verification suite: every module check and acceptance criterion as a report record.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axb::{
    algebra_laws, conjugation_law_residual, eigen_law_residual, net_suite, probe_vectors, region_report, AxbDist,
    AxbModel, AxbNetReport, Lattice, NetConfig,
};
use crate::error::{Error, Result};
use crate::halfplane::{
    cross_model_check, cross_model_sample, e_filter, wedge_net_suite, EvZeroHandle, HalfPlaneModel, WedgeNetReport,
    GRAM_PSD_TOL,
};
use crate::jordan::{random_automorphism, random_elem, random_positive, AlgebraDescriptor, LinearMapEC};
use crate::kernel_lab::{
    gram_scan, riesz_laplace_check, search_gap_witness, RieszMeasure, SearchConfig, WallachParams,
};
use crate::lie::{check_polar, grading_residual, GradedLieAlgebra, LieKind, WedgeSemigroupElement};
use crate::linalg::{c, cr, spectral_norm, vec_rel_err, CMat, CVec, RMat};
use crate::modular::{
    kms_membership, longo_inclusion_test, standard_subspace_from_pair, symplectic_complement, BoxRegion, Bump,
    ModularPair, RealSubspace, CLOSURE_TOL,
};
use crate::report::{digest, Record, Relation, Report, Verdict};
use crate::spectral::LogGrid;
use crate::tube::{
    apply_word, cayley_differential, cayley_to_ball, cayley_to_tube, fd_jacobian, random_ball_point, random_letter,
    random_tube_point, random_word, universal_kernel, ConformalWord, TubePoint,
};

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Jordan,
    Tube,
    Lie,
    Kernel,
    Modular,
    Axb,
    Halfplane,
}

impl Module {
    pub const ALL: [Module; 7] =
        [Module::Jordan, Module::Tube, Module::Lie, Module::Kernel, Module::Modular, Module::Axb, Module::Halfplane];

    pub fn name(&self) -> &'static str {
        match self {
            Module::Jordan => "jordan_core",
            Module::Tube => "tube_conformal",
            Module::Lie => "lie_grading",
            Module::Kernel => "kernel_lab",
            Module::Modular => "modular_core",
            Module::Axb => "axb_model",
            Module::Halfplane => "halfplane_model",
        }
    }
}

impl FromStr for Module {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "jordan" | "jordan_core" => Module::Jordan,
            "tube" | "tube_conformal" => Module::Tube,
            "lie" | "lie_grading" => Module::Lie,
            "kernel" | "kernel_lab" => Module::Kernel,
            "modular" | "modular_core" => Module::Modular,
            "axb" | "axb_model" => Module::Axb,
            "halfplane" | "halfplane_model" => Module::Halfplane,
            other => return Err(Error::Config(format!("unknown module {other:?}"))),
        })
    }
}

/// `a:b:step` or a comma-separated list.
pub fn parse_s_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("range {s:?} needs a:b:step")));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || b < a {
            return Err(Error::Parse(format!("empty range {s:?}")));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        return Ok((0..=n).map(|k| a + k as f64 * h).collect());
    }
    s.split(',').map(num).collect()
}

/// `[b0,b1]x[t0,t1]` as a box in (b, t).
pub fn parse_region(s: &str) -> Result<BoxRegion> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in s.split('x') {
        let inner = part.trim().strip_prefix('[').and_then(|p| p.strip_suffix(']'));
        let inner = inner.ok_or_else(|| Error::Parse(format!("interval {part:?} needs [a,b]")))?;
        let ends: Vec<&str> = inner.split(',').collect();
        if ends.len() != 2 {
            return Err(Error::Parse(format!("interval {part:?} needs two ends")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
        lo.push(num(ends[0])?);
        hi.push(num(ends[1])?);
    }
    BoxRegion::new(lo, hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub modules: Vec<Module>,
    /// Threshold overrides keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
    /// Wallach scan parameters; None uses the discrete points and three continuous values.
    pub s_grid: Option<Vec<f64>>,
    /// Doubles the net grid size per level.
    pub refine: u32,
    /// Half-plane exponent for the net checks.
    pub halfplane_s: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            modules: Module::ALL.to_vec(),
            tolerances: BTreeMap::new(),
            s_grid: None,
            refine: 0,
            halfplane_s: 1.0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modules.is_empty() {
            return Err(Error::Config("no modules selected".into()));
        }
        if self.refine > 3 {
            return Err(Error::Config(format!("refinement level {} above 3", self.refine)));
        }
        if !(self.halfplane_s > 0.0) {
            return Err(Error::Config(format!("half-plane s = {}", self.halfplane_s)));
        }
        if let Some(g) = &self.s_grid {
            if g.is_empty() || g.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                return Err(Error::Config("s grid needs finite nonnegative values".into()));
            }
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn net_model(&self) -> AxbModel {
        AxbModel::new(LogGrid::new(1e-12, 1e4, 8192 << self.refine).expect("valid grid"))
    }
}

struct Recorder<'a> {
    cfg: &'a SuiteConfig,
    module: Module,
    report: &'a mut Report,
}

impl Recorder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn check<I: Serialize>(
        &mut self,
        id: &str,
        criterion: u32,
        anchor: &str,
        inputs: &I,
        metric: Result<f64>,
        relation: Relation,
        threshold: f64,
    ) {
        let id = format!("{}.{}", self.module.name(), id);
        let threshold = self.cfg.tolerances.get(&id).copied().unwrap_or(threshold);
        let (metric, error) = match metric {
            Ok(m) if m.is_finite() => (Some(m), None),
            Ok(m) => (None, Some(format!("non-finite metric {m}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        let verdict = match metric {
            Some(m) if relation.holds(m, threshold) => Verdict::Pass,
            _ => Verdict::Fail,
        };
        self.report.push(Record {
            id,
            module: self.module.name().into(),
            criterion,
            paper_anchor: anchor.into(),
            inputs_digest: digest(&(self.cfg.seed, inputs)),
            metric,
            relation,
            threshold,
            verdict,
            error,
        });
    }

    fn table<T: Serialize>(&mut self, key: &str, value: &T) {
        self.report.table(&format!("{}.{}", self.module.name(), key), value);
    }
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        m = m.max(v?);
    }
    Ok(m)
}

fn min_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = f64::INFINITY;
    for v in it {
        m = m.min(v?);
    }
    Ok(m)
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    spectral_norm(&(a - b)) / spectral_norm(b)
}

fn tube_families() -> Vec<AlgebraDescriptor> {
    vec![AlgebraDescriptor::sym(2), AlgebraDescriptor::sym(3), AlgebraDescriptor::herm(2), AlgebraDescriptor::spin(4)]
}

fn jordan_checks(r: &mut Recorder) {
    let families = [AlgebraDescriptor::sym(3), AlgebraDescriptor::herm(3), AlgebraDescriptor::spin(4)];
    let names: Vec<String> = families.iter().map(|d| d.name()).collect();
    let mut rng = r.cfg.rng(1);
    let mut jordan_id: Vec<Result<f64>> = Vec::new();
    let mut fundamental: Vec<Result<f64>> = Vec::new();
    let mut det_quad: Vec<Result<f64>> = Vec::new();
    let mut homogeneity: Vec<Result<f64>> = Vec::new();
    for &d in &families {
        for _ in 0..100 {
            let x = random_elem(d, &mut rng).complexify();
            let y = random_elem(d, &mut rng).complexify();
            jordan_id.push((|| {
                let x2 = x.square();
                let lhs = x.product(&y)?.product(&x2)?;
                let rhs = x.product(&y.product(&x2)?)?;
                Ok(lhs.sub(&rhs).norm() / (x.norm().powi(3) * y.norm()))
            })());
            let py = y.quad_rep();
            let lhs = py.apply(&x).quad_rep();
            let rhs = py.compose(&x.quad_rep()).compose(&py);
            fundamental.push(Ok(rel(&lhs.mat, &rhs.mat)));

            let xp = random_positive(d, &mut rng, 0.3);
            let yp = random_positive(d, &mut rng, 0.3);
            let pyx = yp.complexify().quad_rep().apply(&xp.complexify());
            let expect = yp.det().powi(2) * xp.det();
            det_quad.push(Ok((pyx.det() - cr(expect)).norm() / expect.abs()));

            let a: f64 = rng.gen_range(0.5..2.0);
            let k = random_automorphism(d, &mut rng);
            let g = LinearMapEC::scalar(d.dim(), cr(a)).compose(&k).compose(&yp.complexify().quad_rep());
            let gx = g.apply(&xp.complexify());
            let expect = a.powi(d.rank() as i32) * yp.det().powi(2) * xp.det();
            homogeneity.push(Ok((gx.det() - cr(expect)).norm() / expect.abs()));
        }
    }
    let inputs = (&names, 100usize);
    r.check("jordan_identity", 1, "(x o y) o x^2 = x o (y o x^2)", &inputs, max_of(jordan_id), Relation::Below, 1e-9);
    r.check("fundamental_identity", 1, "P(P(y)x) = P(y)P(x)P(y)", &inputs, max_of(fundamental), Relation::Below, 1e-9);
    r.check("det_quadratic", 2, "det(P(y)x) = det(y)^2 det(x)", &inputs, max_of(det_quad), Relation::Below, 1e-9);
    r.check(
        "det_homogeneity",
        2,
        "det(a k P(y) x) = a^r det(y)^2 det(x) on the structure group",
        &inputs,
        max_of(homogeneity),
        Relation::Below,
        1e-9,
    );
}

fn tube_checks(r: &mut Recorder) {
    let families = tube_families();
    let names: Vec<String> = families.iter().map(|d| d.name()).collect();
    let mut rng = r.cfg.rng(2);
    let mut round: Vec<Result<f64>> = Vec::new();
    let mut diff: Vec<Result<f64>> = Vec::new();
    let mut class_cov: Vec<Result<f64>> = Vec::new();
    let mut word_cov: Vec<Result<f64>> = Vec::new();
    let mut cocycle: Vec<Result<f64>> = Vec::new();
    for &d in &families {
        for _ in 0..100 {
            let z = random_tube_point(d, &mut rng);
            round.push((|| {
                let back = cayley_to_tube(&cayley_to_ball(&z)?)?;
                Ok(back.z.sub(&z.z).norm() / z.z.norm().max(1.0))
            })());
            let x = random_ball_point(d, &mut rng);
            round.push((|| Ok(cayley_to_ball(&cayley_to_tube(&x)?)?.z.sub(&x.z).norm()))());
        }
        for _ in 0..20 {
            let z = random_tube_point(d, &mut rng);
            diff.push((|| {
                let f = |v: &CVec| {
                    let p =
                        cayley_to_ball(&TubePoint { z: crate::jordan::CJordanElem { desc: d, coeffs: v.clone() } })?;
                    Ok(p.z.coeffs)
                };
                let fd = fd_jacobian(f, &z.z.coeffs, 1e-5)?;
                Ok(rel(&fd, &cayley_differential(&z)?.mat))
            })());
        }
        let covariance = |g: &ConformalWord, z: &TubePoint, w: &TubePoint| -> Result<f64> {
            let (ez, ew) = (apply_word(g, z)?, apply_word(g, w)?);
            let lhs = universal_kernel(&ez.point, &ew.point).mat;
            let rhs = &ez.cocycle.mat * universal_kernel(z, w).mat * ew.cocycle.mat.adjoint();
            Ok(rel(&lhs, &rhs))
        };
        for class in 0..5 {
            for _ in 0..10 {
                let g = ConformalWord(vec![random_letter(d, class, &mut rng)]);
                let (z, w) = (random_tube_point(d, &mut rng), random_tube_point(d, &mut rng));
                class_cov.push(covariance(&g, &z, &w));
            }
        }
        for _ in 0..50 {
            let g = random_word(d, 2, &mut rng);
            let (z, w) = (random_tube_point(d, &mut rng), random_tube_point(d, &mut rng));
            word_cov.push(covariance(&g, &z, &w));
        }
        for _ in 0..30 {
            let g1 = random_word(d, 3, &mut rng);
            let g2 = random_word(d, 3, &mut rng);
            let z = random_tube_point(d, &mut rng);
            cocycle.push((|| {
                let e2 = apply_word(&g2, &z)?;
                let e1 = apply_word(&g1, &e2.point)?;
                let e12 = apply_word(&g1.then_after(&g2), &z)?;
                let lam = (e12.lambda.log - e1.lambda.log - e2.lambda.log).norm();
                Ok(rel(&e12.cocycle.mat, &(&e1.cocycle.mat * &e2.cocycle.mat)).max(lam))
            })());
        }
    }
    let inputs = &names;
    r.check("cayley_round_trip", 3, "p o c = id and c o p = id", inputs, max_of(round), Relation::Below, 1e-9);
    r.check(
        "cayley_differential",
        3,
        "differential of the Cayley transform",
        inputs,
        max_of(diff),
        Relation::Below,
        1e-6,
    );
    r.check(
        "kernel_covariance_generators",
        4,
        "Q(gz, gw) = J(g,z) Q(z,w) J(g,w)^*",
        &(inputs, "each class"),
        max_of(class_cov),
        Relation::Below,
        1e-8,
    );
    r.check(
        "kernel_covariance_words",
        4,
        "Q(gz, gw) = J(g,z) Q(z,w) J(g,w)^*",
        &(inputs, "2-letter words", 50),
        max_of(word_cov),
        Relation::Below,
        1e-8,
    );
    r.check(
        "cocycle_identity",
        4,
        "J(g1 g2, z) = J(g1, g2 z) J(g2, z)",
        inputs,
        max_of(cocycle),
        Relation::Below,
        1e-9,
    );
}

fn lie_checks(r: &mut Recorder) {
    let mut rng = r.cfg.rng(3);
    let psd = |n: usize, rng: &mut ChaCha8Rng, scale: f64| {
        let a = RMat::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        &a * a.transpose() * (scale / n as f64)
    };
    for kind in [LieKind::Sl2, LieKind::Sp4] {
        let alg = GradedLieAlgebra::build(kind);
        let tag = format!("{kind:?}").to_lowercase();
        r.check(
            &format!("grading_{tag}"),
            0,
            "[g^i, g^j] inside g^{i+j} for the Euler element grading",
            &tag,
            Ok(grading_residual(&alg)),
            Relation::Below,
            1e-12,
        );
        let mut res: Vec<Result<f64>> = Vec::new();
        for _ in 0..20 {
            let n = alg.n;
            let mut element = || {
                let a = RMat::from_fn(n, n, |_, _| 0.4 * rng.sample::<f64, _>(rand_distr::StandardNormal));
                WedgeSemigroupElement::new(
                    alg.g0_from_block(&a).exp(),
                    alg.g1_from_block(&psd(n, &mut rng, 0.8)),
                    alg.gm1_from_block(&psd(n, &mut rng, 0.8)),
                )
            };
            let (s1, s2) = (element(), element());
            res.push((|| {
                let chk = check_polar(&alg, &(&s1.product * &s2.product))?;
                if !chk.member {
                    return Err(Error::HypothesisViolated("product left the semigroup".into()));
                }
                Ok(chk.residual)
            })());
        }
        r.check(
            &format!("semigroup_products_{tag}"),
            0,
            "products of semigroup elements re-factor in polar form",
            &(tag, 20),
            max_of(res),
            Relation::Below,
            1e-8,
        );
    }
}

#[derive(Serialize)]
struct ScanRow {
    algebra: String,
    s: f64,
    classification: crate::kernel_lab::WallachClass,
    min_ratio: f64,
}

fn kernel_checks(r: &mut Recorder) {
    let mut rng = r.cfg.rng(4);
    let mut scan = Vec::new();
    let mut witnesses = Vec::new();
    for d in tube_families() {
        let half_d = d.peirce_d() as f64 / 2.0;
        let top = (d.rank() - 1) as f64 * half_d;
        let s_values: Vec<f64> = match &r.cfg.s_grid {
            Some(g) => g.clone(),
            None => {
                let mut v: Vec<f64> = (0..d.rank()).map(|j| j as f64 * half_d).collect();
                v.extend([top + 0.1, top + 1.0, top + 2.7]);
                v
            }
        };
        let in_set: Vec<f64> =
            s_values.iter().cloned().filter(|&s| WallachParams { desc: d, s }.in_wallach_set()).collect();
        let mut worst = f64::INFINITY;
        let mut err = None;
        for _ in 0..20 {
            let pts: Vec<TubePoint> = (0..12).map(|_| random_tube_point(d, &mut rng)).collect();
            match gram_scan(&pts, &s_values) {
                Ok(reports) => {
                    for g in reports {
                        let ratio = g.min_eig / g.norm;
                        if (WallachParams { desc: d, s: g.s }).in_wallach_set() {
                            worst = worst.min(ratio);
                        }
                        scan.push(ScanRow {
                            algebra: g.algebra,
                            s: g.s,
                            classification: g.classification,
                            min_ratio: ratio,
                        });
                    }
                }
                Err(e) => err = Some(e),
            }
        }
        if !in_set.is_empty() {
            let metric = match err {
                Some(e) => Err(e),
                None => Ok(worst),
            };
            r.check(
                &format!("wallach_psd_{}", d.name().to_lowercase()),
                5,
                "Wallach set psd: s in {0, d/2, ..., (r-1)d/2} or s > (r-1)d/2",
                &(d.name(), &in_set, 20, 12),
                metric,
                Relation::AtLeast,
                -1e-8,
            );
        }
        let gaps: [f64; 2] = match (d.rank(), d.peirce_d()) {
            (_, 1) => [0.1, 0.25],
            _ => [0.25, 0.5],
        };
        for s in gaps {
            let mut wrng = r.cfg.rng(100 + (s * 1000.0) as u64);
            let w = search_gap_witness(d, s, SearchConfig::default(), &mut wrng);
            let metric = w.as_ref().map_err(Clone::clone).and_then(|w| w.recheck());
            r.check(
                &format!("wallach_gap_witness_{}_s{}", d.name().to_lowercase(), s),
                5,
                "indefinite Gram matrix for s outside the Wallach set",
                &(d.name(), s),
                metric,
                Relation::Below,
                -1e-8,
            );
            if let Ok(w) = w {
                witnesses.push(w);
            }
        }
    }
    r.table("wallach_scan", &scan);
    r.table("gap_witnesses", &witnesses);

    let mut laplace = Vec::new();
    let cases: Vec<(AlgebraDescriptor, f64)> = vec![
        (AlgebraDescriptor::sym(1), 0.7),
        (AlgebraDescriptor::sym(1), 2.5),
        (AlgebraDescriptor::sym(2), 2.0),
        (AlgebraDescriptor::herm(2), 2.5),
        (AlgebraDescriptor::spin(4), 1.5),
        (AlgebraDescriptor::spin(3), 2.2),
    ];
    for (d, s) in cases {
        let label = d.name();
        let mut errs: Vec<Result<f64>> = Vec::new();
        let m = RieszMeasure::new(d, s);
        for _ in 0..10 {
            let x = random_positive(d, &mut rng, 0.3);
            errs.push(m.clone().and_then(|m| riesz_laplace_check(&m, &x)).map(|c| c.relerr));
        }
        laplace.push((label.clone(), s));
        r.check(
            &format!("riesz_laplace_{}_s{}", label.to_lowercase(), s),
            6,
            "Laplace transform of the Riesz measure is det(x)^{-s}",
            &(label, s, 10),
            max_of(errs),
            Relation::Below,
            1e-4,
        );
    }
}

fn modular_checks(r: &mut Recorder) {
    let mut rng = r.cfg.rng(5);
    let mut double: Vec<Result<f64>> = Vec::new();
    let mut dual: Vec<Result<f64>> = Vec::new();
    let mut tomita: Vec<Result<f64>> = Vec::new();
    let mut inclusion: Vec<Result<f64>> = Vec::new();
    let mut rejections: Vec<Result<f64>> = Vec::new();
    for k in 0..50 {
        let m = 2 + k % 4;
        let p = ModularPair::random(m, 0.6, &mut rng);
        let v = match standard_subspace_from_pair(&p) {
            Ok(v) => v,
            Err(e) => {
                double.push(Err(e));
                continue;
            }
        };
        let vp = symplectic_complement(&v);
        double.push(Ok(symplectic_complement(&vp).max_angle(&v)));
        dual.push(standard_subspace_from_pair(&p.inverse()).map(|d| vp.max_angle(&d)));
        tomita.push(ModularPair::from_subspace(&v).map(|q| {
            spectral_norm(&(q.delta() - p.delta())) / spectral_norm(p.delta())
                + spectral_norm(&(q.unitary_part() - p.unitary_part()))
        }));

        let basis = v.vectors();
        let xi: Vec<CVec> = (0..2)
            .map(|_| basis.iter().fold(CVec::zeros(m), |acc, b| acc + b * cr(rng.gen_range(-1.0..1.0))))
            .collect();
        let times = [0.0, 0.37, 0.81, 1.3, -0.6, 2.1];
        let mut orbit = Vec::new();
        for x in &xi {
            for &t in &times {
                orbit.push(p.delta_it(t) * x);
            }
        }
        let flow = |t: f64| p.delta_it(t);
        inclusion.push(
            RealSubspace::from_generators(m, &orbit, CLOSURE_TOL)
                .and_then(|v1| longo_inclusion_test(&v1, &v, &flow, &[0.25, 0.5, 1.0], 1e-8))
                .and_then(|o| if o.equal { Ok(o.angle) } else { Err(Error::HypothesisViolated("not equal".into())) }),
        );

        let one = RealSubspace::from_generators(m, &basis[..1], CLOSURE_TOL);
        rejections.push(one.map(|v1| match longo_inclusion_test(&v1, &v, &flow, &[0.5], 1e-8) {
            Err(Error::HypothesisViolated(_)) => 1.0,
            _ => 0.0,
        }));
    }
    let inputs = (50, "dims 2..5", 0.6);
    r.check("double_complement", 10, "V'' = V", &inputs, max_of(double), Relation::Below, 1e-8);
    r.check(
        "complement_is_inverse_pair",
        10,
        "V' is the standard subspace of (Delta^{-1}, J)",
        &inputs,
        max_of(dual),
        Relation::Below,
        1e-8,
    );
    r.check(
        "pair_round_trip",
        10,
        "Tomita operator recovers (Delta, J)",
        &inputs,
        max_of(tomita),
        Relation::Below,
        1e-8,
    );
    r.check(
        "inclusion_equality",
        10,
        "modular-invariant standard subspace of V equals V",
        &inputs,
        max_of(inclusion),
        Relation::Below,
        1e-8,
    );
    r.check(
        "inclusion_hypotheses",
        10,
        "non-standard subspaces are rejected before the conclusion",
        &inputs,
        min_of(rejections),
        Relation::AtLeast,
        1.0,
    );
}

fn axb_checks(r: &mut Recorder) {
    let small = AxbModel::new(LogGrid::new(1e-12, 1e4, 2048).expect("valid grid"));
    let bumps = [Bump::new(vec![1.0, 0.2], vec![0.5, 0.3]), Bump::new(vec![-0.4, -0.1], vec![0.3, 0.2])];
    let etas = [AxbDist::plain(cr(1.0)), AxbDist::paired(c(0.7, 0.4)), AxbDist::phased(2.5)];
    let mut smear: Vec<Result<f64>> = Vec::new();
    for b in &bumps {
        for e in &etas {
            smear.push(
                e.clone().and_then(|e| Ok(vec_rel_err(&small.smear(b, &e, 64)?, &small.smear_direct(b, &e, 64)?))),
            );
        }
    }
    r.check(
        "smear_dual_route",
        7,
        "U(phi) eta_s = phi~(p) p^s",
        &(&bumps, "s = 1, 0.7+0.4i paired, 2.5 phased"),
        max_of(smear),
        Relation::Below,
        1e-5,
    );

    let net = r.cfg.net_model();
    let (phi, psi) = (Bump::new(vec![0.3], vec![0.5]), Bump::new(vec![-0.2], vec![0.4]));
    let d_s = [0.5, 1.0, 2.3].map(|s| net.distribution_d(&phi, &psi, cr(s)).map(|d| d.relerr));
    r.check(
        "distribution_dual_route",
        7,
        "D_s is the Fourier transform of p^{2 Re s - 1} dp",
        &(&phi, &psi, [0.5, 1.0, 2.3]),
        max_of(d_s),
        Relation::Below,
        1e-4,
    );
    let eig = [(0.5, 30i64), (1.0, -45), (1.7, 60)]
        .map(|(s, j)| AxbDist::phased(s).and_then(|e| eigen_law_residual(&net, &bumps[0], &e, j)));
    r.check(
        "eigen_law",
        7,
        "U(0, a) eta_s = a^s eta_s",
        &(&bumps[0], [0.5, 1.0, 1.7]),
        max_of(eig),
        Relation::Below,
        1e-5,
    );
    let conj = [c(1.2, -0.3), c(0.6, 0.2)].map(|s| conjugation_law_residual(&small, &bumps[0], s));
    r.check(
        "conjugation_law",
        0,
        "J U(phi) eta_s = U(phi o tau) eta_{conj s}",
        &bumps[0],
        max_of(conj),
        Relation::Below,
        1e-10,
    );

    let alg = AxbModel::algebra_default();
    let lat = Lattice { db: 0.01 / 2f64.powi(r.cfg.refine as i32), t_steps: 1 };
    let (a, b) = (Bump::new(vec![0.5, 0.1], vec![0.3, 0.2]), Bump::new(vec![-0.3, -0.1], vec![0.4, 0.15]));
    let probes = probe_vectors(&alg.grid, 3, r.cfg.seed);
    let laws = algebra_laws(&alg, &a, &b, &probes, &lat);
    let inputs = (&a, &b, lat.db, lat.t_steps);
    let pick = |f: fn(&crate::axb::AlgebraLaws) -> f64| laws.as_ref().map(f).map_err(Clone::clone);
    r.check(
        "homomorphism",
        7,
        "U(phi * psi) = U(phi) U(psi)",
        &inputs,
        pick(|l| l.homomorphism),
        Relation::Below,
        1e-4,
    );
    r.check("adjoint", 7, "U(phi^*) = U(phi)^*", &inputs, pick(|l| l.adjoint), Relation::Below, 1e-4);
    r.check(
        "right_relation",
        7,
        "U(phi_g) = Delta_G(g)^{-1} U(phi) U(g^{-1})",
        &inputs,
        pick(|l| l.right_relation),
        Relation::Below,
        1e-4,
    );
    r.check(
        "left_covariance",
        0,
        "U(g phi) = U(g) U(phi)",
        &inputs,
        pick(|l| l.left_covariance),
        Relation::Below,
        1e-4,
    );
    r.check("involution", 0, "phi^** = phi", &inputs, pick(|l| l.involution), Relation::Below, 1e-10);
    let trend = laws.as_ref().map_err(Clone::clone).and_then(|l| {
        let t = &l.delta_trend;
        if t.len() < 2 {
            return Err(Error::InvalidParameter("short trend".into()));
        }
        Ok(t.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min))
    });
    r.check(
        "approximate_identity",
        0,
        "delta sequences converge to the identity",
        &inputs,
        trend,
        Relation::Above,
        0.0,
    );
    if let Ok(l) = &laws {
        r.table("algebra_laws", l);
    }

    let probes = probe_vectors(&small.grid, 4, r.cfg.seed);
    let bump = Bump::new(vec![1.0, 0.0], vec![0.5, 0.2]);
    for s in [0.5, 1.0, 1.5, 2.5] {
        let good =
            AxbDist::phased(s).and_then(|e| kms_membership(&small, &(bump.clone(), e), &probes)).map(|k| k.residual);
        let bad =
            AxbDist::plain(cr(s)).and_then(|e| kms_membership(&small, &(bump.clone(), e), &probes)).map(|k| k.residual);
        r.check(
            &format!("kms_phased_s{s}"),
            8,
            "phased eta~_s = e^{-i pi s/2} eta_s satisfies KMS",
            &(&bump, s),
            good,
            Relation::Below,
            1e-6,
        );
        r.check(&format!("kms_plain_s{s}"), 8, "unphased eta_s violates KMS", &(&bump, s), bad, Relation::Above, 0.1);
    }

    let cfg = NetConfig::default();
    match net_suite(&net, &cfg) {
        Ok(rep) => {
            net_records(r, "net", &cfg, &rep);
            r.table("net", &rep);
        }
        Err(e) => r.check("net", 9, "net properties at truncation", &cfg, Err(e), Relation::Below, 0.0),
    }
}

/// Criterion 9 sub-claims of a net report.
fn net_records(r: &mut Recorder, prefix: &str, cfg: &NetConfig, rep: &AxbNetReport) {
    let inputs = (cfg, rep.s);
    let id = |s: &str| format!("{prefix}.{s}");
    r.check(
        &id("isotony"),
        9,
        "O1 inside O2 gives H_E(O1) inside H_E(O2)",
        &inputs,
        Ok(rep.isotony_sine),
        Relation::Below,
        1e-10,
    );
    r.check(&id("covariance"), 9, "U(g) H_E(O) = H_E(gO)", &inputs, Ok(rep.covariance_angle), Relation::Below, 1e-8);
    let min_rank = rep.reeh_schlieder_ranks.iter().cloned().min().unwrap_or(0) as f64;
    r.check(
        &id("reeh_schlieder"),
        9,
        "H_E(O) is cyclic for every open O",
        &(inputs, rep.reeh_schlieder_ranks.len()),
        Ok(min_rank),
        Relation::AtLeast,
        rep.band_dim as f64,
    );
    r.check(
        &id("wedge_subspace"),
        9,
        "H_E(S) = V for the modular pair",
        &inputs,
        Ok(rep.wedge_angle),
        Relation::Below,
        1e-3,
    );
    r.check(
        &id("modular_flow"),
        9,
        "modular flow of H_E(S) is the dilation group",
        &inputs,
        Ok(rep.flow_residual),
        Relation::Below,
        1e-3,
    );
    r.check(
        &id("kms_generators"),
        0,
        "wedge generators satisfy KMS",
        &inputs,
        Ok(rep.kms_max_residual),
        Relation::Below,
        1e-6,
    );
    r.check(
        &id("translation_wedge"),
        0,
        "translations in the wedge generate the same subspace",
        &inputs,
        Ok(rep.translation_angle),
        Relation::Below,
        1e-3,
    );
    r.check(
        &id("duality_im"),
        9,
        "Im D(psi^* * phi) = 0 across complementary wedges",
        &inputs,
        Ok(rep.duality_im),
        Relation::Below,
        1e-6,
    );
    r.check(
        &id("duality_complement"),
        9,
        "V(gS)' = V(gS^{-1})",
        &inputs,
        Ok(rep.complement_angle),
        Relation::Below,
        1e-3,
    );
    r.check(
        &id("duality_im_je"),
        0,
        "Im-pairing against the J E smears",
        &inputs,
        Ok(rep.duality_im_conjugate),
        Relation::Below,
        1e-6,
    );
    r.check(
        &id("duality_complement_je"),
        0,
        "complement against the J E smears",
        &inputs,
        Ok(rep.complement_angle_conjugate),
        Relation::Below,
        1e-3,
    );
    r.check(
        &id("non_standard_orbit"),
        9,
        "V(A g S) is not standard for g outside S",
        &(inputs, "g = translation by -1"),
        Ok(if rep.orbit.cyclic && !rep.orbit.separating { 1.0 } else { 0.0 }),
        Relation::AtLeast,
        1.0,
    );
    r.check(
        &id("positive_energy"),
        0,
        "smears have positive energy",
        &inputs,
        Ok(rep.energy_min),
        Relation::Above,
        0.0,
    );
}

fn halfplane_checks(r: &mut Recorder) {
    let s = r.cfg.halfplane_s;
    let mut rng = r.cfg.rng(7);
    let cfg = NetConfig { t_range: 2.5, ..NetConfig::default() };
    match wedge_net_suite(s, &cfg, &mut rng) {
        Ok(rep) => wedge_net_records(r, &cfg, &rep),
        Err(e) => {
            r.check("thm54", 9, "net properties of the half-plane model", &(s, &cfg), Err(e), Relation::Below, 0.0)
        }
    }

    let boundary = (|| -> Result<f64> {
        let hp = HalfPlaneModel::with_default_grid(s)?;
        let h = EvZeroHandle::in_e(s, 1.0)?;
        let (frame, fs) = hp.smear_ev0(&Bump::new(vec![-1.0, 0.1], vec![0.5, 0.2]), &h)?;
        let phi = Bump::new(vec![0.3], vec![0.7]);
        let (l2, line) = hp.boundary_values(&frame, &fs.vector, &phi)?;
        let lim = hp.boundary_limit(&frame, &fs.vector, &phi, 0.02)?;
        Ok(((l2 - line).norm().max((lim - line).norm())) / l2.norm())
    })();
    r.check(
        "boundary_values",
        0,
        "bo(F)(phi) = F_phi(0) against the boundary limit",
        &s,
        boundary,
        Relation::Below,
        1e-4,
    );

    let (bumps, pairs) = cross_model_sample();
    for cs in [0.5, 1.0, 2.0] {
        let rep = HalfPlaneModel::with_default_grid(cs).and_then(|hp| cross_model_check(&hp, &bumps, &pairs));
        r.check(
            &format!("cross_model_s{cs}"),
            11,
            "half-plane Gram values equal the ax+b inner products through bo",
            &(&bumps, &pairs, cs),
            rep.as_ref().map(|c| c.max_relerr).map_err(Clone::clone),
            Relation::Below,
            1e-3,
        );
        if let Ok(c) = rep {
            r.table(&format!("cross_model_s{cs}"), &c);
        }
    }

    let s_values = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    match e_filter(&s_values, r.cfg.seed) {
        Ok(rows) => {
            let member = rows.iter().map(|row| row.member.residual).fold(0.0, f64::max);
            let outside = rows.iter().map(|row| row.non_member.residual).fold(f64::INFINITY, f64::min);
            r.check(
                "e_filter_members",
                0,
                "handles in E give KMS vectors",
                &s_values,
                Ok(member),
                Relation::Below,
                1e-6,
            );
            r.check(
                "e_filter_non_members",
                0,
                "handles outside E fail KMS",
                &s_values,
                Ok(outside),
                Relation::Above,
                0.1,
            );
            r.table("e_filter", &rows);
        }
        Err(e) => r.check("e_filter", 0, "E-condition filter", &s_values, Err(e), Relation::Below, 0.0),
    }
}

fn wedge_net_records(r: &mut Recorder, cfg: &NetConfig, rep: &WedgeNetReport) {
    let inputs = (rep.s, cfg);
    r.check(
        "frame_psd",
        0,
        "kernel Gram matrices are psd for s > 0",
        &inputs,
        Ok(rep.frame_min_eigen_ratio),
        Relation::AtLeast,
        -GRAM_PSD_TOL,
    );
    r.check(
        "gram_invariance",
        0,
        "U(g) is unitary on kernel sections",
        &inputs,
        Ok(rep.gram_invariance),
        Relation::Below,
        1e-8,
    );
    r.check(
        "n_minus_invariance",
        0,
        "U(g) ev_0 = ev_0 for g in N^-",
        &inputs,
        Ok(rep.n_minus_invariance),
        Relation::Below,
        1e-10,
    );
    r.check(
        "a_eigen_relation",
        0,
        "dilations scale ev_0^xi by the character",
        &inputs,
        Ok(rep.a_eigen_residual),
        Relation::Below,
        1e-10,
    );
    r.check(
        "smear_routes",
        0,
        "kernel-route and L^2-route smears agree",
        &inputs,
        Ok(rep.route_relerr),
        Relation::Below,
        1e-4,
    );
    r.check(
        "frame_residual",
        0,
        "frame approximation of the smear",
        &(inputs, rep.frame_size),
        Ok(rep.frame_residual),
        Relation::Below,
        1e-3,
    );
    net_records(r, "thm54", cfg, &rep.net);
    r.table("thm54", rep);
}

/// The ax+b net checks alone at exponent s, with an optional region report.
pub fn run_axb_net(cfg: &SuiteConfig, s: f64, region: Option<&BoxRegion>) -> Result<Report> {
    cfg.validate()?;
    let net_cfg = NetConfig { s, ..NetConfig::default() };
    // Rejects s outside the range of the distribution vectors before any grid work.
    AxbDist::phased(s)?;
    let mut report = Report::new(cfg.seed, digest(&(cfg, s, region)));
    let mut r = Recorder { cfg, module: Module::Axb, report: &mut report };
    let model = cfg.net_model();
    match net_suite(&model, &net_cfg) {
        Ok(rep) => {
            net_records(&mut r, "net", &net_cfg, &rep);
            r.table("net", &rep);
        }
        Err(e) => r.check("net", 9, "net properties at truncation", &net_cfg, Err(e), Relation::Below, 0.0),
    }
    if let Some(bx) = region {
        match region_report(&model, &net_cfg, bx) {
            Ok(rep) => {
                r.check(
                    "region.rank",
                    9,
                    "H_E(O) is cyclic for every open O",
                    &(bx, s),
                    Ok(rep.band_rank as f64),
                    Relation::AtLeast,
                    rep.band_dim as f64,
                );
                r.check(
                    "region.kms",
                    0,
                    "region generators satisfy KMS",
                    &(bx, s),
                    Ok(rep.kms_max_residual),
                    Relation::Below,
                    1e-6,
                );
                r.table("region", &rep);
            }
            Err(e) => r.check("region", 9, "region subspace", &(bx, s), Err(e), Relation::Below, 0.0),
        }
    }
    Ok(report)
}

/// Run the selected modules in fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new(cfg.seed, digest(cfg));
    let mut modules = cfg.modules.clone();
    modules.sort();
    modules.dedup();
    for m in modules {
        let mut r = Recorder { cfg, module: m, report: &mut report };
        match m {
            Module::Jordan => jordan_checks(&mut r),
            Module::Tube => tube_checks(&mut r),
            Module::Lie => lie_checks(&mut r),
            Module::Kernel => kernel_checks(&mut r),
            Module::Modular => modular_checks(&mut r),
            Module::Axb => axb_checks(&mut r),
            Module::Halfplane => halfplane_checks(&mut r),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_grid_forms() {
        assert_eq!(parse_s_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_s_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_s_grid("1:0:0.1").is_err());
        assert!(parse_s_grid("a").is_err());
    }

    #[test]
    fn module_names_round_trip() {
        for m in Module::ALL {
            assert_eq!(m.name().parse::<Module>().unwrap(), m);
        }
        assert!("nope".parse::<Module>().is_err());
    }

    #[test]
    fn region_syntax() {
        let b = parse_region("[0,2]x[-1,1]").unwrap();
        assert_eq!((b.lo.clone(), b.hi.clone()), (vec![0.0, -1.0], vec![2.0, 1.0]));
        assert!(parse_region("[0,2]x[1]").is_err());
        assert!(parse_region("0,2").is_err());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let cfg = SuiteConfig { modules: vec![], ..Default::default() };
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
        let cfg = SuiteConfig { s_grid: Some(vec![f64::NAN]), ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn small_modules_pass_and_are_deterministic() {
        let cfg = SuiteConfig { modules: vec![Module::Jordan, Module::Lie], ..Default::default() };
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert!(a.all_pass(), "{}", a.to_json());
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.records.iter().all(|r| !r.paper_anchor.is_empty()));
    }
}
