use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tubelet::lie::*;
use tubelet::linalg::{RMat, C};

fn psd<R: Rng>(n: usize, rng: &mut R, scale: f64) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    &a * a.transpose() * (scale / n as f64)
}

fn random_element<R: Rng>(alg: &GradedLieAlgebra, rng: &mut R) -> WedgeSemigroupElement {
    let n = alg.n;
    let a = RMat::from_fn(n, n, |_, _| 0.4 * rng.sample::<f64, _>(StandardNormal));
    WedgeSemigroupElement::new(
        alg.g0_from_block(&a).exp(),
        alg.g1_from_block(&psd(n, rng, 0.8)),
        alg.gm1_from_block(&psd(n, rng, 0.8)),
    )
}

#[test]
fn products_refactor_into_the_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for kind in [LieKind::Sl2, LieKind::Sp4] {
        let alg = GradedLieAlgebra::build(kind);
        for _ in 0..20 {
            let s1 = random_element(&alg, &mut rng);
            let s2 = random_element(&alg, &mut rng);
            let chk = check_polar(&alg, &(&s1.product * &s2.product)).unwrap();
            assert!(chk.member, "{kind:?} {chk:?}");
            assert!(chk.residual < 1e-8);
        }
    }
}

#[test]
fn negative_cone_part_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for kind in [LieKind::Sl2, LieKind::Sp4] {
        let alg = GradedLieAlgebra::build(kind);
        let n = alg.n;
        let s = WedgeSemigroupElement::new(
            RMat::identity(2 * n, 2 * n),
            alg.g1_from_block(&(-psd(n, &mut rng, 1.0) - RMat::identity(n, n) * 0.2)),
            RMat::zeros(2 * n, 2 * n),
        );
        assert!(!semigroup_polar_check(&alg, &s).unwrap().member);
    }
}

#[test]
fn cone_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let alg = GradedLieAlgebra::build(LieKind::Sp4);
    for _ in 0..20 {
        let x = alg.g1_from_block(&psd(2, &mut rng, 1.0)) - alg.gm1_from_block(&psd(2, &mut rng, 1.0));
        assert!(alg.in_cone(&x, 1e-12));
        let y = alg.from_coords(&(0..10).map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>());
        let g = y.exp();
        let ad = &g * &x * g.clone().try_inverse().unwrap();
        assert!(alg.in_algebra(&ad) < 1e-10);
        assert!(alg.in_cone(&ad, 1e-10));
    }
}

#[test]
fn strip_certificates_on_interior_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for kind in [LieKind::Sl2, LieKind::Sp4] {
        let alg = GradedLieAlgebra::build(kind);
        let n = alg.n;
        for _ in 0..20 {
            let b = psd(n, &mut rng, 1.0) + RMat::identity(n, n) * 0.1;
            let c = psd(n, &mut rng, 1.0) + RMat::identity(n, n) * 0.1;
            let pf = PolarForm {
                g: alg.g0_from_block(&RMat::from_fn(n, n, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal))).exp(),
                y1: alg.g1_from_block(&b),
                ym1: alg.gm1_from_block(&c),
                residual: 0.0,
            };
            let z = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..3.09));
            let v = strip_map(&alg, &pf, z).unwrap();
            assert_eq!(v.certificate, Certificate::Interior);
            let (a, bb) = (z.re, z.im);
            let expect = (&pf.y1 * a.exp() - &pf.ym1 * (-a).exp()) * bb.sin();
            assert!((v.imaginary_part - expect).norm() < 1e-12);
        }
    }
}

#[test]
fn two_pi_rotation_is_identity() {
    for kind in [LieKind::Sl2, LieKind::Sp4] {
        let alg = GradedLieAlgebra::build(kind);
        let ad = alg.ad(&alg.h).map(|v| C::new(0.0, 2.0 * std::f64::consts::PI * v));
        let e = ad.exp();
        let id = tubelet::linalg::CMat::identity(alg.dim(), alg.dim());
        assert!((e - id).norm() < 1e-12);
    }
}
