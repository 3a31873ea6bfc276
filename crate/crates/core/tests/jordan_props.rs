use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubelet::jordan::*;
use tubelet::linalg::{cr, spectral_norm};

fn descriptor() -> impl Strategy<Value = AlgebraDescriptor> {
    prop_oneof![
        (1usize..=4).prop_map(AlgebraDescriptor::sym),
        (1usize..=4).prop_map(AlgebraDescriptor::herm),
        (3usize..=6).prop_map(AlgebraDescriptor::spin),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_identity(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_celem(d, &mut rng), random_celem(d, &mut rng));
        let x2 = x.square();
        let lhs = x.product(&y).unwrap().product(&x2).unwrap();
        let rhs = x.product(&y.product(&x2).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-9 * x.norm().powi(3) * y.norm());
    }

    #[test]
    fn fundamental_identity(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_celem(d, &mut rng), random_celem(d, &mut rng));
        let py = y.quad_rep();
        let lhs = py.apply(&x).quad_rep();
        let rhs = py.compose(&x.quad_rep()).compose(&py);
        prop_assert!(spectral_norm(&(&lhs.mat - &rhs.mat)) <= 1e-9 * spectral_norm(&rhs.mat).max(1.0));
    }

    #[test]
    fn determinant_of_quadratic_image(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_celem(d, &mut rng), random_celem(d, &mut rng));
        let lhs = y.quad_rep().apply(&x).det();
        let rhs = y.det() * y.det() * x.det();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn inverse_is_a_jordan_inverse(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_celem(d, &mut rng);
        prop_assume!(x.det().norm() > 1e-3 * x.norm().powi(d.rank() as i32));
        let xi = x.inverse().unwrap();
        let e = d.unit();
        prop_assert!(x.product(&xi).unwrap().sub(&e).norm() < 1e-8);
        let x2 = x.square();
        prop_assert!(x2.product(&xi).unwrap().sub(&x).norm() < 1e-8 * x.norm());
    }

    #[test]
    fn trace_form_is_associative(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_celem(d, &mut rng), random_celem(d, &mut rng), random_celem(d, &mut rng));
        let a = x.product(&y).unwrap().product(&z).unwrap().trace();
        let b = x.product(&y.product(&z).unwrap()).unwrap().trace();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + x.norm() * y.norm() * z.norm()));
    }

    #[test]
    fn spectral_decomposition_reconstructs(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_elem(d, &mut rng);
        let sd = spectral_decomp(&x);
        let mut sum = JordanElem::zero(d);
        let mut unit = JordanElem::zero(d);
        for (lam, c) in &sd.pairs {
            let c2 = c.product(c).unwrap();
            prop_assert!(c2.add(&c.scale(-1.0)).norm() < 1e-10);
            sum = sum.add(&c.scale(*lam));
            unit = unit.add(c);
        }
        prop_assert!(sum.add(&x.scale(-1.0)).norm() < 1e-10 * (1.0 + x.norm()));
        prop_assert!(unit.add(&d.real_unit().scale(-1.0)).norm() < 1e-10);
        let det: f64 = sd.eigenvalues.iter().product();
        prop_assert!((det - x.det()).abs() < 1e-9 * (1.0 + det.abs()));
    }

    #[test]
    fn positive_cone_is_closed_under_quadratic_maps(d in descriptor(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_positive(d, &mut rng, 0.3);
        let y = random_elem(d, &mut rng);
        prop_assume!(y.det().abs() > 1e-3);
        let img = y.complexify().quad_rep().apply(&x.complexify());
        prop_assert!(img.im().norm() < 1e-12 * (1.0 + img.norm()));
        prop_assert!(in_positive_cone(&img.re(), true));
        prop_assert!((img.det() - cr(y.det().powi(2) * x.det())).norm() < 1e-9 * (1.0 + img.det().norm()));
    }
}
