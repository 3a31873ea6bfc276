use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubelet::linalg::{cr, spectral_norm, CVec};
use tubelet::modular::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_pair_invariants(m in 2usize..=6, spread in 0.1f64..1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ModularPair::random(m, spread, &mut rng);
        let r = p.residuals();
        prop_assert!(r.unitarity < PAIR_TOL && r.involution < PAIR_TOL && r.conjugation < PAIR_TOL);

        let v = standard_subspace_from_pair(&p).unwrap();
        prop_assert_eq!(v.dim(), m);
        let vp = symplectic_complement(&v);
        prop_assert!(symplectic_complement(&vp).max_angle(&v) < 1e-8);
        prop_assert!(im_pairing_norm(&v, &vp) < 1e-10);

        let dual = standard_subspace_from_pair(&p.inverse()).unwrap();
        prop_assert!(vp.max_angle(&dual) < 1e-8);
        prop_assert!(v.antilinear_image(p.unitary_part()).max_angle(&vp) < 1e-8);
        for t in [0.3, -1.1, 2.4] {
            prop_assert!(v.transformed(&p.delta_it(t)).max_angle(&v) < 1e-8);
        }

        let q = ModularPair::from_subspace(&v).unwrap();
        prop_assert!(spectral_norm(&(q.delta() - p.delta())) < 1e-8 * spectral_norm(p.delta()));
        prop_assert!(spectral_norm(&(q.unitary_part() - p.unitary_part())) < 1e-8);
    }

    #[test]
    fn tomita_operator_fixes_the_subspace(m in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ModularPair::random(m, 0.6, &mut rng);
        let v = standard_subspace_from_pair(&p).unwrap();
        let half = p.delta_power(0.5);
        for b in v.vectors() {
            let sb = p.j(&(&half * &b));
            prop_assert!((&sb - &b).norm() < 1e-9 * b.norm());
        }
        let x = v.vectors().iter().fold(CVec::zeros(m), |acc, b| acc + b * cr(0.7));
        prop_assert!(v.contains(&x, 1e-10));
        prop_assert!(!v.contains(&(x * tubelet::linalg::I), 1e-3));
    }
}
