use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubelet::halfplane::*;
use tubelet::linalg::{c, herm_eig, CVec};

fn upper_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<tubelet::linalg::C> {
    (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_words_preserve_norms(s in 0.3f64..3.0, len in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = KernelFrame::new(s, upper_points(&mut rng, 6)).unwrap();
        let coeffs = CVec::from_fn(6, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let u = frame.vector(coeffs).unwrap();
        let g = Sl2Word::random(len, &mut rng);
        prop_assert!(gram_invariance(&g, &frame, &u).unwrap() < 1e-9);
    }

    #[test]
    fn word_action_is_the_matrix_product(len in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Sl2Word::random(len, &mut rng);
        let [[a, b], [cc, d]] = g.matrix();
        prop_assert!((a * d - b * cc - 1.0).abs() < 1e-10 * (1.0 + a.abs() * d.abs() + b.abs() * cc.abs()));
        for z in upper_points(&mut rng, 4) {
            let direct = (z * a + b) / (z * cc + d);
            let w = g.apply(z).unwrap();
            prop_assert!((w - direct).norm() < 1e-10 * (1.0 + w.norm()));
            prop_assert!(w.im > 0.0);
        }
    }

    #[test]
    fn kernel_gram_is_positive_definite(s in 0.2f64..4.0, n in 2usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = KernelFrame::new(s, upper_points(&mut rng, n)).unwrap();
        let (vals, _) = herm_eig(frame.gram());
        prop_assert!(vals[0] > -GRAM_PSD_TOL * vals[vals.len() - 1]);
    }
}
