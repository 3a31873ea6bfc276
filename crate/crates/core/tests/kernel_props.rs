use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tubelet::jordan::{random_positive, AlgebraDescriptor};
use tubelet::kernel_lab::*;
use tubelet::tube::random_tube_point;

#[test]
fn laplace_identity_rank_two_many_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for d in
        [AlgebraDescriptor::sym(2), AlgebraDescriptor::herm(2), AlgebraDescriptor::spin(3), AlgebraDescriptor::spin(5)]
    {
        for s in [d.dim() as f64 / 2.0 - 0.5, 2.0, 3.3] {
            let m = RieszMeasure::new(d, s).unwrap();
            for _ in 0..10 {
                let x = random_positive(d, &mut rng, 0.3);
                let r = riesz_laplace_check(&m, &x).unwrap();
                assert!(r.relerr < 1e-4, "{d:?} s={s} {r:?}");
            }
        }
    }
}

#[test]
fn wallach_psd_and_witness_timing() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in
        [AlgebraDescriptor::sym(2), AlgebraDescriptor::sym(3), AlgebraDescriptor::herm(2), AlgebraDescriptor::spin(4)]
    {
        let t = Instant::now();
        let top = (d.rank() - 1) as f64 * d.peirce_d() as f64 / 2.0;
        let mut svals: Vec<f64> = (0..d.rank()).map(|j| j as f64 * d.peirce_d() as f64 / 2.0).collect();
        svals.extend([top + 0.1, top + 1.0, top + 2.7]);
        for _ in 0..20 {
            let pts: Vec<_> = (0..12).map(|_| random_tube_point(d, &mut rng)).collect();
            for r in gram_scan(&pts, &svals).unwrap() {
                assert_eq!(r.verdict, Verdict::Psd, "{} s={} min={} norm={}", r.algebra, r.s, r.min_eig, r.norm);
            }
        }
        println!("{} psd {:?}", d.name(), t.elapsed());
        for s in [0.1, 0.25, 0.4, 0.5, 0.75] {
            if (WallachParams { desc: d, s }).classification() != WallachClass::Gap {
                continue;
            }
            let t = Instant::now();
            let w = search_gap_witness(d, s, SearchConfig::default(), &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
            println!("{} s={} ratio={:.3e} configs={} {:?}", d.name(), s, w.ratio, w.configurations, t.elapsed());
        }
    }
}
