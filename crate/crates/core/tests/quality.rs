//! Statistical checks of sampling quality. Every cloud is generated from a
//! fixed seed, so these are deterministic.

use flashfps::metrics::DEFAULT_BINS;
use flashfps::{
    coverage_radius, fps, fps_prune, generate, histogram_l1, late_replacement_study,
    radial_density_histogram, sample_overlap, Cloud, GeneratorSpec, PruneConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

#[test]
fn fps_covers_better_than_random_sampling() {
    let (n, m) = (2000, 100);
    let mut fps_total = 0.0;
    let mut rand_total = 0.0;
    for trial in 0..100 {
        let cloud: Cloud = generate(&GeneratorSpec::uniform(n, 1000 + trial)).unwrap();
        let (s, _) = fps(&cloud, m, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let random = rand::seq::index::sample(&mut rng, n, m).into_vec();
        fps_total += coverage_radius(&s.indices, &cloud).unwrap();
        rand_total += coverage_radius(&random, &cloud).unwrap();
    }
    assert!(fps_total < rand_total, "fps {fps_total} random {rand_total}");
}

#[test]
fn late_replacement_degrades_coverage_monotonically() {
    let grid = [0.0, 0.25, 0.5, 0.75];
    let mut per_p = vec![Vec::new(); grid.len()];
    for trial in 0..50 {
        let cloud: Cloud = generate(&GeneratorSpec::uniform(1500, 200 + trial)).unwrap();
        let rows = late_replacement_study(&cloud, 150, &grid, 0, DEFAULT_BINS).unwrap();
        for (slot, row) in per_p.iter_mut().zip(rows) {
            slot.push(row.coverage_radius);
        }
    }
    let medians: Vec<f64> = per_p.into_iter().map(median).collect();
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
}

#[test]
fn fully_random_is_worse_on_clustered_clouds() {
    for trial in 0..20 {
        let cloud: Cloud = generate(&GeneratorSpec::clusters(2000, 6, 0.02, 300 + trial)).unwrap();
        let rows = late_replacement_study(&cloud, 100, &[0.0, 1.0], 0, DEFAULT_BINS).unwrap();
        assert!(rows[1].coverage_radius > rows[0].coverage_radius, "trial {trial}: {rows:?}");
    }
}

#[test]
fn alignment_identity() {
    // downstream ratio m1 / N equals 1 - p
    let n = 4000;
    let p = 0.75;
    let m1 = n / 4;
    let cloud: Cloud = generate(&GeneratorSpec::uniform(n, 9)).unwrap();
    let cfg = PruneConfig::with_ratio(p);
    let plan = cfg.plan(n, m1).unwrap();
    let (flash, _) = fps_prune(&cloud, m1, &cfg, 0).unwrap();

    let candidates: Vec<usize> = (0..plan.candidates).collect();
    let restricted = cloud.select(&candidates).unwrap();
    let (full_on_candidates, _) = fps(&restricted, m1, 0).unwrap();
    let prefix = &full_on_candidates.indices[..plan.kernel_budget];
    assert_eq!(sample_overlap(prefix, flash.fps_indices()), 1.0);
    assert_eq!(prefix, flash.fps_indices());
}

#[test]
fn flashfps_histogram_distance_is_small() {
    let n = 10_000;
    let cloud: Cloud = generate(&GeneratorSpec::uniform(n, 21)).unwrap();
    let (base, _) = fps(&cloud, n / 4, 0).unwrap();
    let (flash, _) = fps_prune(&cloud, n / 4, &PruneConfig::with_ratio(0.5), 0).unwrap();
    let a = radial_density_histogram(&cloud, Some(&base.indices), DEFAULT_BINS).unwrap();
    let b = radial_density_histogram(&cloud, Some(&flash.indices), DEFAULT_BINS).unwrap();
    let l1 = histogram_l1(&a, &b).unwrap();
    println!("radial histogram L1, FPS vs FlashFPS(p=0.5): {l1:.4}");
    assert!((0.0..=2.0).contains(&l1));
    assert!(l1 < 0.5);
}
