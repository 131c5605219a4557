//! Dual pruning for a single sampling layer: the farthest-first kernel runs
//! on a reduced candidate set for a reduced number of iterations, and the
//! remaining budget is filled cheaply from the rest of the cloud.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fps::{run_sorted, OrderedSample, SamplerStats, DEFAULT_CHUNK};
use crate::geometry::PointCloud;
use crate::scalar::Scalar;

/// How the budget left over after iteration pruning is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMode {
    /// Ascending original index over the points not yet selected.
    #[default]
    DeterministicSlice,
    /// Uniform draw without replacement, seeded by `PruneConfig::rng_seed`.
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruneConfig {
    /// Pruning ratio in `[0, 1)`; `0` is plain FPS.
    pub p: f64,
    pub fill_mode: FillMode,
    pub rng_seed: u64,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            p: 0.0,
            fill_mode: FillMode::DeterministicSlice,
            rng_seed: 0,
        }
    }
}

/// Kernel budget and candidate count derived from a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrunePlan {
    /// Farthest-first iterations, `max(1, floor((1-p) m1))`.
    pub kernel_budget: usize,
    /// Leading candidates kept, `max(k, floor((1-p) n))`.
    pub candidates: usize,
}

impl PruneConfig {
    pub fn with_ratio(p: f64) -> Self {
        PruneConfig {
            p,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(Error::InvalidPruneRatio(self.p));
        }
        Ok(())
    }

    pub fn plan(&self, n: usize, m1: usize) -> Result<PrunePlan> {
        self.validate()?;
        if m1 < 1 || m1 > n {
            return Err(Error::BudgetOutOfRange { m: m1, n });
        }
        let keep = 1.0 - self.p;
        let kernel_budget = ((keep * m1 as f64).floor() as usize).max(1);
        let candidates = ((keep * n as f64).floor() as usize).max(kernel_budget);
        Ok(PrunePlan {
            kernel_budget,
            candidates,
        })
    }
}

/// Candidate pruning: the retained candidates are the leading original
/// indices `0..c`. Point clouds carry no meaningful order, so a prefix slice
/// is a uniform subsample of the underlying shape.
pub fn candidate_prune<T: Scalar>(
    cloud: &PointCloud<T>,
    p: f64,
    m1: usize,
) -> Result<Range<usize>> {
    let plan = PruneConfig::with_ratio(p).plan(cloud.len(), m1)?;
    if plan.candidates < 1 {
        return Err(Error::PruneLeavesNothing);
    }
    Ok(0..plan.candidates)
}

/// Single-layer pruned sampling. The first `fill_boundary` entries are the
/// exact FPS order of the candidate slice truncated to `k` steps; the rest
/// are fill.
pub fn fps_prune<T: Scalar>(
    cloud: &PointCloud<T>,
    m1: usize,
    cfg: &PruneConfig,
    seed_index: usize,
) -> Result<(OrderedSample<T>, SamplerStats)> {
    let n = cloud.len();
    let plan = cfg.plan(n, m1)?;
    if seed_index >= n {
        return Err(Error::SeedOutOfRange { seed: seed_index, n });
    }
    let candidates = candidate_prune(cloud, cfg.p, m1)?;
    if !candidates.contains(&seed_index) {
        return Err(Error::SeedNotInCandidates {
            seed: seed_index,
            candidates: candidates.len(),
        });
    }

    let (mut sample, stats) = run_sorted(
        &cloud.points()[candidates],
        plan.kernel_budget,
        seed_index,
        DEFAULT_CHUNK,
    );
    let fill = fill_indices(n, &sample.indices, m1 - plan.kernel_budget, cfg);
    sample.selection_dist2.resize(m1, T::zero());
    sample.indices.extend(fill);
    sample.fill_boundary = plan.kernel_budget;
    Ok((sample, stats))
}

/// Picks `count` indices from `0..n` excluding `taken`.
pub(crate) fn fill_indices(n: usize, taken: &[usize], count: usize, cfg: &PruneConfig) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    let mut excluded = vec![false; n];
    for &i in taken {
        excluded[i] = true;
    }
    let rest = (0..n).filter(|&i| !excluded[i]);
    match cfg.fill_mode {
        FillMode::DeterministicSlice => rest.take(count).collect(),
        FillMode::SeededRandom => {
            let pool: Vec<usize> = rest.collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rand::seq::index::sample(&mut rng, pool.len(), count)
                .into_iter()
                .map(|j| pool[j])
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::fps;
    use crate::geometry::cloud_from_triples;
    use proptest::prelude::*;

    fn line(n: usize) -> PointCloud<f64> {
        let raw: Vec<[f64; 3]> = (0..n).map(|i| [i as f64, 0.0, 0.0]).collect();
        cloud_from_triples(&raw).unwrap()
    }

    fn lcg_cloud(n: usize, state: u64) -> PointCloud<f64> {
        let mut s = state;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let raw: Vec<[f64; 3]> = (0..n).map(|_| [next(), next(), next()]).collect();
        cloud_from_triples(&raw).unwrap()
    }

    #[test]
    fn candidate_slice_examples() {
        assert_eq!(candidate_prune(&line(100), 0.5, 10).unwrap(), 0..50);
        assert_eq!(candidate_prune(&line(100), 0.0, 10).unwrap(), 0..100);
        // floor(0.25 * 7) = 1, kernel budget 1
        assert_eq!(candidate_prune(&line(7), 0.75, 1).unwrap(), 0..1);
        // floor(0.5 * 1) = 0 clamps up to the kernel budget
        assert_eq!(candidate_prune(&line(1), 0.5, 1).unwrap(), 0..1);
    }

    #[test]
    fn ratio_validation() {
        assert!(matches!(
            candidate_prune(&line(4), 1.0, 1),
            Err(Error::InvalidPruneRatio(_))
        ));
        assert!(matches!(
            candidate_prune(&line(4), -0.1, 1),
            Err(Error::InvalidPruneRatio(_))
        ));
    }

    #[test]
    fn zero_ratio_is_plain_fps() {
        let cloud = lcg_cloud(300, 9);
        let (a, sa) = fps(&cloud, 40, 0).unwrap();
        let (b, sb) = fps_prune(&cloud, 40, &PruneConfig::default(), 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn collinear_trace() {
        let cloud = cloud_from_triples(&[0.0, 1.0, 2.0, 3.0, 10.0].map(|x| [x, 0.0, 0.0])).unwrap();
        let (s, stats) = fps_prune(&cloud, 4, &PruneConfig::with_ratio(0.5), 0).unwrap();
        assert_eq!(s.indices, vec![0, 1, 2, 3]);
        assert_eq!(s.fill_boundary, 2);
        assert_eq!(s.selection_dist2[2..], [0.0, 0.0]);
        assert_eq!(stats.candidates, 2);
        assert_eq!(stats.iterations, 2);
    }

    #[test]
    fn counter_formula() {
        let cloud = lcg_cloud(200, 3);
        let (s, stats) = fps_prune(&cloud, 50, &PruneConfig::with_ratio(0.75), 0).unwrap();
        assert_eq!(stats.candidates, 50);
        assert_eq!(stats.iterations, 12);
        assert_eq!(stats.distance_evals, 50 * 11);
        assert_eq!(s.len(), 50);
    }

    #[test]
    fn seed_must_survive_pruning() {
        let cloud = line(10);
        assert!(matches!(
            fps_prune(&cloud, 4, &PruneConfig::with_ratio(0.5), 7),
            Err(Error::SeedNotInCandidates { seed: 7, candidates: 5 })
        ));
        assert!(matches!(
            fps_prune(&cloud, 4, &PruneConfig::with_ratio(0.5), 70),
            Err(Error::SeedOutOfRange { .. })
        ));
    }

    #[test]
    fn seeded_random_fill_is_reproducible() {
        let cloud = lcg_cloud(500, 5);
        let cfg = PruneConfig {
            p: 0.5,
            fill_mode: FillMode::SeededRandom,
            rng_seed: 42,
        };
        let (a, _) = fps_prune(&cloud, 100, &cfg, 0).unwrap();
        let (b, _) = fps_prune(&cloud, 100, &cfg, 0).unwrap();
        assert_eq!(a, b);
        let (c, _) = fps_prune(&cloud, 100, &PruneConfig { rng_seed: 43, ..cfg }, 0).unwrap();
        assert_eq!(a.fps_indices(), c.fps_indices());
        assert_ne!(a.indices, c.indices);
    }

    proptest! {
        #[test]
        fn budget_exact_and_prefix_pure(
            n in 1usize..300,
            m_frac in 0.0..1.0f64,
            p in 0.0..0.95f64,
            random_fill in any::<bool>(),
            rng_seed in any::<u64>(),
            state in any::<u64>(),
        ) {
            let cloud = lcg_cloud(n, state);
            let m1 = 1 + ((n - 1) as f64 * m_frac) as usize;
            let cfg = PruneConfig {
                p,
                fill_mode: if random_fill { FillMode::SeededRandom } else { FillMode::DeterministicSlice },
                rng_seed,
            };
            let plan = cfg.plan(n, m1).unwrap();
            prop_assert!(plan.kernel_budget >= 1 && plan.kernel_budget <= plan.candidates);
            prop_assert!(plan.candidates <= n);

            let (s, stats) = fps_prune(&cloud, m1, &cfg, 0).unwrap();
            prop_assert_eq!(s.len(), m1);
            let mut uniq = s.indices.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), m1);
            prop_assert!(s.indices.iter().all(|&i| i < n));

            let restricted = cloud.select(&(0..plan.candidates).collect::<Vec<_>>()).unwrap();
            let (reference, _) = fps(&restricted, plan.kernel_budget, 0).unwrap();
            prop_assert_eq!(s.fps_indices(), &reference.indices[..]);
            prop_assert_eq!(stats.distance_evals, (plan.candidates * (plan.kernel_budget - 1)) as u64);
        }
    }
}
