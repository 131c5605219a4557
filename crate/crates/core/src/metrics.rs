//! Sampling quality measures: covering radius, radial density histograms
//! and the late-iteration replacement study.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fps::{fps, OrderedSample};
use crate::geometry::{squared_distance, PointCloud};
use crate::prune::{fill_indices, PruneConfig};
use crate::scalar::{from_count, Scalar};

pub const DEFAULT_BINS: usize = 64;

/// Normalized histogram over shared, strictly increasing bin edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    pub bin_edges: Vec<T>,
    pub densities: Vec<T>,
}

impl<T: Scalar> Histogram<T> {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }
}

/// Largest distance from any cloud point to its nearest sampled point.
pub fn coverage_radius<T: Scalar>(indices: &[usize], cloud: &PointCloud<T>) -> Result<T> {
    if indices.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let n = cloud.len();
    if let Some(&index) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    let points = cloud.points();
    let mut nearest = vec![T::infinity(); n];
    for &s in indices {
        let anchor = points[s];
        for (d, p) in nearest.iter_mut().zip(points) {
            let cand = squared_distance(p, &anchor);
            if cand < *d {
                *d = cand;
            }
        }
    }
    Ok(nearest.into_iter().fold(T::zero(), T::max).sqrt())
}

/// Histogram of distances to the centroid of the full cloud, over
/// `[0, max distance in the full cloud]`. `subset` selects which points are
/// counted (all of them when `None`), so histograms of different samples of
/// the same cloud share their edges.
pub fn radial_density_histogram<T: Scalar>(
    cloud: &PointCloud<T>,
    subset: Option<&[usize]>,
    bins: usize,
) -> Result<Histogram<T>> {
    if bins < 2 {
        return Err(Error::InvalidBins(bins));
    }
    let n = cloud.len();
    let counted = subset.map_or(n, <[usize]>::len);
    if n < 2 || counted < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: counted.min(n),
        });
    }
    let center = cloud.centroid();
    let radius: Vec<T> = cloud
        .points()
        .iter()
        .map(|p| squared_distance(p, &center).sqrt())
        .collect();
    let max = radius.iter().copied().fold(T::zero(), T::max);
    if max <= T::zero() {
        return Err(Error::DegenerateRange);
    }
    let nb = from_count::<T>(bins);
    let bin_edges: Vec<T> = (0..=bins).map(|i| max * from_count::<T>(i) / nb).collect();
    let mut counts = vec![0usize; bins];
    let mut tally = |r: T| {
        let slot = (r / max * nb).floor().to_usize().unwrap_or(0).min(bins - 1);
        counts[slot] += 1;
    };
    match subset {
        Some(idx) => {
            for &i in idx {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                tally(radius[i]);
            }
        }
        None => radius.iter().copied().for_each(tally),
    }
    let total = from_count::<T>(counted);
    let densities = counts.into_iter().map(|c| from_count::<T>(c) / total).collect();
    Ok(Histogram {
        bin_edges,
        densities,
    })
}

/// Sum of absolute density differences, in `[0, 2]`.
pub fn histogram_l1<T: Scalar>(a: &Histogram<T>, b: &Histogram<T>) -> Result<T> {
    if a.bin_edges != b.bin_edges {
        return Err(Error::BinMismatch);
    }
    Ok(a.densities
        .iter()
        .zip(&b.densities)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y).abs()))
}

/// `|a ∩ b| / max(|a|, |b|)` over index sets; 1 when both are empty.
pub fn sample_overlap(a: &[usize], b: &[usize]) -> f64 {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return 1.0;
    }
    let sa: HashSet<usize> = a.iter().copied().collect();
    let common = b.iter().collect::<HashSet<_>>().into_iter().filter(|i| sa.contains(i)).count();
    common as f64 / denom as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LateReplacementRow {
    pub p: f64,
    pub coverage_radius: f64,
    pub histogram_l1: f64,
}

/// Replaces the last `floor(p m)` selections of an FPS sample with
/// deterministic-slice fill and measures the effect on covering radius and
/// on the radial histogram relative to the unmodified sample.
pub fn late_replacement_study<T: Scalar>(
    cloud: &PointCloud<T>,
    m: usize,
    p_grid: &[f64],
    seed_index: usize,
    bins: usize,
) -> Result<Vec<LateReplacementRow>> {
    let (baseline, _) = fps(cloud, m, seed_index)?;
    let base_hist = radial_density_histogram(cloud, Some(&baseline.indices), bins)?;
    let slice = PruneConfig::default();
    p_grid
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPruneRatio(p));
            }
            let replaced = ((p * m as f64).floor() as usize).min(m);
            let kept = &baseline.indices[..m - replaced];
            let mut indices = kept.to_vec();
            indices.extend(fill_indices(cloud.len(), kept, replaced, &slice));
            let hist = radial_density_histogram(cloud, Some(&indices), bins)?;
            Ok(LateReplacementRow {
                p,
                coverage_radius: coverage_radius(&indices, cloud)?.to_f64().unwrap_or(f64::NAN),
                histogram_l1: histogram_l1(&base_hist, &hist)?.to_f64().unwrap_or(f64::NAN),
            })
        })
        .collect()
}

/// Covering radius of an [`OrderedSample`].
pub fn sample_coverage_radius<T: Scalar>(sample: &OrderedSample<T>, cloud: &PointCloud<T>) -> Result<T> {
    coverage_radius(&sample.indices, cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cloud_from_triples;
    use proptest::prelude::*;

    fn lcg_cloud(n: usize, state: u64) -> PointCloud<f64> {
        let mut s = state;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let raw: Vec<[f64; 3]> = (0..n).map(|_| [next(), next(), next()]).collect();
        cloud_from_triples(&raw).unwrap()
    }

    /// Brute-force Hausdorff-style covering radius with explicit sqrt.
    fn coverage_oracle(indices: &[usize], cloud: &PointCloud<f64>) -> f64 {
        cloud
            .points()
            .iter()
            .map(|p| {
                indices
                    .iter()
                    .map(|&s| {
                        let q = cloud.point(s);
                        ((p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn coverage_examples() {
        let cloud = lcg_cloud(50, 1);
        let all: Vec<usize> = (0..50).collect();
        assert_eq!(coverage_radius(&all, &cloud).unwrap(), 0.0);
        let line = cloud_from_triples(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]).unwrap();
        assert_eq!(coverage_radius(&[0], &line).unwrap(), 10.0);
        assert!(coverage_radius(&[], &line).is_err());
        let picks = [3, 17, 40];
        assert!((coverage_radius(&picks, &cloud).unwrap() - coverage_oracle(&picks, &cloud)).abs() < 1e-12);
    }

    #[test]
    fn coverage_matches_next_selection_distance() {
        let cloud = lcg_cloud(400, 7);
        let (s, _) = fps(&cloud, 60, 0).unwrap();
        for k in 1..60 {
            let r = coverage_radius(&s.indices[..k], &cloud).unwrap();
            assert_eq!(r, s.selection_dist2[k].sqrt(), "k={k}");
        }
    }

    #[test]
    fn histogram_basics() {
        // points on a sphere around the origin plus the antipodal pairs keep
        // the centroid at the origin
        let raw = [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let cloud = cloud_from_triples(&raw).unwrap();
        let h = radial_density_histogram(&cloud, None, 8).unwrap();
        assert_eq!(h.densities.iter().filter(|&&d| d > 0.0).count(), 1);
        assert_eq!(h.densities[7], 1.0);

        let same = cloud_from_triples(&[[2.0, 2.0, 2.0], [2.0, 2.0, 2.0]]).unwrap();
        assert!(matches!(radial_density_histogram(&same, None, 8), Err(Error::DegenerateRange)));
        assert!(matches!(radial_density_histogram(&cloud, None, 1), Err(Error::InvalidBins(1))));
        assert!(radial_density_histogram(&cloud, Some(&[0]), 4).is_err());

        let cube = lcg_cloud(1000, 4);
        let h = radial_density_histogram(&cube, None, DEFAULT_BINS).unwrap();
        assert!((h.densities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(h.bin_edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn l1_examples() {
        let edges = vec![0.0, 1.0, 2.0];
        let a = Histogram { bin_edges: edges.clone(), densities: vec![1.0, 0.0] };
        let b = Histogram { bin_edges: edges, densities: vec![0.0, 1.0] };
        assert_eq!(histogram_l1(&a, &a).unwrap(), 0.0);
        assert_eq!(histogram_l1(&a, &b).unwrap(), 2.0);
        let c = Histogram { bin_edges: vec![0.0, 1.0, 3.0], densities: vec![0.5, 0.5] };
        assert!(matches!(histogram_l1(&a, &c), Err(Error::BinMismatch)));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(sample_overlap(&[1, 2, 3], &[1, 2, 3]), 1.0);
        assert_eq!(sample_overlap(&[1, 2], &[3, 4]), 0.0);
        assert_eq!(sample_overlap(&[1, 2, 3, 4], &[2, 4]), 0.5);
    }

    #[test]
    fn late_replacement_zero_is_baseline() {
        let cloud = lcg_cloud(500, 12);
        let rows = late_replacement_study(&cloud, 100, &[0.0, 0.5, 1.0], 0, 32).unwrap();
        let (s, _) = fps(&cloud, 100, 0).unwrap();
        assert_eq!(rows[0].coverage_radius, coverage_radius(&s.indices, &cloud).unwrap());
        assert_eq!(rows[0].histogram_l1, 0.0);
        assert!(rows[2].coverage_radius >= rows[0].coverage_radius);
        assert!(late_replacement_study(&cloud, 100, &[1.5], 0, 32).is_err());
    }

    proptest! {
        #[test]
        fn coverage_shrinks_as_sample_grows(state in any::<u64>(), picks in prop::collection::vec(0usize..120, 1..30)) {
            let cloud = lcg_cloud(120, state);
            let mut prev = f64::INFINITY;
            for k in 1..=picks.len() {
                let r = coverage_radius(&picks[..k], &cloud).unwrap();
                prop_assert!(r <= prev);
                prev = r;
            }
        }

        #[test]
        fn l1_is_a_metric(
            a in prop::collection::vec(0u32..20, 6),
            b in prop::collection::vec(0u32..20, 6),
            c in prop::collection::vec(0u32..20, 6),
        ) {
            let edges: Vec<f64> = (0..=6).map(f64::from).collect();
            let norm = |v: &Vec<u32>| {
                let total = v.iter().sum::<u32>().max(1) as f64;
                Histogram { bin_edges: edges.clone(), densities: v.iter().map(|&x| x as f64 / total).collect() }
            };
            let (ha, hb, hc) = (norm(&a), norm(&b), norm(&c));
            let ab = histogram_l1(&ha, &hb).unwrap();
            prop_assert_eq!(ab, histogram_l1(&hb, &ha).unwrap());
            prop_assert!(ab <= histogram_l1(&ha, &hc).unwrap() + histogram_l1(&hc, &hb).unwrap() + 1e-12);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
        }
    }
}
