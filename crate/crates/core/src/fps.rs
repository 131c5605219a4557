//! Standard farthest point sampling: the incremental min-distance kernel and
//! a brute-force oracle that recomputes every max-min from scratch.
//!
//! Ties are always broken towards the lowest original index. Both the
//! sequential and the chunked parallel reductions order candidates by
//! `(greater distance, smaller index)`, which is a total order, so the winner
//! does not depend on how the reduction is associated.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{squared_distance, Point3, PointCloud};
use crate::scalar::Scalar;

/// Candidates per parallel work unit.
pub(crate) const DEFAULT_CHUNK: usize = 4096;

/// Ordered output of a sampler.
///
/// `selection_dist2[k]` is the squared distance from the `k`-th selected point
/// to the prefix before it; the seed carries `+inf`. Entries at and after
/// `fill_boundary` were not chosen farthest-first and carry `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample<T> {
    pub indices: Vec<usize>,
    pub selection_dist2: Vec<T>,
    pub fill_boundary: usize,
}

impl<T: Scalar> OrderedSample<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Indices produced by true farthest-first selection.
    pub fn fps_indices(&self) -> &[usize] {
        &self.indices[..self.fill_boundary]
    }

    /// Length-`m` prefix, `m <= len`.
    pub(crate) fn prefix(&self, m: usize) -> OrderedSample<T> {
        OrderedSample {
            indices: self.indices[..m].to_vec(),
            selection_dist2: self.selection_dist2[..m].to_vec(),
            fill_boundary: self.fill_boundary.min(m),
        }
    }
}

/// Work counters charged to a sampler run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SamplerStats {
    /// Squared-distance evaluations performed by the kernel.
    pub distance_evals: u64,
    /// Greedy selection steps, seed included.
    pub iterations: u64,
    /// Points participating in the kernel.
    pub candidates: u64,
    /// Bytes held by a layer cache, when one is built.
    pub cache_bytes: u64,
}

impl SamplerStats {
    pub(crate) fn accumulate(&mut self, other: &SamplerStats) {
        self.distance_evals += other.distance_evals;
        self.iterations += other.iterations;
        self.candidates += other.candidates;
        self.cache_bytes += other.cache_bytes;
    }
}

/// Runs FPS over the whole cloud, starting from `seed_index`.
pub fn fps<T: Scalar>(
    cloud: &PointCloud<T>,
    m: usize,
    seed_index: usize,
) -> Result<(OrderedSample<T>, SamplerStats)> {
    check_budget(cloud.len(), m, seed_index)?;
    Ok(run_sorted(cloud.points(), m, seed_index, DEFAULT_CHUNK))
}

/// Runs FPS restricted to `subset` (original indices, any order, no
/// duplicates). Ties are broken by original index, so restricting the
/// candidate set never changes how an existing tie resolves.
pub fn fps_on_subset<T: Scalar>(
    cloud: &PointCloud<T>,
    subset: &[usize],
    m: usize,
    seed_index: usize,
) -> Result<(OrderedSample<T>, SamplerStats)> {
    let n = cloud.len();
    if let Some(&index) = subset.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    let seed_pos = subset
        .iter()
        .position(|&i| i == seed_index)
        .ok_or(Error::SeedNotInCandidates {
            seed: seed_index,
            candidates: subset.len(),
        })?;
    check_budget(subset.len(), m, seed_pos)?;
    let points: Vec<Point3<T>> = subset.iter().map(|&i| *cloud.point(i)).collect();
    Ok(fps_keyed(&points, subset, m, seed_pos))
}

/// FPS over `points` where `keys[i]` is the tie-break key (original index)
/// of `points[i]`. Output indices are keys.
pub(crate) fn fps_keyed<T: Scalar>(
    points: &[Point3<T>],
    keys: &[usize],
    m: usize,
    seed_pos: usize,
) -> (OrderedSample<T>, SamplerStats) {
    debug_assert_eq!(points.len(), keys.len());
    if keys.windows(2).all(|w| w[0] < w[1]) {
        let (mut sample, stats) = run_sorted(points, m, seed_pos, DEFAULT_CHUNK);
        for idx in &mut sample.indices {
            *idx = keys[*idx];
        }
        return (sample, stats);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by_key(|&i| keys[i]);
    let sorted: Vec<Point3<T>> = order.iter().map(|&i| points[i]).collect();
    let sorted_seed = order
        .iter()
        .position(|&i| i == seed_pos)
        .expect("seed position present");
    let (mut sample, stats) = run_sorted(&sorted, m, sorted_seed, DEFAULT_CHUNK);
    for idx in &mut sample.indices {
        *idx = keys[order[*idx]];
    }
    (sample, stats)
}

fn check_budget(n: usize, m: usize, seed: usize) -> Result<()> {
    if m < 1 || m > n {
        return Err(Error::BudgetOutOfRange { m, n });
    }
    if seed >= n {
        return Err(Error::SeedOutOfRange { seed, n });
    }
    Ok(())
}

/// Core kernel over points whose slice order is the tie-break order. Returns
/// positions into `points`.
pub(crate) fn run_sorted<T: Scalar>(
    points: &[Point3<T>],
    m: usize,
    seed_pos: usize,
    chunk: usize,
) -> (OrderedSample<T>, SamplerStats) {
    let n = points.len();
    let xs: Vec<T> = points.iter().map(|p| p.x).collect();
    let ys: Vec<T> = points.iter().map(|p| p.y).collect();
    let zs: Vec<T> = points.iter().map(|p| p.z).collect();

    // Running min squared distance to the selected set. Selected points hold
    // -1 so they can never win the argmax again.
    let selected_mark = -T::one();
    let mut min_d2 = vec![T::infinity(); n];
    min_d2[seed_pos] = selected_mark;

    let mut indices = Vec::with_capacity(m);
    let mut dist2 = Vec::with_capacity(m);
    indices.push(seed_pos);
    dist2.push(T::infinity());

    let parallel = rayon::current_num_threads() > 1 && n >= 2 * chunk;
    let mut last = seed_pos;
    let mut evals: u64 = 0;
    for _ in 1..m {
        let anchor = (xs[last], ys[last], zs[last]);
        let (best_d, best_pos) = if parallel {
            min_d2
                .par_chunks_mut(chunk)
                .enumerate()
                .map(|(c, block)| {
                    let start = c * chunk;
                    let end = start + block.len();
                    update_and_argmax(
                        &xs[start..end],
                        &ys[start..end],
                        &zs[start..end],
                        block,
                        anchor,
                        start,
                    )
                })
                .reduce_with(pick_farther)
                .expect("non-empty cloud")
        } else {
            update_and_argmax(&xs, &ys, &zs, &mut min_d2, anchor, 0)
        };
        evals += n as u64;
        min_d2[best_pos] = selected_mark;
        indices.push(best_pos);
        dist2.push(best_d);
        last = best_pos;
    }

    let stats = SamplerStats {
        distance_evals: evals,
        iterations: m as u64,
        candidates: n as u64,
        cache_bytes: 0,
    };
    (
        OrderedSample {
            indices,
            selection_dist2: dist2,
            fill_boundary: m,
        },
        stats,
    )
}

const LANES: usize = 8;

/// Folds `anchor` into the running minima and returns the farthest entry
/// `(min_d2, position)`; the earliest position wins ties.
///
/// Maxima are tracked per lane (with the first block that reached them) so
/// the loop vectorizes. Within a lane a strict comparison keeps the earliest
/// block, and the final merge takes the smallest position among lanes
/// holding the maximum.
#[inline]
fn update_and_argmax<T: Scalar>(
    xs: &[T],
    ys: &[T],
    zs: &[T],
    min_d2: &mut [T],
    anchor: (T, T, T),
    offset: usize,
) -> (T, usize) {
    let (ax, ay, az) = anchor;
    let n = min_d2.len();
    let mut lane_max = [T::neg_infinity(); LANES];
    let mut lane_block = [0usize; LANES];
    let body = n - n % LANES;

    let blocks = xs[..body]
        .chunks_exact(LANES)
        .zip(ys[..body].chunks_exact(LANES))
        .zip(zs[..body].chunks_exact(LANES))
        .zip(min_d2[..body].chunks_exact_mut(LANES));
    for (b, (((bx, by), bz), bd)) in blocks.enumerate() {
        for j in 0..LANES {
            let dx = bx[j] - ax;
            let dy = by[j] - ay;
            let dz = bz[j] - az;
            let cand = dx * dx + dy * dy + dz * dz;
            let cur = if cand < bd[j] { cand } else { bd[j] };
            bd[j] = cur;
            let better = cur > lane_max[j];
            lane_max[j] = if better { cur } else { lane_max[j] };
            lane_block[j] = if better { b } else { lane_block[j] };
        }
    }

    let mut best = (T::neg_infinity(), usize::MAX);
    for j in 0..LANES {
        best = pick_farther(best, (lane_max[j], lane_block[j] * LANES + j));
    }
    for i in body..n {
        let dx = xs[i] - ax;
        let dy = ys[i] - ay;
        let dz = zs[i] - az;
        let cand = dx * dx + dy * dy + dz * dz;
        let cur = if cand < min_d2[i] { cand } else { min_d2[i] };
        min_d2[i] = cur;
        if cur > best.0 {
            best = (cur, i);
        }
    }
    (best.0, best.1 + offset)
}

#[inline]
fn pick_farther<T: Scalar>(a: (T, usize), b: (T, usize)) -> (T, usize) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
        a
    } else {
        b
    }
}

/// Literal max-min selection: at every step the distance of each unselected
/// point to the whole prefix is recomputed. O(N * M^2); reference only.
pub fn fps_oracle<T: Scalar>(
    cloud: &PointCloud<T>,
    m: usize,
    seed_index: usize,
) -> Result<OrderedSample<T>> {
    check_budget(cloud.len(), m, seed_index)?;
    let points = cloud.points();
    let mut selected = vec![false; points.len()];
    selected[seed_index] = true;
    let mut indices = vec![seed_index];
    let mut dist2 = vec![T::infinity()];
    while indices.len() < m {
        let mut best: Option<(T, usize)> = None;
        for (i, p) in points.iter().enumerate() {
            if selected[i] {
                continue;
            }
            let nearest = indices
                .iter()
                .map(|&s| squared_distance(p, &points[s]))
                .fold(T::infinity(), T::min);
            // ascending scan + strict comparison keeps the lowest index on ties
            if best.is_none_or(|(d, _)| nearest > d) {
                best = Some((nearest, i));
            }
        }
        let (d, i) = best.expect("unselected point remains");
        selected[i] = true;
        indices.push(i);
        dist2.push(d);
    }
    Ok(OrderedSample {
        indices,
        selection_dist2: dist2,
        fill_boundary: m,
    })
}
