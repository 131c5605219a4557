//! Cross-layer reuse. With a fixed seed, metric and tie-break, FPS run on its
//! own earlier output reproduces that output's prefix, so every deeper layer
//! of a hierarchical sampler can be served as a prefix of the first layer.

use std::fmt::Write as _;
use std::mem::size_of;

use crate::error::{Error, Result};
use crate::fps::{fps, fps_keyed, OrderedSample, SamplerStats};
use crate::geometry::{Point3, PointCloud};
use crate::prune::{fps_prune, PruneConfig};
use crate::scalar::Scalar;

const MAGIC: &[u8; 4] = b"FPSC";
const FORMAT_VERSION: u32 = 1;
const HEADER_BYTES: usize = 16;
/// On-disk distance value of fill entries.
const FILL_MARK: f64 = -1.0;

/// Non-increasing per-layer sample budgets, first layer first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerBudgets(Vec<usize>);

impl LayerBudgets {
    pub fn new(budgets: Vec<usize>) -> Result<Self> {
        if budgets.is_empty() {
            return Err(Error::EmptyBudgets);
        }
        if budgets[budgets.len() - 1] < 1 || budgets.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::BudgetsNotMonotone(budgets));
        }
        Ok(LayerBudgets(budgets))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }
}

/// Bytes per cached entry: a 4-byte index, three coordinates and the
/// selection distance.
pub const fn bytes_per_entry<T>() -> usize {
    4 + 4 * size_of::<T>()
}

/// Cache footprint in bytes for a first layer of `m1` points (`f64` layout,
/// 36 bytes per entry).
pub fn cache_footprint(m1: usize) -> u64 {
    (m1 * bytes_per_entry::<f64>()) as u64
}

/// The cached first-layer output together with the coordinates it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheRecord<T> {
    pub layer1: OrderedSample<T>,
    pub points: Vec<Point3<T>>,
    pub source_cloud_size: usize,
    pub footprint_bytes: u64,
}

impl<T: Scalar> CacheRecord<T> {
    pub fn build(cloud: &PointCloud<T>, layer1: OrderedSample<T>) -> Self {
        let points = layer1.indices.iter().map(|&i| *cloud.point(i)).collect();
        let footprint_bytes = (layer1.len() * bytes_per_entry::<T>()) as u64;
        CacheRecord {
            layer1,
            points,
            source_cloud_size: cloud.len(),
            footprint_bytes,
        }
    }

    pub fn len(&self) -> usize {
        self.layer1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layer1.is_empty()
    }

    /// Little-endian binary form: a 16-byte header (magic, version, count,
    /// source size, each field 4 bytes) followed by one record per entry in
    /// sampling order. Fill entries store -1 in the distance slot.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.footprint_bytes as usize);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.source_cloud_size as u32).to_le_bytes());
        let fill = T::from_f64(FILL_MARK).expect("representable");
        for (k, (&index, p)) in self.layer1.indices.iter().zip(&self.points).enumerate() {
            out.extend_from_slice(&(index as u32).to_le_bytes());
            p.x.write_le(&mut out);
            p.y.write_le(&mut out);
            p.z.write_le(&mut out);
            let d = if k < self.layer1.fill_boundary {
                self.layer1.selection_dist2[k]
            } else {
                fill
            };
            d.write_le(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |msg: &str| Error::CorruptCache(msg.to_string());
        if bytes.len() < HEADER_BYTES {
            return Err(corrupt("truncated header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        if word(4) != FORMAT_VERSION {
            return Err(corrupt("unsupported version"));
        }
        let count = word(8) as usize;
        let source = word(12) as usize;
        let entry = bytes_per_entry::<T>();
        if bytes.len() != HEADER_BYTES + count * entry {
            return Err(corrupt("length does not match entry count"));
        }
        let mut indices = Vec::with_capacity(count);
        let mut dist2 = Vec::with_capacity(count);
        let mut points = Vec::with_capacity(count);
        let mut fill_boundary = count;
        let w = T::BYTES;
        for (k, rec) in bytes[HEADER_BYTES..].chunks_exact(entry).enumerate() {
            let index = u32::from_le_bytes(rec[..4].try_into().unwrap()) as usize;
            if index >= source {
                return Err(corrupt("index outside source cloud"));
            }
            let x = T::read_le(&rec[4..]);
            let y = T::read_le(&rec[4 + w..]);
            let z = T::read_le(&rec[4 + 2 * w..]);
            let d = T::read_le(&rec[4 + 3 * w..]);
            indices.push(index);
            points.push(Point3::new(x, y, z));
            if d < T::zero() {
                fill_boundary = fill_boundary.min(k);
                dist2.push(T::zero());
            } else {
                if k > fill_boundary {
                    return Err(corrupt("selection entry after fill"));
                }
                dist2.push(d);
            }
        }
        Ok(CacheRecord {
            layer1: OrderedSample {
                indices,
                selection_dist2: dist2,
                fill_boundary,
            },
            points,
            source_cloud_size: source,
            footprint_bytes: (count * entry) as u64,
        })
    }

    /// Human-readable dump, one entry per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# fps cache v{FORMAT_VERSION} count={} source_n={} fill_boundary={} footprint_bytes={}",
            self.len(),
            self.source_cloud_size,
            self.layer1.fill_boundary,
            self.footprint_bytes
        );
        let _ = writeln!(out, "# rank index x y z dist2 kind");
        for (k, (&index, p)) in self.layer1.indices.iter().zip(&self.points).enumerate() {
            let kind = if k < self.layer1.fill_boundary { "fps" } else { "fill" };
            let _ = writeln!(
                out,
                "{k} {index} {:.16e} {:.16e} {:.16e} {:.16e} {kind}",
                p.x, p.y, p.z, self.layer1.selection_dist2[k]
            );
        }
        out
    }
}

/// Length-`m` prefix of the cached first layer. No distances are computed.
pub fn prefix_reuse<T: Scalar>(cache: &CacheRecord<T>, m: usize) -> Result<OrderedSample<T>> {
    if m < 1 || m > cache.len() {
        return Err(Error::PrefixTooLong { m, len: cache.len() });
    }
    Ok(cache.layer1.prefix(m))
}

/// Per-layer outputs of [`hierarchical_sample`].
#[derive(Debug, Clone)]
pub struct HierarchicalOutput<T> {
    pub layers: Vec<OrderedSample<T>>,
    pub layer_stats: Vec<SamplerStats>,
    /// Sum over all layers.
    pub stats: SamplerStats,
    pub cache: Option<CacheRecord<T>>,
}

/// Samples `budgets.len()` nested layers. Layer 1 is a pruned FPS over the
/// whole cloud. With the cache on, deeper layers are prefixes of layer 1;
/// with it off each layer reruns FPS on the previous layer's points starting
/// from the same seed point.
pub fn hierarchical_sample<T: Scalar>(
    cloud: &PointCloud<T>,
    budgets: &LayerBudgets,
    cfg: &PruneConfig,
    seed_index: usize,
    cache_enabled: bool,
) -> Result<HierarchicalOutput<T>> {
    let m1 = budgets.first();
    if m1 > cloud.len() {
        return Err(Error::BudgetExceedsCloud { m1, n: cloud.len() });
    }
    let (first, first_stats) = fps_prune(cloud, m1, cfg, seed_index)?;
    let mut layer_stats = vec![first_stats];
    let mut layers = Vec::with_capacity(budgets.as_slice().len());
    let mut cache = None;

    if cache_enabled {
        let record = CacheRecord::build(cloud, first);
        layer_stats[0].cache_bytes = record.footprint_bytes;
        layers.push(record.layer1.clone());
        for &m in &budgets.as_slice()[1..] {
            layers.push(prefix_reuse(&record, m)?);
            layer_stats.push(SamplerStats::default());
        }
        cache = Some(record);
    } else {
        layers.push(first);
        for &m in &budgets.as_slice()[1..] {
            let prev = layers.last().expect("layer 1 present");
            let points: Vec<Point3<T>> = prev.indices.iter().map(|&i| *cloud.point(i)).collect();
            // the seed is always the first entry of every layer
            let (layer, stats) = fps_keyed(&points, &prev.indices, m, 0);
            layers.push(layer);
            layer_stats.push(stats);
        }
    }

    let mut stats = SamplerStats::default();
    for s in &layer_stats {
        stats.accumulate(s);
    }
    Ok(HierarchicalOutput {
        layers,
        layer_stats,
        stats,
        cache,
    })
}

/// Outcome of [`verify_prefix_property`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixCheck {
    pub holds: bool,
    /// First position where the restricted run departs from the prefix.
    pub first_divergence: Option<usize>,
    pub expected: Vec<usize>,
    pub actual: Vec<usize>,
}

/// Runs FPS for `m1` points, rebuilds a cloud from exactly those points (in
/// sampling order), reruns FPS for `m2` points on it from the same seed
/// point, and compares the result (mapped back to original indices) against
/// the length-`m2` prefix of the first run.
pub fn verify_prefix_property<T: Scalar>(
    cloud: &PointCloud<T>,
    m1: usize,
    m2: usize,
    seed_index: usize,
) -> Result<PrefixCheck> {
    let (first, _) = fps(cloud, m1, seed_index)?;
    if m2 < 1 || m2 > m1 {
        return Err(Error::BudgetOutOfRange { m: m2, n: m1 });
    }
    let restricted = cloud.select(&first.indices)?;
    let origin = &first.indices;
    let (second, _) = fps_keyed(restricted.points(), origin, m2, 0);
    let expected = first.indices[..m2].to_vec();
    let actual = second.indices;
    let first_divergence = expected.iter().zip(&actual).position(|(a, b)| a != b);
    Ok(PrefixCheck {
        holds: first_divergence.is_none(),
        first_divergence,
        expected,
        actual,
    })
}
