//! Farthest point sampling with candidate pruning, iteration pruning and
//! cross-layer prefix reuse.
//!
//! Every sampler is generic over the coordinate type (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the CLI and file formats use.

pub mod cache;
pub mod error;
pub mod fps;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod prune;
pub mod scalar;
pub mod verify;

pub use cache::{
    bytes_per_entry, cache_footprint, hierarchical_sample, prefix_reuse, verify_prefix_property,
    CacheRecord, HierarchicalOutput, LayerBudgets, PrefixCheck,
};
pub use error::{Error, Result};
pub use fps::{fps, fps_on_subset, fps_oracle, OrderedSample, SamplerStats};
pub use geometry::{cloud_from_triples, squared_distance, validate_cloud, Point3, PointCloud};
pub use io::{generate, GeneratorKind, GeneratorSpec};
pub use metrics::{
    coverage_radius, histogram_l1, late_replacement_study, radial_density_histogram,
    sample_overlap, Histogram, LateReplacementRow,
};
pub use prune::{candidate_prune, fps_prune, FillMode, PruneConfig, PrunePlan};
pub use scalar::Scalar;

pub type Point = Point3<f64>;
pub type Cloud = PointCloud<f64>;
pub type Sample = OrderedSample<f64>;
pub type Cache = CacheRecord<f64>;
pub type Hist = Histogram<f64>;
