//! Text point-cloud formats and synthetic cloud generators.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{validate_cloud, Point3, PointCloud};
use crate::scalar::Scalar;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coord<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, format!("not a number: {tok:?}")))
}

/// Parses whitespace-separated `x y z [extra...]` lines. Blank lines and
/// lines starting with `#` are skipped; extra columns are kept verbatim as
/// attachments when any line has them.
pub fn parse_xyz<T: Scalar>(text: &str) -> Result<PointCloud<T>> {
    let mut points = Vec::new();
    let mut extras = Vec::new();
    let mut any_extra = false;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (coords, rest) = split_fields(trimmed, 3);
        if coords.len() < 3 {
            return Err(parse_err(line, "expected three coordinates"));
        }
        let (x, y, z) = (
            parse_coord(coords[0], line)?,
            parse_coord(coords[1], line)?,
            parse_coord(coords[2], line)?,
        );
        let rest = rest.to_string();
        any_extra |= !rest.is_empty();
        points.push(Point3::new(x, y, z));
        extras.push(rest);
    }
    let cloud = validate_cloud(points)?;
    if any_extra {
        cloud.with_attachments(extras)
    } else {
        Ok(cloud)
    }
}

/// Splits off up to `count` leading whitespace-separated tokens and returns
/// them with the untouched remainder.
fn split_fields(line: &str, count: usize) -> (Vec<&str>, &str) {
    let mut tokens = Vec::with_capacity(count);
    let mut rest = line.trim_start();
    while tokens.len() < count && !rest.is_empty() {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        tokens.push(&rest[..end]);
        rest = rest[end..].trim_start();
    }
    (tokens, rest.trim_end())
}

pub fn read_xyz<T: Scalar>(path: impl AsRef<Path>) -> Result<PointCloud<T>> {
    parse_xyz(&fs::read_to_string(path)?)
}

/// Formats one point per line with 17 significant digits, so the paired
/// reader recovers every `f64` bit for bit.
pub fn format_xyz<T: Scalar>(cloud: &PointCloud<T>) -> String {
    let mut out = String::with_capacity(cloud.len() * 72);
    for (i, p) in cloud.points().iter().enumerate() {
        let _ = write!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
        if let Some(extra) = cloud.attachments().map(|a| &a[i]) {
            if !extra.is_empty() {
                out.push(' ');
                out.push_str(extra);
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_xyz<T: Scalar>(cloud: &PointCloud<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_xyz(cloud))?;
    Ok(())
}

/// Newline-separated indices, one per line.
pub fn format_indices(indices: &[usize]) -> String {
    let mut out = String::with_capacity(indices.len() * 8);
    for i in indices {
        let _ = writeln!(out, "{i}");
    }
    out
}

pub fn write_indices(indices: &[usize], path: impl AsRef<Path>) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    fs::write(path, format_indices(indices))?;
    Ok(())
}

pub fn read_indices(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    fs::read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| {
            l.trim()
                .parse()
                .map_err(|_| parse_err(no + 1, format!("not an index: {l:?}")))
        })
        .collect()
}

/// Reads the vertex positions of an ASCII PLY file. Other properties and
/// other elements are skipped.
pub fn parse_ply_ascii<T: Scalar>(text: &str) -> Result<PointCloud<T>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(parse_err(1, "missing ply magic")),
    }

    struct Element {
        name: String,
        count: usize,
        props: Vec<String>,
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut format_seen = false;
    loop {
        let (no, raw) = lines
            .next()
            .ok_or_else(|| parse_err(0, "header not terminated by end_header"))?;
        let line = no + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", "1.0"] => format_seen = true,
            ["format", other, ..] => return Err(Error::UnsupportedFormat(format!("PLY {other}"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| parse_err(line, "bad element count"))?,
                props: Vec::new(),
            }),
            ["property", "list", _, _, name] | ["property", _, name] => elements
                .last_mut()
                .ok_or_else(|| parse_err(line, "property before element"))?
                .props
                .push(name.to_string()),
            _ => return Err(parse_err(line, format!("unrecognized header line {raw:?}"))),
        }
    }
    if !format_seen {
        return Err(parse_err(0, "missing format line"));
    }
    let vertex_pos = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| parse_err(0, "no vertex element"))?;
    let vertex = &elements[vertex_pos];
    let column = |axis: &str| {
        vertex
            .props
            .iter()
            .position(|p| p == axis)
            .ok_or_else(|| parse_err(0, format!("vertex has no {axis} property")))
    };
    let (cx, cy, cz) = (column("x")?, column("y")?, column("z")?);

    let mut body = lines.filter(|(_, l)| !l.trim().is_empty());
    for e in &elements[..vertex_pos] {
        for _ in 0..e.count {
            body.next().ok_or_else(|| parse_err(0, "truncated body"))?;
        }
    }
    let mut points = Vec::with_capacity(vertex.count);
    for _ in 0..vertex.count {
        let (no, raw) = body
            .next()
            .ok_or_else(|| parse_err(0, "fewer vertices than declared"))?;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let get = |c: usize| {
            toks.get(c)
                .ok_or_else(|| parse_err(no + 1, "missing vertex field"))
                .and_then(|t| parse_coord::<T>(t, no + 1))
        };
        points.push(Point3::new(get(cx)?, get(cy)?, get(cz)?));
    }
    validate_cloud(points)
}

pub fn read_ply_ascii<T: Scalar>(path: impl AsRef<Path>) -> Result<PointCloud<T>> {
    let bytes = fs::read(path)?;
    // binary bodies are not valid UTF-8 in general; check the header first
    let header_end = bytes
        .windows(10)
        .position(|w| w == b"end_header")
        .unwrap_or(bytes.len());
    let header = String::from_utf8_lossy(&bytes[..header_end]);
    if let Some(fmt) = header.lines().find(|l| l.starts_with("format")) {
        if !fmt.contains("ascii") {
            return Err(Error::UnsupportedFormat(fmt.trim().to_string()));
        }
    }
    let text = String::from_utf8(bytes).map_err(|_| parse_err(0, "body is not UTF-8 text"))?;
    parse_ply_ascii(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// i.i.d. uniform in `[0, side]^3`.
    UniformCube { side: f64 },
    /// `clusters` centers uniform in the unit cube, points normal around
    /// a uniformly chosen center.
    GaussianClusters { clusters: usize, sigma: f64 },
    /// Uniform on the unit sphere.
    SphereSurface,
    /// `x = 0, 1, ..., n-1` on the x axis.
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub rng_seed: u64,
}

impl GeneratorSpec {
    pub fn uniform(n: usize, rng_seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::UniformCube { side: 1.0 },
            n,
            rng_seed,
        }
    }

    pub fn clusters(n: usize, clusters: usize, sigma: f64, rng_seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::GaussianClusters { clusters, sigma },
            n,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidSpec("n must be >= 1".into()));
        }
        match self.kind {
            GeneratorKind::UniformCube { side } if !(side.is_finite() && side > 0.0) => {
                Err(Error::InvalidSpec(format!("side must be positive, got {side}")))
            }
            GeneratorKind::GaussianClusters { clusters, sigma } => {
                if clusters < 1 {
                    Err(Error::InvalidSpec("clusters must be >= 1".into()))
                } else if !(sigma.is_finite() && sigma > 0.0) {
                    Err(Error::InvalidSpec(format!("sigma must be positive, got {sigma}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Parses `kind,key=value,...`, e.g. `uniform,n=1000,seed=7`,
/// `clusters,n=5000,k=8,sigma=0.02,seed=1`, `sphere,n=100`, `collinear,n=5`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',').map(str::trim);
        let kind = parts.next().unwrap_or_default();
        let mut n = None;
        let mut seed = 0u64;
        let mut side = 1.0;
        let mut k = 8usize;
        let mut sigma = 0.02;
        for kv in parts {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {kv:?}")))?;
            let bad = || Error::InvalidSpec(format!("bad value for {key}: {value:?}"));
            match key {
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = value.parse().map_err(|_| bad())?,
                "side" => side = value.parse().map_err(|_| bad())?,
                "k" | "clusters" => k = value.parse().map_err(|_| bad())?,
                "sigma" => sigma = value.parse().map_err(|_| bad())?,
                _ => return Err(Error::InvalidSpec(format!("unknown key {key:?}"))),
            }
        }
        let kind = match kind {
            "uniform" | "uniform-cube" => GeneratorKind::UniformCube { side },
            "clusters" | "gaussian-clusters" => GeneratorKind::GaussianClusters { clusters: k, sigma },
            "sphere" | "sphere-surface" => GeneratorKind::SphereSurface,
            "collinear" => GeneratorKind::Collinear,
            other => return Err(Error::InvalidSpec(format!("unknown generator {other:?}"))),
        };
        let spec = GeneratorSpec {
            kind,
            n: n.ok_or_else(|| Error::InvalidSpec("missing n".into()))?,
            rng_seed: seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Deterministic synthetic cloud; a pure function of `spec`.
pub fn generate<T: Scalar>(spec: &GeneratorSpec) -> Result<PointCloud<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut raw: Vec<[f64; 3]> = Vec::with_capacity(spec.n);
    match spec.kind {
        GeneratorKind::UniformCube { side } => {
            for _ in 0..spec.n {
                raw.push([
                    rng.random::<f64>() * side,
                    rng.random::<f64>() * side,
                    rng.random::<f64>() * side,
                ]);
            }
        }
        GeneratorKind::GaussianClusters { clusters, sigma } => {
            let centers: Vec<[f64; 3]> = (0..clusters)
                .map(|_| [rng.random(), rng.random(), rng.random()])
                .collect();
            let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            for _ in 0..spec.n {
                let c = centers[rng.random_range(0..clusters)];
                raw.push([
                    c[0] + noise.sample(&mut rng),
                    c[1] + noise.sample(&mut rng),
                    c[2] + noise.sample(&mut rng),
                ]);
            }
        }
        GeneratorKind::SphereSurface => {
            for _ in 0..spec.n {
                loop {
                    let v: [f64; 3] = [
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    ];
                    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    if norm > 1e-12 {
                        raw.push([v[0] / norm, v[1] / norm, v[2] / norm]);
                        break;
                    }
                }
            }
        }
        GeneratorKind::Collinear => {
            raw.extend((0..spec.n).map(|i| [i as f64, 0.0, 0.0]));
        }
    }
    let points = raw
        .into_iter()
        .map(|[x, y, z]| {
            let conv = |v: f64| T::from_f64(v).expect("finite coordinate");
            Point3::new(conv(x), conv(y), conv(z))
        })
        .collect();
    validate_cloud(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_parse() {
        let c: PointCloud<f64> = parse_xyz("0 0 0\n1 0 0\n").unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.attachments().is_none());
        assert!(matches!(parse_xyz::<f64>("a b c\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_xyz::<f64>("0 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_xyz::<f64>("0 0 nan\n"), Err(Error::NonFiniteCoordinate { index: 0 })));
        assert!(matches!(parse_xyz::<f64>("0 0 inf\n"), Err(Error::NonFiniteCoordinate { index: 0 })));
        assert!(matches!(parse_xyz::<f64>("# only a comment\n"), Err(Error::EmptyCloud)));
    }

    #[test]
    fn xyz_keeps_extra_columns() {
        let c: PointCloud<f64> = parse_xyz("0 0 0 255 0 0\n1\t2  3 9\n4 5 6\n").unwrap();
        assert_eq!(c.attachments().unwrap(), &["255 0 0", "9", ""]);
        let again: PointCloud<f64> = parse_xyz(&format_xyz(&c)).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn indices_format() {
        assert_eq!(format_indices(&[0, 4, 3]), "0\n4\n3\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("idx.txt");
        write_indices(&[0, 4, 3], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "0\n4\n3\n");
        assert_eq!(read_indices(&path).unwrap(), vec![0, 4, 3]);
        assert!(write_indices(&[], &path).is_err());
    }

    #[test]
    fn ply_minimal_and_colored() {
        let minimal = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n1 2 3\n";
        let c: PointCloud<f64> = parse_ply_ascii(minimal).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1).z, 3.0);

        let colored = "ply\nformat ascii 1.0\ncomment colors first\nelement vertex 2\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nproperty double x\nproperty double y\nproperty double z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n255 0 0 0.5 0.25 1\n0 255 0 -1 -2 -3\n3 0 1 1\n";
        let c: PointCloud<f64> = parse_ply_ascii(colored).unwrap();
        assert_eq!(c.point(0).x, 0.5);
        assert_eq!(c.point(1).z, -3.0);
    }

    #[test]
    fn ply_binary_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.ply");
        let mut bytes = b"ply\nformat binary_little_endian 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xfe, 0x00, 0x80, 0, 0, 0, 0, 0, 0, 0, 0]);
        fs::write(&path, bytes).unwrap();
        assert!(matches!(read_ply_ascii::<f64>(&path), Err(Error::UnsupportedFormat(_))));
        let header = "ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n";
        assert!(matches!(parse_ply_ascii::<f64>(header), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn generator_spec_parsing() {
        let s: GeneratorSpec = "uniform,n=100,seed=3".parse().unwrap();
        assert_eq!(s, GeneratorSpec::uniform(100, 3));
        let s: GeneratorSpec = "clusters,n=50,k=4,sigma=0.1,seed=2".parse().unwrap();
        assert_eq!(s, GeneratorSpec::clusters(50, 4, 0.1, 2));
        assert!("uniform".parse::<GeneratorSpec>().is_err());
        assert!("blob,n=3".parse::<GeneratorSpec>().is_err());
        assert!("clusters,n=3,sigma=-1".parse::<GeneratorSpec>().is_err());
        assert!("uniform,n=0".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn collinear_generator() {
        let spec: GeneratorSpec = "collinear,n=5".parse().unwrap();
        let c: PointCloud<f64> = generate(&spec).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn generators_are_deterministic() {
        for spec in ["uniform,n=300,seed=1", "clusters,n=300,seed=1", "sphere,n=300,seed=1"] {
            let spec: GeneratorSpec = spec.parse().unwrap();
            let a: PointCloud<f64> = generate(&spec).unwrap();
            let b: PointCloud<f64> = generate(&spec).unwrap();
            assert_eq!(a, b);
        }
        let a: PointCloud<f64> = generate(&GeneratorSpec::uniform(10, 1)).unwrap();
        let b: PointCloud<f64> = generate(&GeneratorSpec::uniform(10, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let c: PointCloud<f64> = generate(&"sphere,n=200,seed=5".parse().unwrap()).unwrap();
        for p in c.points() {
            assert!(((p.x * p.x + p.y * p.y + p.z * p.z).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_mean_tracks_center_mean() {
        // with one cluster the sample mean is within 3 sigma / sqrt(n) of the
        // center on every axis (well inside a 3-sigma band w.h.p.)
        let sigma = 0.05;
        let n = 20_000;
        let spec = GeneratorSpec::clusters(n, 1, sigma, 77);
        let c: PointCloud<f64> = generate(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let center: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let mean = c.centroid();
        let tol = 3.0 * sigma / (n as f64).sqrt();
        assert!((mean.x - center[0]).abs() < tol);
        assert!((mean.y - center[1]).abs() < tol);
        assert!((mean.z - center[2]).abs() < tol);
    }

    #[test]
    fn uniform_in_unit_cube() {
        let c: PointCloud<f64> = generate(&GeneratorSpec::uniform(1000, 4)).unwrap();
        assert!(c.points().iter().all(|p| (0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.z)));
    }
}
