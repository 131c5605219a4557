//! Points, distances and the index-stable point cloud container.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Scalar> From<[T; 3]> for Point3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Point3 { x, y, z }
    }
}

/// Squared Euclidean distance. Orders pairs exactly like the Euclidean
/// distance, so every farthest/nearest decision can be made on it.
#[inline]
pub fn squared_distance<T: Scalar>(a: &Point3<T>, b: &Point3<T>) -> T {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    dx * dx + dy * dy + dz * dz
}

/// An ordered, non-empty store of finite points.
///
/// A point's position in the store is its original index. Nothing in this
/// crate reorders a cloud; subsets are always described by index lists.
/// Optional per-point attachments (extra text columns from the source file)
/// ride along untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<Point3<T>>,
    attachments: Option<Vec<String>>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false for a validated cloud; provided for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &Point3<T> {
        &self.points[index]
    }

    pub fn attachments(&self) -> Option<&[String]> {
        self.attachments.as_deref()
    }

    /// Attaches one opaque string per point.
    pub fn with_attachments(mut self, attachments: Vec<String>) -> Result<Self> {
        if attachments.len() != self.points.len() {
            return Err(Error::TooFewPoints {
                needed: self.points.len(),
                got: attachments.len(),
            });
        }
        self.attachments = Some(attachments);
        Ok(self)
    }

    /// Builds a new cloud from the given original indices, in that order.
    /// Attachments follow their points.
    pub fn select(&self, indices: &[usize]) -> Result<PointCloud<T>> {
        if indices.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let n = self.len();
        let mut points = Vec::with_capacity(indices.len());
        for &index in indices {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
            points.push(self.points[index]);
        }
        let attachments = self
            .attachments
            .as_ref()
            .map(|a| indices.iter().map(|&i| a[i].clone()).collect());
        Ok(PointCloud { points, attachments })
    }

    /// Arithmetic mean of all points.
    pub fn centroid(&self) -> Point3<T> {
        let mut sum = [T::zero(); 3];
        for p in &self.points {
            sum[0] = sum[0] + p.x;
            sum[1] = sum[1] + p.y;
            sum[2] = sum[2] + p.z;
        }
        let n = crate::scalar::from_count::<T>(self.len());
        Point3::new(sum[0] / n, sum[1] / n, sum[2] / n)
    }
}

/// Validates raw points: non-empty, every component finite.
pub fn validate_cloud<T: Scalar>(raw: Vec<Point3<T>>) -> Result<PointCloud<T>> {
    if raw.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if let Some(index) = raw.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFiniteCoordinate { index });
    }
    Ok(PointCloud {
        points: raw,
        attachments: None,
    })
}

/// Convenience wrapper over [`validate_cloud`] for triples.
pub fn cloud_from_triples<T: Scalar>(raw: &[[T; 3]]) -> Result<PointCloud<T>> {
    validate_cloud(raw.iter().copied().map(Point3::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&p(0., 0., 0.), &p(0., 0., 0.)), 0.0);
        assert_eq!(squared_distance(&p(0., 0., 0.), &p(1., 2., 2.)), 9.0);
        assert_eq!(squared_distance(&p(1., 1., 1.), &p(4., 5., 1.)), 25.0);
    }

    #[test]
    fn squared_distance_matches_euclidean_oracle() {
        // hypot-based Euclidean distance, squared
        let a = p(1., 1., 1.);
        let b = p(4., 5., 1.);
        let euclid = (3.0f64).hypot(4.0).hypot(0.0);
        assert_eq!(euclid * euclid, squared_distance(&a, &b));
    }

    #[test]
    fn validate_examples() {
        let cloud = cloud_from_triples(&[[0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(cloud.len(), 1);

        let empty: Vec<Point3<f64>> = vec![];
        assert!(matches!(validate_cloud(empty), Err(Error::EmptyCloud)));

        let err = cloud_from_triples(&[[0.0, 0.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 0 }));

        let err = cloud_from_triples(&[[0.0, 0.0, 0.0], [f64::INFINITY, 0.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 1 }));
    }

    #[test]
    fn select_keeps_order_and_attachments() {
        let cloud = cloud_from_triples(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
            .unwrap()
            .with_attachments(vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let sub = cloud.select(&[2, 0]).unwrap();
        assert_eq!(sub.point(0).x, 2.0);
        assert_eq!(sub.attachments().unwrap(), &["c".to_string(), "a".to_string()]);
        assert!(cloud.select(&[3]).is_err());
    }

    fn coord() -> impl Strategy<Value = f64> {
        -1e3..1e3f64
    }

    proptest! {
        #[test]
        fn symmetric_and_zero_iff_equal(a in (coord(), coord(), coord()), b in (coord(), coord(), coord())) {
            let a = p(a.0, a.1, a.2);
            let b = p(b.0, b.1, b.2);
            prop_assert_eq!(squared_distance(&a, &b), squared_distance(&b, &a));
            prop_assert_eq!(squared_distance(&a, &b) == 0.0, a == b);
            prop_assert_eq!(squared_distance(&a, &a), 0.0);
        }

        #[test]
        fn ordering_matches_euclidean(
            a in (coord(), coord(), coord()),
            b in (coord(), coord(), coord()),
            c in (coord(), coord(), coord()),
        ) {
            let a = p(a.0, a.1, a.2);
            let b = p(b.0, b.1, b.2);
            let c = p(c.0, c.1, c.2);
            let (ab, ac) = (squared_distance(&a, &b), squared_distance(&a, &c));
            // sqrt is monotone; rounding can only merge, never swap, an ordering
            if ab.sqrt() < ac.sqrt() {
                prop_assert!(ab < ac);
            }
            if ab < ac {
                prop_assert!(ab.sqrt() <= ac.sqrt());
            }
        }
    }
}
