//! Planar geometry: points and segments, convex hulls, rasterized enclosed
//! regions, and the radius/roughness/facet measurements taken on them.

mod chebyshev;
mod circle;
mod hull;
mod raster;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use chebyshev::chebyshev_inradius_convex;
pub use circle::outradius;
pub use hull::{
    convex_hull, convex_hull_with_tol, hull_arclength, longest_facet, longest_facet_with_tol,
    max_local_roughness, ConvexPolygon, DEFAULT_FACET_TOL, DEFAULT_HULL_TOL,
};
pub use raster::{
    enclosed_area, enclosed_region, inradius, AreaWorkspace, RasterHeader, RasterRegion,
};

/// Default raster cell budget (cells, not bytes).
pub const DEFAULT_MAX_CELLS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-d cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn lerp(self, o: Point2, s: f64) -> Point2 {
        Point2::new(self.x + s * (o.x - self.x), self.y + s * (o.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Closed segment; `a == b` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

/// Shoelace signed area of a closed polygon (positive when counterclockwise).
pub fn signed_area(points: &[Point2]) -> Result<f64> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "signed area needs at least 3 points, got {}",
            points.len()
        )));
    }
    Ok(shoelace(points))
}

pub(crate) fn shoelace(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for k in 0..n {
        let p = points[k];
        let q = points[(k + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

/// Euclidean distance from `p` to the closed segment `s`.
pub fn dist_point_segment(p: Point2, s: &Segment) -> f64 {
    let d = s.b - s.a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return p.dist(s.a);
    }
    let t = ((p - s.a).dot(d) / len_sq).clamp(0.0, 1.0);
    p.dist(s.a + d * t)
}

/// Total length of the closed polygonal curve through `points`.
pub fn closed_arclength(points: &[Point2]) -> f64 {
    let n = points.len();
    (0..n).map(|k| points[k].dist(points[(k + 1) % n])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn square() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn shoelace_unit_square() {
        assert_eq!(signed_area(&square()).unwrap(), 1.0);
        let mut cw = square();
        cw.reverse();
        assert_eq!(signed_area(&cw).unwrap(), -1.0);
    }

    #[test]
    fn shoelace_regular_polygon() {
        let k = 4;
        let pts: Vec<_> = (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        let expected = 0.5 * k as f64 * (2.0 * PI / k as f64).sin();
        assert!((signed_area(&pts).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shoelace_rejects_short_input() {
        assert!(signed_area(&square()[..2]).is_err());
    }

    #[test]
    fn point_segment_distance() {
        let s = Segment::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0));
        assert_eq!(dist_point_segment(Point2::new(0.0, 1.0), &s), 1.0);
        assert!(dist_point_segment(Point2::new(0.3, 0.0), &s) < 1e-15);
        assert_eq!(dist_point_segment(Point2::new(2.0, 0.0), &s), 1.0);
        let degenerate = Segment::new(Point2::new(1.0, 1.0), Point2::new(1.0, 1.0));
        assert_eq!(dist_point_segment(Point2::new(4.0, 5.0), &degenerate), 5.0);
    }

    proptest! {
        #[test]
        fn reversal_negates_area(pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40)) {
            let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
            let mut rev = pts.clone();
            rev.reverse();
            let a = signed_area(&pts).unwrap();
            let b = signed_area(&rev).unwrap();
            prop_assert!((a + b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
