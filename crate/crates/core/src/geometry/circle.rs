//! Minimal enclosing circle.

use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::{Disk, Point2};
use crate::error::{invalid, Result};

/// Relative slack for "inside the current circle" during construction.
const EPS: f64 = 1e-12;

fn contains(d: &Disk, p: Point2) -> bool {
    p.dist(d.center) <= d.radius * (1.0 + EPS) + EPS
}

fn from_two(a: Point2, b: Point2) -> Disk {
    let center = a.lerp(b, 0.5);
    Disk {
        center,
        radius: a.dist(b) * 0.5,
    }
}

fn from_three(a: Point2, b: Point2, c: Point2) -> Disk {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    if d.abs() <= 1e-14 * ab.norm_sq().max(ac.norm_sq()) {
        // Collinear: the circle on the farthest pair covers the third point.
        let cands = [from_two(a, b), from_two(a, c), from_two(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.radius.total_cmp(&y.radius))
            .unwrap();
    }
    let ux = (ac.y * ab.norm_sq() - ab.y * ac.norm_sq()) / d;
    let uy = (ab.x * ac.norm_sq() - ac.x * ab.norm_sq()) / d;
    let off = Point2::new(ux, uy);
    Disk {
        center: a + off,
        radius: off.norm(),
    }
}

/// Smallest disk containing all `points` (Welzl's randomized incremental
/// construction over a fixed-seed shuffle, so results are reproducible).
pub fn outradius(points: &[Point2]) -> Result<Disk> {
    if points.is_empty() {
        return Err(invalid("outradius of an empty point set"));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(invalid(format!("non-finite point {p:?}")));
    }
    let mut pts = points.to_vec();
    let mut rng = rand_pcg::Pcg64::seed_from_u64(0x5eed_c1c1e);
    pts.shuffle(&mut rng);

    let mut disk = Disk {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if contains(&disk, pts[i]) {
            continue;
        }
        disk = Disk {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if contains(&disk, pts[j]) {
                continue;
            }
            disk = from_two(pts[i], pts[j]);
            for k in 0..j {
                if !contains(&disk, pts[k]) {
                    disk = from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(disk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn right_triangle() {
        let d = outradius(&[
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(0.0, 4.0),
        ])
        .unwrap();
        assert!((d.radius - 2.5).abs() < 1e-12);
        assert!(d.center.dist(Point2::new(1.5, 2.0)) < 1e-12);
    }

    #[test]
    fn square_and_circle() {
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        assert!((outradius(&sq).unwrap().radius - SQRT_2).abs() < 1e-12);
        let ring: Vec<_> = (0..100)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 100.0;
                Point2::new(1.0 + 5.0 * a.cos(), -2.0 + 5.0 * a.sin())
            })
            .collect();
        let d = outradius(&ring).unwrap();
        assert!((d.radius - 5.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_and_empty() {
        let p = Point2::new(3.0, 4.0);
        assert_eq!(
            outradius(&[p]).unwrap(),
            Disk {
                center: p,
                radius: 0.0
            }
        );
        assert!(outradius(&[]).is_err());
    }

    /// O(n^4) oracle over all pair and triple circles.
    fn brute(pts: &[Point2]) -> f64 {
        let n = pts.len();
        let covers = |d: &Disk| {
            pts.iter()
                .all(|&p| p.dist(d.center) <= d.radius * (1.0 + 1e-9) + 1e-12)
        };
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let d = from_two(pts[i], pts[j]);
                if covers(&d) {
                    best = best.min(d.radius);
                }
                for k in j + 1..n {
                    let d = from_three(pts[i], pts[j], pts[k]);
                    if covers(&d) {
                        best = best.min(d.radius);
                    }
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn encloses_all_and_is_minimal(pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..25)) {
            let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
            let d = outradius(&pts).unwrap();
            for &p in &pts {
                prop_assert!(p.dist(d.center) <= d.radius + 1e-9 * d.radius.max(1e-300));
            }
            let b = brute(&pts);
            prop_assert!((d.radius - b).abs() <= 1e-9 * b.max(1.0));
        }
    }
}
