//! Largest inscribed disk of a convex polygon as a small linear program.

use super::{ConvexPolygon, Disk, Point2};
use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Dense tableau simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`
/// (the origin is feasible). Bland's rule prevents cycling. Returns `None`
/// when unbounded.
fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    let nv = c.len();
    let cols = nv + m + 1;
    let mut t = vec![vec![0.0; cols]; m + 1];
    for i in 0..m {
        t[i][..nv].copy_from_slice(&a[i]);
        t[i][nv + i] = 1.0;
        t[i][cols - 1] = b[i];
    }
    for j in 0..nv {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    loop {
        let Some(enter) = (0..nv + m).find(|&j| t[m][j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let aij = t[i][enter];
            if aij > PIVOT_EPS {
                let ratio = t[i][cols - 1] / aij;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let row = leave?;
        let piv = t[row][enter];
        for v in t[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[enter];
            if f != 0.0 {
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        basis[row] = enter;
    }
    let mut x = vec![0.0; nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t[i][cols - 1];
        }
    }
    Some(x)
}

/// Chebyshev center: maximise `r` subject to `n_e·c + r <= d_e` for every
/// edge with outward unit normal `n_e`.
pub fn chebyshev_inradius_convex(hull: &ConvexPolygon) -> Result<Disk> {
    let v = hull.vertices();
    let degenerate = || Error::DegenerateHull {
        a: v[0],
        b: v[v.len() / 2],
    };
    if v.len() < 3 || hull.area() <= 0.0 {
        return Err(degenerate());
    }
    // Shift so the vertex centroid (strictly interior) is the origin.
    let g = v.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) * (1.0 / v.len() as f64);
    let mut rows = Vec::with_capacity(v.len());
    let mut rhs = Vec::with_capacity(v.len());
    for e in hull.edges() {
        let d = e.b - e.a;
        let len = d.norm();
        let n = Point2::new(d.y / len, -d.x / len);
        let b = n.dot(e.a - g);
        if !(b > 0.0) {
            return Err(degenerate());
        }
        rows.push(vec![n.x, -n.x, n.y, -n.y, 1.0]);
        rhs.push(b);
    }
    let x = simplex_max(&rows, &rhs, &[0.0, 0.0, 0.0, 0.0, 1.0]).ok_or_else(degenerate)?;
    Ok(Disk {
        center: g + Point2::new(x[0] - x[1], x[2] - x[3]),
        radius: x[4],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, enclosed_region, inradius, DEFAULT_MAX_CELLS};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::SQRT_2;

    #[test]
    fn square() {
        let h = convex_hull(&[
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ])
        .unwrap();
        let d = chebyshev_inradius_convex(&h).unwrap();
        assert!((d.radius - 1.0).abs() < 1e-12);
        assert!(d.center.norm() < 1e-12);
    }

    #[test]
    fn equilateral_triangle() {
        let s = 3.0;
        let h = convex_hull(&[
            Point2::new(0.0, 0.0),
            Point2::new(s, 0.0),
            Point2::new(s / 2.0, s * 3f64.sqrt() / 2.0),
        ])
        .unwrap();
        let d = chebyshev_inradius_convex(&h).unwrap();
        assert!((d.radius - s / (2.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_raster_inradius() {
        let mut rng = rand_pcg::Pcg64::seed_from_u64(21);
        let cell = 1.0 / 128.0;
        for _ in 0..10 {
            let pts: Vec<Point2> = (0..30)
                .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let hull = convex_hull(&pts).unwrap();
            let exact = chebyshev_inradius_convex(&hull).unwrap();
            // Every hull edge is a supporting line, so the disk must touch it.
            for e in hull.edges() {
                let d = e.b - e.a;
                assert!(d.cross(exact.center - e.a) / d.norm() >= exact.radius - 1e-9);
            }
            let region = enclosed_region(hull.vertices(), cell, DEFAULT_MAX_CELLS).unwrap();
            let raster = inradius(&region).unwrap();
            assert!(
                (raster.radius - exact.radius).abs() <= cell * SQRT_2,
                "{} vs {}",
                raster.radius,
                exact.radius
            );
        }
    }
}
