//! Polygonal approximations of a loop, per-sample geometric measurements,
//! and power-law fits of those measurements across loop durations.

mod fit;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    convex_hull, dist_point_segment, enclosed_region, hull_arclength, inradius, longest_facet,
    max_local_roughness, outradius, ConvexPolygon, Disk, Point2, RasterRegion, Segment,
};
use crate::sampler::LoopPath;

pub use fit::{scaling_fit, scaling_fit_with, ScalingFit, BOOTSTRAP_RESAMPLES};

/// Points within `radius` of `segment`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stadium {
    pub segment: Segment,
    pub radius: f64,
}

impl Stadium {
    pub fn contains(&self, p: Point2) -> bool {
        dist_point_segment(p, &self.segment) <= self.radius
    }

    pub fn distance(&self, p: Point2) -> f64 {
        (dist_point_segment(p, &self.segment) - self.radius).max(0.0)
    }

    pub fn area(&self) -> f64 {
        2.0 * self.segment.length() * self.radius + PI * self.radius * self.radius
    }
}

/// Inscribed polygon through `m` equally spaced loop times and the
/// fluctuations of the loop around each edge.
///
/// Edge `i` joins `vertices[i-1]` to `vertices[i]` (cyclically) and its
/// window is the run of grid points between the two vertex times.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalApprox {
    pub m: usize,
    /// Offset actually used, snapped to the time grid.
    pub t_prime: f64,
    /// Grid index of each vertex.
    pub indices: Vec<usize>,
    pub vertices: Vec<Point2>,
    /// `L[i] = |vertices[i] - vertices[i-1]|`.
    pub lengths: Vec<f64>,
    pub segments: Vec<Segment>,
    /// Largest distance of a window point from its segment.
    pub r: Vec<f64>,
    /// Largest distance of a window point from the time-linear
    /// interpolation of its endpoints.
    pub r_hat: Vec<f64>,
    pub stadiums: Vec<Stadium>,
}

impl PolygonalApprox {
    pub fn new(path: &LoopPath, m: usize, t_prime: f64) -> Result<Self> {
        let n = path.len();
        let total = path.grid().total_time();
        if m < 3 {
            return Err(invalid(format!(
                "polygonal approximation needs m >= 3, got {m}"
            )));
        }
        if m > n {
            return Err(invalid(format!("m = {m} exceeds the {n} loop samples")));
        }
        if !(0.0..=total / m as f64).contains(&t_prime) {
            return Err(invalid(format!("t' = {t_prime} outside [0, T/m]")));
        }
        let dt = path.grid().dt();
        let shift = (t_prime / dt).round() as usize;
        let indices: Vec<usize> = (0..m)
            .map(|j| ((j * n) as f64 / m as f64).round() as usize + shift)
            .map(|k| k % n)
            .collect();
        let pts = path.points();
        let vertices: Vec<Point2> = indices.iter().map(|&k| pts[k]).collect();

        let mut lengths = Vec::with_capacity(m);
        let mut segments = Vec::with_capacity(m);
        let mut r = Vec::with_capacity(m);
        let mut r_hat = Vec::with_capacity(m);
        for i in 0..m {
            let (ka, kb) = (indices[(i + m - 1) % m], indices[i]);
            let (a, b) = (pts[ka], pts[kb]);
            let seg = Segment::new(a, b);
            let span = (kb + n - ka) % n;
            let span = if span == 0 { n } else { span };
            let mut ri: f64 = 0.0;
            let mut rh: f64 = 0.0;
            for s in 0..=span {
                let p = pts[(ka + s) % n];
                ri = ri.max(dist_point_segment(p, &seg));
                rh = rh.max(p.dist(a.lerp(b, s as f64 / span as f64)));
            }
            lengths.push(a.dist(b));
            segments.push(seg);
            r.push(ri);
            r_hat.push(rh);
        }
        let stadiums = segments
            .iter()
            .zip(&r)
            .map(|(&segment, &radius)| Stadium { segment, radius })
            .collect();
        Ok(PolygonalApprox {
            m,
            t_prime: shift as f64 * dt,
            indices,
            vertices,
            lengths,
            segments,
            r,
            r_hat,
            stadiums,
        })
    }

    /// Distance by which `p` misses `conv(P) ∪ ⋃ Q_i` (zero when covered).
    pub fn cover_gap(&self, hull: Option<&ConvexPolygon>, p: Point2) -> f64 {
        let mut gap = f64::INFINITY;
        if let Some(h) = hull {
            if h.contains(p) {
                return 0.0;
            }
            gap = h.boundary_distance(p);
        }
        self.stadiums
            .iter()
            .map(|q| q.distance(p))
            .fold(gap, f64::min)
    }
}

/// `sqrt(m/T)` times the horizontal and vertical components of each edge
/// vector, interleaved `[x_1, y_1, x_2, y_2, ...]`.
pub fn normalized_increments(approx: &PolygonalApprox, total_time: f64) -> Vec<f64> {
    let m = approx.m;
    let scale = (m as f64 / total_time).sqrt();
    let mut out = Vec::with_capacity(2 * m);
    for i in 0..m {
        let d = approx.vertices[i] - approx.vertices[(i + m - 1) % m];
        out.push(scale * d.x);
        out.push(scale * d.y);
    }
    out
}

/// One measured sample. Field order matches the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    #[serde(rename = "T")]
    pub total_time: f64,
    pub n: usize,
    pub h: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub sweep: u64,
    pub area: f64,
    pub area_excess: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub ann_width: f64,
    pub mlr: f64,
    pub longest_facet: f64,
    pub hull_arclength: f64,
}

pub const RECORD_COLUMNS: [&str; 14] = [
    "T",
    "n",
    "h",
    "seed",
    "stream_id",
    "sweep",
    "area",
    "area_excess",
    "r_in",
    "r_out",
    "ann_width",
    "mlr",
    "longest_facet",
    "hull_arclength",
];

/// Provenance of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SampleTag {
    pub seed: u64,
    pub stream_id: u64,
    pub sweep: u64,
}

/// A record together with the intermediate geometry it was computed from.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub record: ObservableRecord,
    pub region: RasterRegion,
    pub inner: Disk,
    pub outer: Disk,
    pub hull: ConvexPolygon,
}

pub fn measure(
    path: &LoopPath,
    h: f64,
    max_cells: usize,
    tag: SampleTag,
) -> Result<ObservableRecord> {
    Ok(measure_detailed(path, h, max_cells, tag)?.record)
}

pub fn measure_detailed(
    path: &LoopPath,
    h: f64,
    max_cells: usize,
    tag: SampleTag,
) -> Result<Measurement> {
    let t = path.grid().total_time();
    let pts = path.points();
    let region = enclosed_region(pts, h, max_cells)?;
    let area = region.area();
    let inner = inradius(&region)?;
    let outer = outradius(pts)?;
    let hull = convex_hull(pts)?;
    let record = ObservableRecord {
        total_time: t,
        n: path.len(),
        h,
        seed: tag.seed,
        stream_id: tag.stream_id,
        sweep: tag.sweep,
        area,
        area_excess: area - PI * t * t,
        r_in: inner.radius,
        r_out: outer.radius,
        ann_width: outer.radius - inner.radius,
        mlr: max_local_roughness(pts, &hull)?,
        longest_facet: longest_facet(&hull),
        hull_arclength: hull_arclength(&hull),
    };
    Ok(Measurement {
        record,
        region,
        inner,
        outer,
        hull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_MAX_CELLS;
    use crate::mcmc::{init_state, ChainConfig};
    use crate::sampler::{sample_loop, RngStream, TimeGrid};
    use crate::stats::{chi2_cdf, ks_statistic};
    use std::f64::consts::SQRT_2;

    fn polygon_loop(m: usize, per_edge: usize, r: f64) -> LoopPath {
        // Regular m-gon traversed with `per_edge` samples on each edge.
        let n = m * per_edge;
        let corner = |j: usize| {
            let a = 2.0 * PI * j as f64 / m as f64;
            Point2::new(r * a.cos(), r * a.sin())
        };
        let pts: Vec<Point2> = (0..n)
            .map(|k| {
                let j = k / per_edge;
                corner(j).lerp(corner(j + 1), (k % per_edge) as f64 / per_edge as f64)
            })
            .collect();
        LoopPath::from_closed_polygon(TimeGrid::new(1.0, n).unwrap(), pts).unwrap()
    }

    #[test]
    fn polygon_loop_has_no_fluctuation() {
        let lp = polygon_loop(6, 10, 2.0);
        let a = PolygonalApprox::new(&lp, 6, 0.0).unwrap();
        assert_eq!(a.indices, vec![0, 10, 20, 30, 40, 50]);
        for i in 0..6 {
            assert!(a.r[i] < 1e-12 && a.r_hat[i] < 1e-12, "{i}");
            assert!((a.lengths[i] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn argument_checks_and_snapping() {
        let lp = polygon_loop(4, 4, 1.0);
        assert!(PolygonalApprox::new(&lp, 17, 0.0).is_err());
        assert!(PolygonalApprox::new(&lp, 2, 0.0).is_err());
        assert!(PolygonalApprox::new(&lp, 4, 0.3).is_err());
        let a = PolygonalApprox::new(&lp, 4, 0.07).unwrap();
        assert_eq!(a.t_prime, 1.0 / 16.0);
        assert_eq!(a.indices, vec![1, 5, 9, 13]);
    }

    #[test]
    fn fluctuation_bounds_on_random_loops() {
        let grid = TimeGrid::new(1.0, 240).unwrap();
        let mut rng = RngStream::new(31, 0);
        for k in 0..100 {
            let lp = sample_loop(grid, &mut rng);
            let m = [3, 8, 16, 24][k % 4];
            let a = PolygonalApprox::new(&lp, m, (k % 7) as f64 / (7.0 * m as f64)).unwrap();
            for i in 0..m {
                assert!(a.r[i] >= 0.0 && a.r[i] <= a.r_hat[i] + 1e-15);
                let d = a.vertices[i].dist(a.vertices[(i + m - 1) % m]);
                assert_eq!(a.lengths[i], d);
            }
        }
    }

    #[test]
    fn increments_identities() {
        let t = 2.5;
        let grid = TimeGrid::new(t, 320).unwrap();
        let mut rng = RngStream::new(2, 9);
        for _ in 0..20 {
            let lp = sample_loop(grid, &mut rng);
            let m = 16;
            let a = PolygonalApprox::new(&lp, m, 0.0).unwrap();
            let e = normalized_increments(&a, t);
            assert_eq!(e.len(), 2 * m);
            let sx: f64 = e.iter().step_by(2).sum();
            let sy: f64 = e.iter().skip(1).step_by(2).sum();
            assert!(sx.abs() < 1e-9 * (m as f64).sqrt() && sy.abs() < 1e-9 * (m as f64).sqrt());
            let l2: f64 = a.lengths.iter().map(|l| l * l).sum();
            let e2: f64 = e.iter().map(|v| v * v).sum();
            assert!((l2 - t / m as f64 * e2).abs() < 1e-12 * l2);
        }
    }

    #[test]
    fn squared_increments_follow_chi_square() {
        let t = 1.0;
        let mut rng = RngStream::new(77, 0);
        for m in [8usize, 32] {
            let grid = TimeGrid::new(t, 4 * m).unwrap();
            let s: Vec<f64> = (0..4000)
                .map(|_| {
                    let lp = sample_loop(grid, &mut rng);
                    let a = PolygonalApprox::new(&lp, m, 0.0).unwrap();
                    normalized_increments(&a, t).iter().map(|v| v * v).sum()
                })
                .collect();
            let d = ks_statistic(&s, |x| chi2_cdf(x, 2 * m as u32 - 2));
            assert!(d < 0.03, "m={m}: KS {d}");
        }
    }

    #[test]
    fn circle_measurements() {
        let t = 4.0;
        let n = 2048;
        let pts: Vec<Point2> = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                Point2::new(t * a.cos(), t * a.sin())
            })
            .collect();
        let lp = LoopPath::from_closed_polygon(TimeGrid::new(t, n).unwrap(), pts).unwrap();
        let h = t / 256.0;
        let tag = SampleTag {
            seed: 1,
            stream_id: 2,
            sweep: 3,
        };
        let r = measure(&lp, h, DEFAULT_MAX_CELLS, tag).unwrap();
        assert!((r.r_in - t).abs() <= h * SQRT_2);
        assert!((r.r_out - t).abs() < 1e-9);
        assert!(r.mlr < 1e-9);
        assert!((r.area - PI * t * t).abs() < 3.0 * h * 2.0 * PI * t);
        assert_eq!((r.seed, r.stream_id, r.sweep, r.n), (1, 2, 3, n));
        assert!(r.ann_width >= -2.0 * h * SQRT_2);
    }

    #[test]
    fn initial_polygon_is_nearly_round() {
        let c = ChainConfig::new(8.0, 256);
        let s = init_state(&c).unwrap();
        let r = measure(s.path(), c.h, c.max_cells, SampleTag::default()).unwrap();
        let n = c.n as f64;
        assert!(r.ann_width <= 2.0 * c.h * SQRT_2 + c.total_time * 2.0 * PI * PI / (n * n));
        assert!(r.area_excess >= 0.0);
        assert!(r.mlr <= r.ann_width + 2.0 * c.h * SQRT_2);
    }

    #[test]
    fn stadium_geometry() {
        let q = Stadium {
            segment: Segment::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)),
            radius: 0.5,
        };
        assert!(q.contains(Point2::new(2.4, 0.2)));
        assert!(!q.contains(Point2::new(1.0, 0.6)));
        assert!((q.distance(Point2::new(1.0, 1.5)) - 1.0).abs() < 1e-15);
        assert!((q.area() - (2.0 + PI * 0.25)).abs() < 1e-15);
    }
}
