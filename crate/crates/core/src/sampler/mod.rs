//! Discretized planar Brownian loops and bridges, and the closed-form laws
//! used to test them.

mod rng;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Point2;

pub use rng::RngStream;

/// Uniform grid of `steps` intervals on `[0, total_time]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    total_time: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(invalid(format!(
                "total time must be positive and finite, got {total_time}"
            )));
        }
        if steps < 2 {
            return Err(invalid(format!(
                "a loop needs at least 2 steps, got {steps}"
            )));
        }
        Ok(TimeGrid { total_time, steps })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Grid time of index `k`, reduced modulo the period.
    pub fn time(&self, k: usize) -> f64 {
        (k % self.steps) as f64 * self.dt()
    }
}

/// Closed loop sampled on a [`TimeGrid`]. `points[0]` is the origin and the
/// point after the last one is `points[0]` again.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    grid: TimeGrid,
    points: Vec<Point2>,
}

impl LoopPath {
    /// Validates length, finiteness, and the pinned origin.
    pub fn new(grid: TimeGrid, points: Vec<Point2>) -> Result<Self> {
        if points.len() != grid.steps() {
            return Err(invalid(format!(
                "loop has {} points but the grid has {} steps",
                points.len(),
                grid.steps()
            )));
        }
        if points[0] != Point2::ORIGIN {
            return Err(invalid(format!(
                "loop must start at the origin, got {:?}",
                points[0]
            )));
        }
        if let Some(k) = points.iter().position(|p| !p.is_finite()) {
            return Err(invalid(format!("non-finite loop point at index {k}")));
        }
        Ok(LoopPath { grid, points })
    }

    /// Translates an arbitrary closed polygon so its first vertex is the
    /// origin.
    pub fn from_closed_polygon(grid: TimeGrid, mut points: Vec<Point2>) -> Result<Self> {
        if let Some(&p0) = points.first() {
            for p in points.iter_mut() {
                *p = *p - p0;
            }
        }
        LoopPath::new(grid, points)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point at index `k` modulo `n`.
    pub fn at(&self, k: usize) -> Point2 {
        self.points[k % self.points.len()]
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    /// Largest distance of any sample from the origin.
    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn points_vec_mut(&mut self) -> &mut Vec<Point2> {
        &mut self.points
    }
}

/// Brownian loop of duration `grid.total_time()` pinned at the origin,
/// `B(t_k) = W(t_k) - (t_k/T) W(T)` for a free walk `W`.
pub fn sample_loop(grid: TimeGrid, rng: &mut RngStream) -> LoopPath {
    let n = grid.steps();
    let mut points = vec![Point2::ORIGIN; n];
    fill_walk_bridge(
        Point2::ORIGIN,
        Point2::ORIGIN,
        grid.dt().sqrt(),
        &mut points,
        rng,
        true,
    );
    LoopPath { grid, points }
}

/// Planar Brownian bridge from `p` to `q` over `duration`, as `steps + 1`
/// points whose first and last entries are exactly `p` and `q`.
pub fn sample_bridge(
    p: Point2,
    q: Point2,
    duration: f64,
    steps: usize,
    rng: &mut RngStream,
) -> Result<Vec<Point2>> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(invalid(format!(
            "bridge duration must be positive, got {duration}"
        )));
    }
    if steps == 0 {
        return Err(invalid("bridge needs at least one step"));
    }
    let mut out = vec![Point2::ORIGIN; steps + 1];
    fill_bridge(p, q, duration, &mut out, rng);
    Ok(out)
}

/// In-place variant of [`sample_bridge`]; `out.len() - 1` is the step count.
pub fn fill_bridge(p: Point2, q: Point2, duration: f64, out: &mut [Point2], rng: &mut RngStream) {
    let steps = out.len() - 1;
    let sd = (duration / steps as f64).sqrt();
    fill_walk_bridge(p, q, sd, out, rng, false);
}

/// Writes a drift-corrected free walk into `out`. With `periodic` the last
/// endpoint is implicit (loop layout, `out.len()` steps); otherwise `out`
/// holds both endpoints (`out.len() - 1` steps).
fn fill_walk_bridge(
    p: Point2,
    q: Point2,
    sd: f64,
    out: &mut [Point2],
    rng: &mut RngStream,
    periodic: bool,
) {
    let steps = if periodic { out.len() } else { out.len() - 1 };
    out[0] = Point2::ORIGIN;
    let mut w = Point2::ORIGIN;
    for k in 1..out.len() {
        w = w + Point2::new(sd * rng.normal(), sd * rng.normal());
        out[k] = w;
    }
    let w_end = if periodic {
        w + Point2::new(sd * rng.normal(), sd * rng.normal())
    } else {
        w
    };
    let drift = q - p - w_end;
    let inv = 1.0 / steps as f64;
    for (k, v) in out.iter_mut().enumerate() {
        *v = p + *v + drift * (k as f64 * inv);
    }
    out[0] = p;
    if !periodic {
        out[steps] = q;
    }
}

/// `P(M > r) = exp(-2r²/T)` for the maximum `M` of a one-dimensional
/// Brownian bridge of duration `T`.
pub fn bridge_max_cdf_complement(r: f64, total_time: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(invalid(format!(
            "bridge maximum level must be non-negative, got {r}"
        )));
    }
    if !(total_time > 0.0) {
        return Err(invalid(format!(
            "duration must be positive, got {total_time}"
        )));
    }
    Ok((-2.0 * r * r / total_time).exp())
}

/// χ² density with `m` degrees of freedom, evaluated in log space.
pub fn chi2_pdf(x: f64, m: u32) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(invalid(format!("chi-square density needs x >= 0, got {x}")));
    }
    if m == 0 {
        return Err(invalid("chi-square needs at least one degree of freedom"));
    }
    let half = 0.5 * m as f64;
    if x == 0.0 {
        return Ok(match m {
            1 => f64::INFINITY,
            2 => 0.5,
            _ => 0.0,
        });
    }
    let log_f =
        (half - 1.0) * x.ln() - 0.5 * x - half * std::f64::consts::LN_2 - libm::lgamma(half);
    Ok(log_f.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{integrate, integrate_to_infinity, ks_p_value, ks_two_sample};

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 4).is_err());
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.dt(), 0.25);
        assert_eq!(g.time(9), 0.25);
    }

    #[test]
    fn midpoint_variance_two_steps() {
        let t = 3.0;
        let grid = TimeGrid::new(t, 2).unwrap();
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let mut s2 = 0.0;
        for _ in 0..n {
            let lp = sample_loop(grid, &mut rng);
            s2 += lp.points()[1].x.powi(2);
        }
        let var = s2 / n as f64;
        let expected = t / 4.0;
        // Var of a sample variance of normals: 2σ⁴/N.
        let se = expected * (2.0 / n as f64).sqrt();
        assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected}");
    }

    #[test]
    fn loop_marginals_mean_and_variance() {
        let t = 2.0;
        let n_steps = 16;
        let grid = TimeGrid::new(t, n_steps).unwrap();
        let mut rng = RngStream::new(5, 1);
        let samples = 40_000;
        let mut sum = vec![Point2::ORIGIN; n_steps];
        let mut sq = vec![0.0; n_steps];
        for _ in 0..samples {
            let lp = sample_loop(grid, &mut rng);
            assert_eq!(lp.points()[0], Point2::ORIGIN);
            for (k, p) in lp.points().iter().enumerate() {
                sum[k] = sum[k] + *p;
                sq[k] += p.y * p.y;
            }
        }
        for k in 1..n_steps {
            let tk = grid.time(k);
            let var = tk * (t - tk) / t;
            let sigma = var.sqrt() / (samples as f64).sqrt();
            assert!((sum[k].x / samples as f64).abs() < 4.0 * sigma);
            assert!((sum[k].y / samples as f64).abs() < 4.0 * sigma);
            let emp = sq[k] / samples as f64;
            assert!(
                (emp - var).abs() < 4.0 * var * (2.0 / samples as f64).sqrt(),
                "k={k}"
            );
        }
    }

    #[test]
    fn loop_is_deterministic() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let a = sample_loop(grid, &mut RngStream::new(9, 3));
        let b = sample_loop(grid, &mut RngStream::new(9, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn bridge_endpoints_and_errors() {
        let mut rng = RngStream::new(1, 1);
        let p = Point2::new(0.3, -1.0);
        let q = Point2::new(2.0, 5.5);
        assert_eq!(sample_bridge(p, q, 1.0, 1, &mut rng).unwrap(), vec![p, q]);
        let b = sample_bridge(p, q, 1.0, 50, &mut rng).unwrap();
        assert_eq!(b.len(), 51);
        assert_eq!(b[0], p);
        assert_eq!(b[50], q);
        assert!(sample_bridge(p, q, 0.0, 5, &mut rng).is_err());
        assert!(sample_bridge(p, q, -1.0, 5, &mut rng).is_err());
    }

    #[test]
    fn bridge_interior_law() {
        let mut rng = RngStream::new(2, 2);
        let p = Point2::new(1.0, 0.0);
        let q = Point2::new(-1.0, 4.0);
        let duration = 2.0;
        let steps = 8;
        let k = 3;
        let s = k as f64 / steps as f64;
        let n = 100_000;
        let (mut mx, mut my, mut vx) = (0.0, 0.0, 0.0);
        let mean = p + (q - p) * s;
        for _ in 0..n {
            let b = sample_bridge(p, q, duration, steps, &mut rng).unwrap();
            mx += b[k].x;
            my += b[k].y;
            vx += (b[k].x - mean.x).powi(2);
        }
        let var = s * (1.0 - s) * duration;
        let se = (var / n as f64).sqrt();
        assert!((mx / n as f64 - mean.x).abs() < 4.0 * se);
        assert!((my / n as f64 - mean.y).abs() < 4.0 * se);
        let emp = vx / n as f64;
        assert!(
            (emp - var).abs() < 4.0 * var * (2.0 / n as f64).sqrt(),
            "{emp} vs {var}"
        );
    }

    #[test]
    fn displacement_law_is_shift_invariant() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let mut rng = RngStream::new(17, 0);
        let lag = 10;
        let n = 10_000;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let lp = sample_loop(grid, &mut rng);
            a.push(lp.at(lag).dist(lp.at(0)));
            b.push(lp.at(37 + lag).dist(lp.at(37)));
        }
        let d = ks_two_sample(&a, &b);
        assert!(ks_p_value(d, n as f64 / 2.0) > 1e-3, "KS {d}");
    }

    #[test]
    fn pinned_bridge_matches_loop() {
        let t = 1.5;
        let steps = 32;
        let grid = TimeGrid::new(t, steps).unwrap();
        let mut rng = RngStream::new(23, 4);
        let n = 10_000;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            a.push(sample_loop(grid, &mut rng).max_modulus());
            let br = sample_bridge(Point2::ORIGIN, Point2::ORIGIN, t, steps, &mut rng).unwrap();
            b.push(br.iter().map(|p| p.norm()).fold(0.0, f64::max));
        }
        let d = ks_two_sample(&a, &b);
        assert!(ks_p_value(d, n as f64 / 2.0) > 1e-3, "KS {d}");
    }

    #[test]
    fn bridge_max_law_values() {
        let t = 3.0;
        let v = bridge_max_cdf_complement((t / 2.0f64).sqrt(), t).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bridge_max_cdf_complement(0.0, t).unwrap(), 1.0);
        let far = bridge_max_cdf_complement(10.0 * t.sqrt(), t).unwrap();
        assert!((far / (-200.0f64).exp() - 1.0).abs() < 1e-12);
        assert!(bridge_max_cdf_complement(-0.1, t).is_err());
    }

    #[test]
    fn chi2_density_values() {
        assert_eq!(chi2_pdf(0.0, 2).unwrap(), 0.5);
        assert!((chi2_pdf(3.0, 2).unwrap() - 0.5 * (-1.5f64).exp()).abs() < 1e-15);
        assert!(chi2_pdf(-1.0, 3).is_err());
        assert!(chi2_pdf(1.0, 0).is_err());
    }

    #[test]
    fn chi2_density_normalized_with_mean_m() {
        for m in 1..=10u32 {
            let f = |x: f64| chi2_pdf(x, m).unwrap();
            // Integrate in u = sqrt(x) on [0, 1] to tame the m = 1 singularity.
            let head = integrate(
                |u: f64| if u == 0.0 { 0.0 } else { 2.0 * u * f(u * u) },
                0.0,
                1.0,
                1e-12,
            );
            let tail = integrate_to_infinity(f, 1.0, 1e-12);
            assert!((head + tail - 1.0).abs() < 1e-8, "m={m}: {}", head + tail);
            let mh = integrate(
                |u: f64| {
                    if u == 0.0 {
                        0.0
                    } else {
                        2.0 * u.powi(3) * f(u * u)
                    }
                },
                0.0,
                1.0,
                1e-12,
            );
            let mt = integrate_to_infinity(|x| x * f(x), 1.0, 1e-12);
            assert!((mh + mt - m as f64).abs() < 1e-8, "m={m}");
        }
    }
}
