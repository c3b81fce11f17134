//! Numerical checks of the closed-form laws and geometric inequalities the
//! model relies on. Every check returns a [`CheckReport`]; `passed` holds
//! exactly when `statistic <= threshold`.

mod suite;

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    chebyshev_inradius_convex, convex_hull, enclosed_region, hull_arclength, longest_facet,
    longest_facet_with_tol, max_local_roughness, outradius, signed_area, ConvexPolygon, Point2,
    DEFAULT_MAX_CELLS,
};
use crate::mcmc::{Chain, ChainConfig};
use crate::observables::{normalized_increments, ObservableRecord, PolygonalApprox};
use crate::sampler::{sample_loop, LoopPath, RngStream, TimeGrid};
use crate::stats::{binomial_se, chi2_cdf, ks_statistic, ks_two_sample, normal_sf};

pub use suite::{random_positive_modes, run_check, run_suite, Scale, CHECK_NAMES};

/// Constant in the Gaussian domination of the loop's squared supremum.
pub const SUP_DOMINANCE_C2: f64 = 128.0 * PI;
/// Relative tolerance for inequalities evaluated in exact geometry; only
/// floating-point roundoff is absorbed.
pub const ROUNDOFF_TOL: f64 = 1e-12;
pub const BONNESEN_TOL: f64 = 1e-9;
pub const SHOELACE_POINTS: usize = 4096;
pub const SHOELACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub details: String,
}

impl CheckReport {
    pub fn new(
        name: &str,
        statistic: f64,
        threshold: f64,
        samples: usize,
        details: String,
    ) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: statistic <= threshold,
            statistic,
            threshold,
            samples,
            seed: None,
            details,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Folds per-instance reports into one: the worst statistic decides.
pub fn aggregate(name: &str, reports: &[CheckReport]) -> Result<CheckReport> {
    let worst = reports
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1.statistic - a.1.threshold).total_cmp(&(b.1.statistic - b.1.threshold)))
        .ok_or_else(|| invalid(format!("no instances for check {name}")))?;
    let failures = reports.iter().filter(|r| !r.passed).count();
    let samples = reports.iter().map(|r| r.samples).sum();
    let mut out = CheckReport::new(
        name,
        worst.1.statistic,
        worst.1.threshold,
        samples,
        format!(
            "{} instances, {failures} failing; worst #{} ({}): {}",
            reports.len(),
            worst.0,
            worst.1.name,
            worst.1.details
        ),
    );
    out.passed = failures == 0;
    Ok(out)
}

/// Maximum of a discrete one-dimensional bridge from 0 to 0 with `n` steps.
fn bridge_max_1d(total_time: f64, n: usize, buf: &mut [f64], rng: &mut RngStream) -> f64 {
    let sd = (total_time / n as f64).sqrt();
    let mut w = 0.0;
    for v in buf.iter_mut() {
        w += sd * rng.normal();
        *v = w;
    }
    let inv = 1.0 / n as f64;
    let mut best: f64 = 0.0;
    for (k, &v) in buf.iter().enumerate().take(n - 1) {
        best = best.max(v - w * ((k + 1) as f64 * inv));
    }
    best
}

/// KS distance of discrete bridge maxima against `1 - exp(-2r²/T)`.
pub fn check_bridge_max_law(
    total_time: f64,
    n: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    if !(total_time > 0.0) || n < 2 || samples == 0 {
        return Err(invalid(
            "bridge max check needs T > 0, n >= 2 and at least one sample",
        ));
    }
    let mut buf = vec![0.0; n];
    let maxima: Vec<f64> = (0..samples)
        .map(|_| bridge_max_1d(total_time, n, &mut buf, rng))
        .collect();
    let ks = ks_statistic(&maxima, |r| 1.0 - (-2.0 * r * r / total_time).exp());
    let level = (total_time / 2.0).sqrt();
    let above = maxima.iter().filter(|&&m| m > level).count() as f64 / samples as f64;
    let threshold = 0.01 + 1.5 * (total_time / n as f64).sqrt() / total_time.sqrt();
    Ok(CheckReport::new(
        "bridge_max",
        ks,
        threshold,
        samples,
        format!(
            "T={total_time} n={n}; P(M > sqrt(T/2)) = {above:.5} vs exp(-1) = {:.5}",
            (-1f64).exp()
        ),
    ))
}

/// KS distance of `Σ E²` over an `m`-gon of free loops against χ² with
/// `2m - 2` degrees of freedom.
pub fn check_chi2_increments(
    total_time: f64,
    n: usize,
    m: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    if m < 3 || n % m != 0 || samples == 0 {
        return Err(invalid(format!(
            "chi-square check needs m >= 3 dividing n (n={n}, m={m})"
        )));
    }
    let grid = TimeGrid::new(total_time, n)?;
    let mut sums = Vec::with_capacity(samples);
    for _ in 0..samples {
        let path = sample_loop(grid, rng);
        let approx = PolygonalApprox::new(&path, m, 0.0)?;
        sums.push(
            normalized_increments(&approx, total_time)
                .iter()
                .map(|e| e * e)
                .sum::<f64>(),
        );
    }
    let dof = (2 * m - 2) as u32;
    let ks = ks_statistic(&sums, |x| chi2_cdf(x, dof));
    let mean = sums.iter().sum::<f64>() / samples as f64;
    Ok(CheckReport::new(
        "chi2_increments",
        ks,
        0.02,
        samples,
        format!("T={total_time} n={n} m={m}; mean {mean:.4} vs {dof}"),
    ))
}

/// Thresholds for [`check_sup_dominance`]: log-spaced from `T/4` to `2·C₂T`.
pub fn sup_dominance_thresholds(total_time: f64) -> Vec<f64> {
    let (lo, hi) = (0.25 * total_time, 2.0 * SUP_DOMINANCE_C2 * total_time);
    (0..50)
        .map(|k| lo * (hi / lo).powf(k as f64 / 49.0))
        .collect()
}

/// `P(C₂T + Z² >= a)` for a standard normal `Z`.
pub fn dominating_tail(a: f64, total_time: f64) -> f64 {
    let shift = SUP_DOMINANCE_C2 * total_time;
    if a <= shift {
        1.0
    } else {
        2.0 * normal_sf(((a - shift) / total_time).sqrt())
    }
}

/// Empirical tail of `sup|B|²` against the Gaussian domination and against
/// the cruder bound `4 exp(-a/T)`, each with 3 binomial standard errors.
/// The statistic is the largest excess over a bound (pass when `<= 0`).
pub fn check_sup_dominance(
    total_time: f64,
    n: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    let grid = TimeGrid::new(total_time, n)?;
    if samples == 0 {
        return Err(invalid("sup dominance check needs samples"));
    }
    let mut sups: Vec<f64> = (0..samples)
        .map(|_| {
            sample_loop(grid, rng)
                .points()
                .iter()
                .map(|p| p.norm_sq())
                .fold(0.0, f64::max)
        })
        .collect();
    sups.sort_by(f64::total_cmp);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_exp = f64::NEG_INFINITY;
    for a in sup_dominance_thresholds(total_time) {
        let below = sups.partition_point(|&s| s < a);
        let p = (samples - below) as f64 / samples as f64;
        let se = binomial_se(p, samples);
        worst = worst.max(p - dominating_tail(a, total_time) - 3.0 * se);
        worst_exp = worst_exp.max(p - 4.0 * (-a / total_time).exp() - 3.0 * se);
    }
    Ok(CheckReport::new(
        "sup_dominance",
        worst.max(worst_exp),
        0.0,
        samples,
        format!(
            "T={total_time} n={n}; max excess over C2 T + Z^2 tail {worst:.3e}, over 4exp(-a/T) {worst_exp:.3e}; \
             median sup|B|^2 {:.4}",
            sups[samples / 2]
        ),
    ))
}

/// Cell-wise containment of the rasterized enclosed region in the hull of
/// the inscribed `m`-gon united with the edge stadiums. The statistic is the
/// largest distance of a region cell centre from that cover.
pub fn check_containment(path: &LoopPath, m: usize, h: f64) -> Result<CheckReport> {
    let n = path.len();
    if m == 0 || n % m != 0 {
        return Err(invalid(format!(
            "containment check needs m dividing n (n={n}, m={m})"
        )));
    }
    let approx = PolygonalApprox::new(path, m, 0.0)?;
    // A degenerate vertex set has no interior; the stadiums must then cover alone.
    let hull = convex_hull(&approx.vertices).ok();
    let region = enclosed_region(path.points(), h, DEFAULT_MAX_CELLS)?;
    let mut gap: f64 = 0.0;
    let mut outside = 0usize;
    let mut in_stadiums = 0usize;
    for c in region.cell_centers() {
        gap = gap.max(approx.cover_gap(hull.as_ref(), c));
        if !hull.as_ref().is_some_and(|hp| hp.contains(c)) {
            outside += 1;
        }
        in_stadiums += approx.stadiums.iter().filter(|q| q.contains(c)).count();
    }
    let cell = h * h;
    let bound: f64 = approx
        .lengths
        .iter()
        .zip(&approx.r)
        .map(|(l, r)| 2.0 * (l + 2.0 * r) * r)
        .sum();
    Ok(CheckReport::new(
        "containment",
        gap,
        h * SQRT_2,
        region.cell_count(),
        format!(
            "m={m} h={h}; |enc \\ conv P| ~ {:.4} <= sum |Q_i ∩ enc| ~ {:.4} <= sum 2(L_i+2R_i)R_i = {bound:.4}",
            outside as f64 * cell,
            in_stadiums as f64 * cell
        ),
    ))
}

/// `arcl² ≥ 4π|K| + π²(R_out − R_in)²` with exact radii; the statistic is
/// the relative shortfall of the left side.
pub fn check_bonnesen(hull: &ConvexPolygon) -> Result<CheckReport> {
    let r_in = chebyshev_inradius_convex(hull)?.radius;
    let r_out = outradius(hull.vertices())?.radius;
    let l = hull_arclength(hull);
    let lhs = l * l;
    let rhs = 4.0 * PI * hull.area() + PI * PI * (r_out - r_in) * (r_out - r_in);
    Ok(CheckReport::new(
        "bonnesen",
        (rhs - lhs) / lhs,
        BONNESEN_TOL,
        1,
        format!("L^2 = {lhs:.9e}, 4pi|K| + pi^2 (R_out - R_in)^2 = {rhs:.9e}, R_in = {r_in:.6}, R_out = {r_out:.6}"),
    ))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_meet(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// True when the closed polygon has no repeated vertices and no two edges
/// meet except adjacent edges at their shared vertex. Quadratic.
pub fn is_simple_polygon(points: &[Point2]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let edge = |i: usize| (points[i], points[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return false;
        }
        // Adjacent edge folding back onto this one.
        let (_, c) = edge((i + 1) % n);
        if orient(a, b, c) == 0.0 && (b - a).dot(c - b) < 0.0 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = edge(j);
            if segments_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Perimeter of a simple polygon against that of its hull plus the
/// roughness term `(√5 − 2)·min(2R²/Q, R)`.
pub fn check_polygon_arclength(polygon: &[Point2]) -> Result<CheckReport> {
    if !is_simple_polygon(polygon) {
        return Err(invalid("polygon arclength check needs a simple polygon"));
    }
    let hull = convex_hull(polygon)?;
    let r = max_local_roughness(polygon, &hull)?;
    let q = longest_facet_with_tol(&hull, hull.collinearity_tol());
    let perimeter: f64 = (0..polygon.len())
        .map(|i| polygon[i].dist(polygon[(i + 1) % polygon.len()]))
        .sum();
    let hull_len = hull_arclength(&hull);
    let rhs = hull_len + (5f64.sqrt() - 2.0) * (2.0 * r * r / q).min(r);
    Ok(CheckReport::new(
        "polygon_arclength",
        (rhs - perimeter) / perimeter,
        ROUNDOFF_TOL,
        1,
        format!("arcl(P) = {perimeter:.12}, arcl(conv P) = {hull_len:.12}, R = {r:.6}, Q = {q:.6}"),
    ))
}

/// Longest hull facet against `4√(R_in(R_out − R_in))`, with slack
/// `4√(R_out·2h√2)` covering the raster underestimate of `R_in`. Passes
/// vacuously when `R_in ≤ R_out/2`.
pub fn check_facet_bound(record: &ObservableRecord, hull: &ConvexPolygon) -> CheckReport {
    let (r_in, r_out) = (record.r_in, record.r_out);
    let slack = 4.0 * (r_out * 2.0 * record.h * SQRT_2).sqrt();
    let facet = longest_facet(hull);
    if r_in <= 0.5 * r_out {
        return CheckReport::new(
            "facet_bound",
            0.0,
            slack,
            1,
            format!("vacuous: R_in = {r_in:.6} <= R_out/2 = {:.6}", 0.5 * r_out),
        );
    }
    let bound = 4.0 * (r_in * (r_out - r_in)).sqrt();
    CheckReport::new(
        "facet_bound",
        facet - bound,
        slack,
        1,
        format!("facet {facet:.12} vs 4 sqrt(R_in (R_out - R_in)) = {bound:.12}, R_in = {r_in:.6}, R_out = {r_out:.6}"),
    )
}

/// Hull of `samples` points on a circle of radius `r_in` internally tangent
/// to the circle of radius `r_out` about the origin, plus the chord of the
/// outer circle tangent to the inner one opposite the touching point. This
/// is the configuration where the facet bound is attained.
pub fn tangent_circles_configuration(
    r_in: f64,
    r_out: f64,
    samples: usize,
) -> Result<(ConvexPolygon, Vec<Point2>)> {
    if !(r_in > 0.5 * r_out && r_in < r_out) {
        return Err(invalid(
            "tangent configuration needs r_out/2 < r_in < r_out",
        ));
    }
    let centre = Point2::new(r_out - r_in, 0.0);
    let x = centre.x - r_in;
    let y = (r_out * r_out - x * x).sqrt();
    let mut pts: Vec<Point2> = (0..samples)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / samples as f64;
            centre + Point2::new(r_in * a.cos(), r_in * a.sin())
        })
        .filter(|p| p.x > x)
        .collect();
    pts.push(Point2::new(x, y));
    pts.push(Point2::new(x, -y));
    Ok((convex_hull(&pts)?, pts))
}

/// Chain of inequalities `ΣL² ≥ (ΣL)²/m ≥ arcl(conv P)²/m ≥ 4π|conv P|/m`
/// for a closed polygon with `m` vertices. The statistic is the largest
/// relative violation among the three steps.
pub fn check_isoperimetric_chain(polygon: &[Point2]) -> Result<CheckReport> {
    let m = polygon.len();
    let hull = convex_hull(polygon)?;
    let lengths: Vec<f64> = (0..m)
        .map(|i| polygon[i].dist(polygon[(i + 1) % m]))
        .collect();
    let sum_sq: f64 = lengths.iter().map(|l| l * l).sum();
    let total: f64 = lengths.iter().sum();
    let mf = m as f64;
    let steps = [
        sum_sq,
        total * total / mf,
        hull_arclength(&hull).powi(2) / mf,
        4.0 * PI * hull.area() / mf,
    ];
    let violation = steps
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CheckReport::new(
        "isoperimetric",
        violation,
        ROUNDOFF_TOL,
        1,
        format!(
            "m={m}; chain {:.9e} >= {:.9e} >= {:.9e} >= {:.9e}",
            steps[0], steps[1], steps[2], steps[3]
        ),
    ))
}

/// Fourier coefficient `a_n` of a closed curve `f(x) = Σ a_n e^{2πinx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub n: i32,
    pub re: f64,
    pub im: f64,
}

impl FourierMode {
    pub fn new(n: i32, re: f64, im: f64) -> Self {
        FourierMode { n, re, im }
    }

    fn abs_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `I(f) = 2π² Σ n²|a_n|²`.
pub fn rate_functional(coeffs: &[FourierMode]) -> f64 {
    2.0 * PI
        * PI
        * coeffs
            .iter()
            .map(|c| (c.n as f64).powi(2) * c.abs_sq())
            .sum::<f64>()
}

/// Signed enclosed area `π Σ n|a_n|²`.
pub fn fourier_area(coeffs: &[FourierMode]) -> f64 {
    PI * coeffs.iter().map(|c| c.n as f64 * c.abs_sq()).sum::<f64>()
}

/// `f` sampled at `k/points`, `k = 0..points`.
pub fn discretize_curve(coeffs: &[FourierMode], points: usize) -> Vec<Point2> {
    (0..points)
        .map(|k| {
            let x = k as f64 / points as f64;
            coeffs.iter().fold(Point2::ORIGIN, |acc, c| {
                let (s, co) = (2.0 * PI * c.n as f64 * x).sin_cos();
                acc + Point2::new(c.re * co - c.im * s, c.re * s + c.im * co)
            })
        })
        .collect()
}

/// `I ≥ 2πA` for curves without negative modes (exact up to roundoff), and
/// the Fourier area against the shoelace area of [`SHOELACE_POINTS`]
/// samples. Each part is divided by its tolerance and the statistic is the
/// larger ratio, so the check passes when it is at most 1.
pub fn check_rate_functional(coeffs: &[FourierMode]) -> Result<CheckReport> {
    if coeffs.is_empty()
        || coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(invalid("rate functional check needs finite coefficients"));
    }
    let i = rate_functional(coeffs);
    let a = fourier_area(coeffs);
    let positive = coeffs.iter().all(|c| c.n >= 0 || c.abs_sq() == 0.0);
    let ineq = if positive && i > 0.0 {
        (2.0 * PI * a - i) / i
    } else {
        f64::NEG_INFINITY
    };
    let shoelace = signed_area(&discretize_curve(coeffs, SHOELACE_POINTS))?;
    let err = if a == 0.0 {
        shoelace.abs()
    } else {
        ((shoelace - a) / a).abs()
    };
    let stat = (ineq / ROUNDOFF_TOL).max(err / SHOELACE_TOL);
    Ok(CheckReport::new(
        "rate_functional",
        stat,
        1.0,
        1,
        format!(
            "I = {i:.12e}, A = {a:.12e}, 2piA/I - 1 = {:.3e}{}, shoelace {shoelace:.12e} rel err {err:.3e}",
            if i > 0.0 { 2.0 * PI * a / i - 1.0 } else { 0.0 },
            if positive { "" } else { " (negative modes: inequality not asserted)" }
        ),
    ))
}

/// Upper bound on `P(Q^c)`, the probability that some window of duration
/// `f` sees a displacement above `g`:
/// `(32√2 T/(√π √f g) + 16√T/(√π g)) exp(−g²/(128 f))`.
pub fn q_event_bound(total_time: f64, f: f64, g: f64) -> f64 {
    if g <= 0.0 {
        return f64::INFINITY;
    }
    let sp = PI.sqrt();
    (32.0 * SQRT_2 * total_time / (sp * f.sqrt() * g) + 16.0 * total_time.sqrt() / (sp * g))
        * (-g * g / (128.0 * f)).exp()
}

/// Whether some pair of loop times at most `w` steps apart (cyclically)
/// is more than `g` apart in space.
///
/// The loop is cut into blocks of `w` steps; any such pair lies within
/// three consecutive blocks, so pairs are only examined where the bounding
/// box of three blocks has a diagonal above `g`.
pub fn has_large_window_displacement(points: &[Point2], w: usize, g: f64) -> bool {
    let n = points.len();
    let w = w.clamp(1, n - 1);
    let nb = n.div_ceil(w);
    let boxes: Vec<[f64; 4]> = (0..nb)
        .map(|k| {
            points[k * w..((k + 1) * w).min(n)].iter().fold(
                [
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                ],
                |b, p| [b[0].min(p.x), b[1].max(p.x), b[2].min(p.y), b[3].max(p.y)],
            )
        })
        .collect();
    let g2 = g * g;
    for k in 0..nb {
        let mut b = boxes[k];
        for d in 1..3.min(nb) {
            let o = boxes[(k + d) % nb];
            b = [
                b[0].min(o[0]),
                b[1].max(o[1]),
                b[2].min(o[2]),
                b[3].max(o[3]),
            ];
        }
        let (dx, dy) = (b[1] - b[0], b[3] - b[2]);
        if dx * dx + dy * dy <= g2 {
            continue;
        }
        for t in k * w..((k + 1) * w).min(n) {
            let p = points[t];
            if (1..=w).any(|s| (points[(t + s) % n] - p).norm_sq() > g2) {
                return true;
            }
        }
    }
    false
}

/// Empirical frequency of `Q^c` over free loops against [`q_event_bound`]
/// plus 3 binomial standard errors. Windows wrap around the loop.
pub fn check_q_event(
    total_time: f64,
    n: usize,
    samples: usize,
    f: f64,
    g: f64,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    if !(f > 0.0 && f <= total_time) {
        return Err(invalid(format!(
            "window length f = {f} must lie in (0, T = {total_time}]"
        )));
    }
    if g < 0.0 || samples == 0 {
        return Err(invalid("q-event check needs g >= 0 and samples"));
    }
    let grid = TimeGrid::new(total_time, n)?;
    let w = (f / grid.dt()).floor() as usize;
    let hits = (0..samples)
        .filter(|_| has_large_window_displacement(sample_loop(grid, rng).points(), w, g))
        .count();
    let p = hits as f64 / samples as f64;
    let bound = q_event_bound(total_time, f, g);
    let se = binomial_se(p, samples);
    let (stat, threshold) = if bound.is_finite() {
        (p - 3.0 * se - bound, 0.0)
    } else {
        (0.0, 0.0)
    };
    Ok(CheckReport::new(
        "q_event",
        stat,
        threshold,
        samples,
        format!(
            "T={total_time} n={n} f={f} g={g}; frequency {p:.5} (se {se:.2e}) vs bound {bound:.5e}"
        ),
    ))
}

/// Parameters of the chain-versus-rejection comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub total_time: f64,
    pub n: usize,
    /// Free loops used to locate the area quantile.
    pub pilot: usize,
    /// Target probability of the constrained event under the free law.
    pub event_probability: f64,
    pub samples: usize,
    pub burn_in: u64,
    pub thin: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            total_time: 1.0,
            n: 12,
            pilot: 20_000,
            event_probability: 0.05,
            samples: 10_000,
            burn_in: 1_000,
            thin: 1,
        }
    }
}

/// Conditioned samples from the bridge-resampling chain against exact
/// rejection samples of the free law, compared through the two-sample KS
/// distances of area and maximal modulus.
pub fn check_chain_oracle(cfg: &OracleConfig, rng: &mut RngStream) -> Result<CheckReport> {
    if cfg.samples == 0 || cfg.pilot == 0 || cfg.thin == 0 {
        return Err(invalid(
            "chain oracle needs samples, pilot loops and thin >= 1",
        ));
    }
    let mut chain_cfg = ChainConfig::new(cfg.total_time, cfg.n);
    chain_cfg.safety_margin = 0.0;
    let grid = chain_cfg.grid()?;
    let mut ws = crate::geometry::AreaWorkspace::new();
    let mut free_rng = rng.substream(1);
    let mut pilot = Vec::with_capacity(cfg.pilot);
    for _ in 0..cfg.pilot {
        pilot.push(ws.area(
            sample_loop(grid, &mut free_rng).points(),
            chain_cfg.h,
            chain_cfg.max_cells,
        )?);
    }
    pilot.sort_by(f64::total_cmp);
    let q = 1.0 - cfg.event_probability;
    let target = pilot[((q * cfg.pilot as f64) as usize).min(cfg.pilot - 1)];
    chain_cfg.area_target = target;

    let mut rej_area = Vec::with_capacity(cfg.samples);
    let mut rej_mod = Vec::with_capacity(cfg.samples);
    let mut drawn = 0usize;
    while rej_area.len() < cfg.samples {
        let path = sample_loop(grid, &mut free_rng);
        drawn += 1;
        let a = ws.area(path.points(), chain_cfg.h, chain_cfg.max_cells)?;
        if a >= target {
            rej_area.push(a);
            rej_mod.push(path.max_modulus());
        }
    }

    let mut chain_rng = rng.substream(2);
    let mut chain = Chain::new(chain_cfg)?;
    for _ in 0..cfg.burn_in {
        chain.sweep(&mut chain_rng)?;
    }
    let mut ch_area = Vec::with_capacity(cfg.samples);
    let mut ch_mod = Vec::with_capacity(cfg.samples);
    while ch_area.len() < cfg.samples {
        for _ in 0..cfg.thin {
            chain.sweep(&mut chain_rng)?;
        }
        ch_area.push(chain.state().area());
        ch_mod.push(chain.state().path().max_modulus());
    }
    let ks_area = ks_two_sample(&ch_area, &rej_area);
    let ks_mod = ks_two_sample(&ch_mod, &rej_mod);
    Ok(CheckReport::new(
        "chain_oracle",
        ks_area.max(ks_mod),
        0.05,
        cfg.samples,
        format!(
            "n={} T={}; area target {target:.5} (acceptance {:.4} over {drawn} free loops); KS area {ks_area:.4}, \
             KS max modulus {ks_mod:.4}; chain acceptance rate {:.4}",
            cfg.n,
            cfg.total_time,
            cfg.samples as f64 / drawn as f64,
            chain.state().acceptance_rate()
        ),
    ))
}
