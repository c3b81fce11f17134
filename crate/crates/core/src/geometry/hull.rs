use serde::{Deserialize, Serialize};

use super::{dist_point_segment, shoelace, Point2, Segment};
use crate::error::{invalid, Error, Result};

/// Turn angle (radians) below which a hull vertex is dropped as collinear.
pub const DEFAULT_HULL_TOL: f64 = 1e-9;
/// Turn angle (radians) below which adjacent hull edges merge into one facet.
pub const DEFAULT_FACET_TOL: f64 = 1e-6;

/// Relative containment slack used when checking points against a hull.
const CONTAINMENT_SLACK: f64 = 1e-9;

/// Counterclockwise convex polygon with at least three strictly convex
/// vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    collinearity_tol: f64,
    diameter: f64,
}

/// `true` when the turn a→b→c is counterclockwise by more than `tol` radians.
#[inline]
fn strict_left_turn(a: Point2, b: Point2, c: Point2, tol: f64) -> bool {
    let u = b - a;
    let v = c - b;
    let cr = u.cross(v);
    cr > tol * u.norm() * v.norm() && cr > 0.0
}

/// Andrew's monotone chain with the default collinearity tolerance.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    convex_hull_with_tol(points, DEFAULT_HULL_TOL)
}

pub fn convex_hull_with_tol(points: &[Point2], collinearity_tol: f64) -> Result<ConvexPolygon> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "convex hull needs at least 3 points, got {}",
            points.len()
        )));
    }
    if !(collinearity_tol >= 0.0 && collinearity_tol < std::f64::consts::FRAC_PI_2) {
        return Err(invalid(format!(
            "collinearity tolerance {collinearity_tol} out of range"
        )));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(invalid(format!("non-finite point {p:?}")));
    }
    let tol = collinearity_tol.sin();

    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    sorted.dedup();
    let first = sorted[0];
    let last = *sorted.last().unwrap();
    if sorted.len() < 3 {
        return Err(Error::DegenerateHull { a: first, b: last });
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(2 * sorted.len());
    for &p in &sorted {
        while hull.len() >= 2
            && !strict_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p, tol)
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && !strict_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p, tol)
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    // The chain joins at the extreme points; clean any residual flat turns
    // there (or everywhere, when the tolerance is coarse).
    let mut changed = true;
    while changed && hull.len() >= 3 {
        changed = false;
        let n = hull.len();
        for i in 0..n {
            let a = hull[(i + n - 1) % n];
            let b = hull[i];
            let c = hull[(i + 1) % n];
            if !strict_left_turn(a, b, c, tol) {
                hull.remove(i);
                changed = true;
                break;
            }
        }
    }

    if hull.len() < 3 || shoelace(&hull) <= 0.0 {
        return Err(Error::DegenerateHull { a: first, b: last });
    }
    let diameter = vertex_diameter(&hull);
    Ok(ConvexPolygon {
        vertices: hull,
        collinearity_tol,
        diameter,
    })
}

fn vertex_diameter(v: &[Point2]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max(v[i].dist(v[j]));
        }
    }
    best
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn collinearity_tol(&self) -> f64 {
        self.collinearity_tol
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Distance from `p` to the interior side of every edge line, minimised:
    /// positive inside, negative outside.
    pub fn signed_depth(&self, p: Point2) -> f64 {
        self.edges()
            .map(|e| {
                let d = e.b - e.a;
                d.cross(p - e.a) / d.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from `p` to the boundary polyline.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        let depth = self.signed_depth(p);
        if depth >= 0.0 {
            depth
        } else {
            self.edges()
                .map(|e| dist_point_segment(p, &e))
                .fold(f64::INFINITY, f64::min)
        }
    }

    pub(crate) fn containment_slack(&self) -> f64 {
        CONTAINMENT_SLACK * self.diameter().max(1.0)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.signed_depth(p) >= -self.containment_slack()
    }
}

/// Sum of edge lengths.
pub fn hull_arclength(hull: &ConvexPolygon) -> f64 {
    hull.edges().map(|e| e.length()).sum()
}

/// Longest straight piece of the hull boundary, using [`DEFAULT_FACET_TOL`].
pub fn longest_facet(hull: &ConvexPolygon) -> f64 {
    longest_facet_with_tol(hull, DEFAULT_FACET_TOL)
}

/// Adjacent edges meeting at a turn angle below `tol` are merged; the facet
/// length is the chord between the ends of the merged run.
pub fn longest_facet_with_tol(hull: &ConvexPolygon, tol: f64) -> f64 {
    let v = hull.vertices();
    let n = v.len();
    let turn = |i: usize| {
        let u = v[i] - v[(i + n - 1) % n];
        let w = v[(i + 1) % n] - v[i];
        u.cross(w).atan2(u.dot(w))
    };
    let breaks: Vec<usize> = (0..n).filter(|&i| turn(i) >= tol).collect();
    if breaks.is_empty() {
        // Every corner is flatter than tol; no facet structure to merge.
        return hull.edges().map(|e| e.length()).fold(0.0, f64::max);
    }
    let mut best: f64 = 0.0;
    for (k, &start) in breaks.iter().enumerate() {
        let end = breaks[(k + 1) % breaks.len()];
        best = best.max(v[start].dist(v[end]));
    }
    if breaks.len() == 1 {
        // A single corner: the whole boundary is one run back to itself.
        best = hull.edges().map(|e| e.length()).fold(0.0, f64::max);
    }
    best
}

/// Maximal distance of a loop vertex from the hull boundary.
pub fn max_local_roughness(points: &[Point2], hull: &ConvexPolygon) -> Result<f64> {
    let slack = hull.containment_slack();
    let mut best: f64 = 0.0;
    for (index, &p) in points.iter().enumerate() {
        let depth = hull.signed_depth(p);
        if depth < -slack {
            return Err(Error::InconsistentHull {
                index,
                distance: -depth,
            });
        }
        best = best.max(depth);
    }
    Ok(best)
}
