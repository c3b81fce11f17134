//! Rasterized enclosed region of a closed polygonal curve.
//!
//! The curve is drawn into a padded grid by conservative segment traversal
//! (every cell a segment touches is marked). The exterior is the 4-connected
//! component of unmarked cells containing the grid border; the region is
//! everything else, curve cells included.
//!
//! Two fill routes share the same curve marking: [`enclosed_region`] builds a
//! dense mask with a stack flood fill, and [`AreaWorkspace`] counts the same
//! cells by flooding row runs, which is what the sampler uses per proposal.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Disk, Point2};
use crate::error::{invalid, Error, Result};

/// Cells of padding on each side of the curve bounding box.
const PAD: f64 = 2.0;
/// Parametric tolerance under which a segment is treated as passing through
/// a cell corner.
const CORNER_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    origin: Point2,
    h: f64,
    width: usize,
    height: usize,
}

impl Frame {
    fn for_curve(points: &[Point2], h: f64, max_cells: usize) -> Result<Frame> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!(
                "cell size must be positive and finite, got {h}"
            )));
        }
        if points.is_empty() {
            return Err(invalid("cannot rasterize an empty curve"));
        }
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            if !p.is_finite() {
                return Err(invalid(format!("non-finite curve point {p:?}")));
            }
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let origin = Point2::new(lo.x - PAD * h, lo.y - PAD * h);
        let w = ((hi.x - origin.x) / h).floor() + PAD + 1.0;
        let ht = ((hi.y - origin.y) / h).floor() + PAD + 1.0;
        let cells = w * ht;
        if !(cells <= max_cells as f64) {
            return Err(Error::ResourceLimit {
                cells: if cells.is_finite() {
                    cells as usize
                } else {
                    usize::MAX
                },
                budget: max_cells,
            });
        }
        Ok(Frame {
            origin,
            h,
            width: w as usize,
            height: ht as usize,
        })
    }

    fn words_per_row(&self) -> usize {
        self.width.div_ceil(64)
    }
}

/// Bit grid of curve cells.
#[derive(Debug, Default)]
struct CurveBits {
    words: Vec<u64>,
    wpr: usize,
}

impl CurveBits {
    fn reset(&mut self, frame: &Frame) {
        self.wpr = frame.words_per_row();
        self.words.clear();
        self.words.resize(self.wpr * frame.height, 0);
    }

    #[inline]
    fn set(&mut self, cx: i64, cy: i64) {
        let (x, y) = (cx as usize, cy as usize);
        self.words[y * self.wpr + x / 64] |= 1u64 << (x % 64);
    }

    #[inline]
    fn get(&self, x: usize, y: usize) -> bool {
        self.words[y * self.wpr + x / 64] >> (x % 64) & 1 == 1
    }

    fn draw_closed(&mut self, frame: &Frame, points: &[Point2]) {
        let n = points.len();
        let inv_h = 1.0 / frame.h;
        let to_grid = |p: Point2| {
            (
                (p.x - frame.origin.x) * inv_h,
                (p.y - frame.origin.y) * inv_h,
            )
        };
        let mut prev = to_grid(points[n - 1]);
        for &p in points {
            let cur = to_grid(p);
            self.draw_segment(prev, cur);
            prev = cur;
        }
    }

    /// Grid traversal of one segment in cell units; near-corner crossings
    /// mark both side cells.
    fn draw_segment(&mut self, (x0, y0): (f64, f64), (x1, y1): (f64, f64)) {
        // Grid coordinates are at least PAD, so truncation is floor.
        let mut cx = x0 as i64;
        let mut cy = y0 as i64;
        let ex = x1 as i64;
        let ey = y1 as i64;
        self.set(cx, cy);
        if cx == ex && cy == ey {
            return;
        }
        let sx = (ex - cx).signum();
        let sy = (ey - cy).signum();
        let mut rx = (ex - cx).abs();
        let mut ry = (ey - cy).abs();
        let dx = (x1 - x0).abs();
        let dy = (y1 - y0).abs();
        let first = |c: i64, s: i64, u: f64, d: f64| -> f64 {
            match s {
                1 => ((c + 1) as f64 - u) / d,
                -1 => (u - c as f64) / d,
                _ => f64::INFINITY,
            }
        };
        let mut tx = first(cx, sx, x0, dx);
        let mut ty = first(cy, sy, y0, dy);
        let step_x = if sx != 0 { 1.0 / dx } else { f64::INFINITY };
        let step_y = if sy != 0 { 1.0 / dy } else { f64::INFINITY };
        while rx > 0 || ry > 0 {
            if rx > 0 && (ry == 0 || tx < ty - CORNER_EPS) {
                cx += sx;
                tx += step_x;
                rx -= 1;
            } else if ry > 0 && (rx == 0 || ty < tx - CORNER_EPS) {
                cy += sy;
                ty += step_y;
                ry -= 1;
            } else {
                self.set(cx + sx, cy);
                self.set(cx, cy + sy);
                cx += sx;
                cy += sy;
                tx += step_x;
                ty += step_y;
                rx -= 1;
                ry -= 1;
            }
            self.set(cx, cy);
        }
    }
}

/// Reusable buffers for repeated area evaluation.
///
/// Produces exactly the cell count of [`enclosed_region`] without building a
/// dense mask: free cells are grouped into horizontal runs and the exterior
/// is found by flooding runs that overlap between adjacent rows.
#[derive(Debug, Default)]
pub struct AreaWorkspace {
    bits: CurveBits,
    runs: Vec<(u32, u32)>,
    row_start: Vec<usize>,
    parent: Vec<u32>,
}

impl AreaWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of region cells and the cell size used.
    pub fn cell_count(&mut self, points: &[Point2], h: f64, max_cells: usize) -> Result<usize> {
        if points.len() < 3 {
            return Err(invalid("enclosed region needs a loop of at least 3 points"));
        }
        let frame = Frame::for_curve(points, h, max_cells)?;
        self.bits.reset(&frame);
        self.bits.draw_closed(&frame, points);
        self.collect_runs(&frame);
        let exterior = self.flood_runs();
        Ok(frame.width * frame.height - exterior)
    }

    /// Region area, `cell_count * h^2`.
    pub fn area(&mut self, points: &[Point2], h: f64, max_cells: usize) -> Result<f64> {
        Ok(self.cell_count(points, h, max_cells)? as f64 * h * h)
    }

    fn collect_runs(&mut self, frame: &Frame) {
        self.runs.clear();
        self.row_start.clear();
        let wpr = self.bits.wpr;
        for y in 0..frame.height {
            self.row_start.push(self.runs.len());
            let row = &self.bits.words[y * wpr..(y + 1) * wpr];
            let mut col = 0usize;
            for (wi, &word) in row.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let c = wi * 64 + w.trailing_zeros() as usize;
                    if c > col {
                        self.runs.push((col as u32, c as u32));
                    }
                    col = c + 1;
                    w &= w - 1;
                }
            }
            if col < frame.width {
                self.runs.push((col as u32, frame.width as u32));
            }
        }
        self.row_start.push(self.runs.len());
    }

    /// Cells in the 4-connected free component touching row 0. Runs of
    /// adjacent rows that share a column are joined in a union-find forest.
    fn flood_runs(&mut self) -> usize {
        let rows = self.row_start.len() - 1;
        self.parent.clear();
        self.parent.extend(0..self.runs.len() as u32);
        for y in 1..rows {
            let (mut a, a_end) = (self.row_start[y - 1], self.row_start[y]);
            let (mut b, b_end) = (self.row_start[y], self.row_start[y + 1]);
            while a < a_end && b < b_end {
                let (sa, ea) = self.runs[a];
                let (sb, eb) = self.runs[b];
                if sa < eb && sb < ea {
                    union(&mut self.parent, a as u32, b as u32);
                }
                if ea <= eb {
                    a += 1;
                }
                if eb <= ea {
                    b += 1;
                }
            }
        }
        // Row 0 lies in the padding and is a single free run, and roots are
        // the smallest index of their tree, so run 0 is the exterior root.
        // Parents precede children, so one forward pass resolves every run.
        let mut exterior = 0usize;
        for r in 0..self.runs.len() {
            let p = self.parent[self.parent[r] as usize];
            self.parent[r] = p;
            if p == 0 {
                let (s, e) = self.runs[r];
                exterior += (e - s) as usize;
            }
        }
        exterior
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let g = parent[parent[x as usize] as usize];
        parent[x as usize] = g;
        x = g;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    // Lower index as root keeps the forest shallow for row-ordered input.
    if ra < rb {
        parent[rb as usize] = ra;
    } else if rb < ra {
        parent[ra as usize] = rb;
    }
}

/// Area of the rasterized enclosed region; see [`AreaWorkspace`].
pub fn enclosed_area(points: &[Point2], h: f64, max_cells: usize) -> Result<f64> {
    AreaWorkspace::new().area(points, h, max_cells)
}

/// JSON sidecar describing a raster dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    pub origin: Point2,
    pub h: f64,
    /// `[width, height]` in cells.
    pub dims: [usize; 2],
    pub cell_count: usize,
}

/// Rasterized enclosed set of a closed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterRegion {
    origin: Point2,
    h: f64,
    width: usize,
    height: usize,
    mask: Vec<bool>,
    cell_count: usize,
}

/// Rasterizes the region enclosed by the closed polygon through `points`.
pub fn enclosed_region(points: &[Point2], h: f64, max_cells: usize) -> Result<RasterRegion> {
    if points.len() < 3 {
        return Err(invalid("enclosed region needs a loop of at least 3 points"));
    }
    let frame = Frame::for_curve(points, h, max_cells)?;
    let mut bits = CurveBits::default();
    bits.reset(&frame);
    bits.draw_closed(&frame, points);

    let (w, ht) = (frame.width, frame.height);
    let mut exterior = vec![false; w * ht];
    let mut stack = vec![(0usize, 0usize)];
    exterior[0] = true;
    while let Some((x, y)) = stack.pop() {
        let mut visit = |nx: usize, ny: usize| {
            let i = ny * w + nx;
            if !exterior[i] && !bits.get(nx, ny) {
                exterior[i] = true;
                stack.push((nx, ny));
            }
        };
        if x > 0 {
            visit(x - 1, y);
        }
        if x + 1 < w {
            visit(x + 1, y);
        }
        if y > 0 {
            visit(x, y - 1);
        }
        if y + 1 < ht {
            visit(x, y + 1);
        }
    }
    let mask: Vec<bool> = exterior.into_iter().map(|e| !e).collect();
    let cell_count = mask.iter().filter(|&&m| m).count();
    Ok(RasterRegion {
        origin: frame.origin,
        h,
        width: w,
        height: ht,
        mask,
        cell_count,
    })
}

impl RasterRegion {
    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn area(&self) -> f64 {
        self.cell_count as f64 * self.h * self.h
    }

    pub fn is_set(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point2 {
        Point2::new(
            self.origin.x + (x as f64 + 0.5) * self.h,
            self.origin.y + (y as f64 + 0.5) * self.h,
        )
    }

    /// Centers of all region cells, row-major from the bottom row.
    pub fn cell_centers(&self) -> impl Iterator<Item = Point2> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width)
                .filter(move |&x| self.is_set(x, y))
                .map(move |x| self.cell_center(x, y))
        })
    }

    pub fn header(&self) -> RasterHeader {
        RasterHeader {
            origin: self.origin,
            h: self.h,
            dims: [self.width, self.height],
            cell_count: self.cell_count,
        }
    }

    /// Binary PGM (P5), 255 for region cells. The top image row is the
    /// highest grid row.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let mut row = vec![0u8; self.width];
        for y in (0..self.height).rev() {
            for (x, px) in row.iter_mut().enumerate() {
                *px = if self.is_set(x, y) { 255 } else { 0 };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    /// Rebuilds a region from its JSON header and PGM dump.
    pub fn from_pgm<R: BufRead>(header: &RasterHeader, mut input: R) -> Result<RasterRegion> {
        let (width, height) = read_pgm_header(&mut input)?;
        if [width, height] != header.dims {
            return Err(Error::Format(format!(
                "PGM is {width}x{height} but header says {}x{}",
                header.dims[0], header.dims[1]
            )));
        }
        if !(header.h > 0.0 && header.h.is_finite()) || !header.origin.is_finite() {
            return Err(Error::Format(
                "header has invalid origin or cell size".into(),
            ));
        }
        let len = width
            .checked_mul(height)
            .filter(|&l| l <= super::DEFAULT_MAX_CELLS)
            .ok_or_else(|| Error::Format("PGM dimensions too large".into()))?;
        let mut pixels = vec![0u8; len];
        input
            .read_exact(&mut pixels)
            .map_err(|e| Error::Format(format!("truncated PGM payload: {e}")))?;
        let mut mask = vec![false; len];
        for (row_idx, row) in pixels.chunks_exact(width.max(1)).enumerate() {
            let y = height - 1 - row_idx;
            for (x, &px) in row.iter().enumerate() {
                mask[y * width + x] = px != 0;
            }
        }
        let cell_count = mask.iter().filter(|&&m| m).count();
        if cell_count != header.cell_count {
            return Err(Error::Format(format!(
                "PGM has {cell_count} set cells but header says {}",
                header.cell_count
            )));
        }
        Ok(RasterRegion {
            origin: header.origin,
            h: header.h,
            width,
            height,
            mask,
            cell_count,
        })
    }
}

fn read_pgm_header<R: BufRead>(input: &mut R) -> Result<(usize, usize)> {
    // Tokens: magic, width, height, maxval; '#' comments run to end of line.
    let mut tokens: Vec<String> = Vec::with_capacity(4);
    let mut cur = String::new();
    let mut byte = [0u8; 1];
    let mut in_comment = false;
    while tokens.len() < 4 {
        if input.read(&mut byte)? == 0 {
            return Err(Error::Format("truncated PGM header".into()));
        }
        let c = byte[0];
        if in_comment {
            in_comment = c != b'\n' && c != b'\r';
            continue;
        }
        if c == b'#' {
            in_comment = true;
        } else if c.is_ascii_whitespace() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
        } else {
            if cur.len() >= 20 {
                return Err(Error::Format("PGM header token too long".into()));
            }
            cur.push(c as char);
        }
    }
    if tokens[0] != "P5" {
        return Err(Error::Format(format!(
            "expected P5 magic, got {:?}",
            tokens[0]
        )));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad PGM header number {s:?}")))
    };
    let width = parse(&tokens[1])?;
    let height = parse(&tokens[2])?;
    let maxval = parse(&tokens[3])?;
    if maxval != 255 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    Ok((width, height))
}

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            // z[0] is -inf, so k never underflows.
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *dq = diff * diff + f[p];
    }
}

/// Squared distance (in cells) from every cell center to the nearest
/// non-region cell center.
pub(crate) fn squared_distance_to_complement(region: &RasterRegion) -> Vec<f64> {
    const FAR: f64 = 1e30;
    let (w, ht) = (region.width, region.height);
    let mut grid: Vec<f64> = region
        .mask
        .iter()
        .map(|&m| if m { FAR } else { 0.0 })
        .collect();
    let n = w.max(ht);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for x in 0..w {
        for y in 0..ht {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..ht], &mut d[..ht], &mut v, &mut z);
        for y in 0..ht {
            grid[y * w + x] = d[y];
        }
    }
    for y in 0..ht {
        f[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        edt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&d[..w]);
    }
    grid
}

/// Largest disk inside the region, from an exact Euclidean distance
/// transform. The radius is the center distance to the nearest outside cell
/// less half a cell.
pub fn inradius(region: &RasterRegion) -> Result<Disk> {
    if region.cell_count == 0 {
        return Err(Error::EmptyRegion);
    }
    let dist2 = squared_distance_to_complement(region);
    let (mut best, mut best_i) = (-1.0, 0usize);
    for (i, &d2) in dist2.iter().enumerate() {
        if region.mask[i] && d2 > best {
            best = d2;
            best_i = i;
        }
    }
    let (x, y) = (best_i % region.width, best_i / region.width);
    let radius = ((best.sqrt() - 0.5) * region.h).max(0.0);
    Ok(Disk {
        center: region.cell_center(x, y),
        radius,
    })
}
