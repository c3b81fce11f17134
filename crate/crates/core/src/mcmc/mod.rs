//! Area-conditioned loop sampler: a Markov chain that resamples a random arc
//! of the loop with a Brownian bridge and keeps the proposal only if the
//! enclosed area stays above the threshold.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    enclosed_area, enclosed_region, AreaWorkspace, Point2, RasterRegion, DEFAULT_MAX_CELLS,
};
use crate::sampler::{fill_bridge, LoopPath, RngStream, TimeGrid};
use crate::stats;

/// Sweeps of burn-in per unit of area autocorrelation time.
pub const BURN_IN_PER_IACT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    #[serde(rename = "T")]
    pub total_time: f64,
    pub n: usize,
    pub h: f64,
    pub area_target: f64,
    pub safety_margin: f64,
    pub init_inflation: f64,
    pub max_cells: usize,
}

impl ChainConfig {
    /// Defaults: `h = T/256`, target `πT²`, margin `6h·πT`, inflation 0.05.
    ///
    /// The margin is twice the raster area bias bound `3h·arclength` at the
    /// arclength `2πT` of the limiting circle.
    pub fn new(total_time: f64, n: usize) -> Self {
        let h = total_time / 256.0;
        ChainConfig {
            total_time,
            n,
            h,
            area_target: PI * total_time * total_time,
            safety_margin: 6.0 * h * PI * total_time,
            init_inflation: 0.05,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    /// Smallest raster area a state may have.
    pub fn threshold(&self) -> f64 {
        self.area_target + self.safety_margin
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.total_time, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.n < 3 {
            return Err(invalid(format!("chain needs n >= 3, got {}", self.n)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid(format!(
                "cell size must be positive, got {}",
                self.h
            )));
        }
        if !(self.area_target > 0.0 && self.area_target.is_finite()) {
            return Err(invalid(format!(
                "area target must be positive, got {}",
                self.area_target
            )));
        }
        if !(self.safety_margin >= 0.0 && self.safety_margin.is_finite()) {
            return Err(invalid(format!(
                "safety margin must be >= 0, got {}",
                self.safety_margin
            )));
        }
        if !(self.init_inflation > 0.0 && self.init_inflation.is_finite()) {
            return Err(invalid(format!(
                "init inflation must be > 0, got {}",
                self.init_inflation
            )));
        }
        Ok(())
    }

    /// Circumradius of the starting n-gon; its exact area is
    /// `(1 + init_inflation)² · area_target`.
    pub fn init_radius(&self) -> f64 {
        let n = self.n as f64;
        (1.0 + self.init_inflation) * (2.0 * self.area_target / (n * (2.0 * PI / n).sin())).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    path: LoopPath,
    cells: usize,
    area: f64,
    pub sweep: u64,
    pub accepted: u64,
    pub proposed: u64,
}

impl ChainState {
    pub fn path(&self) -> &LoopPath {
        &self.path
    }

    /// Cached raster area of the current loop.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    /// Rebuilds the full raster region of the current loop. The chain only
    /// caches its cell count; the mask is reconstructed on demand.
    pub fn region(&self, config: &ChainConfig) -> Result<RasterRegion> {
        enclosed_region(self.path.points(), config.h, config.max_cells)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalRecord {
    pub i: usize,
    pub j: usize,
    pub arc_len: usize,
    pub accepted: bool,
    pub new_area: f64,
}

/// Regular n-gon of the configured radius, translated so vertex 0 sits at
/// the origin.
pub fn init_state(config: &ChainConfig) -> Result<ChainState> {
    config.validate()?;
    let grid = config.grid()?;
    let r0 = config.init_radius();
    let n = config.n;
    let first = Point2::new(r0, 0.0);
    let points: Vec<Point2> = (0..n)
        .map(|k| {
            if k == 0 {
                return Point2::ORIGIN;
            }
            let a = 2.0 * PI * k as f64 / n as f64;
            Point2::new(r0 * a.cos(), r0 * a.sin()) - first
        })
        .collect();
    let path = LoopPath::new(grid, points)?;
    let mut ws = AreaWorkspace::new();
    let cells = ws.cell_count(path.points(), config.h, config.max_cells)?;
    let area = cells as f64 * config.h * config.h;
    if area < config.threshold() {
        return Err(Error::InitFailure {
            area,
            required: config.threshold(),
        });
    }
    Ok(ChainState {
        path,
        cells,
        area,
        sweep: 0,
        accepted: 0,
        proposed: 0,
    })
}

/// A running chain: state plus reusable buffers.
pub struct Chain {
    config: ChainConfig,
    state: ChainState,
    ws: AreaWorkspace,
    candidate: Vec<Point2>,
    bridge: Vec<Point2>,
}

impl Chain {
    pub fn new(config: ChainConfig) -> Result<Self> {
        let state = init_state(&config)?;
        Ok(Chain::from_state(config, state))
    }

    pub fn from_state(config: ChainConfig, state: ChainState) -> Self {
        let n = config.n;
        Chain {
            config,
            state,
            ws: AreaWorkspace::new(),
            candidate: Vec::with_capacity(n),
            bridge: Vec::with_capacity(n + 1),
        }
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn into_state(self) -> ChainState {
        self.state
    }

    /// One proposal on a uniformly drawn ordered pair `i != j`.
    pub fn step(&mut self, rng: &mut RngStream) -> Result<ProposalRecord> {
        let n = self.config.n;
        let i = rng.index(n);
        let mut j = rng.index(n - 1);
        if j >= i {
            j += 1;
        }
        self.propose(i, j, rng)
    }

    /// Resamples the forward arc `i -> j` (indices modulo `n`).
    pub fn propose(&mut self, i: usize, j: usize, rng: &mut RngStream) -> Result<ProposalRecord> {
        let n = self.config.n;
        if i >= n || j >= n || i == j {
            return Err(invalid(format!("bad proposal pair ({i}, {j}) for n = {n}")));
        }
        let arc_len = (j + n - i) % n;
        let pts = self.state.path.points();
        let dt = self.state.path.grid().dt();

        self.bridge.resize(arc_len + 1, Point2::ORIGIN);
        fill_bridge(pts[i], pts[j], arc_len as f64 * dt, &mut self.bridge, rng);

        self.candidate.clear();
        self.candidate.extend_from_slice(pts);
        for k in 1..arc_len {
            self.candidate[(i + k) % n] = self.bridge[k];
        }
        // Index 0 lies strictly inside the arc: re-pin the loop at the origin.
        if i + arc_len > n {
            let shift = self.candidate[0];
            for p in self.candidate.iter_mut() {
                *p = *p - shift;
            }
            self.candidate[0] = Point2::ORIGIN;
        }

        let cells = self
            .ws
            .cell_count(&self.candidate, self.config.h, self.config.max_cells)?;
        let new_area = cells as f64 * self.config.h * self.config.h;
        let accepted = new_area >= self.config.threshold();
        self.state.proposed += 1;
        if accepted {
            self.state.accepted += 1;
            self.state.cells = cells;
            self.state.area = new_area;
            std::mem::swap(&mut self.candidate, self.state.path.points_vec_mut());
        }
        Ok(ProposalRecord {
            i,
            j,
            arc_len,
            accepted,
            new_area,
        })
    }

    /// `n` proposals.
    pub fn sweep(&mut self, rng: &mut RngStream) -> Result<()> {
        for _ in 0..self.config.n {
            self.step(rng)?;
        }
        self.state.sweep += 1;
        Ok(())
    }
}

/// Result of [`run_chain`]. Serializes to
/// `{config, sweeps, acceptance_rate, iact_area, seed, stream_id}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub config: ChainConfig,
    pub sweeps: u64,
    pub acceptance_rate: f64,
    pub iact_area: f64,
    pub seed: u64,
    pub stream_id: u64,
    /// Area after every sweep.
    #[serde(skip)]
    pub area_trace: Vec<f64>,
}

impl ChainSummary {
    /// Suggested burn-in in sweeps from the measured autocorrelation time.
    pub fn recommended_burn_in(&self) -> u64 {
        (BURN_IN_PER_IACT * self.iact_area).ceil() as u64
    }
}

/// Runs `sweeps` sweeps from the initial n-gon, handing the state to `sink`
/// after every `thin`-th sweep.
pub fn run_chain<F>(
    config: &ChainConfig,
    sweeps: u64,
    thin: u64,
    rng: &mut RngStream,
    mut sink: F,
) -> Result<ChainSummary>
where
    F: FnMut(&ChainState) -> Result<()>,
{
    if sweeps == 0 {
        return Err(invalid("run_chain needs at least one sweep"));
    }
    if thin == 0 {
        return Err(invalid("thin must be at least 1"));
    }
    let mut chain = Chain::new(config.clone())?;
    let mut trace = Vec::with_capacity(sweeps as usize);
    for s in 1..=sweeps {
        chain.sweep(rng)?;
        trace.push(chain.state.area);
        if s % thin == 0 {
            assert!(
                chain.state.area >= config.threshold(),
                "emitted state violates the area constraint"
            );
            sink(&chain.state)?;
        }
    }
    let state = chain.into_state();
    Ok(ChainSummary {
        config: config.clone(),
        sweeps,
        acceptance_rate: state.acceptance_rate(),
        iact_area: stats::iact(&trace),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
        area_trace: trace,
    })
}

/// Raster area recomputed from scratch, for cache checks.
pub fn recompute_area(state: &ChainState, config: &ChainConfig) -> Result<f64> {
    enclosed_area(state.path.points(), config.h, config.max_cells)
}
