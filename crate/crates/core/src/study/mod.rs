//! Multi-chain scaling study: runs independent conditioned chains for a
//! list of loop durations, measures every thinned state, and fits power
//! laws in `T` to the per-chain means of the main observables.

mod svg;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::io::{write_records_csv, OutputMeta};
use crate::mcmc::{run_chain, ChainConfig, ChainSummary};
use crate::observables::{measure, scaling_fit, ObservableRecord, SampleTag, ScalingFit};
use crate::sampler::RngStream;

pub use svg::scaling_svg;

/// Observables that get a power-law fit, in output order.
pub const FITTED_OBSERVABLES: [&str; 4] = ["ann_width", "mlr", "longest_facet", "area_excess"];

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "LOOPFLUCT_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    #[serde(rename = "T_list")]
    pub t_list: Vec<f64>,
    /// `n = n_per_T · T`, raised to the next multiple of `round(T^{1/3})`.
    #[serde(rename = "n_per_T")]
    pub n_per_t: f64,
    /// `h = h_per_T · T`.
    #[serde(rename = "h_per_T")]
    pub h_per_t: f64,
    #[serde(rename = "chains_per_T")]
    pub chains_per_t: usize,
    /// Sweeps after burn-in.
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for StudyConfig {
    /// The acceptance preset.
    fn default() -> Self {
        StudyConfig {
            t_list: vec![16.0, 32.0, 64.0, 128.0],
            n_per_t: 32.0,
            h_per_t: 1.0 / 256.0,
            chains_per_t: 8,
            sweeps: 100,
            burn_in: 300,
            thin: 4,
            seed: 20_240_601,
            out_dir: PathBuf::from("study_out"),
        }
    }
}

/// `round(T^{1/3})`, at least 1.
pub fn polygon_order(total_time: f64) -> usize {
    (total_time.cbrt().round() as usize).max(1)
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_list.is_empty() {
            return Err(invalid("T_list is empty"));
        }
        if let Some(t) = self.t_list.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("T values must be positive, got {t}")));
        }
        if !(self.n_per_t > 0.0) || !(self.h_per_t > 0.0 && self.h_per_t.is_finite()) {
            return Err(invalid("n_per_T and h_per_T must be positive"));
        }
        if self.chains_per_t == 0 || self.sweeps == 0 || self.thin == 0 {
            return Err(invalid("chains_per_T, sweeps and thin must be at least 1"));
        }
        if let Some(t) = self.t_list.iter().find(|t| !(self.n_per_t * **t <= crate::io::MAX_LOOP_POINTS as f64)) {
            return Err(invalid(format!("n_per_T * T exceeds {} points at T = {t}", crate::io::MAX_LOOP_POINTS)));
        }
        Ok(())
    }

    /// Chain configuration for one duration.
    pub fn chain_config(&self, total_time: f64) -> ChainConfig {
        let m = polygon_order(total_time);
        let raw = (self.n_per_t * total_time).ceil().max(3.0) as usize;
        let n = raw.div_ceil(m) * m;
        let mut c = ChainConfig::new(total_time, n);
        c.h = self.h_per_t * total_time;
        c.safety_margin = 6.0 * c.h * std::f64::consts::PI * total_time;
        c
    }

    /// Stream id of chain `c` at position `k` of `T_list`; never repeats
    /// within a study.
    pub fn stream_id(&self, k: usize, c: usize) -> u64 {
        (k * self.chains_per_t + c) as u64
    }

    pub fn meta(&self) -> Result<OutputMeta> {
        Ok(OutputMeta::new(self.seed, serde_json::to_value(self)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableFit {
    pub observable: String,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    /// Ordered by `(T, stream_id, sweep)`.
    pub records: Vec<ObservableRecord>,
    pub summaries: Vec<ChainSummary>,
    /// Empty when the fit was refused; see `fit_error`.
    pub fits: Vec<ObservableFit>,
    pub fit_error: Option<String>,
}

impl StudyResult {
    pub fn fit(&self, observable: &str) -> Option<&ScalingFit> {
        self.fits
            .iter()
            .find(|f| f.observable == observable)
            .map(|f| &f.fit)
    }
}

pub fn observable_value(r: &ObservableRecord, name: &str) -> Option<f64> {
    Some(match name {
        "ann_width" => r.ann_width,
        "mlr" => r.mlr,
        "longest_facet" => r.longest_facet,
        "area_excess" => r.area_excess,
        "area" => r.area,
        "r_in" => r.r_in,
        "r_out" => r.r_out,
        "hull_arclength" => r.hull_arclength,
        _ => return None,
    })
}

/// Per-chain means of `name`, grouped by `T` in ascending order.
pub fn chain_means(records: &[ObservableRecord], name: &str) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let (t, sid) = (records[i].total_time, records[i].stream_id);
        let mut j = i;
        let mut sum = 0.0;
        while j < records.len() && records[j].total_time == t && records[j].stream_id == sid {
            sum += observable_value(&records[j], name)
                .ok_or_else(|| invalid(format!("unknown observable {name}")))?;
            j += 1;
        }
        let m = sum / (j - i) as f64;
        match groups.last_mut() {
            Some(g) if g.0 == t => g.1.push(m),
            _ => groups.push((t, vec![m])),
        }
        i = j;
    }
    Ok(groups)
}

fn run_one(cfg: &StudyConfig, k: usize, c: usize) -> Result<(Vec<ObservableRecord>, ChainSummary)> {
    let t = cfg.t_list[k];
    let chain_cfg = cfg.chain_config(t);
    let stream_id = cfg.stream_id(k, c);
    let mut rng = RngStream::new(cfg.seed, stream_id);
    let mut records = Vec::new();
    let summary = run_chain(&chain_cfg, cfg.burn_in + cfg.sweeps, 1, &mut rng, |state| {
        if state.sweep > cfg.burn_in && (state.sweep - cfg.burn_in) % cfg.thin == 0 {
            let tag = SampleTag {
                seed: cfg.seed,
                stream_id,
                sweep: state.sweep,
            };
            records.push(measure(
                state.path(),
                chain_cfg.h,
                chain_cfg.max_cells,
                tag,
            )?);
        }
        Ok(())
    })?;
    Ok((records, summary))
}

/// Worker count: `LOOPFLUCT_THREADS` if set, else the available cores.
pub fn worker_threads() -> Result<usize> {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{THREADS_ENV}={v:?} is not a count")))?;
            if n == 0 {
                return Err(invalid(format!("{THREADS_ENV} must be at least 1")));
            }
            Ok(n)
        }
        Err(_) => Ok(avail),
    }
}

/// Runs all chains on a bounded pool and merges deterministically.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let mut jobs: Vec<(usize, usize)> = (0..cfg.t_list.len())
        .flat_map(|k| (0..cfg.chains_per_t).map(move |c| (k, c)))
        .collect();
    // Longest chains first keeps the pool busy.
    jobs.sort_by(|a, b| cfg.t_list[b.0].total_cmp(&cfg.t_list[a.0]).then(a.cmp(b)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads()?)
        .build()
        .map_err(|e| invalid(format!("cannot build worker pool: {e}")))?;
    let outputs: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, c)| run_one(cfg, k, c))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for (r, s) in outputs {
        records.extend(r);
        summaries.push(s);
    }
    records.sort_by(|a, b| {
        a.total_time
            .total_cmp(&b.total_time)
            .then(a.stream_id.cmp(&b.stream_id))
            .then(a.sweep.cmp(&b.sweep))
    });
    summaries.sort_by(|a, b| {
        a.config
            .total_time
            .total_cmp(&b.config.total_time)
            .then(a.stream_id.cmp(&b.stream_id))
    });

    let mut fits = Vec::new();
    let mut fit_error = None;
    for name in FITTED_OBSERVABLES {
        match scaling_fit(&chain_means(&records, name)?) {
            Ok(fit) => fits.push(ObservableFit {
                observable: name.to_string(),
                fit,
            }),
            Err(e) => {
                fit_error = Some(e.to_string());
                fits.clear();
                break;
            }
        }
    }
    Ok(StudyResult {
        records,
        summaries,
        fits,
        fit_error,
    })
}

/// Files written by [`write_study`].
pub const RECORDS_FILE: &str = "records.csv";
pub const FITS_FILE: &str = "fits.json";
pub const SUMMARIES_FILE: &str = "chains.json";
pub const PLOT_FILE: &str = "scaling.svg";

/// Writes records, chain summaries, fits and the log-log plot into `dir`.
pub fn write_study(dir: &Path, cfg: &StudyConfig, result: &StudyResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let meta = cfg.meta()?;
    let f = std::io::BufWriter::new(std::fs::File::create(dir.join(RECORDS_FILE))?);
    write_records_csv(f, &result.records, &meta)?;
    let summaries = serde_json::json!({ "meta": meta, "chains": result.summaries });
    std::fs::write(
        dir.join(SUMMARIES_FILE),
        serde_json::to_string_pretty(&summaries)? + "\n",
    )?;
    let fits =
        serde_json::json!({ "meta": meta, "fits": result.fits, "fit_error": result.fit_error });
    std::fs::write(
        dir.join(FITS_FILE),
        serde_json::to_string_pretty(&fits)? + "\n",
    )?;
    if result.fit_error.is_none() {
        std::fs::write(
            dir.join(PLOT_FILE),
            scaling_svg(&result.records, &result.fits, &meta)?,
        )?;
    }
    Ok(())
}
