use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use loopfluct::io::{write_loop_binary, write_loop_csv, write_records_csv, OutputMeta};
use loopfluct::mcmc::{run_chain, ChainConfig};
use loopfluct::observables::{measure, SampleTag};
use loopfluct::sampler::{sample_loop, RngStream, TimeGrid};
use loopfluct::study::{run_study, write_study, StudyConfig};
use loopfluct::verify::{run_suite, Scale, CHECK_NAMES};

#[derive(Parser)]
#[command(
    name = "loopfluct",
    version,
    about = "Area-conditioned Brownian loop simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides shared by the config-driven subcommands.
#[derive(clap::Args, Debug, Default)]
struct Overrides {
    /// JSON configuration file; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Loop duration (comma-separated list for `study`).
    #[arg(long = "T", value_delimiter = ',')]
    total_time: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sweeps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write unconditioned loops as binary and CSV files.
    Sample {
        #[arg(long = "T", default_value_t = 1.0)]
        total_time: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "loops")]
        out: PathBuf,
    },
    /// Run one conditioned chain.
    Chain {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the multi-chain scaling study.
    Study {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run numerical checks and print JSON lines; exit status 1 if any fails.
    Verify {
        /// `all` or a check name.
        #[arg(default_value = "all")]
        selector: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

/// Configuration of the `chain` subcommand. Defaults are the smoke preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct ChainRun {
    #[serde(rename = "T")]
    total_time: f64,
    n: usize,
    sweeps: u64,
    burn_in: u64,
    thin: u64,
    seed: u64,
    stream_id: u64,
    /// Cell size; `T/256` when absent.
    h: Option<f64>,
    safety_margin: Option<f64>,
    init_inflation: Option<f64>,
    out_dir: PathBuf,
}

impl Default for ChainRun {
    fn default() -> Self {
        ChainRun {
            total_time: 8.0,
            n: 256,
            sweeps: 200,
            burn_in: 0,
            thin: 10,
            seed: 1,
            stream_id: 0,
            h: None,
            safety_margin: None,
            init_inflation: None,
            out_dir: PathBuf::from("chain_out"),
        }
    }
}

impl ChainRun {
    fn chain_config(&self) -> ChainConfig {
        let mut c = ChainConfig::new(self.total_time, self.n);
        if let Some(h) = self.h {
            c.h = h;
            c.safety_margin = 6.0 * h * std::f64::consts::PI * self.total_time;
        }
        if let Some(m) = self.safety_margin {
            c.safety_margin = m;
        }
        if let Some(d) = self.init_inflation {
            c.init_inflation = d;
        }
        c
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> AnyResult<T> {
    match path {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            Ok(serde_json::from_str(&text)
                .map_err(|e| format!("bad config {}: {e}", p.display()))?)
        }
        None => Ok(T::default()),
    }
}

fn single_t(o: &Overrides) -> AnyResult<Option<f64>> {
    match o.total_time.as_slice() {
        [] => Ok(None),
        [t] => Ok(Some(*t)),
        _ => Err("chain takes a single --T".into()),
    }
}

fn cmd_sample(total_time: f64, n: usize, count: usize, seed: u64, out: &Path) -> AnyResult<()> {
    let grid = TimeGrid::new(total_time, n)?;
    if count == 0 {
        return Ok(());
    }
    fs::create_dir_all(out)?;
    let meta = OutputMeta::new(
        seed,
        serde_json::json!({ "T": total_time, "n": n, "count": count }),
    );
    let mut rng = RngStream::new(seed, 0);
    for k in 0..count {
        let path = sample_loop(grid, &mut rng);
        let stem = format!("loop_{k:05}");
        write_loop_binary(
            BufWriter::new(File::create(out.join(format!("{stem}.bin")))?),
            &path,
            seed,
        )?;
        write_loop_csv(
            BufWriter::new(File::create(out.join(format!("{stem}.csv")))?),
            &path,
            &meta,
        )?;
    }
    Ok(())
}

fn cmd_chain(o: &Overrides) -> AnyResult<()> {
    let mut run: ChainRun = load_config(o.config.as_deref())?;
    if let Some(t) = single_t(o)? {
        run.total_time = t;
    }
    if let Some(s) = o.seed {
        run.seed = s;
    }
    if let Some(s) = o.sweeps {
        run.sweeps = s;
    }
    if let Some(d) = &o.out {
        run.out_dir = d.clone();
    }
    let config = run.chain_config();
    let loops_dir = run.out_dir.join("loops");
    fs::create_dir_all(&loops_dir)?;
    let meta = OutputMeta::new(run.seed, serde_json::to_value(&run)?);
    let mut rng = RngStream::new(run.seed, run.stream_id);
    let mut records = Vec::new();
    let start = Instant::now();
    let summary = run_chain(&config, run.burn_in + run.sweeps, 1, &mut rng, |state| {
        if state.sweep > run.burn_in && (state.sweep - run.burn_in) % run.thin.max(1) == 0 {
            let tag = SampleTag {
                seed: run.seed,
                stream_id: run.stream_id,
                sweep: state.sweep,
            };
            records.push(measure(state.path(), config.h, config.max_cells, tag)?);
            let f = File::create(loops_dir.join(format!("loop_{:06}.bin", state.sweep)))?;
            write_loop_binary(BufWriter::new(f), state.path(), run.seed)?;
        }
        Ok(())
    })?;
    write_records_csv(
        BufWriter::new(File::create(run.out_dir.join("records.csv"))?),
        &records,
        &meta,
    )?;
    let doc = serde_json::json!({
        "meta": meta,
        "summary": summary,
        "recommended_burn_in": summary.recommended_burn_in(),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    fs::write(
        run.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&doc)? + "\n",
    )?;
    eprintln!(
        "chain: {} sweeps, acceptance {:.4}, {} records in {:.1}s",
        summary.sweeps,
        summary.acceptance_rate,
        records.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_study(o: &Overrides) -> AnyResult<()> {
    let mut cfg: StudyConfig = load_config(o.config.as_deref())?;
    if !o.total_time.is_empty() {
        cfg.t_list = o.total_time.clone();
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(s) = o.sweeps {
        cfg.sweeps = s;
    }
    if let Some(d) = &o.out {
        cfg.out_dir = d.clone();
    }
    let start = Instant::now();
    let result = run_study(&cfg)?;
    write_study(&cfg.out_dir, &cfg, &result)?;
    for f in &result.fits {
        eprintln!(
            "{:>14}: exponent {:.3}  95% CI [{:.3}, {:.3}]",
            f.observable, f.fit.exponent, f.fit.ci_low, f.fit.ci_high
        );
    }
    if let Some(e) = &result.fit_error {
        eprintln!("fit skipped: {e}");
    }
    eprintln!(
        "study: {} records in {:.1}s",
        result.records.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_verify(selector: &str, seed: u64, scale: ScaleArg, out: Option<&Path>) -> AnyResult<bool> {
    let scale = match scale {
        ScaleArg::Quick => Scale::Quick,
        ScaleArg::Full => Scale::Full,
    };
    let reports = run_suite(selector, seed, scale)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_json_line()?);
        text.push('\n');
    }
    print!("{text}");
    std::io::stdout().flush()?;
    if let Some(p) = out {
        fs::write(p, &text)?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sample {
            total_time,
            n,
            count,
            seed,
            out,
        } => cmd_sample(*total_time, *n, *count, *seed, out).map(|_| true),
        Command::Chain { overrides } => cmd_chain(overrides).map(|_| true),
        Command::Study { overrides } => cmd_study(overrides).map(|_| true),
        Command::Verify {
            selector,
            seed,
            scale,
            out,
        } => {
            if selector != "all" && !CHECK_NAMES.contains(&selector.as_str()) {
                eprintln!(
                    "error: unknown check {selector:?}; expected \"all\" or one of {}",
                    CHECK_NAMES.join(", ")
                );
                return ExitCode::from(2);
            }
            cmd_verify(selector, *seed, *scale, out.as_deref())
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
