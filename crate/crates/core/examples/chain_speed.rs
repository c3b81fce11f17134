use std::time::Instant;

use loopfluct::mcmc::{Chain, ChainConfig};
use loopfluct::sampler::RngStream;
use loopfluct::stats;

fn main() {
    let mut args = std::env::args().skip(1);
    let t: f64 = args.next().map_or(128.0, |s| s.parse().unwrap());
    let sweeps: u64 = args.next().map_or(5, |s| s.parse().unwrap());
    let config = ChainConfig::new(t, (32.0 * t) as usize);
    let mut chain = Chain::new(config).unwrap();
    let mut rng = RngStream::new(1, 0);
    let start = Instant::now();
    let mut trace = Vec::new();
    for _ in 0..sweeps {
        chain.sweep(&mut rng).unwrap();
        trace.push(chain.state().area());
    }
    let el = start.elapsed().as_secs_f64();
    let s = chain.state();
    let half = &trace[trace.len() / 2..];
    println!(
        "T={t} sweeps={sweeps} {:.3}s/sweep acc={:.3} area/target={:.4} iact(2nd half)={:.1}",
        el / sweeps as f64,
        s.acceptance_rate(),
        s.area() / (std::f64::consts::PI * t * t),
        stats::iact(half)
    );
    for k in (0..trace.len()).step_by((trace.len() / 10).max(1)) {
        print!("{:.4} ", trace[k] / (std::f64::consts::PI * t * t));
    }
    println!();
}
