use std::time::Instant;

use loopfluct::mcmc::{Chain, ChainConfig};
use loopfluct::observables::{measure, SampleTag};
use loopfluct::sampler::RngStream;
use loopfluct::stats;

fn main() {
    let mut args = std::env::args().skip(1);
    let t: f64 = args.next().map_or(16.0, |s| s.parse().unwrap());
    let sweeps: u64 = args.next().map_or(1000, |s| s.parse().unwrap());
    let every: u64 = args.next().map_or(10, |s| s.parse().unwrap());
    let seed: u64 = args.next().map_or(1, |s| s.parse().unwrap());
    let config = ChainConfig::new(t, (32.0 * t) as usize);
    let mut chain = Chain::new(config.clone()).unwrap();
    let mut rng = RngStream::new(seed, 0);
    let start = Instant::now();
    let mut aw = Vec::new();
    let mut ml = Vec::new();
    for s in 1..=sweeps {
        chain.sweep(&mut rng).unwrap();
        if s % every == 0 {
            let r = measure(
                chain.state().path(),
                config.h,
                config.max_cells,
                SampleTag::default(),
            )
            .unwrap();
            aw.push(r.ann_width);
            ml.push(r.mlr);
            println!(
                "{s} {:.3} {:.3} {:.3} {:.1}",
                r.ann_width,
                r.mlr,
                r.longest_facet,
                start.elapsed().as_secs_f64()
            );
        }
    }
    let h = aw.len() / 2;
    println!(
        "# T={t} mean aw {:.3} mlr {:.3} iact(aw) {:.1} iact(mlr) {:.1} (units of {every} sweeps)",
        stats::mean(&aw[h..]),
        stats::mean(&ml[h..]),
        stats::iact(&aw[h..]),
        stats::iact(&ml[h..])
    );
}
