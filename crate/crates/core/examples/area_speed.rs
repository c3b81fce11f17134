use std::time::Instant;

use loopfluct::geometry::AreaWorkspace;
use loopfluct::mcmc::{Chain, ChainConfig};
use loopfluct::sampler::{fill_bridge, RngStream};

fn main() {
    let t = 128.0;
    let config = ChainConfig::new(t, 4096);
    let mut chain = Chain::new(config.clone()).unwrap();
    let mut rng = RngStream::new(1, 0);
    for _ in 0..3 {
        chain.sweep(&mut rng).unwrap();
    }
    let pts = chain.state().path().points().to_vec();
    let mut ws = AreaWorkspace::new();
    let reps: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().unwrap());
    let s = Instant::now();
    let mut acc = 0;
    for _ in 0..reps {
        acc += ws.cell_count(&pts, config.h, config.max_cells).unwrap();
    }
    println!(
        "area: {:.1} us ({acc})",
        s.elapsed().as_secs_f64() / reps as f64 * 1e6
    );
    let mut buf = vec![pts[0]; 2049];
    let s = Instant::now();
    for _ in 0..reps {
        fill_bridge(pts[0], pts[5], 64.0, &mut buf, &mut rng);
    }
    println!(
        "bridge 2048: {:.1} us",
        s.elapsed().as_secs_f64() / reps as f64 * 1e6
    );
}
