use std::time::Instant;

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    for name in &names {
        let t = Instant::now();
        let r = loopfluct::verify::run_check(name, 2024, loopfluct::verify::Scale::Full).unwrap();
        println!(
            "{:.1}s {}",
            t.elapsed().as_secs_f64(),
            r.to_json_line().unwrap()
        );
    }
}
