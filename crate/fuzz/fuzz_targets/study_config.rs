#![no_main]
use libfuzzer_sys::fuzz_target;
use loopfluct::study::StudyConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(cfg) = serde_json::from_slice::<StudyConfig>(data) else { return };
    if cfg.validate().is_ok() {
        for &t in &cfg.t_list {
            let c = cfg.chain_config(t);
            assert!(c.n >= 3 && c.n % loopfluct::study::polygon_order(t) == 0);
        }
    }
});
