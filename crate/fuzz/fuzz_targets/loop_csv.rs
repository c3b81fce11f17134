#![no_main]
use libfuzzer_sys::fuzz_target;
use loopfluct::io::read_loop_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_loop_csv(data, None);
    let _ = read_loop_csv(data, Some(1.0));
});
