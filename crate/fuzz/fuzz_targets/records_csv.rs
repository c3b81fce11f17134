#![no_main]
use libfuzzer_sys::fuzz_target;
use loopfluct::io::read_records_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_records_csv(data);
});
