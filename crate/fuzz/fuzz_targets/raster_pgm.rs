#![no_main]
use libfuzzer_sys::fuzz_target;
use loopfluct::geometry::{RasterHeader, RasterRegion};

// Input is a JSON header line followed by the PGM bytes.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == b'\n') else { return };
    let Ok(header) = serde_json::from_slice::<RasterHeader>(&data[..split]) else { return };
    let _ = RasterRegion::from_pgm(&header, &data[split + 1..]);
});
