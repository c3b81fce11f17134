#![no_main]
use libfuzzer_sys::fuzz_target;
use loopfluct::io::{read_loop_binary, write_loop_binary};

fuzz_target!(|data: &[u8]| {
    if let Ok((path, seed)) = read_loop_binary(data) {
        // Anything accepted must survive a round trip unchanged.
        let mut buf = Vec::new();
        write_loop_binary(&mut buf, &path, seed).unwrap();
        assert_eq!(buf, data);
    }
});
