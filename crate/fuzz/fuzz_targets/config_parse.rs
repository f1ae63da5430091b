#![no_main]

use libfuzzer_sys::fuzz_target;

// The run-configuration parser consumes user-written files and must never
// panic: any byte sequence yields a config or a typed error.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = relaxcat::config::parse_config(text);
    }
});
