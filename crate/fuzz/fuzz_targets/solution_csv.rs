#![no_main]

use libfuzzer_sys::fuzz_target;

// The columnar CSV format is read back from the on-disk reference cache.
// Parsing must never panic, and whatever parses must survive an
// emit/reparse round trip bit for bit.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(parsed) = relaxcat::csvio::parse_solution_csv(text) {
            let emitted =
                relaxcat::csvio::solution_to_csv(&parsed.x, &parsed.names, &parsed.columns);
            let roundtrip = relaxcat::csvio::parse_solution_csv(&emitted)
                .expect("emitted table must reparse");
            assert_eq!(parsed, roundtrip);
        }
    }
});
