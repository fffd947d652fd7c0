#![no_main]

use holint_core::series_core::text::{parse_constant, parse_series};
use libfuzzer_sys::fuzz_target;

// Parsing never panics, and printing then parsing returns the same series.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let _ = parse_constant(src);
    if let Ok(s) = parse_series::<3>(src, 6) {
        let back = parse_series::<3>(&s.to_string(), 6).expect("printed series parses");
        assert_eq!(back, s);
    }
});
