#![no_main]

use holint_cli::{parse_field, print_field};
use libfuzzer_sys::fuzz_target;

// Accepted descriptions survive a print/parse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_field(src, Some(4)) {
        assert_eq!(parse_field(&print_field(&x), None).expect("printed field parses"), x);
    }
});
