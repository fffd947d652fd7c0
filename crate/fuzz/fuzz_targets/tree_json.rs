#![no_main]

use holint_core::resolution::ResolutionTree;
use libfuzzer_sys::fuzz_target;

// Decoded trees are consistent and re-encode to an equal tree.
fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(t) = ResolutionTree::from_json(src) {
        assert_eq!(ResolutionTree::from_json(&t.to_json()).expect("encoded tree decodes"), t);
    }
});
