#![no_main]

use libfuzzer_sys::fuzz_target;
use ndstate_core::formats::{parse_certificate, to_canonical_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(value) = parse_certificate(data) {
        let text = to_canonical_json(&value).expect("parsed values serialize");
        parse_certificate(text.as_bytes()).expect("canonical output parses back");
    }
});
