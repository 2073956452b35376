#![no_main]

use libfuzzer_sys::fuzz_target;
use ndstate_core::formats::{parse_vector_list, to_canonical_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(value) = parse_vector_list(data) {
        let text = to_canonical_json(&value).expect("parsed values serialize");
        parse_vector_list(text.as_bytes()).expect("canonical output parses back");
    }
});
