#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // no base directory: algebra paths are rejected rather than read
        if let Ok(parsed) = ccsp::harness::io::parse_instance_json(text, None) {
            let _ = ccsp::validate_instance(&parsed.instance);
        }
    }
});
