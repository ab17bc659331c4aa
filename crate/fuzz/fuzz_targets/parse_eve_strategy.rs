#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_core::attacks::EveStrategy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(eve) = text.parse::<EveStrategy>() {
        eve.validate().expect("parsed strategies are valid");
    }
});
