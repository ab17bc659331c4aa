#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_core::quantum::NoiseModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(noise) = text.parse::<NoiseModel>() {
        noise.validate().expect("parsed noise models are valid");
        assert_eq!(noise.to_string().parse::<NoiseModel>().unwrap(), noise);
    }
});
