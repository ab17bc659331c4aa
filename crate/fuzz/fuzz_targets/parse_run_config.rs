#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_cli::config::{RunConfigFile, PINGPONG_KEYS, QKD_KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = RunConfigFile::parse(text, PINGPONG_KEYS);
    let _ = RunConfigFile::parse(text, QKD_KEYS);
});
