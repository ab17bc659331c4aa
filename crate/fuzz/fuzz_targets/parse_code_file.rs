#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_core::gf2::BinaryCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = BinaryCode::parse(text) {
        let again = BinaryCode::parse(&code.to_text()).expect("round trip");
        assert_eq!(again, code);
        if code.n() <= 16 {
            let _ = code.min_distance();
        }
    }
});
