#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_core::gf2::BinaryWord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(word) = text.parse::<BinaryWord>() {
        assert_eq!(word.to_string().parse::<BinaryWord>().unwrap(), word);
    }
});
