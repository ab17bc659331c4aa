#![no_main]

use libfuzzer_sys::fuzz_target;
use pingpong_core::gf2::{hamming74, BinaryWord, SyndromeDecoder};

fuzz_target!(|data: &[u8]| {
    let code = hamming74();
    let decoder = SyndromeDecoder::new(&code).unwrap();
    let bits = data.iter().map(|b| b & 1 == 1).collect();
    let word = BinaryWord::from_bits(bits);
    match decoder.decode(&word) {
        Ok(Some(cw)) => {
            assert!(code.contains(&cw).unwrap());
            assert!(cw.distance(&word).unwrap() <= decoder.radius());
        }
        Ok(None) => {}
        Err(_) => assert_ne!(word.len(), code.n()),
    }
});
