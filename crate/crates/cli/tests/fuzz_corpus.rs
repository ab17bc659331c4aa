//! Replays the checked-in fuzz corpus through the same entry points the
//! fuzz targets exercise, so the seeds stay meaningful on stable toolchains.

use std::fs;
use std::path::PathBuf;

use pingpong_cli::config::{RunConfigFile, PINGPONG_KEYS, QKD_KEYS};
use pingpong_core::attacks::EveStrategy;
use pingpong_core::gf2::{hamming74, BinaryCode, BinaryWord, SyndromeDecoder};
use pingpong_core::quantum::NoiseModel;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&path).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

#[test]
fn code_file_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("parse_code_file") {
        let Some(t) = text(&data) else { continue };
        if let Ok(code) = BinaryCode::parse(t) {
            accepted += 1;
            assert_eq!(BinaryCode::parse(&code.to_text()).unwrap(), code, "{name}");
            code.min_distance().unwrap();
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn binary_word_seeds() {
    for (_, data) in seeds("parse_binary_word") {
        let Some(t) = text(&data) else { continue };
        if let Ok(word) = t.parse::<BinaryWord>() {
            assert_eq!(word.to_string().parse::<BinaryWord>().unwrap(), word);
        }
    }
}

#[test]
fn eve_strategy_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("parse_eve_strategy") {
        let Some(t) = text(&data) else { continue };
        if let Ok(eve) = t.parse::<EveStrategy>() {
            accepted += 1;
            eve.validate().unwrap();
        }
    }
    assert_eq!(accepted, 5);
}

#[test]
fn noise_model_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("parse_noise_model") {
        let Some(t) = text(&data) else { continue };
        if let Ok(noise) = t.parse::<NoiseModel>() {
            accepted += 1;
            noise.validate().unwrap();
            assert_eq!(noise.to_string().parse::<NoiseModel>().unwrap(), noise);
        }
    }
    assert_eq!(accepted, 4);
}

#[test]
fn run_config_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("parse_run_config") {
        let Some(t) = text(&data) else { continue };
        accepted += usize::from(RunConfigFile::parse(t, PINGPONG_KEYS).is_ok());
        accepted += usize::from(RunConfigFile::parse(t, QKD_KEYS).is_ok());
    }
    assert_eq!(accepted, 2);
}

#[test]
fn syndrome_decode_seeds() {
    let code = hamming74();
    let decoder = SyndromeDecoder::new(&code).unwrap();
    for (_, data) in seeds("syndrome_decode") {
        let word = BinaryWord::from_bits(data.iter().map(|b| b & 1 == 1).collect());
        match decoder.decode(&word) {
            Ok(Some(cw)) => {
                assert!(code.contains(&cw).unwrap());
                assert!(cw.distance(&word).unwrap() <= decoder.radius());
            }
            Ok(None) => {}
            Err(_) => assert_ne!(word.len(), code.n()),
        }
    }
}
