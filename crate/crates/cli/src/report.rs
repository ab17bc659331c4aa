//! CSV tables and JSON artifacts written by the commands.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use pingpong_core::attacks::detection_probability_measurement;
use pingpong_core::info::{
    bob_info_symmetric, eve_info_bound, eve_info_measurement, helstrom_info, security_margin,
};
use pingpong_core::pingpong::{ProtocolConfig, SessionReport, TheoryBlock};
use pingpong_core::qkd::{BlockStats, QkdConfig, QkdResult, QkdSessionReport, QkdSummary};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Six decimals, with negative zero printed as `0.000000`.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn grid(steps: usize, hi: f64) -> Result<impl Iterator<Item = f64>> {
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(move |i| (i as f64 / last) * hi))
}

/// `theta,d_m,info_eq10,info_helstrom` over `θ ∈ [0, π/2]`.
pub fn tradeoff_csv(steps: usize) -> Result<String> {
    let mut out = String::from("theta,d_m,info_eq10,info_helstrom\n");
    for theta in grid(steps, FRAC_PI_2)? {
        let d_m = detection_probability_measurement(theta)?.min(0.5);
        let bound = eve_info_measurement(d_m)?;
        let helstrom = helstrom_info(theta)?;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt6(theta),
            fmt6(d_m),
            fmt6(bound),
            fmt6(helstrom)
        );
    }
    Ok(out)
}

/// `d,i_ae,i_ab,margin` over `d ∈ [0, 1/2]`.
pub fn security_curve_csv(steps: usize) -> Result<String> {
    let mut out = String::from("d,i_ae,i_ab,margin\n");
    for d in grid(steps, 0.5)? {
        let i_ae = eve_info_bound(d)?;
        let alpha = d.sqrt().asin().min(std::f64::consts::FRAC_PI_4);
        let i_ab = bob_info_symmetric(alpha)?;
        let margin = security_margin(d)?;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt6(d),
            fmt6(i_ae),
            fmt6(i_ab),
            fmt6(margin)
        );
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct SessionConfigJson {
    pub rounds: u64,
    pub control_prob: f64,
    pub eve: String,
    pub noise: String,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct SessionJson {
    pub schema_version: u32,
    pub config: SessionConfigJson,
    pub n_control: u64,
    pub detection_rate: f64,
    pub n_message: u64,
    pub bob_error_rate: f64,
    pub eve_accuracy: Option<f64>,
    pub i_ab_hat: f64,
    pub i_ae_hat: Option<f64>,
    pub theory: Option<TheoryBlock>,
}

impl SessionJson {
    pub fn new(config: &ProtocolConfig, report: &SessionReport) -> Self {
        SessionJson {
            schema_version: SCHEMA_VERSION,
            config: SessionConfigJson {
                rounds: config.rounds,
                control_prob: config.control_prob,
                eve: config.eve.to_string(),
                noise: config.noise.to_string(),
                seed: config.seed,
            },
            n_control: report.n_control,
            detection_rate: report.detection_rate,
            n_message: report.n_message,
            bob_error_rate: report.bob_error_rate,
            eve_accuracy: report.eve_accuracy,
            i_ab_hat: report.i_ab_hat,
            i_ae_hat: report.i_ae_hat,
            theory: report.theory,
        }
    }
}

pub fn session_summary(config: &ProtocolConfig, report: &SessionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "rounds          {} (eve {}, noise {}, seed {})",
        config.rounds, config.eve, config.noise, config.seed
    );
    let _ = write!(
        s,
        "control         {} rounds, detection rate {}",
        report.n_control,
        fmt6(report.detection_rate)
    );
    if let Some(t) = report.theory {
        let _ = write!(s, " (theory {})", fmt6(t.detection_rate));
    }
    s.push('\n');
    let _ = write!(
        s,
        "message         {} rounds, bob error rate {}",
        report.n_message,
        fmt6(report.bob_error_rate)
    );
    if let Some(t) = report.theory {
        let _ = write!(s, " (theory {})", fmt6(t.bob_error_rate));
    }
    s.push('\n');
    let _ = writeln!(s, "I(A:B) estimate {}", fmt6(report.i_ab_hat));
    if let (Some(acc), Some(i_ae)) = (report.eve_accuracy, report.i_ae_hat) {
        let _ = writeln!(s, "eve accuracy    {}", fmt6(acc));
        let _ = writeln!(s, "I(A:E) estimate {}", fmt6(i_ae));
    }
    s
}

#[derive(Serialize)]
pub struct QkdConfigJson {
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
    pub key_length: usize,
    pub m: usize,
    pub l: usize,
    pub t: usize,
    pub tprime: usize,
    pub blocks: usize,
    pub eve: String,
    pub noise: String,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct BlockJson {
    pub index: usize,
    pub outcome: &'static str,
    pub coincidences: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoy_ones: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decode_failures: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keys_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alice_key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bob_key: Option<String>,
}

impl BlockJson {
    fn new(index: usize, result: &QkdResult, stats: &BlockStats, reveal_keys: bool) -> Self {
        let mut block = BlockJson {
            index,
            outcome: "",
            coincidences: stats.coincidences,
            decoy_ones: stats.decoy_ones,
            decode_failures: None,
            keys_agree: None,
            alice_key: None,
            bob_key: None,
        };
        match result {
            QkdResult::AbortedControl { .. } => block.outcome = "aborted_control",
            QkdResult::AbortedDecoy { .. } => block.outcome = "aborted_decoy",
            QkdResult::Completed {
                alice_key,
                bob_key,
                decode_failures,
            } => {
                block.outcome = if bob_key.is_some() {
                    "completed"
                } else {
                    "decode_failure"
                };
                block.decode_failures = Some(*decode_failures);
                block.keys_agree = Some(result.keys_agree());
                if reveal_keys {
                    block.alice_key = Some(alice_key.to_string());
                    block.bob_key = bob_key.as_ref().map(|k| k.to_string());
                }
            }
        }
        block
    }
}

#[derive(Serialize)]
pub struct QkdJson {
    pub schema_version: u32,
    pub config: QkdConfigJson,
    pub summary: QkdSummary,
    pub blocks: Vec<BlockJson>,
}

impl QkdJson {
    pub fn new(config: &QkdConfig, report: &QkdSessionReport, reveal_keys: bool) -> Self {
        QkdJson {
            schema_version: SCHEMA_VERSION,
            config: QkdConfigJson {
                n: config.pair.n(),
                k1: config.pair.c1().k(),
                k2: config.pair.c2().k(),
                key_length: config.pair.key_length(),
                m: config.m,
                l: config.l,
                t: config.t,
                tprime: config.t_prime,
                blocks: config.blocks,
                eve: config.eve.to_string(),
                noise: config.noise.to_string(),
                seed: config.seed,
            },
            summary: report.summary.clone(),
            blocks: report
                .results
                .iter()
                .zip(&report.stats)
                .enumerate()
                .map(|(i, (r, s))| BlockJson::new(i, r, s, reveal_keys))
                .collect(),
        }
    }
}

pub fn qkd_summary(config: &QkdConfig, report: &QkdSessionReport, reveal_keys: bool) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "blocks          {} (n={}, key length {}, m={}, l={}, t={}, t'={}, eve {}, noise {})",
        s.blocks,
        config.pair.n(),
        config.pair.key_length(),
        config.m,
        config.l,
        config.t,
        config.t_prime,
        config.eve,
        config.noise
    );
    let _ = writeln!(
        out,
        "aborted         {} control, {} decoy (rate {})",
        s.aborted_control,
        s.aborted_decoy,
        fmt6(s.abort_rate)
    );
    let _ = writeln!(
        out,
        "completed       {} ({} decode failures)",
        s.completed, s.decode_failures
    );
    let _ = writeln!(
        out,
        "key agreement   {}/{} (rate {})",
        s.agreements,
        s.completed,
        fmt6(s.agreement_rate)
    );
    let _ = writeln!(out, "key bits        {}", s.key_bits);
    if reveal_keys {
        for (i, r) in report.results.iter().enumerate() {
            if let QkdResult::Completed {
                alice_key, bob_key, ..
            } = r
            {
                let bob = bob_key
                    .as_ref()
                    .map_or_else(|| "-".to_string(), |k| k.to_string());
                let _ = writeln!(out, "block {i:>5}     alice {alice_key} bob {bob}");
            }
        }
    }
    if s.completed == 0 {
        out.push_str("verdict         all blocks aborted\n");
    }
    out
}
