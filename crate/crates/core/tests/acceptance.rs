//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use pingpong_core::attacks::EveStrategy;
use pingpong_core::gf2::{hamming74, BinaryWord, SyndromeDecoder};
use pingpong_core::info::{
    binary_entropy, bob_info_symmetric, detection_threshold, eve_info_measurement, helstrom_info,
    security_margin,
};
use pingpong_core::pingpong::{run_session, ProtocolConfig};
use pingpong_core::qkd::{default_threshold, hamming_pair, run_qkd_session, QkdConfig};
use pingpong_core::quantum::{bell_probabilities, NoiseModel, PureState, TwoQubitState};
use pingpong_core::rng::derive_stream;

const MC_ROUNDS: u64 = 100_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let elapsed = start.elapsed();
    v.detail
        .push_str(&format!(" [{:.3} s]", elapsed.as_secs_f64()));
    if let Some(limit) = limit {
        if elapsed > limit {
            v.pass = false;
            v.detail
                .push_str(&format!(" exceeds {:.0} s limit", limit.as_secs_f64()));
        }
    }
    v
}

fn measure_config(theta: f64, control_prob: f64, seed: u64) -> ProtocolConfig {
    ProtocolConfig {
        rounds: MC_ROUNDS,
        control_prob,
        eve: EveStrategy::MeasureResend { theta },
        noise: NoiseModel::None,
        seed,
    }
}

const THETAS: [(&str, f64); 4] = [
    ("pi/6", FRAC_PI_6),
    ("pi/4", FRAC_PI_4),
    ("pi/3", FRAC_PI_3),
    ("pi/2", FRAC_PI_2),
];

fn threshold_reproduction() -> Verdict {
    let d = detection_threshold(1e-6).unwrap();
    verdict(
        (d - 0.110028).abs() <= 1e-6 && d < 0.11 + 1e-4,
        format!("d* = {d:.7}"),
    )
}

fn measure_resend_detection() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, theta)) in THETAS.iter().enumerate() {
        let r = run_session(&measure_config(*theta, 1.0, 100 + i as u64)).unwrap();
        let want = (theta / 2.0).sin().powi(2);
        let z = (r.detection_rate - want) / sigma(want, r.n_control);
        ok &= r.n_control == MC_ROUNDS && z.abs() <= 3.0;
        parts.push(format!(
            "{name}: {:.4} vs {want:.4} ({z:+.2}σ)",
            r.detection_rate
        ));
    }
    verdict(ok, parts.join(", "))
}

fn measure_resend_no_information() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, theta)) in THETAS.iter().enumerate() {
        let r = run_session(&measure_config(*theta, 0.0, 200 + i as u64)).unwrap();
        ok &= r.n_message == MC_ROUNDS && r.i_ab_hat <= 0.01;
        parts.push(format!("{name}: I_ab={:.2e}", r.i_ab_hat));
        if *theta == FRAC_PI_2 {
            ok &= r.eve_accuracy == Some(1.0);
            parts.push(format!("eve_accuracy(pi/2)={:?}", r.eve_accuracy));
        }
    }
    verdict(ok, parts.join(", "))
}

fn symmetric_attack_consistency() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let alphas = [
        ("0.2", 0.2),
        ("asin(sqrt 0.11)", 0.11f64.sqrt().asin()),
        ("pi/4", FRAC_PI_4),
    ];
    for (i, (name, alpha)) in alphas.iter().enumerate() {
        let cfg = ProtocolConfig {
            rounds: 2 * MC_ROUNDS,
            control_prob: 0.5,
            eve: EveStrategy::SymmetricEntangle { alpha: *alpha },
            noise: NoiseModel::None,
            seed: 300 + i as u64,
        };
        let r = run_session(&cfg).unwrap();
        let s2 = alpha.sin().powi(2);
        let zd = (r.detection_rate - s2) / sigma(s2, r.n_control);
        let ze = (r.bob_error_rate - s2) / sigma(s2, r.n_message);
        ok &= zd.abs() <= 3.0 && ze.abs() <= 3.0;
        let closed = bob_info_symmetric(*alpha).unwrap();
        let direct = 1.0 - binary_entropy(s2).unwrap();
        ok &= (closed - direct).abs() <= 1e-12;
        parts.push(format!("{name}: d {zd:+.2}σ, err {ze:+.2}σ"));
    }

    let grid: Vec<f64> = (0..=20_000).map(|i| 0.5 * i as f64 / 20_000.0).collect();
    let margins: Vec<f64> = grid.iter().map(|d| security_margin(*d).unwrap()).collect();
    let changes: Vec<f64> = grid
        .windows(2)
        .zip(margins.windows(2))
        .filter(|(_, m)| (m[0] > 0.0) != (m[1] > 0.0))
        .map(|(d, _)| d[1])
        .collect();
    ok &= changes.len() == 1 && changes[0] > 0.10 && changes[0] < 0.12;
    parts.push(format!("margin sign changes at {changes:?}"));
    verdict(ok, parts.join(", "))
}

fn coset_state_property() -> Verdict {
    let pair = hamming_pair();
    let words = pair.c1().codewords().unwrap();
    let states: Vec<PureState> = words
        .iter()
        .map(|x| pair.codeword_superposition(x).unwrap())
        .collect();
    let mut worst_same: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    let mut pairs = 0;
    for (i, x) in words.iter().enumerate() {
        for (j, y) in words.iter().enumerate() {
            let f = states[i].fidelity(&states[j]).unwrap();
            if pair.c2().contains(&x.xor(y).unwrap()).unwrap() {
                worst_same = worst_same.max((f - 1.0).abs());
            } else {
                worst_cross = worst_cross.max(f.abs());
            }
            pairs += 1;
        }
    }
    verdict(
        pairs == 256 && worst_same <= 1e-12 && worst_cross <= 1e-12,
        format!("{pairs} pairs, max |F-1| same coset {worst_same:.1e}, max F cross coset {worst_cross:.1e}"),
    )
}

/// Exact `P(Binomial(n, 1/2) ≤ k)`.
fn binomial_half_cdf(n: u64, k: u64) -> f64 {
    let mut pmf = 0.5f64.powi(n as i32);
    let mut cdf = pmf;
    for i in 0..k {
        pmf *= (n - i) as f64 / (i + 1) as f64;
        cdf += pmf;
    }
    cdf
}

fn modified_protocol_end_to_end() -> Verdict {
    let pair = hamming_pair();
    let clean = QkdConfig::new(
        pair.clone(),
        20,
        20,
        200,
        EveStrategy::NoEve,
        NoiseModel::None,
        400,
    );
    let s = run_qkd_session(&clean).unwrap().summary;
    let clean_ok = s.aborted_control + s.aborted_decoy == 0 && s.agreements == 200;

    let mut flipped = clean.clone();
    flipped.inject_message_flips = 1;
    flipped.seed = 401;
    let f = run_qkd_session(&flipped).unwrap().summary;
    let flip_ok = f.agreements == 200 && f.completed == 200;

    let eve = QkdConfig::new(
        pair,
        200,
        100,
        1000,
        EveStrategy::MeasureResend { theta: FRAC_PI_2 },
        NoiseModel::None,
        402,
    );
    let t = default_threshold(200);
    let e = run_qkd_session(&eve).unwrap().summary;
    let survive = binomial_half_cdf(200, t as u64);
    let eve_ok = t == 22 && e.abort_rate >= 0.999 && 1.0 - survive >= 0.999;

    verdict(
        clean_ok && flip_ok && eve_ok,
        format!(
            "clean {}/200 agree, flipped {}/200 agree, measure-resend abort rate {:.3} (t={t}, oracle P(no abort)={survive:.2e})",
            s.agreements, f.agreements, e.abort_rate
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    // Bell kets written out as a 4×4 change-of-basis matrix over |00⟩..|11⟩
    let h = FRAC_1_SQRT_2;
    let basis = [
        [0.0, h, -h, 0.0],
        [0.0, h, h, 0.0],
        [h, 0.0, 0.0, h],
        [h, 0.0, 0.0, -h],
    ];
    let mut rng = derive_stream(500, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let amps: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let state = TwoQubitState::from_pure(PureState::normalized(2, amps).unwrap()).unwrap();
        let got = bell_probabilities(&state);
        let a = state.as_pure().amplitudes();
        for (row, p) in basis.iter().zip(got.0) {
            let overlap: Complex64 = row.iter().zip(a).map(|(b, x)| b * x).sum();
            worst = worst.max((overlap.norm_sqr() - p).abs());
        }
    }

    let code = hamming74();
    let decoder = SyndromeDecoder::new(&code).unwrap();
    let codewords = code.codewords().unwrap();
    let mut mismatches = 0;
    for i in 0..128usize {
        let word = BinaryWord::from_bits((0..7).map(|b| i >> (6 - b) & 1 == 1).collect());
        let nearest = codewords
            .iter()
            .min_by_key(|c| c.distance(&word).unwrap())
            .unwrap();
        let best = nearest.distance(&word).unwrap();
        let unique = codewords
            .iter()
            .filter(|c| c.distance(&word).unwrap() == best)
            .count()
            == 1;
        let expected = (unique && best <= decoder.radius()).then(|| nearest.clone());
        if decoder.decode(&word).unwrap() != expected {
            mismatches += 1;
        }
    }
    verdict(
        worst < 1e-10 && mismatches == 0,
        format!(
            "Bell max deviation {worst:.1e} over 1000 states, syndrome mismatches {mismatches}/128"
        ),
    )
}

fn dominance_property() -> Verdict {
    let mut ok = true;
    let mut equal_at = Vec::new();
    let mut smallest_gap = f64::INFINITY;
    for i in 0..100 {
        let theta = (i as f64 / 99.0) * FRAC_PI_2;
        let concrete = helstrom_info(theta).unwrap();
        let envelope = eve_info_measurement((theta / 2.0).sin().powi(2).min(0.5)).unwrap();
        let gap = envelope - concrete;
        ok &= gap >= -1e-12;
        if gap.abs() <= 1e-9 {
            equal_at.push(i);
        } else {
            smallest_gap = smallest_gap.min(gap);
        }
    }
    ok &= equal_at == vec![0, 99];
    verdict(
        ok,
        format!("equality at grid points {equal_at:?}, smallest interior gap {smallest_gap:.2e}"),
    )
}

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("threshold reproduction", Some(1), threshold_reproduction),
        (
            "measure-resend detection probability",
            Some(30),
            measure_resend_detection,
        ),
        (
            "measure-resend leaves Bob no information",
            Some(30),
            measure_resend_no_information,
        ),
        (
            "symmetric attack consistency",
            None,
            symmetric_attack_consistency,
        ),
        ("coset state property", Some(5), coset_state_property),
        (
            "modified protocol end to end",
            Some(60),
            modified_protocol_end_to_end,
        ),
        ("oracle equivalence", None, oracle_equivalence),
        ("dominance property", None, dominance_property),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let v = timed(limit.map(Duration::from_secs), run);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
