//! The original two-way protocol: Bob keeps the home qubit of `|ψ⁻⟩`,
//! sends the travel qubit to Alice, who either runs a `B_z` control check
//! or encodes a bit with σ_z and sends the qubit back for Bob's Bell
//! measurement.
//!
//! Noise acts once per transit leg on the travel qubit: before Eve on the
//! way to Alice, before Eve's decoding on the way back.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attacks::{self, EveRecord, EveStrategy};
use crate::info::{empirical_mutual_information, JointCounts2x2};
use crate::quantum::{
    apply_noise, apply_pauli_z, bell_measure, bell_state, measure_computational, BellOutcome,
    NoiseModel, TwoQubitState,
};
use crate::rng::derive_stream;
use crate::{Error, Result};

/// Rounds simulated per independent random stream.
pub const SHARD_ROUNDS: u64 = 8192;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub rounds: u64,
    /// Probability that Alice switches to control mode.
    pub control_prob: f64,
    pub eve: EveStrategy,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::invalid("rounds must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.control_prob) {
            return Err(Error::invalid(format!(
                "control probability {} outside [0, 1]",
                self.control_prob
            )));
        }
        self.noise.validate()?;
        self.eve.validate()?;
        if let EveStrategy::GenericAncilla { .. } = self.eve {
            return Err(Error::Unsupported(
                "the ancilla attack is defined only through its detection probability and cannot be simulated".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Control,
    Message,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    pub mode: Mode,
    pub alice_bit: Option<u8>,
    pub coincidence: Option<bool>,
    pub bob_bell: Option<BellOutcome>,
    pub bob_decoded: Option<u8>,
    pub eve: EveRecord,
}

/// Bob's fixed decoding of a Bell outcome. The φ outcomes are errors and
/// map to the bit opposite their ψ partner, which makes the symmetric
/// attack a binary symmetric channel with crossover `sin²α`.
pub fn decode_bell(outcome: BellOutcome) -> u8 {
    match outcome {
        BellOutcome::PsiMinus | BellOutcome::PhiMinus => 0,
        BellOutcome::PsiPlus | BellOutcome::PhiPlus => 1,
    }
}

fn noisy_leg<R: Rng + ?Sized>(
    pair: TwoQubitState,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<TwoQubitState> {
    if noise == NoiseModel::None {
        return Ok(pair);
    }
    let out = apply_noise(pair.as_pure(), noise, TwoQubitState::TRAVEL, rng)?;
    TwoQubitState::from_pure(out)
}

/// Bob → Alice: noise, then Eve's interception.
pub(crate) fn forward_leg<R: Rng + ?Sized>(
    pair: TwoQubitState,
    eve: &EveStrategy,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<(EveRecord, TwoQubitState)> {
    let pair = noisy_leg(pair, noise, rng)?;
    match *eve {
        EveStrategy::NoEve => Ok((EveRecord::default(), pair)),
        EveStrategy::MeasureResend { theta } => attacks::intercept_resend(&pair, theta, rng),
        EveStrategy::SymmetricEntangle { alpha } => {
            Ok((EveRecord::default(), attacks::omega_state(alpha)?))
        }
        EveStrategy::GenericAncilla { .. } => {
            Err(Error::Unsupported("ancilla attack simulation".into()))
        }
    }
}

/// Alice → Bob: noise, then Eve's attempt to read the encoding.
pub(crate) fn return_leg<R: Rng + ?Sized>(
    pair: TwoQubitState,
    eve: &EveStrategy,
    record: &mut EveRecord,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<TwoQubitState> {
    let pair = noisy_leg(pair, noise, rng)?;
    match (*eve, record.intercept_bit) {
        (EveStrategy::MeasureResend { theta }, Some(intercept)) => {
            let (home, travel) = pair
                .split_product(1e-9)
                .ok_or_else(|| Error::Internal("intercepted pair is still entangled".into()))?;
            let (guess, forwarded) = attacks::eve_decode_measure(&travel, theta, intercept, rng)?;
            record.guess_bit = Some(guess);
            TwoQubitState::product(&home, &forwarded)
        }
        _ => Ok(pair),
    }
}

/// Both parties measure in `B_z`; returns whether the results coincide.
pub(crate) fn control_check<R: Rng + ?Sized>(pair: &TwoQubitState, rng: &mut R) -> Result<bool> {
    let (alice, post) = measure_computational(pair.as_pure(), TwoQubitState::TRAVEL, rng)?;
    let (bob, _) = measure_computational(&post, TwoQubitState::HOME, rng)?;
    Ok(alice == bob)
}

/// σ_z on the travel qubit for bit 1, identity for bit 0.
pub(crate) fn encode_bit(pair: TwoQubitState, bit: u8) -> Result<TwoQubitState> {
    if bit == 0 {
        return Ok(pair);
    }
    TwoQubitState::from_pure(apply_pauli_z(pair.as_pure(), TwoQubitState::TRAVEL)?)
}

pub fn run_round<R: Rng + ?Sized>(config: &ProtocolConfig, rng: &mut R) -> Result<RoundOutcome> {
    let pair = bell_state(BellOutcome::PsiMinus);
    let (mut eve, pair) = forward_leg(pair, &config.eve, config.noise, rng)?;

    if rng.gen::<f64>() < config.control_prob {
        let coincidence = control_check(&pair, rng)?;
        return Ok(RoundOutcome {
            mode: Mode::Control,
            alice_bit: None,
            coincidence: Some(coincidence),
            bob_bell: None,
            bob_decoded: None,
            eve,
        });
    }

    let bit = u8::from(rng.gen::<bool>());
    let pair = encode_bit(pair, bit)?;
    let pair = return_leg(pair, &config.eve, &mut eve, config.noise, rng)?;
    let bell = bell_measure(&pair, rng);
    Ok(RoundOutcome {
        mode: Mode::Message,
        alice_bit: Some(bit),
        coincidence: None,
        bob_bell: Some(bell),
        bob_decoded: Some(decode_bell(bell)),
        eve,
    })
}

/// Closed-form rates the simulator should reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryBlock {
    pub detection_rate: f64,
    pub bob_error_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionReport {
    pub n_control: u64,
    pub n_coincidence: u64,
    pub detection_rate: f64,
    pub n_message: u64,
    pub bob_error_rate: f64,
    pub eve_accuracy: Option<f64>,
    pub i_ab_hat: f64,
    pub i_ae_hat: Option<f64>,
    pub theory: Option<TheoryBlock>,
    /// `(alice_bit, bob_decoded)` counts over message rounds.
    pub alice_bob: JointCounts2x2,
    /// `(alice_bit, eve_guess)` counts over message rounds Eve decoded.
    pub alice_eve: JointCounts2x2,
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    n_control: u64,
    n_coincidence: u64,
    alice_bob: JointCounts2x2,
    alice_eve: JointCounts2x2,
}

impl Tally {
    fn add(&mut self, round: &RoundOutcome) {
        match round.mode {
            Mode::Control => {
                self.n_control += 1;
                self.n_coincidence += u64::from(round.coincidence == Some(true));
            }
            Mode::Message => {
                if let (Some(a), Some(b)) = (round.alice_bit, round.bob_decoded) {
                    self.alice_bob.record(a, b);
                    if let Some(g) = round.eve.guess_bit {
                        self.alice_eve.record(a, g);
                    }
                }
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.n_control += other.n_control;
        self.n_coincidence += other.n_coincidence;
        self.alice_bob.merge(&other.alice_bob);
        self.alice_eve.merge(&other.alice_eve);
        self
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs `config.rounds` rounds. Shard `i` of [`SHARD_ROUNDS`] rounds uses
/// stream `i` of `config.seed`, so the report is identical for any thread
/// count.
pub fn run_session(config: &ProtocolConfig) -> Result<SessionReport> {
    config.validate()?;
    let shards = config.rounds.div_ceil(SHARD_ROUNDS);
    let tallies: Vec<Result<Tally>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = derive_stream(config.seed, shard);
            let len = SHARD_ROUNDS.min(config.rounds - shard * SHARD_ROUNDS);
            let mut tally = Tally::default();
            for _ in 0..len {
                tally.add(&run_round(config, &mut rng)?);
            }
            Ok(tally)
        })
        .collect();
    let tally = tallies
        .into_iter()
        .try_fold(Tally::default(), |acc, t| t.map(|t| acc.merge(t)))?;

    let n_message = tally.alice_bob.total();
    let eve_guesses = tally.alice_eve.total();
    Ok(SessionReport {
        n_control: tally.n_control,
        n_coincidence: tally.n_coincidence,
        detection_rate: ratio(tally.n_coincidence, tally.n_control),
        n_message,
        bob_error_rate: ratio(n_message - tally.alice_bob.agreements(), n_message),
        eve_accuracy: (eve_guesses > 0).then(|| ratio(tally.alice_eve.agreements(), eve_guesses)),
        i_ab_hat: if n_message > 0 {
            empirical_mutual_information(&tally.alice_bob)?
        } else {
            0.0
        },
        i_ae_hat: if eve_guesses > 0 {
            Some(empirical_mutual_information(&tally.alice_eve)?)
        } else {
            None
        },
        theory: expected_report(config),
        alice_bob: tally.alice_bob,
        alice_eve: tally.alice_eve,
    })
}

/// Probabilities that one noisy leg applies a Pauli with an X component
/// (flips `B_z` correlations) and with a Z component (flips the encoded bit).
fn flip_components(noise: NoiseModel) -> (f64, f64) {
    let [_, x, y, z] = noise.pauli_weights();
    (x + y, z + y)
}

/// Analytic detection and Bob error rates, or `None` for the ancilla attack.
pub fn expected_report(config: &ProtocolConfig) -> Option<TheoryBlock> {
    let (x, z) = flip_components(config.noise);
    // Bob's decode flips iff an odd number of legs carried a Z component
    let two_leg_z = 2.0 * z * (1.0 - z);
    match config.eve {
        EveStrategy::NoEve => Some(TheoryBlock {
            detection_rate: x,
            bob_error_rate: two_leg_z,
        }),
        EveStrategy::MeasureResend { theta } => {
            let d = (theta / 2.0).sin().powi(2);
            Some(TheoryBlock {
                detection_rate: (1.0 - x) * d + x * (1.0 - d),
                bob_error_rate: 0.5,
            })
        }
        EveStrategy::SymmetricEntangle { alpha } => {
            // the injected pair replaces whatever the first leg did
            let s = alpha.sin().powi(2);
            Some(TheoryBlock {
                detection_rate: s,
                bob_error_rate: s * (1.0 - z) + (1.0 - s) * z,
            })
        }
        EveStrategy::GenericAncilla { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_pauli, bell_probabilities, Pauli};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn config(
        eve: EveStrategy,
        noise: NoiseModel,
        rounds: u64,
        control_prob: f64,
    ) -> ProtocolConfig {
        ProtocolConfig {
            rounds,
            control_prob,
            eve,
            noise,
            seed: 42,
        }
    }

    fn within_3_sigma(rate: f64, n: u64, p: f64) -> bool {
        let p = p.clamp(0.0, 1.0);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        (rate - p).abs() <= 3.0 * sigma + 1e-12
    }

    #[test]
    fn ideal_message_round_bit_one() {
        let cfg = config(EveStrategy::NoEve, NoiseModel::None, 1, 0.0);
        let mut rng = derive_stream(1, 0);
        let mut ones = 0;
        for _ in 0..2000 {
            let r = run_round(&cfg, &mut rng).unwrap();
            assert_eq!(r.mode, Mode::Message);
            assert!(r.coincidence.is_none());
            if r.alice_bit == Some(1) {
                ones += 1;
                assert_eq!(r.bob_bell, Some(BellOutcome::PsiPlus));
            } else {
                assert_eq!(r.bob_bell, Some(BellOutcome::PsiMinus));
            }
            assert_eq!(r.bob_decoded, r.alice_bit);
        }
        assert!(ones > 0);
    }

    #[test]
    fn ideal_control_never_coincides() {
        let cfg = config(EveStrategy::NoEve, NoiseModel::None, 1, 1.0);
        let mut rng = derive_stream(2, 0);
        for _ in 0..2000 {
            let r = run_round(&cfg, &mut rng).unwrap();
            assert_eq!(r.mode, Mode::Control);
            assert_eq!(r.coincidence, Some(false));
            assert!(r.bob_decoded.is_none() && r.alice_bit.is_none());
        }
    }

    #[test]
    fn record_invariant_guess_requires_intercept() {
        let cfg = config(
            EveStrategy::MeasureResend { theta: 1.0 },
            NoiseModel::Depolarizing(0.2),
            1,
            0.5,
        );
        let mut rng = derive_stream(3, 0);
        for _ in 0..2000 {
            let r = run_round(&cfg, &mut rng).unwrap();
            assert!(r.eve.intercept_bit.is_some());
            assert_eq!(r.eve.guess_bit.is_some(), r.mode == Mode::Message);
        }
    }

    #[test]
    fn measure_resend_message_rounds_are_coin_flips() {
        let cfg = config(
            EveStrategy::MeasureResend { theta: FRAC_PI_2 },
            NoiseModel::None,
            100_000,
            0.0,
        );
        let report = run_session(&cfg).unwrap();
        assert_eq!(report.n_message, 100_000);
        assert!(within_3_sigma(
            1.0 - report.bob_error_rate,
            report.n_message,
            0.5
        ));
    }

    #[test]
    fn ideal_session() {
        let cfg = config(EveStrategy::NoEve, NoiseModel::None, 10_000, 0.5);
        let r = run_session(&cfg).unwrap();
        assert_eq!(r.n_control + r.n_message, 10_000);
        assert_eq!(r.detection_rate, 0.0);
        assert_eq!(r.bob_error_rate, 0.0);
        // a noiseless channel carries all of Alice's empirical entropy
        let c = r.alice_bob.0;
        let p1 = (c[1][0] + c[1][1]) as f64 / r.n_message as f64;
        let h = crate::info::binary_entropy(p1).unwrap();
        assert!((r.i_ab_hat - h).abs() < 1e-12);
        assert!(r.i_ab_hat > 0.999);
        assert!(r.eve_accuracy.is_none() && r.i_ae_hat.is_none());
    }

    #[test]
    fn measure_resend_session() {
        let cfg = config(
            EveStrategy::MeasureResend { theta: FRAC_PI_2 },
            NoiseModel::None,
            100_000,
            0.5,
        );
        let r = run_session(&cfg).unwrap();
        assert!(within_3_sigma(r.detection_rate, r.n_control, 0.5));
        assert_eq!(r.eve_accuracy, Some(1.0));
        assert!(r.i_ab_hat <= 0.01);
    }

    #[test]
    fn symmetric_session_at_threshold() {
        let alpha = 0.11f64.sqrt().asin();
        let cfg = config(
            EveStrategy::SymmetricEntangle { alpha },
            NoiseModel::None,
            100_000,
            0.5,
        );
        let r = run_session(&cfg).unwrap();
        assert!(within_3_sigma(r.detection_rate, r.n_control, 0.11));
        assert!(within_3_sigma(r.bob_error_rate, r.n_message, 0.11));
    }

    #[test]
    fn session_is_reproducible() {
        let cfg = config(
            EveStrategy::MeasureResend { theta: 0.8 },
            NoiseModel::BitFlip(0.1),
            20_000,
            0.3,
        );
        assert_eq!(run_session(&cfg).unwrap(), run_session(&cfg).unwrap());
        let other = ProtocolConfig { seed: 43, ..cfg };
        assert_ne!(run_session(&cfg).unwrap(), run_session(&other).unwrap());
    }

    #[test]
    fn ancilla_is_not_simulable() {
        let cfg = config(
            EveStrategy::generic_ancilla(0.2).unwrap(),
            NoiseModel::None,
            10,
            0.5,
        );
        assert!(matches!(run_session(&cfg), Err(Error::Unsupported(_))));
        assert!(expected_report(&cfg).is_none());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(run_session(&config(EveStrategy::NoEve, NoiseModel::None, 0, 0.5)).is_err());
        assert!(run_session(&config(EveStrategy::NoEve, NoiseModel::None, 10, 1.5)).is_err());
        assert!(run_session(&config(
            EveStrategy::NoEve,
            NoiseModel::BitFlip(2.0),
            10,
            0.5
        ))
        .is_err());
    }

    #[test]
    fn expected_report_examples() {
        let t = expected_report(&config(
            EveStrategy::MeasureResend { theta: FRAC_PI_3 },
            NoiseModel::None,
            1,
            0.5,
        ))
        .unwrap();
        assert!((t.detection_rate - 0.25).abs() < 1e-12);
        assert_eq!(t.bob_error_rate, 0.5);
        let t = expected_report(&config(
            EveStrategy::SymmetricEntangle { alpha: 0.0 },
            NoiseModel::None,
            1,
            0.5,
        ))
        .unwrap();
        assert_eq!((t.detection_rate, t.bob_error_rate), (0.0, 0.0));
    }

    /// Exact enumeration over the Pauli applied on each leg, using Bell
    /// probabilities of the resulting pure states. Independent of the
    /// closed forms in `expected_report`.
    fn branch_oracle(noise: NoiseModel) -> TheoryBlock {
        let psi = bell_state(BellOutcome::PsiMinus);
        let w = noise.pauli_weights();
        let mut detection = 0.0;
        let mut error = 0.0;
        for (p1, w1) in Pauli::ALL.into_iter().zip(w) {
            let leg1 = apply_pauli(psi.as_pure(), p1, 1).unwrap();
            let a = leg1.amplitudes();
            detection += w1 * (a[0].norm_sqr() + a[3].norm_sqr());
            for bit in [0u8, 1] {
                let enc = encode_bit(TwoQubitState::from_pure(leg1.clone()).unwrap(), bit).unwrap();
                for (p2, w2) in Pauli::ALL.into_iter().zip(w) {
                    let leg2 = TwoQubitState::from_pure(apply_pauli(enc.as_pure(), p2, 1).unwrap())
                        .unwrap();
                    let probs = bell_probabilities(&leg2);
                    let wrong: f64 = BellOutcome::ALL
                        .into_iter()
                        .filter(|k| decode_bell(*k) != bit)
                        .map(|k| probs.get(k))
                        .sum();
                    error += 0.5 * w1 * w2 * wrong;
                }
            }
        }
        TheoryBlock {
            detection_rate: detection,
            bob_error_rate: error,
        }
    }

    #[test]
    fn noise_closed_forms_match_branch_oracle() {
        for noise in [
            NoiseModel::None,
            NoiseModel::BitFlip(0.13),
            NoiseModel::PhaseFlip(0.07),
            NoiseModel::Depolarizing(0.2),
        ] {
            let oracle = branch_oracle(noise);
            let t = expected_report(&config(EveStrategy::NoEve, noise, 1, 0.5)).unwrap();
            assert!(
                (t.detection_rate - oracle.detection_rate).abs() < 1e-12,
                "{noise}"
            );
            assert!(
                (t.bob_error_rate - oracle.bob_error_rate).abs() < 1e-12,
                "{noise}"
            );
        }
        let t = expected_report(&config(
            EveStrategy::NoEve,
            NoiseModel::BitFlip(0.2),
            1,
            0.5,
        ))
        .unwrap();
        assert!((t.detection_rate - 0.2).abs() < 1e-12);
    }

    #[test]
    fn empirical_rates_match_theory() {
        let cases = [
            (EveStrategy::NoEve, NoiseModel::Depolarizing(0.15)),
            (EveStrategy::NoEve, NoiseModel::BitFlip(0.1)),
            (EveStrategy::NoEve, NoiseModel::PhaseFlip(0.1)),
            (
                EveStrategy::MeasureResend { theta: 0.9 },
                NoiseModel::Depolarizing(0.1),
            ),
            (
                EveStrategy::MeasureResend { theta: FRAC_PI_3 },
                NoiseModel::None,
            ),
            (
                EveStrategy::SymmetricEntangle { alpha: 0.25 },
                NoiseModel::PhaseFlip(0.05),
            ),
        ];
        for (eve, noise) in cases {
            let cfg = config(eve, noise, 100_000, 0.5);
            let r = run_session(&cfg).unwrap();
            let t = r.theory.unwrap();
            assert!(
                within_3_sigma(r.detection_rate, r.n_control, t.detection_rate),
                "{eve} {noise}: {}",
                r.detection_rate
            );
            assert!(
                within_3_sigma(r.bob_error_rate, r.n_message, t.bob_error_rate),
                "{eve} {noise}: {}",
                r.bob_error_rate
            );
        }
    }
}
