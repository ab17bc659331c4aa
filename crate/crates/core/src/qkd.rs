//! Key distribution over a noisy channel with nested codes `C₂ ⊂ C₁`.
//!
//! One block spends `n + m + l` EPR pairs: `m` control positions checked in
//! `B_z` on the way to Alice, `n` message positions carrying a random
//! string `x`, and `l` decoy positions that always carry 0. Alice then
//! publishes `x ⊕ v` for a random codeword `v ∈ C₁`; Bob removes it from
//! his decoded string, corrects with `C₁`, and both sides keep the label of
//! `v + C₂` in `C₁/C₂` as the key.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attacks::EveStrategy;
use crate::gf2::{BinaryCode, BinaryWord, Echelon, SyndromeDecoder};
use crate::pingpong::{control_check, decode_bell, encode_bit, forward_leg, return_leg};
use crate::quantum::{
    apply_pauli_z, bell_measure, bell_state, BellOutcome, NoiseModel, PureState, TwoQubitState,
    MAX_QUBITS,
};
use crate::rng::derive_stream;
use crate::{Error, Result};

/// Codes `C₂ ⊂ C₁` of the same length with `0 < dim C₂ < dim C₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedCodePair {
    c1: BinaryCode,
    c2: BinaryCode,
    /// Echelon over the basis `C₂ generators ++ extension`.
    quotient: Echelon,
}

impl NestedCodePair {
    pub fn new(c1: BinaryCode, c2: BinaryCode) -> Result<Self> {
        if c1.n() != c2.n() {
            return Err(Error::NestedCodeViolation(format!(
                "block lengths differ ({} vs {})",
                c1.n(),
                c2.n()
            )));
        }
        for (i, g) in c2.generators().iter().enumerate() {
            if !c1.contains(g)? {
                return Err(Error::NestedCodeViolation(format!(
                    "C2 generator {i} ({g}) is not in C1"
                )));
            }
        }
        if c2.k() >= c1.k() {
            return Err(Error::NestedCodeViolation(format!(
                "dim C2 = {} must be smaller than dim C1 = {}",
                c2.k(),
                c1.k()
            )));
        }
        let mut quotient = Echelon::new(c1.n(), c1.k());
        for (i, g) in c2.generators().iter().enumerate() {
            quotient.insert(g, i);
        }
        let mut next = c2.k();
        for g in c1.generators() {
            if quotient.insert(g, next) {
                next += 1;
            }
        }
        if quotient.rank() != c1.k() {
            return Err(Error::Internal(
                "basis extension did not reach dim C1".into(),
            ));
        }
        Ok(NestedCodePair { c1, c2, quotient })
    }

    pub fn c1(&self) -> &BinaryCode {
        &self.c1
    }

    pub fn c2(&self) -> &BinaryCode {
        &self.c2
    }

    pub fn n(&self) -> usize {
        self.c1.n()
    }

    /// `dim C₁ − dim C₂` key bits per block.
    pub fn key_length(&self) -> usize {
        self.c1.k() - self.c2.k()
    }

    /// Coordinates of `v` along the extension of the `C₂` basis to `C₁`:
    /// a label of the coset `v + C₂`.
    pub fn coset_key(&self, v: &BinaryWord) -> Result<BinaryWord> {
        if v.len() != self.n() {
            return Err(Error::invalid(format!(
                "word length {} does not match n = {}",
                v.len(),
                self.n()
            )));
        }
        let (residual, combo) = self.quotient.reduce(v);
        if !residual.is_zero() {
            return Err(Error::invalid(format!("{v} is not a codeword of C1")));
        }
        Ok(BinaryWord::from_bits(combo.bits()[self.c2.k()..].to_vec()))
    }

    /// `|x + C₂⟩`: the uniform superposition of `x ⊕ y` over `y ∈ C₂`.
    pub fn codeword_superposition(&self, x: &BinaryWord) -> Result<PureState> {
        let n = self.n();
        debug_assert_eq!(n, self.quotient.n());
        if n > MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "coset state on {n} qubits (limit {MAX_QUBITS})"
            )));
        }
        if !self.c1.contains(x)? {
            return Err(Error::invalid(format!("{x} is not a codeword of C1")));
        }
        let coset = self.c2.codewords()?;
        let amp = Complex64::new(1.0 / (coset.len() as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for y in &coset {
            amps[x.xor(y)?.to_index()] = amp;
        }
        PureState::new(n, amps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PositionRole {
    Message,
    Control,
    Decoy,
}

/// Assignment of each of the `n + m + l` pair positions to a role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionLabeling {
    labels: Vec<PositionRole>,
}

impl PositionLabeling {
    pub fn labels(&self) -> &[PositionRole] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `(n, m, l)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |r| self.labels.iter().filter(|x| **x == r).count();
        (
            count(PositionRole::Message),
            count(PositionRole::Control),
            count(PositionRole::Decoy),
        )
    }

    pub fn positions(&self, role: PositionRole) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|i| self.labels[*i] == role)
            .collect()
    }
}

/// Uniformly random labeling with exactly `n` message, `m` control and
/// `l` decoy positions.
pub fn assign_positions<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    l: usize,
    rng: &mut R,
) -> Result<PositionLabeling> {
    if n == 0 || m == 0 || l == 0 {
        return Err(Error::invalid("n, m and l must all be at least 1"));
    }
    let mut labels = Vec::with_capacity(n + m + l);
    labels.extend(std::iter::repeat_n(PositionRole::Message, n));
    labels.extend(std::iter::repeat_n(PositionRole::Control, m));
    labels.extend(std::iter::repeat_n(PositionRole::Decoy, l));
    labels.shuffle(rng);
    Ok(PositionLabeling { labels })
}

/// `⌊0.11 · count⌋`, the default abort threshold.
pub fn default_threshold(count: usize) -> usize {
    count * 11 / 100
}

#[derive(Clone, Debug, PartialEq)]
pub struct QkdConfig {
    pub pair: NestedCodePair,
    /// Control positions per block.
    pub m: usize,
    /// Decoy positions per block.
    pub l: usize,
    /// Abort when more than `t` control results coincide.
    pub t: usize,
    /// Abort when more than `t_prime` decoys decode as 1.
    pub t_prime: usize,
    pub blocks: usize,
    pub eve: EveStrategy,
    pub noise: NoiseModel,
    pub seed: u64,
    /// Test hook: σ_z applied to this many randomly chosen message
    /// positions after the return leg, flipping Bob's decoded bit there.
    pub inject_message_flips: usize,
}

impl QkdConfig {
    /// Config with the default thresholds `⌊0.11·m⌋` and `⌊0.11·l⌋`.
    pub fn new(
        pair: NestedCodePair,
        m: usize,
        l: usize,
        blocks: usize,
        eve: EveStrategy,
        noise: NoiseModel,
        seed: u64,
    ) -> Self {
        QkdConfig {
            pair,
            m,
            l,
            t: default_threshold(m),
            t_prime: default_threshold(l),
            blocks,
            eve,
            noise,
            seed,
            inject_message_flips: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.l == 0 {
            return Err(Error::invalid("m and l must be at least 1"));
        }
        if self.t > self.m {
            return Err(Error::invalid(format!(
                "t = {} exceeds m = {}",
                self.t, self.m
            )));
        }
        if self.t_prime > self.l {
            return Err(Error::invalid(format!(
                "t' = {} exceeds l = {}",
                self.t_prime, self.l
            )));
        }
        if self.blocks == 0 {
            return Err(Error::invalid("blocks must be at least 1"));
        }
        if self.inject_message_flips > self.pair.n() {
            return Err(Error::invalid("more injected flips than message positions"));
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

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QkdResult {
    AbortedControl {
        coincidences: usize,
    },
    AbortedDecoy {
        ones: usize,
    },
    /// `bob_key` is `None` when Bob's word could not be decoded.
    Completed {
        alice_key: BinaryWord,
        bob_key: Option<BinaryWord>,
        decode_failures: usize,
    },
}

impl QkdResult {
    pub fn is_aborted(&self) -> bool {
        !matches!(self, QkdResult::Completed { .. })
    }

    pub fn keys_agree(&self) -> bool {
        matches!(self, QkdResult::Completed { alice_key, bob_key: Some(b), .. } if alice_key == b)
    }
}

/// Public counts observed in one block, available even when it completes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockStats {
    pub coincidences: usize,
    /// `None` when the block aborted before the decoy check.
    pub decoy_ones: Option<usize>,
}

pub fn run_qkd_block<R: Rng + ?Sized>(config: &QkdConfig, rng: &mut R) -> Result<QkdResult> {
    config.validate()?;
    let decoder = SyndromeDecoder::new(config.pair.c1())?;
    run_block_with(config, &decoder, rng).map(|(result, _)| result)
}

fn run_block_with<R: Rng + ?Sized>(
    config: &QkdConfig,
    decoder: &SyndromeDecoder,
    rng: &mut R,
) -> Result<(QkdResult, BlockStats)> {
    let pair = &config.pair;
    let n = pair.n();

    // (1)–(2) Alice's labeling, codeword v and message string x
    let labels = assign_positions(n, config.m, config.l, rng)?;
    let v = pair.c1().encode(&BinaryWord::random(pair.c1().k(), rng))?;
    let x = BinaryWord::random(n, rng);

    // (3)–(4) Bob's pairs travel to Alice
    let mut pairs = Vec::with_capacity(labels.len());
    for _ in 0..labels.len() {
        pairs.push(forward_leg(
            bell_state(BellOutcome::PsiMinus),
            &config.eve,
            config.noise,
            rng,
        )?);
    }

    // (5)–(6) control check
    let mut coincidences = 0;
    for i in labels.positions(PositionRole::Control) {
        coincidences += usize::from(control_check(&pairs[i].1, rng)?);
    }
    let mut stats = BlockStats {
        coincidences,
        decoy_ones: None,
    };
    if coincidences > config.t {
        return Ok((QkdResult::AbortedControl { coincidences }, stats));
    }

    // (7) encode x on message positions, 0 on decoys, and send back
    let message_positions = labels.positions(PositionRole::Message);
    let decoy_positions = labels.positions(PositionRole::Decoy);
    let flipped: Vec<usize> = message_positions
        .choose_multiple(rng, config.inject_message_flips)
        .copied()
        .collect();
    let mut decoded = vec![0u8; labels.len()];
    let returning = message_positions
        .iter()
        .enumerate()
        .map(|(j, &pos)| (pos, u8::from(x.get(j))))
        .chain(decoy_positions.iter().map(|&pos| (pos, 0)));
    for (pos, bit) in returning {
        let (mut record, state) = pairs[pos].clone();
        let state = encode_bit(state, bit)?;
        let mut state = return_leg(state, &config.eve, &mut record, config.noise, rng)?;
        if flipped.contains(&pos) {
            state =
                TwoQubitState::from_pure(apply_pauli_z(state.as_pure(), TwoQubitState::TRAVEL)?)?;
        }
        // (8) Bell measurement
        decoded[pos] = decode_bell(bell_measure(&state, rng));
    }

    // (9) decoy check against the announced labeling
    let ones = decoy_positions.iter().filter(|&&p| decoded[p] == 1).count();
    stats.decoy_ones = Some(ones);
    if ones > config.t_prime {
        return Ok((QkdResult::AbortedDecoy { ones }, stats));
    }

    // (10) Alice announces x ⊕ v; Bob strips it and corrects with C₁
    let announced = x.xor(&v)?;
    let received =
        BinaryWord::from_bits(message_positions.iter().map(|&p| decoded[p] == 1).collect());
    let noisy_v = received.xor(&announced)?;
    let corrected = decoder.decode(&noisy_v)?;

    // (11) coset keys
    let alice_key = pair.coset_key(&v)?;
    let (bob_key, decode_failures) = match corrected {
        Some(v_hat) => (Some(pair.coset_key(&v_hat)?), 0),
        None => (None, 1),
    };
    Ok((
        QkdResult::Completed {
            alice_key,
            bob_key,
            decode_failures,
        },
        stats,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QkdSummary {
    pub blocks: usize,
    pub aborted_control: usize,
    pub aborted_decoy: usize,
    pub completed: usize,
    pub decode_failures: usize,
    pub agreements: usize,
    pub abort_rate: f64,
    /// Agreeing keys over completed blocks.
    pub agreement_rate: f64,
    /// Key bits from blocks whose keys agree.
    pub key_bits: usize,
    /// Mean coincidence fraction over all control positions.
    pub control_coincidence_rate: f64,
    /// Mean fraction of decoys read as 1, over blocks that reached the check.
    pub decoy_one_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QkdSessionReport {
    pub results: Vec<QkdResult>,
    pub stats: Vec<BlockStats>,
    pub summary: QkdSummary,
}

/// Runs `config.blocks` independent blocks; block `i` uses stream `i` of
/// `config.seed`.
pub fn run_qkd_session(config: &QkdConfig) -> Result<QkdSessionReport> {
    config.validate()?;
    let decoder = SyndromeDecoder::new(config.pair.c1())?;
    let outcomes: Vec<(QkdResult, BlockStats)> = (0..config.blocks)
        .into_par_iter()
        .map(|b| run_block_with(config, &decoder, &mut derive_stream(config.seed, b as u64)))
        .collect::<Result<_>>()?;
    let (results, stats): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();

    let count = |f: &dyn Fn(&QkdResult) -> bool| results.iter().filter(|r| f(r)).count();
    let aborted_control = count(&|r| matches!(r, QkdResult::AbortedControl { .. }));
    let aborted_decoy = count(&|r| matches!(r, QkdResult::AbortedDecoy { .. }));
    let completed = results.len() - aborted_control - aborted_decoy;
    let agreements = count(&|r| r.keys_agree());
    let decode_failures = results
        .iter()
        .map(|r| match r {
            QkdResult::Completed {
                decode_failures, ..
            } => *decode_failures,
            _ => 0,
        })
        .sum();
    let checked: Vec<usize> = stats.iter().filter_map(|s| s.decoy_ones).collect();
    let summary = QkdSummary {
        blocks: results.len(),
        aborted_control,
        aborted_decoy,
        completed,
        decode_failures,
        agreements,
        abort_rate: (aborted_control + aborted_decoy) as f64 / results.len() as f64,
        agreement_rate: if completed == 0 {
            0.0
        } else {
            agreements as f64 / completed as f64
        },
        key_bits: agreements * config.pair.key_length(),
        control_coincidence_rate: stats.iter().map(|s| s.coincidences).sum::<usize>() as f64
            / (config.m * results.len()) as f64,
        decoy_one_rate: (!checked.is_empty())
            .then(|| checked.iter().sum::<usize>() as f64 / (config.l * checked.len()) as f64),
    };
    Ok(QkdSessionReport {
        results,
        stats,
        summary,
    })
}

/// The shipped reference pair: Hamming `[7,4,3]` over its `[7,3]` dual.
pub fn hamming_pair() -> NestedCodePair {
    NestedCodePair::new(crate::gf2::hamming74(), crate::gf2::hamming74_dual())
        .expect("dual is contained in Hamming")
}
