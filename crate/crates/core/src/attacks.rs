//! Eavesdropper strategies acting on the travel qubit.
//!
//! * measure-resend: measure the travel qubit in `B_z` on the way to Alice,
//!   resend a polarized substitute, and discriminate Alice's encoding on
//!   the way back;
//! * symmetric entangling: the pair Alice and Bob share is replaced by
//!   `|Ω(α)⟩ = cos α|ψ⁻⟩ + sin α|φ⁺⟩`;
//! * generic ancilla: only its detection accounting `d = |β|²`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::quantum::{
    self, helstrom_measure, measure_computational, parse_param, prepare_polarized, Amplitude,
    PureState, TwoQubitState, NORM_TOLERANCE,
};
use crate::{Error, Result};

/// Slack accepted on angle bounds so that rounded inputs such as
/// `theta=1.5708` still denote the boundary.
pub const ANGLE_SLACK: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EveStrategy {
    NoEve,
    MeasureResend {
        theta: f64,
    },
    SymmetricEntangle {
        alpha: f64,
    },
    GenericAncilla {
        alpha_amp: Amplitude,
        beta_amp: Amplitude,
    },
}

impl EveStrategy {
    pub fn measure_resend(theta: f64) -> Result<Self> {
        let s = EveStrategy::MeasureResend { theta };
        s.validate()?;
        Ok(s)
    }

    pub fn symmetric_entangle(alpha: f64) -> Result<Self> {
        let s = EveStrategy::SymmetricEntangle { alpha };
        s.validate()?;
        Ok(s)
    }

    /// Ancilla attack with real amplitudes `α = √(1 − β²)`, `β = √β²`.
    pub fn generic_ancilla(beta2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta2) {
            return Err(Error::invalid(format!("beta2 = {beta2} outside [0, 1]")));
        }
        Ok(EveStrategy::GenericAncilla {
            alpha_amp: Complex64::new((1.0 - beta2).sqrt(), 0.0),
            beta_amp: Complex64::new(beta2.sqrt(), 0.0),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EveStrategy::NoEve => Ok(()),
            EveStrategy::MeasureResend { theta } => check_angle(theta, FRAC_PI_2, "theta"),
            EveStrategy::SymmetricEntangle { alpha } => check_angle(alpha, FRAC_PI_4, "alpha"),
            EveStrategy::GenericAncilla {
                alpha_amp,
                beta_amp,
            } => generic_attack_detection(alpha_amp, beta_amp).map(|_| ()),
        }
    }
}

fn check_angle(value: f64, max: f64, name: &str) -> Result<()> {
    if value.is_finite() && (0.0..=max + ANGLE_SLACK).contains(&value) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} = {value} outside [0, {max:.6}]"
        )))
    }
}

impl fmt::Display for EveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EveStrategy::NoEve => f.write_str("none"),
            EveStrategy::MeasureResend { theta } => write!(f, "measure:theta={theta}"),
            EveStrategy::SymmetricEntangle { alpha } => write!(f, "entangle:alpha={alpha}"),
            EveStrategy::GenericAncilla { beta_amp, .. } => {
                write!(f, "ancilla:beta2={}", beta_amp.norm_sqr())
            }
        }
    }
}

/// Grammar: `none | measure:theta=<rad> | entangle:alpha=<rad> | ancilla:beta2=<prob>`.
impl FromStr for EveStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(EveStrategy::NoEve);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("bad eve token `{s}`")))?;
        match kind {
            "measure" => EveStrategy::measure_resend(parse_param(rest, "theta")?),
            "entangle" => EveStrategy::symmetric_entangle(parse_param(rest, "alpha")?),
            "ancilla" => EveStrategy::generic_ancilla(parse_param(rest, "beta2")?),
            other => Err(Error::parse(format!("unknown eve strategy `{other}`"))),
        }
    }
}

/// What Eve learned in one round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EveRecord {
    /// Outcome of the `B_z` measurement on the way to Alice.
    pub intercept_bit: Option<u8>,
    /// Eve's guess of Alice's bit on the way back.
    pub guess_bit: Option<u8>,
}

/// The state Eve resends after reading `intercept_bit`: `|↑_n(θ)⟩` for 0 and
/// its mirror `sin(θ/2)|0⟩ + cos(θ/2)|1⟩` for 1.
pub fn resend_state(theta: f64, intercept_bit: u8) -> Result<PureState> {
    let up = prepare_polarized(theta)?;
    if intercept_bit == 0 {
        Ok(up)
    } else {
        let a = up.amplitudes();
        PureState::new(1, vec![a[1], a[0]])
    }
}

pub fn intercept_resend<R: Rng + ?Sized>(
    joint: &TwoQubitState,
    theta: f64,
    rng: &mut R,
) -> Result<(EveRecord, TwoQubitState)> {
    let (bit, collapsed) = measure_computational(joint.as_pure(), TwoQubitState::TRAVEL, rng)?;
    let collapsed = TwoQubitState::from_pure(collapsed)?;
    let (home, _) = collapsed
        .split_product(1e-9)
        .ok_or_else(|| Error::Internal("post-measurement pair is entangled".into()))?;
    let resent = TwoQubitState::product(&home, &resend_state(theta, bit)?)?;
    let record = EveRecord {
        intercept_bit: Some(bit),
        guess_bit: None,
    };
    Ok((record, resent))
}

/// `sin²(θ/2)`: probability that a control round exposes the resent state.
pub fn detection_probability_measurement(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, π]")));
    }
    Ok((theta / 2.0).sin().powi(2))
}

/// Helstrom measurement between the resent state and its σ_z image.
/// Returns Eve's guess of Alice's bit and the state she forwards.
pub fn eve_decode_measure<R: Rng + ?Sized>(
    travel: &PureState,
    theta: f64,
    intercept_bit: u8,
    rng: &mut R,
) -> Result<(u8, PureState)> {
    let sent = resend_state(theta, intercept_bit)?;
    let flipped = quantum::apply_pauli_z(&sent, 0)?;
    helstrom_measure(&sent, &flipped, travel, rng)
}

pub fn eve_decode<R: Rng + ?Sized>(
    travel: &PureState,
    theta: f64,
    intercept_bit: u8,
    rng: &mut R,
) -> Result<u8> {
    eve_decode_measure(travel, theta, intercept_bit, rng).map(|(bit, _)| bit)
}

/// `cos α|ψ⁻⟩ + sin α|φ⁺⟩`.
pub fn omega_state(alpha: f64) -> Result<TwoQubitState> {
    check_angle(alpha, FRAC_PI_4, "alpha")?;
    let (s, c) = alpha.sin_cos();
    let h = FRAC_1_SQRT_2;
    let amp = |x: f64| Complex64::new(x * h, 0.0);
    TwoQubitState::new([amp(s), amp(c), amp(-c), amp(s)])
}

/// `|Ω⟩` after Alice's encoding: unchanged for 0, σ_z on the travel qubit for 1.
pub fn omega_after_encoding(alpha: f64, alice_bit: u8) -> Result<TwoQubitState> {
    let omega = omega_state(alpha)?;
    if alice_bit == 0 {
        return Ok(omega);
    }
    let encoded = quantum::apply_pauli_z(omega.as_pure(), TwoQubitState::TRAVEL)?;
    TwoQubitState::from_pure(encoded)
}

/// `d = |β|²` for the ancilla attack `E|0,χ⟩ = α|0,χ₀⟩ + β|1,χ₁⟩`.
pub fn generic_attack_detection(alpha_amp: Amplitude, beta_amp: Amplitude) -> Result<f64> {
    let norm = alpha_amp.norm_sqr() + beta_amp.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::invalid(format!("|α|² + |β|² = {norm}, expected 1")));
    }
    Ok(beta_amp.norm_sqr())
}

/// Probability that a `B_z` control check on both qubits finds equal results.
pub fn control_coincidence_probability(state: &TwoQubitState) -> f64 {
    let a = state.as_pure().amplitudes();
    a[0].norm_sqr() + a[3].norm_sqr()
}
