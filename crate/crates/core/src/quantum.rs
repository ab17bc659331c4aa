//! Pure-state simulation of small qubit registers.
//!
//! Basis index `i` encodes the ket `|bits(i)⟩` with qubit 0 as the most
//! significant bit. For the protocol pair, qubit 0 is Bob's home qubit and
//! qubit 1 is the travel qubit.
//!
//! Global phases are never normalized away; compare states with
//! [`PureState::fidelity`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Amplitude = Complex64;

/// Tolerance on `Σ|amp|² = 1` accepted by [`PureState::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest register the simulator will allocate (4096 amplitudes).
pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Builds a state from explicit amplitudes, rejecting anything that is
    /// not finite, of the wrong length, or off unit norm by more than
    /// [`NORM_TOLERANCE`].
    pub fn new(n_qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        let state = Self::unchecked(n_qubits, amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Like [`PureState::new`] but rescales the amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        let mut state = Self::unchecked(n_qubits, amps)?;
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn unchecked(n_qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "{n_qubits} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::invalid(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("non-finite amplitude"));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Unsupported(format!("{n_qubits} qubits")));
        }
        if index >= 1 << n_qubits {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn zero() -> Self {
        Self {
            n_qubits: 1,
            amps: vec![ONE, ZERO],
        }
    }

    pub fn one() -> Self {
        Self {
            n_qubits: 1,
            amps: vec![ZERO, ONE],
        }
    }

    pub fn plus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            n_qubits: 1,
            amps: vec![h, h],
        }
    }

    pub fn minus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            n_qubits: 1,
            amps: vec![h, -h],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid("inner product of different register sizes"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, with `self` occupying the high-order qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n_qubits + other.n_qubits;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self::unchecked(n, amps)
    }

    /// Probability that `qubit` reads 1 in the computational basis.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        let mask = self.mask(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::invalid(format!(
                "qubit {qubit} out of range for a {}-qubit register",
                self.n_qubits
            )));
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    fn map_amps(&self, f: impl Fn(usize, &[Amplitude]) -> Amplitude) -> PureState {
        let amps = (0..self.amps.len()).map(|i| f(i, &self.amps)).collect();
        PureState {
            n_qubits: self.n_qubits,
            amps,
        }
    }
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

pub fn apply_pauli(state: &PureState, pauli: Pauli, qubit: usize) -> Result<PureState> {
    let mask = state.mask(qubit)?;
    Ok(match pauli {
        Pauli::I => state.clone(),
        Pauli::X => state.map_amps(|i, a| a[i ^ mask]),
        Pauli::Z => state.map_amps(|i, a| if i & mask != 0 { -a[i] } else { a[i] }),
        // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
        Pauli::Y => state.map_amps(|i, a| {
            if i & mask != 0 {
                I * a[i ^ mask]
            } else {
                -I * a[i ^ mask]
            }
        }),
    })
}

/// σ_z on `qubit`: negates every amplitude whose target bit is 1.
pub fn apply_pauli_z(state: &PureState, qubit: usize) -> Result<PureState> {
    apply_pauli(state, Pauli::Z, qubit)
}

pub fn apply_pauli_x(state: &PureState, qubit: usize) -> Result<PureState> {
    apply_pauli(state, Pauli::X, qubit)
}

/// `cos(θ/2)|0⟩ + sin(θ/2)|1⟩` for `θ ∈ [0, π]`.
pub fn prepare_polarized(theta: f64) -> Result<PureState> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(format!(
            "polar angle {theta} outside [0, π]"
        )));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(PureState {
        n_qubits: 1,
        amps: vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
    })
}

/// Measures `qubit` in `{|0⟩, |1⟩}` and returns the outcome with the
/// renormalized post-measurement state.
pub fn measure_computational<R: Rng + ?Sized>(
    state: &PureState,
    qubit: usize,
    rng: &mut R,
) -> Result<(u8, PureState)> {
    let mask = state.mask(qubit)?;
    let p1 = state.probability_one(qubit)?;
    let total = state.norm_sqr();
    if total <= 0.0 {
        return Err(Error::Internal("measurement of a zero-norm state".into()));
    }
    let outcome = u8::from(rng.gen::<f64>() * total < p1);
    let p_outcome = if outcome == 1 { p1 } else { total - p1 };
    let scale = p_outcome.sqrt();
    let want = if outcome == 1 { mask } else { 0 };
    let collapsed = state.map_amps(|i, a| if i & mask == want { a[i] / scale } else { ZERO });
    Ok((outcome, collapsed))
}

/// The four Bell states, in the order used for probability vectors:
/// ψ⁻, ψ⁺, φ⁺, φ⁻.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩` (home, travel).
    pub fn ket(self) -> [Amplitude; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            BellOutcome::PsiMinus => [ZERO, h, -h, ZERO],
            BellOutcome::PsiPlus => [ZERO, h, h, ZERO],
            BellOutcome::PhiPlus => [h, ZERO, ZERO, h],
            BellOutcome::PhiMinus => [h, ZERO, ZERO, -h],
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellOutcome::PsiMinus => "psi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
        };
        f.write_str(s)
    }
}

/// A two-qubit register: qubit 0 is the home qubit, qubit 1 the travel qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState(PureState);

impl TwoQubitState {
    pub const HOME: usize = 0;
    pub const TRAVEL: usize = 1;

    pub fn new(amps: [Amplitude; 4]) -> Result<Self> {
        PureState::new(2, amps.to_vec()).map(Self)
    }

    pub fn from_pure(state: PureState) -> Result<Self> {
        if state.n_qubits != 2 {
            return Err(Error::invalid("a protocol pair needs exactly two qubits"));
        }
        Ok(Self(state))
    }

    pub fn product(home: &PureState, travel: &PureState) -> Result<Self> {
        if home.n_qubits != 1 || travel.n_qubits != 1 {
            return Err(Error::invalid("product pair needs two single-qubit states"));
        }
        home.tensor(travel).map(Self)
    }

    pub fn as_pure(&self) -> &PureState {
        &self.0
    }

    pub fn into_pure(self) -> PureState {
        self.0
    }

    fn amp(&self, home: usize, travel: usize) -> Amplitude {
        self.0.amps[2 * home + travel]
    }

    /// `2|a₀₀a₁₁ − a₀₁a₁₀|`; zero exactly for product states.
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.amp(0, 0) * self.amp(1, 1) - self.amp(0, 1) * self.amp(1, 0)).norm()
    }

    /// Splits a product state into `(home, travel)` factors, or `None` when
    /// the concurrence exceeds `tolerance`.
    pub fn split_product(&self, tolerance: f64) -> Option<(PureState, PureState)> {
        if self.concurrence() > tolerance {
            return None;
        }
        // pick the home row with the most weight; its travel part is the factor
        let row_weight = |h| self.amp(h, 0).norm_sqr() + self.amp(h, 1).norm_sqr();
        let h = if row_weight(0) >= row_weight(1) { 0 } else { 1 };
        let travel = PureState::normalized(1, vec![self.amp(h, 0), self.amp(h, 1)]).ok()?;
        let home_amps = (0..2)
            .map(|k| {
                travel.amps[0].conj() * self.amp(k, 0) + travel.amps[1].conj() * self.amp(k, 1)
            })
            .collect();
        let home = PureState::normalized(1, home_amps).ok()?;
        Some((home, travel))
    }
}

pub fn bell_state(kind: BellOutcome) -> TwoQubitState {
    TwoQubitState(PureState {
        n_qubits: 2,
        amps: kind.ket().to_vec(),
    })
}

/// Outcome probabilities of a Bell-basis measurement, indexed by
/// [`BellOutcome::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellProbabilities(pub [f64; 4]);

impl BellProbabilities {
    pub fn get(&self, kind: BellOutcome) -> f64 {
        self.0[kind.index()]
    }
}

pub fn bell_probabilities(state: &TwoQubitState) -> BellProbabilities {
    let amps = state.as_pure().amplitudes();
    let mut probs = [0.0; 4];
    for kind in BellOutcome::ALL {
        let overlap: Complex64 = kind.ket().iter().zip(amps).map(|(b, a)| b.conj() * a).sum();
        probs[kind.index()] = overlap.norm_sqr();
    }
    BellProbabilities(probs)
}

pub fn bell_measure<R: Rng + ?Sized>(state: &TwoQubitState, rng: &mut R) -> BellOutcome {
    let probs = bell_probabilities(state);
    let total: f64 = probs.0.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for kind in BellOutcome::ALL {
        let p = probs.get(kind);
        if u < p {
            return kind;
        }
        u -= p;
    }
    // rounding left u at the top edge; return the last outcome with mass
    BellOutcome::ALL
        .into_iter()
        .rev()
        .find(|k| probs.get(*k) > 0.0)
        .unwrap_or(BellOutcome::PhiMinus)
}

/// 2×2 density matrix of a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2(pub [[Amplitude; 2]; 2]);

impl DensityMatrix2 {
    pub fn maximally_mixed() -> Self {
        let h = Complex64::new(0.5, 0.0);
        DensityMatrix2([[h, ZERO], [ZERO, h]])
    }

    pub fn pure(state: &PureState) -> Result<Self> {
        if state.n_qubits != 1 {
            return Err(Error::invalid("single-qubit state expected"));
        }
        let a = &state.amps;
        Ok(DensityMatrix2([
            [a[0] * a[0].conj(), a[0] * a[1].conj()],
            [a[1] * a[0].conj(), a[1] * a[1].conj()],
        ]))
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        (self.0[0][1] - self.0[1][0].conj()).norm() <= tolerance
            && self.0[0][0].im.abs() <= tolerance
            && self.0[1][1].im.abs() <= tolerance
    }

    /// Eigenvalues (ascending) of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1].norm();
        let mean = (a + d) / 2.0;
        let radius = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        [mean - radius, mean + radius]
    }
}

/// Partial trace over the home qubit.
pub fn reduced_density_travel(state: &TwoQubitState) -> DensityMatrix2 {
    let mut rho = [[ZERO; 2]; 2];
    for (t, row) in rho.iter_mut().enumerate() {
        for (u, entry) in row.iter_mut().enumerate() {
            *entry = (0..2)
                .map(|h| state.amp(h, t) * state.amp(h, u).conj())
                .sum();
        }
    }
    DensityMatrix2(rho)
}

/// Pauli channel applied to one qubit per transit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "lowercase")]
pub enum NoiseModel {
    None,
    BitFlip(f64),
    PhaseFlip(f64),
    /// Identity with probability `1 − p`, otherwise X, Y or Z with `p/3` each.
    Depolarizing(f64),
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::BitFlip(p) | NoiseModel::PhaseFlip(p) | NoiseModel::Depolarizing(p) => {
                if (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "noise probability {p} outside [0, 1]"
                    )))
                }
            }
        }
    }

    /// Probabilities of applying I, X, Y, Z.
    pub fn pauli_weights(&self) -> [f64; 4] {
        match *self {
            NoiseModel::None => [1.0, 0.0, 0.0, 0.0],
            NoiseModel::BitFlip(p) => [1.0 - p, p, 0.0, 0.0],
            NoiseModel::PhaseFlip(p) => [1.0 - p, 0.0, 0.0, p],
            NoiseModel::Depolarizing(p) => [1.0 - p, p / 3.0, p / 3.0, p / 3.0],
        }
    }

    pub fn sample_pauli<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        if *self == NoiseModel::None {
            return Pauli::I;
        }
        let weights = self.pauli_weights();
        let mut u = rng.gen::<f64>();
        for (pauli, w) in Pauli::ALL.into_iter().zip(weights) {
            if u < w {
                return pauli;
            }
            u -= w;
        }
        Pauli::I
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::None => f.write_str("none"),
            NoiseModel::BitFlip(p) => write!(f, "bitflip:p={p}"),
            NoiseModel::PhaseFlip(p) => write!(f, "phaseflip:p={p}"),
            NoiseModel::Depolarizing(p) => write!(f, "depolarizing:p={p}"),
        }
    }
}

/// Grammar: `none | bitflip:p=<prob> | phaseflip:p=<prob> | depolarizing:p=<prob>`.
impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(NoiseModel::None);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("bad noise token `{s}`")))?;
        let p = parse_param(rest, "p")?;
        let model = match kind {
            "bitflip" => NoiseModel::BitFlip(p),
            "phaseflip" => NoiseModel::PhaseFlip(p),
            "depolarizing" => NoiseModel::Depolarizing(p),
            other => return Err(Error::parse(format!("unknown noise model `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

/// Parses a single `key=<float>` parameter.
pub(crate) fn parse_param(token: &str, key: &str) -> Result<f64> {
    let (k, v) = token
        .split_once('=')
        .ok_or_else(|| Error::parse(format!("expected `{key}=<value>`, got `{token}`")))?;
    if k.trim() != key {
        return Err(Error::parse(format!("unexpected parameter `{}`", k.trim())));
    }
    let value: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("bad number `{}`", v.trim())))?;
    if !value.is_finite() {
        return Err(Error::parse(format!("non-finite value `{}`", v.trim())));
    }
    Ok(value)
}

pub fn apply_noise<R: Rng + ?Sized>(
    state: &PureState,
    model: NoiseModel,
    qubit: usize,
    rng: &mut R,
) -> Result<PureState> {
    state.mask(qubit)?;
    apply_pauli(state, model.sample_pauli(rng), qubit)
}

/// Positive eigenvector of `|s0⟩⟨s0| − |s1⟩⟨s1|`, or `None` when the two
/// hypotheses coincide up to phase.
fn helstrom_vector(s0: &PureState, s1: &PureState) -> Option<[Complex64; 2]> {
    let g = |r: usize, c: usize| s0.amps[r] * s0.amps[c].conj() - s1.amps[r] * s1.amps[c].conj();
    let a = g(0, 0).re;
    let b = g(0, 1);
    let lambda = (a * a + b.norm_sqr()).sqrt();
    if lambda < 1e-12 {
        return None;
    }
    let v = if a >= 0.0 {
        [Complex64::new(lambda + a, 0.0), b.conj()]
    } else {
        [b, Complex64::new(lambda - a, 0.0)]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    Some([v[0] / norm, v[1] / norm])
}

/// Optimal equal-prior discrimination of `s0` vs `s1` applied to `received`.
/// Returns the decided label and the post-measurement state.
pub fn helstrom_measure<R: Rng + ?Sized>(
    s0: &PureState,
    s1: &PureState,
    received: &PureState,
    rng: &mut R,
) -> Result<(u8, PureState)> {
    if [s0, s1, received].iter().any(|s| s.n_qubits != 1) {
        return Err(Error::invalid(
            "Helstrom decision takes single-qubit states",
        ));
    }
    let Some(e0) = helstrom_vector(s0, s1) else {
        let bit = u8::from(rng.gen::<bool>());
        return Ok((bit, received.clone()));
    };
    let e1 = [-e0[1].conj(), e0[0].conj()];
    let overlap0 = e0[0].conj() * received.amps[0] + e0[1].conj() * received.amps[1];
    let p0 = overlap0.norm_sqr() / received.norm_sqr();
    let bit = u8::from(rng.gen::<f64>() >= p0);
    let post = if bit == 0 { e0 } else { e1 };
    Ok((
        bit,
        PureState {
            n_qubits: 1,
            amps: post.to_vec(),
        },
    ))
}

pub fn helstrom_decide<R: Rng + ?Sized>(
    s0: &PureState,
    s1: &PureState,
    received: &PureState,
    rng: &mut R,
) -> Result<u8> {
    helstrom_measure(s0, s1, received, rng).map(|(bit, _)| bit)
}
