//! Single-qubit states, the three authoring gates, Bloch-sphere conversion and
//! seeded Born-rule sampling.
//!
//! Every super object in a scene is driven by one [`QubitState`]. Only the
//! computational-basis probabilities are observable by the collapse engine;
//! relative phase (e.g. from [`Gate::PhaseT`]) is carried faithfully but has
//! no visible effect on measurements.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::QuantumError;

/// Norm deviation accepted without touching the amplitudes.
pub const NORM_EXACT_TOLERANCE: f64 = 1e-9;
/// Norm deviation that is silently renormalized; anything larger is rejected.
pub const NORM_REPAIR_TOLERANCE: f64 = 1e-6;

/// Measurement result in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub fn index(self) -> usize {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Zero => Outcome::One,
            Outcome::One => Outcome::Zero,
        }
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        o.index() as u8
    }
}

impl TryFrom<u8> for Outcome {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(Outcome::Zero),
            1 => Ok(Outcome::One),
            other => Err(format!("outcome must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A normalized pair of amplitudes over `|0⟩` and `|1⟩`.
///
/// Constructors validate normalization and canonicalize the global phase so
/// that `a0` is real and non-negative. Gate application returns the raw
/// matrix product; call [`QubitState::canonical`] before comparing states
/// that went through gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct QubitState {
    a0: Complex64,
    a1: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    a0: Complex64,
    a1: Complex64,
}

impl TryFrom<RawState> for QubitState {
    type Error = QuantumError;

    fn try_from(raw: RawState) -> Result<Self, Self::Error> {
        QubitState::new(raw.a0, raw.a1)
    }
}

impl From<QubitState> for RawState {
    fn from(s: QubitState) -> Self {
        RawState { a0: s.a0, a1: s.a1 }
    }
}

impl QubitState {
    pub const ZERO: QubitState = QubitState {
        a0: Complex64::new(1.0, 0.0),
        a1: Complex64::new(0.0, 0.0),
    };
    pub const ONE: QubitState = QubitState {
        a0: Complex64::new(0.0, 0.0),
        a1: Complex64::new(1.0, 0.0),
    };

    /// Builds a state from explicit amplitudes.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self, QuantumError> {
        if !(a0.re.is_finite() && a0.im.is_finite() && a1.re.is_finite() && a1.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        let norm_sq = a0.norm_sqr() + a1.norm_sqr();
        let drift = (norm_sq - 1.0).abs();
        let state = if drift <= NORM_EXACT_TOLERANCE {
            QubitState { a0, a1 }
        } else if drift <= NORM_REPAIR_TOLERANCE {
            let n = norm_sq.sqrt();
            QubitState { a0: a0 / n, a1: a1 / n }
        } else {
            return Err(QuantumError::NotNormalized { norm_sq });
        };
        Ok(state.canonical())
    }

    /// Real-amplitude state `(√p0, √(1−p0))`.
    pub fn from_p0(p0: f64) -> Result<Self, QuantumError> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(QuantumError::ProbabilityOutOfRange(p0));
        }
        Ok(QubitState {
            a0: Complex64::new(p0.sqrt(), 0.0),
            a1: Complex64::new((1.0 - p0).sqrt(), 0.0),
        })
    }

    pub fn from_bloch(b: BlochCoordinates) -> Self {
        let half = b.theta() / 2.0;
        QubitState {
            a0: Complex64::new(half.cos(), 0.0),
            a1: Complex64::from_polar(half.sin(), b.phi()),
        }
    }

    pub fn to_bloch(&self) -> BlochCoordinates {
        let c = self.canonical();
        let theta = 2.0 * c.a1.norm().atan2(c.a0.norm());
        let phi = if c.a1.norm() == 0.0 || c.a0.norm() == 0.0 {
            0.0
        } else {
            c.a1.arg().rem_euclid(2.0 * PI)
        };
        // rem_euclid can round up to exactly 2π
        let phi = if phi >= 2.0 * PI { 0.0 } else { phi };
        BlochCoordinates {
            theta: theta.clamp(0.0, PI),
            phi,
        }
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    /// Born-rule probabilities `(|a0|², |a1|²)`.
    pub fn probabilities(&self) -> (f64, f64) {
        (self.a0.norm_sqr(), self.a1.norm_sqr())
    }

    pub fn p0(&self) -> f64 {
        self.a0.norm_sqr()
    }

    pub fn apply(&self, gate: Gate) -> QubitState {
        let [[m00, m01], [m10, m11]] = gate.matrix();
        QubitState {
            a0: m00 * self.a0 + m01 * self.a1,
            a1: m10 * self.a0 + m11 * self.a1,
        }
    }

    /// Removes the global phase so that `a0` is real and non-negative.
    pub fn canonical(&self) -> QubitState {
        let r = self.a0.norm();
        if (self.a0.im == 0.0 && self.a0.re >= 0.0) || r == 0.0 {
            if r == 0.0 {
                // a0 vanishes: fix the phase on a1 instead
                let r1 = self.a1.norm();
                if r1 == 0.0 || (self.a1.im == 0.0 && self.a1.re >= 0.0) {
                    return *self;
                }
                return QubitState {
                    a0: Complex64::new(0.0, 0.0),
                    a1: Complex64::new(r1, 0.0),
                };
            }
            return *self;
        }
        let rot = self.a0.conj() / r;
        QubitState {
            a0: Complex64::new(r, 0.0),
            a1: self.a1 * rot,
        }
    }

    /// Maximum component-wise distance between two states.
    pub fn distance(&self, other: &QubitState) -> f64 {
        (self.a0 - other.a0).norm().max((self.a1 - other.a1).norm())
    }
}

/// Applies `gate` to `state`.
pub fn apply_gate(state: QubitState, gate: Gate) -> QubitState {
    state.apply(gate)
}

pub fn probabilities(state: &QubitState) -> (f64, f64) {
    state.probabilities()
}

pub fn state_from_p0(p0: f64) -> Result<QubitState, QuantumError> {
    QubitState::from_p0(p0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Hadamard,
    PauliX,
    PhaseT,
}

impl Gate {
    pub const ALL: [Gate; 3] = [Gate::Hadamard, Gate::PauliX, Gate::PhaseT];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Gate::Hadamard => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::PauliX => [[zero, one], [one, zero]],
            Gate::PhaseT => [[one, zero], [zero, Complex64::from_polar(1.0, FRAC_PI_4)]],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gate::Hadamard => "H",
            Gate::PauliX => "X",
            Gate::PhaseT => "T",
        })
    }
}

/// Polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCoordinates {
    theta: f64,
    phi: f64,
}

impl BlochCoordinates {
    pub fn new(theta: f64, phi: f64) -> Result<Self, QuantumError> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(QuantumError::BlochOutOfRange { theta, phi });
        }
        Ok(BlochCoordinates { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Source of measurement outcomes.
///
/// [`Rng`] samples by the Born rule. The outcome analyzer plugs in a
/// replaying sampler to branch over every draw instead.
pub trait Sampler {
    fn sample(&mut self, state: &QubitState) -> Outcome;
}

/// Seeded ChaCha8 stream that counts its draws.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    draws: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            draws: 0,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform draws taken since seeding.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform sample in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.draws += 1;
        self.inner.random::<f64>()
    }

    /// Derives an independent child stream; consumes one draw.
    pub fn split(&mut self) -> Rng {
        self.draws += 1;
        Rng::new(self.inner.next_u64())
    }
}

impl PartialEq for Rng {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed && self.draws == other.draws
    }
}

impl Sampler for Rng {
    fn sample(&mut self, state: &QubitState) -> Outcome {
        sample_measurement(state, self)
    }
}

/// Draws one Born-rule outcome, advancing `rng` by exactly one draw.
pub fn sample_measurement(state: &QubitState, rng: &mut Rng) -> Outcome {
    if rng.next_unit() < state.p0() {
        Outcome::Zero
    } else {
        Outcome::One
    }
}
