//! Statevectors over a work register with an optional clock register.
//!
//! Index conventions, fixed across the crate:
//! - work wire 0 is the most significant bit of the work index;
//! - a composite index is `work_index * clock_dim + clock_index`;
//! - the unary clock stores step `t` directly as the clock index;
//! - the domain-wall clock encodes step `t` as the qubit string `1^t 0^(T-t)`
//!   with clock qubit 1 as the most significant bit, so
//!   `index(t) = (2^t - 1) << (T - t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;

/// Which Hilbert space a statevector or Hamiltonian lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Basis {
    /// Work qubits only.
    Work { wires: usize },
    /// Work qubits tensor a `(steps + 1)`-level clock.
    UnaryClock { wires: usize, steps: usize },
    /// Work qubits tensor `steps` clock qubits in the domain-wall encoding.
    DomainWallClock { wires: usize, steps: usize },
}

impl Basis {
    pub fn wires(&self) -> usize {
        match *self {
            Basis::Work { wires }
            | Basis::UnaryClock { wires, .. }
            | Basis::DomainWallClock { wires, .. } => wires,
        }
    }

    pub fn steps(&self) -> Option<usize> {
        match *self {
            Basis::Work { .. } => None,
            Basis::UnaryClock { steps, .. } | Basis::DomainWallClock { steps, .. } => Some(steps),
        }
    }

    pub fn work_dim(&self) -> usize {
        1usize << self.wires()
    }

    pub fn clock_dim(&self) -> usize {
        match *self {
            Basis::Work { .. } => 1,
            Basis::UnaryClock { steps, .. } => steps + 1,
            Basis::DomainWallClock { steps, .. } => 1usize << steps,
        }
    }

    pub fn dimension(&self) -> usize {
        self.work_dim() * self.clock_dim()
    }

    /// Clock index representing step `t`.
    pub fn clock_index(&self, t: usize) -> usize {
        match *self {
            Basis::Work { .. } => 0,
            Basis::UnaryClock { .. } => t,
            Basis::DomainWallClock { steps, .. } => domain_wall_index(t, steps),
        }
    }

    /// Number of representable steps (clock values `0..=steps`).
    pub fn max_step(&self) -> usize {
        self.steps().unwrap_or(0)
    }

    /// Bit of `wire` inside a work index (wire 0 = most significant).
    pub fn work_bit(&self, work_index: usize, wire: usize) -> usize {
        (work_index >> (self.wires() - 1 - wire)) & 1
    }
}

/// Domain-wall clock string for step `t` out of `steps`: `1^t 0^(steps-t)`,
/// first clock qubit most significant.
pub fn domain_wall_index(t: usize, steps: usize) -> usize {
    assert!(t <= steps);
    if t == 0 {
        0
    } else {
        ((1usize << t) - 1) << (steps - t)
    }
}

/// Inverse of [`domain_wall_index`]: `Some(t)` iff the string is `1^t 0^(steps-t)`.
pub fn domain_wall_step(index: usize, steps: usize) -> Option<usize> {
    for t in 0..=steps {
        if domain_wall_index(t, steps) == index {
            return Some(t);
        }
    }
    None
}

/// Dense complex statevector over a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub basis: Basis,
    pub amps: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(basis: Basis, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dimension() {
            return Err(Error::Domain(format!(
                "amplitude vector has length {}, basis dimension is {}",
                amps.len(),
                basis.dimension()
            )));
        }
        let state = QuantumState { basis, amps };
        let n = state.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state norm {n} deviates from 1")));
        }
        Ok(state)
    }

    /// Basis state |index⟩.
    pub fn basis_state(basis: Basis, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        amps[index] = Complex64::new(1.0, 0.0);
        QuantumState { basis, amps }
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|.
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        self.inner(other).norm()
    }

    /// min over global phase of ‖self − e^{iφ} other‖₂. Computed from the
    /// explicit difference vector at the optimal phase; the closed form
    /// √(2 − 2|⟨self|other⟩|) cancels catastrophically near zero.
    pub fn l2_distance_phase_aligned(&self, other: &QuantumState) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Probability of finding the clock at step `t`.
    pub fn clock_probability(&self, t: usize) -> f64 {
        let clock_dim = self.basis.clock_dim();
        let c = self.basis.clock_index(t);
        let work_dim = self.basis.work_dim();
        (0..work_dim)
            .map(|w| self.amps[w * clock_dim + c].norm_sqr())
            .sum()
    }

    /// Work-register state conditioned on the clock being at step `t`,
    /// together with the probability of that condition.
    pub fn clock_slice(&self, t: usize) -> Result<(QuantumState, f64)> {
        let p = self.clock_probability(t);
        if p <= 0.0 {
            return Err(Error::ZeroClockSupport);
        }
        let clock_dim = self.basis.clock_dim();
        let c = self.basis.clock_index(t);
        let work_dim = self.basis.work_dim();
        let scale = 1.0 / p.sqrt();
        let amps = (0..work_dim)
            .map(|w| self.amps[w * clock_dim + c] * scale)
            .collect();
        Ok((
            QuantumState {
                basis: Basis::Work { wires: self.basis.wires() },
                amps,
            },
            p,
        ))
    }

    /// Embed a unary-clock state into the domain-wall space (legal strings only).
    pub fn embed_domain_wall(&self) -> Result<QuantumState> {
        let (wires, steps) = match self.basis {
            Basis::UnaryClock { wires, steps } => (wires, steps),
            _ => return Err(Error::Domain("embed_domain_wall needs a unary-clock state".into())),
        };
        let target = Basis::DomainWallClock { wires, steps };
        let mut amps = vec![Complex64::new(0.0, 0.0); target.dimension()];
        let src_clock = steps + 1;
        let dst_clock = target.clock_dim();
        for w in 0..self.basis.work_dim() {
            for t in 0..=steps {
                amps[w * dst_clock + domain_wall_index(t, steps)] = self.amps[w * src_clock + t];
            }
        }
        Ok(QuantumState { basis: target, amps })
    }

    /// Project a domain-wall state onto the legal clock strings and map to the
    /// unary basis. Returns the state and the weight it had on legal strings.
    pub fn project_to_unary(&self) -> Result<(QuantumState, f64)> {
        let (wires, steps) = match self.basis {
            Basis::DomainWallClock { wires, steps } => (wires, steps),
            _ => return Err(Error::Domain("project_to_unary needs a domain-wall state".into())),
        };
        let target = Basis::UnaryClock { wires, steps };
        let mut amps = vec![Complex64::new(0.0, 0.0); target.dimension()];
        let src_clock = self.basis.clock_dim();
        for w in 0..self.basis.work_dim() {
            for t in 0..=steps {
                amps[w * (steps + 1) + t] = self.amps[w * src_clock + domain_wall_index(t, steps)];
            }
        }
        let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if weight <= 0.0 {
            return Err(Error::ZeroClockSupport);
        }
        let scale = 1.0 / weight.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok((QuantumState { basis: target, amps }, weight))
    }
}

/// Serialization image of a [`QuantumState`]: amplitudes as `[re, im]` pairs.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub schema_version: u32,
    pub basis: Basis,
    pub dimension: usize,
    pub amps: Vec<[f64; 2]>,
}

impl From<&QuantumState> for StateJson {
    fn from(s: &QuantumState) -> Self {
        StateJson {
            schema_version: 1,
            basis: s.basis,
            dimension: s.dimension(),
            amps: s.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<StateJson> for QuantumState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        QuantumState::new(
            j.basis,
            j.amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        )
    }
}
