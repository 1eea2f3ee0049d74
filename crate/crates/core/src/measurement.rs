//! Clock-conditioned single-qubit Pauli measurements on composite states.
//!
//! Conventions, fixed here because downstream angle extraction depends on
//! them: X eigenvectors (|0⟩ ± |1⟩)/√2, Y eigenvectors (|0⟩ ± i|1⟩)/√2, and
//! outcome bit 0 always labels the +1 branch. Measured wires appear in
//! ascending order with the first one as the most significant outcome bit.
//!
//! The clock projector is diagonal in the clock basis and every measured
//! operator acts on the work register only, so conditioning on an accept set
//! commutes with measuring the clock first; exact projection and rejection
//! sampling therefore produce the same conditional statistics, and both are
//! implemented.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec;
use crate::state::{domain_wall_step, Basis, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasBasis {
    X,
    Y,
    Z,
}

impl MeasBasis {
    /// Rows of the basis-change matrix: row 0 = ⟨+branch|, row 1 = ⟨−branch|.
    fn rotation(&self) -> [[Complex64; 2]; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            MeasBasis::X => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            MeasBasis::Y => [[c(r, 0.0), c(0.0, -r)], [c(r, 0.0), c(0.0, r)]],
            MeasBasis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        }
    }
}

/// Per-work-qubit bases (None = skip), an accepting set of clock steps, and
/// sampling parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub bases: Vec<Option<MeasBasis>>,
    pub accept: Vec<usize>,
    pub shots: u64,
    pub seed: u64,
}

impl MeasurementPlan {
    pub fn all_z(wires: usize, accept: Vec<usize>) -> Self {
        MeasurementPlan { bases: vec![Some(MeasBasis::Z); wires], accept, shots: 0, seed: 0 }
    }

    pub fn measured_wires(&self) -> Vec<usize> {
        self.bases
            .iter()
            .enumerate()
            .filter_map(|(w, b)| b.map(|_| w))
            .collect()
    }

    fn validate(&self, state: &QuantumState) -> Result<Vec<(usize, MeasBasis)>> {
        if self.bases.len() != state.basis.wires() {
            return Err(Error::Domain(format!(
                "plan covers {} wires, state has {}",
                self.bases.len(),
                state.basis.wires()
            )));
        }
        let measured: Vec<(usize, MeasBasis)> = self
            .bases
            .iter()
            .enumerate()
            .filter_map(|(w, b)| b.map(|basis| (w, basis)))
            .collect();
        if measured.is_empty() {
            return Err(Error::Domain("at least one qubit must be measured".into()));
        }
        if self.accept.is_empty() {
            return Err(Error::Domain("clock accept set must be nonempty".into()));
        }
        let max_step = state.basis.max_step();
        if let Some(&bad) = self.accept.iter().find(|&&t| t > max_step) {
            return Err(Error::StepOutOfRange { t: bad, max: max_step });
        }
        Ok(measured)
    }
}

/// Exact or sampled outcome distribution over the measured qubits,
/// conditioned on an accepting clock outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    pub wires: Vec<usize>,
    pub probs: Vec<f64>,
    pub p_clock: f64,
    pub exact: bool,
}

impl ConditionalDistribution {
    pub fn outcome_count(&self) -> usize {
        self.probs.len()
    }
}

/// Σ_x |p(x) − q(x)| over a shared outcome space.
pub fn l1_distance(p: &ConditionalDistribution, q: &ConditionalDistribution) -> Result<f64> {
    if p.wires != q.wires || p.probs.len() != q.probs.len() {
        return Err(Error::MismatchedOutcomes);
    }
    Ok(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum())
}

/// Trace distance ‖ρ − σ‖₁ between two pure states, via the overlap.
pub fn pure_trace_distance(a: &QuantumState, b: &QuantumState) -> f64 {
    let f = a.fidelity(b).min(1.0);
    2.0 * (1.0 - f * f).max(0.0).sqrt()
}

fn apply_rotation(state: &mut QuantumState, wire: usize, m: [[Complex64; 2]; 2]) {
    let wires = state.basis.wires();
    let clock_dim = state.basis.clock_dim();
    let stride = (1usize << (wires - 1 - wire)) * clock_dim;
    let dim = state.amps.len();
    let mut i = 0;
    while i < dim {
        if (i / stride) % 2 == 0 {
            let a = state.amps[i];
            let b = state.amps[i + stride];
            state.amps[i] = m[0][0] * a + m[0][1] * b;
            state.amps[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        i += 1;
    }
}

fn rotated_state(state: &QuantumState, measured: &[(usize, MeasBasis)]) -> QuantumState {
    let mut rotated = state.clone();
    for &(wire, basis) in measured {
        apply_rotation(&mut rotated, wire, basis.rotation());
    }
    rotated
}

fn outcome_index(basis: &Basis, work_index: usize, measured: &[(usize, MeasBasis)]) -> usize {
    let mut out = 0usize;
    for &(wire, _) in measured {
        out = (out << 1) | basis.work_bit(work_index, wire);
    }
    out
}

/// Exact conditional distribution `p(x) = Σ_{t∈accept} |⟨x,t|W ψ⟩|² / p_clock`.
pub fn exact_distribution(
    state: &QuantumState,
    plan: &MeasurementPlan,
) -> Result<ConditionalDistribution> {
    let measured = plan.validate(state)?;
    let rotated = rotated_state(state, &measured);
    let basis = state.basis;
    let clock_dim = basis.clock_dim();
    let accept: Vec<usize> = plan.accept.iter().map(|&t| basis.clock_index(t)).collect();
    let mut probs = vec![0.0; 1usize << measured.len()];
    let mut p_clock = 0.0;
    for w in 0..basis.work_dim() {
        let out = outcome_index(&basis, w, &measured);
        for &c in &accept {
            let p = rotated.amps[w * clock_dim + c].norm_sqr();
            probs[out] += p;
            p_clock += p;
        }
    }
    if p_clock <= 0.0 {
        return Err(Error::ZeroClockSupport);
    }
    for p in &mut probs {
        *p /= p_clock;
    }
    Ok(ConditionalDistribution { wires: measured.iter().map(|&(w, _)| w).collect(), probs, p_clock, exact: true })
}

/// Joint distribution over (outcome, clock-accept flag); index layout
/// `outcome * 2 + flag` with flag 1 = accepted. This realizes the full
/// measurement as a single POVM for data-processing checks.
pub fn accept_flagged_distribution(
    state: &QuantumState,
    plan: &MeasurementPlan,
) -> Result<Vec<f64>> {
    let measured = plan.validate(state)?;
    let rotated = rotated_state(state, &measured);
    let basis = state.basis;
    let clock_dim = basis.clock_dim();
    let accept: Vec<usize> = plan.accept.iter().map(|&t| basis.clock_index(t)).collect();
    let mut joint = vec![0.0; (1usize << measured.len()) * 2];
    for w in 0..basis.work_dim() {
        let out = outcome_index(&basis, w, &measured);
        for c in 0..clock_dim {
            let flag = usize::from(accept.contains(&c));
            joint[out * 2 + flag] += rotated.amps[w * clock_dim + c].norm_sqr();
        }
    }
    Ok(joint)
}

/// One sampled shot. The clock register is always read out; `clock_step` is
/// None when a domain-wall string outside the legal set was drawn.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub shot: u64,
    pub clock_accept: bool,
    pub clock_step: Option<usize>,
    pub outcome: Vec<u8>,
}

pub fn records_to_csv(records: &[MeasurementRecord]) -> String {
    let mut out = String::from("shot,clock_accept,outcome_bits\n");
    for r in records {
        let bits: String = r.outcome.iter().map(|b| char::from(b'0' + b)).collect();
        out.push_str(&format!("{},{},{}\n", r.shot, u8::from(r.clock_accept), bits));
    }
    out
}

/// I.i.d. samples from the joint (clock, outcome) distribution, one
/// counter-based RNG stream per shot so shot-level parallelism is
/// deterministic. Rejected shots are recorded, giving the empirical clock
/// acceptance fraction.
pub fn sample(state: &QuantumState, plan: &MeasurementPlan) -> Result<Vec<MeasurementRecord>> {
    let measured = plan.validate(state)?;
    let rotated = rotated_state(state, &measured);
    let basis = state.basis;
    let clock_dim = basis.clock_dim();
    let steps = basis.max_step();
    let accept: Vec<usize> = plan.accept.iter().map(|&t| basis.clock_index(t)).collect();

    // joint table over (clock index, outcome)
    let n_out = 1usize << measured.len();
    let mut joint = vec![0.0f64; clock_dim * n_out];
    for w in 0..basis.work_dim() {
        let out = outcome_index(&basis, w, &measured);
        for c in 0..clock_dim {
            joint[c * n_out + out] += rotated.amps[w * clock_dim + c].norm_sqr();
        }
    }
    let mut cdf = joint;
    let mut acc = 0.0;
    for v in cdf.iter_mut() {
        acc += *v;
        *v = acc;
    }
    let total = acc;

    let records = exec::map_indexed(plan.shots as usize, |shot| {
        let mut rng = shot_rng(plan.seed, shot as u64);
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
        let clock_index = idx / n_out;
        let out = idx % n_out;
        let clock_step = match basis {
            Basis::DomainWallClock { steps: t, .. } => domain_wall_step(clock_index, t),
            _ => (clock_index <= steps).then_some(clock_index),
        };
        let outcome = (0..measured.len())
            .map(|i| ((out >> (measured.len() - 1 - i)) & 1) as u8)
            .collect();
        MeasurementRecord {
            shot: shot as u64,
            clock_accept: accept.contains(&clock_index),
            clock_step,
            outcome,
        }
    });
    Ok(records)
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

// --- adaptive measurements -------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptiveStep {
    pub wire: usize,
    pub basis: MeasBasis,
    pub outcome: u8,
}

/// Drives a sequence of single-qubit measurements; the engine enforces that
/// no wire is measured twice and that the policy halts within the wire count.
pub trait AdaptivePolicy {
    fn next(&mut self, history: &[AdaptiveStep]) -> Option<(usize, MeasBasis)>;
    /// Called before each shot.
    fn reset(&mut self) {}
    fn deterministic(&self) -> bool {
        true
    }
}

/// Ignores history and replays a fixed plan; an adaptive run with this policy
/// must reproduce the non-adaptive statistics.
pub struct PlanPolicy {
    order: Vec<(usize, MeasBasis)>,
    cursor: usize,
}

impl PlanPolicy {
    pub fn new(plan: &MeasurementPlan) -> Self {
        let order = plan
            .bases
            .iter()
            .enumerate()
            .filter_map(|(w, b)| b.map(|basis| (w, basis)))
            .collect();
        PlanPolicy { order, cursor: 0 }
    }
}

impl AdaptivePolicy for PlanPolicy {
    fn next(&mut self, _history: &[AdaptiveStep]) -> Option<(usize, MeasBasis)> {
        let item = self.order.get(self.cursor).copied();
        self.cursor += 1;
        item
    }

    fn reset(&mut self) {
        self.cursor = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockHandling {
    /// Restrict the clock marginal to the accept set before sampling
    /// (post-selected analysis mode).
    Project,
    /// Sample the physical clock marginal; shots outside the accept set are
    /// recorded as rejected with no work outcomes.
    Reject,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptiveRecord {
    pub shot: u64,
    pub clock_accept: bool,
    pub clock_step: Option<usize>,
    pub steps: Vec<AdaptiveStep>,
}

/// Sequential single-qubit measurements with state collapse between steps.
/// The clock is measured first and handled per `mode`.
pub fn sample_adaptive(
    state: &QuantumState,
    policy: &mut dyn AdaptivePolicy,
    accept: &[usize],
    shots: u64,
    seed: u64,
    mode: ClockHandling,
) -> Result<Vec<AdaptiveRecord>> {
    if accept.is_empty() {
        return Err(Error::Domain("clock accept set must be nonempty".into()));
    }
    let basis = state.basis;
    let max_step = basis.max_step();
    if let Some(&bad) = accept.iter().find(|&&t| t > max_step) {
        return Err(Error::StepOutOfRange { t: bad, max: max_step });
    }
    let clock_dim = basis.clock_dim();
    let accept_idx: Vec<usize> = accept.iter().map(|&t| basis.clock_index(t)).collect();

    // clock marginal
    let mut clock_probs = vec![0.0f64; clock_dim];
    for w in 0..basis.work_dim() {
        for c in 0..clock_dim {
            clock_probs[c] += state.amps[w * clock_dim + c].norm_sqr();
        }
    }
    if let ClockHandling::Project = mode {
        let kept: f64 = accept_idx.iter().map(|&c| clock_probs[c]).sum();
        if kept <= 0.0 {
            return Err(Error::ZeroClockSupport);
        }
        for (c, p) in clock_probs.iter_mut().enumerate() {
            *p = if accept_idx.contains(&c) { *p / kept } else { 0.0 };
        }
    }
    let mut clock_cdf = clock_probs.clone();
    let mut acc = 0.0;
    for v in clock_cdf.iter_mut() {
        acc += *v;
        *v = acc;
    }

    let wires = basis.wires();
    let mut records = Vec::with_capacity(shots as usize);
    for shot in 0..shots {
        let mut rng = shot_rng(seed, shot);
        let u: f64 = rng.gen::<f64>() * acc;
        let clock_index = clock_cdf.partition_point(|&c| c < u).min(clock_dim - 1);
        let clock_accept = accept_idx.contains(&clock_index);
        let clock_step = match basis {
            Basis::DomainWallClock { steps: t, .. } => domain_wall_step(clock_index, t),
            _ => Some(clock_index),
        };
        if !clock_accept {
            records.push(AdaptiveRecord { shot, clock_accept, clock_step, steps: vec![] });
            continue;
        }
        // collapse to the drawn clock slice (work-only state)
        let mut work: Vec<Complex64> =
            (0..basis.work_dim()).map(|w| state.amps[w * clock_dim + clock_index]).collect();
        let norm = work.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut work {
            *a /= norm;
        }

        policy.reset();
        let mut history: Vec<AdaptiveStep> = Vec::new();
        let mut measured_wires = Vec::new();
        while let Some((wire, meas_basis)) = policy.next(&history) {
            if history.len() >= wires {
                return Err(Error::PolicyViolation(format!(
                    "policy did not halt within {wires} measurements"
                )));
            }
            if wire >= wires {
                return Err(Error::PolicyViolation(format!("wire {wire} out of range")));
            }
            if measured_wires.contains(&wire) {
                return Err(Error::PolicyViolation(format!("wire {wire} measured twice")));
            }
            measured_wires.push(wire);
            let outcome = collapse_single(&mut work, wires, wire, meas_basis, &mut rng);
            history.push(AdaptiveStep { wire, basis: meas_basis, outcome });
        }
        records.push(AdaptiveRecord { shot, clock_accept, clock_step, steps: history });
    }
    Ok(records)
}

/// Measure one qubit of a work-only vector, collapse in place, return the
/// outcome bit (0 = +1 branch).
fn collapse_single(
    work: &mut [Complex64],
    wires: usize,
    wire: usize,
    basis: MeasBasis,
    rng: &mut ChaCha8Rng,
) -> u8 {
    let m = basis.rotation();
    let stride = 1usize << (wires - 1 - wire);
    // rotate
    for i in 0..work.len() {
        if (i / stride) % 2 == 0 {
            let a = work[i];
            let b = work[i + stride];
            work[i] = m[0][0] * a + m[0][1] * b;
            work[i + stride] = m[1][0] * a + m[1][1] * b;
        }
    }
    let p_plus: f64 = work
        .iter()
        .enumerate()
        .filter(|(i, _)| (i / stride) % 2 == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let outcome = u8::from(rng.gen::<f64>() >= p_plus);
    let keep_parity = outcome as usize;
    let p_kept = if outcome == 0 { p_plus } else { 1.0 - p_plus };
    let scale = 1.0 / p_kept.sqrt();
    for i in 0..work.len() {
        if (i / stride) % 2 == keep_parity {
            work[i] *= scale;
        } else {
            work[i] = Complex64::new(0.0, 0.0);
        }
    }
    // rotate back so later measurements see the computational frame
    let minv = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
    for i in 0..work.len() {
        if (i / stride) % 2 == 0 {
            let a = work[i];
            let b = work[i + stride];
            work[i] = minv[0][0] * a + minv[0][1] * b;
            work[i + stride] = minv[1][0] * a + minv[1][1] * b;
        }
    }
    outcome
}

// --- accuracy budget --------------------------------------------------------

/// Forward error chain from a terminal-state accuracy ε: fidelity floor
/// f = 1 − ε/2, half trace distance δ' = √(1−f²), and the conditional l1
/// bound δ'' = 4δ'/p_clock.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub fidelity_floor: f64,
    pub trace_radius: f64,
    pub conditional_l1: f64,
}

pub fn error_budget(eps: f64, p_clock: f64) -> Result<ErrorBudget> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Domain(format!("eps {eps} outside (0, 2)")));
    }
    if !(0.0 < p_clock && p_clock <= 1.0) {
        return Err(Error::Domain(format!("p_clock {p_clock} outside (0, 1]")));
    }
    let f = 1.0 - eps / 2.0;
    let dp = (1.0 - f * f).max(0.0).sqrt();
    Ok(ErrorBudget { fidelity_floor: f, trace_radius: dp, conditional_l1: 4.0 * dp / p_clock })
}

/// Inverse map: the terminal-state accuracy ε sufficient for a target
/// conditional l1 error, ε = 2(1 − √(1 − (δ''·p_clock/4)²)).
pub fn required_accuracy(conditional_l1: f64, p_clock: f64) -> Result<f64> {
    if !(0.0 < p_clock && p_clock <= 1.0) {
        return Err(Error::Domain(format!("p_clock {p_clock} outside (0, 1]")));
    }
    let arg = conditional_l1 * p_clock / 4.0;
    if !(0.0..=1.0).contains(&arg) {
        return Err(Error::Domain(format!("target l1 {conditional_l1} out of range")));
    }
    Ok(2.0 * (1.0 - (1.0 - arg * arg).sqrt()))
}

/// Exact standard-basis statistics of a permutation circuit by a classical
/// pass: propagate every plus-wire assignment through the gate list. This is
/// the classical-simulability sanity oracle for Z-only sampling.
pub fn classical_z_distribution(c: &Circuit, measured: &[usize]) -> Vec<f64> {
    let wires = c.num_wires();
    let mut probs = vec![0.0f64; 1usize << measured.len()];
    let assignments = 1usize << c.plus_inputs;
    let weight = 1.0 / assignments as f64;
    for assign in 0..assignments {
        // plus wires occupy the low bits of the work index
        let mut index = assign;
        for gate in &c.gates {
            index = apply_gate_to_index(index, wires, gate);
        }
        let mut out = 0usize;
        for &w in measured {
            out = (out << 1) | ((index >> (wires - 1 - w)) & 1);
        }
        probs[out] += weight;
    }
    probs
}

fn apply_gate_to_index(index: usize, wires: usize, gate: &Gate) -> usize {
    let gws = gate.wires();
    if gws.is_empty() {
        return index;
    }
    let mut local = 0usize;
    for &q in &gws {
        local = (local << 1) | ((index >> (wires - 1 - q)) & 1);
    }
    let image = gate.map_local(local);
    let mut out = index;
    for (i, &q) in gws.iter().enumerate() {
        let bit = (image >> (gws.len() - 1 - i)) & 1;
        let pos = wires - 1 - q;
        out = (out & !(1usize << pos)) | (bit << pos);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::spectral::history_state;

    fn bell_history() -> QuantumState {
        let c = parse_circuit("work 1 1\nCNOT 1 0\n").unwrap();
        history_state(&c, false).unwrap()
    }

    #[test]
    fn z_measurement_of_flip_history() {
        let c = parse_circuit("work 1 0\nX 0\n").unwrap();
        let psi = history_state(&c, false).unwrap();
        let plan = MeasurementPlan::all_z(1, vec![1]);
        let dist = exact_distribution(&psi, &plan).unwrap();
        assert!((dist.p_clock - 0.5).abs() < 1e-12);
        assert!((dist.probs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_measurement_of_plus_wire() {
        let c = parse_circuit("work 0 1\nID\n").unwrap();
        let psi = history_state(&c, false).unwrap();
        let plan = MeasurementPlan {
            bases: vec![Some(MeasBasis::X)],
            accept: vec![1],
            shots: 0,
            seed: 0,
        };
        let dist = exact_distribution(&psi, &plan).unwrap();
        assert!((dist.probs[0] - 1.0).abs() < 1e-12, "got {:?}", dist.probs);
    }

    #[test]
    fn y_basis_convention_plus_i_gives_plus_branch() {
        let basis = Basis::Work { wires: 1 };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = QuantumState::new(
            basis,
            vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        )
        .unwrap();
        let plan = MeasurementPlan {
            bases: vec![Some(MeasBasis::Y)],
            accept: vec![0],
            shots: 0,
            seed: 0,
        };
        let dist = exact_distribution(&psi, &plan).unwrap();
        assert!((dist.probs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_statistics_are_correlated() {
        // Oracle: statevector of CNOT from a plus wire.
        let psi = bell_history();
        let plan = MeasurementPlan::all_z(2, vec![1]);
        let dist = exact_distribution(&psi, &plan).unwrap();
        assert!((dist.probs[0b00] - 0.5).abs() < 1e-12);
        assert!((dist.probs[0b11] - 0.5).abs() < 1e-12);
        assert!(dist.probs[0b01].abs() < 1e-12);
        assert!(dist.probs[0b10].abs() < 1e-12);
    }

    #[test]
    fn zero_shots_give_no_records() {
        let psi = bell_history();
        let plan = MeasurementPlan { shots: 0, ..MeasurementPlan::all_z(2, vec![1]) };
        assert!(sample(&psi, &plan).unwrap().is_empty());
    }

    #[test]
    fn sampled_bell_frequency_concentrates() {
        let psi = bell_history();
        let plan = MeasurementPlan { shots: 100_000, seed: 11, ..MeasurementPlan::all_z(2, vec![1]) };
        let records = sample(&psi, &plan).unwrap();
        let accepted: Vec<_> = records.iter().filter(|r| r.clock_accept).collect();
        let p00 = accepted.iter().filter(|r| r.outcome == vec![0, 0]).count() as f64
            / accepted.len() as f64;
        assert!((p00 - 0.5).abs() < 0.01, "p00 = {p00}");
    }

    #[test]
    fn padded_accept_fraction_is_half() {
        let c = parse_circuit("work 1 0\nX 0\nX 0\n").unwrap();
        let psi = history_state(&c, true).unwrap();
        let accept = Circuit::accept_window(c.len(), true);
        let plan = MeasurementPlan { shots: 100_000, seed: 3, ..MeasurementPlan::all_z(1, accept) };
        let records = sample(&psi, &plan).unwrap();
        let frac =
            records.iter().filter(|r| r.clock_accept).count() as f64 / records.len() as f64;
        assert!((frac - 0.5).abs() < 0.01, "accept fraction {frac}");
    }

    #[test]
    fn adaptive_plan_policy_matches_exact() {
        let psi = bell_history();
        let plan = MeasurementPlan { shots: 40_000, seed: 5, ..MeasurementPlan::all_z(2, vec![1]) };
        let exact = exact_distribution(&psi, &plan).unwrap();
        let mut policy = PlanPolicy::new(&plan);
        let records =
            sample_adaptive(&psi, &mut policy, &plan.accept, plan.shots, plan.seed, ClockHandling::Project)
                .unwrap();
        let mut counts = vec![0usize; 4];
        for r in &records {
            let idx = r.steps.iter().fold(0usize, |acc, s| (acc << 1) | s.outcome as usize);
            counts[idx] += 1;
        }
        for (i, &count) in counts.iter().enumerate() {
            let freq = count as f64 / records.len() as f64;
            assert!((freq - exact.probs[i]).abs() < 0.01, "outcome {i}: {freq} vs {}", exact.probs[i]);
        }
    }

    #[test]
    fn project_and_reject_agree_conditionally() {
        let c = parse_circuit("work 1 0\nX 0\nX 0\n").unwrap();
        let psi = history_state(&c, true).unwrap();
        let accept = Circuit::accept_window(c.len(), true);
        let plan = MeasurementPlan { shots: 60_000, seed: 9, ..MeasurementPlan::all_z(1, accept.clone()) };
        let freq = |mode: ClockHandling| {
            let mut policy = PlanPolicy::new(&plan);
            let records =
                sample_adaptive(&psi, &mut policy, &accept, plan.shots, plan.seed, mode).unwrap();
            let accepted: Vec<_> = records.iter().filter(|r| r.clock_accept).collect();
            let ones = accepted
                .iter()
                .filter(|r| r.steps.first().map(|s| s.outcome) == Some(1))
                .count() as f64;
            ones / accepted.len() as f64
        };
        let a = freq(ClockHandling::Project);
        let b = freq(ClockHandling::Reject);
        assert!((a - b).abs() < 0.015, "project {a} vs reject {b}");
    }

    #[test]
    fn teleport_identity_statistics() {
        // |ψ⟩|0⟩ under CNOT, X measurement on the carrier: the partner's Z
        // statistics reproduce the input regardless of the X outcome.
        let c = parse_circuit("work 1 1\nCNOT 1 0\n").unwrap();
        let psi = history_state(&c, false).unwrap();
        struct Teleport;
        impl AdaptivePolicy for Teleport {
            fn next(&mut self, history: &[AdaptiveStep]) -> Option<(usize, MeasBasis)> {
                match history.len() {
                    0 => Some((1, MeasBasis::X)),
                    1 => Some((0, MeasBasis::Z)),
                    _ => None,
                }
            }
        }
        let mut policy = Teleport;
        let records =
            sample_adaptive(&psi, &mut policy, &[1], 40_000, 17, ClockHandling::Project).unwrap();
        // conditioned on either X outcome, Z statistics of wire 0 stay 50/50
        for x_out in [0u8, 1u8] {
            let matching: Vec<_> =
                records.iter().filter(|r| r.steps[0].outcome == x_out).collect();
            let ones = matching.iter().filter(|r| r.steps[1].outcome == 1).count() as f64;
            let frac = ones / matching.len() as f64;
            assert!((frac - 0.5).abs() < 0.02, "x={x_out}: frac {frac}");
        }
    }

    #[test]
    fn policy_violations_are_reported() {
        let psi = bell_history();
        struct Stubborn;
        impl AdaptivePolicy for Stubborn {
            fn next(&mut self, _h: &[AdaptiveStep]) -> Option<(usize, MeasBasis)> {
                Some((0, MeasBasis::Z))
            }
        }
        let mut policy = Stubborn;
        let err = sample_adaptive(&psi, &mut policy, &[1], 1, 0, ClockHandling::Project);
        assert!(matches!(err, Err(Error::PolicyViolation(_))));
    }

    #[test]
    fn l1_distance_basics() {
        let d = |probs: Vec<f64>| ConditionalDistribution {
            wires: vec![0],
            probs,
            p_clock: 1.0,
            exact: true,
        };
        let p = d(vec![0.6, 0.4]);
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        let q = d(vec![0.5, 0.5]);
        assert!((l1_distance(&p, &q).unwrap() - 0.2).abs() < 1e-15);
        let point_a = d(vec![1.0, 0.0]);
        let point_b = d(vec![0.0, 1.0]);
        assert_eq!(l1_distance(&point_a, &point_b).unwrap(), 2.0);
        let bigger = ConditionalDistribution { wires: vec![0, 1], probs: vec![0.25; 4], p_clock: 1.0, exact: true };
        assert!(matches!(l1_distance(&p, &bigger), Err(Error::MismatchedOutcomes)));
    }

    #[test]
    fn error_budget_example_values() {
        let budget = error_budget(0.02, 0.5).unwrap();
        assert!((budget.fidelity_floor - 0.99).abs() < 1e-15);
        assert!((budget.trace_radius - 0.0199f64.sqrt()).abs() < 1e-12);
        assert!((budget.conditional_l1 - 8.0 * 0.0199f64.sqrt()).abs() < 1e-12);
        assert!((budget.trace_radius - 0.141067).abs() < 1e-6);
        assert!((budget.conditional_l1 - 1.128537).abs() < 1e-5);
    }

    #[test]
    fn error_budget_round_trips() {
        for eps in [1e-6, 1e-3, 0.02, 0.3, 1.5] {
            let budget = error_budget(eps, 0.5).unwrap();
            let back = required_accuracy(budget.conditional_l1, 0.5).unwrap();
            assert!((back - eps).abs() < 1e-12, "eps {eps} -> {back}");
        }
        // continuity at zero
        let tiny = error_budget(1e-12, 0.5).unwrap();
        assert!(tiny.conditional_l1 < 1e-5);
    }

    #[test]
    fn classical_pass_matches_quantum_z_statistics() {
        let c = parse_circuit("work 2 2\nCCX 2 3 0\nCNOT 3 1\nX 2\n").unwrap();
        let psi = history_state(&c, false).unwrap();
        let plan = MeasurementPlan::all_z(4, vec![c.len()]);
        let quantum = exact_distribution(&psi, &plan).unwrap();
        let classical = classical_z_distribution(&c, &[0, 1, 2, 3]);
        for (q, cl) in quantum.probs.iter().zip(&classical) {
            assert!((q - cl).abs() < 1e-12);
        }
    }
}
