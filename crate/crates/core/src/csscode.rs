//! Measurement-error protection with a self-dual CSS code.
//!
//! The seven-qubit code is pinned in a fixture file (parity checks, logical
//! representatives, and the exact encoder gate list) so the codeword tests
//! are bit-exact. Encoders are CNOT-only and act on |0⟩/|+⟩ ancillas, which
//! keeps encoded circuits inside the permutation gate set; transversal
//! single-qubit readout in any Pauli basis decodes through the shared
//! Hamming-type syndrome.
//!
//! Sign convention: logical Y = i·(logical X)·(logical Z), which makes the
//! physical product Y^⊗7 equal to minus the logical Y; the Y decoder flips
//! the outcome parity accordingly and the fixture test checks it against an
//! exact statevector.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::circuit::{apply_gate, Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec;
use crate::measurement::MeasBasis;
use crate::state::{Basis, QuantumState};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub input_position: usize,
    pub plus_positions: [usize; 3],
    pub zero_positions: [usize; 3],
    pub cnots: Vec<(usize, usize)>,
}

/// Code data as stored in the fixture (checks as 0/1 rows over positions).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CodeFixture {
    schema_version: u32,
    name: String,
    length: usize,
    x_checks: Vec<Vec<u8>>,
    z_checks: Vec<Vec<u8>>,
    logical_x: Vec<u8>,
    logical_z: Vec<u8>,
    encoder: EncoderSpec,
}

/// Self-dual CSS code with checks stored as position bitmasks
/// (bit k = block position k).
#[derive(Debug, Clone)]
pub struct CssCode {
    pub name: String,
    pub length: usize,
    pub x_checks: Vec<u32>,
    pub z_checks: Vec<u32>,
    pub logical_x: u32,
    pub logical_z: u32,
    pub self_dual: bool,
    pub distance: usize,
    pub encoder: EncoderSpec,
}

fn row_to_mask(row: &[u8]) -> u32 {
    row.iter().enumerate().fold(0u32, |m, (i, &b)| m | ((b as u32) << i))
}

impl CssCode {
    fn from_fixture(f: CodeFixture) -> Result<Self> {
        let x_checks: Vec<u32> = f.x_checks.iter().map(|r| row_to_mask(r)).collect();
        let z_checks: Vec<u32> = f.z_checks.iter().map(|r| row_to_mask(r)).collect();
        let logical_x = row_to_mask(&f.logical_x);
        let logical_z = row_to_mask(&f.logical_z);
        // CSS condition: every X check commutes with every Z check
        for &hx in &x_checks {
            for &hz in &z_checks {
                if (hx & hz).count_ones() % 2 != 0 {
                    return Err(Error::Domain("check families do not commute".into()));
                }
            }
        }
        let self_dual = x_checks == z_checks;
        // distance by exhaustive weight enumeration over the codeword span
        let mut generators = z_checks.clone();
        generators.push(logical_x);
        let mut min_weight = u32::MAX;
        for combo in 1..(1u32 << generators.len()) {
            let word = generators
                .iter()
                .enumerate()
                .filter(|(i, _)| (combo >> i) & 1 == 1)
                .fold(0u32, |acc, (_, &g)| acc ^ g);
            if word != 0 {
                min_weight = min_weight.min(word.count_ones());
            }
        }
        Ok(CssCode {
            name: f.name,
            length: f.length,
            x_checks,
            z_checks,
            logical_x,
            logical_z,
            self_dual,
            distance: min_weight as usize,
            encoder: f.encoder,
        })
    }

    fn checks_for(&self, basis: MeasBasis) -> &[u32] {
        match basis {
            MeasBasis::X => &self.x_checks,
            // the Y stabilizers are the products of matching X and Z checks,
            // which for a self-dual code share the same supports
            MeasBasis::Y | MeasBasis::Z => &self.z_checks,
        }
    }

    fn logical_mask(&self, basis: MeasBasis) -> u32 {
        match basis {
            MeasBasis::X => self.logical_x,
            MeasBasis::Z => self.logical_z,
            MeasBasis::Y => self.logical_x | self.logical_z,
        }
    }
}

/// The seven-qubit self-dual code from the pinned fixture.
pub fn steane() -> &'static CssCode {
    static CODE: OnceLock<CssCode> = OnceLock::new();
    CODE.get_or_init(|| {
        let fixture: CodeFixture = serde_json::from_str(include_str!("../fixtures/steane.json"))
            .expect("fixture parses");
        CssCode::from_fixture(fixture).expect("fixture is a valid CSS code")
    })
}

/// Encoder CNOTs with block positions mapped onto concrete wires.
pub fn encoder_gates(code: &CssCode, position_to_wire: &[usize]) -> Vec<Gate> {
    code.encoder
        .cnots
        .iter()
        .map(|&(c, t)| Gate::Cnot { control: position_to_wire[c], target: position_to_wire[t] })
        .collect()
}

/// Wires of one encoded block, indexed by block position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockWires {
    pub positions: Vec<usize>,
}

/// Append an encoder for each listed wire: three fresh |0⟩ and three fresh
/// |+⟩ ancillas per block, original plus-wires shifted to keep the
/// zeros-then-pluses layout. The gate set stays CNOT-only on fresh ancillas.
pub fn append_encoders(c: &Circuit, wires: &[usize]) -> Result<(Circuit, Vec<BlockWires>)> {
    let code = steane();
    for (i, &w) in wires.iter().enumerate() {
        if w >= c.num_wires() {
            return Err(Error::Domain(format!("wire {w} out of range")));
        }
        if wires[..i].contains(&w) {
            return Err(Error::Domain(format!("wire {w} encoded twice")));
        }
    }
    let k = wires.len();
    let (n, m) = (c.zero_inputs, c.plus_inputs);
    let shift = 3 * k; // new zero ancillas inserted between old zeros and old pluses
    let remap = |w: usize| if w < n { w } else { w + shift };
    let mut gates: Vec<Gate> = c
        .gates
        .iter()
        .map(|g| match g {
            Gate::X { target } => Gate::X { target: remap(*target) },
            Gate::Cnot { control, target } => {
                Gate::Cnot { control: remap(*control), target: remap(*target) }
            }
            Gate::Toffoli { controls, target } => Gate::Toffoli {
                controls: [remap(controls[0]), remap(controls[1])],
                target: remap(*target),
            },
            Gate::Id => Gate::Id,
            Gate::Perm { wires, table } => {
                Gate::Perm { wires: wires.iter().map(|&w| remap(w)).collect(), table: table.clone() }
            }
        })
        .collect();

    let mut blocks = Vec::with_capacity(k);
    for (i, &w) in wires.iter().enumerate() {
        let zero_base = n + 3 * i;
        let plus_base = n + shift + m + 3 * i;
        let mut positions = vec![0usize; code.length];
        positions[code.encoder.input_position] = remap(w);
        for (j, &p) in code.encoder.zero_positions.iter().enumerate() {
            positions[p] = zero_base + j;
        }
        for (j, &p) in code.encoder.plus_positions.iter().enumerate() {
            positions[p] = plus_base + j;
        }
        gates.extend(encoder_gates(code, &positions));
        blocks.push(BlockWires { positions });
    }
    let encoded = Circuit::new(n + shift, m + shift, gates)?;
    Ok((encoded, blocks))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeInput {
    Zero,
    One,
    Plus,
    PlusI,
}

/// Encoded single-block state with wire i = block position i, built by
/// applying the fixture encoder to the product input directly.
pub fn encoded_state(code: &CssCode, input: EncodeInput) -> QuantumState {
    let wires = code.length;
    let basis = Basis::Work { wires };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let single = |position: usize| -> [Complex64; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        if position == code.encoder.input_position {
            match input {
                EncodeInput::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
                EncodeInput::One => [c(0.0, 0.0), c(1.0, 0.0)],
                EncodeInput::Plus => [c(r, 0.0), c(r, 0.0)],
                EncodeInput::PlusI => [c(r, 0.0), c(0.0, r)],
            }
        } else if code.encoder.plus_positions.contains(&position) {
            [c(r, 0.0), c(r, 0.0)]
        } else {
            [c(1.0, 0.0), c(0.0, 0.0)]
        }
    };
    let mut amps = vec![Complex64::new(1.0, 0.0); 1usize << wires];
    for (g, amp) in amps.iter_mut().enumerate() {
        for position in 0..wires {
            let bit = (g >> (wires - 1 - position)) & 1;
            *amp *= single(position)[bit];
        }
    }
    let mut state = QuantumState { basis, amps };
    for gate in encoder_gates(code, &(0..wires).collect::<Vec<_>>()) {
        apply_gate(&mut state.amps, wires, &gate);
    }
    state
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecodeResult {
    pub logical: u8,
    /// Position corrected by the syndrome, if any.
    pub correction: Option<usize>,
    /// Set when the syndrome matches no single position (impossible for a
    /// perfect code, where two-flip patterns instead miscorrect silently).
    pub uncorrectable: bool,
}

/// Decode a transversal readout: compute the syndrome of the relevant check
/// family, apply the single-position correction it indicates, and take the
/// outcome parity against the logical representative.
pub fn transversal_decode(code: &CssCode, outcomes: &[u8], basis: MeasBasis) -> Result<DecodeResult> {
    if outcomes.len() != code.length {
        return Err(Error::Domain(format!(
            "expected {} outcomes, got {}",
            code.length,
            outcomes.len()
        )));
    }
    let word = outcomes.iter().enumerate().fold(0u32, |w, (i, &b)| w | (((b & 1) as u32) << i));
    let checks = code.checks_for(basis);
    let syndrome: Vec<bool> =
        checks.iter().map(|&h| (h & word).count_ones() % 2 == 1).collect();
    let mut corrected = word;
    let mut correction = None;
    let mut uncorrectable = false;
    if syndrome.iter().any(|&s| s) {
        let position = (0..code.length).find(|&p| {
            checks.iter().enumerate().all(|(i, &h)| ((h >> p) & 1 == 1) == syndrome[i])
        });
        match position {
            Some(p) => {
                corrected ^= 1 << p;
                correction = Some(p);
            }
            None => uncorrectable = true,
        }
    }
    let mut logical = ((code.logical_mask(basis) & corrected).count_ones() % 2) as u8;
    if let MeasBasis::Y = basis {
        // physical Y^⊗7 = −(logical Y)
        logical ^= 1;
    }
    Ok(DecodeResult { logical, correction, uncorrectable })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoisyReport {
    pub shots: u64,
    pub flip_prob: f64,
    pub seed: u64,
    pub logical_errors: u64,
    pub logical_error_rate: f64,
    /// Readout error rate of a bare, unencoded qubit: the flip probability.
    pub baseline_error_rate: f64,
    pub corrections_applied: u64,
}

/// Transversal readout of an encoded block under i.i.d. outcome flips: each
/// shot samples the exact 7-bit distribution in `basis`, flips every bit with
/// probability `flip_prob`, decodes, and compares against the noiseless
/// logical value.
pub fn noisy_measurement_experiment(
    state: &QuantumState,
    basis: MeasBasis,
    flip_prob: f64,
    shots: u64,
    seed: u64,
) -> Result<NoisyReport> {
    let code = steane();
    if state.basis != (Basis::Work { wires: code.length }) {
        return Err(Error::Domain("expected a single encoded block (7 work qubits)".into()));
    }
    if !(0.0..=0.5).contains(&flip_prob) {
        return Err(Error::Domain(format!("flip probability {flip_prob} outside [0, 1/2]")));
    }
    // exact outcome distribution in the common basis
    let plan = crate::measurement::MeasurementPlan {
        bases: vec![Some(basis); code.length],
        accept: vec![0],
        shots: 0,
        seed: 0,
    };
    let dist = crate::measurement::exact_distribution(state, &plan)?;
    let mut cdf = dist.probs.clone();
    let mut acc = 0.0;
    for v in cdf.iter_mut() {
        acc += *v;
        *v = acc;
    }
    // the noiseless logical value must be sharp on the state's support
    let mut noiseless: Option<u8> = None;
    for (out, &p) in dist.probs.iter().enumerate() {
        if p > 1e-12 {
            let bits: Vec<u8> =
                (0..code.length).map(|i| ((out >> (code.length - 1 - i)) & 1) as u8).collect();
            let decoded = transversal_decode(code, &bits, basis)?;
            match noiseless {
                None => noiseless = Some(decoded.logical),
                Some(v) if v == decoded.logical => {}
                Some(_) => {
                    return Err(Error::Domain(
                        "state has no sharp logical value in this basis".into(),
                    ))
                }
            }
        }
    }
    let truth = noiseless.ok_or_else(|| Error::Domain("state has empty support".into()))?;

    let results = exec::map_indexed(shots as usize, |shot| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot as u64);
        let u: f64 = rng.gen();
        let out = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
        let mut bits: Vec<u8> =
            (0..code.length).map(|i| ((out >> (code.length - 1 - i)) & 1) as u8).collect();
        for b in bits.iter_mut() {
            if rng.gen::<f64>() < flip_prob {
                *b ^= 1;
            }
        }
        let decoded = transversal_decode(code, &bits, basis).expect("length is fixed");
        (u64::from(decoded.logical != truth), u64::from(decoded.correction.is_some()))
    });
    let logical_errors: u64 = results.iter().map(|r| r.0).sum();
    let corrections_applied: u64 = results.iter().map(|r| r.1).sum();
    Ok(NoisyReport {
        shots,
        flip_prob,
        seed,
        logical_errors,
        logical_error_rate: logical_errors as f64 / shots.max(1) as f64,
        baseline_error_rate: flip_prob,
        corrections_applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::hamiltonian::{build_unary, check_stoquastic};

    /// GF(2) span oracle over the fixture's check rows.
    fn even_codewords() -> Vec<u32> {
        let code = steane();
        let gens = &code.z_checks;
        (0..(1u32 << gens.len()))
            .map(|combo| {
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| (combo >> i) & 1 == 1)
                    .fold(0u32, |acc, (_, &g)| acc ^ g)
            })
            .collect()
    }

    #[test]
    fn fixture_is_a_self_dual_distance_three_code() {
        let code = steane();
        assert_eq!(code.length, 7);
        assert!(code.self_dual);
        assert_eq!(code.distance, 3);
        assert_eq!(code.encoder.cnots.len(), 11);
        assert_eq!(code.logical_x, 0b111_1111);
    }

    #[test]
    fn encoded_zero_is_uniform_over_even_codewords() {
        let code = steane();
        let state = encoded_state(code, EncodeInput::Zero);
        let expected = 1.0 / 8f64.sqrt();
        let words = even_codewords();
        for (g, amp) in state.amps.iter().enumerate() {
            // state indexing has position 0 as the most significant bit;
            // masks have bit k = position k
            let word: u32 =
                (0..7).fold(0, |acc, p| acc | ((((g >> (6 - p)) & 1) as u32) << p));
            if words.contains(&word) {
                assert!((amp.re - expected).abs() < 1e-12, "codeword {word:07b}");
            } else {
                assert!(amp.norm() < 1e-12, "non-codeword {word:07b} populated");
            }
        }
    }

    #[test]
    fn encoded_plus_is_uniform_over_all_codewords() {
        let code = steane();
        let state = encoded_state(code, EncodeInput::Plus);
        let expected = 1.0 / 16f64.sqrt();
        let mut words = even_codewords();
        let odds: Vec<u32> = words.iter().map(|w| w ^ code.logical_x).collect();
        words.extend(odds);
        for (g, amp) in state.amps.iter().enumerate() {
            let word: u32 =
                (0..7).fold(0, |acc, p| acc | ((((g >> (6 - p)) & 1) as u32) << p));
            if words.contains(&word) {
                assert!((amp.re - expected).abs() < 1e-12);
            } else {
                assert!(amp.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn encoders_keep_amplitudes_nonnegative_and_circuits_stoquastic() {
        let c = parse_circuit("work 1 1\nCNOT 1 0\n").unwrap();
        let (encoded, blocks) = append_encoders(&c, &[0]).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(encoded.num_wires(), c.num_wires() + 6);
        let out = crate::circuit::run_circuit(&encoded).unwrap();
        for a in &out.amps {
            assert!(a.im == 0.0 && a.re >= -1e-15);
        }
        let ih = build_unary(&encoded, false).unwrap();
        for i in 0..=4 {
            let s = i as f64 / 4.0;
            assert!(check_stoquastic(&ih.at(s), 1e-12).is_stoquastic());
        }
    }

    #[test]
    fn all_zero_readout_decodes_without_correction() {
        let code = steane();
        let result = transversal_decode(code, &[0; 7], MeasBasis::Z).unwrap();
        assert_eq!(result.logical, 0);
        assert!(result.correction.is_none());
        assert!(!result.uncorrectable);
    }

    #[test]
    fn single_flips_are_corrected_in_every_basis() {
        // exhaustive single-flip oracle over the exact readout distributions
        let code = steane();
        for basis in [MeasBasis::X, MeasBasis::Y, MeasBasis::Z] {
            let (input, expected) = match basis {
                MeasBasis::Z => (EncodeInput::Zero, 0u8),
                MeasBasis::X => (EncodeInput::Plus, 0u8),
                MeasBasis::Y => (EncodeInput::PlusI, 0u8),
            };
            let state = encoded_state(code, input);
            let plan = crate::measurement::MeasurementPlan {
                bases: vec![Some(basis); 7],
                accept: vec![0],
                shots: 0,
                seed: 0,
            };
            let dist = crate::measurement::exact_distribution(&state, &plan).unwrap();
            for (out, &p) in dist.probs.iter().enumerate() {
                if p < 1e-12 {
                    continue;
                }
                let bits: Vec<u8> = (0..7).map(|i| ((out >> (6 - i)) & 1) as u8).collect();
                // noiseless decode
                let clean = transversal_decode(code, &bits, basis).unwrap();
                assert_eq!(clean.logical, expected, "{basis:?} clean");
                assert!(clean.correction.is_none());
                // every single flip must still decode correctly
                for flip in 0..7 {
                    let mut noisy = bits.clone();
                    noisy[flip] ^= 1;
                    let fixed = transversal_decode(code, &noisy, basis).unwrap();
                    assert_eq!(fixed.logical, expected, "{basis:?} flip {flip}");
                    assert_eq!(fixed.correction, Some(flip));
                }
            }
        }
    }

    #[test]
    fn double_flips_miscorrect_to_a_logical_error() {
        // syndrome-table enumeration: a perfect distance-3 code maps any
        // two-flip pattern onto a third position, landing in the wrong coset
        let code = steane();
        let state = encoded_state(code, EncodeInput::Zero);
        let plan = crate::measurement::MeasurementPlan {
            bases: vec![Some(MeasBasis::Z); 7],
            accept: vec![0],
            shots: 0,
            seed: 0,
        };
        let dist = crate::measurement::exact_distribution(&state, &plan).unwrap();
        let out = dist.probs.iter().position(|&p| p > 1e-12).unwrap();
        let bits: Vec<u8> = (0..7).map(|i| ((out >> (6 - i)) & 1) as u8).collect();
        for a in 0..7 {
            for b in a + 1..7 {
                let mut noisy = bits.clone();
                noisy[a] ^= 1;
                noisy[b] ^= 1;
                let decoded = transversal_decode(code, &noisy, MeasBasis::Z).unwrap();
                assert!(!decoded.uncorrectable, "perfect code never flags");
                assert!(decoded.correction.is_some());
                assert_eq!(decoded.logical, 1, "flips ({a},{b}) must cross the coset");
            }
        }
    }

    #[test]
    fn y_basis_sign_convention_matches_statevector() {
        // +i eigenstate reads out logical 0 deterministically; the logical X
        // and Z eigenstates stay unbiased in Y
        let code = steane();
        let state = encoded_state(code, EncodeInput::PlusI);
        let plan = crate::measurement::MeasurementPlan {
            bases: vec![Some(MeasBasis::Y); 7],
            accept: vec![0],
            shots: 0,
            seed: 0,
        };
        let dist = crate::measurement::exact_distribution(&state, &plan).unwrap();
        for (out, &p) in dist.probs.iter().enumerate() {
            if p < 1e-12 {
                continue;
            }
            let bits: Vec<u8> = (0..7).map(|i| ((out >> (6 - i)) & 1) as u8).collect();
            assert_eq!(transversal_decode(code, &bits, MeasBasis::Y).unwrap().logical, 0);
        }
        let zero = encoded_state(code, EncodeInput::Zero);
        let dist = crate::measurement::exact_distribution(&zero, &plan).unwrap();
        let mut ones = 0.0;
        for (out, &p) in dist.probs.iter().enumerate() {
            let bits: Vec<u8> = (0..7).map(|i| ((out >> (6 - i)) & 1) as u8).collect();
            if transversal_decode(code, &bits, MeasBasis::Y).unwrap().logical == 1 {
                ones += p;
            }
        }
        assert!((ones - 0.5).abs() < 1e-10, "logical Y of an X-basis codeword is unbiased");
    }

    #[test]
    fn noiseless_experiment_never_errs() {
        let code = steane();
        let state = encoded_state(code, EncodeInput::Zero);
        let report = noisy_measurement_experiment(&state, MeasBasis::Z, 0.0, 2000, 1).unwrap();
        assert_eq!(report.logical_errors, 0);
    }

    #[test]
    fn weak_noise_is_suppressed_quadratically() {
        let code = steane();
        let state = encoded_state(code, EncodeInput::Zero);
        let p = 0.01;
        let report =
            noisy_measurement_experiment(&state, MeasBasis::Z, p, 200_000, 7).unwrap();
        // leading-order miscorrection rate is 21 p²
        let predicted = 21.0 * p * p;
        assert!(report.logical_error_rate < p, "rate {}", report.logical_error_rate);
        assert!(
            (report.logical_error_rate - predicted).abs() < 6e-4,
            "rate {} vs leading order {predicted}",
            report.logical_error_rate
        );
    }

    #[test]
    fn maximal_noise_gives_coin_flips() {
        let code = steane();
        let state = encoded_state(code, EncodeInput::Zero);
        let report =
            noisy_measurement_experiment(&state, MeasBasis::Z, 0.5, 100_000, 3).unwrap();
        assert!((report.logical_error_rate - 0.5).abs() < 0.01);
    }
}
