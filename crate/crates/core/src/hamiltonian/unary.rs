//! Interpolated Hamiltonian over a unary clock register.
//!
//! The initial Hamiltonian pins |0⟩^n |+⟩^m |0⟩_c through input penalties and
//! a clock penalty; the terminal one exchanges the clock penalty for one
//! propagation term per gate, so its ground state superposes all partial
//! executions uniformly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{
    gate_matrix, kron, matrix_unit, minus_projector, one_projector, InterpolatedHamiltonian,
    LocalTerm, TermHamiltonian, TermTag, DEFAULT_HAM_DIM_CAP,
};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::{Basis, QuantumState};

/// Build the unary-clock interpolation pair for `c`, optionally
/// identity-padded so the accepting clock window carries weight 1/2.
pub fn build_unary(c: &Circuit, pad: bool) -> Result<InterpolatedHamiltonian> {
    let padded;
    let circuit = if pad {
        padded = c.padded();
        &padded
    } else {
        c
    };
    let steps = circuit.len();
    let wires = circuit.num_wires();
    let basis = Basis::UnaryClock { wires, steps };
    let dim = basis.dimension();
    if dim > DEFAULT_HAM_DIM_CAP {
        return Err(Error::DimensionCap { required: dim, cap: DEFAULT_HAM_DIM_CAP });
    }
    let clock_site = wires;
    let clock_dim = steps + 1;

    let input_terms = input_penalties(circuit, clock_site, matrix_unit(clock_dim, 0, 0));

    let mut initial_terms = input_terms.clone();
    let mut clock_penalty = DMatrix::identity(clock_dim, clock_dim);
    clock_penalty[(0, 0)] = 0.0;
    initial_terms.push(LocalTerm {
        sites: vec![clock_site],
        matrix: clock_penalty,
        tag: TermTag::ClockPenalty,
    });

    let mut terminal_terms = input_terms;
    for (idx, gate) in circuit.gates.iter().enumerate() {
        let t = idx + 1;
        let u = gate_matrix(gate);
        let gate_dim = u.nrows();
        let eye = DMatrix::identity(gate_dim, gate_dim);
        let stay = &matrix_unit(clock_dim, t, t) + &matrix_unit(clock_dim, t - 1, t - 1);
        let hop = matrix_unit(clock_dim, t, t - 1);
        let matrix = 0.5
            * (kron(&eye, &stay) - kron(&u, &hop) - kron(&u.transpose(), &hop.transpose()));
        let mut sites = gate.wires();
        sites.push(clock_site);
        terminal_terms.push(LocalTerm { sites, matrix, tag: TermTag::Propagation });
    }

    Ok(InterpolatedHamiltonian {
        initial: TermHamiltonian::new(basis, initial_terms),
        terminal: TermHamiltonian::new(basis, terminal_terms),
    })
}

/// Input penalties shared by both endpoints: |1⟩⟨1| on every zero-wire and
/// |−⟩⟨−| on every plus-wire, each conditioned on the clock resting at step 0.
pub(super) fn input_penalties(
    c: &Circuit,
    first_clock_site: usize,
    clock_start_projector: DMatrix<f64>,
) -> Vec<LocalTerm> {
    let mut terms = Vec::with_capacity(c.num_wires());
    for wire in 0..c.num_wires() {
        let work = if wire < c.zero_inputs { one_projector() } else { minus_projector() };
        terms.push(LocalTerm {
            sites: vec![wire, first_clock_site],
            matrix: kron(&work, &clock_start_projector),
            tag: TermTag::InputPenalty,
        });
    }
    terms
}

/// Exact ground state of the initial Hamiltonian: |0⟩^n |+⟩^m with the clock
/// at step 0, expressed in the basis of `ih`.
pub fn initial_ground_state(c: &Circuit, ih: &InterpolatedHamiltonian) -> QuantumState {
    let basis = ih.basis();
    let clock_dim = basis.clock_dim();
    let c0 = basis.clock_index(0);
    let work = c.input_state();
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dimension()];
    for (w, amp) in work.amps.iter().enumerate() {
        amps[w * clock_dim + c0] = *amp;
    }
    QuantumState { basis, amps }
}
