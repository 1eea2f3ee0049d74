//! Interpolated Hamiltonian over domain-wall clock qubits.
//!
//! Step t is the string 1^t 0^(T-t) over T clock qubits. Unary clock
//! projectors are replaced by their local domain-wall patterns:
//!
//! - step-0 projector           -> |0⟩⟨0| on clock qubit 1
//! - complement of step 0       -> |1⟩⟨1| on clock qubit 1
//! - |t⟩⟨t-1| hop               -> |110⟩⟨100| on clock qubits (t-1, t, t+1)
//! - |t-1⟩⟨t-1|, |t⟩⟨t|         -> |100⟩⟨100|, |110⟩⟨110| on the same triple
//!
//! with the leading qubit dropped at t = 1 and the trailing qubit dropped at
//! t = T, plus a two-qubit penalty on every illegal `01` pattern. Illegal
//! strings are handled by that unit-weight penalty alone, so spectra live on
//! the full 2^(n+m+T)-dimensional space.

use nalgebra::DMatrix;

use super::{
    gate_matrix, kron, matrix_unit, one_projector, InterpolatedHamiltonian, LocalTerm,
    TermHamiltonian, TermTag, DEFAULT_HAM_DIM_CAP,
};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::state::{domain_wall_index, Basis};

/// Build the domain-wall interpolation pair for `c`. Padding, when wanted, is
/// a circuit transform: pass `&c.padded()`.
pub fn build_domain_wall(c: &Circuit) -> Result<InterpolatedHamiltonian> {
    let steps = c.len();
    let wires = c.num_wires();
    let basis = Basis::DomainWallClock { wires, steps };
    let dim = basis.dimension();
    if dim > DEFAULT_HAM_DIM_CAP {
        return Err(Error::DimensionCap { required: dim, cap: DEFAULT_HAM_DIM_CAP });
    }
    // site index of clock qubit i (1-based)
    let clock_site = |i: usize| wires + i - 1;

    let input_terms = super::unary::input_penalties(c, clock_site(1), {
        let mut p = DMatrix::zeros(2, 2);
        p[(0, 0)] = 1.0;
        p
    });

    let clock_terms: Vec<LocalTerm> = (1..steps)
        .map(|i| LocalTerm {
            sites: vec![clock_site(i), clock_site(i + 1)],
            matrix: matrix_unit(4, 0b01, 0b01),
            tag: TermTag::ClockConstraint,
        })
        .collect();

    let mut initial_terms = input_terms.clone();
    initial_terms.push(LocalTerm {
        sites: vec![clock_site(1)],
        matrix: one_projector(),
        tag: TermTag::ClockPenalty,
    });
    initial_terms.extend(clock_terms.clone());

    let mut terminal_terms = input_terms;
    for (idx, gate) in c.gates.iter().enumerate() {
        let t = idx + 1;
        let u = gate_matrix(gate);
        let eye = DMatrix::identity(u.nrows(), u.ncols());
        // clock patterns for (t-1, t) in the local clock space, with the
        // boundary qubits dropped at the ends of the chain
        let (clock_sites, before, after) = if steps == 1 {
            (vec![clock_site(1)], 0b0, 0b1)
        } else if t == 1 {
            (vec![clock_site(1), clock_site(2)], 0b00, 0b10)
        } else if t == steps {
            (vec![clock_site(t - 1), clock_site(t)], 0b10, 0b11)
        } else {
            (vec![clock_site(t - 1), clock_site(t), clock_site(t + 1)], 0b100, 0b110)
        };
        let clock_dim = 1usize << clock_sites.len();
        let stay = &matrix_unit(clock_dim, after, after) + &matrix_unit(clock_dim, before, before);
        let hop = matrix_unit(clock_dim, after, before);
        let matrix =
            0.5 * (kron(&eye, &stay) - kron(&u, &hop) - kron(&u.transpose(), &hop.transpose()));
        let mut sites = gate.wires();
        sites.extend(&clock_sites);
        let tag = if t == 1 || t == steps { TermTag::Endpoint } else { TermTag::Propagation };
        terminal_terms.push(LocalTerm { sites, matrix, tag });
    }
    terminal_terms.extend(clock_terms);

    Ok(InterpolatedHamiltonian {
        initial: TermHamiltonian::new(basis, initial_terms),
        terminal: TermHamiltonian::new(basis, terminal_terms),
    })
}

/// Restrict a domain-wall operator to the legal clock strings, re-indexed in
/// the unary basis. Comparing the result against the unary construction
/// validates the replacement rules.
pub fn restrict_to_legal_clock(m: &CsrMatrix, wires: usize, steps: usize) -> CsrMatrix {
    let dw_clock = 1usize << steps;
    let un_clock = steps + 1;
    let work_dim = 1usize << wires;
    let legal: Vec<usize> = (0..=steps).map(|t| domain_wall_index(t, steps)).collect();
    let mut entries = Vec::new();
    for w_r in 0..work_dim {
        for (t_r, &c_r) in legal.iter().enumerate() {
            let row_dw = w_r * dw_clock + c_r;
            for k in m.row_ptr[row_dw]..m.row_ptr[row_dw + 1] {
                let col_dw = m.col_idx[k];
                let w_c = col_dw / dw_clock;
                let c_c = col_dw % dw_clock;
                if let Some(t_c) = legal.iter().position(|&l| l == c_c) {
                    entries.push((w_r * un_clock + t_r, w_c * un_clock + t_c, m.values[k]));
                }
            }
        }
    }
    CsrMatrix::from_coo(work_dim * un_clock, entries)
}
