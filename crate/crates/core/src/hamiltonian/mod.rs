//! Hamiltonians as sums of local terms over work ⊗ clock space.
//!
//! A *site* is either a work qubit (dimension 2), the unary clock register
//! (dimension T+1, a single site), or one domain-wall clock qubit. Sites are
//! numbered work wires first, clock after. Terms carry dense local matrices in
//! the listed site order (first site = most significant local digit) and are
//! embedded into a CSR matrix on demand.

mod domain_wall;
mod unary;

pub use domain_wall::{build_domain_wall, restrict_to_legal_clock};
pub use unary::{build_unary, initial_ground_state};

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sparse::CsrMatrix;
use crate::state::Basis;

/// Default cap on assembled Hamiltonian dimension.
pub const DEFAULT_HAM_DIM_CAP: usize = 1 << 22;

pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermTag {
    #[serde(rename = "H_in")]
    InputPenalty,
    #[serde(rename = "clock-penalty")]
    ClockPenalty,
    #[serde(rename = "propagation")]
    Propagation,
    #[serde(rename = "endpoint")]
    Endpoint,
    #[serde(rename = "H_clock")]
    ClockConstraint,
}

/// One local term: a dense real matrix over a few sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub sites: Vec<usize>,
    pub matrix: DMatrix<f64>,
    pub tag: TermTag,
}

#[derive(Debug)]
pub struct TermHamiltonian {
    pub basis: Basis,
    pub terms: Vec<LocalTerm>,
    cache: OnceLock<CsrMatrix>,
}

impl Clone for TermHamiltonian {
    fn clone(&self) -> Self {
        TermHamiltonian { basis: self.basis, terms: self.terms.clone(), cache: OnceLock::new() }
    }
}

/// Per-site dimensions for a basis.
pub fn site_dims(basis: &Basis) -> Vec<usize> {
    let mut dims = vec![2usize; basis.wires()];
    match basis {
        Basis::Work { .. } => {}
        Basis::UnaryClock { steps, .. } => dims.push(steps + 1),
        Basis::DomainWallClock { steps, .. } => dims.extend(vec![2usize; *steps]),
    }
    dims
}

/// Stride of each site inside the global index `w * clock_dim + c`.
fn site_strides(basis: &Basis) -> Vec<usize> {
    let wires = basis.wires();
    let clock_dim = basis.clock_dim();
    let mut strides = Vec::with_capacity(wires + 1);
    for q in 0..wires {
        strides.push((1usize << (wires - 1 - q)) * clock_dim);
    }
    match basis {
        Basis::Work { .. } => {}
        Basis::UnaryClock { .. } => strides.push(1),
        Basis::DomainWallClock { steps, .. } => {
            for i in 0..*steps {
                strides.push(1usize << (steps - 1 - i));
            }
        }
    }
    strides
}

impl TermHamiltonian {
    pub fn new(basis: Basis, terms: Vec<LocalTerm>) -> Self {
        let dims = site_dims(&basis);
        for term in &terms {
            let local_dim: usize = term.sites.iter().map(|&s| dims[s]).product();
            assert_eq!(term.matrix.nrows(), local_dim, "term matrix does not match its sites");
            assert_eq!(term.matrix.ncols(), local_dim);
        }
        TermHamiltonian { basis, terms, cache: OnceLock::new() }
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Largest support size over all terms.
    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(|t| t.sites.len()).max().unwrap_or(0)
    }

    /// Assembled sparse matrix, memoized. Duplicate coordinate entries are
    /// summed; the result is checked symmetric to within [`HERMITICITY_TOL`].
    pub fn sparse(&self) -> &CsrMatrix {
        self.cache.get_or_init(|| {
            assemble_sparse(self).expect("term Hamiltonian assembly failed")
        })
    }

    /// Quadratic form ⟨ψ|H|ψ⟩ for a complex statevector.
    pub fn expectation(&self, amps: &[num_complex::Complex64]) -> f64 {
        let h = self.sparse();
        let hv = h.matvec_complex(amps);
        amps.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Embed every local term into a row-compressed matrix over the full space.
pub fn assemble_sparse(h: &TermHamiltonian) -> Result<CsrMatrix> {
    let dims = site_dims(&h.basis);
    let strides = site_strides(&h.basis);
    let dim = h.dimension();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for term in &h.terms {
        let term_dims: Vec<usize> = term.sites.iter().map(|&s| dims[s]).collect();
        let term_strides: Vec<usize> = term.sites.iter().map(|&s| strides[s]).collect();
        // offsets contributed by every assignment of the sites the term
        // does not touch
        let mut offsets: Vec<usize> = vec![0];
        for s in 0..dims.len() {
            if term.sites.contains(&s) {
                continue;
            }
            let mut next = Vec::with_capacity(offsets.len() * dims[s]);
            for v in 0..dims[s] {
                let add = v * strides[s];
                next.extend(offsets.iter().map(|&o| o + add));
            }
            offsets = next;
        }
        let local_dim = term.matrix.nrows();
        for lr in 0..local_dim {
            for lc in 0..local_dim {
                let v = term.matrix[(lr, lc)];
                if v == 0.0 {
                    continue;
                }
                let row_base = mixed_radix_embed(lr, &term_dims, &term_strides);
                let col_base = mixed_radix_embed(lc, &term_dims, &term_strides);
                for &off in &offsets {
                    entries.push((row_base + off, col_base + off, v));
                }
            }
        }
    }
    let m = CsrMatrix::from_coo(dim, entries);
    m.require_symmetric(HERMITICITY_TOL)?;
    Ok(m)
}

fn mixed_radix_embed(local: usize, dims: &[usize], strides: &[usize]) -> usize {
    let mut rest = local;
    let mut global = 0;
    for i in (0..dims.len()).rev() {
        let digit = rest % dims[i];
        rest /= dims[i];
        global += digit * strides[i];
    }
    global
}

/// Pair of endpoint Hamiltonians with the linear interpolation
/// `H(s) = (1-s)·initial + s·terminal`.
#[derive(Debug, Clone)]
pub struct InterpolatedHamiltonian {
    pub initial: TermHamiltonian,
    pub terminal: TermHamiltonian,
}

impl InterpolatedHamiltonian {
    pub fn basis(&self) -> Basis {
        self.initial.basis
    }

    pub fn dimension(&self) -> usize {
        self.initial.dimension()
    }

    /// Assembled `H(s)`. Endpoint values reuse the memoized endpoint matrices
    /// exactly.
    pub fn at(&self, s: f64) -> CsrMatrix {
        if s == 0.0 {
            self.initial.sparse().clone()
        } else if s == 1.0 {
            self.terminal.sparse().clone()
        } else {
            self.initial.sparse().linear_combination(1.0 - s, self.terminal.sparse(), s)
        }
    }

    /// Spectral norm of `terminal - initial`, used by runtime estimates.
    pub fn difference_norm(&self) -> f64 {
        self.initial
            .sparse()
            .linear_combination(-1.0, self.terminal.sparse(), 1.0)
            .spectral_norm(300)
    }
}

/// One off-diagonal entry violating stoquasticity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StoquasticViolation {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Scan result for nonpositivity of off-diagonal entries. Symmetric inputs
/// report violations in (i,j)/(j,i) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoquasticReport {
    pub tol: f64,
    pub dimension: usize,
    pub violations: Vec<StoquasticViolation>,
}

impl StoquasticReport {
    pub fn is_stoquastic(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report every off-diagonal entry whose real part exceeds `tol`. Entries are
/// stored as real numbers, so the imaginary check is trivially satisfied and
/// recorded as zero.
pub fn check_stoquastic(m: &CsrMatrix, tol: f64) -> StoquasticReport {
    let mut violations = Vec::new();
    for r in 0..m.dim {
        for k in m.row_ptr[r]..m.row_ptr[r + 1] {
            let c = m.col_idx[k];
            if c != r && m.values[k] > tol {
                violations.push(StoquasticViolation { row: r, col: c, re: m.values[k], im: 0.0 });
            }
        }
    }
    StoquasticReport { tol, dimension: m.dim, violations }
}

// --- JSON export ----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub wires: Vec<usize>,
    /// Row-major `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
    pub tag: TermTag,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub schema_version: u32,
    pub basis: Basis,
    pub dimension: usize,
    pub terms: Vec<TermJson>,
}

impl From<&TermHamiltonian> for HamiltonianJson {
    fn from(h: &TermHamiltonian) -> Self {
        HamiltonianJson {
            schema_version: 1,
            basis: h.basis,
            dimension: h.dimension(),
            terms: h
                .terms
                .iter()
                .map(|t| TermJson {
                    wires: t.sites.clone(),
                    matrix: t.matrix.row_iter().flat_map(|row| row.iter().map(|&v| [v, 0.0]).collect::<Vec<_>>()).collect(),
                    tag: t.tag,
                })
                .collect(),
        }
    }
}

/// Elementary matrix unit |r⟩⟨c| of size n.
pub(crate) fn matrix_unit(n: usize, r: usize, c: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(r, c)] = 1.0;
    m
}

/// Permutation matrix of a gate: column `in` carries a 1 in row `map(in)`.
pub(crate) fn gate_matrix(gate: &crate::circuit::Gate) -> DMatrix<f64> {
    let dim = 1usize << gate.arity();
    let mut m = DMatrix::zeros(dim, dim);
    for input in 0..dim {
        m[(gate.map_local(input), input)] = 1.0;
    }
    m
}

/// Kronecker product helper (first factor most significant).
pub(crate) fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

pub(crate) fn minus_projector() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5])
}

pub(crate) fn one_projector() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Basis;

    #[test]
    fn zero_term_hamiltonian_assembles_to_zero() {
        let h = TermHamiltonian::new(Basis::Work { wires: 2 }, vec![]);
        let m = assemble_sparse(&h).unwrap();
        assert_eq!(m.dim, 4);
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn single_projector_embeds_on_msb_wire() {
        // |1⟩⟨1| on wire 0 of two wires: wire 0 is the most significant bit,
        // so the diagonal is (0, 0, 1, 1).
        let h = TermHamiltonian::new(
            Basis::Work { wires: 2 },
            vec![LocalTerm { sites: vec![0], matrix: one_projector(), tag: TermTag::InputPenalty }],
        );
        let m = assemble_sparse(&h).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.get(i, i)).collect();
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn stoquastic_scan_reports_positive_pair() {
        let m = CsrMatrix::from_coo(2, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        let report = check_stoquastic(&m, 1e-12);
        assert_eq!(report.violations.len(), 2);
        assert_eq!((report.violations[0].row, report.violations[0].col), (0, 1));
        assert!(!report.is_stoquastic());
    }

    #[test]
    fn stoquastic_scan_accepts_negative_offdiagonals() {
        let m = CsrMatrix::from_coo(2, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0)]);
        assert!(check_stoquastic(&m, 1e-12).is_stoquastic());
    }

    #[test]
    fn mixed_radix_embedding_handles_qudit_site() {
        // one qubit (stride 3) and a 3-level clock (stride 1)
        let basis = Basis::UnaryClock { wires: 1, steps: 2 };
        let dims = site_dims(&basis);
        assert_eq!(dims, vec![2, 3]);
        let h = TermHamiltonian::new(
            basis,
            vec![LocalTerm {
                sites: vec![1],
                matrix: matrix_unit(3, 2, 2),
                tag: TermTag::ClockPenalty,
            }],
        );
        let m = assemble_sparse(&h).unwrap();
        // |2⟩⟨2| on the clock appears at global indices 2 and 5
        assert_eq!(m.get(2, 2), 1.0);
        assert_eq!(m.get(5, 5), 1.0);
        assert_eq!(m.nnz(), 2);
    }
}
