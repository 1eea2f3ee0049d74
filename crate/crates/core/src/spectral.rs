//! Exact ground states, low-lying spectra, and gap scans along the
//! interpolation path, plus the history-state construction that serves as the
//! eigensolver's independent oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{partial_history_with_cap, Circuit, DEFAULT_WIRE_CAP};
use crate::error::{Error, Result};
use crate::exec;
use crate::hamiltonian::{InterpolatedHamiltonian, HERMITICITY_TOL};
use crate::sparse::CsrMatrix;
use crate::state::{Basis, QuantumState};

/// Dense solver handles dimensions up to this; larger ones go through Lanczos.
/// Full symmetric eigendecomposition costs minutes beyond ~2k rows, so the
/// crossover sits well below the assembly dimension caps; both backends obey
/// the same residual contract and are cross-validated in the tests.
pub const DENSE_SOLVER_CAP: usize = 1024;

/// Eigenvalues closer than this are treated as degenerate when locating the
/// first distinct excited level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Acceptable residual ‖Hv − λv‖ for a reported eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub dense_cap: usize,
    pub max_iterations: usize,
    /// Ritz residual target used during iteration (tighter than the reported
    /// residual guarantee).
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { dense_cap: DENSE_SOLVER_CAP, max_iterations: 5000, tol: 1e-10, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct LowSpectrum {
    pub pairs: Vec<EigenPair>,
    pub solver: SolverKind,
    pub iterations: usize,
}

impl LowSpectrum {
    /// First eigenvalue separated from the ground value by more than the
    /// degeneracy tolerance.
    pub fn first_distinct(&self) -> Option<f64> {
        let e0 = self.pairs.first()?.value;
        self.pairs.iter().map(|p| p.value).find(|&e| e > e0 + DEGENERACY_TOL)
    }
}

/// Lowest `k` eigenpairs of a symmetric sparse matrix.
pub fn lowest_eigenpairs(h: &CsrMatrix, k: usize, opts: &SolverOptions) -> Result<LowSpectrum> {
    h.require_symmetric(HERMITICITY_TOL)?;
    if h.dim == 0 || k == 0 {
        return Ok(LowSpectrum { pairs: vec![], solver: SolverKind::Dense, iterations: 0 });
    }
    if h.dim <= opts.dense_cap {
        dense_lowest(h, k)
    } else {
        lanczos_lowest(h, k, opts)
    }
}

fn dense_lowest(h: &CsrMatrix, k: usize) -> Result<LowSpectrum> {
    let dense = h.to_dense();
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let pairs = order
        .into_iter()
        .take(k.min(h.dim))
        .map(|i| {
            let vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let value = eig.eigenvalues[i];
            let residual = residual_norm(h, &vector, value);
            EigenPair { value, vector, residual }
        })
        .collect();
    Ok(LowSpectrum { pairs, solver: SolverKind::Dense, iterations: 0 })
}

/// Lanczos with full reorthogonalization; converges the `k` lowest Ritz pairs.
fn lanczos_lowest(h: &CsrMatrix, k: usize, opts: &SolverOptions) -> Result<LowSpectrum> {
    let n = h.dim;
    let m_max = opts.max_iterations.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = vec![q.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let check_every = 10;
    let mut iterations = 0;
    loop {
        let j = alphas.len();
        iterations = j;
        let qj = &basis[j];
        let mut w = h.matvec(qj);
        let alpha = dot(qj, &w);
        alphas.push(alpha);
        axpy(&mut w, -alpha, qj);
        if j > 0 {
            let beta_prev = betas[j - 1];
            let qprev = &basis[j - 1];
            axpy(&mut w, -beta_prev, qprev);
        }
        // full reorthogonalization, one pass plus a conditional second
        for pass in 0..2 {
            let before = norm(&w);
            for qi in &basis {
                let overlap = dot(qi, &w);
                axpy(&mut w, -overlap, qi);
            }
            if pass == 0 && norm(&w) > 0.5 * before {
                break;
            }
        }
        let beta = norm(&w);

        let exhausted = beta < 1e-13 || j + 1 >= m_max;
        if (j + 1) % check_every == 0 || exhausted {
            let (values, vectors) = tridiagonal_eigen(&alphas, &betas);
            let converged = (0..k.min(values.len())).all(|i| {
                let est = if beta < 1e-13 { 0.0 } else { beta * vectors[(j, i)].abs() };
                est <= opts.tol
            });
            if converged || exhausted {
                let pairs = ritz_pairs(h, &basis, &values, &vectors, k);
                let worst = pairs.iter().map(|p| p.residual).fold(0.0f64, f64::max);
                if worst > RESIDUAL_TOL {
                    return Err(Error::NoConvergence { iterations: j + 1, residual: worst });
                }
                return Ok(LowSpectrum { pairs, solver: SolverKind::Lanczos, iterations: j + 1 });
            }
        }
        betas.push(beta);
        let mut qnext = w;
        scale(&mut qnext, 1.0 / beta);
        basis.push(qnext);
    }
}

fn ritz_pairs(
    h: &CsrMatrix,
    basis: &[Vec<f64>],
    values: &[f64],
    vectors: &DMatrix<f64>,
    k: usize,
) -> Vec<EigenPair> {
    let n = h.dim;
    let m = values.len();
    (0..k.min(m))
        .map(|i| {
            let mut v = vec![0.0; n];
            for (j, qj) in basis.iter().take(m).enumerate() {
                axpy(&mut v, vectors[(j, i)], qj);
            }
            normalize(&mut v);
            let value = values[i];
            let residual = residual_norm(h, &v, value);
            EigenPair { value, vector: v, residual }
        })
        .collect()
}

/// Eigendecomposition of the accumulated tridiagonal matrix, ascending.
fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i > 0 {
            t[(i, i - 1)] = betas[i - 1];
            t[(i - 1, i)] = betas[i - 1];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m, m);
    for (new_col, &old_col) in order.iter().enumerate() {
        vectors.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    (values, vectors)
}

fn residual_norm(h: &CsrMatrix, v: &[f64], value: f64) -> f64 {
    let hv = h.matvec(v);
    hv.iter().zip(v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        scale(a, 1.0 / n);
    }
}

fn scale(a: &mut [f64], s: f64) {
    for x in a.iter_mut() {
        *x *= s;
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Lowest eigenpair as a statevector in the given basis.
pub fn ground_state(h: &CsrMatrix, basis: &Basis) -> Result<(f64, QuantumState)> {
    ground_state_with(h, basis, &SolverOptions::default())
}

pub fn ground_state_with(
    h: &CsrMatrix,
    basis: &Basis,
    opts: &SolverOptions,
) -> Result<(f64, QuantumState)> {
    if h.dim != basis.dimension() {
        return Err(Error::Domain(format!(
            "matrix dimension {} does not match basis dimension {}",
            h.dim,
            basis.dimension()
        )));
    }
    let spectrum = lowest_eigenpairs(h, 1, opts)?;
    let pair = &spectrum.pairs[0];
    let amps = pair.vector.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok((pair.value, QuantumState { basis: *basis, amps }))
}

/// Build the history state directly from partial executions — independent of
/// any eigensolver, and the oracle those are checked against. With `pad` the
/// circuit is identity-extended first, so the superposition runs over 2T
/// uniformly weighted steps.
pub fn history_state(c: &Circuit, pad: bool) -> Result<QuantumState> {
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
    let clock_dim = steps + 1;
    let weight = 1.0 / (clock_dim as f64).sqrt();
    let mut work = circuit.input_state();
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dimension()];
    for t in 0..=steps {
        if t > 0 {
            crate::circuit::apply_gate(&mut work.amps, wires, &circuit.gates[t - 1]);
        }
        for (w, amp) in work.amps.iter().enumerate() {
            amps[w * clock_dim + t] = amp * weight;
        }
    }
    let _ = partial_history_with_cap(circuit, 0, DEFAULT_WIRE_CAP)?; // cap check
    Ok(QuantumState { basis, amps })
}

// --- gap scans -------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapScan {
    pub points: Vec<GapPoint>,
    pub min_gap: f64,
    /// Location s* of the smallest observed gap.
    pub min_location: f64,
    pub solver: SolverKind,
    pub all_converged: bool,
}

impl GapScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,E0,E1,gap\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.s, p.e0, p.e1, p.gap));
        }
        out
    }
}

/// Uniform grid of `n` points over [0, 1].
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Evaluate E0, E1 and the gap on a grid, then sharpen the minimum with three
/// rounds of golden-section refinement. Grid points evaluate concurrently.
pub fn gap_scan(ih: &InterpolatedHamiltonian, grid: &[f64], opts: &SolverOptions) -> Result<GapScan> {
    if grid.iter().any(|&s| !(0.0..=1.0).contains(&s)) {
        return Err(Error::Domain("gap scan grid must lie in [0, 1]".into()));
    }
    let solver =
        if ih.dimension() <= opts.dense_cap { SolverKind::Dense } else { SolverKind::Lanczos };
    let mut points = scan_points(ih, grid, opts);
    points.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());

    // golden-section refinement around the coarse minimum
    const GOLDEN: f64 = 0.381_966_011_250_105_2;
    for _ in 0..3 {
        let argmin = points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.gap.partial_cmp(&b.1.gap).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let lo = if argmin == 0 { points[0].s } else { points[argmin - 1].s };
        let hi = if argmin + 1 == points.len() { points[argmin].s } else { points[argmin + 1].s };
        if hi - lo < 1e-6 {
            break;
        }
        let probes = [lo + GOLDEN * (hi - lo), hi - GOLDEN * (hi - lo)];
        let fresh: Vec<f64> = probes
            .iter()
            .copied()
            .filter(|s| points.iter().all(|p| (p.s - s).abs() > 1e-12))
            .collect();
        points.extend(scan_points(ih, &fresh, opts));
        points.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    }

    let best = points.iter().min_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap()).unwrap();
    Ok(GapScan {
        min_gap: best.gap,
        min_location: best.s,
        solver,
        all_converged: points.iter().all(|p| p.converged),
        points,
    })
}

fn scan_points(ih: &InterpolatedHamiltonian, grid: &[f64], opts: &SolverOptions) -> Vec<GapPoint> {
    exec::map_indexed(grid.len(), |i| {
        let s = grid[i];
        let h = ih.at(s);
        match low_levels(&h, opts) {
            Ok((e0, e1, residual)) => {
                GapPoint { s, e0, e1, gap: e1 - e0, residual, converged: true }
            }
            Err(_) => GapPoint {
                s,
                e0: f64::NAN,
                e1: f64::NAN,
                gap: f64::INFINITY,
                residual: f64::INFINITY,
                converged: false,
            },
        }
    })
}

/// Ground energy and first distinct excited energy of a symmetric matrix.
pub fn low_levels(h: &CsrMatrix, opts: &SolverOptions) -> Result<(f64, f64, f64)> {
    // request a few extra pairs so near-degenerate ground clusters still
    // expose the first distinct level
    let k = 6.min(h.dim);
    let spectrum = lowest_eigenpairs(h, k, opts)?;
    let e0 = spectrum.pairs[0].value;
    let residual = spectrum.pairs.iter().map(|p| p.residual).fold(0.0f64, f64::max);
    let e1 = spectrum
        .first_distinct()
        .ok_or(Error::NoConvergence { iterations: spectrum.iterations, residual })?;
    Ok((e0, e1, residual))
}

/// Overlap-maximizing distance to a reference vector, used to phase-align
/// eigensolver output with the history-state oracle.
pub fn aligned_distance(a: &QuantumState, b: &QuantumState) -> f64 {
    a.l2_distance_phase_aligned(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::hamiltonian::{build_unary, initial_ground_state};

    #[test]
    fn diagonal_lowest_pairs() {
        let h = CsrMatrix::from_coo(3, vec![(0, 0, 3.0), (1, 1, 1.0), (2, 2, 2.0)]);
        let spec = lowest_eigenpairs(&h, 2, &SolverOptions::default()).unwrap();
        assert!((spec.pairs[0].value - 1.0).abs() < 1e-12);
        assert!((spec.pairs[1].value - 2.0).abs() < 1e-12);
        assert!((spec.pairs[0].vector[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_circuit_terminal_spectrum() {
        // Oracle: dense 4×4 diagonalization.
        let c = parse_circuit("work 1 0\nX 0\n").unwrap();
        let ih = build_unary(&c, false).unwrap();
        let spec = lowest_eigenpairs(ih.terminal.sparse(), 4, &SolverOptions::default()).unwrap();
        let values: Vec<f64> = spec.pairs.iter().map(|p| p.value).collect();
        let expected = [0.0, 1.0 - 0.5f64.sqrt(), 1.0, 1.0 + 0.5f64.sqrt()];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-10, "got {values:?}");
        }
        // ground state (|0,0⟩ + |1,1⟩)/√2
        let g = &spec.pairs[0].vector;
        let r = 0.5f64.sqrt();
        assert!((g[0].abs() - r).abs() < 1e-10);
        assert!((g[3].abs() - r).abs() < 1e-10);
    }

    #[test]
    fn initial_hamiltonian_ground_state_is_product() {
        let c = parse_circuit("work 1 1\nCNOT 1 0\nID\n").unwrap();
        let ih = build_unary(&c, false).unwrap();
        let (energy, state) = ground_state(ih.initial.sparse(), &ih.basis()).unwrap();
        assert!(energy.abs() < 1e-10);
        let expected = initial_ground_state(&c, &ih);
        assert!(aligned_distance(&state, &expected) < 1e-8);
    }

    #[test]
    fn history_state_of_double_flip() {
        // (|0⟩|0⟩_c + |1⟩|1⟩_c + |0⟩|2⟩_c)/√3
        let c = parse_circuit("work 1 0\nX 0\nX 0\n").unwrap();
        let psi = history_state(&c, false).unwrap();
        let r = (1f64 / 3.0).sqrt();
        assert!((psi.amps[0].re - r).abs() < 1e-12); // |0⟩|0⟩
        assert!((psi.amps[2].re - r).abs() < 1e-12); // |0⟩|2⟩
        assert!((psi.amps[4].re - r).abs() < 1e-12); // |1⟩|1⟩
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn terminal_annihilates_history_state() {
        for text in ["work 1 0\nX 0\n", "work 1 1\nCNOT 1 0\nX 0\n", "work 2 1\nCCX 0 1 2\nID\n"] {
            let c = parse_circuit(text).unwrap();
            let ih = build_unary(&c, false).unwrap();
            let psi = history_state(&c, false).unwrap();
            let e = ih.terminal.expectation(&psi.amps);
            assert!(e.abs() < 1e-10, "⟨Ψ|H|Ψ⟩ = {e} for {text:?}");
        }
    }

    #[test]
    fn padded_history_state_splits_clock_weight_evenly() {
        let c = parse_circuit("work 1 0\nX 0\n").unwrap();
        let psi = history_state(&c, true).unwrap();
        let accept = Circuit::accept_window(c.len(), true);
        let p: f64 = accept.iter().map(|&t| psi.clock_probability(t)).sum();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gap_endpoints_for_x_circuit() {
        let c = parse_circuit("work 1 0\nX 0\n").unwrap();
        let ih = build_unary(&c, false).unwrap();
        let opts = SolverOptions::default();
        let (e0, e1, _) = low_levels(&ih.at(1.0), &opts).unwrap();
        assert!(e0.abs() < 1e-10);
        assert!((e1 - (1.0 - 0.5f64.sqrt())).abs() < 1e-10);
        let (f0, f1, _) = low_levels(&ih.at(0.0), &opts).unwrap();
        assert!(f0.abs() < 1e-10);
        assert!((f1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gap_scan_reports_interior_minimum() {
        let c = parse_circuit("work 1 1\nCNOT 1 0\n").unwrap();
        let ih = build_unary(&c, false).unwrap();
        let scan = gap_scan(&ih, &uniform_grid(21), &SolverOptions::default()).unwrap();
        assert!(scan.all_converged);
        assert!(scan.min_gap > 0.0);
        assert!(scan.points.len() > 21, "refinement should add points");
        assert!((0.0..=1.0).contains(&scan.min_location));
        for p in &scan.points {
            assert!(p.gap >= 0.0);
            assert!(p.residual <= RESIDUAL_TOL);
        }
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        // Degenerate clusters (illegal-clock sectors) mean the two backends
        // may enumerate repeated eigenvalues differently; the distinct energy
        // levels must agree.
        let c = parse_circuit("work 1 1\nCNOT 1 0\nX 0\nID\nCNOT 0 1\n").unwrap();
        let ih = crate::hamiltonian::build_domain_wall(&c).unwrap();
        let h = ih.at(0.7);
        let dense_opts = SolverOptions::default();
        let force_lanczos = SolverOptions { dense_cap: 4, ..Default::default() };
        let (d0, d1, _) = low_levels(&h, &dense_opts).unwrap();
        let (l0, l1, _) = low_levels(&h, &force_lanczos).unwrap();
        assert!((d0 - l0).abs() < 1e-7, "E0: dense {d0} vs lanczos {l0}");
        assert!((d1 - l1).abs() < 1e-7, "E1: dense {d1} vs lanczos {l1}");
        let lanc = lowest_eigenpairs(&h, 1, &force_lanczos).unwrap();
        assert_eq!(lanc.solver, SolverKind::Lanczos);
    }

    #[test]
    fn ground_state_matches_history_state() {
        let c = parse_circuit("work 1 1\nCNOT 1 0\nX 0\n").unwrap();
        let ih = build_unary(&c, false).unwrap();
        let (energy, state) = ground_state(ih.terminal.sparse(), &ih.basis()).unwrap();
        let oracle = history_state(&c, false).unwrap();
        assert!(energy.abs() < 1e-10);
        assert!(aligned_distance(&state, &oracle) < 1e-8);
    }
}
