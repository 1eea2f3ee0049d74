//! The regression corpus: twenty circuits spanning every gate kind, both
//! preparation patterns, identity padding, permutation gates, the union-jack
//! construction, and an order-finding stage, sized so the domain-wall
//! lowering stays within iterative-solver reach (largest case 2^14).
//!
//! The runner checks, per case and clock backend: stoquasticity of H(s) on a
//! 21-point grid, the eigensolver ground state against the history-state
//! oracle, and the padded clock-window weight. Cases run concurrently.

use serde::{Deserialize, Serialize};

use crate::circuit::{parse_circuit, Circuit};
use crate::error::Result;
use crate::exec;
use crate::hamiltonian::{build_domain_wall, build_unary, check_stoquastic, InterpolatedHamiltonian};
use crate::shor::{modexp_gate, shor_as_circuit, OrderFindingInstance};
use crate::spectral::{history_state, low_levels, SolverOptions};
use crate::state::QuantumState;
use crate::unionjack::{build_union_jack, single_triangle, InitPattern};

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub name: &'static str,
    pub circuit: Circuit,
    pub pad: bool,
}

impl CorpusCase {
    /// The circuit actually lowered (identity-padded when `pad` is set).
    pub fn effective_circuit(&self) -> Circuit {
        if self.pad {
            self.circuit.padded()
        } else {
            self.circuit.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockBackend {
    Unary,
    DomainWall,
}

impl ClockBackend {
    pub fn build(&self, case: &CorpusCase) -> Result<InterpolatedHamiltonian> {
        match self {
            ClockBackend::Unary => build_unary(&case.circuit, case.pad),
            ClockBackend::DomainWall => build_domain_wall(&case.effective_circuit()),
        }
    }
}

fn qc(text: &str) -> Circuit {
    parse_circuit(text).expect("corpus circuit parses")
}

/// Twenty named circuits with their padding flags.
pub fn regression_corpus() -> Vec<CorpusCase> {
    let perm_modmul = {
        let gate = modexp_gate(5, 2, 0).expect("multiply-by-2 mod 5");
        Circuit::new(3, 0, vec![crate::circuit::Gate::X { target: 2 }, gate]).unwrap()
    };
    let shor_stage = shor_as_circuit(
        &OrderFindingInstance::new(15, 7, 1, 1).expect("valid instance"),
        0,
    )
    .expect("stage circuit");
    let (_, uj_triangle) = single_triangle(InitPattern::AllPlus);
    let (_, uj_square) = build_union_jack(1, 1, InitPattern::Default).expect("1x1 lattice");

    vec![
        CorpusCase { name: "flip", circuit: qc("work 1 0\nX 0\n"), pad: false },
        CorpusCase { name: "flip-padded", circuit: qc("work 1 0\nX 0\n"), pad: true },
        CorpusCase { name: "double-flip", circuit: qc("work 1 0\nX 0\nX 0\n"), pad: false },
        CorpusCase { name: "plus-id", circuit: qc("work 0 1\nID\n"), pad: false },
        CorpusCase { name: "bell", circuit: qc("work 1 1\nCNOT 1 0\n"), pad: false },
        CorpusCase { name: "bell-padded", circuit: qc("work 1 1\nCNOT 1 0\n"), pad: true },
        CorpusCase { name: "bell-then-flip", circuit: qc("work 1 1\nCNOT 1 0\nX 0\n"), pad: false },
        CorpusCase { name: "ghz3", circuit: qc("work 2 1\nCNOT 2 0\nCNOT 2 1\n"), pad: false },
        CorpusCase { name: "toffoli", circuit: qc("work 2 1\nCCX 0 1 2\n"), pad: false },
        CorpusCase {
            name: "toffoli-entangling",
            circuit: qc("work 1 2\nCCX 1 2 0\n"),
            pad: true,
        },
        CorpusCase {
            name: "perm-cycle",
            circuit: qc("work 2 0\nX 1\nPERM 2 0 1 0 2 3 1\n"),
            pad: false,
        },
        CorpusCase { name: "perm-modmul", circuit: perm_modmul, pad: false },
        CorpusCase {
            name: "swap-chain",
            circuit: qc("work 1 1\nCNOT 0 1\nCNOT 1 0\nCNOT 0 1\n"),
            pad: false,
        },
        CorpusCase { name: "id-chain", circuit: qc("work 1 0\nID\nID\nID\nID\n"), pad: false },
        CorpusCase {
            name: "ghz4",
            circuit: qc("work 3 1\nCNOT 3 0\nCNOT 3 1\nCNOT 3 2\n"),
            pad: false,
        },
        CorpusCase { name: "uj-triangle-allplus", circuit: uj_triangle, pad: false },
        CorpusCase { name: "uj-square", circuit: uj_square, pad: false },
        CorpusCase { name: "shor-stage", circuit: shor_stage, pad: false },
        CorpusCase {
            name: "deep-flips",
            circuit: qc("work 1 1\nX 0\nID\nCNOT 1 0\nID\nX 0\nID\nCNOT 1 0\nID\n"),
            pad: false,
        },
        CorpusCase {
            name: "wide-six",
            circuit: qc(
                "work 3 3\nCNOT 3 0\nCNOT 4 1\nCNOT 5 2\nID\nID\nID\nID\nID\n",
            ),
            pad: false,
        },
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub backend: ClockBackend,
    pub dimension: usize,
    pub stoquastic_ok: bool,
    pub stoquastic_violations: usize,
    pub ground_energy: f64,
    pub distance_to_history: f64,
    pub first_excited: f64,
    /// Exact clock weight on the accepting window (padded cases only).
    pub accept_weight: Option<f64>,
    pub runtime_ms: u128,
    pub pass: bool,
}

pub const STOQUASTIC_TOL: f64 = 1e-12;
pub const GROUND_DISTANCE_TOL: f64 = 1e-8;
pub const GROUND_ENERGY_TOL: f64 = 1e-10;

/// History-state oracle in the backend's own basis.
pub fn oracle_state(case: &CorpusCase, backend: ClockBackend) -> Result<QuantumState> {
    let unary = history_state(&case.circuit, case.pad)?;
    match backend {
        ClockBackend::Unary => Ok(unary),
        ClockBackend::DomainWall => unary.embed_domain_wall(),
    }
}

pub fn run_case(case: &CorpusCase, backend: ClockBackend) -> Result<CaseReport> {
    let start = std::time::Instant::now();
    let ih = backend.build(case)?;
    let mut violations = 0usize;
    for i in 0..=20 {
        let s = i as f64 / 20.0;
        violations += check_stoquastic(&ih.at(s), STOQUASTIC_TOL).violations.len();
    }
    let opts = SolverOptions::default();
    let (e0, e1, _residual) = low_levels(ih.terminal.sparse(), &opts)?;
    let spectrum = crate::spectral::lowest_eigenpairs(ih.terminal.sparse(), 1, &opts)?;
    let amps = spectrum.pairs[0]
        .vector
        .iter()
        .map(|&x| num_complex::Complex64::new(x, 0.0))
        .collect();
    let ground = QuantumState { basis: ih.basis(), amps };
    let oracle = oracle_state(case, backend)?;
    let distance = ground.l2_distance_phase_aligned(&oracle);
    let accept_weight = case.pad.then(|| {
        let accept = Circuit::accept_window(case.circuit.len(), true);
        accept.iter().map(|&t| oracle.clock_probability(t)).sum()
    });
    let pass = violations == 0
        && e0.abs() <= GROUND_ENERGY_TOL
        && e1 > 0.0
        && distance <= GROUND_DISTANCE_TOL
        && accept_weight.map(|w: f64| (w - 0.5).abs() <= 1e-10).unwrap_or(true);
    Ok(CaseReport {
        name: case.name.to_string(),
        backend,
        dimension: ih.dimension(),
        stoquastic_ok: violations == 0,
        stoquastic_violations: violations,
        ground_energy: e0,
        distance_to_history: distance,
        first_excited: e1,
        accept_weight,
        runtime_ms: start.elapsed().as_millis(),
        pass,
    })
}

/// Run every corpus case on both clock backends, concurrently.
pub fn run_corpus() -> Vec<CaseReport> {
    let cases = regression_corpus();
    let jobs: Vec<(usize, ClockBackend)> = (0..cases.len())
        .flat_map(|i| [(i, ClockBackend::Unary), (i, ClockBackend::DomainWall)])
        .collect();
    exec::map_indexed(jobs.len(), |j| {
        let (idx, backend) = jobs[j];
        run_case(&cases[idx], backend).unwrap_or_else(|_| CaseReport {
            name: cases[idx].name.to_string(),
            backend,
            dimension: 0,
            stoquastic_ok: false,
            stoquastic_violations: usize::MAX,
            ground_energy: f64::NAN,
            distance_to_history: f64::NAN,
            first_excited: f64::NAN,
            accept_weight: None,
            runtime_ms: 0,
            pass: false,
        })
    })
}

/// Fixed-width pass/fail table.
pub fn corpus_table(reports: &[CaseReport]) -> String {
    let mut out = String::from(
        "case                  backend      dim     E0          dist->oracle  gap        pass\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{:<21} {:<12} {:<7} {:<11.2e} {:<13.2e} {:<10.3e} {}\n",
            r.name,
            match r.backend {
                ClockBackend::Unary => "unary",
                ClockBackend::DomainWall => "domain-wall",
            },
            r.dimension,
            r.ground_energy,
            r.distance_to_history,
            r.first_excited,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_has_twenty_cases_within_size_bounds() {
        let cases = regression_corpus();
        assert_eq!(cases.len(), 20);
        for case in &cases {
            let c = case.effective_circuit();
            assert!(c.num_wires() <= 6, "{} too wide", case.name);
            assert!(c.len() <= 8, "{} too deep: {}", case.name, c.len());
            // domain-wall lowering must stay within iterative-solver reach
            assert!(c.num_wires() + c.len() <= 14, "{} too big", case.name);
        }
        // names unique
        let mut names: Vec<_> = cases.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 20);
    }

    #[test]
    fn single_case_reports_pass() {
        let cases = regression_corpus();
        let bell = cases.iter().find(|c| c.name == "bell").unwrap();
        let report = run_case(bell, ClockBackend::Unary).unwrap();
        assert!(report.pass, "{report:?}");
        let report = run_case(bell, ClockBackend::DomainWall).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn padded_case_reports_half_weight() {
        let cases = regression_corpus();
        let padded = cases.iter().find(|c| c.name == "flip-padded").unwrap();
        let report = run_case(padded, ClockBackend::Unary).unwrap();
        let w = report.accept_weight.unwrap();
        assert!((w - 0.5).abs() < 1e-12, "weight {w}");
    }
}
