use stoqaqc::adiabatic::{evolve_from, EvolveOptions, Schedule};
use stoqaqc::corpus::{regression_corpus, ClockBackend};
use stoqaqc::hamiltonian::initial_ground_state;
use stoqaqc::spectral::{gap_scan, uniform_grid, SolverOptions};
use std::time::Instant;

fn main() {
    for name in ["flip", "double-flip", "id-chain", "deep-flips", "wide-six"] {
        let case = regression_corpus().into_iter().find(|c| c.name == name).unwrap();
        let circuit = case.effective_circuit();
        let ih = ClockBackend::Unary.build(&case).unwrap();
        let scan = gap_scan(&ih, &uniform_grid(21), &SolverOptions::default()).unwrap();
        let start = initial_ground_state(&circuit, &ih);
        let target = stoqaqc::spectral::history_state(&case.circuit, case.pad).unwrap();
        let base = 4.0 / scan.min_gap;
        let t0 = Instant::now();
        let mut line = format!("{:<12} gap {:.4} tf0 {:>5.0} |", case.name, scan.min_gap, base);
        for mult in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let tf = base * mult;
            let r = evolve_from(&ih, &start, &Schedule::smooth(tf), &EvolveOptions::default(), Some(&target)).unwrap();
            line += &format!(" {:.2e}", r.eps.unwrap());
        }
        println!("{line}  ({:?})", t0.elapsed());
    }
}
