use std::time::Instant;
use stoqaqc::adiabatic::{evolve_from, EvolveOptions, Schedule};
use stoqaqc::corpus::{regression_corpus, ClockBackend};
use stoqaqc::hamiltonian::initial_ground_state;
use stoqaqc::spectral::{gap_scan, uniform_grid, SolverOptions};

fn main() {
    let t0 = Instant::now();
    for case in regression_corpus() {
        let circuit = case.effective_circuit();
        let ih = ClockBackend::Unary.build(&case).unwrap();
        let scan = gap_scan(&ih, &uniform_grid(21), &SolverOptions::default()).unwrap();
        let start = initial_ground_state(&circuit, &ih);
        let target = stoqaqc::spectral::history_state(&case.circuit, case.pad).unwrap();
        let base = (8.0 / (scan.min_gap * scan.min_gap)).min(400.0);
        let mut line = format!("{:<20} gap {:.4} tf0 {:>6.0}:", case.name, scan.min_gap, base);
        for mult in [1.0, 4.0, 16.0] {
            let tf = base * mult;
            let r = evolve_from(&ih, &start, &Schedule::linear(tf), &EvolveOptions::default(), Some(&target)).unwrap();
            line += &format!(" {:.2e}({})", r.eps.unwrap(), r.steps);
        }
        println!("{line}");
    }
    println!("elapsed {:?}", t0.elapsed());
}
