use stoqaqc::adiabatic::{evolve_from, EvolveOptions, Schedule};
use stoqaqc::circuit::parse_circuit;
use stoqaqc::hamiltonian::{build_unary, initial_ground_state};
use stoqaqc::spectral::history_state;
use std::time::Instant;

fn main() {
    let c = parse_circuit("work 1 0\nX 0\n").unwrap();
    let ih = build_unary(&c, false).unwrap();
    let start = initial_ground_state(&c, &ih);
    let target = history_state(&c, false).unwrap();
    for tf in [50.0, 100.0, 200.0, 400.0, 800.0] {
        let t0 = Instant::now();
        let r = evolve_from(&ih, &start, &Schedule::linear(tf), &EvolveOptions::default(), Some(&target)).unwrap();
        println!("tf={tf:6}: eps={:.3e} steps={} drift={:.1e} elapsed={:?}",
            r.eps.unwrap(), r.steps, r.norm_drift, t0.elapsed());
    }
}
