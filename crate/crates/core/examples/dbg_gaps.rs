use std::time::Instant;
use stoqaqc::circuit::{Circuit, Gate};
use stoqaqc::hamiltonian::build_unary;
use stoqaqc::spectral::{gap_scan, uniform_grid, SolverOptions};

fn main() {
    let t0 = Instant::now();
    for steps in 2..=10usize {
        let c = Circuit::new(1, 0, vec![Gate::Id; steps]).unwrap();
        let ih = build_unary(&c, false).unwrap();
        let scan = gap_scan(&ih, &uniform_grid(101), &SolverOptions::default()).unwrap();
        println!(
            "T={steps:2}: min gap {:.6} at s*={:.4}  gap*T^2 = {:.4}",
            scan.min_gap, scan.min_location, scan.min_gap * (steps * steps) as f64
        );
    }
    println!("elapsed {:?}", t0.elapsed());
}
