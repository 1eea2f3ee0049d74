use stoqaqc::circuit::parse_circuit;
use stoqaqc::hamiltonian::build_unary;
use stoqaqc::spectral::{lowest_eigenpairs, SolverOptions};

fn main() {
    let c = parse_circuit("work 1 1\nCNOT 1 0\n").unwrap();
    let ih = build_unary(&c, false).unwrap();
    let h = ih.terminal.sparse();
    let spec = lowest_eigenpairs(h, 2, &SolverOptions::default()).unwrap();
    for p in &spec.pairs {
        println!("value {:+.3e} residual {:.3e}", p.value, p.residual);
    }
    // nalgebra raw, with explicit epsilon
    let dense = h.to_dense();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(dense.clone(), f64::EPSILON, 0).unwrap();
    let mut idx: Vec<usize> = (0..h.dim).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let v = eig.eigenvectors.column(idx[0]);
    let hv = &dense * v;
    let resid = (hv - eig.eigenvalues[idx[0]] * v).norm();
    println!("tight-eps dense residual: {resid:.3e}");
}
