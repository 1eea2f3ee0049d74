use std::time::Instant;
use stoqaqc::corpus::{corpus_table, run_corpus};

fn main() {
    let t0 = Instant::now();
    let reports = run_corpus();
    println!("{}", corpus_table(&reports));
    println!("total: {:?}, all pass: {}", t0.elapsed(), reports.iter().all(|r| r.pass));
}
