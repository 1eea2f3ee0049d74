use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use stoqaqc::adiabatic::{evolve_from, trace_to_csv, EvolveOptions, Schedule};
use stoqaqc::circuit::{parse_circuit, serialize_circuit, Circuit};
use stoqaqc::corpus::{corpus_table, run_corpus};
use stoqaqc::error::Error;
use stoqaqc::hamiltonian::{
    check_stoquastic as scan_stoquastic, initial_ground_state, HamiltonianJson,
    InterpolatedHamiltonian,
};
use stoqaqc::measurement::{
    exact_distribution, records_to_csv, sample as sample_shots, sample_adaptive, ClockHandling,
    MeasBasis, MeasurementPlan, PlanPolicy,
};
use stoqaqc::shor::{factor as run_factor, order_finding_run, FactorConfig, OrderFindingInstance};
use stoqaqc::spectral::{
    gap_scan, history_state, low_levels, uniform_grid, GapScan, SolverOptions,
};
use stoqaqc::state::StateJson;
use stoqaqc::verification::{certify, energy_estimate};

use crate::output::{resolve_out, write_json, write_text};

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    Unary,
    DomainWall,
}

#[derive(Args)]
pub struct LoweringArgs {
    /// Circuit file to lower.
    #[arg(long)]
    circuit: PathBuf,
    /// Clock register representation.
    #[arg(long, value_enum, default_value = "unary")]
    clock: ClockArg,
    /// Identity-pad so the accepting clock window has weight 1/2.
    #[arg(long)]
    pad: bool,
}

struct Lowered {
    circuit: Circuit,
    ih: InterpolatedHamiltonian,
    accept: Vec<usize>,
}

impl LoweringArgs {
    fn load(&self) -> Result<Lowered, Box<dyn std::error::Error>> {
        let text = std::fs::read_to_string(&self.circuit)?;
        let circuit = parse_circuit(&text)?;
        let ih = match self.clock {
            ClockArg::Unary => stoqaqc::hamiltonian::build_unary(&circuit, self.pad)?,
            ClockArg::DomainWall => {
                let effective =
                    if self.pad { circuit.padded() } else { circuit.clone() };
                stoqaqc::hamiltonian::build_domain_wall(&effective)?
            }
        };
        let accept = Circuit::accept_window(circuit.len(), self.pad);
        Ok(Lowered { circuit, ih, accept })
    }
}

// --- build ------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamPart {
    Initial,
    Final,
}

#[derive(Args)]
pub struct BuildArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    /// Which endpoint to export.
    #[arg(long, value_enum, default_value = "final")]
    part: HamPart,
    /// Output JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the assembled H(s) in coordinate text form.
    #[arg(long)]
    coo: Option<PathBuf>,
    /// Interpolation parameter for the coordinate export.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
}

pub fn build(args: BuildArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let part = match args.part {
        HamPart::Initial => &lowered.ih.initial,
        HamPart::Final => &lowered.ih.terminal,
    };
    let out = resolve_out(args.out, "hamiltonian.json");
    write_json(&out, &HamiltonianJson::from(part))?;
    println!("wrote {} ({} terms, dimension {})", out.display(), part.terms.len(), part.dimension());
    if let Some(coo) = args.coo {
        if !(0.0..=1.0).contains(&args.s) {
            return Err(Box::new(Error::Domain(format!("s = {} outside [0,1]", args.s))));
        }
        write_text(&coo, &lowered.ih.at(args.s).to_coo_text())?;
        println!("wrote {} (s = {})", coo.display(), args.s);
    }
    Ok(0)
}

// --- check-stoquastic ---------------------------------------------------------

#[derive(Args)]
pub struct CheckArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    /// Number of interpolation grid points.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckReport {
    schema_version: u32,
    tol: f64,
    grid_points: usize,
    stoquastic: bool,
    total_violations: usize,
    per_point: Vec<CheckPoint>,
}

#[derive(Serialize)]
struct CheckPoint {
    s: f64,
    violations: usize,
}

pub fn check_stoquastic(args: CheckArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let grid = uniform_grid(args.grid.max(2));
    let per_point: Vec<CheckPoint> = grid
        .iter()
        .map(|&s| CheckPoint {
            s,
            violations: scan_stoquastic(&lowered.ih.at(s), args.tol).violations.len(),
        })
        .collect();
    let total: usize = per_point.iter().map(|p| p.violations).sum();
    let report = CheckReport {
        schema_version: 1,
        tol: args.tol,
        grid_points: grid.len(),
        stoquastic: total == 0,
        total_violations: total,
        per_point,
    };
    let out = resolve_out(args.out, "stoquastic.json");
    write_json(&out, &report)?;
    println!(
        "{}: {} violations over {} grid points (tol {:e})",
        if total == 0 { "stoquastic" } else { "NOT stoquastic" },
        total,
        grid.len(),
        args.tol
    );
    Ok(0)
}

// --- gap ---------------------------------------------------------------------

#[derive(Args)]
pub struct GapArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// CSV output path (`s,E0,E1,gap`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON export with solver metadata.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Serialize)]
struct GapJson {
    schema_version: u32,
    grid_points: usize,
    #[serde(flatten)]
    scan: GapScan,
}

pub fn gap(args: GapArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let grid = uniform_grid(args.grid.max(2));
    let scan = gap_scan(&lowered.ih, &grid, &SolverOptions::default())?;
    let out = resolve_out(args.out, "gap.csv");
    write_text(&out, &scan.to_csv())?;
    println!(
        "min gap {:.6e} at s* = {:.6} ({} points, converged: {})",
        scan.min_gap, scan.min_location, scan.points.len(), scan.all_converged
    );
    if let Some(json) = args.json {
        write_json(&json, &GapJson { schema_version: 1, grid_points: grid.len(), scan })?;
    }
    Ok(0)
}

// --- evolve --------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Linear,
    GapAdaptive,
}

#[derive(Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    /// Total sweep time.
    #[arg(long)]
    tf: f64,
    #[arg(long, value_enum, default_value = "linear")]
    schedule: ScheduleArg,
    /// Local integrator error per unit time.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Optional trace CSV (`t,s,overlap_ground,norm`).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional final-state JSON export.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvolveReport {
    schema_version: u32,
    tf: f64,
    schedule: &'static str,
    tol: f64,
    eps: f64,
    overlap: f64,
    steps: usize,
    norm_drift: f64,
}

pub fn evolve(args: EvolveArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    if args.lowering.clock == ClockArg::DomainWall {
        return Err(Box::new(Error::Domain(
            "evolve drives the unary backend; lower with --clock unary".into(),
        )));
    }
    let schedule = match args.schedule {
        ScheduleArg::Linear => Schedule::linear(args.tf),
        ScheduleArg::GapAdaptive => {
            let scan = gap_scan(&lowered.ih, &uniform_grid(21), &SolverOptions::default())?;
            Schedule::gap_adaptive(args.tf, &scan)
        }
    };
    let start = initial_ground_state(&lowered.circuit, &lowered.ih);
    let target = history_state(&lowered.circuit, args.lowering.pad)?;
    let opts =
        EvolveOptions { tol: args.tol, trace: args.trace.is_some(), ..Default::default() };
    let result = evolve_from(&lowered.ih, &start, &schedule, &opts, Some(&target))?;
    if let Some(trace) = args.trace {
        write_text(&trace, &trace_to_csv(&result.trace))?;
    }
    let report = EvolveReport {
        schema_version: 1,
        tf: args.tf,
        schedule: match args.schedule {
            ScheduleArg::Linear => "linear",
            ScheduleArg::GapAdaptive => "gap-adaptive",
        },
        tol: args.tol,
        eps: result.eps.unwrap_or(f64::NAN),
        overlap: result.overlap.unwrap_or(f64::NAN),
        steps: result.steps,
        norm_drift: result.norm_drift,
    };
    let out = resolve_out(args.out, "evolve.json");
    write_json(&out, &report)?;
    println!(
        "eps = {:.6e} after t_f = {} ({} steps, norm drift {:.1e})",
        report.eps, args.tf, report.steps, report.norm_drift
    );
    if let Some(state_out) = args.state_out {
        write_json(&state_out, &StateJson::from(&result.state))?;
    }
    Ok(0)
}

// --- sample ----------------------------------------------------------------------

fn parse_bases(spec: &str, wires: usize) -> Result<Vec<Option<MeasBasis>>, Error> {
    let bases: Vec<Option<MeasBasis>> = spec
        .chars()
        .map(|c| match c {
            'X' | 'x' => Ok(Some(MeasBasis::X)),
            'Y' | 'y' => Ok(Some(MeasBasis::Y)),
            'Z' | 'z' => Ok(Some(MeasBasis::Z)),
            '-' | '.' => Ok(None),
            other => Err(Error::Domain(format!("unknown basis letter `{other}`"))),
        })
        .collect::<Result<_, _>>()?;
    if bases.len() != wires {
        return Err(Error::Domain(format!(
            "basis string covers {} wires, circuit has {wires}",
            bases.len()
        )));
    }
    Ok(bases)
}

#[derive(Args)]
pub struct SampleArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    /// One letter per work wire: X, Y, Z, or `-` to skip.
    #[arg(long)]
    bases: String,
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV record stream (`shot,clock_accept,outcome_bits`).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct SampleReport {
    schema_version: u32,
    seed: u64,
    shots: u64,
    plan: MeasurementPlan,
    p_clock: f64,
    exact_probs: Vec<f64>,
    accepted_shots: u64,
    records: Vec<stoqaqc::measurement::MeasurementRecord>,
}

pub fn sample(args: SampleArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let state = {
        let unary = history_state(&lowered.circuit, args.lowering.pad)?;
        match args.lowering.clock {
            ClockArg::Unary => unary,
            ClockArg::DomainWall => unary.embed_domain_wall()?,
        }
    };
    let plan = MeasurementPlan {
        bases: parse_bases(&args.bases, lowered.circuit.num_wires())?,
        accept: lowered.accept.clone(),
        shots: args.shots,
        seed: args.seed,
    };
    let dist = exact_distribution(&state, &plan)?;
    let records = sample_shots(&state, &plan)?;
    if let Some(csv) = &args.csv {
        write_text(csv, &records_to_csv(&records))?;
    }
    let accepted = records.iter().filter(|r| r.clock_accept).count() as u64;
    println!(
        "p_clock = {:.6}, accepted {accepted}/{} shots",
        dist.p_clock, args.shots
    );
    let report = SampleReport {
        schema_version: 1,
        seed: args.seed,
        shots: args.shots,
        plan,
        p_clock: dist.p_clock,
        exact_probs: dist.probs,
        accepted_shots: accepted,
        records,
    };
    let out = resolve_out(args.out, "sample.json");
    write_json(&out, &report)?;
    Ok(0)
}

// --- adaptive-sample ---------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockModeArg {
    Project,
    Reject,
}

#[derive(Args)]
pub struct AdaptiveArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    /// One letter per work wire: X, Y, Z, or `-` to skip; measured
    /// sequentially with collapse.
    #[arg(long)]
    bases: String,
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "project")]
    mode: ClockModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct AdaptiveReport {
    schema_version: u32,
    seed: u64,
    shots: u64,
    mode: &'static str,
    records: Vec<stoqaqc::measurement::AdaptiveRecord>,
}

pub fn adaptive_sample(args: AdaptiveArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let state = {
        let unary = history_state(&lowered.circuit, args.lowering.pad)?;
        match args.lowering.clock {
            ClockArg::Unary => unary,
            ClockArg::DomainWall => unary.embed_domain_wall()?,
        }
    };
    let plan = MeasurementPlan {
        bases: parse_bases(&args.bases, lowered.circuit.num_wires())?,
        accept: lowered.accept.clone(),
        shots: args.shots,
        seed: args.seed,
    };
    let mut policy = PlanPolicy::new(&plan);
    let mode = match args.mode {
        ClockModeArg::Project => ClockHandling::Project,
        ClockModeArg::Reject => ClockHandling::Reject,
    };
    let records =
        sample_adaptive(&state, &mut policy, &plan.accept, args.shots, args.seed, mode)?;
    println!("{} shots, {} accepted", args.shots, records.iter().filter(|r| r.clock_accept).count());
    let report = AdaptiveReport {
        schema_version: 1,
        seed: args.seed,
        shots: args.shots,
        mode: match args.mode {
            ClockModeArg::Project => "project",
            ClockModeArg::Reject => "reject",
        },
        records,
    };
    let out = resolve_out(args.out, "adaptive-sample.json");
    write_json(&out, &report)?;
    Ok(0)
}

// --- factor -----------------------------------------------------------------------

#[derive(Args)]
pub struct FactorArgs {
    /// Odd composite to factor.
    #[arg(long, value_name = "N")]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions per basis per stage.
    #[arg(long, short = 'r', default_value_t = 30)]
    reps: usize,
    /// Phase bits; defaults to 2⌈log₂N⌉+1.
    #[arg(long)]
    phase_bits: Option<usize>,
    #[arg(long, default_value_t = 25)]
    retries: usize,
    /// Run order finding for this fixed base instead of the factoring loop.
    #[arg(long, short = 'x')]
    base: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FactorReport {
    schema_version: u32,
    seed: u64,
    #[serde(flatten)]
    outcome: stoqaqc::shor::FactorOutcome,
}

#[derive(Serialize)]
struct OrderReport {
    schema_version: u32,
    seed: u64,
    #[serde(flatten)]
    transcript: stoqaqc::shor::PhaseTranscript,
}

pub fn factor(args: FactorArgs) -> CmdResult {
    let out = resolve_out(args.out, "factor.json");
    if let Some(base) = args.base {
        let phase_bits =
            args.phase_bits.unwrap_or_else(|| OrderFindingInstance::default_phase_bits(args.n));
        let inst = OrderFindingInstance::new(args.n, base, phase_bits, args.reps)?;
        let transcript = order_finding_run(&inst, args.seed)?;
        println!(
            "base {base}: recovered order {:?} (bits {:?})",
            transcript.recovered_order, transcript.bits
        );
        write_json(&out, &OrderReport { schema_version: 1, seed: args.seed, transcript })?;
        return Ok(0);
    }
    let config =
        FactorConfig { reps: args.reps, phase_bits: args.phase_bits, retries: args.retries };
    let outcome = run_factor(args.n, args.seed, &config)?;
    println!(
        "{} = {} x {} (base {}, attempt {}{})",
        args.n,
        outcome.factor,
        args.n / outcome.factor,
        outcome.base,
        outcome.attempts,
        if outcome.via_gcd { ", gcd shortcut" } else { "" }
    );
    write_json(&out, &FactorReport { schema_version: 1, seed: args.seed, outcome })?;
    Ok(0)
}

// --- verify -----------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyState {
    /// The exact history state.
    Exact,
    /// The state after an adiabatic sweep of length --tf.
    Evolved,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    lowering: LoweringArgs,
    #[arg(long, value_enum, default_value = "exact")]
    state: VerifyState,
    /// Sweep time for --state evolved.
    #[arg(long, default_value_t = 100.0)]
    tf: f64,
    #[arg(long, default_value_t = 0.05)]
    eps_ver: f64,
    /// Measurement shots; omit for the exact estimator.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: u32,
    seed: u64,
    state: &'static str,
    #[serde(flatten)]
    report: stoqaqc::verification::VerificationReport,
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let lowered = args.lowering.load()?;
    let oracle = {
        let unary = history_state(&lowered.circuit, args.lowering.pad)?;
        match args.lowering.clock {
            ClockArg::Unary => unary,
            ClockArg::DomainWall => unary.embed_domain_wall()?,
        }
    };
    let state = match args.state {
        VerifyState::Exact => oracle.clone(),
        VerifyState::Evolved => {
            if args.lowering.clock == ClockArg::DomainWall {
                return Err(Box::new(Error::Domain(
                    "evolved verification drives the unary backend".into(),
                )));
            }
            let start = initial_ground_state(&lowered.circuit, &lowered.ih);
            evolve_from(
                &lowered.ih,
                &start,
                &Schedule::linear(args.tf),
                &EvolveOptions::default(),
                Some(&oracle),
            )?
            .state
        }
    };
    let (_, gap, _) = low_levels(lowered.ih.terminal.sparse(), &SolverOptions::default())?;
    let estimate = energy_estimate(&state, &lowered.ih.terminal, args.shots, args.seed)?;
    let report = certify(&estimate, gap, args.eps_ver)?;
    println!(
        "E_exp = {:.6e} ± {:.1e}, gap = {:.6e}, threshold {:.6e}: {}",
        report.energy,
        report.half_width,
        report.gap,
        args.eps_ver * report.gap,
        if report.pass { "PASS" } else { "FAIL" }
    );
    let out = resolve_out(args.out, "verify.json");
    write_json(
        &out,
        &VerifyReport {
            schema_version: 1,
            seed: args.seed,
            state: match args.state {
                VerifyState::Exact => "exact",
                VerifyState::Evolved => "evolved",
            },
            report,
        },
    )?;
    Ok(0)
}

// --- unionjack ----------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Default,
    AllPlus,
}

#[derive(Args)]
pub struct UnionJackArgs {
    #[arg(long, default_value_t = 1)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    cols: usize,
    #[arg(long, value_enum, default_value = "default")]
    pattern: PatternArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the equivalent circuit file.
    #[arg(long)]
    circuit_out: Option<PathBuf>,
}

pub fn unionjack(args: UnionJackArgs) -> CmdResult {
    let pattern = match args.pattern {
        PatternArg::Default => stoqaqc::unionjack::InitPattern::Default,
        PatternArg::AllPlus => stoqaqc::unionjack::InitPattern::AllPlus,
    };
    let (lattice, circuit) = stoqaqc::unionjack::build_union_jack(args.rows, args.cols, pattern)?;
    println!(
        "{}x{} lattice: {} vertices, {} triangles, circuit on {} wires",
        args.rows,
        args.cols,
        lattice.vertices.len(),
        lattice.triangles.len(),
        circuit.num_wires()
    );
    let out = resolve_out(args.out, "unionjack.json");
    write_json(&out, &lattice.to_json())?;
    if let Some(path) = args.circuit_out {
        write_text(&path, &serialize_circuit(&circuit))?;
    }
    Ok(0)
}

// --- css-experiment -------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogicalArg {
    Zero,
    One,
    Plus,
    PlusI,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    X,
    Y,
    Z,
}

#[derive(Args)]
pub struct CssArgs {
    #[arg(long, value_enum, default_value = "zero")]
    logical: LogicalArg,
    #[arg(long, value_enum, default_value = "z")]
    basis: BasisArg,
    /// Per-bit readout flip probability.
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CssReport {
    schema_version: u32,
    logical: &'static str,
    basis: &'static str,
    #[serde(flatten)]
    report: stoqaqc::csscode::NoisyReport,
}

pub fn css_experiment(args: CssArgs) -> CmdResult {
    let code = stoqaqc::csscode::steane();
    let input = match args.logical {
        LogicalArg::Zero => stoqaqc::csscode::EncodeInput::Zero,
        LogicalArg::One => stoqaqc::csscode::EncodeInput::One,
        LogicalArg::Plus => stoqaqc::csscode::EncodeInput::Plus,
        LogicalArg::PlusI => stoqaqc::csscode::EncodeInput::PlusI,
    };
    let basis = match args.basis {
        BasisArg::X => MeasBasis::X,
        BasisArg::Y => MeasBasis::Y,
        BasisArg::Z => MeasBasis::Z,
    };
    let state = stoqaqc::csscode::encoded_state(code, input);
    let report = stoqaqc::csscode::noisy_measurement_experiment(
        &state, basis, args.p, args.shots, args.seed,
    )?;
    println!(
        "logical error rate {:.6} vs baseline {:.6} over {} shots",
        report.logical_error_rate, report.baseline_error_rate, args.shots
    );
    let out = resolve_out(args.out, "css-experiment.json");
    write_json(
        &out,
        &CssReport {
            schema_version: 1,
            logical: match args.logical {
                LogicalArg::Zero => "zero",
                LogicalArg::One => "one",
                LogicalArg::Plus => "plus",
                LogicalArg::PlusI => "plus-i",
            },
            basis: match args.basis {
                BasisArg::X => "X",
                BasisArg::Y => "Y",
                BasisArg::Z => "Z",
            },
            report,
        },
    )?;
    Ok(0)
}

// --- corpus -----------------------------------------------------------------------------

#[derive(Args)]
pub struct CorpusArgs {
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CorpusReport {
    schema_version: u32,
    all_pass: bool,
    cases: Vec<stoqaqc::corpus::CaseReport>,
}

pub fn corpus(args: CorpusArgs) -> CmdResult {
    let reports = run_corpus();
    print!("{}", corpus_table(&reports));
    let all_pass = reports.iter().all(|r| r.pass);
    if let Some(out) = args.out {
        write_json(&out, &CorpusReport { schema_version: 1, all_pass, cases: reports })?;
    }
    println!("{}", if all_pass { "ALL PASS" } else { "FAILURES PRESENT" });
    Ok(if all_pass { 0 } else { 1 })
}
