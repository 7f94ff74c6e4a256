use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iddmp::app::{run_app, static_point, AppConfig, Sp2Mode};
use iddmp::ctmdp::{check_weakly_communicating, pairs_per_type, CtmdpModel, ModelOptions, DEFAULT_STATE_CEILING};
use iddmp::dop::{format_static_table, solve_fdop, sp1_sweep, StaticConfig};
use iddmp::exact::{enumerate_feasible_designs, exact_front, ExactConfig, DEFAULT_DESIGN_CEILING};
use iddmp::front::{
    compare_fronts, export_front, format_comparison, parse_front, plot_data, revalidate, MatchStatus, PolicySpec,
    DOMINANCE_TOLERANCE,
};
use iddmp::mdp::{evaluate_policy, fully_active_policy, solve_average_cost, SolveOptions};
use iddmp::model::{tightened_copy_bound, write_table_document, Design, Instance, PenaltyBasis};
use iddmp::numfmt::sig12;
use iddmp::sim::{simulate_policy, SimConfig};

/// Run finished and every result is complete.
const EXIT_COMPLETE: u8 = 0;
const EXIT_ERROR: u8 = 1;
/// Run finished but some result is partial or flagged.
const EXIT_FLAGGED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "iddmp", version, about = "Redundancy allocation with dynamic maintenance")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "IDDMP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Static design sweep under fully active maintenance.
    Dop(DopArgs),
    /// Static sweep followed by dynamic policies for the surviving designs.
    App(AppArgs),
    /// Exact supported front over every feasible design.
    Exact(ExactArgs),
    /// Optimal maintenance policy of one design for one failure penalty.
    Dmp(DmpArgs),
    /// Discrete-event simulation of a design under a policy.
    Simulate(SimulateArgs),
    /// Dominance and distance report of one front against another.
    Compare(CompareArgs),
    /// Instance file utilities.
    Instance {
        #[command(subcommand)]
        command: InstanceCommand,
    },
}

#[derive(Subcommand, Debug)]
enum InstanceCommand {
    /// Checks an instance and prints its derived quantities.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file, table or JSON document.
    instance: PathBuf,
    /// Per-type multipliers of alpha and tau, in file order.
    #[arg(long, value_delimiter = ',')]
    rate_multipliers: Option<Vec<f64>>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        let inst = Instance::load(&self.instance).with_context(|| format!("loading {}", self.instance.display()))?;
        match &self.rate_multipliers {
            Some(m) => Ok(inst.with_rate_multipliers(m)?),
            None => Ok(inst),
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// Let copies under repair fail back to damaged at their failure rate.
    #[arg(long)]
    repair_interruption: bool,
    /// Largest state space built for one model.
    #[arg(long, default_value_t = DEFAULT_STATE_CEILING)]
    state_ceiling: usize,
}

impl ModelArgs {
    fn options(&self) -> ModelOptions {
        ModelOptions {
            repair_interruption: self.repair_interruption,
            state_ceiling: self.state_ceiling,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct SolveArgs {
    /// Span tolerance of relative value iteration.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tolerance: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iterations: usize,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Basis {
    /// Usage cost of the last type in file order.
    Last,
    /// Largest usage cost.
    Max,
}

#[derive(Args, Debug, Clone, Copy)]
struct StaticArgs {
    /// First log-failure target of the sweep.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = non_positive)]
    eps_min: f64,
    /// Step added to each solution's log failure rate.
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true, value_parser = negative)]
    delta_eps: f64,
    /// Failure penalty margin over the basis usage cost.
    #[arg(long, default_value_t = 0.1, value_parser = non_negative)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Basis::Last)]
    penalty_basis: Basis,
    /// Search only the knapsack copy bounds.
    #[arg(long)]
    no_tightened_bounds: bool,
}

impl StaticArgs {
    fn config(&self) -> StaticConfig {
        StaticConfig {
            delta: self.delta,
            basis: match self.penalty_basis {
                Basis::Last => PenaltyBasis::LastCatalogType,
                Basis::Max => PenaltyBasis::MostExpensive,
            },
            tightened_bounds: !self.no_tightened_bounds,
        }
    }
}

#[derive(Args, Debug)]
struct DopArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sweep: StaticArgs,
    /// Static table destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the solutions as a front file.
    #[arg(long)]
    front: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Mode {
    Sweep,
    Dichotomic,
}

#[derive(Args, Debug)]
struct AppArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sweep: StaticArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// First failure penalty of the dynamic sweep.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    p_min: f64,
    /// Factor between consecutive penalties.
    #[arg(long, default_value_t = 2.0, value_parser = above_one)]
    delta_p: f64,
    #[arg(long, value_enum, default_value_t = Mode::Sweep)]
    mode: Mode,
    /// Cap on penalty levels per design.
    #[arg(long, default_value_t = 200)]
    max_levels: usize,
    /// Front destination; standard output if absent.
    #[arg(long)]
    front: Option<PathBuf>,
    /// Plot data destination.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Static table destination.
    #[arg(long)]
    static_table: Option<PathBuf>,
    /// Every point before filtering, as a front file.
    #[arg(long)]
    population: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Skip designs that can take another copy.
    #[arg(long)]
    maximal_only: bool,
    #[arg(long, default_value_t = DEFAULT_DESIGN_CEILING)]
    design_ceiling: usize,
    /// Dominance tolerance of the final filter.
    #[arg(long, default_value_t = DOMINANCE_TOLERANCE, value_parser = non_negative)]
    front_tolerance: f64,
    #[arg(long)]
    front: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Copies per type in file order, e.g. `1,0,0,0`.
    #[arg(long, value_delimiter = ',', required = true)]
    design: Vec<u32>,
}

#[derive(Args, Debug)]
struct DmpArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Failure penalty.
    #[arg(long, value_parser = non_negative)]
    p: f64,
    /// Gain report destination (JSON); standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Policy export destination.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Model dump destination.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Copies per type in file order; the policy is fully active unless `--p` is given.
    #[arg(long, value_delimiter = ',', conflicts_with = "from_front")]
    design: Option<Vec<u32>>,
    /// Simulate the policy that is optimal for this failure penalty.
    #[arg(long, value_parser = non_negative, requires = "design")]
    p: Option<f64>,
    /// Take design and policy from a front file.
    #[arg(long, requires = "row")]
    from_front: Option<PathBuf>,
    /// Zero-based point index in `--from-front`.
    #[arg(long)]
    row: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value_t = 1e6, value_parser = positive)]
    horizon: f64,
    #[arg(long, default_value_t = 30)]
    batches: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Events of the first batch to record.
    #[arg(long, default_value_t = 0)]
    trace: usize,
    /// Trace destination; standard error if absent.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Report destination (JSON); standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Front whose points are classified.
    subject: PathBuf,
    /// Reference front.
    other: PathBuf,
    #[arg(long, default_value_t = DOMINANCE_TOLERANCE, value_parser = non_negative)]
    tolerance: f64,
    /// Re-evaluate both fronts before comparing.
    #[arg(long)]
    revalidate: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Write the instance back as a table document.
    #[arg(long)]
    normalized: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be positive and finite".into())
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be non-negative and finite".into())
    }
}

fn non_positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v <= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be at most zero".into())
    }
}

fn negative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v < 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be negative".into())
    }
}

fn above_one(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 1.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must exceed 1".into())
    }
}

/// JSON number rounded to 12 significant digits; non-finite values become strings.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(sig12(v).parse::<f64>().expect("formatted number parses"))
    } else {
        json!(sig12(v))
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(path, &text)
}

fn design_arg(inst: &Instance, counts: &[u32]) -> Result<Design> {
    let d = inst.design_from_catalog(counts)?;
    inst.check_design(&d)?;
    Ok(d)
}

fn report_diagnostics(lines: &[String]) {
    for l in lines {
        eprintln!("warning: {l}");
    }
}

fn status(complete: bool) -> u8 {
    if complete {
        EXIT_COMPLETE
    } else {
        EXIT_FLAGGED
    }
}

fn cmd_dop(args: &DopArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let s = &args.sweep;
    let solutions = sp1_sweep(&inst, s.eps_min, s.delta_eps, s.config())?;
    emit(args.out.as_deref(), &format_static_table(&inst, &solutions))?;
    if let Some(p) = &args.front {
        let points: Vec<_> = solutions.iter().map(static_point).collect();
        emit(Some(p), &export_front(&inst, &points))?;
    }
    let fdop = solve_fdop(&inst);
    eprintln!("most reliable design: {}", inst.format_design(&fdop));
    Ok(EXIT_COMPLETE)
}

fn cmd_app(args: &AppArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let config = AppConfig {
        eps_min: args.sweep.eps_min,
        delta_eps: args.sweep.delta_eps,
        static_config: args.sweep.config(),
        p_min: args.p_min,
        delta_p: args.delta_p,
        mode: match args.mode {
            Mode::Sweep => Sp2Mode::Sweep,
            Mode::Dichotomic => Sp2Mode::Dichotomic,
        },
        max_levels: args.max_levels,
        solve: args.solve.options(),
        model: args.model.options(),
        ..AppConfig::default()
    };
    let result = run_app(&inst, &config)?;
    emit(args.front.as_deref(), &export_front(&inst, &result.front.points))?;
    if let Some(p) = &args.plot {
        emit(Some(p), &plot_data(&inst, &result.population))?;
    }
    if let Some(p) = &args.static_table {
        emit(Some(p), &format_static_table(&inst, &result.static_solutions))?;
    }
    if let Some(p) = &args.population {
        emit(Some(p), &export_front(&inst, &result.population))?;
    }
    report_diagnostics(&result.diagnostics);
    eprintln!(
        "{} static designs, {} passed to the dynamic stage, {} front points",
        result.static_solutions.len(),
        result.selected.len(),
        result.front.points.len()
    );
    Ok(status(result.complete))
}

fn cmd_exact(args: &ExactArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let config = ExactConfig {
        maximal_only: args.maximal_only,
        tolerance: args.front_tolerance,
        solve: args.solve.options(),
        model: args.model.options(),
        design_ceiling: args.design_ceiling,
    };
    let result = exact_front(&inst, &config)?;
    emit(args.front.as_deref(), &export_front(&inst, &result.front.points))?;
    if let Some(p) = &args.plot {
        emit(Some(p), &plot_data(&inst, &result.points))?;
    }
    report_diagnostics(&result.diagnostics);
    eprintln!("{} designs, {} front points", result.designs, result.front.points.len());
    Ok(status(result.complete))
}

fn cmd_dmp(args: &DmpArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let design = design_arg(&inst, &args.design.design)?;
    let model = CtmdpModel::for_design(&inst, &design, args.model.options())?;
    let sol = solve_average_cost(&model, args.p, args.solve.options())?;
    let gain = evaluate_policy(&model, &sol.policy, model.all_healthy())?;
    let report = json!({
        "design": inst.catalog_counts(&design),
        "p": num(args.p),
        "g_o": num(gain.g_o),
        "g_f": num(gain.g_f),
        "ln_g_f": num(gain.ln_g_f),
        "scalarized_gain": num(gain.scalarized(args.p)),
        "iteration_gain": num(sol.gain),
        "converged": sol.converged,
        "iterations": sol.iterations,
        "span": num(sol.span),
        "states": model.n_states(),
        "policy": PolicySpec::from_policy(&model, &sol.policy).encode(),
    });
    emit_json(args.out.as_deref(), &report)?;
    if let Some(p) = &args.policy {
        emit(Some(p), &sol.policy.export(&model))?;
    }
    if let Some(p) = &args.dump {
        emit(Some(p), &model.dump())?;
    }
    if !sol.converged {
        eprintln!("warning: value iteration stopped after {} iterations", sol.iterations);
    }
    Ok(status(sol.converged))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let options = args.model.options();
    let (design, model, policy, label) = match (&args.design, &args.from_front) {
        (Some(counts), None) => {
            let design = design_arg(&inst, counts)?;
            let model = CtmdpModel::for_design(&inst, &design, options)?;
            match args.p {
                Some(p) => {
                    let sol = solve_average_cost(&model, p, args.solve.options())?;
                    if !sol.converged {
                        eprintln!("warning: value iteration stopped after {} iterations", sol.iterations);
                    }
                    (design, model, sol.policy, format!("optimal at p = {}", sig12(p)))
                }
                None => {
                    let policy = fully_active_policy(&model);
                    (design, model, policy, "full".to_string())
                }
            }
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let points = parse_front(&inst, &text)?;
            let row = args.row.expect("clap enforces --row");
            let pt = points
                .get(row)
                .ok_or_else(|| anyhow!("{} has {} points, no row {row}", path.display(), points.len()))?;
            let model = CtmdpModel::for_design(&inst, &pt.design, options)?;
            let policy = pt.policy.to_policy(&model)?;
            (pt.design.clone(), model, policy, pt.policy.encode())
        }
        _ => bail!("give either --design or --from-front"),
    };
    let config = SimConfig {
        horizon: args.horizon,
        batches: args.batches,
        seed: args.seed,
        trace_limit: args.trace,
    };
    let report = simulate_policy(&model, &policy, model.all_healthy(), &config)?;
    let exact = evaluate_policy(&model, &policy, model.all_healthy())?;
    let value = json!({
        "design": inst.catalog_counts(&design),
        "policy": label,
        "g_o": num(report.g_o),
        "g_f": num(report.g_f),
        "se_o": num(report.se_o),
        "se_f": num(report.se_f),
        "exact_g_o": num(exact.g_o),
        "exact_g_f": num(exact.g_f),
        "horizon": num(report.horizon),
        "batches": report.batches,
        "seed": report.seed,
        "failure_events": report.failure_events,
        "few_failures": report.few_failures,
    });
    emit_json(args.out.as_deref(), &value)?;
    if !report.trace.is_empty() {
        let text = report.trace.join("\n") + "\n";
        match &args.trace_out {
            Some(p) => emit(Some(p), &text)?,
            None => eprint!("{text}"),
        }
    }
    if report.few_failures {
        eprintln!(
            "warning: only {} failures observed; the failure estimate is unreliable",
            report.failure_events
        );
    }
    Ok(status(!report.few_failures))
}

fn load_front(inst: &Instance, path: &Path) -> Result<Vec<iddmp::front::SolutionPoint>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_front(inst, &text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_compare(args: &CompareArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let subject = load_front(&inst, &args.subject)?;
    let other = load_front(&inst, &args.other)?;
    let mut complete = true;
    if args.revalidate {
        for (path, pts) in [(&args.subject, &subject), (&args.other, &other)] {
            let drifted = revalidate(&inst, pts, args.model.options())?;
            if !drifted.is_empty() {
                complete = false;
                eprintln!("warning: {} points of {} do not re-evaluate: {drifted:?}", drifted.len(), path.display());
            }
        }
    }
    let rows = compare_fronts(&subject, &other, args.tolerance);
    emit(args.out.as_deref(), &format_comparison(&inst, &rows, &other))?;
    let count = |s: MatchStatus| rows.iter().filter(|r| r.status == s).count();
    eprintln!(
        "{} points: {} present, {} dominated, {} absent",
        rows.len(),
        count(MatchStatus::Present),
        count(MatchStatus::Dominated),
        count(MatchStatus::Absent)
    );
    Ok(status(complete))
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8> {
    let inst = args.instance.load()?;
    let config = StaticConfig::default();
    let mut out = String::from("# label p alpha tau usage_cost repair_cost copy_bound bound_at_zero_target\n");
    let mut warnings = Vec::new();
    let mut states: u128 = 1;
    for c in inst.catalog_types() {
        let i = inst
            .components()
            .iter()
            .position(|s| s.catalog_index == c.catalog_index)
            .expect("catalog type is present");
        let bound = inst.copy_bounds()[i];
        let tight = tightened_copy_bound(&inst, i, 0.0, config.delta, config.basis)?;
        if let Some(w) = tight.warning {
            warnings.push(format!("{}: {w}", c.label));
        }
        states = states.saturating_mul(pairs_per_type(bound) as u128);
        out.push_str(&format!(
            "{} {} {} {} {} {} {} {}\n",
            c.label,
            sig12(c.p()),
            sig12(c.alpha),
            sig12(c.tau),
            sig12(c.usage_cost),
            sig12(c.repair_cost),
            bound,
            tight.bound
        ));
    }
    let designs = match enumerate_feasible_designs(&inst, false, DEFAULT_DESIGN_CEILING) {
        Ok(d) => d.len().to_string(),
        Err(e) => e.to_string(),
    };
    let largest = Design::new(inst.copy_bounds().to_vec());
    out.push_str(&format!("# constraints {}\n", inst.constraints().len()));
    out.push_str(&format!("# feasible designs {designs}\n"));
    out.push_str(&format!("# states at the copy bounds {states}\n"));
    out.push_str(&format!("# usage order {}\n", {
        let labels: Vec<&str> = inst.components().iter().map(|c| c.label.as_str()).collect();
        labels.join(" ")
    }));
    if states <= 100_000 {
        let model = CtmdpModel::for_design(&inst, &largest, ModelOptions::default())?;
        let report = check_weakly_communicating(&model);
        out.push_str(&format!(
            "# weakly communicating {} (all-repairing state transient {})\n",
            report.weakly_communicating, report.all_repairing_transient
        ));
    }
    print!("{out}");
    report_diagnostics(&warnings);
    if let Some(p) = &args.normalized {
        emit(Some(p), &write_table_document(&inst))?;
    }
    Ok(EXIT_COMPLETE)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Dop(a) => cmd_dop(a),
        Command::App(a) => cmd_app(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Dmp(a) => cmd_dmp(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Instance {
            command: InstanceCommand::Validate(a),
        } => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_COMPLETE };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_ERROR);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
