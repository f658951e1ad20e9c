//! Command-line front end: equilibria, phase diagram, critical curves,
//! N-player HJB tables, Monte Carlo simulation, and the canned experiment
//! bundles that regenerate every figure/table dataset.
//!
//! Exit codes: 0 success; 2 invalid parameters; 3 HJB blow-up guard;
//! 4 control-table/config mismatch; 1 other errors.

mod manifest;

use clap::{Args, Parser, Subcommand};
use manifest::ManifestBuilder;
use serde_json::json;
use spinmfg::curves;
use spinmfg::equilibrium::{self, find_equilibria_report, PhaseSignature};
use spinmfg::hjb::{solve_hjb, ControlTable, HjbConfig, RateConvention};
use spinmfg::selection;
use spinmfg::sim::{self, InitMode, LookupMode, SimConfig};
use spinmfg::{Error, ModelParams};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "spinmfg", version, about = "Binary-state mean field game experiments")]
struct Cli {
    /// Worker threads for internal parallelism (default: all cores,
    /// overridable via SPINMFG_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: current dir, overridable via SPINMFG_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate and classify all mean-field equilibria at one (T, eps, m0).
    Equilibria(EquilibriaArgs),
    /// Phase-signature grid over (eps, T) plus the boundary curves.
    Phase(PhaseArgs),
    /// Critical field strengths eps*1, eps*2, eps*3 and curve samples.
    Critical(CriticalArgs),
    /// Solve the N-player HJB and write the control table.
    Hjb(HjbArgs),
    /// Monte Carlo simulation driven by a stored control table.
    Simulate(SimulateArgs),
    /// Canned reproduction bundles (table2, fig2, fig4, fig6).
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct EquilibriaArgs {
    #[arg(long = "T")]
    horizon: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    m0: f64,
    #[arg(long, default_value_t = equilibrium::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = equilibrium::DEFAULT_GRID)]
    grid: usize,
    /// Optional CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    m0: f64,
    /// eps range as lo,hi (defaults to 0.01,1).
    #[arg(long = "eps-range", value_parser = parse_range, default_value = "0.01,1.0")]
    eps_range: (f64, f64),
    /// T range as lo,hi (defaults to 0.05,15).
    #[arg(long = "T-range", value_parser = parse_range, default_value = "0.05,15.0")]
    t_range: (f64, f64),
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    res: usize,
}

#[derive(Args)]
struct CriticalArgs {
    #[arg(long)]
    m0: f64,
}

#[derive(Args)]
struct HjbArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    neps: usize,
    #[arg(long = "T")]
    horizon: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    m0: f64,
    #[arg(long, default_value_t = spinmfg::hjb::DEFAULT_STEPS)]
    steps: usize,
    /// paper_printed | perspective_shift
    #[arg(long, default_value = "paper_printed")]
    convention: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "control-file")]
    control_file: PathBuf,
    #[arg(long = "S", default_value_t = 100)]
    replications: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// expected | binomial
    #[arg(long, default_value = "expected")]
    init: String,
    /// unshifted | as_printed
    #[arg(long, default_value = "unshifted")]
    lookup: String,
    /// Re-draw n_eps ~ Bin(N, 1/2) per replication, re-solving the HJB.
    #[arg(long = "sample-neps", default_value_t = false)]
    sample_neps: bool,
    /// Optional assertions against the control file header.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    neps: Option<usize>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    m0: Option<f64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Reproduce the 12-row selection-vs-simulation table.
    #[arg(long, group = "which")]
    table2: bool,
    /// Reproduce one horizon-sweep panel (requires --panel).
    #[arg(long, group = "which")]
    fig2: bool,
    /// Underdog-cost branch data with crossing markers.
    #[arg(long, group = "which")]
    fig4: bool,
    /// Underdog-cost minimizer vs total-cost minimizer over T.
    #[arg(long, group = "which")]
    fig6: bool,
    /// Panel for --fig2: A (eps=0.5), B (eps=0.52), C (eps=0.6); m0 = 0.25.
    #[arg(long)]
    panel: Option<String>,
    #[arg(long, default_value_t = 301)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo,hi got '{s}'"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::BlowUp { .. }) => 3,
        Some(Error::ControlMismatch(_)) => 4,
        Some(
            Error::InvalidParameter(_)
            | Error::Domain(_)
            | Error::TimeOutOfRange { .. }
            | Error::NoEquilibrium(_),
        ) => 2,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("SPINMFG_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let out_dir = cli
        .out_dir
        .or_else(|| std::env::var("SPINMFG_OUT_DIR").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create output dir {}: {e}", out_dir.display());
        std::process::exit(1);
    }
    let result = match cli.command {
        Command::Equilibria(a) => cmd_equilibria(a, &out_dir),
        Command::Phase(a) => cmd_phase(a, &out_dir),
        Command::Critical(a) => cmd_critical(a, &out_dir),
        Command::Hjb(a) => cmd_hjb(a, &out_dir),
        Command::Simulate(a) => cmd_simulate(a, &out_dir),
        Command::Experiment(a) => cmd_experiment(a, &out_dir),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(exit_code_for(&e));
    }
}

fn cmd_equilibria(a: EquilibriaArgs, out_dir: &Path) -> anyhow::Result<()> {
    let p = ModelParams::new(a.horizon, a.eps, a.m0)?;
    let report = find_equilibria_report(&p, a.grid, a.tol)?;
    if report.horizon_clamped {
        eprintln!("warning: horizon clamped into [{:.0e}, {:.0e}]", equilibrium::T_MIN, equilibrium::T_MAX);
    }
    println!("# equilibria at T={} eps={} m0={}", a.horizon, a.eps, a.m0);
    println!("{:>12}  {:<24} tangent", "m", "class");
    let mut csv = String::from("m,class,tangent\n");
    for e in &report.equilibria {
        println!("{:>12.8}  {:<24} {}", e.m, e.class.label(), e.tangent);
        writeln!(csv, "{},{},{}", e.m, e.class.label(), e.tangent)?;
    }
    for w in &report.near_tangencies {
        println!(
            "note: near-tangency on ({:.4}, {:.4}): |F| reaches {:.2e} at m={:.6} without a sign change",
            w.interval.0, w.interval.1, w.f_min, w.m
        );
    }
    if let Some(out) = a.out {
        let path = out_dir.join(out);
        std::fs::write(&path, csv)?;
        let mut mb = ManifestBuilder::new(
            "equilibria",
            json!({"T": a.horizon, "eps": a.eps, "m0": a.m0, "tol": a.tol, "grid": a.grid}),
            None,
        );
        mb.add_output(&path);
        mb.write(&path.with_extension("manifest.json"))?;
    }
    Ok(())
}

fn signature_cell(sig: &PhaseSignature) -> String {
    format!(
        "{},{},{},{},{}",
        sig.counts[0],
        sig.counts[1],
        sig.counts[2],
        sig.counts[3],
        sig.region_id.map_or(String::from(""), |r| r.to_string())
    )
}

fn cmd_phase(a: PhaseArgs, out_dir: &Path) -> anyhow::Result<()> {
    if a.m0.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!("m0 = {}", a.m0)).into());
    }
    let mb_cfg = json!({
        "m0": a.m0, "eps_range": a.eps_range, "T_range": a.t_range, "res": a.res,
    });
    let mut mb = ManifestBuilder::new("phase", mb_cfg, None);
    let grid = equilibrium::phase_grid(a.eps_range, a.t_range, a.m0, a.res)?;

    let mut csv = String::from("eps,T,n_pc,n_pi,n_uc,n_ui,region\n");
    for (i, &eps) in grid.eps_values.iter().enumerate() {
        for (j, &t) in grid.t_values.iter().enumerate() {
            let sig = &grid.signatures[i * grid.t_values.len() + j];
            writeln!(csv, "{eps},{t},{}", signature_cell(sig))?;
        }
    }
    let grid_path = out_dir.join("phase_grid.csv");
    std::fs::write(&grid_path, csv)?;
    mb.add_output(&grid_path);

    let mut csv = String::from("curve,eps,T\n");
    for c in &grid.curves {
        for &(eps, t) in &c.points {
            writeln!(csv, "{},{eps},{t}", c.name)?;
        }
    }
    let curves_path = out_dir.join("phase_curves.csv");
    std::fs::write(&curves_path, csv)?;
    mb.add_output(&curves_path);

    let mut distinct: Vec<PhaseSignature> = Vec::new();
    for s in &grid.signatures {
        if !distinct.contains(s) {
            distinct.push(*s);
        }
    }
    println!(
        "phase grid {}x{} for m0={}: {} distinct signatures, files: {}, {}",
        a.res,
        a.res,
        a.m0,
        distinct.len(),
        grid_path.display(),
        curves_path.display()
    );
    mb.write(&out_dir.join("phase.manifest.json"))?;
    Ok(())
}

fn cmd_critical(a: CriticalArgs, out_dir: &Path) -> anyhow::Result<()> {
    if !(0.0..1.0).contains(&a.m0) {
        return Err(Error::InvalidParameter(format!("m0 = {} outside [0,1)", a.m0)).into());
    }
    let e1 = curves::eps_star1(a.m0)?;
    let e2 = curves::eps_star2(a.m0)?;
    let e3 = curves::eps_star3(a.m0)?;
    println!("eps_star1 = {e1:.10}");
    println!("eps_star2 = {e2:.10}");
    println!("eps_star3 = {e3:.10}");
    println!("ordering: m0 < eps_star2 < eps_star3 < (1+m0)/2: {}", a.m0 < e2 && e2 < e3 && e3 < (1.0 + a.m0) / 2.0);

    let eps_values: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let samples = curves::boundary_curves(&eps_values, a.m0);
    let mut csv = String::from("curve,eps,T\n");
    for c in &samples {
        for &(eps, t) in &c.points {
            writeln!(csv, "{},{eps},{t}", c.name)?;
        }
    }
    let path = out_dir.join("critical_curves.csv");
    std::fs::write(&path, csv)?;
    let mut mb = ManifestBuilder::new(
        "critical",
        json!({"m0": a.m0, "eps_star1": e1, "eps_star2": e2, "eps_star3": e3}),
        None,
    );
    mb.add_output(&path);
    mb.write(&out_dir.join("critical.manifest.json"))?;
    Ok(())
}

fn cmd_hjb(a: HjbArgs, out_dir: &Path) -> anyhow::Result<()> {
    let params = ModelParams::new(a.horizon, a.eps, a.m0)?;
    let convention = RateConvention::parse(&a.convention)?;
    let cfg = HjbConfig::new(a.n, a.neps, a.steps, convention, params)?;
    println!("{}", cfg.state_count());
    let (_, control) = solve_hjb(&cfg)?;
    let path = out_dir.join(&a.out);
    control.write_to(&path)?;
    let mut mb = ManifestBuilder::new(
        "hjb",
        json!({
            "N": a.n, "neps": a.neps, "T": a.horizon, "eps": a.eps, "m0": a.m0,
            "steps": a.steps, "convention": convention.label(),
            "state_count": cfg.state_count(),
        }),
        None,
    );
    mb.add_output(&path);
    mb.write(&path.with_extension("manifest.json"))?;
    Ok(())
}

fn f64_str(v: Option<f64>) -> String {
    v.map_or(String::from("null"), |x| x.to_string())
}

fn write_summary_files(
    out_dir: &Path,
    stem: &str,
    cfg: &SimConfig,
    control_cfg: &HjbConfig,
    summary: &sim::SimSummary,
    mb: &mut ManifestBuilder,
) -> anyhow::Result<()> {
    let mut csv = String::from("replication,m_N_T,cost_minus,cost_plus\n");
    for (r, o) in summary.outcomes.iter().enumerate() {
        writeln!(csv, "{r},{},{},{}", o.terminal_mean, o.cost_minus, o.cost_plus)?;
    }
    let samples_path = out_dir.join(format!("{stem}_samples.csv"));
    std::fs::write(&samples_path, csv)?;
    mb.add_output(&samples_path);

    let summary_json = json!({
        "config": {
            "N": cfg.n_players, "neps": cfg.n_eps, "S": cfg.replications,
            "seed": cfg.seed, "T": cfg.params.horizon, "eps": cfg.params.field_strength,
            "m0": cfg.params.initial_mean,
            "steps": control_cfg.time_steps, "convention": control_cfg.rate_convention.label(),
        },
        "mean": summary.mean,
        "sd": summary.sd,
        "cost_minus": summary.cost_minus,
        "cost_plus": summary.cost_plus,
        "samples": summary.samples,
    });
    let summary_path = out_dir.join(format!("{stem}_summary.json"));
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary_json)?)?;
    mb.add_output(&summary_path);
    println!(
        "{stem}: mean={} sd={} cost_minus={} cost_plus={}",
        summary.mean,
        f64_str(summary.sd),
        summary.cost_minus,
        summary.cost_plus
    );
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, out_dir: &Path) -> anyhow::Result<()> {
    let control = ControlTable::read_from(&a.control_file)?;
    let c = control.config;
    // optional flag assertions against the file header
    let mismatch = |what: &str| Error::ControlMismatch(format!("flag {what} does not match the control file"));
    if a.n.is_some_and(|v| v != c.n_others) {
        return Err(mismatch("--N").into());
    }
    if a.neps.is_some_and(|v| v != c.n_eps) {
        return Err(mismatch("--neps").into());
    }
    if a.horizon.is_some_and(|v| v != c.params.horizon) {
        return Err(mismatch("--T").into());
    }
    if a.eps.is_some_and(|v| v != c.params.field_strength) {
        return Err(mismatch("--eps").into());
    }
    if a.m0.is_some_and(|v| v != c.params.initial_mean) {
        return Err(mismatch("--m0").into());
    }
    let cfg = SimConfig {
        n_players: c.n_others,
        n_eps: c.n_eps,
        replications: a.replications,
        seed: a.seed,
        params: c.params,
        init: InitMode::parse(&a.init)?,
        lookup: LookupMode::parse(&a.lookup)?,
    };
    let summary = if a.sample_neps {
        sim::monte_carlo_sampled_neps(&cfg, |n_eps| {
            let hjb = HjbConfig::new(c.n_others, n_eps, c.time_steps, c.rate_convention, c.params)?;
            Ok(solve_hjb(&hjb)?.1)
        })?
    } else {
        sim::monte_carlo(&cfg, &control)?
    };
    let mut mb = ManifestBuilder::new(
        "simulate",
        json!({
            "control_file": a.control_file.display().to_string(),
            "S": a.replications, "seed": a.seed, "init": a.init, "lookup": a.lookup,
            "sample_neps": a.sample_neps,
            "table": {
                "N": c.n_others, "neps": c.n_eps, "steps": c.time_steps,
                "convention": c.rate_convention.label(),
                "T": c.params.horizon, "eps": c.params.field_strength, "m0": c.params.initial_mean,
            },
        }),
        Some(a.seed),
    );
    write_summary_files(out_dir, "sim", &cfg, &c, &summary, &mut mb)?;
    mb.write(&out_dir.join("sim.manifest.json"))?;
    Ok(())
}

/// The twelve benchmark rows: (T_printed, m0, eps, m_ref, sd_ref, T_run).
/// The first six rows are run at the equation-consistent horizon 2.0.
pub const TABLE2_ROWS: [(f64, f64, f64, f64, f64, f64); 12] = [
    (1.0, 0.1, 0.42, 0.8261, 0.0794, 2.0),
    (1.0, 0.1, 0.45, 0.8126, 0.0859, 2.0),
    (1.0, 0.1, 0.5, 0.0506, 0.0765, 2.0),
    (1.0, 0.5, 0.55, 0.8962, 0.0553, 2.0),
    (1.0, 0.5, 0.6, 0.8818, 0.0569, 2.0),
    (1.0, 0.5, 0.7, 0.1276, 0.0783, 2.0),
    (2.3, 0.2, 0.5, 0.8552, 0.0788, 2.3),
    (2.3, 0.2, 0.58, 0.0583, 0.0818, 2.3),
    (2.8, 0.2, 0.5, 0.8925, 0.0715, 2.8),
    (3.5, 0.2, 0.7, 0.0203, 0.0473, 3.5),
    (5.5, 0.2, 0.7, 0.0094, 0.0307, 5.5),
    (9.0, 0.2, 0.7, 0.0039, 0.0171, 9.0),
];

fn table2_defaults(seed: u64, params: ModelParams) -> (HjbConfig, SimConfig) {
    let hjb = HjbConfig::new(
        60,
        30,
        spinmfg::hjb::DEFAULT_STEPS,
        RateConvention::PaperPrinted,
        params,
    )
    .expect("valid");
    let sim = SimConfig {
        n_players: 60,
        n_eps: 30,
        replications: 100,
        seed,
        params,
        init: InitMode::ExpectedCounts,
        lookup: LookupMode::Unshifted,
    };
    (hjb, sim)
}

fn run_table2(seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    let mut mb = ManifestBuilder::new(
        "experiment --table2",
        json!({"N": 60, "neps": 30, "S": 100, "steps": spinmfg::hjb::DEFAULT_STEPS,
               "convention": "paper_printed", "init": "expected", "lookup": "unshifted",
               "rows": TABLE2_ROWS.len()}),
        Some(seed),
    );
    let mut csv = String::from("T,m0,eps,m_T,mean,sd,absdiff,ratio\n");
    for (i, &(_, m0, eps, _, _, t_run)) in TABLE2_ROWS.iter().enumerate() {
        let params = ModelParams::new(t_run, eps, m0)?;
        let m_t = selection::predict_selected(&params)?.chosen.m;
        let (hjb_cfg, sim_cfg) = table2_defaults(seed.wrapping_add(i as u64), params);
        let (_, control) = solve_hjb(&hjb_cfg)?;
        let summary = sim::monte_carlo(&sim_cfg, &control)?;
        let sd = summary.sd.expect("S >= 2");
        let absdiff = (summary.mean - m_t).abs();
        writeln!(csv, "{t_run},{m0},{eps},{m_t},{},{sd},{absdiff},{}", summary.mean, absdiff / sd)?;
        println!(
            "row {:2}: T={t_run} m0={m0} eps={eps} m_T={m_t:.4} mean={:.4} sd={sd:.4} ratio={:.4}",
            i + 1,
            summary.mean,
            absdiff / sd
        );
    }
    let path = out_dir.join("table2.csv");
    std::fs::write(&path, csv)?;
    mb.add_output(&path);
    mb.write(&out_dir.join("table2.manifest.json"))?;
    Ok(())
}

fn run_fig2(panel: &str, seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    let eps = match panel {
        "A" | "a" => 0.5,
        "B" | "b" => 0.52,
        "C" | "c" => 0.6,
        other => {
            return Err(Error::InvalidParameter(format!("panel '{other}', expected A, B or C")).into())
        }
    };
    let m0 = 0.25;
    let horizons: Vec<f64> = (1..=48).map(|i| 0.25 * i as f64).collect();
    let sweep = sim::SweepConfig {
        n_players: 30,
        n_eps: 15,
        time_steps: 1_500,
        rate_convention: RateConvention::PaperPrinted,
        replications: 100,
        seed,
        init: InitMode::ExpectedCounts,
        lookup: LookupMode::Unshifted,
    };
    let points = sim::selection_sweep(eps, m0, &horizons, &sweep)?;
    let mut csv = String::from("kind,T,m,class,sd\n");
    for pt in &points {
        for (e, _) in &pt.predicted.all_coherent {
            writeln!(csv, "equilibrium,{},{},{},", pt.horizon, e.m, e.class.label())?;
        }
        writeln!(
            csv,
            "predicted,{},{},{},",
            pt.horizon,
            pt.predicted.chosen.m,
            pt.predicted.chosen.class.label()
        )?;
        writeln!(csv, "simulated,{},{},,{}", pt.horizon, pt.summary.mean, f64_str(pt.summary.sd))?;
    }
    let path = out_dir.join(format!("fig2_panel_{}.csv", panel.to_uppercase()));
    std::fs::write(&path, csv)?;
    let mut mb = ManifestBuilder::new(
        "experiment --fig2",
        json!({"panel": panel.to_uppercase(), "eps": eps, "m0": m0, "N": 30, "S": 100}),
        Some(seed),
    );
    mb.add_output(&path);
    mb.write(&out_dir.join(format!("fig2_panel_{}.manifest.json", panel.to_uppercase())))?;
    println!("fig2 panel {} written to {}", panel.to_uppercase(), path.display());
    Ok(())
}

fn run_fig4(out_dir: &Path) -> anyhow::Result<()> {
    let m0 = 0.25;
    let mut mb = ManifestBuilder::new(
        "experiment --fig4",
        json!({"m0": m0, "eps": [0.5, 0.52], "T_range": [0.05, 15.0]}),
        None,
    );
    let mut csv = String::from("eps,T,m,class,j_underdog\n");
    for eps in [0.5, 0.52] {
        let mut t = 0.05;
        while t <= 15.0 {
            let p = ModelParams::new(t, eps, m0)?;
            let sel = selection::predict_selected(&p)?;
            for (e, c) in &sel.all_coherent {
                writeln!(csv, "{eps},{t},{},{},{}", e.m, e.class.label(), c.j_minus)?;
            }
            t += 0.05;
        }
    }
    let branches_path = out_dir.join("fig4_branches.csv");
    std::fs::write(&branches_path, csv)?;
    mb.add_output(&branches_path);

    let mut csv = String::from("eps,T_cross\n");
    for eps in [0.5, 0.52] {
        for t in selection::branch_crossing_times(eps, m0, (0.05, 15.0))? {
            writeln!(csv, "{eps},{t}")?;
        }
    }
    let cross_path = out_dir.join("fig4_crossings.csv");
    std::fs::write(&cross_path, csv)?;
    mb.add_output(&cross_path);
    mb.write(&out_dir.join("fig4.manifest.json"))?;
    println!("fig4 written to {} and {}", branches_path.display(), cross_path.display());
    Ok(())
}

fn run_fig6(out_dir: &Path) -> anyhow::Result<()> {
    let (eps, m0) = (0.52, 0.25);
    let mut mb = ManifestBuilder::new("experiment --fig6", json!({"eps": eps, "m0": m0}), None);
    let mut csv =
        String::from("T,m_min_underdog,j_total_at_min_underdog,m_min_total,j_total_min\n");
    let mut t = 1.0;
    while t <= 15.0 {
        let p = ModelParams::new(t, eps, m0)?;
        let sel = selection::predict_selected(&p)?;
        let min_total = selection::min_total_cost_equilibrium(&p)?;
        writeln!(
            csv,
            "{t},{},{},{},{}",
            sel.chosen.m,
            sel.chosen_costs.j_total,
            min_total.m,
            selection::cost_breakdown(min_total.m, &p).j_total
        )?;
        t += 0.05;
    }
    let path = out_dir.join("fig6.csv");
    std::fs::write(&path, csv)?;
    mb.add_output(&path);
    mb.write(&out_dir.join("fig6.manifest.json"))?;
    println!("fig6 written to {}", path.display());
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs, out_dir: &Path) -> anyhow::Result<()> {
    if a.table2 {
        run_table2(a.seed, out_dir)
    } else if a.fig2 {
        let panel = a.panel.as_deref().ok_or_else(|| {
            anyhow::Error::from(Error::InvalidParameter("--fig2 requires --panel".into()))
        })?;
        run_fig2(panel, a.seed, out_dir)
    } else if a.fig4 {
        run_fig4(out_dir)
    } else if a.fig6 {
        run_fig6(out_dir)
    } else {
        Err(Error::InvalidParameter(
            "choose one of --table2, --fig2 --panel, --fig4, --fig6".into(),
        )
        .into())
    }
}
