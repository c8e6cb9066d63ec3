// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use netdesign::designs::DEFAULT_NODES;
use netdesign::io::{
    analysis_table, analyze_network, curve_table, emit_csv, emit_plot, map_hijacker_weights, map_multiplicity_weights,
    multiplicities, pareto_table, parse_edge_list, parse_roles, sensitivity_table, AnalysisRow, LabeledNetwork, Table,
};
use netdesign::optimizer::{
    evaluate_surfaces, fitness_curves, pareto_frontier_of, sensitivity, Evaluator, ParetoPoint, SearchSettings,
    DEFAULT_EPSILON, NEAR_OPTIMAL_FRACTION,
};
use netdesign::{Design, EstimatorConfig, InterCellWiring, RunSeed, Weights};

mod grid;

use grid::{check_unit, parse_f64_grid, parse_usize_grid};

/// Largest fitness gap between binary and weighted forms treated as agreement.
const FITNESS_GAP_BOUND: f64 = 0.15;
/// Largest efficiency gap treated as agreement.
const EFFICIENCY_GAP_BOUND: f64 = 0.05;

#[derive(Parser)]
#[command(name = "netdesign", version, about = "Design and evaluate cascade-resilient networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal fitness versus τ for each design.
    DesignSweep(SweepArgs),
    /// ε-thinned (R, W) frontier over all designs, per τ.
    Pareto(SweepArgs),
    /// Spread of near-optimal configurations per design, τ and r.
    Sensitivity(SweepArgs),
    /// Resilience, efficiency and fitness of an edge-list network.
    Analyze(NetworkArgs),
    /// Binary versus weighted metrics of a weighted network.
    CompareWeighted(NetworkArgs),
}

#[derive(Args)]
struct Common {
    /// Master seed; every output is reproducible from it.
    #[arg(long)]
    seed: u64,
    /// Transmission probabilities: list `a,b,c` or range `start:stop:step`.
    #[arg(long, default_value = "0:1:0.05")]
    tau_grid: String,
    /// Resilience weights, same syntax as the τ grid.
    #[arg(long, default_value = "0.25,0.49,0.51,0.75")]
    r: String,
    /// Distance attenuation exponent.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Frontier thinning tolerance.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Target 95% half-width of the cascade extent estimate, in nodes.
    #[arg(long, default_value_t = 0.5)]
    tolerance: f64,
    /// Replication cap per estimate.
    #[arg(long, default_value_t = 200_000)]
    max_reps: usize,
    /// Also write SVG line plots.
    #[arg(long)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Wiring {
    Random,
    Leaders,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Designs to search (comma-separated); all by default.
    #[arg(long, value_delimiter = ',')]
    design: Vec<Design>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    n: usize,
    /// Cell sizes: list, range `a:b[:step]` or `divisors`; default `1:n`.
    #[arg(long)]
    k_grid: Option<String>,
    /// Connectivity probabilities; default multiples of 0.05 plus 0.005, 0.01, 0.02.
    #[arg(long)]
    p_grid: Option<String>,
    /// Graphs per random configuration.
    #[arg(long)]
    ensemble: Option<usize>,
    /// Endpoints of inter-cell edges.
    #[arg(long, value_enum, default_value_t = Wiring::Random)]
    wiring: Wiring,
    /// Evaluate Stars and Cycles with exact formulas instead of simulation.
    #[arg(long)]
    closed_form: bool,
    /// Skip connectivity refinement near steep fitness changes.
    #[arg(long)]
    no_refine: bool,
}

#[derive(Args)]
struct NetworkArgs {
    #[command(flatten)]
    common: Common,
    /// Edge list: `u v` or `u v w` per line, `#` comments.
    #[arg(long)]
    input: PathBuf,
    /// `label role` lines (hijacker/facilitator); weights become 2, 1 or 0.5.
    #[arg(long, conflicts_with = "multiplicity")]
    roles: Option<PathBuf>,
    /// Read the third column (or repeat counts) as multiplicity Z; weights become 2/Z.
    #[arg(long)]
    multiplicity: bool,
}

struct Run {
    seed: u64,
    taus: Vec<f64>,
    rs: Vec<f64>,
    g: f64,
    epsilon: f64,
    out: PathBuf,
    estimator: EstimatorConfig,
    plot: bool,
}

impl Run {
    fn new(c: &Common) -> Result<Self> {
        let taus = parse_f64_grid(&c.tau_grid).context("--tau-grid")?;
        check_unit("tau", &taus)?;
        let rs = parse_f64_grid(&c.r).context("--r")?;
        check_unit("r", &rs)?;
        if !(c.g >= 0.0) || !c.g.is_finite() {
            bail!("--g must be a finite non-negative exponent, got {}", c.g);
        }
        if !(c.epsilon > 0.0) {
            bail!("--epsilon must be positive, got {}", c.epsilon);
        }
        if !(c.tolerance > 0.0) {
            bail!("--tolerance must be positive, got {}", c.tolerance);
        }
        let estimator = EstimatorConfig { tolerance: c.tolerance, max_reps: c.max_reps, ..Default::default() };
        if estimator.max_reps < estimator.min_reps {
            bail!("--max-reps must be at least {}", estimator.min_reps);
        }
        fs::create_dir_all(&c.out).with_context(|| format!("cannot create {}", c.out.display()))?;
        Ok(Run { seed: c.seed, taus, rs, g: c.g, epsilon: c.epsilon, out: c.out.clone(), estimator, plot: c.plot })
    }

    fn master(&self) -> RunSeed {
        RunSeed::new(self.seed)
    }

    fn write(&self, name: &str, table: &Table) -> Result<PathBuf> {
        let path = self.out.join(name);
        emit_csv(&path, self.seed, table).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn write_plot(&self, name: &str, title: &str, xs: &[f64], series: &[(&str, Vec<f64>)]) -> Result<()> {
        let path = self.out.join(name);
        let title = format!("{title}, seed {}", self.seed);
        emit_plot(&path, &title, xs, series).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn settings(args: &SweepArgs, run: &Run) -> Result<SearchSettings> {
    let mut s = SearchSettings::standard(args.n);
    if let Some(k) = &args.k_grid {
        s.grid.k_values = parse_usize_grid(k, args.n).context("--k-grid")?;
    }
    if let Some(p) = &args.p_grid {
        let p = parse_f64_grid(p).context("--p-grid")?;
        check_unit("p", &p)?;
        s.grid.p_values = p;
    }
    s.grid.refine = !args.no_refine;
    s.ensemble_size = args.ensemble;
    s.wiring = match args.wiring {
        Wiring::Random => InterCellWiring::RandomMembers,
        Wiring::Leaders => InterCellWiring::Leaders,
    };
    s.evaluator = Evaluator { estimator: run.estimator, closed_form: args.closed_form };
    Ok(s)
}

fn designs(args: &SweepArgs) -> Vec<Design> {
    if args.design.is_empty() {
        Design::ALL.to_vec()
    } else {
        args.design.clone()
    }
}

fn design_sweep(args: SweepArgs) -> Result<()> {
    let run = Run::new(&args.common)?;
    let settings = settings(&args, &run)?;
    for design in designs(&args) {
        let curves = fitness_curves(design, &run.taus, &run.rs, run.g, run.master(), &settings)?;
        for curve in curves {
            let stem = format!("curve_{}_r{}", design, curve.r);
            let table = curve_table(&curve).comment(format!("n={} g={}", args.n, run.g));
            run.write(&format!("{stem}.csv"), &table)?;
            if run.plot {
                let xs: Vec<f64> = curve.points.iter().map(|p| p.tau).collect();
                let series = [
                    ("fitness", curve.points.iter().map(|p| p.fitness).collect()),
                    ("R", curve.points.iter().map(|p| p.r_mean).collect()),
                    ("W", curve.points.iter().map(|p| p.w_mean).collect()),
                ];
                run.write_plot(&format!("{stem}.svg"), &format!("{design}, r = {}", curve.r), &xs, &series)?;
            }
        }
    }
    Ok(())
}

fn pareto(args: SweepArgs) -> Result<()> {
    let run = Run::new(&args.common)?;
    let settings = settings(&args, &run)?;
    let mut per_design = Vec::new();
    for design in designs(&args) {
        per_design.push(evaluate_surfaces(design, &run.taus, run.g, run.master(), &settings)?);
    }
    for (i, &tau) in run.taus.iter().enumerate() {
        let points = per_design.iter().flat_map(|s| &s[i].points).map(|p| ParetoPoint {
            r: p.r_mean,
            w: p.w_mean,
            config: p.config,
        });
        let frontier = pareto_frontier_of(points, run.epsilon)?;
        let table =
            pareto_table(&frontier).comment(format!("tau={tau} epsilon={} n={} g={}", run.epsilon, args.n, run.g));
        run.write(&format!("pareto_tau{tau}.csv"), &table)?;
    }
    Ok(())
}

fn sensitivity_cmd(args: SweepArgs) -> Result<()> {
    let run = Run::new(&args.common)?;
    let settings = settings(&args, &run)?;
    let mut rows = Vec::new();
    for design in designs(&args) {
        for curve in fitness_curves(design, &run.taus, &run.rs, run.g, run.master(), &settings)? {
            for surface in &curve.surfaces {
                rows.push((design, surface.tau, sensitivity(&surface.points, curve.r, NEAR_OPTIMAL_FRACTION)?));
            }
        }
    }
    let table = sensitivity_table(&rows).comment(format!("fraction={NEAR_OPTIMAL_FRACTION} n={} g={}", args.n, run.g));
    run.write("sensitivity.csv", &table)?;
    Ok(())
}

fn load_network(path: &Path) -> Result<LabeledNetwork> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let net = parse_edge_list(BufReader::new(file)).with_context(|| format!("{}", path.display()))?;
    let s = net.summary;
    println!(
        "{}: {} nodes, {} edges ({} edge lines, {} duplicates){}",
        path.display(),
        s.nodes,
        s.edges,
        s.edge_lines,
        s.duplicates,
        s.reference_match().map(|name| format!(", matches the published size of {name}")).unwrap_or_default()
    );
    Ok(net)
}

/// Distance weights from roles, multiplicities, or the file's third column.
fn network_weights(args: &NetworkArgs, net: &LabeledNetwork) -> Result<Option<(Weights, &'static str)>> {
    if let Some(path) = &args.roles {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let roles = parse_roles(BufReader::new(file)).with_context(|| format!("{}", path.display()))?;
        return Ok(Some((map_hijacker_weights(net, &roles)?, "roles")));
    }
    if args.multiplicity {
        let z = multiplicities(net)?;
        return Ok(Some((map_multiplicity_weights(&net.graph, &z)?, "multiplicity")));
    }
    Ok(net.weights.clone().map(|w| (w, "file")))
}

fn network_rows(run: &Run, net: &LabeledNetwork, weights: Option<&Weights>) -> Result<Vec<AnalysisRow>> {
    // fitness is affine in r, so one simulation pass serves every weight
    Ok(analyze_network(&net.graph, weights, &run.taus, 0.5, run.g, run.master(), &run.estimator)?)
}

fn analyze(args: NetworkArgs) -> Result<()> {
    let run = Run::new(&args.common)?;
    let net = load_network(&args.input)?;
    let weights = network_weights(&args, &net)?;
    let base = network_rows(&run, &net, weights.as_ref().map(|(w, _)| w))?;
    for &r in &run.rs {
        let rows: Vec<AnalysisRow> = base.iter().map(|row| row.at_weight(r)).collect();
        let mut table = analysis_table(&rows)
            .comment(format!("input={} r={r} g={}", args.input.display(), run.g))
            .comment(format!("nodes={} edges={}", net.summary.nodes, net.summary.edges));
        if let Some((_, source)) = &weights {
            table = table.comment(format!("weights={source}"));
        }
        run.write(&format!("analysis_r{r}.csv"), &table)?;
        if run.plot {
            let xs: Vec<f64> = rows.iter().map(|row| row.tau).collect();
            let mut series = vec![
                ("fitness", rows.iter().map(|row| row.binary.fitness).collect()),
                ("R", rows.iter().map(|row| row.binary.r).collect()),
                ("W", rows.iter().map(|row| row.binary.w).collect()),
            ];
            if weights.is_some() {
                series.push((
                    "weighted fitness",
                    rows.iter().filter_map(|row| row.weighted.map(|w| w.fitness)).collect(),
                ));
            }
            run.write_plot(&format!("analysis_r{r}.svg"), &format!("{}, r = {r}", args.input.display()), &xs, &series)?;
        }
    }
    Ok(())
}

fn compare_weighted(args: NetworkArgs) -> Result<()> {
    let run = Run::new(&args.common)?;
    let net = load_network(&args.input)?;
    let Some((weights, source)) = network_weights(&args, &net)? else {
        bail!("{} has no weights; add a third column, --roles or --multiplicity", args.input.display());
    };
    let base = network_rows(&run, &net, Some(&weights))?;
    let w_gap = base.iter().filter_map(AnalysisRow::efficiency_gap).fold(0.0, f64::max);
    for &r in &run.rs {
        let rows: Vec<AnalysisRow> = base.iter().map(|row| row.at_weight(r)).collect();
        let f_gap = rows.iter().filter_map(AnalysisRow::fitness_gap).fold(0.0, f64::max);
        let within = f_gap <= FITNESS_GAP_BOUND && w_gap <= EFFICIENCY_GAP_BOUND;
        println!(
            "r={r}: max |F gap| = {f_gap:.4}, |W gap| = {w_gap:.4} ({})",
            if within { "binary form agrees" } else { "binary form deviates" }
        );
        let table = analysis_table(&rows)
            .comment(format!("input={} r={r} g={} weights={source}", args.input.display(), run.g))
            .comment(format!(
                "max_F_gap={f_gap} W_gap={w_gap} bounds={FITNESS_GAP_BOUND},{EFFICIENCY_GAP_BOUND} within={within}"
            ));
        run.write(&format!("compare_r{r}.csv"), &table)?;
        if run.plot {
            let xs: Vec<f64> = rows.iter().map(|row| row.tau).collect();
            let series = [
                ("binary", rows.iter().map(|row| row.binary.fitness).collect()),
                ("weighted", rows.iter().filter_map(|row| row.weighted.map(|w| w.fitness)).collect()),
            ];
            run.write_plot(&format!("compare_r{r}.svg"), &format!("{}, r = {r}", args.input.display()), &xs, &series)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::DesignSweep(a) => design_sweep(a),
        Command::Pareto(a) => pareto(a),
        Command::Sensitivity(a) => sensitivity_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::CompareWeighted(a) => compare_weighted(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
