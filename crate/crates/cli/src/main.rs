use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jamgame::belief::UniformPrior;
use jamgame::best_response::thresholds;
use jamgame::config::{self, ScenarioConfig};
use jamgame::nash::{brd, nash_closed_form, DEFAULT_MAX_ITER, DEFAULT_TOL};
use jamgame::report::{brd_table, events_table, history_table, Cell, Table};
use jamgame::sim::{run_sim, updates_to_ne, SimConfig};
use jamgame::stackelberg::{
    approximation_accuracy, bracket_width_for_loss, default_leader_loss, improvement_report,
    leader_utility, stackelberg_approx_x, stackelberg_exact,
};
use jamgame::sweep::{log_range, sweep, threads_from_env, Figure, SweepOptions};
use jamgame::StrategyProfile;

const DEFAULT_TOTAL_CYCLES: usize = 1000;

#[derive(Parser)]
#[command(
    name = "jamgame",
    version,
    about = "Timing-channel jamming game solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form Nash equilibrium, optionally with the BRD trace.
    Nash {
        #[command(flatten)]
        common: Common,
        /// Also run best-response dynamics and print every iterate.
        #[arg(long)]
        brd: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// BRD start; defaults to the smallest admissible x.
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
    },
    /// Stackelberg equilibrium with the target as leader.
    Stackelberg {
        #[command(flatten)]
        common: Common,
        /// Use the closed-form approximation instead of bisection.
        #[arg(long)]
        approx: bool,
        /// Tolerated leader utility loss of the bisection.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Sweep a parameter and write one CSV row per point.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        figure: Figure,
        /// Swept parameter; must match the figure (c_t, or y/x for brX/brY).
        #[arg(long)]
        param: Option<String>,
        #[arg(long, num_args = 3, value_names = ["A", "B", "N"], required = true)]
        log_range: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        xi_min: Option<f64>,
        #[arg(long)]
        xi_max: Option<f64>,
    },
    /// Simulate the game cycle by cycle and write the strategy history.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// RNG seed; drawn at random and recorded when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write every cycle to this file.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        total_cycles: Option<usize>,
        #[arg(long)]
        period: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Invariant(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Invariant(m) | Failure::Io(m) => m,
        }
    }
}

impl From<jamgame::Error> for Failure {
    fn from(e: jamgame::Error) -> Self {
        Failure::Invariant(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let cfg =
        config::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    cfg.params.validate()?;
    Ok(cfg)
}

fn emit(table: &Table, out: impl Write, what: &Path) -> Outcome {
    table.write_csv(out).map_err(|e| io_err(what, e))
}

fn stdout_path() -> &'static Path {
    Path::new("<stdout>")
}

fn cmd_nash(
    common: &Common,
    with_brd: bool,
    tol: f64,
    max_iter: usize,
    x0: Option<f64>,
    y0: f64,
) -> Outcome {
    let cfg = load(&common.config)?;
    let p = cfg.params;
    let ne = nash_closed_form(&p)?;
    let th = thresholds(&p);
    let mut t = Table::new(vec![
        "x_ne",
        "y_ne",
        "regime",
        "u_t",
        "u_j",
        "c_t_tilde",
        "c_t_max",
    ]);
    t.rows.push(vec![
        ne.profile.x.into(),
        ne.profile.y.into(),
        Cell::Text(ne.regime.as_str()),
        ne.utilities.u_t.into(),
        ne.utilities.u_j.into(),
        th.c_t_tilde.into(),
        th.c_t_max.into(),
    ]);
    let mut out = io::stdout().lock();
    emit(&t, &mut out, stdout_path())?;
    if with_brd {
        let start = StrategyProfile::new(x0.unwrap_or(p.x_min()), y0);
        let trace = brd(&p, start, tol, max_iter)?;
        writeln!(out).map_err(|e| io_err(stdout_path(), e))?;
        emit(&brd_table(&trace), &mut out, stdout_path())?;
        if !trace.converged {
            eprintln!("warning: BRD did not converge within {max_iter} iterations");
        }
    }
    Ok(())
}

fn cmd_stackelberg(common: &Common, approx: bool, epsilon: Option<f64>) -> Outcome {
    let cfg = load(&common.config)?;
    let p = cfg.params;
    let loss = match epsilon {
        Some(e) if e > 0.0 => e,
        Some(e) => {
            return Err(Failure::Config(format!(
                "--epsilon must be positive, got {e}"
            )))
        }
        None => default_leader_loss(&p),
    };
    let report = improvement_report(&p)?;
    let mut header = vec!["x_se", "y_se", "u_t_se", "u_t_ne", "improved"];
    let row = if approx {
        header.push("accuracy_ratio");
        let x = stackelberg_approx_x(&p)?;
        let u = leader_utility(&p, x)?;
        vec![
            x.into(),
            0.0.into(),
            u.into(),
            report.u_t_ne.into(),
            Cell::Bool(u > report.u_t_ne + 1e-12),
            approximation_accuracy(&p)?.into(),
        ]
    } else {
        let se = stackelberg_exact(&p, bracket_width_for_loss(&p, loss))?;
        vec![
            se.profile.x.into(),
            se.profile.y.into(),
            se.utilities.u_t.into(),
            report.u_t_ne.into(),
            Cell::Bool(se.utilities.u_t > report.u_t_ne + 1e-12),
        ]
    };
    let mut t = Table::new(header);
    t.rows.push(row);
    emit(&t, io::stdout().lock(), stdout_path())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &Common,
    figure: Figure,
    param: Option<&str>,
    range: &[String],
    out: Option<&Path>,
    xi_min: Option<f64>,
    xi_max: Option<f64>,
) -> Outcome {
    if let Some(name) = param {
        if name != figure.param() {
            return Err(Failure::Config(format!(
                "figure {figure} sweeps `{}`, not `{name}`",
                figure.param()
            )));
        }
    }
    let bad =
        |what: &str, v: &str| Failure::Config(format!("--log-range {what}: cannot parse {v:?}"));
    let a: f64 = range[0].parse().map_err(|_| bad("a", &range[0]))?;
    let b: f64 = range[1].parse().map_err(|_| bad("b", &range[1]))?;
    let n: usize = range[2].parse().map_err(|_| bad("n", &range[2]))?;
    let values = log_range(a, b, n).map_err(Failure::Config)?;

    let cfg = load(&common.config)?;
    let defaults = SweepOptions::default().prior;
    let lo = xi_min.or(cfg.xi_min).unwrap_or(defaults.xi_min);
    let hi = xi_max.or(cfg.xi_max).unwrap_or(defaults.xi_max);
    let prior =
        UniformPrior::new(lo, hi).map_err(|e| Failure::Config(format!("xi_min/xi_max: {e}")))?;
    let opts = SweepOptions {
        prior,
        threads: threads_from_env(),
    };
    let table = sweep(figure, &cfg.params, &values, &opts)?;
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| io_err(path, e))?;
            emit(&table, BufWriter::new(f), path)
        }
        None => emit(&table, io::stdout().lock(), stdout_path()),
    }
}

fn write_trace_file(path: &Path, preamble: &str, table: &Table) -> Outcome {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    w.write_all(preamble.as_bytes())
        .map_err(|e| io_err(path, e))?;
    emit(table, w, path)
}

fn cmd_simulate(
    common: &Common,
    seed: Option<u64>,
    out: &Path,
    events: Option<&Path>,
    total_cycles: Option<usize>,
    period: Option<usize>,
) -> Outcome {
    let cfg = load(&common.config)?;
    let seed = seed.unwrap_or_else(rand::random);
    let total = total_cycles
        .or(cfg.total_cycles)
        .unwrap_or(DEFAULT_TOTAL_CYCLES);
    let mut sim = SimConfig::new(cfg.params, total, seed);
    sim.update_period_cycles = period.unwrap_or(cfg.update_period_cycles);
    if let Err(e) = sim.validate() {
        return Err(Failure::Config(e.to_string()));
    }
    let trace = run_sim(&sim)?;
    let preamble = format!(
        "# rng = {}\n# seed = {}\n# update_period_cycles = {}\n# total_cycles = {}\n",
        trace.rng, seed, sim.update_period_cycles, total
    );
    write_trace_file(out, &preamble, &history_table(&trace))?;
    if let Some(path) = events {
        write_trace_file(path, &preamble, &events_table(&trace))?;
    }

    let last = trace.final_profile();
    let k = updates_to_ne(&cfg.params, &trace)?;
    let mut t = Table::new(vec![
        "final_x",
        "final_y",
        "updates_to_ne",
        "realized_capacity",
        "u_t",
        "u_j",
        "seed",
    ]);
    t.rows.push(vec![
        last.x.into(),
        last.y.into(),
        k.map_or(Cell::Empty, |k| Cell::Int(k as u64)),
        trace.realized_capacity.into(),
        trace.realized_utilities.u_t.into(),
        trace.realized_utilities.u_j.into(),
        Cell::Int(seed),
    ]);
    emit(&t, io::stdout().lock(), stdout_path())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Nash {
            common,
            brd,
            tol,
            max_iter,
            x0,
            y0,
        } => cmd_nash(common, *brd, *tol, *max_iter, *x0, *y0),
        Command::Stackelberg {
            common,
            approx,
            epsilon,
        } => cmd_stackelberg(common, *approx, *epsilon),
        Command::Sweep {
            common,
            figure,
            param,
            log_range,
            out,
            xi_min,
            xi_max,
        } => cmd_sweep(
            common,
            *figure,
            param.as_deref(),
            log_range,
            out.as_deref(),
            *xi_min,
            *xi_max,
        ),
        Command::Simulate {
            common,
            seed,
            out,
            events,
            total_cycles,
            period,
        } => cmd_simulate(
            common,
            *seed,
            out,
            events.as_deref(),
            *total_cycles,
            *period,
        ),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
