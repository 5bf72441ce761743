//! The `coopeq` command-line front end.
//!
//! [`run`] parses arguments, executes one command and writes its output,
//! returning the process exit code: 0 on success, 1 on a usage or input
//! error, 2 when a verification suite fails.

mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coopeq::{solve, sweep, sweep_schedule, BenefitSchedule, Prediction, SweepPoint};
use crate::empirics::{
    default_synthetic_npd, default_synthetic_pgg, rank_sum, read_datasets, summarize,
    synthetic_datasets, write_datasets, DecisionDataset, PValueMethod,
};
use crate::error::{Error, Result};
use crate::games::{GameSpec, Param, Variant};
use crate::oracle::{run_suite, Fault, GridSearchConfig, Suite};
use crate::preferences::{
    model_comparison, ComparisonSweeps, ModelKind, ModelRow, NpdSweep, PggSweep, PopulationSpec,
    PreferenceModel,
};

pub use output::{Cell, Format, OutputRecord, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "coopeq", version, about = "Cooperative equilibrium predictions for social dilemmas")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimals for text and CSV numbers (JSON keeps full precision).
    #[arg(long, global = true, default_value_t = 4)]
    precision: usize,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized commands; generated and printed when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML population file for the preference-model commands.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cooperative equilibrium of one game.
    Predict(PredictArgs),
    /// Equilibria along a parameter sweep.
    Sweep(SweepArgs),
    /// Direction of the group-size effect under each model.
    Compare(CompareArgs),
    /// Run oracle verification suites.
    Verify(VerifyArgs),
    /// Regenerate the prediction tables.
    Tables(TablesArgs),
    /// Summaries and rank-sum tests of decision data.
    Analyze(AnalyzeArgs),
    /// Write a seeded synthetic decision file.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GameKind {
    Pgg,
    Npd,
    Bertrand,
    GeneralPgg,
}

#[derive(Args, Debug, Clone, Default)]
struct GameParams {
    /// Number of players.
    #[arg(long)]
    n: Option<usize>,
    /// PGG marginal return.
    #[arg(long)]
    gamma: Option<f64>,
    /// PGG endowment; money outputs are reported in these units.
    #[arg(long)]
    endowment: Option<f64>,
    /// NPD benefit.
    #[arg(long)]
    b: Option<f64>,
    /// NPD cost.
    #[arg(long)]
    c: Option<f64>,
    /// Bertrand price floor.
    #[arg(long)]
    low: Option<f64>,
    /// Bertrand reservation value.
    #[arg(long)]
    high: Option<f64>,
    /// Benefit of the generalized PGG.
    #[arg(long = "b-n")]
    b_n: Option<f64>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(value_enum)]
    game: GameKind,
    #[command(flatten)]
    params: GameParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleKind {
    Linear,
    Constant,
    Capped,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(value_enum)]
    game: GameKind,
    #[command(flatten)]
    params: GameParams,
    /// Parameter to vary (n, gamma, endowment, b, c, low, high, b_n).
    #[arg(long, default_value = "n")]
    vary: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', conflicts_with = "range")]
    values: Vec<f64>,
    /// Inclusive range `start:end[:step]` (step defaults to 1).
    #[arg(long)]
    range: Option<String>,
    /// Benefit schedule for a generalized PGG swept over n.
    #[arg(long, value_enum)]
    schedule: Option<ScheduleKind>,
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    value: Option<f64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Models to include.
    #[arg(long, value_delimiter = ',', default_value = "fs,cr1,cr2,ce")]
    models: Vec<String>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// PGG group sizes, `start:end`.
    #[arg(long, default_value = "4:40")]
    pgg_n: String,
    #[arg(long, default_value_t = 0.3)]
    b: f64,
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    /// NPD group sizes, `start:end`.
    #[arg(long, default_value = "2:11")]
    npd_n: String,
    /// Sampled agents per population.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultKind {
    PerturbPrediction,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
    suite: String,
    #[arg(long, default_value_t = 1001)]
    grid_points: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Deliberate defect for negative-control runs.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultKind>,
    #[arg(long, default_value_t = 0.05)]
    fault_size: f64,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
    table: u8,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataGame {
    Pgg,
    Npd,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Delimited decision file.
    #[arg(long, required_unless_present = "synthetic")]
    input: Option<PathBuf>,
    /// Analyze freshly generated synthetic data instead of a file.
    #[arg(long, conflicts_with = "input")]
    synthetic: bool,
    /// Game of the synthetic data.
    #[arg(long, value_enum, default_value_t = DataGame::Pgg)]
    game: DataGame,
    /// Maximum contribution for rows without an endowment column.
    #[arg(long, default_value_t = 10.0)]
    endowment: f64,
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    #[arg(long, value_enum, default_value_t = DataGame::Pgg)]
    game: DataGame,
    #[arg(long, default_value_t = 10.0)]
    endowment: f64,
}

/// Runs the CLI on `args` (program name first), writing to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    eprint!("{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok((record, code)) => {
            let text = record.render(cli.format, cli.precision);
            let written = match &cli.out {
                Some(path) => fs::write(path, text).map_err(Error::from),
                None => out.write_all(text.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli) -> Result<(OutputRecord, i32)> {
    let ok = |r: OutputRecord| Ok((r, EXIT_OK));
    match &cli.command {
        Command::Predict(a) => ok(cmd_predict(a)?),
        Command::Sweep(a) => ok(cmd_sweep(a)?),
        Command::Compare(a) => ok(cmd_compare(cli, a)?),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Tables(a) => ok(cmd_tables(cli, a)?),
        Command::Analyze(a) => ok(cmd_analyze(cli, a)?),
        Command::Synthesize(a) => cmd_synthesize(cli, a),
    }
}

fn resolve_seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(rand::random)
}

fn need(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| Error::out_of_range(format!("missing --{flag}")))
}

fn kind_name(kind: GameKind) -> &'static str {
    match kind {
        GameKind::Pgg => "pgg",
        GameKind::Npd => "npd",
        GameKind::Bertrand => "bertrand",
        GameKind::GeneralPgg => "general-pgg",
    }
}

/// Builds a game from flags. `free` names a parameter that will be set later
/// and may therefore be missing.
fn build_game(kind: GameKind, p: &GameParams, free: Option<Param>) -> Result<GameSpec> {
    let pick = |v: Option<f64>, flag: &str, param: Param| match (v, free) {
        (Some(x), _) => Ok(x),
        (None, Some(f)) if f == param => Ok(f64::NAN),
        (None, _) => need(None, flag),
    };
    let n = match (p.n, free) {
        (Some(n), _) => n,
        (None, Some(Param::N)) => 0,
        (None, _) => return Err(Error::out_of_range("missing --n")),
    };
    Ok(match kind {
        GameKind::Pgg => GameSpec::Pgg {
            n,
            gamma: pick(p.gamma, "gamma", Param::Gamma)?,
            endowment: p.endowment.unwrap_or(1.0),
        },
        GameKind::Npd => GameSpec::npd(n, pick(p.b, "b", Param::B)?, pick(p.c, "c", Param::C)?),
        GameKind::Bertrand => GameSpec::bertrand(
            n,
            pick(p.low, "low", Param::Low)?,
            pick(p.high, "high", Param::High)?,
        ),
        GameKind::GeneralPgg => GameSpec::general_pgg(n, pick(p.b_n, "b-n", Param::BN)?),
    })
}

fn echo_game(record: &mut OutputRecord, spec: &GameSpec) {
    for (k, v) in spec.parameters() {
        record.param(k, v);
    }
}

/// Equilibrium, payoff and both forecasts, money in the game's currency.
fn prediction_cells(p: &Prediction) -> Vec<Cell> {
    let scale = p.game.scale();
    let mut row = vec![
        Cell::text(p.winning_structure.to_string()),
        Cell::num(p.equilibrium.value()),
    ];
    if matches!(p.game, GameSpec::Pgg { .. }) {
        row.push(Cell::num(p.equilibrium.value() * scale));
    }
    row.extend([
        Cell::num(p.equilibrium_payoff * scale),
        Cell::num(p.selfish.forecast * scale),
        Cell::num(p.cooperative.forecast * scale),
    ]);
    row
}

fn prediction_columns(spec: &GameSpec) -> Vec<&'static str> {
    let action = match spec.variant() {
        Variant::Npd => "cooperation_probability",
        Variant::Bertrand => "price",
        _ => "contribution_fraction",
    };
    let mut cols = vec!["winning_structure", action];
    if matches!(spec, GameSpec::Pgg { .. }) {
        cols.push("contribution");
    }
    cols.extend(["equilibrium_payoff", "v_selfish", "v_cooperative"]);
    cols
}

fn cmd_predict(a: &PredictArgs) -> Result<OutputRecord> {
    let spec = build_game(a.game, &a.params, None)?.validate()?;
    let p = solve(&spec)?;
    let mut record = OutputRecord::new(&format!("predict {}", kind_name(a.game)));
    echo_game(&mut record, &spec);

    let mut table = Table::new("prediction", &prediction_columns(&spec));
    table.push(prediction_cells(&p));
    record.tables.push(table);

    let scale = spec.scale();
    let mut forecasts = Table::new(
        "forecasts",
        &[
            "structure",
            "reference_action",
            "incentive",
            "disincentive",
            "tau_pair",
            "tau_nobody",
            "e_nobody",
            "e_deviation",
            "forecast",
        ],
    );
    for r in [&p.selfish, &p.cooperative] {
        forecasts.push(vec![
            Cell::text(r.structure.to_string()),
            Cell::num(r.reference_action),
            Cell::num(r.incentive * scale),
            Cell::num(r.disincentive * scale),
            Cell::num(r.tau_pair),
            Cell::num(r.tau_nobody),
            Cell::num(r.e_nobody * scale),
            Cell::num(r.e_deviation * scale),
            Cell::num(r.forecast * scale),
        ]);
    }
    record.tables.push(forecasts);
    Ok(record)
}

/// Parses `start:end[:step]` into an inclusive list.
fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::out_of_range(format!("bad range {text:?}, expected start:end[:step]"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, end, step) = match parts[..] {
        [s, e] => (s, e, 1.0),
        [s, e, st] => (s, e, st),
        _ => return Err(bad()),
    };
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::out_of_range("range has too many points"));
    }
    Ok((0..count).map(|k| start + step * k as f64).collect())
}

fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    parse_range(text)?
        .into_iter()
        .map(|v| {
            if v.fract() == 0.0 && v >= 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::out_of_range(format!("group size must be whole, got {v}")))
            }
        })
        .collect()
}

fn cmd_sweep(a: &SweepArgs) -> Result<OutputRecord> {
    let vary: Param = a.vary.parse()?;
    let values = match (&a.range, a.values.is_empty()) {
        (Some(r), _) => parse_range(r)?,
        (None, false) => a.values.clone(),
        (None, true) => return Err(Error::out_of_range("give --values or --range")),
    };
    let mut record = OutputRecord::new(&format!("sweep {}", kind_name(a.game)));
    let points: Vec<SweepPoint> = match a.schedule {
        Some(kind) => {
            if a.game != GameKind::GeneralPgg || vary != Param::N {
                return Err(Error::out_of_range(
                    "--schedule applies to general-pgg swept over n",
                ));
            }
            let schedule = match kind {
                ScheduleKind::Linear => BenefitSchedule::Linear {
                    slope: need(a.slope, "slope")?,
                },
                ScheduleKind::Constant => BenefitSchedule::Constant {
                    value: need(a.value, "value")?,
                },
                ScheduleKind::Capped => BenefitSchedule::Capped {
                    slope: need(a.slope, "slope")?,
                    cap: need(a.cap, "cap")?,
                },
            };
            record.param("schedule", format!("{kind:?}").to_lowercase());
            for (k, v) in [("slope", a.slope), ("cap", a.cap), ("value", a.value)] {
                if let Some(v) = v {
                    record.param(k, v);
                }
            }
            let ns = values
                .iter()
                .map(|&v| {
                    if v.fract() == 0.0 && v >= 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(Error::out_of_range(format!("group size must be whole, got {v}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            sweep_schedule(&schedule, &ns)?
        }
        None => {
            let template = build_game(a.game, &a.params, Some(vary))?;
            for (k, v) in template.parameters() {
                if k != vary.to_string() && !(k == "n" && vary == Param::N) {
                    record.param(k, v);
                }
            }
            sweep(&template, vary, &values)?
        }
    };
    record.param("vary", vary);
    record.param("points", values.len());

    let spec = points.first().map(|p| p.prediction.game);
    let action = match spec.map(|s| s.variant()) {
        Some(Variant::Npd) => "cooperation_probability",
        Some(Variant::Bertrand) => "price",
        _ => "contribution_fraction",
    };
    let mut table = Table::new(
        "sweep",
        &[&vary.to_string(), action, "equilibrium_payoff", "v_selfish", "v_cooperative"],
    );
    for pt in &points {
        let p = &pt.prediction;
        let scale = p.game.scale();
        let x = if vary == Param::N {
            Cell::int(pt.value as usize)
        } else {
            Cell::num(pt.value)
        };
        table.push(vec![
            x,
            Cell::num(p.equilibrium.value()),
            Cell::num(p.equilibrium_payoff * scale),
            Cell::num(p.selfish.forecast * scale),
            Cell::num(p.cooperative.forecast * scale),
        ]);
    }
    record.tables.push(table);
    Ok(record)
}

fn load_population(cli: &Cli) -> Result<Option<PopulationSpec>> {
    match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            PopulationSpec::from_toml_str(&text).map(Some)
        }
        None => Ok(None),
    }
}

fn comparison_record(
    cli: &Cli,
    command: &str,
    sweeps: &ComparisonSweeps,
    models: &[ModelKind],
    samples: usize,
) -> Result<OutputRecord> {
    let seed = resolve_seed(cli);
    let config = load_population(cli)?;
    let population = |m: PreferenceModel| match &config {
        Some(pop) if pop.model() == Some(m) => pop.clone(),
        _ => PopulationSpec::default_for(m, samples, seed),
    };
    let rows = model_comparison(sweeps, models, population)?;
    let mut record = OutputRecord::new(command);
    record.seed = Some(seed);
    record.param("gamma", sweeps.pgg.gamma);
    record.param("b", sweeps.npd.b);
    record.param("c", sweeps.npd.c);
    record.param("pgg_n", span(&sweeps.pgg.ns));
    record.param("npd_n", span(&sweeps.npd.ns));
    record.param("samples", samples);
    if let Some(path) = &cli.config {
        record.param("config", path.display());
    }
    record.tables.push(effects_table(&rows));
    let mut measures = Table::new(
        "measures",
        &["Model", "PGG first", "PGG last", "NPD first", "NPD last"],
    );
    for r in &rows {
        let ends = |v: &[f64]| {
            (
                Cell::num(v.first().copied().unwrap_or(f64::NAN)),
                Cell::num(v.last().copied().unwrap_or(f64::NAN)),
            )
        };
        let (pf, pl) = ends(&r.pgg_measure);
        let (nf, nl) = ends(&r.npd_measure);
        measures.push(vec![Cell::text(r.model.to_string()), pf, pl, nf, nl]);
    }
    record.tables.push(measures);
    Ok(record)
}

fn span(ns: &[usize]) -> String {
    format!(
        "{}:{}",
        ns.first().copied().unwrap_or(0),
        ns.last().copied().unwrap_or(0)
    )
}

fn effects_table(rows: &[ModelRow]) -> Table {
    let mut t = Table::new("model comparison", &["Model", "PGG", "NPD", "free parameters"]);
    for r in rows {
        t.push(vec![
            Cell::text(r.model.to_string()),
            Cell::text(r.pgg.to_string()),
            Cell::text(r.npd.to_string()),
            Cell::text(r.free_parameters.to_string()),
        ]);
    }
    t
}

fn cmd_compare(cli: &Cli, a: &CompareArgs) -> Result<OutputRecord> {
    let models = a
        .models
        .iter()
        .map(|m| ModelKind::parse(m))
        .collect::<Result<Vec<_>>>()?;
    let sweeps = ComparisonSweeps {
        pgg: PggSweep {
            gamma: a.gamma,
            ns: parse_sizes(&a.pgg_n)?,
        },
        npd: NpdSweep {
            b: a.b,
            c: a.c,
            ns: parse_sizes(&a.npd_n)?,
        },
    };
    let mut record = comparison_record(cli, "compare", &sweeps, &models, a.samples)?;
    record.param(
        "models",
        models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
    );
    Ok(record)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<(OutputRecord, i32)> {
    let suite: Suite = a.suite.parse()?;
    let seed = resolve_seed(cli);
    let cfg = GridSearchConfig {
        grid_points: a.grid_points,
        tolerance: a.tolerance,
        ..GridSearchConfig::default()
    };
    let fault = match a.inject_fault {
        Some(FaultKind::PerturbPrediction) => Fault::PerturbPrediction(a.fault_size),
        None => Fault::None,
    };
    let report = run_suite(suite, seed, &cfg, fault)?;
    let mut record = OutputRecord::new("verify");
    record.seed = report.seed;
    record.param("suite", suite);
    record.param("grid_points", cfg.grid_points);
    record.param("tolerance", cfg.tolerance);
    if let Fault::PerturbPrediction(d) = fault {
        record.param("inject_fault", format!("perturb-prediction:{d}"));
    }
    let mut checks = Table::new("checks", &["check", "parameters", "residual", "verdict"]);
    for r in &report.records {
        let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        checks.push(vec![
            Cell::text(r.check.clone()),
            Cell::text(params.join(" ")),
            Cell::num(r.residual),
            Cell::text(r.verdict.to_string()),
        ]);
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &report.records {
        let e = counts.entry(r.check.as_str()).or_default();
        e.0 += 1;
        if r.verdict == crate::oracle::Verdict::Fail {
            e.1 += 1;
        }
    }
    let mut summary = Table::new("summary", &["check", "runs", "failures"]);
    for (check, (runs, fails)) in counts {
        summary.push(vec![
            Cell::text(check),
            Cell::int(runs),
            Cell::int(fails),
        ]);
    }
    record.tables.push(summary);
    record.tables.push(checks);
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    Ok((record, code))
}

fn cmd_tables(cli: &Cli, a: &TablesArgs) -> Result<OutputRecord> {
    match a.table {
        3 => {
            let mut r = comparison_record(
                cli,
                "tables",
                &ComparisonSweeps::default(),
                &ModelKind::ALL,
                a.samples,
            )?;
            r.param("table", 3);
            Ok(r)
        }
        4 => {
            let mut r = OutputRecord::new("tables");
            r.param("table", 4);
            r.param("gamma", 0.5);
            r.param("endowment", 10);
            let mut t = Table::new("CE prediction, public goods game", &["Condition", "n", "CE prediction"]);
            for (label, n) in [("S", 4), ("L", 40)] {
                let spec = GameSpec::Pgg {
                    n,
                    gamma: 0.5,
                    endowment: 10.0,
                };
                let p = solve(&spec)?;
                t.push(vec![
                    Cell::text(label),
                    Cell::int(n),
                    Cell::num(p.equilibrium.value() * spec.scale()),
                ]);
            }
            r.tables.push(t);
            Ok(r)
        }
        5 => {
            let mut r = OutputRecord::new("tables");
            r.param("table", 5);
            r.param("b", 0.3);
            r.param("c", 0.1);
            let mut t = Table::new(
                "CE prediction, prisoner's dilemma",
                &["Condition", "n", "CE prediction (% cooperators)"],
            );
            for (label, n) in [("S", 2), ("L", 11)] {
                let p = solve(&GameSpec::npd(n, 0.3, 0.1))?;
                t.push(vec![
                    Cell::text(label),
                    Cell::int(n),
                    Cell::num(100.0 * p.equilibrium.value()),
                ]);
            }
            r.tables.push(t);
            Ok(r)
        }
        other => Err(Error::out_of_range(format!("no table {other}"))),
    }
}

fn synthetic_conditions(game: DataGame) -> Vec<crate::empirics::SyntheticCondition> {
    match game {
        DataGame::Pgg => default_synthetic_pgg(),
        DataGame::Npd => default_synthetic_npd(),
    }
}

fn game_label(game: DataGame) -> &'static str {
    match game {
        DataGame::Pgg => "pgg",
        DataGame::Npd => "npd",
    }
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<OutputRecord> {
    let mut record = OutputRecord::new("analyze");
    let data: Vec<DecisionDataset> = if a.synthetic {
        let seed = resolve_seed(cli);
        record.seed = Some(seed);
        record.param("synthetic", game_label(a.game));
        synthetic_datasets(&synthetic_conditions(a.game), a.endowment, seed)?
    } else {
        let path = a.input.as_ref().expect("clap requires --input");
        record.param("input", path.display());
        let file = fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        read_datasets(file, a.endowment)?
    };
    record.param("endowment", a.endowment);

    let summaries = data.iter().map(summarize).collect::<Result<Vec<_>>>()?;
    let pgg: Vec<_> = summaries.iter().filter(|s| s.variant == Variant::Pgg).collect();
    let npd: Vec<_> = summaries.iter().filter(|s| s.variant == Variant::Npd).collect();
    if !pgg.is_empty() {
        let mut t = Table::new(
            "public goods game",
            &["Condition", "n", "% free-riders", "% contributors", "Mean contribution", "SEM"],
        );
        for s in pgg {
            t.push(vec![
                Cell::text(s.condition.clone()),
                Cell::int(s.n_subjects),
                Cell::num(s.pct_free_riders.unwrap_or(f64::NAN)),
                Cell::num(s.pct_full_contributors.unwrap_or(f64::NAN)),
                Cell::num(s.mean),
                Cell::num(s.sem),
            ]);
        }
        record.tables.push(t);
    }
    if !npd.is_empty() {
        let mut t = Table::new("prisoner's dilemma", &["Condition", "n", "% cooperators", "SEM"]);
        for s in npd {
            t.push(vec![
                Cell::text(s.condition.clone()),
                Cell::int(s.n_subjects),
                Cell::num(s.pct_cooperators.unwrap_or(f64::NAN)),
                Cell::num(s.sem),
            ]);
        }
        record.tables.push(t);
    }

    let mut tests = Table::new(
        "rank-sum",
        &["Condition A", "Condition B", "U", "p", "method"],
    );
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            if data[i].variant != data[j].variant {
                continue;
            }
            let r = rank_sum(&data[i].decisions, &data[j].decisions)?;
            tests.push(vec![
                Cell::text(data[i].condition.clone()),
                Cell::text(data[j].condition.clone()),
                Cell::num(r.u),
                Cell::num(r.p_value),
                Cell::text(match r.method {
                    PValueMethod::Exact => "exact",
                    PValueMethod::Normal => "normal",
                }),
            ]);
        }
    }
    if !tests.rows.is_empty() {
        record.tables.push(tests);
    }
    Ok(record)
}

/// Writes raw decision data rather than an output record.
fn cmd_synthesize(cli: &Cli, a: &SynthesizeArgs) -> Result<(OutputRecord, i32)> {
    let seed = resolve_seed(cli);
    let data = synthetic_datasets(&synthetic_conditions(a.game), a.endowment, seed)?;
    let mut record = OutputRecord::new("synthesize");
    record.seed = Some(seed);
    record.param("game", game_label(a.game));
    record.param("endowment", a.endowment);
    let mut buf = Vec::new();
    write_datasets(&mut buf, &data)?;
    let text = String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    let cols: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut table = Table::new("decisions", &cols);
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        table.push(rec.iter().map(Cell::text).collect());
    }
    record.tables.push(table);
    Ok((record, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let mut full = vec!["coopeq"];
        full.extend_from_slice(args);
        let code = run(full, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2:5").unwrap(), vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(parse_range("0.3:0.9:0.3").unwrap().len(), 3);
        assert!(parse_range("5:2").is_err());
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn predict_and_usage_errors() {
        let (code, out) = run_str(&["predict", "npd", "--n", "2", "--b", "0.3", "--c", "0.1"]);
        assert_eq!(code, 0);
        assert!(out.contains("0.5000"), "{out}");
        assert_eq!(run_str(&["predict", "npd", "--n", "2", "--b", "0.3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["predict", "npd", "--n", "2", "--b", "0.1", "--c", "0.3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn endowment_scaling_is_exact() {
        let get = |endowment: &str| {
            let (_, out) = run_str(&[
                "--format", "json", "predict", "pgg", "--n", "40", "--gamma", "0.5", "--endowment", endowment,
            ]);
            OutputRecord::from_json(&out).unwrap()
        };
        let unit = get("1");
        let ten = get("10");
        let (u, t) = (&unit.tables[0], &ten.tables[0]);
        for col in ["contribution", "equilibrium_payoff", "v_selfish", "v_cooperative"] {
            let j = u.column(col).unwrap();
            assert_eq!(t.rows[0][j].as_f64().unwrap(), 10.0 * u.rows[0][j].as_f64().unwrap());
        }
        let j = u.column("contribution_fraction").unwrap();
        assert_eq!(t.rows[0][j], u.rows[0][j]);
    }
}
