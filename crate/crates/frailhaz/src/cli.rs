use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frailhaz_core::adjust::{hazard_ratio_curve, trr_sensitivity_curve, Curve};
use frailhaz_core::iv::{iv_estimate, IvInput};
use frailhaz_core::sim::{
    coverage_study, run_scenario_with, CoverageReport, ScenarioConfig, ScenarioOutcome,
};
use frailhaz_core::solver::{scan_residual, solve_with_hazard};
use frailhaz_core::uncertainty::{numeric_ci_with, plugin_ci};
use frailhaz_core::{CiConfig, FrailtySummary, HazardRatio, PvfFamily, Scale, SummaryEstimate};

use crate::config::parse_scenario;
use crate::error::CliError;
use crate::exec::RayonExecutor;
use crate::format::write_csv;
use crate::record::{ErrorInfo, OutputRecord};

#[derive(Debug, Parser)]
#[command(
    name = "frailhaz",
    version,
    about = "Frailty-adjusted hazard ratios from twin-study summary data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frailty parameter reproducing TRR(t1) and S(t1).
    SolveNu(SolveNuArgs),
    /// Causal hazard ratio from a marginal one, with a confidence interval.
    Adjust(AdjustArgs),
    /// Curve data as CSV: marginal HR against survival, or causal HR against TRR.
    Curve(CurveArgs),
    /// Simulate a scenario once, or run a coverage study.
    Simulate(SimulateArgs),
    /// Instrumental-variable effect per unit of exposure.
    Iv(IvArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gamma,
    InverseGaussian,
    Hougaard,
    CompoundPoisson,
}

#[derive(Debug, Clone, Args)]
pub struct FamilySpec {
    #[arg(long, value_enum, default_value = "gamma")]
    pub family: FamilyArg,
    /// Hougaard shape, in (-1, 0).
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Compound Poisson non-susceptible fraction, in (0, 1).
    #[arg(long)]
    pub nonsusceptible: Option<f64>,
}

impl FamilySpec {
    fn resolve(&self) -> Result<PvfFamily, CliError> {
        let family = match (self.family, self.m, self.nonsusceptible) {
            (FamilyArg::Gamma, None, None) => PvfFamily::Gamma,
            (FamilyArg::InverseGaussian, None, None) => PvfFamily::InverseGaussian,
            (FamilyArg::Hougaard, Some(m), None) => PvfFamily::hougaard(m)?,
            (FamilyArg::CompoundPoisson, None, Some(q)) => PvfFamily::compound_poisson(q)?,
            (FamilyArg::Hougaard, None, _) => {
                return Err(CliError::usage("--family hougaard requires --m"))
            }
            (FamilyArg::CompoundPoisson, _, None) => {
                return Err(CliError::usage(
                    "--family compound-poisson requires --nonsusceptible",
                ))
            }
            (_, Some(_), _) => {
                return Err(CliError::usage("--m applies only to --family hougaard"))
            }
            (_, _, Some(_)) => {
                return Err(CliError::usage(
                    "--nonsusceptible applies only to --family compound-poisson",
                ))
            }
        };
        Ok(family)
    }

    fn echo(&self, family: &PvfFamily, record: &mut OutputRecord) {
        record.input("family", family.name());
        match family {
            PvfFamily::Hougaard { m } => {
                record.input("m", *m);
            }
            PvfFamily::CompoundPoisson { nonsusceptible } => {
                record.input("nonsusceptible", *nonsusceptible);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveNuArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    /// Twin recurrence risk at t1.
    #[arg(long)]
    pub trr: f64,
    /// Population survival to t1.
    #[arg(long)]
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CiKind {
    Plugin,
    Numeric,
}

#[derive(Debug, Args)]
pub struct AdjustArgs {
    #[command(flatten)]
    pub family: FamilySpec,
    #[arg(long)]
    pub rmar: f64,
    #[arg(long, requires = "rmar_hi")]
    pub rmar_lo: Option<f64>,
    #[arg(long, requires = "rmar_lo")]
    pub rmar_hi: Option<f64>,
    #[arg(long)]
    pub trr: f64,
    #[arg(long, requires = "trr_hi")]
    pub trr_lo: Option<f64>,
    #[arg(long, requires = "trr_lo")]
    pub trr_hi: Option<f64>,
    #[arg(long)]
    pub s: f64,
    #[arg(long, requires = "s_hi")]
    pub s_lo: Option<f64>,
    #[arg(long, requires = "s_lo")]
    pub s_hi: Option<f64>,
    #[arg(long, value_enum, default_value = "plugin")]
    pub ci: CiKind,
    /// Monte-Carlo draws for `--ci numeric`.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    /// Marginal HR against the fraction surviving (`s,r_mar`).
    Truncation,
    /// Causal HR against the twin recurrence risk (`trr,r_causal`).
    Trr,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub kind: CurveKind,
    #[command(flatten)]
    pub family: FamilySpec,
    /// Causal hazard ratio (truncation curves).
    #[arg(long)]
    pub r: Option<f64>,
    /// Frailty variance (truncation curves).
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    /// Marginal hazard ratio (TRR curves).
    #[arg(long)]
    pub rmar: Option<f64>,
    /// Population survival to t1 (TRR curves).
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub grid_from: Option<f64>,
    #[arg(long)]
    pub grid_to: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub grid_points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the full report as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IvArgs {
    /// Frailty-adjusted hazard ratio between instrument levels.
    #[arg(long)]
    pub adjusted_hr: f64,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    /// Exposure change per unit of instrument.
    #[arg(long, allow_hyphen_values = true)]
    pub bg: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub g1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub g2: f64,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveNu(_) => "solve-nu",
            Command::Adjust(_) => "adjust",
            Command::Curve(_) => "curve",
            Command::Simulate(_) => "simulate",
            Command::Iv(_) => "iv",
        }
    }
}

/// What a command produced besides its record; the summary goes to stderr.
pub enum Output {
    Record {
        summary: String,
    },
    Csv {
        text: String,
        warnings: Vec<String>,
        summary: String,
    },
}

/// Runs a command, filling `record` as inputs are read and results computed.
/// On error the record still holds whatever inputs were echoed.
pub fn execute(command: &Command, record: &mut OutputRecord) -> Result<Output, CliError> {
    match command {
        Command::SolveNu(a) => solve_nu(a, record),
        Command::Adjust(a) => adjust(a, record),
        Command::Curve(a) => curve(a, record),
        Command::Simulate(a) => simulate(a, record),
        Command::Iv(a) => iv(a, record),
    }
}

/// Parses arguments, runs the command, prints, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut record = OutputRecord::new(cli.command.name());
    match execute(&cli.command, &mut record) {
        Ok(Output::Record { summary }) => {
            println!("{}", record.to_line());
            eprintln!("{summary}");
            0
        }
        Ok(Output::Csv {
            text,
            warnings,
            summary,
        }) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            for w in warnings {
                let mut record = OutputRecord::new(cli.command.name());
                record.warnings.push(w);
                eprintln!("{}", record.to_line());
            }
            if !summary.is_empty() {
                eprintln!("{summary}");
            }
            0
        }
        Err(e) => {
            record.results.clear();
            record.error = Some(ErrorInfo {
                code: e.code().to_string(),
                message: e.to_string(),
            });
            println!("{}", record.to_line());
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn solve_nu(a: &SolveNuArgs, record: &mut OutputRecord) -> Result<Output, CliError> {
    let family = a.family.resolve()?;
    a.family.echo(&family, record);
    record.input("trr", a.trr).input("s", a.s);

    let summary = FrailtySummary::new(a.trr, a.s)?;
    let (params, h0) = solve_with_hazard(family, &summary)?;
    record
        .result("nu", params.nu())
        .result("variance", params.variance())
        .result("h0", h0.value());
    if !params.is_gamma() {
        record.result("rho", params.rho()).result("m", params.m());
    }
    if scan_residual(family, &summary, 64)?.suspect_multiple_roots() {
        record
            .warnings
            .push("residual is not monotone in nu; the root may not be unique".into());
    }
    let text = format!(
        "{}: nu = {:.6}, Var(U) = {:.6}, H0(t1) = {:.6}",
        family.name(),
        params.nu(),
        params.variance(),
        h0.value()
    );
    Ok(Output::Record { summary: text })
}

fn estimate(
    value: f64,
    bounds: (Option<f64>, Option<f64>),
    scale: Scale,
    name: &str,
) -> Result<SummaryEstimate, CliError> {
    let est = match bounds {
        (Some(lo), Some(hi)) => SummaryEstimate::new(value, lo, hi, scale),
        _ => SummaryEstimate::exact(value, scale),
    };
    est.map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

fn adjust(a: &AdjustArgs, record: &mut OutputRecord) -> Result<Output, CliError> {
    let family = a.family.resolve()?;
    a.family.echo(&family, record);
    record.input("rmar", a.rmar);
    if let (Some(lo), Some(hi)) = (a.rmar_lo, a.rmar_hi) {
        record.input("rmar_lo", lo).input("rmar_hi", hi);
    }
    record.input("trr", a.trr);
    if let (Some(lo), Some(hi)) = (a.trr_lo, a.trr_hi) {
        record.input("trr_lo", lo).input("trr_hi", hi);
    }
    record.input("s", a.s);
    if let (Some(lo), Some(hi)) = (a.s_lo, a.s_hi) {
        record.input("s_lo", lo).input("s_hi", hi);
    }
    record.input(
        "ci",
        match a.ci {
            CiKind::Plugin => "plugin",
            CiKind::Numeric => "numeric",
        },
    );

    let r_mar = estimate(a.rmar, (a.rmar_lo, a.rmar_hi), Scale::Log, "rmar")?;
    let summary = FrailtySummary::new(a.trr, a.s)?;
    let (params, h0) = solve_with_hazard(family, &summary)?;
    record
        .result("nu", params.nu())
        .result("variance", params.variance())
        .result("h0", h0.value());

    let (point, lo, hi) = match a.ci {
        CiKind::Plugin => {
            if a.trr_lo.is_some() || a.s_lo.is_some() {
                record.warnings.push(
                    "plug-in interval ignores the TRR and S(t1) intervals; use --ci numeric".into(),
                );
            }
            let ci = plugin_ci(family, &r_mar, a.trr, a.s)?;
            (ci.point.value(), ci.lo, ci.hi)
        }
        CiKind::Numeric => {
            record.input("draws", a.draws);
            record.seed = Some(a.seed);
            let trr = estimate(a.trr, (a.trr_lo, a.trr_hi), Scale::Log, "trr")?;
            let s = estimate(a.s, (a.s_lo, a.s_hi), Scale::Identity, "s")?;
            let cfg = CiConfig {
                n_draws: a.draws,
                seed: a.seed,
                ..CiConfig::default()
            };
            let ci = numeric_ci_with(&RayonExecutor::from_env(), family, &r_mar, &trr, &s, &cfg)?;
            record.result("n_failed", ci.n_failed);
            if ci.n_failed > 0 {
                let kinds: Vec<String> = ci
                    .failures
                    .iter()
                    .map(|(k, n)| format!("{k} x{n}"))
                    .collect();
                record.warnings.push(format!(
                    "{} of {} draws failed ({})",
                    ci.n_failed,
                    a.draws,
                    kinds.join(", ")
                ));
            }
            (ci.point.value(), ci.lo, ci.hi)
        }
    };
    record
        .result("r_causal", point)
        .result("lo", lo)
        .result("hi", hi);
    let text = format!(
        "{}: r_mar {} -> r_causal {:.4} [{:.4}, {:.4}] (nu = {:.4})",
        family.name(),
        a.rmar,
        point,
        lo,
        hi,
        params.nu()
    );
    Ok(Output::Record { summary: text })
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::usage("--grid-points must be positive"));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::usage("grid bounds must be finite"));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                to
            } else {
                from + (to - from) * i as f64 / (points - 1) as f64
            }
        })
        .collect())
}

fn curve(a: &CurveArgs, record: &mut OutputRecord) -> Result<Output, CliError> {
    let family = a.family.resolve()?;
    a.family.echo(&family, record);
    record.input(
        "kind",
        match a.kind {
            CurveKind::Truncation => "truncation",
            CurveKind::Trr => "trr",
        },
    );
    let (header, curve): ([&str; 2], Curve) = match a.kind {
        CurveKind::Truncation => {
            let r =
                a.r.ok_or_else(|| CliError::usage("--kind truncation requires --r"))?;
            let grid = grid(
                a.grid_from.unwrap_or(1.0),
                a.grid_to.unwrap_or(0.01),
                a.grid_points,
            )?;
            if grid.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
                return Err(CliError::usage("survival grid must lie in (0, 1]"));
            }
            let r = HazardRatio::new(r)?;
            (
                ["s", "r_mar"],
                hazard_ratio_curve(family, a.variance, r, &grid)?,
            )
        }
        CurveKind::Trr => {
            let r_mar = a
                .rmar
                .ok_or_else(|| CliError::usage("--kind trr requires --rmar"))?;
            let s =
                a.s.ok_or_else(|| CliError::usage("--kind trr requires --s"))?;
            let grid = grid(
                a.grid_from.unwrap_or(1.01),
                a.grid_to.unwrap_or(1.6),
                a.grid_points,
            )?;
            if grid.iter().any(|t| !(*t > 1.0)) {
                return Err(CliError::usage("TRR grid must lie above 1"));
            }
            let r_mar = HazardRatio::new(r_mar)?;
            (
                ["trr", "r_causal"],
                trr_sensitivity_curve(family, s, r_mar, &grid)?,
            )
        }
    };
    if curve.values().next().is_none() {
        return Err(frailhaz_core::Error::Domain(format!(
            "no grid point could be evaluated: {}",
            curve.warnings.first().map_or("", |w| w.as_str())
        ))
        .into());
    }
    let rows: Vec<(f64, Option<f64>)> = curve.points.iter().map(|p| (p.x, p.value)).collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, header, &rows).expect("writing to memory");
    let text = String::from_utf8(buf).expect("ascii csv");
    let evaluated = curve.values().count();
    let summary = format!(
        "{} curve: {evaluated} of {} points evaluated",
        family.name(),
        rows.len()
    );
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(Output::Csv {
                text: String::new(),
                warnings: curve.warnings,
                summary: format!("{summary}; written to {}", path.display()),
            })
        }
        None => Ok(Output::Csv {
            text,
            warnings: curve.warnings,
            summary,
        }),
    }
}

fn echo_config(cfg: &ScenarioConfig, record: &mut OutputRecord) {
    record
        .input("n_per_arm", cfg.n_per_arm)
        .input("n_twin_pairs", cfg.n_twin_pairs)
        .input("n_survey", cfg.n_survey)
        .input("h0", cfg.h0)
        .input("nu", cfg.nu)
        .input("r_cau", cfg.r_cau)
        .input("t1", cfg.t1)
        .input("delta", cfg.delta)
        .input("n_draws", cfg.n_draws);
}

fn single_run(o: &ScenarioOutcome, record: &mut OutputRecord) -> String {
    record
        .result("r_mar", o.cox.hr)
        .result("r_mar_lo", o.cox.lo)
        .result("r_mar_hi", o.cox.hi)
        .result("n_events", o.cox.n_events)
        .result("trr", o.trr.value)
        .result("trr_lo", o.trr.lo)
        .result("trr_hi", o.trr.hi)
        .result("s", o.survival.value)
        .result("s_lo", o.survival.lo)
        .result("s_hi", o.survival.hi)
        .result("r_adjusted", o.adjusted.point.value())
        .result("r_adjusted_lo", o.adjusted.lo)
        .result("r_adjusted_hi", o.adjusted.hi)
        .result("n_failed", o.adjusted.n_failed);
    format!(
        "r_mar {:.3} [{:.3}, {:.3}]  TRR {:.4}  S {:.4}  r_adjusted {:.3} [{:.3}, {:.3}]",
        o.cox.hr,
        o.cox.lo,
        o.cox.hi,
        o.trr.value,
        o.survival.value,
        o.adjusted.point.value(),
        o.adjusted.lo,
        o.adjusted.hi
    )
}

fn coverage_summary(cfg: &ScenarioConfig, r: &CoverageReport, record: &mut OutputRecord) -> String {
    record
        .result("n_reps", r.n_reps)
        .result("n_failed", r.n_failed)
        .result("median_r_mar", r.median_r_mar)
        .result("median_r_adjusted", r.median_r_adjusted)
        .result("coverage_marginal", r.coverage_marginal)
        .result("coverage_adjusted", r.coverage_adjusted);
    for (code, n) in &r.failures {
        record
            .warnings
            .push(format!("{n} replications failed: {code}"));
    }
    let rows = [
        ("Simulations", format!("{}", r.n_reps)),
        ("r_cau", format!("{:.2}", cfg.r_cau)),
        ("h0", format!("{:.3}", cfg.h0)),
        ("nu", format!("{:.4}", cfg.nu)),
        ("t1", format!("{}", cfg.t1)),
        ("Median r_mar(t1)", format!("{:.2}", r.median_r_mar)),
        (
            "Median r_adjusted(t1)",
            format!("{:.2}", r.median_r_adjusted),
        ),
        ("Coverage 95% CI mar", format!("{:.3}", r.coverage_marginal)),
        (
            "Coverage 95% CI adjusted",
            format!("{:.3}", r.coverage_adjusted),
        ),
    ];
    rows.iter()
        .map(|(k, v)| format!("{k:<26}{v:>10}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn simulate(a: &SimulateArgs, record: &mut OutputRecord) -> Result<Output, CliError> {
    let text = fs::read_to_string(&a.config).map_err(|source| CliError::Io {
        path: a.config.clone(),
        source,
    })?;
    let mut cfg = parse_scenario(&text)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    record
        .input("config", a.config.display().to_string())
        .input("reps", a.reps);
    echo_config(&cfg, record);
    record.seed = Some(cfg.seed);

    let exec = RayonExecutor::from_env();
    let summary = match a.reps {
        0 => return Err(CliError::usage("--reps must be positive")),
        1 => single_run(&run_scenario_with(&exec, &cfg)?, record),
        n => coverage_summary(&cfg, &coverage_study(&exec, &cfg, n)?, record),
    };
    if let Some(path) = &a.out {
        let body = serde_json::to_string_pretty(&*record).expect("record serialises") + "\n";
        fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(Output::Record { summary })
}

fn iv(a: &IvArgs, record: &mut OutputRecord) -> Result<Output, CliError> {
    record
        .input("adjusted_hr", a.adjusted_hr)
        .input("lo", a.lo)
        .input("hi", a.hi)
        .input("bg", a.bg)
        .input("g1", a.g1)
        .input("g2", a.g2);
    let hr = SummaryEstimate::log(a.adjusted_hr, a.lo, a.hi)?;
    let e = iv_estimate(&IvInput {
        adjusted_hr: hr,
        b_g: a.bg,
        g1: a.g1,
        g2: a.g2,
    })?;
    record
        .result("beta_a", e.beta_a)
        .result("beta_lo", e.beta_lo)
        .result("beta_hi", e.beta_hi)
        .result("hr_per_unit", e.hr_per_unit)
        .result("lo", e.lo)
        .result("hi", e.hi);
    let text = format!(
        "beta_a = {:.3} [{:.3}, {:.3}], HR per unit = {:.3} [{:.3}, {:.3}]",
        e.beta_a, e.beta_lo, e.beta_hi, e.hr_per_unit, e.lo, e.hi
    );
    Ok(Output::Record { summary: text })
}
