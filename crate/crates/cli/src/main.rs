//! Command-line front end over the exact simulator: verification reports,
//! parameter sweeps, and the loss equation audit, with byte-stable CSV or
//! JSON output for downstream plotting.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a runtime error
//! occurs, 2 on usage errors. Log level comes from `QSWAP_LOG`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use qswap_core::analysis::{
    crossover_p, fmt_sig12, loss_equation_audit, optimal_p, sweep, sweep_rate, Grid, RateRecord,
    SweepRecord,
};
use qswap_core::protocol::{
    alpha_balanced, dominance_check, pattern_outcomes, DetectorModel, ProtocolParams,
};

#[derive(Parser)]
#[command(
    name = "qswap",
    version,
    about = "Exact simulation of a qutrit entanglement swap heralded by an eight-mode analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Herald all sixteen coincidences without loss and report each
    /// pattern's sign vector, fidelity, and probability
    VerifyTable1 {
        /// Emission probability of each source
        #[arg(long, value_parser = parse_unit_interval, default_value = "0.5")]
        p: f64,
        /// Multiplier on the balanced auxiliary amplitude; values other than
        /// one detune the interference deliberately
        #[arg(long, value_parser = parse_unit_interval_scale, default_value = "1.0")]
        alpha_scale: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep emission probability at unit transmission and compare the
    /// simulated success probability against the closed form
    SweepRate {
        /// Emission grid as START:STOP:COUNT
        #[arg(long, default_value = "0.01:0.99:99")]
        p_grid: GridArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep emission probability and transmission for one or both
    /// detector models
    SweepLoss {
        /// Single emission probability; conflicts with --p-grid
        #[arg(long, value_parser = parse_unit_interval, conflicts_with = "p_grid")]
        p: Option<f64>,
        /// Emission grid as START:STOP:COUNT
        #[arg(long, default_value = "0.1:0.9:9")]
        p_grid: GridArg,
        /// Single transmission; conflicts with --eta-grid
        #[arg(long, value_parser = parse_unit_interval, conflicts_with = "eta_grid")]
        eta: Option<f64>,
        /// Transmission grid as START:STOP:COUNT
        #[arg(long, default_value = "0.5:1.0:11")]
        eta_grid: GridArg,
        /// Detector model; both models are swept when omitted
        #[arg(long, value_enum)]
        detector: Option<DetectorArg>,
        /// Herald all sixteen coincidences per point instead of scaling the
        /// first by sixteen
        #[arg(long)]
        all_patterns: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the emission probability that maximizes the success probability
    Optimum {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the emission probability where the qutrit rate overtakes the
    /// two-photon reference rate
    Crossover {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check on seeded random states that threshold coincidences never
    /// accept less probability than number-resolving ones
    VerifyDominance {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulated lossy amplitudes and branch weights against their
    /// closed-form variants and emit the audit as JSON
    AuditLoss {
        #[arg(long, value_parser = parse_unit_interval, default_value = "0.5")]
        p: f64,
        #[arg(long, value_parser = parse_unit_interval, default_value = "0.7")]
        eta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Pnrd,
    Threshold,
}

impl From<DetectorArg> for DetectorModel {
    fn from(arg: DetectorArg) -> Self {
        match arg {
            DetectorArg::Pnrd => DetectorModel::Pnrd,
            DetectorArg::Threshold => DetectorModel::Threshold,
        }
    }
}

/// Inclusive linear grid written as START:STOP:COUNT with endpoints in
/// [0, 1].
#[derive(Clone, Debug)]
struct GridArg(Vec<f64>);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected START:STOP:COUNT, got {s:?}"));
        };
        let start: f64 = start
            .parse()
            .map_err(|_| format!("bad grid start {start:?}"))?;
        let stop: f64 = stop
            .parse()
            .map_err(|_| format!("bad grid stop {stop:?}"))?;
        let count: usize = count
            .parse()
            .map_err(|_| format!("bad grid count {count:?}"))?;
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
            return Err(format!("grid endpoints must lie in [0, 1], got {s:?}"));
        }
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        let grid = Grid::linspace(start, stop, count).map_err(|e| e.to_string())?;
        Ok(GridArg(grid.values().to_vec()))
    }
}

fn parse_unit_interval(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("{value} is outside [0, 1]"))
    }
}

fn parse_unit_interval_scale(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=2.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("{value} is outside [0, 2]"))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QSWAP_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::VerifyTable1 {
            p,
            alpha_scale,
            format,
            out,
        } => cmd_verify_table1(p, alpha_scale, format, &out),
        Command::SweepRate {
            p_grid,
            format,
            out,
        } => cmd_sweep_rate(&p_grid.0, format, &out),
        Command::SweepLoss {
            p,
            p_grid,
            eta,
            eta_grid,
            detector,
            all_patterns,
            format,
            out,
        } => {
            let p_values = p.map_or(p_grid.0, |v| vec![v]);
            let eta_values = eta.map_or(eta_grid.0, |v| vec![v]);
            let models = match detector {
                Some(arg) => vec![arg.into()],
                None => vec![DetectorModel::Pnrd, DetectorModel::Threshold],
            };
            cmd_sweep_loss(&p_values, &eta_values, &models, all_patterns, format, &out)
        }
        Command::Optimum { format, out } => cmd_optimum(format, &out),
        Command::Crossover { format, out } => cmd_crossover(format, &out),
        Command::VerifyDominance {
            trials,
            seed,
            format,
            out,
        } => cmd_verify_dominance(trials, seed, format, &out),
        Command::AuditLoss { p, eta, out } => cmd_audit_loss(p, eta, &out),
    }
}

/// Write the rendered text to the output path, or to stdout when none is
/// given.
fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing output to {}", path.display())),
    }
}

/// CSV cell: fixed 12 significant digits, `NaN` where undefined.
fn csv_cell(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        fmt_sig12(x)
    }
}

/// JSON number: fixed 12 significant digits, `null` where undefined.
fn json_number(x: f64) -> String {
    if x.is_nan() {
        "null".to_string()
    } else {
        fmt_sig12(x)
    }
}

fn cmd_verify_table1(
    p: f64,
    alpha_scale: f64,
    format: Format,
    out: &Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;
    const PROBABILITY_SPREAD: f64 = 1e-12;
    let alpha = alpha_balanced(p) * alpha_scale;
    log::info!("verifying sixteen coincidences at p = {p}, alpha = {alpha}");
    let params = ProtocolParams::new(p, alpha, 1.0)?;
    let outcomes = pattern_outcomes(&params, DetectorModel::Pnrd)?;

    struct Row {
        pattern: String,
        signs: String,
        fidelity: f64,
        probability: f64,
    }
    let rows: Vec<Row> = outcomes
        .iter()
        .map(|o| Row {
            pattern: o.pattern().to_string(),
            signs: o
                .pattern()
                .signs()
                .iter()
                .map(|&s| if s >= 0.0 { '+' } else { '-' })
                .collect(),
            fidelity: o.fidelity_corrected(),
            probability: o.probability(),
        })
        .collect();

    let text = match format {
        Format::Csv => {
            let mut s = String::from("pattern,signs,fidelity,probability\n");
            for r in &rows {
                writeln!(
                    s,
                    "\"{}\",{},{},{}",
                    r.pattern,
                    r.signs,
                    csv_cell(r.fidelity),
                    csv_cell(r.probability)
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let mut s = String::from("[\n");
            for (i, r) in rows.iter().enumerate() {
                writeln!(
                    s,
                    "  {{\"pattern\": \"{}\", \"signs\": \"{}\", \"fidelity\": {}, \"probability\": {}}}{}",
                    r.pattern,
                    r.signs,
                    json_number(r.fidelity),
                    json_number(r.probability),
                    if i + 1 < rows.len() { "," } else { "" }
                )
                .unwrap();
            }
            s.push_str("]\n");
            s
        }
    };
    emit(out, &text)?;

    if outcomes.iter().all(|o| o.is_degenerate()) {
        eprintln!("degenerate: every coincidence probability vanishes at p = {p}");
        return Ok(ExitCode::SUCCESS);
    }
    let worst = rows
        .iter()
        .min_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
        .expect("sixteen rows");
    if worst.fidelity < FIDELITY_FLOOR {
        eprintln!(
            "verification failed: pattern {} heralds fidelity {} below {}",
            worst.pattern,
            fmt_sig12(worst.fidelity),
            FIDELITY_FLOOR
        );
        return Ok(ExitCode::from(1));
    }
    let max_p = rows.iter().map(|r| r.probability).fold(f64::MIN, f64::max);
    let min_p = rows.iter().map(|r| r.probability).fold(f64::MAX, f64::min);
    if max_p - min_p > PROBABILITY_SPREAD {
        let outlier = rows
            .iter()
            .max_by(|a, b| {
                let mid = (max_p + min_p) / 2.0;
                (a.probability - mid)
                    .abs()
                    .total_cmp(&(b.probability - mid).abs())
            })
            .expect("sixteen rows");
        eprintln!(
            "verification failed: pattern {} probability {} breaks the equal-probability spread {}",
            outlier.pattern,
            fmt_sig12(outlier.probability),
            PROBABILITY_SPREAD
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn render_rate(records: &[RateRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("p,P_s_qutrit,rate_qutrit,rate_type2,analytic_P_s,abs_err\n");
            for r in records {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    csv_cell(r.p),
                    csv_cell(r.p_s_qutrit),
                    csv_cell(r.rate_qutrit),
                    csv_cell(r.rate_type2),
                    csv_cell(r.analytic_p_s),
                    csv_cell(r.abs_err)
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let mut s = String::from("[\n");
            for (i, r) in records.iter().enumerate() {
                writeln!(
                    s,
                    "  {{\"p\": {}, \"P_s_qutrit\": {}, \"rate_qutrit\": {}, \"rate_type2\": {}, \
                     \"analytic_P_s\": {}, \"abs_err\": {}}}{}",
                    json_number(r.p),
                    json_number(r.p_s_qutrit),
                    json_number(r.rate_qutrit),
                    json_number(r.rate_type2),
                    json_number(r.analytic_p_s),
                    json_number(r.abs_err),
                    if i + 1 < records.len() { "," } else { "" }
                )
                .unwrap();
            }
            s.push_str("]\n");
            s
        }
    }
}

fn cmd_sweep_rate(
    p_grid: &[f64],
    format: Format,
    out: &Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    log::info!("rate sweep over {} emission points", p_grid.len());
    let records = sweep_rate(p_grid)?;
    emit(out, &render_rate(&records, format))?;
    Ok(ExitCode::SUCCESS)
}

fn render_loss(records: &[SweepRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s =
                String::from("p,eta,detector,P_s,fidelity_corrected,fidelity_canonical,rate\n");
            for r in records {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    csv_cell(r.p),
                    csv_cell(r.eta),
                    r.detector,
                    csv_cell(r.p_s),
                    csv_cell(r.fidelity_corrected),
                    csv_cell(r.fidelity_canonical),
                    csv_cell(r.rate)
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let mut s = String::from("[\n");
            for (i, r) in records.iter().enumerate() {
                writeln!(
                    s,
                    "  {{\"p\": {}, \"eta\": {}, \"detector\": \"{}\", \"P_s\": {}, \
                     \"fidelity_corrected\": {}, \"fidelity_canonical\": {}, \"rate\": {}}}{}",
                    json_number(r.p),
                    json_number(r.eta),
                    r.detector,
                    json_number(r.p_s),
                    json_number(r.fidelity_corrected),
                    json_number(r.fidelity_canonical),
                    json_number(r.rate),
                    if i + 1 < records.len() { "," } else { "" }
                )
                .unwrap();
            }
            s.push_str("]\n");
            s
        }
    }
}

fn cmd_sweep_loss(
    p_grid: &[f64],
    eta_grid: &[f64],
    models: &[DetectorModel],
    all_patterns: bool,
    format: Format,
    out: &Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    log::info!(
        "loss sweep over {} emission points x {} transmissions x {} detector models",
        p_grid.len(),
        eta_grid.len(),
        models.len()
    );
    let records = sweep(p_grid, eta_grid, models, all_patterns)?;
    emit(out, &render_loss(&records, format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimum(format: Format, out: &Option<PathBuf>) -> anyhow::Result<ExitCode> {
    log::info!("evaluating the closed-form optimum");
    let (p_star, ps_star) = optimal_p();
    let text = match format {
        Format::Csv => format!(
            "p_star,P_s_star\n{},{}\n",
            fmt_sig12(p_star),
            fmt_sig12(ps_star)
        ),
        Format::Json => format!(
            "{{\"p_star\": {}, \"P_s_star\": {}}}\n",
            fmt_sig12(p_star),
            fmt_sig12(ps_star)
        ),
    };
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_crossover(format: Format, out: &Option<PathBuf>) -> anyhow::Result<ExitCode> {
    log::info!("locating the rate crossover");
    let p = crossover_p()?;
    let text = match format {
        Format::Csv => format!("p_crossover\n{}\n", fmt_sig12(p)),
        Format::Json => format!("{{\"p_crossover\": {}}}\n", fmt_sig12(p)),
    };
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_dominance(
    trials: usize,
    seed: u64,
    format: Format,
    out: &Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    log::info!("dominance check over {trials} trials with seed {seed}");
    let outcome = dominance_check(trials, seed)?;
    let text = match format {
        Format::Csv => format!(
            "trials,patterns,max_deficit,holds\n{},{},{},{}\n",
            outcome.trials,
            outcome.patterns,
            fmt_sig12(outcome.max_deficit),
            outcome.holds
        ),
        Format::Json => format!(
            "{{\"trials\": {}, \"patterns\": {}, \"max_deficit\": {}, \"holds\": {}}}\n",
            outcome.trials,
            outcome.patterns,
            fmt_sig12(outcome.max_deficit),
            outcome.holds
        ),
    };
    emit(out, &text)?;
    if outcome.holds {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification failed: a number-resolved coincidence exceeded its threshold \
             counterpart by {}",
            fmt_sig12(outcome.max_deficit)
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_audit_loss(p: f64, eta: f64, out: &Option<PathBuf>) -> anyhow::Result<ExitCode> {
    log::info!("loss equation audit at p = {p}, eta = {eta}");
    let audit = loss_equation_audit(p, eta)?;
    emit(out, &audit.to_json_string())?;
    let traces_sound =
        (audit.source_trace - 1.0).abs() <= 1e-12 && (audit.aux_trace - 1.0).abs() <= 1e-12;
    if traces_sound {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification failed: lossy preparation is not trace preserving \
             (source {}, auxiliary {})",
            fmt_sig12(audit.source_trace),
            fmt_sig12(audit.aux_trace)
        );
        Ok(ExitCode::from(1))
    }
}
