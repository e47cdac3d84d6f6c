//! `steerlab`: steering verdicts, sweeps, ratio tables and LHS certification.
//!
//! Exit status: 0 on success (whatever the verdict), 2 for bad input (nothing
//! is written), 3 when a numerical step fails, 1 for I/O errors.

mod settings;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use steerlab_core::criteria::{evaluate, ratio_table, sweep, Criterion, CvEvaluator, Family, StateDescriptor, TableKind};
use steerlab_core::lhs_oracle::{certify_no_violation, LhsDomain, MIN_CERTIFY_SAMPLES};
use steerlab_core::moments::Evaluation;

use output::{emit, plot_data, render, write_atomic, TableRecord, VerdictRecord};
use settings::{GlobalArgs, Settings};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "steerlab", version, about = "EPR-steering criteria for two-qubit and continuous-variable states")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one criterion on one state.
    Verdict {
        /// e.g. werner:p=0.8, tmsv:r=0.5, psub:r=0.3, lg:m=0,n=2
        #[arg(long)]
        state: StateDescriptor,
        /// reid, entropic, sum or chsh
        #[arg(long)]
        criterion: Criterion,
    },
    /// Evaluate criteria over a parameter grid.
    Sweep {
        /// werner, tmsv, psub[:k=1] or lg[:m=M]
        #[arg(long)]
        family: Family,
        /// START:STOP:STEP, inclusive of STOP
        #[arg(long, conflicts_with = "params", required_unless_present = "params")]
        range: Option<ParamRange>,
        /// Explicit comma-separated parameter values
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        params: Option<Vec<f64>>,
        /// Comma-separated criteria
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        criteria: Vec<Criterion>,
        /// Also write `<family>_<criterion>.dat` plot files here
        #[arg(long, value_name = "DIR")]
        plot_dir: Option<PathBuf>,
    },
    /// Reproduce a violation-ratio table (always from quadrature).
    Table {
        #[arg(value_parser = parse_table_kind)]
        which: TableKind,
    },
    /// Sample local-hidden-state models and check the sum inequality.
    Certify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value = "cv", value_parser = parse_domain)]
        domain: LhsDomain,
    },
}

fn parse_table_kind(s: &str) -> Result<TableKind, String> {
    s.parse().map_err(|e: steerlab_core::Error| e.to_string())
}

fn parse_domain(s: &str) -> Result<LhsDomain, String> {
    s.parse().map_err(|e: steerlab_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ParamRange {
    start: f64,
    stop: f64,
    step: f64,
}

impl FromStr for ParamRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected START:STOP:STEP, got `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        let r = ParamRange {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if !(r.step > 0.0 && r.step.is_finite()) {
            return Err(format!("step must be positive, got {}", r.step));
        }
        if !(r.start <= r.stop) {
            return Err(format!("start {} exceeds stop {}", r.start, r.stop));
        }
        Ok(r)
    }
}

impl ParamRange {
    /// Grid points rounded to 12 decimals so `0:1:0.1` prints as typed.
    fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("STEERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("STEERLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn plot_file_name(family: &Family, criterion: Criterion) -> String {
    format!("{}_{}.dat", family.to_string().replace(':', "-").replace('=', ""), criterion)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let settings = Settings::resolve(&cli.global)?;
    let out = settings.out.as_deref();
    match cli.command {
        Command::Verdict { state, criterion } => {
            if !state.supports(criterion) {
                return Err(CliError::Usage(format!("criterion {criterion} is not defined for {}", state.family())));
            }
            let cv = CvEvaluator::new(settings.cv_config());
            let (family, param) = state.family_and_param();
            let v = evaluate(&state, criterion, &cv).map_err(|e| CliError::Numerical(e.to_string()))?;
            let rec = VerdictRecord::ok(family.to_string(), param, &v);
            emit(out, &render(&[rec], settings.format)?)
        }
        Command::Sweep {
            family,
            range,
            params,
            criteria,
            plot_dir,
        } => {
            let grid = match (range, params) {
                (Some(r), _) => r.values(),
                (None, Some(p)) => p,
                (None, None) => unreachable!("clap requires one of --range, --params"),
            };
            if grid.is_empty() || criteria.is_empty() {
                return Err(CliError::Usage("parameter grid and criteria list must be non-empty".into()));
            }
            if let Some(c) = criteria.iter().find(|c| !family.supports(**c)) {
                return Err(CliError::Usage(format!("criterion {c} is not defined for {family}")));
            }
            for &p in &grid {
                family.state(p).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            if let Some(dir) = &plot_dir {
                if !dir.is_dir() {
                    return Err(CliError::Usage(format!("plot directory {} does not exist", dir.display())));
                }
            }
            let cv = CvEvaluator::new(settings.cv_config());
            let rows = sweep(family, &grid, &criteria, &cv).map_err(|e| CliError::Usage(e.to_string()))?;
            let records: Vec<VerdictRecord> = rows.iter().map(VerdictRecord::from_sweep).collect();
            emit(out, &render(&records, settings.format)?)?;
            if let Some(dir) = plot_dir {
                for &c in &criteria {
                    let subset: Vec<&VerdictRecord> = records.iter().filter(|r| r.criterion == c).collect();
                    write_atomic(&dir.join(plot_file_name(&family, c)), &plot_data(family.parameter_name(), &subset))?;
                }
            }
            let failed = records.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                return Err(CliError::Numerical(format!("{failed} of {} sweep rows failed", records.len())));
            }
            Ok(())
        }
        Command::Table { which } => {
            let mut config = settings.cv_config();
            config.evaluation = Evaluation::Quadrature(*config.evaluation.grid());
            let cv = CvEvaluator::new(config);
            let family = which.family().to_string();
            let rows = ratio_table(which, &cv);
            let records: Vec<TableRecord> = rows.iter().map(|r| TableRecord::new(family.clone(), r)).collect();
            emit(out, &render(&records, settings.format)?)?;
            let failed = rows.iter().filter(|r| r.is_err()).count();
            if failed > 0 {
                return Err(CliError::Numerical(format!("{failed} of {} table rows failed", rows.len())));
            }
            Ok(())
        }
        Command::Certify { samples, domain } => {
            if samples < MIN_CERTIFY_SAMPLES {
                return Err(CliError::Usage(format!("--samples must be at least {MIN_CERTIFY_SAMPLES}")));
            }
            let report = certify_no_violation(samples, settings.seed, domain).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut bytes = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            emit(out, &bytes)?;
            if !report.certified() {
                return Err(CliError::Numerical(format!(
                    "{} violations, {} micro-invariant failures",
                    report.violations, report.invariant_failures
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("steerlab: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_values() {
        let r: ParamRange = "0:1:0.1".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[10], 1.0);
        assert!("1:0:0.1".parse::<ParamRange>().is_err());
        assert!("0:1:0".parse::<ParamRange>().is_err());
        assert!("0:1".parse::<ParamRange>().is_err());
    }

    #[test]
    fn plot_names() {
        assert_eq!(plot_file_name(&Family::Werner, Criterion::Sum), "werner_sum.dat");
        assert_eq!(plot_file_name(&Family::LaguerreGauss { m: 1 }, Criterion::Reid), "lg-m1_reid.dat");
    }

    #[test]
    fn clap_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
