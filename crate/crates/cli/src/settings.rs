//! Run settings: command-line flags over a flat JSON config file over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use steerlab_core::criteria::{CvConfig, SumBound};
use steerlab_core::moments::{Evaluation, QuadratureSetting};
use steerlab_core::quadrature::GridSpec;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Moments {
    /// Second moments from the Wigner function by 4D quadrature.
    Quadrature,
    /// Closed-form second moments.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundArg {
    Summed,
    Joint,
}

impl From<BoundArg> for SumBound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Summed => SumBound::Summed,
            BoundArg::Joint => SumBound::Joint,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Flat JSON file with defaults for any of the options below (snake_case keys).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Nodes per axis for moment and marginal grids (odd, ≥ 33).
    #[arg(long, global = true, value_name = "N")]
    pub grid_n: Option<usize>,
    /// Half-width of the integration box; default depends on the state.
    #[arg(long, global = true, value_name = "L")]
    pub box_halfwidth: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Where moments come from.
    #[arg(long, global = true, value_enum)]
    pub moments: Option<Moments>,
    /// Right-hand side of the continuous-variable sum criterion.
    #[arg(long, global = true, value_enum)]
    pub sum_bound: Option<BoundArg>,
    /// Bob's first angle. Any angle flag replaces the family default settings;
    /// unset angles then fall back to (0, π/2, 0, π/2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    grid_n: Option<usize>,
    box_halfwidth: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    moments: Option<Moments>,
    sum_bound: Option<BoundArg>,
    theta1: Option<f64>,
    theta2: Option<f64>,
    phi1: Option<f64>,
    phi2: Option<f64>,
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub grid: GridSpec,
    pub moments: Moments,
    pub sum_bound: SumBound,
    pub angles: Option<QuadratureSetting>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl Settings {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        let grid_n = args.grid_n.or(file.grid_n);
        let half_width = args.box_halfwidth.or(file.box_halfwidth);
        let mut grid = grid_n.map(GridSpec::uniform).unwrap_or_default();
        if let Some(n) = grid_n {
            if n % 2 == 0 || n < steerlab_core::quadrature::MIN_NODES {
                return Err(CliError::Usage(format!(
                    "--grid-n must be odd and at least {}, got {n}",
                    steerlab_core::quadrature::MIN_NODES
                )));
            }
        }
        if let Some(l) = half_width {
            if !(l.is_finite() && l > 0.0) {
                return Err(CliError::Usage(format!("--box-halfwidth must be positive, got {l}")));
            }
        }
        grid = grid.with_half_width(half_width);

        let pick = |a: Option<f64>, b: Option<f64>| a.or(b);
        let given = [
            pick(args.theta1, file.theta1),
            pick(args.theta2, file.theta2),
            pick(args.phi1, file.phi1),
            pick(args.phi2, file.phi2),
        ];
        let angles = if given.iter().any(Option::is_some) {
            let d = QuadratureSetting::default();
            let s = QuadratureSetting::new(
                given[0].unwrap_or(d.theta1),
                given[1].unwrap_or(d.theta2),
                given[2].unwrap_or(d.phi1),
                given[3].unwrap_or(d.phi2),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            Some(s)
        } else {
            None
        };

        Ok(Self {
            grid,
            moments: args.moments.or(file.moments).unwrap_or(Moments::Quadrature),
            sum_bound: args.sum_bound.or(file.sum_bound).map(SumBound::from).unwrap_or_default(),
            angles,
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        })
    }

    pub fn cv_config(&self) -> CvConfig {
        let evaluation = match self.moments {
            Moments::Quadrature => Evaluation::Quadrature(self.grid),
            Moments::Analytic => Evaluation::Analytic(self.grid),
        };
        CvConfig {
            settings: self.angles,
            pairs: None,
            sum_bound: self.sum_bound,
            evaluation,
        }
    }
}
