//! Reid, entropic and sum steering verdicts, parameter sweeps, and the
//! violation-ratio tables.
//!
//! Every verdict carries a ratio that exceeds 1 exactly when the inequality
//! is violated:
//!
//! | criterion | lhs | rhs | ratio |
//! |-----------|-----|-----|-------|
//! | reid      | `Δ²_inf X_θ1 · Δ²_inf X_θ2` | `1/4` | `rhs / lhs` |
//! | entropic  | `h₁ + h₂` | `ln πe` | `rhs / lhs` |
//! | sum       | `Δ_inf X_θ1 + Δ_inf X_θ2` | sum bound | `rhs / lhs` |
//! | chsh      | steering functional | `2` | `lhs / rhs` |

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::{self, TwoQubitState};
use crate::entropy::{conditional_entropy, ConditionalPair};
use crate::error::{Error, Result};
use crate::moments::{
    inferred_variance, sum_variance, summed_deviation, Evaluation, MomentCache, Provenance, QuadratureSetting,
};
use crate::phase_space::{reject_unknown, split_descriptor, take_param, CvState};

/// `ln πe`, the entropic uncertainty bound for conjugate quadratures.
pub fn ln_pi_e() -> f64 {
    (PI * E).ln()
}

/// Reid's bound on the product of inferred variances.
pub const REID_BOUND: f64 = 0.25;

/// A violation must beat the bound by more than this relative margin, so that
/// exact equality cases stay non-steerable after rounding.
pub const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Reid,
    Entropic,
    Sum,
    Chsh,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Reid, Criterion::Entropic, Criterion::Sum, Criterion::Chsh];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::Reid => "reid",
            Criterion::Entropic => "entropic",
            Criterion::Sum => "sum",
            Criterion::Chsh => "chsh",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "expected one of reid, entropic, sum, chsh".into(),
            })
    }
}

/// Where the numbers in a verdict came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum VerdictSource {
    /// Closed-form moments (entropies, if any, still come from grids).
    Analytic,
    /// Wigner-function quadrature on the given grid.
    Quadrature { grid_n: usize, half_width: f64 },
    /// Exact finite-dimensional matrix algebra.
    MatrixAlgebra,
}

impl From<Provenance> for VerdictSource {
    fn from(p: Provenance) -> Self {
        match p {
            Provenance::Analytic => VerdictSource::Analytic,
            Provenance::Quadrature { grid_n, half_width } => VerdictSource::Quadrature { grid_n, half_width },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringVerdict {
    pub criterion: Criterion,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub steerable: bool,
    pub source: VerdictSource,
    /// Relative mass clamped away from marginal grids (0 when unused).
    pub clamped_mass: f64,
}

impl SteeringVerdict {
    /// Verdict for an inequality of the form `lhs ≥ rhs` (violated when lhs is small).
    pub fn lower_bounded(criterion: Criterion, lhs: f64, rhs: f64, source: VerdictSource) -> Self {
        Self::from_ratio(criterion, lhs, rhs, rhs / lhs, source)
    }

    /// Verdict for an inequality of the form `lhs ≤ rhs` (violated when lhs is large).
    pub fn upper_bounded(criterion: Criterion, lhs: f64, rhs: f64, source: VerdictSource) -> Self {
        Self::from_ratio(criterion, lhs, rhs, lhs / rhs, source)
    }

    fn from_ratio(criterion: Criterion, lhs: f64, rhs: f64, ratio: f64, source: VerdictSource) -> Self {
        Self {
            criterion,
            lhs,
            rhs,
            ratio,
            steerable: ratio > 1.0 + RATIO_TOLERANCE,
            source,
            clamped_mass: 0.0,
        }
    }
}

/// What the sum of inferred deviations is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumBound {
    /// `ΔX_θ1 + ΔX_θ2` on Bob's reduced state. This is the quantity the
    /// published continuous-variable closed forms and tables evaluate.
    #[default]
    Summed,
    /// `Δ(X_θ1 + X_θ2)` on Bob's reduced state.
    Joint,
}

impl FromStr for SumBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "summed" => Ok(SumBound::Summed),
            "joint" => Ok(SumBound::Joint),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected `summed` or `joint`".into(),
            }),
        }
    }
}

/// Everything needed to evaluate a continuous-variable criterion.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CvConfig {
    /// Measurement settings; `None` uses the family default.
    pub settings: Option<QuadratureSetting>,
    /// Entropic pairs; `None` uses the family default.
    pub pairs: Option<[ConditionalPair; 2]>,
    pub sum_bound: SumBound,
    pub evaluation: Evaluation,
}

impl CvConfig {
    pub fn settings_for(&self, state: &CvState) -> QuadratureSetting {
        self.settings.unwrap_or_else(|| QuadratureSetting::for_state(state))
    }

    pub fn pairs_for(&self, state: &CvState) -> [ConditionalPair; 2] {
        self.pairs.unwrap_or_else(|| ConditionalPair::defaults_for(state))
    }
}

/// Evaluates continuous-variable criteria, caching moment tables.
#[derive(Debug, Default)]
pub struct CvEvaluator {
    pub config: CvConfig,
    cache: MomentCache,
}

impl CvEvaluator {
    pub fn new(config: CvConfig) -> Self {
        Self {
            config,
            cache: MomentCache::new(),
        }
    }

    pub fn cache(&self) -> &MomentCache {
        &self.cache
    }

    fn inferred_pair(&self, state: &CvState) -> Result<(f64, f64, Provenance, QuadratureSetting)> {
        let table = self.cache.get(state, &self.config.evaluation)?;
        let s = self.config.settings_for(state);
        let d1 = inferred_variance(&table, s.theta1, s.phi1)?;
        let d2 = inferred_variance(&table, s.theta2, s.phi2)?;
        Ok((d1, d2, table.provenance(), s))
    }

    /// Reid: steerable iff `Δ²_inf X_θ1 · Δ²_inf X_θ2 < 1/4`.
    pub fn reid_verdict(&self, state: &CvState) -> Result<SteeringVerdict> {
        let (d1, d2, prov, _) = self.inferred_pair(state)?;
        Ok(SteeringVerdict::lower_bounded(Criterion::Reid, d1 * d2, REID_BOUND, prov.into()))
    }

    /// Entropic: steerable iff `h₁ + h₂ < ln πe`.
    pub fn entropic_verdict(&self, state: &CvState) -> Result<SteeringVerdict> {
        let grid = self.config.evaluation.grid();
        let bx = grid.marginal_box(state)?;
        let pairs = self.config.pairs_for(state);
        let mut total = 0.0;
        let mut clamped: f64 = 0.0;
        for pair in pairs {
            let rep = conditional_entropy(state, pair, &bx)?;
            total += rep.h_conditional;
            clamped = clamped.max(rep.clamped_mass);
        }
        let source = VerdictSource::Quadrature {
            grid_n: bx.n(),
            half_width: bx.half_width(),
        };
        let mut v = SteeringVerdict::lower_bounded(Criterion::Entropic, total, ln_pi_e(), source);
        v.clamped_mass = clamped;
        Ok(v)
    }

    /// Sum: steerable iff `Δ_inf X_θ1 + Δ_inf X_θ2` falls below the bound.
    pub fn sum_verdict(&self, state: &CvState) -> Result<SteeringVerdict> {
        let (d1, d2, prov, s) = self.inferred_pair(state)?;
        let table = self.cache.get(state, &self.config.evaluation)?;
        let bound = match self.config.sum_bound {
            SumBound::Summed => summed_deviation(&table, s.theta1, s.theta2),
            SumBound::Joint => sum_variance(&table, s.theta1, s.theta2),
        };
        Ok(SteeringVerdict::lower_bounded(
            Criterion::Sum,
            d1.sqrt() + d2.sqrt(),
            bound,
            prov.into(),
        ))
    }

    pub fn verdict(&self, state: &CvState, criterion: Criterion) -> Result<SteeringVerdict> {
        match criterion {
            Criterion::Reid => self.reid_verdict(state),
            Criterion::Entropic => self.entropic_verdict(state),
            Criterion::Sum => self.sum_verdict(state),
            Criterion::Chsh => Err(Error::Unsupported {
                criterion: criterion.id().into(),
                family: state.family().into(),
            }),
        }
    }
}

/// Any state the criteria understand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDescriptor {
    Werner { p: f64 },
    Cv(CvState),
}

impl StateDescriptor {
    pub fn family(&self) -> &'static str {
        match self {
            StateDescriptor::Werner { .. } => "werner",
            StateDescriptor::Cv(s) => s.family(),
        }
    }

    /// The swept family this state belongs to and its position in it.
    pub fn family_and_param(&self) -> (Family, f64) {
        match *self {
            StateDescriptor::Werner { p } => (Family::Werner, p),
            StateDescriptor::Cv(CvState::Tmsv { r }) => (Family::Tmsv, r),
            StateDescriptor::Cv(CvState::PhotonSubtracted { r, k }) => (Family::PhotonSubtracted { k }, r),
            StateDescriptor::Cv(CvState::LaguerreGauss { m, n }) => (Family::LaguerreGauss { m }, f64::from(n)),
        }
    }

    /// Whether `criterion` is defined for this kind of state.
    pub fn supports(&self, criterion: Criterion) -> bool {
        self.family_and_param().0.supports(criterion)
    }
}

impl fmt::Display for StateDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateDescriptor::Werner { p } => write!(f, "werner:p={p}"),
            StateDescriptor::Cv(s) => s.fmt(f),
        }
    }
}

impl FromStr for StateDescriptor {
    type Err = Error;

    /// `werner:p=0.8`, or any continuous-variable descriptor.
    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = split_descriptor(s)?;
        if family == "werner" {
            reject_unknown(s, &params, &["p"])?;
            let p: f64 = take_param(s, &params, "p")?.ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "missing parameter `p`".into(),
            })?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("Werner mixing p must lie in [0, 1], got {p}")));
            }
            return Ok(StateDescriptor::Werner { p });
        }
        s.parse().map(StateDescriptor::Cv)
    }
}

/// Evaluates one criterion on any state.
pub fn evaluate(state: &StateDescriptor, criterion: Criterion, cv: &CvEvaluator) -> Result<SteeringVerdict> {
    match *state {
        StateDescriptor::Cv(s) => cv.verdict(&s, criterion),
        StateDescriptor::Werner { p } => {
            let rho = TwoQubitState::werner(p)?;
            match criterion {
                Criterion::Sum => Ok(discrete::sum_steering_discrete(&rho)),
                Criterion::Entropic => Ok(discrete::entropic_steering_discrete(&rho)),
                Criterion::Chsh => Ok(discrete::optimal_chsh(&rho).verdict()),
                Criterion::Reid => Err(Error::Unsupported {
                    criterion: criterion.id().into(),
                    family: "werner".into(),
                }),
            }
        }
    }
}

/// A state family swept over one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Mixing `p`.
    Werner,
    /// Squeezing `r`.
    Tmsv,
    /// Squeezing `r`.
    PhotonSubtracted { k: u8 },
    /// Second index `n` at fixed `m`.
    LaguerreGauss { m: u32 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Tmsv => "tmsv",
            Family::PhotonSubtracted { .. } => "psub",
            Family::LaguerreGauss { .. } => "lg",
        }
    }

    pub fn supports(&self, criterion: Criterion) -> bool {
        match self {
            Family::Werner => criterion != Criterion::Reid,
            _ => criterion != Criterion::Chsh,
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            Family::Werner => "p",
            Family::Tmsv | Family::PhotonSubtracted { .. } => "r",
            Family::LaguerreGauss { .. } => "n",
        }
    }

    pub fn state(&self, param: f64) -> Result<StateDescriptor> {
        Ok(match *self {
            Family::Werner => {
                if !(0.0..=1.0).contains(&param) {
                    return Err(Error::Domain(format!("Werner mixing p must lie in [0, 1], got {param}")));
                }
                StateDescriptor::Werner { p: param }
            }
            Family::Tmsv => StateDescriptor::Cv(CvState::tmsv(param)?),
            Family::PhotonSubtracted { k } => StateDescriptor::Cv(CvState::photon_subtracted(param, k)?),
            Family::LaguerreGauss { m } => {
                if param < 0.0 || param.fract() != 0.0 {
                    return Err(Error::Domain(format!("LG index n must be a non-negative integer, got {param}")));
                }
                StateDescriptor::Cv(CvState::laguerre_gauss(m, param as u32)?)
            }
        })
    }
}

impl fmt::Display for Family {
    /// Default parameters are omitted: `psub`, `psub:k=1`, `lg`, `lg:m=2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::PhotonSubtracted { k } if k != 0 => write!(f, "psub:k={k}"),
            Family::LaguerreGauss { m } if m != 0 => write!(f, "lg:m={m}"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `werner`, `tmsv`, `psub[:k=1]`, `lg[:m=0]`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = split_descriptor(s)?;
        match family.as_str() {
            "werner" => {
                reject_unknown(s, &params, &[])?;
                Ok(Family::Werner)
            }
            "tmsv" => {
                reject_unknown(s, &params, &[])?;
                Ok(Family::Tmsv)
            }
            "psub" | "photon_subtracted" => {
                reject_unknown(s, &params, &["k"])?;
                let k = take_param(s, &params, "k")?.unwrap_or(0u8);
                if k > 1 {
                    return Err(Error::Domain(format!("k must be 0 or 1, got {k}")));
                }
                Ok(Family::PhotonSubtracted { k })
            }
            "lg" => {
                reject_unknown(s, &params, &["m"])?;
                Ok(Family::LaguerreGauss {
                    m: take_param(s, &params, "m")?.unwrap_or(0),
                })
            }
            other => Err(Error::Parse {
                input: s.to_string(),
                reason: format!("unknown family `{other}`"),
            }),
        }
    }
}

/// One verdict (or failure) of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub param: f64,
    pub criterion: Criterion,
    pub outcome: std::result::Result<SteeringVerdict, String>,
}

/// Evaluates every criterion at every parameter value. Rows come back in
/// grid order, criteria in the given order within each parameter value;
/// a failing point is recorded and the sweep continues.
pub fn sweep(family: Family, params: &[f64], criteria: &[Criterion], cv: &CvEvaluator) -> Result<Vec<SweepRow>> {
    if params.is_empty() {
        return Err(Error::Domain("parameter grid is empty".into()));
    }
    if criteria.is_empty() {
        return Err(Error::Domain("criteria list is empty".into()));
    }
    let jobs: Vec<(f64, Criterion)> = params
        .iter()
        .flat_map(|p| criteria.iter().map(move |c| (*p, *c)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(param, criterion)| {
            let outcome = family
                .state(param)
                .and_then(|s| evaluate(&s, criterion, cv))
                .map_err(|e| e.to_string());
            SweepRow {
                family: family.to_string(),
                param,
                criterion,
                outcome,
            }
        })
        .collect())
}

/// The three violation ratios at one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub param: f64,
    pub reid: f64,
    pub entropic: f64,
    pub sum: f64,
    pub clamped_mass: f64,
    pub grid_n: usize,
    pub box_halfwidth: f64,
}

/// Which published table to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Photon-subtracted squeezed vacuum, `r = 0.0, 0.1, …, 0.6`.
    Psub,
    /// LG modes `m = 0`, `n = 0, …, 5`.
    Lg,
}

impl TableKind {
    pub fn family(self) -> Family {
        match self {
            TableKind::Psub => Family::PhotonSubtracted { k: 0 },
            TableKind::Lg => Family::LaguerreGauss { m: 0 },
        }
    }

    pub fn params(self) -> Vec<f64> {
        match self {
            TableKind::Psub => (0..=6).map(|i| f64::from(i) / 10.0).collect(),
            TableKind::Lg => (0..=5).map(f64::from).collect(),
        }
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psub" => Ok(TableKind::Psub),
            "lg" => Ok(TableKind::Lg),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected `psub` or `lg`".into(),
            }),
        }
    }
}

/// Reproduces a violation-ratio table. Per-row failures are returned as
/// `Err` strings so the caller can mark them.
pub fn ratio_table(kind: TableKind, cv: &CvEvaluator) -> Vec<std::result::Result<TableRow, (f64, String)>> {
    let family = kind.family();
    kind.params()
        .into_par_iter()
        .map(|param| {
            let run = || -> Result<TableRow> {
                let StateDescriptor::Cv(state) = family.state(param)? else {
                    unreachable!("table families are continuous-variable")
                };
                let reid = cv.reid_verdict(&state)?;
                let ent = cv.entropic_verdict(&state)?;
                let sum = cv.sum_verdict(&state)?;
                let bx = cv.config.evaluation.grid().marginal_box(&state)?;
                Ok(TableRow {
                    param,
                    reid: reid.ratio,
                    entropic: ent.ratio,
                    sum: sum.ratio,
                    clamped_mass: ent.clamped_mass,
                    grid_n: bx.n(),
                    box_halfwidth: bx.half_width(),
                })
            };
            run().map_err(|e| (param, e.to_string()))
        })
        .collect()
}

/// Bisection for the root of `f` on `[lo, hi]`; `f(lo)` and `f(hi)` must
/// differ in sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
