//! Explicit local-hidden-state models and a brute-force check that they never
//! violate the sum steering inequality.
//!
//! A model is a finite set of hidden variables λ with weights `P(λ)`, Alice's
//! response table `P(y|λ)` over a small alphabet, and one local quantum state
//! for Bob per λ. Bob's observable is `X_θ = cos θ X + sin θ P` for a mode, or
//! `X_θ = cos θ S_z + sin θ S_x` for a qubit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_HIDDEN: usize = 32;
pub const MAX_ALPHABET: usize = 8;
pub const MIN_CERTIFY_SAMPLES: usize = 1000;
/// Slack below `-SLACK_TOLERANCE` counts as a violation; anything above is rounding.
pub const SLACK_TOLERANCE: f64 = 1e-12;

const BATCH: usize = 256;
const PROB_TOL: f64 = 1e-12;

/// One of Bob's local states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BobState {
    /// Gaussian with mean `(x, p)` and covariance `[[vxx, cxp], [cxp, vpp]]`;
    /// physical iff `vxx·vpp − cxp² ≥ 1/4`.
    Gaussian { mean: [f64; 2], vxx: f64, vpp: f64, cxp: f64 },
    /// Bloch vector `(x, y, z)` with norm ≤ 1.
    Qubit { bloch: [f64; 3] },
}

impl BobState {
    fn validate(&self) -> Result<()> {
        match *self {
            BobState::Gaussian { mean, vxx, vpp, cxp } => {
                let det = vxx * vpp - cxp * cxp;
                if !(mean.iter().all(|m| m.is_finite()) && vxx > 0.0 && vpp > 0.0 && det >= 0.25 - 1e-12) {
                    return Err(Error::Domain(format!(
                        "Gaussian covariance ({vxx}, {vpp}, {cxp}) violates the uncertainty relation"
                    )));
                }
            }
            BobState::Qubit { bloch } => {
                let n = bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
                if !(n <= 1.0 + 1e-12) {
                    return Err(Error::Domain(format!("Bloch vector norm {n} exceeds 1")));
                }
            }
        }
        Ok(())
    }

    /// Direction of `X_θ` in the (X, P) plane, or on the qubit X–Z circle.
    fn direction(theta: f64) -> [f64; 2] {
        [theta.cos(), theta.sin()]
    }

    /// `⟨X_θ⟩`.
    pub fn mean(&self, theta: f64) -> f64 {
        let [c, s] = Self::direction(theta);
        match *self {
            BobState::Gaussian { mean, .. } => c * mean[0] + s * mean[1],
            BobState::Qubit { bloch } => 0.5 * (c * bloch[2] + s * bloch[0]),
        }
    }

    /// `Δ²_Q X_θ`.
    pub fn variance(&self, theta: f64) -> f64 {
        let [c, s] = Self::direction(theta);
        self.variance_along(c, s)
    }

    /// `Δ²_Q(X_θ1 + X_θ2)` as a single observable.
    pub fn pair_variance(&self, theta1: f64, theta2: f64) -> f64 {
        let (a, b) = (Self::direction(theta1), Self::direction(theta2));
        self.variance_along(a[0] + b[0], a[1] + b[1])
    }

    /// Variance of `c X + s P` (or `(c σz + s σx)/2`).
    fn variance_along(&self, c: f64, s: f64) -> f64 {
        match *self {
            BobState::Gaussian { vxx, vpp, cxp, .. } => c * c * vxx + s * s * vpp + 2.0 * c * s * cxp,
            BobState::Qubit { bloch } => {
                // (c σz + s σx)/2 squares to (c² + s²)/4
                let m = 0.5 * (c * bloch[2] + s * bloch[0]);
                ((c * c + s * s) / 4.0 - m * m).max(0.0)
            }
        }
    }

    fn is_qubit(&self) -> bool {
        matches!(self, BobState::Qubit { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsModel {
    weights: Vec<f64>,
    /// `responses[λ][y] = P(y|λ)`
    responses: Vec<Vec<f64>>,
    bob: Vec<BobState>,
}

fn check_probability(v: &[f64], what: &str) -> Result<()> {
    let total: f64 = v.iter().sum();
    if v.iter().any(|p| !(*p >= -PROB_TOL)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("{what} is not a probability vector (sum {total})")));
    }
    Ok(())
}

impl LhsModel {
    pub fn new(weights: Vec<f64>, responses: Vec<Vec<f64>>, bob: Vec<BobState>) -> Result<Self> {
        let l = weights.len();
        if l == 0 || l > MAX_HIDDEN {
            return Err(Error::Domain(format!("hidden-variable support must have 1..={MAX_HIDDEN} points, got {l}")));
        }
        if responses.len() != l || bob.len() != l {
            return Err(Error::Domain("weights, responses and Bob states must have equal length".into()));
        }
        let k = responses[0].len();
        if k == 0 || k > MAX_ALPHABET || responses.iter().any(|r| r.len() != k) {
            return Err(Error::Domain(format!("Alice's alphabet must have 1..={MAX_ALPHABET} symbols in every row")));
        }
        check_probability(&weights, "P(λ)")?;
        for row in &responses {
            check_probability(row, "P(y|λ)")?;
        }
        for b in &bob {
            b.validate()?;
        }
        if bob.iter().any(BobState::is_qubit) != bob.iter().all(BobState::is_qubit) {
            return Err(Error::Domain("Bob's states must be all Gaussian or all qubit".into()));
        }
        Ok(Self { weights, responses, bob })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn responses(&self) -> &[Vec<f64>] {
        &self.responses
    }

    pub fn bob(&self) -> &[BobState] {
        &self.bob
    }

    pub fn alphabet(&self) -> usize {
        self.responses[0].len()
    }

    /// `P(y)`.
    pub fn alice_marginal(&self) -> Vec<f64> {
        (0..self.alphabet())
            .map(|y| self.weights.iter().zip(&self.responses).map(|(w, r)| w * r[y]).sum())
            .collect()
    }

    /// `P(λ|y)`, or `None` when `P(y) = 0`.
    pub fn posterior(&self, y: usize) -> Option<Vec<f64>> {
        let joint: Vec<f64> = self.weights.iter().zip(&self.responses).map(|(w, r)| w * r[y]).collect();
        let py: f64 = joint.iter().sum();
        (py > 0.0).then(|| joint.into_iter().map(|j| j / py).collect())
    }

    /// `Δ²(X_θ|y)` from the mixture `Σ_λ P(λ|y) P_Q(X_θ|λ)`.
    fn conditional_variance(&self, post: &[f64], theta: f64) -> f64 {
        let mut mean = 0.0;
        let mut second = 0.0;
        for (p, b) in post.iter().zip(&self.bob) {
            let m = b.mean(theta);
            mean += p * m;
            second += p * (b.variance(theta) + m * m);
        }
        (second - mean * mean).max(0.0)
    }

    /// `Δ²_inf X_θ` with the optimal estimator `⟨X_θ⟩_y`.
    pub fn inferred_variance(&self, theta: f64) -> f64 {
        let py = self.alice_marginal();
        (0..self.alphabet())
            .filter_map(|y| self.posterior(y).map(|post| py[y] * self.conditional_variance(&post, theta)))
            .sum()
    }

    /// Per outcome `y` with `P(y) > 0`: `Δ²(X_θ|y) − Σ_λ P(λ|y) Δ²_Q(X_θ|λ)`.
    pub fn convexity_gaps(&self, theta: f64) -> Vec<f64> {
        (0..self.alphabet())
            .filter_map(|y| self.posterior(y))
            .map(|post| {
                let avg: f64 = post.iter().zip(&self.bob).map(|(p, b)| p * b.variance(theta)).sum();
                self.conditional_variance(&post, theta) - avg
            })
            .collect()
    }

    /// `u_i = √P(λ_i) Δ_Q(X_θ1|λ_i)` and the same for `v` with `θ2`.
    pub fn uv_vectors(&self, theta1: f64, theta2: f64) -> (Vec<f64>, Vec<f64>) {
        let build = |t: f64| -> Vec<f64> {
            self.weights
                .iter()
                .zip(&self.bob)
                .map(|(w, b)| w.sqrt() * b.variance(t).sqrt())
                .collect()
        };
        (build(theta1), build(theta2))
    }

    /// `√(Σ_λ P(λ) Δ²_Q(X_θ1 + X_θ2|λ))`.
    pub fn mixture_sum_deviation(&self, theta1: f64, theta2: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.bob)
            .map(|(w, b)| w * b.pair_variance(theta1, theta2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `(Δ_inf X_θ1, Δ_inf X_θ2)`.
pub fn lhs_inferred_variances(model: &LhsModel, theta1: f64, theta2: f64) -> (f64, f64) {
    (model.inferred_variance(theta1).sqrt(), model.inferred_variance(theta2).sqrt())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(|u| + |v|, |u + v|)`.
pub fn triangle_sides(model: &LhsModel, theta1: f64, theta2: f64) -> (f64, f64) {
    let (u, v) = model.uv_vectors(theta1, theta2);
    let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
    (norm(&u) + norm(&v), norm(&sum))
}

/// `Δ_inf X_θ1 + Δ_inf X_θ2 − √(Σ_λ P(λ) Δ²_Q(X_θ1 + X_θ2|λ))`.
pub fn sum_slack(model: &LhsModel, theta1: f64, theta2: f64) -> f64 {
    let (d1, d2) = lhs_inferred_variances(model, theta1, theta2);
    d1 + d2 - model.mixture_sum_deviation(theta1, theta2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LhsDomain {
    Cv,
    Qubit,
}

impl fmt::Display for LhsDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LhsDomain::Cv => "cv",
            LhsDomain::Qubit => "qubit",
        })
    }
}

impl FromStr for LhsDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cv" => Ok(LhsDomain::Cv),
            "qubit" => Ok(LhsDomain::Qubit),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected cv or qubit".into(),
            }),
        }
    }
}

/// A model that broke the inequality, with the angles used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub slack: f64,
    pub model: LhsModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    pub seed: u64,
    pub domain: LhsDomain,
    /// Models where the convexity, `Δ_inf ≥ |u|` or triangle step failed by more than the tolerance.
    pub invariant_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
}

impl CertificationReport {
    pub fn certified(&self) -> bool {
        self.violations == 0 && self.invariant_failures == 0
    }
}

fn random_probabilities(rng: &mut impl Rng, k: usize, sharp: bool) -> Vec<f64> {
    if sharp {
        let mut v = vec![0.0; k];
        v[rng.gen_range(0..k)] = 1.0;
        return v;
    }
    // Exponential spacings give a uniform point on the simplex.
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn random_bob(rng: &mut impl Rng, domain: LhsDomain) -> BobState {
    match domain {
        LhsDomain::Cv => {
            let r: f64 = rng.gen_range(0.0..1.5);
            let thermal = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) };
            let phi = rng.gen_range(0.0..PI);
            let scale = 0.5 * (2.0 * thermal + 1.0);
            let (a, b) = (scale * (-2.0 * r).exp(), scale * (2.0 * r).exp());
            let (c, s) = (phi.cos(), phi.sin());
            BobState::Gaussian {
                mean: [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                vxx: a * c * c + b * s * s,
                vpp: a * s * s + b * c * c,
                cxp: (a - b) * c * s,
            }
        }
        LhsDomain::Qubit => {
            let len = if rng.gen_bool(0.5) { 1.0 } else { rng.gen::<f64>().cbrt() };
            let z: f64 = rng.gen_range(-1.0..1.0);
            let az = rng.gen_range(0.0..2.0 * PI);
            let rho = (1.0 - z * z).sqrt();
            BobState::Qubit {
                bloch: [len * rho * az.cos(), len * rho * az.sin(), len * z],
            }
        }
    }
}

/// Draws a random model together with a pair of measurement angles.
pub fn random_model(rng: &mut impl Rng, domain: LhsDomain) -> (LhsModel, f64, f64) {
    let l = rng.gen_range(1..=MAX_HIDDEN);
    let k = rng.gen_range(1..=MAX_ALPHABET);
    let sharp = rng.gen_bool(0.3);
    let weights = random_probabilities(rng, l, false);
    let responses = (0..l).map(|_| random_probabilities(rng, k, sharp)).collect();
    let bob = (0..l).map(|_| random_bob(rng, domain)).collect();
    let model = LhsModel::new(weights, responses, bob).expect("sampler produces valid models");
    (model, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI))
}

/// Checks every intermediate inequality of the derivation on one model:
/// per-outcome convexity, `Δ_inf X_θi ≥ |u|, |v|`, and `|u| + |v| ≥ |u + v|`.
pub fn micro_invariants_hold(model: &LhsModel, theta1: f64, theta2: f64) -> bool {
    let convex = [theta1, theta2]
        .into_iter()
        .all(|t| model.convexity_gaps(t).into_iter().all(|g| g >= -SLACK_TOLERANCE));
    let (u, v) = model.uv_vectors(theta1, theta2);
    let (d1, d2) = lhs_inferred_variances(model, theta1, theta2);
    let dominated = d1 >= norm(&u) - SLACK_TOLERANCE && d2 >= norm(&v) - SLACK_TOLERANCE;
    let (sides, hyp) = triangle_sides(model, theta1, theta2);
    convex && dominated && sides >= hyp - SLACK_TOLERANCE
}

struct BatchResult {
    invariant_failures: usize,
    violations: usize,
    min_slack: f64,
    first: Option<Violation>,
}

/// Samples `samples` random models and checks the sum inequality on each.
///
/// Batch `b` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, so
/// results do not depend on the number of worker threads.
pub fn certify_no_violation(samples: usize, seed: u64, domain: LhsDomain) -> Result<CertificationReport> {
    if samples < MIN_CERTIFY_SAMPLES {
        return Err(Error::Domain(format!("certification needs at least {MIN_CERTIFY_SAMPLES} samples, got {samples}")));
    }
    let batches = samples.div_ceil(BATCH);
    let results: Vec<BatchResult> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let start = b * BATCH;
            let end = (start + BATCH).min(samples);
            let mut out = BatchResult {
                invariant_failures: 0,
                violations: 0,
                min_slack: f64::INFINITY,
                first: None,
            };
            for sample in start..end {
                let (model, theta1, theta2) = random_model(&mut rng, domain);
                let slack = sum_slack(&model, theta1, theta2);
                out.min_slack = out.min_slack.min(slack);
                if !micro_invariants_hold(&model, theta1, theta2) {
                    out.invariant_failures += 1;
                }
                if slack < -SLACK_TOLERANCE || !slack.is_finite() {
                    out.violations += 1;
                    if out.first.is_none() {
                        out.first = Some(Violation {
                            sample,
                            theta1,
                            theta2,
                            slack,
                            model,
                        });
                    }
                }
            }
            out
        })
        .collect();
    Ok(CertificationReport {
        samples,
        violations: results.iter().map(|r| r.violations).sum(),
        min_slack: results.iter().map(|r| r.min_slack).fold(f64::INFINITY, f64::min),
        seed,
        domain,
        invariant_failures: results.iter().map(|r| r.invariant_failures).sum(),
        first_violation: results.into_iter().find_map(|r| r.first),
    })
}

/// Grid search over two-point models with deterministic Alice responses,
/// minimum-uncertainty Bob states and a sweep of angle gaps. Returns the
/// smallest slack found and the model attaining it.
pub fn adversarial_min_slack(domain: LhsDomain, resolution: usize) -> (f64, LhsModel, f64, f64) {
    let res = resolution.max(2);
    let grid = |lo: f64, hi: f64| (0..res).map(move |i| lo + (hi - lo) * i as f64 / (res - 1) as f64);
    let mut best: Option<(f64, LhsModel, f64, f64)> = None;
    let mut consider = |model: LhsModel, t1: f64, t2: f64| {
        let s = sum_slack(&model, t1, t2);
        if best.as_ref().is_none_or(|b| s < b.0) {
            best = Some((s, model, t1, t2));
        }
    };
    for w in grid(0.05, 0.95) {
        for gap in grid(0.0, PI) {
            for shape in grid(0.0, 1.0) {
                for sep in grid(0.0, 3.0) {
                    let states = match domain {
                        LhsDomain::Cv => {
                            let r = 1.5 * shape;
                            let (a, b) = (0.5 * (-2.0 * r).exp(), 0.5 * (2.0 * r).exp());
                            let phi = gap / 2.0 + PI / 2.0;
                            let (c, s) = (phi.cos(), phi.sin());
                            let make = |sign: f64| BobState::Gaussian {
                                mean: [sign * sep * c, sign * sep * s],
                                vxx: a * c * c + b * s * s,
                                vpp: a * s * s + b * c * c,
                                cxp: (a - b) * c * s,
                            };
                            [make(1.0), make(-1.0)]
                        }
                        LhsDomain::Qubit => {
                            let ang = gap / 2.0 + PI * shape;
                            let len = (sep / 3.0).min(1.0);
                            let make = |sign: f64| BobState::Qubit {
                                bloch: [sign * len * ang.sin(), 0.0, sign * len * ang.cos()],
                            };
                            [make(1.0), make(-1.0)]
                        }
                    };
                    let model = LhsModel::new(
                        vec![w, 1.0 - w],
                        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                        states.to_vec(),
                    )
                    .expect("grid models are valid");
                    consider(model, 0.0, gap);
                }
            }
        }
    }
    best.expect("grid is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn vacuum_at(x: f64, p: f64) -> BobState {
        BobState::Gaussian {
            mean: [x, p],
            vxx: 0.5,
            vpp: 0.5,
            cxp: 0.0,
        }
    }

    #[test]
    fn single_hidden_variable_is_bobs_own_spread() {
        let sq = BobState::Gaussian {
            mean: [0.3, -1.0],
            vxx: 0.2,
            vpp: 1.25,
            cxp: 0.0,
        };
        let m = LhsModel::new(vec![1.0], vec![vec![0.25, 0.75]], vec![sq.clone()]).unwrap();
        let (d1, d2) = lhs_inferred_variances(&m, 0.0, FRAC_PI_2);
        assert_relative_eq!(d1, 0.2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(d2, 1.25f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn deterministic_responses_total_variance() {
        // Alice learns λ exactly: Δ²_inf = Σ P(λ) Δ²_Q
        let a = BobState::Gaussian {
            mean: [1.0, 0.0],
            vxx: 0.5,
            vpp: 0.5,
            cxp: 0.0,
        };
        let b = BobState::Gaussian {
            mean: [-2.0, 0.5],
            vxx: 1.0,
            vpp: 0.5,
            cxp: 0.1,
        };
        let m = LhsModel::new(vec![0.3, 0.7], vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![a, b]).unwrap();
        let var = m.inferred_variance(0.0);
        assert_relative_eq!(var, 0.3 * 0.5 + 0.7 * 1.0, epsilon = 1e-14);
    }

    #[test]
    fn uninformative_responses_total_variance() {
        // Alice's outcome carries no information: Δ²_inf is the mixture variance.
        let m = LhsModel::new(
            vec![0.4, 0.6],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![vacuum_at(1.0, 0.0), vacuum_at(-1.0, 0.0)],
        )
        .unwrap();
        // mean = -0.2, E[X²] = 0.5 + 1 => var = 1.5 - 0.04
        assert_relative_eq!(m.inferred_variance(0.0), 1.46, epsilon = 1e-14);
        assert_relative_eq!(m.inferred_variance(FRAC_PI_2), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn invalid_models_rejected() {
        let v = vacuum_at(0.0, 0.0);
        assert!(LhsModel::new(vec![0.5, 0.4], vec![vec![1.0]; 2], vec![v.clone(); 2]).is_err());
        assert!(LhsModel::new(vec![1.0], vec![vec![0.5, 0.6]], vec![v.clone()]).is_err());
        let squeezed_too_far = BobState::Gaussian {
            mean: [0.0, 0.0],
            vxx: 0.1,
            vpp: 0.5,
            cxp: 0.0,
        };
        assert!(LhsModel::new(vec![1.0], vec![vec![1.0]], vec![squeezed_too_far]).is_err());
        let q = BobState::Qubit { bloch: [0.0, 0.0, 1.1] };
        assert!(LhsModel::new(vec![1.0], vec![vec![1.0]], vec![q]).is_err());
        assert!(LhsModel::new(vec![1.0 / 33.0; 33], vec![vec![1.0]; 33], vec![v.clone(); 33]).is_err());
        assert!(LhsModel::new(vec![1.0], vec![vec![1.0 / 9.0; 9]], vec![v]).is_err());
    }

    #[test]
    fn qubit_moments() {
        let up = BobState::Qubit { bloch: [0.0, 0.0, 1.0] };
        assert_relative_eq!(up.mean(0.0), 0.5);
        assert_relative_eq!(up.variance(0.0), 0.0);
        assert_relative_eq!(up.variance(FRAC_PI_2), 0.25);
        // (S_z + S_x) on |0⟩: ⟨·²⟩ = 1/2, mean 1/2
        assert_relative_eq!(up.pair_variance(0.0, FRAC_PI_2), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn certify_rejects_small_runs() {
        assert!(certify_no_violation(999, 1, LhsDomain::Cv).is_err());
    }

    #[test]
    fn certify_is_reproducible() {
        let a = certify_no_violation(1000, 9, LhsDomain::Qubit).unwrap();
        let b = certify_no_violation(1000, 9, LhsDomain::Qubit).unwrap();
        assert_eq!(a, b);
        assert!(a.certified());
        let json = serde_json::to_value(&a).unwrap();
        for key in ["samples", "violations", "min_slack", "seed"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn adversarial_grids_stay_non_negative() {
        for domain in [LhsDomain::Cv, LhsDomain::Qubit] {
            let (slack, model, t1, t2) = adversarial_min_slack(domain, 7);
            assert!(slack >= -SLACK_TOLERANCE, "{domain}: {slack} at {t1}, {t2}: {model:?}");
        }
    }
}
