//! First and second moments of rotated quadratures, correlation
//! coefficients, linear-gain inferred variances, and sum variances.
//!
//! A [`MomentTable`] stores the mean vector and the full symmetric matrix of
//! raw second moments `⟨a b⟩` over `(X, P_X, Y, P_Y)`. Every rotated
//! quadrature `X_θ = X cos θ + P_X sin θ` (Bob) or `Y_φ = Y cos φ + P_Y sin φ`
//! (Alice) is linear in the point, so one table answers every angle.
//! All variances and correlations are computed on centered observables.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{CvState, PhaseSpacePoint};
use crate::quadrature::{integrate4_vec, IntegrationBox};

/// Variances below this are treated as vanishing.
const DEGENERATE_VARIANCE: f64 = 1e-14;

/// Which party a rotated quadrature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Mode `(X, P_X)`.
    Bob,
    /// Mode `(Y, P_Y)`.
    Alice,
}

pub fn rotated_quadrature(p: &PhaseSpacePoint, side: Side, angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    match side {
        Side::Bob => p.x * c + p.px * s,
        Side::Alice => p.y * c + p.py * s,
    }
}

/// Bob's two target angles and the estimator angle Alice uses for each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSetting {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Default for QuadratureSetting {
    /// `θ = (0, π/2)` inferred from `φ = (0, π/2)`: position from position,
    /// momentum from momentum.
    fn default() -> Self {
        Self {
            theta1: 0.0,
            theta2: FRAC_PI_2,
            phi1: 0.0,
            phi2: FRAC_PI_2,
        }
    }
}

impl QuadratureSetting {
    /// Angles are reduced into `[0, 2π)`.
    pub fn new(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let wrap = |a: f64| {
            if !a.is_finite() {
                return Err(Error::Domain(format!("angle must be finite, got {a}")));
            }
            Ok(a.rem_euclid(TAU))
        };
        Ok(Self {
            theta1: wrap(theta1)?,
            theta2: wrap(theta2)?,
            phi1: wrap(phi1)?,
            phi2: wrap(phi2)?,
        })
    }

    /// LG modes correlate `X` with `P_Y` and `P_X` with `Y`.
    pub fn cross_paired() -> Self {
        Self {
            theta1: 0.0,
            theta2: FRAC_PI_2,
            phi1: FRAC_PI_2,
            phi2: 0.0,
        }
    }

    /// Family default.
    pub fn for_state(state: &CvState) -> Self {
        match state {
            CvState::LaguerreGauss { .. } => Self::cross_paired(),
            _ => Self::default(),
        }
    }
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Quadrature { grid_n: usize, half_width: f64 },
}

/// Means and raw second moments of `(X, P_X, Y, P_Y)` for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    mean: [f64; 4],
    second: [[f64; 4]; 4],
    /// Integrated Wigner mass the moments were divided by (1 for closed forms).
    mass: f64,
    provenance: Provenance,
}

fn bob(theta: f64) -> [f64; 4] {
    let (s, c) = theta.sin_cos();
    [c, s, 0.0, 0.0]
}

fn alice(phi: f64) -> [f64; 4] {
    let (s, c) = phi.sin_cos();
    [0.0, 0.0, c, s]
}

impl MomentTable {
    /// Builds a table from a symmetric second-moment matrix (zero means).
    fn closed_form(second: [[f64; 4]; 4]) -> Self {
        Self {
            mean: [0.0; 4],
            second,
            mass: 1.0,
            provenance: Provenance::Analytic,
        }
    }

    /// Closed-form moments of each family.
    pub fn analytic(state: &CvState) -> Self {
        // index order: X, P_X, Y, P_Y
        let mut s = [[0.0; 4]; 4];
        match *state {
            CvState::Tmsv { r } => {
                let (sh, ch) = ((2.0 * r).sinh(), (2.0 * r).cosh());
                for (i, row) in s.iter_mut().enumerate() {
                    row[i] = 0.5 * ch;
                }
                s[0][2] = 0.5 * sh;
                s[1][3] = -0.5 * sh;
            }
            CvState::PhotonSubtracted { r, .. } => {
                let e = (2.0 * r).exp();
                let xx = 0.25 * (3.0 / e + e);
                let pp = 0.25 * (3.0 * e + 1.0 / e);
                s[0][0] = xx;
                s[2][2] = xx;
                s[1][1] = pp;
                s[3][3] = pp;
                s[0][2] = 0.25 * (e - 3.0 / e);
                s[1][3] = 0.25 * (1.0 / e - 3.0 * e);
            }
            CvState::LaguerreGauss { m, n } => {
                let (m, n) = (f64::from(m), f64::from(n));
                for (i, row) in s.iter_mut().enumerate() {
                    row[i] = 0.5 * (m + n + 1.0);
                }
                s[0][3] = 0.5 * (m - n);
                s[1][2] = 0.5 * (n - m);
            }
        }
        for i in 0..4 {
            for j in 0..i {
                s[i][j] = s[j][i];
            }
        }
        Self::closed_form(s)
    }

    /// Moments by one 4D Simpson sweep over the box.
    pub fn quadrature(state: &CvState, bx: &IntegrationBox) -> Result<Self> {
        let raw = integrate4_vec(
            |p| {
                let w = state.wigner(p);
                let v = p.as_array();
                [
                    w,
                    w * v[0],
                    w * v[1],
                    w * v[2],
                    w * v[3],
                    w * v[0] * v[0],
                    w * v[0] * v[1],
                    w * v[0] * v[2],
                    w * v[0] * v[3],
                    w * v[1] * v[1],
                    w * v[1] * v[2],
                    w * v[1] * v[3],
                    w * v[2] * v[2],
                    w * v[2] * v[3],
                    w * v[3] * v[3],
                ]
            },
            bx,
        )?;
        let mass = raw[0];
        if !(mass > 0.0) {
            return Err(Error::DegenerateMoment(format!("Wigner mass {mass} on the box")));
        }
        let mut mean = [0.0; 4];
        for (i, m) in mean.iter_mut().enumerate() {
            *m = raw[1 + i] / mass;
        }
        let mut second = [[0.0; 4]; 4];
        let mut idx = 5;
        for i in 0..4 {
            for j in i..4 {
                second[i][j] = raw[idx] / mass;
                second[j][i] = second[i][j];
                idx += 1;
            }
        }
        Ok(Self {
            mean,
            second,
            mass,
            provenance: Provenance::Quadrature {
                grid_n: bx.n(),
                half_width: bx.half_width(),
            },
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn means(&self) -> [f64; 4] {
        self.mean
    }

    /// Raw second moment `⟨a b⟩` by axis index.
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.second[i][j]
    }

    fn mean_of(&self, c: &[f64; 4]) -> f64 {
        c.iter().zip(&self.mean).map(|(a, b)| a * b).sum()
    }

    fn raw_of(&self, a: &[f64; 4], b: &[f64; 4]) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += a[i] * self.second[i][j] * b[j];
            }
        }
        acc
    }

    fn cov_of(&self, a: &[f64; 4], b: &[f64; 4]) -> f64 {
        self.raw_of(a, b) - self.mean_of(a) * self.mean_of(b)
    }

    /// `⟨X_θ⟩`
    pub fn mean_bob(&self, theta: f64) -> f64 {
        self.mean_of(&bob(theta))
    }

    /// `⟨Y_φ⟩`
    pub fn mean_alice(&self, phi: f64) -> f64 {
        self.mean_of(&alice(phi))
    }

    /// `⟨X_θ²⟩`
    pub fn second_bob(&self, theta: f64) -> f64 {
        let b = bob(theta);
        self.raw_of(&b, &b)
    }

    /// `⟨Y_φ²⟩`
    pub fn second_alice(&self, phi: f64) -> f64 {
        let a = alice(phi);
        self.raw_of(&a, &a)
    }

    /// `⟨X_θ Y_φ⟩`
    pub fn cross(&self, theta: f64, phi: f64) -> f64 {
        self.raw_of(&bob(theta), &alice(phi))
    }

    /// Symmetrized `⟨X_θ1 X_θ2⟩` on Bob's mode.
    pub fn bob_pair(&self, theta1: f64, theta2: f64) -> f64 {
        self.raw_of(&bob(theta1), &bob(theta2))
    }

    pub fn variance_bob(&self, theta: f64) -> f64 {
        let b = bob(theta);
        self.cov_of(&b, &b)
    }

    pub fn variance_alice(&self, phi: f64) -> f64 {
        let a = alice(phi);
        self.cov_of(&a, &a)
    }

    /// Centered `⟨X_θ Y_φ⟩ − ⟨X_θ⟩⟨Y_φ⟩`.
    pub fn covariance(&self, theta: f64, phi: f64) -> f64 {
        self.cov_of(&bob(theta), &alice(phi))
    }

    fn variance_bob_sum(&self, theta1: f64, theta2: f64) -> f64 {
        let (a, b) = (bob(theta1), bob(theta2));
        let s = [a[0] + b[0], a[1] + b[1], 0.0, 0.0];
        self.cov_of(&s, &s)
    }
}

/// `C_{θ,φ}` on centered moments.
pub fn correlation(t: &MomentTable, theta: f64, phi: f64) -> Result<f64> {
    let vx = t.variance_bob(theta);
    let vy = t.variance_alice(phi);
    if vx <= DEGENERATE_VARIANCE || vy <= DEGENERATE_VARIANCE {
        return Err(Error::DegenerateMoment(format!(
            "Var(X_θ) = {vx:e}, Var(Y_φ) = {vy:e} at θ = {theta}, φ = {phi}"
        )));
    }
    Ok((t.covariance(theta, phi) / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Gain minimizing `⟨(X_θ − g Y_φ)²⟩` on centered variables.
pub fn optimal_gain(t: &MomentTable, theta: f64, phi: f64) -> Result<f64> {
    let vy = t.variance_alice(phi);
    if vy <= DEGENERATE_VARIANCE {
        return Err(Error::DegenerateMoment(format!("Var(Y_φ) = {vy:e} at φ = {phi}")));
    }
    Ok(t.covariance(theta, phi) / vy)
}

/// Mean-square error of the linear estimate `g·Y_φ` of `X_θ` (centered).
pub fn inference_error(t: &MomentTable, theta: f64, phi: f64, gain: f64) -> f64 {
    t.variance_bob(theta) - 2.0 * gain * t.covariance(theta, phi) + gain * gain * t.variance_alice(phi)
}

/// `Δ²_inf X_θ = Var(X_θ)(1 − C²_{θ,φ})`, the error at the optimal gain.
pub fn inferred_variance(t: &MomentTable, theta: f64, phi: f64) -> Result<f64> {
    let c = correlation(t, theta, phi)?;
    Ok((t.variance_bob(theta) * (1.0 - c * c)).max(0.0))
}

/// `Δ(X_θ1 + X_θ2)` on Bob's reduced state.
pub fn sum_variance(t: &MomentTable, theta1: f64, theta2: f64) -> f64 {
    t.variance_bob_sum(theta1, theta2).max(0.0).sqrt()
}

/// `ΔX_θ1 + ΔX_θ2` on Bob's reduced state.
pub fn summed_deviation(t: &MomentTable, theta1: f64, theta2: f64) -> f64 {
    t.variance_bob(theta1).max(0.0).sqrt() + t.variance_bob(theta2).max(0.0).sqrt()
}

/// How moments are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Evaluation {
    /// Closed-form moments; entropies still need marginal grids.
    Analytic(crate::quadrature::GridSpec),
    /// Everything from the Wigner function by quadrature.
    Quadrature(crate::quadrature::GridSpec),
}

impl Evaluation {
    pub fn grid(&self) -> &crate::quadrature::GridSpec {
        match self {
            Evaluation::Analytic(g) | Evaluation::Quadrature(g) => g,
        }
    }
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation::Quadrature(crate::quadrature::GridSpec::default())
    }
}

/// Memoizes quadrature moment tables by `(state, box)`. Tables are
/// immutable once built and shared through `Arc`.
#[derive(Debug, Default)]
pub struct MomentCache {
    tables: Mutex<HashMap<String, Arc<MomentTable>>>,
}

impl MomentCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: &CvState, eval: &Evaluation) -> Result<Arc<MomentTable>> {
        let bx = eval.grid().moment_box(state)?;
        let key = match eval {
            Evaluation::Analytic(_) => format!("analytic|{state}"),
            Evaluation::Quadrature(_) => format!("{state}|{}|{}", bx.half_width(), bx.n()),
        };
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        // Built outside the lock; a racing duplicate is identical and harmless.
        let table = Arc::new(match eval {
            Evaluation::Analytic(_) => MomentTable::analytic(state),
            Evaluation::Quadrature(_) => MomentTable::quadrature(state, &bx)?,
        });
        self.tables
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.tables.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GridSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn rotated_quadrature_examples() {
        let p = PhaseSpacePoint::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(rotated_quadrature(&p, Side::Bob, 0.0), 1.0);
        assert!(rotated_quadrature(&p, Side::Bob, FRAC_PI_2).abs() < 1e-16);
        let p = PhaseSpacePoint::new(1.0, 1.0, 0.0, 0.0);
        assert_relative_eq!(rotated_quadrature(&p, Side::Bob, FRAC_PI_4), SQRT_2);
        let p = PhaseSpacePoint::new(0.0, 0.0, 2.0, 3.0);
        assert_relative_eq!(rotated_quadrature(&p, Side::Alice, FRAC_PI_2), 3.0);
    }

    #[test]
    fn settings_wrap_into_range() {
        let s = QuadratureSetting::new(-FRAC_PI_2, 7.0, 0.0, TAU).unwrap();
        assert_relative_eq!(s.theta1, 3.0 * FRAC_PI_2);
        assert_relative_eq!(s.theta2, 7.0 - TAU);
        assert_eq!(s.phi2, 0.0);
        assert!(QuadratureSetting::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tmsv_closed_forms() {
        for r in [0.1, 0.5, 0.8] {
            let t = MomentTable::analytic(&CvState::Tmsv { r });
            let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
            for (th, ph) in [(0.0, 0.0), (0.3, 1.1), (FRAC_PI_2, FRAC_PI_2)] {
                let paper = 0.5 * c - 0.5 * (2.0 * r).tanh() * s * (th + ph).cos().powi(2);
                assert_relative_eq!(inferred_variance(&t, th, ph).unwrap(), paper, epsilon = 1e-12);
            }
            assert_relative_eq!(inferred_variance(&t, 0.0, 0.0).unwrap(), 0.5 / c, epsilon = 1e-12);
            assert_relative_eq!(summed_deviation(&t, 0.0, FRAC_PI_2), (2.0 * c).sqrt(), epsilon = 1e-12);
            // X and P_X are uncorrelated, each with variance cosh2r/2
            assert_relative_eq!(sum_variance(&t, 0.0, FRAC_PI_2), c.sqrt(), epsilon = 1e-12);
        }
        let t = MomentTable::analytic(&CvState::Tmsv { r: 0.5 });
        assert_relative_eq!(correlation(&t, 0.0, 0.0).unwrap(), 1.0f64.tanh(), epsilon = 1e-12);
        assert_relative_eq!(
            inferred_variance(&t, 0.0, 0.0).unwrap(),
            1.0 / (2.0 * 1.0f64.cosh()),
            epsilon = 1e-12
        );
        let vac = MomentTable::analytic(&CvState::Tmsv { r: 0.0 });
        assert_eq!(correlation(&vac, 0.4, 1.3).unwrap(), 0.0);
        assert_relative_eq!(summed_deviation(&vac, 0.0, FRAC_PI_2), SQRT_2);
    }

    #[test]
    fn photon_subtracted_closed_forms() {
        for r in [0.0, 0.1, 0.4, 0.6] {
            let t = MomentTable::analytic(&CvState::PhotonSubtracted { r, k: 0 });
            let (c2, ch, sh) = ((2.0 * r).cosh(), r.cosh(), r.sinh());
            let d1 = inferred_variance(&t, 0.0, 0.0).unwrap();
            let d2 = inferred_variance(&t, FRAC_PI_2, FRAC_PI_2).unwrap();
            assert_relative_eq!(d1, 3.0 / (4.0 * (c2 - ch * sh)), epsilon = 1e-12);
            assert_relative_eq!(d2, 3.0 / (4.0 * (c2 + ch * sh)), epsilon = 1e-12);
            assert_relative_eq!(d1 * d2, 9.0 / (2.0 * (3.0 * (4.0 * r).cosh() + 5.0)), epsilon = 1e-12);
            let bound = (c2 - ch * sh).sqrt() + (c2 + ch * sh).sqrt();
            assert_relative_eq!(summed_deviation(&t, 0.0, FRAC_PI_2), bound, epsilon = 1e-12);
            assert_relative_eq!(sum_variance(&t, 0.0, FRAC_PI_2), (2.0 * c2).sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn lg_closed_forms() {
        // Δ²_inf = (2n+1)/(2(n+1)) for m = 0
        for n in 1..=5u32 {
            let t = MomentTable::analytic(&CvState::LaguerreGauss { m: 0, n });
            let s = QuadratureSetting::cross_paired();
            let nf = f64::from(n);
            let d1 = inferred_variance(&t, s.theta1, s.phi1).unwrap();
            let d2 = inferred_variance(&t, s.theta2, s.phi2).unwrap();
            assert_relative_eq!(d1, (2.0 * nf + 1.0) / (2.0 * (nf + 1.0)), epsilon = 1e-12);
            assert_relative_eq!(d2, d1, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_estimator_is_error() {
        let t = MomentTable::closed_form([[0.5, 0.0, 0.0, 0.0], [0.0, 0.5, 0.0, 0.0], [0.0; 4], [0.0; 4]]);
        assert!(matches!(correlation(&t, 0.0, 0.0), Err(Error::DegenerateMoment(_))));
        assert!(inferred_variance(&t, 0.0, 0.0).is_err());
        assert!(optimal_gain(&t, 0.0, 0.0).is_err());
    }

    #[test]
    fn gain_is_a_minimum() {
        for state in [
            CvState::Tmsv { r: 0.4 },
            CvState::PhotonSubtracted { r: 0.3, k: 1 },
            CvState::LaguerreGauss { m: 1, n: 3 },
        ] {
            let t = MomentTable::analytic(&state);
            for (th, ph) in [(0.0, 0.0), (FRAC_PI_2, FRAC_PI_2), (0.0, FRAC_PI_2), (0.7, 2.1)] {
                let g = optimal_gain(&t, th, ph).unwrap();
                let best = inference_error(&t, th, ph, g);
                assert_relative_eq!(best, inferred_variance(&t, th, ph).unwrap(), epsilon = 1e-12);
                for f in [0.99, 1.01] {
                    assert!(inference_error(&t, th, ph, g * f) >= best - 1e-15);
                }
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form_for_lg_with_m() {
        let s = CvState::LaguerreGauss { m: 2, n: 1 };
        let bx = GridSpec::uniform(61).moment_box(&s).unwrap();
        let q = MomentTable::quadrature(&s, &bx).unwrap();
        let a = MomentTable::analytic(&s);
        for i in 0..4 {
            for j in 0..4 {
                assert!((q.raw(i, j) - a.raw(i, j)).abs() < 1e-6, "({i},{j}) {} vs {}", q.raw(i, j), a.raw(i, j));
            }
        }
    }

    #[test]
    fn cache_reuses_tables() {
        let cache = MomentCache::new();
        let eval = Evaluation::Quadrature(GridSpec::uniform(33));
        let s = CvState::Tmsv { r: 0.2 };
        let a = cache.get(&s, &eval).unwrap();
        let b = cache.get(&s, &eval).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        cache.get(&s, &Evaluation::Analytic(GridSpec::default())).unwrap();
        assert_eq!(cache.len(), 2);
    }
}
