//! Tensor-grid Simpson integration over phase space, Wigner marginals, and
//! a seeded Monte Carlo cross-check.
//!
//! Reductions are deterministic: the outermost axis is split into one slice
//! per node, each slice is summed sequentially with compensated summation,
//! and slice results are combined pairwise in index order. The result does
//! not depend on how many worker threads rayon uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{Axis, CvState, PhaseSpacePoint};

/// Default points per axis for direct 4D moment integrals.
pub const DEFAULT_MOMENT_N: usize = 81;
/// Default points per axis for 2D marginal grids.
pub const DEFAULT_MARGINAL_N: usize = 121;
/// Smallest accepted number of nodes per axis.
pub const MIN_NODES: usize = 33;
/// Marginals whose negative mass exceeds this fraction of the total are rejected.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-6;
/// Allowed mass deviation of a normalized density grid.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-3;

/// Symmetric box `[-L, L]^d` sampled with `N` uniform nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationBox {
    half_width: f64,
    n: usize,
}

impl IntegrationBox {
    /// `n` must be odd (the origin is a node) and at least [`MIN_NODES`].
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidBox(format!("half-width must be > 0, got {half_width}")));
        }
        if n < MIN_NODES || n % 2 == 0 {
            return Err(Error::InvalidBox(format!(
                "node count must be odd and ≥ {MIN_NODES}, got {n}"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| -self.half_width + h * i as f64).collect()
    }

    /// Composite Simpson weights `h/3 · (1, 4, 2, 4, …, 4, 1)`.
    pub fn simpson_weights(&self) -> Vec<f64> {
        let h3 = self.step() / 3.0;
        (0..self.n)
            .map(|i| {
                if i == 0 || i == self.n - 1 {
                    h3
                } else if i % 2 == 1 {
                    4.0 * h3
                } else {
                    2.0 * h3
                }
            })
            .collect()
    }

    /// Same box with the node count doubled (kept odd).
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            n: 2 * self.n - 1,
        }
    }

    pub fn volume4(&self) -> f64 {
        (2.0 * self.half_width).powi(4)
    }
}

/// Grid resolution used for a state; the half-width defaults per family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub moment_n: usize,
    pub marginal_n: usize,
    pub half_width: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            moment_n: DEFAULT_MOMENT_N,
            marginal_n: DEFAULT_MARGINAL_N,
            half_width: None,
        }
    }
}

impl GridSpec {
    /// Same node count for moments and marginals.
    pub fn uniform(n: usize) -> Self {
        Self {
            moment_n: n,
            marginal_n: n,
            half_width: None,
        }
    }

    pub fn with_half_width(mut self, half_width: Option<f64>) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn half_width_for(&self, state: &CvState) -> f64 {
        self.half_width.unwrap_or_else(|| state.default_half_width())
    }

    pub fn moment_box(&self, state: &CvState) -> Result<IntegrationBox> {
        IntegrationBox::new(self.half_width_for(state), self.moment_n)
    }

    pub fn marginal_box(&self, state: &CvState) -> Result<IntegrationBox> {
        IntegrationBox::new(self.half_width_for(state), self.marginal_n)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Combines slice results pairwise in index order.
fn pairwise<const K: usize>(mut parts: Vec<[f64; K]>) -> [f64; K] {
    if parts.is_empty() {
        return [0.0; K];
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| {
                let mut out = c[0];
                if let Some(b) = c.get(1) {
                    for (o, v) in out.iter_mut().zip(b) {
                        *o += v;
                    }
                }
                out
            })
            .collect();
    }
    parts[0]
}

/// `∫ f d⁴p` over the box by tensorized composite Simpson.
pub fn integrate4<F>(f: F, bx: &IntegrationBox) -> Result<f64>
where
    F: Fn(&PhaseSpacePoint) -> f64 + Sync,
{
    integrate4_vec(|p| [f(p)], bx).map(|[v]| v)
}

/// Integrates `K` components of a vector-valued field in one sweep.
pub fn integrate4_vec<const K: usize, F>(f: F, bx: &IntegrationBox) -> Result<[f64; K]>
where
    F: Fn(&PhaseSpacePoint) -> [f64; K] + Sync,
{
    let nodes = bx.nodes();
    let w = bx.simpson_weights();
    let n = bx.n();
    let slices: Vec<[f64; K]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = [Compensated::default(); K];
            let mut p = PhaseSpacePoint::new(nodes[i], 0.0, 0.0, 0.0);
            for j in 0..n {
                p.px = nodes[j];
                let wij = w[i] * w[j];
                for k in 0..n {
                    p.y = nodes[k];
                    let wijk = wij * w[k];
                    for l in 0..n {
                        p.py = nodes[l];
                        let vals = f(&p);
                        let wt = wijk * w[l];
                        for (a, v) in acc.iter_mut().zip(vals) {
                            if !v.is_finite() {
                                return Err(Error::NonFiniteSample { point: p, value: v });
                            }
                            a.add(wt * v);
                        }
                    }
                }
            }
            Ok(acc.map(|a| a.value()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise(slices))
}

/// One axis of a sampled density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub axis: Axis,
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl GridAxis {
    pub fn from_box(axis: Axis, bx: &IntegrationBox) -> Self {
        Self {
            axis,
            start: -bx.half_width(),
            step: bx.step(),
            len: bx.n(),
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

/// A probability density sampled on a uniform 1D or 2D grid (row-major,
/// first axis slowest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    axes: Vec<GridAxis>,
    values: Vec<f64>,
    /// Mass removed by clamping negative samples to zero, relative to the
    /// total mass before renormalization.
    clamped_mass: f64,
}

impl DensityGrid {
    /// Builds a grid from raw samples. Negative values are clamped to zero.
    pub fn from_samples(axes: Vec<GridAxis>, values: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.len).product();
        if axes.is_empty() || values.len() != expected {
            return Err(Error::InvalidBox(format!(
                "grid has {} values but axes describe {expected}",
                values.len()
            )));
        }
        let mut grid = Self {
            axes,
            values,
            clamped_mass: 0.0,
        };
        let measure = grid.cell_measure();
        let total: f64 = grid.values.iter().sum::<f64>() * measure;
        let negative: f64 = grid.values.iter().filter(|v| **v < 0.0).sum::<f64>() * measure;
        for v in &mut grid.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        grid.clamped_mass = if total != 0.0 { -negative / total } else { 0.0 };
        Ok(grid)
    }

    /// Samples `f` on the given axes.
    pub fn sample<F: Fn(&[f64]) -> f64>(axes: Vec<GridAxis>, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(axes.iter().map(|a| a.len).product());
        match axes.as_slice() {
            [a] => values.extend((0..a.len).map(|i| f(&[a.node(i)]))),
            [a, b] => {
                for i in 0..a.len {
                    for j in 0..b.len {
                        values.push(f(&[a.node(i), b.node(j)]));
                    }
                }
            }
            _ => return Err(Error::InvalidBox("density grids are 1D or 2D".into())),
        }
        Self::from_samples(axes, values)
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clamped_mass(&self) -> f64 {
        self.clamped_mass
    }

    pub fn cell_measure(&self) -> f64 {
        self.axes.iter().map(|a| a.step).product()
    }

    pub fn mass(&self) -> f64 {
        let mut acc = Compensated::default();
        for v in &self.values {
            acc.add(*v);
        }
        acc.value() * self.cell_measure()
    }

    /// Rescales the values to unit mass.
    pub fn normalized(mut self) -> Result<Self> {
        let mass = self.mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Normalization {
                mass,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
        for v in &mut self.values {
            *v /= mass;
        }
        Ok(self)
    }

    /// Integrates out every axis except `keep` (an index into [`axes`](Self::axes)).
    pub fn marginal(&self, keep: usize) -> Result<DensityGrid> {
        match (self.axes.as_slice(), keep) {
            ([_], 0) => Ok(self.clone()),
            ([a, b], 0) => {
                let values = (0..a.len)
                    .map(|i| self.values[i * b.len..(i + 1) * b.len].iter().sum::<f64>() * b.step)
                    .collect();
                Ok(Self {
                    axes: vec![*a],
                    values,
                    clamped_mass: self.clamped_mass,
                })
            }
            ([a, b], 1) => {
                let values = (0..b.len)
                    .map(|j| (0..a.len).map(|i| self.values[i * b.len + j]).sum::<f64>() * a.step)
                    .collect();
                Ok(Self {
                    axes: vec![*b],
                    values,
                    clamped_mass: self.clamped_mass,
                })
            }
            _ => Err(Error::InvalidBox(format!(
                "axis index {keep} out of range for a {}D grid",
                self.axes.len()
            ))),
        }
    }

    /// Mean and covariance of a 2D grid: `(mean_a, mean_b, var_a, var_b, cov)`.
    pub fn moments2(&self) -> Result<[f64; 5]> {
        let [a, b] = self.axes.as_slice() else {
            return Err(Error::InvalidBox("moments2 needs a 2D grid".into()));
        };
        let m = self.cell_measure();
        let mut s = [0.0f64; 6];
        for i in 0..a.len {
            let u = a.node(i);
            for j in 0..b.len {
                let v = b.node(j);
                let p = self.values[i * b.len + j] * m;
                s[0] += p;
                s[1] += p * u;
                s[2] += p * v;
                s[3] += p * u * u;
                s[4] += p * v * v;
                s[5] += p * u * v;
            }
        }
        let (mu, mv) = (s[1] / s[0], s[2] / s[0]);
        Ok([
            mu,
            mv,
            s[3] / s[0] - mu * mu,
            s[4] / s[0] - mv * mv,
            s[5] / s[0] - mu * mv,
        ])
    }
}

/// Joint density of two phase-space axes, obtained by integrating the
/// Wigner function over the other two. The result is clamped at zero and
/// renormalized.
pub fn marginalize(state: &CvState, kept: (Axis, Axis), bx: &IntegrationBox) -> Result<DensityGrid> {
    let (ka, kb) = kept;
    if ka == kb {
        return Err(Error::Domain(format!("kept axes must differ, got ({ka}, {kb})")));
    }
    let mut discarded = Axis::ALL.into_iter().filter(|a| *a != ka && *a != kb);
    let (da, db) = (discarded.next().unwrap(), discarded.next().unwrap());
    let nodes = bx.nodes();
    let w = bx.simpson_weights();
    let n = bx.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n);
            let mut p = PhaseSpacePoint::ORIGIN;
            p.set(ka, nodes[i]);
            for j in 0..n {
                p.set(kb, nodes[j]);
                let mut acc = Compensated::default();
                for k in 0..n {
                    p.set(da, nodes[k]);
                    for l in 0..n {
                        p.set(db, nodes[l]);
                        let v = state.wigner(&p);
                        if !v.is_finite() {
                            return Err(Error::NonFiniteSample { point: p, value: v });
                        }
                        acc.add(w[k] * w[l] * v);
                    }
                }
                row.push(acc.value());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let axes = vec![GridAxis::from_box(ka, bx), GridAxis::from_box(kb, bx)];
    let grid = DensityGrid::from_samples(axes, values)?;
    if grid.clamped_mass > NEGATIVE_MASS_TOLERANCE {
        return Err(Error::MarginalNegativity {
            negative: grid.clamped_mass,
            total: grid.mass(),
        });
    }
    grid.normalized()
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

const MC_CHUNK: usize = 4096;

/// Welford accumulator; merged with Chan's formula.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + d * (other.n as f64 / n as f64),
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64),
        }
    }
}

/// Uniform-sampling Monte Carlo over the 4D box. Samples are drawn in fixed
/// chunks, each from its own ChaCha stream, so the result is reproducible
/// for a fixed seed regardless of thread count.
pub fn mc_integrate4<F>(f: F, bx: &IntegrationBox, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&PhaseSpacePoint) -> f64 + Sync,
{
    if samples < 10_000 {
        return Err(Error::Domain(format!("need at least 10^4 samples, got {samples}")));
    }
    let l = bx.half_width();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = Welford::default();
            for _ in 0..count {
                let p = PhaseSpacePoint::new(
                    rng.gen_range(-l..l),
                    rng.gen_range(-l..l),
                    rng.gen_range(-l..l),
                    rng.gen_range(-l..l),
                );
                let v = f(&p);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample { point: p, value: v });
                }
                acc.push(v);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = parts.into_iter().fold(Welford::default(), Welford::merge);
    let volume = bx.volume4();
    let var = if total.n > 1 {
        total.m2 / (total.n - 1) as f64
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: volume * total.mean,
        stderr: volume * (var / total.n as f64).sqrt(),
    })
}

/// Estimated Wigner mass outside `[-L, L]^4` for the squeezed families,
/// from the Gaussian envelope (per-quadrature variance `cosh 2r / 2`) with a
/// union bound over the four axes. The photon-subtracted bracket is bounded
/// by its value on the box boundary. `None` for LG modes.
pub fn envelope_tail_mass(state: &CvState, half_width: f64) -> Option<f64> {
    let r = state.squeezing()?;
    let var = 0.5 * (2.0 * r).cosh();
    let z2 = half_width * half_width / (2.0 * var);
    let bracket = match state {
        CvState::PhotonSubtracted { .. } => 1.0 + 4.0 * (2.0 * r).exp() * half_width * half_width,
        _ => 1.0,
    };
    Some(4.0 * 2.0 * (-z2).exp() * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{wigner_lg, wigner_tmsv};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn box_validation() {
        assert!(IntegrationBox::new(6.0, 81).is_ok());
        assert!(IntegrationBox::new(6.0, 80).is_err());
        assert!(IntegrationBox::new(6.0, 31).is_err());
        assert!(IntegrationBox::new(0.0, 81).is_err());
        assert!(IntegrationBox::new(f64::NAN, 81).is_err());
        let b = IntegrationBox::new(6.0, 81).unwrap();
        assert_eq!(b.nodes()[40], 0.0);
        assert_eq!(b.refined().n(), 161);
        let wsum: f64 = b.simpson_weights().iter().sum();
        assert_relative_eq!(wsum, 12.0, max_relative = 1e-14);
    }

    #[test]
    fn unit_gaussian_integrates_to_one() {
        let b = IntegrationBox::new(6.0, 81).unwrap();
        let v = integrate4(
            |p| (-(p.x * p.x + p.px * p.px + p.y * p.y + p.py * p.py)).exp() / (PI * PI),
            &b,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn vacuum_position_variance() {
        let b = IntegrationBox::new(6.0, 81).unwrap();
        let v = integrate4(|p| p.x * p.x * wigner_tmsv(0.0, p), &b).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "{v}");
    }

    #[test]
    fn non_finite_sample_reports_point() {
        let b = IntegrationBox::new(1.0, 33).unwrap();
        let err = integrate4(|p| if p.x > 0.9 { f64::NAN } else { 0.0 }, &b).unwrap_err();
        match err {
            Error::NonFiniteSample { point, .. } => assert!(point.x > 0.9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vacuum_marginal_factorizes() {
        let s = CvState::Tmsv { r: 0.0 };
        let b = IntegrationBox::new(6.0, 61).unwrap();
        let g = marginalize(&s, (Axis::X, Axis::Y), &b).unwrap();
        let nodes = b.nodes();
        for (i, x) in nodes.iter().enumerate().step_by(7) {
            for (j, y) in nodes.iter().enumerate().step_by(5) {
                let expected = (-(x * x) - y * y).exp() / PI;
                assert!((g.values()[i * 61 + j] - expected).abs() < 1e-8);
            }
        }
        assert_relative_eq!(g.mass(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn lg_marginal_is_nonnegative() {
        let s = CvState::LaguerreGauss { m: 0, n: 1 };
        let b = IntegrationBox::new(6.0, 41).unwrap();
        let g = marginalize(&s, (Axis::X, Axis::Y), &b).unwrap();
        assert!(g.values().iter().all(|v| *v >= 0.0));
        assert!(g.clamped_mass() <= 1e-12);
    }

    #[test]
    fn same_axis_twice_is_rejected() {
        let b = IntegrationBox::new(6.0, 33).unwrap();
        assert!(marginalize(&CvState::Tmsv { r: 0.1 }, (Axis::X, Axis::X), &b).is_err());
    }

    #[test]
    fn density_grid_clamps_and_marginalizes() {
        let ax = GridAxis {
            axis: Axis::X,
            start: 0.0,
            step: 0.5,
            len: 2,
        };
        let ay = GridAxis {
            axis: Axis::Y,
            ..ax
        };
        let g = DensityGrid::from_samples(vec![ax, ay], vec![1.0, -0.5, 2.0, 1.0]).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 2.0, 1.0]);
        assert_relative_eq!(g.clamped_mass(), 0.5 / 3.5);
        let mx = g.marginal(0).unwrap();
        assert_eq!(mx.values(), &[0.5, 1.5]);
        let my = g.marginal(1).unwrap();
        assert_eq!(my.values(), &[1.5, 0.5]);
        assert!(g.marginal(2).is_err());
        assert!(DensityGrid::from_samples(vec![ax], vec![1.0]).is_err());
    }

    #[test]
    fn mc_constant_is_exact() {
        let b = IntegrationBox::new(2.5, 33).unwrap();
        let e = mc_integrate4(|_| 0.1, &b, 20_000, 7).unwrap();
        assert_eq!(e.estimate, 0.1 * b.volume4());
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn mc_requires_enough_samples() {
        let b = IntegrationBox::new(1.0, 33).unwrap();
        assert!(mc_integrate4(|_| 1.0, &b, 9_999, 0).is_err());
    }

    #[test]
    fn mc_is_reproducible_and_agrees_with_simpson() {
        let b = IntegrationBox::new(6.0, 61).unwrap();
        let f = |p: &PhaseSpacePoint| wigner_lg(0, 1, p);
        let a = mc_integrate4(f, &b, 200_000, 3).unwrap();
        let a2 = mc_integrate4(f, &b, 200_000, 3).unwrap();
        assert_eq!(a, a2);
        let exact = integrate4(f, &b).unwrap();
        assert!((a.estimate - exact).abs() < 3.0 * a.stderr, "{a:?} vs {exact}");
    }

    #[test]
    fn tail_mass_of_default_box_is_negligible() {
        for r in [0.0, 0.3, 0.8, 1.0] {
            for s in [CvState::Tmsv { r }, CvState::PhotonSubtracted { r, k: 0 }] {
                let t = envelope_tail_mass(&s, s.default_half_width()).unwrap();
                assert!(t < 1e-8, "{s}: {t}");
            }
        }
        assert!(envelope_tail_mass(&CvState::LaguerreGauss { m: 0, n: 1 }, 6.0).is_none());
    }
}
