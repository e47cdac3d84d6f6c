//! Differential entropies (nats) of sampled densities and conditional
//! entropies of Wigner marginals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{Axis, CvState};
use crate::quadrature::{marginalize, DensityGrid, IntegrationBox, NORMALIZATION_TOLERANCE};

/// `−Σ p ln p · cell` with `0 ln 0 = 0`.
pub fn differential_entropy(grid: &DensityGrid) -> Result<f64> {
    let mass = grid.mass();
    if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization {
            mass,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }
    let sum: f64 = grid
        .values()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * p.ln())
        .sum();
    Ok(-sum * grid.cell_measure())
}

/// `h(target | given)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalPair {
    pub target: Axis,
    pub given: Axis,
}

impl ConditionalPair {
    pub const fn new(target: Axis, given: Axis) -> Self {
        Self { target, given }
    }

    /// Pairs summed in the entropic criterion for each family: position
    /// given position and momentum given momentum for the squeezed states,
    /// `(X|P_Y)` and `(Y|P_X)` for LG modes.
    pub fn defaults_for(state: &CvState) -> [ConditionalPair; 2] {
        match state {
            CvState::LaguerreGauss { .. } => [Self::new(Axis::X, Axis::Py), Self::new(Axis::Y, Axis::Px)],
            _ => [Self::new(Axis::X, Axis::Y), Self::new(Axis::Px, Axis::Py)],
        }
    }
}

impl std::fmt::Display for ConditionalPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "h({}|{})", self.target, self.given)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_joint: f64,
    /// Entropy of the conditioning variable.
    pub h_marginal: f64,
    /// Entropy of the target variable alone.
    pub h_target: f64,
    pub h_conditional: f64,
    pub clamped_mass: f64,
}

/// Conditional entropy of a pair from the joint marginal of the Wigner
/// function on `bx`.
pub fn conditional_entropy(state: &CvState, pair: ConditionalPair, bx: &IntegrationBox) -> Result<EntropyReport> {
    let joint = marginalize(state, (pair.target, pair.given), bx)?;
    entropy_report(&joint)
}

/// Entropies of a normalized 2D grid whose first axis is the target.
pub fn entropy_report(joint: &DensityGrid) -> Result<EntropyReport> {
    let h_joint = differential_entropy(joint)?;
    let h_marginal = differential_entropy(&joint.marginal(1)?)?;
    let h_target = differential_entropy(&joint.marginal(0)?)?;
    Ok(EntropyReport {
        h_joint,
        h_marginal,
        h_target,
        h_conditional: h_joint - h_marginal,
        clamped_mass: joint.clamped_mass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GridAxis;
    use std::f64::consts::{E, PI};

    fn axis(a: Axis, half: f64, n: usize) -> GridAxis {
        GridAxis::from_box(a, &IntegrationBox::new(half, n).unwrap())
    }

    #[test]
    fn gaussian_1d() {
        let g = DensityGrid::sample(vec![axis(Axis::X, 10.0, 401)], |v| {
            (-0.5 * v[0] * v[0]).exp() / (2.0 * PI).sqrt()
        })
        .unwrap();
        let h = differential_entropy(&g).unwrap();
        assert!((h - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-3, "{h}");
    }

    #[test]
    fn isotropic_gaussian_2d() {
        let axes = vec![axis(Axis::X, 6.0, 121), axis(Axis::Y, 6.0, 121)];
        let g = DensityGrid::sample(axes, |v| (-(v[0] * v[0]) - v[1] * v[1]).exp() / PI).unwrap();
        let h = differential_entropy(&g).unwrap();
        assert!((h - (PI * E).ln()).abs() < 1e-3, "{h}");
    }

    #[test]
    fn unnormalized_grid_is_rejected() {
        let g = DensityGrid::sample(vec![axis(Axis::X, 1.0, 33)], |_| 1.0).unwrap();
        assert!(matches!(differential_entropy(&g), Err(Error::Normalization { .. })));
    }

    #[test]
    fn tmsv_joint_entropy_matches_gaussian_formula() {
        let r = 0.5;
        let s = CvState::Tmsv { r };
        let bx = crate::quadrature::GridSpec::uniform(61).marginal_box(&s).unwrap();
        let joint = marginalize(&s, (Axis::X, Axis::Y), &bx).unwrap();
        let (c, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        // covariance ½[[c, s], [s, c]]
        let det = 0.25 * (c * c - sh * sh);
        let expected = 0.5 * ((2.0 * PI * E).powi(2) * det).ln();
        let h = differential_entropy(&joint).unwrap();
        assert!((h - expected).abs() < 1e-3, "{h} vs {expected}");
    }

    #[test]
    fn vacuum_conditional_entropy() {
        let s = CvState::Tmsv { r: 0.0 };
        let bx = IntegrationBox::new(6.0, 61).unwrap();
        let rep = conditional_entropy(&s, ConditionalPair::new(Axis::X, Axis::Y), &bx).unwrap();
        assert!((rep.h_conditional - 0.5 * (PI * E).ln()).abs() < 1e-3);
        assert!((rep.h_conditional - (rep.h_joint - rep.h_marginal)).abs() < 1e-15);
        assert!(rep.h_conditional <= rep.h_target + 1e-6);
    }

    #[test]
    fn default_pairs() {
        let lg = ConditionalPair::defaults_for(&CvState::LaguerreGauss { m: 0, n: 1 });
        assert_eq!(lg[0], ConditionalPair::new(Axis::X, Axis::Py));
        assert_eq!(lg[1].to_string(), "h(Y|P_X)");
        let t = ConditionalPair::defaults_for(&CvState::Tmsv { r: 0.1 });
        assert_eq!(t[1], ConditionalPair::new(Axis::Px, Axis::Py));
    }
}
