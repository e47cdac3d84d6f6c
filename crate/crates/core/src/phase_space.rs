//! Wigner functions of the continuous-variable state families.
//!
//! Quadratures are dimensionless with vacuum variance 1/2 (ħ = 1), so the
//! vacuum Wigner function of two modes is `e^{-(X²+P_X²+Y²+P_Y²)}/π²`.
//! Bob holds mode `(X, P_X)`, Alice holds `(Y, P_Y)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::laguerre_unchecked;

const INV_PI2: f64 = 1.0 / (PI * PI);

/// A point `(X, P_X, Y, P_Y)` of two-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub px: f64,
    pub y: f64,
    pub py: f64,
}

impl PhaseSpacePoint {
    pub const ORIGIN: Self = Self {
        x: 0.0,
        px: 0.0,
        y: 0.0,
        py: 0.0,
    };

    pub fn new(x: f64, px: f64, y: f64, py: f64) -> Self {
        Self { x, px, y, py }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.px.is_finite() && self.y.is_finite() && self.py.is_finite()
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Px => self.px,
            Axis::Y => self.y,
            Axis::Py => self.py,
        }
    }

    pub fn set(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::X => self.x = value,
            Axis::Px => self.px = value,
            Axis::Y => self.y = value,
            Axis::Py => self.py = value,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.px, self.y, self.py]
    }

    pub fn invariants(&self) -> QInvariants {
        QInvariants::of(self)
    }
}

/// One of the four phase-space axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Px,
    Y,
    Py,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::X, Axis::Px, Axis::Y, Axis::Py];

    /// Position of the axis in [`PhaseSpacePoint::as_array`].
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Px => 1,
            Axis::Y => 2,
            Axis::Py => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Px => "P_X",
            Axis::Y => "Y",
            Axis::Py => "P_Y",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rotation invariants entering the LG Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QInvariants {
    /// `(X² + Y² + P_X² + P_Y²) / 4`
    pub q0: f64,
    /// `(X P_Y − Y P_X) / 2`
    pub q2: f64,
}

impl QInvariants {
    pub fn of(p: &PhaseSpacePoint) -> Self {
        Self {
            q0: 0.25 * (p.x * p.x + p.y * p.y + p.px * p.px + p.py * p.py),
            q2: 0.5 * (p.x * p.py - p.y * p.px),
        }
    }
}

/// A continuous-variable two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CvState {
    /// Two-mode squeezed vacuum with real squeezing `r` (`λ = tanh r`).
    Tmsv { r: f64 },
    /// Single-photon-subtracted squeezed vacuum. `k` only labels the
    /// superposition sign of the state vector; the Wigner function does not
    /// depend on it.
    PhotonSubtracted { r: f64, k: u8 },
    /// Laguerre-Gaussian mode of the two-dimensional oscillator.
    LaguerreGauss { m: u32, n: u32 },
}

impl CvState {
    pub fn tmsv(r: f64) -> Result<Self> {
        check_squeezing(r)?;
        Ok(Self::Tmsv { r })
    }

    pub fn photon_subtracted(r: f64, k: u8) -> Result<Self> {
        check_squeezing(r)?;
        if k > 1 {
            return Err(Error::Domain(format!("k must be 0 or 1, got {k}")));
        }
        Ok(Self::PhotonSubtracted { r, k })
    }

    pub fn laguerre_gauss(m: u32, n: u32) -> Result<Self> {
        if i64::from(m.max(n)) > crate::special_fn::MAX_DEGREE {
            return Err(Error::Domain(format!("LG mode ({m},{n}) exceeds supported degree")));
        }
        Ok(Self::LaguerreGauss { m, n })
    }

    pub fn family(&self) -> &'static str {
        match self {
            CvState::Tmsv { .. } => "tmsv",
            CvState::PhotonSubtracted { .. } => "psub",
            CvState::LaguerreGauss { .. } => "lg",
        }
    }

    /// Squeezing parameter, if the state is a squeezed family.
    pub fn squeezing(&self) -> Option<f64> {
        match *self {
            CvState::Tmsv { r } | CvState::PhotonSubtracted { r, .. } => Some(r),
            CvState::LaguerreGauss { .. } => None,
        }
    }

    pub fn wigner(&self, p: &PhaseSpacePoint) -> f64 {
        match *self {
            CvState::Tmsv { r } => wigner_tmsv(r, p),
            CvState::PhotonSubtracted { r, .. } => wigner_photon_subtracted(r, p),
            CvState::LaguerreGauss { m, n } => wigner_lg(m, n, p),
        }
    }

    /// Default half-width of the integration box: `6·√cosh 2r` for the
    /// squeezed families, 6 for LG modes.
    pub fn default_half_width(&self) -> f64 {
        match self.squeezing() {
            Some(r) => 6.0 * (2.0 * r).cosh().sqrt(),
            None => 6.0,
        }
    }
}

fn check_squeezing(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("squeezing r must be finite and ≥ 0, got {r}")));
    }
    Ok(())
}

impl fmt::Display for CvState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CvState::Tmsv { r } => write!(f, "tmsv:r={r}"),
            CvState::PhotonSubtracted { r, k } => write!(f, "psub:r={r},k={k}"),
            CvState::LaguerreGauss { m, n } => write!(f, "lg:m={m},n={n}"),
        }
    }
}

/// Splits `family:key=value,key=value` into the family and its parameters.
pub(crate) fn split_descriptor(s: &str) -> Result<(String, Vec<(String, String)>)> {
    let err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let (family, rest) = match s.split_once(':') {
        Some((f, r)) => (f.trim(), r.trim()),
        None => (s.trim(), ""),
    };
    if family.is_empty() {
        return Err(err("missing family name"));
    }
    let mut params = Vec::new();
    for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| err("expected key=value"))?;
        params.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
    }
    Ok((family.to_ascii_lowercase(), params))
}

pub(crate) fn take_param<T: FromStr>(
    input: &str,
    params: &[(String, String)],
    key: &str,
) -> Result<Option<T>> {
    match params.iter().find(|(k, _)| k == key) {
        None => Ok(None),
        Some((_, v)) => v.parse::<T>().map(Some).map_err(|_| Error::Parse {
            input: input.to_string(),
            reason: format!("cannot parse `{key}={v}`"),
        }),
    }
}

pub(crate) fn reject_unknown(input: &str, params: &[(String, String)], known: &[&str]) -> Result<()> {
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        return Err(Error::Parse {
            input: input.to_string(),
            reason: format!("unknown parameter `{k}`"),
        });
    }
    Ok(())
}

impl FromStr for CvState {
    type Err = Error;

    /// Parses `tmsv:r=0.5`, `psub:r=0.3[,k=1]`, `lg:m=0,n=2`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = split_descriptor(s)?;
        let missing = |key: &str| Error::Parse {
            input: s.to_string(),
            reason: format!("missing parameter `{key}`"),
        };
        match family.as_str() {
            "tmsv" => {
                reject_unknown(s, &params, &["r"])?;
                let r = take_param(s, &params, "r")?.ok_or_else(|| missing("r"))?;
                CvState::tmsv(r)
            }
            "psub" | "photon_subtracted" => {
                reject_unknown(s, &params, &["r", "k"])?;
                let r = take_param(s, &params, "r")?.ok_or_else(|| missing("r"))?;
                let k = take_param(s, &params, "k")?.unwrap_or(0);
                CvState::photon_subtracted(r, k)
            }
            "lg" => {
                reject_unknown(s, &params, &["m", "n"])?;
                let m = take_param(s, &params, "m")?.unwrap_or(0);
                let n = take_param(s, &params, "n")?.ok_or_else(|| missing("n"))?;
                CvState::laguerre_gauss(m, n)
            }
            other => Err(Error::Parse {
                input: s.to_string(),
                reason: format!("unknown continuous-variable family `{other}`"),
            }),
        }
    }
}

/// `exp(exponent)`, flushed to zero well before the subnormal range.
#[inline]
fn gaussian_factor(exponent: f64) -> f64 {
    if exponent < -700.0 {
        0.0
    } else {
        exponent.exp()
    }
}

#[inline]
fn squeezed_exponent(r: f64, p: &PhaseSpacePoint) -> f64 {
    let (s, c) = ((2.0 * r).sinh(), (2.0 * r).cosh());
    let sq = p.x * p.x + p.y * p.y + p.px * p.px + p.py * p.py;
    -2.0 * (p.px * p.py - p.x * p.y) * s - sq * c
}

/// Wigner function of the two-mode squeezed vacuum.
pub fn wigner_tmsv(r: f64, p: &PhaseSpacePoint) -> f64 {
    INV_PI2 * gaussian_factor(squeezed_exponent(r, p))
}

/// Wigner function of the single-photon-subtracted squeezed vacuum.
///
/// Negative at the origin for every `r`.
pub fn wigner_photon_subtracted(r: f64, p: &PhaseSpacePoint) -> f64 {
    let (s, c) = ((2.0 * r).sinh(), (2.0 * r).cosh());
    let dp = p.px - p.py;
    let dx = p.x - p.y;
    let bracket = -s * (dp * dp - dx * dx) + c * (dp * dp + dx * dx) - 1.0;
    let g = gaussian_factor(squeezed_exponent(r, p));
    if g == 0.0 {
        return 0.0;
    }
    INV_PI2 * g * bracket
}

/// Wigner function of the Laguerre-Gaussian mode `(m, n)`.
pub fn wigner_lg(m: u32, n: u32, p: &PhaseSpacePoint) -> f64 {
    let QInvariants { q0, q2 } = QInvariants::of(p);
    let g = gaussian_factor(-4.0 * q0);
    if g == 0.0 {
        return 0.0;
    }
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    sign * INV_PI2
        * laguerre_unchecked(m, 0, 4.0 * (q0 + q2))
        * laguerre_unchecked(n, 0, 4.0 * (q0 - q2))
        * g
}
