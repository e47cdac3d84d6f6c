//! Hermite and Laguerre polynomials of small integer degree.
//!
//! Hermite polynomials use the physicists' convention (weight `e^{-x²}`),
//! which is the one appearing in Hermite-Gauss mode functions with argument
//! `√2 x / w`. Both families are evaluated by forward three-term recurrence,
//! which stays well-conditioned and overflow-free for the degrees used here
//! (`n ≤ 64`).

use crate::error::{Error, Result};

/// Highest degree accepted by the recurrences.
pub const MAX_DEGREE: i64 = 64;

/// Degree and generalized-Laguerre superscript of a polynomial factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolyDegree {
    pub n: u32,
    pub alpha: u32,
}

impl PolyDegree {
    pub fn new(n: i64, alpha: i64) -> Result<Self> {
        check_degree("n", n)?;
        check_degree("alpha", alpha)?;
        Ok(Self {
            n: n as u32,
            alpha: alpha as u32,
        })
    }

    /// Degree pair for the LG mode `(m, n)`: `L^{|m-n|}_{min(m,n)}`.
    pub fn for_lg_mode(m: u32, n: u32) -> Self {
        Self {
            n: m.min(n),
            alpha: m.abs_diff(n),
        }
    }

    pub fn laguerre(&self, x: f64) -> f64 {
        laguerre_unchecked(self.n, self.alpha, x)
    }
}

fn check_degree(name: &str, value: i64) -> Result<()> {
    if value < 0 {
        return Err(Error::Domain(format!("{name} must be non-negative, got {value}")));
    }
    if value > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "{name} = {value} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Physicists' Hermite polynomial `H_n(x)`.
///
/// `H_{k+1} = 2x H_k − 2k H_{k−1}`.
pub fn hermite(n: i64, x: f64) -> Result<f64> {
    check_degree("n", n)?;
    Ok(hermite_unchecked(n as u32, x))
}

pub(crate) fn hermite_unchecked(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)`.
///
/// `(k+1) L_{k+1} = (2k + 1 + α − x) L_k − (k + α) L_{k−1}`.
/// `laguerre(n, 0, x)` is the plain Laguerre polynomial.
pub fn laguerre(n: i64, alpha: i64, x: f64) -> Result<f64> {
    let deg = PolyDegree::new(n, alpha)?;
    Ok(deg.laguerre(x))
}

pub(crate) fn laguerre_unchecked(n: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
