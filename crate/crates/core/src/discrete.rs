//! Two-qubit density matrices: Werner states, spin inferred variances, and
//! the discrete sum, entropic and CHSH-analogue steering criteria.
//!
//! Alice holds the first qubit, Bob the second. Variance formulas use
//! spin-½ observables `S = σ/2`; the entropic and CHSH-analogue criteria
//! use Pauli observables with ±1 outcomes. Shannon entropies are in bits.

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::criteria::{Criterion, SteeringVerdict, VerdictSource};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

/// Bound on `H(σx^B|σx^A) + H(σz^B|σz^A)` in bits for two mutually unbiased
/// qubit observables.
pub const ENTROPIC_BOUND_BITS: f64 = 1.0;
/// Local bound of the CHSH-analogue steering functional.
pub const CHSH_STEERING_BOUND: f64 = 2.0;

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<C64>,
}

impl TwoQubitState {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Domain(format!("density matrix is not Hermitian (residue {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        let state = Self { rho };
        let min = state.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(state)
    }

    /// `p |ψ⁻⟩⟨ψ⁻| + (1 − p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Werner mixing p must lie in [0, 1], got {p}")));
        }
        let mut singlet = Matrix4::<C64>::zeros();
        // |ψ⁻⟩ = (|01⟩ − |10⟩)/√2 in the basis |00⟩, |01⟩, |10⟩, |11⟩
        singlet[(1, 1)] = c(0.5);
        singlet[(2, 2)] = c(0.5);
        singlet[(1, 2)] = c(-0.5);
        singlet[(2, 1)] = c(-0.5);
        let rho = singlet * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0);
        Self::new(rho)
    }

    /// `ρ_A ⊗ ρ_B` from two Bloch vectors (norm ≤ 1).
    pub fn product(alice: Vector3<f64>, bob: Vector3<f64>) -> Result<Self> {
        Self::new(kron(&qubit_from_bloch(alice)?, &qubit_from_bloch(bob)?))
    }

    /// Convex combination; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, TwoQubitState)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("mixture weights must be a probability vector".into()));
        }
        let rho = parts
            .iter()
            .fold(Matrix4::zeros(), |acc, (w, s)| acc + s.rho * c(*w));
        Self::new(rho)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.rho.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Bob's reduced state `Tr_A ρ`.
    pub fn bob_reduced(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|i, j| self.rho[(i, j)] + self.rho[(2 + i, 2 + j)])
    }

    /// Alice's reduced state `Tr_B ρ`.
    pub fn alice_reduced(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|i, j| self.rho[(2 * i, 2 * j)] + self.rho[(2 * i + 1, 2 * j + 1)])
    }
}

/// `(I + n·σ)/2`.
pub fn qubit_from_bloch(n: Vector3<f64>) -> Result<Matrix2<C64>> {
    if n.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("Bloch vector norm {} exceeds 1", n.norm())));
    }
    Ok((Matrix2::identity() + SpinObservable::pauli_vector(n).matrix) * c(0.5))
}

/// A single-qubit Hermitian observable.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinObservable {
    pub matrix: Matrix2<C64>,
    pub label: String,
}

impl SpinObservable {
    pub fn new(matrix: Matrix2<C64>, label: impl Into<String>) -> Result<Self> {
        let herm = (matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Domain("observable is not Hermitian".into()));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
            label: "I".into(),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
            label: "σx".into(),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            matrix: Matrix2::new(c(0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), c(0.0)),
            label: "σy".into(),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            matrix: Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)),
            label: "σz".into(),
        }
    }

    /// `n·σ`; dichotomic when `|n| = 1`.
    pub fn pauli_vector(n: Vector3<f64>) -> Self {
        let m = Self::pauli_x().matrix * c(n.x) + Self::pauli_y().matrix * c(n.y) + Self::pauli_z().matrix * c(n.z);
        Self {
            matrix: m,
            label: format!("({:.4},{:.4},{:.4})·σ", n.x, n.y, n.z),
        }
    }

    /// `cos α σz + sin α σx`, on the X–Z great circle.
    pub fn xz_circle(alpha: f64) -> Self {
        Self::pauli_vector(Vector3::new(alpha.sin(), 0.0, alpha.cos()))
    }

    /// Spin-½ version `σ/2`.
    pub fn spin_half(&self) -> Self {
        Self {
            matrix: self.matrix * c(0.5),
            label: format!("{}/2", self.label),
        }
    }

    pub fn spin_x() -> Self {
        Self::pauli_x().spin_half()
    }

    pub fn spin_z() -> Self {
        Self::pauli_z().spin_half()
    }

    pub fn squared(&self) -> Self {
        Self {
            matrix: self.matrix * self.matrix,
            label: format!("{}²", self.label),
        }
    }

    /// `A² = I`, i.e. outcomes ±1.
    pub fn is_dichotomic(&self) -> bool {
        (self.matrix * self.matrix - Matrix2::identity())
            .iter()
            .all(|z| z.norm() < 1e-10)
    }

    /// Projector onto the `sign` (±1) eigenspace of a dichotomic observable.
    fn projector(&self, sign: f64) -> Matrix2<C64> {
        (Matrix2::identity() + self.matrix * c(sign)) * c(0.5)
    }
}

/// `Tr[ρ (A ⊗ B)]`, A on Alice, B on Bob.
pub fn expectation(rho: &TwoQubitState, a: &SpinObservable, b: &SpinObservable) -> f64 {
    (rho.rho * kron(&a.matrix, &b.matrix)).trace().re
}

fn local_expectation(reduced: &Matrix2<C64>, op: &Matrix2<C64>) -> f64 {
    (reduced * op).trace().re
}

/// Inferred standard deviation of Bob's `target` from Alice's `estimator`
/// with the linear gain `g = ⟨AB⟩/⟨A²⟩`: `√(⟨B²⟩ − ⟨AB⟩²/⟨A²⟩)`.
pub fn spin_inferred_std(rho: &TwoQubitState, target: &SpinObservable, estimator: &SpinObservable) -> Result<f64> {
    let id = SpinObservable::identity();
    let a2 = expectation(rho, &estimator.squared(), &id);
    if a2 <= 1e-14 {
        return Err(Error::DegenerateMoment(format!(
            "⟨A²⟩ = {a2:e} for estimator {}",
            estimator.label
        )));
    }
    let b2 = expectation(rho, &id, &target.squared());
    let ab = expectation(rho, estimator, target);
    Ok((b2 - ab * ab / a2).max(0.0).sqrt())
}

/// `Δ(B1 + B2)` on Bob's reduced state.
pub fn sum_spin_std(rho: &TwoQubitState, b1: &SpinObservable, b2: &SpinObservable) -> f64 {
    let reduced = rho.bob_reduced();
    let s = b1.matrix + b2.matrix;
    let mean = local_expectation(&reduced, &s);
    (local_expectation(&reduced, &(s * s)) - mean * mean).max(0.0).sqrt()
}

/// Sum criterion with `S_x`, `S_z` on Bob, each inferred from the same
/// spin component on Alice. Steerable iff `Δ_inf S_x + Δ_inf S_z < Δ(S_x + S_z)`.
pub fn sum_steering_discrete(rho: &TwoQubitState) -> SteeringVerdict {
    let (sx, sz) = (SpinObservable::spin_x(), SpinObservable::spin_z());
    // Spin-½ estimators always have ⟨A²⟩ = 1/4.
    let inferred = spin_inferred_std(rho, &sx, &sx).expect("⟨S²⟩ = 1/4")
        + spin_inferred_std(rho, &sz, &sz).expect("⟨S²⟩ = 1/4");
    let bound = sum_spin_std(rho, &sx, &sz);
    SteeringVerdict::lower_bounded(Criterion::Sum, inferred, bound, VerdictSource::MatrixAlgebra)
}

fn shannon_bits(ps: &[f64]) -> f64 {
    -ps.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// `H(B|A)` in bits for dichotomic `a` (Alice) and `b` (Bob).
pub fn conditional_shannon(rho: &TwoQubitState, a: &SpinObservable, b: &SpinObservable) -> f64 {
    let mut joint = [0.0; 4];
    let mut alice = [0.0; 2];
    for (i, sa) in [1.0, -1.0].into_iter().enumerate() {
        for (j, sb) in [1.0, -1.0].into_iter().enumerate() {
            let p = (rho.rho * kron(&a.projector(sa), &b.projector(sb))).trace().re.max(0.0);
            joint[2 * i + j] = p;
            alice[i] += p;
        }
    }
    shannon_bits(&joint) - shannon_bits(&alice)
}

/// Entropic criterion with Pauli X and Z on both sides: steerable iff
/// `H(σx^B|σx^A) + H(σz^B|σz^A) < 1` bit.
pub fn entropic_steering_discrete(rho: &TwoQubitState) -> SteeringVerdict {
    let (x, z) = (SpinObservable::pauli_x(), SpinObservable::pauli_z());
    let total = conditional_shannon(rho, &x, &x) + conditional_shannon(rho, &z, &z);
    SteeringVerdict::lower_bounded(Criterion::Entropic, total, ENTROPIC_BOUND_BITS, VerdictSource::MatrixAlgebra)
}

/// CHSH-analogue steering functional
/// `√(⟨(A1+A2)B1⟩² + ⟨(A1+A2)B2⟩²) + √(⟨(A1−A2)B1⟩² + ⟨(A1−A2)B2⟩²)`.
pub fn chsh_steering(
    rho: &TwoQubitState,
    a1: &SpinObservable,
    a2: &SpinObservable,
    b1: &SpinObservable,
    b2: &SpinObservable,
) -> Result<f64> {
    for o in [a1, a2, b1, b2] {
        if !o.is_dichotomic() {
            return Err(Error::Domain(format!("{} is not dichotomic", o.label)));
        }
    }
    let anti = b1.matrix * b2.matrix + b2.matrix * b1.matrix;
    if anti.iter().any(|z| z.norm() > 1e-10) {
        return Err(Error::Domain(format!(
            "{} and {} are not mutually unbiased",
            b1.label, b2.label
        )));
    }
    Ok(chsh_unchecked(rho, a1, a2, b1, b2))
}

fn chsh_unchecked(
    rho: &TwoQubitState,
    a1: &SpinObservable,
    a2: &SpinObservable,
    b1: &SpinObservable,
    b2: &SpinObservable,
) -> f64 {
    let e = |a: &SpinObservable, b: &SpinObservable| expectation(rho, a, b);
    let (e11, e12, e21, e22) = (e(a1, b1), e(a1, b2), e(a2, b1), e(a2, b2));
    ((e11 + e21).powi(2) + (e12 + e22).powi(2)).sqrt() + ((e11 - e21).powi(2) + (e12 - e22).powi(2)).sqrt()
}

/// Best CHSH-analogue value over Alice's settings on the X–Z circle with
/// `B1 = σx`, `B2 = σz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub value: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl ChshOptimum {
    pub fn verdict(&self) -> SteeringVerdict {
        SteeringVerdict::upper_bounded(Criterion::Chsh, self.value, CHSH_STEERING_BOUND, VerdictSource::MatrixAlgebra)
    }
}

/// Correlation matrix `T_ij = ⟨σ_i ⊗ σ_j⟩`, rows Alice, columns Bob, in
/// the order x, y, z.
pub fn correlation_matrix(rho: &TwoQubitState) -> Matrix3<f64> {
    let paulis = [SpinObservable::pauli_x(), SpinObservable::pauli_y(), SpinObservable::pauli_z()];
    Matrix3::from_fn(|i, j| expectation(rho, &paulis[i], &paulis[j]))
}

/// Dense 1° scan over `(α1, α2)` followed by a shrinking pattern search.
pub fn optimal_chsh(rho: &TwoQubitState) -> ChshOptimum {
    // With A = a·σ and B = b·σ, ⟨A ⊗ B⟩ = aᵀ T b. B1 = σx, B2 = σz.
    let t = correlation_matrix(rho);
    let row = |alpha: f64| {
        let (s, c) = alpha.sin_cos();
        // a = (sin α, 0, cos α); returns (⟨A σx⟩, ⟨A σz⟩)
        (s * t[(0, 0)] + c * t[(2, 0)], s * t[(0, 2)] + c * t[(2, 2)])
    };
    let f = |a1: f64, a2: f64| {
        let ((e11, e12), (e21, e22)) = (row(a1), row(a2));
        ((e11 + e21).powi(2) + (e12 + e22).powi(2)).sqrt() + ((e11 - e21).powi(2) + (e12 - e22).powi(2)).sqrt()
    };
    let steps = 360;
    let h = std::f64::consts::TAU / f64::from(steps);
    let mut best = (f(0.0, 0.0), 0.0, 0.0);
    for i in 0..steps {
        for j in 0..steps {
            let (a1, a2) = (h * f64::from(i), h * f64::from(j));
            let v = f(a1, a2);
            if v > best.0 {
                best = (v, a1, a2);
            }
        }
    }
    let mut step = h;
    while step > 1e-10 {
        let mut improved = false;
        for (d1, d2) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = f(best.1 + d1, best.2 + d2);
            if v > best.0 {
                best = (v, best.1 + d1, best.2 + d2);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    ChshOptimum {
        value: best.0,
        alpha1: best.1.rem_euclid(std::f64::consts::TAU),
        alpha2: best.2.rem_euclid(std::f64::consts::TAU),
    }
}

/// Closed forms for the Werner family.
pub mod werner_closed_form {
    /// `Δ_inf S_x = Δ_inf S_z = √(1 − p²)/2`.
    pub fn inferred_std(p: f64) -> f64 {
        (1.0 - p * p).max(0.0).sqrt() / 2.0
    }

    /// `Δ(S_x + S_z) = 1/√2` for every `p` (Bob is maximally mixed).
    pub fn sum_std() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    /// `−Σ± (1 ± p) log₂((1 ± p)/2)`.
    pub fn entropic_sum_bits(p: f64) -> f64 {
        [1.0 + p, 1.0 - p]
            .into_iter()
            .filter(|q| *q > 0.0)
            .map(|q| -q * (q / 2.0).log2())
            .sum()
    }

    /// Optimal CHSH-analogue value `2√2 p`.
    pub fn chsh(p: f64) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * p
    }
}
