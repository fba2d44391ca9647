//! Closed forms for a single qubit at α = 2.
//!
//! A qubit state is parameterized as `[[a, b*], [b, 1-a]]`. Only `|b|`
//! enters any of the formulas below.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, DEFAULT_TOLERANCE};

const POSITIVITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    a: f64,
    b: Complex64,
}

impl QubitParams {
    /// Requires `a ∈ [0,1]` and `|b|² <= a(1-a)`.
    pub fn new(a: f64, b: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidWeights(format!(
                "population a = {a} is not in [0, 1]"
            )));
        }
        let bound = a * (1.0 - a);
        let b_sq = b.norm_sqr();
        if !b_sq.is_finite() || b_sq > bound + POSITIVITY_SLACK {
            return Err(Error::PositivityViolation { b_sq, bound });
        }
        Ok(QubitParams { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(a, Complex64::new(b, 0.0))
    }

    /// The pure state with population `a`: `|b|² = a(1-a)`.
    pub fn boundary(a: f64) -> Result<Self> {
        Self::real(a, (a * (1.0 - a)).max(0.0).sqrt())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn b_sq(&self) -> f64 {
        self.b.norm_sqr()
    }

    /// `Tr ρ² = a² + 2|b|² + (1-a)²`.
    pub fn purity(&self) -> f64 {
        self.a * self.a + 2.0 * self.b_sq() + (1.0 - self.a).powi(2)
    }

    /// `M(ρ) = 2 (1 - Tr ρ²)`.
    pub fn mixedness(&self) -> f64 {
        2.0 * (1.0 - self.purity())
    }
}

pub fn qubit_state(p: &QubitParams) -> Result<DensityMatrix> {
    let m = ComplexMatrix::from_rows(vec![
        vec![Complex64::new(p.a, 0.0), p.b.conj()],
        vec![p.b, Complex64::new(1.0 - p.a, 0.0)],
    ])?;
    crate::linalg::validate_density(m, DEFAULT_TOLERANCE)
}

/// `1/2 ± 1/2 √(1 + 4|b|² + 4a² - 4a)`, larger first.
pub fn qubit_eigenvalues(p: &QubitParams) -> (f64, f64) {
    let r = (1.0 + 4.0 * p.b_sq() + 4.0 * p.a * p.a - 4.0 * p.a)
        .max(0.0)
        .sqrt();
    (0.5 + 0.5 * r, 0.5 - 0.5 * r)
}

/// `C₂(ρ) = 2 log₂(√(a² + |b|²) + √(|b|² + (1-a)²))`.
pub fn qubit_c2(p: &QubitParams) -> f64 {
    2.0 * c2_argument(p).log2()
}

fn c2_argument(p: &QubitParams) -> f64 {
    let b_sq = p.b_sq();
    (p.a * p.a + b_sq).sqrt() + (b_sq + (1.0 - p.a).powi(2)).sqrt()
}

/// Largest `C₂` at fixed population: `2 log₂(√a + √(1-a))`.
pub fn qubit_c2_max(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidWeights(format!(
            "population a = {a} is not in [0, 1]"
        )));
    }
    Ok(2.0 * (a.sqrt() + (1.0 - a).sqrt()).log2())
}

/// Both sides of `ln2 · C₂(ρ) + M(ρ) < 2√(a(1-a))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tradeoff {
    pub lhs: f64,
    pub rhs: f64,
}

impl Tradeoff {
    /// `rhs - lhs`; positive when the strict bound holds.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn qubit_tradeoff(p: &QubitParams) -> Tradeoff {
    // ln2 · 2 log₂(x) = ln(x²)
    let lhs = 2.0 * c2_argument(p).ln() + p.mixedness();
    let rhs = 2.0 * (p.a * (1.0 - p.a)).max(0.0).sqrt();
    Tradeoff { lhs, rhs }
}

/// `1 - (√(a² + |b|²) - √(|b|² + (1-a)²))²`, the intermediate bound on
/// `ln2 · C₂ + M`; nondecreasing in `|b|²` at fixed `a`.
pub fn tradeoff_envelope(a: f64, b_sq: f64) -> f64 {
    let d = (a * a + b_sq).sqrt() - (b_sq + (1.0 - a).powi(2)).sqrt();
    1.0 - d * d
}
