//! Coherence quantifiers.
//!
//! All values are in bits. The Rényi and Tsallis quantifiers share the
//! diagonal moments `m_i = <i|ρ^α|i>` and the same minimizing incoherent
//! state `q_i ∝ m_i^{1/α}`; the closed forms are cross-checked by a
//! simplex search over `Σ_i q_i^{1-α} m_i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pos_pow, DensityMatrix};
use crate::simplex::{minimize_on_simplex, SimplexObjective, SimplexSearch};

/// Eigenvalues at or below this are treated as outside the support.
const SUPPORT_EPS: f64 = 1e-14;
/// Squared overlaps at or below this count as orthogonal.
const OVERLAP_EPS: f64 = 1e-12;

/// Accepts `α ∈ (0,1) ∪ (1,2]`.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `Tr(ρ^α δ^{1-α})`, or `None` when `α > 1` and `supp ρ ⊄ supp δ`.
fn petz_trace(rho: &DensityMatrix, delta: &DensityMatrix, alpha: f64) -> Option<f64> {
    let rs = rho.spectrum();
    let ds = delta.spectrum();
    let n = rho.dim();
    let mut total = 0.0;
    for k in 0..n {
        let lk = rs.eigenvalues[k];
        if lk <= SUPPORT_EPS {
            continue;
        }
        for l in 0..n {
            let overlap = (0..n)
                .map(|i| rs.eigenvectors[(i, k)].conj() * ds.eigenvectors[(i, l)])
                .sum::<num_complex::Complex64>()
                .norm_sqr();
            let ml = ds.eigenvalues[l];
            if ml <= SUPPORT_EPS {
                if alpha > 1.0 && overlap > OVERLAP_EPS {
                    return None;
                }
                continue;
            }
            total += lk.powf(alpha) * ml.powf(1.0 - alpha) * overlap;
        }
    }
    Some(total)
}

/// Petz–Rényi relative entropy `S_α(ρ‖δ) = log₂ Tr(ρ^α δ^{1-α}) / (α-1)`.
///
/// Returns `+∞` when the supports make the trace vanish (`α < 1`) or
/// diverge (`α > 1`).
pub fn renyi_relative_entropy(
    rho: &DensityMatrix,
    delta: &DensityMatrix,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_dims(rho, delta)?;
    Ok(match petz_trace(rho, delta, alpha) {
        None => f64::INFINITY,
        Some(t) if t <= 0.0 => f64::INFINITY,
        Some(t) => t.log2() / (alpha - 1.0),
    })
}

/// Tsallis relative entropy `(Tr(ρ^α δ^{1-α}) - 1) / (α-1)`.
pub fn tsallis_relative_entropy(
    rho: &DensityMatrix,
    delta: &DensityMatrix,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_dims(rho, delta)?;
    Ok(match petz_trace(rho, delta, alpha) {
        None => f64::INFINITY,
        Some(t) => (t - 1.0) / (alpha - 1.0),
    })
}

/// `m_i = <i|ρ^α|i>` for `α > 0`.
pub fn diagonal_moments(rho: &DensityMatrix, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(rho.spectrum().map_diagonal(|l| pos_pow(l, alpha)))
}

/// Weights of an incoherent state `δ = Σ_i q_i |i><i|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    weights: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "negative or non-finite weight in {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(SimplexPoint { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn to_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.weights).expect("simplex point is a valid incoherent state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "closed_form")]
    ClosedForm,
    #[serde(rename = "brute_force")]
    BruteForce,
    #[serde(rename = "limit_alpha_1")]
    LimitAlpha1,
}

/// A coherence value together with the incoherent state that attains it.
#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub value: f64,
    pub alpha: f64,
    pub optimizer: DensityMatrix,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    value: f64,
    alpha: f64,
    method: Method,
    optimizer_weights: Vec<f64>,
    diagnostics: &'a BTreeMap<String, f64>,
}

impl CoherenceReport {
    pub fn optimizer_weights(&self) -> Vec<f64> {
        self.optimizer.populations()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            value: self.value,
            alpha: self.alpha,
            method: self.method,
            optimizer_weights: self.optimizer_weights(),
            diagnostics: &self.diagnostics,
        })
        .expect("report serializes")
    }
}

/// `q_i = m_i^{1/α} / Σ_j m_j^{1/α}`.
pub fn optimal_incoherent_state(rho: &DensityMatrix, alpha: f64) -> Result<SimplexPoint> {
    check_alpha(alpha)?;
    let roots: Vec<f64> = diagonal_moments(rho, alpha)?
        .into_iter()
        .map(|m| pos_pow(m, 1.0 / alpha))
        .collect();
    let total: f64 = roots.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateState);
    }
    SimplexPoint::new(roots.iter().map(|r| r / total).collect())
}

fn moment_root_sum(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    let total: f64 = diagonal_moments(rho, alpha)?
        .into_iter()
        .map(|m| pos_pow(m, 1.0 / alpha))
        .sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok(total)
}

/// Rényi α-relative entropy of coherence, `α/(α-1) · log₂ Σ_i m_i^{1/α}`.
pub fn renyi_coherence(rho: &DensityMatrix, alpha: f64) -> Result<CoherenceReport> {
    check_alpha(alpha)?;
    let sum = moment_root_sum(rho, alpha)?;
    // `+ 0.0` turns a -0.0 from log₂(1) into 0.0
    let value = alpha / (alpha - 1.0) * sum.log2() + 0.0;
    let optimizer = optimal_incoherent_state(rho, alpha)?.to_state();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("moment_root_sum".to_string(), sum);
    diagnostics.insert("coherence_mass".to_string(), rho.coherence_mass());
    Ok(CoherenceReport {
        value,
        alpha,
        optimizer,
        method: Method::ClosedForm,
        diagnostics,
    })
}

/// Tsallis α-coherence `((Σ_i m_i^{1/α})^α - 1) / (α-1)`.
pub fn tsallis_coherence(rho: &DensityMatrix, alpha: f64) -> Result<CoherenceReport> {
    check_alpha(alpha)?;
    let sum = moment_root_sum(rho, alpha)?;
    let value = (sum.powf(alpha) - 1.0) / (alpha - 1.0) + 0.0;
    let optimizer = optimal_incoherent_state(rho, alpha)?.to_state();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("moment_root_sum".to_string(), sum);
    Ok(CoherenceReport {
        value,
        alpha,
        optimizer,
        method: Method::ClosedForm,
        diagnostics,
    })
}

#[derive(Clone, Copy)]
enum Divergence {
    Renyi,
    Tsallis,
}

/// `g(Σ_i q_i^{1-α} m_i)` with `g = log₂(·)/(α-1)` or `(· - 1)/(α-1)`.
struct DivergenceObjective {
    alpha: f64,
    m: Vec<f64>,
    kind: Divergence,
}

impl DivergenceObjective {
    fn weighted(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(&self.m)
            .map(|(&qi, &mi)| qi.powf(1.0 - self.alpha) * mi)
            .sum()
    }
}

impl SimplexObjective for DivergenceObjective {
    fn value(&self, q: &[f64]) -> f64 {
        let s = self.weighted(q);
        match self.kind {
            Divergence::Renyi => s.log2() / (self.alpha - 1.0),
            Divergence::Tsallis => (s - 1.0) / (self.alpha - 1.0),
        }
    }

    fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let scale = match self.kind {
            Divergence::Renyi => 1.0 / (self.weighted(q) * std::f64::consts::LN_2),
            Divergence::Tsallis => 1.0,
        };
        q.iter()
            .zip(&self.m)
            .map(|(&qi, &mi)| -scale * qi.powf(-self.alpha) * mi)
            .collect()
    }

    fn difference(&self, from: &[f64], to: &[f64]) -> f64 {
        let beta = 1.0 - self.alpha;
        // Both points are renormalized so rounding in their sums cannot masquerade
        // as progress; every ratio minus one is formed without cancellation.
        let s: f64 = from.iter().sum();
        let eps = from.iter().zip(to).map(|(q, p)| p - q).sum::<f64>() / s;
        let scale = s.powf(-beta);
        let ds: f64 = from
            .iter()
            .zip(to)
            .zip(&self.m)
            .map(|((&q, &p), &mi)| {
                let ratio_m1 = ((p - q) / q - eps) / (1.0 + eps);
                mi * scale * q.powf(beta) * (beta * ratio_m1.ln_1p()).exp_m1()
            })
            .sum();
        match self.kind {
            Divergence::Renyi => {
                let base = self.weighted(from) * scale;
                (ds / base).ln_1p() / ((self.alpha - 1.0) * std::f64::consts::LN_2)
            }
            Divergence::Tsallis => ds / (self.alpha - 1.0),
        }
    }
}

fn bruteforce(
    rho: &DensityMatrix,
    alpha: f64,
    opts: &SimplexSearch,
    kind: Divergence,
) -> Result<CoherenceReport> {
    check_alpha(alpha)?;
    let moments = diagonal_moments(rho, alpha)?;
    // Indices with vanishing moment carry zero optimal weight.
    let support: Vec<usize> = (0..moments.len()).filter(|&i| moments[i] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::DegenerateState);
    }
    let m: Vec<f64> = support.iter().map(|&i| moments[i]).collect();
    let objective = DivergenceObjective { alpha, m, kind };
    let min = minimize_on_simplex(support.len(), &objective, opts)?;
    let mut weights = vec![0.0; moments.len()];
    for (&i, &w) in support.iter().zip(&min.point) {
        weights[i] = w;
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("iterations".to_string(), min.iterations as f64);
    diagnostics.insert("gradient_norm".to_string(), min.gradient_norm);
    diagnostics.insert("restarts".to_string(), opts.restarts as f64);
    Ok(CoherenceReport {
        value: min.value,
        alpha,
        optimizer: DensityMatrix::diagonal(&weights)?,
        method: Method::BruteForce,
        diagnostics,
    })
}

/// Rényi coherence by direct minimization of `log₂(Σ_i q_i^{1-α} m_i)/(α-1)` over the simplex.
pub fn renyi_coherence_bruteforce(
    rho: &DensityMatrix,
    alpha: f64,
    opts: &SimplexSearch,
) -> Result<CoherenceReport> {
    bruteforce(rho, alpha, opts, Divergence::Renyi)
}

/// Tsallis coherence by direct minimization over the simplex.
pub fn tsallis_coherence_bruteforce(
    rho: &DensityMatrix,
    alpha: f64,
    opts: &SimplexSearch,
) -> Result<CoherenceReport> {
    bruteforce(rho, alpha, opts, Divergence::Tsallis)
}

/// Relative entropy of coherence `H(diag ρ) - H(spec ρ)` in bits.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> CoherenceReport {
    let populations = rho.populations();
    let h_diag = shannon_entropy(&populations);
    let h_spec = shannon_entropy(rho.eigenvalues());
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("dephased_entropy".to_string(), h_diag);
    diagnostics.insert("von_neumann_entropy".to_string(), h_spec);
    CoherenceReport {
        value: h_diag - h_spec,
        alpha: 1.0,
        optimizer: rho.dephased(),
        method: Method::LimitAlpha1,
        diagnostics,
    }
}

/// Upper bound `log₂ d + log₂ Tr ρ²`, valid for every `α ∈ (0,1) ∪ (1,2]`.
pub fn coherence_upper_bound(rho: &DensityMatrix) -> f64 {
    (rho.dim() as f64).log2() + rho.purity().log2()
}
