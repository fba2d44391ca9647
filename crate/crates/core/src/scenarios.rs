//! Worked examples and figure sweeps.
//!
//! Each sweep evaluates its quantities through the general pipeline (state
//! validation, channel application, closed-form coherence) and compares
//! them with the scenario's own analytic formula. The largest disagreement
//! is recorded in the table's `max_analytic_deviation` parameter.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::audit::{check_b3, check_c2b, check_extended_c2b, check_extended_c2b_with_reference};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::measures::{check_alpha, renyi_coherence};
use crate::qubit::{qubit_state, qubit_tradeoff, QubitParams};
use crate::table::{Column, SweepTable};

/// Two-operator three-level channel
/// `K₁ = [[0,1,0],[0,0,0],[0,0,a]]`, `K₂ = [[1,0,0],[0,0,b],[0,0,0]]`.
pub fn kraus_pair_channel(a: Complex64, b: Complex64) -> Result<KrausChannel> {
    let residual = (a.norm_sqr() + b.norm_sqr() - 1.0).abs();
    if residual > 1e-10 {
        return Err(Error::IncompleteChannel(residual));
    }
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let k1 = ComplexMatrix::from_rows(vec![vec![z, one, z], vec![z, z, z], vec![z, z, a]])?;
    let k2 = ComplexMatrix::from_rows(vec![vec![one, z, z], vec![z, z, b], vec![z, z, z]])?;
    KrausChannel::validate(vec![k1, k2], 1e-10)
}

/// Kraus pair with real amplitudes `a = √(1 - b²)` and `b`.
pub fn kraus_pair_real(b: f64) -> Result<KrausChannel> {
    let a = (1.0 - b * b).max(0.0).sqrt();
    kraus_pair_channel(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
}

/// `(1/4)[[1,0,1],[0,2,0],[1,0,1]]`.
pub fn three_level_state() -> DensityMatrix {
    let m = ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 1.0],
        vec![0.0, 2.0, 0.0],
        vec![1.0, 0.0, 1.0],
    ])
    .expect("square")
    .scale(0.25);
    DensityMatrix::new(m).expect("valid state")
}

/// `diag(1, √2, 1)/(2 + √2)`: the optimizer of the three-level state at α = 2,
/// used as a fixed reference state for every α in the extended C2b sweep.
pub fn three_level_reference_state() -> DensityMatrix {
    let n = 2.0 + SQRT_2;
    DensityMatrix::diagonal(&[1.0 / n, SQRT_2 / n, 1.0 / n]).expect("valid weights")
}

/// Closed-form values for the worked examples.
pub mod analytic {
    use super::*;

    /// `C_α` of the three-level state: `α/(α-1) log₂(1/2 + (1/2)^{1/α})`.
    pub fn three_level_coherence(alpha: f64) -> f64 {
        alpha / (alpha - 1.0) * (0.5 + 0.5f64.powf(1.0 / alpha)).log2()
    }

    /// `p₂ C_α(ρ₂)` for the Kraus pair with `|b|² = b_sq`.
    pub fn second_branch_weighted(alpha: f64, b_sq: f64) -> f64 {
        let p2 = (1.0 + b_sq) / 4.0;
        let x = 1.0 / (1.0 + b_sq);
        let y = b_sq / (1.0 + b_sq);
        let y_root = if y > 0.0 { y.powf(1.0 / alpha) } else { 0.0 };
        p2 * alpha / (alpha - 1.0) * (x.powf(1.0 / alpha) + y_root).log2()
    }

    /// `q₂ = Tr(K₂ δ K₂†) = (1 + |b|²)/(2 + √2)` for the fixed reference δ.
    pub fn second_branch_reference_weight(b_sq: f64) -> f64 {
        (1.0 + b_sq) / (2.0 + SQRT_2)
    }

    /// `p₂^α q₂^{1-α} C_α(ρ₂)`.
    pub fn second_branch_extended(alpha: f64, b_sq: f64) -> f64 {
        let p2 = (1.0 + b_sq) / 4.0;
        let q2 = second_branch_reference_weight(b_sq);
        p2.powf(alpha) * q2.powf(1.0 - alpha) * second_branch_weighted(alpha, b_sq) / p2
    }

    /// `q₂` for the α-dependent optimizer `∝ (w, 1, w)`, `w = 2^{-1/α}`.
    pub fn second_branch_optimal_weight(alpha: f64, b_sq: f64) -> f64 {
        let w = 0.5f64.powf(1.0 / alpha);
        (1.0 + b_sq) * w / (1.0 + 2.0 * w)
    }

    /// `p₂^α q₂^{1-α} C_α(ρ₂)` with `q₂` from the α-dependent optimizer.
    pub fn second_branch_extended_optimal(alpha: f64, b_sq: f64) -> f64 {
        let p2 = (1.0 + b_sq) / 4.0;
        let q2 = second_branch_optimal_weight(alpha, b_sq);
        p2.powf(alpha) * q2.powf(1.0 - alpha) * second_branch_weighted(alpha, b_sq) / p2
    }

    /// `C_α` of `½ρ₁ ⊕ ½ρ₂` with maximally coherent qubit and qutrit blocks:
    /// `α/(α-1) log₂((1/2)^{1/α} + (3/2)(1/3)^{1/α})`.
    pub fn block_sum_coherence(alpha: f64) -> f64 {
        alpha / (alpha - 1.0)
            * (0.5f64.powf(1.0 / alpha) + 1.5 * (1.0f64 / 3.0).powf(1.0 / alpha)).log2()
    }

    /// `½ C(ρ₁) + ½ C(ρ₂) = (1 + log₂ 3)/2`.
    pub fn block_sum_additive() -> f64 {
        0.5 * (1.0 + 3f64.log2())
    }

    /// `(1/2)^α (2/(2+√2))^{1-α}`; at least 1/2 on (0,1], equal only at α = 1.
    pub fn extension_weight(alpha: f64) -> f64 {
        0.5f64.powf(alpha) * (2.0 / (2.0 + SQRT_2)).powf(1.0 - alpha)
    }

    /// Both sides of `1/2 + (1/2)^{1/α} >= √(2 (1/2)^{1/α})`.
    pub fn amgm_sides(alpha: f64) -> (f64, f64) {
        let y = 0.5f64.powf(1.0 / alpha);
        (0.5 + y, (2.0 * y).sqrt())
    }

    /// `ln2 · C₂ + M` for the pure qubit with population `a`: `ln((√a + √(1-a))²)`.
    pub fn boundary_tradeoff(a: f64) -> f64 {
        2.0 * (a.sqrt() + (1.0 - a).sqrt()).ln()
    }
}

/// α grid on (0,1): 0.005, 0.010, …, 0.995 (199 points).
pub fn default_subunit_grid() -> Vec<f64> {
    (1..200).map(|k| k as f64 / 200.0).collect()
}

/// α grid on (0,1) ∪ (1,2]: the sub-unit grid followed by 1.005, …, 2.000 (399 points).
pub fn default_alpha_grid() -> Vec<f64> {
    let mut g = default_subunit_grid();
    g.extend((201..=400).map(|k| k as f64 / 200.0));
    g
}

/// Population grid on [0,1] with 500 points.
pub fn default_population_grid() -> Vec<f64> {
    (0..500).map(|i| i as f64 / 499.0).collect()
}

fn check_grid(grid: &[f64], valid: impl Fn(f64) -> Result<()>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    grid.iter().try_for_each(|&x| valid(x))
}

fn fill(table: &mut SweepTable, rows: Vec<(Vec<f64>, f64)>) -> Result<()> {
    let mut worst: f64 = 0.0;
    for (row, dev) in rows {
        worst = worst.max(dev);
        table.push_row(row)?;
    }
    table.set_param("max_analytic_deviation", worst);
    Ok(())
}

/// `C_α(ρ)` against `p₂ C_α(ρ₂)` for the Kraus pair with `|b|² = 1/2`.
pub fn reproduce_fig1(alpha_grid: &[f64]) -> Result<SweepTable> {
    check_grid(alpha_grid, check_alpha)?;
    let b = FRAC_1_SQRT_2;
    let channel = kraus_pair_real(b)?;
    let rho = three_level_state();
    let rows = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let v = check_c2b(&rho, &channel, alpha)?;
            let weighted = v.witness["p_1"] * v.witness["c_1"];
            let dev = (v.rhs - analytic::three_level_coherence(alpha))
                .abs()
                .max((weighted - analytic::second_branch_weighted(alpha, b * b)).abs());
            Ok((vec![alpha, v.rhs, weighted], dev))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SweepTable::new(
        "fig1",
        vec![
            Column::new("alpha", "1"),
            Column::new("C_alpha_rho", "bits"),
            Column::new("p2_C_alpha_rho2", "bits"),
        ],
    );
    table.set_param("b_abs", b);
    fill(&mut table, rows)?;
    Ok(table)
}

/// `C_α(½ρ₁ ⊕ ½ρ₂)` against `½C(ρ₁) + ½C(ρ₂)` for maximally coherent qubit and qutrit.
pub fn reproduce_fig2(alpha_grid: &[f64]) -> Result<SweepTable> {
    check_grid(alpha_grid, check_alpha)?;
    let qubit = DensityMatrix::maximally_coherent(2);
    let qutrit = DensityMatrix::maximally_coherent(3);
    let rows = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let v = check_b3(&qubit, &qutrit, 0.5, alpha)?;
            let dev = (v.lhs - analytic::block_sum_coherence(alpha))
                .abs()
                .max((v.rhs - analytic::block_sum_additive()).abs());
            Ok((vec![alpha, v.lhs, v.rhs], dev))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SweepTable::new(
        "fig2",
        vec![
            Column::new("alpha", "1"),
            Column::new("C_alpha_rho", "bits"),
            Column::new("additive", "bits"),
        ],
    );
    table.set_param("p1", 0.5);
    fill(&mut table, rows)?;
    Ok(table)
}

/// `ln2 · C₂ + M` against `2√(a(1-a))` along the pure-state boundary `|b|² = a(1-a)`.
pub fn reproduce_fig3(a_grid: &[f64]) -> Result<SweepTable> {
    check_grid(a_grid, |a| {
        if (0.0..=1.0).contains(&a) {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!("population {a} outside [0, 1]")))
        }
    })?;
    let rows = a_grid
        .par_iter()
        .map(|&a| {
            let p = QubitParams::boundary(a)?;
            let t = qubit_tradeoff(&p);
            let rho = qubit_state(&p)?;
            let general = LN_2 * renyi_coherence(&rho, 2.0)?.value + rho.mixedness()?;
            let dev = (t.lhs - general)
                .abs()
                .max((t.lhs - analytic::boundary_tradeoff(a)).abs());
            Ok((vec![a, t.lhs, t.rhs], dev))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SweepTable::new(
        "fig3",
        vec![
            Column::new("a", "1"),
            Column::new("ln2_C2_plus_M", "1"),
            Column::new("two_sqrt_a_one_minus_a", "1"),
        ],
    );
    fill(&mut table, rows)?;
    Ok(table)
}

/// `C_α(ρ)`, `p₂ C_α(ρ₂)` and `p₂^α q₂^{1-α} C_α(ρ₂)` for the Kraus pair with amplitude `b`.
///
/// The fourth column takes `q₂` from [`three_level_reference_state`]; the fifth
/// takes it from the α-dependent optimizer of `ρ`.
pub fn reproduce_extended_c2b(alpha_grid: &[f64], b: Complex64) -> Result<SweepTable> {
    check_grid(alpha_grid, |alpha| {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::AlphaOutOfRange(alpha))
        }
    })?;
    let b_sq = b.norm_sqr();
    let a = Complex64::new((1.0 - b_sq).max(0.0).sqrt(), 0.0);
    let channel = kraus_pair_channel(a, b)?;
    let rho = three_level_state();
    let reference = three_level_reference_state();
    let rows = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let plain = check_c2b(&rho, &channel, alpha)?;
            let ext = check_extended_c2b_with_reference(&rho, &channel, alpha, &reference)?;
            let opt = check_extended_c2b(&rho, &channel, alpha)?;
            let weighted = plain.witness.get("p_1").copied().unwrap_or(0.0)
                * plain.witness.get("c_1").copied().unwrap_or(0.0);
            let extended = ext.witness.get("weight_1").copied().unwrap_or(0.0)
                * ext.witness.get("c_1").copied().unwrap_or(0.0);
            let optimal = opt.witness.get("weight_1").copied().unwrap_or(0.0)
                * opt.witness.get("c_1").copied().unwrap_or(0.0);
            let dev = [
                (plain.rhs - analytic::three_level_coherence(alpha)).abs(),
                (weighted - analytic::second_branch_weighted(alpha, b_sq)).abs(),
                (extended - analytic::second_branch_extended(alpha, b_sq)).abs(),
                (optimal - analytic::second_branch_extended_optimal(alpha, b_sq)).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok((vec![alpha, plain.rhs, weighted, extended, optimal], dev))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = SweepTable::new(
        "extc2b",
        vec![
            Column::new("alpha", "1"),
            Column::new("C_alpha_rho", "bits"),
            Column::new("p2_C_alpha_rho2", "bits"),
            Column::new("p2a_q2b_C_alpha_rho2", "bits"),
            Column::new("p2a_q2b_C_alpha_rho2_optimal", "bits"),
        ],
    );
    table.set_param("b_re", b.re);
    table.set_param("b_im", b.im);
    fill(&mut table, rows)?;
    Ok(table)
}
