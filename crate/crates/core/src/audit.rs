//! Checkers for the coherence axioms and a seeded random search over them.
//!
//! Every checker returns a [`ConditionVerdict`] whose `margin` is positive
//! when the axiom holds and negative by the size of the breach when it does
//! not. A verdict counts as a violation when `margin < -tolerance`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{KrausChannel, DEFAULT_PROBABILITY_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{validate_density, ComplexMatrix, DensityMatrix, DEFAULT_TOLERANCE};
use crate::measures::{
    check_alpha, coherence_upper_bound, optimal_incoherent_state, renyi_coherence,
};
use crate::sampling::{
    random_density_with, random_ensemble_with, random_incoherent_channel_with, stream_rng, Ensemble,
};
use crate::scenarios::{kraus_pair_channel, three_level_state};

/// Default margin tolerance for closed-form comparisons.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;
/// Off-diagonal mass at or below which a state is considered incoherent for C1.
pub const INCOHERENCE_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2a,
    C2b,
    C3,
    B3,
    ExtC2b,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::C1,
        Condition::C2a,
        Condition::C2b,
        Condition::C3,
        Condition::B3,
        Condition::ExtC2b,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2a => "C2a",
            Condition::C2b => "C2b",
            Condition::C3 => "C3",
            Condition::B3 => "B3",
            Condition::ExtC2b => "ExtC2b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: Condition,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
    pub witness: BTreeMap<String, f64>,
}

impl ConditionVerdict {
    fn new(
        condition: Condition,
        lhs: f64,
        rhs: f64,
        margin: f64,
        witness: BTreeMap<String, f64>,
    ) -> Self {
        ConditionVerdict {
            condition,
            lhs,
            rhs,
            margin,
            violated: margin < -VIOLATION_TOLERANCE,
            witness,
        }
    }

    /// Re-evaluates the violation flag at a different tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.violated = self.margin < -tol;
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

fn coherence(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    Ok(renyi_coherence(rho, alpha)?.value)
}

fn require_incoherent(channel: &KrausChannel) -> Result<()> {
    if channel.is_incoherent() {
        Ok(())
    } else {
        Err(Error::NotIncoherent)
    }
}

/// C1: `C(ρ) >= 0`, and `C(ρ) = 0` when ρ is diagonal.
///
/// For a diagonal state `lhs = |C(ρ)|`, `rhs = 0`; otherwise `lhs = 0`,
/// `rhs = C(ρ)`.
pub fn check_c1(rho: &DensityMatrix, alpha: f64) -> Result<ConditionVerdict> {
    let c = coherence(rho, alpha)?;
    let mass = rho.coherence_mass();
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    witness.insert("coherence_mass".into(), mass);
    Ok(if mass <= INCOHERENCE_THRESHOLD {
        ConditionVerdict::new(Condition::C1, c.abs(), 0.0, -c.abs(), witness)
    } else {
        ConditionVerdict::new(Condition::C1, 0.0, c, c, witness)
    })
}

/// C2a: `C(Φ(ρ)) <= C(ρ)`.
pub fn check_c2a(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    alpha: f64,
) -> Result<ConditionVerdict> {
    require_incoherent(channel)?;
    check_alpha(alpha)?;
    let lhs = coherence(&channel.apply(rho)?, alpha)?;
    let rhs = coherence(rho, alpha)?;
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    witness.insert("operators".into(), channel.operators().len() as f64);
    Ok(ConditionVerdict::new(
        Condition::C2a,
        lhs,
        rhs,
        rhs - lhs,
        witness,
    ))
}

/// C2b: `Σ_n p_n C(ρ_n) <= C(ρ)` over selective outcomes.
pub fn check_c2b(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    alpha: f64,
) -> Result<ConditionVerdict> {
    require_incoherent(channel)?;
    check_alpha(alpha)?;
    let rhs = coherence(rho, alpha)?;
    let sel = channel.selective_outcomes(rho, DEFAULT_PROBABILITY_FLOOR)?;
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    witness.insert("omitted_outcomes".into(), sel.omitted.len() as f64);
    let mut lhs = 0.0;
    for o in &sel.outcomes {
        let c = coherence(&o.state, alpha)?;
        lhs += o.probability * c;
        witness.insert(format!("p_{}", o.index), o.probability);
        witness.insert(format!("c_{}", o.index), c);
    }
    Ok(ConditionVerdict::new(
        Condition::C2b,
        lhs,
        rhs,
        rhs - lhs,
        witness,
    ))
}

/// Extended C2b: `Σ_n p_n^α q_n^{1-α} C(ρ_n) <= C(ρ)` with
/// `q_n = Tr(K_n σ K_n†)` for the optimal incoherent state σ of ρ.
pub fn check_extended_c2b(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    alpha: f64,
) -> Result<ConditionVerdict> {
    check_alpha(alpha)?;
    let sigma = optimal_incoherent_state(rho, alpha)?.to_state();
    check_extended_c2b_with_reference(rho, channel, alpha, &sigma)
}

/// Extended C2b with the weights `q_n = Tr(K_n σ K_n†)` taken from a caller-supplied
/// incoherent `σ` instead of the optimizer of `ρ`.
pub fn check_extended_c2b_with_reference(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    alpha: f64,
    sigma: &DensityMatrix,
) -> Result<ConditionVerdict> {
    require_incoherent(channel)?;
    check_alpha(alpha)?;
    if !sigma.is_incoherent(INCOHERENCE_THRESHOLD) {
        return Err(Error::InvalidWeights(
            "reference state is not incoherent".into(),
        ));
    }
    let rhs = coherence(rho, alpha)?;
    let q = channel.probabilities(sigma)?;
    let sel = channel.selective_outcomes(rho, DEFAULT_PROBABILITY_FLOOR)?;
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    for (n, qn) in q.iter().enumerate() {
        witness.insert(format!("q_{n}"), *qn);
    }
    let mut lhs = 0.0;
    for o in &sel.outcomes {
        let c = coherence(&o.state, alpha)?;
        let qn = q[o.index].max(0.0);
        let weight = o.probability.powf(alpha) * qn.powf(1.0 - alpha);
        lhs += weight * c;
        witness.insert(format!("p_{}", o.index), o.probability);
        witness.insert(format!("c_{}", o.index), c);
        witness.insert(format!("weight_{}", o.index), weight);
    }
    Ok(ConditionVerdict::new(
        Condition::ExtC2b,
        lhs,
        rhs,
        rhs - lhs,
        witness,
    ))
}

fn mixture(ensemble: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidWeights("empty ensemble".into()))?;
    let dim = first.1.dim();
    let mut total = 0.0;
    let mut m = ComplexMatrix::zeros(dim);
    for (p, rho) in ensemble {
        if !(*p >= 0.0) {
            return Err(Error::InvalidWeights(format!("negative weight {p}")));
        }
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.dim(),
            });
        }
        total += p;
        m = m.add(&rho.matrix().scale(*p))?;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    validate_density(m, DEFAULT_TOLERANCE)
}

/// C3: `C(Σ p_i ρ_i) <= Σ p_i C(ρ_i)`.
pub fn check_c3(ensemble: &[(f64, DensityMatrix)], alpha: f64) -> Result<ConditionVerdict> {
    check_alpha(alpha)?;
    let mixed = mixture(ensemble)?;
    let lhs = coherence(&mixed, alpha)?;
    let mut rhs = 0.0;
    for (p, rho) in ensemble {
        rhs += p * coherence(rho, alpha)?;
    }
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    for (i, (p, _)) in ensemble.iter().enumerate() {
        witness.insert(format!("p_{i}"), *p);
    }
    Ok(ConditionVerdict::new(
        Condition::C3,
        lhs,
        rhs,
        rhs - lhs,
        witness,
    ))
}

/// B3: `C(p₁ρ₁ ⊕ p₂ρ₂) = p₁C(ρ₁) + p₂C(ρ₂)`; margin is `-|lhs - rhs|`.
pub fn check_b3(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p1: f64,
    alpha: f64,
) -> Result<ConditionVerdict> {
    check_alpha(alpha)?;
    let joint = DensityMatrix::direct_sum(rho1, rho2, p1)?;
    let lhs = coherence(&joint, alpha)?;
    let rhs = p1 * coherence(rho1, alpha)? + (1.0 - p1) * coherence(rho2, alpha)?;
    let mut witness = BTreeMap::new();
    witness.insert("alpha".into(), alpha);
    witness.insert("p1".into(), p1);
    witness.insert("difference".into(), lhs - rhs);
    Ok(ConditionVerdict::new(
        Condition::B3,
        lhs,
        rhs,
        -(lhs - rhs).abs(),
        witness,
    ))
}

/// The two coherence–purity bounds for one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PurityBounds {
    pub coherence: f64,
    /// `log₂ d + log₂ Tr ρ²`
    pub upper_bound: f64,
    /// `ln2/(d-1) · C(ρ) + M(ρ)`, at most 1.
    pub tradeoff: f64,
}

pub fn purity_bounds(rho: &DensityMatrix, alpha: f64) -> Result<PurityBounds> {
    let c = coherence(rho, alpha)?;
    let d = rho.dim() as f64;
    Ok(PurityBounds {
        coherence: c,
        upper_bound: coherence_upper_bound(rho),
        tradeoff: std::f64::consts::LN_2 / (d - 1.0) * c + rho.mixedness()?,
    })
}

/// Which channels the random audit draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    /// Weighted partial permutations with 2..=d operators, Ginibre states.
    RandomIncoherent,
    /// The three-level two-operator family with random amplitude `b`, applied to
    /// the fixed three-level example state.
    KrausPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub dim: usize,
    pub trials: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub family: ChannelFamily,
}

impl AuditConfig {
    pub fn new(dim: usize, trials: usize, alphas: Vec<f64>, seed: u64) -> Self {
        AuditConfig {
            dim,
            trials,
            alphas,
            seed,
            family: ChannelFamily::RandomIncoherent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.dim) {
            return Err(Error::DimensionMismatch {
                expected: 8,
                found: self.dim,
            });
        }
        if self.family == ChannelFamily::KrausPair && self.dim != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: self.dim,
            });
        }
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        Ok(())
    }
}

/// Everything drawn for one audit trial; regenerated exactly by [`replay_trial`].
#[derive(Clone, Debug)]
pub struct TrialInputs {
    pub state: DensityMatrix,
    pub channel: KrausChannel,
    pub ensemble: Vec<(f64, DensityMatrix)>,
    pub block_partner: DensityMatrix,
    pub block_weight: f64,
    /// Amplitude `|b|` for the Kraus-pair family.
    pub amplitude: Option<f64>,
}

/// Regenerates the inputs of trial `trial` from the seed alone.
pub fn replay_trial(cfg: &AuditConfig, trial: usize) -> TrialInputs {
    use rand::Rng;
    let mut rng = stream_rng(cfg.seed, trial as u64);
    let d = cfg.dim;
    let (state, channel, amplitude) = match cfg.family {
        ChannelFamily::RandomIncoherent => {
            let state = random_density_with(&mut rng, d, Ensemble::GinibreMixed);
            let n_ops = rng.random_range(2..=d.max(2));
            let channel = random_incoherent_channel_with(&mut rng, d, n_ops);
            (state, channel, None)
        }
        ChannelFamily::KrausPair => {
            let b_abs: f64 = rng.random_range(0.0..=1.0);
            let b_phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let a_phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let a =
                num_complex::Complex64::from_polar((1.0 - b_abs * b_abs).max(0.0).sqrt(), a_phase);
            let b = num_complex::Complex64::from_polar(b_abs, b_phase);
            let channel = kraus_pair_channel(a, b).expect("amplitudes are normalized");
            (three_level_state(), channel, Some(b_abs))
        }
    };
    let ensemble = random_ensemble_with(&mut rng, d, 2);
    let block_partner = random_density_with(&mut rng, d, Ensemble::GinibreMixed);
    let block_weight: f64 = rng.random_range(0.0..=1.0);
    TrialInputs {
        state,
        channel,
        ensemble,
        block_partner,
        block_weight,
        amplitude,
    }
}

fn trial_verdicts(cfg: &AuditConfig, trial: usize) -> Result<Vec<ConditionVerdict>> {
    let inputs = replay_trial(cfg, trial);
    let dephased = inputs.state.dephased();
    let mut out = Vec::with_capacity(cfg.alphas.len() * 7);
    for &alpha in &cfg.alphas {
        let mut batch = vec![
            check_c1(&inputs.state, alpha)?,
            check_c1(&dephased, alpha)?,
            check_c2a(&inputs.state, &inputs.channel, alpha)?,
            check_c2b(&inputs.state, &inputs.channel, alpha)?,
            check_extended_c2b(&inputs.state, &inputs.channel, alpha)?,
            check_c3(&inputs.ensemble, alpha)?,
            check_b3(
                &inputs.state,
                &inputs.block_partner,
                inputs.block_weight,
                alpha,
            )?,
        ];
        for v in &mut batch {
            v.witness.insert("trial".into(), trial as f64);
            v.witness.insert("seed".into(), cfg.seed as f64);
            if let Some(b) = inputs.amplitude {
                v.witness.insert("b_abs".into(), b);
            }
        }
        out.extend(batch);
    }
    Ok(out)
}

/// Runs every checker on `cfg.trials` random draws at every α.
///
/// Trials run in parallel; the result is ordered violations first, then by
/// decreasing `|margin|`, with ties kept in (trial, α) order.
pub fn audit(cfg: &AuditConfig) -> Result<Vec<ConditionVerdict>> {
    cfg.validate()?;
    let per_trial: Vec<Vec<ConditionVerdict>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial_verdicts(cfg, t))
        .collect::<Result<_>>()?;
    let mut all: Vec<ConditionVerdict> = per_trial.into_iter().flatten().collect();
    all.sort_by(|a, b| {
        b.violated
            .cmp(&a.violated)
            .then_with(|| b.margin.abs().total_cmp(&a.margin.abs()))
    });
    Ok(all)
}

/// [`audit`] over Ginibre states and random incoherent channels.
pub fn audit_random(
    dim: usize,
    trials: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<Vec<ConditionVerdict>> {
    audit(&AuditConfig::new(dim, trials, alphas.to_vec(), seed))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConditionTally {
    pub checked: usize,
    pub violations: usize,
    pub worst_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub verdicts: usize,
    pub conditions: BTreeMap<String, ConditionTally>,
}

impl AuditSummary {
    pub fn from_verdicts(verdicts: &[ConditionVerdict]) -> Self {
        let mut conditions: BTreeMap<String, ConditionTally> = Condition::ALL
            .iter()
            .map(|c| (c.name().to_string(), ConditionTally::default()))
            .collect();
        for v in verdicts {
            let tally = conditions
                .get_mut(v.condition.name())
                .expect("all conditions present");
            tally.checked += 1;
            tally.violations += usize::from(v.violated);
            tally.worst_margin = Some(tally.worst_margin.map_or(v.margin, |m| m.min(v.margin)));
        }
        AuditSummary {
            verdicts: verdicts.len(),
            conditions,
        }
    }

    pub fn violations(&self, condition: Condition) -> usize {
        self.conditions[condition.name()].violations
    }
}
