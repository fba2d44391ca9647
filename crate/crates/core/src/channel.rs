//! Kraus channels and selective (post-measurement) outcomes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{validate_density, ComplexMatrix, DensityMatrix, DEFAULT_TOLERANCE};

/// Entries with modulus at or below this count as structural zeros.
pub const STRUCTURAL_ZERO: f64 = 1e-12;
/// Default probability below which a selective outcome is dropped.
pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-12;

/// A complete set of Kraus operators `Σ_n K_n† K_n = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    incoherent: bool,
}

/// True if every column of `k` has at most one entry above [`STRUCTURAL_ZERO`].
///
/// `K|j><j|K†` is diagonal exactly when column `j` has at most one nonzero
/// entry, so this is the incoherence condition for a single operator.
pub fn maps_incoherent_to_incoherent(k: &ComplexMatrix) -> bool {
    let n = k.dim();
    (0..n).all(|j| {
        (0..n)
            .filter(|&i| k[(i, j)].norm() > STRUCTURAL_ZERO)
            .count()
            <= 1
    })
}

impl KrausChannel {
    /// Checks completeness within `tol` (entrywise) and sets the incoherence flag.
    pub fn validate(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyChannel)?;
        let dim = first.dim();
        let mut completeness = ComplexMatrix::zeros(dim);
        for k in &operators {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            if !k.is_finite() {
                return Err(Error::NonFinite);
            }
            completeness = completeness.add(&(&k.adjoint() * k))?;
        }
        let residual = completeness.max_abs_diff(&ComplexMatrix::identity(dim));
        if residual > tol {
            return Err(Error::IncompleteChannel(residual));
        }
        let incoherent = operators.iter().all(maps_incoherent_to_incoherent);
        Ok(KrausChannel {
            dim,
            operators,
            incoherent,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::validate(vec![ComplexMatrix::identity(dim)], 0.0).expect("identity is complete")
    }

    /// Projective measurement in the incoherent basis, `{|i><i|}`.
    pub fn dephasing(dim: usize) -> Self {
        let ops = (0..dim)
            .map(|i| {
                let mut w = vec![0.0; dim];
                w[i] = 1.0;
                ComplexMatrix::from_diagonal(&w)
            })
            .collect();
        Self::validate(ops, 0.0).expect("projectors are complete")
    }

    /// Single-operator channel `|i> ↦ |perm[i]>`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut k = ComplexMatrix::zeros(n);
        for (j, &i) in perm.iter().enumerate() {
            if i >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i + 1,
                });
            }
            k[(i, j)] = num_complex::Complex64::new(1.0, 0.0);
        }
        Self::validate(vec![k], 1e-12)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn is_incoherent(&self) -> bool {
        self.incoherent
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// `Φ(ρ) = Σ_n K_n ρ K_n†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_state(rho)?;
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.operators {
            out = out.add(&k.conjugate(rho.matrix())?)?;
        }
        validate_density(out, DEFAULT_TOLERANCE)
    }

    /// Unnormalized branches `K_n ρ K_n†`, one per operator.
    pub fn branches(&self, rho: &DensityMatrix) -> Result<Vec<ComplexMatrix>> {
        self.check_state(rho)?;
        self.operators
            .iter()
            .map(|k| k.conjugate(rho.matrix()))
            .collect()
    }

    /// Outcome probabilities `p_n = Tr(K_n ρ K_n†)` for every operator.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        Ok(self.branches(rho)?.iter().map(|b| b.trace().re).collect())
    }

    /// Normalized post-measurement states `ρ_n = K_n ρ K_n† / p_n` for `p_n >= p_floor`.
    pub fn selective_outcomes(&self, rho: &DensityMatrix, p_floor: f64) -> Result<Subselection> {
        let mut outcomes = Vec::new();
        let mut omitted = BTreeMap::new();
        for (index, branch) in self.branches(rho)?.into_iter().enumerate() {
            let probability = branch.trace().re;
            if probability < p_floor || probability <= 0.0 {
                omitted.insert(index, probability);
                continue;
            }
            let state = validate_density(branch.scale(1.0 / probability), DEFAULT_TOLERANCE)?;
            outcomes.push(SelectiveOutcome {
                index,
                probability,
                state,
            });
        }
        Ok(Subselection { outcomes, omitted })
    }
}

#[derive(Clone, Debug)]
pub struct SelectiveOutcome {
    pub index: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Surviving outcomes of a selective measurement plus the dropped ones.
#[derive(Clone, Debug)]
pub struct Subselection {
    pub outcomes: Vec<SelectiveOutcome>,
    /// Operator index → probability for outcomes below the floor.
    pub omitted: BTreeMap<usize, f64>,
}

impl Subselection {
    /// `Σ_n p_n ρ_n`.
    pub fn average_state(&self) -> ComplexMatrix {
        let dim = self.outcomes.first().map(|o| o.state.dim()).unwrap_or(0);
        self.outcomes
            .iter()
            .fold(ComplexMatrix::zeros(dim), |acc, o| {
                acc.add(&o.state.matrix().scale(o.probability))
                    .expect("outcomes share a dimension")
            })
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn kraus_pair(a: f64, b: f64) -> Vec<ComplexMatrix> {
        let z = c(0.0);
        vec![
            ComplexMatrix::from_rows(vec![vec![z, c(1.0), z], vec![z, z, z], vec![z, z, c(a)]])
                .unwrap(),
            ComplexMatrix::from_rows(vec![vec![c(1.0), z, z], vec![z, z, c(b)], vec![z, z, z]])
                .unwrap(),
        ]
    }

    fn three_level() -> DensityMatrix {
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 2.0, 0.0],
            vec![1.0, 0.0, 1.0],
        ])
        .unwrap()
        .scale(0.25);
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn kraus_pair_is_valid_and_incoherent() {
        let ch = KrausChannel::validate(kraus_pair(0.0, 1.0), 1e-8).unwrap();
        assert!(ch.is_incoherent());
        assert_eq!(ch.operators().len(), 2);
    }

    #[test]
    fn identity_is_incoherent() {
        assert!(KrausChannel::identity(4).is_incoherent());
    }

    #[test]
    fn incomplete_pair_is_rejected() {
        assert!(matches!(
            KrausChannel::validate(kraus_pair(1.0, 1.0), 1e-8),
            Err(Error::IncompleteChannel(_))
        ));
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let ops = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(matches!(
            KrausChannel::validate(ops, 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            KrausChannel::validate(vec![], 1e-8),
            Err(Error::EmptyChannel)
        );
    }

    #[test]
    fn hadamard_is_coherent() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]])
            .unwrap()
            .scale(std::f64::consts::FRAC_1_SQRT_2);
        let ch = KrausChannel::validate(vec![h], 1e-12).unwrap();
        assert!(!ch.is_incoherent());
    }

    #[test]
    fn identity_channel_leaves_state() {
        let rho = three_level();
        let out = KrausChannel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let sel = KrausChannel::identity(3)
            .selective_outcomes(&rho, DEFAULT_PROBABILITY_FLOOR)
            .unwrap();
        assert_eq!(sel.outcomes.len(), 1);
        assert_abs_diff_eq!(sel.outcomes[0].probability, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dephasing_gives_diagonal() {
        let rho = three_level();
        let out = KrausChannel::dephasing(3).apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.dephased().matrix()) < 1e-15);
    }

    #[test]
    fn outcomes_of_kraus_pair() {
        let ch = KrausChannel::validate(kraus_pair(0.0, 1.0), 1e-8).unwrap();
        let sel = ch
            .selective_outcomes(&three_level(), DEFAULT_PROBABILITY_FLOOR)
            .unwrap();
        assert_eq!(sel.outcomes.len(), 2);
        assert_abs_diff_eq!(sel.outcomes[0].probability, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sel.outcomes[1].probability, 0.5, epsilon = 1e-15);
        let rho1 = sel.outcomes[0].state.matrix();
        assert!(rho1.max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0])) < 1e-15);
        // (1/2)[[1, 1, 0], [1, 1, 0], [0, 0, 0]]
        let rho2 = sel.outcomes[1].state.matrix();
        let expected = ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(rho2.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn probabilities_for_half_amplitude() {
        let a = (0.75f64).sqrt();
        let ch = KrausChannel::validate(kraus_pair(a, 0.5), 1e-12).unwrap();
        let p = ch.probabilities(&three_level()).unwrap();
        assert_abs_diff_eq!(p[0], 11.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 5.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_probability_outcome_is_omitted() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let sel = KrausChannel::dephasing(2)
            .selective_outcomes(&rho, DEFAULT_PROBABILITY_FLOOR)
            .unwrap();
        assert_eq!(sel.outcomes.len(), 1);
        assert_eq!(sel.omitted.get(&1), Some(&0.0));
    }

    #[test]
    fn permutation_channel() {
        let ch = KrausChannel::permutation(&[2, 0, 1]).unwrap();
        assert!(ch.is_incoherent());
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert_eq!(out.populations(), vec![0.3, 0.2, 0.5]);
    }
}
