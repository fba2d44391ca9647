//! Seeded random states, ensembles and incoherent channels.
//!
//! Every generator is a pure function of `(seed, stream)`: the stream index
//! selects an independent ChaCha8 keystream, so parallel callers partition
//! work by stream instead of sharing generator state.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// Identifier of the random source, recorded in audit artifacts.
pub const RNG_ALGORITHM: &str = "chacha8-stream";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// `G G† / Tr(G G†)` with `G` a d×d complex Gaussian matrix.
    GinibreMixed,
    /// `|ψ><ψ|` with `ψ` a normalized complex Gaussian vector.
    HaarPure,
    /// Ginibre construction with a d×k factor, giving rank at most k.
    RankLimited(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub dim: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
}

impl SamplerConfig {
    pub fn new(dim: usize, seed: u64, ensemble: Ensemble) -> Result<Self> {
        let cfg = SamplerConfig {
            dim,
            seed,
            ensemble,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::DimensionTooSmall(self.dim));
        }
        if let Ensemble::RankLimited(k) = self.ensemble {
            if k == 0 || k > self.dim {
                return Err(Error::InvalidWeights(format!(
                    "rank limit {k} outside [1, {}]",
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

/// Generator for keystream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A point drawn uniformly from the probability simplex (Dirichlet(1)).
pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

pub fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    ensemble: Ensemble,
) -> DensityMatrix {
    match ensemble {
        Ensemble::HaarPure => {
            let psi: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
            DensityMatrix::pure(&psi).expect("Gaussian vector is nonzero")
        }
        Ensemble::GinibreMixed => ginibre(rng, dim, dim),
        Ensemble::RankLimited(k) => ginibre(rng, dim, k),
    }
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..rank).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let z: Complex64 = (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m[(i, i)].im = 0.0;
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr)).expect("Ginibre product is a valid state")
}

/// Random state for `cfg`; identical configs give identical states.
pub fn random_density(cfg: &SamplerConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, 0);
    Ok(random_density_with(&mut rng, cfg.dim, cfg.ensemble))
}

/// Random incoherent channel built from weighted partial permutations.
///
/// Operator `n` sends column `j` to row `σ_n(j)` for a random permutation
/// `σ_n`, with amplitude `w_{n,j}`; for each column the squared amplitudes
/// over `n` form a Dirichlet(1) draw, so `Σ_n K_n† K_n = I`.
pub fn random_incoherent_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n_ops: usize,
) -> KrausChannel {
    assert!(n_ops >= 1 && dim >= 1);
    let mut ops = vec![ComplexMatrix::zeros(dim); n_ops];
    let perms: Vec<Vec<usize>> = (0..n_ops)
        .map(|_| {
            let mut p: Vec<usize> = (0..dim).collect();
            for i in (1..dim).rev() {
                let j = rng.random_range(0..=i);
                p.swap(i, j);
            }
            p
        })
        .collect();
    for j in 0..dim {
        let weights = if n_ops == 1 {
            vec![1.0]
        } else {
            dirichlet_weights(rng, n_ops)
        };
        for (n, w) in weights.into_iter().enumerate() {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            ops[n][(perms[n][j], j)] = Complex64::from_polar(w.sqrt(), phase);
        }
    }
    KrausChannel::validate(ops, 1e-12).expect("partial permutations are complete")
}

pub fn random_incoherent_channel(dim: usize, n_ops: usize, seed: u64) -> Result<KrausChannel> {
    if n_ops == 0 {
        return Err(Error::EmptyChannel);
    }
    if dim == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let mut rng = stream_rng(seed, 0);
    Ok(random_incoherent_channel_with(&mut rng, dim, n_ops))
}

pub fn random_ensemble_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    size: usize,
) -> Vec<(f64, DensityMatrix)> {
    let weights = dirichlet_weights(rng, size);
    weights
        .into_iter()
        .map(|w| (w, random_density_with(rng, dim, Ensemble::GinibreMixed)))
        .collect()
}

/// Dirichlet(1)-weighted ensemble of Ginibre states.
pub fn random_ensemble(dim: usize, size: usize, seed: u64) -> Result<Vec<(f64, DensityMatrix)>> {
    if size == 0 {
        return Err(Error::InvalidWeights("ensemble must be nonempty".into()));
    }
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let mut rng = stream_rng(seed, 0);
    Ok(random_ensemble_with(&mut rng, dim, size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_samples_are_pure() {
        let cfg = SamplerConfig::new(2, 11, Ensemble::HaarPure).unwrap();
        assert_abs_diff_eq!(random_density(&cfg).unwrap().purity(), 1.0, epsilon = 1e-10);
        let cfg = SamplerConfig::new(4, 11, Ensemble::RankLimited(1)).unwrap();
        assert_abs_diff_eq!(random_density(&cfg).unwrap().purity(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn same_seed_same_state() {
        let cfg = SamplerConfig::new(3, 99, Ensemble::GinibreMixed).unwrap();
        assert_eq!(random_density(&cfg).unwrap(), random_density(&cfg).unwrap());
        let other = SamplerConfig { seed: 100, ..cfg };
        assert_ne!(
            random_density(&cfg).unwrap(),
            random_density(&other).unwrap()
        );
    }

    #[test]
    fn rank_limit_is_respected() {
        let cfg = SamplerConfig::new(5, 3, Ensemble::RankLimited(2)).unwrap();
        let rho = random_density(&cfg).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[2..].iter().all(|&l| l.abs() < 1e-12));
        assert!(ev[1] > 1e-6);
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(SamplerConfig::new(1, 0, Ensemble::GinibreMixed).is_err());
        assert!(SamplerConfig::new(3, 0, Ensemble::RankLimited(0)).is_err());
        assert!(SamplerConfig::new(3, 0, Ensemble::RankLimited(4)).is_err());
    }

    #[test]
    fn single_operator_channel_is_unitary_permutation() {
        let ch = random_incoherent_channel(4, 1, 5).unwrap();
        let k = &ch.operators()[0];
        for i in 0..4 {
            let row: Vec<f64> = (0..4).map(|j| k[(i, j)].norm()).collect();
            assert_eq!(row.iter().filter(|&&x| x > 0.0).count(), 1);
            assert!(row.iter().all(|&x| x == 0.0 || (x - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn channel_rows_do_not_collide() {
        let ch = random_incoherent_channel(5, 3, 8).unwrap();
        assert!(ch.is_incoherent());
        for k in ch.operators() {
            for i in 0..5 {
                assert!((0..5).filter(|&j| k[(i, j)].norm() > 0.0).count() <= 1);
            }
        }
    }

    #[test]
    fn ensemble_weights_on_simplex() {
        let ens = random_ensemble(3, 3, 4).unwrap();
        assert_abs_diff_eq!(ens.iter().map(|e| e.0).sum::<f64>(), 1.0, epsilon = 1e-12);
        let single = random_ensemble(3, 1, 4).unwrap();
        assert_eq!(single[0].0, 1.0);
        let a = random_ensemble(2, 1, 1).unwrap();
        let b = random_ensemble(2, 1, 2).unwrap();
        assert_ne!(a[0].1, b[0].1);
    }

    #[test]
    fn streams_are_independent() {
        let mut a = stream_rng(1, 0);
        let mut b = stream_rng(1, 1);
        let x: u64 = a.random();
        let y: u64 = b.random();
        assert_ne!(x, y);
    }
}
