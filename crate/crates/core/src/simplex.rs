//! Projected gradient descent on the probability simplex.
//!
//! This is the numerical oracle for the closed-form minimizers: it knows
//! nothing about coherence, only how to minimize a smooth function over
//! `{q : q_i >= floor, Σ q_i = 1}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

/// Settings for [`minimize_on_simplex`].
#[derive(Clone, Debug)]
pub struct SimplexSearch {
    /// Iteration budget per restart.
    pub max_iterations: usize,
    /// Number of starting points: the barycenter plus `restarts - 1` Dirichlet(1) draws.
    pub restarts: usize,
    /// Stationarity threshold on the projected gradient.
    pub gradient_tolerance: f64,
    /// Lower bound kept on every coordinate so barrier-like objectives stay finite.
    pub floor: f64,
    pub seed: u64,
}

impl Default for SimplexSearch {
    fn default() -> Self {
        SimplexSearch {
            max_iterations: 100_000,
            restarts: 20,
            gradient_tolerance: 1e-10,
            floor: 1e-15,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Iterations summed over all restarts.
    pub iterations: usize,
    /// Projected gradient norm at the returned point.
    pub gradient_norm: f64,
}

/// Euclidean projection of `v` onto `{q : q_i >= floor, Σ q_i = 1}`.
pub fn project_to_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let n = v.len();
    let radius = 1.0 - floor * n as f64;
    debug_assert!(radius > 0.0, "floor too large for dimension");
    let shifted: Vec<f64> = v.iter().map(|x| x - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - radius) / (k as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    shifted
        .iter()
        .map(|&x| (x - theta).max(0.0) + floor)
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Component of `g` along the simplex; projection ignores the rest.
fn tangent(g: &[f64]) -> Vec<f64> {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|x| x - mean).collect()
}

fn stationarity(q: &[f64], g: &[f64], floor: f64) -> f64 {
    let trial: Vec<f64> = q.iter().zip(g).map(|(x, y)| x - y).collect();
    let p = project_to_simplex(&trial, floor);
    q.iter()
        .zip(&p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// A smooth objective on the simplex.
pub trait SimplexObjective {
    fn value(&self, q: &[f64]) -> f64;

    fn gradient(&self, q: &[f64]) -> Vec<f64>;

    /// `value(to) - value(from)`. Override when the difference can be formed
    /// without cancellation; the line search relies on it near convergence.
    fn difference(&self, from: &[f64], to: &[f64]) -> f64 {
        self.value(to) - self.value(from)
    }
}

/// Objective given by a value closure and a gradient closure.
pub struct FnObjective<F, G> {
    pub f: F,
    pub grad: G,
}

impl<F, G> SimplexObjective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, q: &[f64]) -> f64 {
        (self.f)(q)
    }

    fn gradient(&self, q: &[f64]) -> Vec<f64> {
        (self.grad)(q)
    }
}

/// Minimizes `obj` over the simplex from several starting points and keeps the best.
///
/// Each restart runs projected gradient descent with an Armijo backtracking
/// line search whose step doubles after every accepted move. A restart
/// converges when `‖q - P(q - ∇f(q))‖ < gradient_tolerance`; if no restart
/// converges within its budget the search fails with [`Error::BudgetExhausted`].
pub fn minimize_on_simplex<O: SimplexObjective>(
    dim: usize,
    obj: &O,
    opts: &SimplexSearch,
) -> Result<SimplexMinimum> {
    assert!(dim >= 1, "empty simplex");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<SimplexMinimum> = None;
    let mut total_iterations = 0;
    let mut worst_unconverged = 0.0f64;

    for restart in 0..opts.restarts.max(1) {
        let start = if restart == 0 {
            vec![1.0 / dim as f64; dim]
        } else {
            let draws: Vec<f64> = (0..dim).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = draws.iter().sum();
            draws.iter().map(|x| x / total).collect()
        };
        let run = descend(start, obj, opts);
        total_iterations += run.iterations;
        if run.gradient_norm >= opts.gradient_tolerance {
            worst_unconverged = worst_unconverged.max(run.gradient_norm);
            continue;
        }
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }

    match best {
        Some(mut b) => {
            b.iterations = total_iterations;
            Ok(b)
        }
        None => Err(Error::BudgetExhausted {
            iterations: total_iterations,
            grad_norm: worst_unconverged,
        }),
    }
}

fn descend<O: SimplexObjective>(start: Vec<f64>, obj: &O, opts: &SimplexSearch) -> SimplexMinimum {
    const ARMIJO: f64 = 1e-4;
    const MIN_STEP: f64 = 1e-30;

    let mut q = project_to_simplex(&start, opts.floor);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut g = tangent(&obj.gradient(&q));
    let mut r = stationarity(&q, &g, opts.floor);

    while iterations < opts.max_iterations && r >= opts.gradient_tolerance {
        iterations += 1;
        let mut accepted = false;
        while step >= MIN_STEP {
            let trial: Vec<f64> = q.iter().zip(&g).map(|(x, y)| x - step * y).collect();
            let cand = project_to_simplex(&trial, opts.floor);
            let d: Vec<f64> = cand.iter().zip(&q).map(|(a, b)| a - b).collect();
            let delta = obj.difference(&q, &cand);
            if delta.is_finite() && delta <= ARMIJO * dot(&g, &d) {
                q = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1e8);
        g = tangent(&obj.gradient(&q));
        r = stationarity(&q, &g, opts.floor);
    }

    SimplexMinimum {
        value: obj.value(&q),
        point: q,
        iterations,
        gradient_norm: r,
    }
}
