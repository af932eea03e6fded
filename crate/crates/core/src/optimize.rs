//! Multistart Nelder-Mead maximization.
//!
//! The payoff objectives are smooth trigonometric polynomials in at most
//! eight angles, so a simplex search restarted from uniformly random points
//! is enough. Restart starting points are drawn from a seeded generator and
//! each local search is deterministic, so results are reproducible for a
//! given seed; with the `parallel` feature the restarts run on rayon and the
//! winner is still selected by (value, restart index), independent of
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Search budget and reproducibility knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Number of random restarts.
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Convergence tolerance on the simplex objective spread.
    pub tol: f64,
    /// Seed for the restart sampler.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 800, tol: 1e-8, seed: 0 }
    }
}

/// End state of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct Finisher {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Result of the multistart search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub evaluations: u64,
    /// Whether the winning restart met the convergence tolerance.
    pub converged: bool,
    /// Final point of every restart, in restart order.
    pub finishers: Vec<Finisher>,
}

fn sample_starts(bounds: &[(f64, f64)], config: &SearchConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.restarts.max(1))
        .map(|_| {
            bounds
                .iter()
                .map(|(lo, hi)| rng.gen_range(*lo..=*hi))
                .collect()
        })
        .collect()
}

/// Maximizes `f` by multistart Nelder-Mead over a box of starting points.
/// The bounds only shape the restart sampling; the local search itself is
/// unconstrained (the objectives are periodic in every coordinate).
pub fn multistart_max<F>(f: F, bounds: &[(f64, f64)], config: &SearchConfig) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let starts = sample_starts(bounds, config);

    #[cfg(feature = "parallel")]
    let runs: Vec<(Finisher, u64)> = starts
        .par_iter()
        .map(|x0| nelder_mead_max(&f, x0, config))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<(Finisher, u64)> = starts
        .iter()
        .map(|x0| nelder_mead_max(&f, x0, config))
        .collect();

    merge_runs(runs)
}

/// Single-threaded variant of [`multistart_max`] (kept available for
/// benchmarking against the parallel path).
pub fn multistart_max_seq<F>(f: F, bounds: &[(f64, f64)], config: &SearchConfig) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let starts = sample_starts(bounds, config);
    let runs: Vec<(Finisher, u64)> = starts
        .iter()
        .map(|x0| nelder_mead_max(&f, x0, config))
        .collect();
    merge_runs(runs)
}

fn merge_runs(runs: Vec<(Finisher, u64)>) -> SearchOutcome {
    let mut evaluations = 0u64;
    let finishers: Vec<Finisher> = runs
        .into_iter()
        .map(|(fin, evals)| {
            evaluations += evals;
            fin
        })
        .collect();

    // winner chosen by (value, restart index); strict > keeps the earliest
    // restart on ties, independent of evaluation schedule
    let mut win = 0;
    for (i, fin) in finishers.iter().enumerate() {
        if fin.value > finishers[win].value {
            win = i;
        }
    }
    SearchOutcome {
        best_x: finishers[win].x.clone(),
        best_value: finishers[win].value,
        evaluations,
        converged: finishers[win].converged,
        finishers,
    }
}

/// Classic Nelder-Mead on `-f`, returning the best vertex, whether the
/// simplex spread met `config.tol`, and the evaluation count.
fn nelder_mead_max<F>(f: &F, x0: &[f64], config: &SearchConfig) -> (Finisher, u64)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    const INIT_STEP: f64 = 0.5;

    let n = x0.len();
    let mut evals = 0u64;
    let mut g = |x: &[f64]| {
        evals += 1;
        -f(x)
    };

    // initial simplex: x0 plus one step along each coordinate
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = g(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += INIT_STEP;
        let v = g(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    for _ in 0..config.max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < config.tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();

        let at = |t: f64| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + t * (centroid[k] - worst.0[k])).collect()
        };

        let xr = at(REFLECT);
        let vr = g(&xr);
        if vr < simplex[0].1 {
            let xe = at(EXPAND);
            let ve = g(&xe);
            simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr < simplex[n - 1].1 {
            simplex[n] = (xr, vr);
            continue;
        }
        // contraction, outside or inside
        if vr < worst.1 {
            let xc = at(CONTRACT);
            let vc = g(&xc);
            if vc <= vr {
                simplex[n] = (xc, vc);
                continue;
            }
        } else {
            let xc = at(-CONTRACT);
            let vc = g(&xc);
            if vc < worst.1 {
                simplex[n] = (xc, vc);
                continue;
            }
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            for (xk, bk) in entry.0.iter_mut().zip(best.iter()) {
                *xk = bk + SHRINK * (*xk - bk);
            }
            entry.1 = g(&entry.0);
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let fin = Finisher {
        x: simplex[0].0.clone(),
        value: -simplex[0].1,
        converged,
    };
    (fin, evals)
}
