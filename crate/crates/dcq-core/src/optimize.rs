//! Random-restart derivative-free minimization: Nelder-Mead simplex
//! descent with a shrinking step schedule. Restarts are seeded
//! deterministically as `seed + restart index`, may run concurrently, and
//! are merged by best value with the lowest restart index breaking ties.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::Sampler;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub step_init: f64,
    pub seed: u64,
    /// Channel output dimension override for advantage searches.
    pub d_out: Option<usize>,
    /// Kraus-count override for advantage searches.
    pub kraus: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            f_tol: 1e-7,
            step_init: 0.3,
            seed: 0,
            d_out: None,
            kraus: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::OutOfRange {
                name: "restarts",
                value: self.restarts as f64,
            });
        }
        if self.f_tol <= 0.0 {
            return Err(Error::OutOfRange {
                name: "f_tol",
                value: self.f_tol,
            });
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// Best-objective-so-far series of one restart.
#[derive(Debug, Clone, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub points: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub best_restart: usize,
    pub converged: bool,
    pub traces: Vec<RestartTrace>,
}

struct RestartOutcome {
    x: Vec<f64>,
    f: f64,
    converged: bool,
    trace: Vec<(usize, f64)>,
}

/// One Nelder-Mead run (adaptive simplex with shrink steps).
fn nelder_mead(
    raw_f: &(impl Fn(&[f64]) -> f64 + ?Sized),
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> RestartOutcome {
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    // objectives can go numerically bad far from the feasible region;
    // treat NaN or -inf as an infinitely poor point
    let f = |x: &[f64]| {
        let v = raw_f(x);
        if v.is_nan() || v == f64::NEG_INFINITY { f64::INFINITY } else { v }
    };

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    simplex.push((f(x0), x0.to_vec()));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += cfg.step_init;
        simplex.push((f(&x), x));
    }
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut trace = Vec::new();
    let mut converged = false;
    for iter in 0..cfg.max_iters {
        trace.push((iter, simplex[0].0));
        let spread = simplex[dim].0 - simplex[0].0;
        if spread.abs() < cfg.f_tol {
            converged = true;
            break;
        }
        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for (_, x) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.1)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = f(&reflect);

        if fr < simplex[0].0 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let fe = f(&expand);
            simplex[dim] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflect);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst.1)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = f(&contract);
            if fc < worst.0 {
                simplex[dim] = (fc, contract);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&entry.1)
                        .map(|(b, xi)| b + sigma * (xi - b))
                        .collect();
                    *entry = (f(&x), x);
                }
            }
        }
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    trace.push((trace.len(), simplex[0].0));
    RestartOutcome {
        x: simplex[0].1.clone(),
        f: simplex[0].0,
        converged,
        trace,
    }
}

/// Minimize with `cfg.restarts` independent runs. The first entries of
/// `starts` seed the corresponding restarts; remaining restarts start from
/// Gaussian random points (restart i drawing from seed `cfg.seed + i`).
pub fn minimize_with_starts(
    f: impl Fn(&[f64]) -> f64 + Sync,
    dim: usize,
    cfg: &OptimizerConfig,
    starts: &[Vec<f64>],
) -> MinimizeResult {
    let n = cfg.restarts.max(starts.len());
    let run = |i: usize| -> RestartOutcome {
        let x0 = if i < starts.len() {
            starts[i].clone()
        } else if i == starts.len() {
            vec![0.0; dim]
        } else {
            Sampler::new(cfg.seed + i as u64).real_vec(dim, 1.0)
        };
        nelder_mead(&f, &x0, cfg)
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<RestartOutcome> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<RestartOutcome> = (0..n).map(run).collect();

    let mut best = 0usize;
    for i in 1..n {
        if outcomes[i].f < outcomes[best].f {
            best = i;
        }
    }
    MinimizeResult {
        best_x: outcomes[best].x.clone(),
        best_f: outcomes[best].f,
        best_restart: best,
        converged: outcomes[best].converged,
        traces: outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| RestartTrace {
                restart: i,
                points: o.trace.clone(),
            })
            .collect(),
    }
}

pub fn minimize(
    f: impl Fn(&[f64]) -> f64 + Sync,
    dim: usize,
    cfg: &OptimizerConfig,
) -> MinimizeResult {
    minimize_with_starts(f, dim, cfg, &[])
}

/// Bisect a bracketed sign change of `f` on [lo, hi] to within `tol`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut flo = flo;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
