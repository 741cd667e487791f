//! Heuristic feasibility search for B-symmetric extensions by alternating
//! projections between the affine constraint set (Hermitian, swap
//! symmetric, correct AB reduction) and the PSD cone. Convergence is
//! evidence of feasibility; budget exhaustion is evidence, not proof, of
//! infeasibility.

use serde::Serialize;

use crate::advantage::{quantum_advantage, Cut, EPS_DC};
use crate::channels::ChannelClass;
use crate::error::{Error, Result};
use crate::optimize::OptimizerConfig;
use crate::qcore::matrix::{eig_hermitian_unchecked, C64, QMatrix};
use crate::qcore::state::PartitionedState;
use crate::qcore::tensor;

pub const TOL_EXT: f64 = 1e-6;
pub const MAX_EXT_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ExtensionStatus {
    FeasiblePointFound,
    BudgetExhausted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionResult {
    pub status: ExtensionStatus,
    pub residual: f64,
    pub iterations: usize,
    /// Residual after each iteration.
    pub trace: Vec<f64>,
    pub candidate: Option<PartitionedState>,
}

/// Swap operator exchanging B and B' on (A, B, B').
fn swap_bbp(d_a: usize, d_b: usize) -> QMatrix {
    let dims = [d_a, d_b, d_b];
    let total = d_a * d_b * d_b;
    let s = tensor::strides(&dims);
    QMatrix::from_fn(total, total, |r, c| {
        let (a, b, bp) = (c / s[0], (c / s[1]) % d_b, c % d_b);
        if r == a * s[0] + bp * s[1] + b {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Projection onto {sigma Hermitian, swap symmetric, Tr_B' sigma = rho}.
/// The reduction correction is the closed-form least-norm symmetric
/// update: with K(Y) = (Tr_B Y) (x) I_B and the defect D = Tr_B' sigma - rho,
/// the multiplier is Y = (2/d_B) D - (1/d_B^2) K(D), symmetrized over the
/// two B slots.
fn project_affine(sigma: &QMatrix, rho: &QMatrix, dims: &[usize; 3], swap: &QMatrix) -> QMatrix {
    let (d_a, d_b) = (dims[0], dims[1]);
    let h = sigma.hermitize();
    let sym = h.add(&swap.mul(&h).mul(swap)).scale_re(0.5);

    let (red, _) = tensor::partial_trace_raw(&sym, dims, &[0, 1]);
    let defect = red.sub(rho);
    let (tr_b, _) = tensor::partial_trace_raw(&defect, &[d_a, d_b], &[0]);
    let k = tr_b.kron(&QMatrix::identity(d_b));
    let y = defect
        .scale_re(2.0 / d_b as f64)
        .sub(&k.scale_re(1.0 / (d_b * d_b) as f64));
    let y_full = y.kron(&QMatrix::identity(d_b));
    let x = y_full.add(&swap.mul(&y_full).mul(swap)).scale_re(0.5);
    sym.sub(&x)
}

/// Nearest-PSD step: clip negative eigenvalues, renormalize the trace.
fn project_psd(sigma: &QMatrix) -> QMatrix {
    let (vals, vecs) = eig_hermitian_unchecked(&sigma.hermitize());
    let clipped: Vec<C64> = vals.iter().map(|&v| C64::new(v.max(0.0), 0.0)).collect();
    let m = vecs.mul(&QMatrix::diag(&clipped)).mul(&vecs.dagger());
    let tr = m.trace().re;
    if tr > 1e-12 {
        m.scale_re(1.0 / tr)
    } else {
        m
    }
}

/// Constraint violation of a PSD iterate: reduction error plus swap
/// asymmetry, entrywise.
fn residual_of(sigma: &QMatrix, rho: &QMatrix, dims: &[usize; 3], swap: &QMatrix) -> f64 {
    let (red, _) = tensor::partial_trace_raw(sigma, dims, &[0, 1]);
    let red_err = red.max_diff(rho);
    let sym_err = swap.mul(sigma).mul(swap).max_diff(sigma);
    red_err.max(sym_err)
}

/// Search for sigma on (A, B, B') that is PSD, swap symmetric in (B, B')
/// and reduces to the given state on (A, B). Deterministic: starts from
/// rho (x) I/d_B.
pub fn symmetric_extension_search(
    s: &PartitionedState,
    max_iters: usize,
    tol_ext: f64,
) -> Result<ExtensionResult> {
    if s.n_parties() != 2 {
        return Err(Error::InvalidSubsystems("bipartite input required".into()));
    }
    let (d_a, d_b) = (s.dims()[0], s.dims()[1]);
    if d_a * d_b * d_b > 64 {
        return Err(Error::SizeGuard(format!(
            "extension space dimension {} exceeds 64",
            d_a * d_b * d_b
        )));
    }
    let dims = [d_a, d_b, d_b];
    let swap = swap_bbp(d_a, d_b);
    let rho = s.matrix();

    let mut sigma = rho.kron(&QMatrix::identity(d_b).scale_re(1.0 / d_b as f64));
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut residual = residual_of(&sigma, rho, &dims, &swap);
    trace.push(residual);
    while residual > tol_ext && iterations < max_iters {
        sigma = project_psd(&project_affine(&sigma, rho, &dims, &swap));
        residual = residual_of(&sigma, rho, &dims, &swap);
        trace.push(residual);
        iterations += 1;
    }

    let status = if residual <= tol_ext {
        ExtensionStatus::FeasiblePointFound
    } else {
        ExtensionStatus::BudgetExhausted
    };
    let candidate = if status == ExtensionStatus::FeasiblePointFound {
        Some(PartitionedState::from_labels(
            dims.to_vec(),
            &["A", "B", "Bp"],
            sigma,
        )?)
    } else {
        None
    };
    Ok(ExtensionResult {
        status,
        residual,
        iterations,
        trace,
        candidate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub advantage: f64,
    pub dc: bool,
    pub extension: ExtensionResult,
    /// A dense-codeable state must not admit a symmetric extension.
    pub consistent: bool,
}

/// Cross-check the dense-coding verdict against the extension search: a
/// positive advantage (hence one-way distillability) is incompatible with
/// a feasible B-symmetric extension.
pub fn dc_extension_consistency(
    s: &PartitionedState,
    cut: &Cut,
    cfg: &OptimizerConfig,
) -> Result<ConsistencyReport> {
    let rep = quantum_advantage(s, cut, &ChannelClass::Global, cfg)?;
    let extension = symmetric_extension_search(s, MAX_EXT_ITERS, TOL_EXT)?;
    let dc = rep.value > EPS_DC;
    let consistent = !(dc && extension.status == ExtensionStatus::FeasiblePointFound);
    Ok(ConsistencyReport {
        advantage: rep.value,
        dc,
        extension,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::TOL_EIG;
    use crate::qcore::Sampler;
    use crate::states::{bell_state, werner};

    #[test]
    fn affine_projection_is_idempotent() {
        let mut s = Sampler::new(3);
        let rho = s.random_density(&[2, 2]);
        let dims = [2usize, 2, 2];
        let swap = swap_bbp(2, 2);
        let sigma = s.random_density(&[2, 2, 2]).matrix().clone();
        let once = project_affine(&sigma, rho.matrix(), &dims, &swap);
        let twice = project_affine(&once, rho.matrix(), &dims, &swap);
        assert!(twice.max_diff(&once) < TOL_EIG);
        // projected point satisfies the constraints
        let (red, _) = tensor::partial_trace_raw(&once, &dims, &[0, 1]);
        assert!(red.max_diff(rho.matrix()) < TOL_EIG);
        assert!(swap.mul(&once).mul(&swap).max_diff(&once) < TOL_EIG);
    }

    #[test]
    fn product_state_extends() {
        let mut s = Sampler::new(5);
        let rho_a = s.random_density(&[2]);
        let rho_b = s.random_density(&[2]);
        let prod = PartitionedState::from_labels(
            vec![2, 2],
            &["A", "B"],
            rho_a.matrix().kron(rho_b.matrix()),
        )
        .unwrap();
        let res = symmetric_extension_search(&prod, 2000, TOL_EXT).unwrap();
        assert_eq!(res.status, ExtensionStatus::FeasiblePointFound);
        let cand = res.candidate.unwrap();
        // independent verification of the found point
        let red = cand.partial_trace(&[0, 1]).unwrap();
        assert!(red.matrix().max_diff(prod.matrix()) < 10.0 * TOL_EXT);
        let redp = cand.partial_trace(&[0, 2]).unwrap();
        assert!(redp.matrix().max_diff(prod.matrix()) < 10.0 * TOL_EXT);
    }

    #[test]
    fn werner_extension_threshold() {
        let ok = symmetric_extension_search(&werner(0.5).unwrap().state, MAX_EXT_ITERS, TOL_EXT)
            .unwrap();
        assert_eq!(ok.status, ExtensionStatus::FeasiblePointFound);

        let no = symmetric_extension_search(&werner(0.9).unwrap().state, MAX_EXT_ITERS, TOL_EXT)
            .unwrap();
        assert_eq!(no.status, ExtensionStatus::BudgetExhausted);
        assert!(no.residual > TOL_EXT);
    }

    #[test]
    fn residuals_eventually_non_increasing() {
        let res = symmetric_extension_search(&werner(0.9).unwrap().state, 500, TOL_EXT).unwrap();
        for w in res.trace[10..].windows(2) {
            assert!(w[1] <= w[0] + TOL_EIG, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn pure_bell_state_is_monogamous() {
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        let res = symmetric_extension_search(&psi0, 2000, TOL_EXT).unwrap();
        assert_eq!(res.status, ExtensionStatus::BudgetExhausted);
    }

    #[test]
    fn consistency_on_werner_family() {
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iters: 200,
            seed: 9,
            ..Default::default()
        };
        let cut = Cut::bipartite();
        let hot = dc_extension_consistency(&werner(0.9).unwrap().state, &cut, &cfg).unwrap();
        assert!(hot.dc && hot.consistent);
        let cold = dc_extension_consistency(&werner(0.5).unwrap().state, &cut, &cfg).unwrap();
        assert!(!cold.dc && cold.consistent);
        assert_eq!(cold.extension.status, ExtensionStatus::FeasiblePointFound);
    }
}
