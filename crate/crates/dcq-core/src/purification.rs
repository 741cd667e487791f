//! Entanglement of purification, its monogamy with the dense-coding
//! advantage, and the single-copy residual identity connecting it to the
//! Henderson-Vedral correlation and the entanglement of formation.
//!
//! For a pure three-party state the advantage minimization on A and the
//! purification minimization for E_p(B:C) are the same entropy search over
//! channels on A; sharing one run makes the monogamy identity exact up to
//! arithmetic, while independent runs expose the optimizer slack.

use serde::Serialize;

use crate::advantage::{quantum_advantage, Cut};
use crate::channels::{ChannelClass, IsometryParams};
use crate::error::{Error, Result};
use crate::optimize::{minimize_with_starts, OptimizerConfig};
use crate::qcore::entropy::{binary_entropy, entropy_of_spectrum, von_neumann_entropy_state};
use crate::qcore::matrix::{eig_hermitian, eig_hermitian_unchecked, C64, QMatrix, CLIP_EIG};
use crate::qcore::state::{PartitionedState, PureState};
use crate::qcore::tensor;

/// A bipartite state with a purification on (A, A', B, B').
#[derive(Debug, Clone)]
pub struct Purification {
    pub base: PartitionedState,
    pub psi: PureState,
}

/// Spectral purification: the ancilla A' carries one dimension per
/// nonzero eigenvalue, B' is trivial.
pub fn canonical_purification(s: &PartitionedState) -> Result<Purification> {
    if s.n_parties() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "purification needs a bipartite state, got {} parties",
            s.n_parties()
        )));
    }
    let (vals, vecs) = eig_hermitian(s.matrix())?;
    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > CLIP_EIG).collect();
    let rank = kept.len();
    let d = s.total_dim();
    // amplitudes over (A, B, A'): sqrt(lambda_i) <ab|lambda_i>
    let mut amps = vec![C64::new(0.0, 0.0); d * rank];
    for (slot, &i) in kept.iter().enumerate() {
        let w = vals[i].sqrt();
        for ab in 0..d {
            amps[ab * rank + slot] = vecs[(ab, i)] * w;
        }
    }
    let (d_a, d_b) = (s.dims()[0], s.dims()[1]);
    let (amps, _) = tensor::permute_vec(&amps, &[d_a, d_b, rank], &[0, 2, 1]);
    let psi = PureState::new(vec![d_a, rank, d_b, 1], amps)?;
    Ok(Purification { base: s.clone(), psi })
}

/// Reduced density matrix of a pure state on the kept subsystems.
fn pure_reduction(amps: &[C64], dims: &[usize], keep: &[usize]) -> QMatrix {
    let strides = tensor::strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let keep_total: usize = keep_dims.iter().product();
    let traced_total: usize = traced.iter().map(|&i| dims[i]).product();
    let keep_strides = tensor::strides(&keep_dims);

    // flat index from a kept multi-index and a traced counter
    let flat = |k: usize, t: usize| -> usize {
        let mut idx = 0;
        let mut kk = k;
        for (slot, &sys) in keep.iter().enumerate() {
            idx += (kk / keep_strides[slot]) * strides[sys];
            kk %= keep_strides[slot];
        }
        let mut tt = t;
        for &sys in traced.iter().rev() {
            idx += (tt % dims[sys]) * strides[sys];
            tt /= dims[sys];
        }
        idx
    };
    QMatrix::from_fn(keep_total, keep_total, |r, c| {
        (0..traced_total)
            .map(|t| amps[flat(r, t)] * amps[flat(c, t)].conj())
            .sum()
    })
}

fn spectrum_entropy(m: &QMatrix) -> f64 {
    let (vals, _) = eig_hermitian_unchecked(&m.hermitize());
    entropy_of_spectrum(&vals)
}

#[derive(Debug, Clone, Serialize)]
pub struct EpReport {
    /// Best upper bound found on E_p.
    pub value: f64,
    /// Minimum over channels on the canonical ancilla.
    pub channel_form: f64,
    /// Minimum over rotated purifications with a finite B' budget.
    pub purification_form: f64,
    pub gap: f64,
    pub converged: bool,
}

/// Entanglement of purification of a bipartite state, evaluated through
/// both parametrizations; the minimum is returned, the gap recorded.
pub fn entanglement_of_purification(
    s: &PartitionedState,
    cfg: &OptimizerConfig,
) -> Result<EpReport> {
    let purif = canonical_purification(s)?;
    let dims = purif.psi.dims().to_vec();
    let (d_a, rank, d_b) = (dims[0], dims[1], dims[2]);

    // channel form: channels on A' of the (A, A') marginal
    let rho_aap = PartitionedState::from_labels(
        vec![d_a, rank],
        &["A", "Ap"],
        pure_reduction(purif.psi.amplitudes(), &dims, &[0, 1]),
    )?;
    let rep = quantum_advantage(
        &rho_aap,
        &Cut::new(vec![1], vec![0]),
        &ChannelClass::Global,
        cfg,
    )?;
    let channel_form = rep.best_objective;

    // purification form: unitaries on (A', B') with B' padded
    let b_cap = (2 * rank).min((16 / rank).max(2));
    let dim_u = rank * b_cap;
    let padded_dims = vec![d_a, rank, d_b, b_cap];
    let mut padded = vec![C64::new(0.0, 0.0); d_a * rank * d_b * b_cap];
    for (i, &a) in purif.psi.amplitudes().iter().enumerate() {
        padded[i * b_cap] = a;
    }
    // fronted order (A', B', A, B) so the unitary is a plain block action
    let (fronted, fronted_dims) = tensor::permute_vec(&padded, &padded_dims, &[1, 3, 0, 2]);
    let d_rest = d_a * d_b;
    let dof = IsometryParams::dof(dim_u, 1);
    let eval = |x: &[f64]| -> f64 {
        let u = IsometryParams {
            d_in: dim_u,
            d_out: dim_u,
            k: 1,
            generator: x.to_vec(),
        }
        .isometry();
        let mut rotated = vec![C64::new(0.0, 0.0); fronted.len()];
        for i in 0..dim_u {
            for j in 0..d_rest {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..dim_u {
                    acc += u[(i, k)] * fronted[k * d_rest + j];
                }
                rotated[i * d_rest + j] = acc;
            }
        }
        // keep (A', A) of (A', B', A, B)
        spectrum_entropy(&pure_reduction(&rotated, &fronted_dims, &[0, 2]))
    };
    let res = minimize_with_starts(eval, dof, cfg, &[vec![0.0; dof]]);
    let purification_form = res.best_f;

    let value = channel_form.min(purification_form);
    Ok(EpReport {
        value,
        channel_form,
        purification_form,
        gap: (channel_form - purification_form).abs(),
        converged: rep.converged && res.converged,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonogamyReport {
    pub s_b: f64,
    pub delta_ab: f64,
    pub ep_bc: f64,
    /// From the shared run; zero up to arithmetic.
    pub residual: f64,
    /// E_p(B:C) from its own independent optimization.
    pub ep_independent: f64,
    pub independent_residual: f64,
}

/// Check S(B) = advantage(A>B) + E_p(B:C) on a pure three-party state.
pub fn monogamy_check(psi: &PureState, cfg: &OptimizerConfig) -> Result<MonogamyReport> {
    if psi.dims().len() != 3 {
        return Err(Error::InvalidSubsystems(format!(
            "monogamy check needs 3 parties, got {}",
            psi.dims().len()
        )));
    }
    let full = psi.to_state(&["A", "B", "C"]);
    let rho_ab = full.partial_trace(&[0, 1])?;
    let rho_bc = full.partial_trace(&[1, 2])?;
    let s_b = von_neumann_entropy_state(&full.partial_trace(&[1])?);

    // one minimization serves both terms: A is the purifying ancilla of
    // rho_BC, so min_Lambda_A S((Lambda_A x id_B) rho_AB) is E_p(B:C)
    let rep = quantum_advantage(&rho_ab, &Cut::bipartite(), &ChannelClass::Global, cfg)?;
    let delta_ab = rep.value;
    let ep_bc = rep.best_objective;
    let residual = s_b - delta_ab - ep_bc;

    let ep_independent = entanglement_of_purification(&rho_bc, cfg)?.value;
    let independent_residual = s_b - delta_ab - ep_independent;

    Ok(MonogamyReport {
        s_b,
        delta_ab,
        ep_bc,
        residual,
        ep_independent,
        independent_residual,
    })
}

/// Kraus rows of a rank-one POVM with `n_outcomes` elements on a
/// d-dimensional system, from smooth isometry coordinates.
fn povm_rows(d: usize, n_outcomes: usize, x: &[f64]) -> Vec<Vec<C64>> {
    let v = IsometryParams {
        d_in: d,
        d_out: 1,
        k: n_outcomes,
        generator: x.to_vec(),
    }
    .isometry();
    (0..n_outcomes)
        .map(|i| (0..d).map(|c| v[(i, c)]).collect())
        .collect()
}

pub fn default_n_outcomes(d_a: usize) -> usize {
    2 * d_a * d_a
}

/// Henderson-Vedral classical correlation I_HV(A>B): the best reduction of
/// the receiver entropy achievable by measuring A. Lower bound via rank-one
/// POVMs; the computational basis seeds the search.
pub fn henderson_vedral(
    s: &PartitionedState,
    n_outcomes: usize,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    if s.n_parties() != 2 {
        return Err(Error::InvalidSubsystems("bipartite input required".into()));
    }
    let (d_a, d_b) = (s.dims()[0], s.dims()[1]);
    let s_b = von_neumann_entropy_state(&s.partial_trace(&[1])?);
    let dof = IsometryParams::dof(1, n_outcomes);
    let eval = |x: &[f64]| -> f64 {
        let mut acc = 0.0;
        for row in povm_rows(d_a, n_outcomes, x) {
            // (A_x x I) rho (A_x^dag x I): unnormalized conditional on B
            let sub = QMatrix::from_fn(d_b, d_b, |r, c| {
                let mut v = C64::new(0.0, 0.0);
                for (i, ri) in row.iter().enumerate() {
                    for (j, rj) in row.iter().enumerate() {
                        v += ri * s.matrix()[(i * d_b + r, j * d_b + c)] * rj.conj();
                    }
                }
                v
            });
            let p = sub.trace().re;
            if p > 1e-12 {
                acc += p * spectrum_entropy(&sub.scale_re(1.0 / p));
            }
        }
        acc
    };
    let res = minimize_with_starts(eval, dof, cfg, &[vec![0.0; dof]]);
    Ok(s_b - res.best_f)
}

pub fn default_n_terms(d_a: usize, d_b: usize) -> usize {
    d_a * d_b
}

/// Entanglement of formation upper bound: ensembles of `n_terms` pure
/// states generated by rank-one POVMs on the canonical purifying ancilla.
/// The spectral ensemble seeds the search.
pub fn entanglement_of_formation(
    s: &PartitionedState,
    n_terms: usize,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let purif = canonical_purification(s)?;
    let dims = purif.psi.dims();
    let (d_a, rank, d_b) = (dims[0], dims[1], dims[2]);
    if n_terms < rank {
        return Err(Error::OutOfRange { name: "n_terms", value: n_terms as f64 });
    }
    let amps = purif.psi.amplitudes();
    let idx = |a: usize, ap: usize, b: usize| (a * rank + ap) * d_b + b;
    let dof = IsometryParams::dof(1, n_terms);
    let eval = |x: &[f64]| -> f64 {
        let mut acc = 0.0;
        for row in povm_rows(rank, n_terms, x) {
            // outcome-conditioned unnormalized pure state on (A, B)
            let mut term = vec![C64::new(0.0, 0.0); d_a * d_b];
            for a in 0..d_a {
                for b in 0..d_b {
                    let mut v = C64::new(0.0, 0.0);
                    for (ap, r) in row.iter().enumerate() {
                        v += r * amps[idx(a, ap, b)];
                    }
                    term[a * d_b + b] = v;
                }
            }
            let p: f64 = term.iter().map(|a| a.norm_sqr()).sum();
            if p > 1e-12 {
                let scale = 1.0 / p.sqrt();
                let normed: Vec<C64> = term.iter().map(|a| a * scale).collect();
                acc += p * spectrum_entropy(&pure_reduction(&normed, &[d_a, d_b], &[0]));
            }
        }
        acc
    };
    let res = minimize_with_starts(eval, dof, cfg, &[vec![0.0; dof]]);
    Ok(res.best_f)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub s_b: f64,
    pub delta_ab: f64,
    pub ihv_ab: f64,
    pub ep_bc: f64,
    pub eof_bc: f64,
    /// I_HV(A>B) - advantage(A>B).
    pub lhs: f64,
    /// E_p(B:C) - E_F(B:C).
    pub rhs: f64,
    pub gap: f64,
}

/// Check I_HV(A>B) - advantage(A>B) = E_p(B:C) - E_F(B:C) on a pure
/// three-party state. The advantage and E_p share one run; I_HV and E_F
/// are estimated by independent measurement optimizations, so the gap
/// reflects genuine optimizer slack.
pub fn residual_identity_check(psi: &PureState, cfg: &OptimizerConfig) -> Result<ResidualReport> {
    if psi.dims().len() != 3 {
        return Err(Error::InvalidSubsystems(format!(
            "residual check needs 3 parties, got {}",
            psi.dims().len()
        )));
    }
    let full = psi.to_state(&["A", "B", "C"]);
    let rho_ab = full.partial_trace(&[0, 1])?;
    let rho_bc = full.partial_trace(&[1, 2])?;
    let s_b = von_neumann_entropy_state(&full.partial_trace(&[1])?);

    let rep = quantum_advantage(&rho_ab, &Cut::bipartite(), &ChannelClass::Global, cfg)?;
    let delta_ab = rep.value;
    let ep_bc = rep.best_objective;

    let d_a = rho_ab.dims()[0];
    let ihv_ab = henderson_vedral(&rho_ab, default_n_outcomes(d_a), cfg)?;
    let eof_bc = entanglement_of_formation(
        &rho_bc,
        default_n_terms(rho_bc.dims()[0], rho_bc.dims()[1]),
        cfg,
    )?;

    let lhs = ihv_ab - delta_ab;
    let rhs = ep_bc - eof_bc;
    Ok(ResidualReport {
        s_b,
        delta_ab,
        ihv_ab,
        ep_bc,
        eof_bc,
        lhs,
        rhs,
        gap: lhs - rhs,
    })
}

/// Closed-form two-qubit entanglement of formation from the concurrence.
pub fn wootters_eof(s: &PartitionedState) -> Result<f64> {
    if s.dims() != [2, 2] {
        return Err(Error::InvalidSubsystems("two qubits required".into()));
    }
    let rho = s.matrix();
    let yy = crate::states::pauli(2).kron(&crate::states::pauli(2));
    let conj = QMatrix::from_fn(4, 4, |r, c| rho[(r, c)].conj());
    let rho_tilde = yy.mul(&conj).mul(&yy);

    let (vals, vecs) = eig_hermitian(rho)?;
    let sqrt_vals: Vec<C64> = vals
        .iter()
        .map(|&v| C64::new(v.max(0.0).sqrt(), 0.0))
        .collect();
    let sqrt_rho = vecs.mul(&QMatrix::diag(&sqrt_vals)).mul(&vecs.dagger());
    let m = sqrt_rho.mul(&rho_tilde).mul(&sqrt_rho).hermitize();
    let (mvals, _) = eig_hermitian(&m)?;
    let mut lambdas: Vec<f64> = mvals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let c = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Sampler;
    use crate::states::{bell_state, werner};

    fn cfg(restarts: usize, iters: usize) -> OptimizerConfig {
        OptimizerConfig {
            restarts,
            max_iters: iters,
            seed: 11,
            ..Default::default()
        }
    }

    fn classically_correlated() -> PartitionedState {
        let m = QMatrix::from_real(
            4,
            4,
            &[0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5],
        );
        PartitionedState::from_labels(vec![2, 2], &["A", "B"], m).unwrap()
    }

    #[test]
    fn canonical_purification_reduces_back() {
        for s in [
            werner(0.5).unwrap().state,
            werner(1.0).unwrap().state,
            classically_correlated(),
        ] {
            let p = canonical_purification(&s).unwrap();
            let red = pure_reduction(p.psi.amplitudes(), p.psi.dims(), &[0, 2]);
            assert!(red.max_diff(s.matrix()) < 1e-10);
        }
        // full-rank input gets a dimension-4 ancilla, pure input a trivial one
        assert_eq!(canonical_purification(&werner(0.5).unwrap().state).unwrap().psi.dims()[1], 4);
        assert_eq!(canonical_purification(&werner(1.0).unwrap().state).unwrap().psi.dims()[1], 1);
    }

    #[test]
    fn ep_of_pure_state_is_entanglement_entropy() {
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        let rep = entanglement_of_purification(&psi0, &cfg(2, 300)).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-6, "E_p {}", rep.value);
    }

    #[test]
    fn ep_of_product_state_is_zero() {
        let m = QMatrix::identity(2)
            .scale_re(0.5)
            .kron(&QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let s = PartitionedState::from_labels(vec![2, 2], &["A", "B"], m).unwrap();
        let rep = entanglement_of_purification(&s, &cfg(2, 300)).unwrap();
        assert!(rep.value < 1e-6, "E_p {}", rep.value);
    }

    #[test]
    fn ep_of_classical_correlations_beats_random_search() {
        let s = classically_correlated();
        let rep = entanglement_of_purification(&s, &cfg(3, 500)).unwrap();
        assert!(rep.value <= 1.0 + 1e-7);
        // brute-force oracle over random purification rotations
        let purif = canonical_purification(&s).unwrap();
        let dims = purif.psi.dims().to_vec();
        let mut sampler = Sampler::new(42);
        let mut oracle = f64::INFINITY;
        for _ in 0..200 {
            let u = sampler.haar_unitary(dims[1]);
            let amps = purif.psi.amplitudes();
            let rank = dims[1];
            // rotate the ancilla only (B' is trivial here)
            let mut rotated = vec![C64::new(0.0, 0.0); amps.len()];
            for a in 0..dims[0] {
                for i in 0..rank {
                    for b in 0..dims[2] {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..rank {
                            acc += u[(i, k)] * amps[(a * rank + k) * dims[2] + b];
                        }
                        rotated[(a * rank + i) * dims[2] + b] = acc;
                    }
                }
            }
            let ent = spectrum_entropy(&pure_reduction(&rotated, &[dims[0], rank, dims[2]], &[0, 1]));
            oracle = oracle.min(ent);
        }
        assert!(rep.value <= oracle + 1e-6, "{} vs oracle {}", rep.value, oracle);
    }

    #[test]
    fn henderson_vedral_reference_values() {
        let c = cfg(2, 400);
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        assert!((henderson_vedral(&psi0, 4, &c).unwrap() - 1.0).abs() < 1e-7);

        let prod = PartitionedState::from_labels(
            vec![2, 2],
            &["A", "B"],
            QMatrix::identity(2)
                .scale_re(0.5)
                .kron(&QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])),
        )
        .unwrap();
        assert!(henderson_vedral(&prod, 4, &c).unwrap().abs() < 1e-7);

        let cc = classically_correlated();
        assert!((henderson_vedral(&cc, 4, &c).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn eof_reference_values() {
        let c = cfg(2, 400);
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        assert!((entanglement_of_formation(&psi0, 2, &c).unwrap() - 1.0).abs() < 1e-7);
        assert!(entanglement_of_formation(&classically_correlated(), 4, &c).unwrap() < 1e-7);
    }

    #[test]
    fn eof_matches_wootters_on_werner() {
        let c = cfg(6, 800);
        for p in [0.5, 0.9] {
            let w = werner(p).unwrap();
            let exact = wootters_eof(&w.state).unwrap();
            let est = entanglement_of_formation(&w.state, 4, &c).unwrap();
            assert!((est - exact).abs() < 2e-3, "p={p}: {est} vs {exact}");
            assert!(est >= exact - 1e-9, "estimate is an upper bound");
        }
    }

    #[test]
    fn wootters_closed_forms() {
        // concurrence of werner(p) is max(0, (3p-1)/2)
        assert!(wootters_eof(&werner(1.0 / 3.0).unwrap().state).unwrap() < 1e-9);
        assert!((wootters_eof(&werner(1.0).unwrap().state).unwrap() - 1.0).abs() < 1e-9);
        assert!(wootters_eof(&classically_correlated()).unwrap() < 1e-9);
    }

    #[test]
    fn monogamy_on_decoupled_states() {
        let c = cfg(2, 300);
        // psi0_{AB} x |0>_C
        let psi = bell_state(0).unwrap().tensor(&PureState::basis(vec![2], &[0]));
        let rep = monogamy_check(&psi, &c).unwrap();
        assert!((rep.s_b - 1.0).abs() < 1e-9);
        assert!((rep.delta_ab - 1.0).abs() < 1e-6);
        assert!(rep.ep_bc.abs() < 1e-6);
        assert!(rep.residual.abs() < 1e-9);
        assert!(rep.independent_residual.abs() < 1e-5);

        // |0>_A x psi0_{BC}
        let psi = PureState::basis(vec![2], &[0]).tensor(&bell_state(0).unwrap());
        let rep = monogamy_check(&psi, &c).unwrap();
        assert!(rep.delta_ab.abs() < 1e-6);
        assert!((rep.ep_bc - 1.0).abs() < 1e-6);
        assert!(rep.residual.abs() < 1e-9);
    }

    #[test]
    fn residual_identity_on_decoupled_state() {
        let c = cfg(2, 300);
        let psi = bell_state(0).unwrap().tensor(&PureState::basis(vec![2], &[0]));
        let rep = residual_identity_check(&psi, &c).unwrap();
        assert!(rep.lhs.abs() < 1e-3, "lhs {}", rep.lhs);
        assert!(rep.rhs.abs() < 1e-3, "rhs {}", rep.rhs);
        assert!(rep.gap.abs() < 1e-3, "gap {}", rep.gap);
    }

    #[test]
    fn ghz_monogamy() {
        let s = 1.0 / 2f64.sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0] = C64::new(s, 0.0);
        amps[7] = C64::new(s, 0.0);
        let psi = PureState::new(vec![2, 2, 2], amps).unwrap();
        let rep = monogamy_check(&psi, &cfg(4, 600)).unwrap();
        assert!((rep.s_b - 1.0).abs() < 1e-9);
        assert!(rep.residual.abs() < 1e-9);
        assert!(rep.independent_residual.abs() < 5e-3, "slack {}", rep.independent_residual);
    }
}
