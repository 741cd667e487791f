//! Constructors for the named states used throughout: Bell states, the
//! two-qubit Werner family, the two-sender mixture with a hidden noisy
//! qubit, the parity-chain family, and the Smolin state. Each constructor
//! attaches structural separability certificates backed by explicit
//! product decompositions; no separability is ever decided algorithmically.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qcore::matrix::{C64, QMatrix, TOL_EIG, TOL_PSD, TOL_TRACE};
use crate::qcore::state::{PartitionedState, PureState};
use crate::qcore::tensor;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Pauli matrix sigma_mu, mu in 0..=3 (identity, x, y, z).
pub fn pauli(mu: usize) -> QMatrix {
    match mu {
        0 => QMatrix::identity(2),
        1 => QMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        2 => QMatrix::from_vec(
            2,
            2,
            vec![c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)],
        ),
        3 => QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        _ => panic!("pauli index out of range"),
    }
}

/// |psi_mu> = (sigma_mu x 1)|psi_0>, the Bell basis.
pub fn bell_state(mu: usize) -> Result<PureState> {
    if mu > 3 {
        return Err(Error::OutOfRange {
            name: "bell state index",
            value: mu as f64,
        });
    }
    let s = 1.0 / 2f64.sqrt();
    let psi0 = vec![c(s), c(0.0), c(0.0), c(s)];
    let op = pauli(mu).kron(&QMatrix::identity(2));
    PureState::new(vec![2, 2], op.mul_vec(&psi0))
}

/// One product term of a separability certificate: `prob` times the tensor
/// product of `left` (on the cut's left parties) and `right` (complement).
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub prob: f64,
    pub left: QMatrix,
    pub right: QMatrix,
}

/// A structural separability fact with its explicit decomposition.
///
/// `left_parties` are indices into the parties of the certified target:
/// the full state when `reduction` is `None`, otherwise the reduction to
/// the listed (ascending) parties, with indices re-counted within it.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub description: String,
    pub left_parties: Vec<usize>,
    pub reduction: Option<Vec<usize>>,
    pub terms: Vec<ProductTerm>,
}

impl Certificate {
    /// Target matrix and dims the decomposition must reproduce.
    fn target(&self, state: &PartitionedState) -> Result<(QMatrix, Vec<usize>)> {
        match &self.reduction {
            None => Ok((state.matrix().clone(), state.dims().to_vec())),
            Some(keep) => {
                let red = state.partial_trace(keep)?;
                Ok((red.matrix().clone(), red.dims().to_vec()))
            }
        }
    }

    /// Reassemble the decomposition in the target's party order.
    pub fn assemble(&self, state: &PartitionedState) -> Result<QMatrix> {
        let (_, dims) = self.target(state)?;
        let n = dims.len();
        let right_parties: Vec<usize> =
            (0..n).filter(|i| !self.left_parties.contains(i)).collect();
        // current order after kron: left parties then right parties
        let current: Vec<usize> = self
            .left_parties
            .iter()
            .chain(right_parties.iter())
            .copied()
            .collect();
        let kron_dims: Vec<usize> = current.iter().map(|&i| dims[i]).collect();
        let perm: Vec<usize> = (0..n)
            .map(|orig| current.iter().position(|&x| x == orig).unwrap())
            .collect();
        let total = tensor::total_dim(&dims);
        let mut acc = QMatrix::zeros(total, total);
        for t in &self.terms {
            let prod = t.left.kron(&t.right).scale_re(t.prob);
            let (reordered, _) = tensor::permute_raw(&prod, &kron_dims, &perm);
            acc = acc.add(&reordered);
        }
        Ok(acc)
    }

    /// Check the stored decomposition: probabilities sum to 1, every product
    /// factor is PSD with unit trace, and the mixture reconstructs the
    /// certified target within `TOL_EIG`.
    pub fn verify(&self, state: &PartitionedState) -> Result<()> {
        let psum: f64 = self.terms.iter().map(|t| t.prob).sum();
        if (psum - 1.0).abs() > TOL_TRACE {
            return Err(Error::BadEnsemble(psum));
        }
        for t in &self.terms {
            for factor in [&t.left, &t.right] {
                let tr = factor.trace();
                if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
                    return Err(Error::InvalidTrace(tr.re));
                }
                let (vals, _) = crate::qcore::matrix::eig_hermitian(factor)?;
                if vals[0] < -TOL_PSD {
                    return Err(Error::NotPositive(vals[0]));
                }
            }
        }
        let (target, _) = self.target(state)?;
        let diff = self.assemble(state)?.max_diff(&target);
        if diff > TOL_EIG {
            return Err(Error::Invalid(format!(
                "certificate '{}' reconstruction error {diff:.3e}",
                self.description
            )));
        }
        Ok(())
    }
}

/// A named state with parameters and its structural certificates.
#[derive(Debug, Clone)]
pub struct NamedState {
    pub state: PartitionedState,
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub certificates: Vec<Certificate>,
}

impl NamedState {
    pub fn verify_certificates(&self) -> Result<()> {
        for cert in &self.certificates {
            cert.verify(&self.state)?;
        }
        Ok(())
    }

    /// Certificates about the full state whose cut puts exactly `left` on
    /// one side (either side).
    pub fn full_cut_certificate(&self, left: &[usize]) -> Option<&Certificate> {
        let n = self.state.n_parties();
        self.certificates.iter().find(|cert| {
            cert.reduction.is_none() && {
                let mut l = cert.left_parties.clone();
                l.sort_unstable();
                let mut r: Vec<usize> =
                    (0..n).filter(|i| !cert.left_parties.contains(i)).collect();
                r.sort_unstable();
                let mut q = left.to_vec();
                q.sort_unstable();
                l == q || r == q
            }
        })
    }

    /// Certificate that the reduction to `keep` is separable across
    /// `left` (indices within the reduction).
    pub fn reduction_certificate(&self, keep: &[usize], left: &[usize]) -> Option<&Certificate> {
        self.certificates.iter().find(|cert| {
            cert.reduction.as_deref() == Some(keep) && {
                let m = keep.len();
                let mut l = cert.left_parties.clone();
                l.sort_unstable();
                let mut r: Vec<usize> =
                    (0..m).filter(|i| !cert.left_parties.contains(i)).collect();
                r.sort_unstable();
                let mut q = left.to_vec();
                q.sort_unstable();
                l == q || r == q
            }
        })
    }
}

fn qubit_projector(axis: usize, sign: f64) -> QMatrix {
    // (I + sign * sigma_axis)/2
    QMatrix::identity(2)
        .add(&pauli(axis).scale_re(sign))
        .scale_re(0.5)
}

/// Werner state rho_p = p |psi_0><psi_0| + (1-p) I/4 on parties (A, B).
/// A "separable" certificate with an explicit product decomposition is
/// attached iff p <= 1/3 (the state is entangled for p > 1/3).
pub fn werner(p: f64) -> Result<NamedState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "werner parameter p",
            value: p,
        });
    }
    let psi0 = bell_state(0)?;
    let matrix = psi0
        .projector()
        .scale_re(p)
        .add(&QMatrix::identity(4).scale_re((1.0 - p) / 4.0));
    let state = PartitionedState::from_labels(vec![2, 2], &["A", "B"], matrix)?;

    let mut certificates = Vec::new();
    if p <= 1.0 / 3.0 + 1e-15 {
        // rho_p = 3p * rho_{1/3} + (1-3p) * I/4 with rho_{1/3} an equal
        // mixture of correlated x/z and anti-correlated y product pairs
        let mut terms = Vec::new();
        for (axis, corr) in [(1usize, 1.0), (2, -1.0), (3, 1.0)] {
            for sign in [1.0, -1.0] {
                terms.push(ProductTerm {
                    prob: p / 2.0,
                    left: qubit_projector(axis, sign),
                    right: qubit_projector(axis, corr * sign),
                });
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                terms.push(ProductTerm {
                    prob: (1.0 - 3.0 * p) / 4.0,
                    left: qubit_projector(3, if i == 0 { 1.0 } else { -1.0 }),
                    right: qubit_projector(3, if j == 0 { 1.0 } else { -1.0 }),
                });
            }
        }
        certificates.push(Certificate {
            description: "separable across A:B".into(),
            left_parties: vec![0],
            reduction: None,
            terms,
        });
    }

    Ok(NamedState {
        state,
        name: "werner".into(),
        params: BTreeMap::from([("p".to_string(), p)]),
        certificates,
    })
}

/// Equal mixture of |0>_{A'} psi_0^{AB} and |1>_{A'} psi_1^{AB}, on parties
/// ordered (A, A', B).
pub fn example2_state() -> NamedState {
    let s = 1.0 / 2f64.sqrt();
    // basis order (a, a', b)
    let mut phi0 = vec![c(0.0); 8];
    phi0[0b000] = c(s); // |0 0 0>
    phi0[0b101] = c(s); // |1 0 1>
    let mut phi1 = vec![c(0.0); 8];
    phi1[0b011] = c(s); // |0 1 1>
    phi1[0b110] = c(s); // |1 1 0>
    let matrix = QMatrix::projector(&phi0)
        .add(&QMatrix::projector(&phi1))
        .scale_re(0.5);
    let state = PartitionedState::from_labels(vec![2, 2, 2], &["A", "Ap", "B"], matrix).unwrap();

    let bell = |mu: usize| bell_state(mu).unwrap().projector();
    let basis = |i: usize| qubit_projector(3, if i == 0 { 1.0 } else { -1.0 });
    let certificates = vec![
        Certificate {
            description: "separable across Ap:AB".into(),
            left_parties: vec![1],
            reduction: None,
            terms: vec![
                ProductTerm { prob: 0.5, left: basis(0), right: bell(0) },
                ProductTerm { prob: 0.5, left: basis(1), right: bell(1) },
            ],
        },
        // tr_{A'} rho = (psi_0 + psi_1)/2 = (I x I + X x X)/4, an equal
        // mixture of |+>|+> and |->|->
        Certificate {
            description: "reduction AB separable".into(),
            left_parties: vec![0],
            reduction: Some(vec![0, 2]),
            terms: vec![
                ProductTerm {
                    prob: 0.5,
                    left: qubit_projector(1, 1.0),
                    right: qubit_projector(1, 1.0),
                },
                ProductTerm {
                    prob: 0.5,
                    left: qubit_projector(1, -1.0),
                    right: qubit_projector(1, -1.0),
                },
            ],
        },
    ];

    NamedState {
        state,
        name: "example2".into(),
        params: BTreeMap::new(),
        certificates,
    }
}

/// Bell pair between A1 and B, rotated by sigma_{parity of A2..An}, mixed
/// uniformly over the computational states of A2..An. Parties ordered
/// (A1, ..., An, B).
pub fn parity_chain_state(n: usize) -> Result<NamedState> {
    if !(2..=5).contains(&n) {
        return Err(Error::OutOfRange {
            name: "parity chain sender count n",
            value: n as f64,
        });
    }
    let n_parties = n + 1;
    let dims = vec![2usize; n_parties];
    let total = 1usize << n_parties;
    let weight = 1.0 / (1usize << (n - 1)) as f64;
    let s = 1.0 / 2f64.sqrt();

    // branch pure state for a fixed assignment of (i_2..i_n)
    let branch = |bits: usize| -> Vec<C64> {
        let parity = (bits.count_ones() % 2) as usize;
        let mut amps = vec![c(0.0); total];
        for b in 0..2usize {
            // sigma_0 keeps a1 = b; sigma_1 flips it
            let a1 = b ^ parity;
            let mut idx = a1 << n; // A1 is the most significant qubit
            for j in 0..(n - 1) {
                let ij = (bits >> (n - 2 - j)) & 1;
                idx |= ij << (n - 1 - j);
            }
            idx |= b; // B least significant
            amps[idx] = c(s);
        }
        amps
    };

    let mut matrix = QMatrix::zeros(total, total);
    for bits in 0..(1usize << (n - 1)) {
        matrix = matrix.add(&QMatrix::projector(&branch(bits)).scale_re(weight));
    }
    let labels: Vec<String> = (1..=n)
        .map(|i| format!("A{i}"))
        .chain(std::iter::once("B".to_string()))
        .collect();
    let state = PartitionedState::new(dims.clone(), labels, matrix)?;

    let mut certificates = Vec::new();
    // each of A2..An is classically correlated with the rest
    for j in 1..n {
        // party index j (A_{j+1}); conditional states from the branch sum
        let rest: Vec<usize> = (0..n_parties).filter(|&i| i != j).collect();
        let mut terms = Vec::new();
        for ij in 0..2usize {
            let mut cond = QMatrix::zeros(total / 2, total / 2);
            for bits in 0..(1usize << (n - 1)) {
                if (bits >> (n - 1 - j)) & 1 != ij {
                    continue;
                }
                let amps = branch(bits);
                let (reduced, _) = tensor::partial_trace_raw(
                    &QMatrix::projector(&amps),
                    &dims,
                    &rest,
                );
                cond = cond.add(&reduced);
            }
            let norm = cond.trace().re;
            terms.push(ProductTerm {
                prob: 0.5,
                left: qubit_projector(3, if ij == 0 { 1.0 } else { -1.0 }),
                right: cond.scale_re(1.0 / norm),
            });
        }
        certificates.push(Certificate {
            description: format!("separable across A{}:rest", j + 1),
            left_parties: vec![j],
            reduction: None,
            terms,
        });
    }
    // the A1 B reduction is the equal psi_0/psi_1 mixture
    certificates.push(Certificate {
        description: "reduction A1 B separable".into(),
        left_parties: vec![0],
        reduction: Some(vec![0, n]),
        terms: vec![
            ProductTerm {
                prob: 0.5,
                left: qubit_projector(1, 1.0),
                right: qubit_projector(1, 1.0),
            },
            ProductTerm {
                prob: 0.5,
                left: qubit_projector(1, -1.0),
                right: qubit_projector(1, -1.0),
            },
        ],
    });

    Ok(NamedState {
        state,
        name: "parity_chain".into(),
        params: BTreeMap::from([("n".to_string(), n as f64)]),
        certificates,
    })
}

/// Smolin state (1/4) sum_mu psi_mu^{A1 B} x psi_mu^{A2 A3}, parties
/// ordered (A1, B, A2, A3). Normalized to unit trace.
pub fn smolin_state() -> NamedState {
    let bell = |mu: usize| bell_state(mu).unwrap().projector();
    let mut matrix = QMatrix::zeros(16, 16);
    for mu in 0..4 {
        matrix = matrix.add(&bell(mu).kron(&bell(mu)).scale_re(0.25));
    }
    let state =
        PartitionedState::from_labels(vec![2, 2, 2, 2], &["A1", "B", "A2", "A3"], matrix).unwrap();

    let bell_terms = || -> Vec<ProductTerm> {
        (0..4)
            .map(|mu| ProductTerm {
                prob: 0.25,
                left: bell(mu),
                right: bell(mu),
            })
            .collect()
    };
    let certificates = vec![
        Certificate {
            description: "separable across A1B:A2A3".into(),
            left_parties: vec![0, 1],
            reduction: None,
            terms: bell_terms(),
        },
        // the same Bell-pair decomposition holds across A1A2:BA3 because the
        // state is invariant under qubit permutations
        Certificate {
            description: "separable across A1A2:BA3".into(),
            left_parties: vec![0, 2],
            reduction: None,
            terms: bell_terms(),
        },
    ];

    NamedState {
        state,
        name: "smolin".into(),
        params: BTreeMap::new(),
        certificates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::entropy::von_neumann_entropy_state;
    use crate::qcore::matrix::eig_hermitian;
    use crate::qcore::Sampler;

    #[test]
    fn bell_states_are_an_orthonormal_basis() {
        let states: Vec<PureState> = (0..4).map(|mu| bell_state(mu).unwrap()).collect();
        for i in 0..4 {
            for j in 0..4 {
                let ip = states[i].inner(&states[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip.norm() - expect).abs() < 1e-14, "<{i}|{j}> = {ip}");
            }
        }
        assert!(bell_state(4).is_err());
    }

    #[test]
    fn bell1_amplitudes() {
        let b1 = bell_state(1).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let a = b1.amplitudes();
        assert!((a[1].re - s).abs() < 1e-15 && (a[2].re - s).abs() < 1e-15);
        assert!(a[0].norm() < 1e-15 && a[3].norm() < 1e-15);
    }

    #[test]
    fn werner_limits_and_spectrum() {
        let w1 = werner(1.0).unwrap();
        assert!(w1.state.matrix().max_diff(&bell_state(0).unwrap().projector()) < 1e-14);
        let w0 = werner(0.0).unwrap();
        assert!(w0.state.matrix().max_diff(&QMatrix::identity(4).scale_re(0.25)) < 1e-14);
        assert!(werner(1.2).is_err());

        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let w = werner(p).unwrap();
            let (vals, _) = eig_hermitian(w.state.matrix()).unwrap();
            let mut expect = vec![(1.0 - p) / 4.0; 3];
            expect.push((1.0 + 3.0 * p) / 4.0);
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (v, e) in vals.iter().zip(expect.iter()) {
                assert!((v - e).abs() < TOL_EIG, "p={p}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn werner_certificate_only_when_separable() {
        assert!(!werner(0.2).unwrap().certificates.is_empty());
        assert!(!werner(1.0 / 3.0).unwrap().certificates.is_empty());
        assert!(werner(0.5).unwrap().certificates.is_empty());
        werner(0.2).unwrap().verify_certificates().unwrap();
        werner(1.0 / 3.0).unwrap().verify_certificates().unwrap();
    }

    #[test]
    fn example2_entropies_and_reduction() {
        let e2 = example2_state();
        e2.verify_certificates().unwrap();
        assert!((von_neumann_entropy_state(&e2.state) - 1.0).abs() < 1e-10);
        let rho_b = e2.state.partial_trace(&[2]).unwrap();
        assert!((von_neumann_entropy_state(&rho_b) - 1.0).abs() < 1e-10);
        // tr_{A'} -> equal psi_0 / psi_1 mixture
        let rho_ab = e2.state.partial_trace(&[0, 2]).unwrap();
        let expect = bell_state(0)
            .unwrap()
            .projector()
            .add(&bell_state(1).unwrap().projector())
            .scale_re(0.5);
        assert!(rho_ab.matrix().max_diff(&expect) < 1e-14);
    }

    #[test]
    fn parity_chain_basics() {
        assert!(parity_chain_state(1).is_err());
        assert!(parity_chain_state(6).is_err());
        for n in 2..=4 {
            let pc = parity_chain_state(n).unwrap();
            pc.verify_certificates().unwrap();
            assert!((pc.state.matrix().trace().re - 1.0).abs() < 1e-12);
            let rho_b = pc.state.partial_trace(&[n]).unwrap();
            assert!((von_neumann_entropy_state(&rho_b) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn parity_chain_2_matches_example2_up_to_relabeling() {
        // parity chain order (A1, A2, B) vs example2 order (A, A', B),
        // with A <-> A1 and A' <-> A2
        let pc = parity_chain_state(2).unwrap();
        let e2 = example2_state();
        assert!(pc.state.matrix().max_diff(e2.state.matrix()) < 1e-14);
    }

    #[test]
    fn smolin_reductions_and_swap_invariance() {
        let sm = smolin_state();
        sm.verify_certificates().unwrap();
        assert!((sm.state.matrix().trace().re - 1.0).abs() < 1e-12);
        let rho_b = sm.state.partial_trace(&[1]).unwrap();
        assert!(rho_b.matrix().max_diff(&QMatrix::identity(2).scale_re(0.5)) < 1e-13);
        assert!((von_neumann_entropy_state(&rho_b) - 1.0).abs() < 1e-10);
        // swap (A1,B) <-> (A2,A3)
        let swapped = sm.state.permute(&[2, 3, 0, 1]);
        assert!(swapped.matrix().max_diff(sm.state.matrix()) < 1e-13);
    }

    #[test]
    fn entropy_bounds_on_sampled_states() {
        let mut s = Sampler::new(5);
        for _ in 0..50 {
            let rho = s.random_density(&[2, 2]);
            let ent = von_neumann_entropy_state(&rho);
            assert!((-TOL_EIG..=2.0 + TOL_EIG).contains(&ent));
            // subadditivity
            let sa = von_neumann_entropy_state(&rho.partial_trace(&[0]).unwrap());
            let sb = von_neumann_entropy_state(&rho.partial_trace(&[1]).unwrap());
            assert!(ent <= sa + sb + 10.0 * TOL_EIG);
        }
    }
}
