//! CPTP maps in Kraus form, the smooth isometry parametrization used by the
//! optimizers, and the encoding constructions: substitution, orthogonal
//! Weyl unitaries, product channels, and one-round measure-and-feedback
//! protocols compiled to a single channel on the sender space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::matrix::{eig_hermitian_unchecked, C64, QMatrix, TOL_EIG};
use crate::qcore::state::{PartitionedState, PureState};
use crate::qcore::tensor;

/// A CPTP map as a finite list of Kraus operators, each `d_out x d_in`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<QMatrix>,
}

impl KrausChannel {
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<QMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Invalid("channel needs at least one Kraus operator".into()));
        }
        for k in &kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::DimensionMismatch {
                    expected: d_out * d_in,
                    got: k.rows() * k.cols(),
                });
            }
        }
        let ch = KrausChannel { d_in, d_out, kraus };
        let defect = ch.tp_defect();
        if defect > TOL_EIG {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel {
            d_in: d,
            d_out: d,
            kraus: vec![QMatrix::identity(d)],
        }
    }

    pub fn unitary(u: &QMatrix) -> Result<Self> {
        KrausChannel::new(u.cols(), u.rows(), vec![u.clone()])
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[QMatrix] {
        &self.kraus
    }

    /// Deviation of sum_i K_i^dag K_i from the identity.
    pub fn tp_defect(&self) -> f64 {
        let mut acc = QMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            acc = acc.add(&k.dagger().mul(k));
        }
        acc.max_diff(&QMatrix::identity(self.d_in))
    }

    /// Apply to a bare operator on the input space.
    pub fn apply_matrix(&self, x: &QMatrix) -> QMatrix {
        let mut out = QMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = out.add(&k.mul(x).mul(&k.dagger()));
        }
        out
    }
}

/// The encoding-operation regime on the sender side. The partition lists
/// sender parties grouped into local units (state party indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChannelClass {
    Global,
    LocalProduct { partition: Vec<Vec<usize>> },
    OneWayFeedback { partition: Vec<Vec<usize>> },
}

impl ChannelClass {
    pub fn label(&self) -> &'static str {
        match self {
            ChannelClass::Global => "global",
            ChannelClass::LocalProduct { .. } => "local-product",
            ChannelClass::OneWayFeedback { .. } => "feedback",
        }
    }

    pub fn partition(&self) -> Option<&[Vec<usize>]> {
        match self {
            ChannelClass::Global => None,
            ChannelClass::LocalProduct { partition } | ChannelClass::OneWayFeedback { partition } => {
                Some(partition)
            }
        }
    }

    /// The partition must cover the sender parties exactly, disjointly.
    pub fn validate(&self, senders: &[usize]) -> Result<()> {
        if let Some(groups) = self.partition() {
            let mut seen: Vec<usize> = groups.iter().flatten().copied().collect();
            seen.sort_unstable();
            let mut expect = senders.to_vec();
            expect.sort_unstable();
            if seen != expect || groups.iter().any(|g| g.is_empty()) {
                return Err(Error::InvalidCut(format!(
                    "partition {groups:?} does not cover senders {senders:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Search coordinates for a channel with at most `k` Kraus operators:
/// a real vector generating a skew-Hermitian matrix G on the
/// (d_out * k)-dimensional Stinespring space; the isometry is
/// V = exp(G) E with E the canonical embedding of the input space.
#[derive(Debug, Clone, Serialize)]
pub struct IsometryParams {
    pub d_in: usize,
    pub d_out: usize,
    pub k: usize,
    pub generator: Vec<f64>,
}

impl IsometryParams {
    /// Number of real coordinates: the Stinespring space dimension squared,
    /// twice (real and imaginary parts).
    pub fn dof(d_out: usize, k: usize) -> usize {
        2 * (d_out * k) * (d_out * k)
    }

    pub fn zero(d_in: usize, d_out: usize, k: usize) -> Self {
        IsometryParams {
            d_in,
            d_out,
            k,
            generator: vec![0.0; Self::dof(d_out, k)],
        }
    }

    pub fn from_vec(d_in: usize, d_out: usize, k: usize, generator: Vec<f64>) -> Result<Self> {
        if generator.len() != Self::dof(d_out, k) {
            return Err(Error::DimensionMismatch {
                expected: Self::dof(d_out, k),
                got: generator.len(),
            });
        }
        Ok(IsometryParams { d_in, d_out, k, generator })
    }

    /// The realized isometry V: input -> output (x) index space.
    pub fn isometry(&self) -> QMatrix {
        let d = self.d_out * self.k;
        let raw = QMatrix::from_fn(d, d, |r, c| {
            C64::new(self.generator[2 * (r * d + c)], self.generator[2 * (r * d + c) + 1])
        });
        // skew-Hermitian part, exponentiated through the spectrum of iG
        let g = raw.sub(&raw.dagger()).scale_re(0.5);
        let h = g.scale(C64::new(0.0, 1.0)); // Hermitian
        let (vals, vecs) = eig_hermitian_unchecked(&h);
        let phases: Vec<C64> = vals.iter().map(|&v| C64::from_polar(1.0, -v)).collect();
        let u = vecs.mul(&QMatrix::diag(&phases)).mul(&vecs.dagger());
        // canonical embedding: first d_in columns
        QMatrix::from_fn(d, self.d_in, |r, c| u[(r, c)])
    }
}

/// Stinespring-style realization: A_i = (I_{d_out} x <i|) V.
pub fn channel_from_params(p: &IsometryParams) -> KrausChannel {
    let v = p.isometry();
    let kraus = (0..p.k)
        .map(|i| QMatrix::from_fn(p.d_out, p.d_in, |r, c| v[(r * p.k + i, c)]))
        .collect();
    KrausChannel {
        d_in: p.d_in,
        d_out: p.d_out,
        kraus,
    }
}

/// Replace the input with a fresh pure state: Lambda[X] = Tr(X) |psi><psi|.
pub fn substitution_channel(d_in: usize, target: &PureState) -> KrausChannel {
    let amps = target.amplitudes();
    let d_out = amps.len();
    let kraus = (0..d_in)
        .map(|j| QMatrix::from_fn(d_out, d_in, |r, c| if c == j { amps[r] } else { C64::new(0.0, 0.0) }))
        .collect();
    KrausChannel { d_in, d_out, kraus }
}

/// The d^2 shift-and-phase unitaries U_{(a,b)} = X^a Z^b. They are
/// pairwise orthogonal, Tr(U_i^dag U_j) = d delta_ij, and averaging
/// U X U^dag over the family depolarizes: (1/d) sum_i U_i X U_i^dag =
/// Tr(X) I.
pub fn weyl_ensemble(d: usize) -> Vec<QMatrix> {
    assert!(d >= 2);
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(QMatrix::from_fn(d, d, |r, c| {
                if r == (c + a) % d {
                    C64::from_polar(1.0, omega * (b * c) as f64)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    out
}

/// Tensor product of channels; Kraus set is all products of component
/// Kraus operators.
pub fn product_channel(channels: &[KrausChannel]) -> Result<KrausChannel> {
    let first = channels
        .first()
        .ok_or_else(|| Error::Invalid("product of zero channels".into()))?;
    let mut d_in = first.d_in;
    let mut d_out = first.d_out;
    let mut kraus = first.kraus.clone();
    for ch in &channels[1..] {
        let mut next = Vec::with_capacity(kraus.len() * ch.kraus.len());
        for a in &kraus {
            for b in &ch.kraus {
                next.push(a.kron(b));
            }
        }
        kraus = next;
        d_in *= ch.d_in;
        d_out *= ch.d_out;
    }
    Ok(KrausChannel { d_in, d_out, kraus })
}

/// One-round one-way LOCC on the sender side: one party measures (each
/// measurement Kraus operator is one classical outcome), broadcasts the
/// outcome, and the remaining parties apply outcome-conditioned channels.
#[derive(Debug, Clone)]
pub struct FeedbackProtocol {
    /// Index into the sender-group list of the measuring group.
    pub measuring: usize,
    /// Channel on the measuring group; Kraus index = classical outcome.
    pub measurement: KrausChannel,
    /// Per-outcome channels on the remaining groups (ascending order),
    /// typically built with [`product_channel`].
    pub conditionals: Vec<KrausChannel>,
}

impl FeedbackProtocol {
    fn validate(&self) -> Result<()> {
        if self.conditionals.len() != self.measurement.kraus.len() {
            return Err(Error::ProtocolMismatch(format!(
                "{} outcomes but {} conditional channels",
                self.measurement.kraus.len(),
                self.conditionals.len()
            )));
        }
        let (d_in, d_out) = (self.conditionals[0].d_in, self.conditionals[0].d_out);
        for ch in &self.conditionals {
            if ch.d_in != d_in || ch.d_out != d_out {
                return Err(Error::ProtocolMismatch(
                    "conditional channels disagree on dimensions".into(),
                ));
            }
            let defect = ch.tp_defect();
            if defect > TOL_EIG {
                return Err(Error::NotTracePreserving(defect));
            }
        }
        Ok(())
    }
}

/// Compile a feedback protocol into a single CPTP map on the whole sender
/// space. `sender_dims` lists the dimensions of the sender parties in
/// state order; `groups` partitions their slots (the protocol's measuring
/// index refers to this list). Classical outcomes are carried implicitly
/// by the Kraus-index block structure.
///
/// The returned channel's input factorization is [measuring group slots,
/// remaining slots]; the second return value is that slot order, to be
/// passed through to [`apply_to_parties`].
pub fn feedback_to_channel(
    f: &FeedbackProtocol,
    sender_dims: &[usize],
    groups: &[Vec<usize>],
) -> Result<(KrausChannel, Vec<usize>)> {
    f.validate()?;
    if f.measuring >= groups.len() {
        return Err(Error::ProtocolMismatch(format!(
            "measuring group {} out of {} groups",
            f.measuring,
            groups.len()
        )));
    }
    // slots of the measuring group first, then the rest, both flattened
    let meas_slots: Vec<usize> = groups[f.measuring].clone();
    let rest_slots: Vec<usize> = groups
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != f.measuring)
        .flat_map(|(_, g)| g.iter().copied())
        .collect();
    let d_meas: usize = meas_slots.iter().map(|&s| sender_dims[s]).product();
    let d_rest: usize = rest_slots.iter().map(|&s| sender_dims[s]).product();
    if f.measurement.d_in != d_meas || f.conditionals[0].d_in != d_rest {
        return Err(Error::ProtocolMismatch(format!(
            "measurement d_in {} vs group dim {d_meas}, conditional d_in {} vs rest dim {d_rest}",
            f.measurement.d_in, f.conditionals[0].d_in
        )));
    }

    let mut kraus = Vec::new();
    for (outcome, m_k) in f.measurement.kraus.iter().enumerate() {
        for c_m in &f.conditionals[outcome].kraus {
            kraus.push(m_k.kron(c_m));
        }
    }
    let order: Vec<usize> = meas_slots.iter().chain(rest_slots.iter()).copied().collect();
    let ch = KrausChannel::new(d_meas * d_rest, f.measurement.d_out * f.conditionals[0].d_out, kraus)?;
    Ok((ch, order))
}

/// Apply a channel to the listed parties of a state. `parties` are
/// distinct state party indices in the order matching the channel's
/// input factorization; the acted parties are replaced by a single merged
/// output party at the position of the lowest acted index. The reduction
/// on untouched parties is unchanged.
pub fn apply_to_parties(
    c: &KrausChannel,
    s: &PartitionedState,
    parties: &[usize],
) -> Result<PartitionedState> {
    let n = s.n_parties();
    if parties.is_empty()
        || parties.iter().any(|&p| p >= n)
        || (1..parties.len()).any(|i| parties[i..].contains(&parties[i - 1]))
    {
        return Err(Error::InvalidSubsystems(format!("{parties:?}")));
    }
    let acted_dim: usize = parties.iter().map(|&p| s.dims()[p]).product();
    if acted_dim != c.d_in {
        return Err(Error::DimensionMismatch {
            expected: c.d_in,
            got: acted_dim,
        });
    }
    let rest: Vec<usize> = (0..n).filter(|i| !parties.contains(i)).collect();
    let front_order: Vec<usize> = parties.iter().chain(rest.iter()).copied().collect();
    let fronted = s.permute(&front_order);
    let d_rest: usize = rest.iter().map(|&p| s.dims()[p]).product();

    let mut out = QMatrix::zeros(c.d_out * d_rest, c.d_out * d_rest);
    let i_rest = QMatrix::identity(d_rest);
    for k in &c.kraus {
        let k_full = k.kron(&i_rest);
        out = out.add(&k_full.mul(fronted.matrix()).mul(&k_full.dagger()));
    }

    // dims after application, in fronted order: [d_out, rest...]
    let mut dims = vec![c.d_out];
    dims.extend(rest.iter().map(|&p| s.dims()[p]));
    let merged_label = parties
        .iter()
        .map(|&p| s.labels()[p].as_str())
        .collect::<Vec<_>>()
        .join("+");
    let mut labels = vec![merged_label];
    labels.extend(rest.iter().map(|&p| s.labels()[p].clone()));

    // move the merged party to the slot of the lowest acted index
    let insert_at = rest.iter().filter(|&&r| r < *parties.iter().min().unwrap()).count();
    let mut perm: Vec<usize> = (1..=rest.len()).collect();
    perm.insert(insert_at, 0);
    let (matrix, dims) = tensor::permute_raw(&out, &dims, &perm);
    let labels: Vec<String> = perm.iter().map(|&i| labels[i].clone()).collect();
    PartitionedState::new(dims, labels, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::entropy::von_neumann_entropy_state;
    use crate::qcore::Sampler;
    use crate::states::bell_state;

    fn sampled_params(s: &mut Sampler, d_in: usize, d_out: usize, k: usize) -> IsometryParams {
        IsometryParams {
            d_in,
            d_out,
            k,
            generator: s.real_vec(IsometryParams::dof(d_out, k), 1.0),
        }
    }

    #[test]
    fn zero_generator_is_identity_channel() {
        let ch = channel_from_params(&IsometryParams::zero(3, 3, 1));
        assert_eq!(ch.kraus().len(), 1);
        assert!(ch.kraus()[0].max_diff(&QMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn sampled_params_give_trace_preserving_channels() {
        let mut s = Sampler::new(2);
        for _ in 0..50 {
            let ch = channel_from_params(&sampled_params(&mut s, 2, 4, 2));
            assert!(ch.tp_defect() < TOL_EIG);
        }
    }

    #[test]
    fn isometric_channels_preserve_entropy() {
        // k = 1 realizes exactly the isometric channels
        let mut s = Sampler::new(9);
        for _ in 0..10 {
            let ch = channel_from_params(&sampled_params(&mut s, 2, 3, 1));
            let rho = s.random_density(&[2, 2]);
            let out = apply_to_parties(&ch, &rho, &[0]).unwrap();
            let before = von_neumann_entropy_state(&rho);
            let after = von_neumann_entropy_state(&out);
            assert!((before - after).abs() < 1e-9);
        }
    }

    #[test]
    fn substitution_channel_outputs_target() {
        let target = bell_state(0).unwrap();
        let ch = substitution_channel(3, &target);
        assert!(ch.tp_defect() < 1e-12);
        let mut s = Sampler::new(4);
        let rho = s.random_density(&[3]);
        let out = ch.apply_matrix(rho.matrix());
        assert!(out.max_diff(&target.projector()) < 1e-12);
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut s = Sampler::new(6);
        let rho = s.random_density(&[2, 2]);
        let out = apply_to_parties(&KrausChannel::identity(2), &rho, &[0]).unwrap();
        assert!(out.matrix().max_diff(rho.matrix()) < 1e-13);
    }

    #[test]
    fn substitution_on_a_factorizes_bell() {
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        let target = PureState::basis(vec![2], &[0]);
        let ch = substitution_channel(2, &target);
        let out = apply_to_parties(&ch, &psi0, &[0]).unwrap();
        let expect = target.projector().kron(&QMatrix::identity(2).scale_re(0.5));
        assert!(out.matrix().max_diff(&expect) < 1e-13);
    }

    #[test]
    fn receiver_reduction_untouched_by_sender_channels() {
        let psi0 = bell_state(0).unwrap().to_state(&["A", "B"]);
        let mut s = Sampler::new(12);
        for _ in 0..100 {
            let ch = channel_from_params(&sampled_params(&mut s, 2, 4, 2));
            let out = apply_to_parties(&ch, &psi0, &[0]).unwrap();
            let red = out.partial_trace(&[1]).unwrap();
            assert!(red.matrix().max_diff(&QMatrix::identity(2).scale_re(0.5)) < TOL_EIG);
        }
    }

    #[test]
    fn weyl_gram_orthogonality_and_depolarization() {
        for d in [2usize, 3, 4] {
            let us = weyl_ensemble(d);
            assert_eq!(us.len(), d * d);
            for (i, a) in us.iter().enumerate() {
                for (j, b) in us.iter().enumerate() {
                    let g = a.dagger().mul(b).trace();
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!((g.norm() - expect).abs() < TOL_EIG, "d={d} Tr(U{i}^ U{j})={g}");
                }
            }
            let mut s = Sampler::new(d as u64);
            let x = s.ginibre(d, d);
            let mut acc = QMatrix::zeros(d, d);
            for u in &us {
                acc = acc.add(&u.mul(&x).mul(&u.dagger()));
            }
            let avg = acc.scale_re(1.0 / d as f64);
            let expect = QMatrix::identity(d).scale(x.trace());
            assert!(avg.max_diff(&expect) < TOL_EIG);
        }
    }

    #[test]
    fn weyl_d2_maps_bell_to_bell_basis() {
        let psi0 = bell_state(0).unwrap();
        let us = weyl_ensemble(2);
        // resulting projectors are exactly the four Bell projectors
        let mut found = [false; 4];
        for u in &us {
            let op = u.kron(&QMatrix::identity(2));
            let amps = op.mul_vec(psi0.amplitudes());
            let proj = QMatrix::projector(&amps);
            for (mu, hit) in found.iter_mut().enumerate() {
                if proj.max_diff(&bell_state(mu).unwrap().projector()) < 1e-12 {
                    *hit = true;
                }
            }
        }
        assert!(found.iter().all(|&f| f));
    }

    #[test]
    fn product_channel_structure() {
        let ids = [KrausChannel::identity(2), KrausChannel::identity(3)];
        let prod = product_channel(&ids).unwrap();
        assert_eq!((prod.d_in(), prod.d_out()), (6, 6));
        assert!(prod.kraus()[0].max_diff(&QMatrix::identity(6)) < 1e-14);

        let t0 = PureState::basis(vec![2], &[0]);
        let t1 = PureState::basis(vec![2], &[1]);
        let subs = [substitution_channel(2, &t0), substitution_channel(2, &t1)];
        let prod = product_channel(&subs).unwrap();
        assert_eq!(prod.kraus().len(), 4);
        let mut s = Sampler::new(8);
        let rho = s.random_density(&[4]);
        let out = prod.apply_matrix(rho.matrix());
        assert!(out.max_diff(&t0.tensor(&t1).projector()) < 1e-12);
    }

    #[test]
    fn trivial_feedback_is_identity() {
        let f = FeedbackProtocol {
            measuring: 0,
            measurement: KrausChannel::identity(2),
            conditionals: vec![KrausChannel::identity(2)],
        };
        let (ch, order) = feedback_to_channel(&f, &[2, 2], &[vec![0], vec![1]]).unwrap();
        assert_eq!(order, vec![0, 1]);
        let mut s = Sampler::new(10);
        let rho = s.random_density(&[4]);
        assert!(ch.apply_matrix(rho.matrix()).max_diff(rho.matrix()) < 1e-13);
    }

    #[test]
    fn feedback_outcome_count_mismatch_rejected() {
        let f = FeedbackProtocol {
            measuring: 0,
            measurement: KrausChannel::identity(2),
            conditionals: vec![KrausChannel::identity(2), KrausChannel::identity(2)],
        };
        assert!(feedback_to_channel(&f, &[2, 2], &[vec![0], vec![1]]).is_err());
    }
}
