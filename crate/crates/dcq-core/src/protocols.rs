//! The concrete encoding protocols for the named states, compiled to
//! candidate channels, plus samplers for random channels and feedback
//! protocols used by the invariant suites.

use crate::advantage::CandidateChannel;
use crate::channels::{
    channel_from_params, feedback_to_channel, product_channel, FeedbackProtocol, IsometryParams,
    KrausChannel,
};
use crate::error::Result;
use crate::qcore::matrix::{C64, QMatrix};
use crate::qcore::Sampler;
use crate::states::{bell_state, pauli};

/// Computational-basis measurement on `n_qubits` with the measured qubits
/// reset to |0...0>; Kraus index = observed bit string.
pub fn measure_reset_channel(n_qubits: usize) -> KrausChannel {
    let d = 1usize << n_qubits;
    let kraus = (0..d)
        .map(|bits| {
            QMatrix::from_fn(d, d, |r, c| {
                if r == 0 && c == bits {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    KrausChannel::new(d, d, kraus).expect("reset measurement is trace preserving")
}

/// Feedback encoding for the parity-chain family with senders
/// (A1, ..., An): A2..An measure in the computational basis and reset,
/// A1 applies sigma_x to the parity of the outcomes. The candidate acts on
/// parties [1..n-1, 0] (measured group first).
pub fn parity_chain_candidate(n: usize) -> Result<CandidateChannel> {
    let measured = n - 1;
    let measurement = measure_reset_channel(measured);
    let conditionals: Vec<KrausChannel> = (0..(1usize << measured))
        .map(|bits| {
            let mu = if bits.count_ones() % 2 == 1 { 1 } else { 0 };
            KrausChannel::unitary(&pauli(mu)).expect("Pauli is unitary")
        })
        .collect();
    let proto = FeedbackProtocol {
        measuring: 1,
        measurement,
        conditionals,
    };
    let groups: Vec<Vec<usize>> = vec![vec![0], (1..n).collect()];
    let (channel, slots) = feedback_to_channel(&proto, &vec![2; n], &groups)?;
    Ok(CandidateChannel {
        label: "measure-parity-and-correct".into(),
        channel,
        parties: slots,
    })
}

/// The two-sender special case: the hidden qubit measures and resets, the
/// other applies the outcome-conditioned sigma_x.
pub fn example2_candidate() -> Result<CandidateChannel> {
    parity_chain_candidate(2)
}

/// Global encoding for the Smolin state: Bell measurement on A2 A3, Pauli
/// correction on A1, measured pair reset to |00>. The candidate acts on
/// parties (A1, A2, A3) = (0, 2, 3).
pub fn smolin_candidate() -> Result<CandidateChannel> {
    let reset = QMatrix::from_fn(4, 1, |r, _| {
        if r == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let kraus = (0..4)
        .map(|mu| {
            let bra: Vec<C64> = bell_state(mu)
                .expect("mu in range")
                .amplitudes()
                .iter()
                .map(|a| a.conj())
                .collect();
            let proj_out = reset.mul(&QMatrix::from_vec(1, 4, bra));
            pauli(mu).kron(&proj_out)
        })
        .collect();
    let channel = KrausChannel::new(8, 8, kraus)?;
    Ok(CandidateChannel {
        label: "bell-measure-and-correct".into(),
        channel,
        parties: vec![0, 2, 3],
    })
}

/// A channel drawn from the smooth parametrization with a Gaussian
/// generator.
pub fn random_channel(s: &mut Sampler, d_in: usize, d_out: usize, k: usize) -> KrausChannel {
    let generator = s.real_vec(IsometryParams::dof(d_out, k), 1.0);
    channel_from_params(&IsometryParams { d_in, d_out, k, generator })
}

/// A product of independent random channels, one per listed dimension,
/// each with the full Stinespring headroom of its factor.
pub fn random_product_channel(s: &mut Sampler, dims: &[usize]) -> KrausChannel {
    let chans: Vec<KrausChannel> = dims
        .iter()
        .map(|&d| random_channel(s, d, d * d, d))
        .collect();
    product_channel(&chans).expect("nonempty factor list")
}

/// A random one-round feedback protocol on qudit groups of the listed
/// dimensions, compiled to a channel. Returns the channel and the group
/// order it expects (measuring group first).
pub fn random_feedback_channel(
    s: &mut Sampler,
    dims: &[usize],
    measuring: usize,
) -> Result<(KrausChannel, Vec<usize>)> {
    let d_m = dims[measuring];
    let measurement = random_channel(s, d_m, d_m, d_m);
    let rest: Vec<usize> = (0..dims.len()).filter(|&g| g != measuring).collect();
    let conditionals: Vec<KrausChannel> = (0..measurement.kraus().len())
        .map(|_| {
            let chans: Vec<KrausChannel> =
                rest.iter().map(|&g| random_channel(s, dims[g], dims[g], 2)).collect();
            product_channel(&chans).expect("nonempty factor list")
        })
        .collect();
    let proto = FeedbackProtocol { measuring, measurement, conditionals };
    let groups: Vec<Vec<usize>> = (0..dims.len()).map(|g| vec![g]).collect();
    feedback_to_channel(&proto, dims, &groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::apply_to_parties;
    use crate::qcore::entropy::von_neumann_entropy_state;
    use crate::qcore::matrix::TOL_EIG;
    use crate::states::{example2_state, parity_chain_state, smolin_state};

    #[test]
    fn example2_protocol_recovers_bell_pair() {
        let e2 = example2_state();
        let cand = example2_candidate().unwrap();
        assert!(cand.channel.tp_defect() < TOL_EIG);
        // state parties (A, Ap, B); candidate measures Ap first
        assert_eq!(cand.parties, vec![1, 0]);
        let out = apply_to_parties(&cand.channel, &e2.state, &cand.parties).unwrap();
        assert!(von_neumann_entropy_state(&out) < 1e-10);
        // merged output order (Ap, A), then B: |0><0| x psi_0
        let expect = QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])
            .kron(&bell_state(0).unwrap().projector());
        assert!(out.matrix().max_diff(&expect) < 1e-12);
    }

    #[test]
    fn parity_chain_protocol_zeroes_entropy() {
        for n in 2..=4 {
            let pc = parity_chain_state(n).unwrap();
            let cand = parity_chain_candidate(n).unwrap();
            let out = apply_to_parties(&cand.channel, &pc.state, &cand.parties).unwrap();
            assert!(von_neumann_entropy_state(&out) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn smolin_protocol_zeroes_entropy() {
        let sm = smolin_state();
        let cand = smolin_candidate().unwrap();
        assert!(cand.channel.tp_defect() < TOL_EIG);
        let out = apply_to_parties(&cand.channel, &sm.state, &cand.parties).unwrap();
        assert!(von_neumann_entropy_state(&out) < 1e-10);
    }

    #[test]
    fn sampled_product_channels_cannot_beat_parity_chain() {
        let pc = parity_chain_state(3).unwrap();
        let s_b = 1.0;
        let mut s = Sampler::new(17);
        for _ in 0..50 {
            let ch = random_product_channel(&mut s, &[2, 2, 2]);
            let out = apply_to_parties(&ch, &pc.state, &[0, 1, 2]).unwrap();
            let i_prime = s_b - von_neumann_entropy_state(&out);
            assert!(i_prime <= 1e-6, "I' = {i_prime}");
        }
    }

    #[test]
    fn sampled_feedback_cannot_beat_smolin() {
        let sm = smolin_state();
        let mut s = Sampler::new(23);
        for trial in 0..30 {
            let measuring = trial % 3;
            let (ch, order) = random_feedback_channel(&mut s, &[2, 2, 2], measuring).unwrap();
            // group g of the sender list (A1, A2, A3) is party [0, 2, 3][g]
            let parties: Vec<usize> = order.iter().map(|&g| [0, 2, 3][g]).collect();
            let out = apply_to_parties(&ch, &sm.state, &parties).unwrap();
            let i_prime = 1.0 - von_neumann_entropy_state(&out);
            assert!(i_prime <= 1e-6, "I' = {i_prime}");
        }
    }
}
