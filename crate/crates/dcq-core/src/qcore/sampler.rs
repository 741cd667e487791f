//! Deterministic seeded randomness: Haar unitaries, random pure states and
//! random density matrices. Same seed, same stream, bit for bit. One
//! instance per worker; never shared.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{C64, QMatrix};
use super::state::{PartitionedState, PureState};
use super::tensor;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn real_vec(&mut self, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| scale * self.normal()).collect()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Ginibre matrix with i.i.d. standard complex normal entries.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> QMatrix {
        let data = (0..rows * cols).map(|_| self.complex_normal()).collect();
        QMatrix::from_vec(rows, cols, data)
    }

    /// Haar-random unitary via QR of a Ginibre matrix, with the R-diagonal
    /// phase correction that makes the distribution uniform.
    pub fn haar_unitary(&mut self, d: usize) -> QMatrix {
        let g = self.ginibre(d, d);
        // modified Gram-Schmidt on columns
        let mut q: Vec<Vec<C64>> = (0..d)
            .map(|j| (0..d).map(|i| g[(i, j)]).collect())
            .collect();
        let mut u = QMatrix::zeros(d, d);
        for j in 0..d {
            for k in 0..j {
                let proj: C64 = (0..d).map(|i| u[(i, k)].conj() * q[j][i]).sum();
                for i in 0..d {
                    let s = u[(i, k)];
                    q[j][i] -= proj * s;
                }
            }
            let norm: f64 = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            // r_jj phase: Gram-Schmidt already yields r_jj = norm > 0, so the
            // phase correction is a free extra rotation drawn uniformly
            let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.uniform());
            for i in 0..d {
                u[(i, j)] = q[j][i] / norm * phase;
            }
        }
        u
    }

    pub fn random_pure(&mut self, dims: &[usize]) -> PureState {
        let n = tensor::total_dim(dims);
        let amps: Vec<C64> = (0..n).map(|_| self.complex_normal()).collect();
        PureState::normalized(dims.to_vec(), amps).expect("nonzero Gaussian vector")
    }

    /// Hilbert-Schmidt-distributed density matrix G G^dag / Tr.
    pub fn random_density(&mut self, dims: &[usize]) -> PartitionedState {
        let n = tensor::total_dim(dims);
        let g = self.ginibre(n, n);
        let m = g.mul(&g.dagger());
        let tr = m.trace().re;
        let labels: Vec<String> = (0..dims.len()).map(|i| format!("P{i}")).collect();
        PartitionedState::new(dims.to_vec(), labels, m.scale_re(1.0 / tr))
            .expect("normalized Wishart matrix is a valid state")
    }
}
