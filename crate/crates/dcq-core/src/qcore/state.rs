//! Partitioned density matrices and pure states.

use serde::Serialize;

use super::matrix::{C64, QMatrix, TOL_HERM, TOL_PSD, TOL_TRACE};
use super::matrix::eig_hermitian_unchecked;
use super::tensor;
use crate::error::{Error, Result};

/// A pure state on an ordered list of subsystems.
#[derive(Debug, Clone)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != tensor::total_dim(&dims) {
            return Err(Error::DimensionMismatch {
                expected: tensor::total_dim(&dims),
                got: amplitudes.len(),
            });
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::NotNormalized(norm2));
        }
        let s = 1.0 / norm2.sqrt();
        let amps = amplitudes.iter().map(|a| a * s).collect();
        PureState::new(dims, amps)
    }

    /// Computational basis state |i_0 i_1 ...>.
    pub fn basis(dims: Vec<usize>, indices: &[usize]) -> Self {
        let strides = tensor::strides(&dims);
        let flat: usize = indices.iter().zip(&strides).map(|(i, s)| i * s).sum();
        let mut amps = vec![C64::new(0.0, 0.0); tensor::total_dim(&dims)];
        amps[flat] = C64::new(1.0, 0.0);
        PureState { dims, amplitudes: amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn projector(&self) -> QMatrix {
        QMatrix::projector(&self.amplitudes)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        PureState { dims, amplitudes: amps }
    }

    /// Reorder subsystems; `perm[new_slot] = old_slot`.
    pub fn permute(&self, perm: &[usize]) -> PureState {
        let (amps, dims) = tensor::permute_vec(&self.amplitudes, &self.dims, perm);
        PureState { dims, amplitudes: amps }
    }

    /// Promote to a density matrix with the given party labels.
    pub fn to_state(&self, labels: &[&str]) -> PartitionedState {
        PartitionedState::new(
            self.dims.clone(),
            labels.iter().map(|s| s.to_string()).collect(),
            self.projector(),
        )
        .expect("projector of a unit vector is a valid state")
    }
}

/// A density matrix together with its subsystem dimensions and party labels.
/// Construction validates Hermiticity, unit trace and positivity.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionedState {
    dims: Vec<usize>,
    labels: Vec<String>,
    #[serde(skip)]
    matrix: QMatrix,
}

impl PartitionedState {
    pub fn new(dims: Vec<usize>, labels: Vec<String>, matrix: QMatrix) -> Result<Self> {
        let total = tensor::total_dim(&dims);
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: matrix.rows(),
            });
        }
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: labels.len(),
            });
        }
        let defect = matrix.herm_defect();
        if defect > TOL_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (vals, _) = eig_hermitian_unchecked(&matrix);
        if vals[0] < -TOL_PSD {
            return Err(Error::NotPositive(vals[0]));
        }
        Ok(PartitionedState { dims, labels, matrix })
    }

    pub fn from_labels(dims: Vec<usize>, labels: &[&str], matrix: QMatrix) -> Result<Self> {
        Self::new(dims, labels.iter().map(|s| s.to_string()).collect(), matrix)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn party_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Reduced state on the kept parties (ascending indices).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<PartitionedState> {
        if keep.is_empty()
            || keep.iter().any(|&i| i >= self.dims.len())
            || keep.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidSubsystems(format!("{keep:?}")));
        }
        let (matrix, dims) = tensor::partial_trace_raw(&self.matrix, &self.dims, keep);
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        PartitionedState::new(dims, labels, matrix)
    }

    /// Reorder parties; `perm[new_slot] = old_slot`.
    pub fn permute(&self, perm: &[usize]) -> PartitionedState {
        let (matrix, dims) = tensor::permute_raw(&self.matrix, &self.dims, perm);
        let labels = perm.iter().map(|&o| self.labels[o].clone()).collect();
        PartitionedState { dims, labels, matrix }
    }

    pub fn tensor(&self, other: &PartitionedState) -> PartitionedState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        PartitionedState {
            dims,
            labels,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell0() -> PureState {
        let s = 1.0 / 2f64.sqrt();
        PureState::new(
            vec![2, 2],
            vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let st = bell0().to_state(&["A", "B"]);
        let red = st.partial_trace(&[1]).unwrap();
        assert!(red.matrix().max_diff(&QMatrix::identity(2).scale_re(0.5)) < 1e-14);
    }

    #[test]
    fn invalid_keep_set_rejected() {
        let st = bell0().to_state(&["A", "B"]);
        assert!(st.partial_trace(&[]).is_err());
        assert!(st.partial_trace(&[2]).is_err());
        assert!(st.partial_trace(&[1, 1]).is_err());
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let not_herm = QMatrix::from_real(2, 2, &[0.5, 0.3, 0.0, 0.5]);
        assert!(PartitionedState::from_labels(vec![2], &["A"], not_herm).is_err());
        let bad_trace = QMatrix::identity(2);
        assert!(PartitionedState::from_labels(vec![2], &["A"], bad_trace).is_err());
        let not_psd = QMatrix::diag(&[C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        assert!(PartitionedState::from_labels(vec![2], &["A"], not_psd).is_err());
    }
}
