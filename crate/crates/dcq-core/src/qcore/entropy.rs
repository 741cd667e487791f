//! Von Neumann and binary entropies, in bits (base-2 logarithms; with this
//! choice S(I/2) = 1).

use super::matrix::{eig_hermitian, QMatrix, CLIP_EIG, TOL_PSD, TOL_TRACE};
use super::state::PartitionedState;
use crate::error::{Error, Result};

/// S(rho) = -sum lambda_i log2 lambda_i, eigenvalues below [`CLIP_EIG`]
/// treated as exactly zero. Validates Hermiticity, positivity and trace.
pub fn von_neumann_entropy(m: &QMatrix) -> Result<f64> {
    let (vals, _) = eig_hermitian(m)?;
    if vals[0] < -TOL_PSD {
        return Err(Error::NotPositive(vals[0]));
    }
    let tr: f64 = vals.iter().sum();
    if (tr - 1.0).abs() > TOL_TRACE {
        return Err(Error::InvalidTrace(tr));
    }
    Ok(entropy_of_spectrum(&vals))
}

pub fn von_neumann_entropy_state(s: &PartitionedState) -> f64 {
    // state invariants were validated on construction
    let (vals, _) = super::matrix::eig_hermitian_unchecked(s.matrix());
    entropy_of_spectrum(&vals)
}

/// Entropy of a (sub)normalized spectrum; clips eigensolver noise.
pub fn entropy_of_spectrum(vals: &[f64]) -> f64 {
    -vals
        .iter()
        .filter(|&&v| v > CLIP_EIG)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// Binary entropy H2(x) in bits; H2(0) = H2(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "binary_entropy argument",
            value: x,
        });
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}
