//! Complex dense linear algebra and entropy primitives.

pub mod entropy;
pub mod matrix;
pub mod sampler;
pub mod state;
pub mod tensor;

pub use entropy::{binary_entropy, entropy_of_spectrum, von_neumann_entropy, von_neumann_entropy_state};
pub use matrix::{eig_hermitian, C64, QMatrix, CLIP_EIG, TOL_EIG, TOL_HERM, TOL_PSD, TOL_TRACE};
pub use sampler::Sampler;
pub use state::{PartitionedState, PureState};
