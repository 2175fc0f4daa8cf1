//! Dense complex linear algebra: Hermitian eigensolves, pseudo-inverses, PSD utilities,
//! tensor products and state distances.

mod distance;
mod linalg;
pub mod random;
mod tensor;
mod types;

pub use distance::{
    binary_entropy, fidelity, power_trace_distance, pure_fidelity, shannon_entropy, state_distance, trace_distance,
    von_neumann_entropy,
};
pub use linalg::{
    commutator, eig_range, expectation, expm_i, frobenius, herm_eig, kernel_split,
    kernel_split_with_floor, orthonormal_complement, pinv, pinv_with_floor, psd_sqrt,
    spectral_map, unitarity_defect, KernelSplit,
};
pub(crate) use linalg::check_psd_spectrum;
pub use tensor::{
    basis_vec, checked_power_dim, collective, embed, tensor_cap_from_env, tensor_power,
    tensor_power_vec, tensor_product, tensor_product_vec, DEFAULT_TENSOR_CAP, TENSOR_CAP_ENV,
};
pub use types::{CMat, CVec, DensityMatrix, HermMatrix, PureState, RMat, ToleranceConfig};
pub(crate) use types::max_abs;
