//! Group actions: generator lists, the exponential map, component representatives,
//! the projective lift, congruence matrices and U(1) period structure.

pub mod builders;
mod ops;
mod rep;
mod u1;

pub use ops::{
    congruence_matrix, iid_generators, lift_projective, product_generators, projected_generators,
};
pub(crate) use ops::is_multiple_of_identity;
pub use rep::{unitary_at, unitary_at_point, GroupPoint, RepPair, Representation};
pub use u1::{u1_symmetry_divisor, SymmetryDivisor, U1Spec};
