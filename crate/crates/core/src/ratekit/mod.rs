//! Conversion rates from the PSD pencil of asymmetry tensors, the symmetry-subgroup
//! gate, and distillation, cost and thermodynamic bounds.

mod bounds;
mod pencil;
mod rate;
mod sym;

pub use bounds::{
    average_qgt, cost_bound, distillable_bound, matrix_order, min_entropy_rate, thermo_bounds,
    vanishing_distillable_check, CostBound, MatrixOrder, ThermoBounds, VanishingCheck,
};
pub use pencil::{
    dmax, sample_ratio_upper, sup_ratio, sup_ratio_oracle, sup_ratio_with_floor, BisectionConfig,
    PencilMethod,
    PencilResult,
};
pub use rate::{
    component_pencils, conversion_rate, reversibility_check, RateOptions, RateReport,
    Reversibility, PROPORTIONALITY_TOL,
};
pub use sym::{sym_check, SymOptions, SymVerdict, Verdict, Witness};
