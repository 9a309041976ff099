//! Entropy numbers of `id: l^n_{1,inf} -> l^n_1`: coding-set families,
//! the layered packing that gives the lower bound for `k <= n`, bound
//! curves over `k`, and greedy nets for empirical covering estimates.

pub mod bounds;
pub mod code;
pub mod net;
pub mod packing;

pub use bounds::{
    calibrate, entropy_bound_curve, entropy_bound_curve_with, packing_lower_bound, support_size,
    BoundPoint, Calibration, EntropyBoundCurve, LowerSource, FROZEN_C1, FROZEN_C2,
};
pub use code::{
    code_target, construct_code, construct_code_with_budget, CodeReport, IndexSetFamily,
};
pub use net::{
    covering_radius_estimate, greedy_separated_indices, greedy_separated_set, sample_ball,
};
pub use packing::{build_packing, max_level, packing_size, PackingFamily};
