//! Numerical tools for deciding whether a Hölder map factors through a tree.

pub mod curve;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod formats;
pub mod heisenberg;
pub mod surface;
pub mod tree;
pub mod winding;
pub mod young;

pub use curve::{
    estimate_holder_constant, loop_erase, reparameterize_by_variation, sigma_variation,
    smooth_modulus, HolderEstimate, Modulus, SampledCurve,
};
pub use error::{Error, Result};
pub use exact::{exact_sum, ExactSum};
pub use young::{
    boundary_integral, young_integral, GridFunction, GridSquare, SampledFunction, YoungResult,
};
pub use winding::{
    current_pairing, winding_field, winding_field_with_guard, winding_moments, winding_number,
    WindingField, WindingMoments,
};
pub use surface::{
    compute_square_data, degree_pairing_check, surface_integral_first_order,
    surface_integral_second_order, ConvergenceReport, DegreePairing, Integrand, RoughSquareData,
    SquareField, TestIntegrand,
};
pub use heisenberg::{
    heisenberg_square_check, horizontal_lift, koranyi_distance, lift_square_field,
    lifting_identity_residuals, HeisenbergField, HeisenbergPoint, LiftingResiduals, SquareCheck,
};
pub use tree::{
    build_quotient_tree, contraction, property_t_check, pseudo_metric_d_exact,
    pseudo_metric_d_surrogate, ConeExtension, GraphDocument, MetricGraphMap,
    PropertyTCertificate, QuotientTree, Verdict,
};
