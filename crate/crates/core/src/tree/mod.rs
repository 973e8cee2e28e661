//! Metric graph maps, the pseudo-metric D, quotient trees and the Property (T)
//! certificate.

pub mod certificate;
pub mod contraction;
pub mod graph;
pub mod pseudo_metric;
pub mod quotient;

pub use certificate::{fundamental_cycles, property_t_check, PropertyTCertificate, Verdict};
pub use contraction::{arc_parameterization, contraction, ConeExtension};
pub use graph::{GraphDocument, MetricGraphMap};
pub use pseudo_metric::{pseudo_metric_d_exact, pseudo_metric_d_surrogate, EXACT_VERTEX_LIMIT};
pub use quotient::{build_quotient_tree, QuotientTree, QuotientTreeDocument, TABLE_CLASS_LIMIT};
