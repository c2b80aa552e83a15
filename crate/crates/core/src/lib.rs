//! Finite metric spaces, separation properties, discrete tori and metric cotype.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cotype;
pub mod generate;
pub mod io;
pub mod metric;
pub mod separation;
pub mod torus;
pub mod transfer;

pub use cotype::{
    evaluate_cotype, gamma_search, mn_scaling_function, scaling_lower_bound, sts_certificate,
    Certificate, CertificateRow, CotypeError, CotypeEvaluation, CotypeParams, SearchResult,
    SearchStrategy, TorusFunction,
};
pub use generate::{GeneratorKind, GeneratorSpec};
pub use metric::{Chain, FiniteMetricSpace, MetricError, Violation};
pub use separation::{
    build_tree_structure, max_split_separation, separation_constant, validate_tree_structure,
    SeparatedTreeStructure, SeparationError, SeparationMode, SeparationReport, Split,
};
pub use torus::{GraphKind, Torus, TorusError, TorusSubset};
pub use transfer::{
    check_map, empirical_transfer_verify, perturbed_map, rough_inverse, snowflake_map,
    subdominant_map, transfer_constants, MapKind, MapParams, MapReport, PointMap, TransferError,
    TransferReport, TransferSpec,
};
