//! Numerical geometry of jet-lifted point clouds.
//!
//! This crate estimates a smoothed Gromov-Hausdorff-type distance between
//! compact Riemannian manifolds: embed each manifold isometrically in
//! Euclidean space, lift the embedding to an order-(k+1) jet map on a
//! capped unit jet bundle, sample the lifted clouds, and minimize the
//! Hausdorff distance between them over rigid motions of the ambient
//! space. The crate also provides the classical ingredients needed to
//! exercise that pipeline: coordinate charts with metrics and Christoffel
//! symbols, iterated Sasaki metrics, the hyperboloid model of hyperbolic
//! space, arc-length parametrized curves, and finite-difference covariant
//! derivatives for convergence experiments.
//!
//! Everything is generic over the scalar type through the [`Real`] trait
//! (implemented for `f32` and `f64`); concrete `f64` aliases are exported
//! at the crate root.

pub mod align;
pub mod chart;
pub mod cloud;
pub mod curve;
pub mod dual;
pub mod error;
pub mod hamilton;
pub mod hausdorff;
pub mod jet;
pub mod linalg;
pub mod lorentz;
pub mod optim;
pub mod real;
pub mod rigid;
pub mod sasaki;
pub mod scenarios;

pub use align::{
    embedding_ck_norm, estimate_dgh, estimate_dgh_clouds, pad_lifted, AlignConfig, CloudFactory,
    DghEstimate, FixedCloud, RestartTrace,
};
pub use chart::{
    arc_circle_chart, circle_chart, flat_chart, sphere_polar_chart, Axis, Christoffel, Domain,
    MetricChart, DEFAULT_FD_STEP,
};
pub use cloud::{lift_cloud, lifted_headers, LiftedCloud, MetricKind, PointCloud};
pub use curve::{curve_length_adaptive, curve_length_gl, curve_speed, ArcLengthCurve};
pub use dual::{Dual, D1, D2, D3};
pub use error::{GeomError, Result};
pub use hamilton::{
    ck_norm, equivalence_experiment, hamilton_converges, metric_difference_field,
    pullback_metric, ChartMap, ConvergenceRecord, ConvergenceReport, EquivalenceCfg,
    TensorField02,
};
pub use hausdorff::{
    directed_hausdorff, directed_hausdorff_brute, hausdorff, KdTree, Nearest,
};
pub use jet::{
    block_bits, nested_jet, Ambient, EmbeddingMap, JetPoint, RealMap, SmoothMap, MAX_JET_ORDER,
};
pub use linalg::Mat;
pub use lorentz::{
    hyperbolic_distance, hyperboloid_check, hyperboloid_lift, lorentz_inner, TOL_HYP,
};
pub use optim::{nelder_mead, NelderMeadCfg, NmResult};
pub use real::Real;
pub use rigid::{canonical_frame, lifted_rigid_apply, rigid_param_count, RigidMotion};
pub use sasaki::{base_grid, unit_bundle_sample, SampleCounts, SasakiMetric, UnitBundleSample};
pub use scenarios::{
    build_double_wind, build_wavy_circle, circle_feet, f_function, parse_family, Family,
    FamilyFactory, WavyInfo, DEFAULT_FIBER_CAP,
};

/// Concrete chart type at the default scalar width.
pub type Chart64 = MetricChart<f64>;
/// Concrete matrix type at the default scalar width.
pub type Mat64 = Mat<f64>;
