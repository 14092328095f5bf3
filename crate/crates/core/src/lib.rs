//! Convention-explicit evaluation metrics.
//!
//! Every metric result carries a [`ConventionDescriptor`] naming the formula
//! family, reporting mode and parameters that produced it, plus a
//! [`Validity`] flag. Kernels are generic over [`Scalar`] (`f32`/`f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the harness
//! uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cluster;
pub mod convention;
pub mod correlate;
pub mod error;
pub mod imgqual;
pub mod labels;
pub mod numeric;
pub mod registry;
pub mod regress;
pub mod scalar;
pub mod segment;
pub mod special;
pub mod stattest;
pub mod value;

pub use convention::{
    ConventionDescriptor, Domain, FormulaFamily, MetricId, ParamKey, ParamValue, Params, ReportingMode,
};
pub use error::{MetricError, Result};
pub use labels::{BinaryCounts, ConfusionMatrix, LabelSet, LabelVector, ScoreVector};
pub use registry::{register_variants, register_variants_for};
pub use scalar::Scalar;
pub use value::{MetricValue, TestResult, Validity, Value, ZeroDivision};

pub type MetricValue64 = MetricValue<f64>;
pub type TestResult64 = TestResult<f64>;
pub type PrfReport64 = classify::PrfReport<f64>;
pub type PairedSeries64 = regress::PairedSeries<f64>;
pub type ClusteredData64 = cluster::ClusteredData<f64>;
pub type VariablePair64 = correlate::VariablePair<f64>;
pub type SampleGroups64 = stattest::SampleGroups<f64>;
pub type Mask64 = segment::Mask<f64>;
pub type RasterPair64 = imgqual::RasterPair<f64>;
