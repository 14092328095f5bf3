//! Variant sweeps over the convmetrics catalog, pairwise RD/ID/BUG
//! classification of the resulting values, and report rendering.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dataset;
pub mod discrepancy;
pub mod error;
pub mod evaluate;
pub mod report;
pub mod sweep;
pub mod task;

pub use config::{Preset, RunConfig, Tolerances, DEFAULT_STOCHASTIC_TOLERANCE, DEFAULT_TOLERANCE};
pub use dataset::{load_dataset, load_dataset_with, parse_dataset, ClassificationData, Dataset, ImageData, LoadOptions};
pub use discrepancy::{classify_discrepancies, classify_pair, structural_class, DiscrepancyClass, DiscrepancyRecord};
pub use error::{HarnessError, Result};
pub use evaluate::evaluate;
pub use report::{emit_report, emit_report_with_notes, exit_code, write_report, ReportFormat, ALL_CONSISTENT};
pub use sweep::{evaluate_all, run_variants, run_variants_detailed, VariantOutcome};
pub use task::TaskFamily;

use convmetrics::MetricValue;

/// Sweeps every selected metric and classifies all variant pairs.
pub fn diff_dataset(data: &Dataset, config: &RunConfig) -> Result<Vec<DiscrepancyRecord>> {
    config.validate()?;
    let mut records = Vec::new();
    for m in config.selected_metrics() {
        let values: Vec<MetricValue<f64>> = run_variants(data, m, config);
        records.extend(classify_discrepancies(&values, config.tolerances));
    }
    discrepancy::sort_records(&mut records);
    Ok(records)
}
