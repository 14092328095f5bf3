use convmetrics::{ConventionDescriptor, MetricId, MetricValue};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::evaluate::evaluate;

/// One evaluated variant; `error` keeps the reason behind an Undefined
/// entry produced by a failed precondition.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutcome {
    pub value: MetricValue<f64>,
    pub error: Option<String>,
}

fn labels(data: &Dataset) -> Option<&convmetrics::LabelSet> {
    match data {
        Dataset::Classification(c) => Some(&c.labels),
        _ => None,
    }
}

pub fn evaluate_all(data: &Dataset, variants: &[ConventionDescriptor]) -> Vec<VariantOutcome> {
    variants
        .par_iter()
        .map(|d| match evaluate(data, d) {
            Ok(value) => VariantOutcome { value, error: None },
            Err(e) => VariantOutcome {
                value: MetricValue::undefined(d.clone()),
                error: Some(e.to_string()),
            },
        })
        .collect()
}

pub fn run_variants_detailed(data: &Dataset, metric: MetricId, config: &RunConfig) -> Vec<VariantOutcome> {
    evaluate_all(data, &config.variants(metric, labels(data)))
}

/// One value per selected variant, in registry order. Failures become
/// Undefined entries.
pub fn run_variants(data: &Dataset, metric: MetricId, config: &RunConfig) -> Vec<MetricValue<f64>> {
    run_variants_detailed(data, metric, config).into_iter().map(|o| o.value).collect()
}
