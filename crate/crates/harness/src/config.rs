use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use convmetrics::registry::{register_variants, register_variants_for};
use convmetrics::{ConventionDescriptor, FormulaFamily, LabelSet, MetricId, ParamKey, ReportingMode};

use crate::error::{HarnessError, Result};
use crate::task::TaskFamily;

/// Default tolerance for deterministic metrics.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default tolerance for Monte Carlo and iterative metrics.
pub const DEFAULT_STOCHASTIC_TOLERANCE: f64 = 1e-6;

/// Named variant selections standing in for the defaults of common
/// libraries. Descriptors with `Overall` reporting pass every preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Preset {
    #[default]
    All,
    Micro,
    Macro,
    Weighted,
    /// Scores of the first label, as in toolkits that treat the first
    /// factor level as the event.
    PerClassFirst,
    /// Scores of the largest label.
    BinaryPositive,
    /// Macro and weighted means together.
    Average,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::All,
        Preset::Micro,
        Preset::Macro,
        Preset::Weighted,
        Preset::PerClassFirst,
        Preset::BinaryPositive,
        Preset::Average,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::All => "all",
            Preset::Micro => "micro",
            Preset::Macro => "macro",
            Preset::Weighted => "weighted",
            Preset::PerClassFirst => "per_class_first",
            Preset::BinaryPositive => "binary_positive",
            Preset::Average => "average",
        }
    }

    pub fn admits(self, d: &ConventionDescriptor, labels: Option<&LabelSet>) -> bool {
        let r = d.reporting;
        if r == ReportingMode::Overall {
            return true;
        }
        match self {
            Preset::All => true,
            Preset::Micro => r == ReportingMode::Micro,
            Preset::Macro => r == ReportingMode::Macro,
            Preset::Weighted => r == ReportingMode::Weighted,
            Preset::PerClassFirst => {
                let first = labels.and_then(|l| l.labels().first().copied()).unwrap_or(0);
                r == ReportingMode::PerClass(first)
            }
            Preset::BinaryPositive => matches!(r, ReportingMode::BinaryPositive(_)),
            Preset::Average => matches!(r, ReportingMode::Macro | ReportingMode::Weighted),
        }
    }

    /// Caveat printed with reports produced under this preset.
    pub fn note(self) -> Option<&'static str> {
        match self {
            Preset::Average => Some(
                "preset `average` keeps both macro and support-weighted means: a bare \"average\" does not say which one it is",
            ),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown preset `{s}`")))
    }
}

/// Tolerances used when deciding that two values agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub stochastic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: DEFAULT_TOLERANCE,
            stochastic: DEFAULT_STOCHASTIC_TOLERANCE,
        }
    }
}

impl From<f64> for Tolerances {
    fn from(t: f64) -> Self {
        Tolerances { exact: t, stochastic: t }
    }
}

impl Tolerances {
    pub fn for_pair(&self, a: &ConventionDescriptor, b: &ConventionDescriptor) -> f64 {
        let stochastic = |d: &ConventionDescriptor| d.family == FormulaFamily::MonteCarlo;
        if stochastic(a) || stochastic(b) {
            self.stochastic.max(self.exact)
        } else {
            self.exact
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: TaskFamily,
    /// `None` selects every metric admissible for the task.
    pub metrics: Option<Vec<MetricId>>,
    pub preset: Preset,
    pub tolerances: Tolerances,
    /// Replaces the seed of every Monte Carlo variant.
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(task: TaskFamily) -> Self {
        RunConfig {
            task,
            metrics: None,
            preset: Preset::All,
            tolerances: Tolerances::default(),
            seed: 0,
            input: None,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.tolerances;
        if !(t.exact >= 0.0) || !(t.stochastic >= 0.0) {
            return Err(HarnessError::Config("tolerance must be non-negative".into()));
        }
        if let Some(ms) = &self.metrics {
            if let Some(m) = ms.iter().find(|m| m.domain() != self.task.domain()) {
                return Err(HarnessError::Config(format!("metric {m} is not admissible for task {}", self.task)));
            }
        }
        Ok(())
    }

    pub fn selected_metrics(&self) -> Vec<MetricId> {
        self.metrics.clone().unwrap_or_else(|| self.task.metrics())
    }

    /// Registered variants of `metric` after the preset and seed override.
    pub fn variants(&self, metric: MetricId, labels: Option<&LabelSet>) -> Vec<ConventionDescriptor> {
        let all = match labels {
            Some(l) => register_variants_for(metric, l),
            None => register_variants(metric),
        };
        all.into_iter()
            .filter(|d| self.preset.admits(d, labels))
            .map(|mut d| {
                if d.param(ParamKey::Seed).is_some() {
                    d = d.with(ParamKey::Seed, self.seed as i64);
                }
                d
            })
            .collect()
    }
}
