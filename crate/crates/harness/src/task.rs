use std::fmt;
use std::str::FromStr;

use convmetrics::{Domain, MetricId};

use crate::error::HarnessError;

/// Input shape of a run. Segmentation and image tasks are split by
/// dimensionality because the loaders check it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskFamily {
    Classification,
    Regression,
    Clustering,
    Correlation,
    StatTest,
    Segmentation2d,
    Segmentation3d,
    Image2d,
    Image3d,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 9] = [
        TaskFamily::Classification,
        TaskFamily::Regression,
        TaskFamily::Clustering,
        TaskFamily::Correlation,
        TaskFamily::StatTest,
        TaskFamily::Segmentation2d,
        TaskFamily::Segmentation3d,
        TaskFamily::Image2d,
        TaskFamily::Image3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskFamily::Classification => "classification",
            TaskFamily::Regression => "regression",
            TaskFamily::Clustering => "clustering",
            TaskFamily::Correlation => "correlation",
            TaskFamily::StatTest => "stattest",
            TaskFamily::Segmentation2d => "segmentation2d",
            TaskFamily::Segmentation3d => "segmentation3d",
            TaskFamily::Image2d => "image2d",
            TaskFamily::Image3d => "image3d",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            TaskFamily::Classification => Domain::Classification,
            TaskFamily::Regression => Domain::Regression,
            TaskFamily::Clustering => Domain::Clustering,
            TaskFamily::Correlation => Domain::Correlation,
            TaskFamily::StatTest => Domain::StatTest,
            TaskFamily::Segmentation2d | TaskFamily::Segmentation3d => Domain::Segmentation,
            TaskFamily::Image2d | TaskFamily::Image3d => Domain::Image,
        }
    }

    /// Grid dimensionality for mask and raster tasks.
    pub fn grid_dims(self) -> Option<usize> {
        match self {
            TaskFamily::Segmentation2d | TaskFamily::Image2d => Some(2),
            TaskFamily::Segmentation3d | TaskFamily::Image3d => Some(3),
            _ => None,
        }
    }

    /// Admissible metrics, in catalog order.
    pub fn metrics(self) -> Vec<MetricId> {
        MetricId::ALL.iter().copied().filter(|m| m.domain() == self.domain()).collect()
    }
}

impl fmt::Display for TaskFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskFamily {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskFamily::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown task `{s}`")))
    }
}
