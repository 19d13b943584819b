//! Random forest and k-nearest-neighbour classifiers over descriptor
//! vectors, plus classification metrics.

mod forest;
mod knn;
mod metrics;
mod model_io;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

pub use self::forest::{
    best_split_1d, predict_proba, train_forest, ClassProbs, ForestModel, ForestParams, TreeNode,
};
pub use self::knn::knn_classify;
pub use self::metrics::{compute_metrics, compute_metrics_partial, Metrics};
pub use self::model_io::{read_forest, write_forest, ModelMeta, FOREST_FORMAT_VERSION};

/// Feature rows with class indices into `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet<T> {
    rows: Vec<Vec<T>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl<T: Scalar> LabeledSet<T> {
    /// Checks that rows and labels pair up, rows share one length and
    /// labels index into `class_names`.
    pub fn new(rows: Vec<Vec<T>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(ShapeError::LengthMismatch(rows.len(), labels.len()));
        }
        if let Some(first) = rows.first() {
            if let Some(bad) = rows.iter().find(|r| r.len() != first.len()) {
                return Err(ShapeError::DimMismatch {
                    expected: first.len(),
                    got: bad.len(),
                });
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(ShapeError::InvalidParams(format!(
                "label {l} outside a table of {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            rows,
            labels,
            class_names,
        })
    }

    /// Builds the class table from the distinct names, sorted.
    pub fn from_names<S: AsRef<str>>(rows: Vec<Vec<T>>, names: &[S]) -> Result<Self> {
        let mut table: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        table.sort();
        table.dedup();
        let labels = names
            .iter()
            .map(|s| {
                table
                    .binary_search_by(|t| t.as_str().cmp(s.as_ref()))
                    .unwrap()
            })
            .collect();
        Self::new(rows, labels, table)
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row length; 0 for an empty set.
    pub fn dims(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }
}
