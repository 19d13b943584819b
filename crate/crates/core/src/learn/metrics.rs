use crate::error::{Result, ShapeError};

/// Accuracy and macro-averaged precision and recall over a class table.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

/// Per-class precision and recall averaged uniformly over all
/// `num_classes` classes; a class never predicted has precision 0 and a
/// class never present has recall 0.
pub fn compute_metrics(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
) -> Result<Metrics> {
    let predicted: Vec<Option<usize>> = predicted.iter().copied().map(Some).collect();
    compute_metrics_partial(&predicted, truth, num_classes)
}

/// [`compute_metrics`] where `None` marks a sample the classifier could
/// not label: it counts as wrong and as a prediction for no class.
pub fn compute_metrics_partial(
    predicted: &[Option<usize>],
    truth: &[usize],
    num_classes: usize,
) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(ShapeError::LengthMismatch(predicted.len(), truth.len()));
    }
    if predicted.is_empty() || num_classes == 0 {
        return Err(ShapeError::EmptyData);
    }
    if let Some(&bad) = predicted
        .iter()
        .flatten()
        .chain(truth)
        .find(|&&c| c >= num_classes)
    {
        return Err(ShapeError::InvalidParams(format!(
            "class {bad} outside a table of {num_classes}"
        )));
    }
    let mut confusion = vec![vec![0usize; num_classes]; num_classes];
    let mut actual = vec![0usize; num_classes];
    for (&p, &t) in predicted.iter().zip(truth) {
        actual[t] += 1;
        if let Some(p) = p {
            confusion[t][p] += 1;
        }
    }
    let correct: usize = (0..num_classes).map(|c| confusion[c][c]).sum();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let mut precision = 0.0;
    let mut recall = 0.0;
    for c in 0..num_classes {
        let predicted_c: usize = (0..num_classes).map(|t| confusion[t][c]).sum();
        precision += ratio(confusion[c][c], predicted_c);
        recall += ratio(confusion[c][c], actual[c]);
    }
    Ok(Metrics {
        accuracy: correct as f64 / predicted.len() as f64,
        macro_precision: precision / num_classes as f64,
        macro_recall: recall / num_classes as f64,
        confusion,
    })
}
