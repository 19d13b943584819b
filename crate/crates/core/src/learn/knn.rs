use crate::descriptors::cityblock_slices;
use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::LabeledSet;

/// Majority class among the `k` rows nearest to `x` in city-block
/// distance. Equal distances keep row order; equal votes go to the lowest
/// class index.
pub fn knn_classify<T: Scalar>(train: &LabeledSet<T>, x: &[T], k: usize) -> Result<usize> {
    if train.is_empty() {
        return Err(ShapeError::EmptyData);
    }
    if k == 0 || k > train.len() {
        return Err(ShapeError::InvalidParams(format!(
            "k must lie in 1..={}, got {k}",
            train.len()
        )));
    }
    let mut dist = train
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| cityblock_slices(r, x).map(|d| (d, i)))
        .collect::<Result<Vec<_>>>()?;
    dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; train.num_classes()];
    for &(_, i) in &dist[..k] {
        votes[train.labels()[i]] += 1;
    }
    let top = *votes.iter().max().unwrap();
    Ok(votes.iter().position(|&v| v == top).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> LabeledSet<f64> {
        LabeledSet::new(
            vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]],
            vec![1, 1, 0, 0],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        assert_eq!(knn_classify(&data(), &[10.0], 1).unwrap(), 0);
        assert_eq!(knn_classify(&data(), &[1.0], 1).unwrap(), 1);
    }

    #[test]
    fn full_k_tie_goes_to_class_zero() {
        assert_eq!(knn_classify(&data(), &[0.0], 4).unwrap(), 0);
    }

    #[test]
    fn majority_of_three() {
        assert_eq!(knn_classify(&data(), &[2.0], 3).unwrap(), 1);
    }

    #[test]
    fn bad_k() {
        assert!(knn_classify(&data(), &[0.0], 0).is_err());
        assert!(knn_classify(&data(), &[0.0], 5).is_err());
    }
}
