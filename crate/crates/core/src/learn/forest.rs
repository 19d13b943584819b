use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::LabeledSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub num_trees: usize,
    /// Features sampled per split.
    pub mtry: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            num_trees: 10,
            mtry: 6,
            seed: 42,
        }
    }
}

/// Node of a decision tree; samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<T> {
    Split {
        feature: usize,
        threshold: T,
        left: Box<TreeNode<T>>,
        right: Box<TreeNode<T>>,
    },
    /// Class histogram of the training samples that reached the leaf.
    Leaf { counts: Vec<u32> },
}

impl<T: Scalar> TreeNode<T> {
    fn leaf_for(&self, x: &[T]) -> &[u32] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
                TreeNode::Leaf { counts } => return counts,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel<T> {
    pub trees: Vec<TreeNode<T>>,
    pub params: ForestParams,
    pub dims: usize,
    pub class_names: Vec<String>,
}

impl<T: Scalar> ForestModel<T> {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Per-class probabilities indexed like the model's class table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbs<T> {
    pub probs: Vec<T>,
}

impl<T: Scalar> ClassProbs<T> {
    /// Most probable class; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        self.ranked()[0]
    }

    /// Class indices by descending probability, ties by ascending index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.probs.len()).collect();
        idx.sort_by(|&a, &b| {
            self.probs[b]
                .partial_cmp(&self.probs[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }

    /// Zeroes every class outside `keep` and rescales the rest to sum to 1.
    /// When the kept mass is zero the kept classes share it uniformly.
    pub fn restricted(&self, keep: &[usize]) -> Self {
        let mut probs = vec![T::zero(); self.probs.len()];
        let mass: T = keep.iter().map(|&c| self.probs[c]).sum();
        for &c in keep {
            probs[c] = if mass > T::zero() {
                self.probs[c] / mass
            } else {
                T::one() / T::from_usize_lossy(keep.len())
            };
        }
        Self { probs }
    }
}

/// Trains `num_trees` trees, each on a bootstrap sample drawn with a
/// ChaCha8 stream seeded by `seed + tree_index`.
pub fn train_forest<T: Scalar>(
    data: &LabeledSet<T>,
    params: ForestParams,
) -> Result<ForestModel<T>> {
    if data.is_empty() {
        return Err(ShapeError::EmptyData);
    }
    let first = data.labels()[0];
    if data.labels().iter().all(|&l| l == first) {
        return Err(ShapeError::SingleClass);
    }
    let dims = data.dims();
    if params.num_trees == 0 || params.mtry == 0 || params.mtry > dims {
        return Err(ShapeError::InvalidParams(format!(
            "need num_trees >= 1 and 1 <= mtry <= {dims}, got num_trees={} mtry={}",
            params.num_trees, params.mtry
        )));
    }
    let trees = (0..params.num_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64));
            let n = data.len();
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            Builder {
                data,
                mtry: params.mtry,
                rng,
            }
            .grow(sample)
        })
        .collect();
    Ok(ForestModel {
        trees,
        params,
        dims,
        class_names: data.class_names().to_vec(),
    })
}

/// Mean over trees of the reached leaf's class frequencies.
pub fn predict_proba<T: Scalar>(model: &ForestModel<T>, x: &[T]) -> Result<ClassProbs<T>> {
    if x.len() != model.dims {
        return Err(ShapeError::DimMismatch {
            expected: model.dims,
            got: x.len(),
        });
    }
    let mut probs = vec![T::zero(); model.num_classes()];
    for tree in &model.trees {
        let counts = tree.leaf_for(x);
        let total = T::from_u32(counts.iter().sum()).unwrap();
        for (p, &c) in probs.iter_mut().zip(counts) {
            *p += T::from_u32(c).unwrap() / total;
        }
    }
    let trees = T::from_usize_lossy(model.trees.len());
    probs.iter_mut().for_each(|p| *p /= trees);
    Ok(ClassProbs { probs })
}

/// `sum_left c^2 / n_left + sum_right c^2 / n_right` as an exact fraction;
/// larger means lower weighted Gini impurity.
#[derive(Debug, Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    feature: usize,
    threshold: T,
    purity: Purity,
}

impl<T: Scalar> Candidate<T> {
    /// Higher purity wins, then lower feature index, then lower threshold.
    fn better_than(&self, other: &Self) -> bool {
        match self.purity.cmp(&other.purity) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (self.feature, self.threshold) < (other.feature, other.threshold),
        }
    }
}

/// Best threshold on one feature over `(value, label)` pairs, scanning
/// midpoints between consecutive distinct values.
fn scan_feature<T: Scalar>(
    pairs: &mut [(T, usize)],
    n_classes: usize,
    feature: usize,
) -> Option<Candidate<T>> {
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let n = pairs.len() as u128;
    let mut left = vec![0u128; n_classes];
    let mut right = vec![0u128; n_classes];
    for &(_, l) in pairs.iter() {
        right[l] += 1;
    }
    let mut sq_left = 0u128;
    let mut sq_right: u128 = right.iter().map(|c| c * c).sum();
    let mut best: Option<Candidate<T>> = None;
    for i in 0..pairs.len() - 1 {
        let c = pairs[i].1;
        sq_left += 2 * left[c] + 1;
        sq_right -= 2 * right[c] - 1;
        left[c] += 1;
        right[c] -= 1;
        let (a, b) = (pairs[i].0, pairs[i + 1].0);
        if a == b {
            continue;
        }
        let n_left = i as u128 + 1;
        let n_right = n - n_left;
        let mut threshold = (a + b) / T::lit(2.0);
        if !(threshold >= a && threshold < b) {
            threshold = a;
        }
        let cand = Candidate {
            feature,
            threshold,
            purity: Purity {
                num: sq_left * n_right + sq_right * n_left,
                den: n_left * n_right,
            },
        };
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            best = Some(cand);
        }
    }
    best
}

/// Threshold minimizing weighted Gini impurity on a single feature, and
/// that impurity `sum_side n_side (1 - sum_c p_c^2)`; `None` when all
/// values are equal.
pub fn best_split_1d<T: Scalar>(values: &[T], labels: &[usize]) -> Option<(T, f64)> {
    if values.len() != labels.len() || values.is_empty() {
        return None;
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut pairs: Vec<(T, usize)> = values.iter().copied().zip(labels.iter().copied()).collect();
    let c = scan_feature(&mut pairs, n_classes, 0)?;
    Some((
        c.threshold,
        values.len() as f64 - c.purity.num as f64 / c.purity.den as f64,
    ))
}

struct Builder<'a, T> {
    data: &'a LabeledSet<T>,
    mtry: usize,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Builder<'_, T> {
    fn grow(&mut self, samples: Vec<usize>) -> TreeNode<T> {
        let n_classes = self.data.num_classes();
        let mut counts = vec![0u32; n_classes];
        for &i in &samples {
            counts[self.data.labels()[i]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || samples.len() < 2 {
            return TreeNode::Leaf { counts };
        }
        let Some(split) = self.choose_split(&samples) else {
            return TreeNode::Leaf { counts };
        };
        let rows = self.data.rows();
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| rows[i][split.feature] <= split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow(l)),
            right: Box::new(self.grow(r)),
        }
    }

    /// Scores `mtry` features drawn without replacement; when none of them
    /// separates the samples, keeps drawing single features until one does.
    /// Among equally pure splits the feature drawn first wins.
    fn choose_split(&mut self, samples: &[usize]) -> Option<Candidate<T>> {
        let dims = self.data.dims();
        let mut order: Vec<usize> = (0..dims).collect();
        let mut best: Option<Candidate<T>> = None;
        let mut pairs = Vec::with_capacity(samples.len());
        for drawn in 0..dims {
            if drawn >= self.mtry && best.is_some() {
                break;
            }
            let pick = self.rng.gen_range(drawn..dims);
            order.swap(drawn, pick);
            let feature = order[drawn];
            pairs.clear();
            pairs.extend(
                samples
                    .iter()
                    .map(|&i| (self.data.rows()[i][feature], self.data.labels()[i])),
            );
            if let Some(c) = scan_feature(&mut pairs, self.data.num_classes(), feature) {
                if best
                    .as_ref()
                    .is_none_or(|b| c.purity.cmp(&b.purity) == Ordering::Greater)
                {
                    best = Some(c);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: Vec<Vec<f64>>, labels: Vec<usize>, k: usize) -> LabeledSet<f64> {
        LabeledSet::new(rows, labels, (0..k).map(|i| format!("c{i}")).collect()).unwrap()
    }

    #[test]
    fn single_class_rejected() {
        let s = set(vec![vec![1.0], vec![2.0]], vec![0, 0], 1);
        assert!(matches!(
            train_forest(
                &s,
                ForestParams {
                    mtry: 1,
                    ..Default::default()
                }
            ),
            Err(ShapeError::SingleClass)
        ));
        let empty = set(vec![], vec![], 2);
        assert!(matches!(
            train_forest(&empty, ForestParams::default()),
            Err(ShapeError::EmptyData)
        ));
    }

    #[test]
    fn separable_blobs_are_confident() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let j = (i % 7) as f64 * 0.1;
            rows.push(vec![j, 1.0 - j]);
            labels.push(0);
            rows.push(vec![5.0 + j, 4.0 - j]);
            labels.push(1);
        }
        let m = train_forest(
            &set(rows, labels, 2),
            ForestParams {
                mtry: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let p = predict_proba(&m, &[0.2, 0.8]).unwrap();
        assert!(p.probs[0] >= 0.9);
        assert!(predict_proba(&m, &[0.2]).is_err());
    }

    #[test]
    fn simple_split() {
        let (t, g) = best_split_1d(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1]).unwrap();
        assert_eq!(t, 2.5);
        assert_eq!(g, 0.0);
        assert!(best_split_1d(&[1.0, 1.0], &[0, 1]).is_none());
    }

    #[test]
    fn midpoint_between_adjacent_floats_stays_left() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let (t, _) = best_split_1d(&[a, b], &[0, 1]).unwrap();
        assert!(t >= a && t < b);
    }

    #[test]
    fn restricted_probs() {
        let p = ClassProbs {
            probs: vec![0.5f64, 0.3, 0.2],
        };
        let r = p.restricted(&[1, 2]);
        assert_eq!(r.probs[0], 0.0);
        assert!((r.probs[1] - 0.6).abs() < 1e-12);
        assert_eq!(r.argmax(), 1);
        let z = ClassProbs {
            probs: vec![1.0, 0.0, 0.0],
        }
        .restricted(&[1, 2]);
        assert_eq!(z.probs, vec![0.0, 0.5, 0.5]);
        assert_eq!(
            ClassProbs {
                probs: vec![0.4, 0.4, 0.2]
            }
            .ranked(),
            vec![0, 1, 2]
        );
    }
}
