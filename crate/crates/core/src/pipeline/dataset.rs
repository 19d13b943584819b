use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ShapeError};
use crate::imgproc::Image;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub path: PathBuf,
    pub class: String,
    pub index: u64,
}

/// Image files grouped by class, sorted by `(class, index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIndex {
    entries: Vec<DatasetEntry>,
    class_names: Vec<String>,
    /// Files whose names did not parse as `<class>-<index>.<ext>`.
    pub skipped: usize,
}

impl DatasetIndex {
    /// Sorts the entries and derives the class table from them.
    pub fn from_entries(mut entries: Vec<DatasetEntry>) -> Self {
        entries.sort_by(|a, b| (&a.class, a.index, &a.path).cmp(&(&b.class, b.index, &b.path)));
        let mut class_names: Vec<String> = entries.iter().map(|e| e.class.clone()).collect();
        class_names.dedup();
        Self {
            entries,
            class_names,
            skipped: 0,
        }
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.class_names
            .binary_search_by(|c| c.as_str().cmp(class))
            .ok()
    }

    pub fn per_class_count(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.class.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Keeps only the first `n` classes in table order.
    pub fn first_classes(&self, n: usize) -> Self {
        let keep = &self.class_names[..n.min(self.class_names.len())];
        Self::from_entries(
            self.entries
                .iter()
                .filter(|e| keep.contains(&e.class))
                .cloned()
                .collect(),
        )
    }

    fn by_class(&self) -> Vec<Vec<DatasetEntry>> {
        let mut groups: Vec<Vec<DatasetEntry>> = vec![Vec::new(); self.class_names.len()];
        for e in &self.entries {
            groups[self.class_index(&e.class).unwrap()].push(e.clone());
        }
        groups
    }
}

/// `<class>-<index>.<ext>` with the class taken up to the last hyphen.
pub fn parse_file_name(name: &str) -> Option<(String, u64)> {
    let (stem, _ext) = name.rsplit_once('.')?;
    let (class, index) = stem.rsplit_once('-')?;
    if class.is_empty() || class.contains('\t') {
        return None;
    }
    Some((class.to_string(), index.parse().ok()?))
}

/// Indexes every regular file in `dir` (not recursive). Names that do not
/// parse are skipped with a warning and counted.
pub fn load_dataset(dir: &Path) -> Result<DatasetIndex> {
    let mut entries = Vec::new();
    let mut skipped = 0;
    for item in std::fs::read_dir(dir)? {
        let item = item?;
        if !item.file_type()?.is_file() {
            continue;
        }
        let name = item.file_name();
        match name.to_str().and_then(parse_file_name) {
            Some((class, index)) => entries.push(DatasetEntry {
                path: item.path(),
                class,
                index,
            }),
            None => {
                log::warn!(
                    "skipping {}: name is not <class>-<index>.<ext>",
                    item.path().display()
                );
                skipped += 1;
            }
        }
    }
    if entries.is_empty() {
        return Err(ShapeError::EmptyDirectory(dir.to_path_buf()));
    }
    let mut index = DatasetIndex::from_entries(entries);
    index.skipped = skipped;
    Ok(index)
}

/// Decodes an image file to gray levels in `[0, 1]`.
pub fn load_image<T: Scalar>(path: &Path) -> Result<Image<T>> {
    let decoded = image::open(path).map_err(|source| ShapeError::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    let gray = decoded.to_luma8();
    Image::from_u8(gray.width() as usize, gray.height() as usize, gray.as_raw())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Share of each class assigned to training, in `(0, 1)`.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.5,
            seed: 42,
        }
    }
}

/// Stratified split: each class is shuffled by a ChaCha8 stream seeded
/// with `spec.seed` (classes visited in table order) and its first
/// `ceil(fraction * n)` entries go to training.
pub fn split(index: &DatasetIndex, spec: SplitSpec) -> Result<(DatasetIndex, DatasetIndex)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(ShapeError::InvalidParams(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut group) in index.class_names.iter().zip(index.by_class()) {
        let n = group.len();
        let n_train = (spec.train_fraction * n as f64 - 1e-9).ceil() as usize;
        if n_train == 0 || n_train >= n {
            return Err(ShapeError::ClassTooSmall {
                class: class.clone(),
                count: n,
            });
        }
        group.shuffle(&mut rng);
        test.extend(group.split_off(n_train));
        train.extend(group);
    }
    Ok((
        DatasetIndex::from_entries(train),
        DatasetIndex::from_entries(test),
    ))
}

/// Stratified `k`-fold partition: each class is shuffled and dealt round
/// robin into the folds. Returns `(train, test)` per fold.
pub fn kfold(
    index: &DatasetIndex,
    k: usize,
    seed: u64,
) -> Result<Vec<(DatasetIndex, DatasetIndex)>> {
    if k < 2 {
        return Err(ShapeError::InvalidParams(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<DatasetEntry>> = vec![Vec::new(); k];
    for (class, mut group) in index.class_names.iter().zip(index.by_class()) {
        if group.len() < k {
            return Err(ShapeError::ClassTooSmall {
                class: class.clone(),
                count: group.len(),
            });
        }
        group.shuffle(&mut rng);
        for (i, e) in group.into_iter().enumerate() {
            folds[i % k].push(e);
        }
    }
    Ok((0..k)
        .map(|f| {
            let train = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, v)| v.iter().cloned())
                .collect();
            (
                DatasetIndex::from_entries(train),
                DatasetIndex::from_entries(folds[f].clone()),
            )
        })
        .collect())
}
