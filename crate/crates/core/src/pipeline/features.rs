use rayon::prelude::*;

use crate::descriptors::{extract, DescriptorKind, DescriptorRecord, ExtractionConfig, IsdWeights};
use crate::error::{Result, ShapeError};
use crate::learn::{LabeledSet, ModelMeta};
use crate::scalar::Scalar;

use super::dataset::{load_image, DatasetIndex};

/// Descriptors of a dataset; images whose extraction failed are listed
/// separately with the error message.
#[derive(Debug, Clone)]
pub struct ExtractedSet<T> {
    pub records: Vec<DescriptorRecord<T>>,
    pub failures: Vec<(std::path::PathBuf, String)>,
}

impl<T: Scalar> ExtractedSet<T> {
    /// Training rows labelled against `class_names`; every record's label
    /// must appear in the table.
    pub fn labeled(&self, class_names: &[String]) -> Result<LabeledSet<T>> {
        let labels = self
            .records
            .iter()
            .map(|r| {
                class_names
                    .iter()
                    .position(|c| *c == r.label)
                    .ok_or_else(|| {
                        ShapeError::InvalidParams(format!("class {} not in table", r.label))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .records
            .iter()
            .map(|r| r.descriptor.values().to_vec())
            .collect();
        LabeledSet::new(rows, labels, class_names.to_vec())
    }
}

/// Loads and describes every image of `index` in parallel; the output
/// keeps index order.
pub fn extract_index<T: Scalar>(
    index: &DatasetIndex,
    kind: DescriptorKind,
    cfg: &ExtractionConfig<T>,
    weights: IsdWeights<T>,
) -> ExtractedSet<T> {
    let results: Vec<_> = index
        .entries()
        .par_iter()
        .map(|e| {
            let d = load_image(&e.path).and_then(|img| extract(kind, &img, cfg, weights));
            (e, d)
        })
        .collect();
    let mut set = ExtractedSet {
        records: Vec::new(),
        failures: Vec::new(),
    };
    for (e, d) in results {
        match d {
            Ok(descriptor) => set.records.push(DescriptorRecord {
                path: e.path.clone(),
                label: e.class.clone(),
                descriptor,
            }),
            Err(err) => {
                log::warn!("{kind} extraction failed for {}: {err}", e.path.display());
                set.failures.push((e.path.clone(), err.to_string()));
            }
        }
    }
    set
}

/// Annotations that let a stored forest re-create its input features.
pub fn descriptor_meta<T: Scalar>(
    kind: DescriptorKind,
    cfg: &ExtractionConfig<T>,
    weights: IsdWeights<T>,
) -> ModelMeta {
    let mut meta = vec![
        ("kind".to_string(), kind.name().to_string()),
        ("alpha".to_string(), format!("{:e}", weights.alpha.as_f64())),
        ("beta".to_string(), format!("{:e}", weights.beta.as_f64())),
    ];
    meta.extend(
        cfg.to_pairs()
            .into_iter()
            .map(|(k, v)| (format!("config.{k}"), v)),
    );
    meta
}

/// Descriptor kind, extraction settings and ISD weights recorded in a model.
pub type DescriptorMeta<T> = (DescriptorKind, ExtractionConfig<T>, IsdWeights<T>);

/// Inverse of [`descriptor_meta`]; `None` when no kind was recorded.
pub fn parse_descriptor_meta<T: Scalar>(
    meta: &[(String, String)],
) -> Result<Option<DescriptorMeta<T>>> {
    let get = |key: &str| meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let Some(kind) = get("kind") else {
        return Ok(None);
    };
    let real = |key: &str| -> Result<T> {
        get(key)
            .and_then(|v| v.parse::<f64>().ok())
            .and_then(T::from_f64)
            .ok_or_else(|| ShapeError::Parse(format!("model meta lacks a numeric {key}")))
    };
    let weights = IsdWeights::new(real("alpha")?, real("beta")?)?;
    let pairs: Vec<(&str, &str)> = meta
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("config.").map(|k| (k, v.as_str())))
        .collect();
    Ok(Some((
        kind.parse()?,
        ExtractionConfig::from_pairs(&pairs)?,
        weights,
    )))
}
