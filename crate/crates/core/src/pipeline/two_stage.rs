use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::descriptors::{extract_cbid, extract_isd, DescriptorKind, ExtractionConfig, IsdWeights};
use crate::error::{Result, ShapeError};
use crate::imgproc::Image;
use crate::learn::{
    predict_proba, read_forest, train_forest, write_forest, ClassProbs, ForestModel, ForestParams,
    LabeledSet,
};
use crate::scalar::Scalar;

use super::dataset::{load_image, DatasetIndex};
use super::features::{descriptor_meta, parse_descriptor_meta};

const MAGIC: &str = "shapekit-two-stage";
const VERSION: u32 = 1;

/// Corner-descriptor forest proposing candidate classes and an ISD forest
/// choosing among them.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageModel<T> {
    /// Absent when fewer than two classes produced corner descriptors.
    pub cbid_forest: Option<ForestModel<T>>,
    pub isd_forest: ForestModel<T>,
    pub shortlist_n: usize,
    pub weights: IsdWeights<T>,
    pub config: ExtractionConfig<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageOutcome<T> {
    pub class: usize,
    pub probs: ClassProbs<T>,
    /// Candidate classes from the first stage, by descending probability;
    /// `None` when the first stage was skipped.
    pub shortlist: Option<Vec<usize>>,
}

impl<T: Scalar> TwoStageModel<T> {
    /// Trains both forests over the full class table of `isd`. `cbid` rows
    /// may cover a subset of the images.
    pub fn fit(
        cbid: &LabeledSet<T>,
        isd: &LabeledSet<T>,
        params: ForestParams,
        shortlist_n: usize,
        weights: IsdWeights<T>,
        config: ExtractionConfig<T>,
    ) -> Result<Self> {
        let classes = isd.num_classes();
        if shortlist_n == 0 || shortlist_n > classes {
            return Err(ShapeError::InvalidParams(format!(
                "shortlist must lie in 1..={classes}, got {shortlist_n}"
            )));
        }
        if cbid.class_names() != isd.class_names() {
            return Err(ShapeError::InvalidParams(
                "both stages need the same class table".into(),
            ));
        }
        let isd_forest = train_forest(isd, params)?;
        let cbid_forest = match train_forest(
            cbid,
            ForestParams {
                mtry: params.mtry.min(cbid.dims().max(1)),
                ..params
            },
        ) {
            Ok(f) => Some(f),
            Err(ShapeError::SingleClass | ShapeError::EmptyData) => {
                log::warn!(
                    "corner descriptors cover fewer than two classes; the first stage is disabled"
                );
                None
            }
            Err(e) => return Err(e),
        };
        Ok(Self {
            cbid_forest,
            isd_forest,
            shortlist_n,
            weights,
            config,
        })
    }

    pub fn class_names(&self) -> &[String] {
        &self.isd_forest.class_names
    }

    /// True when the shortlist spans every class, so the first stage
    /// cannot change the outcome and is skipped.
    pub fn shortlist_is_noop(&self) -> bool {
        self.shortlist_n >= self.isd_forest.num_classes()
    }

    pub fn with_shortlist(&self, shortlist_n: usize) -> Result<Self> {
        if shortlist_n == 0 || shortlist_n > self.isd_forest.num_classes() {
            return Err(ShapeError::InvalidParams(format!(
                "invalid shortlist {shortlist_n}"
            )));
        }
        Ok(Self {
            shortlist_n,
            ..self.clone()
        })
    }

    /// Candidate classes from the corner descriptor, or `None` when the
    /// first stage is skipped or its descriptor cannot be extracted.
    pub fn shortlist(&self, img: &Image<T>) -> Result<Option<Vec<usize>>> {
        let Some(forest) = self
            .cbid_forest
            .as_ref()
            .filter(|_| !self.shortlist_is_noop())
        else {
            return Ok(None);
        };
        match extract_cbid(img, &self.config) {
            Ok(d) => {
                let mut ranked = predict_proba(forest, d.values())?.ranked();
                ranked.truncate(self.shortlist_n);
                Ok(Some(ranked))
            }
            Err(e) => {
                log::debug!("corner stage skipped: {e}");
                Ok(None)
            }
        }
    }

    pub fn classify(&self, img: &Image<T>) -> Result<TwoStageOutcome<T>> {
        let shortlist = self.shortlist(img)?;
        if let Some([only]) = shortlist.as_deref() {
            let mut probs = vec![T::zero(); self.isd_forest.num_classes()];
            probs[*only] = T::one();
            return Ok(TwoStageOutcome {
                class: *only,
                probs: ClassProbs { probs },
                shortlist,
            });
        }
        let isd = extract_isd(img, &self.config, self.weights)?;
        let full = predict_proba(&self.isd_forest, isd.values())?;
        let probs = match &shortlist {
            Some(keep) => full.restricted(keep),
            None => full,
        };
        Ok(TwoStageOutcome {
            class: probs.argmax(),
            probs,
            shortlist,
        })
    }

    /// Most probable class of the ISD forest alone.
    pub fn classify_single_stage(&self, img: &Image<T>) -> Result<usize> {
        let isd = extract_isd(img, &self.config, self.weights)?;
        Ok(predict_proba(&self.isd_forest, isd.values())?.argmax())
    }
}

/// Extracts corner descriptors and ISDs for every image of `train` and fits
/// a [`TwoStageModel`]. Images without a corner descriptor only feed the
/// ISD forest.
pub fn train_two_stage<T: Scalar>(
    train: &DatasetIndex,
    config: &ExtractionConfig<T>,
    weights: IsdWeights<T>,
    params: ForestParams,
    shortlist_n: usize,
) -> Result<TwoStageModel<T>> {
    if train.is_empty() {
        return Err(ShapeError::EmptyData);
    }
    let feats = train
        .entries()
        .par_iter()
        .map(|e| {
            let img = load_image::<T>(&e.path)?;
            let isd = extract_isd(&img, config, weights)?;
            let cbid = extract_cbid(&img, config).ok();
            Ok((train.class_index(&e.class).unwrap(), cbid, isd))
        })
        .collect::<Result<Vec<_>>>()?;
    let names = train.class_names().to_vec();
    let mut cbid_rows = Vec::new();
    let mut cbid_labels = Vec::new();
    for (label, cbid, _) in &feats {
        if let Some(d) = cbid {
            cbid_rows.push(d.values().to_vec());
            cbid_labels.push(*label);
        }
    }
    let cbid = LabeledSet::new(cbid_rows, cbid_labels, names.clone())?;
    let isd = LabeledSet::new(
        feats.iter().map(|(_, _, d)| d.values().to_vec()).collect(),
        feats.iter().map(|(l, _, _)| *l).collect(),
        names,
    )?;
    TwoStageModel::fit(&cbid, &isd, params, shortlist_n, weights, config.clone())
}

pub fn write_two_stage<T: Scalar, W: Write>(mut out: W, model: &TwoStageModel<T>) -> Result<()> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "shortlist {}", model.shortlist_n)?;
    match &model.cbid_forest {
        Some(f) => {
            writeln!(out, "cbid-forest present")?;
            write_forest(
                &mut out,
                f,
                &descriptor_meta(DescriptorKind::Cbid, &model.config, model.weights),
            )?;
        }
        None => writeln!(out, "cbid-forest absent")?,
    }
    write_forest(
        &mut out,
        &model.isd_forest,
        &descriptor_meta(DescriptorKind::Isd, &model.config, model.weights),
    )?;
    out.flush()?;
    Ok(())
}

pub fn read_two_stage<T: Scalar, R: BufRead>(mut input: R) -> Result<TwoStageModel<T>> {
    let mut line = String::new();
    let mut next = |input: &mut R| -> Result<String> {
        line.clear();
        input.read_line(&mut line)?;
        Ok(line.trim_end_matches(['\n', '\r']).to_string())
    };
    if next(&mut input)? != format!("{MAGIC} {VERSION}") {
        return Err(ShapeError::Parse("not a two-stage model".into()));
    }
    let shortlist_n: usize = next(&mut input)?
        .strip_prefix("shortlist ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ShapeError::Parse("expected `shortlist <n>`".into()))?;
    let cbid_forest = match next(&mut input)?.as_str() {
        "cbid-forest present" => Some(read_forest::<T, _>(&mut input)?.0),
        "cbid-forest absent" => None,
        _ => return Err(ShapeError::Parse("expected cbid-forest marker".into())),
    };
    let (isd_forest, meta) = read_forest::<T, _>(&mut input)?;
    let (kind, config, weights) = parse_descriptor_meta(&meta)?
        .ok_or_else(|| ShapeError::Parse("ISD forest lacks its descriptor settings".into()))?;
    if kind != DescriptorKind::Isd {
        return Err(ShapeError::Parse(format!(
            "second stage holds a {kind} forest"
        )));
    }
    if shortlist_n == 0 || shortlist_n > isd_forest.num_classes() {
        return Err(ShapeError::Parse(format!(
            "shortlist {shortlist_n} out of range"
        )));
    }
    Ok(TwoStageModel {
        cbid_forest,
        isd_forest,
        shortlist_n,
        weights,
        config,
    })
}
