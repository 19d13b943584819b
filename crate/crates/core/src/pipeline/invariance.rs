use std::fmt::Write as _;

use rayon::prelude::*;

use crate::descriptors::{
    cityblock, extract, Descriptor, DescriptorKind, ExtractionConfig, IsdWeights,
};
use crate::error::Result;
use crate::imgproc::Image;

use super::transform::{boundary_noise, pad, rotate, rotate90, scale, translate};

/// Transform names in report order.
pub const TRANSFORMS: [&str; 7] = [
    "identity",
    "translate",
    "rot90",
    "rot36",
    "scale0.5",
    "scale2",
    "noise1%",
];

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceParams {
    pub kinds: Vec<DescriptorKind>,
    /// Largest allowed drift ratio under rotation and scaling.
    pub tolerance: f64,
    /// Largest allowed drift ratio under boundary noise.
    pub noise_tolerance: f64,
    /// Largest allowed absolute drift under identity and translation.
    pub translation_tolerance: f64,
    pub noise_fraction: f64,
    /// Zero border added around every input before any transform.
    pub margin: usize,
    pub seed: u64,
}

impl Default for InvarianceParams {
    fn default() -> Self {
        Self {
            kinds: vec![
                DescriptorKind::Gfd,
                DescriptorKind::Msgbd,
                DescriptorKind::Cbid,
                DescriptorKind::Cbfd,
            ],
            tolerance: 0.1,
            noise_tolerance: 0.2,
            translation_tolerance: 1e-9,
            noise_fraction: 0.01,
            margin: 8,
            seed: 7,
        }
    }
}

/// Drift of one descriptor under one transform across all shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftRow {
    pub kind: DescriptorKind,
    pub transform: &'static str,
    pub max_drift: f64,
    pub mean_drift: f64,
    /// `max_drift / mean inter-shape distance`.
    pub ratio: f64,
    pub limit: f64,
    /// Whether `limit` bounds `max_drift` rather than `ratio`.
    pub absolute: bool,
    /// Transformed images whose descriptor could not be extracted.
    pub failures: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub rows: Vec<DriftRow>,
    /// Mean pairwise city-block distance between the untransformed shapes.
    pub inter_shape: Vec<(DescriptorKind, f64)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<7}{:<11}{:>13}{:>13}{:>11}{:>11}{:>6}  result",
            "desc", "transform", "max drift", "mean drift", "ratio", "limit", "fail"
        );
        for r in &self.rows {
            let limit = if r.absolute {
                format!("{:.0e} abs", r.limit)
            } else {
                format!("{}", r.limit)
            };
            let _ = writeln!(
                s,
                "{:<7}{:<11}{:>13.3e}{:>13.3e}{:>11.4}{:>11}{:>6}  {}",
                r.kind.name(),
                r.transform,
                r.max_drift,
                r.mean_drift,
                r.ratio,
                limit,
                r.failures,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        for (k, d) in &self.inter_shape {
            let _ = writeln!(s, "mean inter-shape distance {}: {d:.6}", k.name());
        }
        s
    }
}

fn transformed(
    img: &Image<f64>,
    name: &str,
    params: &InvarianceParams,
    shape: usize,
) -> Result<Image<f64>> {
    Ok(match name {
        "identity" => img.clone(),
        "translate" => translate(img, 7, 3, 0),
        "rot90" => rotate90(img),
        "rot36" => rotate(img, 36f64.to_radians()),
        "scale0.5" => scale(img, 0.5),
        "scale2" => scale(img, 2.0),
        "noise1%" => boundary_noise(
            img,
            params.noise_fraction,
            params.seed.wrapping_add(shape as u64),
        )?,
        other => unreachable!("unknown transform {other}"),
    })
}

/// Measures how far each descriptor moves under every transform in
/// [`TRANSFORMS`], relative to the mean distance between the input shapes.
/// Every input must yield every requested descriptor.
pub fn invariance_suite(
    shapes: &[Image<f64>],
    params: &InvarianceParams,
    cfg: &ExtractionConfig<f64>,
    weights: IsdWeights<f64>,
) -> Result<InvarianceReport> {
    if shapes.len() < 2 {
        return Err(crate::error::ShapeError::InvalidParams(
            "need at least two shapes".into(),
        ));
    }
    let padded: Vec<Image<f64>> = shapes.iter().map(|s| pad(s, params.margin)).collect();
    let mut rows = Vec::new();
    let mut inter_shape = Vec::new();
    for &kind in &params.kinds {
        let base: Vec<Descriptor<f64>> = padded
            .par_iter()
            .map(|img| extract(kind, img, cfg, weights))
            .collect::<Result<_>>()?;
        let mut pair_sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                pair_sum += cityblock(&base[i], &base[j])?;
                pairs += 1;
            }
        }
        let inter = pair_sum / pairs as f64;
        inter_shape.push((kind, inter));
        for name in TRANSFORMS {
            let drifts: Vec<Option<f64>> = padded
                .par_iter()
                .enumerate()
                .map(|(i, img)| {
                    let moved = transformed(img, name, params, i).ok()?;
                    let d = extract(kind, &moved, cfg, weights).ok()?;
                    cityblock(&base[i], &d).ok()
                })
                .collect();
            let ok: Vec<f64> = drifts.iter().flatten().copied().collect();
            let failures = drifts.len() - ok.len();
            let max_drift = ok.iter().copied().fold(0.0, f64::max);
            let mean_drift = if ok.is_empty() {
                0.0
            } else {
                ok.iter().sum::<f64>() / ok.len() as f64
            };
            let ratio = if inter > 0.0 {
                max_drift / inter
            } else {
                f64::INFINITY
            };
            let (limit, absolute) = match name {
                "identity" | "translate" => (params.translation_tolerance, true),
                "noise1%" => (params.noise_tolerance, false),
                _ => (params.tolerance, false),
            };
            let within = if absolute {
                max_drift < limit
            } else {
                ratio < limit
            };
            rows.push(DriftRow {
                kind,
                transform: name,
                max_drift,
                mean_drift,
                ratio,
                limit,
                absolute,
                failures,
                pass: within && failures == 0,
            });
        }
    }
    Ok(InvarianceReport { rows, inter_shape })
}
