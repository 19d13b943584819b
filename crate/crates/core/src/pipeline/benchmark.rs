use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::descriptors::{extract, DescriptorKind, ExtractionConfig, IsdWeights};
use crate::error::{Result, ShapeError};
use crate::imgproc::Image;
use crate::learn::{
    compute_metrics_partial, predict_proba, train_forest, ForestParams, LabeledSet, Metrics,
};

use super::dataset::{load_image, split, DatasetIndex, SplitSpec};
use super::features::extract_index;
use super::two_stage::train_two_stage;

/// Candidate values for each ISD weight during tuning.
pub const ISD_WEIGHT_GRID: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
/// Timed repetitions per latency figure; the median is reported.
pub const LATENCY_RUNS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchTarget {
    Descriptor(DescriptorKind),
    TwoStage,
}

impl std::fmt::Display for BenchTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BenchTarget::Descriptor(k) => write!(f, "{k}"),
            BenchTarget::TwoStage => f.write_str("two-stage"),
        }
    }
}

impl FromStr for BenchTarget {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("two-stage") {
            Ok(BenchTarget::TwoStage)
        } else {
            s.parse().map(BenchTarget::Descriptor)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkParams {
    pub target: BenchTarget,
    pub split: SplitSpec,
    pub forest: ForestParams,
    pub config: ExtractionConfig<f64>,
    pub weights: IsdWeights<f64>,
    /// Capped at the class count.
    pub shortlist_n: usize,
    /// Grid-search the ISD weights on a validation half of the training
    /// split before the final fit.
    pub tune_weights: bool,
    pub measure_latency: bool,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            target: BenchTarget::Descriptor(DescriptorKind::Gfd),
            split: SplitSpec::default(),
            forest: ForestParams::default(),
            config: ExtractionConfig::default(),
            weights: IsdWeights::default(),
            shortlist_n: 10,
            tune_weights: false,
            measure_latency: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub target: BenchTarget,
    pub class_names: Vec<String>,
    pub test_paths: Vec<PathBuf>,
    pub truth: Vec<usize>,
    /// `None` where the test image yielded no descriptor.
    pub predicted: Vec<Option<usize>>,
    pub metrics: Metrics,
    pub train_images: usize,
    pub train_failures: usize,
    pub weights: IsdWeights<f64>,
    pub shortlist_n: Option<usize>,
    /// Wall-clock seconds per stage.
    pub stage_seconds: Vec<(String, f64)>,
    /// Median over [`LATENCY_RUNS`] of the mean per-image classification
    /// time, in milliseconds, per classification path.
    pub latency_ms: Vec<(String, f64)>,
}

impl BenchmarkReport {
    /// Accuracy, precision and recall rows plus per-class results;
    /// deterministic for fixed inputs.
    pub fn metrics_table(&self) -> String {
        let mut s = String::new();
        let failed = self.predicted.iter().filter(|p| p.is_none()).count();
        let _ = writeln!(s, "{:<22}{}", "Descriptor", self.target);
        let _ = writeln!(s, "{:<22}{:.2}%", "Accuracy", 100.0 * self.metrics.accuracy);
        let _ = writeln!(
            s,
            "{:<22}{:.4}",
            "Average Precision", self.metrics.macro_precision
        );
        let _ = writeln!(
            s,
            "{:<22}{:.4}",
            "Average Recall", self.metrics.macro_recall
        );
        let _ = writeln!(
            s,
            "{:<22}{} ({} without descriptor)",
            "Test images",
            self.truth.len(),
            failed
        );
        let _ = writeln!(
            s,
            "{:<22}{} ({} without descriptor)",
            "Training images", self.train_images, self.train_failures
        );
        let _ = writeln!(
            s,
            "{:<22}alpha={} beta={}",
            "ISD weights", self.weights.alpha, self.weights.beta
        );
        if let Some(n) = self.shortlist_n {
            let _ = writeln!(s, "{:<22}{}", "Shortlist", n);
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<20}{:>8}{:>8}{:>11}{:>9}",
            "class", "correct", "total", "precision", "recall"
        );
        for (c, name) in self.class_names.iter().enumerate() {
            let row = &self.metrics.confusion[c];
            let total = self.truth.iter().filter(|&&t| t == c).count();
            let predicted: usize = self.metrics.confusion.iter().map(|r| r[c]).sum();
            let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
            let _ = writeln!(
                s,
                "{:<20}{:>8}{:>8}{:>11.4}{:>9.4}",
                name,
                row[c],
                total,
                ratio(row[c], predicted),
                ratio(row[c], total)
            );
        }
        s
    }

    /// [`metrics_table`](Self::metrics_table) followed by stage timings and
    /// classification latencies.
    pub fn to_text(&self) -> String {
        let mut s = self.metrics_table();
        let _ = writeln!(s, "\nstage timings (s)");
        for (name, secs) in &self.stage_seconds {
            let _ = writeln!(s, "  {name:<20}{secs:.3}");
        }
        if !self.latency_ms.is_empty() {
            let _ = writeln!(
                s,
                "\nmean per-image classification latency (ms, median of {LATENCY_RUNS} runs)"
            );
            for (name, ms) in &self.latency_ms {
                let _ = writeln!(s, "  {name:<20}{ms:.3}");
            }
        }
        s
    }

    /// `section,name,value` rows covering metrics, per-class results,
    /// timings and latencies.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,name,value\n");
        let _ = writeln!(s, "summary,descriptor,{}", self.target);
        let _ = writeln!(s, "summary,accuracy,{}", self.metrics.accuracy);
        let _ = writeln!(
            s,
            "summary,average_precision,{}",
            self.metrics.macro_precision
        );
        let _ = writeln!(s, "summary,average_recall,{}", self.metrics.macro_recall);
        let _ = writeln!(s, "summary,test_images,{}", self.truth.len());
        let _ = writeln!(
            s,
            "summary,test_failures,{}",
            self.predicted.iter().filter(|p| p.is_none()).count()
        );
        let _ = writeln!(s, "summary,alpha,{}", self.weights.alpha);
        let _ = writeln!(s, "summary,beta,{}", self.weights.beta);
        for (c, name) in self.class_names.iter().enumerate() {
            for (p, other) in self.class_names.iter().enumerate() {
                let n = self.metrics.confusion[c][p];
                if n > 0 {
                    let _ = writeln!(s, "confusion,{name}->{other},{n}");
                }
            }
        }
        for (name, secs) in &self.stage_seconds {
            let _ = writeln!(s, "stage_seconds,{name},{secs}");
        }
        for (name, ms) in &self.latency_ms {
            let _ = writeln!(s, "latency_ms,{name},{ms}");
        }
        s
    }
}

struct Stopwatch(Vec<(String, f64)>);

impl Stopwatch {
    fn time<R>(&mut self, name: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        self.0
            .push((name.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

/// Median over [`LATENCY_RUNS`] of the mean time `f` takes per image.
fn latency_ms<R>(images: &[Image<f64>], f: impl Fn(&Image<f64>) -> R) -> f64 {
    if images.is_empty() {
        return 0.0;
    }
    let mut runs: Vec<f64> = (0..LATENCY_RUNS)
        .map(|_| {
            let start = Instant::now();
            for img in images {
                std::hint::black_box(f(img));
            }
            start.elapsed().as_secs_f64() * 1e3 / images.len() as f64
        })
        .collect();
    runs.sort_by(f64::total_cmp);
    runs[LATENCY_RUNS / 2]
}

fn scaled_isd(rows: &[Vec<f64>], gfd_len: usize, w: IsdWeights<f64>) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, &v)| if i < gfd_len { w.alpha * v } else { w.beta * v })
                .collect()
        })
        .collect()
}

/// Picks the ISD weights from [`ISD_WEIGHT_GRID`] with the best accuracy
/// on a stratified validation half of `train`; ties keep the earlier grid
/// entry (alpha-major).
fn tune_isd_weights(train: &DatasetIndex, params: &BenchmarkParams) -> Result<IsdWeights<f64>> {
    let unit = IsdWeights::new(1.0, 1.0)?;
    let inner = SplitSpec {
        train_fraction: 0.5,
        seed: params.split.seed.wrapping_add(1),
    };
    let (fit, val) = split(train, inner)?;
    let fit_set = extract_index(&fit, DescriptorKind::Isd, &params.config, unit);
    let val_set = extract_index(&val, DescriptorKind::Isd, &params.config, unit);
    let fit_rows = fit_set.labeled(train.class_names())?;
    let val_rows = val_set.labeled(train.class_names())?;
    let gfd_len = params.config.dims(DescriptorKind::Gfd);
    let mut best: Option<(usize, IsdWeights<f64>)> = None;
    for &alpha in &ISD_WEIGHT_GRID {
        for &beta in &ISD_WEIGHT_GRID {
            let w = IsdWeights::new(alpha, beta)?;
            let data = LabeledSet::new(
                scaled_isd(fit_rows.rows(), gfd_len, w),
                fit_rows.labels().to_vec(),
                fit_rows.class_names().to_vec(),
            )?;
            let forest = train_forest(&data, params.forest)?;
            let mut correct = 0;
            for (row, &label) in scaled_isd(val_rows.rows(), gfd_len, w)
                .iter()
                .zip(val_rows.labels())
            {
                if predict_proba(&forest, row)?.argmax() == label {
                    correct += 1;
                }
            }
            log::info!(
                "ISD weights alpha={alpha} beta={beta}: {correct}/{} validation images",
                val_rows.len()
            );
            if best.is_none_or(|(c, _)| correct > c) {
                best = Some((correct, w));
            }
        }
    }
    Ok(best.expect("non-empty grid").1)
}

/// Splits `index`, trains on one part and evaluates on the other.
pub fn run_benchmark(index: &DatasetIndex, params: &BenchmarkParams) -> Result<BenchmarkReport> {
    let (train, test) = split(index, params.split)?;
    run_benchmark_split(&train, &test, params)
}

/// Trains on `train` and evaluates on `test`; both must share one class
/// table.
pub fn run_benchmark_split(
    train: &DatasetIndex,
    test: &DatasetIndex,
    params: &BenchmarkParams,
) -> Result<BenchmarkReport> {
    params.config.validate()?;
    if train.class_names() != test.class_names() {
        return Err(ShapeError::InvalidParams(
            "train and test class tables differ".into(),
        ));
    }
    let classes = train.class_names().to_vec();
    let mut watch = Stopwatch(Vec::new());
    let uses_isd = matches!(
        params.target,
        BenchTarget::TwoStage | BenchTarget::Descriptor(DescriptorKind::Isd)
    );
    let weights = if params.tune_weights && uses_isd {
        watch.time("tune-weights", || tune_isd_weights(train, params))?
    } else {
        params.weights
    };
    let test_images: Vec<Result<Image<f64>>> = watch.time("load-test", || {
        test.entries()
            .par_iter()
            .map(|e| load_image(&e.path))
            .collect()
    });
    let truth: Vec<usize> = test
        .entries()
        .iter()
        .map(|e| test.class_index(&e.class).unwrap())
        .collect();
    let loaded: Vec<Image<f64>> = test_images
        .iter()
        .filter_map(|r| r.as_ref().ok().cloned())
        .collect();
    let mut latency = Vec::new();

    let (predicted, train_images, train_failures, shortlist_n) = match params.target {
        BenchTarget::Descriptor(kind) => {
            let train_set = watch.time("extract-train", || {
                extract_index(train, kind, &params.config, weights)
            });
            let data = train_set.labeled(&classes)?;
            let forest = watch.time("train", || train_forest(&data, params.forest))?;
            let predicted: Vec<Option<usize>> = watch.time("classify-test", || {
                test_images
                    .par_iter()
                    .map(|img| {
                        let img = img.as_ref().ok()?;
                        let d = extract(kind, img, &params.config, weights).ok()?;
                        Some(predict_proba(&forest, d.values()).ok()?.argmax())
                    })
                    .collect()
            });
            if params.measure_latency {
                let ms = latency_ms(&loaded, |img| {
                    extract(kind, img, &params.config, weights)
                        .ok()
                        .map(|d| predict_proba(&forest, d.values()).map(|p| p.argmax()))
                });
                latency.push((kind.name().to_string(), ms));
            }
            (predicted, train.len(), train_set.failures.len(), None)
        }
        BenchTarget::TwoStage => {
            let shortlist_n = params.shortlist_n.clamp(1, classes.len());
            let model = watch.time("extract-and-train", || {
                train_two_stage(train, &params.config, weights, params.forest, shortlist_n)
            })?;
            let predicted: Vec<Option<usize>> = watch.time("classify-test", || {
                test_images
                    .par_iter()
                    .map(|img| Some(model.classify(img.as_ref().ok()?).ok()?.class))
                    .collect()
            });
            if params.measure_latency {
                let full = model.with_shortlist(classes.len())?;
                latency.push((
                    "full-isd".to_string(),
                    latency_ms(&loaded, |img| full.classify(img).ok()),
                ));
                latency.push((
                    format!("shortlist-{shortlist_n}"),
                    latency_ms(&loaded, |img| model.classify(img).ok()),
                ));
            }
            (predicted, train.len(), 0, Some(shortlist_n))
        }
    };
    let metrics = compute_metrics_partial(&predicted, &truth, classes.len())?;
    Ok(BenchmarkReport {
        target: params.target,
        class_names: classes,
        test_paths: test.entries().iter().map(|e| e.path.clone()).collect(),
        truth,
        predicted,
        metrics,
        train_images,
        train_failures,
        weights,
        shortlist_n,
        stage_seconds: watch.0,
        latency_ms: latency,
    })
}
