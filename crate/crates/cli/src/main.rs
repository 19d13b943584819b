use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use shapekit::descriptors::{
    cityblock, extract, read_records, write_records, DescriptorKind, ExtractionConfig, IsdWeights,
};
use shapekit::learn::{
    predict_proba, read_forest, train_forest, write_forest, ClassProbs, ForestParams, LabeledSet,
};
use shapekit::pipeline::{
    descriptor_meta, extract_index, invariance_suite, kfold, load_dataset, load_image,
    parse_descriptor_meta, read_two_stage, run_benchmark, run_benchmark_split, synthetic_shapes,
    train_two_stage, write_synthetic_dataset, write_two_stage, BenchTarget, BenchmarkParams,
    InvarianceParams, SplitSpec, POLYGON_SET, SHAPE_NAMES,
};

const EXIT_DATA: u8 = 2;
const EXIT_INVARIANCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "shapekit",
    version,
    about = "Shape descriptors, random forests and two-stage shape recognition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe every image of a dataset directory and write the records.
    Extract(ExtractArgs),
    /// Train a forest on extracted records, or a two-stage model on a dataset.
    Train(TrainArgs),
    /// Classify one image with a stored model.
    Classify(ClassifyArgs),
    /// List the records nearest to a query image by city-block distance.
    Retrieve(RetrieveArgs),
    /// Split a dataset, train, evaluate and report accuracy, precision and recall.
    Benchmark(BenchmarkArgs),
    /// Measure descriptor drift under rotation, scaling, translation and boundary noise.
    Invariance(InvarianceArgs),
    /// Write a dataset of rendered polygons.
    Synth(SynthArgs),
}

#[derive(Args, Clone, Copy)]
struct WeightArgs {
    /// Weight of the region block of ISD.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Weight of the contour block of ISD.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl WeightArgs {
    fn weights(self) -> Result<IsdWeights<f64>> {
        Ok(IsdWeights::new(self.alpha, self.beta)?)
    }
}

#[derive(Args, Clone, Copy)]
struct ForestArgs {
    #[arg(long, default_value_t = 10)]
    trees: usize,
    #[arg(long, default_value_t = 6)]
    mtry: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl ForestArgs {
    fn params(self) -> ForestParams {
        ForestParams {
            num_trees: self.trees,
            mtry: self.mtry,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    desc: DescriptorKind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// Records written by `extract`.
    #[arg(long, conflicts_with_all = ["dataset", "two_stage"], required_unless_present = "dataset")]
    features: Option<PathBuf>,
    /// Image directory; needs `--two-stage` or `--desc`.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    model: PathBuf,
    /// Descriptor for training straight from `--dataset`.
    #[arg(long, conflicts_with = "two_stage")]
    desc: Option<DescriptorKind>,
    #[arg(long, requires = "dataset")]
    two_stage: bool,
    #[arg(long, default_value_t = 10)]
    shortlist: usize,
    #[command(flatten)]
    forest: ForestArgs,
    /// ISD weights the records were extracted with, or to extract with.
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    image: PathBuf,
    /// Require a two-stage model.
    #[arg(long)]
    two_stage: bool,
    /// Override the stored shortlist size of a two-stage model.
    #[arg(long)]
    shortlist: Option<usize>,
    /// Number of ranked classes to print.
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Args)]
struct RetrieveArgs {
    #[arg(long)]
    query: PathBuf,
    /// Records written by `extract`.
    #[arg(long)]
    index: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Descriptor name or `two-stage`.
    #[arg(long)]
    desc: BenchTarget,
    /// Share of each class used for training.
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    /// Seed of the split and of the forests.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Text report path; a CSV with the same stem is written next to it.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Stratified cross-validation with this many folds instead of one split.
    #[arg(long)]
    folds: Option<usize>,
    /// Grid-search the ISD weights on a validation part of the training set.
    #[arg(long)]
    tune: bool,
    #[arg(long, default_value_t = 10)]
    shortlist: usize,
    #[arg(long, default_value_t = 10)]
    trees: usize,
    #[arg(long, default_value_t = 6)]
    mtry: usize,
    /// Skip the per-image latency measurement.
    #[arg(long)]
    no_latency: bool,
    /// Use only the first N classes of the dataset.
    #[arg(long)]
    classes: Option<usize>,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct InvarianceArgs {
    /// Image directory; the first image of each of the first `--shapes` classes is used.
    #[arg(long, required_unless_present = "synthetic")]
    dataset: Option<PathBuf>,
    /// Use rendered polygons instead of a dataset.
    #[arg(long, conflicts_with = "dataset")]
    synthetic: bool,
    /// Comma-separated descriptor names.
    #[arg(long, value_delimiter = ',', default_value = "gfd,msgbd,cbid,cbfd")]
    desc: Vec<DescriptorKind>,
    /// Largest drift ratio allowed under rotation and scaling.
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
    /// Largest drift ratio allowed under boundary noise.
    #[arg(long, default_value_t = 0.2)]
    noise_tolerance: f64,
    #[arg(long, default_value_t = 10)]
    shapes: usize,
    /// Canvas side of the rendered polygons.
    #[arg(long, default_value_t = 256)]
    size: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    per_class: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated shape names; all shapes by default.
    #[arg(long, value_delimiter = ',')]
    shapes: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Extract(a) => run_extract(a),
        Command::Train(a) => run_train(a),
        Command::Classify(a) => run_classify(a),
        Command::Retrieve(a) => run_retrieve(a),
        Command::Benchmark(a) => run_benchmark_cmd(a),
        Command::Invariance(a) => run_invariance(a),
        Command::Synth(a) => run_synth(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("cannot create {}", path.display())
    })?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {}", path.display())
    })?))
}

fn run_extract(a: ExtractArgs) -> Result<ExitCode> {
    let index = load_dataset(&a.input)?;
    let set = extract_index(
        &index,
        a.desc,
        &ExtractionConfig::default(),
        a.weights.weights()?,
    );
    write_records(create(&a.out)?, &set.records)?;
    println!(
        "wrote {} {} descriptors to {} ({} images failed)",
        set.records.len(),
        a.desc,
        a.out.display(),
        set.failures.len()
    );
    for (path, err) in &set.failures {
        eprintln!("  {}: {err}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_train(a: TrainArgs) -> Result<ExitCode> {
    let params = a.forest.params();
    let weights = a.weights.weights()?;
    let config = ExtractionConfig::default();
    if let Some(features) = &a.features {
        let records = read_records::<f64, _>(open(features)?)?;
        let Some(kind) = records.first().map(|r| r.descriptor.kind()) else {
            bail!("{} holds no records", features.display());
        };
        if let Some(r) = records.iter().find(|r| r.descriptor.kind() != kind) {
            bail!("mixed descriptor kinds: {kind} and {}", r.descriptor.kind());
        }
        let labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
        let rows = records
            .iter()
            .map(|r| r.descriptor.values().to_vec())
            .collect();
        let data = LabeledSet::from_names(rows, &labels)?;
        let forest = train_forest(&data, params)?;
        write_forest(
            create(&a.model)?,
            &forest,
            &descriptor_meta(kind, &config, weights),
        )?;
        println!(
            "trained {} trees on {} {kind} records over {} classes",
            params.num_trees,
            data.len(),
            data.num_classes()
        );
        return Ok(ExitCode::SUCCESS);
    }
    let dir = a
        .dataset
        .as_deref()
        .expect("clap requires --features or --dataset");
    let index = load_dataset(dir)?;
    if a.two_stage {
        let model = train_two_stage(
            &index,
            &config,
            weights,
            params,
            a.shortlist.min(index.class_names().len()),
        )?;
        write_two_stage(create(&a.model)?, &model)?;
        println!(
            "trained a two-stage model on {} images over {} classes (shortlist {})",
            index.len(),
            index.class_names().len(),
            model.shortlist_n
        );
        return Ok(ExitCode::SUCCESS);
    }
    let Some(kind) = a.desc else {
        bail!("training from --dataset needs --two-stage or --desc");
    };
    let set = extract_index(&index, kind, &config, weights);
    let data = set.labeled(index.class_names())?;
    let forest = train_forest(&data, params)?;
    write_forest(
        create(&a.model)?,
        &forest,
        &descriptor_meta(kind, &config, weights),
    )?;
    println!(
        "trained {} trees on {} {kind} descriptors ({} images failed)",
        params.num_trees,
        data.len(),
        set.failures.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn print_ranked(names: &[String], probs: &ClassProbs<f64>, top: usize) {
    for c in probs.ranked().into_iter().take(top) {
        println!("  {:<24}{:.4}", names[c], probs.probs[c]);
    }
}

fn run_classify(a: ClassifyArgs) -> Result<ExitCode> {
    let mut reader = open(&a.model)?;
    let is_two_stage = reader.fill_buf()?.starts_with(b"shapekit-two-stage");
    let img = load_image::<f64>(&a.image)?;
    if is_two_stage {
        let mut model = read_two_stage::<f64, _>(reader)?;
        if let Some(n) = a.shortlist {
            model = model.with_shortlist(n)?;
        }
        let out = model.classify(&img)?;
        let names = model.class_names();
        println!("{}", names[out.class]);
        match &out.shortlist {
            Some(list) => {
                let shown: Vec<&str> = list.iter().map(|&c| names[c].as_str()).collect();
                println!("shortlist: {}", shown.join(", "));
            }
            None => println!("shortlist: none (all classes)"),
        }
        print_ranked(names, &out.probs, a.top);
        return Ok(ExitCode::SUCCESS);
    }
    if a.two_stage || a.shortlist.is_some() {
        bail!(
            "{} is a single-forest model, not a two-stage model",
            a.model.display()
        );
    }
    let (forest, meta) = read_forest::<f64, _>(reader)?;
    let Some((kind, config, weights)) = parse_descriptor_meta::<f64>(&meta)? else {
        bail!(
            "{} does not record the descriptor it was trained on",
            a.model.display()
        );
    };
    let descriptor = extract(kind, &img, &config, weights)?;
    let probs = predict_proba(&forest, descriptor.values())?;
    println!("{}", forest.class_names[probs.argmax()]);
    print_ranked(&forest.class_names, &probs, a.top);
    Ok(ExitCode::SUCCESS)
}

fn run_retrieve(a: RetrieveArgs) -> Result<ExitCode> {
    let records = read_records::<f64, _>(open(&a.index)?)?;
    let Some(kind) = records.first().map(|r| r.descriptor.kind()) else {
        bail!("{} holds no records", a.index.display());
    };
    let img = load_image::<f64>(&a.query)?;
    let query = extract(
        kind,
        &img,
        &ExtractionConfig::default(),
        a.weights.weights()?,
    )?;
    let mut scored = records
        .iter()
        .map(|r| Ok((cityblock(&query, &r.descriptor)?, r)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.path.cmp(&b.1.path)));
    for (d, r) in scored.into_iter().take(a.k) {
        println!("{d:.6}\t{}\t{}", r.label, r.path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_benchmark_cmd(a: BenchmarkArgs) -> Result<ExitCode> {
    let mut index = load_dataset(&a.dataset)?;
    if let Some(n) = a.classes {
        index = index.first_classes(n);
    }
    let params = BenchmarkParams {
        target: a.desc,
        split: SplitSpec {
            train_fraction: a.split,
            seed: a.seed,
        },
        forest: ForestParams {
            num_trees: a.trees,
            mtry: a.mtry,
            seed: a.seed,
        },
        weights: a.weights.weights()?,
        shortlist_n: a.shortlist,
        tune_weights: a.tune,
        measure_latency: !a.no_latency,
        ..BenchmarkParams::default()
    };
    let (text, csv) = match a.folds {
        None => {
            let report = run_benchmark(&index, &params)?;
            (report.to_text(), report.to_csv())
        }
        Some(k) => {
            let mut text = String::new();
            let mut csv = String::from("fold,section,name,value\n");
            let mut accuracies = Vec::new();
            for (f, (train, test)) in kfold(&index, k, a.seed)?.iter().enumerate() {
                let report = run_benchmark_split(train, test, &params)?;
                accuracies.push(report.metrics.accuracy);
                text.push_str(&format!(
                    "== fold {} of {k} ==\n{}\n",
                    f + 1,
                    report.to_text()
                ));
                for line in report.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{}, {line}\n", f + 1).replace(", ", ","));
                }
            }
            let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
            let sd = (accuracies.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / accuracies.len() as f64)
                .sqrt();
            text.push_str(&format!(
                "mean accuracy over {k} folds: {:.2}% (sd {:.2})\n",
                100.0 * mean,
                100.0 * sd
            ));
            csv.push_str(&format!("all,summary,mean_accuracy,{mean}\n"));
            (text, csv)
        }
    };
    print!("{text}");
    if let Some(path) = &a.report {
        create(path)?.write_all(text.as_bytes())?;
        let csv_path = path.with_extension("csv");
        create(&csv_path)?.write_all(csv.as_bytes())?;
        println!(
            "report written to {} and {}",
            path.display(),
            csv_path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_invariance(a: InvarianceArgs) -> Result<ExitCode> {
    let shapes = match &a.dataset {
        Some(dir) => {
            let index = load_dataset(dir)?.first_classes(a.shapes);
            let mut seen = Vec::new();
            let mut images = Vec::new();
            for e in index.entries() {
                if !seen.contains(&e.class) {
                    seen.push(e.class.clone());
                    images.push(load_image::<f64>(&e.path)?);
                }
            }
            images
        }
        None => {
            let names = &POLYGON_SET[..a.shapes.min(POLYGON_SET.len())];
            synthetic_shapes(names, a.size)?
        }
    };
    let params = InvarianceParams {
        kinds: a.desc,
        tolerance: a.tolerance,
        noise_tolerance: a.noise_tolerance,
        ..InvarianceParams::default()
    };
    let report = invariance_suite(
        &shapes,
        &params,
        &ExtractionConfig::default(),
        IsdWeights::default(),
    )?;
    print!("{}", report.to_text());
    if report.passed() {
        println!("all transforms within tolerance");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("some transforms exceed tolerance");
        Ok(ExitCode::from(EXIT_INVARIANCE))
    }
}

fn run_synth(a: SynthArgs) -> Result<ExitCode> {
    let names: Vec<&str> = if a.shapes.is_empty() {
        SHAPE_NAMES.to_vec()
    } else {
        a.shapes.iter().map(String::as_str).collect()
    };
    write_synthetic_dataset(&a.out, &names, a.per_class, a.size, a.seed)?;
    println!(
        "wrote {} images to {}",
        names.len() * a.per_class,
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
