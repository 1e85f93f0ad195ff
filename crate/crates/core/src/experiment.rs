//! Evaluation protocols (stratified half splits, leave-one-out), parameter
//! sweeps and model training over a dataset.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{predict, train, SvmParams};
use crate::codebook::{kmeans, sample_training_descriptors, Codebook, KmeansParams};
use crate::config::{ExperimentConfig, Protocol};
use crate::dataset::Dataset;
use crate::encoding::BscpVector;
use crate::error::{Error, Result};
use crate::model_io::TrainedModel;
use crate::pipeline::{encode_shape, extract_shape, FeatureConfig, PartBag};

/// Part bags of every shape, in dataset order.
pub fn extract_bags(dataset: &Dataset, features: &FeatureConfig) -> Result<Vec<PartBag>> {
    dataset
        .masks
        .par_iter()
        .zip(&dataset.names)
        .map(|(mask, name)| {
            extract_shape(mask, features)
                .map(|f| f.bag())
                .map_err(|e| e.in_shape(name.clone()))
        })
        .collect()
}

/// Stratified split: per class, a seeded shuffle puts the first half (rounded
/// down) in training and the rest in test. Both lists are sorted.
pub fn stratified_half_split(labels: &[usize], classes: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (c, members) in by_class.iter_mut().enumerate() {
        if members.len() < 2 {
            return Err(Error::Dataset(format!("class {c} has fewer than two shapes")));
        }
        members.shuffle(&mut rng);
        let half = members.len() / 2;
        train.extend_from_slice(&members[..half]);
        test.extend_from_slice(&members[half..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Codebook over the given shapes only, plus a digest of the descriptors it
/// was fitted to.
pub fn fit_codebook(bags: &[&PartBag], config: &ExperimentConfig, seed: u64) -> Result<(Codebook, u64)> {
    let geometry = config.features.geometry()?;
    let parts: Vec<_> = bags.iter().map(|b| b.parts.clone()).collect();
    let samples = sample_training_descriptors(&parts, &geometry, config.per_shape_cap, seed)?;
    let params = KmeansParams {
        k: config.k,
        seed,
        max_iter: config.kmeans_max_iter,
        tol: config.kmeans_tol,
    };
    Ok((kmeans(&samples, &params)?, samples.digest()))
}

pub fn encode_all(bags: &[PartBag], config: &ExperimentConfig, codebook: &Codebook) -> Result<Vec<BscpVector>> {
    let geometry = config.features.geometry()?;
    bags.par_iter()
        .map(|b| encode_shape(b, &geometry, codebook, config.llc_k))
        .collect()
}

fn svm_params(config: &ExperimentConfig, seed: u64) -> SvmParams {
    SvmParams {
        alpha: config.alpha,
        epochs: config.epochs,
        seed,
    }
}

/// Trains codebook and classifier on the whole dataset.
pub fn train_model(dataset: &Dataset, config: &ExperimentConfig) -> Result<TrainedModel> {
    config.validate()?;
    let bags = extract_bags(dataset, &config.features)?;
    let refs: Vec<&PartBag> = bags.iter().collect();
    let (codebook, _) = fit_codebook(&refs, config, config.seed)?;
    let features = encode_all(&bags, config, &codebook)?;
    let (svm, _) = train(
        &features,
        &dataset.labels,
        dataset.classes.clone(),
        &svm_params(config, config.seed),
    )?;
    TrainedModel::new(config.features, config.llc_k, codebook, svm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub accuracy: f64,
    pub train: usize,
    pub test: usize,
    /// Digest of the descriptor sample the codebook was fitted to.
    pub codebook_digest: u64,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub run: usize,
    pub shape: usize,
    pub truth: usize,
    pub predicted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub protocol: Protocol,
    pub classes: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub mean: f64,
    /// Sample standard deviation over runs; absent for leave-one-out.
    pub std: Option<f64>,
    /// Counts summed over runs, rows are true classes.
    pub confusion: Vec<Vec<u64>>,
    pub predictions: Vec<Prediction>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl EvaluationReport {
    fn assemble(protocol: Protocol, classes: Vec<String>, runs: Vec<RunRecord>, predictions: Vec<Prediction>) -> Self {
        let accs: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        let (mean, std) = mean_std(&accs);
        let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
        for p in &predictions {
            confusion[p.truth][p.predicted] += 1;
        }
        EvaluationReport {
            std: (protocol == Protocol::HalfSplit).then_some(std),
            protocol,
            classes,
            runs,
            mean,
            confusion,
            predictions,
        }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.accuracy).collect()
    }

    /// Copy with wall-clock fields zeroed, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.runs {
            r.seconds = 0.0;
        }
        out
    }

    /// Human-readable table followed by a `[report]` key = value block.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "protocol: {}", self.protocol);
        let _ = writeln!(
            s,
            "{:>4} {:>20} {:>9} {:>6} {:>6} {:>9}",
            "run", "seed", "accuracy", "train", "test", "seconds"
        );
        for (i, r) in self.runs.iter().enumerate() {
            let _ = writeln!(
                s,
                "{i:>4} {:>20} {:>9.4} {:>6} {:>6} {:>9.2}",
                r.seed, r.accuracy, r.train, r.test, r.seconds
            );
        }
        match self.std {
            Some(std) => {
                let _ = writeln!(s, "mean accuracy: {:.2}% +/- {:.2}%", 100.0 * self.mean, 100.0 * std);
            }
            None => {
                let _ = writeln!(s, "accuracy: {:.2}%", 100.0 * self.mean);
            }
        }
        let _ = writeln!(s, "confusion (rows = truth, columns = prediction):");
        for (c, row) in self.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>5}")).collect();
            let _ = writeln!(s, "{:>16} {}", self.classes[c], cells.join(""));
        }
        let _ = writeln!(s, "\n[report]");
        let _ = writeln!(s, "protocol = {}", self.protocol);
        let _ = writeln!(s, "classes = {}", self.classes.len());
        for (i, c) in self.classes.iter().enumerate() {
            let _ = writeln!(s, "class.{i} = {c}");
        }
        let _ = writeln!(s, "runs = {}", self.runs.len());
        for (i, r) in self.runs.iter().enumerate() {
            let _ = writeln!(s, "run.{i}.seed = {}", r.seed);
            let _ = writeln!(s, "run.{i}.accuracy = {}", r.accuracy);
            let _ = writeln!(s, "run.{i}.train = {}", r.train);
            let _ = writeln!(s, "run.{i}.test = {}", r.test);
            let _ = writeln!(s, "run.{i}.codebook_digest = {}", r.codebook_digest);
            let _ = writeln!(s, "run.{i}.seconds = {}", r.seconds);
        }
        let _ = writeln!(s, "mean = {}", self.mean);
        match self.std {
            Some(v) => {
                let _ = writeln!(s, "std = {v}");
            }
            None => {
                let _ = writeln!(s, "std = none");
            }
        }
        for (c, row) in self.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "confusion.{c} = {}", cells.join(" "));
        }
        let _ = writeln!(s, "predictions = {}", self.predictions.len());
        for (i, p) in self.predictions.iter().enumerate() {
            let _ = writeln!(s, "prediction.{i} = {} {} {} {}", p.run, p.shape, p.truth, p.predicted);
        }
        s
    }

    /// Reads the `[report]` block written by [`EvaluationReport::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let block = text
            .split_once("[report]")
            .ok_or_else(|| Error::Report("missing [report] block".into()))?
            .1;
        let mut map = std::collections::HashMap::new();
        for line in block.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Report(format!("malformed line {line:?}")))?;
            map.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| map.get(k).ok_or_else(|| Error::Report(format!("missing {k}")));
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Report(format!("bad value for {k}: {v:?}")))
        }
        let protocol: Protocol = get("protocol")?.parse()?;
        let n_classes: usize = num("classes", get("classes")?)?;
        let classes = (0..n_classes)
            .map(|i| get(&format!("class.{i}")).cloned())
            .collect::<Result<Vec<_>>>()?;
        let n_runs: usize = num("runs", get("runs")?)?;
        let mut runs = Vec::with_capacity(n_runs);
        for i in 0..n_runs {
            let f = |field: &str| {
                let key = format!("run.{i}.{field}");
                get(&key).map(|v| (key, v.clone()))
            };
            let (k, v) = f("seed")?;
            let seed = num(&k, &v)?;
            let (k, v) = f("accuracy")?;
            let accuracy = num(&k, &v)?;
            let (k, v) = f("train")?;
            let train = num(&k, &v)?;
            let (k, v) = f("test")?;
            let test = num(&k, &v)?;
            let (k, v) = f("codebook_digest")?;
            let codebook_digest = num(&k, &v)?;
            let (k, v) = f("seconds")?;
            let seconds = num(&k, &v)?;
            runs.push(RunRecord {
                seed,
                accuracy,
                train,
                test,
                codebook_digest,
                seconds,
            });
        }
        let mean = num("mean", get("mean")?)?;
        let std = match get("std")?.as_str() {
            "none" => None,
            v => Some(num("std", v)?),
        };
        let confusion = (0..n_classes)
            .map(|c| {
                let key = format!("confusion.{c}");
                get(&key)?.split_whitespace().map(|v| num(&key, v)).collect()
            })
            .collect::<Result<Vec<Vec<u64>>>>()?;
        let n_pred: usize = num("predictions", get("predictions")?)?;
        let predictions = (0..n_pred)
            .map(|i| {
                let key = format!("prediction.{i}");
                let v: Vec<usize> = get(&key)?
                    .split_whitespace()
                    .map(|x| num(&key, x))
                    .collect::<Result<_>>()?;
                match v[..] {
                    [run, shape, truth, predicted] => Ok(Prediction {
                        run,
                        shape,
                        truth,
                        predicted,
                    }),
                    _ => Err(Error::Report(format!("{key} needs four fields"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvaluationReport {
            protocol,
            classes,
            runs,
            mean,
            std,
            confusion,
            predictions,
        })
    }
}

/// Half-split protocol over precomputed part bags.
pub fn run_half_split_bags(
    bags: &[PartBag],
    labels: &[usize],
    classes: &[String],
    config: &ExperimentConfig,
) -> Result<EvaluationReport> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.seeds as u64).map(|i| config.seed + i).collect();
    let results: Vec<(RunRecord, Vec<Prediction>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(run, &seed)| {
            let start = Instant::now();
            let (train_idx, test_idx) = stratified_half_split(labels, classes.len(), seed)?;
            let train_bags: Vec<&PartBag> = train_idx.iter().map(|&i| &bags[i]).collect();
            let (codebook, digest) = fit_codebook(&train_bags, config, seed)?;
            let subset: Vec<PartBag> = train_idx.iter().chain(&test_idx).map(|&i| bags[i].clone()).collect();
            let encoded = encode_all(&subset, config, &codebook)?;
            let (train_x, test_x) = encoded.split_at(train_idx.len());
            let train_y: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
            let (svm, _) = train(train_x, &train_y, classes.to_vec(), &svm_params(config, seed))?;
            let mut preds = Vec::with_capacity(test_idx.len());
            for (x, &i) in test_x.iter().zip(&test_idx) {
                preds.push(Prediction {
                    run,
                    shape: i,
                    truth: labels[i],
                    predicted: predict(&svm, x)?,
                });
            }
            let correct = preds.iter().filter(|p| p.truth == p.predicted).count();
            let record = RunRecord {
                seed,
                accuracy: correct as f64 / test_idx.len() as f64,
                train: train_idx.len(),
                test: test_idx.len(),
                codebook_digest: digest,
                seconds: start.elapsed().as_secs_f64(),
            };
            Ok((record, preds))
        })
        .collect::<Result<_>>()?;
    let (runs, preds): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(EvaluationReport::assemble(
        Protocol::HalfSplit,
        classes.to_vec(),
        runs,
        preds.into_iter().flatten().collect(),
    ))
}

pub fn run_half_split(dataset: &Dataset, config: &ExperimentConfig) -> Result<EvaluationReport> {
    let bags = extract_bags(dataset, &config.features)?;
    run_half_split_bags(&bags, &dataset.labels, &dataset.classes, config)
}

/// Leave-one-out with a single codebook fitted to every shape.
pub fn run_leave_one_out(dataset: &Dataset, config: &ExperimentConfig) -> Result<EvaluationReport> {
    config.validate()?;
    if dataset.len() < 2 {
        return Err(Error::Dataset("leave-one-out needs at least two shapes".into()));
    }
    let start = Instant::now();
    let bags = extract_bags(dataset, &config.features)?;
    let refs: Vec<&PartBag> = bags.iter().collect();
    let (codebook, digest) = fit_codebook(&refs, config, config.seed)?;
    let encoded = encode_all(&bags, config, &codebook)?;
    let labels = &dataset.labels;
    let preds: Vec<Prediction> = (0..dataset.len())
        .into_par_iter()
        .map(|held| {
            let idx: Vec<usize> = (0..dataset.len()).filter(|&i| i != held).collect();
            let xs: Vec<BscpVector> = idx.iter().map(|&i| encoded[i].clone()).collect();
            let ys: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let (svm, _) = train(&xs, &ys, dataset.classes.clone(), &svm_params(config, config.seed))?;
            Ok(Prediction {
                run: 0,
                shape: held,
                truth: labels[held],
                predicted: predict(&svm, &encoded[held])?,
            })
        })
        .collect::<Result<_>>()?;
    let correct = preds.iter().filter(|p| p.truth == p.predicted).count();
    let record = RunRecord {
        seed: config.seed,
        accuracy: correct as f64 / preds.len() as f64,
        train: dataset.len() - 1,
        test: 1,
        codebook_digest: digest,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(EvaluationReport::assemble(
        Protocol::LeaveOneOut,
        dataset.classes.clone(),
        vec![record],
        preds,
    ))
}

pub fn evaluate(dataset: &Dataset, config: &ExperimentConfig) -> Result<EvaluationReport> {
    match config.protocol {
        Protocol::HalfSplit => run_half_split(dataset, config),
        Protocol::LeaveOneOut => run_leave_one_out(dataset, config),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    ThicknessBins,
    ReferencePoints,
    CodebookSize,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_td" => Ok(SweepParam::ThicknessBins),
            "n_r" => Ok(SweepParam::ReferencePoints),
            "k" => Ok(SweepParam::CodebookSize),
            other => Err(Error::InvalidArgument(format!(
                "cannot sweep {other:?}; use n_td, n_r or k"
            ))),
        }
    }
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::ThicknessBins => "n_td",
            SweepParam::ReferencePoints => "n_r",
            SweepParam::CodebookSize => "k",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: usize,
    pub mean: f64,
    pub std: f64,
    pub report: EvaluationReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Whitespace-separated columns, one row per value.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {} mean_accuracy std\n", self.param.key());
        for r in &self.rows {
            let _ = writeln!(s, "{} {} {}", r.value, r.mean, r.std);
        }
        s
    }
}

/// Half-split evaluation for each value of one parameter.
pub fn sweep(dataset: &Dataset, config: &ExperimentConfig, param: SweepParam, values: &[usize]) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    let mut cached: Option<(FeatureConfig, Vec<PartBag>)> = None;
    for &value in values {
        let mut cfg = config.clone();
        cfg.protocol = Protocol::HalfSplit;
        cfg.set(param.key(), &value.to_string())?;
        cfg.validate()?;
        let same_parts = cached.as_ref().is_some_and(|(f, _)| {
            f.n_c == cfg.features.n_c
                && f.t == cfg.features.t
                && f.prune_ratio == cfg.features.prune_ratio
                && f.descriptor.n_s == cfg.features.descriptor.n_s
                && f.descriptor.n_r == cfg.features.descriptor.n_r
        });
        if !same_parts {
            cached = Some((cfg.features, extract_bags(dataset, &cfg.features)?));
        }
        let bags = &cached.as_ref().expect("bags extracted above").1;
        let report = run_half_split_bags(bags, &dataset.labels, &dataset.classes, &cfg)?;
        rows.push(SweepRow {
            value,
            mean: report.mean,
            std: report.std.unwrap_or(0.0),
            report,
        });
    }
    Ok(SweepTable { param, rows })
}
