use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bscp::config::{ExperimentConfig, Protocol};
use bscp::dataset::Dataset;
use bscp::descriptor::part_descriptor;
use bscp::experiment::{evaluate, sweep, train_model, SweepParam};
use bscp::model_io::{load_model, save_model};
use bscp::pipeline::extract_shape;
use bscp::shape_io::{load_mask, save_mask};
use bscp::skeleton::skeleton_overlay;
use bscp::synth::{four_class_dataset, thickness_dataset};
use bscp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bscp",
    version,
    about = "Shape classification with skeleton-associated contour parts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Dataset root with one subdirectory per class
    #[arg(long)]
    data: Option<PathBuf>,
    /// `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    HalfSplit,
    Loo,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthSet {
    FourClass,
    Thickness,
}

#[derive(Subcommand)]
enum Command {
    /// Train codebook and classifier on a dataset and write a model file
    Train(Common),
    /// Evaluate a dataset under a protocol and print the report
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
    },
    /// Classify images with a trained model
    Predict {
        #[command(flatten)]
        common: Common,
        /// Model file written by `train`
        #[arg(long)]
        model: PathBuf,
        /// Images to classify (in addition to --data, which may be a file or directory)
        images: Vec<PathBuf>,
    },
    /// Dump normalized mask, skeleton overlay, thickness table, parts and descriptors of one image
    Extract(Common),
    /// Half-split accuracy for several values of one parameter
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of n_td, n_r, k
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
    /// Write a synthetic dataset as PNGs
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "four-class")]
        set: SynthSet,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
    },
}

fn config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(data) = &common.data {
        cfg.data = Some(data.clone());
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn data_dir(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.data
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--data is required".into()))
}

fn out_path(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.out
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--out is required".into()))
}

/// Prints `text` and also writes it to `--out` when given.
fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(out) = &cfg.out {
        fs::write(out, text)?;
    }
    Ok(())
}

fn images_under(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(path)? {
        let p = entry?.path();
        if p.is_dir() {
            out.extend(images_under(&p)?);
        } else if matches!(
            p.extension().and_then(|e| e.to_str()),
            Some("png" | "pgm" | "PNG" | "PGM")
        ) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn extract(cfg: &ExperimentConfig) -> Result<()> {
    let input = data_dir(cfg)?;
    let out = out_path(cfg)?;
    fs::create_dir_all(out)?;
    let features = extract_shape(&load_mask(input)?, &cfg.features)?;
    let geometry = cfg.features.geometry()?;
    save_mask(&features.normalized, out.join("normalized.png"))?;
    skeleton_overlay(&features.normalized, &features.skeleton)
        .save(out.join("skeleton.png"))
        .map_err(|source| Error::Image {
            path: out.join("skeleton.png"),
            source,
        })?;
    fs::write(out.join("thickness.txt"), features.contour.thickness_table())?;

    let mut sidecar = String::from("start end x y\n");
    let mut matrix = Vec::new();
    let dim = cfg.features.descriptor.dim();
    matrix.extend_from_slice(b"BSCM");
    matrix.extend_from_slice(&(features.parts.len() as u32).to_le_bytes());
    matrix.extend_from_slice(&(dim as u32).to_le_bytes());
    for part in &features.parts {
        sidecar.push_str(&format!(
            "{} {} {} {}\n",
            part.start, part.end, part.median[0], part.median[1]
        ));
        for v in part_descriptor(part, &geometry).values() {
            matrix.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    fs::write(out.join("parts.txt"), sidecar)?;
    fs::write(out.join("descriptors.bscm"), matrix)?;
    println!(
        "{} parts, {} skeleton points, {} critical points written to {}",
        features.parts.len(),
        features.skeleton.len(),
        features.critical.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(common) => {
            let cfg = config(&common)?;
            let data = Dataset::load(data_dir(&cfg)?)?;
            let model = train_model(&data, &cfg)?;
            save_model(&model, out_path(&cfg)?)?;
            println!(
                "trained on {} shapes in {} classes; final objective {}",
                data.len(),
                data.class_count(),
                model.svm.objective
            );
        }
        Command::Eval { common, protocol } => {
            let mut cfg = config(&common)?;
            if let Some(p) = protocol {
                cfg.protocol = match p {
                    ProtocolArg::HalfSplit => Protocol::HalfSplit,
                    ProtocolArg::Loo => Protocol::LeaveOneOut,
                };
            }
            let data = Dataset::load(data_dir(&cfg)?)?;
            let report = evaluate(&data, &cfg)?;
            emit(&cfg, &report.to_text())?;
        }
        Command::Predict { common, model, images } => {
            let cfg = config(&common)?;
            let model = load_model(model)?;
            let mut paths = images;
            if let Some(d) = &cfg.data {
                paths.extend(images_under(d)?);
            }
            if paths.is_empty() {
                return Err(Error::InvalidArgument("no images given".into()));
            }
            let mut text = String::new();
            for p in paths {
                let (class, label) = model.predict(&load_mask(&p)?)?;
                text.push_str(&format!("{} {class} {label}\n", p.display()));
            }
            emit(&cfg, &text)?;
        }
        Command::Extract(common) => extract(&config(&common)?)?,
        Command::Sweep { common, param, values } => {
            let cfg = config(&common)?;
            let param: SweepParam = param.parse()?;
            let data = Dataset::load(data_dir(&cfg)?)?;
            let table = sweep(&data, &cfg, param, &values)?;
            emit(&cfg, &table.to_text())?;
        }
        Command::Synth { common, set, per_class } => {
            let cfg = config(&common)?;
            let data = match set {
                SynthSet::FourClass => four_class_dataset(per_class, cfg.seed)?,
                SynthSet::Thickness => thickness_dataset(per_class, cfg.seed)?,
            };
            let out = out_path(&cfg)?;
            data.save(out)?;
            println!(
                "wrote {} shapes in {} classes to {}",
                data.len(),
                data.class_count(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::FAILURE
        }
    }
}
