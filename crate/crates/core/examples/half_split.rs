//! Half-split evaluation over several seeds on a dataset directory, or on a
//! generated four-class set.
//!
//! cargo run --release --example half_split -- [dataset_dir]

use bscp::config::ExperimentConfig;
use bscp::dataset::Dataset;
use bscp::experiment::run_half_split;
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(dir) => Dataset::load(dir)?,
        None => four_class_dataset(12, 0)?,
    };
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 150;
    cfg.seeds = 4;
    let report = run_half_split(&data, &cfg)?;
    println!("{} shapes, {} classes", data.len(), data.class_count());
    for run in &report.runs {
        println!(
            "  seed {:>2}: accuracy {:.4} ({} test shapes)",
            run.seed, run.accuracy, run.test
        );
    }
    match report.std {
        Some(std) => println!("mean accuracy {:.4} +- {std:.4}", report.mean),
        None => println!("accuracy {:.4}", report.mean),
    }
    println!("confusion (rows are true classes):");
    for (name, row) in data.classes.iter().zip(&report.confusion) {
        println!("  {name:>16} {row:?}");
    }
    Ok(())
}
