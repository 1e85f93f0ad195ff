//! Leave-one-out evaluation of a small generated set.

use bscp::config::{ExperimentConfig, Protocol};
use bscp::experiment::evaluate;
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let data = four_class_dataset(6, 9)?;
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 100;
    cfg.protocol = Protocol::LeaveOneOut;
    let report = evaluate(&data, &cfg)?;
    println!("{} shapes, {} classes", data.len(), data.class_count());
    println!("accuracy {:.4}", report.mean);
    println!("confusion (rows are true classes):");
    for (name, row) in data.classes.iter().zip(&report.confusion) {
        println!("  {name:>16} {row:?}");
    }
    for p in report.predictions.iter().filter(|p| p.truth != p.predicted) {
        println!(
            "missed {}: {} taken for {}",
            data.names[p.shape], data.classes[p.truth], data.classes[p.predicted]
        );
    }
    Ok(())
}
