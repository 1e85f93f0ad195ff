//! Trains a model, writes it to disk, reads it back and classifies new shapes.

use bscp::config::ExperimentConfig;
use bscp::experiment::train_model;
use bscp::model_io::{load_model, save_model, to_bytes};
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 100;
    let train = four_class_dataset(8, 1)?;
    let model = train_model(&train, &cfg)?;

    let path = std::env::temp_dir().join("bscp_example.model");
    save_model(&model, &path)?;
    let loaded = load_model(&path)?;
    println!(
        "wrote {} ({} bytes); reloaded model is identical: {}",
        path.display(),
        std::fs::metadata(&path)?.len(),
        to_bytes(&loaded)? == to_bytes(&model)?
    );

    let fresh = four_class_dataset(3, 99)?;
    for ((mask, &label), name) in fresh.masks.iter().zip(&fresh.labels).zip(&fresh.names) {
        let (_, predicted) = loaded.predict(mask)?;
        println!("{name:24} true {:16} predicted {predicted}", fresh.classes[label]);
    }
    Ok(())
}
