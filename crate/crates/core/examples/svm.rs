//! Trains the multi-class linear SVM on encoded synthetic shapes and reports
//! the objective trace and training accuracy.

use bscp::classifier::{predict, train, SvmParams};
use bscp::config::ExperimentConfig;
use bscp::experiment::{encode_all, extract_bags, fit_codebook};
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 100;
    let data = four_class_dataset(10, 5)?;
    let bags = extract_bags(&data, &cfg.features)?;
    let (codebook, _) = fit_codebook(&bags.iter().collect::<Vec<_>>(), &cfg, 5)?;
    let features = encode_all(&bags, &cfg, &codebook)?;

    let params = SvmParams {
        alpha: cfg.alpha,
        epochs: cfg.epochs,
        seed: 5,
    };
    let (model, trace) = train(&features, &data.labels, data.classes.clone(), &params)?;
    for (epoch, obj) in trace.objective.iter().enumerate().step_by(20) {
        println!("epoch {:3}: objective {obj:.4}", epoch + 1);
    }
    println!(
        "final objective {:.4} after {} updates",
        model.objective, model.iterations
    );

    let correct = features
        .iter()
        .zip(&data.labels)
        .filter(|(g, &y)| predict(&model, g).is_ok_and(|p| p == y))
        .count();
    println!("training accuracy {correct}/{}", data.len());
    Ok(())
}
