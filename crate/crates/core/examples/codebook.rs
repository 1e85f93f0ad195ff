//! Samples part descriptors (with mirrors) from synthetic shapes and clusters
//! them into a codebook.

use bscp::codebook::{kmeans_with_stats, sample_training_descriptors, KmeansParams};
use bscp::experiment::extract_bags;
use bscp::pipeline::FeatureConfig;
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let features = FeatureConfig::default();
    let data = four_class_dataset(5, 7)?;
    let bags = extract_bags(&data, &features)?;
    let parts: Vec<_> = bags.into_iter().map(|b| b.parts).collect();
    let samples = sample_training_descriptors(&parts, &features.geometry()?, 30, 7)?;
    println!("{} descriptors of dimension {}", samples.rows(), samples.dim());

    let (codebook, stats) = kmeans_with_stats(&samples, &KmeansParams::new(100, 7))?;
    println!(
        "K = {}: {} iterations, converged {}, min codeword distance {:.4}",
        codebook.k(),
        stats.iterations,
        stats.converged,
        codebook.min_pairwise_distance()
    );
    for (i, obj) in stats.objective.iter().enumerate() {
        println!("  iteration {:2}: objective {obj:.3}", i + 1);
    }
    Ok(())
}
