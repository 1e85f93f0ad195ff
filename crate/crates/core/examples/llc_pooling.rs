//! Encodes the parts of one shape against a small codebook, merges each part
//! with its mirror and pools the codes over the spatial pyramid.

use bscp::codebook::{kmeans, sample_training_descriptors, KmeansParams};
use bscp::descriptor::part_descriptor;
use bscp::encoding::{llc_encode, spm_pool, REGIONS};
use bscp::experiment::extract_bags;
use bscp::pipeline::{encode_shape, extract_shape, shape_codes, FeatureConfig};
use bscp::synth::four_class_dataset;

fn main() -> bscp::Result<()> {
    let features = FeatureConfig::default();
    let geometry = features.geometry()?;
    let data = four_class_dataset(4, 2)?;
    let parts: Vec<_> = extract_bags(&data, &features)?.into_iter().map(|b| b.parts).collect();
    let codebook = kmeans(
        &sample_training_descriptors(&parts, &geometry, 30, 2)?,
        &KmeansParams::new(60, 2),
    )?;

    let shape = extract_shape(&data.masks[0], &features)?;
    let f = part_descriptor(&shape.parts[0], &geometry);
    let code = llc_encode(f.values(), &codebook, 5)?;
    let sum: f64 = code.iter().map(|e| e.1).sum();
    println!("code of the first part: {code:.3?} (sum {sum:.12})");

    let bag = shape.bag();
    let codes = shape_codes(&bag, &geometry, &codebook, 5)?;
    let nnz: Vec<usize> = codes.iter().map(|c| c.nnz()).collect();
    println!(
        "{} merged codes, non-zeros per code between {} and {}",
        codes.len(),
        nnz.iter().min().unwrap(),
        nnz.iter().max().unwrap()
    );

    let pooled = spm_pool(&codes, &bag.bbox, codebook.k())?;
    let mut per_level = [0usize; 3];
    for (i, _) in pooled.iter() {
        let region = i / codebook.k();
        per_level[match region {
            0 => 0,
            1..=4 => 1,
            _ => 2,
        }] += 1;
    }
    println!(
        "pooled vector: dimension {} = {REGIONS} x {}, norm {:.12}, non-zeros per level {per_level:?}",
        pooled.dim(),
        codebook.k(),
        pooled.norm()
    );

    let mirrored = extract_shape(&data.masks[0].flipped_horizontal(), &features)?.bag();
    let g = encode_shape(&mirrored, &geometry, &codebook, 5)?;
    println!("distance to the mirror image's vector: {:.2e}", pooled.distance(&g));
    Ok(())
}
