//! Distances between the pooled vector of a shape and those of its rotated,
//! mirrored and enlarged copies, next to the distance to another shape of the
//! same class.

use std::f64::consts::PI;

use bscp::config::ExperimentConfig;
use bscp::experiment::{extract_bags, fit_codebook};
use bscp::pipeline::{encode_shape, extract_shape};
use bscp::shape_io::{rotated_half_turn, BinaryMask};
use bscp::synth::{four_class_dataset, four_class_polygons, rasterize, transform};

fn main() -> bscp::Result<()> {
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 200;
    let train = four_class_dataset(6, 1000)?;
    let bags = extract_bags(&train, &cfg.features)?;
    let (codebook, _) = fit_codebook(&bags.iter().collect::<Vec<_>>(), &cfg, 0)?;
    let geometry = cfg.features.geometry()?;
    let encode = |m: &BinaryMask| -> bscp::Result<_> {
        encode_shape(&extract_shape(m, &cfg.features)?.bag(), &geometry, &codebook, cfg.llc_k)
    };
    let resolved = |g: &bscp::encoding::BscpVector, m: &BinaryMask| -> bscp::Result<f64> {
        Ok(g.distance(&encode(m)?).min(g.distance(&encode(&rotated_half_turn(m))?)))
    };

    let shapes = four_class_polygons(2, 2000);
    println!(
        "{:>16} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "class", "rot30", "rot90", "flip", "scale2", "sibling"
    );
    for pair in shapes.chunks(2) {
        let (label, poly) = &pair[0];
        let base = rasterize(&transform(poly, 0.0, 1.0))?;
        let g = encode(&base)?;
        let rot30 = resolved(&g, &rasterize(&transform(poly, PI / 6.0, 1.0))?)?;
        let rot90 = resolved(&g, &rasterize(&transform(poly, PI / 2.0, 1.0))?)?;
        let flip = resolved(&g, &base.flipped_horizontal())?;
        let scale = resolved(&g, &rasterize(&transform(poly, 0.0, 2.0))?)?;
        let sibling = resolved(&g, &rasterize(&pair[1].1)?)?;
        println!(
            "{:>16} {rot30:8.4} {rot90:8.4} {flip:8.4} {scale:8.4} {sibling:8.4}",
            train.classes[*label]
        );
    }
    Ok(())
}
