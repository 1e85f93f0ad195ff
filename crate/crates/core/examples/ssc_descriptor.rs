//! Skeleton-associated shape context of one contour part, with and without
//! the thickness axis, and of its mirror.

use bscp::descriptor::{part_descriptor, ssc_histogram, DescriptorConfig};
use bscp::pipeline::{extract_shape, FeatureConfig};
use bscp::synth::{class_polygon, rasterize, ShapeClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bscp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mask = rasterize(&class_polygon(ShapeClass::Wedge, &mut rng))?;
    let shape = extract_shape(&mask, &FeatureConfig::default())?;
    let part = &shape.parts[3];

    for n_td in [1, 5] {
        let geometry = DescriptorConfig {
            n_td,
            ..DescriptorConfig::default()
        }
        .geometry()?;
        let desc = part_descriptor(part, &geometry);
        let nonzero = desc.values().iter().filter(|&&v| v != 0.0).count();
        println!("N_td = {n_td}: {} dimensions, {nonzero} non-zero", desc.dim());
        let hist = ssc_histogram(part, 0, &geometry);
        let mass: u32 = hist.iter().sum();
        let mut per_tau = vec![0u32; geometry.thickness_bins()];
        for (bin, &c) in hist.iter().enumerate() {
            per_tau[bin % geometry.thickness_bins()] += c;
        }
        println!("  first reference: {mass} samples binned, per thickness bin {per_tau:?}");
    }

    let geometry = DescriptorConfig::default().geometry()?;
    let a = part_descriptor(part, &geometry);
    let b = part_descriptor(&part.mirrored(), &geometry);
    let d: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    println!("distance between the part's descriptor and its mirror's: {d:.4}");
    Ok(())
}
