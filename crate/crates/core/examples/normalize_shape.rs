//! Loads a mask (or draws a synthetic star), puts it in canonical pose and
//! writes the result.
//!
//! cargo run --release --example normalize_shape -- [mask.png] [out.png]

use std::f64::consts::PI;

use bscp::shape_io::{aligned_iou, canonical_pose, load_mask, normalize_shape, rotated_half_turn, save_mask};
use bscp::synth::{class_polygon, rasterize, transform, ShapeClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bscp::Result<()> {
    let mut args = std::env::args().skip(1);
    let mask = match args.next() {
        Some(path) => load_mask(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let poly = class_polygon(ShapeClass::NotchedEllipse, &mut rng);
            rasterize(&transform(&poly, 0.4 * PI, 1.0))?
        }
    };
    let out = args
        .next()
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("bscp_normalized.png"));

    let pose = canonical_pose(&mask)?;
    println!(
        "{}x{} mask, {} foreground pixels",
        mask.width(),
        mask.height(),
        mask.foreground_count()
    );
    println!("canonical pose matrix {:?}", pose.matrix());

    let normalized = normalize_shape(&mask)?;
    let again = normalize_shape(&rotated_half_turn(&mask))?;
    let mirrored = normalize_shape(&mask.flipped_horizontal())?;
    println!(
        "IoU with the normalized half-turned mask: {:.4}",
        aligned_iou(&normalized, &again)
    );
    println!(
        "IoU with the normalized mirror image:     {:.4}",
        aligned_iou(&normalized, &mirrored)
    );

    save_mask(&normalized, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
