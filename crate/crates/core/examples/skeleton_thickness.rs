//! Distance transform, pruned skeleton and the thickness each contour point
//! inherits from it, for a tapered strip.
//!
//! cargo run --release --example skeleton_thickness -- [overlay.png]

use bscp::shape_io::{normalize_shape, trace_contour};
use bscp::skeleton::{associate_thickness, distance_transform, extract_skeleton, skeleton_overlay};
use bscp::synth::{bent_strip, rasterize};

fn main() -> bscp::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("bscp_skeleton.png"));
    let strip = bent_strip(140.0, 1.2, |s| 4.0 + 14.0 * s);
    let mask = normalize_shape(&rasterize(&strip)?)?;

    let field = distance_transform(&mask);
    let skeleton = extract_skeleton(&mask, &field, 0.08)?;
    println!(
        "max inscribed radius {:.2}, skeleton of {} points in {} component(s)",
        field.max(),
        skeleton.len(),
        skeleton.component_count()
    );

    let contour = trace_contour(&mask, 256)?;
    let assoc = associate_thickness(&contour, &skeleton)?;
    let flagged = assoc.flagged.iter().filter(|&&f| f).count();
    println!("{flagged} of {} contour points are generating points", assoc.len());
    println!("thickness along the contour (every 16th point):");
    for (i, (p, t)) in assoc
        .contour
        .points()
        .iter()
        .zip(&assoc.thickness)
        .enumerate()
        .step_by(16)
    {
        println!("  {i:3}  ({:6.1}, {:6.1})  {t:5.2}", p[0], p[1]);
    }

    skeleton_overlay(&mask, &skeleton)
        .save(&out)
        .map_err(|source| bscp::Error::Image {
            path: out.clone(),
            source,
        })?;
    println!("wrote {}", out.display());
    Ok(())
}
