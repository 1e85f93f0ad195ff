//! Critical points from discrete contour evolution and the contour parts
//! between every ordered pair of them.

use bscp::descriptor::{dce_critical_points, enumerate_parts, DescriptorConfig};
use bscp::shape_io::{normalize_shape, trace_contour};
use bscp::skeleton::{associate_thickness, distance_transform, extract_skeleton};
use bscp::synth::{class_polygon, rasterize, ShapeClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bscp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mask = normalize_shape(&rasterize(&class_polygon(ShapeClass::Star, &mut rng))?)?;
    let contour = trace_contour(&mask, 256)?;
    let skeleton = extract_skeleton(&mask, &distance_transform(&mask), 0.08)?;
    let assoc = associate_thickness(&contour, &skeleton)?;

    for t in [4, 8, 10] {
        let critical = dce_critical_points(&contour, t)?;
        let parts = enumerate_parts(&assoc, &critical, &DescriptorConfig::default());
        println!(
            "T = {t:2}: critical indices {:?}, {} parts",
            critical.indices,
            parts.len()
        );
    }

    let critical = dce_critical_points(&contour, 10)?;
    let parts = enumerate_parts(&assoc, &critical, &DescriptorConfig::default());
    println!("first parts at T = 10:");
    for part in parts.iter().take(5) {
        let (lo, hi) = part.points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.thickness), hi.max(p.thickness))
        });
        println!(
            "  u{} -> u{}: contour {}..{}, median ({:.1}, {:.1}), relative thickness {lo:.2}..{hi:.2}",
            part.start, part.end, part.start_index, part.end_index, part.median[0], part.median[1]
        );
    }
    Ok(())
}
