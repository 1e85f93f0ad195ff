//! Seeded synthetic shape sets built from perturbed polygons.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::shape_io::{BinaryMask, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeClass {
    Ribbon,
    Wedge,
    Star,
    NotchedEllipse,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 4] = [
        ShapeClass::Ribbon,
        ShapeClass::Wedge,
        ShapeClass::Star,
        ShapeClass::NotchedEllipse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeClass::Ribbon => "ribbon",
            ShapeClass::Wedge => "wedge",
            ShapeClass::Star => "star",
            ShapeClass::NotchedEllipse => "notched_ellipse",
        }
    }
}

/// Multiplies `v` by a uniform factor in [0.9, 1.1].
fn jitter(rng: &mut impl Rng, v: f64) -> f64 {
    v * rng.random_range(0.9..=1.1)
}

/// Polygon around a circular-arc centreline of length `length` turning by
/// `bend` radians, with half-width `half_width(s)` for s in [0, 1].
pub fn bent_strip(length: f64, bend: f64, half_width: impl Fn(f64) -> f64) -> Vec<Point> {
    let m = 80;
    let mut centre = Vec::with_capacity(m + 1);
    let mut heading = Vec::with_capacity(m + 1);
    let mut p = [0.0, 0.0];
    let ds = length / m as f64;
    for i in 0..=m {
        let s = i as f64 / m as f64;
        let h = -bend / 2.0 + bend * s;
        centre.push(p);
        heading.push(h);
        let hm = h + bend / (2.0 * m as f64);
        p = [p[0] + ds * hm.cos(), p[1] + ds * hm.sin()];
    }
    let side = |sign: f64, i: usize| {
        let w = half_width(i as f64 / m as f64) * sign;
        let n = [-heading[i].sin(), heading[i].cos()];
        [centre[i][0] + w * n[0], centre[i][1] + w * n[1]]
    };
    let mut poly: Vec<Point> = (0..=m).map(|i| side(1.0, i)).collect();
    poly.extend((0..=m).rev().map(|i| side(-1.0, i)));
    poly
}

pub fn class_polygon(class: ShapeClass, rng: &mut impl Rng) -> Vec<Point> {
    match class {
        ShapeClass::Ribbon => {
            let w = jitter(rng, 9.0);
            bent_strip(jitter(rng, 130.0), jitter(rng, 1.6), |_| w)
        }
        ShapeClass::Wedge => {
            let (tip, base) = (jitter(rng, 3.0), jitter(rng, 24.0));
            bent_strip(jitter(rng, 120.0), 0.0, |s| tip + (base - tip) * s)
        }
        ShapeClass::Star => {
            let (r0, a) = (jitter(rng, 55.0), jitter(rng, 0.35));
            (0..240)
                .map(|i| {
                    let phi = TAU * i as f64 / 240.0;
                    let r = r0 * (1.0 + a * (4.0 * phi).cos());
                    [r * phi.cos(), r * phi.sin()]
                })
                .collect()
        }
        ShapeClass::NotchedEllipse => {
            let (a, b) = (jitter(rng, 65.0), jitter(rng, 38.0));
            let (half, depth) = (jitter(rng, 0.35), jitter(rng, 0.6));
            let m = 200;
            let mut poly: Vec<Point> = (0..=m)
                .map(|i| {
                    let phi = FRAC_PI_2 + half + (TAU - 2.0 * half) * i as f64 / m as f64;
                    [a * phi.cos(), b * phi.sin()]
                })
                .collect();
            poly.push([0.0, b * (1.0 - depth)]);
            poly
        }
    }
}

/// Constant-width or tapered strip. Length, bend and mean half-width are
/// drawn from the same wide ranges for both; the taper runs linearly from
/// 1.25 to 0.75 times the mean half-width.
pub fn thickness_polygon(tapered: bool, rng: &mut impl Rng) -> Vec<Point> {
    let length = rng.random_range(110.0..170.0);
    let bend = rng.random_range(0.6..2.2);
    let w = rng.random_range(7.0..14.0);
    if tapered {
        bent_strip(length, bend, |s| w * (1.25 - 0.5 * s))
    } else {
        bent_strip(length, bend, |_| w)
    }
}

/// Rotates by `angle` and scales by `scale` about the vertex centroid.
pub fn transform(poly: &[Point], angle: f64, scale: f64) -> Vec<Point> {
    let n = poly.len() as f64;
    let c = poly.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0] / n, a[1] + p[1] / n]);
    let (s, co) = angle.sin_cos();
    poly.iter()
        .map(|p| {
            let (x, y) = (p[0] - c[0], p[1] - c[1]);
            [scale * (co * x - s * y), scale * (s * x + co * y)]
        })
        .collect()
}

/// Even-odd fill of the polygon sampled at integer pixel positions, with a
/// few pixels of margin.
pub fn rasterize(poly: &[Point]) -> Result<BinaryMask> {
    if poly.len() < 3 || poly.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::InvalidArgument("polygon needs three finite vertices".into()));
    }
    let margin = 4.0;
    let min_x = poly.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min).floor() - margin;
    let min_y = poly.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).floor() - margin;
    let max_x = poly.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max).ceil() + margin;
    let max_y = poly.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max).ceil() + margin;
    let (w, h) = ((max_x - min_x) as usize + 1, (max_y - min_y) as usize + 1);
    let mut bits = vec![false; w * h];
    let mut xs = Vec::new();
    for row in 0..h {
        let y = min_y + row as f64;
        xs.clear();
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            if (a[1] <= y) != (b[1] <= y) {
                xs.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let from = (pair[0] - min_x).ceil().max(0.0) as usize;
            let to = ((pair[1] - min_x).floor() as isize).min(w as isize - 1);
            for col in from as isize..=to {
                bits[row * w + col as usize] = true;
            }
        }
    }
    BinaryMask::from_bits(w, h, bits)
}

/// Four classes (ribbons, wedges, stars, notched ellipses), each shape under a
/// random rotation.
pub fn four_class_polygons(per_class: usize, seed: u64) -> Vec<(usize, Vec<Point>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(4 * per_class);
    for (label, class) in ShapeClass::ALL.iter().enumerate() {
        for _ in 0..per_class {
            let poly = class_polygon(*class, &mut rng);
            let angle = rng.random_range(-PI..PI);
            out.push((label, transform(&poly, angle, 1.0)));
        }
    }
    out
}

pub fn thickness_polygons(per_class: usize, seed: u64) -> Vec<(usize, Vec<Point>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * per_class);
    for label in 0..2 {
        for _ in 0..per_class {
            let poly = thickness_polygon(label == 1, &mut rng);
            let angle = rng.random_range(-PI..PI);
            out.push((label, transform(&poly, angle, 1.0)));
        }
    }
    out
}

fn to_dataset(classes: &[&str], polys: Vec<(usize, Vec<Point>)>) -> Result<Dataset> {
    let mut data = Dataset::new(classes.iter().map(|c| c.to_string()).collect());
    let mut counters = vec![0usize; classes.len()];
    for (label, poly) in polys {
        let name = format!("{}_{:03}.png", classes[label], counters[label]);
        counters[label] += 1;
        data.push(rasterize(&poly)?, label, name);
    }
    Ok(data)
}

pub fn four_class_dataset(per_class: usize, seed: u64) -> Result<Dataset> {
    let names: Vec<&str> = ShapeClass::ALL.iter().map(|c| c.name()).collect();
    to_dataset(&names, four_class_polygons(per_class, seed))
}

pub fn thickness_dataset(per_class: usize, seed: u64) -> Result<Dataset> {
    to_dataset(&["constant", "tapered"], thickness_polygons(per_class, seed))
}
