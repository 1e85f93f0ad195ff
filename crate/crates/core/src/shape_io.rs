//! Binary shape masks: loading, outer-contour tracing and PCA pose normalization.
//!
//! Coordinates are pixel centres with `x` to the right and `y` down. A contour
//! is "anticlockwise" when its shoelace area in these coordinates is positive,
//! which is the anticlockwise sense once the `y` axis is flipped to point up.

use std::collections::VecDeque;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Raster shape with a single 8-connected foreground component that never
/// touches the image border.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    original_size: (usize, usize),
}

/// Axis-aligned box over pixel centres, bounds inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

const NEIGHBORS_8: [(isize, isize); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];

impl BinaryMask {
    /// Builds a mask with load semantics: keeps the largest 8-connected
    /// component and pads the raster with one background pixel on every side.
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: bits.len(),
            });
        }
        let kept = largest_component(width, height, &bits);
        if !kept.iter().any(|&b| b) {
            return Err(Error::EmptyForeground);
        }
        let (pw, ph) = (width + 2, height + 2);
        let mut padded = vec![false; pw * ph];
        for y in 0..height {
            let src = &kept[y * width..(y + 1) * width];
            padded[(y + 1) * pw + 1..(y + 1) * pw + 1 + width].copy_from_slice(src);
        }
        Ok(BinaryMask {
            width: pw,
            height: ph,
            bits: padded,
            original_size: (width, height),
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::from_bits(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Size of the raster before padding.
    pub fn original_size(&self) -> (usize, usize) {
        self.original_size
    }

    /// Foreground test; anything outside the raster is background.
    pub fn get(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn foreground_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn foreground_points(&self) -> Vec<Point> {
        self.foreground_pixels().map(|(x, y)| [x as f64, y as f64]).collect()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.foreground_pixels();
        let (x0, y0) = it.next()?;
        let mut bb = BoundingBox {
            min_x: x0 as f64,
            min_y: y0 as f64,
            max_x: x0 as f64,
            max_y: y0 as f64,
        };
        for (x, y) in it {
            bb.min_x = bb.min_x.min(x as f64);
            bb.max_x = bb.max_x.max(x as f64);
            bb.min_y = bb.min_y.min(y as f64);
            bb.max_y = bb.max_y.max(y as f64);
        }
        Some(bb)
    }

    /// Mirror image about the vertical axis.
    pub fn flipped_horizontal(&self) -> BinaryMask {
        let mut bits = vec![false; self.bits.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                bits[y * self.width + (self.width - 1 - x)] = self.bits[y * self.width + x];
            }
        }
        BinaryMask { bits, ..self.clone() }
    }

    pub fn to_gray_image(&self) -> image::GrayImage {
        image::GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            image::Luma([if self.bits[y as usize * self.width + x as usize] {
                255
            } else {
                0
            }])
        })
    }

    /// Crops to the tight foreground box plus one pixel of padding.
    fn cropped(width: usize, height: usize, bits: &[bool]) -> Result<BinaryMask> {
        let mut min = (usize::MAX, usize::MAX);
        let mut max = (0, 0);
        for y in 0..height {
            for x in 0..width {
                if bits[y * width + x] {
                    min = (min.0.min(x), min.1.min(y));
                    max = (max.0.max(x), max.1.max(y));
                }
            }
        }
        if min.0 == usize::MAX {
            return Err(Error::EmptyForeground);
        }
        let (cw, ch) = (max.0 - min.0 + 1, max.1 - min.1 + 1);
        let mut out = vec![false; cw * ch];
        for y in 0..ch {
            for x in 0..cw {
                out[y * cw + x] = bits[(y + min.1) * width + x + min.0];
            }
        }
        BinaryMask::from_bits(cw, ch, out)
    }
}

/// Keeps only the largest 8-connected foreground component (first in raster
/// order on ties).
pub fn largest_component(width: usize, height: usize, bits: &[bool]) -> Vec<bool> {
    let mut label = vec![0u32; bits.len()];
    let mut best = (0usize, 0u32);
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..bits.len() {
        if !bits[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = ((i % width) as isize, (i / width) as isize);
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if bits[j] && label[j] == 0 {
                    label[j] = next;
                    queue.push_back(j);
                }
            }
        }
        if size > best.0 {
            best = (size, next);
        }
    }
    label.iter().map(|&l| l != 0 && l == best.1).collect()
}

/// Reads an 8-bit grayscale PNG or binary PGM; values >= 128 are foreground.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let img = image::open(path)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?
        .to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let bits = img.pixels().map(|p| p.0[0] >= 128).collect();
    BinaryMask::from_bits(w, h, bits)
}

/// Writes the mask without its one-pixel padding, so that [`load_mask`] on the
/// file gives back the same mask.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (mask.width.saturating_sub(2), mask.height.saturating_sub(2));
    let img = image::GrayImage::from_fn(w as u32, h as u32, |x, y| {
        image::Luma([if mask.get(x as isize + 1, y as isize + 1) {
            255
        } else {
            0
        }])
    });
    img.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Closed polyline, anticlockwise, last point connected to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    points: Vec<Point>,
}

impl Contour {
    pub fn new(points: Vec<Point>) -> Self {
        Contour { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut sum = 0.0;
        for i in 0..n {
            let [x1, y1] = self.points[i];
            let [x2, y2] = self.points[(i + 1) % n];
            sum += x1 * y2 - x2 * y1;
        }
        0.5 * sum
    }

    pub fn perimeter(&self) -> f64 {
        *self.cumulative_lengths().last().unwrap_or(&0.0)
    }

    /// `out[i]` is the arc length from point 0 to point `i`; the final entry
    /// (index `len`) is the closed perimeter.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            acc += dist(self.points[i], self.points[(i + 1) % n]);
            out.push(acc);
        }
        out
    }

    /// `n` points equally spaced by arc length, starting at point 0.
    pub fn resampled(&self, n: usize) -> Contour {
        let cum = self.cumulative_lengths();
        let total = cum[cum.len() - 1];
        let m = self.points.len();
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for k in 0..n {
            let s = total * k as f64 / n as f64;
            while seg + 1 < m && cum[seg + 1] <= s {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
            out.push(lerp(self.points[seg], self.points[(seg + 1) % m], t));
        }
        Contour { points: out }
    }

    pub fn reversed(&self) -> Contour {
        let mut points = self.points.clone();
        points.reverse();
        Contour { points }
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

/// Moore-neighbour trace of the outer boundary, starting at the first
/// foreground pixel in raster order. Returns pixel coordinates in tracing
/// order without repeating the start pixel.
pub fn trace_boundary(mask: &BinaryMask) -> Result<Vec<(usize, usize)>> {
    // Clockwise on screen: W, NW, N, NE, E, SE, S, SW.
    const DIRS: [(isize, isize); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];
    let dir_index = |dx: isize, dy: isize| DIRS.iter().position(|&d| d == (dx, dy)).unwrap();

    let start = mask
        .foreground_pixels()
        .next()
        .map(|(x, y)| (x as isize, y as isize))
        .ok_or(Error::EmptyForeground)?;

    let step = |cur: (isize, isize), back: usize| -> Option<((isize, isize), usize)> {
        for k in 1..=8 {
            let d = (back + k) % 8;
            let cand = (cur.0 + DIRS[d].0, cur.1 + DIRS[d].1);
            if mask.get(cand.0, cand.1) {
                let prev = (back + k - 1) % 8;
                let b = (cur.0 + DIRS[prev].0, cur.1 + DIRS[prev].1);
                return Some((cand, dir_index(b.0 - cand.0, b.1 - cand.1)));
            }
        }
        None
    };

    let mut path = vec![start];
    // The west neighbour of the first raster pixel is background.
    let Some((first, mut back)) = step(start, 0) else {
        return Err(Error::DegenerateContour(1));
    };
    let mut cur = first;
    let limit = 4 * mask.width() * mask.height() + 8;
    loop {
        if cur == start {
            let (next, _) = step(cur, back).expect("start pixel has a neighbour");
            if next == first {
                break;
            }
        }
        path.push(cur);
        let (next, b) = step(cur, back).expect("traced pixel has a neighbour");
        cur = next;
        back = b;
        if path.len() > limit {
            unreachable!("Moore trace failed to close");
        }
    }
    Ok(path.into_iter().map(|(x, y)| (x as usize, y as usize)).collect())
}

/// Traces the outer boundary and resamples it to `n_points` equally spaced
/// points, oriented anticlockwise.
pub fn trace_contour(mask: &BinaryMask, n_points: usize) -> Result<Contour> {
    let raw = trace_boundary(mask)?;
    let mut distinct = raw.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 8 {
        return Err(Error::DegenerateContour(distinct.len()));
    }
    let mut contour = Contour::new(raw.iter().map(|&(x, y)| [x as f64, y as f64]).collect());
    if contour.signed_area() < 0.0 {
        // keep point 0 as the start after reversing
        let mut pts = contour.reversed().points;
        pts.rotate_right(1);
        contour = Contour::new(pts);
    }
    Ok(contour.resampled(n_points))
}

/// Orientation of the dominant eigenvector of the 2x2 covariance of `points`,
/// in `[-pi/2, pi/2)`. Isotropic sets return 0.
pub fn pca_major_axis_angle(points: &[Point]) -> Result<f64> {
    let n = points.len();
    if n < 2 || points.iter().all(|p| p == &points[0]) {
        return Err(Error::TooFewPoints);
    }
    let (sxx, syy, sxy) = covariance(points);
    let diff = sxx - syy;
    let gap = (diff * diff + 4.0 * sxy * sxy).sqrt();
    if gap <= 1e-9 * (sxx + syy) {
        return Ok(0.0);
    }
    let mut angle = 0.5 * (2.0 * sxy).atan2(diff);
    if angle >= std::f64::consts::FRAC_PI_2 {
        angle -= std::f64::consts::PI;
    }
    Ok(angle)
}

fn covariance(points: &[Point]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let (mx, my) = centroid(points);
    let mut s = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        s.0 += dx * dx;
        s.1 += dy * dy;
        s.2 += dx * dy;
    }
    (s.0 / (n - 1.0), s.1 / (n - 1.0), s.2 / (n - 1.0))
}

fn centroid(points: &[Point]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p[0], acc.1 + p[1]));
    (sx / n, sy / n)
}

/// Rigid map taking a shape to its canonical pose: rotate the major axis onto
/// the horizontal (the 4-fold axis for isotropic shapes), turn by 180 degrees
/// if the third central moment of `x` is negative, then mirror `y` if the
/// third central moment of `y` is negative. Vanishing third moments fall back
/// to `x y^2` and to `x^3 y`, `x^5 y` respectively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalPose {
    pub angle: f64,
    pub half_turn: bool,
    pub reflected: bool,
    pub centroid: Point,
}

impl CanonicalPose {
    /// Row-major 2x2 orthogonal matrix applied to `p - centroid`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        let mut m = [[c, s], [-s, c]];
        if self.half_turn {
            m = [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]];
        }
        if self.reflected {
            m[1] = [-m[1][0], -m[1][1]];
        }
        m
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = self.matrix();
        let (dx, dy) = (p[0] - self.centroid[0], p[1] - self.centroid[1]);
        [m[0][0] * dx + m[0][1] * dy, m[1][0] * dx + m[1][1] * dy]
    }
}

/// True when the first of the given moment sums that is clearly non-zero is
/// negative.
fn moments_negative(points: &[Point], moments: &[fn(Point) -> f64]) -> bool {
    for f in moments {
        let (mut m, mut scale) = (0.0, 0.0);
        for &p in points {
            let v = f(p);
            m += v;
            scale += v.abs();
        }
        if m.abs() > 1e-9 * scale {
            return m < 0.0;
        }
    }
    false
}

/// Orientation of the 4-fold symmetry axis, in `[-pi/4, pi/4)`, from the
/// fourth-order complex moment. Used when the covariance is isotropic.
fn fourfold_angle(points: &[Point]) -> f64 {
    let (cx, cy) = centroid(points);
    let (mut re, mut im, mut scale) = (0.0, 0.0, 0.0);
    for p in points {
        let (x, y) = (p[0] - cx, p[1] - cy);
        let (x2, y2) = (x * x, y * y);
        re += x2 * x2 - 6.0 * x2 * y2 + y2 * y2;
        im += 4.0 * x * y * (x2 - y2);
        scale += (x2 + y2) * (x2 + y2);
    }
    if (re * re + im * im).sqrt() <= 1e-9 * scale {
        return 0.0;
    }
    let mut angle = 0.25 * im.atan2(re);
    if angle >= std::f64::consts::FRAC_PI_4 {
        angle -= std::f64::consts::FRAC_PI_2;
    }
    angle
}

pub fn canonical_pose(mask: &BinaryMask) -> Result<CanonicalPose> {
    let points = mask.foreground_points();
    let mut angle = pca_major_axis_angle(&points)?;
    let (sxx, syy, sxy) = covariance(&points);
    if ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt() <= 1e-9 * (sxx + syy) {
        angle = fourfold_angle(&points);
    }
    let (cx, cy) = centroid(&points);
    let mut pose = CanonicalPose {
        angle,
        half_turn: false,
        reflected: false,
        centroid: [cx, cy],
    };
    let posed: Vec<Point> = points.iter().map(|&p| pose.apply(p)).collect();
    pose.half_turn = moments_negative(&posed, &[|p| p[0].powi(3), |p| p[0] * p[1] * p[1]]);
    let posed: Vec<Point> = points.iter().map(|&p| pose.apply(p)).collect();
    pose.reflected = moments_negative(
        &posed,
        &[|p| p[1].powi(3), |p| p[0].powi(3) * p[1], |p| p[0].powi(5) * p[1]],
    );
    Ok(pose)
}

/// Rotates the shape into its canonical pose with nearest-neighbour sampling,
/// keeps the largest component and crops to the foreground box plus one pixel.
pub fn normalize_shape(mask: &BinaryMask) -> Result<BinaryMask> {
    let pose = canonical_pose(mask)?;
    let m = pose.matrix();
    let mapped: Vec<Point> = mask
        .foreground_pixels()
        .map(|(x, y)| pose.apply([x as f64, y as f64]))
        .collect();
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for p in &mapped {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let origin = [lo[0].floor() - 1.0, lo[1].floor() - 1.0];
    let w = (hi[0].ceil() - lo[0].floor()) as usize + 3;
    let h = (hi[1].ceil() - lo[1].floor()) as usize + 3;
    let mut bits = vec![false; w * h];
    for v in 0..h {
        for u in 0..w {
            let (cx, cy) = (origin[0] + u as f64, origin[1] + v as f64);
            // inverse of an orthogonal matrix is its transpose
            let sx = m[0][0] * cx + m[1][0] * cy + pose.centroid[0];
            let sy = m[0][1] * cx + m[1][1] * cy + pose.centroid[1];
            bits[v * w + u] = mask.get(sx.round() as isize, sy.round() as isize);
        }
    }
    let kept = largest_component(w, h, &bits);
    BinaryMask::cropped(w, h, &kept)
}

/// Intersection over union of two masks aligned at their top-left corners.
pub fn aligned_iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (w, h) = (a.width.max(b.width), a.height.max(b.height));
    let (mut inter, mut union) = (0usize, 0usize);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let (pa, pb) = (a.get(x, y), b.get(x, y));
            inter += (pa && pb) as usize;
            union += (pa || pb) as usize;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// 180 degree rotation of the raster.
pub fn rotated_half_turn(mask: &BinaryMask) -> BinaryMask {
    let mut bits = mask.bits.clone();
    bits.reverse();
    BinaryMask { bits, ..mask.clone() }
}
