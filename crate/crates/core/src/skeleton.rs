//! Distance transform, pruned skeleton and contour thickness association.
//!
//! The skeleton is read off the exact Euclidean distance transform: ridge
//! pixels (distance at least 2 and not smaller than at least 6 of their 8
//! neighbours) anchor a distance-ordered homotopic thinning of the filled
//! shape, the result is thinned to one pixel, and terminal branches that add
//! little to the disc reconstruction are pruned. Each skeleton point's radius
//! is its distance value, and every contour point inherits the radius of the
//! skeleton point it generates (or of its arc-length-nearest generating point).

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::shape_io::{dist, BinaryMask, Contour, Point};

const N8: [(isize, isize); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];

/// Euclidean distance from every foreground pixel to the nearest outer
/// boundary pixel centre. Boundary pixels and background hold 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Foreground with every enclosed background region filled in.
pub fn fill_holes(mask: &BinaryMask) -> Vec<bool> {
    let (w, h) = (mask.width(), mask.height());
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !mask.get(x as isize, y as isize) {
                outside[y * w + x] = true;
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        // background is 4-connected when the foreground is 8-connected
        for (dx, dy) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            let i = ny * w + nx;
            if !outside[i] && !mask.get(nx as isize, ny as isize) {
                outside[i] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    outside.iter().map(|&o| !o).collect()
}

/// Foreground pixels of the filled shape with a 4-neighbour outside it.
pub fn boundary_pixels(filled: &[bool], width: usize, height: usize) -> Vec<bool> {
    let inside = |x: isize, y: isize| {
        x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height && filled[y as usize * width + x as usize]
    };
    (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as isize, (i / width) as isize);
            filled[i]
                && [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|(dx, dy)| !inside(x + dx, y + dy))
        })
        .collect()
}

/// Squared 1-D distance transform of sampled function `f` (lower envelope of
/// parabolas). Infinite entries are not sites.
fn squared_dt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let qf = q as f64;
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let vk = v[k as usize] as f64;
            let s = ((f[q] + qf * qf) - (f[v[k as usize]] + vk * vk)) / (2.0 * qf - 2.0 * vk);
            if s <= z[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k as usize] = q;
            z[k as usize] = s;
            z[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        out.fill(f64::INFINITY);
        return;
    }
    let mut j = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let d = q as f64 - v[j] as f64;
        *o = d * d + f[v[j]];
    }
}

/// Exact Euclidean distance transform to the outer boundary pixels.
pub fn distance_transform(mask: &BinaryMask) -> DistanceField {
    let (w, h) = (mask.width(), mask.height());
    let filled = fill_holes(mask);
    let boundary = boundary_pixels(&filled, w, h);
    let mut grid: Vec<f64> = boundary.iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
    let n = w.max(h);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0f64; n + 1]);
    let (mut col, mut out) = (vec![0.0; h], vec![0.0; h]);
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        squared_dt_1d(&col, &mut out, &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    let mut row_out = vec![0.0; w];
    for y in 0..h {
        squared_dt_1d(&grid[y * w..(y + 1) * w], &mut row_out, &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&row_out);
    }
    let values = grid
        .iter()
        .zip(&filled)
        .map(|(&d2, &f)| if f { d2.sqrt() } else { 0.0 })
        .collect();
    DistanceField {
        width: w,
        height: h,
        values,
    }
}

/// One-pixel-wide, 8-connected medial skeleton with per-point radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    points: Vec<(usize, usize)>,
    radius: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
}

impl Skeleton {
    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of 8-connected components.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.points.len()];
        let mut count = 0;
        for s in 0..self.points.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(i) = stack.pop() {
                for &j in &self.adjacency[i] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        count
    }
}

struct Grid<'a> {
    w: usize,
    h: usize,
    on: &'a [bool],
}

impl Grid<'_> {
    fn at(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h && self.on[y as usize * self.w + x as usize]
    }

    fn neighbours(&self, i: usize) -> [bool; 8] {
        let (x, y) = ((i % self.w) as isize, (i / self.w) as isize);
        let mut n = [false; 8];
        for (k, (dx, dy)) in N8.iter().enumerate() {
            n[k] = self.at(x + dx, y + dy);
        }
        n
    }
}

/// Yokoi connectivity number for 8-connected foreground; a pixel is simple
/// (deletable without changing topology) iff it equals 1.
fn connectivity_number(n: &[bool; 8]) -> u32 {
    let c = |k: usize| u32::from(!n[k % 8]);
    [0, 2, 4, 6].iter().map(|&k| c(k) - c(k) * c(k + 1) * c(k + 2)).sum()
}

fn thin(on: &mut [bool], w: usize, h: usize, order: &[usize], keep: impl Fn(usize, &[bool; 8]) -> bool) {
    loop {
        let mut changed = false;
        for &i in order {
            if !on[i] {
                continue;
            }
            let n = Grid { w, h, on }.neighbours(i);
            if connectivity_number(&n) == 1 && !keep(i, &n) {
                on[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Ridge-anchored thinning of the distance transform followed by pruning of
/// terminal branches whose discs stick out of their junction disc by less
/// than `prune_ratio` times the largest radius.
pub fn extract_skeleton(mask: &BinaryMask, field: &DistanceField, prune_ratio: f64) -> Result<Skeleton> {
    let (w, h) = (mask.width(), mask.height());
    if field.width() != w || field.height() != h {
        return Err(Error::DimensionMismatch {
            expected: w * h,
            got: field.width() * field.height(),
        });
    }
    let max_r = field.max();
    if max_r < 2.0 {
        return Err(Error::TooThin(max_r));
    }
    let dt = field.values();
    let mut on = fill_holes(mask);
    let anchor: Vec<bool> = (0..w * h)
        .map(|i| {
            if !on[i] || dt[i] < 2.0 {
                return false;
            }
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            let lower = N8
                .iter()
                .filter(|(dx, dy)| {
                    let (nx, ny) = (x + dx, y + dy);
                    let d = if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        0.0
                    } else {
                        dt[ny as usize * w + nx as usize]
                    };
                    dt[i] >= d
                })
                .count();
            lower >= 6
        })
        .collect();

    let mut order: Vec<usize> = (0..w * h).filter(|&i| on[i]).collect();
    order.sort_by(|&a, &b| dt[a].total_cmp(&dt[b]).then(a.cmp(&b)));

    thin(&mut on, w, h, &order, |i, _| anchor[i]);
    thin(&mut on, w, h, &order, |_, n| n.iter().filter(|&&b| b).count() < 2);

    prune(&mut on, w, h, dt, prune_ratio * max_r);

    let points: Vec<(usize, usize)> = (0..w * h).filter(|&i| on[i]).map(|i| (i % w, i / w)).collect();
    let index_of = |x: isize, y: isize| -> Option<usize> {
        points
            .binary_search_by(|&(px, py)| (py, px).cmp(&(y as usize, x as usize)))
            .ok()
    };
    let grid = Grid { w, h, on: &on };
    let adjacency = points
        .iter()
        .map(|&(x, y)| {
            N8.iter()
                .filter(|(dx, dy)| grid.at(x as isize + dx, y as isize + dy))
                .filter_map(|(dx, dy)| index_of(x as isize + dx, y as isize + dy))
                .collect()
        })
        .collect();
    let radius = points.iter().map(|&(x, y)| field.get(x, y)).collect();
    Ok(Skeleton {
        points,
        radius,
        adjacency,
    })
}

fn degree(grid: &Grid<'_>, i: usize) -> usize {
    grid.neighbours(i).iter().filter(|&&b| b).count()
}

fn neighbour_indices(w: usize, h: usize, on: &[bool], i: usize) -> Vec<usize> {
    let (x, y) = ((i % w) as isize, (i / w) as isize);
    let grid = Grid { w, h, on };
    N8.iter()
        .filter(|(dx, dy)| grid.at(x + dx, y + dy))
        .map(|(dx, dy)| (y + dy) as usize * w + (x + dx) as usize)
        .collect()
}

/// Walks from an end point to the first junction. Returns the branch pixels
/// (excluding the junction) and the junction, or `None` for the junction when
/// the walk reaches another end point.
fn walk_branch(w: usize, h: usize, on: &[bool], start: usize) -> (Vec<usize>, Option<usize>) {
    let grid = Grid { w, h, on };
    let mut branch = Vec::new();
    let mut cur = start;
    loop {
        if degree(&grid, cur) >= 3 {
            return (branch, Some(cur));
        }
        branch.push(cur);
        let next = neighbour_indices(w, h, on, cur)
            .into_iter()
            .find(|j| !branch.contains(j));
        match next {
            Some(j) => cur = j,
            None => return (branch, None),
        }
    }
}

fn pixel_dist(w: usize, a: usize, b: usize) -> f64 {
    let (ax, ay) = ((a % w) as f64, (a / w) as f64);
    let (bx, by) = ((b % w) as f64, (b / w) as f64);
    ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
}

/// How far the branch's discs reach beyond the anchor disc.
fn contribution(w: usize, dt: &[f64], branch: &[usize], anchor: usize) -> f64 {
    branch
        .iter()
        .map(|&p| dt[p] + pixel_dist(w, p, anchor) - dt[anchor])
        .fold(0.0, f64::max)
}

fn prune(on: &mut [bool], w: usize, h: usize, dt: &[f64], threshold: f64) {
    loop {
        let ends: Vec<usize> = (0..w * h)
            .filter(|&i| on[i] && degree(&Grid { w, h, on }, i) == 1)
            .collect();
        if ends.is_empty() {
            return;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut simple_path = false;
        for &e in &ends {
            let (branch, junction) = walk_branch(w, h, on, e);
            let Some(j) = junction else {
                simple_path = true;
                break;
            };
            let c = contribution(w, dt, &branch, j);
            if c < threshold && best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, branch));
            }
        }
        if simple_path {
            prune_path(on, w, h, dt, threshold);
            return;
        }
        match best {
            Some((_, branch)) => {
                for p in branch {
                    on[p] = false;
                }
            }
            None => return,
        }
    }
}

/// A junction-free skeleton: split at its largest-radius pixel and drop each
/// half that contributes less than the threshold.
fn prune_path(on: &mut [bool], w: usize, h: usize, dt: &[f64], threshold: f64) {
    let pixels: Vec<usize> = (0..w * h).filter(|&i| on[i]).collect();
    let Some(&centre) = pixels.iter().max_by(|&&a, &&b| dt[a].total_cmp(&dt[b]).then(b.cmp(&a))) else {
        return;
    };
    let ends: Vec<usize> = pixels
        .iter()
        .copied()
        .filter(|&i| degree(&Grid { w, h, on }, i) == 1 && i != centre)
        .collect();
    let mut remove = Vec::new();
    for e in ends {
        let mut half = Vec::new();
        let mut cur = e;
        while cur != centre {
            half.push(cur);
            let next = neighbour_indices(w, h, on, cur)
                .into_iter()
                .filter(|j| !half.contains(j))
                .min_by(|&a, &b| pixel_dist(w, a, centre).total_cmp(&pixel_dist(w, b, centre)));
            match next {
                Some(j) => cur = j,
                None => break,
            }
        }
        if contribution(w, dt, &half, centre) < threshold {
            remove.extend(half);
        }
    }
    for p in remove {
        on[p] = false;
    }
}

/// Contour points nearest to each of the eight neighbours of `p` (ties to the
/// lowest contour index), sorted and deduplicated.
pub fn generating_points(p: (usize, usize), contour: &Contour) -> Vec<usize> {
    let mut out: Vec<usize> = N8
        .iter()
        .map(|(dx, dy)| {
            let q = [p.0 as f64 + *dx as f64, p.1 as f64 + *dy as f64];
            let mut best = (f64::INFINITY, 0usize);
            for (i, c) in contour.points().iter().enumerate() {
                let d = (c[0] - q[0]).powi(2) + (c[1] - q[1]).powi(2);
                if d < best.0 {
                    best = (d, i);
                }
            }
            best.1
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Contour whose points carry the object thickness of their skeleton point.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedContour {
    pub contour: Contour,
    pub thickness: Vec<f64>,
    /// True at generating points.
    pub flagged: Vec<bool>,
    /// Skeleton point a generating point is mapped to.
    pub mapped: Vec<Option<usize>>,
}

impl AssociatedContour {
    pub fn len(&self) -> usize {
        self.contour.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contour.is_empty()
    }

    /// Text table `contour_index x y thickness flagged`.
    pub fn thickness_table(&self) -> String {
        let mut out = String::from("contour_index x y thickness flagged\n");
        for (i, p) in self.contour.points().iter().enumerate() {
            let _ = writeln!(
                out,
                "{i} {:.3} {:.3} {:.4} {}",
                p[0],
                p[1],
                self.thickness[i],
                u8::from(self.flagged[i])
            );
        }
        out
    }
}

/// Assigns each contour point the radius of its generating skeleton point, or
/// of the generating point nearest along the contour.
///
/// A contour point claimed by several skeleton points maps to the one whose
/// distance to it is closest to its radius (lowest skeleton index on ties).
pub fn associate_thickness(contour: &Contour, skeleton: &Skeleton) -> Result<AssociatedContour> {
    let n = contour.len();
    let mut mapped: Vec<Option<(usize, f64)>> = vec![None; n];
    for (s, &p) in skeleton.points().iter().enumerate() {
        let r = skeleton.radius()[s];
        let centre: Point = [p.0 as f64, p.1 as f64];
        for q in generating_points(p, contour) {
            let residual = (dist(centre, contour.points()[q]) - r).abs();
            if mapped[q].is_none_or(|(_, best)| residual < best) {
                mapped[q] = Some((s, residual));
            }
        }
    }
    let flagged_idx: Vec<usize> = (0..n).filter(|&i| mapped[i].is_some()).collect();
    if flagged_idx.is_empty() {
        return Err(Error::NoGeneratingPoints);
    }
    let cum = contour.cumulative_lengths();
    let perimeter = cum[n];
    let thickness = (0..n)
        .map(|q| {
            if let Some((s, _)) = mapped[q] {
                return skeleton.radius()[s];
            }
            let mut best = (f64::INFINITY, 0usize);
            for &f in &flagged_idx {
                let fwd = (cum[f] - cum[q]).rem_euclid(perimeter);
                let l = fwd.min(perimeter - fwd);
                if l < best.0 {
                    best = (l, f);
                }
            }
            skeleton.radius()[mapped[best.1].unwrap().0]
        })
        .collect();
    Ok(AssociatedContour {
        contour: contour.clone(),
        thickness,
        flagged: mapped.iter().map(Option::is_some).collect(),
        mapped: mapped.iter().map(|m| m.map(|(s, _)| s)).collect(),
    })
}

/// Foreground at 96, skeleton at 255, background 0.
pub fn skeleton_overlay(mask: &BinaryMask, skeleton: &Skeleton) -> image::GrayImage {
    let mut img = image::GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        image::Luma([if mask.get(x as isize, y as isize) { 96 } else { 0 }])
    });
    for &(x, y) in skeleton.points() {
        img.put_pixel(x as u32, y as u32, image::Luma([255]));
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape_io::trace_contour;

    fn rect(w: usize, h: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |_, _| true).unwrap()
    }

    fn disc(r: f64) -> BinaryMask {
        let n = (2.0 * r) as usize + 5;
        let c = (n / 2) as f64;
        BinaryMask::from_fn(n, n, |x, y| (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= r * r).unwrap()
    }

    fn brute_force_dt(mask: &BinaryMask) -> Vec<f64> {
        let filled = fill_holes(mask);
        let (w, h) = (mask.width(), mask.height());
        let b = boundary_pixels(&filled, w, h);
        let sites: Vec<(f64, f64)> = (0..w * h)
            .filter(|&i| b[i])
            .map(|i| ((i % w) as f64, (i / w) as f64))
            .collect();
        (0..w * h)
            .map(|i| {
                if !filled[i] {
                    return 0.0;
                }
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                sites
                    .iter()
                    .map(|(sx, sy)| ((x - sx).powi(2) + (y - sy).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn boundary_pixels_are_zero() {
        let m = rect(20, 10);
        let f = distance_transform(&m);
        assert_eq!(f.get(1, 1), 0.0);
        assert_eq!(f.get(10, 1), 0.0);
        assert_eq!(f.get(0, 0), 0.0);
    }

    #[test]
    fn disc_centre_distance() {
        let r = 20.0;
        let m = disc(r);
        let f = distance_transform(&m);
        let c = m.width() / 2;
        assert!((f.get(c, c) - r).abs() <= 1.0, "{}", f.get(c, c));
    }

    #[test]
    fn matches_brute_force_on_blob() {
        let m = BinaryMask::from_fn(40, 30, |x, y| {
            let (x, y) = (x as f64, y as f64);
            (x - 14.0).powi(2) / 120.0 + (y - 14.0).powi(2) / 60.0 <= 1.0
                || (x > 18.0 && x < 36.0 && y > 10.0 && y < 20.0)
        })
        .unwrap();
        let f = distance_transform(&m);
        for (a, b) in f.values().iter().zip(brute_force_dt(&m)) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn holes_are_ignored() {
        let m = BinaryMask::from_fn(30, 30, |x, y| !(12..18).contains(&x) || !(12..18).contains(&y)).unwrap();
        let f = distance_transform(&m);
        assert!(f.get(15, 15) > 10.0);
    }

    #[test]
    fn thin_foreground_is_rejected() {
        let m = rect(40, 3);
        let f = distance_transform(&m);
        assert!(matches!(extract_skeleton(&m, &f, 0.08), Err(Error::TooThin(_))));
    }

    #[test]
    fn rectangle_centre_line() {
        let (w, h) = (120usize, 21usize);
        let m = rect(w, h);
        let f = distance_transform(&m);
        let s = extract_skeleton(&m, &f, 0.08).unwrap();
        assert_eq!(s.component_count(), 1);
        let cy = 1 + h / 2;
        let mid: Vec<usize> = (0..s.len())
            .filter(|&i| s.points()[i].1 == cy && (30..90).contains(&s.points()[i].0))
            .collect();
        assert_eq!(mid.len(), 60);
        for i in mid {
            assert!((s.radius()[i] - h as f64 / 2.0).abs() <= 1.0);
        }
    }

    #[test]
    fn disc_skeleton_collapses_to_centre() {
        let m = disc(30.0);
        let f = distance_transform(&m);
        let s = extract_skeleton(&m, &f, 0.08).unwrap();
        let c = (m.width() / 2) as f64;
        for &(x, y) in s.points() {
            assert!(
                ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt() <= 2.0,
                "{x},{y}"
            );
        }
    }

    #[test]
    fn skeleton_points_are_inside_with_positive_radius() {
        let m = BinaryMask::from_fn(80, 60, |x, y| {
            let (x, y) = (x as f64 - 40.0, y as f64 - 30.0);
            let r = (x * x + y * y).sqrt();
            let a = y.atan2(x);
            r <= 22.0 * (1.0 + 0.35 * (4.0 * a).cos())
        })
        .unwrap();
        let f = distance_transform(&m);
        let s = extract_skeleton(&m, &f, 0.08).unwrap();
        assert_eq!(s.component_count(), 1);
        for (i, &(x, y)) in s.points().iter().enumerate() {
            assert!(m.get(x as isize, y as isize));
            assert!(s.radius()[i] > 0.0);
        }
        for (i, adj) in s.adjacency().iter().enumerate() {
            for &j in adj {
                assert!(s.adjacency()[j].contains(&i));
            }
        }
    }

    #[test]
    fn generating_points_on_rectangle_sides() {
        let (w, h) = (121usize, 31usize);
        let m = rect(w, h);
        let c = trace_contour(&m, 256).unwrap();
        // interior spans x in [1, w], y in [1, h]; centre row is 1 + h/2
        let p = (61, 1 + h / 2);
        let g = generating_points(p, &c);
        let (top, bottom) = (1.0, h as f64);
        let near = |side: f64| {
            g.iter()
                .map(|&i| c.points()[i])
                .filter(|q| (q[1] - side).abs() < 0.5)
                .map(|q| (q[0] - p.0 as f64).abs())
                .fold(f64::INFINITY, f64::min)
        };
        assert!(near(top) <= 1.0, "{}", near(top));
        assert!(near(bottom) <= 1.0, "{}", near(bottom));
        assert!(g.iter().all(|&i| {
            let q = c.points()[i];
            (q[1] - top).abs() < 0.5 || (q[1] - bottom).abs() < 0.5
        }));
    }

    #[test]
    fn generating_points_of_disc_centre() {
        let r = 25.0;
        let m = disc(r);
        let c = trace_contour(&m, 256).unwrap();
        let centre = m.width() / 2;
        let f = distance_transform(&m);
        let g = generating_points((centre, centre), &c);
        assert!(!g.is_empty());
        for i in g {
            let q = c.points()[i];
            let d = ((q[0] - centre as f64).powi(2) + (q[1] - centre as f64).powi(2)).sqrt();
            assert!((d - f.get(centre, centre)).abs() <= 1.5, "{d}");
        }
    }

    #[test]
    fn flagged_points_take_their_skeleton_radius() {
        let m = rect(90, 25);
        let c = trace_contour(&m, 256).unwrap();
        let f = distance_transform(&m);
        let s = extract_skeleton(&m, &f, 0.08).unwrap();
        let a = associate_thickness(&c, &s).unwrap();
        assert!(a.flagged.iter().any(|&b| b));
        for q in 0..a.len() {
            assert!(a.thickness[q] > 0.0 && a.thickness[q] <= f.max());
            if let Some(sk) = a.mapped[q] {
                assert!(a.flagged[q]);
                assert_eq!(a.thickness[q], s.radius()[sk]);
                let (px, py) = s.points()[sk];
                let d = dist([px as f64, py as f64], c.points()[q]);
                assert!((d - s.radius()[sk]).abs() <= 1.5);
            }
        }
        let table = a.thickness_table();
        assert_eq!(table.lines().count(), 257);
    }
}
