//! Contour parts from discrete contour evolution, and the skeleton-associated
//! shape context (SSC) descriptor of each part.
//!
//! A part is the anticlockwise fragment between two critical points. It is
//! resampled to `n_s` points carrying `(x, y, thickness)`; the descriptor of a
//! part concatenates, for `n_r` reference points, a histogram over
//! (log distance, orientation, log thickness difference) of the other points.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::shape_io::{dist, lerp, Contour, Point};
use crate::skeleton::AssociatedContour;

/// Parameters of part sampling and histogram binning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescriptorConfig {
    /// Points sampled along each part.
    pub n_s: usize,
    /// Reference points per part.
    pub n_r: usize,
    /// Distance bins.
    pub n_d: usize,
    /// Orientation bins.
    pub n_o: usize,
    /// Thickness-difference bins (odd).
    pub n_td: usize,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        DescriptorConfig {
            n_s: 50,
            n_r: 5,
            n_d: 5,
            n_o: 12,
            n_td: 5,
        }
    }
}

impl DescriptorConfig {
    /// Bins per reference histogram.
    pub fn bins(&self) -> usize {
        self.n_d * self.n_o * self.n_td
    }

    /// Descriptor length.
    pub fn dim(&self) -> usize {
        self.n_r * self.bins()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s < 2 || self.n_r == 0 || self.n_r > self.n_s || self.n_d == 0 || self.n_o == 0 {
            return Err(Error::InvalidArgument(format!("bad descriptor config {self:?}")));
        }
        if self.n_td.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "thickness bins must be odd, got {}",
                self.n_td
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<BinGeometry> {
        self.validate()?;
        Ok(BinGeometry::new(self.n_d, self.n_o, self.n_td))
    }
}

pub const INNER_RADIUS: f64 = 0.125;
pub const OUTER_RADIUS: f64 = 2.5;

// Positive interior thickness edges, used innermost first.
const THICKNESS_EDGES: [f64; 8] = [0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5];

/// Bin edges of the (distance, orientation, thickness difference) histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct BinGeometry {
    distance_edges: Vec<f64>,
    orientation_bins: usize,
    thickness_edges: Vec<f64>,
}

impl BinGeometry {
    /// Distance edges are log-uniform from 0.125 to 2.5 (the innermost bin
    /// also takes everything closer); thickness edges are symmetric around a
    /// central bin of half-width 0.1 in log ratio, with open outer bins.
    pub fn new(n_d: usize, n_o: usize, n_td: usize) -> Self {
        let distance_edges = (0..=n_d)
            .map(|k| INNER_RADIUS * (OUTER_RADIUS / INNER_RADIUS).powf(k as f64 / n_d as f64))
            .collect();
        let m = n_td / 2;
        let mut thickness_edges = vec![f64::NEG_INFINITY];
        let extra: Vec<f64> = (m.min(THICKNESS_EDGES.len())..m)
            .map(|i| THICKNESS_EDGES[THICKNESS_EDGES.len() - 1] + 0.5 * (i + 1 - THICKNESS_EDGES.len()) as f64)
            .collect();
        let positive: Vec<f64> = THICKNESS_EDGES.iter().copied().take(m).chain(extra).collect();
        thickness_edges.extend(positive.iter().rev().map(|e| -e));
        thickness_edges.extend(positive.iter().copied());
        thickness_edges.push(f64::INFINITY);
        BinGeometry {
            distance_edges,
            orientation_bins: n_o,
            thickness_edges,
        }
    }

    pub fn distance_edges(&self) -> &[f64] {
        &self.distance_edges
    }

    pub fn thickness_edges(&self) -> &[f64] {
        &self.thickness_edges
    }

    pub fn orientation_edges(&self) -> Vec<f64> {
        (0..=self.orientation_bins)
            .map(|k| TAU * k as f64 / self.orientation_bins as f64)
            .collect()
    }

    pub fn distance_bins(&self) -> usize {
        self.distance_edges.len() - 1
    }

    pub fn orientation_bins(&self) -> usize {
        self.orientation_bins
    }

    pub fn thickness_bins(&self) -> usize {
        self.thickness_edges.len() - 1
    }

    pub fn bins(&self) -> usize {
        self.distance_bins() * self.orientation_bins * self.thickness_bins()
    }

    /// Normalized distance bin; `None` beyond the outer radius.
    pub fn distance_bin(&self, r: f64) -> Option<usize> {
        if !(r <= OUTER_RADIUS) {
            return None;
        }
        let n = self.distance_bins();
        Some(self.distance_edges[1..n].iter().position(|&e| r < e).unwrap_or(n - 1))
    }

    /// Orientation bin of an angle; any multiple of 2*pi lands in bin 0.
    pub fn orientation_bin(&self, theta: f64) -> usize {
        let t = theta.rem_euclid(TAU);
        ((t / TAU * self.orientation_bins as f64) as usize) % self.orientation_bins
    }

    /// Lower-inclusive thickness bin.
    pub fn thickness_bin(&self, tau: f64) -> usize {
        let n = self.thickness_bins();
        self.thickness_edges[1..n].iter().filter(|&&e| tau >= e).count()
    }

    /// Flattened bin index, distance-major then orientation then thickness.
    pub fn bin(&self, r: f64, theta: f64, tau: f64) -> Option<usize> {
        let d = self.distance_bin(r)?;
        let o = self.orientation_bin(theta);
        let t = self.thickness_bin(tau);
        Some((d * self.orientation_bins + o) * self.thickness_bins() + t)
    }

    /// FNV-1a over the edge bit patterns.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.distance_edges.len() as u64);
        self.distance_edges.iter().for_each(|e| eat(e.to_bits()));
        eat(self.orientation_bins as u64);
        eat(self.thickness_edges.len() as u64);
        self.thickness_edges.iter().for_each(|e| eat(e.to_bits()));
        h
    }
}

/// Critical point indices into the contour, increasing (anticlockwise).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPointSet {
    pub indices: Vec<usize>,
}

impl CriticalPointSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// DCE relevance of vertex `v` between `prev` and `next`: turn angle times
/// `l1 * l2 / (l1 + l2)` with segment lengths divided by `perimeter`.
pub fn relevance(prev: Point, v: Point, next: Point, perimeter: f64) -> f64 {
    let a = [v[0] - prev[0], v[1] - prev[1]];
    let b = [next[0] - v[0], next[1] - v[1]];
    let (l1, l2) = (dist(prev, v) / perimeter, dist(v, next) / perimeter);
    if l1 == 0.0 || l2 == 0.0 {
        return 0.0;
    }
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    let turn = cross.abs().atan2(dot);
    turn * l1 * l2 / (l1 + l2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Discrete contour evolution: the order in which vertices are removed until
/// `keep` remain. Ties in relevance go to the lowest index.
pub fn dce_removal_order(points: &[Point], keep: usize) -> Vec<usize> {
    let n = points.len();
    if keep >= n {
        return Vec::new();
    }
    let perimeter = Contour::new(points.to_vec()).perimeter();
    let perimeter = if perimeter > 0.0 { perimeter } else { 1.0 };
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let rel =
        |i: usize, prev: &[usize], next: &[usize]| relevance(points[prev[i]], points[i], points[next[i]], perimeter);
    let mut current: Vec<f64> = (0..n).map(|i| rel(i, &prev, &next)).collect();
    let mut queue: BTreeSet<(Key, usize)> = (0..n).map(|i| (Key(current[i]), i)).collect();
    let mut order = Vec::with_capacity(n - keep);
    while order.len() < n - keep {
        let (_, v) = queue.pop_first().expect("queue holds remaining vertices");
        order.push(v);
        let (p, q) = (prev[v], next[v]);
        next[p] = q;
        prev[q] = p;
        for u in [p, q] {
            queue.remove(&(Key(current[u]), u));
            current[u] = rel(u, &prev, &next);
            queue.insert((Key(current[u]), u));
        }
    }
    order
}

/// Keeps the `t` most relevant contour vertices.
pub fn dce_critical_points(contour: &Contour, t: usize) -> Result<CriticalPointSet> {
    if t < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 critical points, got {t}"
        )));
    }
    if t > contour.len() {
        return Err(Error::TooManyCriticalPoints {
            requested: t,
            available: contour.len(),
        });
    }
    let removed: BTreeSet<usize> = dce_removal_order(contour.points(), t).into_iter().collect();
    Ok(CriticalPointSet {
        indices: (0..contour.len()).filter(|i| !removed.contains(i)).collect(),
    })
}

/// A sampled point of a part; thickness is divided by the part's mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartPoint {
    pub position: Point,
    pub thickness: f64,
}

/// Directed contour fragment from critical point `start` to `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourPart {
    /// Ordinal of the first critical point.
    pub start: usize,
    /// Ordinal of the last critical point.
    pub end: usize,
    pub start_index: usize,
    pub end_index: usize,
    pub points: Vec<PartPoint>,
    /// Indices into `points`.
    pub reference: Vec<usize>,
    /// Arc-length midpoint.
    pub median: Point,
    pub mirrored: bool,
}

/// Reference positions among `n_s` samples, evenly spread, endpoints included.
pub fn reference_indices(n_s: usize, n_r: usize) -> Vec<usize> {
    if n_r == 1 {
        return vec![n_s / 2];
    }
    (0..n_r)
        .map(|k| (k as f64 * (n_s - 1) as f64 / (n_r - 1) as f64).round() as usize)
        .collect()
}

impl ContourPart {
    /// The part reflected about the vertical axis and traversed backwards, so
    /// it is again anticlockwise on the mirrored shape.
    pub fn mirrored(&self) -> ContourPart {
        let points: Vec<PartPoint> = self
            .points
            .iter()
            .rev()
            .map(|p| PartPoint {
                position: [-p.position[0], p.position[1]],
                thickness: p.thickness,
            })
            .collect();
        ContourPart {
            start: self.end,
            end: self.start,
            start_index: self.end_index,
            end_index: self.start_index,
            reference: reference_indices(points.len(), self.reference.len()),
            points,
            median: [-self.median[0], self.median[1]],
            mirrored: !self.mirrored,
        }
    }

    /// Mean distance over all pairs of sampled points.
    pub fn mean_pairwise_distance(&self) -> f64 {
        let n = self.points.len();
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += dist(self.points[i].position, self.points[j].position);
            }
        }
        let pairs = n * (n - 1) / 2;
        if pairs == 0 {
            0.0
        } else {
            sum / pairs as f64
        }
    }
}

fn sample_at(contour: &AssociatedContour, cum: &[f64], s: f64) -> (Point, f64) {
    let n = contour.len();
    let perimeter = cum[n];
    let s = s.rem_euclid(perimeter);
    let seg = cum[..n].partition_point(|&c| c <= s).saturating_sub(1);
    let len = cum[seg + 1] - cum[seg];
    let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
    let pts = contour.contour.points();
    let j = (seg + 1) % n;
    (
        lerp(pts[seg], pts[j], t),
        contour.thickness[seg] + (contour.thickness[j] - contour.thickness[seg]) * t,
    )
}

/// All ordered pairs of critical points, each fragment walked anticlockwise.
pub fn enumerate_parts(
    contour: &AssociatedContour,
    critical: &CriticalPointSet,
    config: &DescriptorConfig,
) -> Vec<ContourPart> {
    let cum = contour.contour.cumulative_lengths();
    let perimeter = cum[contour.len()];
    let reference = reference_indices(config.n_s, config.n_r);
    let t = critical.len();
    let mut parts = Vec::with_capacity(t * t.saturating_sub(1));
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let (a, b) = (critical.indices[i], critical.indices[j]);
            let length = (cum[b] - cum[a]).rem_euclid(perimeter);
            let mut points: Vec<PartPoint> = (0..config.n_s)
                .map(|k| {
                    let (position, thickness) =
                        sample_at(contour, &cum, cum[a] + length * k as f64 / (config.n_s - 1) as f64);
                    PartPoint { position, thickness }
                })
                .collect();
            let mean = points.iter().map(|p| p.thickness).sum::<f64>() / points.len() as f64;
            for p in &mut points {
                p.thickness /= mean;
            }
            parts.push(ContourPart {
                start: i,
                end: j,
                start_index: a,
                end_index: b,
                points,
                reference: reference.clone(),
                median: sample_at(contour, &cum, cum[a] + 0.5 * length).0,
                mirrored: false,
            });
        }
    }
    parts
}

fn histogram_with_scale(part: &ContourPart, ref_index: usize, scale: f64, geometry: &BinGeometry) -> Vec<u32> {
    let mut hist = vec![0u32; geometry.bins()];
    let r_idx = part.reference[ref_index];
    let r = part.points[r_idx];
    for (i, q) in part.points.iter().enumerate() {
        if i == r_idx {
            continue;
        }
        let (dx, dy) = (q.position[0] - r.position[0], q.position[1] - r.position[1]);
        let d = (dx * dx + dy * dy).sqrt();
        if d == 0.0 || scale == 0.0 {
            continue;
        }
        let tau = q.thickness.ln() - r.thickness.ln();
        if let Some(b) = geometry.bin(d / scale, dy.atan2(dx), tau) {
            hist[b] += 1;
        }
    }
    hist
}

/// Raw SSC counts of reference point `ref_index` of `part`.
pub fn ssc_histogram(part: &ContourPart, ref_index: usize, geometry: &BinGeometry) -> Vec<u32> {
    histogram_with_scale(part, ref_index, part.mean_pairwise_distance(), geometry)
}

/// Concatenated per-reference histograms, each block scaled to unit length.
#[derive(Clone, Debug, PartialEq)]
pub struct SscDescriptor {
    values: Vec<f64>,
    block: usize,
}

impl SscDescriptor {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Length of one reference block.
    pub fn block_len(&self) -> usize {
        self.block
    }
}

pub fn part_descriptor(part: &ContourPart, geometry: &BinGeometry) -> SscDescriptor {
    let scale = part.mean_pairwise_distance();
    let block = geometry.bins();
    let mut values = Vec::with_capacity(block * part.reference.len());
    for k in 0..part.reference.len() {
        let hist = histogram_with_scale(part, k, scale, geometry);
        let norm = hist.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt();
        values.extend(hist.iter().map(|&c| if norm > 0.0 { c as f64 / norm } else { 0.0 }));
    }
    SscDescriptor { values, block }
}
