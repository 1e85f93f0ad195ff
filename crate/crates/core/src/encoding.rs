//! Locality-constrained linear coding of part descriptors, mirror merging and
//! spatial-pyramid max pooling into the shape feature.

use std::collections::BTreeMap;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::shape_io::{BoundingBox, Point};

/// Pyramid levels: 1x1, 2x2 and 4x4 cells.
pub const PYRAMID_LEVELS: usize = 3;
pub const REGIONS: usize = 21;

/// Sparse code over the codebook plus the median position of its part.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeCode {
    /// (codeword index, coefficient), sorted by index.
    pub entries: Vec<(usize, f64)>,
    pub position: Point,
}

impl ShapeCode {
    pub fn new(entries: Vec<(usize, f64)>, position: Point) -> Self {
        ShapeCode { entries, position }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn to_dense(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; k];
        for &(i, v) in &self.entries {
            out[i] += v;
        }
        out
    }
}

/// Codes the descriptor `f` over its `k` nearest codewords; the coefficients
/// sum to one and are sorted by codeword index.
pub fn llc_encode(f: &[f64], codebook: &Codebook, k: usize) -> Result<Vec<(usize, f64)>> {
    if f.len() != codebook.dim() {
        return Err(Error::DimensionMismatch {
            expected: codebook.dim(),
            got: f.len(),
        });
    }
    if k == 0 || k > codebook.k() {
        return Err(Error::InvalidArgument(format!(
            "neighbour count {k} must lie in 1..={}",
            codebook.k()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("descriptor has non-finite entries".into()));
    }
    let nonzero: Vec<(usize, f64)> = f.iter().copied().enumerate().filter(|e| e.1 != 0.0).collect();
    let f_norm: f64 = nonzero.iter().map(|e| e.1 * e.1).sum();
    let mut dist: Vec<(f64, usize)> = (0..codebook.k())
        .map(|c| {
            let b = codebook.entry(c);
            let dot: f64 = nonzero.iter().map(|&(j, v)| v * b[j]).sum();
            ((f_norm + codebook.norm_sq(c) - 2.0 * dot).max(0.0), c)
        })
        .collect();
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_dist);
        dist.truncate(k);
    }
    dist.sort_by(by_dist);
    let neighbours: Vec<usize> = dist.iter().map(|d| d.1).collect();

    let exact = codebook
        .entry(neighbours[0])
        .iter()
        .zip(f)
        .map(|(b, x)| (b - x) * (b - x))
        .sum::<f64>();
    if exact <= 1e-24 * f_norm.max(1.0) {
        return Ok(vec![(neighbours[0], 1.0)]);
    }

    let z: Vec<Vec<f64>> = neighbours
        .iter()
        .map(|&c| codebook.entry(c).iter().zip(f).map(|(b, x)| b - x).collect())
        .collect();
    let mut gram = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let v: f64 = z[a].iter().zip(&z[b]).map(|(x, y)| x * y).sum();
            gram[a * k + b] = v;
            gram[b * k + a] = v;
        }
    }
    let trace: f64 = (0..k).map(|a| gram[a * k + a]).sum();
    for a in 0..k {
        gram[a * k + a] += 1e-4 * trace;
    }
    let mut c = cholesky_solve(&mut gram, k, &vec![1.0; k]).ok_or(Error::SingularSystem)?;
    let total: f64 = c.iter().sum();
    if !(total.is_finite() && total.abs() > f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem);
    }
    for v in &mut c {
        *v /= total;
    }
    let mut code: Vec<(usize, f64)> = neighbours.into_iter().zip(c).collect();
    code.sort_by_key(|e| e.0);
    Ok(code)
}

/// Solves `A x = rhs` for symmetric positive definite `A` (overwritten by its
/// factor). `None` when `A` is not numerically positive definite.
fn cholesky_solve(a: &mut [f64], n: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for p in 0..j {
            d -= a[j * n + p] * a[j * n + p];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for p in 0..j {
                s -= a[i * n + p] * a[j * n + p];
            }
            a[i * n + j] = s / d;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for p in 0..i {
            y[i] -= a[i * n + p] * y[p];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for p in i + 1..n {
            y[i] -= a[p * n + i] * y[p];
        }
        y[i] /= a[i * n + i];
    }
    Some(y)
}

/// Element-wise sum of a part's code and its mirror's code.
pub fn flip_merge(part: &ShapeCode, mirror: &ShapeCode) -> ShapeCode {
    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(i, v) in part.entries.iter().chain(&mirror.entries) {
        *merged.entry(i).or_insert(0.0) += v;
    }
    ShapeCode {
        entries: merged.into_iter().collect(),
        position: part.position,
    }
}

/// Cell of `v` along one axis for a grid of `cells` cells over `[lo, hi]`.
/// Points on an interior grid line go to the higher cell.
fn cell(v: f64, lo: f64, hi: f64, cells: usize) -> usize {
    let span = hi - lo;
    if !(span > 0.0) {
        return 0;
    }
    let c = ((v - lo) / span * cells as f64).floor();
    if c <= 0.0 {
        0
    } else {
        (c as usize).min(cells - 1)
    }
}

/// The region of each pyramid level (in concatenation order) containing `p`.
pub fn regions_of(p: Point, bbox: &BoundingBox) -> [usize; PYRAMID_LEVELS] {
    let mut out = [0; PYRAMID_LEVELS];
    let mut offset = 0;
    for (level, slot) in out.iter_mut().enumerate() {
        let n = 1usize << level;
        let cx = cell(p[0], bbox.min_x, bbox.max_x, n);
        let cy = cell(p[1], bbox.min_y, bbox.max_y, n);
        *slot = offset + cy * n + cx;
        offset += n * n;
    }
    out
}

/// Sparse, unit-length pooled shape feature of dimension `21 * K`.
#[derive(Clone, Debug, PartialEq)]
pub struct BscpVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl BscpVector {
    /// From (index, value) pairs sorted by strictly increasing index.
    pub fn from_sparse(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i >= dim || indices.last().is_some_and(|&l| l as usize >= i) {
                return Err(Error::InvalidArgument(format!("bad sparse index {i}")));
            }
            indices.push(i as u32);
            values.push(v);
        }
        Ok(BscpVector { dim, indices, values })
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|e| *e.1 != 0.0)
            .map(|(i, &v)| (i as u32, v))
            .unzip();
        BscpVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| (i as usize, v))
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&(i as u32)) {
            Ok(p) => self.values[p],
            Err(_) => 0.0,
        }
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> BscpVector {
        BscpVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn distance(&self, other: &BscpVector) -> f64 {
        let (mut a, mut b) = (self.iter().peekable(), other.iter().peekable());
        let mut acc = 0.0;
        loop {
            let d = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&(i, x)), Some(&(j, y))) if i == j => {
                    a.next();
                    b.next();
                    x - y
                }
                (Some(&(i, x)), Some(&(j, _))) if i < j => {
                    a.next();
                    x
                }
                (Some(&(_, x)), None) => {
                    a.next();
                    x
                }
                (_, Some(&(_, y))) => {
                    b.next();
                    y
                }
            };
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Max pools the codes over the 21 pyramid regions of `bbox`, concatenates the
/// region vectors and scales the result to unit length.
pub fn spm_pool(codes: &[ShapeCode], bbox: &BoundingBox, k: usize) -> Result<BscpVector> {
    if codes.is_empty() {
        return Err(Error::NoCodes);
    }
    let mut pooled: Vec<BTreeMap<usize, (f64, usize)>> = vec![BTreeMap::new(); REGIONS];
    let mut members = [0usize; REGIONS];
    for code in codes {
        for r in regions_of(code.position, bbox) {
            members[r] += 1;
            for &(j, v) in &code.entries {
                if j >= k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        got: j + 1,
                    });
                }
                let slot = pooled[r].entry(j).or_insert((f64::NEG_INFINITY, 0));
                slot.0 = slot.0.max(v);
                slot.1 += 1;
            }
        }
    }
    let mut entries = Vec::new();
    for (r, region) in pooled.into_iter().enumerate() {
        for (j, (max, seen)) in region {
            // codes that do not mention j hold an implicit zero
            let v = if seen < members[r] { max.max(0.0) } else { max };
            if v != 0.0 {
                entries.push((r * k + j, v));
            }
        }
    }
    let norm = entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::EmptyPool);
    }
    for e in &mut entries {
        e.1 /= norm;
    }
    BscpVector::from_sparse(REGIONS * k, entries)
}
