//! Codebook learning: seeded sampling of part descriptors (with their flipped
//! mirrors) and k-means with k-means++ seeding.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::descriptor::{part_descriptor, BinGeometry, ContourPart};
use crate::error::{Error, Result};

/// Where a sampled descriptor came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SampleOrigin {
    pub shape: usize,
    pub part: usize,
    pub mirrored: bool,
}

/// Row-major matrix of descriptors.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorMatrix {
    dim: usize,
    data: Vec<f64>,
    origin: Vec<SampleOrigin>,
    fingerprint: u64,
}

impl DescriptorMatrix {
    pub fn new(dim: usize, fingerprint: u64) -> Self {
        DescriptorMatrix {
            dim,
            data: Vec::new(),
            origin: Vec::new(),
            fingerprint,
        }
    }

    /// Matrix over plain rows (origins are sequential placeholders).
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.len(),
            });
        }
        let origin = (0..data.len() / dim)
            .map(|i| SampleOrigin {
                shape: i,
                part: 0,
                mirrored: false,
            })
            .collect();
        Ok(DescriptorMatrix {
            dim,
            data,
            origin,
            fingerprint: 0,
        })
    }

    pub fn push(&mut self, row: &[f64], origin: SampleOrigin) {
        assert_eq!(row.len(), self.dim);
        self.data.extend_from_slice(row);
        self.origin.push(origin);
    }

    pub fn rows(&self) -> usize {
        self.origin.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn origins(&self) -> &[SampleOrigin] {
        &self.origin
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Stable 64-bit digest of the contents (FNV-1a over the f64 bits).
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in self.data.iter().map(|v| v.to_bits()).chain([self.dim as u64]) {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// Draws up to `per_shape_cap` parts from every shape (uniformly, seeded) and
/// adds each sampled part's descriptor followed by its mirror's.
pub fn sample_training_descriptors(
    shapes: &[Vec<ContourPart>],
    geometry: &BinGeometry,
    per_shape_cap: usize,
    seed: u64,
) -> Result<DescriptorMatrix> {
    let dim = shapes
        .iter()
        .flat_map(|s| s.first())
        .map(|p| p.reference.len() * geometry.bins())
        .next()
        .ok_or(Error::EmptyPool)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<Vec<usize>> = shapes
        .iter()
        .map(|parts| {
            let m = per_shape_cap.min(parts.len());
            let mut idx = index::sample(&mut rng, parts.len(), m).into_vec();
            idx.sort_unstable();
            idx
        })
        .collect();
    let rows: Vec<(SampleOrigin, Vec<f64>)> = picks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(s, idx)| {
            idx.iter().flat_map(move |&p| {
                let part = &shapes[s][p];
                let plain = part_descriptor(part, geometry).into_values();
                let mirror = part_descriptor(&part.mirrored(), geometry).into_values();
                [
                    (
                        SampleOrigin {
                            shape: s,
                            part: p,
                            mirrored: false,
                        },
                        plain,
                    ),
                    (
                        SampleOrigin {
                            shape: s,
                            part: p,
                            mirrored: true,
                        },
                        mirror,
                    ),
                ]
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut out = DescriptorMatrix::new(dim, geometry.fingerprint());
    for (origin, row) in rows {
        out.push(&row, origin);
    }
    Ok(out)
}

/// K cluster centres over descriptor space.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    k: usize,
    dim: usize,
    entries: Vec<f64>,
    norms_sq: Vec<f64>,
    fingerprint: u64,
    training_samples: usize,
}

impl Codebook {
    pub fn new(k: usize, dim: usize, entries: Vec<f64>, fingerprint: u64, training_samples: usize) -> Result<Self> {
        if entries.len() != k * dim {
            return Err(Error::DimensionMismatch {
                expected: k * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Inconsistent("codebook has non-finite entries".into()));
        }
        let norms_sq = entries
            .chunks(dim.max(1))
            .map(|c| c.iter().map(|v| v * v).sum())
            .collect();
        Ok(Codebook {
            k,
            dim,
            entries,
            norms_sq,
            fingerprint,
            training_samples,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn norm_sq(&self, i: usize) -> f64 {
        self.norms_sq[i]
    }

    /// Bin-geometry fingerprint of the descriptors it was trained on.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn training_samples(&self) -> usize {
        self.training_samples
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..self.k {
            for b in a + 1..self.k {
                best = best.min(sq_dist(self.entry(a), self.entry(b)).sqrt());
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KmeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once fewer than this fraction of samples change cluster.
    pub tol: f64,
}

impl KmeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        KmeansParams {
            k,
            seed,
            max_iter: 100,
            tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KmeansStats {
    /// Sum of squared distances after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

type SparseRow = Vec<(u32, f64)>;

fn sparse_rows(data: &DescriptorMatrix) -> Vec<SparseRow> {
    (0..data.rows())
        .map(|i| {
            data.row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, &v)| (j as u32, v))
                .collect()
        })
        .collect()
}

fn sparse_dot(row: &SparseRow, dense: &[f64]) -> f64 {
    row.iter().map(|&(j, v)| v * dense[j as usize]).sum()
}

fn kmeans_pp(
    data: &DescriptorMatrix,
    sparse: &[SparseRow],
    norms: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let (n, dim) = (data.rows(), data.dim());
    let mut centres = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centres.extend_from_slice(data.row(first));
    let mut nearest = vec![f64::INFINITY; n];
    for c in 1..=k {
        let centre = &centres[(c - 1) * dim..c * dim];
        let cn: f64 = centre.iter().map(|v| v * v).sum();
        let d: Vec<f64> = sparse
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                let d = norms[i] + cn - 2.0 * sparse_dot(row, centre);
                if d <= 1e-12 * (norms[i] + cn) {
                    0.0
                } else {
                    d
                }
            })
            .collect();
        for (m, d) in nearest.iter_mut().zip(d) {
            *m = m.min(d);
        }
        if c == k {
            break;
        }
        let total: f64 = nearest.iter().sum();
        if total <= 0.0 {
            return Err(Error::TooFewSamples { k, available: c });
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &d) in nearest.iter().enumerate() {
            if d > 0.0 {
                pick = Some(i);
                acc += d;
                if acc > target {
                    break;
                }
            }
        }
        centres.extend_from_slice(data.row(pick.expect("positive total has a positive entry")));
    }
    Ok(centres)
}

/// Lloyd's k-means with k-means++ initialisation; returns the codebook and the
/// per-iteration objective.
pub fn kmeans_with_stats(data: &DescriptorMatrix, params: &KmeansParams) -> Result<(Codebook, KmeansStats)> {
    let (n, dim, k) = (data.rows(), data.dim(), params.k);
    if k == 0 || n < k {
        return Err(Error::TooFewSamples { k, available: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sparse = sparse_rows(data);
    let norms: Vec<f64> = sparse.iter().map(|r| r.iter().map(|(_, v)| v * v).sum()).collect();
    let mut centres = kmeans_pp(data, &sparse, &norms, k, &mut rng)?;
    let mut assign = vec![usize::MAX; n];
    let mut stats = KmeansStats::default();

    for iter in 0..params.max_iter {
        let cnorm: Vec<f64> = centres.chunks(dim).map(|c| c.iter().map(|v| v * v).sum()).collect();
        let next: Vec<usize> = sparse
            .par_iter()
            .map(|row| {
                let mut best = (f64::INFINITY, 0usize);
                for (c, centre) in centres.chunks(dim).enumerate() {
                    let d = cnorm[c] - 2.0 * sparse_dot(row, centre);
                    if d < best.0 {
                        best = (d, c);
                    }
                }
                best.1
            })
            .collect();
        let changed = next.iter().zip(&assign).filter(|(a, b)| a != b).count();
        assign = next;
        let per_row: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| sq_dist(data.row(i), &centres[assign[i] * dim..(assign[i] + 1) * dim]))
            .collect();
        stats.objective.push(per_row.iter().sum());
        stats.iterations = iter + 1;

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, row) in sparse.iter().enumerate() {
            counts[assign[i]] += 1;
            let s = &mut sums[assign[i] * dim..(assign[i] + 1) * dim];
            for &(j, v) in row {
                s[j as usize] += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for (dst, s) in centres[c * dim..(c + 1) * dim]
                    .iter_mut()
                    .zip(&sums[c * dim..(c + 1) * dim])
                {
                    *dst = s / counts[c] as f64;
                }
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let largest = (0..k)
                .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
                .unwrap();
            let lc = centres[largest * dim..(largest + 1) * dim].to_vec();
            let far = (0..n)
                .filter(|&i| assign[i] == largest)
                .max_by(|&a, &b| {
                    sq_dist(data.row(a), &lc)
                        .total_cmp(&sq_dist(data.row(b), &lc))
                        .then(b.cmp(&a))
                })
                .unwrap();
            centres[c * dim..(c + 1) * dim].copy_from_slice(data.row(far));
            assign[far] = c;
            counts[largest] -= 1;
            counts[c] = 1;
        }

        if (changed as f64) < params.tol * n as f64 {
            stats.converged = true;
            break;
        }
    }
    // persisted as 32-bit floats
    let entries = centres.iter().map(|&v| v as f32 as f64).collect();
    let codebook = Codebook::new(k, dim, entries, data.fingerprint(), n)?;
    Ok((codebook, stats))
}

pub fn kmeans(data: &DescriptorMatrix, params: &KmeansParams) -> Result<Codebook> {
    kmeans_with_stats(data, params).map(|(c, _)| c)
}
