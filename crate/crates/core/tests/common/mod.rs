//! Generators, brute-force oracles and invariant checks shared by the
//! integration test targets.

#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use bscp::classifier::{objective, predict, subgradient, SvmModel};
use bscp::codebook::{kmeans_with_stats, Codebook, DescriptorMatrix, KmeansParams};
use bscp::descriptor::{
    dce_critical_points, part_descriptor, reference_indices, ssc_histogram, BinGeometry, ContourPart, DescriptorConfig,
    PartPoint, INNER_RADIUS, OUTER_RADIUS,
};
use bscp::encoding::{llc_encode, regions_of, spm_pool, BscpVector, ShapeCode, PYRAMID_LEVELS, REGIONS};
use bscp::model_io::{from_bytes, to_bytes, TrainedModel};
use bscp::pipeline::FeatureConfig;
use bscp::shape_io::{BinaryMask, BoundingBox, Contour};
use bscp::skeleton::distance_transform;

pub type Check = std::result::Result<(), String>;

pub fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

/// Runs `check` on `cases` deterministic draws of `strategy`.
pub fn run_cases<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Check
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- generators

pub fn small_geometry() -> BinGeometry {
    DescriptorConfig::default().geometry().unwrap()
}

/// A part of `n` loose points with positive thicknesses and `n_r` references.
pub fn part_strategy(n: usize, n_r: usize) -> impl Strategy<Value = ContourPart> {
    prop::collection::vec(((-50.0f64..50.0, -50.0f64..50.0), 0.2f64..3.0), n).prop_map(move |pts| {
        let points: Vec<PartPoint> = pts
            .into_iter()
            .map(|((x, y), t)| PartPoint {
                position: [x, y],
                thickness: t,
            })
            .collect();
        ContourPart {
            start: 0,
            end: 1,
            start_index: 0,
            end_index: n - 1,
            median: points[n / 2].position,
            reference: reference_indices(n, n_r),
            points,
            mirrored: false,
        }
    })
}

/// `k` codewords of dimension `dim` plus a query vector.
pub fn codebook_strategy(k: usize, dim: usize) -> impl Strategy<Value = (Codebook, Vec<f64>)> {
    (
        prop::collection::vec(-1.0f64..1.0, k * dim),
        prop::collection::vec(-1.0f64..1.0, dim),
    )
        .prop_map(move |(entries, f)| (Codebook::new(k, dim, entries, 0, 0).unwrap(), f))
}

/// Star-shaped closed polygon with `n` vertices.
pub fn contour_strategy(n: usize) -> impl Strategy<Value = Contour> {
    prop::collection::vec(20.0f64..60.0, n).prop_map(move |radii| {
        Contour::new(
            radii
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let a = TAU * i as f64 / n as f64;
                    [r * a.cos(), r * a.sin()]
                })
                .collect(),
        )
    })
}

/// Random sparse codes positioned inside a fixed box.
pub fn codes_strategy(k: usize) -> impl Strategy<Value = (Vec<ShapeCode>, BoundingBox)> {
    let code = (
        prop::collection::btree_map(0..k, -1.0f64..1.0, 1..6),
        0.0f64..=40.0,
        0.0f64..=20.0,
    )
        .prop_map(|(entries, x, y)| ShapeCode::new(entries.into_iter().collect(), [x, y]));
    prop::collection::vec(code, 1..30).prop_map(|codes| {
        let bbox = BoundingBox {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 40.0,
            max_y: 20.0,
        };
        (codes, bbox)
    })
}

/// Union of random discs in a `size` x `size` raster, mostly overlapping.
pub fn blob_mask(size: usize, discs: &[(f64, f64, f64)]) -> BinaryMask {
    BinaryMask::from_fn(size, size, |x, y| {
        discs.iter().any(|&(cx, cy, r)| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        })
    })
    .unwrap()
}

pub fn blob_strategy(size: usize) -> impl Strategy<Value = BinaryMask> {
    let s = size as f64;
    prop::collection::vec((0.3 * s..0.7 * s, 0.3 * s..0.7 * s, 0.1 * s..0.3 * s), 1..6)
        .prop_map(move |discs| blob_mask(size, &discs))
}

pub fn small_model(seed: u64) -> TrainedModel {
    let features = FeatureConfig {
        descriptor: DescriptorConfig {
            n_s: 10,
            n_r: 2,
            n_d: 2,
            n_o: 4,
            n_td: 3,
        },
        ..FeatureConfig::default()
    };
    let dim = features.descriptor.dim();
    let k = 3;
    let wave = |i: usize, f: f64| ((i as f64 + seed as f64) * f).sin();
    let entries: Vec<f64> = (0..k * dim).map(|i| wave(i, 0.37) as f32 as f64).collect();
    let fp = features.geometry().unwrap().fingerprint();
    let codebook = Codebook::new(k, dim, entries, fp, 6 * k).unwrap();
    let weights: Vec<f64> = (0..3 * REGIONS * k).map(|i| wave(i, 1.3) as f32 as f64).collect();
    let mut svm = SvmModel::new(REGIONS * k, weights, vec!["a".into(), "b".into(), "c".into()], 10.0).unwrap();
    svm.iterations = 40 + seed;
    svm.objective = 0.5 + seed as f64;
    TrainedModel::new(features, 2, codebook, svm).unwrap()
}

// ------------------------------------------------------------------ oracles

fn mean_pairwise(points: &[PartPoint]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            sum += (p.position[0] - q.position[0]).hypot(p.position[1] - q.position[1]);
            pairs += 1;
        }
    }
    sum / pairs as f64
}

/// Histogram of one reference point by testing every sample against every
/// (distance, orientation, thickness) cell.
pub fn brute_force_ssc(part: &ContourPart, ref_k: usize, n_d: usize, n_o: usize, tau_edges: &[f64]) -> Vec<u32> {
    let n_t = tau_edges.len() - 1;
    let ratio = OUTER_RADIUS / INNER_RADIUS;
    let d_edges: Vec<f64> = (0..=n_d)
        .map(|k| INNER_RADIUS * ratio.powf(k as f64 / n_d as f64))
        .collect();
    let scale = mean_pairwise(&part.points);
    let r = part.points[part.reference[ref_k]];
    let mut hist = vec![0u32; n_d * n_o * n_t];
    for (i, q) in part.points.iter().enumerate() {
        if i == part.reference[ref_k] {
            continue;
        }
        let (dx, dy) = (q.position[0] - r.position[0], q.position[1] - r.position[1]);
        let dist = dx.hypot(dy) / scale;
        if dist == 0.0 {
            continue;
        }
        let mut angle = dy.atan2(dx);
        if angle < 0.0 {
            angle += TAU;
        }
        let tau = q.thickness.ln() - r.thickness.ln();
        for d in 0..n_d {
            let lo = if d == 0 { 0.0 } else { d_edges[d] };
            let hi = d_edges[d + 1];
            let inside_d = dist >= lo && (dist < hi || (d == n_d - 1 && dist <= hi));
            if !inside_d {
                continue;
            }
            for o in 0..n_o {
                let (lo, hi) = (TAU * o as f64 / n_o as f64, TAU * (o + 1) as f64 / n_o as f64);
                if !(angle >= lo && angle < hi) {
                    continue;
                }
                for t in 0..n_t {
                    if tau >= tau_edges[t] && tau < tau_edges[t + 1] {
                        hist[(d * n_o + o) * n_t + t] += 1;
                    }
                }
            }
        }
    }
    hist
}

/// Equality-constrained least squares over the `k` nearest codewords, from
/// the full Lagrangian system of the uncentred problem
/// `min |f - B^T c|^2 + eps |c|^2  s.t.  sum c = 1`.
pub fn kkt_llc(codebook: &Codebook, f: &[f64], k: usize) -> (Vec<(usize, f64)>, f64) {
    let mut order: Vec<(f64, usize)> = (0..codebook.k())
        .map(|c| {
            let d: f64 = codebook.entry(c).iter().zip(f).map(|(b, x)| (b - x) * (b - x)).sum();
            (d, c)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let nb: Vec<usize> = order[..k].iter().map(|o| o.1).collect();
    let dim = f.len();
    let b = DMatrix::from_fn(k, dim, |i, j| codebook.entry(nb[i])[j]);
    let fv = DVector::from_column_slice(f);
    let centred = DMatrix::from_fn(k, dim, |i, j| b[(i, j)] - f[j]);
    let eps = 1e-4 * (&centred * centred.transpose()).trace();
    let gram = &b * b.transpose();
    let mut system = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    let bf = &b * &fv;
    for i in 0..k {
        for j in 0..k {
            system[(i, j)] = 2.0 * gram[(i, j)];
        }
        system[(i, i)] += 2.0 * eps;
        system[(i, k)] = 1.0;
        system[(k, i)] = 1.0;
        rhs[i] = 2.0 * bf[i];
    }
    rhs[k] = 1.0;
    let sol = system.lu().solve(&rhs).expect("KKT system is regular");
    let c = sol.rows(0, k).into_owned();
    let recon = b.transpose() * &c;
    let err = (fv - recon).norm_squared();
    let mut code: Vec<(usize, f64)> = nb.into_iter().zip(c.iter().copied()).collect();
    code.sort_by_key(|e| e.0);
    (code, err)
}

/// Distance of every filled pixel to the nearest boundary pixel of the filled
/// shape, by scanning all pairs. Background outside the filled shape is 0.
pub fn brute_force_dt(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut outside = vec![false; (w * h) as usize];
    let mut stack: Vec<(isize, isize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !mask.get(x, y) {
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        if x < 0 || y < 0 || x >= w || y >= h || mask.get(x, y) || outside[(y * w + x) as usize] {
            continue;
        }
        outside[(y * w + x) as usize] = true;
        stack.extend([(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]);
    }
    let filled = |x: isize, y: isize| x >= 0 && y >= 0 && x < w && y < h && !outside[(y * w + x) as usize];
    let boundary: Vec<(isize, isize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| {
            filled(x, y)
                && [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|(dx, dy)| !filled(x + dx, y + dy))
        })
        .collect();
    (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            if !filled(x, y) {
                return 0.0;
            }
            boundary
                .iter()
                .map(|&(bx, by)| ((bx - x) as f64).hypot((by - y) as f64))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

// ------------------------------------------------------------------- checks

pub fn check_histogram_mass(part: &ContourPart, geometry: &BinGeometry) -> Check {
    let scale = mean_pairwise(&part.points);
    let n_s = part.points.len();
    for k in 0..part.reference.len() {
        let hist = ssc_histogram(part, k, geometry);
        let r = part.points[part.reference[k]].position;
        let expected = part
            .points
            .iter()
            .enumerate()
            .filter(|&(i, q)| {
                let d = (q.position[0] - r[0]).hypot(q.position[1] - r[1]) / scale;
                i != part.reference[k] && d > 0.0 && d <= OUTER_RADIUS
            })
            .count();
        let mass: u32 = hist.iter().sum();
        if mass as usize != expected || mass as usize > n_s - 1 {
            return fail(format!("reference {k}: mass {mass}, expected {expected} (n_s = {n_s})"));
        }
    }
    let desc = part_descriptor(part, geometry);
    for block in desc.values().chunks(desc.block_len()) {
        let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
        if block.iter().any(|&v| v < 0.0) || !(norm == 0.0 || (norm - 1.0).abs() < 1e-12) {
            return fail(format!("descriptor block with norm {norm} or negative entry"));
        }
    }
    Ok(())
}

pub fn check_ssc_oracle(part: &ContourPart, geometry: &BinGeometry) -> Check {
    for k in 0..part.reference.len() {
        let got = ssc_histogram(part, k, geometry);
        let want = brute_force_ssc(
            part,
            k,
            geometry.distance_bins(),
            geometry.orientation_bins(),
            geometry.thickness_edges(),
        );
        if got != want {
            let diff: Vec<usize> = (0..got.len()).filter(|&i| got[i] != want[i]).collect();
            return fail(format!("reference {k}: bins {diff:?} differ"));
        }
    }
    Ok(())
}

/// Sum to one and support inside the `k` nearest codewords.
pub fn check_llc_affine_and_local(codebook: &Codebook, f: &[f64], k: usize) -> Check {
    let code = llc_encode(f, codebook, k).map_err(|e| e.to_string())?;
    let sum: f64 = code.iter().map(|e| e.1).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return fail(format!("coefficients sum to {sum}"));
    }
    let mut d: Vec<f64> = (0..codebook.k())
        .map(|c| codebook.entry(c).iter().zip(f).map(|(b, x)| (b - x) * (b - x)).sum())
        .collect();
    let dist_of = d.clone();
    d.sort_by(f64::total_cmp);
    let kth = d[k - 1];
    for &(j, v) in &code {
        if v != 0.0 && dist_of[j] > kth * (1.0 + 1e-12) {
            return fail(format!("codeword {j} outside the {k} nearest carries {v}"));
        }
    }
    if code.len() > k {
        return fail(format!("{} non-zeros for k = {k}", code.len()));
    }
    Ok(())
}

pub fn check_llc_oracle(codebook: &Codebook, f: &[f64], k: usize) -> Check {
    let code = llc_encode(f, codebook, k).map_err(|e| e.to_string())?;
    let (want, want_err) = kkt_llc(codebook, f, k);
    let dense = |c: &[(usize, f64)]| {
        let mut v = vec![0.0; codebook.k()];
        c.iter().for_each(|&(j, x)| v[j] = x);
        v
    };
    let (a, b) = (dense(&code), dense(&want));
    let mut recon = vec![0.0; f.len()];
    for (j, &c) in a.iter().enumerate() {
        for (r, e) in recon.iter_mut().zip(codebook.entry(j)) {
            *r += c * e;
        }
    }
    let err: f64 = recon.iter().zip(f).map(|(r, x)| (r - x) * (r - x)).sum();
    if (err - want_err).abs() > 1e-8 {
        return fail(format!("reconstruction error {err} vs {want_err}"));
    }
    if let Some(j) = (0..a.len()).find(|&j| (a[j] - b[j]).abs() > 1e-8) {
        return fail(format!("coefficient {j}: {} vs {}", a[j], b[j]));
    }
    Ok(())
}

pub fn check_kmeans_monotone(data: &DescriptorMatrix, k: usize, seed: u64) -> Check {
    let (_, stats) = kmeans_with_stats(data, &KmeansParams::new(k, seed)).map_err(|e| e.to_string())?;
    for w in stats.objective.windows(2) {
        if w[1] > w[0] * (1.0 + 1e-12) + 1e-12 {
            return fail(format!("objective rose from {} to {}", w[0], w[1]));
        }
    }
    if stats.iterations == 0 || stats.objective.is_empty() {
        return fail("no iterations recorded");
    }
    Ok(())
}

pub fn check_dce_nesting(contour: &Contour, small: usize, large: usize) -> Check {
    let a = dce_critical_points(contour, small).map_err(|e| e.to_string())?;
    let b = dce_critical_points(contour, large).map_err(|e| e.to_string())?;
    if a.len() != small || b.len() != large {
        return fail(format!("sizes {} and {}", a.len(), b.len()));
    }
    match a.indices.iter().find(|i| !b.indices.contains(i)) {
        Some(i) => fail(format!("vertex {i} kept at T = {small} but removed at T = {large}")),
        None => Ok(()),
    }
}

/// Unit norm, region membership and agreement with a dense max-pooling
/// recomputation (which implies max dominance).
pub fn check_pooling(codes: &[ShapeCode], bbox: &BoundingBox, k: usize) -> Check {
    let pooled = spm_pool(codes, bbox, k).map_err(|e| e.to_string())?;
    if (pooled.norm() - 1.0).abs() > 1e-9 {
        return fail(format!("norm {}", pooled.norm()));
    }
    let mut dense = vec![0.0; REGIONS * k];
    let mut touched = [false; REGIONS];
    let mut offset = 0;
    for level in 0..PYRAMID_LEVELS {
        let n = 1usize << level;
        for code in codes {
            let cell = |v: f64, lo: f64, hi: f64| (((v - lo) / (hi - lo) * n as f64).floor() as usize).min(n - 1);
            let (cx, cy) = (
                cell(code.position[0], bbox.min_x, bbox.max_x),
                cell(code.position[1], bbox.min_y, bbox.max_y),
            );
            let r = offset + cy * n + cx;
            if regions_of(code.position, bbox)[level] != r {
                return fail(format!("position {:?} level {level}", code.position));
            }
            let values = code.to_dense(k);
            let slot = &mut dense[r * k..(r + 1) * k];
            if !touched[r] {
                slot.copy_from_slice(&values);
                touched[r] = true;
            } else {
                for (s, v) in slot.iter_mut().zip(values) {
                    *s = s.max(v);
                }
            }
        }
        offset += n * n;
    }
    let norm = dense.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (i, v) in dense.iter().enumerate() {
        if (pooled.get(i) - v / norm).abs() > 1e-12 {
            return fail(format!("entry {i}: {} vs {}", pooled.get(i), v / norm));
        }
    }
    Ok(())
}

pub fn check_predict_scale(model: &SvmModel, g: &BscpVector, s: f64) -> Check {
    let a = predict(model, g).map_err(|e| e.to_string())?;
    let b = predict(model, &g.scaled(s)).map_err(|e| e.to_string())?;
    if a != b {
        return fail(format!("class {a} became {b} under scale {s}"));
    }
    Ok(())
}

pub fn check_model_round_trip(model: &TrainedModel) -> Check {
    let bytes = to_bytes(model).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("m.bscp");
    bscp::model_io::save_model(model, &path).map_err(|e| e.to_string())?;
    let back = bscp::model_io::load_model(&path).map_err(|e| e.to_string())?;
    if to_bytes(&back).map_err(|e| e.to_string())? != bytes {
        return fail("re-serialized bytes differ");
    }
    let same = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits());
    if !same(back.codebook.entries(), model.codebook.entries()) || !same(back.svm.weights(), model.svm.weights()) {
        return fail("loaded parameters are not bit-equal");
    }
    if back != *model || from_bytes(&bytes).map_err(|e| e.to_string())? != *model {
        return fail("loaded model differs");
    }
    Ok(())
}

pub fn check_dt_oracle(mask: &BinaryMask) -> Check {
    let field = distance_transform(mask);
    let want = brute_force_dt(mask);
    for (i, (&got, &w)) in field.values().iter().zip(&want).enumerate() {
        if (got - w).abs() > 0.5 {
            return fail(format!("pixel {i}: {got} vs brute force {w}"));
        }
    }
    Ok(())
}

/// Dense features, labels and weights with every margin and every best-wrong
/// choice at least `gap` away from a kink.
#[derive(Debug)]
pub struct SvmInstance {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub features: Vec<BscpVector>,
    pub labels: Vec<usize>,
}

pub fn svm_instance_strategy(classes: usize, dim: usize, n: usize) -> impl Strategy<Value = SvmInstance> {
    (
        prop::collection::vec(-1.0f64..1.0, classes * dim),
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), n),
        prop::collection::vec(0..classes, n),
    )
        .prop_map(move |(weights, xs, labels)| SvmInstance {
            dim,
            weights,
            features: xs.iter().map(|x| BscpVector::from_dense(x)).collect(),
            labels,
        })
}

pub fn kink_distance(inst: &SvmInstance) -> f64 {
    let mut gap = f64::INFINITY;
    for (g, &y) in inst.features.iter().zip(&inst.labels) {
        let s: Vec<f64> = inst.weights.chunks(inst.dim).map(|w| g.dot(w)).collect();
        let mut wrong: Vec<f64> = s.iter().enumerate().filter(|e| e.0 != y).map(|e| *e.1).collect();
        wrong.sort_by(|a, b| b.total_cmp(a));
        gap = gap.min((1.0 + wrong[0] - s[y]).abs());
        if wrong.len() > 1 {
            gap = gap.min(wrong[0] - wrong[1]);
        }
    }
    gap
}

pub fn check_subgradient(inst: &SvmInstance, alpha: f64) -> Check {
    let g = subgradient(&inst.weights, inst.dim, &inst.features, &inst.labels, alpha);
    let h = 1e-6;
    let mut w = inst.weights.clone();
    let mut diff = 0.0;
    for i in 0..w.len() {
        let keep = w[i];
        w[i] = keep + h;
        let up = objective(&w, inst.dim, &inst.features, &inst.labels, alpha);
        w[i] = keep - h;
        let down = objective(&w, inst.dim, &inst.features, &inst.labels, alpha);
        w[i] = keep;
        let fd = (up - down) / (2.0 * h);
        diff += (fd - g[i]) * (fd - g[i]);
    }
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if diff.sqrt() > 1e-4 * norm.max(1e-12) {
        return fail(format!(
            "finite differences deviate by {} (gradient norm {norm})",
            diff.sqrt()
        ));
    }
    Ok(())
}

// ------------------------------------------------------------- suites

pub fn kmeans_data_strategy() -> impl Strategy<Value = (DescriptorMatrix, usize, u64)> {
    (
        prop::collection::vec(-5.0f64..5.0, 4 * 40..4 * 120),
        2usize..10,
        any::<u64>(),
    )
        .prop_map(|(mut data, k, seed)| {
            data.truncate(data.len() / 4 * 4);
            (DescriptorMatrix::from_rows(4, data).unwrap(), k, seed)
        })
}

pub fn svm_model_strategy() -> impl Strategy<Value = (SvmModel, BscpVector, f64)> {
    (2usize..6, 1usize..20).prop_flat_map(|(classes, dim)| {
        (
            prop::collection::vec(-1.0f64..1.0, classes * dim),
            prop::collection::vec(-1.0f64..1.0, dim),
            prop_oneof![1e-3f64..1.0, 1.0f64..1e3],
        )
            .prop_map(move |(w, g, s)| {
                let labels = (0..classes).map(|c| format!("c{c}")).collect();
                (
                    SvmModel::new(dim, w, labels, 10.0).unwrap(),
                    BscpVector::from_dense(&g),
                    s,
                )
            })
    })
}

/// Every invariant check with its deterministic case budget.
pub fn invariant_suite() -> Vec<(&'static str, Check)> {
    let geometry = small_geometry();
    vec![
        (
            "histogram mass conservation",
            run_cases(200, part_strategy(50, 5), |p| check_histogram_mass(&p, &geometry)),
        ),
        (
            "LLC sum-to-one and locality",
            run_cases(200, codebook_strategy(40, 12), |(cb, f)| {
                check_llc_affine_and_local(&cb, &f, 5)
            }),
        ),
        (
            "k-means monotonicity",
            run_cases(40, kmeans_data_strategy(), |(d, k, s)| check_kmeans_monotone(&d, k, s)),
        ),
        (
            "pooled vector unit norm and max pooling",
            run_cases(200, codes_strategy(8), |(codes, bbox)| check_pooling(&codes, &bbox, 8)),
        ),
        (
            "DCE nesting",
            run_cases(100, (contour_strategy(64), 2usize..20, 1usize..20), |(c, a, d)| {
                check_dce_nesting(&c, a, a + d)
            }),
        ),
        (
            "predict scale invariance",
            run_cases(200, svm_model_strategy(), |(m, g, s)| check_predict_scale(&m, &g, s)),
        ),
        (
            "model file round trip",
            run_cases(20, any::<u8>(), |s| check_model_round_trip(&small_model(s as u64))),
        ),
    ]
}

pub fn oracle_suite() -> Vec<(&'static str, Check)> {
    let geometry = small_geometry();
    vec![
        (
            "SSC vs brute-force triple binning (20 parts of 10 points)",
            run_cases(20, part_strategy(10, 5), |p| check_ssc_oracle(&p, &geometry)),
        ),
        (
            "LLC vs Lagrangian least squares",
            run_cases(50, codebook_strategy(20, 8), |(cb, f)| check_llc_oracle(&cb, &f, 5)),
        ),
        (
            "distance transform vs brute force on 64x64 masks",
            run_cases(10, blob_strategy(64), |m| check_dt_oracle(&m)),
        ),
        (
            "SVM subgradient vs finite differences",
            run_cases(50, svm_instance_strategy(4, 6, 12), |inst| {
                if kink_distance(&inst) < 1e-3 {
                    return Ok(());
                }
                check_subgradient(&inst, 10.0)
            }),
        ),
    ]
}
