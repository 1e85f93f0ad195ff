//! Trained model bundle and its binary file format.
//!
//! Layout (little-endian): magic `BSCP`, u16 version, eleven u32 header fields
//! (n_c, t, n_s, n_r, n_d, n_o, n_td, K, llc_k, L, D), f32 bin edges
//! (distance, orientation, thickness), the K x D codebook and the L x 21K
//! weights as f32, then a trailer with prune_ratio f64, alpha f64, geometry
//! fingerprint u64, codebook training count u64, SVM iterations u64, final
//! objective f64 and the L class labels as u32 length plus UTF-8 bytes.

use std::path::Path;

use crate::classifier::{predict, SvmModel};
use crate::codebook::Codebook;
use crate::descriptor::{BinGeometry, DescriptorConfig};
use crate::encoding::{BscpVector, REGIONS};
use crate::error::{Error, Result};
use crate::pipeline::{encode_shape, extract_shape, FeatureConfig};
use crate::shape_io::BinaryMask;

pub const MAGIC: &[u8; 4] = b"BSCP";
pub const VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub features: FeatureConfig,
    pub llc_k: usize,
    pub codebook: Codebook,
    pub svm: SvmModel,
}

impl TrainedModel {
    pub fn new(features: FeatureConfig, llc_k: usize, codebook: Codebook, svm: SvmModel) -> Result<Self> {
        let geometry = features.geometry()?;
        if codebook.dim() != features.descriptor.dim() {
            return Err(Error::Inconsistent(format!(
                "codebook dimension {} but descriptors have {}",
                codebook.dim(),
                features.descriptor.dim()
            )));
        }
        if codebook.fingerprint() != geometry.fingerprint() {
            return Err(Error::Inconsistent("codebook was trained with different bins".into()));
        }
        if svm.dim() != REGIONS * codebook.k() {
            return Err(Error::Inconsistent(format!(
                "SVM dimension {} but the pooled feature has {}",
                svm.dim(),
                REGIONS * codebook.k()
            )));
        }
        if llc_k == 0 || llc_k > codebook.k() {
            return Err(Error::Inconsistent(format!("llc_k {llc_k} out of range")));
        }
        Ok(TrainedModel {
            features,
            llc_k,
            codebook,
            svm,
        })
    }

    pub fn geometry(&self) -> BinGeometry {
        let d = &self.features.descriptor;
        BinGeometry::new(d.n_d, d.n_o, d.n_td)
    }

    pub fn encode(&self, mask: &BinaryMask) -> Result<BscpVector> {
        let bag = extract_shape(mask, &self.features)?.bag();
        encode_shape(&bag, &self.geometry(), &self.codebook, self.llc_k)
    }

    /// Predicted class index and its label.
    pub fn predict(&self, mask: &BinaryMask) -> Result<(usize, &str)> {
        let class = predict(&self.svm, &self.encode(mask)?)?;
        Ok((class, &self.svm.class_labels()[class]))
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::Inconsistent(format!("{v} does not fit in u32")))?;
        self.0.extend_from_slice(&v.to_le_bytes());
        Ok(())
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f32s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.0.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).ok_or(Error::Truncated)?;
        let out = self.bytes.get(self.at..end).ok_or(Error::Truncated)?;
        self.at = end;
        Ok(out)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("slice length"))
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.array()?) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(4).ok_or(Error::Truncated)?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("chunk length")) as f64)
            .collect())
    }
}

fn edge_arrays(geometry: &BinGeometry) -> [Vec<f64>; 3] {
    [
        geometry.distance_edges().to_vec(),
        geometry.orientation_edges(),
        geometry.thickness_edges().to_vec(),
    ]
}

pub fn to_bytes(model: &TrainedModel) -> Result<Vec<u8>> {
    let f = &model.features;
    let d = &f.descriptor;
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u16(VERSION);
    for v in [
        f.n_c,
        f.t,
        d.n_s,
        d.n_r,
        d.n_d,
        d.n_o,
        d.n_td,
        model.codebook.k(),
        model.llc_k,
        model.svm.classes(),
        model.codebook.dim(),
    ] {
        w.u32(v)?;
    }
    for edges in edge_arrays(&model.geometry()) {
        w.f32s(&edges);
    }
    w.f32s(model.codebook.entries());
    w.f32s(model.svm.weights());
    w.f64(f.prune_ratio);
    w.f64(model.svm.alpha);
    w.u64(model.codebook.fingerprint());
    w.u64(model.codebook.training_samples() as u64);
    w.u64(model.svm.iterations);
    w.f64(model.svm.objective);
    for label in model.svm.class_labels() {
        w.u32(label.len())?;
        w.0.extend_from_slice(label.as_bytes());
    }
    Ok(w.0)
}

pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(4).map_err(|_| Error::BadMagic)? != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let mut h = [0usize; 11];
    for v in &mut h {
        *v = r.u32()?;
    }
    let [n_c, t, n_s, n_r, n_d, n_o, n_td, k, llc_k, l, dim] = h;
    let descriptor = DescriptorConfig {
        n_s,
        n_r,
        n_d,
        n_o,
        n_td,
    };
    let geometry = descriptor
        .geometry()
        .map_err(|e| Error::Inconsistent(format!("header: {e}")))?;
    if dim != descriptor.dim() {
        return Err(Error::Inconsistent(format!(
            "descriptor length {dim} does not match the bin counts"
        )));
    }
    for expected in edge_arrays(&geometry) {
        let got = r.f32s(expected.len())?;
        let want: Vec<f64> = expected.iter().map(|&e| e as f32 as f64).collect();
        if got.iter().zip(&want).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(Error::Inconsistent("stored bin edges differ from the header".into()));
        }
    }
    let codebook_len = k.checked_mul(dim).ok_or(Error::Truncated)?;
    let entries = r.f32s(codebook_len)?;
    let svm_dim = REGIONS.checked_mul(k).ok_or(Error::Truncated)?;
    let weights = r.f32s(l.checked_mul(svm_dim).ok_or(Error::Truncated)?)?;
    let prune_ratio = r.f64()?;
    let alpha = r.f64()?;
    let fingerprint = r.u64()?;
    let training_samples = r.u64()? as usize;
    let iterations = r.u64()?;
    let objective = r.f64()?;
    let mut labels = Vec::with_capacity(l);
    for _ in 0..l {
        let len = r.u32()?;
        let raw = r.take(len)?;
        labels
            .push(String::from_utf8(raw.to_vec()).map_err(|_| Error::Inconsistent("class label is not UTF-8".into()))?);
    }
    if r.at != bytes.len() {
        return Err(Error::Inconsistent(format!("{} trailing bytes", bytes.len() - r.at)));
    }
    let codebook = Codebook::new(k, dim, entries, fingerprint, training_samples)?;
    let mut svm = SvmModel::new(svm_dim, weights, labels, alpha)?;
    svm.iterations = iterations;
    svm.objective = objective;
    let features = FeatureConfig {
        n_c,
        t,
        prune_ratio,
        descriptor,
    };
    TrainedModel::new(features, llc_k, codebook, svm)
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_bytes(model)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    from_bytes(&std::fs::read(path)?)
}
