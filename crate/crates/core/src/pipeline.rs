//! Per-shape extraction (pose, contour, skeleton, parts) and encoding of a
//! shape's part bag into its pooled feature.

use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::descriptor::{
    dce_critical_points, enumerate_parts, part_descriptor, BinGeometry, ContourPart, CriticalPointSet, DescriptorConfig,
};
use crate::encoding::{flip_merge, llc_encode, spm_pool, BscpVector, ShapeCode};
use crate::error::Result;
use crate::shape_io::{normalize_shape, trace_contour, BinaryMask, BoundingBox};
use crate::skeleton::{associate_thickness, distance_transform, extract_skeleton, AssociatedContour, Skeleton};

/// Everything that shapes the part bag of a mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureConfig {
    /// Contour resampling size.
    pub n_c: usize,
    /// Critical points kept by contour evolution.
    pub t: usize,
    pub prune_ratio: f64,
    pub descriptor: DescriptorConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            n_c: 256,
            t: 10,
            prune_ratio: 0.08,
            descriptor: DescriptorConfig::default(),
        }
    }
}

impl FeatureConfig {
    pub fn geometry(&self) -> Result<BinGeometry> {
        self.descriptor.geometry()
    }
}

/// Full intermediate state of one shape, mostly for inspection.
#[derive(Clone, Debug)]
pub struct ShapeFeatures {
    pub normalized: BinaryMask,
    pub skeleton: Skeleton,
    pub contour: AssociatedContour,
    pub critical: CriticalPointSet,
    pub parts: Vec<ContourPart>,
    pub bbox: BoundingBox,
}

impl ShapeFeatures {
    pub fn bag(self) -> PartBag {
        PartBag {
            parts: self.parts,
            bbox: self.bbox,
        }
    }
}

/// The parts of one shape plus the pooling frame.
#[derive(Clone, Debug)]
pub struct PartBag {
    pub parts: Vec<ContourPart>,
    pub bbox: BoundingBox,
}

pub fn extract_shape(mask: &BinaryMask, config: &FeatureConfig) -> Result<ShapeFeatures> {
    config.descriptor.validate()?;
    let normalized = normalize_shape(mask)?;
    let bbox = normalized.bounding_box().ok_or(crate::error::Error::EmptyForeground)?;
    let contour = trace_contour(&normalized, config.n_c)?;
    let field = distance_transform(&normalized);
    let skeleton = extract_skeleton(&normalized, &field, config.prune_ratio)?;
    let associated = associate_thickness(&contour, &skeleton)?;
    let critical = dce_critical_points(&associated.contour, config.t)?;
    let parts = enumerate_parts(&associated, &critical, &config.descriptor);
    Ok(ShapeFeatures {
        normalized,
        skeleton,
        contour: associated,
        critical,
        parts,
        bbox,
    })
}

/// Merged (part + mirror) code of every part.
pub fn shape_codes(bag: &PartBag, geometry: &BinGeometry, codebook: &Codebook, llc_k: usize) -> Result<Vec<ShapeCode>> {
    bag.parts
        .par_iter()
        .map(|part| {
            let plain = llc_encode(part_descriptor(part, geometry).values(), codebook, llc_k)?;
            let mirror = llc_encode(part_descriptor(&part.mirrored(), geometry).values(), codebook, llc_k)?;
            Ok(flip_merge(
                &ShapeCode::new(plain, part.median),
                &ShapeCode::new(mirror, part.median),
            ))
        })
        .collect()
}

pub fn encode_shape(bag: &PartBag, geometry: &BinGeometry, codebook: &Codebook, llc_k: usize) -> Result<BscpVector> {
    let codes = shape_codes(bag, geometry, codebook, llc_k)?;
    spm_pool(&codes, &bag.bbox, codebook.k())
}
