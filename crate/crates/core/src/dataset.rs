//! Labelled shape collections laid out as `<root>/<class>/<image>`.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::shape_io::{load_mask, save_mask, BinaryMask};

#[derive(Clone, Debug)]
pub struct Dataset {
    pub classes: Vec<String>,
    pub masks: Vec<BinaryMask>,
    pub labels: Vec<usize>,
    pub names: Vec<String>,
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref(),
        Some("png" | "pgm")
    )
}

impl Dataset {
    pub fn new(classes: Vec<String>) -> Self {
        Dataset {
            classes,
            masks: Vec::new(),
            labels: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn push(&mut self, mask: BinaryMask, label: usize, name: String) {
        self.masks.push(mask);
        self.labels.push(label);
        self.names.push(name);
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Shape indices per class.
    pub fn by_class(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Loads every PNG/PGM under each class subdirectory of `root`; classes
    /// and files are taken in lexicographic order.
    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let mut class_dirs: Vec<_> = fs::read_dir(root)?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        class_dirs.sort();
        let mut entries = Vec::new();
        let mut classes = Vec::new();
        for dir in class_dirs {
            let mut files: Vec<_> = fs::read_dir(&dir)?
                .collect::<std::io::Result<Vec<_>>>()?
                .into_iter()
                .map(|e| e.path())
                .filter(|p| p.is_file() && is_image(p))
                .collect();
            if files.is_empty() {
                continue;
            }
            files.sort();
            let label = classes.len();
            classes.push(dir.file_name().unwrap_or_default().to_string_lossy().into_owned());
            entries.extend(files.into_iter().map(|f| (f, label)));
        }
        if classes.is_empty() {
            return Err(Error::Dataset(format!(
                "no class directories with images under {}",
                root.display()
            )));
        }
        let masks: Vec<BinaryMask> = entries
            .par_iter()
            .map(|(path, _)| load_mask(path))
            .collect::<Result<_>>()?;
        let mut out = Dataset::new(classes);
        for (mask, (path, label)) in masks.into_iter().zip(entries) {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            out.push(mask, label, name);
        }
        Ok(out)
    }

    /// Writes the masks as PNGs in the layout [`Dataset::load`] reads.
    pub fn save(&self, root: impl AsRef<Path>) -> Result<()> {
        let root = root.as_ref();
        for class in &self.classes {
            fs::create_dir_all(root.join(class))?;
        }
        self.masks
            .par_iter()
            .zip(&self.labels)
            .zip(&self.names)
            .try_for_each(|((mask, &label), name)| save_mask(mask, root.join(&self.classes[label]).join(name)))
    }
}
