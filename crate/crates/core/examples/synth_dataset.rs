//! Writes both generated datasets as PNG directories.
//!
//! cargo run --release --example synth_dataset -- [out_dir]

use std::path::PathBuf;

use bscp::synth::{four_class_dataset, thickness_dataset};

fn main() -> bscp::Result<()> {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("bscp_synth"));
    for (name, data) in [
        ("four_class", four_class_dataset(40, 0)?),
        ("thickness", thickness_dataset(40, 0)?),
    ] {
        let dir = root.join(name);
        data.save(&dir)?;
        let sizes: Vec<usize> = data.by_class().iter().map(Vec::len).collect();
        println!("{}: classes {:?}, sizes {sizes:?}", dir.display(), data.classes);
    }
    Ok(())
}
