//! Accuracy against the number of thickness bins on the constant-width versus
//! tapered strip set.

use bscp::config::ExperimentConfig;
use bscp::experiment::{sweep, SweepParam};
use bscp::synth::thickness_dataset;

fn main() -> bscp::Result<()> {
    let data = thickness_dataset(20, 0)?;
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 200;
    cfg.seeds = 4;
    let table = sweep(&data, &cfg, SweepParam::ThicknessBins, &[1, 3, 5, 7])?;
    print!("{}", table.to_text());
    Ok(())
}
