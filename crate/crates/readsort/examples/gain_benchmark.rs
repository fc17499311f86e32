//! Sweeps coverage on simulated data and prints the compression gain of
//! sorted order over original order, per channel, as CSV.

use readsort::pipeline::{cmd_bench, BenchAxis, BenchConfig};

fn main() -> anyhow::Result<()> {
    let base = BenchConfig {
        n_refs: 4,
        genome_len: 6_000,
        seed: 11,
        ..BenchConfig::default()
    };
    let csv = cmd_bench(BenchAxis::Coverage, &[2.0, 10.0, 30.0], &base)?;
    print!("{csv}");
    Ok(())
}
