//! Ranks database references against a read pool by compression-based
//! similarity: a model ensemble is trained on the reads, frozen, and each
//! reference is scored by how cheaply the frozen models encode it.

use readsort::classify::{classify, ClassifyConfig, ReferenceDb};
use readsort::sim::{gen_genome, refs_to_fasta, simulate_reads, SimConfig};

fn main() -> anyhow::Result<()> {
    // Reads come from the first two genomes only; the third is a decoy.
    let genomes: Vec<(String, Vec<u8>)> = (0..3)
        .map(|i| (format!("genome{i}"), gen_genome(8_000, 7 + i as u64)))
        .collect();
    let cfg = SimConfig {
        coverage: 10.0,
        seed: 2,
        ..SimConfig::default()
    };
    let (records, _) = simulate_reads(&genomes[..2], &cfg)?;
    let db = ReferenceDb::from_fasta_bytes(&refs_to_fasta(&genomes))?;

    let result = classify(&db, &records, &ClassifyConfig::default())?;
    print!("{}", result.to_tsv());
    println!(
        "selected at T1={}: {:?}",
        result.threshold_t1,
        result
            .selected()
            .iter()
            .map(|r| r.id.as_str())
            .collect::<Vec<_>>()
    );
    Ok(())
}
