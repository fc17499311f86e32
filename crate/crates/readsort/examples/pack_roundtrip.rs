//! Full pipeline round trip: pack a FASTQ file (classify, cluster, sort,
//! compress) and unpack it back to a byte-identical copy via the permutation
//! sidecar. The reference database is deleted before unpacking to show that
//! decompression never needs it.

use readsort::fastq::fastq_to_bytes;
use readsort::pipeline::{cmd_pack, cmd_unpack, PipelineConfig};
use readsort::sim::{gen_genome, refs_to_fasta, simulate_reads, SimConfig};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let refs: Vec<(String, Vec<u8>)> = (0..2)
        .map(|i| (format!("genome{i}"), gen_genome(6_000, i as u64)))
        .collect();
    let cfg = SimConfig {
        coverage: 10.0,
        seed: 5,
        ..SimConfig::default()
    };
    let (records, _) = simulate_reads(&refs, &cfg)?;

    let fastq = dir.path().join("reads.fastq");
    let db = dir.path().join("refs.fasta");
    std::fs::write(&fastq, fastq_to_bytes(&records))?;
    std::fs::write(&db, refs_to_fasta(&refs))?;

    let mut config = PipelineConfig::new(&db, &fastq);
    config.work_dir = dir.path().to_path_buf();
    let archive = dir.path().join("reads.rsqz");
    let sidecar = dir.path().join("reads.rsrt");
    let report = cmd_pack(&config, &archive, Some(&sidecar), None)?;
    println!(
        "packed {} reads: {} -> {} bytes in {} groups",
        report.n_reads,
        std::fs::metadata(&fastq)?.len(),
        report.archive_bytes,
        report.n_groups
    );
    if let Some(gain) = &report.gain {
        println!(
            "sorting gain {} bytes ({:.2}%), {} after the sidecar charge",
            gain.gain_bytes, gain.gain_percent, gain.adjusted_gain_bytes
        );
    }

    std::fs::remove_file(&db)?;
    let restored = dir.path().join("restored.fastq");
    cmd_unpack(&archive, Some(&sidecar), &restored, &config.backend, dir.path())?;
    assert_eq!(std::fs::read(&fastq)?, std::fs::read(&restored)?);
    println!("restored file is byte-identical to the original");
    Ok(())
}
