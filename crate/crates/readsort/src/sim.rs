//! Illumina-style read simulation from reference sequences: paired-end reads
//! with normally distributed insert sizes, substitution errors and a simple
//! position-dependent quality profile. Enough to reproduce the coverage and
//! reference-count experimental axes at desk scale.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand::rngs::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fastq::FastqRecord;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub read_len: usize,
    pub coverage: f64,
    pub insert_mean: usize,
    pub insert_sd: f64,
    pub sub_error_rate: f64,
    pub paired: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            read_len: 150,
            coverage: 50.0,
            insert_mean: 200,
            insert_sd: 10.0,
            sub_error_rate: 0.005,
            paired: true,
            seed: 0,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Deterministic pseudo-random genome over ACGT with mild repeat structure:
/// roughly 10% of positions are 500-base blocks copied from earlier in the
/// sequence.
pub fn gen_genome(length: usize, seed: u64) -> Vec<u8> {
    assert!(length >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut genome: Vec<u8> = (0..length)
        .map(|_| b"ACGT"[rng.random_range(0..4usize)])
        .collect();
    const BLOCK: usize = 500;
    if length > 2 * BLOCK {
        let n_blocks = length / BLOCK / 10;
        for _ in 0..n_blocks {
            let dst = rng.random_range(BLOCK..length - BLOCK);
            let src = rng.random_range(0..dst);
            let len = BLOCK.min(length - dst).min(dst - src);
            let copied: Vec<u8> = genome[src..src + len].to_vec();
            genome[dst..dst + len].copy_from_slice(&copied);
        }
    }
    genome
}

pub fn reverse_complement(seq: &[u8]) -> Vec<u8> {
    seq.iter()
        .rev()
        .map(|&b| match b {
            b'A' => b'T',
            b'C' => b'G',
            b'G' => b'C',
            b'T' => b'A',
            other => other,
        })
        .collect()
}

fn apply_errors(seq: &mut [u8], rate: f64, rng: &mut ChaCha8Rng) {
    if rate <= 0.0 {
        return;
    }
    for b in seq.iter_mut() {
        if rng.random_bool(rate) {
            let alternatives: [u8; 3] = match *b {
                b'A' => [b'C', b'G', b'T'],
                b'C' => [b'A', b'G', b'T'],
                b'G' => [b'A', b'C', b'T'],
                _ => [b'A', b'C', b'G'],
            };
            *b = alternatives[rng.random_range(0..3usize)];
        }
    }
}

/// Quality byte at `pos`: base 'I' with an ~10-point linear drop across the
/// read plus +/-1 noise, clamped to printable range.
fn quality_profile(read_len: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..read_len)
        .map(|pos| {
            let drop = (pos * 10 / read_len.max(1)) as i32;
            let noise = rng.random_range(-1..=1i32);
            (b'I' as i32 - drop + noise).clamp(33, 73) as u8
        })
        .collect()
}

/// One read's worth of ground truth.
#[derive(Debug, Clone)]
pub struct ReadOrigin {
    pub read_id: String,
    pub ref_id: String,
}

/// Simulates reads from every reference and shuffles them globally, modelling
/// the somewhat random order of real sequencing output. Deterministic per
/// seed. Returns records plus the read-to-reference ground truth.
pub fn simulate_reads(
    refs: &[(String, Vec<u8>)],
    cfg: &SimConfig,
) -> Result<(Vec<FastqRecord>, Vec<ReadOrigin>)> {
    assert!(cfg.read_len >= 1);
    assert!(cfg.coverage > 0.0);
    let mut reads: Vec<(FastqRecord, ReadOrigin)> = Vec::new();
    for (ref_idx, (ref_id, genome)) in refs.iter().enumerate() {
        let minimum = if cfg.paired {
            cfg.insert_mean.max(cfg.read_len)
        } else {
            cfg.read_len
        };
        if genome.len() < minimum {
            return Err(Error::Domain(format!(
                "reference '{ref_id}' is shorter ({}) than required {minimum}",
                genome.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ ref_idx as u64));
        let expected_reads = cfg.coverage * genome.len() as f64 / cfg.read_len as f64;
        if cfg.paired {
            let normal = Normal::new(cfg.insert_mean as f64, cfg.insert_sd)
                .map_err(|e| Error::Domain(e.to_string()))?;
            let n_pairs = (expected_reads / 2.0).round() as usize;
            for pair in 0..n_pairs {
                let insert = (normal.sample(&mut rng).round() as i64)
                    .clamp(cfg.read_len as i64, genome.len() as i64)
                    as usize;
                let pos = rng.random_range(0..=genome.len() - insert);
                let mut fwd = genome[pos..pos + cfg.read_len].to_vec();
                let mut rev =
                    reverse_complement(&genome[pos + insert - cfg.read_len..pos + insert]);
                apply_errors(&mut fwd, cfg.sub_error_rate, &mut rng);
                apply_errors(&mut rev, cfg.sub_error_rate, &mut rng);
                for (mate, seq) in [(1, fwd), (2, rev)] {
                    let id = format!("{ref_id}:{pair}:{pos}/{mate}");
                    let quality = quality_profile(cfg.read_len, &mut rng);
                    reads.push((
                        FastqRecord {
                            header: format!("@{id}").into_bytes(),
                            sequence: seq,
                            separator: b"+".to_vec(),
                            quality,
                        },
                        ReadOrigin {
                            read_id: id,
                            ref_id: ref_id.clone(),
                        },
                    ));
                }
            }
        } else {
            let n_reads = expected_reads.round() as usize;
            for r in 0..n_reads {
                let pos = rng.random_range(0..=genome.len() - cfg.read_len);
                let mut seq = genome[pos..pos + cfg.read_len].to_vec();
                apply_errors(&mut seq, cfg.sub_error_rate, &mut rng);
                let id = format!("{ref_id}:{r}:{pos}/1");
                let quality = quality_profile(cfg.read_len, &mut rng);
                reads.push((
                    FastqRecord {
                        header: format!("@{id}").into_bytes(),
                        sequence: seq,
                        separator: b"+".to_vec(),
                        quality,
                    },
                    ReadOrigin {
                        read_id: id,
                        ref_id: ref_id.clone(),
                    },
                ));
            }
        }
    }
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    reads.shuffle(&mut shuffle_rng);
    Ok(reads.into_iter().unzip())
}

/// `read_id <TAB> ref_id` rows, in emitted read order.
pub fn origins_to_tsv(origins: &[ReadOrigin]) -> String {
    let mut out = String::new();
    for o in origins {
        out.push_str(&o.read_id);
        out.push('\t');
        out.push_str(&o.ref_id);
        out.push('\n');
    }
    out
}

/// Multi-FASTA serialization of reference sequences, 70 columns.
pub fn refs_to_fasta(refs: &[(String, Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (id, seq) in refs {
        out.extend_from_slice(format!(">{id}\n").as_bytes());
        for chunk in seq.chunks(70) {
            out.extend_from_slice(chunk);
            out.push(b'\n');
        }
    }
    out
}
