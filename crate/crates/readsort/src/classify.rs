//! Compression-based metagenomic classification: train an ensemble on the
//! read pool, freeze it, score every database reference by relative
//! compression, rank by similarity and apply the T1 threshold.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fastq::FastqRecord;
use crate::model::{EnsembleConfig, ModelEnsemble, SymbolMapper, ALPHABET_BITS};

/// Reference sequences loaded from a multi-FASTA file.
#[derive(Debug)]
pub struct ReferenceDb {
    pub entries: Vec<DbEntry>,
    pub total_bases: u64,
}

#[derive(Debug)]
pub struct DbEntry {
    pub id: String,
    /// Uppercased raw bytes; non-ACGT bytes are kept and mapped to random
    /// symbols only at analysis time.
    pub sequence: Vec<u8>,
}

impl ReferenceDb {
    pub fn from_fasta_bytes(bytes: &[u8]) -> Result<Self> {
        let mut entries: Vec<DbEntry> = Vec::new();
        let mut current: Option<DbEntry> = None;
        for line in bytes.split(|&b| b == b'\n') {
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            if line[0] == b'>' {
                if let Some(entry) = current.take() {
                    push_entry(&mut entries, entry)?;
                }
                let id = String::from_utf8_lossy(&line[1..])
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_string();
                if id.is_empty() {
                    return Err(Error::MalformedFasta("record with empty id".into()));
                }
                current = Some(DbEntry {
                    id,
                    sequence: Vec::new(),
                });
            } else {
                match current.as_mut() {
                    Some(entry) => entry
                        .sequence
                        .extend(line.iter().map(|b| b.to_ascii_uppercase())),
                    None => {
                        return Err(Error::MalformedFasta(
                            "sequence data before first '>' header".into(),
                        ))
                    }
                }
            }
        }
        if let Some(entry) = current.take() {
            push_entry(&mut entries, entry)?;
        }
        if entries.is_empty() {
            return Err(Error::EmptyDb);
        }
        let total_bases = entries.iter().map(|e| e.sequence.len() as u64).sum();
        Ok(ReferenceDb {
            entries,
            total_bases,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_fasta_bytes(&bytes)
    }
}

fn push_entry(entries: &mut Vec<DbEntry>, entry: DbEntry) -> Result<()> {
    if entry.sequence.is_empty() {
        return Err(Error::MalformedFasta(format!(
            "record '{}' has an empty sequence",
            entry.id
        )));
    }
    if entries.iter().any(|e| e.id == entry.id) {
        return Err(Error::MalformedFasta(format!(
            "duplicate record id '{}'",
            entry.id
        )));
    }
    entries.push(entry);
    Ok(())
}

/// One scored reference.
#[derive(Debug, Clone)]
pub struct RankedRef {
    pub id: String,
    pub similarity: f64,
    pub bits: f64,
}

/// References ranked by descending similarity (ties broken by ascending id),
/// with the T1 selection threshold applied.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub ranked: Vec<RankedRef>,
    pub threshold_t1: f64,
}

impl ClassificationResult {
    /// The leading entries with similarity strictly above T1.
    pub fn selected(&self) -> &[RankedRef] {
        let end = self
            .ranked
            .iter()
            .position(|r| r.similarity <= self.threshold_t1)
            .unwrap_or(self.ranked.len());
        &self.ranked[..end]
    }

    /// TSV rows `ref_id <TAB> similarity <TAB> bits` in ranked order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.ranked {
            writeln!(out, "{}\t{:.6}\t{:.3}", r.id, r.similarity, r.bits).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    pub ensemble: EnsembleConfig,
    pub t1: f64,
    /// Seed for the analysis-phase mapping of non-ACGT bytes.
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            ensemble: EnsembleConfig::default(),
            t1: 50.0,
            seed: 0,
        }
    }
}

/// Relative compression C(x||Y): bits to represent `x` under the frozen
/// ensemble trained exclusively on the read pool.
pub fn relative_compression(x: &[u8], frozen: &ModelEnsemble) -> Result<f64> {
    frozen.code_length(x)
}

/// Percentage of relative similarity: S = (1 - C(x||Y) / (|x| log2 4)) * 100.
/// Not clamped below zero.
pub fn similarity(x: &[u8], frozen: &ModelEnsemble) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyReference);
    }
    let bits = relative_compression(x, frozen)?;
    Ok(similarity_from_bits(bits, x.len()))
}

pub fn similarity_from_bits(bits: f64, len: usize) -> f64 {
    (1.0 - bits / (len as f64 * ALPHABET_BITS)) * 100.0
}

/// Maps the raw sequence bytes of reads into analysis symbols, in file order,
/// with one seeded generator.
pub fn map_reads(records: &[FastqRecord], seed: u64) -> Vec<Vec<u8>> {
    let mut mapper = SymbolMapper::new(seed);
    records
        .iter()
        .map(|r| mapper.map_sequence(&r.sequence))
        .collect()
}

/// Per-reference analysis symbols. Each reference gets a generator seeded
/// from its id so the mapping is invariant under database permutation.
pub fn map_reference(entry: &DbEntry, seed: u64) -> Vec<u8> {
    let mut mapper = SymbolMapper::new(seed ^ crate::reorder::fnv1a(entry.id.as_bytes()));
    mapper.map_sequence(&entry.sequence)
}

/// Trains one ensemble over the mapped read sequences (context reset between
/// reads) and freezes it.
pub fn train_read_pool(read_syms: &[Vec<u8>], config: &EnsembleConfig) -> Result<ModelEnsemble> {
    let mut ensemble = ModelEnsemble::new(config);
    for syms in read_syms {
        ensemble.train(syms)?;
    }
    ensemble.freeze();
    Ok(ensemble)
}

/// Full classification: train on the read pool, freeze, score every
/// reference, rank descending (ties by ascending id), select S > T1.
pub fn classify(
    db: &ReferenceDb,
    records: &[FastqRecord],
    config: &ClassifyConfig,
) -> Result<ClassificationResult> {
    if db.entries.is_empty() {
        return Err(Error::EmptyDb);
    }
    let read_syms = map_reads(records, config.seed);
    let frozen = train_read_pool(&read_syms, &config.ensemble)?;
    classify_with_pool(db, &frozen, config)
}

/// Scores the database against an already-trained frozen read-pool ensemble.
pub fn classify_with_pool(
    db: &ReferenceDb,
    frozen: &ModelEnsemble,
    config: &ClassifyConfig,
) -> Result<ClassificationResult> {
    if db.entries.is_empty() {
        return Err(Error::EmptyDb);
    }
    let mut ranked = db
        .entries
        .par_iter()
        .map(|entry| {
            let syms = map_reference(entry, config.seed);
            let bits = relative_compression(&syms, frozen)?;
            Ok(RankedRef {
                id: entry.id.clone(),
                similarity: similarity_from_bits(bits, syms.len()),
                bits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap()
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(ClassificationResult {
        ranked,
        threshold_t1: config.t1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastq::parse_fastq;
    use crate::model::encode_base;
    use rand::{RngExt, SeedableRng};
    use rand::rngs::ChaCha8Rng;

    fn syms(s: &str) -> Vec<u8> {
        s.bytes().map(|b| encode_base(b).unwrap()).collect()
    }

    #[test]
    fn loads_multi_fasta() {
        let db = ReferenceDb::from_fasta_bytes(b">a desc\nACGT\nacg\n>b\nTTTT\n").unwrap();
        assert_eq!(db.entries.len(), 2);
        assert_eq!(db.entries[0].id, "a");
        assert_eq!(db.entries[0].sequence, b"ACGTACG");
        assert_eq!(db.total_bases, 11);
    }

    #[test]
    fn rejects_empty_sequence_and_duplicates() {
        assert!(matches!(
            ReferenceDb::from_fasta_bytes(b">a\n>b\nACGT\n"),
            Err(Error::MalformedFasta(_))
        ));
        let err = ReferenceDb::from_fasta_bytes(b">a\nAC\n>a\nGT\n").unwrap_err();
        assert!(err.to_string().contains("'a'"));
        assert!(matches!(
            ReferenceDb::from_fasta_bytes(b""),
            Err(Error::EmptyDb)
        ));
    }

    #[test]
    fn similarity_formula_contracts() {
        // S == 100 at C == 0; S == 80 for |x|=100, C=40; S == 0 at C == 2|x|
        assert_eq!(similarity_from_bits(0.0, 50), 100.0);
        assert!((similarity_from_bits(40.0, 100) - 80.0).abs() < 1e-12);
        assert_eq!(similarity_from_bits(200.0, 100), 0.0);
        assert!(similarity_from_bits(250.0, 100) < 0.0);
    }

    #[test]
    fn empty_reference_is_an_error() {
        let mut ens = ModelEnsemble::new(&EnsembleConfig::default());
        ens.freeze();
        assert!(matches!(similarity(&[], &ens), Err(Error::EmptyReference)));
        assert_eq!(relative_compression(&[], &ens).unwrap(), 0.0);
    }

    #[test]
    fn repeated_content_compresses_well_and_random_does_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<u8> = (0..2000).map(|_| rng.random_range(0..4u8)).collect();
        let mut ens = ModelEnsemble::new(&EnsembleConfig::default());
        for _ in 0..50 {
            ens.train(&x).unwrap();
        }
        ens.freeze();
        let bits = relative_compression(&x, &ens).unwrap();
        assert!(bits / (x.len() as f64) < 1.0, "{}", bits / x.len() as f64);

        let unrelated: Vec<u8> = (0..10000).map(|_| rng.random_range(0..4u8)).collect();
        let bits = relative_compression(&unrelated, &ens).unwrap();
        assert!(
            bits / unrelated.len() as f64 > 1.9,
            "{}",
            bits / unrelated.len() as f64
        );
    }

    #[test]
    fn classify_selects_present_references() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let make = |rng: &mut ChaCha8Rng, n: usize| -> Vec<u8> {
            (0..n)
                .map(|_| b"ACGT"[rng.random_range(0..4usize)])
                .collect()
        };
        let a = make(&mut rng, 3000);
        let b = make(&mut rng, 3000);
        let c = make(&mut rng, 3000);
        // reads: 150-mers drawn from a and b only
        let mut fastq = Vec::new();
        for i in 0..400 {
            let src = if i % 2 == 0 { &a } else { &b };
            let pos = rng.random_range(0..src.len() - 150);
            fastq.extend_from_slice(format!("@r{i}\n").as_bytes());
            fastq.extend_from_slice(&src[pos..pos + 150]);
            fastq.extend_from_slice(b"\n+\n");
            fastq.extend_from_slice(&vec![b'I'; 150]);
            fastq.push(b'\n');
        }
        let records = parse_fastq(&fastq).unwrap();
        let mut fa = Vec::new();
        for (id, seq) in [("a", &a), ("b", &b), ("c", &c)] {
            fa.extend_from_slice(format!(">{id}\n").as_bytes());
            fa.extend_from_slice(seq);
            fa.push(b'\n');
        }
        let db = ReferenceDb::from_fasta_bytes(&fa).unwrap();
        let result = classify(&db, &records, &ClassifyConfig::default()).unwrap();
        let sel: Vec<&str> = result.selected().iter().map(|r| r.id.as_str()).collect();
        assert!(sel.contains(&"a") && sel.contains(&"b"), "selected {sel:?}");
        assert!(!sel.contains(&"c"), "selected {sel:?}");
        // descending similarity, everything <= 100
        for w in result.ranked.windows(2) {
            assert!(w[0].similarity >= w[1].similarity);
        }
        assert!(result.ranked.iter().all(|r| r.similarity <= 100.0));
        // deterministic across runs
        let again = classify(&db, &records, &ClassifyConfig::default()).unwrap();
        for (x, y) in result.ranked.iter().zip(&again.ranked) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.bits, y.bits);
        }
        let tsv = result.to_tsv();
        assert_eq!(tsv.lines().count(), 3);
    }

    #[test]
    fn zero_reads_still_classifies() {
        let db = ReferenceDb::from_fasta_bytes(b">a\nACGTACGTACGT\n").unwrap();
        let result = classify(&db, &[], &ClassifyConfig::default()).unwrap();
        assert_eq!(result.ranked.len(), 1);
        assert!(result.selected().is_empty());
    }

    #[test]
    fn reference_mapping_uses_symbols_not_bytes() {
        let db = ReferenceDb::from_fasta_bytes(b">a\nACGTNNNN\n").unwrap();
        let syms_mapped = map_reference(&db.entries[0], 42);
        assert_eq!(&syms_mapped[..4], &syms("ACGT")[..]);
        assert!(syms_mapped.iter().all(|&s| s < 4));
    }
}
