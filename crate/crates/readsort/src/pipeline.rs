//! End-to-end orchestration: classify -> filter -> sort -> compress, the
//! inverse unpack/restore path, and the simulation benchmark grid.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::backend::{
    builtin_compress, builtin_decompress, external_compress, external_decompress, gain_report,
    BackendSpec, GainReport,
};
use crate::classify::{
    classify, map_reads, map_reference, ClassificationResult, ClassifyConfig, ReferenceDb,
};
use crate::error::{Error, Result};
use crate::fastq::{fastq_to_bytes, parse_fastq, FastqRecord};
use crate::filter::{apply_plan, recursive_filter, SortPlan};
use crate::model::EnsembleConfig;
use crate::reorder::{
    encode_permutation, header_checksum, restore_order, PermutationSidecar,
};
use crate::sim::{gen_genome, simulate_reads, SimConfig};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub db_path: PathBuf,
    pub input_fastq: PathBuf,
    pub t1: f64,
    pub t2: f64,
    pub ensemble: EnsembleConfig,
    pub backend: BackendSpec,
    /// Emit the permutation sidecar for bit-exact original-order restore.
    pub lossless_order: bool,
    pub threads: usize,
    pub seed: u64,
    pub work_dir: PathBuf,
    /// Also compress the original-order file so the report carries a gain
    /// comparison. Doubles compression work.
    pub measure_gain: bool,
}

impl PipelineConfig {
    pub fn new(db_path: impl Into<PathBuf>, input_fastq: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            db_path: db_path.into(),
            input_fastq: input_fastq.into(),
            t1: 50.0,
            t2: 0.5,
            ensemble: EnsembleConfig::default(),
            backend: BackendSpec::default(),
            lossless_order: true,
            threads: 0,
            seed: 0,
            work_dir: default_work_dir(),
            measure_gain: true,
        }
    }
}

pub fn default_work_dir() -> PathBuf {
    std::env::var_os("READSORT_WORKDIR")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
}

/// Reads a FASTQ file, transparently gunzipping `.gz` inputs.
pub fn read_fastq_file(path: &Path) -> Result<Vec<FastqRecord>> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut decoded = Vec::new();
        flate2::read::GzDecoder::new(&bytes[..]).read_to_end(&mut decoded)?;
        parse_fastq(&decoded)
    } else {
        parse_fastq(&bytes)
    }
}

/// Classification summary embedded in the pack report.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSummary {
    pub t1: f64,
    pub ranked: Vec<(String, f64)>,
    pub selected: Vec<String>,
}

impl ClassificationSummary {
    fn from(result: &ClassificationResult) -> Self {
        ClassificationSummary {
            t1: result.threshold_t1,
            ranked: result
                .ranked
                .iter()
                .map(|r| (r.id.clone(), r.similarity))
                .collect(),
            selected: result.selected().iter().map(|r| r.id.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PackReport {
    pub n_reads: usize,
    pub classification: ClassificationSummary,
    pub n_groups: usize,
    pub grouped_reads: usize,
    pub residual_reads: usize,
    pub sidecar_bytes: u64,
    pub archive_bytes: u64,
    pub gain: Option<GainReport>,
    pub pack_seconds: f64,
    pub notes: Vec<String>,
}

/// In-memory sort computation shared by pack and bench.
pub struct SortOutcome {
    pub classification: ClassificationResult,
    pub plan: SortPlan,
    pub sorted: Vec<FastqRecord>,
    pub sidecar: Option<PermutationSidecar>,
}

pub fn sort_records(
    records: &[FastqRecord],
    db: &ReferenceDb,
    config: &PipelineConfig,
) -> Result<SortOutcome> {
    let classify_cfg = ClassifyConfig {
        ensemble: config.ensemble.clone(),
        t1: config.t1,
        seed: config.seed,
    };
    let classification =
        classify(db, records, &classify_cfg).map_err(|e| e.in_stage("classification"))?;

    let read_syms = map_reads(records, config.seed);
    let selected: Vec<(String, Vec<u8>)> = classification
        .selected()
        .iter()
        .map(|ranked| {
            let entry = db
                .entries
                .iter()
                .find(|e| e.id == ranked.id)
                .expect("selected id comes from the db");
            (ranked.id.clone(), map_reference(entry, config.seed))
        })
        .collect();
    let plan = recursive_filter(&read_syms, &selected, config.t2, &config.ensemble)
        .map_err(|e| e.in_stage("filtering"))?;
    let sorted = apply_plan(records, &plan).map_err(|e| e.in_stage("sorting"))?;
    let sidecar = config
        .lossless_order
        .then(|| encode_permutation(&plan.permutation(), header_checksum(records)));
    Ok(SortOutcome {
        classification,
        plan,
        sorted,
        sidecar,
    })
}

/// Full pack: classify, filter, sort, compress; writes the archive, the
/// sidecar (in lossless-order mode) and a JSON report.
pub fn cmd_pack(
    config: &PipelineConfig,
    archive_path: &Path,
    sidecar_path: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<PackReport> {
    let start = Instant::now();
    let records = read_fastq_file(&config.input_fastq).map_err(|e| e.in_stage("input"))?;
    let db = ReferenceDb::load(&config.db_path).map_err(|e| e.in_stage("classification"))?;
    let outcome = sort_records(&records, &db, config)?;

    let mut notes = Vec::new();
    if outcome.classification.selected().is_empty() {
        notes.push("no references above T1; archive keeps original order".to_string());
    }

    let sidecar_bytes = match (&outcome.sidecar, sidecar_path) {
        (Some(sidecar), Some(path)) => {
            let bytes = sidecar.to_bytes();
            std::fs::write(path, &bytes).map_err(|e| Error::from(e).in_stage("sidecar"))?;
            bytes.len() as u64
        }
        (Some(sidecar), None) => sidecar.to_bytes().len() as u64,
        _ => 0,
    };

    let archive_bytes = compress_to_archive(&outcome.sorted, &config.backend, archive_path, config)
        .map_err(|e| e.in_stage("compression"))?;

    let gain = if config.measure_gain {
        Some(
            gain_report(
                &records,
                &outcome.sorted,
                sidecar_bytes,
                &config.backend,
                &config.work_dir,
            )
            .map_err(|e| e.in_stage("gain-report"))?,
        )
    } else {
        None
    };

    let report = PackReport {
        n_reads: records.len(),
        classification: ClassificationSummary::from(&outcome.classification),
        n_groups: outcome.plan.groups.len(),
        grouped_reads: outcome.plan.groups.iter().map(|(_, g)| g.len()).sum(),
        residual_reads: outcome.plan.residual.len(),
        sidecar_bytes,
        archive_bytes,
        gain,
        pack_seconds: start.elapsed().as_secs_f64(),
        notes,
    };
    if let Some(path) = report_path {
        std::fs::write(path, serde_json::to_string_pretty(&report).unwrap() + "\n")
            .map_err(|e| Error::from(e).in_stage("report"))?;
    }
    Ok(report)
}

fn compress_to_archive(
    sorted: &[FastqRecord],
    backend: &BackendSpec,
    archive_path: &Path,
    config: &PipelineConfig,
) -> Result<u64> {
    match backend {
        BackendSpec::Builtin(builtin) => {
            let blob = builtin_compress(sorted, builtin);
            std::fs::write(archive_path, &blob)?;
            Ok(blob.len() as u64)
        }
        BackendSpec::External(ext) => {
            std::fs::create_dir_all(&config.work_dir)?;
            let tmp = config.work_dir.join("pack_sorted.fastq");
            std::fs::write(&tmp, fastq_to_bytes(sorted))?;
            let size = external_compress(ext, &tmp, archive_path)?;
            let _ = std::fs::remove_file(&tmp);
            Ok(size)
        }
    }
}

/// Decompresses an archive; with a sidecar the output is byte-identical to
/// the originally packed file, without one it is the sorted order. Never
/// touches the reference database or any model-training path.
pub fn cmd_unpack(
    archive_path: &Path,
    sidecar_path: Option<&Path>,
    output_path: &Path,
    backend: &BackendSpec,
    work_dir: &Path,
) -> Result<()> {
    let sorted = match backend {
        BackendSpec::Builtin(builtin) => {
            let blob = std::fs::read(archive_path)?;
            builtin_decompress(&blob, builtin)?
        }
        BackendSpec::External(ext) => {
            std::fs::create_dir_all(work_dir)?;
            let tmp = work_dir.join("unpack_sorted.fastq");
            external_decompress(ext, archive_path, &tmp)?;
            let records = parse_fastq(&std::fs::read(&tmp)?)?;
            let _ = std::fs::remove_file(&tmp);
            records
        }
    };
    let records = match sidecar_path {
        Some(path) => {
            let sidecar = PermutationSidecar::from_bytes(&std::fs::read(path)?)?;
            restore_order(&sorted, &sidecar)?
        }
        None => sorted,
    };
    std::fs::write(output_path, fastq_to_bytes(&records))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark grid

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAxis {
    Coverage,
    References,
}

impl BenchAxis {
    pub fn name(&self) -> &'static str {
        match self {
            BenchAxis::Coverage => "coverage",
            BenchAxis::References => "references",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n_refs: usize,
    pub coverage: f64,
    pub genome_len: usize,
    pub read_len: usize,
    pub paired: bool,
    pub t1: f64,
    pub t2: f64,
    pub ensemble: EnsembleConfig,
    pub backend: BackendSpec,
    pub seed: u64,
    pub work_dir: PathBuf,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n_refs: 20,
            coverage: 50.0,
            genome_len: 20_000,
            read_len: 150,
            paired: true,
            t1: 50.0,
            t2: 0.5,
            ensemble: EnsembleConfig::default(),
            backend: BackendSpec::default(),
            seed: 0,
            work_dir: default_work_dir(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub axis: String,
    pub value: f64,
    pub n_reads: usize,
    pub gain: GainReport,
}

pub const BENCH_CSV_HEADER: &str = "axis,value,n_reads,original_bytes,sorted_bytes,gain_bytes,\
gain_percent,sidecar_bytes,stirling_bits,header_gain,sequence_gain,quality_gain";

/// Runs one simulated dataset through the full sort-and-compare pipeline.
pub fn bench_point(axis: BenchAxis, value: f64, base: &BenchConfig) -> Result<BenchRow> {
    let (n_refs, coverage) = match axis {
        BenchAxis::Coverage => (base.n_refs, value),
        BenchAxis::References => (value as usize, base.coverage),
    };
    let refs: Vec<(String, Vec<u8>)> = (0..n_refs)
        .map(|i| {
            (
                format!("ref{i:04}"),
                gen_genome(base.genome_len, base.seed ^ (0x5eed + i as u64)),
            )
        })
        .collect();
    let sim = SimConfig {
        read_len: base.read_len,
        coverage,
        paired: base.paired,
        seed: base.seed,
        ..SimConfig::default()
    };
    let (records, _) = simulate_reads(&refs, &sim)?;
    let db = ReferenceDb::from_fasta_bytes(&crate::sim::refs_to_fasta(&refs))?;

    let mut config = PipelineConfig::new("", "");
    config.t1 = base.t1;
    config.t2 = base.t2;
    config.ensemble = base.ensemble.clone();
    config.backend = base.backend.clone();
    config.seed = base.seed;
    config.work_dir = base.work_dir.clone();
    let outcome = sort_records(&records, &db, &config)?;
    let sidecar_bytes = outcome
        .sidecar
        .as_ref()
        .map(|s| s.to_bytes().len() as u64)
        .unwrap_or(0);
    let gain = gain_report(
        &records,
        &outcome.sorted,
        sidecar_bytes,
        &base.backend,
        &base.work_dir,
    )?;
    Ok(BenchRow {
        axis: axis.name().to_string(),
        value,
        n_reads: records.len(),
        gain,
    })
}

/// Benchmark over a grid of axis values; returns CSV with one row per point.
pub fn cmd_bench(axis: BenchAxis, grid: &[f64], base: &BenchConfig) -> Result<String> {
    let mut csv = String::from(BENCH_CSV_HEADER);
    csv.push('\n');
    for &value in grid {
        let row = bench_point(axis, value, base)?;
        let pc = row.gain.per_channel.clone().unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{},{:.4},{},{:.1},{},{},{}",
            row.axis,
            row.value,
            row.n_reads,
            row.gain.original_compressed_bytes,
            row.gain.sorted_compressed_bytes,
            row.gain.gain_bytes,
            row.gain.gain_percent,
            row.gain.sidecar_bytes,
            row.gain.stirling_bits,
            pc.headers.gain(),
            pc.sequences.gain(),
            pc.qualities.gain(),
        )
        .unwrap();
    }
    Ok(csv)
}
