//! Thin command-line front end over the readsort library.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use readsort::backend::{BackendSpec, BuiltinConfig, ExternalSpec};
use readsort::classify::{classify, ClassifyConfig, ReferenceDb};
use readsort::pipeline::{
    cmd_bench, cmd_pack, cmd_unpack, default_work_dir, read_fastq_file, BenchAxis, BenchConfig,
    PipelineConfig,
};
use readsort::sim::{gen_genome, origins_to_tsv, refs_to_fasta, simulate_reads, SimConfig};

#[derive(Parser)]
#[command(name = "readsort", version, about = "Lossless reference-guided FASTQ re-encoder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed for every stochastic choice in the pipeline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scratch directory (default: $READSORT_WORKDIR or the system temp dir).
    #[arg(long)]
    work_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BackendOpts {
    /// External compressor template with {in} and {out} placeholders,
    /// e.g. "gzip -c {in} > {out}". Omit to use the builtin coder.
    #[arg(long)]
    cmd: Option<String>,
    /// External decompressor template; required with --cmd.
    #[arg(long, requires = "cmd")]
    cmd_decompress: Option<String>,
}

impl BackendOpts {
    fn to_spec(&self) -> anyhow::Result<BackendSpec> {
        match (&self.cmd, &self.cmd_decompress) {
            (Some(c), Some(d)) => Ok(BackendSpec::External(ExternalSpec::new(c, d)?)),
            (Some(_), None) => anyhow::bail!("--cmd requires --cmd-decompress"),
            _ => Ok(BackendSpec::Builtin(BuiltinConfig::default())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rank database references by compression-based similarity to the reads.
    Classify {
        /// Input FASTQ (plain or gzip).
        input: PathBuf,
        /// Reference database, multi-FASTA.
        #[arg(long)]
        db: PathBuf,
        /// Similarity selection threshold (percent).
        #[arg(long, default_value_t = 50.0)]
        t1: f64,
        /// Write the ranking TSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify, cluster, sort and compress a FASTQ file.
    Pack {
        /// Input FASTQ (plain or gzip).
        input: PathBuf,
        /// Reference database, multi-FASTA.
        #[arg(long)]
        db: PathBuf,
        /// Output archive path.
        #[arg(short, long)]
        output: PathBuf,
        /// Similarity selection threshold (percent).
        #[arg(long, default_value_t = 50.0)]
        t1: f64,
        /// Read-to-reference acceptance threshold.
        #[arg(long, default_value_t = 0.5)]
        t2: f64,
        /// Skip the permutation sidecar; unpack then yields sorted order.
        #[arg(long)]
        no_sidecar: bool,
        /// Skip compressing the original order for the gain comparison.
        #[arg(long)]
        no_gain: bool,
        /// Write a JSON pack report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decompress an archive; with a sidecar, restores original order exactly.
    Unpack {
        /// Archive produced by pack.
        input: PathBuf,
        /// Output FASTQ path.
        #[arg(short, long)]
        output: PathBuf,
        /// Permutation sidecar written by pack.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Simulate references and short reads with ground-truth origins.
    Simulate {
        /// Output prefix: writes <prefix>.fastq, <prefix>.fasta and
        /// <prefix>.origins.tsv.
        #[arg(short, long)]
        output: PathBuf,
        /// Number of simulated reference genomes.
        #[arg(long, default_value_t = 2)]
        refs: usize,
        /// Length of each simulated genome.
        #[arg(long, default_value_t = 20_000)]
        genome_len: usize,
        #[arg(long, default_value_t = 50.0)]
        coverage: f64,
        #[arg(long, default_value_t = 150)]
        read_len: usize,
        /// Per-base substitution error rate.
        #[arg(long, default_value_t = 0.005)]
        error_rate: f64,
        /// Emit single-end reads instead of paired-end.
        #[arg(long)]
        single_end: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sweep one experimental axis on simulated data and report gains as CSV.
    Bench {
        /// Axis to sweep.
        #[arg(long, value_parser = ["coverage", "references"])]
        axis: String,
        /// Comma-separated axis values, e.g. 2,10,50.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// Reference count when sweeping coverage.
        #[arg(long, default_value_t = 20)]
        refs: usize,
        /// Coverage when sweeping reference count.
        #[arg(long, default_value_t = 50.0)]
        coverage: f64,
        #[arg(long, default_value_t = 20_000)]
        genome_len: usize,
        /// Write the CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn work_dir_of(common: &CommonOpts) -> PathBuf {
    common.work_dir.clone().unwrap_or_else(default_work_dir)
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Classify {
            input,
            db,
            t1,
            output,
            common,
        } => {
            init_threads(common.threads);
            let records = read_fastq_file(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let db = ReferenceDb::load(&db)?;
            let cfg = ClassifyConfig {
                t1,
                seed: common.seed,
                ..ClassifyConfig::default()
            };
            let result = classify(&db, &records, &cfg)?;
            let tsv = result.to_tsv();
            match output {
                Some(path) => std::fs::write(path, tsv)?,
                None => print!("{tsv}"),
            }
            eprintln!(
                "{} references, {} selected at T1={t1}",
                result.ranked.len(),
                result.selected().len()
            );
        }
        Command::Pack {
            input,
            db,
            output,
            t1,
            t2,
            no_sidecar,
            no_gain,
            report,
            backend,
            common,
        } => {
            init_threads(common.threads);
            let mut config = PipelineConfig::new(db, input);
            config.t1 = t1;
            config.t2 = t2;
            config.backend = backend.to_spec()?;
            config.lossless_order = !no_sidecar;
            config.measure_gain = !no_gain;
            config.seed = common.seed;
            config.threads = common.threads;
            config.work_dir = work_dir_of(&common);
            let sidecar = (!no_sidecar).then(|| output.with_extension("rsrt"));
            let report =
                cmd_pack(&config, &output, sidecar.as_deref(), report.as_deref())?;
            eprintln!(
                "packed {} reads into {} bytes ({} groups, {} residual)",
                report.n_reads, report.archive_bytes, report.n_groups, report.residual_reads
            );
            if let Some(gain) = &report.gain {
                eprintln!(
                    "gain: {} bytes ({:.2}%), {} bytes after charging the sidecar",
                    gain.gain_bytes, gain.gain_percent, gain.adjusted_gain_bytes
                );
            }
        }
        Command::Unpack {
            input,
            output,
            sidecar,
            backend,
            common,
        } => {
            init_threads(common.threads);
            cmd_unpack(
                &input,
                sidecar.as_deref(),
                &output,
                &backend.to_spec()?,
                &work_dir_of(&common),
            )?;
            eprintln!("unpacked to {}", output.display());
        }
        Command::Simulate {
            output,
            refs,
            genome_len,
            coverage,
            read_len,
            error_rate,
            single_end,
            common,
        } => {
            let genomes: Vec<(String, Vec<u8>)> = (0..refs)
                .map(|i| {
                    (
                        format!("ref{i:04}"),
                        gen_genome(genome_len, common.seed ^ (0x5eed + i as u64)),
                    )
                })
                .collect();
            let sim = SimConfig {
                read_len,
                coverage,
                sub_error_rate: error_rate,
                paired: !single_end,
                seed: common.seed,
                ..SimConfig::default()
            };
            let (records, origins) = simulate_reads(&genomes, &sim)?;
            let stem = output.as_os_str().to_owned();
            let with_ext = |ext: &str| {
                let mut s = stem.clone();
                s.push(ext);
                PathBuf::from(s)
            };
            std::fs::write(with_ext(".fastq"), readsort::fastq::fastq_to_bytes(&records))?;
            std::fs::write(with_ext(".fasta"), refs_to_fasta(&genomes))?;
            std::fs::write(with_ext(".origins.tsv"), origins_to_tsv(&origins))?;
            eprintln!("simulated {} reads from {refs} references", records.len());
        }
        Command::Bench {
            axis,
            grid,
            refs,
            coverage,
            genome_len,
            output,
            backend,
            common,
        } => {
            init_threads(common.threads);
            let axis = match axis.as_str() {
                "coverage" => BenchAxis::Coverage,
                _ => BenchAxis::References,
            };
            let base = BenchConfig {
                n_refs: refs,
                coverage,
                genome_len,
                backend: backend.to_spec()?,
                seed: common.seed,
                work_dir: work_dir_of(&common),
                ..BenchConfig::default()
            };
            let csv = cmd_bench(axis, &grid, &base)?;
            match output {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // library errors already carry their stage context in Display
            match err.downcast_ref::<readsort::Error>() {
                Some(e) => eprintln!("error: {e}"),
                None => eprintln!("error: {err:#}"),
            }
            let code = err
                .downcast_ref::<readsort::Error>()
                .map(|e| e.exit_code())
                .unwrap_or(3);
            ExitCode::from(code as u8)
        }
    }
}
