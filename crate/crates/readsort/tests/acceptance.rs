//! Acceptance suite: one test per release criterion, each printing a PASS
//! line. Criteria cover losslessness, estimator correctness, the similarity
//! and score formulas, filter separation, the gain trends on both
//! experimental axes, channel decomposition, order-cost accounting, coder
//! tightness and decompression independence.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use rand::rngs::ChaCha8Rng;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};

use readsort::backend::{builtin_compress, builtin_decompress, BuiltinConfig};
use readsort::classify::{classify, map_reads, map_reference, similarity_from_bits, ClassifyConfig, ReferenceDb};
use readsort::fastq::{fastq_to_bytes, FastqRecord};
use readsort::filter::{read_score, recursive_filter};
use readsort::model::{
    encode_base, EnsembleConfig, FcmConfig, ModelConfig, ModelEnsemble, StcmConfig, PROB_FLOOR,
};
use readsort::pipeline::{
    bench_point, cmd_pack, cmd_unpack, sort_records, BenchAxis, BenchConfig, PipelineConfig,
};
use readsort::rangecoder::{decode_symbol, encode_symbol, BitDecoder, BitEncoder};
use readsort::reorder::{
    decode_permutation, encode_permutation, restore_order, stirling_order_bits,
    PermutationSidecar,
};
use readsort::sim::{gen_genome, refs_to_fasta, simulate_reads, SimConfig};

fn genome_syms(len: usize, seed: u64) -> Vec<u8> {
    gen_genome(len, seed)
        .iter()
        .map(|&b| encode_base(b).unwrap())
        .collect()
}

fn median(values: &mut [i64]) -> i64 {
    values.sort_unstable();
    values[values.len() / 2]
}

// ---------------------------------------------------------------------------
// criterion 1: losslessness over a fuzz corpus

fn fuzz_file(rng: &mut ChaCha8Rng, index: usize) -> Vec<FastqRecord> {
    let n_reads = match index {
        0 => 0,
        1 => 1,
        2 | 3 => 2, // megabyte-header files stay small in read count
        _ => rng.random_range(1..=20usize),
    };
    let alphabet: &[u8] = if index % 3 == 0 {
        b"ACGTN" // 'N' bases must survive
    } else {
        b"ACGT"
    };
    (0..n_reads)
        .map(|r| {
            let header: Vec<u8> = if index == 2 || index == 3 {
                // megabyte-scale header
                let mut h = vec![b'@'];
                h.extend((0..1_000_000).map(|_| rng.random_range(32..=126u8)));
                h
            } else {
                let mut h = format!("@f{index}.r{r} ").into_bytes();
                h.extend((0..rng.random_range(0..40usize)).map(|_| rng.random_range(33..=126u8)));
                h
            };
            let len = rng.random_range(0..=300usize);
            let sequence: Vec<u8> = (0..len)
                .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                .collect();
            let separator = if rng.random_bool(0.5) {
                b"+".to_vec()
            } else {
                format!("+f{index}").into_bytes()
            };
            let quality: Vec<u8> = (0..len).map(|_| rng.random_range(33..=126u8)).collect();
            FastqRecord {
                header,
                sequence,
                separator,
                quality,
            }
        })
        .collect()
}

#[test]
fn criterion_1_losslessness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);

    let refs: Vec<(String, Vec<u8>)> = (0..2)
        .map(|i| (format!("db{i}"), gen_genome(400, 900 + i as u64)))
        .collect();
    let db = ReferenceDb::from_fasta_bytes(&refs_to_fasta(&refs)).unwrap();

    let mut config = PipelineConfig::new("", "");
    config.ensemble = EnsembleConfig::fcm_orders(&[4]);
    let builtin = BuiltinConfig {
        seq_model: EnsembleConfig::single_fcm(8),
        ..BuiltinConfig::default()
    };

    for index in 0..1000 {
        let records = fuzz_file(&mut rng, index);
        let original = fastq_to_bytes(&records);

        let outcome = sort_records(&records, &db, &config).unwrap();
        let blob = builtin_compress(&outcome.sorted, &builtin);
        let sidecar_bytes = outcome.sidecar.as_ref().unwrap().to_bytes();

        // with sidecar: byte-identical
        let decoded = builtin_decompress(&blob, &builtin).unwrap();
        let sidecar = PermutationSidecar::from_bytes(&sidecar_bytes).unwrap();
        let restored = restore_order(&decoded, &sidecar).unwrap();
        assert_eq!(fastq_to_bytes(&restored), original, "file {index}");

        // without sidecar: same record multiset
        if index % 10 == 0 {
            let mut a = decoded.clone();
            let mut b = records.clone();
            a.sort_by(|x, y| fastq_to_bytes(&[x.clone()]).cmp(&fastq_to_bytes(&[y.clone()])));
            b.sort_by(|x, y| fastq_to_bytes(&[x.clone()]).cmp(&fastq_to_bytes(&[y.clone()])));
            assert_eq!(a, b, "file {index} multiset");
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "fuzz corpus took {elapsed:.1}s");
    println!("criterion 1 (losslessness over 1000 fuzzed files): PASS");
}

// ---------------------------------------------------------------------------
// criterion 2: independent brute-force estimator oracle

/// Reimplementation of the context-model ensemble from first principles,
/// using string-keyed hash maps instead of packed context registers.
struct Oracle {
    models: Vec<ModelConfig>,
    counts: Vec<HashMap<Vec<u8>, [u32; 4]>>,
    weights: Vec<f64>,
    gamma: f64,
}

#[derive(Clone, Default)]
struct OracleState {
    ctx: Vec<u8>,
    history: Vec<u8>,
    seen: usize,
    mismatches: u32,
}

impl Oracle {
    fn new(config: &EnsembleConfig) -> Self {
        let n = config.models.len();
        Oracle {
            models: config.models.clone(),
            counts: vec![HashMap::new(); n],
            weights: vec![1.0 / n as f64; n],
            gamma: config.gamma,
        }
    }

    fn order(model: &ModelConfig) -> usize {
        match model {
            ModelConfig::Fcm(c) => c.order as usize,
            ModelConfig::Stcm(c) => c.base.order as usize,
        }
    }

    fn predict(&self, m: usize, st: &OracleState) -> [f64; 4] {
        let order = Self::order(&self.models[m]);
        if st.seen < order {
            return [0.25; 4];
        }
        let counts = self.counts[m].get(&st.ctx).copied().unwrap_or([0; 4]);
        let total: u32 = counts.iter().sum();
        let alpha = match &self.models[m] {
            ModelConfig::Fcm(c) => c.alpha,
            ModelConfig::Stcm(c) => {
                if total == 0 {
                    c.fallback_alpha
                } else {
                    c.base.alpha
                }
            }
        };
        let denom = total as f64 + 4.0 * alpha;
        [
            (counts[0] as f64 + alpha) / denom,
            (counts[1] as f64 + alpha) / denom,
            (counts[2] as f64 + alpha) / denom,
            (counts[3] as f64 + alpha) / denom,
        ]
    }

    fn advance(&self, m: usize, st: &mut OracleState, sym: u8) {
        let order = Self::order(&self.models[m]);
        let push = |ctx: &mut Vec<u8>, s: u8| {
            ctx.push(s);
            if ctx.len() > order {
                ctx.remove(0);
            }
        };
        match &self.models[m] {
            ModelConfig::Fcm(_) => push(&mut st.ctx, sym),
            ModelConfig::Stcm(c) => {
                push(&mut st.history, sym);
                if st.seen < order {
                    st.ctx = st.history.clone();
                } else {
                    let counts = self.counts[m].get(&st.ctx).copied().unwrap_or([0; 4]);
                    // smallest index among the maxima
                    let mut argmax = 0u8;
                    for s in 1..4 {
                        if counts[s] > counts[argmax as usize] {
                            argmax = s as u8;
                        }
                    }
                    if sym == argmax {
                        st.mismatches = 0;
                        push(&mut st.ctx, sym);
                    } else {
                        st.mismatches += 1;
                        if st.mismatches > c.max_substitutions {
                            st.mismatches = 0;
                            st.ctx = st.history.clone();
                        } else {
                            push(&mut st.ctx, argmax);
                        }
                    }
                }
            }
        }
        st.seen += 1;
    }

    fn normalize(weights: &mut [f64]) {
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            let n = weights.len() as f64;
            weights.fill(1.0 / n);
        } else {
            for w in weights.iter_mut() {
                *w /= sum;
            }
        }
    }

    fn train(&mut self, sequence: &[u8]) {
        let mut states = vec![OracleState::default(); self.models.len()];
        let mut weights = self.weights.clone();
        let single = self.models.len() == 1;
        for &sym in sequence {
            for m in 0..self.models.len() {
                if !single {
                    let probs = self.predict(m, &states[m]);
                    weights[m] = (weights[m] * probs[sym as usize]).powf(self.gamma);
                }
                if states[m].seen >= Self::order(&self.models[m]) {
                    let entry = self.counts[m].entry(states[m].ctx.clone()).or_default();
                    entry[sym as usize] += 1;
                }
                let mut st = std::mem::take(&mut states[m]);
                self.advance(m, &mut st, sym);
                states[m] = st;
            }
            if !single {
                Self::normalize(&mut weights);
            }
        }
        self.weights = weights;
    }

    fn code_length(&self, sequence: &[u8]) -> f64 {
        let mut states = vec![OracleState::default(); self.models.len()];
        let mut weights = self.weights.clone();
        let single = self.models.len() == 1;
        let mut bits = 0.0;
        for &sym in sequence {
            let mut mixed = [0.0f64; 4];
            for m in 0..self.models.len() {
                let probs = self.predict(m, &states[m]);
                for s in 0..4 {
                    mixed[s] += weights[m] * probs[s];
                }
            }
            bits += -mixed[sym as usize].max(PROB_FLOOR).log2();
            for m in 0..self.models.len() {
                if !single {
                    let probs = self.predict(m, &states[m]);
                    weights[m] = (weights[m] * probs[sym as usize]).powf(self.gamma);
                }
                self.advance(m, &mut states[m], sym);
            }
            if !single {
                Self::normalize(&mut weights);
            }
        }
        bits
    }
}

fn all_strings_up_to(k_max: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for k in 1..=k_max {
        for idx in 0..4usize.pow(k as u32) {
            let mut s = Vec::with_capacity(k);
            let mut v = idx;
            for _ in 0..k {
                s.push((v % 4) as u8);
                v /= 4;
            }
            out.push(s);
        }
    }
    out
}

#[test]
fn criterion_2_estimator_oracle() {
    let start = Instant::now();
    let training: Vec<Vec<u8>> = (0..3).map(|i| genome_syms(100, 0xE0 + i)).collect();

    let mut configs: Vec<EnsembleConfig> = vec![
        EnsembleConfig::fcm_orders(&[0, 1, 2]),
        EnsembleConfig::single_fcm(3),
    ];
    let mut stcm_cfg = EnsembleConfig::single_fcm(2);
    stcm_cfg.models[0] = ModelConfig::Stcm(StcmConfig::new(2, 1));
    configs.push(stcm_cfg);
    let mut mixed_cfg = EnsembleConfig::fcm_orders(&[1, 4]);
    mixed_cfg.models.push(ModelConfig::Stcm(StcmConfig::new(3, 2)));
    configs.push(mixed_cfg);

    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut cases = all_strings_up_to(6);
    for _ in 0..200 {
        let len = rng.random_range(0..=12usize);
        cases.push((0..len).map(|_| rng.random_range(0..4u8)).collect());
    }

    for config in &configs {
        let mut ensemble = ModelEnsemble::new(config);
        let mut oracle = Oracle::new(config);
        for chunk in &training {
            ensemble.train(chunk).unwrap();
            oracle.train(chunk);
        }
        ensemble.freeze();
        for case in &cases {
            let got = ensemble.code_length(case).unwrap();
            let want = oracle.code_length(case);
            assert!(
                (got - want).abs() < 1e-9,
                "{} models, case {case:?}: ensemble {got} vs oracle {want}",
                config.models.len()
            );
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "oracle comparison took {elapsed:.1}s");
    println!("criterion 2 (estimator vs brute-force oracle): PASS");
}

// ---------------------------------------------------------------------------
// criterion 3: similarity and score formula contracts

#[test]
fn criterion_3_formula_contracts() {
    // S == 100 exactly when C == 0
    assert_eq!(similarity_from_bits(0.0, 150), 100.0);
    // S == 0 exactly when C == 2|x|
    assert_eq!(similarity_from_bits(300.0, 150), 0.0);
    assert_eq!(similarity_from_bits(150.0, 150), 50.0);

    // R == 0.5 exactly when C == |y|: an order-0 model with alpha 1/2 trained
    // on one 'A' assigns P(A) = (1 + 0.5) / (1 + 2) = 0.5, so every further
    // 'A' costs exactly one bit.
    let mut cfg = EnsembleConfig::single_fcm(0);
    cfg.models[0] = ModelConfig::Fcm(FcmConfig {
        order: 0,
        alpha: 0.5,
    });
    let mut ens = ModelEnsemble::new(&cfg);
    ens.train(&[0u8]).unwrap();
    ens.freeze();
    let y = vec![0u8; 200];
    assert_eq!(ens.code_length(&y).unwrap(), y.len() as f64);
    assert_eq!(read_score(&y, &ens).unwrap(), 0.5);

    // R == 1.0 when C == 2|y| (untrained model)
    let mut untrained = ModelEnsemble::new(&EnsembleConfig::default());
    untrained.train(&[]).unwrap();
    untrained.freeze();
    assert_eq!(read_score(&y, &untrained).unwrap(), 1.0);

    println!("criterion 3 (similarity and score formula contracts): PASS");
}

// ---------------------------------------------------------------------------
// criterion 4: filter separation on simulated + random reads

#[test]
fn criterion_4_filter_separation() {
    let start = Instant::now();
    let refs = vec![
        ("ga".to_string(), gen_genome(20_000, 0xA4)),
        ("gb".to_string(), gen_genome(20_000, 0xB4)),
    ];
    let sim = SimConfig {
        coverage: 20.0,
        paired: false,
        seed: 0xC4,
        ..SimConfig::default()
    };
    let (mut records, origins) = simulate_reads(&refs, &sim).unwrap();
    let n_sim = records.len();
    let mut truth: Vec<Option<String>> = origins.iter().map(|o| Some(o.ref_id.clone())).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0xD4);
    for i in 0..1000 {
        let sequence: Vec<u8> = (0..150).map(|_| b"ACGT"[rng.random_range(0..4usize)]).collect();
        records.push(FastqRecord {
            header: format!("@rand{i}").into_bytes(),
            sequence,
            separator: b"+".to_vec(),
            quality: vec![b'I'; 150],
        });
        truth.push(None);
    }

    let db = ReferenceDb::from_fasta_bytes(&refs_to_fasta(&refs)).unwrap();
    let cfg = ClassifyConfig::default();
    let result = classify(&db, &records, &cfg).unwrap();
    assert_eq!(result.selected().len(), 2, "both references must clear T1");

    let read_syms = map_reads(&records, cfg.seed);
    let selected: Vec<(String, Vec<u8>)> = result
        .selected()
        .iter()
        .map(|r| {
            let entry = db.entries.iter().find(|e| e.id == r.id).unwrap();
            (r.id.clone(), map_reference(entry, cfg.seed))
        })
        .collect();
    let plan = recursive_filter(&read_syms, &selected, 0.5, &cfg.ensemble).unwrap();
    plan.validate(records.len()).unwrap();

    let mut correct = 0usize;
    for (id, group) in &plan.groups {
        correct += group
            .iter()
            .filter(|&&i| truth[i as usize].as_deref() == Some(id.as_str()))
            .count();
    }
    let sim_fraction = correct as f64 / n_sim as f64;
    let random_in_residual = plan
        .residual
        .iter()
        .filter(|&&i| truth[i as usize].is_none())
        .count();
    let random_fraction = random_in_residual as f64 / 1000.0;

    assert!(
        sim_fraction >= 0.95,
        "only {:.2}% of simulated reads reached their own group",
        sim_fraction * 100.0
    );
    assert!(
        random_fraction >= 0.95,
        "only {:.2}% of random reads stayed residual",
        random_fraction * 100.0
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "filter separation took {elapsed:.1}s");
    println!(
        "criterion 4 (filter separation {:.1}% / {:.1}%): PASS",
        sim_fraction * 100.0,
        random_fraction * 100.0
    );
}

// ---------------------------------------------------------------------------
// criteria 5-7: gain trend reproduction

struct TrendRun {
    refs: usize,
    gain: i64,
    seq_gain: i64,
    hdr_gain: i64,
}

fn trend_base(seed: u64) -> BenchConfig {
    BenchConfig {
        ensemble: EnsembleConfig::single_fcm(12),
        seed,
        ..BenchConfig::default()
    }
}

static REF_TREND: OnceLock<Vec<TrendRun>> = OnceLock::new();

fn ref_trend_runs() -> &'static [TrendRun] {
    REF_TREND.get_or_init(|| {
        let mut runs = Vec::new();
        for &n_refs in &[5usize, 20, 40] {
            for seed in 0..3u64 {
                let row =
                    bench_point(BenchAxis::References, n_refs as f64, &trend_base(seed)).unwrap();
                let pc = row.gain.per_channel.as_ref().unwrap();
                runs.push(TrendRun {
                    refs: n_refs,
                    gain: row.gain.gain_bytes,
                    seq_gain: pc.sequences.gain(),
                    hdr_gain: pc.headers.gain(),
                });
            }
        }
        runs
    })
}

fn median_gain_for(refs: usize) -> i64 {
    let mut gains: Vec<i64> = ref_trend_runs()
        .iter()
        .filter(|r| r.refs == refs)
        .map(|r| r.gain)
        .collect();
    median(&mut gains)
}

#[test]
fn criterion_5_reference_count_trend() {
    let start = Instant::now();
    let g5 = median_gain_for(5);
    let g20 = median_gain_for(20);
    let g40 = median_gain_for(40);
    assert!(g20 > 0, "median gain at 20 refs is {g20}");
    assert!(g40 > 0, "median gain at 40 refs is {g40}");
    assert!(g40 > g5, "gain(40)={g40} not above gain(5)={g5}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "reference trend took {elapsed:.1}s");
    println!("criterion 5 (references-axis trend {g5}/{g20}/{g40} bytes): PASS");
}

#[test]
fn criterion_6_coverage_trend() {
    let start = Instant::now();
    let mut medians = Vec::new();
    for &coverage in &[2.0f64, 10.0, 50.0] {
        let mut gains: Vec<i64> = (0..3u64)
            .map(|seed| {
                bench_point(BenchAxis::Coverage, coverage, &trend_base(seed))
                    .unwrap()
                    .gain
                    .gain_bytes
            })
            .collect();
        medians.push(median(&mut gains));
    }
    assert!(
        medians[0] < medians[1] && medians[1] < medians[2],
        "medians not monotone: {medians:?}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "coverage trend took {elapsed:.1}s");
    println!("criterion 6 (coverage-axis trend {medians:?} bytes): PASS");
}

#[test]
fn criterion_7_channel_decomposition() {
    let mut seq: Vec<i64> = ref_trend_runs()
        .iter()
        .filter(|r| r.refs == 20)
        .map(|r| r.seq_gain)
        .collect();
    let mut hdr: Vec<i64> = ref_trend_runs()
        .iter()
        .filter(|r| r.refs == 20)
        .map(|r| r.hdr_gain)
        .collect();
    let seq_med = median(&mut seq);
    let hdr_med = median(&mut hdr);
    assert!(seq_med > 0, "sequence-channel median gain is {seq_med}");
    assert!(
        seq_med > hdr_med,
        "sequence gain {seq_med} does not exceed header gain {hdr_med}"
    );
    println!("criterion 7 (channel decomposition seq={seq_med} hdr={hdr_med}): PASS");
}

// ---------------------------------------------------------------------------
// criterion 8: order-cost accounting

#[test]
fn criterion_8_order_cost() {
    let exact = stirling_order_bits(1000).unwrap();
    assert!((exact - 8523.09).abs() <= 0.01, "stirling(1000) = {exact}");

    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    for n in [1_000u64, 100_000] {
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rng);
        let sidecar = encode_permutation(&perm, 0);
        assert_eq!(decode_permutation(&sidecar).unwrap(), perm);
        let payload_bits = (sidecar.payload.len() * 8) as f64;
        let lower = stirling_order_bits(n).unwrap();
        let upper = (n as f64) * (n as f64).log2().ceil() + 512.0;
        assert!(
            lower <= payload_bits && payload_bits <= upper,
            "n={n}: payload {payload_bits} outside [{lower}, {upper}]"
        );
    }
    println!("criterion 8 (order-cost accounting): PASS");
}

// ---------------------------------------------------------------------------
// criterion 9: range-coder tightness

#[test]
fn criterion_9_coder_tightness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    for case in 0..100 {
        let order = case % 9;
        let len = rng.random_range(1..2000usize);
        let syms: Vec<u8> = if case % 2 == 0 {
            genome_syms(len, 0x900 + case as u64)
        } else {
            (0..len).map(|_| rng.random_range(0..4u8)).collect()
        };

        let cfg = EnsembleConfig::single_fcm(order as u32);
        let mut encode_model = ModelEnsemble::new(&cfg);
        let mut walker = readsort::model::AdaptiveWalker::new(&mut encode_model).unwrap();
        let mut enc = BitEncoder::new();
        let mut ideal = 0.0f64;
        for &sym in &syms {
            let probs = walker.next_probs();
            ideal += -probs[sym as usize].log2();
            encode_symbol(&mut enc, &probs, sym);
            walker.observe(sym);
        }
        let bytes = enc.finish();

        let coded_bits = (bytes.len() * 8) as f64;
        assert!(
            coded_bits <= ideal * 1.001 + 64.0 * 8.0,
            "case {case}: {coded_bits} bits vs ideal {ideal}"
        );

        let mut decode_model = ModelEnsemble::new(&cfg);
        let mut walker = readsort::model::AdaptiveWalker::new(&mut decode_model).unwrap();
        let mut dec = BitDecoder::new(&bytes);
        for &sym in &syms {
            let probs = walker.next_probs();
            assert_eq!(decode_symbol(&mut dec, &probs), sym, "case {case}");
            walker.observe(sym);
        }
    }
    println!("criterion 9 (range-coder tightness, 100 streams): PASS");
}

// ---------------------------------------------------------------------------
// criterion 10: decompression independence and asymmetry

#[test]
fn criterion_10_decompression_independence() {
    let dir = tempfile::tempdir().unwrap();
    let refs: Vec<(String, Vec<u8>)> = (0..40)
        .map(|i| (format!("ref{i:04}"), gen_genome(20_000, 0x5eed + i as u64)))
        .collect();
    let sim = SimConfig {
        coverage: 50.0,
        seed: 0,
        ..SimConfig::default()
    };
    let (records, _) = simulate_reads(&refs, &sim).unwrap();

    let fastq = dir.path().join("reads.fastq");
    let db = dir.path().join("db.fasta");
    std::fs::write(&fastq, fastq_to_bytes(&records)).unwrap();
    std::fs::write(&db, refs_to_fasta(&refs)).unwrap();

    // library-default pipeline configuration: full analysis ensemble,
    // gain measurement on
    let mut config = PipelineConfig::new(&db, &fastq);
    config.work_dir = dir.path().to_path_buf();
    let archive = dir.path().join("reads.rsqz");
    let sidecar = dir.path().join("reads.rsrt");

    let pack_start = Instant::now();
    cmd_pack(&config, &archive, Some(&sidecar), None).unwrap();
    let pack_seconds = pack_start.elapsed().as_secs_f64();

    // the database must play no role in decompression
    std::fs::remove_file(&db).unwrap();

    let restored = dir.path().join("restored.fastq");
    let unpack_start = Instant::now();
    cmd_unpack(&archive, Some(&sidecar), &restored, &config.backend, dir.path()).unwrap();
    let unpack_seconds = unpack_start.elapsed().as_secs_f64();

    assert_eq!(
        std::fs::read(&restored).unwrap(),
        std::fs::read(&fastq).unwrap()
    );
    assert!(
        unpack_seconds < 0.10 * pack_seconds,
        "unpack {unpack_seconds:.2}s not under 10% of pack {pack_seconds:.2}s"
    );
    println!(
        "criterion 10 (unpack {unpack_seconds:.2}s vs pack {pack_seconds:.2}s, db deleted): PASS"
    );
}
