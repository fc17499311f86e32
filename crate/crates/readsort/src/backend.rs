//! Compression backends for the final (sorted or original) FASTQ.
//!
//! The built-in backend compresses the three information channels
//! independently: headers through previous-header delta tokenization plus a
//! byte-level context model, DNA sequences through the context-model ensemble
//! driving a binary-decomposed range coder, and quality scores through an
//! order-2 byte model. An adapter shells out to external general-purpose
//! compressors.
//!
//! Container format (little-endian): magic "RSQZ", version u8, three
//! (length u64, stream bytes) sections in order headers/sequences/qualities,
//! trailing u64 FNV-1a of the plaintext FASTQ bytes.

use std::path::Path;
use std::process::Command;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fastq::{fastq_to_bytes, FastqRecord};
use crate::model::{encode_base, AdaptiveWalker, EnsembleConfig, ModelEnsemble, PROB_FLOOR};
use crate::rangecoder::{decode_symbol, encode_symbol, BitDecoder, BitEncoder};
use crate::reorder::{fnv1a, stirling_order_bits};

pub const CONTAINER_MAGIC: &[u8; 4] = b"RSQZ";
pub const CONTAINER_VERSION: u8 = 1;

#[derive(Debug, Clone)]
pub enum BackendSpec {
    Builtin(BuiltinConfig),
    External(ExternalSpec),
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Builtin(BuiltinConfig::default())
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinConfig {
    /// DNA ensemble used adaptively by the sequence coder.
    pub seq_model: EnsembleConfig,
    /// Model statistics reset after this many coded symbols, bounding model
    /// memory and making the coder sensitive to read order.
    pub block_symbols: usize,
}

impl Default for BuiltinConfig {
    fn default() -> Self {
        BuiltinConfig {
            seq_model: EnsembleConfig::single_fcm(12),
            block_symbols: 256 * 1024,
        }
    }
}

/// Shell templates with `{in}` and `{out}` placeholders.
#[derive(Debug, Clone)]
pub struct ExternalSpec {
    pub command_template: String,
    pub decompress_template: String,
}

impl ExternalSpec {
    pub fn new(compress: impl Into<String>, decompress: impl Into<String>) -> Result<Self> {
        let spec = ExternalSpec {
            command_template: compress.into(),
            decompress_template: decompress.into(),
        };
        for t in [&spec.command_template, &spec.decompress_template] {
            if !t.contains("{in}") || !t.contains("{out}") {
                return Err(Error::Domain(format!(
                    "external template must contain {{in}} and {{out}}: '{t}'"
                )));
            }
        }
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// adaptive byte coder (bit tree over a context-hashed probability table)

const CTX_BITS: u32 = 16;
const ADAPT_SHIFT: u32 = 5;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Order-k byte model: the previous k bytes hash to one of 2^16 contexts,
/// each holding a 255-node binary probability tree.
struct ByteModel {
    order: u32,
    history: u64,
    table: Vec<u16>,
}

impl ByteModel {
    fn new(order: u32) -> Self {
        assert!(order <= 7);
        ByteModel {
            order,
            history: 0,
            table: vec![1 << 15; (1usize << CTX_BITS) * 256],
        }
    }

    #[inline]
    fn ctx(&self) -> usize {
        let mask = if self.order == 0 {
            0
        } else {
            (1u64 << (8 * self.order)) - 1
        };
        (splitmix64(self.history & mask) & ((1 << CTX_BITS) - 1)) as usize
    }

    #[inline]
    fn encode_byte(&mut self, enc: &mut BitEncoder, byte: u8) {
        let base = self.ctx() * 256;
        let mut node = 1usize;
        for i in (0..8).rev() {
            let bit = (byte >> i) & 1 == 1;
            let p = &mut self.table[base + node];
            enc.encode(*p as f64 / 65536.0, bit);
            if bit {
                *p += (u16::MAX - *p) >> ADAPT_SHIFT;
            } else {
                *p -= *p >> ADAPT_SHIFT;
            }
            node = (node << 1) | bit as usize;
        }
        self.history = (self.history << 8) | byte as u64;
    }

    #[inline]
    fn decode_byte(&mut self, dec: &mut BitDecoder) -> u8 {
        let base = self.ctx() * 256;
        let mut node = 1usize;
        for _ in 0..8 {
            let p = &mut self.table[base + node];
            let bit = dec.decode(*p as f64 / 65536.0);
            if bit {
                *p += (u16::MAX - *p) >> ADAPT_SHIFT;
            } else {
                *p -= *p >> ADAPT_SHIFT;
            }
            node = (node << 1) | bit as usize;
        }
        let byte = (node - 256) as u8;
        self.history = (self.history << 8) | byte as u64;
        byte
    }
}

fn compress_bytes(order: u32, bytes: &[u8]) -> Vec<u8> {
    let mut model = ByteModel::new(order);
    let mut enc = BitEncoder::new();
    for &b in bytes {
        model.encode_byte(&mut enc, b);
    }
    enc.finish()
}

fn decompress_bytes(order: u32, blob: &[u8], count: usize) -> Vec<u8> {
    let mut model = ByteModel::new(order);
    let mut dec = BitDecoder::new(blob);
    (0..count).map(|_| model.decode_byte(&mut dec)).collect()
}

// ---------------------------------------------------------------------------
// header channel: previous-line delta tokenization

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

fn get_varint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let byte = *bytes
            .get(*pos)
            .ok_or_else(|| Error::CorruptContainer("truncated varint".into()))?;
        *pos += 1;
        v |= ((byte & 0x7f) as u64) << shift;
        if byte & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
        if shift > 63 {
            return Err(Error::CorruptContainer("varint overflow".into()));
        }
    }
}

/// Maximal runs of digits or of non-digits.
fn tokenize(line: &[u8]) -> Vec<&[u8]> {
    let mut tokens = Vec::new();
    let mut start = 0;
    for i in 1..=line.len() {
        if i == line.len() || line[i].is_ascii_digit() != line[start].is_ascii_digit() {
            tokens.push(&line[start..i]);
            start = i;
        }
    }
    tokens
}

const OP_MATCH: u64 = 0;
const OP_DELTA: u64 = 1;
const OP_LITERAL: u64 = 2;

fn parse_digits(token: &[u8]) -> Option<u64> {
    if token.len() > 18 || !token[0].is_ascii_digit() {
        return None;
    }
    let mut v = 0u64;
    for &b in token {
        v = v * 10 + (b - b'0') as u64;
    }
    Some(v)
}

/// Serializes one line against the previous line's tokens.
fn encode_line(out: &mut Vec<u8>, line: &[u8], prev: &[u8]) {
    let tokens = tokenize(line);
    let prev_tokens = tokenize(prev);
    put_varint(out, tokens.len() as u64);
    for (i, token) in tokens.iter().enumerate() {
        let prev_token = prev_tokens.get(i).copied();
        if prev_token == Some(*token) {
            put_varint(out, OP_MATCH);
            continue;
        }
        if let (Some(cur), Some(prev_val)) = (
            parse_digits(token),
            prev_token.and_then(parse_digits),
        ) {
            put_varint(out, OP_DELTA);
            put_varint(out, token.len() as u64);
            let delta = cur as i64 - prev_val as i64;
            put_varint(out, ((delta << 1) ^ (delta >> 63)) as u64);
            continue;
        }
        put_varint(out, OP_LITERAL);
        put_varint(out, token.len() as u64);
        out.extend_from_slice(token);
    }
}

fn decode_line(bytes: &[u8], pos: &mut usize, prev: &[u8]) -> Result<Vec<u8>> {
    let prev_tokens = tokenize(prev);
    let count = get_varint(bytes, pos)? as usize;
    let mut line = Vec::new();
    for i in 0..count {
        match get_varint(bytes, pos)? {
            OP_MATCH => {
                let token = prev_tokens.get(i).ok_or_else(|| {
                    Error::CorruptContainer("MATCH op without previous token".into())
                })?;
                line.extend_from_slice(token);
            }
            OP_DELTA => {
                let len = get_varint(bytes, pos)? as usize;
                let zig = get_varint(bytes, pos)?;
                let delta = ((zig >> 1) as i64) ^ -((zig & 1) as i64);
                let prev_val = prev_tokens
                    .get(i)
                    .and_then(|t| parse_digits(t))
                    .ok_or_else(|| {
                        Error::CorruptContainer("DELTA op without numeric token".into())
                    })?;
                let value = (prev_val as i64 + delta) as u64;
                let digits = value.to_string();
                if digits.len() > len {
                    return Err(Error::CorruptContainer("DELTA value longer than token".into()));
                }
                line.extend(std::iter::repeat(b'0').take(len - digits.len()));
                line.extend_from_slice(digits.as_bytes());
            }
            OP_LITERAL => {
                let len = get_varint(bytes, pos)? as usize;
                let end = *pos + len;
                if end > bytes.len() {
                    return Err(Error::CorruptContainer("truncated LITERAL".into()));
                }
                line.extend_from_slice(&bytes[*pos..end]);
                *pos = end;
            }
            op => return Err(Error::CorruptContainer(format!("unknown token op {op}"))),
        }
    }
    Ok(line)
}

/// Tokenized line stream -> entropy coded bytes.
fn compress_lines(lines: &[&[u8]], order: u32) -> Vec<u8> {
    let mut raw = Vec::new();
    let mut prev: &[u8] = b"";
    for line in lines {
        encode_line(&mut raw, line, prev);
        prev = line;
    }
    let mut out = Vec::new();
    put_varint(&mut out, raw.len() as u64);
    out.extend(compress_bytes(order, &raw));
    out
}

fn decompress_lines(blob: &[u8], count: usize, order: u32) -> Result<Vec<Vec<u8>>> {
    let mut pos = 0usize;
    let raw_len = get_varint(blob, &mut pos)? as usize;
    let raw = decompress_bytes(order, &blob[pos..], raw_len);
    let mut pos = 0usize;
    let mut lines = Vec::with_capacity(count);
    let mut prev: Vec<u8> = Vec::new();
    for _ in 0..count {
        let line = decode_line(&raw, &mut pos, &prev)?;
        lines.push(line.clone());
        prev = line;
    }
    Ok(lines)
}

// ---------------------------------------------------------------------------
// sequence channel

fn floored(probs: [f64; 4]) -> [f64; 4] {
    [
        probs[0].max(PROB_FLOOR),
        probs[1].max(PROB_FLOOR),
        probs[2].max(PROB_FLOOR),
        probs[3].max(PROB_FLOOR),
    ]
}

fn compress_sequences(sequences: &[&[u8]], config: &BuiltinConfig) -> Vec<u8> {
    // lengths
    let mut lengths = Vec::new();
    for seq in sequences {
        put_varint(&mut lengths, seq.len() as u64);
    }
    let lengths_coded = {
        let mut out = Vec::new();
        put_varint(&mut out, lengths.len() as u64);
        out.extend(compress_bytes(1, &lengths));
        out
    };

    // non-ACGT exceptions over the concatenated sequence positions
    let mut exceptions = Vec::new();
    let mut n_exc = 0u64;
    let mut last_pos = 0u64;
    let mut pos = 0u64;
    for seq in sequences {
        for &b in *seq {
            if encode_base(b).is_none() {
                put_varint(&mut exceptions, pos - last_pos);
                exceptions.push(b);
                last_pos = pos;
                n_exc += 1;
            }
            pos += 1;
        }
    }
    let exc_coded = {
        let mut out = Vec::new();
        put_varint(&mut out, n_exc);
        put_varint(&mut out, exceptions.len() as u64);
        out.extend(compress_bytes(1, &exceptions));
        out
    };

    // DNA symbols through the adaptive ensemble; statistics reset per block
    let mut ensemble = ModelEnsemble::new(&config.seq_model);
    let mut walker = AdaptiveWalker::new(&mut ensemble).expect("fresh ensemble is not frozen");
    let mut enc = BitEncoder::new();
    let mut coded = 0usize;
    for seq in sequences {
        for &b in *seq {
            if coded > 0 && coded % config.block_symbols == 0 {
                walker.reset();
            }
            let sym = encode_base(b).unwrap_or(0);
            let probs = floored(walker.next_probs());
            encode_symbol(&mut enc, &probs, sym);
            walker.observe(sym);
            coded += 1;
        }
    }
    let dna = enc.finish();

    let mut out = Vec::new();
    put_varint(&mut out, lengths_coded.len() as u64);
    out.extend(lengths_coded);
    put_varint(&mut out, exc_coded.len() as u64);
    out.extend(exc_coded);
    out.extend(dna);
    out
}

fn decompress_sequences(
    blob: &[u8],
    count: usize,
    config: &BuiltinConfig,
) -> Result<Vec<Vec<u8>>> {
    let mut pos = 0usize;
    let lengths_len = get_varint(blob, &mut pos)? as usize;
    let lengths_coded = blob
        .get(pos..pos + lengths_len)
        .ok_or_else(|| Error::CorruptContainer("truncated lengths stream".into()))?;
    pos += lengths_len;
    let exc_len = get_varint(blob, &mut pos)? as usize;
    let exc_coded = blob
        .get(pos..pos + exc_len)
        .ok_or_else(|| Error::CorruptContainer("truncated exception stream".into()))?;
    pos += exc_len;
    let dna = &blob[pos..];

    let lengths = {
        let mut p = 0usize;
        let raw_len = get_varint(lengths_coded, &mut p)? as usize;
        let raw = decompress_bytes(1, &lengths_coded[p..], raw_len);
        let mut p = 0usize;
        let mut lengths = Vec::with_capacity(count);
        for _ in 0..count {
            lengths.push(get_varint(&raw, &mut p)? as usize);
        }
        lengths
    };

    let (n_exc, exceptions) = {
        let mut p = 0usize;
        let n_exc = get_varint(exc_coded, &mut p)?;
        let raw_len = get_varint(exc_coded, &mut p)? as usize;
        (n_exc, decompress_bytes(1, &exc_coded[p..], raw_len))
    };

    let mut ensemble = ModelEnsemble::new(&config.seq_model);
    let mut walker = AdaptiveWalker::new(&mut ensemble).expect("fresh ensemble is not frozen");
    let mut dec = BitDecoder::new(dna);
    let mut coded = 0usize;
    let mut sequences: Vec<Vec<u8>> = Vec::with_capacity(count);
    for len in lengths {
        let mut seq = Vec::with_capacity(len);
        for _ in 0..len {
            if coded > 0 && coded % config.block_symbols == 0 {
                walker.reset();
            }
            let probs = floored(walker.next_probs());
            let sym = decode_symbol(&mut dec, &probs);
            walker.observe(sym);
            seq.push(crate::model::decode_base(sym));
            coded += 1;
        }
        sequences.push(seq);
    }

    // patch non-ACGT bytes back in
    let mut p = 0usize;
    let mut abs = 0u64;
    for k in 0..n_exc {
        let delta = get_varint(&exceptions, &mut p)?;
        abs = if k == 0 { delta } else { abs + delta };
        let byte = *exceptions
            .get(p)
            .ok_or_else(|| Error::CorruptContainer("truncated exception entry".into()))?;
        p += 1;
        let mut idx = abs as usize;
        let mut found = false;
        for seq in sequences.iter_mut() {
            if idx < seq.len() {
                seq[idx] = byte;
                found = true;
                break;
            }
            idx -= seq.len();
        }
        if !found {
            return Err(Error::CorruptContainer("exception position out of range".into()));
        }
    }
    Ok(sequences)
}

// ---------------------------------------------------------------------------
// container

fn compress_qualities(qualities: &[&[u8]]) -> Vec<u8> {
    let mut model = ByteModel::new(2);
    let mut enc = BitEncoder::new();
    for q in qualities {
        for &b in *q {
            model.encode_byte(&mut enc, b);
        }
    }
    enc.finish()
}

fn decompress_qualities(blob: &[u8], lengths: &[usize]) -> Vec<Vec<u8>> {
    let mut model = ByteModel::new(2);
    let mut dec = BitDecoder::new(blob);
    lengths
        .iter()
        .map(|&len| (0..len).map(|_| model.decode_byte(&mut dec)).collect())
        .collect()
}

/// Per-channel compressed sizes of a built-in container.
#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct ChannelSizes {
    pub headers: u64,
    pub sequences: u64,
    pub qualities: u64,
}

/// Compresses records into the "RSQZ" container. Deterministic for identical
/// input regardless of thread count.
pub fn builtin_compress(records: &[FastqRecord], config: &BuiltinConfig) -> Vec<u8> {
    let headers: Vec<&[u8]> = records.iter().map(|r| r.header.as_slice()).collect();
    let separators: Vec<&[u8]> = records.iter().map(|r| r.separator.as_slice()).collect();
    let sequences: Vec<&[u8]> = records.iter().map(|r| r.sequence.as_slice()).collect();
    let qualities: Vec<&[u8]> = records.iter().map(|r| r.quality.as_slice()).collect();

    let (head_section, (seq_section, qual_section)) = rayon::join(
        || {
            let hs = compress_lines(&headers, 3);
            let ss = compress_lines(&separators, 3);
            let mut out = Vec::new();
            out.extend_from_slice(&(records.len() as u64).to_le_bytes());
            put_varint(&mut out, hs.len() as u64);
            out.extend(hs);
            out.extend(ss);
            out
        },
        || {
            rayon::join(
                || compress_sequences(&sequences, config),
                || compress_qualities(&qualities),
            )
        },
    );

    let mut out = Vec::new();
    out.extend_from_slice(CONTAINER_MAGIC);
    out.push(CONTAINER_VERSION);
    for section in [&head_section, &seq_section, &qual_section] {
        out.extend_from_slice(&(section.len() as u64).to_le_bytes());
        out.extend_from_slice(section);
    }
    out.extend_from_slice(&fnv1a(&fastq_to_bytes(records)).to_le_bytes());
    out
}

/// Reads the three section sizes of a container without decompressing.
pub fn container_channel_sizes(blob: &[u8]) -> Result<ChannelSizes> {
    let mut sizes = [0u64; 3];
    let mut pos = 5usize;
    if blob.len() < 5 || &blob[0..4] != CONTAINER_MAGIC {
        return Err(Error::CorruptContainer("bad magic".into()));
    }
    for size in sizes.iter_mut() {
        let end = pos + 8;
        let len = u64::from_le_bytes(
            blob.get(pos..end)
                .ok_or_else(|| Error::CorruptContainer("truncated section header".into()))?
                .try_into()
                .unwrap(),
        );
        pos = end + len as usize;
        *size = len;
    }
    Ok(ChannelSizes {
        headers: sizes[0],
        sequences: sizes[1],
        qualities: sizes[2],
    })
}

pub fn builtin_decompress(blob: &[u8], config: &BuiltinConfig) -> Result<Vec<FastqRecord>> {
    if blob.len() < 5 + 3 * 8 + 8 {
        return Err(Error::CorruptContainer("container too short".into()));
    }
    if &blob[0..4] != CONTAINER_MAGIC {
        return Err(Error::CorruptContainer("bad magic".into()));
    }
    if blob[4] != CONTAINER_VERSION {
        return Err(Error::CorruptContainer(format!(
            "unsupported container version {}",
            blob[4]
        )));
    }
    let mut pos = 5usize;
    let mut sections: Vec<&[u8]> = Vec::with_capacity(3);
    for _ in 0..3 {
        let len = u64::from_le_bytes(
            blob.get(pos..pos + 8)
                .ok_or_else(|| Error::CorruptContainer("truncated section header".into()))?
                .try_into()
                .unwrap(),
        ) as usize;
        pos += 8;
        sections.push(
            blob.get(pos..pos + len)
                .ok_or_else(|| Error::CorruptContainer("truncated section".into()))?,
        );
        pos += len;
    }
    let stored_checksum = u64::from_le_bytes(
        blob.get(pos..pos + 8)
            .ok_or_else(|| Error::CorruptContainer("missing plaintext checksum".into()))?
            .try_into()
            .unwrap(),
    );

    let head_section = sections[0];
    if head_section.len() < 8 {
        return Err(Error::CorruptContainer("truncated headers section".into()));
    }
    let count = u64::from_le_bytes(head_section[0..8].try_into().unwrap()) as usize;
    let mut hp = 8usize;
    let hs_len = get_varint(head_section, &mut hp)? as usize;
    let hs = head_section
        .get(hp..hp + hs_len)
        .ok_or_else(|| Error::CorruptContainer("truncated header stream".into()))?;
    let ss = &head_section[hp + hs_len..];

    let headers = decompress_lines(hs, count, 3)?;
    let separators = decompress_lines(ss, count, 3)?;
    let sequences = decompress_sequences(sections[1], count, config)?;
    let lengths: Vec<usize> = sequences.iter().map(|s| s.len()).collect();
    let qualities = decompress_qualities(sections[2], &lengths);

    let records: Vec<FastqRecord> = headers
        .into_iter()
        .zip(sequences)
        .zip(separators)
        .zip(qualities)
        .map(|(((header, sequence), separator), quality)| FastqRecord {
            header,
            sequence,
            separator,
            quality,
        })
        .collect();

    if fnv1a(&fastq_to_bytes(&records)) != stored_checksum {
        return Err(Error::CorruptContainer(
            "plaintext checksum mismatch after decode".into(),
        ));
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// external adapter

fn run_template(template: &str, input: &Path, output: &Path) -> Result<()> {
    let cmd = template
        .replace("{in}", &input.display().to_string())
        .replace("{out}", &output.display().to_string());
    let result = Command::new("sh").arg("-c").arg(&cmd).output();
    let output = result.map_err(|e| Error::ToolMissing(format!("{cmd}: {e}")))?;
    if !output.status.success() {
        let status = output.status.code().unwrap_or(-1);
        if status == 127 {
            return Err(Error::ToolMissing(cmd));
        }
        return Err(Error::ToolFailed {
            command: cmd,
            status,
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        });
    }
    Ok(())
}

/// Runs the compress template and returns the compressed size in bytes.
pub fn external_compress(spec: &ExternalSpec, input: &Path, output: &Path) -> Result<u64> {
    run_template(&spec.command_template, input, output)?;
    Ok(std::fs::metadata(output)?.len())
}

pub fn external_decompress(spec: &ExternalSpec, input: &Path, output: &Path) -> Result<()> {
    run_template(&spec.decompress_template, input, output)
}

// ---------------------------------------------------------------------------
// gain accounting

#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct ChannelPair {
    pub original: u64,
    pub sorted: u64,
}

impl ChannelPair {
    pub fn gain(&self) -> i64 {
        self.original as i64 - self.sorted as i64
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct PerChannel {
    pub headers: ChannelPair,
    pub sequences: ChannelPair,
    pub qualities: ChannelPair,
}

/// Per-channel and total compressed sizes for the original vs. sorted file.
#[derive(Debug, Clone, Serialize, Default)]
pub struct GainReport {
    pub original_compressed_bytes: u64,
    pub sorted_compressed_bytes: u64,
    /// Populated by the builtin backend only.
    pub per_channel: Option<PerChannel>,
    pub sidecar_bytes: u64,
    /// Worst-case order-information charge for this read count.
    pub stirling_bits: f64,
    pub gain_bytes: i64,
    pub gain_percent: f64,
    /// Gain after paying for the sidecar (the fully lossless mode).
    pub adjusted_gain_bytes: i64,
}

impl GainReport {
    pub fn new(
        original_compressed_bytes: u64,
        sorted_compressed_bytes: u64,
        per_channel: Option<PerChannel>,
        sidecar_bytes: u64,
        n_reads: u64,
    ) -> Self {
        let gain_bytes = original_compressed_bytes as i64 - sorted_compressed_bytes as i64;
        let gain_percent = if original_compressed_bytes == 0 {
            0.0
        } else {
            (1.0 - sorted_compressed_bytes as f64 / original_compressed_bytes as f64) * 100.0
        };
        GainReport {
            original_compressed_bytes,
            sorted_compressed_bytes,
            per_channel,
            sidecar_bytes,
            stirling_bits: if n_reads == 0 {
                0.0
            } else {
                stirling_order_bits(n_reads).unwrap()
            },
            gain_bytes,
            gain_percent,
            adjusted_gain_bytes: gain_bytes - sidecar_bytes as i64,
        }
    }
}

/// Compresses both record lists with the same backend and reports gains.
pub fn gain_report(
    original: &[FastqRecord],
    sorted: &[FastqRecord],
    sidecar_bytes: u64,
    spec: &BackendSpec,
    work_dir: &Path,
) -> Result<GainReport> {
    match spec {
        BackendSpec::Builtin(config) => {
            let (orig_blob, sorted_blob) = rayon::join(
                || builtin_compress(original, config),
                || builtin_compress(sorted, config),
            );
            let oc = container_channel_sizes(&orig_blob)?;
            let sc = container_channel_sizes(&sorted_blob)?;
            Ok(GainReport::new(
                orig_blob.len() as u64,
                sorted_blob.len() as u64,
                Some(PerChannel {
                    headers: ChannelPair {
                        original: oc.headers,
                        sorted: sc.headers,
                    },
                    sequences: ChannelPair {
                        original: oc.sequences,
                        sorted: sc.sequences,
                    },
                    qualities: ChannelPair {
                        original: oc.qualities,
                        sorted: sc.qualities,
                    },
                }),
                sidecar_bytes,
                original.len() as u64,
            ))
        }
        BackendSpec::External(ext) => {
            std::fs::create_dir_all(work_dir)?;
            let orig_path = work_dir.join("gain_original.fastq");
            let sorted_path = work_dir.join("gain_sorted.fastq");
            std::fs::write(&orig_path, fastq_to_bytes(original))?;
            std::fs::write(&sorted_path, fastq_to_bytes(sorted))?;
            let orig_out = work_dir.join("gain_original.cmp");
            let sorted_out = work_dir.join("gain_sorted.cmp");
            let orig_size = external_compress(ext, &orig_path, &orig_out)?;
            let sorted_size = external_compress(ext, &sorted_path, &sorted_out)?;
            Ok(GainReport::new(
                orig_size,
                sorted_size,
                None,
                sidecar_bytes,
                original.len() as u64,
            ))
        }
    }
}
