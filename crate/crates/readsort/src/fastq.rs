//! Streaming FASTQ parsing, validation, and writing with channel separation.
//!
//! Only 4-line records are supported (no wrapped sequences). Lines must end
//! with `\n`; files using `\r\n` are rejected rather than silently rewritten,
//! so the byte-exact round-trip guarantee stays honest.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One sequencing read: the three information channels plus the separator line.
///
/// Stored without line terminators or the leading `@`/`+` markers removed —
/// `header` includes its `@`, `separator` its `+`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastqRecord {
    pub header: Vec<u8>,
    pub sequence: Vec<u8>,
    pub separator: Vec<u8>,
    pub quality: Vec<u8>,
}

impl FastqRecord {
    /// Total characters across the four lines, excluding newlines.
    pub fn char_count(&self) -> usize {
        self.header.len() + self.sequence.len() + self.separator.len() + self.quality.len()
    }

    /// Serialized size in bytes, including the four newlines.
    pub fn byte_len(&self) -> usize {
        self.char_count() + 4
    }
}

/// The per-channel decomposition of a record list. All four lists have equal
/// length and preserve record order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChannelTriple {
    pub headers: Vec<Vec<u8>>,
    pub sequences: Vec<Vec<u8>>,
    pub separators: Vec<Vec<u8>>,
    pub qualities: Vec<Vec<u8>>,
}

impl ChannelTriple {
    pub fn len(&self) -> usize {
        self.headers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.headers.is_empty()
    }

    /// Reassemble records from the channels (inverse of [`split_channels`]).
    pub fn zip(self) -> Vec<FastqRecord> {
        self.headers
            .into_iter()
            .zip(self.sequences)
            .zip(self.separators)
            .zip(self.qualities)
            .map(|(((header, sequence), separator), quality)| FastqRecord {
                header,
                sequence,
                separator,
                quality,
            })
            .collect()
    }
}

/// Streaming 4-line FASTQ parser. Memory is bounded by the longest record,
/// not the file size.
pub struct FastqReader<R: BufRead> {
    input: R,
    record_index: usize,
    line_buf: Vec<u8>,
    done: bool,
}

impl<R: BufRead> FastqReader<R> {
    pub fn new(input: R) -> Self {
        FastqReader {
            input,
            record_index: 0,
            line_buf: Vec::new(),
            done: false,
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedRecord {
            index: self.record_index + 1,
            reason: reason.into(),
        }
    }

    /// Reads one `\n`-terminated line, without the terminator.
    /// Returns None at clean EOF (only valid before a record starts).
    fn read_line(&mut self) -> Result<Option<Vec<u8>>> {
        self.line_buf.clear();
        let n = self.input.read_until(b'\n', &mut self.line_buf)?;
        if n == 0 {
            return Ok(None);
        }
        if self.line_buf.last() != Some(&b'\n') {
            return Err(self.malformed("truncated record (missing final newline)"));
        }
        self.line_buf.pop();
        if self.line_buf.last() == Some(&b'\r') {
            return Err(self.malformed(
                "CRLF line endings are not supported; convert the file to LF first",
            ));
        }
        Ok(Some(self.line_buf.clone()))
    }

    fn read_record(&mut self) -> Result<Option<FastqRecord>> {
        let header = match self.read_line()? {
            None => return Ok(None),
            Some(line) => line,
        };
        if header.first() != Some(&b'@') {
            return Err(self.malformed("header line must start with '@'"));
        }
        let sequence = self
            .read_line()?
            .ok_or_else(|| self.malformed("truncated record (missing sequence line)"))?;
        if let Some(&b) = sequence.iter().find(|b| !b.is_ascii_uppercase()) {
            return Err(self.malformed(format!(
                "sequence contains non-uppercase-letter byte 0x{b:02x}"
            )));
        }
        let separator = self
            .read_line()?
            .ok_or_else(|| self.malformed("truncated record (missing separator line)"))?;
        if separator.first() != Some(&b'+') {
            return Err(self.malformed("separator line must start with '+'"));
        }
        let quality = self
            .read_line()?
            .ok_or_else(|| self.malformed("truncated record (missing quality line)"))?;
        if quality.len() != sequence.len() {
            return Err(self.malformed(format!(
                "sequence length {} != quality length {}",
                sequence.len(),
                quality.len()
            )));
        }
        if let Some(&b) = quality.iter().find(|&&b| !(33..=126).contains(&b)) {
            return Err(self.malformed(format!("quality byte 0x{b:02x} outside ASCII 33-126")));
        }
        self.record_index += 1;
        Ok(Some(FastqRecord {
            header,
            sequence,
            separator,
            quality,
        }))
    }
}

impl<R: BufRead> Iterator for FastqReader<R> {
    type Item = Result<FastqRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_record() {
            Ok(Some(record)) => Some(Ok(record)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parse a full FASTQ byte slice into records.
pub fn parse_fastq(bytes: &[u8]) -> Result<Vec<FastqRecord>> {
    FastqReader::new(bytes).collect()
}

/// Write records as 4-line FASTQ. Returns the number of bytes written.
pub fn write_fastq<W: Write>(records: &[FastqRecord], output: &mut W) -> Result<u64> {
    let mut written = 0u64;
    for record in records {
        for line in [
            &record.header,
            &record.sequence,
            &record.separator,
            &record.quality,
        ] {
            output.write_all(line)?;
            output.write_all(b"\n")?;
            written += line.len() as u64 + 1;
        }
    }
    Ok(written)
}

/// Serialize records to an in-memory FASTQ byte buffer.
pub fn fastq_to_bytes(records: &[FastqRecord]) -> Vec<u8> {
    let total: usize = records.iter().map(|r| r.byte_len()).sum();
    let mut out = Vec::with_capacity(total);
    write_fastq(records, &mut out).expect("in-memory write cannot fail");
    out
}

/// Split records into per-channel lists, preserving record order.
pub fn split_channels(records: &[FastqRecord]) -> ChannelTriple {
    let mut triple = ChannelTriple::default();
    for record in records {
        triple.headers.push(record.header.clone());
        triple.sequences.push(record.sequence.clone());
        triple.separators.push(record.separator.clone());
        triple.qualities.push(record.quality.clone());
    }
    triple
}
