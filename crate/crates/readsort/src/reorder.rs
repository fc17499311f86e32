//! Permutation sidecar for bit-exact original-order restoration, plus the
//! Stirling-formula accounting used to charge the worst-case cost of the
//! read-order information.
//!
//! Sidecar file format (little-endian): magic "RSRT", version u8, n as u64,
//! checksum u64, then the permutation bit-packed at ceil(log2 max(n,2)) bits
//! per index, MSB-first. The stored permutation maps sorted position to
//! original index, so restoring is a single sequential scatter.

use crate::error::{Error, Result};
use crate::fastq::FastqRecord;
use crate::filter::validate_permutation;

pub const SIDECAR_MAGIC: &[u8; 4] = b"RSRT";
pub const SIDECAR_VERSION: u8 = 1;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// FNV-1a fingerprint of the record headers in the order given. The sidecar
/// stores this for the original order, so a mismatched sidecar is detected at
/// restore time.
pub fn header_checksum(records: &[FastqRecord]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for record in records {
        for &b in record.header.iter().chain(b"\n") {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    hash
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSidecar {
    pub n: u64,
    pub checksum: u64,
    pub payload: Vec<u8>,
}

/// Bits per packed index.
fn index_width(n: u64) -> u32 {
    let m = n.max(2);
    (m - 1).ilog2() + 1
}

/// Packs the sorted-to-original permutation into a sidecar.
pub fn encode_permutation(perm: &[u32], checksum: u64) -> PermutationSidecar {
    let n = perm.len() as u64;
    let width = index_width(n);
    let mut payload = Vec::with_capacity(((n * width as u64) as usize + 7) / 8);
    let mut acc: u64 = 0;
    let mut acc_bits: u32 = 0;
    for &v in perm {
        acc = (acc << width) | v as u64;
        acc_bits += width;
        while acc_bits >= 8 {
            acc_bits -= 8;
            payload.push((acc >> acc_bits) as u8);
        }
    }
    if acc_bits > 0 {
        payload.push((acc << (8 - acc_bits)) as u8);
    }
    PermutationSidecar {
        n,
        checksum,
        payload,
    }
}

/// Unpacks and validates the permutation.
pub fn decode_permutation(sidecar: &PermutationSidecar) -> Result<Vec<u32>> {
    let n = sidecar.n as usize;
    let width = index_width(sidecar.n);
    let expected_bytes = (n * width as usize + 7) / 8;
    if sidecar.payload.len() != expected_bytes {
        return Err(Error::CorruptSidecar(format!(
            "payload is {} bytes, expected {expected_bytes}",
            sidecar.payload.len()
        )));
    }
    let mut perm = Vec::with_capacity(n);
    let mut acc: u64 = 0;
    let mut acc_bits: u32 = 0;
    let mut bytes = sidecar.payload.iter();
    for _ in 0..n {
        while acc_bits < width {
            acc = (acc << 8) | *bytes.next().unwrap() as u64;
            acc_bits += 8;
        }
        acc_bits -= width;
        let v = (acc >> acc_bits) & ((1u64 << width) - 1);
        if v >= sidecar.n {
            return Err(Error::CorruptSidecar(format!("index {v} out of range")));
        }
        perm.push(v as u32);
    }
    validate_permutation(&perm, n)
        .map_err(|e| Error::CorruptSidecar(format!("payload is not a permutation: {e}")))?;
    Ok(perm)
}

impl PermutationSidecar {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(21 + self.payload.len());
        out.extend_from_slice(SIDECAR_MAGIC);
        out.push(SIDECAR_VERSION);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.checksum.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 21 {
            return Err(Error::CorruptSidecar("truncated header".into()));
        }
        if &bytes[0..4] != SIDECAR_MAGIC {
            return Err(Error::CorruptSidecar("bad magic".into()));
        }
        if bytes[4] != SIDECAR_VERSION {
            return Err(Error::CorruptSidecar(format!(
                "unsupported version {}",
                bytes[4]
            )));
        }
        let n = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let checksum = u64::from_le_bytes(bytes[13..21].try_into().unwrap());
        Ok(PermutationSidecar {
            n,
            checksum,
            payload: bytes[21..].to_vec(),
        })
    }
}

/// Worst-case order-information cost: n log2 n - n log2 e bits.
/// Negative for tiny n; reported as-is.
pub fn stirling_order_bits(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("stirling order cost requires n >= 1".into()));
    }
    let n = n as f64;
    Ok(n * n.log2() - n * std::f64::consts::E.log2())
}

/// Restores original order: scatters sorted records back through the
/// sidecar's permutation and verifies the header checksum.
pub fn restore_order(
    sorted: &[FastqRecord],
    sidecar: &PermutationSidecar,
) -> Result<Vec<FastqRecord>> {
    if sidecar.n as usize != sorted.len() {
        return Err(Error::CorruptSidecar(format!(
            "sidecar is for {} records, archive holds {}",
            sidecar.n,
            sorted.len()
        )));
    }
    let perm = decode_permutation(sidecar)?;
    let mut restored: Vec<Option<FastqRecord>> = vec![None; sorted.len()];
    for (k, &orig) in perm.iter().enumerate() {
        restored[orig as usize] = Some(sorted[k].clone());
    }
    let restored: Vec<FastqRecord> = restored.into_iter().map(|r| r.unwrap()).collect();
    if header_checksum(&restored) != sidecar.checksum {
        return Err(Error::CorruptSidecar(
            "header checksum mismatch; sidecar does not belong to this archive".into(),
        ));
    }
    Ok(restored)
}
