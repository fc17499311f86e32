//! Lossless re-encoding of metagenomic FASTQ files.
//!
//! The pipeline classifies reads against a reference database with
//! compression-based similarity, clusters similar reads by recursive
//! filtering, reorders them, and compresses the result. An optional
//! permutation sidecar restores the original read order bit-exactly.

pub mod backend;
pub mod classify;
pub mod error;
pub mod fastq;
pub mod filter;
pub mod model;
pub mod pipeline;
pub mod rangecoder;
pub mod reorder;
pub mod sim;

pub use error::{Error, Result};
