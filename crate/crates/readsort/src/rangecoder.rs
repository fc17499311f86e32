//! Carry-free binary arithmetic coder with 64-bit state.
//!
//! Symbols are coded as binary decisions with explicit probabilities; DNA
//! symbols use a two-level binary decomposition of the 4-way distribution.
//! Encoder and decoder must walk the identical model-state trajectory.

const HALF: u64 = 1 << 63;
const QUARTER: u64 = 1 << 62;
const SCALE_BITS: u32 = 32;
const SCALE: u64 = 1 << SCALE_BITS;

#[inline]
fn scale_p1(p1: f64) -> u64 {
    ((p1 * SCALE as f64) as u64).clamp(1, SCALE - 1)
}

pub struct BitEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: Vec<u8>,
    bit_buf: u8,
    bit_count: u8,
}

impl BitEncoder {
    pub fn new() -> Self {
        BitEncoder {
            low: 0,
            high: u64::MAX,
            pending: 0,
            out: Vec::new(),
            bit_buf: 0,
            bit_count: 0,
        }
    }

    #[inline]
    fn push_bit(&mut self, bit: bool) {
        self.bit_buf = (self.bit_buf << 1) | bit as u8;
        self.bit_count += 1;
        if self.bit_count == 8 {
            self.out.push(self.bit_buf);
            self.bit_buf = 0;
            self.bit_count = 0;
        }
    }

    #[inline]
    fn emit(&mut self, bit: bool) {
        self.push_bit(bit);
        while self.pending > 0 {
            self.push_bit(!bit);
            self.pending -= 1;
        }
    }

    /// Encodes one bit with probability `p1` of it being 1.
    #[inline]
    pub fn encode(&mut self, p1: f64, bit: bool) {
        let p0 = SCALE - scale_p1(p1);
        let range = (self.high - self.low) as u128 + 1;
        let bound = (((range * p0 as u128) >> SCALE_BITS) as u64).clamp(1, (range - 1) as u64);
        if bit {
            self.low += bound;
        } else {
            self.high = self.low + (bound - 1);
        }
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Flushes the interval and returns the coded bytes.
    pub fn finish(mut self) -> Vec<u8> {
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        while self.bit_count != 0 {
            self.push_bit(false);
        }
        self.out
    }
}

impl Default for BitEncoder {
    fn default() -> Self {
        Self::new()
    }
}

pub struct BitDecoder<'a> {
    low: u64,
    high: u64,
    code: u64,
    input: &'a [u8],
    byte_pos: usize,
    bit_pos: u8,
}

impl<'a> BitDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Self {
        let mut dec = BitDecoder {
            low: 0,
            high: u64::MAX,
            code: 0,
            input,
            byte_pos: 0,
            bit_pos: 0,
        };
        for _ in 0..64 {
            dec.code = (dec.code << 1) | dec.next_bit();
        }
        dec
    }

    #[inline]
    fn next_bit(&mut self) -> u64 {
        // reads past the end decode as 0; the encoder's flush guarantees
        // the interval has already settled
        let bit = match self.input.get(self.byte_pos) {
            Some(&byte) => (byte >> (7 - self.bit_pos)) & 1,
            None => 0,
        };
        self.bit_pos += 1;
        if self.bit_pos == 8 {
            self.bit_pos = 0;
            self.byte_pos += 1;
        }
        bit as u64
    }

    /// Decodes one bit coded with probability `p1` of being 1.
    #[inline]
    pub fn decode(&mut self, p1: f64) -> bool {
        let p0 = SCALE - scale_p1(p1);
        let range = (self.high - self.low) as u128 + 1;
        let bound = (((range * p0 as u128) >> SCALE_BITS) as u64).clamp(1, (range - 1) as u64);
        let bit = self.code >= self.low + bound;
        if bit {
            self.low += bound;
        } else {
            self.high = self.low + (bound - 1);
        }
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.code -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.code -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.code = (self.code << 1) | self.next_bit();
        }
        bit
    }
}

/// Encodes one DNA symbol (0..=3) as two binary decisions from a 4-way
/// distribution.
#[inline]
pub fn encode_symbol(enc: &mut BitEncoder, probs: &[f64; 4], sym: u8) {
    debug_assert!(sym < 4);
    let p_hi = probs[2] + probs[3];
    let hi = sym >= 2;
    enc.encode(p_hi, hi);
    let (p_even, p_odd) = if hi {
        (probs[2], probs[3])
    } else {
        (probs[0], probs[1])
    };
    enc.encode(p_odd / (p_even + p_odd), sym & 1 == 1);
}

#[inline]
pub fn decode_symbol(dec: &mut BitDecoder, probs: &[f64; 4]) -> u8 {
    let p_hi = probs[2] + probs[3];
    let hi = dec.decode(p_hi);
    let (p_even, p_odd) = if hi {
        (probs[2], probs[3])
    } else {
        (probs[0], probs[1])
    };
    let odd = dec.decode(p_odd / (p_even + p_odd));
    ((hi as u8) << 1) | odd as u8
}
