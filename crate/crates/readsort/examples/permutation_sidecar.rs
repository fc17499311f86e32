//! The order sidecar in isolation: pack a random permutation into the
//! bit-packed sidecar format and compare its size with the theoretical
//! worst-case order-information cost n log2 n - n log2 e.

use rand::rngs::ChaCha8Rng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use readsort::reorder::{decode_permutation, encode_permutation, stirling_order_bits};

fn main() -> anyhow::Result<()> {
    for n in [1_000u32, 100_000] {
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(n as u64));

        let sidecar = encode_permutation(&perm, 0);
        assert_eq!(decode_permutation(&sidecar)?, perm);

        let packed_bits = sidecar.payload.len() * 8;
        let stirling = stirling_order_bits(n as u64)?;
        println!(
            "n={n}: packed {packed_bits} bits, information bound {:.0} bits \
             ({:.2} vs {:.2} bits/index)",
            stirling,
            packed_bits as f64 / n as f64,
            stirling / n as f64
        );
    }
    Ok(())
}
