//! Seeded random streams.
//!
//! All sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)`, with the 64-bit stream id selecting an independent
//! substream. Bounded integers are drawn by rejection, so a given
//! `(seed, stream)` produces the same values on every platform.

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Rng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform integer in `0..n` (Lemire's multiply-and-reject).
#[inline]
pub fn uniform_below(rng: &mut impl RngCore, n: u64) -> u64 {
    assert!(n > 0, "empty range");
    let threshold = n.wrapping_neg() % n;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(n);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Uniform big integer in `0..n`, by masking to the bit length and rejecting.
pub fn uniform_below_big(rng: &mut impl RngCore, n: &BigUint) -> BigUint {
    assert!(n.bits() > 0, "empty range");
    if let Ok(small) = u64::try_from(n) {
        return BigUint::from(uniform_below(rng, small));
    }
    let bits = n.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    let top_mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        digits[words - 1] &= top_mask;
        let x = BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|&d| [d as u32, (d >> 32) as u32])
                .collect::<Vec<u32>>(),
        );
        if &x < n {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_streams() {
        let a: Vec<u64> = (0..5).map(|_| stream_rng(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream_rng(7, 3).next_u64(), stream_rng(7, 4).next_u64());
    }

    #[test]
    fn uniform_below_covers_range() {
        let mut r = stream_rng(1, 0);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[uniform_below(&mut r, 7) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| (850..1150).contains(&c)), "{seen:?}");
    }

    #[test]
    fn big_uniform_in_range() {
        let mut r = stream_rng(2, 0);
        let n = BigUint::from(3u32) << 100u32;
        let mut high = 0;
        for _ in 0..1000 {
            let x = uniform_below_big(&mut r, &n);
            assert!(x < n);
            if x >= (BigUint::from(3u32) << 99u32) {
                high += 1;
            }
        }
        assert!((400..600).contains(&high), "{high}");
    }
}
