//! Exact random draws for rational probabilities.
//!
//! Sampling never goes through floating point: a Bernoulli draw with success
//! probability `a/b` draws a uniform integer below `b` and compares it with
//! `a`, so the sampled distribution matches the exact one bit for bit.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rat::Rational;

/// Uniform integer in `[0, bound)`, exact, via rejection on random bits.
pub(crate) fn uniform_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "uniform draw below zero");
    if let Some(b) = bound.to_u64() {
        return BigUint::from(rng.gen_range(0..b));
    }
    let bits = bound.bits();
    loop {
        let draw = random_bits(rng, bits);
        if &draw < bound {
            return draw;
        }
    }
}

/// `bits` uniformly random bits as an unsigned integer.
fn random_bits(rng: &mut ChaCha8Rng, bits: u64) -> BigUint {
    let bytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; bytes];
    rng.fill(&mut buf[..]);
    let excess = (bytes as u64) * 8 - bits;
    if excess > 0 {
        buf[bytes - 1] &= 0xff >> excess;
    }
    BigUint::from_bytes_le(&buf)
}

/// Exact Bernoulli draw; `p` must lie in `[0, 1]`.
pub(crate) fn bernoulli(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    debug_assert!(!p.is_negative());
    let a = p
        .numer()
        .to_biguint()
        .expect("probability numerator is nonnegative");
    let b = p.denom().to_biguint().expect("denominator is positive");
    if a.is_zero() {
        return false;
    }
    if a == b {
        return true;
    }
    uniform_below(rng, &b) < a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use rand::SeedableRng;

    #[test]
    fn uniform_below_is_in_range_and_hits_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bound = BigUint::from(5u32);
        let mut seen = [false; 5];
        for _ in 0..200 {
            let d = uniform_below(&mut rng, &bound);
            let d = d.to_u64().unwrap() as usize;
            assert!(d < 5);
            seen[d] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn uniform_below_wide_bound() {
        // Wider than u64 exercises the rejection path.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bound = BigUint::from(u64::MAX) * 1000u32 + 17u32;
        for _ in 0..50 {
            assert!(uniform_below(&mut rng, &bound) < bound);
        }
    }

    #[test]
    fn bernoulli_frequency_close_to_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = rat(1, 3);
        let trials = 30_000;
        let hits = (0..trials).filter(|_| bernoulli(&mut rng, &p)).count();
        let freq = hits as f64 / trials as f64;
        // 5 sigma for Bernoulli(1/3): sigma = sqrt(p(1-p)/trials) ~ 0.0027
        assert!((freq - 1.0 / 3.0).abs() < 0.014, "freq = {freq}");
    }

    #[test]
    fn bernoulli_degenerate_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!bernoulli(&mut rng, &rat(0, 1)));
        assert!(bernoulli(&mut rng, &rat(1, 1)));
    }
}
