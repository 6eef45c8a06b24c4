//! Reproducible random streams.
//!
//! A complex with seed `s` draws from xoshiro256** whose 256-bit state is the
//! first four outputs of the SplitMix64 generator started at state `s`. Face `k`
//! consumes exactly the `k`-th 64-bit output. Trial `t` of an experiment with
//! master seed `m` uses seed `splitmix64(m + t)` (wrapping add), where
//! `splitmix64(x)` is the first SplitMix64 output from state `x`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

/// One SplitMix64 step from state `x`.
pub fn splitmix64(x: u64) -> u64 {
    SplitMix64::seed_from_u64(x).next_u64()
}

pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(trial_index))
}

/// The face-inclusion stream for a complex seed.
pub fn face_stream(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Inclusion cut-off `floor(p * 2^64)`; `None` means every draw is accepted (p = 1).
pub fn inclusion_threshold(p: f64) -> Option<u64> {
    if p >= 1.0 {
        None
    } else if p <= 0.0 {
        Some(0)
    } else {
        // p * 2^64 is exact in binary64, and the cast floors.
        Some((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference algorithms written out from their published definitions.
    fn ref_splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn ref_xoshiro(s: &mut [u64; 4]) -> u64 {
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    #[test]
    fn splitmix_golden_values() {
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        let mut st = 0u64;
        let seq: Vec<u64> = (0..3).map(|_| ref_splitmix(&mut st)).collect();
        assert_eq!(seq[0], splitmix64(0));
        assert_eq!(seq[1], splitmix64(0x9E37_79B9_7F4A_7C15));
    }

    #[test]
    fn trial_seed_golden_values() {
        assert_eq!(trial_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(trial_seed(0, 1), 0x910A_2DEC_8902_5CC1);
        assert_eq!(trial_seed(12345, 7), 0xF91B_E0A7_DAAB_07FA);
        assert_eq!(trial_seed(u64::MAX, 1), trial_seed(0, 0));
    }

    #[test]
    fn face_stream_matches_reference() {
        for seed in [0u64, 1, 12345, u64::MAX] {
            let mut st = seed;
            let mut s = [0u64; 4];
            for w in s.iter_mut() {
                *w = ref_splitmix(&mut st);
            }
            let mut rng = face_stream(seed);
            for _ in 0..100 {
                assert_eq!(rng.next_u64(), ref_xoshiro(&mut s));
            }
        }
    }

    #[test]
    fn thresholds_at_extremes() {
        assert_eq!(inclusion_threshold(0.0), Some(0));
        assert_eq!(inclusion_threshold(1.0), None);
        assert_eq!(inclusion_threshold(0.5), Some(1 << 63));
        assert_eq!(inclusion_threshold(0.25), Some(1 << 62));
    }
}
