//! Per-run seed derivation.

/// Derives the seed of run `index` from a master seed.
///
/// This is the SplitMix64 output function applied to
/// `master + (index + 1) · 0x9E3779B97F4A7C15`, i.e. the `index`-th value of
/// a SplitMix64 stream started at `master`.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
