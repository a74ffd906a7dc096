/// One step of the splitmix64 sequence.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `(a, b)` under `base`; distinct arguments give unrelated seeds.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ a) ^ b.rotate_left(32))
}
