use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains, kept apart so object streams never alias model-level ones.
pub(crate) mod domain {
    pub const OBJECT: u64 = 1;
    pub const CHAIN: u64 = 2;
    pub const CLASS: u64 = 3;
    pub const SIZES: u64 = 4;
    pub const POLICY: u64 = 5;
    pub const REPLICATION: u64 = 6;
    pub const VOLUME: u64 = 7;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for `(seed, domain, index)`.
pub(crate) fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(domain)));
    rng.set_stream(index);
    rng
}

/// Derived seed, e.g. per replication.
pub(crate) fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain)).wrapping_add(index))
}
