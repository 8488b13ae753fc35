//! Seeded randomness: stream derivation, random-function tables and random
//! permutations. Nothing in the crate reads ambient entropy.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::mask;

/// The seeded stream every sampling routine draws from.
pub type Stream = ChaCha8Rng;

/// Largest input width a [`RandomFunction`] will tabulate.
pub const MAX_TABLE_BITS: u32 = 22;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a parent seed and a label.
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ label.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Opens stream `label` of the generator keyed by `seed`.
pub fn stream(seed: u64, label: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng
}

/// Uniform value of the given width.
pub fn uniform_bits(rng: &mut dyn RngCore, width: u32) -> u64 {
    if width == 0 {
        0
    } else {
        rng.next_u64() & mask(width)
    }
}

/// Uniformly random permutation of `{0, …, 2^width − 1}` as a table.
pub fn random_permutation(rng: &mut dyn RngCore, width: u32) -> Vec<u64> {
    let mut table: Vec<u64> = (0..1u64 << width).collect();
    table.shuffle(rng);
    table
}

/// Inverts a permutation table. Returns `None` if the table is not a bijection.
pub fn invert_permutation(table: &[u64]) -> Option<Vec<u64>> {
    let mut inverse = vec![u64::MAX; table.len()];
    for (x, &y) in table.iter().enumerate() {
        let slot = inverse.get_mut(y as usize)?;
        if *slot != u64::MAX {
            return None;
        }
        *slot = x as u64;
    }
    Some(inverse)
}

/// A seeded random function `{0,1}^in → {0,1}^out`, tabulated on first use.
///
/// The table depends only on `(seed, in_bits, out_bits)`, so two instances
/// built from the same parameters agree everywhere.
#[derive(Debug)]
pub struct RandomFunction {
    seed: u64,
    in_bits: u32,
    out_bits: u32,
    table: OnceLock<Box<[u64]>>,
}

impl RandomFunction {
    pub fn new(seed: u64, in_bits: u32, out_bits: u32) -> Self {
        assert!(in_bits <= MAX_TABLE_BITS, "random function input too wide");
        assert!(out_bits <= 64);
        Self {
            seed,
            in_bits,
            out_bits,
            table: OnceLock::new(),
        }
    }

    pub fn in_bits(&self) -> u32 {
        self.in_bits
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn table(&self) -> &[u64] {
        self.table.get_or_init(|| {
            let mut rng = stream(self.seed, 0x7261_6e64_666e);
            (0..1u64 << self.in_bits)
                .map(|_| uniform_bits(&mut rng, self.out_bits))
                .collect()
        })
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.table()[(x & mask(self.in_bits)) as usize]
    }
}

impl Clone for RandomFunction {
    fn clone(&self) -> Self {
        Self::new(self.seed, self.in_bits, self.out_bits)
    }
}
