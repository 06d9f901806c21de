use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock {
    pub bits: Vec<bool>,
    pub seed: Option<u64>,
}

impl BitBlock {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, seed: None }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.bits.iter().map(|b| !b).collect())
    }
}

/// `count` uniform bits from a ChaCha8 stream seeded with `seed`.
pub fn generate_bits(count: usize, seed: u64) -> BitBlock {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block = fill_bits(&mut rng, count);
    block.seed = Some(seed);
    block
}

pub(crate) fn fill_bits<R: RngCore>(rng: &mut R, count: usize) -> BitBlock {
    let mut bits = Vec::with_capacity(count);
    while bits.len() < count {
        let word = rng.next_u64();
        let take = (count - bits.len()).min(64);
        bits.extend((0..take).map(|i| (word >> i) & 1 == 1));
    }
    BitBlock::new(bits)
}
