//! Injectable randomness.
//!
//! Every draw the library makes goes through [`RandomSource::next_index`], so
//! a roll can be replayed exactly by scripting the indices. The default
//! generator is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, with
//! indices drawn by `rand`'s uniform integer sampler.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub trait RandomSource {
    /// Uniform index in `[0, n)`. `n` is at least 1.
    fn next_index(&mut self, n: u64) -> Result<u64>;
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn next_index(&mut self, n: u64) -> Result<u64> {
        (**self).next_index(n)
    }
}

#[derive(Debug, Clone)]
pub struct SeededSource {
    rng: ChaCha8Rng,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        SeededSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seeded from operating system entropy.
    pub fn from_entropy() -> Self {
        Self::new(rand::rng().random())
    }
}

pub fn seeded_source(seed: u64) -> SeededSource {
    SeededSource::new(seed)
}

impl RandomSource for SeededSource {
    fn next_index(&mut self, n: u64) -> Result<u64> {
        debug_assert!(n >= 1);
        Ok(self.rng.random_range(0..n))
    }
}

/// Replays a fixed queue of indices; errors once the queue runs dry.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    queue: VecDeque<u64>,
}

impl ScriptedSource {
    pub fn new(indices: impl IntoIterator<Item = u64>) -> Self {
        ScriptedSource {
            queue: indices.into_iter().collect(),
        }
    }

    /// Script for standard dice: face value `v` is index `v - 1`.
    pub fn from_rolls(values: impl IntoIterator<Item = u64>) -> Self {
        Self::new(values.into_iter().map(|v| {
            assert!(v >= 1, "standard die faces start at 1");
            v - 1
        }))
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }
}

impl RandomSource for ScriptedSource {
    fn next_index(&mut self, n: u64) -> Result<u64> {
        let index = self.queue.pop_front().ok_or(Error::SourceExhausted)?;
        if index >= n {
            return Err(Error::ScriptOutOfRange { index, bound: n });
        }
        Ok(index)
    }
}
