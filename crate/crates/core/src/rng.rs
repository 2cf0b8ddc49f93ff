//! Seeded random source.
//!
//! All stochastic operations in the crate take a caller-owned random source;
//! nothing draws from ambient randomness. A single 64-bit seed therefore
//! fully determines every probabilistic output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The counter-based generator threaded through simulation and synthesis.
pub type SeededRng = ChaCha8Rng;

/// Build the deterministic random source for a given seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}
