//! Counter-based seeding: every frame gets its own generator derived from
//! the run seed and the frame's coordinates, so results do not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::schemes::SchemeId;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a sequence of words into one 64-bit seed.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x243F_6A88_85A3_08D3, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Grid point coordinates that identify a stream of frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamKey {
    pub base_seed: u64,
    pub scheme: SchemeId,
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub snr_db: f64,
}

impl StreamKey {
    pub fn frame_seed(&self, frame: u64) -> u64 {
        hash_words(&[
            self.base_seed,
            self.scheme.index(),
            self.alpha.to_bits(),
            self.gamma.to_bits(),
            self.theta.to_bits(),
            self.snr_db.to_bits(),
            frame,
        ])
    }

    /// Independent data and noise generators for one frame.
    pub fn frame_rngs(&self, frame: u64) -> (ChaCha8Rng, ChaCha8Rng) {
        let data = ChaCha8Rng::seed_from_u64(self.frame_seed(frame));
        let mut noise = data.clone();
        noise.set_stream(1);
        (data, noise)
    }
}
