//! Gray-labeled 4-PAM with max-log LLR demapping.
//!
//! Labels `(b1, b0)` map as `00 → -3δ`, `01 → -δ`, `11 → +δ`, `10 → +3δ`,
//! with `δ = √(snr/5)` so the mean symbol energy is `snr` per real dimension.

use crate::error::{Error, Result};

/// Constellation levels in units of `δ`, indexed by `2·b1 + b0`.
const LEVELS: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PamMapper {
    delta: f64,
}

impl PamMapper {
    pub fn new(snr: f64) -> Result<Self> {
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::Domain(format!("snr must be positive, got {snr}")));
        }
        Ok(Self {
            delta: (snr / 5.0).sqrt(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Mean symbol energy under uniform labels, `5δ²`.
    pub fn mean_energy(&self) -> f64 {
        5.0 * self.delta * self.delta
    }

    #[inline]
    pub fn map_bits(&self, b1: u8, b0: u8) -> f64 {
        LEVELS[(2 * (b1 & 1) + (b0 & 1)) as usize] * self.delta
    }

    /// Maps consecutive bit pairs to symbols. `bits` must have even length.
    pub fn map_word(&self, bits: &[u8], out: &mut Vec<f64>) {
        debug_assert!(bits.len() % 2 == 0);
        out.clear();
        out.extend(bits.chunks_exact(2).map(|p| self.map_bits(p[0], p[1])));
    }

    /// Max-log LLRs `(llr_b1, llr_b0)` of `y = gain·s + n`, `n ~ N(0, noise_var)`.
    /// Positive values favour bit 0.
    pub fn demap_llr(&self, y: f64, gain: f64, noise_var: f64) -> Result<(f64, f64)> {
        if !(noise_var > 0.0) || !noise_var.is_finite() {
            return Err(Error::Domain(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        Ok(self.demap_unchecked(y, gain, noise_var))
    }

    #[inline]
    pub(crate) fn demap_unchecked(&self, y: f64, gain: f64, noise_var: f64) -> (f64, f64) {
        let scale = 0.5 / noise_var;
        let a = gain * self.delta;
        let d = |level: f64| {
            let e = y - a * level;
            e * e * scale
        };
        let (dm3, dm1, dp1, dp3) = (d(-3.0), d(-1.0), d(1.0), d(3.0));
        // b1 = 1 on the positive half, b0 = 1 on the inner points
        let llr_b1 = dp1.min(dp3) - dm3.min(dm1);
        let llr_b0 = dm1.min(dp1) - dm3.min(dp3);
        (llr_b1, llr_b0)
    }
}
