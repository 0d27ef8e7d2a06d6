//! Zero-forcing and matched-filter equalization with per-stream noise
//! bookkeeping, plus interference cancellation.
//!
//! All noise variances assume unit-variance channel noise, so the effective
//! gain of a stream is the reciprocal of its variance.

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, Matrix};

/// Symbol estimates with the noise variance each one carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizedStream<const R: usize> {
    pub estimates: [f64; R],
    pub noise_var: [f64; R],
}

impl<const R: usize> EqualizedStream<R> {
    pub fn gains(&self) -> [f64; R] {
        self.noise_var.map(|v| 1.0 / v)
    }
}

/// Precomputed ZF filter `(hᵀh)⁻¹hᵀ` for a fixed channel.
#[derive(Debug, Clone, Copy)]
pub struct ZfEqualizer<const M: usize, const R: usize> {
    filter: Matrix<R, M>,
    noise_var: [f64; R],
}

impl<const M: usize, const R: usize> ZfEqualizer<M, R> {
    pub fn new(h: &Matrix<M, R>) -> Result<Self> {
        if R > M {
            return Err(Error::Singular);
        }
        let inv = h.gram().inverse()?;
        let filter = inv * h.transpose();
        let noise_var = std::array::from_fn(|i| inv.0[i][i]);
        if noise_var.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(Self { filter, noise_var })
    }

    #[inline]
    pub fn equalize(&self, y: &[f64; M]) -> [f64; R] {
        self.filter.mul_vec(y)
    }

    pub fn noise_var(&self) -> [f64; R] {
        self.noise_var
    }
}

pub fn zf<const M: usize, const R: usize>(h: &Matrix<M, R>, y: &[f64; M]) -> Result<EqualizedStream<R>> {
    let eq = ZfEqualizer::new(h)?;
    Ok(EqualizedStream {
        estimates: eq.equalize(y),
        noise_var: eq.noise_var,
    })
}

/// Per-column matched filter for channels whose columns are orthogonal.
#[derive(Debug, Clone, Copy)]
pub struct MatchedFilter<const M: usize, const R: usize> {
    /// Column `i` scaled by `1/‖colᵢ‖²`, stored as rows.
    filter: Matrix<R, M>,
    noise_var: [f64; R],
}

impl<const M: usize, const R: usize> MatchedFilter<M, R> {
    pub fn new(h_cols: &Matrix<M, R>) -> Result<Self> {
        let mut filter = h_cols.transpose();
        let mut noise_var = [0.0; R];
        let scale = h_cols.frobenius_sq().max(f64::MIN_POSITIVE);
        for i in 0..R {
            let e = norm_sq(&filter.0[i]);
            if e <= 1e-24 * scale || e == 0.0 {
                return Err(Error::Singular);
            }
            for v in &mut filter.0[i] {
                *v /= e;
            }
            noise_var[i] = 1.0 / e;
        }
        Ok(Self { filter, noise_var })
    }

    #[inline]
    pub fn equalize(&self, y: &[f64; M]) -> [f64; R] {
        self.filter.mul_vec(y)
    }

    pub fn noise_var(&self) -> [f64; R] {
        self.noise_var
    }
}

pub fn matched_filter<const M: usize, const R: usize>(
    h_cols: &Matrix<M, R>,
    y: &[f64; M],
) -> Result<EqualizedStream<R>> {
    let mf = MatchedFilter::new(h_cols)?;
    Ok(EqualizedStream {
        estimates: mf.equalize(y),
        noise_var: mf.noise_var,
    })
}

/// `y - h[:, cols]·known`.
pub fn cancel<const M: usize, const C: usize>(
    h: &Matrix<M, C>,
    y: &[f64; M],
    known: &[f64],
    cols: &[usize],
) -> Result<[f64; M]> {
    if known.len() != cols.len() {
        return Err(Error::DimensionMismatch {
            expected: cols.len(),
            actual: known.len(),
        });
    }
    let mut out = *y;
    for (&j, &s) in cols.iter().zip(known) {
        if j >= C {
            return Err(Error::IndexOutOfRange { index: j, len: C });
        }
        for (o, row) in out.iter_mut().zip(h.0.iter()) {
            *o -= row[j] * s;
        }
    }
    Ok(out)
}
