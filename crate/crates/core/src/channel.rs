//! Real-valued dual-polarization channel with polarization-dependent loss.
//!
//! A channel realization is `y = D_γ R_θ x + z`, where `D_γ` scales the two
//! polarizations by `√(1±γ)`, `R_θ` is a rotation and `z` is white Gaussian
//! noise of unit variance per real component. The transmit power budget is
//! carried entirely by the symbol scale (see [`crate::modem::PamMapper`]).

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat4, Matrix};

/// Worst-case PDL in dB for a channel class bounded by `alpha`.
pub fn alpha_to_pdl_db(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(10.0 * ((1.0 + alpha) / (1.0 - alpha)).log10())
}

/// Inverse of [`alpha_to_pdl_db`].
pub fn pdl_db_to_alpha(pdl_db: f64) -> Result<f64> {
    if !(pdl_db >= 0.0) || !pdl_db.is_finite() {
        return Err(Error::Domain(format!(
            "PDL must be finite and non-negative, got {pdl_db}"
        )));
    }
    let ratio = 10f64.powf(pdl_db / 10.0);
    Ok((ratio - 1.0) / (ratio + 1.0))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One member of the adversarial channel class together with its SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    alpha: f64,
    gamma: f64,
    theta: f64,
    snr: f64,
}

impl ChannelParams {
    /// `snr` is linear, per real dimension. `theta` is reduced mod 2π.
    pub fn new(alpha: f64, gamma: f64, theta: f64, snr: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        if !(gamma.abs() <= alpha) {
            return Err(Error::Domain(format!(
                "gamma {gamma} outside [-{alpha}, {alpha}]"
            )));
        }
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::Domain(format!("snr must be positive, got {snr}")));
        }
        if !theta.is_finite() {
            return Err(Error::Domain("theta must be finite".into()));
        }
        Ok(Self {
            alpha,
            gamma,
            theta: theta.rem_euclid(TAU),
            snr,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn jones(&self) -> JonesMatrix {
        // |gamma| <= alpha < 1 was checked at construction
        JonesMatrix::new(self.gamma, self.theta).expect("validated parameters")
    }
}

/// The 2x2 channel matrix `D_γ R_θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(pub Mat2);

impl JonesMatrix {
    pub fn new(gamma: f64, theta: f64) -> Result<Self> {
        if !(gamma.abs() < 1.0) {
            return Err(Error::Domain(format!("|gamma| must be < 1, got {gamma}")));
        }
        let (s, c) = theta.sin_cos();
        let a = (1.0 + gamma).sqrt();
        let b = (1.0 - gamma).sqrt();
        Ok(JonesMatrix(Mat2::from_rows([[a * c, -a * s], [b * s, b * c]])))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// Shorthand for [`JonesMatrix::new`].
pub fn channel_matrix(gamma: f64, theta: f64) -> Result<JonesMatrix> {
    JonesMatrix::new(gamma, theta)
}

/// Two channel uses stacked: `diag(h, h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedMatrix(pub Mat4);

impl ExtendedMatrix {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

pub fn extend(h: &JonesMatrix) -> ExtendedMatrix {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = h.0 .0[i][j];
            m.0[i + 2][j + 2] = h.0 .0[i][j];
        }
    }
    ExtendedMatrix(m)
}

/// Source of additive channel noise samples.
pub trait NoiseSource {
    fn sample(&mut self) -> f64;
}

/// Zero-mean, unit-variance white Gaussian noise.
#[derive(Debug, Clone)]
pub struct GaussianNoise<R> {
    rng: R,
}

impl<R: Rng> GaussianNoise<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: Rng> NoiseSource for GaussianNoise<R> {
    #[inline]
    fn sample(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Noiseless channel, used to check end-to-end consistency.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoNoise;

impl NoiseSource for NoNoise {
    #[inline]
    fn sample(&mut self) -> f64 {
        0.0
    }
}

/// `y = h·x + z`.
pub fn apply<const M: usize, const N: usize, S: NoiseSource + ?Sized>(
    h: &Matrix<M, N>,
    x: &[f64; N],
    noise: &mut S,
) -> [f64; M] {
    let mut y = h.mul_vec(x);
    for yi in &mut y {
        *yi += noise.sample();
    }
    y
}

/// Slice version of [`apply`] for callers that only know dimensions at runtime.
pub fn apply_slice<const M: usize, const N: usize, S: NoiseSource + ?Sized>(
    h: &Matrix<M, N>,
    x: &[f64],
    noise: &mut S,
) -> Result<[f64; M]> {
    let x: &[f64; N] = x.try_into().map_err(|_| Error::DimensionMismatch {
        expected: N,
        actual: x.len(),
    })?;
    Ok(apply(h, x, noise))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Bisection on the forward map, independent of the closed-form inverse.
    fn bisect_alpha(pdl: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha_to_pdl_db(mid).unwrap() < pdl {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pdl_of_reference_alphas() {
        assert!((alpha_to_pdl_db(0.599).unwrap() - 6.007).abs() < 5e-4);
        assert_eq!(alpha_to_pdl_db(0.0).unwrap(), 0.0);
        // 10·log10(2)
        assert!((alpha_to_pdl_db(1.0 / 3.0).unwrap() - 3.010_299_956_639_812).abs() < 1e-12);
    }

    #[test]
    fn alpha_domain_errors() {
        assert!(alpha_to_pdl_db(1.0).is_err());
        assert!(alpha_to_pdl_db(-0.1).is_err());
        assert!(pdl_db_to_alpha(-1.0).is_err());
        assert!(pdl_db_to_alpha(f64::NAN).is_err());
    }

    #[test]
    fn inverse_matches_bisection() {
        assert_eq!(pdl_db_to_alpha(0.0).unwrap(), 0.0);
        let a6 = pdl_db_to_alpha(6.0).unwrap();
        assert!((a6 - bisect_alpha(6.0)).abs() < 1e-12);
        assert!((a6 - 0.5985).abs() < 1e-4);
        let a3 = pdl_db_to_alpha(3.0103).unwrap();
        assert!((a3 - bisect_alpha(3.0103)).abs() < 1e-12);
        assert!((a3 - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn inverse_round_trip_on_grid() {
        for i in 0..1000 {
            let alpha = 0.99 * i as f64 / 999.0;
            let pdl = alpha_to_pdl_db(alpha).unwrap();
            let back = pdl_db_to_alpha(pdl).unwrap();
            assert!((back - alpha).abs() < 1e-10, "alpha {alpha}");
            assert!((alpha_to_pdl_db(back).unwrap() - pdl).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_matrix_special_cases() {
        let id = channel_matrix(0.0, 0.0).unwrap();
        assert_eq!(id.0, Mat2::identity());

        let g = 0.4;
        let d = channel_matrix(g, 0.0).unwrap();
        let expect = Mat2::from_rows([[(1.0 + g).sqrt(), 0.0], [0.0, (1.0 - g).sqrt()]]);
        assert!(d.0.max_abs_diff(&expect) < 1e-15);

        let r = channel_matrix(0.0, FRAC_PI_2).unwrap();
        assert!(r.0.max_abs_diff(&Mat2::from_rows([[0.0, -1.0], [1.0, 0.0]])) < 1e-15);

        assert!(channel_matrix(1.0, 0.0).is_err());
    }

    #[test]
    fn determinant_and_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g: f64 = rng.random_range(-0.999..0.999);
            let t: f64 = rng.random_range(0.0..TAU);
            let h = channel_matrix(g, t).unwrap();
            assert!((h.0.det() - (1.0 - g * g).sqrt()).abs() < 1e-12);
            assert!((h.0.frobenius_sq() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validate_and_wrap_theta() {
        let p = ChannelParams::new(0.5, -0.5, -PI / 2.0, 2.0).unwrap();
        assert!((p.theta() - 1.5 * PI).abs() < 1e-15);
        assert!(ChannelParams::new(0.5, 0.6, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn extend_is_block_diagonal() {
        assert_eq!(extend(&channel_matrix(0.0, 0.0).unwrap()).0, Mat4::identity());
        let h = JonesMatrix(Mat2::from_rows([[2.0, 0.0], [0.0, 3.0]]));
        let e = extend(&h).0;
        for (i, v) in [2.0, 3.0, 2.0, 3.0].into_iter().enumerate() {
            assert_eq!(e.0[i][i], v);
        }
        let h = channel_matrix(0.3, 1.1).unwrap();
        let e = extend(&h).0;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(e.0[i][j + 2], 0.0);
                assert_eq!(e.0[i + 2][j], 0.0);
            }
        }
    }

    #[test]
    fn apply_without_noise_is_linear_map() {
        let x = [1.5, -0.5];
        assert_eq!(apply(&Mat2::identity(), &x, &mut NoNoise), x);
        assert!(matches!(
            apply_slice::<2, 2, _>(&Mat2::identity(), &[1.0], &mut NoNoise),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn noise_has_unit_variance() {
        let h = channel_matrix(0.5, 0.7).unwrap().0;
        let x = [0.0, 0.0];
        let mut noise = GaussianNoise::new(ChaCha8Rng::seed_from_u64(11));
        let n = 1_000_000;
        let (mut s, mut s2) = ([0.0f64; 2], [0.0f64; 2]);
        for _ in 0..n {
            let y = apply(&h, &x, &mut noise);
            for k in 0..2 {
                s[k] += y[k];
                s2[k] += y[k] * y[k];
            }
        }
        for k in 0..2 {
            let mean = s[k] / n as f64;
            let var = s2[k] / n as f64 - mean * mean;
            assert!((var - 1.0).abs() < 0.01, "component {k}: {var}");
            assert!(mean.abs() < 0.005);
        }
    }
}
