//! The fixed 4x4 orthogonal precoder and the effective channels it induces.
//!
//! Over two channel uses the precoded channel `diag(H, H)·G` has unit-norm
//! columns, and each column pair {0,1} and {2,3} is orthogonal for every
//! `(γ, θ)`. Only the cross-pair block depends on the PDL.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{extend, JonesMatrix};
use crate::linalg::{Mat4, Matrix};

const S: f64 = FRAC_1_SQRT_2;

/// Precoder matrix; input `u` is sent as `x = G·u` over two channel uses.
pub const PRECODER: Mat4 = Matrix([
    [S, 0.0, S, 0.0],
    [0.0, S, 0.0, S],
    [0.0, S, 0.0, -S],
    [-S, 0.0, S, 0.0],
]);

/// Streams carried by the first (cancelled first) column pair.
pub const FIRST_PAIR: [usize; 2] = [0, 1];
/// Streams carried by the second column pair.
pub const SECOND_PAIR: [usize; 2] = [2, 3];

pub fn precode(u: &[f64; 4]) -> [f64; 4] {
    PRECODER.mul_vec(u)
}

/// `diag(H, H)·G` for one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    matrix: Mat4,
    gamma: f64,
    theta: f64,
}

impl EffectiveChannel {
    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Builds the effective channel. `gamma`/`theta` are recorded for reference
/// only; the matrix is computed from `h`.
pub fn effective_channel(h: &JonesMatrix, gamma: f64, theta: f64) -> EffectiveChannel {
    EffectiveChannel {
        matrix: *extend(h).matrix() * PRECODER,
        gamma,
        theta,
    }
}

pub fn gram(h_eff: &EffectiveChannel) -> Mat4 {
    h_eff.matrix.gram()
}

/// The 2x2 cross-pair block `[gram]_{0..2, 2..4}`.
pub fn cross_block(gram: &Mat4) -> [[f64; 2]; 2] {
    [[gram.0[0][2], gram.0[0][3]], [gram.0[1][2], gram.0[1][3]]]
}
