//! Monte Carlo simulator for polarization-dependent loss (PDL) mitigation
//! on a real-valued dual-polarization channel.
//!
//! Five schemes are compared by their worst-case BER over the channel class
//! `y = diag(√(1+γ), √(1-γ))·R_θ·x + z`, `|γ| ≤ α`:
//!
//! * iZ: one code, codewords interleaved over polarization and time, ZF.
//! * pZ: one code, 4x4 orthogonal precoding over two channel uses, ZF.
//! * D: one code, D-BLAST style staggering with ZF-SIC.
//! * pD: precoding plus staggering with ZF-SIC.
//! * ref: two codes of different rates with precoding and ZF-SIC.
//!
//! Transmission uses BICM with shortened extended Hamming codes, Gray 4-PAM
//! and Chase-II decoding.

pub mod channel;
pub mod cli;
pub mod equalize;
pub mod error;
pub mod fec;
pub mod linalg;
pub mod modem;
pub mod par;
pub mod precoding;
pub mod schemes;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
