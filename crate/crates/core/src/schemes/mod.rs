//! End-to-end transmit/receive pipelines for the five schemes.
//!
//! Every scheme transmits a frame as a sequence of 2-vectors, one per time
//! slot, through the physical channel `y_t = H x_t + z_t`. Precoded schemes
//! pair consecutive slots into one use of the extended channel.
//!
//! | scheme | code(s)            | receiver                                   |
//! |--------|--------------------|--------------------------------------------|
//! | iZ     | (200,187)          | per-slot ZF, codewords alternate polarization |
//! | pZ     | (200,187)          | precoded, 4x4 ZF                           |
//! | D      | (200,187)          | staggered halves, MF after SIC + ZF        |
//! | pD     | (200,187)          | precoded staggered halves                  |
//! | ref    | (100,90), (400,388)| precoded, ZF strong code then SIC weak code|

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, JonesMatrix, NoiseSource};
use crate::error::{Error, Result};
use crate::fec::{BlockCode, CodeSet, LlrWord};
use crate::modem::PamMapper;

mod staggered;
mod two_code;
mod zf_only;

pub use staggered::{run_d, run_pd};
pub use two_code::run_ref;
pub use zf_only::{run_iz, run_pz};

/// The five transmission schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchemeId {
    #[serde(rename = "iz")]
    IZ,
    #[serde(rename = "pz")]
    PZ,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "pd")]
    PD,
    /// Two codes with precoding and ZF-SIC.
    #[serde(rename = "ref")]
    RefSic,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [SchemeId::IZ, SchemeId::PZ, SchemeId::D, SchemeId::PD, SchemeId::RefSic];

    /// Short lowercase token used on the command line and in CSV output.
    pub fn token(self) -> &'static str {
        match self {
            SchemeId::IZ => "iz",
            SchemeId::PZ => "pz",
            SchemeId::D => "d",
            SchemeId::PD => "pd",
            SchemeId::RefSic => "ref",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeId::IZ => "iZ",
            SchemeId::PZ => "pZ",
            SchemeId::D => "D",
            SchemeId::PD => "pD",
            SchemeId::RefSic => "ref",
        }
    }

    /// Stable small integer for seed derivation.
    pub fn index(self) -> u64 {
        self as u64
    }

    /// Information bits carried by one frame.
    pub fn info_bits_per_frame(self, link: &Link) -> u64 {
        let c = &link.codes;
        match self {
            SchemeId::IZ | SchemeId::PZ => 2 * c.single.k() as u64,
            SchemeId::D | SchemeId::PD => (link.zeta * c.single.k()) as u64,
            SchemeId::RefSic => (two_code::STRONG_PER_FRAME * c.strong.k() + c.weak.k()) as u64,
        }
    }

    /// Information bits per real channel dimension, over the full frame.
    pub fn rate(self, link: &Link) -> f64 {
        let c = &link.codes;
        let coded = match self {
            SchemeId::IZ | SchemeId::PZ => 2 * c.single.n(),
            SchemeId::D | SchemeId::PD => (link.zeta + 1) * c.single.n(),
            SchemeId::RefSic => two_code::STRONG_PER_FRAME * c.strong.n() + c.weak.n(),
        };
        self.info_bits_per_frame(link) as f64 / coded as f64
    }

    pub fn run_frame<R: Rng, N: NoiseSource>(
        self,
        params: &ChannelParams,
        link: &Link,
        data_rng: &mut R,
        noise: &mut N,
    ) -> FrameResult {
        match self {
            SchemeId::IZ => run_iz(params, link, data_rng, noise),
            SchemeId::PZ => run_pz(params, link, data_rng, noise),
            SchemeId::D => run_d(params, link, data_rng, noise),
            SchemeId::PD => run_pd(params, link, data_rng, noise),
            SchemeId::RefSic => run_ref(params, link, data_rng, noise),
        }
    }

    /// Builds the transmitted frame without sending it.
    pub fn transmit<R: Rng>(self, params: &ChannelParams, link: &Link, data_rng: &mut R) -> TxFrame {
        let mapper = PamMapper::new(params.snr()).expect("validated snr");
        match self {
            SchemeId::IZ => zf_only::transmit_iz(&mapper, link, data_rng),
            SchemeId::PZ => zf_only::transmit_pz(&mapper, link, data_rng),
            SchemeId::D => staggered::transmit_d(&mapper, link, data_rng),
            SchemeId::PD => staggered::transmit_pd(&mapper, link, data_rng),
            SchemeId::RefSic => two_code::transmit_ref(&mapper, link, data_rng),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iz" => Ok(SchemeId::IZ),
            "pz" => Ok(SchemeId::PZ),
            "d" => Ok(SchemeId::D),
            "pd" => Ok(SchemeId::PD),
            "ref" | "refsic" => Ok(SchemeId::RefSic),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Codes and receiver settings shared by all frames of a run.
#[derive(Debug, Clone)]
pub struct Link {
    pub codes: CodeSet,
    /// Codewords per staggered frame.
    pub zeta: usize,
    /// Chase test positions.
    pub chase_p: usize,
    /// Cancel the transmitted symbols instead of decoded estimates.
    pub genie_sic: bool,
    /// Record per-symbol noise variances in the frame result.
    pub trace: bool,
}

impl Link {
    pub fn new(zeta: usize, chase_p: usize) -> Result<Self> {
        if zeta == 0 {
            return Err(Error::Config("zeta must be at least 1".into()));
        }
        Ok(Self {
            codes: CodeSet::standard(),
            zeta,
            chase_p,
            genie_sic: false,
            trace: false,
        })
    }

    pub fn with_genie_sic(mut self, on: bool) -> Self {
        self.genie_sic = on;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn layout(&self) -> FrameLayout {
        FrameLayout {
            zeta: self.zeta,
            n: self.codes.single.n(),
        }
    }
}

/// Shape of a staggered (D / pD) frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub zeta: usize,
    /// Length of the single code.
    pub n: usize,
}

impl FrameLayout {
    /// Symbols in one codeword half, `n/4`.
    pub fn half_symbols(&self) -> usize {
        self.n / 4
    }

    /// Time slots per block column of D, `n/4`.
    pub fn d_block_slots(&self) -> usize {
        self.n / 4
    }

    /// Extended uses per block column of pD, `n/8`.
    pub fn pd_block_uses(&self) -> usize {
        self.n / 8
    }

    /// Time slots spanned by a D or pD frame, `(ζ+1)·n/4`.
    pub fn time_slots(&self) -> usize {
        (self.zeta + 1) * self.n / 4
    }
}

/// Known symbol block that opens and closes the staggered frames. Levels
/// cycle `-3, +1, +3, -1` (in units of δ), so every even-length prefix has
/// mean energy exactly `5δ²`.
pub fn pilot_block(mapper: &PamMapper, len: usize) -> Vec<f64> {
    const CYCLE: [f64; 4] = [-3.0, 1.0, 3.0, -1.0];
    (0..len).map(|i| CYCLE[i % 4] * mapper.delta()).collect()
}

/// A built frame: per-codeword messages and symbols plus the slot sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    pub messages: Vec<Vec<u8>>,
    pub symbols: Vec<Vec<f64>>,
    /// Channel input per time slot.
    pub slots: Vec<[f64; 2]>,
}

/// Per-symbol noise variances a codeword saw at its decoder input.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordTrace {
    pub symbol_noise_var: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameResult {
    pub info_bit_errors: u64,
    pub info_bits: u64,
    pub codeword_errors: Vec<bool>,
    /// Cancelled symbols that differed from what was sent.
    pub cancelled_symbol_errors: u64,
    pub trace: Option<Vec<CodewordTrace>>,
}

impl FrameResult {
    pub fn ber(&self) -> f64 {
        if self.info_bits == 0 {
            0.0
        } else {
            self.info_bit_errors as f64 / self.info_bits as f64
        }
    }
}

pub(crate) fn random_bits<R: Rng>(rng: &mut R, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let w: u64 = rng.random();
        let take = (len - out.len()).min(64);
        out.extend((0..take).map(|i| ((w >> i) & 1) as u8));
    }
    out
}

/// Draws a message, encodes and maps it.
pub(crate) fn new_codeword<R: Rng>(
    code: &BlockCode,
    mapper: &PamMapper,
    rng: &mut R,
    frame: &mut TxFrame,
) {
    let msg = random_bits(rng, code.k());
    let cw = code.encode(&msg).expect("message length is k");
    let mut sym = Vec::with_capacity(code.n() / 2);
    mapper.map_word(&cw, &mut sym);
    frame.messages.push(msg);
    frame.symbols.push(sym);
}

pub(crate) fn send<N: NoiseSource>(h: &JonesMatrix, slots: &[[f64; 2]], noise: &mut N) -> Vec<[f64; 2]> {
    slots
        .iter()
        .map(|x| crate::channel::apply(h.matrix(), x, noise))
        .collect()
}

/// Collects decoder outcomes for one frame.
pub(crate) struct Receiver<'a> {
    mapper: PamMapper,
    link: &'a Link,
    result: FrameResult,
    llrs: Vec<f64>,
}

impl<'a> Receiver<'a> {
    pub(crate) fn new(mapper: PamMapper, link: &'a Link) -> Self {
        Self {
            mapper,
            link,
            result: FrameResult {
                trace: link.trace.then(Vec::new),
                ..FrameResult::default()
            },
            llrs: Vec::new(),
        }
    }

    /// Demaps equalized symbols (each with its own noise variance), decodes,
    /// scores the information bits against `message` and returns the
    /// remapped symbols of the decoder's n-bit decision.
    pub(crate) fn decode(&mut self, code: &BlockCode, estimates: &[f64], noise_var: &[f64], message: &[u8]) -> Vec<f64> {
        debug_assert_eq!(estimates.len(), noise_var.len());
        self.llrs.clear();
        for (&y, &v) in estimates.iter().zip(noise_var) {
            let (l1, l0) = self.mapper.demap_unchecked(y, 1.0, v);
            self.llrs.push(l1);
            self.llrs.push(l0);
        }
        debug_assert_eq!(self.llrs.len(), code.n());
        if let Some(trace) = self.result.trace.as_mut() {
            trace.push(CodewordTrace {
                symbol_noise_var: noise_var.to_vec(),
            });
        }
        let llr = LlrWord::new(std::mem::take(&mut self.llrs)).expect("finite LLRs");
        let decided = code.chase_decode(&llr, self.link.chase_p).expect("length n");
        self.llrs = llr.into_inner();

        let k = code.k();
        let errors = decided[..k]
            .iter()
            .zip(message)
            .filter(|(a, b)| a != b)
            .count() as u64;
        self.result.info_bit_errors += errors;
        self.result.info_bits += k as u64;
        self.result.codeword_errors.push(errors > 0);

        // A valid decision is already its own re-encoding; the hard-decision
        // fallback is remapped as is rather than re-encoded from its info bits,
        // which would turn each info error into ~m/2 parity errors.
        let mut sym = Vec::with_capacity(code.n() / 2);
        self.mapper.map_word(&decided, &mut sym);
        sym
    }

    /// Picks what to cancel: the estimate, or the truth under genie SIC.
    pub(crate) fn cancel_symbols(&mut self, estimate: Vec<f64>, truth: &[f64]) -> Vec<f64> {
        if self.link.genie_sic {
            return truth.to_vec();
        }
        self.result.cancelled_symbol_errors +=
            estimate.iter().zip(truth).filter(|(a, b)| a != b).count() as u64;
        estimate
    }

    pub(crate) fn finish(self) -> FrameResult {
        self.result
    }
}
