//! Shortened extended Hamming codes with SEC-DED hard decoding and Chase-II
//! soft decoding.
//!
//! Every code position is identified by its parity-check column. Hamming
//! positions of the parent `(2^m, 2^m - m - 1)` code carry an `m`-bit label
//! `v != 0`; the overall parity position carries `v = 0`. A column is stored
//! as `(v << 1) | 1`, so the low bit of a syndrome is the overall parity.
//!
//! Codewords are systematic: `k` information bits, then the `m` Hamming
//! parity bits (labels `1 << i`), then the overall parity bit.

use crate::error::{Error, Result};

const NO_POSITION: u32 = u32::MAX;

/// Largest supported parent exponent.
pub const MAX_PARENT_M: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Clean,
    Corrected,
    Detected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    n: usize,
    k: usize,
    m: usize,
    /// Parity-check column of each position.
    columns: Vec<u32>,
    /// Syndrome -> position for the single-error syndromes of this code.
    position_of: Vec<u32>,
}

/// Builds the systematic `(n, k)` shortening of the extended Hamming code
/// with parent exponent `m = n - k - 1`.
pub fn build_code(n: usize, k: usize) -> Result<BlockCode> {
    BlockCode::new(n, k)
}

impl BlockCode {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let infeasible = Error::InfeasibleCode { n, k };
        if k == 0 || n < k + 3 {
            return Err(infeasible);
        }
        let m = n - k - 1;
        if m > MAX_PARENT_M || (1usize << m) - m - 1 < k {
            return Err(infeasible);
        }
        // Parent information labels in ascending order; the leading surplus
        // is shortened away.
        let parent_info = (1u32..1 << m).filter(|v| !v.is_power_of_two());
        let surplus = (1usize << m) - m - 1 - k;
        let mut labels: Vec<u32> = parent_info.skip(surplus).collect();
        debug_assert_eq!(labels.len(), k);
        labels.extend((0..m).map(|i| 1u32 << i));
        labels.push(0);

        let columns: Vec<u32> = labels.iter().map(|v| (v << 1) | 1).collect();
        let mut position_of = vec![NO_POSITION; 1 << (m + 1)];
        for (pos, &c) in columns.iter().enumerate() {
            position_of[c as usize] = pos as u32;
        }
        Ok(Self {
            n,
            k,
            m,
            columns,
            position_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Exponent of the extended Hamming parent code.
    pub fn parent_m(&self) -> usize {
        self.m
    }

    /// Number of parent information positions removed by shortening.
    pub fn shortened_by(&self) -> usize {
        (1usize << self.m) - self.m - 1 - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        let mut word = vec![0u8; self.n];
        self.encode_into(message, &mut word)?;
        Ok(word)
    }

    /// Encodes into a caller-provided buffer of length `n`.
    pub fn encode_into(&self, message: &[u8], word: &mut [u8]) -> Result<()> {
        if message.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: message.len(),
            });
        }
        if word.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: word.len(),
            });
        }
        let mut acc = 0u32;
        let mut weight = 0u32;
        for (i, &b) in message.iter().enumerate() {
            word[i] = b & 1;
            if b & 1 == 1 {
                acc ^= self.columns[i] >> 1;
                weight += 1;
            }
        }
        for i in 0..self.m {
            let bit = ((acc >> i) & 1) as u8;
            word[self.k + i] = bit;
            weight += bit as u32;
        }
        word[self.n - 1] = (weight & 1) as u8;
        Ok(())
    }

    /// Syndrome of an `n`-bit word; zero iff the word is a codeword.
    pub fn syndrome(&self, word: &[u8]) -> u32 {
        word.iter()
            .zip(&self.columns)
            .filter(|(b, _)| **b & 1 == 1)
            .fold(0, |s, (_, c)| s ^ c)
    }

    /// Position whose single flip explains `syndrome`, if any.
    fn locate(&self, syndrome: u32) -> Option<usize> {
        if syndrome & 1 == 0 {
            return None;
        }
        match self.position_of[syndrome as usize] {
            NO_POSITION => None,
            p => Some(p as usize),
        }
    }

    /// SEC-DED decoding. Detected errors return the word unchanged.
    pub fn hard_decode(&self, word: &[u8]) -> Result<(Vec<u8>, DecodeStatus)> {
        if word.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: word.len(),
            });
        }
        let mut out = word.to_vec();
        let s = self.syndrome(word);
        if s == 0 {
            return Ok((out, DecodeStatus::Clean));
        }
        match self.locate(s) {
            Some(p) => {
                out[p] ^= 1;
                Ok((out, DecodeStatus::Corrected))
            }
            None => Ok((out, DecodeStatus::Detected)),
        }
    }

    /// Systematic parity-check matrix, `(m + 1) x n`. The last row is the
    /// overall parity check.
    pub fn parity_check_matrix(&self) -> Vec<Vec<u8>> {
        (0..=self.m)
            .map(|r| {
                self.columns
                    .iter()
                    .map(|c| if r == self.m { (c & 1) as u8 } else { ((c >> (r + 1)) & 1) as u8 })
                    .collect()
            })
            .collect()
    }

    /// Systematic generator matrix, `k x n`.
    pub fn generator_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.k)
            .map(|i| {
                let mut msg = vec![0u8; self.k];
                msg[i] = 1;
                self.encode(&msg).expect("message length is k")
            })
            .collect()
    }

    /// Chase-II decoding with `p` test positions. See [`chase_decode_detailed`].
    pub fn chase_decode(&self, llrs: &LlrWord, p: usize) -> Result<Vec<u8>> {
        Ok(self.chase_decode_detailed(llrs, p)?.word)
    }

    /// Chase-II decoding.
    ///
    /// The `p` least reliable positions of the hard decision are perturbed in
    /// all `2^p` ways, each test pattern is SEC-DED decoded, and the candidate
    /// with the smallest discrepancy `Σ_{c_i != hard_i} |llr_i|` wins. Ties go
    /// to the lowest pattern index. Patterns that only detect an error are
    /// dropped; if nothing survives the hard decision is returned.
    pub fn chase_decode_detailed(&self, llrs: &LlrWord, p: usize) -> Result<ChaseOutcome> {
        let llr = llrs.values();
        if llr.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: llr.len(),
            });
        }
        let p = p.min(self.n).min(24);
        let mut word: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
        let s0 = self.syndrome(&word);

        let weakest = least_reliable(llr, p);
        let mut best: Option<(f64, u32, Option<usize>)> = None;
        for mask in 0u32..(1u32 << p) {
            let mut s = s0;
            let mut metric = 0.0;
            for (j, &pos) in weakest.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s ^= self.columns[pos];
                    metric += llr[pos].abs();
                }
            }
            let fix = if s == 0 {
                None
            } else {
                match self.locate(s) {
                    Some(pos) => Some(pos),
                    None => continue,
                }
            };
            if let Some(pos) = fix {
                let already_flipped = weakest
                    .iter()
                    .position(|&w| w == pos)
                    .is_some_and(|j| mask >> j & 1 == 1);
                if already_flipped {
                    metric -= llr[pos].abs();
                } else {
                    metric += llr[pos].abs();
                }
            }
            if best.is_none_or(|(m, _, _)| metric < m) {
                best = Some((metric, mask, fix));
            }
        }

        match best {
            Some((metric, mask, fix)) => {
                for (j, &pos) in weakest.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        word[pos] ^= 1;
                    }
                }
                if let Some(pos) = fix {
                    word[pos] ^= 1;
                }
                Ok(ChaseOutcome {
                    word,
                    discrepancy: metric,
                    valid: true,
                })
            }
            None => Ok(ChaseOutcome {
                word,
                discrepancy: 0.0,
                valid: false,
            }),
        }
    }
}

/// Chase decoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaseOutcome {
    pub word: Vec<u8>,
    /// Soft discrepancy of `word` against the hard decision.
    pub discrepancy: f64,
    /// False when every test pattern failed and `word` is the raw hard decision.
    pub valid: bool,
}

/// Indices of the `p` smallest `|llr|`, lower index first on ties.
fn least_reliable(llr: &[f64], p: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = Vec::with_capacity(p + 1);
    for i in 0..llr.len() {
        let a = llr[i].abs();
        if idx.len() == p && (p == 0 || llr[idx[p - 1]].abs() <= a) {
            continue;
        }
        let at = idx.partition_point(|&j| llr[j].abs() <= a);
        idx.insert(at, i);
        idx.truncate(p);
    }
    idx
}

/// Per-bit log-likelihood ratios, `ln P(b=0)/P(b=1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrWord(Vec<f64>);

impl LlrWord {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite LLR {bad}")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn hard_decision(&self) -> Vec<u8> {
        self.0.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}

/// The three codes used by the schemes.
#[derive(Debug, Clone)]
pub struct CodeSet {
    /// Single code shared by iZ, pZ, D and pD.
    pub single: BlockCode,
    /// Lower-rate code of the two-code scheme.
    pub strong: BlockCode,
    /// Higher-rate code of the two-code scheme.
    pub weak: BlockCode,
}

impl CodeSet {
    pub fn standard() -> Self {
        Self {
            single: BlockCode::new(200, 187).expect("valid code"),
            strong: BlockCode::new(100, 90).expect("valid code"),
            weak: BlockCode::new(400, 388).expect("valid code"),
        }
    }
}
