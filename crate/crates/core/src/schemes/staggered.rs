//! D-BLAST style staggered schemes: D (no precoding) and pD (precoded).
//!
//! Each codeword is split into a first half `f` and a second half `s`.
//! Block column `c` carries `s` of codeword `c-1` on top and `f` of codeword
//! `c` on the bottom, with the pilot block filling the two empty corners:
//!
//! ```text
//! top:    ψ    s_0  s_1  ...  s_{ζ-1}
//! bottom: f_0  f_1  f_2  ...  ψ
//! ```
//!
//! The receiver walks the columns left to right. Once the top of column `c`
//! is known it is cancelled and the bottom (first half of codeword `c`) is
//! seen through an interference-free matched filter. The second half comes
//! from ZF on column `c+1`. The decoded codeword is re-encoded so its second
//! half can be cancelled from column `c+1` in the next step.

use rand::Rng;

use super::zf_only::extended_use;
use super::{new_codeword, pilot_block, send, FrameResult, Link, Receiver, TxFrame};
use crate::channel::{ChannelParams, NoiseSource};
use crate::equalize::{cancel, MatchedFilter, ZfEqualizer};
use crate::modem::PamMapper;
use crate::precoding::{effective_channel, precode, FIRST_PAIR, SECOND_PAIR};

pub(super) fn transmit_d<R: Rng>(mapper: &PamMapper, link: &Link, rng: &mut R) -> TxFrame {
    let layout = link.layout();
    let half = layout.half_symbols();
    let zeta = layout.zeta;
    let psi = pilot_block(mapper, half);
    let mut frame = TxFrame { messages: vec![], symbols: vec![], slots: vec![] };
    for _ in 0..zeta {
        new_codeword(&link.codes.single, mapper, rng, &mut frame);
    }
    let mut slots = Vec::with_capacity(layout.time_slots());
    for c in 0..=zeta {
        let top = if c == 0 { &psi[..] } else { &frame.symbols[c - 1][half..] };
        let bottom = if c == zeta { &psi[..] } else { &frame.symbols[c][..half] };
        slots.extend(top.iter().zip(bottom).map(|(&t, &b)| [t, b]));
    }
    frame.slots = slots;
    frame
}

pub fn run_d<R: Rng, N: NoiseSource>(
    params: &ChannelParams,
    link: &Link,
    data_rng: &mut R,
    noise: &mut N,
) -> FrameResult {
    let mapper = PamMapper::new(params.snr()).expect("validated snr");
    let tx = transmit_d(&mapper, link, data_rng);
    let h = params.jones();
    let hm = *h.matrix();
    let rx = send(&h, &tx.slots, noise);

    let half = link.layout().half_symbols();
    let zf = ZfEqualizer::new(&hm).expect("full-rank channel for |gamma| < 1");
    let bottom = hm.select_columns([1]).expect("2 columns");
    let mf = MatchedFilter::new(&bottom).expect("nonzero column");
    let (mf_var, zf_var) = (mf.noise_var()[0], zf.noise_var()[0]);

    let mut receiver = Receiver::new(mapper, link);
    let mut known_top = pilot_block(&mapper, half);
    let mut est = vec![0.0; 2 * half];
    let mut vars = vec![0.0; 2 * half];
    vars[..half].fill(mf_var);
    vars[half..].fill(zf_var);
    for i in 0..link.zeta {
        let first = &rx[i * half..(i + 1) * half];
        let second = &rx[(i + 1) * half..(i + 2) * half];
        for t in 0..half {
            let r = cancel(&hm, &first[t], &known_top[t..t + 1], &[0]).expect("column 0 exists");
            est[t] = mf.equalize(&r)[0];
            est[half + t] = zf.equalize(&second[t])[0];
        }
        let decided = receiver.decode(&link.codes.single, &est, &vars, &tx.messages[i]);
        known_top = receiver.cancel_symbols(decided[half..].to_vec(), &tx.symbols[i][half..]);
    }
    receiver.finish()
}

/// Same staggering over the precoded extended channel. Halves are `2 x n/8`
/// blocks: extended use `j` of a half carries its symbols `2j` and `2j+1`.
pub(super) fn transmit_pd<R: Rng>(mapper: &PamMapper, link: &Link, rng: &mut R) -> TxFrame {
    let layout = link.layout();
    let half = layout.half_symbols();
    let uses = layout.pd_block_uses();
    let zeta = layout.zeta;
    let psi = pilot_block(mapper, half);
    let mut frame = TxFrame { messages: vec![], symbols: vec![], slots: vec![] };
    for _ in 0..zeta {
        new_codeword(&link.codes.single, mapper, rng, &mut frame);
    }
    let mut slots = Vec::with_capacity(layout.time_slots());
    for c in 0..=zeta {
        let top = if c == 0 { &psi[..] } else { &frame.symbols[c - 1][half..] };
        let bottom = if c == zeta { &psi[..] } else { &frame.symbols[c][..half] };
        for j in 0..uses {
            let x = precode(&[top[2 * j], top[2 * j + 1], bottom[2 * j], bottom[2 * j + 1]]);
            slots.push([x[0], x[1]]);
            slots.push([x[2], x[3]]);
        }
    }
    frame.slots = slots;
    frame
}

pub fn run_pd<R: Rng, N: NoiseSource>(
    params: &ChannelParams,
    link: &Link,
    data_rng: &mut R,
    noise: &mut N,
) -> FrameResult {
    let mapper = PamMapper::new(params.snr()).expect("validated snr");
    let tx = transmit_pd(&mapper, link, data_rng);
    let h = params.jones();
    let rx = send(&h, &tx.slots, noise);

    let layout = link.layout();
    let half = layout.half_symbols();
    let uses = layout.pd_block_uses();
    let heff = *effective_channel(&h, params.gamma(), params.theta()).matrix();
    let zf = ZfEqualizer::new(&heff).expect("full-rank channel for |gamma| < 1");
    let mf = MatchedFilter::new(&heff.select_columns(SECOND_PAIR).expect("4 columns"))
        .expect("unit-norm columns");
    let (mf_var, zf_var) = (mf.noise_var(), zf.noise_var());

    let mut receiver = Receiver::new(mapper, link);
    let mut known_top = pilot_block(&mapper, half);
    let mut est = vec![0.0; 2 * half];
    let mut vars = vec![0.0; 2 * half];
    for j in 0..uses {
        vars[2 * j..2 * j + 2].copy_from_slice(&mf_var);
        vars[half + 2 * j..half + 2 * j + 2].copy_from_slice(&zf_var[..2]);
    }
    for i in 0..link.zeta {
        for j in 0..uses {
            let y = extended_use(&rx, i * uses + j);
            let r = cancel(&heff, &y, &known_top[2 * j..2 * j + 2], &FIRST_PAIR).expect("columns exist");
            let f = mf.equalize(&r);
            let s = zf.equalize(&extended_use(&rx, (i + 1) * uses + j));
            est[2 * j..2 * j + 2].copy_from_slice(&f);
            est[half + 2 * j..half + 2 * j + 2].copy_from_slice(&s[..2]);
        }
        let decided = receiver.decode(&link.codes.single, &est, &vars, &tx.messages[i]);
        known_top = receiver.cancel_symbols(decided[half..].to_vec(), &tx.symbols[i][half..]);
    }
    receiver.finish()
}
