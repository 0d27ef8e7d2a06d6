//! Two-code precoded ZF-SIC.
//!
//! A frame spans 100 extended uses. Precoder streams {0,1} carry four
//! codewords of the strong (100,90) code, 25 uses each; streams {2,3} carry
//! one codeword of the weak (400,388) code. The strong codewords are decoded
//! after full ZF, re-encoded and cancelled, and the weak codeword is then read
//! through the orthonormal residual pair.

use rand::Rng;

use super::zf_only::extended_use;
use super::{new_codeword, send, FrameResult, Link, Receiver, TxFrame};
use crate::channel::{ChannelParams, NoiseSource};
use crate::equalize::{cancel, MatchedFilter, ZfEqualizer};
use crate::modem::PamMapper;
use crate::precoding::{effective_channel, precode, FIRST_PAIR, SECOND_PAIR};

/// Strong codewords per frame; the weak codeword is four times as long.
pub const STRONG_PER_FRAME: usize = 4;

pub(super) fn transmit_ref<R: Rng>(mapper: &PamMapper, link: &Link, rng: &mut R) -> TxFrame {
    let (strong, weak) = (&link.codes.strong, &link.codes.weak);
    let mut frame = TxFrame { messages: vec![], symbols: vec![], slots: vec![] };
    for _ in 0..STRONG_PER_FRAME {
        new_codeword(strong, mapper, rng, &mut frame);
    }
    new_codeword(weak, mapper, rng, &mut frame);
    let per = strong.n() / 4; // extended uses per strong codeword
    let w = &frame.symbols[STRONG_PER_FRAME];
    let mut slots = Vec::with_capacity(w.len());
    for j in 0..w.len() / 2 {
        let s = &frame.symbols[j / per];
        let jj = j % per;
        let x = precode(&[s[2 * jj], s[2 * jj + 1], w[2 * j], w[2 * j + 1]]);
        slots.push([x[0], x[1]]);
        slots.push([x[2], x[3]]);
    }
    frame.slots = slots;
    frame
}

pub fn run_ref<R: Rng, N: NoiseSource>(
    params: &ChannelParams,
    link: &Link,
    data_rng: &mut R,
    noise: &mut N,
) -> FrameResult {
    let mapper = PamMapper::new(params.snr()).expect("validated snr");
    let tx = transmit_ref(&mapper, link, data_rng);
    let h = params.jones();
    let rx = send(&h, &tx.slots, noise);

    let (strong, weak) = (&link.codes.strong, &link.codes.weak);
    let heff = *effective_channel(&h, params.gamma(), params.theta()).matrix();
    let zf = ZfEqualizer::new(&heff).expect("full-rank channel for |gamma| < 1");
    let mf = MatchedFilter::new(&heff.select_columns(SECOND_PAIR).expect("4 columns"))
        .expect("unit-norm columns");
    let (zf_var, mf_var) = (zf.noise_var(), mf.noise_var());
    let per = strong.n() / 4;
    let uses = rx.len() / 2;

    let mut receiver = Receiver::new(mapper, link);
    let mut cancel_syms = Vec::with_capacity(2 * uses);
    let mut est = vec![0.0; 2 * per];
    let strong_vars: Vec<f64> = (0..2 * per).map(|i| zf_var[i % 2]).collect();
    for q in 0..STRONG_PER_FRAME {
        for jj in 0..per {
            let u = zf.equalize(&extended_use(&rx, q * per + jj));
            est[2 * jj..2 * jj + 2].copy_from_slice(&u[..2]);
        }
        let decided = receiver.decode(strong, &est, &strong_vars, &tx.messages[q]);
        cancel_syms.extend(receiver.cancel_symbols(decided, &tx.symbols[q]));
    }

    let mut weak_est = Vec::with_capacity(2 * uses);
    let mut weak_vars = Vec::with_capacity(2 * uses);
    for j in 0..uses {
        let y = extended_use(&rx, j);
        let r = cancel(&heff, &y, &cancel_syms[2 * j..2 * j + 2], &FIRST_PAIR).expect("columns exist");
        weak_est.extend_from_slice(&mf.equalize(&r));
        weak_vars.extend_from_slice(&mf_var);
    }
    receiver.decode(weak, &weak_est, &weak_vars, &tx.messages[STRONG_PER_FRAME]);
    receiver.finish()
}
