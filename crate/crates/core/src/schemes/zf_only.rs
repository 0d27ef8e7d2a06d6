//! Schemes that decode each codeword after linear ZF only: iZ and pZ.

use rand::Rng;

use super::{new_codeword, send, FrameResult, Link, Receiver, TxFrame};
use crate::channel::{ChannelParams, NoiseSource};
use crate::equalize::ZfEqualizer;
use crate::modem::PamMapper;
use crate::precoding::{effective_channel, precode};

/// Polarization carrying symbol `t` of codeword `cw` in iZ. Codeword 0 rides
/// polarization 0 on even slots and polarization 1 on odd slots.
fn iz_polarization(cw: usize, t: usize) -> usize {
    (cw + t) % 2
}

pub(super) fn transmit_iz<R: Rng>(mapper: &PamMapper, link: &Link, rng: &mut R) -> TxFrame {
    let code = &link.codes.single;
    let mut frame = TxFrame { messages: vec![], symbols: vec![], slots: vec![] };
    new_codeword(code, mapper, rng, &mut frame);
    new_codeword(code, mapper, rng, &mut frame);
    let (a, b) = (&frame.symbols[0], &frame.symbols[1]);
    frame.slots = (0..a.len())
        .map(|t| {
            let mut x = [0.0; 2];
            x[iz_polarization(0, t)] = a[t];
            x[iz_polarization(1, t)] = b[t];
            x
        })
        .collect();
    frame
}

pub fn run_iz<R: Rng, N: NoiseSource>(
    params: &ChannelParams,
    link: &Link,
    data_rng: &mut R,
    noise: &mut N,
) -> FrameResult {
    let mapper = PamMapper::new(params.snr()).expect("validated snr");
    let tx = transmit_iz(&mapper, link, data_rng);
    let h = params.jones();
    let rx = send(&h, &tx.slots, noise);

    let zf = ZfEqualizer::new(h.matrix()).expect("full-rank channel for |gamma| < 1");
    let var = zf.noise_var();
    let equalized: Vec<[f64; 2]> = rx.iter().map(|y| zf.equalize(y)).collect();

    let mut receiver = Receiver::new(mapper, link);
    for cw in 0..2 {
        let pols: Vec<usize> = (0..equalized.len()).map(|t| iz_polarization(cw, t)).collect();
        let est: Vec<f64> = pols.iter().zip(&equalized).map(|(&p, e)| e[p]).collect();
        let vars: Vec<f64> = pols.iter().map(|&p| var[p]).collect();
        receiver.decode(&link.codes.single, &est, &vars, &tx.messages[cw]);
    }
    receiver.finish()
}

/// Codeword 0 on precoder streams {0,1}, codeword 1 on {2,3}; each extended
/// use spans two consecutive time slots.
pub(super) fn transmit_pz<R: Rng>(mapper: &PamMapper, link: &Link, rng: &mut R) -> TxFrame {
    let code = &link.codes.single;
    let mut frame = TxFrame { messages: vec![], symbols: vec![], slots: vec![] };
    new_codeword(code, mapper, rng, &mut frame);
    new_codeword(code, mapper, rng, &mut frame);
    let (a, b) = (&frame.symbols[0], &frame.symbols[1]);
    let mut slots = Vec::with_capacity(a.len());
    for j in 0..a.len() / 2 {
        let x = precode(&[a[2 * j], a[2 * j + 1], b[2 * j], b[2 * j + 1]]);
        slots.push([x[0], x[1]]);
        slots.push([x[2], x[3]]);
    }
    frame.slots = slots;
    frame
}

/// Stacks slots `2j` and `2j+1` into one extended-channel observation.
pub(super) fn extended_use(rx: &[[f64; 2]], j: usize) -> [f64; 4] {
    [rx[2 * j][0], rx[2 * j][1], rx[2 * j + 1][0], rx[2 * j + 1][1]]
}

pub fn run_pz<R: Rng, N: NoiseSource>(
    params: &ChannelParams,
    link: &Link,
    data_rng: &mut R,
    noise: &mut N,
) -> FrameResult {
    let mapper = PamMapper::new(params.snr()).expect("validated snr");
    let tx = transmit_pz(&mapper, link, data_rng);
    let h = params.jones();
    let rx = send(&h, &tx.slots, noise);

    let heff = effective_channel(&h, params.gamma(), params.theta());
    let zf = ZfEqualizer::new(heff.matrix()).expect("full-rank channel for |gamma| < 1");
    let var = zf.noise_var();
    let uses = rx.len() / 2;

    let mut receiver = Receiver::new(mapper, link);
    let mut est = [Vec::with_capacity(2 * uses), Vec::with_capacity(2 * uses)];
    let mut vars = [Vec::with_capacity(2 * uses), Vec::with_capacity(2 * uses)];
    for j in 0..uses {
        let u = zf.equalize(&extended_use(&rx, j));
        for cw in 0..2 {
            est[cw].extend_from_slice(&u[2 * cw..2 * cw + 2]);
            vars[cw].extend_from_slice(&var[2 * cw..2 * cw + 2]);
        }
    }
    for cw in 0..2 {
        receiver.decode(&link.codes.single, &est[cw], &vars[cw], &tx.messages[cw]);
    }
    receiver.finish()
}
