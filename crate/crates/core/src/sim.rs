//! Monte Carlo engine: per-point BER estimation and worst-case sweeps over
//! the `(γ, θ)` grid.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, ChannelParams, GaussianNoise, NoNoise};
use crate::error::{Error, Result};
use crate::par::{map_collect, Execution};
use crate::schemes::{Link, SchemeId};
use crate::seed::StreamKey;

/// When to stop simulating one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_frames: u64,
    /// Optional cap on simulated information bits, checked after each frame.
    pub max_info_bits: Option<u64>,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 100,
            max_frames: 100_000,
            max_info_bits: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    #[default]
    Gaussian,
    /// Noiseless channel; every frame must decode perfectly.
    Off,
}

/// One `(scheme, α, γ, θ, SNR)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub scheme: SchemeId,
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub spec: PointSpec,
    pub errors: u64,
    pub bits: u64,
    pub frames: u64,
}

impl PointResult {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

/// Runs frames at one point until the stop rule fires. Frame `i` draws from
/// a generator keyed on `(seed, point, i)`, so the result is a pure function
/// of its arguments.
pub fn run_point(spec: &PointSpec, link: &Link, stop: &StopRule, noise: NoiseMode, seed: u64) -> Result<PointResult> {
    let params = ChannelParams::new(spec.alpha, spec.gamma, spec.theta, db_to_linear(spec.snr_db))?;
    let key = StreamKey {
        base_seed: seed,
        scheme: spec.scheme,
        alpha: spec.alpha,
        gamma: spec.gamma,
        theta: spec.theta,
        snr_db: spec.snr_db,
    };
    let mut out = PointResult {
        spec: *spec,
        errors: 0,
        bits: 0,
        frames: 0,
    };
    while out.frames < stop.max_frames {
        let (mut data, noise_rng) = key.frame_rngs(out.frames);
        let frame = match noise {
            NoiseMode::Gaussian => spec.scheme.run_frame(&params, link, &mut data, &mut GaussianNoise::new(noise_rng)),
            NoiseMode::Off => spec.scheme.run_frame(&params, link, &mut data, &mut NoNoise),
        };
        out.errors += frame.info_bit_errors;
        out.bits += frame.info_bits;
        out.frames += 1;
        if out.errors >= stop.min_bit_errors || stop.max_info_bits.is_some_and(|cap| out.bits >= cap) {
            break;
        }
    }
    Ok(out)
}

/// SNR range in dB, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let bad = || Error::Config(format!("malformed SNR range {}:{}:{}", self.start, self.stop, self.step));
        if ![self.start, self.stop, self.step].iter().all(|v| v.is_finite()) || self.stop < self.start {
            return Err(bad());
        }
        if self.start == self.stop {
            return Ok(vec![self.start]);
        }
        if !(self.step > 0.0) {
            return Err(bad());
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // round away accumulated binary noise so 10 + 3·0.1 prints as 10.3
        Ok((0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect())
    }
}

/// Uniform γ grid over `[-α, α]` including both ends; `{0}` when `α = 0`.
pub fn gamma_grid(alpha: f64, points: usize) -> Vec<f64> {
    if alpha == 0.0 {
        return vec![0.0];
    }
    match points {
        0 => vec![],
        1 => vec![alpha],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    alpha
                } else {
                    -alpha + 2.0 * alpha * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Uniform θ grid over `[0, 2π)`.
pub fn theta_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| TAU * i as f64 / points as f64).collect()
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schemes: Vec<SchemeId>,
    pub alphas: Vec<f64>,
    pub snr_db: SnrGrid,
    pub gamma_points: usize,
    pub theta_points: usize,
    pub min_bit_errors: u64,
    pub max_frames: u64,
    pub max_info_bits: Option<u64>,
    pub zeta: usize,
    pub chase_p: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    pub const DEFAULT_GAMMA_POINTS: usize = 7;
    pub const DEFAULT_THETA_POINTS: usize = 16;
    pub const DEFAULT_ZETA: usize = 100;
    pub const DEFAULT_CHASE_P: usize = 4;

    /// A config with the default grids and stopping rule.
    pub fn new(schemes: Vec<SchemeId>, alphas: Vec<f64>, snr_db: SnrGrid) -> Self {
        let stop = StopRule::default();
        Self {
            schemes,
            alphas,
            snr_db,
            gamma_points: Self::DEFAULT_GAMMA_POINTS,
            theta_points: Self::DEFAULT_THETA_POINTS,
            min_bit_errors: stop.min_bit_errors,
            max_frames: stop.max_frames,
            max_info_bits: stop.max_info_bits,
            zeta: Self::DEFAULT_ZETA,
            chase_p: Self::DEFAULT_CHASE_P,
            base_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.schemes.is_empty() {
            return fail("no schemes selected");
        }
        if self.alphas.is_empty() {
            return fail("no alpha values");
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::Config(format!("alpha {a} outside [0, 1)")));
        }
        if self.gamma_points == 0 || self.theta_points == 0 {
            return fail("gamma and theta grids must be nonempty");
        }
        if self.min_bit_errors == 0 || self.max_frames == 0 {
            return fail("min_bit_errors and max_frames must be at least 1");
        }
        if self.zeta == 0 {
            return fail("zeta must be at least 1");
        }
        if self.chase_p > 16 {
            return fail("chase_p above 16 is not supported");
        }
        self.snr_db.points()?;
        Ok(())
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            min_bit_errors: self.min_bit_errors,
            max_frames: self.max_frames,
            max_info_bits: self.max_info_bits,
        }
    }

    pub fn link(&self) -> Result<Link> {
        Link::new(self.zeta, self.chase_p)
    }

    /// All grid points in `(scheme, α, SNR, γ, θ)` order.
    pub fn points(&self) -> Result<Vec<PointSpec>> {
        self.validate()?;
        let snrs = self.snr_db.points()?;
        let thetas = theta_grid(self.theta_points);
        let mut out = Vec::new();
        for &scheme in &self.schemes {
            for &alpha in &self.alphas {
                for &snr_db in &snrs {
                    for gamma in gamma_grid(alpha, self.gamma_points) {
                        for &theta in &thetas {
                            out.push(PointSpec {
                                scheme,
                                alpha,
                                gamma,
                                theta,
                                snr_db,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Worst-case BER over the `(γ, θ)` grid for one `(scheme, α, SNR)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRecord {
    pub scheme: SchemeId,
    pub alpha: f64,
    pub snr_db: f64,
    pub worst_ber: f64,
    pub argmax_gamma: f64,
    pub argmax_theta: f64,
    /// Bits simulated at the argmax point.
    pub total_bits: u64,
    /// Errors counted at the argmax point.
    pub total_errors: u64,
}

/// Runs every grid point of the sweep.
pub fn sweep_points(config: &SweepConfig, exec: Execution) -> Result<Vec<PointResult>> {
    sweep_points_with(config, exec, NoiseMode::Gaussian)
}

pub fn sweep_points_with(config: &SweepConfig, exec: Execution, noise: NoiseMode) -> Result<Vec<PointResult>> {
    let points = config.points()?;
    let link = config.link()?;
    let stop = config.stop_rule();
    map_collect(&points, exec, |p| run_point(p, &link, &stop, noise, config.base_seed))?
        .into_iter()
        .collect()
}

/// Reduces point results to one record per `(scheme, α, SNR)`. The first
/// grid point wins ties. Records come out ordered by scheme, α, then SNR.
pub fn reduce_worst_case(points: &[PointResult]) -> Vec<BerRecord> {
    let mut records: Vec<BerRecord> = Vec::new();
    let mut last_key = None;
    for p in points {
        let key = (p.spec.scheme, p.spec.alpha.to_bits(), p.spec.snr_db.to_bits());
        let candidate = BerRecord {
            scheme: p.spec.scheme,
            alpha: p.spec.alpha,
            snr_db: p.spec.snr_db,
            worst_ber: p.ber(),
            argmax_gamma: p.spec.gamma,
            argmax_theta: p.spec.theta,
            total_bits: p.bits,
            total_errors: p.errors,
        };
        if last_key == Some(key) {
            let cur = records.last_mut().expect("key seen");
            if candidate.worst_ber > cur.worst_ber {
                *cur = candidate;
            }
        } else {
            records.push(candidate);
            last_key = Some(key);
        }
    }
    records.sort_by(|a, b| {
        a.scheme
            .cmp(&b.scheme)
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.snr_db.total_cmp(&b.snr_db))
    });
    records
}

pub fn worst_case_sweep(config: &SweepConfig, exec: Execution) -> Result<Vec<BerRecord>> {
    Ok(reduce_worst_case(&sweep_points(config, exec)?))
}

/// SNR (dB) at which the BER curve crosses `target_ber`, by interpolating
/// `log10(BER)` linearly in SNR on the first descending crossing. Records
/// must belong to a single scheme and α. Zero-error points are floored at
/// half an error.
pub fn required_snr_at_ber(records: &[BerRecord], target_ber: f64) -> Result<f64> {
    let no_crossing = Error::NoCrossing { target: target_ber };
    if !(target_ber > 0.0) {
        return Err(no_crossing);
    }
    let mut sorted: Vec<&BerRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    let log_ber = |r: &BerRecord| {
        let floor = if r.total_bits > 0 { 0.5 / r.total_bits as f64 } else { f64::MIN_POSITIVE };
        r.worst_ber.max(floor).log10()
    };
    if let Some(r) = sorted.iter().find(|r| r.worst_ber == target_ber) {
        return Ok(r.snr_db);
    }
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.worst_ber > target_ber && b.worst_ber < target_ber {
            let (la, lb, lt) = (log_ber(a), log_ber(b), target_ber.log10());
            let frac = (la - lt) / (la - lb);
            return Ok(a.snr_db + frac * (b.snr_db - a.snr_db));
        }
    }
    Err(no_crossing)
}

/// SNR steps where the worst-case BER rises by more than three binomial
/// standard errors; returns the SNR of the upper point of each violation.
pub fn monotonicity_violations(records: &[BerRecord]) -> Vec<f64> {
    let mut sorted: Vec<&BerRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    sorted
        .windows(2)
        .filter(|w| {
            let se = |r: &BerRecord| {
                if r.total_bits == 0 {
                    0.0
                } else {
                    (r.worst_ber * (1.0 - r.worst_ber) / r.total_bits as f64).sqrt()
                }
            };
            let combined = (se(w[0]).powi(2) + se(w[1]).powi(2)).sqrt();
            w[1].worst_ber - w[0].worst_ber > 3.0 * combined
        })
        .map(|w| w[1].snr_db)
        .collect()
}

/// Records for one scheme and α.
pub fn curve(records: &[BerRecord], scheme: SchemeId, alpha: f64) -> Vec<BerRecord> {
    records
        .iter()
        .filter(|r| r.scheme == scheme && r.alpha == alpha)
        .copied()
        .collect()
}
