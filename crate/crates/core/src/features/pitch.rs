//! F0 and voicing extraction by normalized autocorrelation.
//!
//! Per frame, the normalized cross-correlation of the signal with itself is
//! scanned over candidate lags; the best lag gives the pitch period and its
//! correlation value the voicing decision. Voiced F0 values are median
//! filtered, then log-F0 is made continuous by linear interpolation through
//! unvoiced spans (held at the edges).

use crate::audio::Waveform;
use crate::config::DataConfig;
use crate::error::{Error, Result};
use crate::features::spectrogram::frame_count;

/// Frame-rate pitch features: continuous log-F0 (natural log of Hz) and a
/// binary voicing flag per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    pub log_f0: Vec<f32>,
    pub vuv: Vec<f32>,
}

impl PitchTrack {
    pub fn len(&self) -> usize {
        self.log_f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_f0.is_empty()
    }

    pub fn voiced_fraction(&self) -> f32 {
        if self.vuv.is_empty() {
            return 0.0;
        }
        self.vuv.iter().sum::<f32>() / self.vuv.len() as f32
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.log_f0.len() != self.vuv.len() {
            return Err(Error::Shape {
                context: "PitchTrack",
                message: format!("log_f0 len {} != vuv len {}", self.log_f0.len(), self.vuv.len()),
            });
        }
        for (i, &v) in self.log_f0.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Shape {
                    context: "PitchTrack",
                    message: format!("non-finite log_f0 at frame {i}"),
                });
            }
        }
        if self.vuv.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Shape {
                context: "PitchTrack",
                message: "vuv flags must be 0 or 1".into(),
            });
        }
        Ok(())
    }
}

fn sample(x: &[f32], i: isize) -> f32 {
    if i < 0 || i as usize >= x.len() {
        0.0
    } else {
        x[i as usize]
    }
}

/// Best (lag, correlation) in the search range for a window starting at
/// `start`, or None when the frame has too little energy.
fn best_lag(x: &[f32], start: isize, win: usize, lag_min: usize, lag_max: usize) -> Option<(f32, f32)> {
    let mut energy0 = 0.0f64;
    for n in 0..win {
        let v = sample(x, start + n as isize) as f64;
        energy0 += v * v;
    }
    if (energy0 / win as f64).sqrt() < 1e-4 {
        return None;
    }
    let mut best = (0usize, -1.0f64);
    let mut corrs = vec![0.0f64; lag_max + 1];
    for lag in lag_min..=lag_max {
        let mut num = 0.0f64;
        let mut energy_t = 0.0f64;
        for n in 0..win {
            let a = sample(x, start + n as isize) as f64;
            let b = sample(x, start + (n + lag) as isize) as f64;
            num += a * b;
            energy_t += b * b;
        }
        let denom = (energy0 * energy_t).sqrt();
        let r = if denom > 0.0 { num / denom } else { 0.0 };
        corrs[lag] = r;
        if r > best.1 {
            best = (lag, r);
        }
    }
    let (mut lag, mut r) = best;
    if lag == 0 {
        return None;
    }
    // octave disambiguation: a subharmonic at k*T correlates almost as well
    // as the true period T, so prefer the smallest lag near the peak value
    let climb = |start: usize| -> usize {
        let mut p = start;
        while p + 1 <= lag_max && corrs[p + 1] > corrs[p] {
            p += 1;
        }
        while p > lag_min && corrs[p - 1] > corrs[p] {
            p -= 1;
        }
        p
    };
    for k in [4usize, 3, 2] {
        let cand = lag / k;
        if cand >= lag_min {
            let cand = climb(cand);
            if cand < lag && corrs[cand] >= 0.93 * r {
                lag = cand;
                r = corrs[cand];
                break;
            }
        }
    }
    // parabolic refinement around the integer peak
    let refined = if lag > lag_min && lag < lag_max {
        let (ym, y0, yp) = (corrs[lag - 1], corrs[lag], corrs[lag + 1]);
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() > 1e-12 {
            lag as f64 + 0.5 * (ym - yp) / denom
        } else {
            lag as f64
        }
    } else {
        lag as f64
    };
    Some((refined as f32, r as f32))
}

fn median5(vals: &mut Vec<f32>) -> f32 {
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals[vals.len() / 2]
}

/// Extracts a [`PitchTrack`] aligned with the spectrogram framing
/// (one value per hop). Entirely unvoiced utterances fall back to
/// `cfg.fallback_log_f0` with a warning.
pub fn extract_pitch(w: &Waveform, cfg: &DataConfig) -> Result<PitchTrack> {
    let sr = w.sample_rate as f32;
    if sr != cfg.sample_rate as f32 {
        return Err(Error::SampleRateMismatch {
            path: "<in-memory waveform>".into(),
            found: w.sample_rate,
            expected: cfg.sample_rate,
        });
    }
    let hop = cfg.hop_samples;
    let t_frames = frame_count(w.len(), hop);
    if t_frames == 0 {
        return Err(Error::TooShort {
            len: w.len(),
            min: hop,
        });
    }
    let lag_min = (sr / cfg.f0_max).floor().max(2.0) as usize;
    let lag_max = (sr / cfg.f0_min).ceil() as usize;
    let win = 2 * lag_max.max(hop);

    let mut raw_f0 = vec![0.0f32; t_frames];
    let mut voiced = vec![false; t_frames];
    for t in 0..t_frames {
        let start = (t * hop) as isize - (win as isize) / 2;
        if let Some((lag, r)) = best_lag(&w.samples, start, win, lag_min, lag_max) {
            if r >= cfg.voicing_threshold {
                voiced[t] = true;
                raw_f0[t] = (sr / lag).clamp(cfg.f0_min, cfg.f0_max);
            }
        }
    }

    // median filter over voiced neighbors, radius 2
    let mut f0 = vec![0.0f32; t_frames];
    for t in 0..t_frames {
        if !voiced[t] {
            continue;
        }
        let lo = t.saturating_sub(2);
        let hi = (t + 2).min(t_frames - 1);
        let mut neighborhood: Vec<f32> =
            (lo..=hi).filter(|&i| voiced[i]).map(|i| raw_f0[i]).collect();
        f0[t] = median5(&mut neighborhood);
    }

    // continuous log-F0: interpolate through unvoiced spans, hold at edges
    let mut log_f0 = vec![0.0f32; t_frames];
    let voiced_idx: Vec<usize> = (0..t_frames).filter(|&t| voiced[t]).collect();
    if voiced_idx.is_empty() {
        log::warn!(
            "utterance is entirely unvoiced; filling log_f0 with fallback {}",
            cfg.fallback_log_f0
        );
        log_f0.fill(cfg.fallback_log_f0);
    } else {
        for &t in &voiced_idx {
            log_f0[t] = f0[t].ln();
        }
        let first = voiced_idx[0];
        let last = *voiced_idx.last().unwrap();
        for t in 0..first {
            log_f0[t] = log_f0[first];
        }
        for t in last + 1..t_frames {
            log_f0[t] = log_f0[last];
        }
        for pair in voiced_idx.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b > a + 1 {
                let (ya, yb) = (log_f0[a], log_f0[b]);
                for t in a + 1..b {
                    let alpha = (t - a) as f32 / (b - a) as f32;
                    log_f0[t] = ya + alpha * (yb - ya);
                }
            }
        }
    }

    let track = PitchTrack {
        log_f0,
        vuv: voiced.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect(),
    };
    track.check_invariants()?;
    Ok(track)
}
