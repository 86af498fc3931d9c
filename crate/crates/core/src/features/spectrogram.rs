//! STFT-based linear and log-mel spectrograms.
//!
//! Conventions (fixed here, used everywhere in the crate):
//! - frame count T = floor(len / hop); analysis window i is centered at
//!   sample i*hop over a reflect-padded signal,
//! - periodic Hann window of `win_samples`, zero-padded to `fft_size`,
//! - linear spectrogram is the magnitude (not power) of bins 0..fft/2,
//! - mel filters use the HTK scale, magnitudes clamped at `log_floor`
//!   before the natural log.

use ndarray::Array2;
use rustfft::{num_complex::Complex32, FftPlanner};

use crate::audio::Waveform;
use crate::config::DataConfig;
use crate::error::{Error, Result};

/// Frame-rate spectral features of one utterance.
#[derive(Debug, Clone)]
pub struct AcousticFrames {
    /// Non-negative magnitudes, [T x (fft_size/2 + 1)].
    pub linear_spec: Array2<f32>,
    /// [T x n_mels], natural log of floored mel magnitudes.
    pub log_mel: Array2<f32>,
    pub hop_samples: usize,
    pub win_samples: usize,
}

impl AcousticFrames {
    pub fn n_frames(&self) -> usize {
        self.linear_spec.nrows()
    }
}

/// Frames in an utterance of `len` samples: floor(len / hop).
pub fn frame_count(len: usize, hop: usize) -> usize {
    len / hop
}

fn hann(win: usize) -> Vec<f32> {
    (0..win)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f32::consts::PI * n as f32 / win as f32).cos())
        .collect()
}

/// Signal value at a possibly out-of-range index under reflect padding.
fn reflect(x: &[f32], i: isize) -> f32 {
    let n = x.len() as isize;
    let mut i = i;
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * (n - 1) - i;
    }
    x[i.clamp(0, n - 1) as usize]
}

/// Magnitude STFT, [T x (fft_size/2 + 1)].
pub fn linear_spectrogram(w: &Waveform, cfg: &DataConfig) -> Result<Array2<f32>> {
    let (hop, win, nfft) = (cfg.hop_samples, cfg.win_samples, cfg.fft_size);
    if w.len() < win {
        return Err(Error::TooShort {
            len: w.len(),
            min: win,
        });
    }
    let t_frames = frame_count(w.len(), hop);
    let n_bins = nfft / 2 + 1;
    let window = hann(win);
    let mut planner = FftPlanner::<f32>::new();
    let fft = planner.plan_fft_forward(nfft);
    let mut out = Array2::<f32>::zeros((t_frames, n_bins));
    let mut buf = vec![Complex32::new(0.0, 0.0); nfft];
    let half = win as isize / 2;
    for t in 0..t_frames {
        let center = (t * hop) as isize;
        for (n, b) in buf.iter_mut().enumerate() {
            if n < win {
                *b = Complex32::new(reflect(&w.samples, center - half + n as isize) * window[n], 0.0);
            } else {
                *b = Complex32::new(0.0, 0.0);
            }
        }
        fft.process(&mut buf);
        for k in 0..n_bins {
            out[(t, k)] = buf[k].norm();
        }
    }
    Ok(out)
}

/// Triangular HTK-mel filterbank, [n_bins x n_mels].
pub fn mel_filterbank(cfg: &DataConfig) -> Array2<f32> {
    let n_bins = cfg.fft_size / 2 + 1;
    let sr = cfg.sample_rate as f32;
    let to_mel = |f: f32| 2595.0 * (1.0 + f / 700.0).log10();
    let to_hz = |m: f32| 700.0 * (10f32.powf(m / 2595.0) - 1.0);
    let mel_lo = to_mel(cfg.mel_fmin);
    let mel_hi = to_mel(cfg.mel_fmax);
    let n = cfg.n_mels;
    let points: Vec<f32> = (0..n + 2)
        .map(|i| to_hz(mel_lo + (mel_hi - mel_lo) * i as f32 / (n + 1) as f32))
        .collect();
    let bin_hz = sr / cfg.fft_size as f32;
    let mut fb = Array2::<f32>::zeros((n_bins, n));
    for m in 0..n {
        let (f_lo, f_c, f_hi) = (points[m], points[m + 1], points[m + 2]);
        for k in 0..n_bins {
            let f = k as f32 * bin_hz;
            let v = if f <= f_lo || f >= f_hi {
                0.0
            } else if f <= f_c {
                (f - f_lo) / (f_c - f_lo)
            } else {
                (f_hi - f) / (f_hi - f_c)
            };
            if v > 0.0 {
                fb[(k, m)] = v;
            }
        }
    }
    fb
}

/// Log-mel spectrogram from a precomputed linear spectrogram.
pub fn log_mel_from_linear(linear: &Array2<f32>, fb: &Array2<f32>, log_floor: f32) -> Array2<f32> {
    linear.dot(fb).mapv(|v| v.max(log_floor).ln())
}

/// [T x n_mels] log-mel spectrogram.
pub fn log_mel_spectrogram(w: &Waveform, cfg: &DataConfig) -> Result<Array2<f32>> {
    let linear = linear_spectrogram(w, cfg)?;
    let fb = mel_filterbank(cfg);
    Ok(log_mel_from_linear(&linear, &fb, cfg.log_floor))
}

/// Both spectrogram views of one waveform with shared framing.
pub fn acoustic_frames(w: &Waveform, cfg: &DataConfig) -> Result<AcousticFrames> {
    let linear = linear_spectrogram(w, cfg)?;
    let fb = mel_filterbank(cfg);
    let log_mel = log_mel_from_linear(&linear, &fb, cfg.log_floor);
    Ok(AcousticFrames {
        linear_spec: linear,
        log_mel,
        hop_samples: cfg.hop_samples,
        win_samples: cfg.win_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn tone(freq: f32, secs: f32, sr: u32) -> Waveform {
        let n = (secs * sr as f32) as usize;
        let samples = (0..n)
            .map(|i| 0.5 * (2.0 * std::f32::consts::PI * freq * i as f32 / sr as f32).sin())
            .collect();
        Waveform::new(samples, sr)
    }

    #[test]
    fn frame_count_formula() {
        let cfg = Config::desk().data;
        let w = Waveform::new(vec![0.0; 24000], 24000);
        let spec = linear_spectrogram(&w, &cfg).unwrap();
        assert_eq!(spec.nrows(), 100); // floor(24000 / 240)
        assert_eq!(spec.ncols(), 513);
    }

    #[test]
    fn tone_peaks_at_expected_bin() {
        let cfg = Config::desk().data;
        let w = tone(1000.0, 1.0, 24000);
        let spec = linear_spectrogram(&w, &cfg).unwrap();
        // round(1000 / 24000 * 1024) = 43; the first and last frame see the
        // reflect-padded mirror of the tone, which can tip the peak by one bin
        for t in 0..spec.nrows() {
            let row = spec.row(t);
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            if t == 0 || t == spec.nrows() - 1 {
                assert!(argmax.abs_diff(43) <= 1, "edge frame {t}: {argmax}");
            } else {
                assert_eq!(argmax, 43, "frame {t}");
            }
        }
    }

    #[test]
    fn zero_input_gives_zero_linear_and_floored_mel() {
        let cfg = Config::desk().data;
        let w = Waveform::new(vec![0.0; 4800], 24000);
        let spec = linear_spectrogram(&w, &cfg).unwrap();
        assert!(spec.iter().all(|&v| v == 0.0));
        let mel = log_mel_spectrogram(&w, &cfg).unwrap();
        let expected = cfg.log_floor.ln();
        assert!(mel.iter().all(|&v| (v - expected).abs() < 1e-6));
    }

    #[test]
    fn too_short_input_is_an_error() {
        let cfg = Config::desk().data;
        let w = Waveform::new(vec![0.0; 800], 24000);
        assert!(matches!(
            linear_spectrogram(&w, &cfg),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn mel_and_linear_share_framing() {
        let cfg = Config::desk().data;
        let w = tone(220.0, 0.7, 24000);
        let lin = linear_spectrogram(&w, &cfg).unwrap();
        let mel = log_mel_spectrogram(&w, &cfg).unwrap();
        assert_eq!(lin.nrows(), mel.nrows());
        assert_eq!(mel.ncols(), 80);
    }

    #[test]
    fn tone_lights_single_dominant_mel_band() {
        let cfg = Config::desk().data;
        let fb = mel_filterbank(&cfg);
        // oracle: the band whose filter responds most at the tone frequency
        let freq = 1000.0f32;
        let bin = (freq / cfg.sample_rate as f32 * cfg.fft_size as f32).round() as usize;
        let expected_band = fb
            .row(bin)
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let mel = log_mel_spectrogram(&tone(freq, 0.5, 24000), &cfg).unwrap();
        for t in 2..mel.nrows() - 2 {
            let argmax = mel
                .row(t)
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert!(
                argmax == expected_band || argmax + 1 == expected_band || expected_band + 1 == argmax,
                "frame {t}: argmax {argmax}, expected near {expected_band}"
            );
        }
    }

    #[test]
    fn nonnegative_magnitudes() {
        let cfg = Config::desk().data;
        let w = tone(137.0, 0.3, 24000);
        let spec = linear_spectrogram(&w, &cfg).unwrap();
        assert!(spec.iter().all(|&v| v >= 0.0));
    }
}
