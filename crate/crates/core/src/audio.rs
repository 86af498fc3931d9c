//! Waveform type and RIFF/WAVE 16-bit mono PCM I/O.

use std::path::Path;

use crate::error::{Error, Result};

/// Mono audio at a fixed sample rate, samples scaled to [-1, 1].
#[derive(Debug, Clone)]
pub struct Waveform {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    /// Bit depth of the source file; synthesized audio reports 16.
    pub bit_depth: u16,
}

impl Waveform {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Self {
        Waveform {
            samples,
            sample_rate,
            bit_depth: 16,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f32 {
        self.samples.len() as f32 / self.sample_rate as f32
    }
}

/// Loads a mono 16-bit PCM WAV file. The sample rate must match
/// `expected_rate` exactly; mismatches are an error, not a silent resample.
pub fn load_waveform(path: impl AsRef<Path>, expected_rate: u32) -> Result<Waveform> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| Error::Wav {
        path: path.into(),
        message: e.to_string(),
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::NotMono {
            path: path.into(),
            channels: spec.channels,
        });
    }
    if spec.sample_rate != expected_rate {
        return Err(Error::SampleRateMismatch {
            path: path.into(),
            found: spec.sample_rate,
            expected: expected_rate,
        });
    }
    let samples: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Wav {
                path: path.into(),
                message: e.to_string(),
            })?,
        (fmt, bits) => {
            return Err(Error::Wav {
                path: path.into(),
                message: format!("unsupported format {fmt:?}/{bits} bit, expected 16-bit PCM"),
            })
        }
    };
    Ok(Waveform {
        samples,
        sample_rate: spec.sample_rate,
        bit_depth: spec.bits_per_sample,
    })
}

/// Writes a waveform as mono 16-bit PCM, clamping samples to [-1, 1].
pub fn save_waveform(path: impl AsRef<Path>, wav: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: wav.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| Error::Wav {
        path: path.into(),
        message: e.to_string(),
    })?;
    for &s in &wav.samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer.write_sample(v).map_err(|e| Error::Wav {
            path: path.into(),
            message: e.to_string(),
        })?;
    }
    writer.finalize().map_err(|e| Error::Wav {
        path: path.into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silence_loads_as_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sil.wav");
        save_waveform(&p, &Waveform::new(vec![0.0; 24000], 24000)).unwrap();
        let w = load_waveform(&p, 24000).unwrap();
        assert_eq!(w.len(), 24000);
        assert!(w.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn full_scale_square_wave_scaling() {
        // 16-bit full scale maps to +/- 32767/32768
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sq.wav");
        let square: Vec<f32> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        save_waveform(&p, &Waveform::new(square, 24000)).unwrap();
        let w = load_waveform(&p, 24000).unwrap();
        let expected = 32767.0 / 32768.0;
        for &s in &w.samples {
            assert!((s.abs() - expected).abs() < 1e-6, "got {s}");
        }
    }

    #[test]
    fn sine_round_trip_preserves_length_and_amplitude() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sine.wav");
        let amp = 0.5f32;
        let sine: Vec<f32> = (0..12000)
            .map(|n| amp * (2.0 * std::f32::consts::PI * 440.0 * n as f32 / 24000.0).sin())
            .collect();
        save_waveform(&p, &Waveform::new(sine, 24000)).unwrap();
        let w = load_waveform(&p, 24000).unwrap();
        assert_eq!(w.len(), 12000);
        let max = w.samples.iter().fold(0f32, |m, &s| m.max(s.abs()));
        assert!((max - amp).abs() < 1e-3, "max {max}");
    }

    #[test]
    fn wrong_sample_rate_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sr.wav");
        save_waveform(&p, &Waveform::new(vec![0.0; 100], 16000)).unwrap();
        let err = load_waveform(&p, 24000).unwrap_err();
        assert!(matches!(err, Error::SampleRateMismatch { found: 16000, .. }));
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(load_waveform("/nonexistent/file.wav", 24000).is_err());
    }
}
