//! Synthetic speech-like corpus for demos and training probes.
//!
//! Utterances are built from a small phone inventory: voiced phones are
//! harmonic tones with per-phone spectral profiles following a constructed
//! log-F0 contour (speaker base, emotion tilt, accent offsets), unvoiced
//! phones are shaped noise, and silence is silence. Durations are exact by
//! construction, so the manifest needs no repair.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{save_waveform, Waveform};
use crate::config::DataConfig;
use crate::data::manifest::{write_manifest, UtteranceSample};
use crate::data::vocab::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy)]
enum PhoneClass {
    Silence,
    /// Harmonic amplitude profile (up to 6 harmonics).
    Voiced([f32; 6]),
    /// Noise gain and a high-pass flag.
    Unvoiced { gain: f32, bright: bool },
}

const PHONES: &[(&str, PhoneClass)] = &[
    ("sil", PhoneClass::Silence),
    ("aa", PhoneClass::Voiced([1.0, 0.85, 0.55, 0.30, 0.15, 0.08])),
    ("ii", PhoneClass::Voiced([1.0, 0.25, 0.65, 0.45, 0.10, 0.05])),
    ("uu", PhoneClass::Voiced([1.0, 0.55, 0.20, 0.10, 0.05, 0.02])),
    ("ee", PhoneClass::Voiced([1.0, 0.70, 0.75, 0.25, 0.20, 0.06])),
    ("oo", PhoneClass::Voiced([1.0, 0.90, 0.35, 0.45, 0.08, 0.04])),
    ("nn", PhoneClass::Voiced([1.0, 0.40, 0.12, 0.05, 0.02, 0.01])),
    ("ss", PhoneClass::Unvoiced { gain: 0.10, bright: true }),
    ("hh", PhoneClass::Unvoiced { gain: 0.05, bright: false }),
    ("kk", PhoneClass::Unvoiced { gain: 0.14, bright: true }),
];

const N_SPEAKERS: usize = 4;
const SPEAKER_BASE_F0: [f32; N_SPEAKERS] = [130.0, 170.0, 210.0, 250.0];
const N_EMOTIONS: usize = 3;
const ACCENT_OFFSETS: [f32; 3] = [0.0, 0.12, -0.10];

/// The vocabulary matching the generated corpora.
pub fn synthetic_vocabulary() -> Vocabulary {
    Vocabulary {
        phonemes: PHONES.iter().map(|(n, _)| n.to_string()).collect(),
        accents: vec!["flat".into(), "raised".into(), "lowered".into()],
        speakers: (0..N_SPEAKERS).map(|i| format!("spk{i}")).collect(),
        emotions: vec!["neutral".into(), "bright".into(), "low".into()],
    }
}

fn emotion_params(emotion: u32) -> (f32, f32) {
    // (log-F0 scale offset, tilt across the utterance in log-F0)
    match emotion {
        1 => (0.10, 0.08),
        2 => (-0.08, -0.10),
        _ => (0.0, -0.04),
    }
}

/// Generates one utterance: the manifest entry (with a relative audio path
/// `wavs/<id>.wav`) and its waveform.
pub fn generate_utterance(
    rng: &mut ChaCha8Rng,
    id: &str,
    data: &DataConfig,
) -> (UtteranceSample, Waveform) {
    let hop = data.hop_samples;
    let sr = data.sample_rate as f64;

    let n_content = rng.gen_range(4..=7);
    let mut phonemes: Vec<u32> = vec![0];
    for _ in 0..n_content {
        // mostly voiced phones, occasionally unvoiced
        let id = if rng.gen_bool(0.75) {
            rng.gen_range(1..=6)
        } else {
            rng.gen_range(7..=9)
        };
        phonemes.push(id);
    }
    phonemes.push(0);

    let durations: Vec<u32> = phonemes
        .iter()
        .map(|&p| match PHONES[p as usize].1 {
            PhoneClass::Silence => rng.gen_range(8..=12),
            PhoneClass::Voiced(_) => rng.gen_range(10..=22),
            PhoneClass::Unvoiced { .. } => rng.gen_range(5..=10),
        })
        .collect();
    let accents: Vec<u32> = phonemes
        .iter()
        .map(|&p| if p == 0 { 0 } else { rng.gen_range(0..3) })
        .collect();
    let speaker_id = rng.gen_range(0..N_SPEAKERS as u32);
    let emotion_id = rng.gen_range(0..N_EMOTIONS as u32);

    let t_frames: usize = durations.iter().map(|&d| d as usize).sum();
    let (emo_offset, emo_tilt) = emotion_params(emotion_id);
    let base_log_f0 = SPEAKER_BASE_F0[speaker_id as usize].ln() + emo_offset;

    // frame-level contour and voicing
    let mut log_f0 = vec![0.0f32; t_frames];
    let mut voiced = vec![false; t_frames];
    let mut frame_phone = vec![0usize; t_frames];
    let mut frame_in_phone = vec![(0usize, 0usize); t_frames]; // (offset, length)
    {
        let mut t = 0usize;
        for (i, (&p, &d)) in phonemes.iter().zip(&durations).enumerate() {
            let jitter: f32 = rng.gen_range(-0.03..0.03);
            for k in 0..d as usize {
                frame_phone[t] = p as usize;
                frame_in_phone[t] = (k, d as usize);
                if let PhoneClass::Voiced(_) = PHONES[p as usize].1 {
                    let pos = t as f32 / t_frames.max(1) as f32;
                    log_f0[t] =
                        base_log_f0 + emo_tilt * (pos - 0.5) + ACCENT_OFFSETS[accents[i] as usize] + jitter;
                    voiced[t] = true;
                }
                t += 1;
            }
        }
    }
    // 3-frame smoothing of the contour inside voiced regions
    let smoothed: Vec<f32> = (0..t_frames)
        .map(|t| {
            if !voiced[t] {
                return log_f0[t];
            }
            let mut acc = log_f0[t];
            let mut n = 1.0;
            if t > 0 && voiced[t - 1] {
                acc += log_f0[t - 1];
                n += 1.0;
            }
            if t + 1 < t_frames && voiced[t + 1] {
                acc += log_f0[t + 1];
                n += 1.0;
            }
            acc / n
        })
        .collect();

    // sample-level synthesis with continuous phase
    let n_samples = t_frames * hop;
    let mut samples = vec![0.0f32; n_samples];
    let mut phase = 0.0f64;
    let mut prev_noise = 0.0f32;
    for n in 0..n_samples {
        let t = n / hop;
        let phone = frame_phone[t];
        let (k, d) = frame_in_phone[t];
        // per-phone attack/release envelope
        let pos_in = (k * hop + n % hop) as f32;
        let phone_len = (d * hop) as f32;
        let ramp = 360.0f32;
        let env = (pos_in / ramp).min(1.0).min(((phone_len - pos_in) / ramp).max(0.0)).clamp(0.0, 1.0);
        match PHONES[phone].1 {
            PhoneClass::Silence => {}
            PhoneClass::Voiced(amps) => {
                let f0 = smoothed[t].exp() as f64;
                phase += TAU * f0 / sr;
                let mut v = 0.0f32;
                let mut norm = 0.0f32;
                for (h, &a) in amps.iter().enumerate() {
                    let hf = (h + 1) as f64 * f0;
                    if hf < 0.45 * sr {
                        v += a * ((h + 1) as f64 * phase).sin() as f32;
                        norm += a;
                    }
                }
                samples[n] = 0.35 * env * v / norm.max(1e-3);
            }
            PhoneClass::Unvoiced { gain, bright } => {
                let white: f32 = rng.gen_range(-1.0..1.0);
                let shaped = if bright { white - prev_noise } else { 0.5 * (white + prev_noise) };
                prev_noise = white;
                samples[n] = gain * env * shaped;
            }
        }
    }

    let sample = UtteranceSample {
        utterance_id: id.to_string(),
        audio_path: PathBuf::from(format!("wavs/{id}.wav")),
        phonemes,
        accents,
        durations,
        speaker_id,
        emotion_id,
    };
    (sample, Waveform::new(samples, data.sample_rate))
}

/// A generated corpus on disk: WAVs, manifest, and vocabulary files.
pub struct SyntheticCorpus {
    pub manifest_path: PathBuf,
    pub vocab_dir: PathBuf,
    pub samples: Vec<UtteranceSample>,
}

/// Writes `n_utterances` synthetic utterances under `dir`:
/// `wavs/*.wav`, `manifest.txt`, and `vocab/*.txt`.
pub fn generate_corpus(
    dir: impl AsRef<Path>,
    n_utterances: usize,
    seed: u64,
    data: &DataConfig,
) -> Result<SyntheticCorpus> {
    let dir = dir.as_ref();
    let wav_dir = dir.join("wavs");
    std::fs::create_dir_all(&wav_dir).map_err(|e| Error::io(&wav_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_utterances);
    for i in 0..n_utterances {
        let id = format!("synth_{i:04}");
        let (sample, wav) = generate_utterance(&mut rng, &id, data);
        save_waveform(dir.join(&sample.audio_path), &wav)?;
        samples.push(sample);
    }
    let manifest_path = dir.join("manifest.txt");
    write_manifest(&manifest_path, &samples)?;
    let vocab_dir = dir.join("vocab");
    synthetic_vocabulary().save(&vocab_dir)?;
    Ok(SyntheticCorpus {
        manifest_path,
        vocab_dir,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::features::{extract_pitch, frame_count};

    #[test]
    fn durations_match_waveform_exactly() {
        let data = Config::desk().data;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (sample, wav) = generate_utterance(&mut rng, "u0", &data);
        assert_eq!(
            sample.total_frames() as usize,
            frame_count(wav.len(), data.hop_samples)
        );
        assert!(wav.samples.iter().all(|s| s.abs() <= 1.0));
    }

    #[test]
    fn voiced_phones_carry_extractable_pitch() {
        let data = Config::desk().data;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..4 {
            let (sample, wav) = generate_utterance(&mut rng, &format!("u{trial}"), &data);
            let track = extract_pitch(&wav, &data).unwrap();
            // voiced frames exist whenever a voiced phone exists
            let has_voiced_phone = sample.phonemes.iter().any(|&p| (1..=6).contains(&p));
            if has_voiced_phone {
                assert!(track.voiced_fraction() > 0.2, "trial {trial}");
            }
            // extracted pitch stays in the constructed range; frames at
            // phone transitions may smear, so the hard bound is loose and
            // the median bound tight
            let mut voiced_f0: Vec<f32> = track
                .log_f0
                .iter()
                .zip(&track.vuv)
                .filter(|(_, &v)| v == 1.0)
                .map(|(lf, _)| lf.exp())
                .collect();
            if !voiced_f0.is_empty() {
                voiced_f0.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = voiced_f0[voiced_f0.len() / 2];
                assert!((95.0..=330.0).contains(&median), "median f0 {median}");
                for &f0 in &voiced_f0 {
                    assert!((70.0..=450.0).contains(&f0), "f0 {f0}");
                }
            }
        }
    }

    #[test]
    fn corpus_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let data = Config::desk().data;
        let corpus = generate_corpus(dir.path(), 3, 99, &data).unwrap();
        assert_eq!(corpus.samples.len(), 3);
        assert!(corpus.manifest_path.exists());
        assert!(corpus.vocab_dir.join("phonemes.txt").exists());
        for s in &corpus.samples {
            assert!(s.audio_path.is_relative());
            assert!(dir.path().join(&s.audio_path).exists());
        }
        // reproducible
        let dir2 = tempfile::tempdir().unwrap();
        let corpus2 = generate_corpus(dir2.path(), 3, 99, &data).unwrap();
        assert_eq!(corpus.samples[2].phonemes, corpus2.samples[2].phonemes);
    }
}
