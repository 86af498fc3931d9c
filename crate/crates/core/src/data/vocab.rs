//! Vocabulary files (one token per line) and sample validation.

use std::path::Path;

use crate::data::manifest::UtteranceSample;
use crate::error::{Error, Result};

/// ID spaces for phonemes, accent tags, speakers, and emotions.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub phonemes: Vec<String>,
    pub accents: Vec<String>,
    pub speakers: Vec<String>,
    pub emotions: Vec<String>,
}

fn read_tokens(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tokens: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if tokens.is_empty() {
        return Err(Error::Config(format!("{}: empty vocabulary", path.display())));
    }
    Ok(tokens)
}

impl Vocabulary {
    /// Loads `phonemes.txt`, `accents.txt`, `speakers.txt`, `emotions.txt`
    /// from a directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Vocabulary> {
        let dir = dir.as_ref();
        Ok(Vocabulary {
            phonemes: read_tokens(&dir.join("phonemes.txt"))?,
            accents: read_tokens(&dir.join("accents.txt"))?,
            speakers: read_tokens(&dir.join("speakers.txt"))?,
            emotions: read_tokens(&dir.join("emotions.txt"))?,
        })
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, tokens: &[String]| -> Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, tokens.join("\n") + "\n").map_err(|e| Error::io(&p, e))
        };
        write("phonemes.txt", &self.phonemes)?;
        write("accents.txt", &self.accents)?;
        write("speakers.txt", &self.speakers)?;
        write("emotions.txt", &self.emotions)
    }
}

/// Checks vocabulary ranges and the duration/frame-count contract.
/// A one-frame mismatch is repaired on the final phoneme (and logged);
/// anything larger is an error.
pub fn validate_sample(
    sample: &UtteranceSample,
    n_frames: usize,
    vocab: &Vocabulary,
) -> Result<UtteranceSample> {
    let utt = sample.utterance_id.clone();
    let fail = |message: String| Error::InvalidSample {
        utt: utt.clone(),
        message,
    };

    for (name, ids, size) in [
        ("phoneme", &sample.phonemes, vocab.phonemes.len()),
        ("accent", &sample.accents, vocab.accents.len()),
    ] {
        if let Some(&bad) = ids.iter().find(|&&id| id as usize >= size) {
            return Err(fail(format!("unknown {name} ID {bad} (vocabulary has {size})")));
        }
    }
    if sample.speaker_id as usize >= vocab.speakers.len() {
        return Err(fail(format!(
            "unknown speaker ID {} (vocabulary has {})",
            sample.speaker_id,
            vocab.speakers.len()
        )));
    }
    if sample.emotion_id as usize >= vocab.emotions.len() {
        return Err(fail(format!(
            "unknown emotion ID {} (vocabulary has {})",
            sample.emotion_id,
            vocab.emotions.len()
        )));
    }

    let total = sample.total_frames() as i64;
    let delta = n_frames as i64 - total;
    let mut repaired = sample.clone();
    match delta {
        0 => {}
        -1 | 1 => {
            let last = repaired.durations.last_mut().unwrap();
            let new_last = *last as i64 + delta;
            if new_last < 0 {
                return Err(fail(format!(
                    "cannot repair durations: final phoneme has {last} frames, needs {delta:+}"
                )));
            }
            log::warn!(
                "{utt}: duration sum {total} vs {n_frames} frames; repaired final phoneme {last} -> {new_last}"
            );
            *last = new_last as u32;
        }
        _ => {
            return Err(fail(format!(
                "duration sum {total} differs from feature frames {n_frames} by {delta} (beyond +/-1)"
            )));
        }
    }
    Ok(repaired)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn vocab() -> Vocabulary {
        Vocabulary {
            phonemes: (0..10).map(|i| format!("p{i}")).collect(),
            accents: (0..3).map(|i| format!("a{i}")).collect(),
            speakers: vec!["spk0".into(), "spk1".into()],
            emotions: vec!["neutral".into()],
        }
    }

    fn sample(durations: Vec<u32>) -> UtteranceSample {
        UtteranceSample {
            utterance_id: "u".into(),
            audio_path: PathBuf::from("x.wav"),
            phonemes: vec![1; durations.len()],
            accents: vec![0; durations.len()],
            durations,
            speaker_id: 0,
            emotion_id: 0,
        }
    }

    #[test]
    fn exact_sum_accepted() {
        let s = sample(vec![3, 4, 5]);
        let out = validate_sample(&s, 12, &vocab()).unwrap();
        assert_eq!(out.durations, vec![3, 4, 5]);
    }

    #[test]
    fn off_by_one_repaired_on_last_phoneme() {
        let s = sample(vec![3, 4, 5]);
        let out = validate_sample(&s, 13, &vocab()).unwrap();
        assert_eq!(out.durations, vec![3, 4, 6]);
        let out = validate_sample(&s, 11, &vocab()).unwrap();
        assert_eq!(out.durations, vec![3, 4, 4]);
    }

    #[test]
    fn larger_mismatch_rejected() {
        let s = sample(vec![3, 4, 5]);
        assert!(validate_sample(&s, 15, &vocab()).is_err());
    }

    #[test]
    fn out_of_range_ids_rejected_by_name() {
        let mut s = sample(vec![3, 4, 5]);
        s.phonemes[1] = 99;
        let err = validate_sample(&s, 12, &vocab()).unwrap_err();
        assert!(err.to_string().contains("99"), "{err}");
        let mut s = sample(vec![3, 4, 5]);
        s.speaker_id = 7;
        assert!(validate_sample(&s, 12, &vocab()).is_err());
    }

    #[test]
    fn vocab_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let v = vocab();
        v.save(dir.path()).unwrap();
        let back = Vocabulary::load(dir.path()).unwrap();
        assert_eq!(back.phonemes, v.phonemes);
        assert_eq!(back.speakers.len(), 2);
    }
}
