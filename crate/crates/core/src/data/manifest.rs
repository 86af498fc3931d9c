//! Dataset manifest: one utterance per line,
//! `ID | audio path | phoneme IDs | accent tags | durations | speaker | emotion`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One utterance's text-side description plus its audio location.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceSample {
    pub utterance_id: String,
    /// Resolved against the manifest's directory when relative.
    pub audio_path: PathBuf,
    pub phonemes: Vec<u32>,
    pub accents: Vec<u32>,
    /// Per-phoneme durations in frames.
    pub durations: Vec<u32>,
    pub speaker_id: u32,
    pub emotion_id: u32,
}

impl UtteranceSample {
    pub fn n_phonemes(&self) -> usize {
        self.phonemes.len()
    }

    pub fn total_frames(&self) -> u32 {
        self.durations.iter().sum()
    }
}

fn parse_ints(field: &str) -> std::result::Result<Vec<u32>, String> {
    field
        .split_whitespace()
        .map(|tok| tok.parse::<u32>().map_err(|_| format!("bad integer `{tok}`")))
        .collect()
}

/// Parses a manifest file. Relative audio paths resolve against the
/// manifest's own directory. Blank lines and `#` comments are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<UtteranceSample>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Manifest {
            path: path.into(),
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(err(format!("expected 7 `|`-separated fields, got {}", fields.len())));
        }
        let utterance_id = fields[0].to_string();
        if utterance_id.is_empty() {
            return Err(err("empty utterance ID".into()));
        }
        let audio = PathBuf::from(fields[1]);
        let audio_path = if audio.is_absolute() { audio } else { base.join(audio) };
        let phonemes = parse_ints(fields[2]).map_err(&err)?;
        let accents = parse_ints(fields[3]).map_err(&err)?;
        let durations = parse_ints(fields[4]).map_err(&err)?;
        if phonemes.is_empty() {
            return Err(err("utterance has no phonemes".into()));
        }
        if phonemes.len() != accents.len() || phonemes.len() != durations.len() {
            return Err(err(format!(
                "phonemes/accents/durations lengths differ: {}/{}/{}",
                phonemes.len(),
                accents.len(),
                durations.len()
            )));
        }
        let speaker_id = fields[5].parse::<u32>().map_err(|_| err(format!("bad speaker `{}`", fields[5])))?;
        let emotion_id = fields[6].parse::<u32>().map_err(|_| err(format!("bad emotion `{}`", fields[6])))?;
        samples.push(UtteranceSample {
            utterance_id,
            audio_path,
            phonemes,
            accents,
            durations,
            speaker_id,
            emotion_id,
        });
    }
    Ok(samples)
}

/// Writes samples in manifest format. Audio paths are written as given.
pub fn write_manifest(path: impl AsRef<Path>, samples: &[UtteranceSample]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for s in samples {
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        out.push_str(&format!(
            "{} | {} | {} | {} | {} | {} | {}\n",
            s.utterance_id,
            s.audio_path.display(),
            join(&s.phonemes),
            join(&s.accents),
            join(&s.durations),
            s.speaker_id,
            s.emotion_id
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.txt");
        std::fs::write(
            &p,
            "# comment\nutt1 | wavs/a.wav | 0 3 5 | 0 1 0 | 10 20 12 | 0 | 1\n\nutt2 | /abs/b.wav | 1 2 | 2 0 | 8 9 | 3 | 0\n",
        )
        .unwrap();
        let samples = read_manifest(&p).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].utterance_id, "utt1");
        assert_eq!(samples[0].audio_path, dir.path().join("wavs/a.wav"));
        assert_eq!(samples[0].phonemes, vec![0, 3, 5]);
        assert_eq!(samples[0].total_frames(), 42);
        assert_eq!(samples[1].audio_path, PathBuf::from("/abs/b.wav"));

        let p2 = dir.path().join("copy.txt");
        write_manifest(&p2, &samples).unwrap();
        let again = read_manifest(&p2).unwrap();
        assert_eq!(again[0].phonemes, samples[0].phonemes);
        assert_eq!(again[1].speaker_id, 3);
    }

    #[test]
    fn field_count_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        std::fs::write(&p, "utt1 | a.wav | 0 1\n").unwrap();
        let err = read_manifest(&p).unwrap_err();
        assert!(err.to_string().contains("7"));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        std::fs::write(&p, "utt1 | a.wav | 0 1 2 | 0 1 | 5 5 5 | 0 | 0\n").unwrap();
        assert!(read_manifest(&p).is_err());
    }
}
