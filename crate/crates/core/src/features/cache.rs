//! Binary feature cache: one record per utterance, keyed by utterance ID.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::pitch::PitchTrack;
use crate::features::spectrogram::AcousticFrames;

const MAGIC: &[u8; 4] = b"PVFT";
const VERSION: u32 = 1;

/// All frame-rate features of one utterance.
#[derive(Debug, Clone)]
pub struct FeatureRecord {
    pub utt_id: String,
    pub sample_rate: u32,
    pub hop_samples: u32,
    pub linear_spec: Array2<f32>,
    pub log_mel: Array2<f32>,
    pub pitch: PitchTrack,
}

impl FeatureRecord {
    pub fn new(
        utt_id: impl Into<String>,
        sample_rate: u32,
        frames: AcousticFrames,
        pitch: PitchTrack,
    ) -> Result<Self> {
        let rec = FeatureRecord {
            utt_id: utt_id.into(),
            sample_rate,
            hop_samples: frames.hop_samples as u32,
            linear_spec: frames.linear_spec,
            log_mel: frames.log_mel,
            pitch,
        };
        rec.check_alignment()?;
        Ok(rec)
    }

    pub fn n_frames(&self) -> usize {
        self.linear_spec.nrows()
    }

    /// All four arrays must agree on the frame count.
    pub fn check_alignment(&self) -> Result<()> {
        let t = self.linear_spec.nrows();
        if self.log_mel.nrows() != t || self.pitch.len() != t {
            return Err(Error::Shape {
                context: "FeatureRecord",
                message: format!(
                    "frame counts differ: linear {t}, mel {}, pitch {}",
                    self.log_mel.nrows(),
                    self.pitch.len()
                ),
            });
        }
        self.pitch.check_invariants()
    }

    /// Cache file path for an utterance ID inside `dir`.
    pub fn path_for(dir: &Path, utt_id: &str) -> PathBuf {
        dir.join(format!("{utt_id}.feat"))
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = Self::path_for(dir, &self.utt_id);
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e: std::io::Error| Error::io(&path, e);

        w.write_all(MAGIC).map_err(io_err)?;
        w.write_u32::<LittleEndian>(VERSION).map_err(io_err)?;
        let id = self.utt_id.as_bytes();
        w.write_u32::<LittleEndian>(id.len() as u32).map_err(io_err)?;
        w.write_all(id).map_err(io_err)?;
        w.write_u32::<LittleEndian>(self.sample_rate).map_err(io_err)?;
        w.write_u32::<LittleEndian>(self.hop_samples).map_err(io_err)?;
        w.write_u32::<LittleEndian>(self.n_frames() as u32).map_err(io_err)?;
        w.write_u32::<LittleEndian>(self.linear_spec.ncols() as u32).map_err(io_err)?;
        w.write_u32::<LittleEndian>(self.log_mel.ncols() as u32).map_err(io_err)?;
        for &v in self.linear_spec.iter() {
            w.write_f32::<LittleEndian>(v).map_err(io_err)?;
        }
        for &v in self.log_mel.iter() {
            w.write_f32::<LittleEndian>(v).map_err(io_err)?;
        }
        for &v in &self.pitch.log_f0 {
            w.write_f32::<LittleEndian>(v).map_err(io_err)?;
        }
        for &v in &self.pitch.vuv {
            w.write_u8(v as u8).map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<FeatureRecord> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let cache_err = |message: String| Error::Cache {
            path: path.into(),
            message,
        };
        let io_err = |e: std::io::Error| Error::io(path, e);

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != MAGIC {
            return Err(cache_err("bad magic, not a feature cache file".into()));
        }
        let version = r.read_u32::<LittleEndian>().map_err(io_err)?;
        if version != VERSION {
            return Err(cache_err(format!("unsupported version {version}, expected {VERSION}")));
        }
        let id_len = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        if id_len > 4096 {
            return Err(cache_err("unreasonable utterance id length".into()));
        }
        let mut id_bytes = vec![0u8; id_len];
        r.read_exact(&mut id_bytes).map_err(io_err)?;
        let utt_id = String::from_utf8(id_bytes).map_err(|e| cache_err(e.to_string()))?;
        let sample_rate = r.read_u32::<LittleEndian>().map_err(io_err)?;
        let hop_samples = r.read_u32::<LittleEndian>().map_err(io_err)?;
        let t = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        let lin_cols = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        let mel_cols = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;

        let mut read_mat = |rows: usize, cols: usize| -> Result<Array2<f32>> {
            let mut data = vec![0.0f32; rows * cols];
            r.read_f32_into::<LittleEndian>(&mut data).map_err(io_err)?;
            Array2::from_shape_vec((rows, cols), data)
                .map_err(|e| cache_err(e.to_string()))
        };
        let linear_spec = read_mat(t, lin_cols)?;
        let log_mel = read_mat(t, mel_cols)?;
        let mut log_f0 = vec![0.0f32; t];
        r.read_f32_into::<LittleEndian>(&mut log_f0).map_err(io_err)?;
        let mut vuv_bytes = vec![0u8; t];
        r.read_exact(&mut vuv_bytes).map_err(io_err)?;
        let vuv = vuv_bytes.iter().map(|&b| b as f32).collect();

        let rec = FeatureRecord {
            utt_id,
            sample_rate,
            hop_samples,
            linear_spec,
            log_mel,
            pitch: PitchTrack { log_f0, vuv },
        };
        rec.check_alignment()?;
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn record(id: &str, t: usize) -> FeatureRecord {
        let linear = Array2::from_shape_fn((t, 5), |(i, j)| (i * 5 + j) as f32 * 0.1);
        let mel = Array2::from_shape_fn((t, 3), |(i, j)| (i + j) as f32 - 1.5);
        FeatureRecord {
            utt_id: id.into(),
            sample_rate: 24000,
            hop_samples: 240,
            linear_spec: linear,
            log_mel: mel,
            pitch: PitchTrack {
                log_f0: (0..t).map(|i| 5.0 + 0.01 * i as f32).collect(),
                vuv: (0..t).map(|i| (i % 2) as f32).collect(),
            },
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rec = record("utt_007", 13);
        let path = rec.save(dir.path()).unwrap();
        let back = FeatureRecord::load(&path).unwrap();
        assert_eq!(back.utt_id, "utt_007");
        assert_eq!(back.linear_spec, rec.linear_spec);
        assert_eq!(back.log_mel, rec.log_mel);
        assert_eq!(back.pitch, rec.pitch);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.feat");
        std::fs::write(&p, b"not a cache file at all").unwrap();
        assert!(FeatureRecord::load(&p).is_err());
    }

    #[test]
    fn rejects_wrong_version() {
        let dir = tempfile::tempdir().unwrap();
        let rec = record("v", 4);
        let path = rec.save(dir.path()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 99; // bump the version field
        std::fs::write(&path, bytes).unwrap();
        let err = FeatureRecord::load(&path).unwrap_err();
        assert!(err.to_string().contains("version"));
    }
}
