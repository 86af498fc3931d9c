//! Audio feature extraction: spectrograms, pitch, normalization, caching.

pub mod cache;
pub mod norm;
pub mod pitch;
pub mod spectrogram;

pub use cache::FeatureRecord;
pub use norm::NormStats;
pub use pitch::{extract_pitch, PitchTrack};
pub use spectrogram::{
    acoustic_frames, frame_count, linear_spectrogram, log_mel_spectrogram, mel_filterbank,
    AcousticFrames,
};
