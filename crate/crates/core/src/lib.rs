//! End-to-end text-to-speech with explicit pitch modeling.
//!
//! The model is a conditional VAE over waveforms: a posterior encoder maps
//! linear spectrograms to a latent sequence, a text-conditioned prior with a
//! normalizing flow models that latent from phonemes, and a GAN-trained
//! decoder reconstructs the waveform. Pitch is handled explicitly: a frame
//! pitch predictor estimates log-F0 and voicing from text, and a periodicity
//! generator turns pitch into a sample-level excitation (sine + voicing +
//! noise) that is down-sampled and fused into every resolution of the
//! decoder, which keeps the output pitch locked to the requested contour.

pub mod audio;
pub mod config;
pub mod data;
pub mod error;
pub mod features;

pub use audio::Waveform;
pub use config::Config;
pub use error::{Error, Result};
