//! Configuration for data processing, model architecture, and training.
//!
//! Two built-in profiles are provided: [`Config::desk`] (small model that
//! trains on commodity hardware) and [`Config::paper`] (full-size reference
//! settings, kept for documentation). Configs are stored as TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    /// Profile label, informational only.
    pub profile: String,
    /// Master seed for all randomness (init, noise, shuffling, dropout).
    pub seed: u64,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub training: TrainingConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataConfig {
    pub sample_rate: u32,
    /// Samples per frame (10 ms at 24 kHz).
    pub hop_samples: usize,
    /// Analysis window length in samples (40 ms at 24 kHz).
    pub win_samples: usize,
    pub fft_size: usize,
    pub n_mels: usize,
    pub mel_fmin: f32,
    pub mel_fmax: f32,
    /// F0 search range for the pitch estimator, in Hz.
    pub f0_min: f32,
    pub f0_max: f32,
    /// Normalized autocorrelation value above which a frame counts as voiced.
    pub voicing_threshold: f32,
    /// Magnitudes are clamped here before taking the log (mel floor).
    pub log_floor: f32,
    /// log-F0 used when an utterance is entirely unvoiced.
    pub fallback_log_f0: f32,
}

/// How pitch information reaches the decoder.
///
/// Together with `fusion` this selects the system variants:
/// - `sine+vuv+noise` + fusion on: full model (sample-level excitation)
/// - `sine` + fusion on: sine-only excitation ablation
/// - any + fusion off: frame-level (log-F0, vuv) concatenated to the latent
/// - `none` + fusion off: no pitch input to the decoder at all
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExcitationChannels {
    #[serde(rename = "sine")]
    Sine,
    #[serde(rename = "sine+vuv+noise")]
    SineVuvNoise,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n_phonemes: usize,
    pub n_accents: usize,
    pub n_speakers: usize,
    pub n_emotions: usize,

    /// Width of text-encoder / frame-prior hidden states.
    pub hidden: usize,
    /// Latent dimensionality D_z.
    pub latent_dim: usize,
    /// Width of the global condition embedding (speaker + emotion).
    pub global_dim: usize,

    pub text_layers: usize,
    pub text_heads: usize,
    /// Kernel of the conv feed-forward blocks in the text encoder.
    pub text_ffn_kernel: usize,
    pub text_dropout: f32,

    pub duration_hidden: usize,
    pub duration_kernel: usize,
    pub duration_dropout: f32,

    /// Residual conv stacks in the frame prior network.
    pub fpn_stacks: usize,
    pub fpn_kernel: usize,
    /// Which stack's output feeds the pitch predictor (1-based).
    pub fpn_pitch_tap: usize,

    pub pitch_convs: usize,
    pub pitch_kernel: usize,
    pub pitch_dropout: f32,

    pub flow_steps: usize,
    pub flow_hidden: usize,
    pub flow_kernel: usize,

    pub posterior_layers: usize,
    pub posterior_kernel: usize,
    pub posterior_hidden: usize,

    /// Channel width entering the waveform generator.
    pub decoder_channels: usize,
    pub upsample_rates: Vec<usize>,
    pub mrf_kernels: Vec<usize>,
    pub mrf_dilations: Vec<Vec<usize>>,
    /// Channels of the excitation pre-conv in the down-sampling branch.
    pub downsample_pre_channels: usize,

    pub excitation_channels: ExcitationChannels,
    /// Sample-level fusion of the down-sampled excitation into the decoder.
    pub fusion: bool,

    pub sine_amplitude: f32,
    pub unvoiced_noise_std: f32,
    pub excitation_noise_std: f32,

    pub mpd_periods: Vec<usize>,
    pub disc_channels: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossWeights {
    pub recon: f32,
    pub kl: f32,
    pub pitch: f32,
    pub dur: f32,
    pub adv: f32,
    pub fm: f32,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            recon: 45.0,
            kl: 1.0,
            pitch: 1.0,
            dur: 1.0,
            adv: 1.0,
            fm: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub betas: (f64, f64),
    pub adam_eps: f64,
    pub weight_decay: f64,
    /// Multiplicative learning-rate decay applied once per epoch.
    pub lr_decay: f64,
    /// Frames per training segment fed to the decoder and discriminators.
    pub segment_frames: usize,
    /// Target average number of utterances per dynamic batch.
    pub batch_avg_utterances: usize,
    pub max_steps: u64,
    pub checkpoint_every: u64,
    pub log_every: u64,
    pub loss_weights: LossWeights,
    /// Directory with preprocessed features (output of `preprocess`).
    pub data_dir: String,
    /// Directory for checkpoints and training logs.
    pub out_dir: String,
    /// Temperature used when sampling the prior at synthesis time.
    pub temperature: f64,
}

impl Config {
    /// Small profile: trains a usable toy model on a single CPU/GPU desk setup.
    pub fn desk() -> Self {
        Config {
            profile: "desk".into(),
            seed: 1234,
            data: DataConfig {
                sample_rate: 24_000,
                hop_samples: 240,
                win_samples: 960,
                fft_size: 1024,
                n_mels: 80,
                mel_fmin: 0.0,
                mel_fmax: 12_000.0,
                f0_min: 50.0,
                f0_max: 600.0,
                voicing_threshold: 0.5,
                log_floor: 1e-5,
                fallback_log_f0: 5.0,
            },
            model: ModelConfig {
                n_phonemes: 64,
                n_accents: 8,
                n_speakers: 4,
                n_emotions: 3,
                hidden: 96,
                latent_dim: 96,
                global_dim: 64,
                text_layers: 2,
                text_heads: 2,
                text_ffn_kernel: 3,
                text_dropout: 0.1,
                duration_hidden: 96,
                duration_kernel: 3,
                duration_dropout: 0.5,
                fpn_stacks: 6,
                fpn_kernel: 17,
                fpn_pitch_tap: 3,
                pitch_convs: 5,
                pitch_kernel: 5,
                pitch_dropout: 0.3,
                flow_steps: 4,
                flow_hidden: 96,
                flow_kernel: 5,
                posterior_layers: 8,
                posterior_kernel: 5,
                posterior_hidden: 96,
                decoder_channels: 128,
                upsample_rates: vec![6, 5, 2, 2, 2],
                mrf_kernels: vec![3, 7],
                mrf_dilations: vec![vec![1, 3], vec![1, 3]],
                downsample_pre_channels: 16,
                excitation_channels: ExcitationChannels::SineVuvNoise,
                fusion: true,
                sine_amplitude: 0.1,
                unvoiced_noise_std: 0.003,
                excitation_noise_std: 1.0,
                mpd_periods: vec![2, 3],
                disc_channels: 16,
            },
            training: TrainingConfig {
                learning_rate: 2e-4,
                betas: (0.8, 0.99),
                adam_eps: 1e-9,
                weight_decay: 0.01,
                lr_decay: 0.999_875,
                segment_frames: 32,
                batch_avg_utterances: 8,
                max_steps: 2000,
                checkpoint_every: 500,
                log_every: 10,
                loss_weights: LossWeights::default(),
                data_dir: "data/processed".into(),
                out_dir: "runs/desk".into(),
                temperature: 0.667,
            },
        }
    }

    /// Full-size profile mirroring the reference settings. Documentation
    /// only; training it needs serious hardware.
    pub fn paper() -> Self {
        let mut c = Config::desk();
        c.profile = "paper".into();
        c.model.hidden = 192;
        c.model.latent_dim = 192;
        c.model.global_dim = 256;
        c.model.text_layers = 6;
        c.model.text_heads = 2;
        c.model.duration_hidden = 256;
        c.model.flow_hidden = 192;
        c.model.posterior_layers = 16;
        c.model.posterior_hidden = 192;
        c.model.decoder_channels = 512;
        c.model.mrf_kernels = vec![3, 7, 11];
        c.model.mrf_dilations = vec![vec![1, 3, 5], vec![1, 3, 5], vec![1, 3, 5]];
        c.model.downsample_pre_channels = 32;
        c.model.mpd_periods = vec![2, 3, 5, 7, 11];
        c.model.disc_channels = 32;
        c.training.batch_avg_utterances = 26;
        c.training.max_steps = 800_000;
        c.training.out_dir = "runs/paper".into();
        c
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Config =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Hash over the data and model sections. Checkpoints refuse to load
    /// under a different hash; training settings are free to change.
    pub fn model_hash(&self) -> String {
        let blob = serde_json::json!({ "data": self.data, "model": self.model });
        let digest = Sha256::digest(blob.to_string().as_bytes());
        let mut s = String::with_capacity(16);
        for b in &digest[..8] {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.data;
        let m = &self.model;
        if d.sample_rate == 0 {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        if d.hop_samples == 0 || d.win_samples == 0 {
            return Err(Error::Config("hop/win must be positive".into()));
        }
        if d.win_samples > d.fft_size {
            return Err(Error::Config(format!(
                "win_samples {} exceeds fft_size {}",
                d.win_samples, d.fft_size
            )));
        }
        if !(d.f0_min > 0.0 && d.f0_max > d.f0_min) {
            return Err(Error::Config("need 0 < f0_min < f0_max".into()));
        }
        if d.f0_max >= d.sample_rate as f32 / 2.0 {
            return Err(Error::Config("f0_max must be below Nyquist".into()));
        }
        if d.mel_fmax > d.sample_rate as f32 / 2.0 {
            return Err(Error::Config("mel_fmax must be at most Nyquist".into()));
        }
        let prod: usize = m.upsample_rates.iter().product();
        if prod != d.hop_samples {
            return Err(Error::Config(format!(
                "product of upsample_rates {:?} is {prod}, must equal hop_samples {}",
                m.upsample_rates, d.hop_samples
            )));
        }
        if m.upsample_rates.is_empty() {
            return Err(Error::Config("upsample_rates may not be empty".into()));
        }
        if m.mrf_kernels.len() != m.mrf_dilations.len() {
            return Err(Error::Config(
                "mrf_kernels and mrf_dilations must have the same length".into(),
            ));
        }
        if m.fpn_pitch_tap == 0 || m.fpn_pitch_tap > m.fpn_stacks {
            return Err(Error::Config(format!(
                "fpn_pitch_tap {} out of range 1..={}",
                m.fpn_pitch_tap, m.fpn_stacks
            )));
        }
        if m.latent_dim % 2 != 0 {
            return Err(Error::Config("latent_dim must be even (flow coupling split)".into()));
        }
        if m.hidden % m.text_heads != 0 {
            return Err(Error::Config("hidden must be divisible by text_heads".into()));
        }
        if m.excitation_channels == ExcitationChannels::None && m.fusion {
            return Err(Error::Config(
                "excitation_channels=none requires fusion=off".into(),
            ));
        }
        if self.training.segment_frames == 0 {
            return Err(Error::Config("segment_frames must be positive".into()));
        }
        Ok(())
    }

    /// Channels the waveform generator receives per frame: the latent, plus
    /// (log-F0, vuv) when pitch is fed at frame level instead of fused.
    pub fn decoder_in_channels(&self) -> usize {
        if !self.model.fusion && self.model.excitation_channels != ExcitationChannels::None {
            self.model.latent_dim + 2
        } else {
            self.model.latent_dim
        }
    }

    /// Number of linear-spectrogram bins (fft_size / 2 + 1).
    pub fn linear_bins(&self) -> usize {
        self.data.fft_size / 2 + 1
    }
}
