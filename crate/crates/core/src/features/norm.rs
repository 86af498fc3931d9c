//! Per-dimension normalization statistics over a feature corpus.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STD_FLOOR: f32 = 1e-5;

/// Per-dimension mean and standard deviation, computed over the training
/// split only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f32>,
    pub std: Vec<f32>,
}

impl NormStats {
    /// Accumulates statistics over a collection of [T x D] matrices.
    pub fn compute<'a>(samples: impl IntoIterator<Item = &'a Array2<f32>>) -> Result<NormStats> {
        let mut iter = samples.into_iter().peekable();
        let first = iter.peek().ok_or(Error::EmptyInput("NormStats::compute"))?;
        let dims = first.ncols();
        let mut sum = vec![0.0f64; dims];
        let mut sq_sum = vec![0.0f64; dims];
        let mut count = 0u64;
        for mat in iter {
            assert_eq!(mat.ncols(), dims, "inconsistent feature dimensionality");
            for row in mat.rows() {
                for (d, &v) in row.iter().enumerate() {
                    sum[d] += v as f64;
                    sq_sum[d] += (v as f64) * (v as f64);
                }
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptyInput("NormStats::compute (no frames)"));
        }
        let mean: Vec<f32> = sum.iter().map(|&s| (s / count as f64) as f32).collect();
        let std: Vec<f32> = sq_sum
            .iter()
            .zip(&mean)
            .enumerate()
            .map(|(d, (&sq, &m))| {
                let var = (sq / count as f64 - (m as f64) * (m as f64)).max(0.0);
                let s = var.sqrt() as f32;
                if s < STD_FLOOR {
                    log::warn!("feature dim {d} has near-zero variance; std floored at {STD_FLOOR}");
                    STD_FLOOR
                } else {
                    s
                }
            })
            .collect();
        Ok(NormStats { mean, std })
    }

    pub fn apply(&self, mat: &Array2<f32>) -> Array2<f32> {
        let mut out = mat.clone();
        for mut row in out.rows_mut() {
            for (d, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[d]) / self.std[d];
            }
        }
        out
    }

    pub fn invert(&self, mat: &Array2<f32>) -> Array2<f32> {
        let mut out = mat.clone();
        for mut row in out.rows_mut() {
            for (d, v) in row.iter_mut().enumerate() {
                *v = *v * self.std[d] + self.mean[d];
            }
        }
        out
    }
}
