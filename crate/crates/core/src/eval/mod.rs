//! Evaluation harness: ROC/AUC, score histograms, boundary-band sweeps and
//! the seeded synthetic mask corpus.
//!
//! The positive class is `real`; a higher score means more likely real.

mod dataset;
pub mod report;
mod synth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::IoError;

pub use dataset::{
    evaluate, iou_auc, prepare_dataset, read_manifest, sweep_d, write_manifest, Evaluation,
    Manifest, ManifestEntry, ManifestLabel, PreparedDataset,
};
pub use synth::{
    generate_synth_corpus, rasterize_perturbed, synth_faces, Harmonic, SynthFace, SynthSpec,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("scores contain only one class; ROC needs both real and gan")]
    OneClassOnly,
    #[error("histogram needs at least 2 bins, got {0}")]
    InvalidBins(usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("d values must be non-empty and each at least 1")]
    InvalidDValues,
    #[error("score for {0} is not a finite value in [0, 1]")]
    InvalidScore(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Real,
    Gan,
}

impl Label {
    pub fn flipped(self) -> Self {
        match self {
            Label::Real => Label::Gan,
            Label::Gan => Label::Real,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub face_id: String,
    pub label: Label,
    pub score: f64,
}

impl LabeledScore {
    pub fn new(face_id: impl Into<String>, label: Label, score: f64) -> Self {
        Self {
            face_id: face_id.into(),
            label,
            score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores `>= threshold` are called real. The first point uses `+inf`.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

fn validate(scores: &[LabeledScore]) -> Result<(usize, usize), EvalError> {
    let mut n_real = 0;
    let mut n_gan = 0;
    for s in scores {
        if !(s.score.is_finite() && (0.0..=1.0).contains(&s.score)) {
            return Err(EvalError::InvalidScore(s.face_id.clone()));
        }
        match s.label {
            Label::Real => n_real += 1,
            Label::Gan => n_gan += 1,
        }
    }
    if n_real == 0 || n_gan == 0 {
        return Err(EvalError::OneClassOnly);
    }
    Ok((n_real, n_gan))
}

/// Mann-Whitney estimate of `P(score_real > score_gan)`, ties counted as ½.
/// Uses mid-ranks of the pooled, sorted scores.
pub fn rank_auc(scores: &[LabeledScore]) -> Result<f64, EvalError> {
    let (n_real, n_gan) = validate(scores)?;
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

    let mut rank_sum_real = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].score == sorted[i].score {
            j += 1;
        }
        // ranks i+1..=j share the mid-rank
        let mid = (i + 1 + j) as f64 / 2.0;
        let reals = sorted[i..j]
            .iter()
            .filter(|s| s.label == Label::Real)
            .count();
        rank_sum_real += mid * reals as f64;
        i = j;
    }
    let (p, n) = (n_real as f64, n_gan as f64);
    Ok((rank_sum_real - p * (p + 1.0) / 2.0) / (p * n))
}

/// Trapezoidal area under a sequence of ROC points.
pub fn trapezoid_auc(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// ROC curve from a threshold sweep over every distinct score.
pub fn roc(scores: &[LabeledScore]) -> Result<RocCurve, EvalError> {
    let (n_real, n_gan) = validate(scores)?;
    let auc = rank_auc(scores)?;

    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].score;
        while i < sorted.len() && sorted[i].score == t {
            match sorted[i].label {
                Label::Real => tp += 1,
                Label::Gan => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_gan as f64,
            tpr: tp as f64 / n_real as f64,
            threshold: t,
        });
    }
    Ok(RocCurve { points, auc })
}

/// Threshold maximizing Youden's J = TPR - FPR. Ties go to the higher
/// threshold.
pub fn youden_threshold(curve: &RocCurve) -> Option<f64> {
    curve
        .points
        .iter()
        .filter(|p| p.threshold.is_finite())
        .fold(None::<(f64, f64)>, |best, p| {
            let j = p.tpr - p.fpr;
            match best {
                Some((bj, _)) if bj >= j - 1e-12 => best,
                _ => Some((j, p.threshold)),
            }
        })
        .map(|(_, t)| t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub real_frac: f64,
    pub gan_frac: f64,
}

/// Per-class normalized histogram over `[0, 1]`. A score of exactly 1 lands
/// in the last bin.
pub fn score_histogram(
    scores: &[LabeledScore],
    bins: usize,
) -> Result<Vec<HistogramRow>, EvalError> {
    if bins < 2 {
        return Err(EvalError::InvalidBins(bins));
    }
    let (n_real, n_gan) = validate(scores)?;
    let mut real = vec![0usize; bins];
    let mut gan = vec![0usize; bins];
    for s in scores {
        let idx = ((s.score * bins as f64).floor() as usize).min(bins - 1);
        match s.label {
            Label::Real => real[idx] += 1,
            Label::Gan => gan[idx] += 1,
        }
    }
    Ok((0..bins)
        .map(|i| HistogramRow {
            bin_lo: i as f64 / bins as f64,
            bin_hi: (i + 1) as f64 / bins as f64,
            real_frac: real[i] as f64 / n_real as f64,
            gan_frac: gan[i] as f64 / n_gan as f64,
        })
        .collect())
}
