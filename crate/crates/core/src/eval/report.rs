//! Plot-ready outputs: `scores.jsonl`, `roc.csv`, `hist.csv`, `sweep.csv`
//! and the JSON metadata files that record the resolved configuration.

use std::path::Path;

use serde::Serialize;

use super::{EvalError, Evaluation, HistogramRow, RocCurve};
use crate::io::IoError;
use crate::pipeline::{FaceScore, PipelineConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub auc: f64,
    pub n_real: usize,
    pub n_gan: usize,
    pub d: u32,
    pub threshold: f64,
    pub n_undecidable: usize,
    pub youden_threshold: Option<f64>,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub d_values: Vec<u32>,
    /// AUC of plain IoU, the limit of the sweep as `d` saturates.
    pub iou_auc: f64,
    pub config: PipelineConfig,
}

pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    out
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut out = String::from("bin_lo,bin_hi,real_frac,gan_frac\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.bin_lo, r.bin_hi, r.real_frac, r.gan_frac
        ));
    }
    out
}

pub fn sweep_csv(rows: &[(u32, f64)]) -> String {
    let mut out = String::from("d,auc\n");
    for (d, auc) in rows {
        out.push_str(&format!("{d},{auc}\n"));
    }
    out
}

pub fn scores_jsonl(scores: &[FaceScore]) -> String {
    let mut out = String::new();
    for s in scores {
        out.push_str(&serde_json::to_string(s).expect("face scores serialize"));
        out.push('\n');
    }
    out
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), EvalError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| EvalError::Io(IoError::Io { path, source }))
}

fn ensure_dir(dir: &Path) -> Result<(), EvalError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        EvalError::Io(IoError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

pub fn metrics(eval: &Evaluation, config: &PipelineConfig) -> Metrics {
    Metrics {
        auc: eval.roc.auc,
        n_real: eval.n_real,
        n_gan: eval.n_gan,
        d: config.d,
        threshold: config.threshold,
        n_undecidable: eval.n_undecidable,
        youden_threshold: eval.youden_threshold,
        config: config.clone(),
    }
}

pub fn write_evaluation(
    outdir: &Path,
    eval: &Evaluation,
    config: &PipelineConfig,
) -> Result<(), EvalError> {
    ensure_dir(outdir)?;
    write(outdir, "scores.jsonl", &scores_jsonl(&eval.scores))?;
    write(outdir, "roc.csv", &roc_csv(&eval.roc))?;
    write(outdir, "hist.csv", &histogram_csv(&eval.histogram))?;
    write(outdir, "metrics.json", &pretty(&metrics(eval, config)))
}

pub fn write_sweep(
    outdir: &Path,
    rows: &[(u32, f64)],
    iou_auc: f64,
    config: &PipelineConfig,
) -> Result<(), EvalError> {
    ensure_dir(outdir)?;
    write(outdir, "sweep.csv", &sweep_csv(rows))?;
    let report = SweepReport {
        d_values: rows.iter().map(|(d, _)| *d).collect(),
        iou_auc,
        config: config.clone(),
    };
    write(outdir, "sweep_config.json", &pretty(&report))
}
