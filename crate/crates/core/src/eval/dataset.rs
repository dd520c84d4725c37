//! Manifest-driven batch evaluation.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    roc, score_histogram, youden_threshold, EvalError, HistogramRow, Label, LabeledScore, RocCurve,
};
use crate::io::{read_gray, read_mask, IoError};
use crate::pipeline::{
    prepare_pupil, Eye, EyeInput, FaceScore, PipelineConfig, PreparedFace, PreparedPupil, Segmenter,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestLabel {
    Real,
    Gan,
    Unknown,
}

impl ManifestLabel {
    pub fn known(self) -> Option<Label> {
        match self {
            ManifestLabel::Real => Some(Label::Real),
            ManifestLabel::Gan => Some(Label::Gan),
            ManifestLabel::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub face_id: String,
    pub label: ManifestLabel,
    /// Relative paths resolve against the manifest's directory.
    pub left_path: Option<PathBuf>,
    pub right_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    face_id: String,
    label: ManifestLabel,
    left_path: String,
    right_path: String,
}

fn non_empty(s: String) -> Option<PathBuf> {
    let t = s.trim();
    (!t.is_empty()).then(|| PathBuf::from(t))
}

pub fn read_manifest(path: &Path) -> Result<Manifest, EvalError> {
    let bytes = std::fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| EvalError::Manifest(format!("row {}: {e}", line + 1)))?;
        if !seen.insert(row.face_id.clone()) {
            return Err(EvalError::Manifest(format!(
                "duplicate face_id {:?}",
                row.face_id
            )));
        }
        entries.push(ManifestEntry {
            face_id: row.face_id,
            label: row.label,
            left_path: non_empty(row.left_path),
            right_path: non_empty(row.right_path),
        });
    }
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Manifest { base_dir, entries })
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), EvalError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let path_str = |p: &Option<PathBuf>| {
        p.as_ref()
            .map(|p| p.to_string_lossy().replace('\\', "/"))
            .unwrap_or_default()
    };
    for e in entries {
        writer
            .serialize(Row {
                face_id: e.face_id.clone(),
                label: e.label,
                left_path: path_str(&e.left_path),
                right_path: path_str(&e.right_path),
            })
            .map_err(|e| EvalError::Manifest(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| EvalError::Manifest(e.to_string()))?;
    std::fs::write(path, bytes).map_err(|source| {
        EvalError::Io(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// Faces carried through segmentation and fitting, in manifest order.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub faces: Vec<(ManifestLabel, PreparedFace)>,
}

fn load_eye(
    manifest: &Manifest,
    eye: Eye,
    path: Option<&PathBuf>,
    config: &PipelineConfig,
) -> PreparedPupil {
    let Some(path) = path else {
        return PreparedPupil::missing(eye);
    };
    let full = manifest.resolve(path);
    let input = match config.segmenter {
        Segmenter::ExternalMask => read_mask(&full).map(EyeInput::Mask),
        Segmenter::Classical => read_gray(&full).map(EyeInput::Crop),
    };
    match input {
        Ok(input) => prepare_pupil(eye, Some(&input), config),
        Err(e) => PreparedPupil::unreadable(eye, e.to_string()),
    }
}

/// Loads and prepares every face. An unreadable image marks only that eye as
/// failed; it does not abort the batch.
pub fn prepare_dataset(manifest: &Manifest, config: &PipelineConfig) -> PreparedDataset {
    let faces = manifest
        .entries
        .iter()
        .map(|e| {
            let face = PreparedFace {
                face_id: e.face_id.clone(),
                left: load_eye(manifest, Eye::Left, e.left_path.as_ref(), config),
                right: load_eye(manifest, Eye::Right, e.right_path.as_ref(), config),
            };
            (e.label, face)
        })
        .collect();
    PreparedDataset { faces }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scores: Vec<FaceScore>,
    pub labeled: Vec<LabeledScore>,
    pub roc: RocCurve,
    pub histogram: Vec<HistogramRow>,
    pub n_real: usize,
    pub n_gan: usize,
    /// Labeled faces left out of the ROC because no pupil was measurable.
    pub n_undecidable: usize,
    pub youden_threshold: Option<f64>,
}

fn labeled_scores(
    data: &PreparedDataset,
    mut score: impl FnMut(&PreparedFace) -> Option<f64>,
) -> (Vec<LabeledScore>, usize) {
    let mut out = Vec::new();
    let mut undecidable = 0;
    for (label, face) in &data.faces {
        let Some(label) = label.known() else { continue };
        match score(face) {
            Some(s) => out.push(LabeledScore::new(face.face_id.clone(), label, s)),
            None => undecidable += 1,
        }
    }
    (out, undecidable)
}

pub fn evaluate(
    data: &PreparedDataset,
    config: &PipelineConfig,
    bins: usize,
) -> Result<Evaluation, EvalError> {
    let scores: Vec<FaceScore> = data.faces.iter().map(|(_, f)| f.score(config)).collect();
    let mut by_face = scores.iter();
    let (labeled, n_undecidable) =
        labeled_scores(data, |_| by_face.next().and_then(|s| s.aggregate));
    let curve = roc(&labeled)?;
    let histogram = score_histogram(&labeled, bins)?;
    let n_real = labeled.iter().filter(|s| s.label == Label::Real).count();
    Ok(Evaluation {
        n_gan: labeled.len() - n_real,
        n_real,
        n_undecidable,
        youden_threshold: youden_threshold(&curve),
        histogram,
        roc: curve,
        labeled,
        scores,
    })
}

/// AUC of the aggregate BIoU for each band width. Segmentation and fitting
/// are reused; only the band stage is recomputed per `d`.
pub fn sweep_d(
    data: &PreparedDataset,
    d_values: &[u32],
    config: &PipelineConfig,
) -> Result<Vec<(u32, f64)>, EvalError> {
    if d_values.is_empty() || d_values.contains(&0) {
        return Err(EvalError::InvalidDValues);
    }
    d_values
        .iter()
        .map(|&d| {
            let (labeled, _) = labeled_scores(data, |f| f.score_at(d, config).aggregate);
            Ok((d, roc(&labeled)?.auc))
        })
        .collect()
}

/// AUC of the aggregate plain IoU between fitted and predicted masks.
pub fn iou_auc(data: &PreparedDataset, config: &PipelineConfig) -> Result<f64, EvalError> {
    let (labeled, _) = labeled_scores(data, |f| f.iou_aggregate(config));
    Ok(roc(&labeled)?.auc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip_and_resolution() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![
            ManifestEntry {
                face_id: "a".into(),
                label: ManifestLabel::Real,
                left_path: Some("m/a_l.pgm".into()),
                right_path: None,
            },
            ManifestEntry {
                face_id: "b".into(),
                label: ManifestLabel::Unknown,
                left_path: None,
                right_path: Some("/abs/b_r.png".into()),
            },
        ];
        let path = dir.path().join("manifest.csv");
        write_manifest(&path, &entries).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "face_id,label,left_path,right_path\na,real,m/a_l.pgm,\nb,unknown,,/abs/b_r.png\n"
        );
        let m = read_manifest(&path).unwrap();
        assert_eq!(m.entries, entries);
        assert_eq!(
            m.resolve(Path::new("m/a_l.pgm")),
            dir.path().join("m/a_l.pgm")
        );
        assert_eq!(
            m.resolve(Path::new("/abs/b_r.png")),
            PathBuf::from("/abs/b_r.png")
        );
    }

    #[test]
    fn manifest_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "face_id,label,left_path,right_path\na,maybe,x,y\n").unwrap();
        assert!(matches!(read_manifest(&path), Err(EvalError::Manifest(_))));
        std::fs::write(
            &path,
            "face_id,label,left_path,right_path\na,gan,x,\na,real,,y\n",
        )
        .unwrap();
        assert!(matches!(read_manifest(&path), Err(EvalError::Manifest(_))));
        std::fs::write(&path, "face_id,label\na,gan\n").unwrap();
        assert!(matches!(read_manifest(&path), Err(EvalError::Manifest(_))));
        assert!(matches!(
            read_manifest(&dir.path().join("missing.csv")),
            Err(EvalError::Io(_))
        ));
    }

    #[test]
    fn unreadable_eye_is_data_not_error() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = Manifest {
            base_dir: dir.path().to_path_buf(),
            entries: vec![ManifestEntry {
                face_id: "x".into(),
                label: ManifestLabel::Gan,
                left_path: Some("nope.pgm".into()),
                right_path: None,
            }],
        };
        let data = prepare_dataset(&manifest, &PipelineConfig::default());
        let s = data.faces[0].1.score(&PipelineConfig::default());
        assert_eq!(
            s.left.status,
            crate::pipeline::PupilStatus::SegmentationFailed
        );
        assert_eq!(s.right.status, crate::pipeline::PupilStatus::Missing);
    }

    #[test]
    fn sweep_rejects_bad_d() {
        let data = PreparedDataset { faces: vec![] };
        let cfg = PipelineConfig::default();
        assert!(matches!(
            sweep_d(&data, &[], &cfg),
            Err(EvalError::InvalidDValues)
        ));
        assert!(matches!(
            sweep_d(&data, &[2, 0], &cfg),
            Err(EvalError::InvalidDValues)
        ));
        assert!(matches!(
            sweep_d(&data, &[2], &cfg),
            Err(EvalError::OneClassOnly)
        ));
    }
}
