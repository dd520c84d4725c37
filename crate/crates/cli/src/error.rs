use std::process::ExitCode;

use pupilcheck::ellipse::FitError;
use pupilcheck::eval::EvalError;
use pupilcheck::io::IoError;
use pupilcheck::pipeline::ConfigError;
use pupilcheck::RasterError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Usage,
    Data,
    Evaluation,
}

impl Class {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Class::Usage => ExitCode::from(1),
            Class::Data => ExitCode::from(2),
            Class::Evaluation => ExitCode::from(3),
        }
    }
}

/// A failure reported as `{"error": kind, "detail": message}` on stderr.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub class: Class,
    pub error: String,
    pub detail: String,
}

impl CliError {
    pub fn new(class: Class, error: &str, detail: impl Into<String>) -> Self {
        Self {
            class,
            error: error.to_string(),
            detail: detail.into(),
        }
    }

    pub fn usage(detail: impl Into<String>) -> Self {
        Self::new(Class::Usage, "Usage", detail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        Self::new(Class::Data, io_kind(&e), e.to_string())
    }
}

impl From<RasterError> for CliError {
    fn from(e: RasterError) -> Self {
        let kind = match &e {
            RasterError::InvalidDimensions { .. } => "InvalidDimensions",
            RasterError::DataLength { .. } => "DataLength",
            RasterError::EmptyMask => "EmptyMask",
            RasterError::InvalidDistance(_) => "InvalidDistance",
            RasterError::SegmentationFailed(_) => "SegmentationFailed",
        };
        Self::new(Class::Data, kind, e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        let kind = match &e {
            FitError::DegenerateInput(_) => "DegenerateInput",
            FitError::NoEllipseSolution => "NoEllipseSolution",
            FitError::NotAnEllipse => "NotAnEllipse",
        };
        Self::new(Class::Data, kind, e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let (class, kind) = match &e {
            EvalError::OneClassOnly => (Class::Evaluation, "OneClassOnly"),
            EvalError::InvalidBins(_) => (Class::Usage, "InvalidBins"),
            EvalError::InvalidDValues => (Class::Usage, "InvalidDValues"),
            EvalError::InvalidScore(_) => (Class::Evaluation, "InvalidScore"),
            EvalError::InvalidSpec(_) => (Class::Data, "InvalidSpec"),
            EvalError::Manifest(_) => (Class::Data, "Manifest"),
            EvalError::Io(io) => (Class::Data, io_kind(io)),
        };
        Self::new(class, kind, e.to_string())
    }
}

fn io_kind(e: &IoError) -> &'static str {
    match e {
        IoError::Io { .. } => "Io",
        IoError::Decode { .. } => "Decode",
        IoError::Raster(_) => "Raster",
    }
}
