//! `pupilcheck`: pupil-regularity scoring from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 evaluation error.
//! Failures print `{"error": kind, "detail": message}` on stderr.

mod error;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pupilcheck::eval::{self, report, SynthSpec};
use pupilcheck::io::{read_gray, read_mask, write_mask};
use pupilcheck::pipeline::{fit_mask, score_face, EyeInput, PipelineConfig, Segmenter};
use pupilcheck::raster::{segment_pupil_classical, ClassicalConfig};
use serde::Serialize;

use error::{Class, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "pupilcheck",
    version,
    about = "Score pupil-shape regularity to flag GAN faces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment the pupil of one grayscale eye crop with the classical segmenter.
    Segment {
        #[arg(long)]
        eye: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        classical: ClassicalArgs,
    },
    /// Fit an ellipse to one pupil mask and write the fit report.
    Fit {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        json: PathBuf,
    },
    /// Score one face and print the result as JSON.
    Score {
        #[arg(long, required_unless_present = "right")]
        left: Option<PathBuf>,
        #[arg(long)]
        right: Option<PathBuf>,
        /// Boundary band width in pixels.
        #[arg(long, default_value_t = pupilcheck::biou::DEFAULT_D)]
        d: u32,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Score every face in a manifest and write ROC, histogram and metrics.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Boundary band width in pixels.
        #[arg(long, default_value_t = pupilcheck::biou::DEFAULT_D)]
        d: u32,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// AUC as a function of the boundary band width.
    SweepD {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        d: Vec<u32>,
        #[arg(long)]
        outdir: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Generate the seeded synthetic mask corpus and its manifest.
    Synth {
        /// JSON spec; omitted fields take their defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        outdir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SegmenterArg {
    ExternalMask,
    Classical,
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    #[arg(long, default_value_t = ClassicalConfig::default().dark_fraction)]
    dark_fraction: f64,
    #[arg(long, default_value_t = ClassicalConfig::default().min_area)]
    min_area: usize,
    #[arg(long, default_value_t = ClassicalConfig::default().max_border_fraction)]
    max_border_fraction: f64,
}

impl ClassicalArgs {
    fn resolve(&self) -> ClassicalConfig {
        ClassicalConfig {
            dark_fraction: self.dark_fraction,
            min_area: self.min_area,
            max_border_fraction: self.max_border_fraction,
        }
    }
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, default_value_t = pupilcheck::pipeline::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_enum, default_value = "external-mask")]
    segmenter: SegmenterArg,
    #[arg(long, default_value_t = pupilcheck::pipeline::DEFAULT_MIN_PUPIL_AREA)]
    min_pupil_area: usize,
    #[arg(long)]
    require_both_eyes: bool,
    #[command(flatten)]
    classical: ClassicalArgs,
}

impl PipelineArgs {
    fn resolve(&self, d: u32) -> Result<PipelineConfig, CliError> {
        let config = PipelineConfig {
            d,
            threshold: self.threshold,
            segmenter: match self.segmenter {
                SegmenterArg::ExternalMask => Segmenter::ExternalMask,
                SegmenterArg::Classical => Segmenter::Classical,
            },
            min_pupil_area: self.min_pupil_area,
            require_both_eyes: self.require_both_eyes,
            classical: self.classical.resolve(),
        };
        config.validate()?;
        Ok(config)
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("output serializes")
    );
}

fn load_eye(path: &Path, config: &PipelineConfig) -> Result<EyeInput, CliError> {
    Ok(match config.segmenter {
        Segmenter::ExternalMask => EyeInput::Mask(read_mask(path)?),
        Segmenter::Classical => EyeInput::Crop(read_gray(path)?),
    })
}

fn segment(eye: &Path, out: &Path, classical: ClassicalConfig) -> Result<(), CliError> {
    let img = read_gray(eye)?;
    let mask = segment_pupil_classical(&img, &classical)?;
    write_mask(out, &mask)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        out: &'a Path,
        area: usize,
        config: ClassicalConfig,
    }
    print_json(&Summary {
        out,
        area: mask.count(),
        config: classical,
    });
    Ok(())
}

fn fit(mask: &Path, json: &Path) -> Result<(), CliError> {
    let report = fit_mask(&read_mask(mask)?)?;
    let mut text = serde_json::to_string_pretty(&report).expect("fit report serializes");
    text.push('\n');
    std::fs::write(json, text).map_err(|source| pupilcheck::io::IoError::Io {
        path: json.to_path_buf(),
        source,
    })?;
    print_json(&report);
    Ok(())
}

fn score(
    left: Option<&Path>,
    right: Option<&Path>,
    config: PipelineConfig,
) -> Result<(), CliError> {
    let left = left.map(|p| load_eye(p, &config)).transpose()?;
    let right = right.map(|p| load_eye(p, &config)).transpose()?;
    let face_id = "face";
    let face = score_face(face_id, left.as_ref(), right.as_ref(), &config);
    #[derive(Serialize)]
    struct Output {
        #[serde(flatten)]
        face: pupilcheck::FaceScore,
        config: PipelineConfig,
    }
    print_json(&Output { face, config });
    Ok(())
}

fn evaluate(
    manifest: &Path,
    outdir: &Path,
    bins: usize,
    config: PipelineConfig,
) -> Result<(), CliError> {
    if bins < 2 {
        return Err(eval::EvalError::InvalidBins(bins).into());
    }
    let manifest = eval::read_manifest(manifest)?;
    let data = eval::prepare_dataset(&manifest, &config);
    let result = eval::evaluate(&data, &config, bins)?;
    report::write_evaluation(outdir, &result, &config)?;
    print_json(&report::metrics(&result, &config));
    Ok(())
}

fn sweep(
    manifest: &Path,
    d_values: &[u32],
    outdir: &Path,
    config: PipelineConfig,
) -> Result<(), CliError> {
    if d_values.is_empty() || d_values.contains(&0) {
        return Err(eval::EvalError::InvalidDValues.into());
    }
    let manifest = eval::read_manifest(manifest)?;
    let data = eval::prepare_dataset(&manifest, &config);
    let rows = eval::sweep_d(&data, d_values, &config)?;
    let iou_auc = eval::iou_auc(&data, &config)?;
    report::write_sweep(outdir, &rows, iou_auc, &config)?;
    #[derive(Serialize)]
    struct Row {
        d: u32,
        auc: f64,
    }
    for &(d, auc) in &rows {
        print_json(&Row { d, auc });
    }
    Ok(())
}

fn synth(spec: Option<&Path>, outdir: &Path) -> Result<(), CliError> {
    let spec: SynthSpec = match spec {
        None => SynthSpec::default(),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|source| pupilcheck::io::IoError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::new(
                    Class::Data,
                    "InvalidSpec",
                    format!("{}: {e}", path.display()),
                )
            })?
        }
    };
    let manifest = eval::generate_synth_corpus(&spec, outdir)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        outdir: &'a Path,
        n_faces: usize,
        spec: SynthSpec,
    }
    print_json(&Summary {
        outdir,
        n_faces: manifest.entries.len(),
        spec,
    });
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Segment {
            eye,
            out,
            classical,
        } => segment(&eye, &out, classical.resolve()),
        Command::Fit { mask, json } => fit(&mask, &json),
        Command::Score {
            left,
            right,
            d,
            pipeline,
        } => score(left.as_deref(), right.as_deref(), pipeline.resolve(d)?),
        Command::Evaluate {
            manifest,
            outdir,
            bins,
            d,
            pipeline,
        } => evaluate(&manifest, &outdir, bins, pipeline.resolve(d)?),
        Command::SweepD {
            manifest,
            d,
            outdir,
            pipeline,
        } => sweep(
            &manifest,
            &d,
            &outdir,
            pipeline.resolve(pupilcheck::biou::DEFAULT_D)?,
        ),
        Command::Synth { spec, outdir } => synth(spec.as_deref(), &outdir),
    }
}

fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::usage(e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return err.class.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.class.exit_code()
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args_os())
}
