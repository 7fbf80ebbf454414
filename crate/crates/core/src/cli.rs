//! Command-line front end.
//!
//! Exit status: 0 success, 1 operational failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bits::BitVector;
use crate::classic::{BlockEmbedder, BlockExtractor, MatrixCode, Scheme};
use crate::codec::NeuralCodec;
use crate::error::Error;
use crate::fnn::{parse_architecture, DenseNetwork, OutputThreshold};
use crate::image::{embed_image, extract_image, read_pgm, write_pgm, BlockPlan, GrayImage};
use crate::task::{Task, TaskSpec};
use crate::training::hill::{hill_climb_train, HillClimbConfig};
use crate::training::preset::{run_preset, train_backprop, Preset};
use crate::training::BackpropConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "stegonet",
    version,
    about = "LSB and matrix-coding steganography with trained feed-forward networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a network from a preset or an explicit task.
    Train(TrainArgs),
    /// Hide a message in a PGM image.
    Embed(EmbedArgs),
    /// Recover a message from a stego PGM image.
    Extract(ExtractArgs),
    /// Measure a model's error rate against the exact code.
    Eval(EvalArgs),
    /// Print rate, distortion and efficiency of the k-bit matrix code.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// appendixA, appendixB, appendixC or fig2
    #[arg(long, conflicts_with_all = ["task", "arch", "trainer"])]
    preset: Option<String>,
    /// lsb:N, matrix:K, matrix-c, decode-lsb:N or decode-matrix:K
    #[arg(long)]
    task: Option<String>,
    /// Layer sizes such as 5-12s-3b
    #[arg(long)]
    arch: Option<String>,
    /// backprop or hill
    #[arg(long)]
    trainer: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "model.fnn")]
    model: PathBuf,
    #[arg(long, default_value = "report.txt")]
    report: PathBuf,
    /// Weight trace CSV for hill climbing
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    cover: PathBuf,
    /// Text file of 0/1 characters, or 0x-prefixed hex
    #[arg(long)]
    message: PathBuf,
    /// lsb, matrix:K or model:PATH
    #[arg(long)]
    scheme: String,
    /// Task of a model-backed scheme; inferred from the model's arity if omitted
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to <out>.meta
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    stego: PathBuf,
    /// Defaults to <stego>.meta
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Decoder network to use instead of the exact extractor
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    task: String,
    /// Estimate from N random inputs instead of enumerating
    #[arg(long)]
    sampled: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Write mismatching inputs as CSV
    #[arg(long)]
    mismatches: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    k: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failure(format!("{}: {}", path.display(), e))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            eprintln!("run `stegonet --help` for usage");
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {}", msg);
            EXIT_FAILURE
        }
    }
}

fn second_trace_path(path: &Path, run: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{}-{}.{}", stem, run, ext.to_string_lossy()),
        None => format!("{}-{}", stem, run),
    };
    path.with_file_name(name)
}

fn cmd_train(a: TrainArgs) -> CliResult<i32> {
    if let Some(name) = &a.preset {
        let preset: Preset = name.parse().map_err(usage)?;
        let report = run_preset(preset, a.seed)?;
        write_file(&a.model, report.model.to_document())?;
        write_file(&a.report, report.render())?;
        if !report.traces.is_empty() {
            let trace = a
                .trace
                .clone()
                .unwrap_or_else(|| PathBuf::from("trace.csv"));
            for (i, run) in report.traces.iter().enumerate() {
                let path = if i == 0 {
                    trace.clone()
                } else {
                    second_trace_path(&trace, i + 1)
                };
                write_file(&path, run.trace_csv())?;
            }
        }
        println!("{}", report.render().trim_end());
        return Ok(if report.success {
            EXIT_OK
        } else {
            EXIT_FAILURE
        });
    }

    let task: Task = a
        .task
        .as_deref()
        .ok_or_else(|| usage("train needs --preset or --task"))?
        .parse()
        .map_err(usage)?;
    let layers = match &a.arch {
        Some(arch) => parse_architecture(arch).map_err(usage)?,
        None => task.default_architecture(),
    };
    let spec = TaskSpec::new(task, layers).map_err(usage)?;
    let trainer = a.trainer.as_deref().unwrap_or("backprop");
    let mut out = String::new();
    let _ = writeln!(out, "# stegonet experiment report");
    let _ = writeln!(out, "[config]");
    let _ = writeln!(out, "task={}", spec.task);
    let _ = writeln!(
        out,
        "architecture={}",
        DenseNetwork::zeros(spec.layers.clone())?.architecture()
    );
    let _ = writeln!(out, "trainer={}", trainer);
    let _ = writeln!(out, "seed={}", a.seed);

    let start = std::time::Instant::now();
    let (net, equivalence) = match trainer {
        "backprop" => {
            let defaults = BackpropConfig::default();
            let cfg = BackpropConfig {
                learning_rate: a.lr.unwrap_or(defaults.learning_rate),
                max_epochs: a.epochs.unwrap_or(defaults.max_epochs),
                sample_count: a.samples.unwrap_or(defaults.sample_count),
                early_stop_on_exact: true,
                seed: a.seed,
            };
            if cfg.learning_rate.is_nan()
                || cfg.learning_rate <= 0.0
                || cfg.max_epochs == 0
                || cfg.sample_count == 0
            {
                return Err(usage("--lr, --epochs and --samples must be positive"));
            }
            let _ = writeln!(out, "learning_rate={}", cfg.learning_rate);
            let _ = writeln!(out, "samples={}", cfg.sample_count);
            let _ = writeln!(out, "max_epochs={}", cfg.max_epochs);
            let (outcome, eq) = match train_backprop(&spec, &cfg) {
                Ok(r) => r,
                Err(e @ Error::Diverged { .. }) => {
                    let _ = writeln!(out, "[equivalence]\nverdict=fail\nreason={}", e);
                    write_file(&a.report, &out)?;
                    return Err(e.into());
                }
                Err(e) => return Err(e.into()),
            };
            let _ = writeln!(out, "[loss]\nepoch,loss");
            for (i, l) in outcome.epoch_losses.iter().enumerate() {
                let _ = writeln!(out, "{},{}", i + 1, l);
            }
            (outcome.net, eq)
        }
        "hill" => {
            let defaults = HillClimbConfig::default();
            let cfg = HillClimbConfig {
                delta: a.delta.unwrap_or(defaults.delta),
                iterations: a.iterations.or(a.epochs).unwrap_or(defaults.iterations),
                seed: a.seed,
                ..defaults
            };
            cfg.validate().map_err(usage)?;
            let _ = writeln!(out, "delta={}", cfg.delta);
            let _ = writeln!(out, "iterations={}", cfg.iterations);
            let outcome = hill_climb_train(&cfg, &spec).map_err(|e| match e {
                Error::Unsupported(_) => usage(e),
                other => other.into(),
            })?;
            if let Some(path) = &a.trace {
                write_file(path, outcome.trace_csv())?;
            }
            let eq = crate::codec::exhaustive_report(
                &outcome.net,
                &spec.task,
                OutputThreshold::default(),
            )?;
            (outcome.net, eq)
        }
        other => {
            return Err(usage(format!(
                "unknown trainer {:?}, expected backprop or hill",
                other
            )))
        }
    };
    let _ = writeln!(out, "[final weights]");
    out.push_str(&net.to_document());
    let _ = writeln!(out, "[equivalence]");
    out.push_str(&equivalence.summary());
    let _ = writeln!(
        out,
        "[timing]\nwall_time_ms={}",
        start.elapsed().as_millis()
    );
    write_file(&a.model, net.to_document())?;
    write_file(&a.report, &out)?;
    println!("{}", out.trim_end());
    Ok(if equivalence.is_exact() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

/// `key=value` metadata stored next to a stego image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sidecar {
    pub scheme: SidecarScheme,
    pub msg_bits: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SidecarScheme {
    Lsb { n1: usize },
    Matrix { k: u32 },
    Model { task: Task },
}

impl SidecarScheme {
    fn extractor(&self) -> crate::error::Result<Box<dyn BlockExtractor>> {
        Ok(match *self {
            SidecarScheme::Lsb { n1 } => Scheme::Lsb { n1 }.extractor(),
            SidecarScheme::Matrix { k } => Scheme::matrix(k)?.extractor(),
            SidecarScheme::Model { task } => task.message_extractor(),
        })
    }

    fn layout(&self) -> crate::error::Result<crate::classic::BlockLayout> {
        Ok(match *self {
            SidecarScheme::Lsb { n1 } => Scheme::Lsb { n1 }.layout(),
            SidecarScheme::Matrix { k } => Scheme::matrix(k)?.layout(),
            SidecarScheme::Model { task } => task.layout(),
        })
    }
}

impl Sidecar {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.scheme {
            SidecarScheme::Lsb { n1 } => {
                let _ = writeln!(out, "scheme=lsb\nn1={}", n1);
            }
            SidecarScheme::Matrix { k } => {
                let _ = writeln!(out, "scheme=matrix\nk={}", k);
            }
            SidecarScheme::Model { task } => {
                let _ = writeln!(out, "scheme=model\ntask={}", task);
                match task {
                    Task::MatrixCoding(c) => {
                        let _ = writeln!(out, "k={}", c.k());
                    }
                    Task::MatrixCodingAppendixC => {
                        let _ = writeln!(out, "k=2");
                    }
                    _ => {
                        let _ = writeln!(out, "n1={}", task.cover_arity());
                    }
                }
            }
        }
        let _ = writeln!(out, "msg_bits={}", self.msg_bits);
        let _ = writeln!(out, "width={}", self.width);
        let _ = writeln!(out, "height={}", self.height);
        out
    }

    pub fn parse(text: &str) -> crate::error::Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(n + 1, format!("expected key=value, found {:?}", line))
            })?;
            if fields
                .insert(k.trim().to_string(), (n + 1, v.trim().to_string()))
                .is_some()
            {
                return Err(Error::parse(n + 1, format!("duplicate key {:?}", k)));
            }
        }
        let end = text.lines().count() + 1;
        let get = |key: &str| {
            fields
                .get(key)
                .ok_or_else(|| Error::parse(end, format!("missing key {:?}", key)))
        };
        let number = |key: &str| -> crate::error::Result<usize> {
            let (line, v) = get(key)?;
            v.parse().map_err(|_| {
                Error::parse(
                    *line,
                    format!("{} must be a non-negative integer, found {:?}", key, v),
                )
            })
        };
        let (scheme_line, scheme) = get("scheme")?;
        let scheme = match scheme.as_str() {
            "lsb" => {
                let n1 = number("n1")?;
                if n1 == 0 {
                    return Err(Error::parse(get("n1")?.0, "n1 must be positive"));
                }
                SidecarScheme::Lsb { n1 }
            }
            "matrix" => {
                let k = number("k")?;
                MatrixCode::new(k as u32)
                    .map_err(|e| Error::parse(get("k").unwrap().0, e.to_string()))?;
                SidecarScheme::Matrix { k: k as u32 }
            }
            "model" => {
                let (line, task) = get("task")?;
                let task: Task = task
                    .parse()
                    .map_err(|e: Error| Error::parse(*line, e.to_string()))?;
                if task.is_decoder() {
                    return Err(Error::parse(*line, "model scheme needs an embedding task"));
                }
                SidecarScheme::Model { task }
            }
            other => {
                return Err(Error::parse(
                    *scheme_line,
                    format!("unknown scheme {:?}", other),
                ))
            }
        };
        Ok(Sidecar {
            scheme,
            msg_bits: number("msg_bits")?,
            width: number("width")?,
            height: number("height")?,
        })
    }

    /// Checks the sidecar against the image it describes.
    pub fn check_image(&self, img: &GrayImage) -> crate::error::Result<BlockPlan> {
        if img.width() != self.width || img.height() != self.height {
            return Err(Error::Invalid(format!(
                "sidecar describes a {}x{} image, stego image is {}x{}",
                self.width,
                self.height,
                img.width(),
                img.height()
            )));
        }
        BlockPlan::for_layout(img.pixel_count(), self.scheme.layout()?, self.msg_bits)
    }
}

fn default_sidecar(image: &Path) -> PathBuf {
    let mut s = image.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn load_image(path: &Path) -> CliResult<GrayImage> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    read_pgm(&bytes).map_err(|e| CliError::Failure(format!("{}: {}", path.display(), e)))
}

fn load_model(path: &Path) -> CliResult<DenseNetwork> {
    DenseNetwork::from_document(&read_text(path)?)
        .map_err(|e| CliError::Failure(format!("{}: {}", path.display(), e)))
}

/// Task an embedding network most plausibly implements, from its arity.
fn infer_embedding_task(net: &DenseNetwork) -> Option<Task> {
    let (i, o) = (net.input_arity(), net.output_arity());
    if i == 2 * o {
        return Some(Task::Lsb { n1: o });
    }
    (1..=MatrixCode::MAX_K)
        .filter_map(|k| MatrixCode::new(k).ok())
        .find(|c| c.n() == o && c.n() + c.k() == i)
        .map(Task::MatrixCoding)
}

fn cmd_embed(a: EmbedArgs) -> CliResult<i32> {
    let cover = load_image(&a.cover)?;
    let message = BitVector::parse(&read_text(&a.message)?)
        .map_err(|e| CliError::Failure(format!("{}: {}", a.message.display(), e)))?;

    let (embedder, scheme): (Box<dyn BlockEmbedder>, SidecarScheme) = if a.scheme == "lsb" {
        (Scheme::lsb().embedder(), SidecarScheme::Lsb { n1: 1 })
    } else if let Some(k) = a.scheme.strip_prefix("matrix:") {
        let k: u32 = k
            .parse()
            .map_err(|_| usage(format!("bad scheme {:?}", a.scheme)))?;
        let scheme = Scheme::matrix(k).map_err(usage)?;
        (scheme.embedder(), SidecarScheme::Matrix { k })
    } else if let Some(path) = a.scheme.strip_prefix("model:") {
        let net = load_model(Path::new(path))?;
        let task = match &a.task {
            Some(t) => t.parse().map_err(usage)?,
            None => infer_embedding_task(&net).ok_or_else(|| {
                CliError::Failure(format!(
                    "cannot infer an embedding task for a {}-input {}-output model; pass --task",
                    net.input_arity(),
                    net.output_arity()
                ))
            })?,
        };
        if task.is_decoder() {
            return Err(CliError::Failure(format!(
                "{} is a decoder task, not an embedding scheme",
                task
            )));
        }
        let codec = NeuralCodec::new(net, task, OutputThreshold::default())?;
        (Box::new(codec), SidecarScheme::Model { task })
    } else {
        return Err(usage(format!(
            "unknown scheme {:?}, expected lsb, matrix:K or model:PATH",
            a.scheme
        )));
    };

    BlockPlan::for_layout(cover.pixel_count(), scheme.layout()?, message.len())?;
    let stego = embed_image(&cover, &message, embedder.as_ref())?;
    let sidecar = Sidecar {
        scheme,
        msg_bits: message.len(),
        width: cover.width(),
        height: cover.height(),
    };
    write_file(&a.out, write_pgm(&stego))?;
    let sidecar_path = a.sidecar.unwrap_or_else(|| default_sidecar(&a.out));
    write_file(&sidecar_path, sidecar.render())?;
    println!(
        "embedded {} bits into {} ({}x{})",
        message.len(),
        a.out.display(),
        stego.width(),
        stego.height()
    );
    Ok(EXIT_OK)
}

fn cmd_extract(a: ExtractArgs) -> CliResult<i32> {
    let stego = load_image(&a.stego)?;
    let sidecar_path = a
        .sidecar
        .clone()
        .unwrap_or_else(|| default_sidecar(&a.stego));
    let sidecar = Sidecar::parse(&read_text(&sidecar_path)?)
        .map_err(|e| CliError::Failure(format!("{}: {}", sidecar_path.display(), e)))?;
    sidecar
        .check_image(&stego)
        .map_err(|e| CliError::Failure(format!("{}: {}", sidecar_path.display(), e)))?;

    let message = match &a.model {
        Some(path) => {
            let net = load_model(path)?;
            let task = match sidecar.scheme {
                SidecarScheme::Lsb { n1: 1 }
                | SidecarScheme::Model {
                    task: Task::Lsb { .. },
                } => Task::DecoderLsb {
                    n1: net.input_arity(),
                },
                SidecarScheme::Lsb { n1 } => Task::DecoderLsb { n1 },
                SidecarScheme::Matrix { k } => Task::DecoderMatrix(MatrixCode::new(k)?),
                SidecarScheme::Model {
                    task: Task::MatrixCoding(c),
                } => Task::DecoderMatrix(c),
                SidecarScheme::Model { task } => {
                    return Err(CliError::Failure(format!("no decoder task for {}", task)));
                }
            };
            let codec = NeuralCodec::new(net, task, OutputThreshold::default())?;
            extract_image(&stego, sidecar.msg_bits, &codec)?
        }
        None => extract_image(
            &stego,
            sidecar.msg_bits,
            sidecar.scheme.extractor()?.as_ref(),
        )?,
    };
    write_file(&a.out, format!("{}\n", message))?;
    println!("extracted {} bits to {}", message.len(), a.out.display());
    Ok(EXIT_OK)
}

fn cmd_eval(a: EvalArgs) -> CliResult<i32> {
    let task: Task = a.task.parse().map_err(usage)?;
    let threshold = OutputThreshold::new(a.threshold).map_err(usage)?;
    let net = load_model(&a.model)?;
    let codec = NeuralCodec::new(net, task, threshold)?;
    let (mode, report) = match a.sampled {
        Some(0) => return Err(usage("--sampled must be positive")),
        Some(n) => ("sampled", codec.sampled_error(n, a.seed)?),
        None => ("exhaustive", codec.exhaustive_equivalence()?),
    };
    if let Some(path) = &a.mismatches {
        write_file(path, report.mismatches_csv())?;
    }
    println!("task={}\nmode={}", task, mode);
    print!("{}", report.summary());
    Ok(EXIT_OK)
}

/// Fixed six decimals with trailing zeros removed.
fn decimal(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

pub fn stats_text(k: u32) -> crate::error::Result<String> {
    let code = MatrixCode::new(k)?;
    let s = code.stats();
    Ok(format!(
        "k={}\nn={}\nrate={}\ndistortion={}\nefficiency={}\n",
        k,
        code.n(),
        decimal(s.embedding_rate),
        decimal(s.avg_distortion),
        decimal(s.efficiency)
    ))
}

fn cmd_stats(a: StatsArgs) -> CliResult<i32> {
    print!("{}", stats_text(a.k).map_err(usage)?);
    Ok(EXIT_OK)
}
