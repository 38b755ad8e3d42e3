//! Command-line front end: `track`, `eval`, `synth` and `bench`.
//!
//! Configuration comes from a `key = value` file (flag `--config`, or the file named by
//! `ACT_CONFIG`) with every unspecified key at its default; command-line flags override
//! file values. Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal invariant violation.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::baseline::CtConfig;
use crate::bench::{
    load_sequence, read_boxes, run_and_evaluate, summary_table, synth_sequence, write_boxes,
    BenchRow, EvalResult, SynthSpec, TrackerKind, GROUND_TRUTH_FILES, IMAGE_DIR,
};
use crate::error::Error;
use crate::kv::KvFile;
use crate::tracker::TrackerConfig;

pub const CONFIG_ENV: &str = "ACT_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrackerChoice {
    Act,
    CtBaseline,
}

impl std::str::FromStr for TrackerChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "act" => Ok(TrackerChoice::Act),
            "ct-baseline" => Ok(TrackerChoice::CtBaseline),
            other => Err(format!("unknown tracker {other:?}")),
        }
    }
}

impl TrackerChoice {
    fn as_str(self) -> &'static str {
        match self {
            TrackerChoice::Act => "act",
            TrackerChoice::CtBaseline => "ct-baseline",
        }
    }
}

/// Effective configuration of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tracker: TrackerConfig,
    pub ct: CtConfig,
    pub choice: TrackerChoice,
    pub sequence: Option<PathBuf>,
    pub output: PathBuf,
    pub verbose: bool,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tracker: TrackerConfig::default(),
            ct: CtConfig::default(),
            choice: TrackerChoice::Act,
            sequence: None,
            output: PathBuf::from("out"),
            verbose: false,
            workers: 1,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> crate::Result<Self> {
        let mut kv = KvFile::parse(text)?;
        let mut c = RunConfig::default();
        let t = &mut c.tracker;
        kv.take("bags", &mut t.bags)?;
        kv.take("templates_per_bag", &mut t.templates_per_bag)?;
        kv.take("selected_per_bag", &mut t.selected_per_bag)?;
        kv.take("confidence_threshold", &mut t.confidence_threshold)?;
        kv.take("template_threshold", &mut t.template_threshold)?;
        kv.take("search_radius", &mut t.search_radius)?;
        kv.take("positive_radius", &mut t.positive_radius)?;
        kv.take("negative_inner", &mut t.negative_inner)?;
        kv.take("negative_outer", &mut t.negative_outer)?;
        kv.take("positive_count", &mut t.positive_count)?;
        kv.take("negative_count", &mut t.negative_count)?;
        kv.take("eta", &mut t.eta)?;
        kv.take("lambda", &mut t.lambda)?;
        kv.take("selection_interval", &mut t.selection_interval)?;
        kv.take("seed", &mut t.seed)?;
        kv.take("ct_features", &mut c.ct.features)?;
        kv.take("tracker", &mut c.choice)?;
        kv.take_opt("sequence", &mut c.sequence)?;
        kv.take("output", &mut c.output)?;
        kv.take("verbose", &mut c.verbose)?;
        kv.take("workers", &mut c.workers)?;
        kv.finish()?;
        c.ct.seed = c.tracker.seed;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("read config {}", path.display()), e))?;
        RunConfig::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let t = &self.tracker;
        let seq = self
            .sequence
            .as_ref()
            .map_or_else(|| "none".to_string(), |p| p.display().to_string());
        format!(
            "bags = {}\ntemplates_per_bag = {}\nselected_per_bag = {}\nconfidence_threshold = {}\n\
             template_threshold = {}\nsearch_radius = {}\npositive_radius = {}\nnegative_inner = {}\n\
             negative_outer = {}\npositive_count = {}\nnegative_count = {}\neta = {}\nlambda = {}\n\
             selection_interval = {}\nseed = {}\nct_features = {}\ntracker = {}\nsequence = {}\n\
             output = {}\nverbose = {}\nworkers = {}\n",
            t.bags,
            t.templates_per_bag,
            t.selected_per_bag,
            t.confidence_threshold,
            t.template_threshold,
            t.search_radius,
            t.positive_radius,
            t.negative_inner,
            t.negative_outer,
            t.positive_count,
            t.negative_count,
            t.eta,
            t.lambda,
            t.selection_interval,
            t.seed,
            self.ct.features,
            self.choice.as_str(),
            seq,
            self.output.display(),
            self.verbose,
            self.workers,
        )
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.tracker.validate()?;
        self.ct.validate()?;
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> TrackerKind {
        match self.choice {
            TrackerChoice::Act => TrackerKind::Act(self.tracker.clone()),
            TrackerChoice::CtBaseline => TrackerKind::Ct(self.ct.clone()),
        }
    }
}

/// Failure of a command with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) => 1,
            Error::InvalidFrame(_)
            | Error::OutOfBounds { .. }
            | Error::TargetTooSmall { .. }
            | Error::FrameSizeMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::Parse { .. }
            | Error::SequenceNotFound(_)
            | Error::Sequence { .. }
            | Error::MotionEscapes { .. }
            | Error::SnapshotVersion(_)
            | Error::Io { .. }
            | Error::Image { .. }
            | Error::Json(_) => 2,
            Error::TemplatePlacement(_)
            | Error::EmptySamples(_)
            | Error::GeometryMismatch(_)
            | Error::SelectionSize { .. }
            | Error::EmptyHistory => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Outcome of `track`.
#[derive(Debug, Clone)]
pub struct TrackSummary {
    pub sequence: String,
    pub frames: usize,
    pub fps: f64,
    pub rectified: usize,
    pub trajectory: PathBuf,
}

fn create_dir(dir: &Path) -> crate::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("create {}", dir.display()), e))
}

pub fn cmd_track(config: &RunConfig, sequence: &Path) -> CliResult<TrackSummary> {
    config.validate()?;
    let seq = load_sequence(sequence)?;
    let (run, eval) = run_and_evaluate(&seq, &config.kind())?;
    create_dir(&config.output)?;
    let trajectory = config.output.join(format!("{}_trajectory.txt", seq.name));
    write_boxes(&trajectory, &run.boxes)?;
    if config.verbose {
        let mut rows = String::from("frame,confidence,rectified,churn,blended\n");
        for (i, o) in run.outcomes.iter().enumerate() {
            rows.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                o.confidence,
                o.rectified,
                o.churn,
                o.blended
            ));
        }
        let diag = config.output.join(format!("{}_diagnostics.csv", seq.name));
        std::fs::write(&diag, rows).map_err(|e| Error::io(format!("write {}", diag.display()), e))?;
        eval.export(&config.output.join(format!("{}_eval.json", seq.name)))?;
    }
    Ok(TrackSummary {
        sequence: seq.name,
        frames: run.boxes.len(),
        fps: run.fps,
        rectified: run.rectified_frames(),
        trajectory,
    })
}

pub fn cmd_eval(trajectory: &Path, ground_truth: &Path, output: &Path) -> CliResult<EvalResult> {
    let traj = read_boxes(trajectory)?;
    let gt = read_boxes(ground_truth)?;
    let result = crate::bench::evaluate(&traj, &gt).map_err(|e| match e {
        Error::LengthMismatch {
            trajectory: t,
            ground_truth: g,
        } => CliError {
            code: 2,
            message: format!(
                "length mismatch: {} has {t} boxes, {} has {g}",
                trajectory.display(),
                ground_truth.display()
            ),
        },
        other => other.into(),
    })?;
    result.export(output)?;
    Ok(result)
}

/// Writes `img/0001.png ...` and `groundtruth_rect.txt` under `out_dir`.
pub fn cmd_synth(spec_path: &Path, out_dir: &Path) -> CliResult<usize> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| Error::io(format!("read spec {}", spec_path.display()), e))?;
    let spec = SynthSpec::parse(&text)?;
    let seq = synth_sequence(&spec)?;
    let img = out_dir.join(IMAGE_DIR);
    create_dir(&img)?;
    for i in 0..seq.len() {
        let path = img.join(format!("{:04}.png", i + 1));
        seq.frame(i)?
            .to_image()
            .save(&path)
            .map_err(|source| Error::Image { path, source })?;
    }
    write_boxes(&out_dir.join(GROUND_TRUTH_FILES[0]), &seq.ground_truth)?;
    Ok(seq.len())
}

/// Tracks and evaluates every sequence directory under `dir`.
pub fn cmd_bench(config: &RunConfig, dir: &Path) -> CliResult<Vec<BenchRow>> {
    config.validate()?;
    if !dir.is_dir() {
        return Err(Error::SequenceNotFound(dir.to_path_buf()).into());
    }
    let mut seq_dirs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(format!("list {}", dir.display()), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(IMAGE_DIR).is_dir())
        .collect();
    seq_dirs.sort();
    if seq_dirs.is_empty() {
        return Err(Error::Sequence {
            path: dir.to_path_buf(),
            message: "no sequence directories".into(),
        }
        .into());
    }
    create_dir(&config.output)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError {
            code: 3,
            message: format!("worker pool: {e}"),
        })?;
    let kind = config.kind();
    let rows: Vec<crate::Result<BenchRow>> = pool.install(|| {
        seq_dirs
            .par_iter()
            .map(|p| {
                let seq = load_sequence(p)?;
                let (run, eval) = run_and_evaluate(&seq, &kind)?;
                write_boxes(&config.output.join(format!("{}_trajectory.txt", seq.name)), &run.boxes)?;
                eval.export(&config.output.join(format!("{}_eval.json", seq.name)))?;
                Ok(BenchRow::new(&seq, &eval))
            })
            .collect()
    });
    let rows: Vec<BenchRow> = rows.into_iter().collect::<crate::Result<_>>()?;
    let mut csv = String::from("sequence,frames,precision_20,auc,fps\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{},{}\n", r.sequence, r.frames, r.precision_20, r.auc, r.fps));
    }
    let path = config.output.join("summary.csv");
    std::fs::write(&path, csv).map_err(|e| Error::io(format!("write {}", path.display()), e))?;
    Ok(rows)
}

#[derive(Debug, Parser)]
#[command(name = "act", about = "Adaptive compressive tracking", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track one sequence and write its trajectory.
    Track {
        /// Sequence directory (img/ + groundtruth_rect.txt).
        sequence: Option<PathBuf>,
        #[command(flatten)]
        opts: ConfigFlags,
    },
    /// Score a trajectory against ground truth.
    Eval {
        trajectory: PathBuf,
        ground_truth: PathBuf,
        /// Output JSON path; curve CSVs are written next to it.
        #[arg(short, long, default_value = "eval.json")]
        output: PathBuf,
    },
    /// Render a synthetic sequence from a spec file.
    Synth { spec: PathBuf, output: PathBuf },
    /// Track and evaluate every sequence in a directory.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: ConfigFlags,
    },
    /// Print the effective configuration.
    Config {
        #[command(flatten)]
        opts: ConfigFlags,
    },
}

#[derive(Debug, Args, Default)]
pub struct ConfigFlags {
    /// Configuration file; defaults to $ACT_CONFIG when set.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub tracker: Option<TrackerChoice>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(short, long)]
    pub verbose: bool,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bags: Option<usize>,
    #[arg(long)]
    pub templates_per_bag: Option<usize>,
    #[arg(long)]
    pub selected_per_bag: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub confidence_threshold: Option<f64>,
    #[arg(long)]
    pub template_threshold: Option<f64>,
    #[arg(long)]
    pub search_radius: Option<f64>,
    #[arg(long)]
    pub positive_radius: Option<f64>,
    #[arg(long)]
    pub negative_inner: Option<f64>,
    #[arg(long)]
    pub negative_outer: Option<f64>,
    #[arg(long)]
    pub positive_count: Option<usize>,
    #[arg(long)]
    pub negative_count: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub selection_interval: Option<usize>,
}

impl ConfigFlags {
    /// File (or `$ACT_CONFIG`) values, then flag overrides.
    pub fn resolve(&self) -> crate::Result<RunConfig> {
        let file = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut c = match file {
            Some(p) => RunConfig::load(&p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($flag:ident => $slot:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { $slot = v; })*
            };
        }
        over! {
            tracker => c.choice,
            output => c.output,
            workers => c.workers,
            seed => c.tracker.seed,
            bags => c.tracker.bags,
            templates_per_bag => c.tracker.templates_per_bag,
            selected_per_bag => c.tracker.selected_per_bag,
            confidence_threshold => c.tracker.confidence_threshold,
            template_threshold => c.tracker.template_threshold,
            search_radius => c.tracker.search_radius,
            positive_radius => c.tracker.positive_radius,
            negative_inner => c.tracker.negative_inner,
            negative_outer => c.tracker.negative_outer,
            positive_count => c.tracker.positive_count,
            negative_count => c.tracker.negative_count,
            eta => c.tracker.eta,
            lambda => c.tracker.lambda,
            selection_interval => c.tracker.selection_interval,
        }
        if self.verbose {
            c.verbose = true;
        }
        c.ct.seed = c.tracker.seed;
        c.validate()?;
        Ok(c)
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Track { sequence, opts } => {
            let config = opts.resolve()?;
            let seq = sequence.or_else(|| config.sequence.clone()).ok_or_else(|| CliError {
                code: 1,
                message: "no sequence given".into(),
            })?;
            let s = cmd_track(&config, &seq)?;
            println!(
                "{}: {} frames, {:.1} fps, {} rectified -> {}",
                s.sequence,
                s.frames,
                s.fps,
                s.rectified,
                s.trajectory.display()
            );
        }
        Command::Eval {
            trajectory,
            ground_truth,
            output,
        } => {
            let r = cmd_eval(&trajectory, &ground_truth, &output)?;
            println!(
                "precision_20 = {:.4}, auc = {:.4}, mean center error = {:.2} px -> {}",
                r.precision_20,
                r.auc,
                r.mean_center_error(),
                output.display()
            );
        }
        Command::Synth { spec, output } => {
            let n = cmd_synth(&spec, &output)?;
            println!("wrote {n} frames to {}", output.display());
        }
        Command::Bench { dir, opts } => {
            let config = opts.resolve()?;
            let rows = cmd_bench(&config, &dir)?;
            print!("{}", summary_table(&rows));
        }
        Command::Config { opts } => {
            print!("{}", opts.resolve()?.to_text());
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command. Returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
