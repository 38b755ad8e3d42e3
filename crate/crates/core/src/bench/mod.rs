//! Benchmark harness: sequence ingestion, OPE metrics, synthetic sequences and runs.

mod metrics;
mod sequence;
mod synth;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use metrics::{
    center_error, evaluate, overlap, precision_thresholds, success_thresholds, EvalResult,
    PRECISION_MAX_THRESHOLD, PRECISION_SCORE_THRESHOLD, SUCCESS_STEPS,
};
pub use sequence::{
    format_boxes, load_sequence, parse_boxes, read_boxes, write_boxes, FrameSource, Sequence,
    ATTRIBUTES_FILE, GROUND_TRUTH_FILES, IMAGE_DIR,
};
pub use synth::{synth_sequence, SynthSpec};

use crate::baseline::{CtConfig, CtTracker};
use crate::error::{Error, Result};
use crate::imaging::Rect;
use crate::tracker::{ActTracker, FrameOutcome, Tracker, TrackerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrackerKind {
    Act(TrackerConfig),
    Ct(CtConfig),
}

impl TrackerKind {
    pub fn name(&self) -> &'static str {
        match self {
            TrackerKind::Act(_) => "act",
            TrackerKind::Ct(_) => "ct-baseline",
        }
    }
}

/// Trajectory and per-frame diagnostics of one run. Frame 0 is the initial box.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub boxes: Vec<Rect>,
    pub outcomes: Vec<FrameOutcome>,
    /// Frames per second over initialization and tracking.
    pub fps: f64,
}

impl RunOutput {
    pub fn rectified_frames(&self) -> usize {
        self.outcomes.iter().filter(|o| o.rectified).count()
    }
}

/// One-pass run: initialize on the first ground-truth box, then track every frame.
pub fn run_sequence(seq: &Sequence, kind: &TrackerKind) -> Result<RunOutput> {
    let init_box = *seq.ground_truth.first().ok_or_else(|| Error::Sequence {
        path: seq.name.clone().into(),
        message: "empty sequence".into(),
    })?;
    let start = Instant::now();
    let first = seq.frame(0)?;
    let mut tracker: Box<dyn Tracker> = match kind {
        TrackerKind::Act(c) => Box::new(ActTracker::init(&first, init_box, c.clone())?),
        TrackerKind::Ct(c) => Box::new(CtTracker::init(&first, init_box, c.clone())?),
    };
    let mut boxes = Vec::with_capacity(seq.len());
    let mut outcomes = Vec::with_capacity(seq.len().saturating_sub(1));
    boxes.push(init_box);
    for i in 1..seq.len() {
        let outcome = tracker.track(&seq.frame(i)?)?;
        boxes.push(outcome.rect);
        outcomes.push(outcome);
    }
    let secs = start.elapsed().as_secs_f64();
    let fps = if secs > 0.0 { seq.len() as f64 / secs } else { f64::INFINITY };
    Ok(RunOutput {
        boxes,
        outcomes,
        fps,
    })
}

/// Runs and evaluates one sequence.
pub fn run_and_evaluate(seq: &Sequence, kind: &TrackerKind) -> Result<(RunOutput, EvalResult)> {
    let run = run_sequence(seq, kind)?;
    let mut eval = evaluate(&run.boxes, &seq.ground_truth)?;
    eval.fps = Some(run.fps);
    Ok((run, eval))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub sequence: String,
    pub frames: usize,
    pub precision_20: f64,
    pub auc: f64,
    pub fps: f64,
    pub attributes: Vec<String>,
}

impl BenchRow {
    pub fn new(seq: &Sequence, eval: &EvalResult) -> Self {
        BenchRow {
            sequence: seq.name.clone(),
            frames: seq.len(),
            precision_20: eval.precision_20,
            auc: eval.auc,
            fps: eval.fps.unwrap_or(0.0),
            attributes: seq.attributes.clone(),
        }
    }
}

/// Mean precision score and AUC of a group of sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupMean {
    pub sequences: usize,
    pub precision_20: f64,
    pub auc: f64,
}

pub fn mean_of<'a>(rows: impl IntoIterator<Item = &'a BenchRow>) -> GroupMean {
    let mut g = GroupMean {
        sequences: 0,
        precision_20: 0.0,
        auc: 0.0,
    };
    for r in rows {
        g.sequences += 1;
        g.precision_20 += r.precision_20;
        g.auc += r.auc;
    }
    if g.sequences > 0 {
        g.precision_20 /= g.sequences as f64;
        g.auc /= g.sequences as f64;
    }
    g
}

/// Grouped means per attribute tag.
pub fn attribute_means(rows: &[BenchRow]) -> BTreeMap<String, GroupMean> {
    let mut tags: Vec<&String> = rows.iter().flat_map(|r| &r.attributes).collect();
    tags.sort();
    tags.dedup();
    tags.into_iter()
        .map(|t| (t.clone(), mean_of(rows.iter().filter(|r| r.attributes.contains(t)))))
        .collect()
}

/// Plain-text summary table.
pub fn summary_table(rows: &[BenchRow]) -> String {
    let mut s = format!("{:<24} {:>7} {:>9} {:>7} {:>8}\n", "sequence", "frames", "prec@20", "auc", "fps");
    for r in rows {
        s.push_str(&format!(
            "{:<24} {:>7} {:>9.3} {:>7.3} {:>8.1}\n",
            r.sequence, r.frames, r.precision_20, r.auc, r.fps
        ));
    }
    let all = mean_of(rows);
    s.push_str(&format!(
        "{:<24} {:>7} {:>9.3} {:>7.3}\n",
        "mean",
        all.sequences,
        all.precision_20,
        all.auc
    ));
    for (tag, g) in attribute_means(rows) {
        s.push_str(&format!(
            "{:<24} {:>7} {:>9.3} {:>7.3}\n",
            format!("[{tag}]"),
            g.sequences,
            g.precision_20,
            g.auc
        ));
    }
    s
}
