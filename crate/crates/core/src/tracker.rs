//! The adaptive compressive tracker.
//!
//! Each frame the tracker scores every integer position within the search radius of the
//! previous location with the naive Bayes classifier. When the best score reaches the
//! confidence threshold it moves there and updates the model: class centers from fresh
//! positive/negative samples, conservative template update, greedy template
//! re-selection, then the classifier parameters. Otherwise it extrapolates the
//! trajectory at constant velocity and leaves the model untouched.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    class_centers, generate_bags, generate_projection, FeatureLayout, ProjectionRow,
    TemplateBag, TemplateCenters,
};
use crate::imaging::{build_integral, GrayFrame, IntegralImage, Rect};
use crate::model::{classify, update_params, update_templates_counted, ClassifierParams};
use crate::ovb::select_templates;

/// Integer top-left position of the target box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Location {
    pub x: i32,
    pub y: i32,
}

impl Location {
    pub const fn new(x: i32, y: i32) -> Self {
        Location { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackerConfig {
    /// Number of template bags (c).
    pub bags: usize,
    /// Templates per bag (n).
    pub templates_per_bag: usize,
    /// Templates selected per bag (k).
    pub selected_per_bag: usize,
    /// Minimum classifier score for accepting a detection.
    pub confidence_threshold: f64,
    /// Raw-vector change below which a stored template is kept.
    pub template_threshold: f64,
    /// Search radius around the previous location, px.
    pub search_radius: f64,
    /// Radius of the positive sampling disc, px.
    pub positive_radius: f64,
    /// Inner and outer radius of the negative sampling annulus, px.
    pub negative_inner: f64,
    pub negative_outer: f64,
    pub positive_count: usize,
    pub negative_count: usize,
    /// Template blend ratio.
    pub eta: f64,
    /// Classifier learning parameter.
    pub lambda: f64,
    /// Re-run template selection every this many model updates.
    pub selection_interval: usize,
    pub seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            bags: 150,
            templates_per_bag: 30,
            selected_per_bag: 5,
            confidence_threshold: 0.0,
            template_threshold: 100.0,
            search_radius: 25.0,
            positive_radius: 2.0,
            negative_inner: 4.0,
            negative_outer: 15.0,
            positive_count: 40,
            negative_count: 40,
            eta: 0.05,
            lambda: 0.85,
            selection_interval: 1,
            seed: 0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.bags == 0 || self.templates_per_bag == 0 || self.selected_per_bag == 0 {
            return bad("bag counts must be >= 1".into());
        }
        if self.selected_per_bag > self.templates_per_bag {
            return bad(format!(
                "selected_per_bag ({}) exceeds templates_per_bag ({})",
                self.selected_per_bag, self.templates_per_bag
            ));
        }
        if self.positive_count == 0 || self.negative_count == 0 || self.selection_interval == 0 {
            return bad("sample counts and selection_interval must be >= 1".into());
        }
        if !(self.search_radius > 0.0) {
            return bad(format!("search_radius must be > 0, got {}", self.search_radius));
        }
        if !(self.positive_radius > 0.0
            && self.positive_radius < self.negative_inner
            && self.negative_inner < self.negative_outer)
        {
            return bad(format!(
                "sampling radii must satisfy 0 < positive ({}) < inner ({}) < outer ({})",
                self.positive_radius, self.negative_inner, self.negative_outer
            ));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lambda must be in (0, 1), got {}", self.lambda));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must be in (0, 1], got {}", self.eta));
        }
        if self.confidence_threshold.is_nan() || self.template_threshold.is_nan() {
            return bad("thresholds must be numbers".into());
        }
        Ok(())
    }
}

/// Integer offsets `(dx, dy)` with `inner < |d| < outer`, row-major. `inner == 0`
/// denotes a disc that includes the origin.
pub fn ring_offsets(inner: f64, outer: f64) -> Vec<(i32, i32)> {
    let r = outer.ceil() as i32;
    let (in2, out2) = (inner * inner, outer * outer);
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as f64;
            let inside_inner = if inner > 0.0 { d2 > in2 } else { true };
            if d2 < out2 && inside_inner {
                out.push((dx, dy));
            }
        }
    }
    out
}

fn positions_in_frame(
    center: Location,
    offsets: &[(i32, i32)],
    frame: (u32, u32),
    box_size: (u32, u32),
) -> Vec<Location> {
    offsets
        .iter()
        .map(|&(dx, dy)| Location::new(center.x + dx, center.y + dy))
        .filter(|l| Rect::new(l.x, l.y, box_size.0, box_size.1).fits_in(frame.0, frame.1))
        .collect()
}

/// Boxes whose positions lie in the ring around `center` and inside the frame. When more
/// than `count` exist a uniform subset without replacement is returned, in row-major
/// order.
pub fn sample_rects(
    center: Location,
    inner: f64,
    outer: f64,
    count: usize,
    frame: (u32, u32),
    box_size: (u32, u32),
    rng: &mut impl Rng,
) -> Vec<Rect> {
    let all = positions_in_frame(center, &ring_offsets(inner, outer), frame, box_size);
    let chosen: Vec<Location> = if all.len() <= count {
        all
    } else {
        let mut idx = index::sample(rng, all.len(), count).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| all[i]).collect()
    };
    chosen
        .into_iter()
        .map(|l| Rect::new(l.x, l.y, box_size.0, box_size.1))
        .collect()
}

/// Constant-velocity prediction from the last four locations, before rounding.
/// Shorter histories repeat the last location.
pub fn extrapolate(history: &[Location]) -> Result<(f64, f64)> {
    let last = *history.last().ok_or(Error::EmptyHistory)?;
    if history.len() < 4 {
        return Ok((last.x as f64, last.y as f64));
    }
    let back = history[history.len() - 4];
    let vx = (last.x - back.x) as f64 / 3.0;
    let vy = (last.y - back.y) as f64 / 3.0;
    Ok((last.x as f64 + vx, last.y as f64 + vy))
}

/// [`extrapolate`], rounded to whole pixels and clamped so the box stays in the frame.
pub fn rectify(history: &[Location], frame: (u32, u32), box_size: (u32, u32)) -> Result<Location> {
    let (x, y) = extrapolate(history)?;
    Ok(clamp_location(
        Location::new(x.round() as i32, y.round() as i32),
        frame,
        box_size,
    ))
}

fn clamp_location(l: Location, frame: (u32, u32), box_size: (u32, u32)) -> Location {
    let max_x = frame.0.saturating_sub(box_size.0) as i32;
    let max_y = frame.1.saturating_sub(box_size.1) as i32;
    Location::new(l.x.clamp(0, max_x), l.y.clamp(0, max_y))
}

/// Scores every position and returns the best one; ties keep the earliest position.
pub(crate) fn dense_argmax<F>(positions: &[Location], score: F) -> Option<(Location, f64)>
where
    F: Fn(Location) -> f64 + Sync,
{
    let scores: Vec<f64> = positions.par_iter().map(|&l| score(l)).collect();
    let mut best: Option<(Location, f64)> = None;
    for (&l, &s) in positions.iter().zip(&scores) {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((l, s));
        }
    }
    best
}

/// Per-frame result of a tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOutcome {
    pub rect: Rect,
    /// Best classifier score inside the search window.
    pub confidence: f64,
    /// True when the location came from trajectory extrapolation.
    pub rectified: bool,
    /// Selected templates replaced by the re-selection this frame.
    pub churn: usize,
    /// Center vectors blended by the conservative update this frame.
    pub blended: usize,
}

/// Common interface of the adaptive tracker and the CT baseline.
pub trait Tracker: Send {
    fn track(&mut self, frame: &GrayFrame) -> Result<FrameOutcome>;

    fn current(&self) -> Rect;
}

pub(crate) fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub const SNAPSHOT_VERSION: u32 = 1;

/// Serializable tracker state. Restoring it resumes a run bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerSnapshot {
    pub version: u32,
    pub config: TrackerConfig,
    pub frame_size: (u32, u32),
    pub box_size: (u32, u32),
    pub history: Vec<Location>,
    pub bags: Vec<TemplateBag>,
    pub projection: Vec<ProjectionRow>,
    pub centers: TemplateCenters,
    pub selection: Vec<Vec<usize>>,
    pub params: ClassifierParams,
    pub last_confidence: f64,
    pub updates: u64,
    pub rng: ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct ActTracker {
    config: TrackerConfig,
    frame_size: (u32, u32),
    box_size: (u32, u32),
    history: Vec<Location>,
    bags: Vec<TemplateBag>,
    projection: Vec<ProjectionRow>,
    centers: TemplateCenters,
    selection: Vec<Vec<usize>>,
    layout: FeatureLayout,
    params: ClassifierParams,
    last_confidence: f64,
    updates: u64,
    rng: ChaCha8Rng,
    search_offsets: Vec<(i32, i32)>,
}

fn select_all(centers: &TemplateCenters, k: usize) -> Result<Vec<Vec<usize>>> {
    centers
        .bags
        .par_iter()
        .map(|bag| select_templates(bag, k).map(|r| r.indices))
        .collect()
}

fn features_at(layout: &FeatureLayout, ii: &IntegralImage, samples: &[Rect]) -> Result<Vec<Vec<f64>>> {
    samples.iter().map(|s| layout.evaluate(ii, s.x, s.y)).collect()
}

impl ActTracker {
    pub fn init(first_frame: &GrayFrame, init_box: Rect, config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        if !first_frame.contains(&init_box) {
            return Err(Error::OutOfBounds {
                rect: init_box,
                width: first_frame.width(),
                height: first_frame.height(),
            });
        }
        let box_size = (init_box.w, init_box.h);
        let bags = generate_bags(
            init_box.w,
            init_box.h,
            config.bags,
            config.templates_per_bag,
            stream_seed(config.seed, 1),
        )?;
        let projection =
            generate_projection(&bags, config.selected_per_bag, stream_seed(config.seed, 2))?;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 3));
        let location = Location::new(init_box.x, init_box.y);
        let frame_size = first_frame.size();
        let (pos, neg) = draw_samples(&config, location, frame_size, box_size, &mut rng);
        let centers = class_centers(first_frame, &bags, &pos, &neg)?;
        let selection = select_all(&centers, config.selected_per_bag)?;
        let layout = FeatureLayout::new(box_size, &bags, &selection, &projection)?;
        let ii = build_integral(first_frame);
        let params =
            ClassifierParams::from_batches(&features_at(&layout, &ii, &pos)?, &features_at(&layout, &ii, &neg)?)?;
        let search_offsets = ring_offsets(0.0, config.search_radius);
        Ok(ActTracker {
            config,
            frame_size,
            box_size,
            history: vec![location],
            bags,
            projection,
            centers,
            selection,
            layout,
            params,
            last_confidence: f64::NAN,
            updates: 0,
            rng,
            search_offsets,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Changes the confidence threshold for subsequent frames.
    pub fn set_confidence_threshold(&mut self, theta: f64) {
        self.config.confidence_threshold = theta;
    }

    pub fn frame_size(&self) -> (u32, u32) {
        self.frame_size
    }

    pub fn history(&self) -> &[Location] {
        &self.history
    }

    pub fn bags(&self) -> &[TemplateBag] {
        &self.bags
    }

    pub fn projection(&self) -> &[ProjectionRow] {
        &self.projection
    }

    pub fn centers(&self) -> &TemplateCenters {
        &self.centers
    }

    pub fn selection(&self) -> &[Vec<usize>] {
        &self.selection
    }

    pub fn params(&self) -> &ClassifierParams {
        &self.params
    }

    pub fn last_confidence(&self) -> f64 {
        self.last_confidence
    }

    pub fn location(&self) -> Location {
        *self.history.last().expect("history is never empty")
    }

    /// Classifier score of the box at `loc` in a frame.
    pub fn score_at(&self, ii: &IntegralImage, loc: Location) -> Result<f64> {
        Ok(classify(&self.layout.evaluate(ii, loc.x, loc.y)?, &self.params))
    }

    /// Processes one frame and returns the new box.
    pub fn track_frame(&mut self, frame: &GrayFrame) -> Result<FrameOutcome> {
        if frame.size() != self.frame_size {
            return Err(Error::FrameSizeMismatch {
                expected: self.frame_size,
                got: frame.size(),
            });
        }
        let ii = build_integral(frame);
        let prev = self.location();
        let candidates = positions_in_frame(prev, &self.search_offsets, self.frame_size, self.box_size);
        let layout = &self.layout;
        let params = &self.params;
        let (best, conf) = dense_argmax(&candidates, |l| {
            let mut v = Vec::with_capacity(layout.dimension());
            layout.evaluate_into(&ii, l.x as u32, l.y as u32, &mut v);
            classify(&v, params)
        })
        .ok_or_else(|| Error::Config("search window holds no in-frame position".into()))?;
        self.last_confidence = conf;

        let mut outcome = FrameOutcome {
            rect: Rect::new(0, 0, self.box_size.0, self.box_size.1),
            confidence: conf,
            rectified: false,
            churn: 0,
            blended: 0,
        };
        let loc = if conf < self.config.confidence_threshold {
            outcome.rectified = true;
            rectify(&self.history, self.frame_size, self.box_size)?
        } else {
            let (churn, blended) = self.update_model(frame, &ii, best)?;
            outcome.churn = churn;
            outcome.blended = blended;
            best
        };
        self.history.push(loc);
        outcome.rect = Rect::new(loc.x, loc.y, self.box_size.0, self.box_size.1);
        Ok(outcome)
    }

    fn update_model(&mut self, frame: &GrayFrame, ii: &IntegralImage, at: Location) -> Result<(usize, usize)> {
        let (pos, neg) = draw_samples(&self.config, at, self.frame_size, self.box_size, &mut self.rng);
        let fresh = class_centers(frame, &self.bags, &pos, &neg)?;
        let (centers, blended) = update_templates_counted(
            &self.centers,
            &fresh,
            self.config.template_threshold,
            self.config.eta,
        )?;
        self.centers = centers;
        self.updates += 1;
        let mut churn = 0;
        if self.updates % self.config.selection_interval as u64 == 0 {
            let selection = select_all(&self.centers, self.config.selected_per_bag)?;
            churn = selection
                .iter()
                .zip(&self.selection)
                .map(|(new, old)| new.iter().filter(|j| !old.contains(j)).count())
                .sum();
            if selection != self.selection {
                self.layout = FeatureLayout::new(self.box_size, &self.bags, &selection, &self.projection)?;
                self.selection = selection;
            }
        }
        self.params = update_params(
            &self.params,
            &features_at(&self.layout, ii, &pos)?,
            &features_at(&self.layout, ii, &neg)?,
            self.config.lambda,
        )?;
        Ok((churn, blended))
    }

    pub fn snapshot(&self) -> TrackerSnapshot {
        TrackerSnapshot {
            version: SNAPSHOT_VERSION,
            config: self.config.clone(),
            frame_size: self.frame_size,
            box_size: self.box_size,
            history: self.history.clone(),
            bags: self.bags.clone(),
            projection: self.projection.clone(),
            centers: self.centers.clone(),
            selection: self.selection.clone(),
            params: self.params.clone(),
            last_confidence: self.last_confidence,
            updates: self.updates,
            rng: self.rng.clone(),
        }
    }

    pub fn restore(snapshot: TrackerSnapshot) -> Result<Self> {
        if snapshot.version != SNAPSHOT_VERSION {
            return Err(Error::SnapshotVersion(snapshot.version));
        }
        snapshot.config.validate()?;
        if snapshot.history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let layout = FeatureLayout::new(
            snapshot.box_size,
            &snapshot.bags,
            &snapshot.selection,
            &snapshot.projection,
        )?;
        Ok(ActTracker {
            search_offsets: ring_offsets(0.0, snapshot.config.search_radius),
            config: snapshot.config,
            frame_size: snapshot.frame_size,
            box_size: snapshot.box_size,
            history: snapshot.history,
            bags: snapshot.bags,
            projection: snapshot.projection,
            centers: snapshot.centers,
            selection: snapshot.selection,
            layout,
            params: snapshot.params,
            last_confidence: snapshot.last_confidence,
            updates: snapshot.updates,
            rng: snapshot.rng,
        })
    }
}

fn draw_samples(
    config: &TrackerConfig,
    at: Location,
    frame: (u32, u32),
    box_size: (u32, u32),
    rng: &mut ChaCha8Rng,
) -> (Vec<Rect>, Vec<Rect>) {
    let pos = sample_rects(at, 0.0, config.positive_radius, config.positive_count, frame, box_size, rng);
    let neg = sample_rects(
        at,
        config.negative_inner,
        config.negative_outer,
        config.negative_count,
        frame,
        box_size,
        rng,
    );
    (pos, neg)
}

impl Tracker for ActTracker {
    fn track(&mut self, frame: &GrayFrame) -> Result<FrameOutcome> {
        self.track_frame(frame)
    }

    fn current(&self) -> Rect {
        let l = self.location();
        Rect::new(l.x, l.y, self.box_size.0, self.box_size.1)
    }
}
