//! The original compressive tracker, kept for comparison.
//!
//! Features are fixed at initialization by a very sparse random matrix over multiscale
//! rectangle sums; the classifier is updated on every frame and there is no trajectory
//! rectification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{ct_random_matrix, CtLayout, CtMatrix};
use crate::imaging::{build_integral, GrayFrame, IntegralImage, Rect};
use crate::model::{classify, update_params, ClassifierParams};
use crate::tracker::{
    dense_argmax, ring_offsets, sample_rects, stream_seed, FrameOutcome, Location, Tracker,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtConfig {
    pub features: usize,
    pub search_radius: f64,
    pub positive_radius: f64,
    pub negative_inner: f64,
    pub negative_outer: f64,
    pub positive_count: usize,
    pub negative_count: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for CtConfig {
    fn default() -> Self {
        CtConfig {
            features: 50,
            search_radius: 25.0,
            positive_radius: 4.0,
            negative_inner: 8.0,
            negative_outer: 30.0,
            positive_count: 45,
            negative_count: 50,
            lambda: 0.85,
            seed: 0,
        }
    }
}

impl CtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.features == 0 || self.positive_count == 0 || self.negative_count == 0 {
            return Err(Error::Config("CT counts must be >= 1".into()));
        }
        if !(self.search_radius > 0.0
            && self.positive_radius > 0.0
            && self.positive_radius < self.negative_inner
            && self.negative_inner < self.negative_outer)
        {
            return Err(Error::Config("CT radii must satisfy 0 < positive < inner < outer".into()));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::Config(format!("lambda must be in (0, 1), got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CtTracker {
    config: CtConfig,
    frame_size: (u32, u32),
    box_size: (u32, u32),
    location: Location,
    matrix: CtMatrix,
    layout: CtLayout,
    params: ClassifierParams,
    rng: ChaCha8Rng,
    search_offsets: Vec<(i32, i32)>,
}

impl CtTracker {
    pub fn init(first_frame: &GrayFrame, init_box: Rect, config: CtConfig) -> Result<Self> {
        config.validate()?;
        if !first_frame.contains(&init_box) {
            return Err(Error::OutOfBounds {
                rect: init_box,
                width: first_frame.width(),
                height: first_frame.height(),
            });
        }
        let matrix = ct_random_matrix(config.features, init_box.w, init_box.h, stream_seed(config.seed, 11))?;
        let layout = CtLayout::new(&matrix);
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 12));
        let ii = build_integral(first_frame);
        let location = Location::new(init_box.x, init_box.y);
        let mut tracker = CtTracker {
            frame_size: first_frame.size(),
            box_size: (init_box.w, init_box.h),
            location,
            matrix,
            layout,
            params: ClassifierParams::from_batches(&[vec![0.0]], &[vec![0.0]])?,
            rng: ChaCha8Rng::seed_from_u64(0),
            search_offsets: ring_offsets(0.0, config.search_radius),
            config,
        };
        let (pos, neg) = tracker.samples(location, &mut rng);
        tracker.params = ClassifierParams::from_batches(&tracker.features(&ii, &pos)?, &tracker.features(&ii, &neg)?)?;
        tracker.rng = rng;
        Ok(tracker)
    }

    pub fn matrix(&self) -> &CtMatrix {
        &self.matrix
    }

    pub fn params(&self) -> &ClassifierParams {
        &self.params
    }

    fn samples(&self, at: Location, rng: &mut ChaCha8Rng) -> (Vec<Rect>, Vec<Rect>) {
        let c = &self.config;
        let pos = sample_rects(at, 0.0, c.positive_radius, c.positive_count, self.frame_size, self.box_size, rng);
        let neg = sample_rects(
            at,
            c.negative_inner,
            c.negative_outer,
            c.negative_count,
            self.frame_size,
            self.box_size,
            rng,
        );
        (pos, neg)
    }

    fn features(&self, ii: &IntegralImage, rects: &[Rect]) -> Result<Vec<Vec<f64>>> {
        rects.iter().map(|r| self.layout.evaluate(ii, r.x, r.y)).collect()
    }
}

impl Tracker for CtTracker {
    fn track(&mut self, frame: &GrayFrame) -> Result<FrameOutcome> {
        if frame.size() != self.frame_size {
            return Err(Error::FrameSizeMismatch {
                expected: self.frame_size,
                got: frame.size(),
            });
        }
        let ii = build_integral(frame);
        let candidates: Vec<Location> = self
            .search_offsets
            .iter()
            .map(|&(dx, dy)| Location::new(self.location.x + dx, self.location.y + dy))
            .filter(|l| Rect::new(l.x, l.y, self.box_size.0, self.box_size.1).fits_in(self.frame_size.0, self.frame_size.1))
            .collect();
        let (layout, params) = (&self.layout, &self.params);
        let (best, conf) = dense_argmax(&candidates, |l| {
            let mut v = Vec::with_capacity(layout.dimension());
            layout.evaluate_into(&ii, l.x as u32, l.y as u32, &mut v);
            classify(&v, params)
        })
        .ok_or_else(|| Error::Config("search window holds no in-frame position".into()))?;
        self.location = best;

        let mut rng = self.rng.clone();
        let (pos, neg) = self.samples(best, &mut rng);
        self.rng = rng;
        self.params = update_params(
            &self.params,
            &self.features(&ii, &pos)?,
            &self.features(&ii, &neg)?,
            self.config.lambda,
        )?;
        Ok(FrameOutcome {
            rect: self.current(),
            confidence: conf,
            rectified: false,
            churn: 0,
            blended: 0,
        })
    }

    fn current(&self) -> Rect {
        Rect::new(self.location.x, self.location.y, self.box_size.0, self.box_size.1)
    }
}
