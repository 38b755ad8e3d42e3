//! Template bags, class centers, the block projection and compressed features.
//!
//! A bag is a group of same-sized rectangle templates at random offsets inside the
//! target box; different bags use different sizes. For every sample, template `j` of
//! bag `i` yields a raw patch vector, and the compressed feature of bag `i` is a signed,
//! scaled sum of the rectangle sums of its selected templates. The original CT feature
//! construction (a very sparse random matrix over multiscale rectangle sums) lives here
//! too, for the baseline tracker.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{GrayFrame, IntegralImage, Rect};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateBag {
    pub index: usize,
    /// Shared template width for the whole bag.
    pub width: u32,
    pub height: u32,
    /// Top-left offsets of the templates relative to the target box.
    pub offsets: Vec<(u32, u32)>,
}

impl TemplateBag {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn area(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// True when every template stays inside a `w` x `h` box.
    pub fn fits(&self, w: u32, h: u32) -> bool {
        self.offsets
            .iter()
            .all(|&(dx, dy)| dx + self.width <= w && dy + self.height <= h)
    }
}

/// Inclusive range of template side lengths allowed for a target side:
/// `2 < t < round(side / 2)`.
pub fn template_side_range(side: u32) -> Option<(u32, u32)> {
    let upper = (side as f64 / 2.0).round() as u32;
    if upper <= 3 {
        None
    } else {
        Some((3, upper - 1))
    }
}

pub fn generate_bags(
    target_w: u32,
    target_h: u32,
    c: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<TemplateBag>> {
    if c == 0 || n == 0 {
        return Err(Error::Config(format!(
            "bag count and bag size must be positive (c={c}, n={n})"
        )));
    }
    let too_small = |dim: &str| Error::TargetTooSmall {
        width: target_w,
        height: target_h,
        reason: format!("no template {dim} satisfies 2 < t < round({dim}/2)"),
    };
    let (w_lo, w_hi) = template_side_range(target_w).ok_or_else(|| too_small("width"))?;
    let (h_lo, h_hi) = template_side_range(target_h).ok_or_else(|| too_small("height"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bags = (0..c)
        .map(|index| {
            let width = rng.random_range(w_lo..=w_hi);
            let height = rng.random_range(h_lo..=h_hi);
            let offsets = (0..n)
                .map(|_| {
                    (
                        rng.random_range(0..=target_w - width),
                        rng.random_range(0..=target_h - height),
                    )
                })
                .collect();
            TemplateBag {
                index,
                width,
                height,
                offsets,
            }
        })
        .collect();
    Ok(bags)
}

/// Positive and negative class-center patches of one template, raw and L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterPair {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub positive_unit: Vec<f64>,
    pub negative_unit: Vec<f64>,
}

impl CenterPair {
    pub fn from_raw(positive: Vec<f64>, negative: Vec<f64>) -> Self {
        let positive_unit = normalized(&positive);
        let negative_unit = normalized(&negative);
        CenterPair {
            positive,
            negative,
            positive_unit,
            negative_unit,
        }
    }
}

/// Unit-L2 copy of `v`; the zero vector maps to itself.
pub fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        vec![0.0; v.len()]
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

/// Class centers for every template of every bag, indexed `[bag][template]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateCenters {
    pub bags: Vec<Vec<CenterPair>>,
}

impl TemplateCenters {
    pub fn bag(&self, i: usize) -> &[CenterPair] {
        &self.bags[i]
    }
}

/// Elementwise mean of the samples' pixels, over a box the size of the samples.
struct MeanSample {
    w: u32,
    sums: Vec<u64>,
    count: usize,
}

impl MeanSample {
    fn new(frame: &GrayFrame, samples: &[Rect], label: &'static str) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptySamples(label))?;
        let (w, h) = (first.w, first.h);
        let mut sums = vec![0u64; w as usize * h as usize];
        for s in samples {
            if s.w != w || s.h != h {
                return Err(Error::GeometryMismatch(format!(
                    "{label} sample {s:?} differs in size from {first:?}"
                )));
            }
            if !frame.contains(s) {
                return Err(Error::OutOfBounds {
                    rect: *s,
                    width: frame.width(),
                    height: frame.height(),
                });
            }
            for b in 0..h {
                let row = &frame.pixels()[(s.y as u32 + b) as usize * frame.width() as usize
                    + s.x as usize..][..w as usize];
                let acc = &mut sums[(b * w) as usize..][..w as usize];
                for (a, &p) in acc.iter_mut().zip(row) {
                    *a += p as u64;
                }
            }
        }
        Ok(MeanSample {
            w,
            sums,
            count: samples.len(),
        })
    }

    fn patch(&self, dx: u32, dy: u32, tw: u32, th: u32) -> Vec<f64> {
        let n = self.count as f64;
        let mut out = Vec::with_capacity(tw as usize * th as usize);
        for y in dy..dy + th {
            let row = &self.sums[(y * self.w + dx) as usize..][..tw as usize];
            out.extend(row.iter().map(|&s| s as f64 / n));
        }
        out
    }
}

/// Averages each template's patch over the positive and negative samples.
///
/// Every sample must have the target size the bags were generated for.
pub fn class_centers(
    frame: &GrayFrame,
    bags: &[TemplateBag],
    positive_samples: &[Rect],
    negative_samples: &[Rect],
) -> Result<TemplateCenters> {
    let pos = MeanSample::new(frame, positive_samples, "positive")?;
    let neg = MeanSample::new(frame, negative_samples, "negative")?;
    let (w, h) = (positive_samples[0].w, positive_samples[0].h);
    if negative_samples[0].w != w || negative_samples[0].h != h {
        return Err(Error::GeometryMismatch(
            "positive and negative samples differ in size".into(),
        ));
    }
    let mut out = Vec::with_capacity(bags.len());
    for bag in bags {
        if !bag.fits(w, h) {
            return Err(Error::TemplatePlacement(format!(
                "bag {} does not fit a {w}x{h} sample",
                bag.index
            )));
        }
        out.push(
            bag.offsets
                .iter()
                .map(|&(dx, dy)| {
                    CenterPair::from_raw(
                        pos.patch(dx, dy, bag.width, bag.height),
                        neg.patch(dx, dy, bag.width, bag.height),
                    )
                })
                .collect(),
        );
    }
    Ok(TemplateCenters { bags: out })
}

/// One row of the block projection: `k` frozen signs confined to bag `bag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub bag: usize,
    pub signs: Vec<i8>,
    /// `1 / sqrt(k * t_w * t_h)`.
    pub scale: f64,
}

pub fn generate_projection(bags: &[TemplateBag], k: usize, seed: u64) -> Result<Vec<ProjectionRow>> {
    if k == 0 {
        return Err(Error::Config("selected templates per bag must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(bags
        .iter()
        .map(|bag| ProjectionRow {
            bag: bag.index,
            signs: (0..k)
                .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
                .collect(),
            scale: 1.0 / ((k * bag.area()) as f64).sqrt(),
        })
        .collect())
}

/// Selected templates of every bag flattened into signed rectangle offsets, ready to be
/// evaluated at many sample positions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureLayout {
    target: (u32, u32),
    blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq)]
struct Block {
    scale: f64,
    width: u32,
    height: u32,
    terms: Vec<(u32, u32, i8)>,
}

impl FeatureLayout {
    pub fn new(
        target: (u32, u32),
        bags: &[TemplateBag],
        selected: &[Vec<usize>],
        rows: &[ProjectionRow],
    ) -> Result<Self> {
        if selected.len() != bags.len() || rows.len() != bags.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} bags, {} selections, {} projection rows",
                bags.len(),
                selected.len(),
                rows.len()
            )));
        }
        let mut blocks = Vec::with_capacity(bags.len());
        for ((bag, sel), row) in bags.iter().zip(selected).zip(rows) {
            if sel.len() != row.signs.len() {
                return Err(Error::GeometryMismatch(format!(
                    "bag {} has {} selected templates but {} projection signs",
                    bag.index,
                    sel.len(),
                    row.signs.len()
                )));
            }
            if !bag.fits(target.0, target.1) {
                return Err(Error::TemplatePlacement(format!(
                    "bag {} does not fit the {}x{} target",
                    bag.index, target.0, target.1
                )));
            }
            let mut terms = Vec::with_capacity(sel.len());
            for (&j, &sign) in sel.iter().zip(&row.signs) {
                let &(dx, dy) = bag.offsets.get(j).ok_or_else(|| {
                    Error::GeometryMismatch(format!("template {j} not in bag {}", bag.index))
                })?;
                terms.push((dx, dy, sign));
            }
            blocks.push(Block {
                scale: row.scale,
                width: bag.width,
                height: bag.height,
                terms,
            });
        }
        Ok(FeatureLayout { target, blocks })
    }

    pub fn dimension(&self) -> usize {
        self.blocks.len()
    }

    /// Compressed feature vector of the sample whose top-left corner is `(x, y)`.
    pub fn evaluate(&self, ii: &IntegralImage, x: i32, y: i32) -> Result<Vec<f64>> {
        let sample = Rect::new(x, y, self.target.0, self.target.1);
        if !sample.fits_in(ii.width(), ii.height()) {
            return Err(Error::OutOfBounds {
                rect: sample,
                width: ii.width(),
                height: ii.height(),
            });
        }
        let mut v = Vec::with_capacity(self.blocks.len());
        self.evaluate_into(ii, x as u32, y as u32, &mut v);
        Ok(v)
    }

    /// Unchecked evaluation for positions already known to be in bounds.
    pub(crate) fn evaluate_into(&self, ii: &IntegralImage, x: u32, y: u32, out: &mut Vec<f64>) {
        out.clear();
        for b in &self.blocks {
            let mut acc = 0i64;
            for &(dx, dy, sign) in &b.terms {
                let s = ii.sum_unchecked(x + dx, y + dy, b.width, b.height) as i64;
                acc += sign as i64 * s;
            }
            out.push(b.scale * acc as f64);
        }
    }
}

/// `v_i = scale_i * sum_j s_ij * rect_sum(template j of bag i placed in the sample)`.
pub fn compressed_feature(
    ii: &IntegralImage,
    sample: &Rect,
    bags: &[TemplateBag],
    selected: &[Vec<usize>],
    rows: &[ProjectionRow],
) -> Result<Vec<f64>> {
    FeatureLayout::new((sample.w, sample.h), bags, selected, rows)?.evaluate(ii, sample.x, sample.y)
}

/// One nonzero entry of the CT matrix. The column indexes the multiscale rectangle
/// feature space of the target box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtEntry {
    pub column: u64,
    pub positive: bool,
}

/// Very sparse random matrix of the CT baseline, stored row-wise.
///
/// There are `(w*h)^2` columns: column `c` places a rectangle of size
/// `(c % (w*h)) % w + 1` x `(c % (w*h)) / w + 1` at offset `(p % w, p / w)` with
/// `p = c / (w*h)`, clipped to the target box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtMatrix {
    pub target_w: u32,
    pub target_h: u32,
    pub rows: Vec<Vec<CtEntry>>,
}

/// Rectangle of one CT matrix column, relative to the target box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CtTemplate {
    pub dx: u32,
    pub dy: u32,
    pub w: u32,
    pub h: u32,
}

impl CtMatrix {
    pub fn from_rows(target_w: u32, target_h: u32, rows: Vec<Vec<CtEntry>>) -> Self {
        CtMatrix {
            target_w,
            target_h,
            rows,
        }
    }

    /// `rho = (w*h)^2 / 4`.
    pub fn rho(&self) -> f64 {
        ct_rho(self.target_w, self.target_h)
    }

    /// Magnitude of every nonzero entry, `sqrt(rho) = w*h/2`.
    pub fn magnitude(&self) -> f64 {
        self.rho().sqrt()
    }

    pub fn columns(&self) -> u64 {
        let a = self.target_w as u64 * self.target_h as u64;
        a * a
    }

    pub fn n_features(&self) -> usize {
        self.rows.len()
    }

    pub fn template(&self, column: u64) -> CtTemplate {
        let (w, h) = (self.target_w as u64, self.target_h as u64);
        let area = w * h;
        let (p, s) = (column / area, column % area);
        let (dx, dy) = ((p % w) as u32, (p / w) as u32);
        let (sw, sh) = ((s % w) as u32 + 1, (s / w) as u32 + 1);
        CtTemplate {
            dx,
            dy,
            w: sw.min(self.target_w - dx),
            h: sh.min(self.target_h - dy),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

fn ct_rho(w: u32, h: u32) -> f64 {
    let a = w as f64 * h as f64;
    a * a / 4.0
}

/// Samples the CT matrix with `P(+sqrt(rho)) = P(-sqrt(rho)) = 1/(2 rho)` and
/// `P(0) = 1 - 1/rho`, drawing the gaps between nonzeros geometrically.
pub fn ct_random_matrix(n_feat: usize, target_w: u32, target_h: u32, seed: u64) -> Result<CtMatrix> {
    if n_feat == 0 {
        return Err(Error::Config("CT feature count must be >= 1".into()));
    }
    if target_w == 0 || target_h == 0 {
        return Err(Error::TargetTooSmall {
            width: target_w,
            height: target_h,
            reason: "empty target".into(),
        });
    }
    let p = (1.0 / ct_rho(target_w, target_h)).min(1.0);
    let gap = Geometric::new(p).map_err(|e| Error::Config(format!("CT density: {e}")))?;
    let cols = {
        let a = target_w as u64 * target_h as u64;
        a * a
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n_feat)
        .map(|_| {
            let mut row = Vec::new();
            let mut col = gap.sample(&mut rng);
            while col < cols {
                row.push(CtEntry {
                    column: col,
                    positive: rng.random_bool(0.5),
                });
                col = col.saturating_add(1).saturating_add(gap.sample(&mut rng));
            }
            row
        })
        .collect();
    Ok(CtMatrix {
        target_w,
        target_h,
        rows,
    })
}

/// CT matrix rows resolved to weighted rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct CtLayout {
    target: (u32, u32),
    rows: Vec<Vec<(CtTemplate, f64)>>,
}

impl CtLayout {
    pub fn new(matrix: &CtMatrix) -> Self {
        let m = matrix.magnitude();
        CtLayout {
            target: (matrix.target_w, matrix.target_h),
            rows: matrix
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| (matrix.template(e.column), if e.positive { m } else { -m }))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn evaluate(&self, ii: &IntegralImage, x: i32, y: i32) -> Result<Vec<f64>> {
        let sample = Rect::new(x, y, self.target.0, self.target.1);
        if !sample.fits_in(ii.width(), ii.height()) {
            return Err(Error::OutOfBounds {
                rect: sample,
                width: ii.width(),
                height: ii.height(),
            });
        }
        let mut v = Vec::with_capacity(self.rows.len());
        self.evaluate_into(ii, x as u32, y as u32, &mut v);
        Ok(v)
    }

    pub(crate) fn evaluate_into(&self, ii: &IntegralImage, x: u32, y: u32, out: &mut Vec<f64>) {
        out.clear();
        for row in &self.rows {
            let v = row
                .iter()
                .map(|(t, weight)| weight * ii.sum_unchecked(x + t.dx, y + t.dy, t.w, t.h) as f64)
                .sum();
            out.push(v);
        }
    }
}

/// Compressed CT feature of a target-sized sample.
pub fn ct_feature(ii: &IntegralImage, sample: &Rect, matrix: &CtMatrix) -> Result<Vec<f64>> {
    if (sample.w, sample.h) != (matrix.target_w, matrix.target_h) {
        return Err(Error::GeometryMismatch(format!(
            "sample {sample:?} does not match the {}x{} CT target",
            matrix.target_w, matrix.target_h
        )));
    }
    CtLayout::new(matrix).evaluate(ii, sample.x, sample.y)
}
