//! Seeded synthetic sequences with exact ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::sequence::{FrameSource, Sequence};
use crate::error::{Error, Result};
use crate::imaging::{GrayFrame, Rect};
use crate::kv::KvFile;

/// A blocky random texture over a textured background, moving at constant velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub name: String,
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub target_width: u32,
    pub target_height: u32,
    pub start_x: i32,
    pub start_y: i32,
    /// Displacement per frame, px.
    pub velocity_x: i32,
    pub velocity_y: i32,
    /// Reflect the velocity at the canvas border instead of failing.
    pub bounce: bool,
    pub frames: usize,
    /// Standard deviation of i.i.d. Gaussian pixel noise.
    pub noise: f64,
    pub texture_seed: u64,
    pub background_seed: u64,
    pub noise_seed: u64,
    /// Frame from which the target texture is redrawn with `changed_texture_seed`.
    pub texture_change_frame: Option<usize>,
    pub changed_texture_seed: u64,
    /// Side of one texture block, px.
    pub target_cell: u32,
    pub background_cell: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            name: "synthetic".into(),
            canvas_width: 320,
            canvas_height: 240,
            target_width: 40,
            target_height: 40,
            start_x: 40,
            start_y: 100,
            velocity_x: 2,
            velocity_y: 0,
            bounce: false,
            frames: 100,
            noise: 0.0,
            texture_seed: 1,
            background_seed: 2,
            noise_seed: 3,
            texture_change_frame: None,
            changed_texture_seed: 4,
            target_cell: 5,
            background_cell: 8,
        }
    }
}

impl SynthSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KvFile::parse(text)?;
        let mut s = SynthSpec::default();
        kv.take("name", &mut s.name)?;
        kv.take("canvas_width", &mut s.canvas_width)?;
        kv.take("canvas_height", &mut s.canvas_height)?;
        kv.take("target_width", &mut s.target_width)?;
        kv.take("target_height", &mut s.target_height)?;
        kv.take("start_x", &mut s.start_x)?;
        kv.take("start_y", &mut s.start_y)?;
        kv.take("velocity_x", &mut s.velocity_x)?;
        kv.take("velocity_y", &mut s.velocity_y)?;
        kv.take("bounce", &mut s.bounce)?;
        kv.take("frames", &mut s.frames)?;
        kv.take("noise", &mut s.noise)?;
        kv.take("texture_seed", &mut s.texture_seed)?;
        kv.take("background_seed", &mut s.background_seed)?;
        kv.take("noise_seed", &mut s.noise_seed)?;
        kv.take_opt("texture_change_frame", &mut s.texture_change_frame)?;
        kv.take("changed_texture_seed", &mut s.changed_texture_seed)?;
        kv.take("target_cell", &mut s.target_cell)?;
        kv.take("background_cell", &mut s.background_cell)?;
        kv.finish()?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let change = self
            .texture_change_frame
            .map_or_else(|| "none".to_string(), |f| f.to_string());
        format!(
            "name = {}\ncanvas_width = {}\ncanvas_height = {}\ntarget_width = {}\ntarget_height = {}\n\
             start_x = {}\nstart_y = {}\nvelocity_x = {}\nvelocity_y = {}\nbounce = {}\nframes = {}\n\
             noise = {}\ntexture_seed = {}\nbackground_seed = {}\nnoise_seed = {}\n\
             texture_change_frame = {}\nchanged_texture_seed = {}\ntarget_cell = {}\nbackground_cell = {}\n",
            self.name,
            self.canvas_width,
            self.canvas_height,
            self.target_width,
            self.target_height,
            self.start_x,
            self.start_y,
            self.velocity_x,
            self.velocity_y,
            self.bounce,
            self.frames,
            self.noise,
            self.texture_seed,
            self.background_seed,
            self.noise_seed,
            change,
            self.changed_texture_seed,
            self.target_cell,
            self.background_cell,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.canvas_width == 0 || self.canvas_height == 0 {
            return bad("canvas_width and canvas_height must be positive");
        }
        if self.target_width == 0 || self.target_height == 0 {
            return bad("target_width and target_height must be positive");
        }
        if self.frames == 0 {
            return bad("frames must be positive");
        }
        if self.target_cell == 0 || self.background_cell == 0 {
            return bad("target_cell and background_cell must be positive");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise must be a finite number >= 0");
        }
        Ok(())
    }

    /// Ground-truth boxes of every frame.
    pub fn boxes(&self) -> Result<Vec<Rect>> {
        self.validate()?;
        let (cw, ch) = (self.canvas_width, self.canvas_height);
        let mut r = Rect::new(self.start_x, self.start_y, self.target_width, self.target_height);
        if !r.fits_in(cw, ch) {
            return Err(Error::MotionEscapes { frame: 0, rect: r });
        }
        let (mut vx, mut vy) = (self.velocity_x, self.velocity_y);
        let mut out = vec![r];
        for frame in 1..self.frames {
            let mut next = r.translated(vx, vy);
            if self.bounce && !next.fits_in(cw, ch) {
                if next.x < 0 || next.x as i64 + next.w as i64 > cw as i64 {
                    vx = -vx;
                }
                if next.y < 0 || next.y as i64 + next.h as i64 > ch as i64 {
                    vy = -vy;
                }
                next = r.translated(vx, vy);
            }
            if !next.fits_in(cw, ch) {
                return Err(Error::MotionEscapes { frame, rect: next });
            }
            r = next;
            out.push(r);
        }
        Ok(out)
    }
}

fn blocky_texture(w: u32, h: u32, cell: u32, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = w.div_ceil(cell);
    let rows = h.div_ceil(cell);
    let cells: Vec<u8> = (0..cols * rows).map(|_| rng.random()).collect();
    let mut out = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h {
        for x in 0..w {
            out.push(cells[((y / cell) * cols + x / cell) as usize]);
        }
    }
    out
}

/// Renders the whole sequence in memory.
pub fn synth_sequence(spec: &SynthSpec) -> Result<Sequence> {
    let boxes = spec.boxes()?;
    let (cw, ch) = (spec.canvas_width, spec.canvas_height);
    let (tw, th) = (spec.target_width, spec.target_height);
    let background = blocky_texture(cw, ch, spec.background_cell, spec.background_seed);
    let texture = blocky_texture(tw, th, spec.target_cell, spec.texture_seed);
    let changed = spec
        .texture_change_frame
        .map(|_| blocky_texture(tw, th, spec.target_cell, spec.changed_texture_seed));
    let noise = if spec.noise > 0.0 {
        Some(Normal::new(0.0, spec.noise).map_err(|e| Error::Config(format!("noise: {e}")))?)
    } else {
        None
    };

    let mut frames = Vec::with_capacity(boxes.len());
    for (t, b) in boxes.iter().enumerate() {
        let tex = match (spec.texture_change_frame, &changed) {
            (Some(at), Some(c)) if t >= at => c,
            _ => &texture,
        };
        let mut pixels: Vec<f64> = background.iter().map(|&p| p as f64).collect();
        for y in 0..th {
            let row = (b.y as u32 + y) as usize * cw as usize + b.x as usize;
            for x in 0..tw {
                pixels[row + x as usize] = tex[(y * tw + x) as usize] as f64;
            }
        }
        if let Some(dist) = noise {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.noise_seed ^ (t as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
            for p in pixels.iter_mut() {
                *p += dist.sample(&mut rng);
            }
        }
        let bytes = pixels.iter().map(|p| p.round().clamp(0.0, 255.0) as u8).collect();
        frames.push(GrayFrame::new(cw, ch, bytes)?);
    }
    Ok(Sequence {
        name: spec.name.clone(),
        frames: FrameSource::Memory(frames),
        ground_truth: boxes,
        attributes: Vec::new(),
    })
}
