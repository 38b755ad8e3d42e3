//! Sequences on disk and in memory, and the `x,y,w,h` box text format.
//!
//! A sequence directory holds an `img/` folder of numbered frames, a
//! `groundtruth_rect.txt` (or `groundtruth.txt`) file with one box per frame, and an
//! optional `attributes.txt` listing attribute tags such as `OCC, FM`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imaging::{GrayFrame, Rect};

pub const GROUND_TRUTH_FILES: [&str; 2] = ["groundtruth_rect.txt", "groundtruth.txt"];
pub const ATTRIBUTES_FILE: &str = "attributes.txt";
pub const IMAGE_DIR: &str = "img";

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Debug, Clone)]
pub enum FrameSource {
    Files(Vec<PathBuf>),
    Memory(Vec<GrayFrame>),
}

#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    pub frames: FrameSource,
    pub ground_truth: Vec<Rect>,
    pub attributes: Vec<String>,
}

impl Sequence {
    pub fn len(&self) -> usize {
        match &self.frames {
            FrameSource::Files(f) => f.len(),
            FrameSource::Memory(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Decodes (or borrows a copy of) frame `i`.
    pub fn frame(&self, i: usize) -> Result<GrayFrame> {
        match &self.frames {
            FrameSource::Files(files) => GrayFrame::load(&files[i]),
            FrameSource::Memory(frames) => Ok(frames[i].clone()),
        }
    }
}

/// Parses one box per non-blank line; fields may be separated by commas, tabs or spaces.
/// Fractional values are rounded to whole pixels.
pub fn parse_boxes(text: &str, source: &Path) -> Result<Vec<Rect>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line
            .split([',', '\t', ' '])
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields x,y,w,h, found {}", fields.len())));
        }
        let mut v = [0f64; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("not a number: {f:?}")))?;
        }
        let (w, h) = (v[2].round(), v[3].round());
        if w < 1.0 || h < 1.0 {
            return Err(err(format!("box size must be positive, got {w}x{h}")));
        }
        out.push(Rect::new(v[0].round() as i32, v[1].round() as i32, w as u32, h as u32));
    }
    Ok(out)
}

pub fn read_boxes(path: &Path) -> Result<Vec<Rect>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    parse_boxes(&text, path)
}

/// One `x,y,w,h` line per box.
pub fn format_boxes(boxes: &[Rect]) -> String {
    let mut s = String::with_capacity(boxes.len() * 16);
    for b in boxes {
        s.push_str(&format!("{},{},{},{}\n", b.x, b.y, b.w, b.h));
    }
    s
}

pub fn write_boxes(path: &Path, boxes: &[Rect]) -> Result<()> {
    super::metrics::write_file(path, &format_boxes(boxes))
}

fn frame_number(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

pub fn load_sequence(path: &Path) -> Result<Sequence> {
    if !path.is_dir() {
        return Err(Error::SequenceNotFound(path.to_path_buf()));
    }
    let seq_err = |message: String| Error::Sequence {
        path: path.to_path_buf(),
        message,
    };
    let img_dir = path.join(IMAGE_DIR);
    let entries = std::fs::read_dir(&img_dir)
        .map_err(|e| seq_err(format!("cannot read {}: {e}", img_dir.display())))?;
    let mut frames = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| Error::io(format!("list {}", img_dir.display()), e))?.path();
        let is_image = p
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if !is_image {
            continue;
        }
        let n = frame_number(&p).ok_or_else(|| seq_err(format!("frame name without a number: {}", p.display())))?;
        frames.push((n, p));
    }
    if frames.is_empty() {
        return Err(seq_err(format!("no frames in {}", img_dir.display())));
    }
    frames.sort();
    let frames: Vec<PathBuf> = frames.into_iter().map(|(_, p)| p).collect();

    let gt_path = GROUND_TRUTH_FILES
        .iter()
        .map(|f| path.join(f))
        .find(|p| p.is_file())
        .ok_or_else(|| seq_err("missing ground-truth file".into()))?;
    let ground_truth = read_boxes(&gt_path)?;
    if ground_truth.len() != frames.len() {
        return Err(seq_err(format!(
            "{} frames but {} ground-truth boxes",
            frames.len(),
            ground_truth.len()
        )));
    }

    let attr_path = path.join(ATTRIBUTES_FILE);
    let attributes = if attr_path.is_file() {
        std::fs::read_to_string(&attr_path)
            .map_err(|e| Error::io(format!("read {}", attr_path.display()), e))?
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.to_ascii_uppercase())
            .collect()
    } else {
        Vec::new()
    };

    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("sequence")
        .to_string();
    Ok(Sequence {
        name,
        frames: FrameSource::Files(frames),
        ground_truth,
        attributes,
    })
}
