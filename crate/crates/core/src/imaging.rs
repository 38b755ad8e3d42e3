//! Grayscale frames, summed-area tables and raw patch extraction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in pixel coordinates. `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x: i32, y: i32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Area of the intersection with `other`, zero when disjoint.
    pub fn intersection_area(&self, other: &Rect) -> u64 {
        let x0 = (self.x as i64).max(other.x as i64);
        let y0 = (self.y as i64).max(other.y as i64);
        let x1 = (self.x as i64 + self.w as i64).min(other.x as i64 + other.w as i64);
        let y1 = (self.y as i64 + self.h as i64).min(other.y as i64 + other.h as i64);
        if x1 <= x0 || y1 <= y0 {
            0
        } else {
            ((x1 - x0) * (y1 - y0)) as u64
        }
    }

    /// True when the rect lies entirely inside a `width` x `height` frame.
    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && self.x >= 0
            && self.y >= 0
            && self.x as i64 + self.w as i64 <= width as i64
            && self.y as i64 + self.h as i64 <= height as i64
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.w, self.h)
    }
}

/// Row-major 8-bit grayscale frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayFrame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidFrame(format!(
                "{} pixels for a {width}x{height} frame",
                pixels.len()
            )));
        }
        Ok(GrayFrame {
            width,
            height,
            pixels,
        })
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayFrame::new(width, height, pixels)
    }

    /// Converts interleaved RGB bytes with the 0.299/0.587/0.114 luminance weights, rounded.
    pub fn from_rgb(width: u32, height: u32, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != 3 * width as usize * height as usize {
            return Err(Error::InvalidFrame(format!(
                "{} RGB bytes for a {width}x{height} frame",
                rgb.len()
            )));
        }
        let pixels = rgb.chunks_exact(3).map(|p| luminance(p[0], p[1], p[2])).collect();
        GrayFrame::new(width, height, pixels)
    }

    /// Decodes a still image, converting color inputs to grayscale.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(GrayFrame::from_dynamic(img))
    }

    pub fn from_dynamic(img: image::DynamicImage) -> Self {
        match img {
            image::DynamicImage::ImageLuma8(gray) => {
                let (w, h) = gray.dimensions();
                GrayFrame {
                    width: w,
                    height: h,
                    pixels: gray.into_raw(),
                }
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = rgb.dimensions();
                let pixels = rgb
                    .pixels()
                    .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
                    .collect();
                GrayFrame {
                    width: w,
                    height: h,
                    pixels,
                }
            }
        }
    }

    pub fn to_image(&self) -> image::GrayImage {
        image::GrayImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("pixel buffer matches dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn size(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn contains(&self, rect: &Rect) -> bool {
        rect.fits_in(self.width, self.height)
    }
}

fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    y.round().clamp(0.0, 255.0) as u8
}

/// Summed-area table over a [`GrayFrame`].
///
/// Entry `(x, y)` holds the sum of all pixels in `[0, x) x [0, y)`, so the table is one
/// larger than the frame in each dimension and its first row and column are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: u32,
    height: u32,
    table: Vec<u64>,
}

impl IntegralImage {
    pub fn new(frame: &GrayFrame) -> Self {
        let (w, h) = (frame.width as usize, frame.height as usize);
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            let src = &frame.pixels[y * w..(y + 1) * w];
            for (x, &p) in src.iter().enumerate() {
                row_sum += p as u64;
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
            }
        }
        IntegralImage {
            width: frame.width,
            height: frame.height,
            table,
        }
    }

    /// Width of the source frame (the table is one wider).
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Table entry at `(x, y)` with `x <= width` and `y <= height`.
    #[inline]
    pub fn entry(&self, x: u32, y: u32) -> u64 {
        self.table[y as usize * (self.width as usize + 1) + x as usize]
    }

    /// Sum of the pixels covered by `r`.
    pub fn rect_sum(&self, r: &Rect) -> Result<u64> {
        if !r.fits_in(self.width, self.height) {
            return Err(Error::OutOfBounds {
                rect: *r,
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.sum_unchecked(r.x as u32, r.y as u32, r.w, r.h))
    }

    /// Rectangle sum without a bounds check. Callers must have validated the placement.
    #[inline]
    pub(crate) fn sum_unchecked(&self, x: u32, y: u32, w: u32, h: u32) -> u64 {
        let stride = self.width as usize + 1;
        let (x0, y0) = (x as usize, y as usize);
        let (x1, y1) = (x0 + w as usize, y0 + h as usize);
        let t = &self.table;
        t[y1 * stride + x1] + t[y0 * stride + x0] - t[y0 * stride + x1] - t[y1 * stride + x0]
    }
}

pub fn build_integral(frame: &GrayFrame) -> IntegralImage {
    IntegralImage::new(frame)
}

/// Row-major raw intensities of the `size` template placed at `offset` inside `sample`.
pub fn extract_patch(
    frame: &GrayFrame,
    sample: &Rect,
    offset: (u32, u32),
    size: (u32, u32),
) -> Result<Vec<f64>> {
    let (dx, dy) = offset;
    let (tw, th) = size;
    if tw == 0 || th == 0 || dx + tw > sample.w || dy + th > sample.h {
        return Err(Error::TemplatePlacement(format!(
            "template {tw}x{th} at ({dx}, {dy}) in sample {sample:?}"
        )));
    }
    let placed = Rect::new(sample.x + dx as i32, sample.y + dy as i32, tw, th);
    if !frame.contains(&placed) {
        return Err(Error::OutOfBounds {
            rect: placed,
            width: frame.width,
            height: frame.height,
        });
    }
    let mut out = Vec::with_capacity(tw as usize * th as usize);
    for y in placed.y as u32..placed.y as u32 + th {
        for x in placed.x as u32..placed.x as u32 + tw {
            out.push(frame.pixel(x, y) as f64);
        }
    }
    Ok(out)
}
