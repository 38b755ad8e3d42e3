//! Builds an integral image and compares a few box sums against direct summation.
//!
//!     cargo run --example integral_image

use adaptive_ct::{GrayFrame, IntegralImage, Rect};

pub fn run_example() -> adaptive_ct::Result<()> {
    let frame = GrayFrame::from_fn(64, 48, |x, y| ((x * 7 + y * 13) % 251) as u8)?;
    let ii = IntegralImage::new(&frame);
    println!("total intensity {}", ii.entry(64, 48));
    for r in [Rect::new(0, 0, 64, 48), Rect::new(10, 5, 20, 20), Rect::new(63, 47, 1, 1)] {
        let mut direct = 0u64;
        for y in r.y as u32..r.y as u32 + r.h {
            for x in r.x as u32..r.x as u32 + r.w {
                direct += frame.pixel(x, y) as u64;
            }
        }
        let fast = ii.rect_sum(&r)?;
        assert_eq!(fast, direct);
        println!("{r:?}: {fast}");
    }
    // Boxes that stick out of the frame are errors, not clamped.
    println!("{}", ii.rect_sum(&Rect::new(60, 40, 10, 10)).unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
