//! Generates template bags for a target, computes class centers from positive and
//! negative samples, and greedily selects the templates that best separate them.
//!
//!     cargo run --example template_selection

use adaptive_ct::features::{class_centers, generate_bags};
use adaptive_ct::ovb::{margin, select_templates};
use adaptive_ct::{GrayFrame, Rect};

pub fn run_example() -> adaptive_ct::Result<()> {
    // Bright checkerboard target on a dark gradient.
    let frame = GrayFrame::from_fn(160, 120, |x, y| {
        if (60..100).contains(&x) && (40..80).contains(&y) {
            if (x / 5 + y / 5) % 2 == 0 { 230 } else { 120 }
        } else {
            (x / 4) as u8
        }
    })?;
    let bags = generate_bags(40, 40, 4, 12, 7)?;
    let pos: Vec<Rect> = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
        .iter()
        .map(|&(dx, dy)| Rect::new(60 + dx, 40 + dy, 40, 40))
        .collect();
    let neg: Vec<Rect> = [(-12, 0), (12, 0), (0, -12), (0, 12), (9, 9), (-9, -9)]
        .iter()
        .map(|&(dx, dy)| Rect::new(60 + dx, 40 + dy, 40, 40))
        .collect();
    let centers = class_centers(&frame, &bags, &pos, &neg)?;
    for (bag, pairs) in bags.iter().zip(&centers.bags) {
        let sel = select_templates(pairs, 3)?;
        println!(
            "bag {} ({}x{}): margin {:.3}, picked {:?}, bound {:.3}",
            bag.index,
            bag.width,
            bag.height,
            margin(pairs),
            sel.indices,
            sel.objective
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
