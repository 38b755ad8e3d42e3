//! Scores a trajectory against ground truth and writes the JSON report plus the
//! precision and success curves.
//!
//!     cargo run --example evaluate_trajectory

use adaptive_ct::bench::evaluate;
use adaptive_ct::Rect;

pub fn run_example() -> adaptive_ct::Result<()> {
    let gt: Vec<Rect> = (0..50).map(|t| Rect::new(20 + 2 * t, 30, 32, 32)).collect();
    // Drifts off target after frame 30.
    let traj: Vec<Rect> = gt
        .iter()
        .enumerate()
        .map(|(t, r)| r.translated((t as i32 - 30).max(0), 1))
        .collect();
    let result = evaluate(&traj, &gt)?;
    println!("precision @ 20 px  {:.3}", result.precision_20);
    println!("success AUC        {:.3}", result.auc);
    println!("mean center error  {:.2} px", result.mean_center_error());

    let dir = std::env::temp_dir().join("act_evaluate_example");
    std::fs::create_dir_all(&dir).map_err(|e| adaptive_ct::Error::Io {
        context: dir.display().to_string(),
        source: e,
    })?;
    result.export(&dir.join("eval.json"))?;
    println!("wrote {}", dir.join("eval.json").display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
