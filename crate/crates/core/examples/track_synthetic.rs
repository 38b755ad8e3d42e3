//! Tracks a textured square bouncing across a textured background with the default
//! parameters and prints the one-pass metrics.
//!
//!     cargo run --release --example track_synthetic

use adaptive_ct::bench::{run_and_evaluate, synth_sequence, SynthSpec, TrackerKind};
use adaptive_ct::TrackerConfig;

pub fn run_example() -> adaptive_ct::Result<()> {
    let spec = SynthSpec {
        frames: 200,
        bounce: true,
        noise: 4.0,
        ..SynthSpec::default()
    };
    let seq = synth_sequence(&spec)?;
    let (run, eval) = run_and_evaluate(&seq, &TrackerKind::Act(TrackerConfig::default()))?;
    let worst = eval.overlaps.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("frames               {}", seq.len());
    println!("mean center error    {:.2} px", eval.mean_center_error());
    println!("worst overlap        {worst:.3}");
    println!("precision @ 20 px    {:.3}", eval.precision_20);
    println!("success AUC          {:.3}", eval.auc);
    println!("rectified frames     {}", run.rectified_frames());
    println!("fps                  {:.1}", run.fps);
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
