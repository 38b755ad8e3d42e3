//! Runs the adaptive tracker and the original CT baseline on two synthetic sequences:
//! a steady one and one whose target texture changes halfway through.
//!
//!     cargo run --release --example ct_baseline_compare

use adaptive_ct::baseline::CtConfig;
use adaptive_ct::bench::{run_and_evaluate, synth_sequence, SynthSpec, TrackerKind};
use adaptive_ct::TrackerConfig;

pub fn run_example() -> adaptive_ct::Result<()> {
    let steady = SynthSpec {
        name: "steady".into(),
        frames: 200,
        bounce: true,
        noise: 4.0,
        ..SynthSpec::default()
    };
    let changing = SynthSpec {
        name: "texture-change".into(),
        texture_change_frame: Some(100),
        ..steady.clone()
    };
    println!("{:<16} {:<12} {:>8} {:>8} {:>8}", "sequence", "tracker", "prec@20", "auc", "fps");
    for spec in [steady, changing] {
        let seq = synth_sequence(&spec)?;
        for kind in [
            TrackerKind::Act(TrackerConfig::default()),
            TrackerKind::Ct(CtConfig::default()),
        ] {
            let (run, eval) = run_and_evaluate(&seq, &kind)?;
            println!(
                "{:<16} {:<12} {:>8.3} {:>8.3} {:>8.1}",
                seq.name,
                kind.name(),
                eval.precision_20,
                eval.auc,
                run.fps
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
