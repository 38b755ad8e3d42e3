//! Tracks half a sequence, saves the tracker state as JSON, restores it and finishes
//! the run; the resumed boxes match an uninterrupted run.
//!
//!     cargo run --release --example snapshot_resume

use adaptive_ct::bench::{synth_sequence, SynthSpec};
use adaptive_ct::tracker::TrackerSnapshot;
use adaptive_ct::{ActTracker, TrackerConfig};

pub fn run_example() -> adaptive_ct::Result<()> {
    let seq = synth_sequence(&SynthSpec {
        frames: 40,
        noise: 3.0,
        ..SynthSpec::default()
    })?;
    let config = TrackerConfig {
        bags: 60,
        ..TrackerConfig::default()
    };
    let mut straight = ActTracker::init(&seq.frame(0)?, seq.ground_truth[0], config.clone())?;
    let mut first_half = ActTracker::init(&seq.frame(0)?, seq.ground_truth[0], config)?;
    for i in 1..20 {
        straight.track_frame(&seq.frame(i)?)?;
        first_half.track_frame(&seq.frame(i)?)?;
    }
    let json = serde_json::to_string(&first_half.snapshot())?;
    println!("snapshot: {} bytes", json.len());
    drop(first_half);

    let snap: TrackerSnapshot = serde_json::from_str(&json)?;
    let mut resumed = ActTracker::restore(snap)?;
    let mut mismatches = 0;
    for i in 20..seq.len() {
        let f = seq.frame(i)?;
        let (a, b) = (straight.track_frame(&f)?, resumed.track_frame(&f)?);
        mismatches += (a.rect != b.rect) as usize;
    }
    println!("frames after resume: {}, mismatches: {mismatches}", seq.len() - 20);
    assert_eq!(mismatches, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> adaptive_ct::Result<()> {
    run_example()
}
