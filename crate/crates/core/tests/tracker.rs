use adaptive_ct::bench::{synth_sequence, SynthSpec};
use adaptive_ct::tracker::{Tracker, TrackerSnapshot};
use adaptive_ct::{ActTracker, Error, GrayFrame, Rect, TrackerConfig};

fn small_config() -> TrackerConfig {
    TrackerConfig {
        bags: 50,
        ..TrackerConfig::default()
    }
}

fn textured(seed: u64, w: u32, h: u32) -> Vec<u8> {
    // Blocky texture from a cheap hash, no external state.
    (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) / 4, (i / w) / 4);
            let mut z = seed ^ ((x as u64) << 32 | y as u64);
            z = z.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            z ^= z >> 29;
            (z % 256) as u8
        })
        .collect()
}

/// Textured 40x40 target pasted at `(x, y)` over `bg`.
fn scene(bg: &[u8], x: u32, y: u32) -> GrayFrame {
    let tex = textured(99, 40, 40);
    GrayFrame::from_fn(200, 150, |px, py| {
        if (x..x + 40).contains(&px) && (y..y + 40).contains(&py) {
            tex[((py - y) * 40 + (px - x)) as usize]
        } else {
            bg[(py * 200 + px) as usize]
        }
    })
    .unwrap()
}

#[test]
fn init_builds_full_model() {
    let bg = textured(5, 200, 150);
    let f = scene(&bg, 80, 50);
    let t = ActTracker::init(&f, Rect::new(80, 50, 40, 40), TrackerConfig::default()).unwrap();
    assert_eq!(t.bags().len(), 150);
    assert!(t.bags().iter().all(|b| b.offsets.len() == 30));
    for sel in t.selection() {
        let mut s = sel.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 5);
    }
    let p = t.params();
    assert_eq!(p.dimension(), 150);
    for s in [&p.positive, &p.negative] {
        assert!(s.mu.iter().all(|m| m.is_finite()));
        assert!(s.sigma.iter().all(|&x| x.is_finite() && x >= 1e-3));
    }
}

#[test]
fn init_is_deterministic() {
    let bg = textured(5, 200, 150);
    let f = scene(&bg, 80, 50);
    let a = ActTracker::init(&f, Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let b = ActTracker::init(&f, Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let json = |t: &ActTracker| serde_json::to_string(&t.snapshot()).unwrap();
    assert_eq!(json(&a), json(&b));
}

#[test]
fn tiny_target_rejected() {
    let f = GrayFrame::from_fn(50, 50, |x, y| (x * y) as u8).unwrap();
    let err = ActTracker::init(&f, Rect::new(10, 10, 6, 6), small_config()).unwrap_err();
    assert!(matches!(err, Error::TargetTooSmall { .. }), "{err}");
}

#[test]
fn box_outside_frame_rejected() {
    let f = GrayFrame::from_fn(50, 50, |x, _| x as u8).unwrap();
    let err = ActTracker::init(&f, Rect::new(30, 30, 40, 40), small_config()).unwrap_err();
    assert!(matches!(err, Error::OutOfBounds { .. }));
}

#[test]
fn identical_frame_keeps_location() {
    let bg = textured(5, 200, 150);
    let f = scene(&bg, 80, 50);
    let mut t = ActTracker::init(&f, Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let out = t.track_frame(&f).unwrap();
    assert!(!out.rectified);
    assert_eq!(out.rect, Rect::new(80, 50, 40, 40));
}

#[test]
fn follows_translation_on_flat_background() {
    let bg = vec![128u8; 200 * 150];
    let mut t =
        ActTracker::init(&scene(&bg, 80, 50), Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let out = t.track_frame(&scene(&bg, 83, 50)).unwrap();
    assert_eq!((out.rect.x, out.rect.y), (83, 50));
    assert!(out.confidence >= 0.0);
}

#[test]
fn blanked_target_rectifies() {
    let bg = textured(5, 200, 150);
    let mut t =
        ActTracker::init(&scene(&bg, 80, 50), Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let before = t.snapshot();
    let blank = GrayFrame::from_fn(200, 150, |_, _| 0).unwrap();
    let out = t.track_frame(&blank).unwrap();
    assert!(out.rectified);
    assert!(out.confidence < 0.0);
    // One-entry history: extrapolation stays put.
    assert_eq!(out.rect, Rect::new(80, 50, 40, 40));
    assert_eq!(t.params(), &before.params);
    assert_eq!(t.centers(), &before.centers);
}

#[test]
fn search_stays_local_and_single_scale() {
    let spec = SynthSpec {
        frames: 30,
        velocity_x: 4,
        velocity_y: 1,
        noise: 6.0,
        ..SynthSpec::default()
    };
    let seq = synth_sequence(&spec).unwrap();
    let mut t = ActTracker::init(&seq.frame(0).unwrap(), seq.ground_truth[0], small_config()).unwrap();
    let mut prev = t.current();
    for i in 1..seq.len() {
        let out = t.track(&seq.frame(i).unwrap()).unwrap();
        assert_eq!((out.rect.w, out.rect.h), (40, 40));
        if !out.rectified {
            let (dx, dy) = ((out.rect.x - prev.x) as f64, (out.rect.y - prev.y) as f64);
            assert!((dx * dx + dy * dy).sqrt() < 25.0);
        }
        prev = out.rect;
    }
}

#[test]
fn frame_size_mismatch() {
    let bg = textured(5, 200, 150);
    let mut t =
        ActTracker::init(&scene(&bg, 80, 50), Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let other = GrayFrame::from_fn(100, 100, |_, _| 0).unwrap();
    assert!(matches!(
        t.track_frame(&other),
        Err(Error::FrameSizeMismatch { .. })
    ));
}

#[test]
fn snapshot_resumes_bit_exactly() {
    let spec = SynthSpec {
        frames: 16,
        noise: 3.0,
        ..SynthSpec::default()
    };
    let seq = synth_sequence(&spec).unwrap();
    let frames: Vec<GrayFrame> = (0..seq.len()).map(|i| seq.frame(i).unwrap()).collect();
    let mut a = ActTracker::init(&frames[0], seq.ground_truth[0], small_config()).unwrap();
    for f in &frames[1..8] {
        a.track_frame(f).unwrap();
    }
    let json = serde_json::to_string(&a.snapshot()).unwrap();
    let snap: TrackerSnapshot = serde_json::from_str(&json).unwrap();
    let mut b = ActTracker::restore(snap).unwrap();
    for f in &frames[8..] {
        let oa = a.track_frame(f).unwrap();
        let ob = b.track_frame(f).unwrap();
        assert_eq!(oa.rect, ob.rect);
        assert_eq!(oa.confidence.to_bits(), ob.confidence.to_bits());
    }
    assert_eq!(a.snapshot(), b.snapshot());
}

#[test]
fn snapshot_version_checked() {
    let bg = textured(5, 200, 150);
    let t = ActTracker::init(&scene(&bg, 80, 50), Rect::new(80, 50, 40, 40), small_config()).unwrap();
    let mut snap = t.snapshot();
    snap.version += 1;
    assert!(matches!(ActTracker::restore(snap), Err(Error::SnapshotVersion(_))));
}
