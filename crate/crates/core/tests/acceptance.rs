//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adaptive_ct::baseline::CtConfig;
use adaptive_ct::bench::{
    evaluate, run_and_evaluate, run_sequence, synth_sequence, SynthSpec, TrackerKind,
};
use adaptive_ct::features::{normalized, CenterPair, TemplateCenters};
use adaptive_ct::model::{classify, ClassStats, ClassifierParams, update_templates};
use adaptive_ct::ovb::{margin, select_templates, PartialSum, lower_bound_value};
use adaptive_ct::tracker::{extrapolate, Location};
use adaptive_ct::{ActTracker, GrayFrame, IntegralImage, Rect, TrackerConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_frame(rng: &mut ChaCha8Rng, w: u32, h: u32) -> GrayFrame {
    let px = (0..w * h).map(|_| rng.random::<u8>()).collect();
    GrayFrame::new(w, h, px).unwrap()
}

fn integral_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    for case in 0..1000 {
        let f = random_frame(&mut rng, 64, 64);
        let ii = IntegralImage::new(&f);
        let x = rng.random_range(0..64);
        let y = rng.random_range(0..64);
        let w = rng.random_range(1..=64 - x);
        let h = rng.random_range(1..=64 - y);
        let mut brute = 0u64;
        for yy in y..y + h {
            for xx in x..x + w {
                brute += f.pixel(xx, yy) as u64;
            }
        }
        let got = ii
            .rect_sum(&Rect::new(x as i32, y as i32, w, h))
            .map_err(|e| e.to_string())?;
        check(got == brute, || format!("case {case}: {got} != {brute}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("1000 rects exact in {secs:.3}s"))
}

fn random_pair(rng: &mut ChaCha8Rng, dim: usize) -> CenterPair {
    let pos: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let neg: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    CenterPair::from_raw(pos, neg)
}

fn random_bag(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<CenterPair> {
    (0..n).map(|_| random_pair(rng, dim)).collect()
}

/// Sequential argmax of the bound itself, sums rebuilt from scratch for every candidate.
/// Negative radicands keep their order through a signed square root.
fn oracle_select(bag: &[CenterPair], k: usize) -> Vec<usize> {
    let n = bag.len() as f64;
    let dim = bag[0].positive_unit.len();
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..bag.len() {
            if chosen.contains(&c) {
                continue;
            }
            let mut sp = vec![0.0; dim];
            let mut sn = vec![0.0; dim];
            for &j in chosen.iter().chain(std::iter::once(&c)) {
                for d in 0..dim {
                    sp[d] += bag[j].positive_unit[d];
                    sn[d] += bag[j].negative_unit[d];
                }
            }
            let cross: f64 = (0..dim).map(|d| sp[d] * sn[d]).sum();
            let r = 2.0 * n - 2.0 * cross;
            let j = r.signum() * r.abs().sqrt();
            if best.map_or(true, |(_, b)| j > b) {
                best = Some((c, j));
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

fn ovb_matches_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let start = Instant::now();
    for case in 0..100 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=n.min(3));
        let dim = rng.random_range(1..=6);
        let bag = random_bag(&mut rng, n, dim);
        let got = select_templates(&bag, k).map_err(|e| e.to_string())?.indices;
        let want = oracle_select(&bag, k);
        check(got == want, || format!("case {case}: {got:?} != {want:?}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 5.0, || format!("took {secs:.3}s"))?;
    Ok(format!("100 instances identical in {secs:.3}s"))
}

fn margin_dominates_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = f64::INFINITY;
    for case in 0..1000 {
        let n = rng.random_range(1..=10);
        let dim = rng.random_range(1..=8);
        let bag = random_bag(&mut rng, n, dim);
        let mut partial = PartialSum::zeros(dim);
        for p in &bag[..n - 1] {
            partial.add(p);
        }
        let j = lower_bound_value(&partial, &bag[n - 1], n);
        let m = margin(&bag);
        check(m >= j - 1e-12, || format!("case {case}: margin {m} < bound {j}"))?;
        worst = worst.min(m - j);
    }
    Ok(format!("1000 bags, min(margin - J) = {worst:.3e}"))
}

fn equal_params_give_zero() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=50);
        let stats = ClassStats {
            mu: (0..dim).map(|_| rng.random_range(-100.0..100.0)).collect(),
            sigma: (0..dim).map(|_| rng.random_range(0.001..50.0)).collect(),
        };
        let params = ClassifierParams {
            positive: stats.clone(),
            negative: stats,
        };
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-200.0..200.0)).collect();
        worst = worst.max(classify(&v, &params).abs());
    }
    check(worst < 1e-9, || format!("max |H| = {worst:e}"))?;
    Ok(format!("max |H| = {worst:.1e}"))
}

fn blend_matches_mixture() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (m0, s0) = (rng.random_range(-5.0..5.0), rng.random_range(0.01..5.0));
        let (m1, s1) = (rng.random_range(-5.0..5.0), rng.random_range(0.01..5.0));
        let lambda = rng.random_range(0.0..1.0);
        let stored = ClassStats { mu: vec![m0], sigma: vec![s0] };
        let batch = ClassStats { mu: vec![m1], sigma: vec![s1] };
        let out = stored.blend(&batch, lambda);
        let mean = lambda * m0 + (1.0 - lambda) * m1;
        let second = lambda * (s0 * s0 + m0 * m0) + (1.0 - lambda) * (s1 * s1 + m1 * m1);
        let var = second - mean * mean;
        worst = worst.max((out.sigma[0] * out.sigma[0] - var).abs());
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max |sigma^2 - mixture variance| = {worst:.1e}"))
}

fn extrapolation_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let (x0, y0) = (rng.random_range(-500..500), rng.random_range(-500..500));
        let (vx, vy) = (rng.random_range(-20..=20), rng.random_range(-20..=20));
        let len = rng.random_range(4..10);
        let hist: Vec<Location> = (0..len)
            .map(|t| Location::new(x0 + vx * t, y0 + vy * t))
            .collect();
        let got = extrapolate(&hist).map_err(|e| e.to_string())?;
        let want = ((x0 + vx * len) as f64, (y0 + vy * len) as f64);
        check(got == want, || format!("case {case}: {got:?} != {want:?}"))?;
    }

    // Through the tracker: move a target at constant velocity, then force a miss.
    let spec = SynthSpec {
        canvas_width: 200,
        canvas_height: 160,
        start_x: 30,
        start_y: 40,
        velocity_x: 3,
        velocity_y: 2,
        frames: 6,
        ..SynthSpec::default()
    };
    let seq = synth_sequence(&spec).map_err(|e| e.to_string())?;
    let cfg = TrackerConfig { bags: 40, ..TrackerConfig::default() };
    let mut t = ActTracker::init(&seq.frame(0).unwrap(), seq.ground_truth[0], cfg)
        .map_err(|e| e.to_string())?;
    for i in 1..5 {
        t.track_frame(&seq.frame(i).unwrap()).map_err(|e| e.to_string())?;
    }
    let (ex, ey) = extrapolate(t.history()).map_err(|e| e.to_string())?;
    t.set_confidence_threshold(f64::INFINITY);
    let out = t.track_frame(&seq.frame(5).unwrap()).map_err(|e| e.to_string())?;
    check(out.rectified, || "frame not rectified".into())?;
    check(
        (out.rect.x as f64, out.rect.y as f64) == (ex.round(), ey.round()),
        || format!("tracker emitted {:?}, extrapolation ({ex}, {ey})", out.rect),
    )?;
    Ok("100 histories exact; tracker miss lands on extrapolation".into())
}

fn conservative_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (eta, steps) = (0.05, 100);
    let dim = 16;
    let pair = |rng: &mut ChaCha8Rng| {
        CenterPair::from_raw(
            (0..dim).map(|_| rng.random_range(0.0..255.0)).collect(),
            (0..dim).map(|_| rng.random_range(0.0..255.0)).collect(),
        )
    };
    let mut stored = TemplateCenters { bags: vec![(0..4).map(|_| pair(&mut rng)).collect()] };
    let target = TemplateCenters { bags: vec![(0..4).map(|_| pair(&mut rng)).collect()] };
    let gap = |a: &TemplateCenters| -> Vec<f64> {
        a.bags[0]
            .iter()
            .zip(&target.bags[0])
            .flat_map(|(s, t)| {
                s.positive
                    .iter()
                    .zip(&t.positive)
                    .chain(s.negative.iter().zip(&t.negative))
                    .map(|(x, y)| (x - y).abs())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let initial = gap(&stored);
    for _ in 0..steps {
        stored = update_templates(&stored, &target, 0.0, eta).map_err(|e| e.to_string())?;
    }
    let decay = (1.0 - eta).powi(steps);
    let mut worst = f64::NEG_INFINITY;
    for (g0, g) in initial.iter().zip(gap(&stored)) {
        let bound = decay * g0 + 1e-9;
        check(g <= bound, || format!("gap {g} exceeds bound {bound}"))?;
        worst = worst.max(g - decay * g0);
    }
    let unit_ok = stored.bags[0]
        .iter()
        .all(|p| p.positive_unit == normalized(&p.positive));
    check(unit_ok, || "normalized copies stale".into())?;
    Ok(format!("T={steps}: max(gap - (1-eta)^T gap0) = {worst:.1e}"))
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn params_bits(a: &ClassifierParams, b: &ClassifierParams) -> bool {
    same_bits(&a.positive.mu, &b.positive.mu)
        && same_bits(&a.positive.sigma, &b.positive.sigma)
        && same_bits(&a.negative.mu, &b.negative.mu)
        && same_bits(&a.negative.sigma, &b.negative.sigma)
}

fn centers_bits(a: &TemplateCenters, b: &TemplateCenters) -> bool {
    a.bags.len() == b.bags.len()
        && a.bags.iter().zip(&b.bags).all(|(x, y)| {
            x.len() == y.len()
                && x.iter().zip(y).all(|(p, q)| {
                    same_bits(&p.positive, &q.positive)
                        && same_bits(&p.negative, &q.negative)
                        && same_bits(&p.positive_unit, &q.positive_unit)
                        && same_bits(&p.negative_unit, &q.negative_unit)
                })
        })
}

fn no_update_below_threshold() -> Outcome {
    let spec = SynthSpec { frames: 4, noise: 3.0, ..SynthSpec::default() };
    let seq = synth_sequence(&spec).map_err(|e| e.to_string())?;
    let cfg = TrackerConfig { bags: 60, ..TrackerConfig::default() };
    let mut t = ActTracker::init(&seq.frame(0).unwrap(), seq.ground_truth[0], cfg)
        .map_err(|e| e.to_string())?;
    t.track_frame(&seq.frame(1).unwrap()).map_err(|e| e.to_string())?;

    // Forced miss.
    let (p0, c0, s0) = (t.params().clone(), t.centers().clone(), t.selection().to_vec());
    t.set_confidence_threshold(f64::MAX);
    let out = t.track_frame(&seq.frame(2).unwrap()).map_err(|e| e.to_string())?;
    check(out.rectified, || "forced miss not rectified".into())?;
    check(params_bits(&p0, t.params()), || "params changed on forced miss".into())?;
    check(centers_bits(&c0, t.centers()), || "centers changed on forced miss".into())?;
    check(s0 == t.selection(), || "selection changed on forced miss".into())?;

    // Natural miss: the target vanishes into flat gray.
    t.set_confidence_threshold(0.0);
    let blank = GrayFrame::from_fn(320, 240, |_, _| 128).unwrap();
    let out = t.track_frame(&blank).map_err(|e| e.to_string())?;
    check(out.rectified, || format!("blank frame scored {}", out.confidence))?;
    check(params_bits(&p0, t.params()), || "params changed on blank frame".into())?;
    check(centers_bits(&c0, t.centers()), || "centers changed on blank frame".into())?;
    Ok(format!("forced and natural (conf {:.1}) misses leave the model bit-identical", out.confidence))
}

fn synthetic_sequence_tracked() -> Outcome {
    let spec = SynthSpec { frames: 200, bounce: true, noise: 4.0, ..SynthSpec::default() };
    let seq = synth_sequence(&spec).map_err(|e| e.to_string())?;
    let kind = TrackerKind::Act(TrackerConfig::default());
    let start = Instant::now();
    let (run, eval) = run_and_evaluate(&seq, &kind).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let again = run_sequence(&seq, &kind).map_err(|e| e.to_string())?;
    let mean = eval.mean_center_error();
    let worst = eval.overlaps.iter().cloned().fold(f64::INFINITY, f64::min);
    check(mean <= 3.0, || format!("mean center error {mean:.2} px"))?;
    check(worst > 0.5, || format!("worst overlap {worst:.3}"))?;
    check(again.boxes == run.boxes, || "repeat run differs".into())?;
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "mean error {mean:.2} px, min overlap {worst:.3}, deterministic, {secs:.1}s ({:.1} fps)",
        run.fps
    ))
}

fn metric_goldens() -> Outcome {
    let gt = vec![Rect::new(0, 0, 10, 10); 3];
    let traj = [Rect::new(0, 0, 10, 10), Rect::new(25, 0, 10, 10), Rect::new(6, 8, 10, 10)];
    let e = evaluate(&traj, &gt).map_err(|e| e.to_string())?;
    check(e.center_errors == [0.0, 25.0, 10.0], || format!("errors {:?}", e.center_errors))?;
    check(e.precision_20 == 2.0 / 3.0, || format!("precision@20 {}", e.precision_20))?;

    let perfect = evaluate(&gt, &gt).map_err(|e| e.to_string())?;
    check(perfect.auc == 20.0 / 21.0, || format!("perfect AUC {}", perfect.auc))?;
    check(perfect.success.len() == 21, || "success curve length".into())?;

    // Overlaps 1, 1/3, 0, 1/2 clear 20, 7, 0, 10 of the thresholds.
    let gt4 = vec![Rect::new(0, 0, 10, 10); 4];
    let traj4 = [
        Rect::new(0, 0, 10, 10),
        Rect::new(5, 0, 10, 10),
        Rect::new(50, 50, 10, 10),
        Rect::new(0, 0, 10, 5),
    ];
    let e4 = evaluate(&traj4, &gt4).map_err(|e| e.to_string())?;
    let want = 37.0 / 84.0;
    check((e4.auc - want).abs() <= 1e-15, || format!("AUC {} != {want}", e4.auc))?;
    check(e4.precision_20 == 0.75, || format!("precision@20 {}", e4.precision_20))?;
    Ok("precision 2/3, perfect AUC 20/21, hand-built AUC 37/84".into())
}

fn act_beats_ct() -> Outcome {
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
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for spec in [steady, changing] {
        let seq = synth_sequence(&spec).map_err(|e| e.to_string())?;
        let (_, act) = run_and_evaluate(&seq, &TrackerKind::Act(TrackerConfig::default()))
            .map_err(|e| e.to_string())?;
        let (_, ct) = run_and_evaluate(&seq, &TrackerKind::Ct(CtConfig::default()))
            .map_err(|e| e.to_string())?;
        let line = format!("{}: ACT {:.3} vs CT {:.3}", seq.name, act.auc, ct.auc);
        if act.auc < ct.auc {
            failures.push(line.clone());
        }
        report.push(line);
    }
    check(failures.is_empty(), || failures.join("; "))?;
    Ok(report.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("integral image matches brute force", integral_oracle),
        ("greedy selection matches sequential-argmax oracle", ovb_matches_oracle),
        ("bag margin dominates the selection bound", margin_dominates_bound),
        ("equal class parameters give zero score", equal_params_give_zero),
        ("blended variance is the mixture variance", blend_matches_mixture),
        ("constant-velocity rectification is exact", extrapolation_exact),
        ("conservative update converges geometrically", conservative_convergence),
        ("no model change below the confidence threshold", no_update_below_threshold),
        ("synthetic translating target is tracked", synthetic_sequence_tracked),
        ("precision and success metric goldens", metric_goldens),
        ("adaptive tracker AUC >= CT baseline AUC", act_beats_ct),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
