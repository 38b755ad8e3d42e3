//! One-pass evaluation metrics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::Rect;

/// Largest center-error threshold of the precision curve, px (1 px steps).
pub const PRECISION_MAX_THRESHOLD: usize = 50;
/// Number of steps of the success curve over [0, 1].
pub const SUCCESS_STEPS: usize = 20;
/// Threshold at which the precision score is read, px.
pub const PRECISION_SCORE_THRESHOLD: usize = 20;

/// Intersection over union; zero for disjoint boxes.
pub fn overlap(a: &Rect, b: &Rect) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Euclidean distance between box centers.
pub fn center_error(a: &Rect, b: &Rect) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

pub fn precision_thresholds() -> Vec<f64> {
    (0..=PRECISION_MAX_THRESHOLD).map(|t| t as f64).collect()
}

pub fn success_thresholds() -> Vec<f64> {
    (0..=SUCCESS_STEPS).map(|i| i as f64 / SUCCESS_STEPS as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub center_errors: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub precision_thresholds: Vec<f64>,
    /// Fraction of frames with center error <= threshold.
    pub precision: Vec<f64>,
    pub success_thresholds: Vec<f64>,
    /// Fraction of frames with overlap > threshold.
    pub success: Vec<f64>,
    pub precision_20: f64,
    /// Mean of the success curve over its grid.
    pub auc: f64,
    pub fps: Option<f64>,
}

pub fn evaluate(trajectory: &[Rect], ground_truth: &[Rect]) -> Result<EvalResult> {
    if trajectory.len() != ground_truth.len() {
        return Err(Error::LengthMismatch {
            trajectory: trajectory.len(),
            ground_truth: ground_truth.len(),
        });
    }
    let center_errors: Vec<f64> = trajectory
        .iter()
        .zip(ground_truth)
        .map(|(t, g)| center_error(t, g))
        .collect();
    let overlaps: Vec<f64> = trajectory
        .iter()
        .zip(ground_truth)
        .map(|(t, g)| overlap(t, g))
        .collect();
    let frames = trajectory.len().max(1) as f64;
    let precision_thresholds = precision_thresholds();
    let precision: Vec<f64> = precision_thresholds
        .iter()
        .map(|&t| center_errors.iter().filter(|&&e| e <= t).count() as f64 / frames)
        .collect();
    let success_thresholds = success_thresholds();
    let success: Vec<f64> = success_thresholds
        .iter()
        .map(|&t| overlaps.iter().filter(|&&o| o > t).count() as f64 / frames)
        .collect();
    let auc = success.iter().sum::<f64>() / success.len() as f64;
    Ok(EvalResult {
        precision_20: precision[PRECISION_SCORE_THRESHOLD],
        center_errors,
        overlaps,
        precision_thresholds,
        precision,
        success_thresholds,
        success,
        auc,
        fps: None,
    })
}

impl EvalResult {
    pub fn mean_center_error(&self) -> f64 {
        if self.center_errors.is_empty() {
            0.0
        } else {
            self.center_errors.iter().sum::<f64>() / self.center_errors.len() as f64
        }
    }

    /// Writes the JSON document to `path` and one two-column CSV per curve next to it
    /// (`<stem>_precision.csv`, `<stem>_success.csv`).
    pub fn export(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("create {}", dir.display()), e))?;
        }
        let json = serde_json::to_string_pretty(self)?;
        write_file(path, &json)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("eval");
        let dir = path.parent().unwrap_or(Path::new(""));
        write_file(
            &dir.join(format!("{stem}_precision.csv")),
            &curve_csv("threshold,precision", &self.precision_thresholds, &self.precision),
        )?;
        write_file(
            &dir.join(format!("{stem}_success.csv")),
            &curve_csv("threshold,success", &self.success_thresholds, &self.success),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn curve_csv(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for (x, y) in xs.iter().zip(ys) {
        s.push_str(&format!("{x},{y}\n"));
    }
    s
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(format!("write {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        let a = Rect::new(0, 0, 10, 10);
        assert_eq!(overlap(&a, &a), 1.0);
        assert_eq!(overlap(&a, &Rect::new(20, 20, 5, 5)), 0.0);
        assert_eq!(overlap(&a, &Rect::new(10, 0, 5, 5)), 0.0);
        assert!((overlap(&a, &Rect::new(5, 0, 10, 10)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn center_error_examples() {
        let a = Rect::new(0, 0, 10, 10);
        assert_eq!(center_error(&a, &a), 0.0);
        assert_eq!(center_error(&Rect::new(-5, -5, 10, 10), &Rect::new(-2, -1, 10, 10)), 5.0);
        assert_eq!(center_error(&a, &a.translated(20, 0)), 20.0);
    }

    #[test]
    fn perfect_run() {
        let gt: Vec<_> = (0..7).map(|i| Rect::new(i * 3, 2, 20, 30)).collect();
        let r = evaluate(&gt, &gt).unwrap();
        assert_eq!(r.precision_20, 1.0);
        assert_eq!(r.auc, 20.0 / 21.0);
        assert!(r.success[..20].iter().all(|&s| s == 1.0));
        assert_eq!(r.success[20], 0.0);
    }

    #[test]
    fn disjoint_run() {
        let gt = vec![Rect::new(0, 0, 10, 10); 4];
        let far = vec![Rect::new(200, 0, 10, 10); 4];
        let r = evaluate(&far, &gt).unwrap();
        assert_eq!(r.auc, 0.0);
        assert_eq!(r.precision_20, 0.0);
        assert_eq!(r.precision[50], 0.0);
    }

    #[test]
    fn precision_counts_thresholded_frames() {
        let gt = vec![Rect::new(0, 0, 10, 10); 3];
        let traj = vec![gt[0], gt[0].translated(25, 0), gt[0].translated(0, 10)];
        let r = evaluate(&traj, &gt).unwrap();
        assert_eq!(r.center_errors, vec![0.0, 25.0, 10.0]);
        assert_eq!(r.precision_20, 2.0 / 3.0);
    }

    #[test]
    fn length_mismatch() {
        let gt = vec![Rect::new(0, 0, 1, 1); 3];
        assert!(matches!(
            evaluate(&gt[..2], &gt),
            Err(Error::LengthMismatch { trajectory: 2, ground_truth: 3 })
        ));
    }

    #[test]
    fn export_writes_json_and_curves() {
        let dir = tempfile::tempdir().unwrap();
        let gt = vec![Rect::new(0, 0, 10, 10); 3];
        let mut r = evaluate(&gt, &gt).unwrap();
        r.fps = Some(12.5);
        let path = dir.path().join("run.json");
        r.export(&path).unwrap();
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(json["precision_20"], 1.0);
        assert_eq!(json["fps"], 12.5);
        assert!(json["auc"].is_number());
        let csv = std::fs::read_to_string(dir.path().join("run_success.csv")).unwrap();
        assert_eq!(csv.lines().count(), 22);
        assert_eq!(csv.lines().next(), Some("threshold,success"));
        let csv = std::fs::read_to_string(dir.path().join("run_precision.csv")).unwrap();
        assert_eq!(csv.lines().count(), 52);
        assert_eq!(EvalResult::load(&path).unwrap(), r);
    }
}
