//! Gaussian naive Bayes over compressed features and the conservative template update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{normalized, CenterPair, TemplateCenters};

/// Lower bound on every class standard deviation.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// Per-feature Gaussian parameters of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl ClassStats {
    /// Batch mean and population standard deviation of each feature, sigma floored.
    pub fn from_batch(features: &[Vec<f64>], label: &'static str) -> Result<Self> {
        let first = features.first().ok_or(Error::EmptySamples(label))?;
        let dim = first.len();
        if features.iter().any(|v| v.len() != dim) {
            return Err(Error::GeometryMismatch(format!(
                "{label} feature vectors differ in length"
            )));
        }
        let n = features.len() as f64;
        let mut mu = vec![0.0; dim];
        for v in features {
            for (m, x) in mu.iter_mut().zip(v) {
                *m += x;
            }
        }
        mu.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for v in features {
            for ((s, x), m) in var.iter_mut().zip(v).zip(&mu) {
                *s += (x - m) * (x - m);
            }
        }
        let sigma = var.iter().map(|s| (s / n).sqrt().max(SIGMA_FLOOR)).collect();
        Ok(ClassStats { mu, sigma })
    }

    pub fn dimension(&self) -> usize {
        self.mu.len()
    }

    /// Exponential-forgetting blend of stored and batch statistics; `lambda` weighs the
    /// stored side.
    pub fn blend(&self, batch: &ClassStats, lambda: f64) -> ClassStats {
        let mut mu = Vec::with_capacity(self.mu.len());
        let mut sigma = Vec::with_capacity(self.mu.len());
        for i in 0..self.mu.len() {
            let (m0, s0) = (self.mu[i], self.sigma[i]);
            let (m1, s1) = (batch.mu[i], batch.sigma[i]);
            mu.push(lambda * m0 + (1.0 - lambda) * m1);
            let var = lambda * s0 * s0
                + (1.0 - lambda) * s1 * s1
                + lambda * (1.0 - lambda) * (m0 - m1) * (m0 - m1);
            sigma.push(var.sqrt().max(SIGMA_FLOOR));
        }
        ClassStats { mu, sigma }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub positive: ClassStats,
    pub negative: ClassStats,
}

impl ClassifierParams {
    /// First-frame initialization straight from the batch statistics.
    pub fn from_batches(positive: &[Vec<f64>], negative: &[Vec<f64>]) -> Result<Self> {
        let positive = ClassStats::from_batch(positive, "positive")?;
        let negative = ClassStats::from_batch(negative, "negative")?;
        if positive.dimension() != negative.dimension() {
            return Err(Error::GeometryMismatch(
                "positive and negative features differ in length".into(),
            ));
        }
        Ok(ClassifierParams { positive, negative })
    }

    pub fn dimension(&self) -> usize {
        self.positive.dimension()
    }
}

/// Learning rates of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateConfig {
    /// Classifier learning parameter in (0, 1).
    pub lambda: f64,
    /// Template blend ratio in (0, 1].
    pub eta: f64,
    /// Template change threshold, raw intensity units.
    pub theta: f64,
}

impl Default for UpdateConfig {
    fn default() -> Self {
        UpdateConfig {
            lambda: 0.85,
            eta: 0.05,
            theta: 100.0,
        }
    }
}

impl UpdateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::Config(format!("lambda must be in (0, 1), got {}", self.lambda)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::Config(format!("theta must be >= 0, got {}", self.theta)));
        }
        Ok(())
    }
}

#[inline]
fn log_ratio_term(v: f64, mu_p: f64, sigma_p: f64, mu_n: f64, sigma_n: f64) -> f64 {
    let zp = (v - mu_p) / sigma_p;
    let zn = (v - mu_n) / sigma_n;
    (sigma_n / sigma_p).ln() - 0.5 * zp * zp + 0.5 * zn * zn
}

/// Log-likelihood ratio `sum_i log p(v_i|+) - log p(v_i|-)` under equal class priors.
pub fn classify(v: &[f64], params: &ClassifierParams) -> f64 {
    let (p, n) = (&params.positive, &params.negative);
    let mut h = 0.0;
    for i in 0..v.len() {
        h += log_ratio_term(v[i], p.mu[i], p.sigma[i], n.mu[i], n.sigma[i]);
    }
    h
}

pub fn update_params(
    params: &ClassifierParams,
    positive: &[Vec<f64>],
    negative: &[Vec<f64>],
    lambda: f64,
) -> Result<ClassifierParams> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Config(format!("lambda must be in [0, 1), got {lambda}")));
    }
    let batch = ClassifierParams::from_batches(positive, negative)?;
    if batch.dimension() != params.dimension() {
        return Err(Error::GeometryMismatch(format!(
            "batch features have {} entries, model has {}",
            batch.dimension(),
            params.dimension()
        )));
    }
    Ok(ClassifierParams {
        positive: params.positive.blend(&batch.positive, lambda),
        negative: params.negative.blend(&batch.negative, lambda),
    })
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Keeps `stored` unless it moved at least `theta` away from `new`, in which case
/// returns `eta * new + (1 - eta) * stored`.
fn conservative(stored: &[f64], new: &[f64], theta: f64, eta: f64) -> Option<Vec<f64>> {
    if l2_distance(stored, new) < theta {
        None
    } else {
        Some(
            stored
                .iter()
                .zip(new)
                .map(|(s, n)| eta * n + (1.0 - eta) * s)
                .collect(),
        )
    }
}

/// Applies the conservative update to every positive and negative center. Returns the
/// updated centers and how many center vectors were blended.
pub fn update_templates_counted(
    centers: &TemplateCenters,
    new_centers: &TemplateCenters,
    theta: f64,
    eta: f64,
) -> Result<(TemplateCenters, usize)> {
    if centers.bags.len() != new_centers.bags.len() {
        return Err(Error::GeometryMismatch(format!(
            "{} stored bags vs {} new bags",
            centers.bags.len(),
            new_centers.bags.len()
        )));
    }
    let mut blended = 0;
    let mut bags = Vec::with_capacity(centers.bags.len());
    for (i, (old, new)) in centers.bags.iter().zip(&new_centers.bags).enumerate() {
        if old.len() != new.len() {
            return Err(Error::GeometryMismatch(format!(
                "bag {i}: {} stored templates vs {} new",
                old.len(),
                new.len()
            )));
        }
        let mut out = Vec::with_capacity(old.len());
        for (j, (o, n)) in old.iter().zip(new).enumerate() {
            if o.positive.len() != n.positive.len() || o.negative.len() != n.negative.len() {
                return Err(Error::GeometryMismatch(format!(
                    "bag {i} template {j}: patch sizes differ"
                )));
            }
            let pos = conservative(&o.positive, &n.positive, theta, eta);
            let neg = conservative(&o.negative, &n.negative, theta, eta);
            blended += pos.is_some() as usize + neg.is_some() as usize;
            out.push(match (pos, neg) {
                (None, None) => o.clone(),
                (pos, neg) => {
                    let positive = pos.unwrap_or_else(|| o.positive.clone());
                    let negative = neg.unwrap_or_else(|| o.negative.clone());
                    CenterPair {
                        positive_unit: normalized(&positive),
                        negative_unit: normalized(&negative),
                        positive,
                        negative,
                    }
                }
            });
        }
        bags.push(out);
    }
    Ok((TemplateCenters { bags }, blended))
}

pub fn update_templates(
    centers: &TemplateCenters,
    new_centers: &TemplateCenters,
    theta: f64,
    eta: f64,
) -> Result<TemplateCenters> {
    update_templates_counted(centers, new_centers, theta, eta).map(|(c, _)| c)
}
