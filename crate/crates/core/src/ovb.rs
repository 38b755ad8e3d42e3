//! Online vector boosting: greedy selection of `k` templates per bag.
//!
//! The bag margin is the distance between the averaged positive and negative bag
//! representations, `sqrt(2n - 2 sum_j <z+_j, z-_j>)` for unit centers. Its lower bound
//! replaces the per-template inner products by the inner product of the summed centers,
//! which is what the greedy steps maximize. At a fixed step the bound is a strictly
//! decreasing function of `<S+ + z+, S- + z->`, so candidates are scored by the negated
//! inner product directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::CenterPair;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sqrt(max(0, 2n - 2 sum_j <z+_j, z-_j>))` over the normalized centers of one bag.
pub fn margin(bag: &[CenterPair]) -> f64 {
    let n = bag.len() as f64;
    let s: f64 = bag
        .iter()
        .map(|p| dot(&p.positive_unit, &p.negative_unit))
        .sum();
    (2.0 * n - 2.0 * s).max(0.0).sqrt()
}

/// Running sums of the normalized centers selected so far.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub count: usize,
}

impl PartialSum {
    pub fn zeros(dim: usize) -> Self {
        PartialSum {
            positive: vec![0.0; dim],
            negative: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn add(&mut self, pair: &CenterPair) {
        for (s, z) in self.positive.iter_mut().zip(&pair.positive_unit) {
            *s += z;
        }
        for (s, z) in self.negative.iter_mut().zip(&pair.negative_unit) {
            *s += z;
        }
        self.count += 1;
    }

    /// `<S+ + z+, S- + z->` expanded so no temporary vectors are needed.
    fn cross_with(&self, pos: &[f64], neg: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.positive.len() {
            acc += (self.positive[i] + pos[i]) * (self.negative[i] + neg[i]);
        }
        acc
    }
}

/// Greedy score of adding `candidate`: `-(S+ + z+)^T (S- + z-)`.
pub fn lower_bound_j(partial: &PartialSum, candidate: &CenterPair) -> f64 {
    -partial.cross_with(&candidate.positive_unit, &candidate.negative_unit)
}

/// The lower bound itself, `sqrt(max(0, 2n - 2 (S+ + z+)^T (S- + z-)))`, with `n` the
/// bag size.
pub fn lower_bound_value(partial: &PartialSum, candidate: &CenterPair, n: usize) -> f64 {
    (2.0 * n as f64 + 2.0 * lower_bound_j(partial, candidate))
        .max(0.0)
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Selected template indices (0-based) in greedy order.
    pub indices: Vec<usize>,
    /// Lower bound reached by the full selection, `sqrt(max(0, 2n - 2 S+^T S-))`.
    pub objective: f64,
}

/// Picks `k` distinct templates, each step taking the candidate with the highest
/// score. Ties go to the lowest index.
pub fn select_templates(bag: &[CenterPair], k: usize) -> Result<SelectionResult> {
    let n = bag.len();
    if k == 0 || k > n {
        return Err(Error::SelectionSize { k, n });
    }
    let dim = bag[0].positive_unit.len();
    if bag
        .iter()
        .any(|p| p.positive_unit.len() != dim || p.negative_unit.len() != dim)
    {
        return Err(Error::GeometryMismatch(
            "center vectors within a bag differ in length".into(),
        ));
    }
    let mut partial = PartialSum::zeros(dim);
    let mut taken = vec![false; n];
    let mut indices = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (m, pair) in bag.iter().enumerate() {
            if taken[m] {
                continue;
            }
            let score = lower_bound_j(&partial, pair);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((m, score));
            }
        }
        let (m, _) = best.expect("k <= n leaves a candidate");
        taken[m] = true;
        partial.add(&bag[m]);
        indices.push(m);
    }
    let objective = (2.0 * n as f64 - 2.0 * dot(&partial.positive, &partial.negative))
        .max(0.0)
        .sqrt();
    Ok(SelectionResult { indices, objective })
}
