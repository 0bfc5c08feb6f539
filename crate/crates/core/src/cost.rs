//! Expected-cost evaluation.
//!
//! Points are independent, so `E[max_i X_i]` over the per-point distance
//! variables follows from the product of their CDFs on the sorted union of
//! support values. That gives the exact assigned and unassigned costs in
//! polynomial time. [`ecost_enumerated`] walks Ω literally and is kept as the
//! cross-check oracle for both.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, Space};
use crate::model::{enumerate_realizations, Instance, UncertainPoint};

/// Relative tolerance for comparing evaluators against each other.
pub const EVALUATOR_TOLERANCE: f64 = 1e-9;

/// A finite distribution on the nonnegative reals: sorted support with
/// exactly-equal values merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDist {
    /// Builds a distribution from unsorted `(value, probability)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            if values.last() == Some(&v) {
                *probs.last_mut().unwrap() += p;
            } else {
                values.push(v);
                probs.push(p);
            }
        }
        DiscreteDist { values, probs }
    }

    /// Validating constructor.
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "distribution needs matching, nonempty value and probability lists".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "distribution values must be finite and nonnegative".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(
                "distribution probabilities must be nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > crate::model::PROB_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "distribution probabilities sum to {sum}"
            )));
        }
        Ok(Self::from_pairs(values.into_iter().zip(probs)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("distribution is nonempty")
    }
}

/// Which center each uncertain point is served by: `target[i]` indexes the center list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn uniform(n: usize, center: usize) -> Self {
        Assignment(vec![center; n])
    }

    pub fn targets(&self) -> &[usize] {
        &self.0
    }

    pub fn check(&self, n: usize, k: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::InvalidArgument(format!(
                "assignment covers {} points, instance has {n}",
                self.0.len()
            )));
        }
        if let Some((i, t)) = self.0.iter().enumerate().find(|(_, &t)| t >= k) {
            return Err(Error::InvalidArgument(format!(
                "assignment of point {i} to center {t}, but only {k} centers"
            )));
        }
        Ok(())
    }
}

/// `Ed(P, q) = Σ_j p_j · d(P_j, q)`.
pub fn expected_distance(space: &Space, p: &UncertainPoint, q: &Point) -> Result<f64> {
    space.check_point(q)?;
    space.check_points(p.locations())?;
    Ok(expected_distance_unchecked(space, p, q))
}

pub(crate) fn expected_distance_unchecked(space: &Space, p: &UncertainPoint, q: &Point) -> f64 {
    p.outcomes().map(|(loc, w)| w * space.dist(loc, q)).sum()
}

/// Distribution of the random distance `d(P̂, q)`.
pub fn distance_distribution(space: &Space, p: &UncertainPoint, q: &Point) -> Result<DiscreteDist> {
    space.check_point(q)?;
    space.check_points(p.locations())?;
    Ok(distance_distribution_unchecked(space, p, q))
}

pub(crate) fn distance_distribution_unchecked(
    space: &Space,
    p: &UncertainPoint,
    q: &Point,
) -> DiscreteDist {
    DiscreteDist::from_pairs(p.outcomes().map(|(loc, w)| (space.dist(loc, q), w)))
}

/// Distribution of `d(P̂, C) = min_c d(P̂, c)`.
pub(crate) fn nearest_distance_distribution(
    space: &Space,
    p: &UncertainPoint,
    centers: &[Point],
) -> DiscreteDist {
    DiscreteDist::from_pairs(p.outcomes().map(|(loc, w)| {
        let d = centers
            .iter()
            .map(|c| space.dist(loc, c))
            .fold(f64::INFINITY, f64::min);
        (d, w)
    }))
}

/// Exact `E[max_i X_i]` for independent `X_i`.
///
/// Sums `v_t · (F(v_t) − F(v_{t−1}))` over the sorted union of support values,
/// with `F(v) = ∏_i P(X_i ≤ v)`.
pub fn expected_max(dists: &[DiscreteDist]) -> Result<f64> {
    if dists.is_empty() {
        return Err(Error::InvalidArgument(
            "expected maximum of an empty family".into(),
        ));
    }
    let refs: Vec<&DiscreteDist> = dists.iter().collect();
    Ok(expected_max_of(&refs))
}

pub(crate) fn expected_max_of(dists: &[&DiscreteDist]) -> f64 {
    let mut support: Vec<f64> = dists.iter().flat_map(|d| d.values.iter().copied()).collect();
    support.sort_unstable_by(f64::total_cmp);
    support.dedup();

    let mut cursor = vec![0usize; dists.len()];
    let mut cdf = vec![0.0f64; dists.len()];
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &v in &support {
        let mut joint = 1.0;
        for (i, d) in dists.iter().enumerate() {
            while cursor[i] < d.values.len() && d.values[cursor[i]] <= v {
                cdf[i] += d.probs[cursor[i]];
                cursor[i] += 1;
            }
            joint *= cdf[i];
        }
        acc += v * (joint - prev);
        prev = joint;
    }
    acc
}

fn check_centers(instance: &Instance, centers: &[Point]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no centers given".into()));
    }
    for (j, c) in centers.iter().enumerate() {
        instance
            .space()
            .check_point(c)
            .map_err(|e| Error::InvalidArgument(format!("center {j}: {e}")))?;
    }
    Ok(())
}

/// `Ecost_A(C) = E[max_i d(P̂_i, A(P_i))]`.
pub fn ecost_assigned(instance: &Instance, centers: &[Point], assignment: &Assignment) -> Result<f64> {
    check_centers(instance, centers)?;
    assignment.check(instance.len(), centers.len())?;
    let space = instance.space();
    let dists: Vec<DiscreteDist> = instance
        .points()
        .iter()
        .zip(assignment.targets())
        .map(|(p, &t)| distance_distribution_unchecked(space, p, &centers[t]))
        .collect();
    expected_max(&dists)
}

/// `Ecost(C) = E[max_i min_c d(P̂_i, c)]`.
///
/// The inner minimum depends on `P̂_i` alone, so it is folded into each point's
/// distribution before taking the expected maximum.
pub fn ecost_unassigned(instance: &Instance, centers: &[Point]) -> Result<f64> {
    check_centers(instance, centers)?;
    let space = instance.space();
    let dists: Vec<DiscreteDist> = instance
        .points()
        .iter()
        .map(|p| nearest_distance_distribution(space, p, centers))
        .collect();
    expected_max(&dists)
}

/// Literal sum over Ω. Computes `Ecost_A` when `assignment` is given, `Ecost` otherwise.
pub fn ecost_enumerated(
    instance: &Instance,
    centers: &[Point],
    assignment: Option<&Assignment>,
    cap: u64,
) -> Result<f64> {
    check_centers(instance, centers)?;
    if let Some(a) = assignment {
        a.check(instance.len(), centers.len())?;
    }
    let space = instance.space();
    let points = instance.points();
    let mut total = 0.0;
    for r in enumerate_realizations(instance, cap)? {
        let worst = points
            .iter()
            .zip(&r.choice)
            .enumerate()
            .map(|(i, (p, &j))| {
                let loc = &p.locations()[j];
                match assignment {
                    Some(a) => space.dist(loc, &centers[a.targets()[i]]),
                    None => centers
                        .iter()
                        .map(|c| space.dist(loc, c))
                        .fold(f64::INFINITY, f64::min),
                }
            })
            .fold(0.0, f64::max);
        total += r.prob * worst;
    }
    Ok(total)
}

/// `|a − b| ≤ tol · (1 + max(|a|, |b|))`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Index of the smallest key, first one winning ties.
pub(crate) fn argmin_first(keys: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, k) in keys.into_iter().enumerate() {
        match best {
            Some((_, b)) if k.partial_cmp(&b) != Some(Ordering::Less) => {}
            _ => best = Some((i, k)),
        }
    }
    best.map(|(i, _)| i)
}
