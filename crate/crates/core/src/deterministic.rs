//! Certain-point machinery: surrogate points for uncertain points and
//! deterministic k-center solvers.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::cost::{argmin_first, expected_distance_unchecked};
use crate::error::{Error, Result};
use crate::metric::{Point, Space};
use crate::model::UncertainPoint;

/// Default cap on the number of k-subsets [`exact_discrete_kcenter`] will try.
pub const DEFAULT_SUBSET_CAP: u64 = 1_000_000;

/// A nonempty list of centers. Duplicates are legal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CenterSet(Vec<Point>);

impl CenterSet {
    pub fn new(centers: Vec<Point>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidArgument("a center set needs at least one center".into()));
        }
        Ok(CenterSet(centers))
    }

    pub fn as_slice(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Point> {
        self.0
    }
}

impl std::ops::Deref for CenterSet {
    type Target = [Point];

    fn deref(&self) -> &[Point] {
        &self.0
    }
}

/// Probability-weighted coordinate average `P̄ = Σ_j p_j · P_j`.
pub fn expected_point(space: &Space, p: &UncertainPoint) -> Result<Point> {
    let dim = match space {
        Space::Euclidean { dim } => *dim,
        Space::Finite { .. } => {
            return Err(Error::Unsupported(
                "expected points require Euclidean space".into(),
            ))
        }
    };
    space.check_points(p.locations())?;
    let mut mean = vec![0.0; dim];
    for (loc, w) in p.outcomes() {
        for (m, x) in mean.iter_mut().zip(loc.coords().expect("checked above")) {
            *m += w * x;
        }
    }
    Ok(Point::Coords(mean))
}

/// The candidate minimizing the expected distance to `p`; lowest index wins ties.
///
/// With `candidates` covering the whole space this is the exact 1-center of the
/// single uncertain point.
pub fn weighted_one_median(space: &Space, p: &UncertainPoint, candidates: &[Point]) -> Result<Point> {
    space.check_points(p.locations())?;
    space.check_points(candidates)?;
    let best = argmin_first(
        candidates
            .iter()
            .map(|c| expected_distance_unchecked(space, p, c)),
    )
    .ok_or_else(|| Error::InvalidArgument("no candidates for the 1-median".into()))?;
    Ok(candidates[best].clone())
}

/// `max_i min_c d(P_i, c)`.
pub fn deterministic_cost(space: &Space, points: &[Point], centers: &[Point]) -> Result<f64> {
    if points.is_empty() || centers.is_empty() {
        return Err(Error::InvalidArgument("points and centers must be nonempty".into()));
    }
    space.check_points(points)?;
    space.check_points(centers)?;
    Ok(det_cost_unchecked(space, points, centers))
}

pub(crate) fn det_cost_unchecked(space: &Space, points: &[Point], centers: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| {
            centers
                .iter()
                .map(|c| space.dist(p, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Farthest-first traversal seeded with `points[0]`.
///
/// Stops early once every point sits on a center. The result is within a
/// factor 2 of the optimal k-center cost, even against centers placed
/// anywhere in the space.
pub fn gonzalez(space: &Space, points: &[Point], k: usize) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points to cover".into()));
    }
    space.check_points(points)?;

    let mut chosen = vec![points[0].clone()];
    let mut gap: Vec<f64> = points.iter().map(|p| space.dist(p, &points[0])).collect();
    while chosen.len() < k {
        let mut far = 0;
        for (i, &g) in gap.iter().enumerate() {
            if g > gap[far] {
                far = i;
            }
        }
        if gap[far] <= 0.0 {
            break;
        }
        let next = points[far].clone();
        for (g, p) in gap.iter_mut().zip(points) {
            *g = g.min(space.dist(p, &next));
        }
        chosen.push(next);
    }
    Ok(CenterSet(chosen))
}

/// `C(n, k)`, or `None` on overflow.
pub(crate) fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Optimal k-center over `candidates` by trying every k-subset.
///
/// Ties go to the lexicographically smallest index tuple. A `k` larger than the
/// candidate list is clamped to it.
pub fn exact_discrete_kcenter(
    space: &Space,
    points: &[Point],
    candidates: &[Point],
    k: usize,
    cap: u64,
) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if points.is_empty() || candidates.is_empty() {
        return Err(Error::InvalidArgument("points and candidates must be nonempty".into()));
    }
    space.check_points(points)?;
    space.check_points(candidates)?;
    let k = k.min(candidates.len());
    let count = binomial(candidates.len(), k);
    if count.is_none_or(|c| c > cap) {
        return Err(Error::too_large("center subsets", count, cap));
    }

    // d[i][j]: point i to candidate j
    let d: Vec<Vec<f64>> = points
        .iter()
        .map(|p| candidates.iter().map(|c| space.dist(p, c)).collect())
        .collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..candidates.len()).combinations(k) {
        let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        let mut cost = 0.0f64;
        for row in &d {
            let near = subset.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min);
            cost = cost.max(near);
            if cost >= bound {
                break;
            }
        }
        if cost < bound {
            best = Some((cost, subset));
        }
    }
    let (_, subset) = best.expect("at least one subset");
    Ok(CenterSet(subset.into_iter().map(|j| candidates[j].clone()).collect()))
}

/// Which deterministic k-center solver a pipeline plugs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetSolver {
    Gonzalez,
    ExactDiscrete,
}

impl DetSolver {
    /// The `ε` of the solver's `(1 + ε)` guarantee.
    ///
    /// `ExactDiscrete` is exact over its candidate list, which is why pipelines
    /// hand it the same candidates the verification oracles search.
    pub fn epsilon(self) -> f64 {
        match self {
            DetSolver::Gonzalez => 1.0,
            DetSolver::ExactDiscrete => 0.0,
        }
    }

    pub fn solve(self, space: &Space, points: &[Point], candidates: &[Point], k: usize) -> Result<CenterSet> {
        match self {
            DetSolver::Gonzalez => gonzalez(space, points, k),
            DetSolver::ExactDiscrete => {
                exact_discrete_kcenter(space, points, candidates, k, DEFAULT_SUBSET_CAP)
            }
        }
    }
}
