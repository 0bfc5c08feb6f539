//! Exponential-time optimum providers over a discrete candidate set.
//!
//! These are the ground truth for approximation-ratio checks. Since the
//! candidate optimum is never below the true optimum, `alg ≤ bound · opt_cand`
//! is implied by `alg ≤ bound · opt`. In finite spaces the default candidates
//! are the whole space, so there the optimum is exact.

use itertools::Itertools;
use rayon::prelude::*;

use crate::cost::{
    distance_distribution_unchecked, expected_distance_unchecked, expected_max_of, Assignment,
    DiscreteDist,
};
use crate::deterministic::{binomial, CenterSet};
use crate::error::{Error, Result};
use crate::metric::{Point, Space};
use crate::model::Instance;
use crate::solver::{surrogates, Solution, Strategy, Version};

/// Enumeration limits for the oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_center_subsets: u64,
    pub max_assignments: u64,
    pub max_realizations: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_center_subsets: 1_000_000,
            max_assignments: 1_000_000,
            max_realizations: 1_000_000,
        }
    }
}

/// Default grid resolution (points per axis) for the continuous 1-center check.
pub const DEFAULT_GRID_RESOLUTION: usize = 201;

/// Candidate centers: every location and surrogate (Euclidean), or the whole space (finite).
pub fn default_candidates(instance: &Instance) -> Result<Vec<Point>> {
    Ok(default_candidates_with(instance, &surrogates(instance)?))
}

pub(crate) fn default_candidates_with(instance: &Instance, surr: &[Point]) -> Vec<Point> {
    if let Some(all) = instance.space().all_points() {
        return all;
    }
    let mut out = instance.distinct_locations();
    for s in surr {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

/// Uniform grid over the bounding box of all locations, `resolution` points per
/// axis (one on degenerate axes). Returns the grid and its cell diagonal.
///
/// The unassigned objective is convex and clamping a center into the box moves
/// it closer to every location, so the continuous 1-center optimum lies in the box.
pub fn grid_candidates(instance: &Instance, resolution: usize, budget: &OracleBudget) -> Result<(Vec<Point>, f64)> {
    let dim = match instance.space() {
        Space::Euclidean { dim } => *dim,
        Space::Finite { .. } => {
            return Err(Error::Unsupported("grid candidates require Euclidean space".into()))
        }
    };
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in instance.points() {
        for loc in p.locations() {
            for (a, &x) in loc.coords().expect("euclidean").iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }
    }
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            if hi[a] == lo[a] {
                vec![lo[a]]
            } else {
                let step = (hi[a] - lo[a]) / (resolution - 1) as f64;
                (0..resolution)
                    .map(|t| if t == resolution - 1 { hi[a] } else { lo[a] + step * t as f64 })
                    .collect()
            }
        })
        .collect();
    let count = axes
        .iter()
        .try_fold(1u64, |acc, ax| acc.checked_mul(ax.len() as u64));
    if count.is_none_or(|c| c > budget.max_center_subsets) {
        return Err(Error::too_large("grid points", count, budget.max_center_subsets));
    }
    let diagonal = (0..dim)
        .map(|a| {
            let cell = if axes[a].len() > 1 { (hi[a] - lo[a]) / (resolution - 1) as f64 } else { 0.0 };
            cell * cell
        })
        .sum::<f64>()
        .sqrt();
    let grid = axes
        .iter()
        .multi_cartesian_product()
        .map(|c| Point::Coords(c.into_iter().copied().collect()))
        .collect();
    Ok((grid, diagonal))
}

/// Per-(point, candidate) tables shared by the oracles.
struct Tables {
    /// dist[i][j]: distribution of d(P̂_i, candidate_j)
    dist: Vec<Vec<DiscreteDist>>,
    /// ed[i][j]: Ed(P_i, candidate_j), a lower bound on any assigned cost using that pair
    ed: Vec<Vec<f64>>,
}

impl Tables {
    fn build(instance: &Instance, candidates: &[Point]) -> Self {
        let space = instance.space();
        let dist = instance
            .points()
            .iter()
            .map(|p| {
                candidates
                    .iter()
                    .map(|c| distance_distribution_unchecked(space, p, c))
                    .collect()
            })
            .collect();
        let ed = instance
            .points()
            .iter()
            .map(|p| {
                candidates
                    .iter()
                    .map(|c| expected_distance_unchecked(space, p, c))
                    .collect()
            })
            .collect();
        Tables { dist, ed }
    }

    /// Assigned cost with point i served by candidate `cand[i]`.
    fn ecost(&self, cand: impl Iterator<Item = usize>) -> f64 {
        let refs: Vec<&DiscreteDist> = cand.enumerate().map(|(i, j)| &self.dist[i][j]).collect();
        expected_max_of(&refs)
    }
}

// Pruning margin so rounding differences between the mean and the expected
// maximum never discard a genuine tie.
const PRUNE_SLACK: f64 = 1e-12;

fn prunes(lower: f64, best: f64) -> bool {
    lower > best * (1.0 + PRUNE_SLACK)
}

fn prepare(instance: &Instance, k: usize, candidates: &[Point], budget: &OracleBudget) -> Result<(usize, Vec<Vec<usize>>)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate centers".into()));
    }
    instance.space().check_points(candidates)?;
    let k = k.min(candidates.len());
    let count = binomial(candidates.len(), k);
    if count.is_none_or(|c| c > budget.max_center_subsets) {
        return Err(Error::too_large("center subsets", count, budget.max_center_subsets));
    }
    Ok((k, (0..candidates.len()).combinations(k).collect()))
}

/// Lowest cost, earliest index on ties.
fn pick_best<T>(results: Vec<Option<(f64, T)>>) -> (usize, f64, T) {
    let mut best: Option<(usize, f64, T)> = None;
    for (idx, r) in results.into_iter().enumerate() {
        if let Some((cost, payload)) = r {
            if best.as_ref().is_none_or(|b| cost < b.1) {
                best = Some((idx, cost, payload));
            }
        }
    }
    best.expect("at least one subset")
}

fn solution(
    candidates: &[Point],
    subset: &[usize],
    targets: Vec<usize>,
    strategy: Option<Strategy>,
    version: Version,
    ecost: f64,
) -> Result<Solution> {
    Ok(Solution {
        centers: CenterSet::new(subset.iter().map(|&j| candidates[j].clone()).collect())?,
        assignment: Assignment(targets),
        strategy,
        det_solver: None,
        version,
        ecost,
        bound: 1.0,
    })
}

/// Minimum `Ecost` over k-subsets of `candidates` with the assignment forced by `strategy`.
pub fn opt_restricted(
    instance: &Instance,
    k: usize,
    strategy: Strategy,
    candidates: &[Point],
    budget: &OracleBudget,
) -> Result<Solution> {
    let space = instance.space();
    strategy.check_space(space.kind())?;
    let (_, subsets) = prepare(instance, k, candidates, budget)?;
    let tables = Tables::build(instance, candidates);
    // key[i][j]: what the strategy minimizes when choosing a center for point i
    let key: Vec<Vec<f64>> = match strategy {
        Strategy::ExpectedDistance => tables.ed.clone(),
        _ => surrogates(instance)?
            .iter()
            .map(|s| candidates.iter().map(|c| space.dist(s, c)).collect())
            .collect(),
    };

    let results: Vec<Option<(f64, Vec<usize>)>> = subsets
        .par_iter()
        .map(|subset| {
            let targets: Vec<usize> = key
                .iter()
                .map(|row| {
                    let mut t = 0;
                    for (pos, &j) in subset.iter().enumerate() {
                        if row[j] < row[subset[t]] {
                            t = pos;
                        }
                    }
                    t
                })
                .collect();
            let cost = tables.ecost(targets.iter().map(|&t| subset[t]));
            Some((cost, targets))
        })
        .collect();
    let (idx, ecost, targets) = pick_best(results);
    solution(candidates, &subsets[idx], targets, Some(strategy), Version::Restricted, ecost)
}

/// Minimum `Ecost_A` over k-subsets of `candidates` and all `k^n` assignments.
///
/// The expected maximum couples the points, so assignments cannot be chosen
/// point by point; every tuple is visited (odometer order, last point fastest),
/// skipping those whose per-point expected distance already exceeds the best.
pub fn opt_unrestricted(
    instance: &Instance,
    k: usize,
    candidates: &[Point],
    budget: &OracleBudget,
) -> Result<Solution> {
    let (k, subsets) = prepare(instance, k, candidates, budget)?;
    let n = instance.len();
    let per_subset = (k as u64).checked_pow(n as u32);
    if per_subset.is_none_or(|c| c > budget.max_assignments) {
        return Err(Error::too_large("assignments per center subset", per_subset, budget.max_assignments));
    }
    let tables = Tables::build(instance, candidates);

    let results: Vec<Option<(f64, Vec<usize>)>> = subsets
        .par_iter()
        .map(|subset| {
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut digits = vec![0usize; n];
            loop {
                let lower = digits
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| tables.ed[i][subset[t]])
                    .fold(0.0, f64::max);
                let incumbent = best.as_ref().map_or(f64::INFINITY, |b| b.0);
                if !prunes(lower, incumbent) {
                    let cost = tables.ecost(digits.iter().map(|&t| subset[t]));
                    if cost < incumbent {
                        best = Some((cost, digits.clone()));
                    }
                }
                // advance odometer
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return best;
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < k {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        })
        .collect();
    let (idx, ecost, targets) = pick_best(results);
    solution(candidates, &subsets[idx], targets, None, Version::Unrestricted, ecost)
}

/// Minimum unassigned `Ecost` over k-subsets of `candidates`.
pub fn opt_unassigned(
    instance: &Instance,
    k: usize,
    candidates: &[Point],
    budget: &OracleBudget,
) -> Result<Solution> {
    let (_, subsets) = prepare(instance, k, candidates, budget)?;
    let space = instance.space();
    // loc_dist[i][l][j]: location l of point i to candidate j
    let loc_dist: Vec<Vec<Vec<f64>>> = instance
        .points()
        .iter()
        .map(|p| {
            p.locations()
                .iter()
                .map(|loc| candidates.iter().map(|c| space.dist(loc, c)).collect())
                .collect()
        })
        .collect();

    let results: Vec<Option<(f64, ())>> = subsets
        .par_iter()
        .map(|subset| {
            let dists: Vec<DiscreteDist> = instance
                .points()
                .iter()
                .zip(&loc_dist)
                .map(|(p, rows)| {
                    DiscreteDist::from_pairs(rows.iter().zip(p.probs()).map(|(row, &w)| {
                        let d = subset.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min);
                        (d, w)
                    }))
                })
                .collect();
            let refs: Vec<&DiscreteDist> = dists.iter().collect();
            Some((expected_max_of(&refs), ()))
        })
        .collect();
    let (idx, ecost, ()) = pick_best(results);
    // served center depends on the realization; the recorded assignment is
    // the ED one and does not enter `ecost`
    let subset = &subsets[idx];
    let nearest_ed: Vec<usize> = instance
        .points()
        .iter()
        .map(|p| {
            crate::cost::argmin_first(
                subset
                    .iter()
                    .map(|&j| expected_distance_unchecked(space, p, &candidates[j])),
            )
            .expect("nonempty subset")
        })
        .collect();
    solution(candidates, subset, nearest_ed, None, Version::Unassigned, ecost)
}
