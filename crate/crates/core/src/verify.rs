//! Seeded property suites: evaluator cross-checks, the proof lemmas, and the
//! approximation bounds against the brute-force oracles.
//!
//! Every trial is a pure function of its instance seed, so a failing row can be
//! replayed with `--seed <instance_seed> --trials 1`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{
    distance_distribution_unchecked, ecost_assigned, ecost_enumerated, ecost_unassigned,
    expected_distance_unchecked, expected_max, Assignment,
};
use crate::deterministic::{det_cost_unchecked, exact_discrete_kcenter, gonzalez, DEFAULT_SUBSET_CAP};
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::model::{generate_instance, GenSpace, Instance};
use crate::oracle::{
    default_candidates, grid_candidates, opt_restricted, opt_unassigned, opt_unrestricted,
    OracleBudget,
};
use crate::solver::{solve_kcenter, solve_one_center, surrogates, Solution, Strategy, Version};
use crate::deterministic::DetSolver;

/// Absolute slack on every checked inequality.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Evaluators,
    Lemmas,
    Bounds,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evaluators" => Ok(Suite::Evaluators),
            "lemmas" => Ok(Suite::Lemmas),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Evaluators => "evaluators",
            Suite::Lemmas => "lemmas",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_z: usize,
    pub max_k: usize,
    /// Largest finite space drawn.
    pub max_m: usize,
    /// Points per axis of the grid oracle for the Euclidean 1-center rows.
    pub grid_resolution: usize,
    pub budget: OracleBudget,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suite: Suite::All,
            trials: 200,
            seed: 0,
            max_n: 5,
            max_z: 3,
            max_k: 3,
            max_m: 8,
            grid_resolution: crate::oracle::DEFAULT_GRID_RESOLUTION,
            budget: OracleBudget::default(),
        }
    }
}

/// One checked inequality `alg ≤ bound · oracle`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub instance_seed: u64,
    pub label: String,
    pub alg_ecost: f64,
    pub oracle_ecost: f64,
    /// `alg / oracle`; 1 when both vanish, unbounded (JSON `null`) when only the oracle does.
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

impl RatioRow {
    pub fn new(instance_seed: u64, label: impl Into<String>, alg: f64, oracle: f64, bound: f64) -> Self {
        let ratio = if oracle > 0.0 {
            alg / oracle
        } else if alg <= CHECK_SLACK {
            1.0
        } else {
            f64::INFINITY
        };
        Self::with_ratio(instance_seed, label, alg, oracle, ratio, bound)
    }

    /// Row for two evaluators that must agree: ratio is `1 + |a − b| / (1 + max(a, b))`.
    pub fn agreement(instance_seed: u64, label: impl Into<String>, exact: f64, oracle: f64) -> Self {
        let ratio = 1.0 + (exact - oracle).abs() / (1.0 + exact.abs().max(oracle.abs()));
        Self::with_ratio(instance_seed, label, exact, oracle, ratio, 1.0)
    }

    fn with_ratio(instance_seed: u64, label: impl Into<String>, alg: f64, oracle: f64, ratio: f64, bound: f64) -> Self {
        RatioRow {
            instance_seed,
            label: label.into(),
            alg_ecost: alg,
            oracle_ecost: oracle,
            ratio,
            bound,
            pass: ratio <= bound + CHECK_SLACK,
        }
    }
}

/// Machine-readable output of a CLI run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub instance_digest: String,
    pub solution: Option<Solution>,
    pub ratios: Vec<RatioRow>,
    pub wall_time_ms: u64,
}

/// Hex SHA-256 over the given instances' JSON, in order.
pub fn instance_digest<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> String {
    let mut h = Sha256::new();
    for inst in instances {
        h.update(inst.to_json().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

/// A random instance plus the `k` to solve it with.
///
/// Even seeds give Euclidean instances (dimension `1..=max_dim`), odd seeds
/// finite metrics (`2..=max_m` points).
pub fn trial_instance(seed: u64, cfg: &VerifyConfig, max_dim: usize) -> Result<(Instance, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.random_range(1..=cfg.max_n.max(1));
    let z = rng.random_range(1..=cfg.max_z.max(1));
    let k = rng.random_range(1..=cfg.max_k.max(1));
    let space = if seed.is_multiple_of(2) {
        GenSpace::Euclidean { dim: rng.random_range(1..=max_dim) }
    } else {
        GenSpace::Finite { m: rng.random_range(2..=cfg.max_m.max(2)) }
    };
    Ok((generate_instance(n, z, space, seed)?, k))
}

/// Arbitrary centers and assignment for the evaluator and lemma checks.
pub fn random_centers(instance: &Instance, k: usize, rng: &mut impl Rng) -> (Vec<Point>, Assignment) {
    let centers = match instance.space() {
        crate::metric::Space::Euclidean { dim } => (0..k)
            .map(|_| Point::Coords((0..*dim).map(|_| rng.random::<f64>()).collect()))
            .collect(),
        crate::metric::Space::Finite { matrix } => {
            (0..k).map(|_| Point::Index(rng.random_range(0..matrix.size()))).collect()
        }
    };
    let assignment = Assignment((0..instance.len()).map(|_| rng.random_range(0..k)).collect());
    (centers, assignment)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact evaluators against literal enumeration of Ω.
pub fn evaluator_rows(seed: u64, cfg: &VerifyConfig) -> Result<(Instance, Vec<RatioRow>)> {
    let (inst, k) = trial_instance(seed, cfg, 3)?;
    let (centers, assignment) = random_centers(&inst, k, &mut rng_for(seed, 1));
    let cap = cfg.budget.max_realizations;
    let exact_a = ecost_assigned(&inst, &centers, &assignment)?;
    let enum_a = ecost_enumerated(&inst, &centers, Some(&assignment), cap)?;
    let exact_u = ecost_unassigned(&inst, &centers)?;
    let enum_u = ecost_enumerated(&inst, &centers, None, cap)?;
    let rows = vec![
        RatioRow::agreement(seed, "evaluators/assigned", exact_a, enum_a),
        RatioRow::agreement(seed, "evaluators/unassigned", exact_u, enum_u),
    ];
    Ok((inst, rows))
}

fn worst(rows: impl IntoIterator<Item = RatioRow>) -> RatioRow {
    rows.into_iter()
        .reduce(|a, b| if b.ratio > a.ratio || b.ratio.is_nan() { b } else { a })
        .expect("at least one row")
}

/// The proof lemmas on random centers and assignments.
///
/// Euclidean trials check the expected-point lemmas, finite trials the
/// 1-center ones; both check the per-point lower bound on `Ecost_A`.
pub fn lemma_rows(seed: u64, cfg: &VerifyConfig) -> Result<(Instance, Vec<RatioRow>)> {
    let (inst, k) = trial_instance(seed, cfg, 3)?;
    let mut rng = rng_for(seed, 2);
    let (centers, assignment) = random_centers(&inst, k, &mut rng);
    let space = inst.space();
    let points = inst.points();
    let ecost_a = ecost_assigned(&inst, &centers, &assignment)?;
    let served = |i: usize| &centers[assignment.targets()[i]];
    let mut rows = Vec::new();

    rows.push(worst(points.iter().enumerate().map(|(i, p)| {
        RatioRow::new(seed, "lemma/per-point-expected-distance", expected_distance_unchecked(space, p, served(i)), ecost_a, 1.0)
    })));

    let surr = surrogates(&inst)?;
    let to_surrogate: Vec<_> = points
        .iter()
        .zip(&surr)
        .map(|(p, s)| distance_distribution_unchecked(space, p, s))
        .collect();
    let spread = expected_max(&to_surrogate)?;
    let surrogate_cost = det_cost_unchecked(space, &surr, &centers);

    match space.kind() {
        SpaceKind::Euclidean => {
            let dim = match space {
                crate::metric::Space::Euclidean { dim } => *dim,
                _ => unreachable!(),
            };
            rows.push(worst(points.iter().zip(&surr).flat_map(|(p, mean)| {
                (0..4)
                    .map(|_| Point::Coords((0..dim).map(|_| rng.random::<f64>() * 2.0 - 0.5).collect()))
                    .map(|q| RatioRow::new(seed, "lemma/expected-point", space.dist(mean, &q), expected_distance_unchecked(space, p, &q), 1.0))
                    .collect::<Vec<_>>()
            })));
            rows.push(RatioRow::new(seed, "lemma/spread-around-expected-points", spread, ecost_a, 2.0));
            rows.push(worst(points.iter().zip(&surr).map(|(p, s)| {
                RatioRow::new(seed, "lemma/pointwise-spread-around-expected-points", expected_distance_unchecked(space, p, s), ecost_a, 2.0)
            })));
            rows.push(RatioRow::new(seed, "lemma/expected-point-cost", surrogate_cost, ecost_a, 1.0));
        }
        SpaceKind::Finite => {
            rows.push(RatioRow::new(seed, "lemma/spread-around-one-centers", spread, ecost_a, 3.0));
            rows.push(RatioRow::new(seed, "lemma/one-center-cost", surrogate_cost, ecost_a, 2.0));
        }
    }
    Ok((inst, rows))
}

/// Pipeline results against the matching candidate-restricted oracle, plus the
/// restricted-vs-unrestricted gap, the Gonzalez guarantee and (Euclidean,
/// dimension ≤ 2) the 1-center rule against a grid.
pub fn bound_rows(seed: u64, cfg: &VerifyConfig) -> Result<(Instance, Vec<RatioRow>)> {
    let (inst, k) = trial_instance(seed, cfg, 2)?;
    let kind = inst.space().kind();
    let candidates = default_candidates(&inst)?;
    let strategies: &[Strategy] = match kind {
        SpaceKind::Euclidean => &[Strategy::ExpectedDistance, Strategy::ExpectedPoint],
        SpaceKind::Finite => &[Strategy::ExpectedDistance, Strategy::OneCenter],
    };
    let unrestricted = opt_unrestricted(&inst, k, &candidates, &cfg.budget)?;
    let mut rows = Vec::new();
    for &strategy in strategies {
        let restricted = opt_restricted(&inst, k, strategy, &candidates, &cfg.budget)?;
        for det in [DetSolver::Gonzalez, DetSolver::ExactDiscrete] {
            for version in [Version::Restricted, Version::Unrestricted] {
                let sol = solve_kcenter(&inst, k, strategy, det, version)?;
                let oracle = match version {
                    Version::Restricted => restricted.ecost,
                    _ => unrestricted.ecost,
                };
                let label = format!("bound/{kind}/{strategy}/{}/{version}", det_label(det));
                rows.push(RatioRow::new(seed, label, sol.ecost, oracle, sol.bound));
            }
        }
        if strategy == Strategy::ExpectedDistance {
            rows.push(RatioRow::new(seed, "restricted-ed-vs-unrestricted", restricted.ecost, unrestricted.ecost, 3.0));
        }
    }

    let surr = surrogates(&inst)?;
    let greedy = gonzalez(inst.space(), &surr, k)?;
    let exact = exact_discrete_kcenter(inst.space(), &surr, &surr, k, DEFAULT_SUBSET_CAP)?;
    rows.push(RatioRow::new(
        seed,
        "gonzalez/surrogates",
        det_cost_unchecked(inst.space(), &surr, &greedy),
        det_cost_unchecked(inst.space(), &surr, &exact),
        2.0,
    ));

    if kind == SpaceKind::Euclidean {
        let sol = solve_one_center(&inst)?;
        let (grid, _) = grid_candidates(&inst, cfg.grid_resolution, &cfg.budget)?;
        let opt = opt_unassigned(&inst, 1, &grid, &cfg.budget)?;
        let label = format!("bound/euclidean/one-center/grid{}", cfg.grid_resolution);
        rows.push(RatioRow::new(seed, label, sol.ecost, opt.ecost, sol.bound));
    }
    Ok((inst, rows))
}

pub fn det_label(det: DetSolver) -> &'static str {
    match det {
        DetSolver::Gonzalez => "gonzalez",
        DetSolver::ExactDiscrete => "exact",
    }
}

type TrialFn = fn(u64, &VerifyConfig) -> Result<(Instance, Vec<RatioRow>)>;

/// Runs the configured suite. Rows come back in trial order (suite by suite for
/// [`Suite::All`]) along with the digest of every instance used.
pub fn run_suite(cfg: &VerifyConfig) -> Result<(Vec<RatioRow>, String)> {
    if cfg.max_n == 0 || cfg.max_z == 0 || cfg.max_k == 0 || cfg.max_m < 2 {
        return Err(Error::InvalidArgument(
            "max-n, max-z and max-k must be at least 1 and max-m at least 2".into(),
        ));
    }
    let suites: Vec<TrialFn> = match cfg.suite {
        Suite::Evaluators => vec![evaluator_rows],
        Suite::Lemmas => vec![lemma_rows],
        Suite::Bounds => vec![bound_rows],
        Suite::All => vec![evaluator_rows, lemma_rows, bound_rows],
    };
    let mut rows = Vec::new();
    let mut instances = Vec::new();
    for f in suites {
        let results: Vec<(Instance, Vec<RatioRow>)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| f(trial_seed(cfg.seed, t), cfg))
            .collect::<Result<_>>()?;
        for (inst, r) in results {
            instances.push(inst);
            rows.extend(r);
        }
    }
    Ok((rows, instance_digest(&instances)))
}
