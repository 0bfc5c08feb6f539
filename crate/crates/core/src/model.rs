//! Uncertain points and instances: validation, JSON I/O, seeded generation and
//! realization enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_space, DistanceMatrix, Point, Space};

/// Allowed deviation of a point's probability sum from 1.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of realizations [`enumerate_realizations`] will walk.
pub const DEFAULT_REALIZATION_CAP: u64 = 1_000_000;

/// An independent discrete distribution over a finite set of locations.
///
/// Probabilities are kept exactly as given; they are only checked to sum to one
/// within [`PROB_SUM_TOLERANCE`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertainPoint {
    locations: Vec<Point>,
    probs: Vec<f64>,
}

impl UncertainPoint {
    /// Checks the probability vector only; locations are checked against a space
    /// when the point joins an [`Instance`].
    pub fn new(locations: Vec<Point>, probs: Vec<f64>) -> Result<Self> {
        let p = UncertainPoint { locations, probs };
        p.check_probs("point")?;
        Ok(p)
    }

    pub fn certain(location: Point) -> Self {
        UncertainPoint {
            locations: vec![location],
            probs: vec![1.0],
        }
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of possible locations.
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn is_certain(&self) -> bool {
        self.locations.len() == 1
    }

    /// `(location, probability)` pairs.
    pub fn outcomes(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.locations.iter().zip(self.probs.iter().copied())
    }

    fn check_probs(&self, path: &str) -> Result<()> {
        if self.locations.is_empty() {
            return Err(Error::invalid(path, "point has no locations"));
        }
        if self.locations.len() != self.probs.len() {
            return Err(Error::invalid(
                path,
                format!(
                    "{} locations but {} probabilities",
                    self.locations.len(),
                    self.probs.len()
                ),
            ));
        }
        for (j, &p) in self.probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(
                    format!("{path}.probs[{j}]"),
                    format!("probability {p} is not a nonnegative real"),
                ));
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::invalid(
                path,
                format!("probability sum {sum} out of tolerance"),
            ));
        }
        Ok(())
    }
}

/// A set of uncertain points in a shared, validated space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    space: Space,
    points: Vec<UncertainPoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    space: Space,
    points: Vec<UncertainPoint>,
}

impl Instance {
    pub fn new(space: Space, points: Vec<UncertainPoint>) -> Result<Self> {
        if let Some(v) = validate_space(&space).into_iter().next() {
            return Err(Error::MetricViolation(v));
        }
        if points.is_empty() {
            return Err(Error::invalid("points", "instance has no points"));
        }
        for (i, p) in points.iter().enumerate() {
            let path = format!("points[{i}]");
            p.check_probs(&path)?;
            for (j, loc) in p.locations.iter().enumerate() {
                space.check_point(loc).map_err(|e| {
                    Error::invalid(format!("{path}.locations[{j}]"), e.to_string())
                })?;
            }
        }
        Ok(Instance { space, points })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn points(&self) -> &[UncertainPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The largest number of locations of any point.
    pub fn max_locations(&self) -> usize {
        self.points.iter().map(UncertainPoint::len).max().unwrap_or(0)
    }

    pub fn is_certain(&self) -> bool {
        self.points.iter().all(UncertainPoint::is_certain)
    }

    /// `|Ω| = ∏ z_i`, or `None` on overflow.
    pub fn realization_count(&self) -> Option<u64> {
        self.points
            .iter()
            .try_fold(1u64, |acc, p| acc.checked_mul(p.len() as u64))
    }

    /// Every location of every point in input order, with exact duplicates removed.
    pub fn distinct_locations(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for p in &self.points {
            for loc in &p.locations {
                if !out.contains(loc) {
                    out.push(loc.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::new(doc.space, doc.points)
}

/// Which kind of space [`generate_instance`] draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenSpace {
    /// Locations uniform in `[0, 1]^dim`.
    Euclidean { dim: usize },
    /// `m` points uniform in the unit square, observed only through their distance matrix.
    Finite { m: usize },
}

type LocationSampler = Box<dyn FnMut(&mut ChaCha8Rng) -> Point>;

/// Draws a random instance in which every point has exactly `z` locations.
///
/// Output is a pure function of the arguments.
pub fn generate_instance(n: usize, z: usize, space: GenSpace, seed: u64) -> Result<Instance> {
    if n == 0 || z == 0 {
        return Err(Error::InvalidArgument(format!(
            "n and z must be at least 1 (got n={n}, z={z})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (space, mut draw): (Space, LocationSampler) = match space {
        GenSpace::Euclidean { dim } => {
            if dim == 0 {
                return Err(Error::InvalidArgument("dim must be at least 1".into()));
            }
            (
                Space::euclidean(dim),
                Box::new(move |rng: &mut ChaCha8Rng| {
                    Point::Coords((0..dim).map(|_| rng.random::<f64>()).collect())
                }),
            )
        }
        GenSpace::Finite { m } => {
            if m == 0 {
                return Err(Error::InvalidArgument("m must be at least 1".into()));
            }
            let embedded: Vec<Vec<f64>> = (0..m)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            (
                Space::Finite {
                    matrix: DistanceMatrix::from_embedding(&embedded),
                },
                Box::new(move |rng: &mut ChaCha8Rng| Point::Index(rng.random_range(0..m))),
            )
        }
    };
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let locations: Vec<Point> = (0..z).map(|_| draw(&mut rng)).collect();
        // weights in (0, 1] so the normalizer is never zero
        let weights: Vec<f64> = (0..z).map(|_| 1.0 - rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        let probs = weights.iter().map(|w| w / total).collect();
        points.push(UncertainPoint { locations, probs });
    }
    Instance::new(space, points)
}

/// One joint outcome: `choice[i]` is the location index taken by point `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub choice: Vec<usize>,
    pub prob: f64,
}

/// Lexicographic walk over all realizations (last point varies fastest).
pub struct Realizations<'a> {
    instance: &'a Instance,
    next: Option<Vec<usize>>,
}

impl Iterator for Realizations<'_> {
    type Item = Realization;

    fn next(&mut self) -> Option<Realization> {
        let choice = self.next.take()?;
        let prob = choice
            .iter()
            .zip(&self.instance.points)
            .map(|(&j, p)| p.probs[j])
            .product();

        let mut succ = choice.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.instance.points[pos].len() {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Realization { choice, prob })
    }
}

/// Enumerates Ω, refusing when `|Ω|` exceeds `cap`.
pub fn enumerate_realizations(instance: &Instance, cap: u64) -> Result<Realizations<'_>> {
    let count = instance.realization_count();
    match count {
        Some(c) if c <= cap => Ok(Realizations {
            instance,
            next: Some(vec![0; instance.len()]),
        }),
        _ => Err(Error::TooLarge {
            what: "realizations",
            count: count.map_or_else(|| "more than 2^64".to_string(), |c| c.to_string()),
            cap,
            hint: "; use the exact evaluator instead of enumeration",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"space":{"kind":"euclidean","dim":1},"points":[{"locations":[[0.0],[2.0]],"probs":[0.5,0.5]}]}"#;

    #[test]
    fn parses_minimal_instance() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst.max_locations(), 2);
    }

    #[test]
    fn rejects_bad_probability_sum() {
        let text = MINIMAL.replace("[0.5,0.5]", "[0.5,0.6]");
        let err = parse_instance(&text).unwrap_err();
        assert_eq!(
            err.to_string(),
            "probability sum 1.1 out of tolerance at points[0]"
        );
    }

    #[test]
    fn accepts_sum_within_tolerance_and_keeps_it() {
        let text = MINIMAL.replace("[0.5,0.5]", "[0.5,0.5000000001]");
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst.points()[0].probs(), &[0.5, 0.5000000001]);
    }

    #[test]
    fn rejects_invalid_metric() {
        let text = r#"{"space":{"kind":"finite","matrix":[[0,1,3],[1,0,1],[3,1,0]]},
                       "points":[{"locations":[0],"probs":[1.0]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("triangle inequality"), "{err}");
    }

    #[test]
    fn reports_location_path() {
        let text = r#"{"space":{"kind":"euclidean","dim":2},
                       "points":[{"locations":[[0,0]],"probs":[1]},{"locations":[[0,0],[1]],"probs":[0.5,0.5]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert_eq!(
            err.to_string(),
            "dimension mismatch: expected 2, got 1 at points[1].locations[1]"
        );
        let text = r#"{"space":{"kind":"finite","matrix":[[0,1],[1,0]]},
                       "points":[{"locations":[2],"probs":[1]}]}"#;
        assert!(parse_instance(text)
            .unwrap_err()
            .to_string()
            .ends_with("at points[0].locations[0]"));
    }

    #[test]
    fn rejects_malformed_and_empty() {
        assert!(matches!(parse_instance("{"), Err(Error::Json(_))));
        assert!(parse_instance(r#"{"space":{"kind":"euclidean","dim":1},"points":[]}"#).is_err());
        assert!(parse_instance(
            r#"{"space":{"kind":"euclidean","dim":1},"points":[{"locations":[],"probs":[]}]}"#
        )
        .is_err());
        assert!(parse_instance(
            r#"{"space":{"kind":"euclidean","dim":1},"points":[{"locations":[[0]],"probs":[-0.5]}]}"#
        )
        .is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_instance(3, 2, GenSpace::Euclidean { dim: 2 }, 7).unwrap();
        let b = generate_instance(3, 2, GenSpace::Euclidean { dim: 2 }, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_instance(3, 2, GenSpace::Euclidean { dim: 2 }, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_generation_is_certain() {
        let inst = generate_instance(1, 1, GenSpace::Finite { m: 4 }, 3).unwrap();
        assert!(inst.is_certain());
        assert_eq!(inst.points()[0].probs(), &[1.0]);
        assert!(generate_instance(0, 1, GenSpace::Euclidean { dim: 1 }, 0).is_err());
        assert!(generate_instance(1, 0, GenSpace::Euclidean { dim: 1 }, 0).is_err());
    }

    #[test]
    fn lexicographic_realizations() {
        let space = Space::euclidean(1);
        let inst = Instance::new(
            space,
            vec![
                UncertainPoint::new(vec![vec![0.0].into(), vec![2.0].into()], vec![0.3, 0.7])
                    .unwrap(),
                UncertainPoint::certain(vec![1.0].into()),
            ],
        )
        .unwrap();
        let rs: Vec<_> = enumerate_realizations(&inst, 10).unwrap().collect();
        assert_eq!(
            rs,
            vec![
                Realization { choice: vec![0, 0], prob: 0.3 },
                Realization { choice: vec![1, 0], prob: 0.7 },
            ]
        );
    }

    #[test]
    fn realization_count_and_mass() {
        let inst = generate_instance(3, 3, GenSpace::Euclidean { dim: 1 }, 11).unwrap();
        let rs: Vec<_> = enumerate_realizations(&inst, 1000).unwrap().collect();
        assert_eq!(rs.len(), 27);
        let total: f64 = rs.iter().map(|r| r.prob).sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(matches!(
            enumerate_realizations(&inst, 26),
            Err(Error::TooLarge { .. })
        ));
    }
}
