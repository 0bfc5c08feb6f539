//! Replace-and-solve pipelines for the uncertain k-center problem.
//!
//! Each uncertain point is replaced by a certain surrogate (its expected point
//! in Euclidean space, its 1-center in a finite metric), a deterministic
//! k-center solver runs on the surrogates, and the uncertain points are then
//! assigned to the resulting centers by one of three rules.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{argmin_first, ecost_assigned, ecost_unassigned, expected_distance_unchecked, Assignment};
use crate::deterministic::{expected_point, weighted_one_median, CenterSet, DetSolver};
use crate::error::{Error, Result};
use crate::metric::{Point, Space, SpaceKind};
use crate::model::Instance;

/// Assignment rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Minimum expected distance.
    #[serde(rename = "ED")]
    ExpectedDistance,
    /// Nearest center to the expected point. Euclidean only.
    #[serde(rename = "EP")]
    ExpectedPoint,
    /// Nearest center to the point's own 1-center.
    #[serde(rename = "OC")]
    OneCenter,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::ExpectedDistance,
        Strategy::ExpectedPoint,
        Strategy::OneCenter,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::ExpectedDistance => "ED",
            Strategy::ExpectedPoint => "EP",
            Strategy::OneCenter => "OC",
        }
    }

    /// Errors when no algorithm here covers this rule in `kind`.
    pub fn check_space(self, kind: SpaceKind) -> Result<()> {
        match (self, kind) {
            (Strategy::ExpectedPoint, SpaceKind::Finite) => Err(Error::Unsupported(
                "expected-point assignment requires Euclidean space".into(),
            )),
            (Strategy::OneCenter, SpaceKind::Euclidean) => Err(Error::Unsupported(
                "one-center assignment is only available in finite metric spaces".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Problem version a solution is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Version {
    /// Assignment fixed by the strategy, only centers optimized.
    Restricted,
    /// Centers and assignment both free.
    Unrestricted,
    /// Each realized point goes to its nearest center.
    Unassigned,
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Version::Restricted => "restricted",
            Version::Unrestricted => "unrestricted",
            Version::Unassigned => "unassigned",
        })
    }
}

/// Centers, assignment and evaluated expected cost, with the guaranteed
/// approximation factor for the producing algorithm (1 for oracle optima).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub centers: CenterSet,
    pub assignment: Assignment,
    pub strategy: Option<Strategy>,
    pub det_solver: Option<DetSolver>,
    pub version: Version,
    pub ecost: f64,
    pub bound: f64,
}

impl Solution {
    /// Re-evaluates the expected cost from centers and assignment.
    pub fn recompute_ecost(&self, instance: &Instance) -> Result<f64> {
        match self.version {
            Version::Unassigned => ecost_unassigned(instance, &self.centers),
            _ => ecost_assigned(instance, &self.centers, &self.assignment),
        }
    }
}

/// Guaranteed approximation factor for a pipeline whose deterministic solver
/// is a `(1 + eps)`-approximation.
///
/// In a finite metric the restricted versions inherit the unrestricted factor,
/// since the unrestricted optimum never exceeds a restricted one.
pub fn approximation_bound(
    strategy: Strategy,
    kind: SpaceKind,
    eps: f64,
    version: Version,
) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be nonnegative, got {eps}")));
    }
    if version == Version::Unassigned {
        return match kind {
            SpaceKind::Euclidean => Ok(2.0),
            SpaceKind::Finite => Err(Error::Unsupported(
                "the unassigned 1-center rule requires Euclidean space".into(),
            )),
        };
    }
    strategy.check_space(kind)?;
    Ok(match (kind, strategy) {
        (SpaceKind::Euclidean, Strategy::ExpectedDistance) => 5.0 + eps,
        (SpaceKind::Euclidean, Strategy::ExpectedPoint) => 3.0 + eps,
        (SpaceKind::Finite, Strategy::ExpectedDistance) => 7.0 + 2.0 * eps,
        (SpaceKind::Finite, Strategy::OneCenter) => 5.0 + 2.0 * eps,
        _ => unreachable!("rejected by check_space"),
    })
}

/// Expected points (Euclidean) or exact 1-centers over the whole space (finite).
pub fn surrogates(instance: &Instance) -> Result<Vec<Point>> {
    let space = instance.space();
    match space {
        Space::Euclidean { .. } => instance
            .points()
            .iter()
            .map(|p| expected_point(space, p))
            .collect(),
        Space::Finite { .. } => {
            let all = space.all_points().expect("finite space");
            instance
                .points()
                .iter()
                .map(|p| weighted_one_median(space, p, &all))
                .collect()
        }
    }
}

/// Assigns every point by `strategy`; ties go to the lowest center index.
pub fn assign(instance: &Instance, centers: &[Point], strategy: Strategy) -> Result<Assignment> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no centers given".into()));
    }
    let space = instance.space();
    strategy.check_space(space.kind())?;
    space.check_points(centers)?;
    let surr = match strategy {
        Strategy::ExpectedDistance => None,
        _ => Some(surrogates(instance)?),
    };
    Ok(assign_with(instance, centers, strategy, surr.as_deref()))
}

/// `surr` must hold the surrogates matching `strategy` when it is EP or OC.
pub(crate) fn assign_with(
    instance: &Instance,
    centers: &[Point],
    strategy: Strategy,
    surr: Option<&[Point]>,
) -> Assignment {
    let space = instance.space();
    let targets = instance
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let keys = centers.iter().map(|c| match strategy {
                Strategy::ExpectedDistance => expected_distance_unchecked(space, p, c),
                _ => space.dist(&surr.expect("surrogates supplied")[i], c),
            });
            argmin_first(keys).expect("centers nonempty")
        })
        .collect();
    Assignment(targets)
}

/// Best expected point as a single center for the unassigned 1-center problem.
///
/// Any single expected point is already within a factor 2 of the optimum; all
/// of them are tried and the cheapest kept (first wins ties).
pub fn solve_one_center(instance: &Instance) -> Result<Solution> {
    if instance.space().kind() != SpaceKind::Euclidean {
        return Err(Error::Unsupported(
            "the unassigned 1-center rule requires Euclidean space".into(),
        ));
    }
    let mut best: Option<(f64, Point)> = None;
    for c in surrogates(instance)? {
        let cost = ecost_unassigned(instance, std::slice::from_ref(&c))?;
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, c));
        }
    }
    let (ecost, center) = best.expect("instance has points");
    Ok(Solution {
        centers: CenterSet::new(vec![center])?,
        assignment: Assignment::uniform(instance.len(), 0),
        strategy: None,
        det_solver: None,
        version: Version::Unassigned,
        ecost,
        bound: approximation_bound(Strategy::ExpectedDistance, SpaceKind::Euclidean, 0.0, Version::Unassigned)?,
    })
}

/// Replace-and-solve for the assigned versions.
///
/// `version` only selects the bound; centers and assignment do not depend on it.
pub fn solve_kcenter(
    instance: &Instance,
    k: usize,
    strategy: Strategy,
    det: DetSolver,
    version: Version,
) -> Result<Solution> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if version == Version::Unassigned {
        return Err(Error::Unsupported(
            "the unassigned version is only solved for k = 1; use solve_one_center".into(),
        ));
    }
    let kind = instance.space().kind();
    strategy.check_space(kind)?;
    let bound = approximation_bound(strategy, kind, det.epsilon(), version)?;

    let surr = surrogates(instance)?;
    let candidates = match det {
        DetSolver::Gonzalez => Vec::new(),
        DetSolver::ExactDiscrete => crate::oracle::default_candidates_with(instance, &surr),
    };
    let centers = det.solve(instance.space(), &surr, &candidates, k)?;
    let assignment = assign_with(instance, &centers, strategy, Some(&surr));
    let ecost = ecost_assigned(instance, &centers, &assignment)?;
    Ok(Solution {
        centers,
        assignment,
        strategy: Some(strategy),
        det_solver: Some(det),
        version,
        ecost,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UncertainPoint;

    fn pt(x: f64) -> Point {
        Point::Coords(vec![x])
    }

    fn e1() -> Instance {
        Instance::new(
            Space::euclidean(1),
            vec![
                UncertainPoint::new(vec![pt(0.0), pt(2.0)], vec![0.5, 0.5]).unwrap(),
                UncertainPoint::certain(pt(1.0)),
            ],
        )
        .unwrap()
    }

    fn finite_line() -> Instance {
        let space = Space::finite(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        Instance::new(
            space,
            vec![
                UncertainPoint::new(vec![0.into(), 2.into()], vec![0.5, 0.5]).unwrap(),
                UncertainPoint::certain(1.into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bounds_table() {
        use SpaceKind::*;
        use Strategy::*;
        let b = |s, k, e, v| approximation_bound(s, k, e, v).unwrap();
        assert_eq!(b(ExpectedDistance, Euclidean, 1.0, Version::Restricted), 6.0);
        assert_eq!(b(ExpectedPoint, Euclidean, 1.0, Version::Restricted), 4.0);
        assert_eq!(b(ExpectedPoint, Euclidean, 1.0, Version::Unrestricted), 4.0);
        assert_eq!(b(ExpectedDistance, Euclidean, 0.0, Version::Unrestricted), 5.0);
        assert_eq!(b(ExpectedPoint, Euclidean, 0.0, Version::Unrestricted), 3.0);
        assert_eq!(b(ExpectedDistance, Finite, 0.0, Version::Unrestricted), 7.0);
        assert_eq!(b(ExpectedDistance, Finite, 1.0, Version::Unrestricted), 9.0);
        assert_eq!(b(OneCenter, Finite, 0.0, Version::Unrestricted), 5.0);
        assert_eq!(b(OneCenter, Finite, 1.0, Version::Restricted), 7.0);
        assert_eq!(b(ExpectedDistance, Euclidean, 1.0, Version::Unassigned), 2.0);
        assert!(approximation_bound(ExpectedPoint, Finite, 0.0, Version::Restricted)
            .unwrap_err()
            .is_unsupported());
        assert!(approximation_bound(OneCenter, Euclidean, 0.0, Version::Restricted).is_err());
        assert!(approximation_bound(ExpectedPoint, Euclidean, -1.0, Version::Restricted).is_err());
    }

    #[test]
    fn assign_examples_on_e1() {
        let inst = e1();
        let centers = [pt(0.0), pt(2.0)];
        assert_eq!(
            assign(&inst, &centers, Strategy::ExpectedDistance).unwrap(),
            Assignment(vec![0, 0])
        );
        assert_eq!(
            assign(&inst, &centers, Strategy::ExpectedPoint).unwrap(),
            Assignment(vec![0, 0])
        );
        assert_eq!(
            assign(&inst, &[pt(5.0)], Strategy::ExpectedDistance).unwrap(),
            Assignment(vec![0, 0])
        );
        assert!(assign(&inst, &centers, Strategy::OneCenter)
            .unwrap_err()
            .is_unsupported());
    }

    #[test]
    fn assign_ep_rejected_on_finite() {
        let inst = finite_line();
        let err = assign(&inst, &[0.into()], Strategy::ExpectedPoint).unwrap_err();
        assert_eq!(err.to_string(), "expected-point assignment requires Euclidean space");
    }

    #[test]
    fn one_center_on_e1() {
        let sol = solve_one_center(&e1()).unwrap();
        assert_eq!(sol.centers.as_slice(), &[pt(1.0)]);
        assert_eq!(sol.ecost, 1.0);
        assert_eq!(sol.bound, 2.0);
        assert!(solve_one_center(&finite_line()).unwrap_err().is_unsupported());
    }

    #[test]
    fn one_center_single_certain_point() {
        let inst = Instance::new(Space::euclidean(2), vec![UncertainPoint::certain(vec![0.5, 0.5].into())]).unwrap();
        let sol = solve_one_center(&inst).unwrap();
        assert_eq!(sol.ecost, 0.0);
        assert_eq!(sol.centers.as_slice(), &[Point::Coords(vec![0.5, 0.5])]);
    }

    #[test]
    fn kcenter_e1_ed_gonzalez() {
        let sol = solve_kcenter(&e1(), 1, Strategy::ExpectedDistance, DetSolver::Gonzalez, Version::Restricted).unwrap();
        assert_eq!(sol.centers.as_slice(), &[pt(1.0)]);
        assert_eq!(sol.ecost, 1.0);
        assert_eq!(sol.bound, 6.0);
    }

    #[test]
    fn kcenter_finite_oc_exact() {
        let inst = finite_line();
        assert_eq!(surrogates(&inst).unwrap(), vec![Point::Index(0), Point::Index(1)]);
        let sol = solve_kcenter(&inst, 1, Strategy::OneCenter, DetSolver::ExactDiscrete, Version::Unrestricted).unwrap();
        assert_eq!(sol.centers.as_slice(), &[Point::Index(0)]);
        assert_eq!(sol.assignment, Assignment(vec![0, 0]));
        assert_eq!(sol.ecost, 1.5);
        assert_eq!(sol.bound, 5.0);
    }

    #[test]
    fn kcenter_guards() {
        let inst = finite_line();
        assert!(solve_kcenter(&inst, 1, Strategy::ExpectedPoint, DetSolver::Gonzalez, Version::Restricted)
            .unwrap_err()
            .is_unsupported());
        assert!(solve_kcenter(&inst, 0, Strategy::OneCenter, DetSolver::Gonzalez, Version::Restricted).is_err());
        assert!(solve_kcenter(&e1(), 1, Strategy::ExpectedDistance, DetSolver::Gonzalez, Version::Unassigned).is_err());
    }
}
