//! Distance contexts: Euclidean `R^d` and finite metrics given by a distance matrix.
//!
//! Finite metrics are validated once (see [`validate_space`]); after that every
//! distance query is a plain table lookup.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack used for every metric-axiom check.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// A location in a [`Space`].
///
/// Serializes as a bare integer (finite spaces) or an array of reals (Euclidean).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Coords(Vec<f64>),
}

impl Point {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Index(_) => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            Point::Coords(_) => None,
        }
    }
}

impl From<usize> for Point {
    fn from(i: usize) -> Self {
        Point::Index(i)
    }
}

impl From<Vec<f64>> for Point {
    fn from(c: Vec<f64>) -> Self {
        Point::Coords(c)
    }
}

/// Square matrix of pairwise distances, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidMatrix("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(DistanceMatrix { size, data })
    }

    /// Builds the matrix of pairwise Euclidean distances between `points`.
    pub fn from_embedding(points: &[Vec<f64>]) -> Self {
        let size = points.len();
        let mut data = Vec::with_capacity(size * size);
        for a in points {
            for b in points {
                data.push(euclidean(a, b));
            }
        }
        DistanceMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.size).map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DistanceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        DistanceMatrix::from_rows(rows)
    }
}

impl From<DistanceMatrix> for Vec<Vec<f64>> {
    fn from(m: DistanceMatrix) -> Self {
        m.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Euclidean,
    Finite,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Euclidean => f.write_str("euclidean"),
            SpaceKind::Finite => f.write_str("finite"),
        }
    }
}

/// The metric `d` shared by all locations and centers of an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Space {
    Euclidean { dim: usize },
    Finite { matrix: DistanceMatrix },
}

impl Space {
    pub fn euclidean(dim: usize) -> Self {
        Space::Euclidean { dim }
    }

    pub fn finite(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Space::Finite {
            matrix: DistanceMatrix::from_rows(rows)?,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Euclidean { .. } => SpaceKind::Euclidean,
            Space::Finite { .. } => SpaceKind::Finite,
        }
    }

    /// Checks that `p` is a location of this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (Space::Euclidean { dim }, Point::Coords(c)) => {
                if c.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: c.len(),
                    });
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(())
            }
            (Space::Finite { matrix }, Point::Index(i)) => {
                if *i >= matrix.size() {
                    return Err(Error::IndexOutOfRange {
                        index: *i,
                        size: matrix.size(),
                    });
                }
                Ok(())
            }
            (Space::Euclidean { .. }, Point::Index(_)) => Err(Error::KindMismatch {
                expected: "an array of coordinates",
            }),
            (Space::Finite { .. }, Point::Coords(_)) => Err(Error::KindMismatch {
                expected: "an integer index",
            }),
        }
    }

    pub fn check_points<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
        points.into_iter().try_for_each(|p| self.check_point(p))
    }

    /// Distance between two points, validating both first.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance between two points already known to be valid in this space.
    #[inline]
    pub(crate) fn dist(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (Space::Euclidean { .. }, Point::Coords(x), Point::Coords(y)) => euclidean(x, y),
            (Space::Finite { matrix }, Point::Index(i), Point::Index(j)) => matrix.get(*i, *j),
            _ => unreachable!("points were not validated against the space"),
        }
    }

    /// Every location of a finite space, in index order. `None` for Euclidean spaces.
    pub fn all_points(&self) -> Option<Vec<Point>> {
        match self {
            Space::Finite { matrix } => Some((0..matrix.size()).map(Point::Index).collect()),
            Space::Euclidean { .. } => None,
        }
    }
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A broken metric axiom in a finite space, with the offending indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    Asymmetry { i: usize, j: usize },
    /// `d(i, k) > d(i, via) + d(via, k)`.
    Triangle {
        i: usize,
        k: usize,
        via: usize,
        direct: f64,
        detour: f64,
    },
    ZeroDimension,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { i, j } => write!(f, "non-finite distance at ({i}, {j})"),
            Violation::Negative { i, j, value } => {
                write!(f, "negative distance {value} at ({i}, {j})")
            }
            Violation::NonzeroDiagonal { i, value } => {
                write!(f, "nonzero diagonal {value} at ({i}, {i})")
            }
            Violation::Asymmetry { i, j } => write!(f, "asymmetry at ({i}, {j})"),
            Violation::Triangle {
                i,
                k,
                via,
                direct,
                detour,
            } => write!(
                f,
                "triangle inequality at ({i}, {k}) via {via}: {direct} > {detour}"
            ),
            Violation::ZeroDimension => f.write_str("euclidean dimension must be positive"),
        }
    }
}

/// Lists every metric-axiom violation of `space`; empty means valid.
///
/// Finite matrices get the full O(m^3) triangle scan.
pub fn validate_space(space: &Space) -> Vec<Violation> {
    let matrix = match space {
        Space::Euclidean { dim } => {
            return if *dim == 0 {
                vec![Violation::ZeroDimension]
            } else {
                Vec::new()
            };
        }
        Space::Finite { matrix } => matrix,
    };
    let m = matrix.size();
    let mut out = Vec::new();
    let mut finite = true;
    for i in 0..m {
        for j in 0..m {
            let v = matrix.get(i, j);
            if !v.is_finite() {
                out.push(Violation::NonFinite { i, j });
                finite = false;
            } else if v < 0.0 {
                out.push(Violation::Negative { i, j, value: v });
            }
        }
    }
    if !finite {
        return out;
    }
    for i in 0..m {
        let v = matrix.get(i, i);
        if v.abs() > METRIC_TOLERANCE {
            out.push(Violation::NonzeroDiagonal { i, value: v });
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if (matrix.get(i, j) - matrix.get(j, i)).abs() > METRIC_TOLERANCE {
                out.push(Violation::Asymmetry { i, j });
            }
        }
    }
    for i in 0..m {
        for k in 0..m {
            if i == k {
                continue;
            }
            let direct = matrix.get(i, k);
            for via in 0..m {
                if via == i || via == k {
                    continue;
                }
                let detour = matrix.get(i, via) + matrix.get(via, k);
                if direct > detour + METRIC_TOLERANCE {
                    out.push(Violation::Triangle {
                        i,
                        k,
                        via,
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> Space {
        Space::finite(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        let s = Space::euclidean(2);
        let d = s
            .distance(&vec![0.0, 0.0].into(), &vec![3.0, 4.0].into())
            .unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn identity_is_zero() {
        let s = Space::euclidean(3);
        let a: Point = vec![0.3, -1.0, 7.5].into();
        assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
        let f = line3();
        assert_eq!(f.distance(&1.into(), &1.into()).unwrap(), 0.0);
    }

    #[test]
    fn finite_lookup() {
        assert_eq!(line3().distance(&0.into(), &2.into()).unwrap(), 2.0);
    }

    #[test]
    fn invalid_points_rejected() {
        let s = Space::euclidean(2);
        assert!(matches!(
            s.distance(&vec![0.0].into(), &vec![1.0, 1.0].into()),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            s.distance(&Point::Index(0), &vec![1.0, 1.0].into()),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            line3().distance(&0.into(), &3.into()),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        ));
        assert!(matches!(
            s.distance(&vec![f64::NAN, 0.0].into(), &vec![1.0, 1.0].into()),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn valid_two_point_metric() {
        let s = Space::finite(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(validate_space(&s).is_empty());
    }

    #[test]
    fn asymmetry_reported() {
        let s = Space::finite(vec![vec![0.0, 5.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(validate_space(&s), vec![Violation::Asymmetry { i: 0, j: 1 }]);
    }

    #[test]
    fn triangle_reported() {
        let s = Space::finite(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        let v = validate_space(&s);
        assert_eq!(
            v[0],
            Violation::Triangle {
                i: 0,
                k: 2,
                via: 1,
                direct: 3.0,
                detour: 2.0
            }
        );
        assert_eq!(v[0].to_string(), "triangle inequality at (0, 2) via 1: 3 > 2");
        // (2, 0) via 1 is the same violation seen from the other end
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn diagonal_and_sign_reported() {
        let s = Space::finite(vec![vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            validate_space(&s),
            vec![Violation::NonzeroDiagonal { i: 0, value: 0.5 }]
        );
        let s = Space::finite(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(validate_space(&s).len(), 2);
        assert_eq!(
            validate_space(&Space::euclidean(0)),
            vec![Violation::ZeroDimension]
        );
    }

    #[test]
    fn ragged_matrix_rejected() {
        assert!(Space::finite(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(Space::finite(vec![]).is_err());
    }

    #[test]
    fn embedding_matrix_is_a_metric() {
        let pts = vec![vec![0.0, 0.0], vec![0.3, 0.9], vec![1.0, 0.2], vec![0.5, 0.5]];
        let s = Space::Finite {
            matrix: DistanceMatrix::from_embedding(&pts),
        };
        assert!(validate_space(&s).is_empty());
    }

    #[test]
    fn space_json_shape() {
        let s: Space = serde_json::from_str(r#"{"kind":"finite","matrix":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(s.kind(), SpaceKind::Finite);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"kind":"finite","matrix":[[0.0,1.0],[1.0,0.0]]}"#
        );
        let e: Space = serde_json::from_str(r#"{"kind":"euclidean","dim":3}"#).unwrap();
        assert_eq!(e, Space::euclidean(3));
    }
}
