//! Finite metric spaces, distance vectors and the membership predicates used
//! throughout the crate.
//!
//! Points are indexed from 0 everywhere in the Rust API. The only exception is
//! [`pair_index`], which follows the conventional 1-based `(i, j)` labelling of
//! the coordinates of a point of `[0,1]^(n choose 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Read access to pairwise distances on the points `0..len()`.
///
/// Implemented by both validated spaces and raw distance vectors so that
/// configuration distances and formulas can be evaluated on either.
pub trait Distances {
    fn len(&self) -> usize;

    /// Distance between points `i` and `j`; must return 0 when `i == j`.
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Number of unordered pairs on `n` points.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// 0-based flat position of the pair `(i, j)`, `i < j < n`, both 0-based.
#[inline]
pub(crate) fn flat_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Flat position of the pair `(i, j)` with `1 <= i < j <= n` (1-based point
/// labels) in the lexicographic ordering of pairs.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || i >= j || j > n {
        return Err(Error::Argument(format!(
            "pair ({i}, {j}) is not a valid pair on {n} points (need 1 <= i < j <= n)"
        )));
    }
    Ok(flat_index(i - 1, j - 1, n))
}

/// Inverse of [`flat_index`]: the 0-based pair at a flat position.
pub(crate) fn pair_at(mut pos: usize, n: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if pos < row {
            return (i, i + 1 + pos);
        }
        pos -= row;
    }
    panic!("flat position out of range for n = {n}");
}

fn check_unit(value: f64, what: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidSpace(format!("{} = {value} is outside [0, 1]", what())))
    }
}

/// A point of `[0,1]^(n choose 2)`: the raw coordinates `d_ij`, `i < j`,
/// in lexicographic pair order. It need not satisfy the triangle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistanceVectorRepr", into = "DistanceVectorRepr")]
pub struct DistanceVector {
    n: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistanceVectorRepr {
    n: usize,
    d: Vec<f64>,
}

impl TryFrom<DistanceVectorRepr> for DistanceVector {
    type Error = Error;

    fn try_from(repr: DistanceVectorRepr) -> Result<Self> {
        DistanceVector::new(repr.n, repr.d)
    }
}

impl From<DistanceVector> for DistanceVectorRepr {
    fn from(v: DistanceVector) -> Self {
        DistanceVectorRepr { n: v.n, d: v.coords }
    }
}

impl DistanceVector {
    pub fn new(n: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("a space needs at least one point".into()));
        }
        if coords.len() != pair_count(n) {
            return Err(Error::InvalidSpace(format!(
                "expected {} coordinates for n = {n}, got {}",
                pair_count(n),
                coords.len()
            )));
        }
        for (pos, &c) in coords.iter().enumerate() {
            check_unit(c, || {
                let (i, j) = pair_at(pos, n);
                format!("d({i},{j})")
            })?;
        }
        Ok(DistanceVector { n, coords })
    }

    /// Callers guarantee the length and range invariants.
    pub(crate) fn from_raw(n: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), pair_count(n));
        DistanceVector { n, coords }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Closed triangle-inequality test with additive slack `tol`.
    pub fn is_metric(&self, tol: f64) -> bool {
        first_triangle_violation(self, tol).is_none()
    }

    pub fn min_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Distances for DistanceVector {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.coords[flat_index(i, j, self.n)],
            std::cmp::Ordering::Greater => self.coords[flat_index(j, i, self.n)],
        }
    }
}

/// First triple `(i, j, k)` with `d(i,j) > d(i,k) + d(k,j) + tol`, scanning
/// pairs lexicographically and `k` in increasing order.
pub fn first_triangle_violation<D: Distances + ?Sized>(
    d: &D,
    tol: f64,
) -> Option<(usize, usize, usize)> {
    let n = d.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d.dist(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if dij > d.dist(i, k) + d.dist(k, j) + tol {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Membership in the metric polytope `M_n` (closed convention), with slack.
pub fn is_metric(d: &DistanceVector, tol: f64) -> bool {
    d.is_metric(tol)
}

/// A validated finite metric space with diameter at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Builds a space from a full symmetric matrix, validating every invariant.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidSpace("a space needs at least one point".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidSpace(format!(
                    "diagonal entry d({i},{i}) = {} is not 0",
                    dist[i * n + i]
                )));
            }
            for j in (i + 1)..n {
                let a = dist[i * n + j];
                let b = dist[j * n + i];
                check_unit(a, || format!("d({i},{j})"))?;
                if a != b {
                    return Err(Error::InvalidSpace(format!(
                        "matrix is not symmetric: d({i},{j}) = {a} but d({j},{i}) = {b}"
                    )));
                }
            }
        }
        let space = FiniteMetricSpace { n, dist };
        space.check_triangles()?;
        Ok(space)
    }

    /// Converts a distance vector; fails if it is not a metric.
    pub fn from_dvec(d: &DistanceVector) -> Result<Self> {
        let space = Self::from_dvec_unchecked(d);
        space.check_triangles()?;
        Ok(space)
    }

    pub(crate) fn from_dvec_unchecked(d: &DistanceVector) -> Self {
        let n = d.n();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d.dist(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        FiniteMetricSpace { n, dist }
    }

    /// Builds a space from a distance function on `0..n`. Used by builders
    /// whose output is a metric by construction; still validated.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut coords = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in (i + 1)..n {
                coords.push(f(i, j));
            }
        }
        Self::from_dvec(&DistanceVector::new(n, coords)?)
    }

    /// A single point.
    pub fn singleton() -> Self {
        FiniteMetricSpace { n: 1, dist: vec![0.0] }
    }

    fn check_triangles(&self) -> Result<()> {
        match first_triangle_violation(self, 0.0) {
            None => Ok(()),
            Some((i, j, k)) => Err(Error::InvalidSpace(format!(
                "triangle inequality violated at (i, j, k) = ({i}, {j}, {k}): \
                 d({i},{j}) = {} > d({i},{k}) + d({k},{j}) = {}",
                self.dist(i, j),
                self.dist(i, k) + self.dist(k, j)
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn to_dvec(&self) -> DistanceVector {
        let mut coords = Vec::with_capacity(pair_count(self.n));
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                coords.push(self.dist(i, j));
            }
        }
        DistanceVector::from_raw(self.n, coords)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Restriction to the points `0..k`.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n {
            return Err(Error::Argument(format!(
                "cannot restrict a {}-point space to {k} points",
                self.n
            )));
        }
        let mut dist = Vec::with_capacity(k * k);
        for i in 0..k {
            dist.extend_from_slice(&self.dist[i * self.n..i * self.n + k]);
        }
        Ok(FiniteMetricSpace { n: k, dist })
    }

    /// Off-diagonal pairs at distance exactly 0 (pseudometric boundary points).
    /// They are admitted but worth reporting.
    pub fn zero_distance_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.dist(i, j) == 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl Distances for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

/// Class C: every distance between distinct points lies in `[1/2, 1]`.
pub fn in_class_c<D: Distances + ?Sized>(x: &D) -> bool {
    let n = x.len();
    (0..n).all(|i| ((i + 1)..n).all(|j| (0.5..=1.0).contains(&x.dist(i, j))))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 0.5 {
        Ok(())
    } else {
        Err(Error::Argument(format!("delta = {delta} must lie in (0, 1/2]")))
    }
}

/// Membership in `D_n`: a metric whose coordinates are all at least `1/2 - delta`.
pub fn in_d_n(d: &DistanceVector, delta: f64) -> Result<bool> {
    check_delta(delta)?;
    Ok(is_concentrated(d, delta))
}

/// As [`in_d_n`] without the range check on `delta`; `delta = 0` reads the
/// concentration condition as "all distances at least 1/2".
pub(crate) fn is_concentrated(d: &DistanceVector, delta: f64) -> bool {
    let floor = 0.5 - delta;
    d.coords().iter().all(|&c| c >= floor) && d.is_metric(0.0)
}

/// Configuration distance `max_{i<j} |d_X(i,j) - d_Z(v_i, v_j)|`; 0 when `|X| <= 1`.
pub fn conf<X, Z>(x: &X, z: &Z, v: &[usize]) -> Result<f64>
where
    X: Distances + ?Sized,
    Z: Distances + ?Sized,
{
    if v.len() != x.len() {
        return Err(Error::Argument(format!(
            "tuple has {} entries but the template space has {} points",
            v.len(),
            x.len()
        )));
    }
    if let Some(&bad) = v.iter().find(|&&p| p >= z.len()) {
        return Err(Error::Argument(format!(
            "tuple entry {bad} is not a point of a {}-point space",
            z.len()
        )));
    }
    Ok(conf_unchecked(x, z, v))
}

pub(crate) fn conf_unchecked<X, Z>(x: &X, z: &Z, v: &[usize]) -> f64
where
    X: Distances + ?Sized,
    Z: Distances + ?Sized,
{
    let mut worst = 0.0f64;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            worst = worst.max((x.dist(i, j) - z.dist(v[i], v[j])).abs());
        }
    }
    worst
}

/// `X ⊏ Y`: `Y` is `X` plus one extra point, stored last, and both lie in class C.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePointExtension {
    base: FiniteMetricSpace,
    extension: FiniteMetricSpace,
}

impl OnePointExtension {
    pub fn new(base: FiniteMetricSpace, extension: FiniteMetricSpace) -> Result<Self> {
        let k = base.n();
        if extension.n() != k + 1 {
            return Err(Error::Argument(format!(
                "extension has {} points, expected {}",
                extension.n(),
                k + 1
            )));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if base.dist(i, j) != extension.dist(i, j) {
                    return Err(Error::Argument(format!(
                        "extension disagrees with base at d({i},{j})"
                    )));
                }
            }
        }
        if !in_class_c(&base) || !in_class_c(&extension) {
            return Err(Error::Argument(
                "both spaces of an extension must lie in class C".into(),
            ));
        }
        Ok(OnePointExtension { base, extension })
    }

    /// Extends `base` by a point at the given distances from each base point.
    pub fn from_base(base: FiniteMetricSpace, new_point: &[f64]) -> Result<Self> {
        let k = base.n();
        if new_point.len() != k {
            return Err(Error::Argument(format!(
                "new point needs {k} distances, got {}",
                new_point.len()
            )));
        }
        let extension = FiniteMetricSpace::from_fn(k + 1, |i, j| {
            if j == k {
                new_point[i]
            } else {
                base.dist(i, j)
            }
        })?;
        Self::new(base, extension)
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn extension(&self) -> &FiniteMetricSpace {
        &self.extension
    }

    /// Number of points of the base space.
    pub fn k(&self) -> usize {
        self.base.n()
    }

    /// Distances from the extra point to each base point.
    pub fn new_point_distances(&self) -> Vec<f64> {
        let k = self.k();
        (0..k).map(|i| self.extension.dist(i, k)).collect()
    }
}
