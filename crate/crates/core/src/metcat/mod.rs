//! Finite extended pseudometric spaces and 1-Lipschitz maps, with the
//! limits, colimits and closed monoidal structure of the metric category.

mod closed;
mod limits;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use closed::{curry, hom, tensor, uncurry, Curried, HomSpace, TensorSpace};
pub use limits::{coequalizer, coproduct, equalizer, product, Coequalizer, Coproduct, Equalizer, ProductSpace};

/// Point-count guard for products and tensors.
pub const MAX_PRODUCT_POINTS: usize = 1_000_000;

/// A distance in `[0, ∞]`. `Infinite` sorts above every finite value and
/// absorbs addition.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum Distance<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Distance<S> {
    pub fn zero() -> Self {
        Distance::Finite(S::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Distance::Finite(v) if v.approx_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }

    pub fn approx_le(&self, other: &Self) -> bool {
        match (self, other) {
            (_, Distance::Infinite) => true,
            (Distance::Infinite, Distance::Finite(_)) => false,
            (Distance::Finite(a), Distance::Finite(b)) => a.approx_le(b),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Distance::Infinite, Distance::Infinite) => true,
            (Distance::Finite(a), Distance::Finite(b)) => a.approx_eq(b),
            _ => false,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Multiplication by a positive factor; `∞` stays `∞`.
    pub fn scaled(&self, r: &S) -> Self {
        match self {
            Distance::Finite(v) => Distance::Finite(v.clone() * r.clone()),
            Distance::Infinite => Distance::Infinite,
        }
    }

    /// Reads a scalar literal or `"inf"`.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Some(Distance::Infinite);
        }
        S::parse_literal(t).map(Distance::Finite)
    }

    pub fn to_literal(&self) -> String {
        match self {
            Distance::Finite(v) => v.to_literal(),
            Distance::Infinite => "inf".to_string(),
        }
    }
}

impl<S: Scalar> Add for Distance<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl<S: Scalar> fmt::Display for Distance<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl<S: Scalar> From<S> for Distance<S> {
    fn from(v: S) -> Self {
        Distance::Finite(v)
    }
}

pub(crate) fn cmp_distance<S: Scalar>(a: &Distance<S>, b: &Distance<S>) -> Ordering {
    a.partial_cmp(b).expect("distances are totally ordered")
}

/// A finite set with an extended pseudometric given as a full table.
#[derive(Debug, Clone, PartialEq)]
pub struct FinPseudometricSpace<S> {
    points: Vec<String>,
    dist: Vec<Vec<Distance<S>>>,
}

pub type MetricRef<S> = Arc<FinPseudometricSpace<S>>;

/// A failed pseudometric axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    NonzeroDiagonal(String),
    Negative(String, String),
    Asymmetric(String, String),
    Triangle(String, String, String),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::NonzeroDiagonal(x) => write!(f, "d({x}, {x}) is not 0"),
            AxiomViolation::Negative(x, y) => write!(f, "d({x}, {y}) is negative"),
            AxiomViolation::Asymmetric(x, y) => write!(f, "d({x}, {y}) differs from d({y}, {x})"),
            AxiomViolation::Triangle(x, y, z) => {
                write!(f, "d({x}, {z}) exceeds d({x}, {y}) + d({y}, {z})")
            }
        }
    }
}

impl<S: Scalar> FinPseudometricSpace<S> {
    /// Validates the table against every pseudometric axiom, including a full
    /// scan of triples for the triangle inequality.
    pub fn new<L: Into<String>>(points: Vec<L>, dist: Vec<Vec<Distance<S>>>) -> Result<Self> {
        let space = Self::new_unchecked(points, dist)?;
        if let Some(v) = space.first_violation() {
            return Err(Error::NotPseudometric(v.to_string()));
        }
        Ok(space)
    }

    /// Checks shape and labels only.
    pub fn new_unchecked<L: Into<String>>(points: Vec<L>, dist: Vec<Vec<Distance<S>>>) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::DuplicateAtom(p.clone()));
            }
        }
        if dist.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                actual: dist.len(),
            });
        }
        if let Some(row) = dist.iter().find(|row| row.len() != points.len()) {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                actual: row.len(),
            });
        }
        Ok(Self { points, dist })
    }

    /// `n` points with all distances given by `d(i, j)`.
    pub fn from_fn<F>(points: Vec<String>, d: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Distance<S>,
    {
        let n = points.len();
        let dist = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
        Self::new(points, dist)
    }

    /// One point.
    pub fn point() -> Self {
        Self {
            points: vec!["*".to_string()],
            dist: vec![vec![Distance::zero()]],
        }
    }

    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            dist: Vec::new(),
        }
    }

    /// Points `0..n` of the real line at the given positions.
    pub fn line(positions: &[S]) -> Self {
        let n = positions.len();
        Self {
            points: (0..n).map(|i| i.to_string()).collect(),
            dist: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| Distance::Finite((positions[i].clone() - positions[j].clone()).abs()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_ref(self) -> MetricRef<S> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn d(&self, i: usize, j: usize) -> &Distance<S> {
        &self.dist[i][j]
    }

    pub fn table(&self) -> &[Vec<Distance<S>>] {
        &self.dist
    }

    /// The first failed axiom in scan order, if any.
    pub fn first_violation(&self) -> Option<AxiomViolation> {
        let n = self.len();
        let label = |i: usize| self.points[i].clone();
        for i in 0..n {
            if !self.dist[i][i].is_zero() {
                return Some(AxiomViolation::NonzeroDiagonal(label(i)));
            }
            for j in 0..n {
                if let Distance::Finite(v) = &self.dist[i][j] {
                    if *v < S::zero() {
                        return Some(AxiomViolation::Negative(label(i), label(j)));
                    }
                }
                if !self.dist[i][j].approx_eq(&self.dist[j][i]) {
                    return Some(AxiomViolation::Asymmetric(label(i), label(j)));
                }
            }
        }
        self.triangle_violation()
            .map(|(x, y, z)| AxiomViolation::Triangle(label(x), label(y), label(z)))
    }

    /// A triple `(x, y, z)` with `d(x, z) > d(x, y) + d(y, z)`.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                let dxy = &self.dist[x][y];
                if !dxy.is_finite() {
                    continue;
                }
                for z in 0..n {
                    let via = dxy.clone() + self.dist[y][z].clone();
                    if !self.dist[x][z].approx_le(&via) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_pseudometric(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Whether distinct points are always at positive distance.
    pub fn is_separated(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| i == j || !self.dist[i][j].is_zero()))
    }
}

/// A 1-Lipschitz map between finite pseudometric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzMap<S> {
    src: MetricRef<S>,
    dst: MetricRef<S>,
    assign: Vec<usize>,
}

pub(crate) fn same_metric<S: Scalar>(a: &MetricRef<S>, b: &MetricRef<S>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<S: Scalar> LipschitzMap<S> {
    pub fn new(src: MetricRef<S>, dst: MetricRef<S>, assign: Vec<usize>) -> Result<Self> {
        let map = Self::new_unchecked(src, dst, assign)?;
        map.check_lipschitz()?;
        Ok(map)
    }

    /// Checks the table shape but not the Lipschitz condition.
    pub fn new_unchecked(src: MetricRef<S>, dst: MetricRef<S>, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != src.len() {
            return Err(Error::LengthMismatch {
                expected: src.len(),
                actual: assign.len(),
            });
        }
        if let Some(&b) = assign.iter().find(|&&b| b >= dst.len()) {
            return Err(Error::UnknownAtom(b.to_string()));
        }
        Ok(Self { src, dst, assign })
    }

    /// Map given by `(source label, target label)` pairs covering the source.
    pub fn from_labels<'a, I>(src: MetricRef<S>, dst: MetricRef<S>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut assign = vec![None; src.len()];
        for (a, b) in pairs {
            let i = src.index_of(a).ok_or_else(|| Error::UnknownAtom(a.to_string()))?;
            let j = dst.index_of(b).ok_or_else(|| Error::UnknownAtom(b.to_string()))?;
            assign[i] = Some(j);
        }
        let assign = assign
            .into_iter()
            .enumerate()
            .map(|(i, j)| j.ok_or_else(|| Error::PartialAssignment(src.point_label(i).to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(src, dst, assign)
    }

    pub fn identity(space: MetricRef<S>) -> Self {
        let assign = (0..space.len()).collect();
        Self {
            src: space.clone(),
            dst: space,
            assign,
        }
    }

    /// The constant map onto `point`.
    pub fn constant(src: MetricRef<S>, dst: MetricRef<S>, point: usize) -> Result<Self> {
        let n = src.len();
        Self::new(src, dst, vec![point; n])
    }

    pub fn src(&self) -> &MetricRef<S> {
        &self.src
    }

    pub fn dst(&self) -> &MetricRef<S> {
        &self.dst
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn image(&self, x: usize) -> usize {
        self.assign[x]
    }

    /// The first pair whose images are farther apart than the points.
    pub fn lipschitz_violation(&self) -> Option<(usize, usize)> {
        let n = self.src.len();
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .find(|&(x, y)| {
                !self
                    .dst
                    .d(self.assign[x], self.assign[y])
                    .approx_le(self.src.d(x, y))
            })
    }

    pub fn check_lipschitz(&self) -> Result<()> {
        match self.lipschitz_violation() {
            None => Ok(()),
            Some((x, y)) => Err(Error::NotLipschitz {
                x: self.src.point_label(x).to_string(),
                y: self.src.point_label(y).to_string(),
                src: self.src.d(x, y).to_literal(),
                dst: self.dst.d(self.assign[x], self.assign[y]).to_literal(),
            }),
        }
    }

    /// Whether `d(f x, f y) = d(x, y)` for all pairs.
    pub fn is_isometric(&self) -> bool {
        let n = self.src.len();
        (0..n).all(|x| {
            (0..n).all(|y| {
                self.dst
                    .d(self.assign[x], self.assign[y])
                    .approx_eq(self.src.d(x, y))
            })
        })
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &Self) -> Result<Self> {
        if !same_metric(&self.dst, &then.src) {
            return Err(Error::DomainMismatch(
                "target of the first map is not the source of the second".into(),
            ));
        }
        Ok(Self {
            src: self.src.clone(),
            dst: then.dst.clone(),
            assign: self.assign.iter().map(|&b| then.assign[b]).collect(),
        })
    }

    /// Same assignment between the scaled spaces.
    pub fn rescaled(&self, src: MetricRef<S>, dst: MetricRef<S>) -> Result<Self> {
        Self::new(src, dst, self.assign.clone())
    }
}

/// All distances multiplied by `r > 0`.
pub fn scale<S: Scalar>(x: &FinPseudometricSpace<S>, r: &S) -> Result<FinPseudometricSpace<S>> {
    if *r <= S::zero() {
        return Err(Error::NonPositiveBound(r.to_literal()));
    }
    Ok(FinPseudometricSpace {
        points: x.points.clone(),
        dist: x
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d.scaled(r)).collect())
            .collect(),
    })
}

/// Metric reflection: points at distance zero are identified.
#[derive(Debug, Clone)]
pub struct Reflection<S> {
    pub space: MetricRef<S>,
    pub quotient: LipschitzMap<S>,
}

pub fn reflect<S: Scalar>(x: &MetricRef<S>) -> Reflection<S> {
    let n = x.len();
    let mut class_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if let Some(c) = reps.iter().position(|&r| x.d(r, i).is_zero()) {
            class_of[i] = c;
        } else {
            class_of[i] = reps.len();
            reps.push(i);
        }
    }
    let labels = reps
        .iter()
        .map(|&r| {
            let members: Vec<&str> = (0..n)
                .filter(|&i| class_of[i] == class_of[r])
                .map(|i| x.point_label(i))
                .collect();
            if members.len() == 1 {
                members[0].to_string()
            } else {
                format!("{{{}}}", members.join(","))
            }
        })
        .collect();
    let dist = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| x.d(a, b).clone()).collect())
        .collect();
    let space = FinPseudometricSpace { points: labels, dist }.into_ref();
    let quotient = LipschitzMap {
        src: x.clone(),
        dst: space.clone(),
        assign: class_of,
    };
    Reflection { space, quotient }
}

/// Completion of a finite space, which is already complete.
pub fn complete<S: Scalar>(x: &MetricRef<S>) -> MetricRef<S> {
    x.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    fn fin(n: i64) -> Distance<Q> {
        Distance::Finite(q(n))
    }

    fn two_point(gap: i64) -> MetricRef<Q> {
        FinPseudometricSpace::new(vec!["a", "b"], vec![vec![fin(0), fin(gap)], vec![fin(gap), fin(0)]])
            .unwrap()
            .into_ref()
    }

    #[test]
    fn distance_arithmetic() {
        assert_eq!(fin(1) + fin(2), fin(3));
        assert_eq!(fin(1) + Distance::Infinite, Distance::Infinite);
        assert!(fin(100) < Distance::Infinite);
        assert_eq!(fin(3).max(Distance::Infinite), Distance::Infinite);
        assert_eq!(Distance::Infinite.min(fin(3)), fin(3));
        assert_eq!(Distance::<Q>::parse("inf"), Some(Distance::Infinite));
        assert_eq!(Distance::<Q>::parse("3/2").unwrap().to_literal(), "3/2");
    }

    #[test]
    fn axioms_are_enforced() {
        let bad_triangle = FinPseudometricSpace::new(
            vec!["a", "b", "c"],
            vec![
                vec![fin(0), fin(1), fin(5)],
                vec![fin(1), fin(0), fin(1)],
                vec![fin(5), fin(1), fin(0)],
            ],
        );
        assert!(matches!(bad_triangle, Err(Error::NotPseudometric(_))));
        let asym = FinPseudometricSpace::new(vec!["a", "b"], vec![vec![fin(0), fin(1)], vec![fin(2), fin(0)]]);
        assert!(matches!(asym, Err(Error::NotPseudometric(_))));
        let diag = FinPseudometricSpace::new(vec!["a"], vec![vec![fin(1)]]);
        assert!(matches!(diag, Err(Error::NotPseudometric(_))));
        // ∞ between components is fine.
        FinPseudometricSpace::new(
            vec!["a", "b"],
            vec![vec![fin(0), Distance::Infinite], vec![Distance::Infinite, fin(0)]],
        )
        .unwrap();
    }

    #[test]
    fn lipschitz_maps() {
        let (x, y) = (two_point(1), two_point(3));
        let expand = LipschitzMap::new(x.clone(), y.clone(), vec![0, 1]);
        assert!(matches!(expand, Err(Error::NotLipschitz { .. })));
        let contract = LipschitzMap::new(y.clone(), x.clone(), vec![0, 1]).unwrap();
        assert!(!contract.is_isometric());
        let collapse = LipschitzMap::constant(x.clone(), y, 1).unwrap();
        let id = LipschitzMap::identity(x.clone());
        assert_eq!(id.compose(&collapse).unwrap(), collapse);
        assert!(collapse.compose(&collapse).is_err());
    }

    #[test]
    fn scaling() {
        let x = two_point(1);
        assert_eq!(scale(&x, &q(1)).unwrap(), *x);
        assert_eq!(*scale(&x, &q(3)).unwrap().d(0, 1), fin(3));
        assert!(scale(&x, &q(0)).is_err());
        let inf = FinPseudometricSpace::new(
            vec!["a", "b"],
            vec![vec![fin(0), Distance::Infinite], vec![Distance::Infinite, fin(0)]],
        )
        .unwrap();
        assert_eq!(*scale(&inf, &q(2)).unwrap().d(0, 1), Distance::Infinite);
    }

    #[test]
    fn reflection_collapses_zero_distance() {
        let x = FinPseudometricSpace::new(
            vec!["a", "b", "c"],
            vec![
                vec![fin(0), fin(0), fin(2)],
                vec![fin(0), fin(0), fin(2)],
                vec![fin(2), fin(2), fin(0)],
            ],
        )
        .unwrap()
        .into_ref();
        let r = reflect(&x);
        assert_eq!(r.space.points(), ["{a,b}", "c"]);
        assert!(r.space.is_separated());
        assert!(r.quotient.check_lipschitz().is_ok());
        let again = reflect(&r.space);
        assert_eq!(*again.space, *r.space);
        assert_eq!(complete(&x), x);
    }
}
