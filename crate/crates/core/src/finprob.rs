//! Finite probability spaces and the measure-preserving maps between them.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Largest codomain for which [`MeasurePreservingMap::distance`] enumerates
/// all subsets.
pub const MAX_DISTANCE_CODOMAIN: usize = 20;

/// A finite set of labelled atoms carrying probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbSpace<S> {
    atoms: Vec<String>,
    weights: Vec<S>,
}

/// Shared handle to a space. Measures, random variables and maps all point
/// at their space through one of these.
pub type SpaceRef<S> = Arc<FiniteProbSpace<S>>;

/// True when two handles denote the same space (pointer or structural equality).
pub fn same_space<S: Scalar>(a: &SpaceRef<S>, b: &SpaceRef<S>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<S: Scalar> FiniteProbSpace<S> {
    /// Validates and builds a space. Atom order is preserved.
    pub fn new<L: Into<String>>(atoms: Vec<L>, weights: Vec<S>) -> Result<Self> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: atoms.len(),
                actual: weights.len(),
            });
        }
        let mut seen = HashMap::with_capacity(atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            if seen.insert(a.as_str(), i).is_some() {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        for (a, w) in atoms.iter().zip(&weights) {
            if *w < S::zero() {
                return Err(Error::NegativeWeight {
                    atom: a.clone(),
                    value: w.to_literal(),
                });
            }
        }
        let total = scalar::sum(weights.iter().cloned());
        if !total.approx_eq(&S::one()) {
            return Err(Error::WeightSumMismatch {
                sum: total.to_literal(),
            });
        }
        Ok(Self { atoms, weights })
    }

    /// Uniform space on atoms `"0"`, ..., `"n-1"`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform space needs at least one atom");
        Self {
            atoms: (0..n).map(|i| i.to_string()).collect(),
            weights: vec![S::from_ratio(1, n as u64); n],
        }
    }

    /// Space on atoms `"0"`, ..., `"n-1"` with the given weights.
    pub fn indexed(weights: Vec<S>) -> Result<Self> {
        let atoms: Vec<String> = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(atoms, weights)
    }

    pub fn into_ref(self) -> SpaceRef<S> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    pub fn atom(&self, i: usize) -> &str {
        &self.atoms[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    /// Probability of a set of atoms given by index.
    pub fn mass_of<I: IntoIterator<Item = usize>>(&self, atoms: I) -> S {
        scalar::sum(atoms.into_iter().map(|i| self.weights[i].clone()))
    }

    /// Whether atom `i` carries positive weight.
    pub fn is_charged(&self, i: usize) -> bool {
        self.weights[i] > S::zero()
    }
}

/// An assignment of source atoms to target atoms whose pushforward of the
/// source weights equals the target weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurePreservingMap<S> {
    src: SpaceRef<S>,
    dst: SpaceRef<S>,
    assign: Vec<usize>,
}

impl<S: Scalar> MeasurePreservingMap<S> {
    /// Builds a map from a table of target indices, one per source atom.
    pub fn new(src: SpaceRef<S>, dst: SpaceRef<S>, assign: Vec<usize>) -> Result<Self> {
        let map = Self::new_unchecked(src, dst, assign)?;
        map.check_measure_preserving()?;
        Ok(map)
    }

    /// Builds a map from `(source label, target label)` pairs.
    pub fn from_labels<'a, I>(src: SpaceRef<S>, dst: SpaceRef<S>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut assign = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            let i = src
                .index_of(a)
                .ok_or_else(|| Error::UnknownAtom(a.to_string()))?;
            let j = dst
                .index_of(b)
                .ok_or_else(|| Error::UnknownAtom(b.to_string()))?;
            assign[i] = j;
        }
        if let Some(i) = assign.iter().position(|&j| j == usize::MAX) {
            return Err(Error::PartialAssignment(src.atom(i).to_string()));
        }
        Self::new(src, dst, assign)
    }

    /// Builds a map with shape checks only; the pushforward condition is not
    /// verified. Used to represent deliberately corrupted diagrams.
    pub fn new_unchecked(src: SpaceRef<S>, dst: SpaceRef<S>, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != src.len() {
            return Err(Error::LengthMismatch {
                expected: src.len(),
                actual: assign.len(),
            });
        }
        if let Some(&j) = assign.iter().find(|&&j| j >= dst.len()) {
            return Err(Error::UnknownAtom(format!("#{j}")));
        }
        Ok(Self { src, dst, assign })
    }

    pub fn identity(space: SpaceRef<S>) -> Self {
        let assign = (0..space.len()).collect();
        Self {
            src: space.clone(),
            dst: space,
            assign,
        }
    }

    pub fn src(&self) -> &SpaceRef<S> {
        &self.src
    }

    pub fn dst(&self) -> &SpaceRef<S> {
        &self.dst
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn image(&self, a: usize) -> usize {
        self.assign[a]
    }

    /// Source weights summed over each fiber.
    pub fn pushed_weights(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.dst.len()];
        for (a, &b) in self.assign.iter().enumerate() {
            out[b] = out[b].clone() + self.src.weight(a).clone();
        }
        out
    }

    /// Checks the pushforward condition, reporting the first failing target atom.
    pub fn check_measure_preserving(&self) -> Result<()> {
        for (b, pushed) in self.pushed_weights().into_iter().enumerate() {
            let expected = self.dst.weight(b);
            if !pushed.approx_eq(expected) {
                return Err(Error::NotMeasurePreserving {
                    atom: self.dst.atom(b).to_string(),
                    pushed: pushed.to_literal(),
                    expected: expected.to_literal(),
                });
            }
        }
        Ok(())
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &Self) -> Result<Self> {
        if !same_space(&self.dst, &then.src) {
            return Err(Error::DomainMismatch(
                "codomain of the first map is not the domain of the second".into(),
            ));
        }
        let assign = self.assign.iter().map(|&b| then.assign[b]).collect();
        let out = Self {
            src: self.src.clone(),
            dst: then.dst.clone(),
            assign,
        };
        debug_assert!(out.check_measure_preserving().is_ok());
        Ok(out)
    }

    fn check_parallel(&self, other: &Self) -> Result<()> {
        if same_space(&self.src, &other.src) && same_space(&self.dst, &other.dst) {
            Ok(())
        } else {
            Err(Error::DomainMismatch("maps are not parallel".into()))
        }
    }

    /// Probability of the set where the two maps disagree.
    pub fn disagreement_mass(&self, other: &Self) -> Result<S> {
        self.check_parallel(other)?;
        Ok(self.src.mass_of(
            (0..self.src.len()).filter(|&a| self.assign[a] != other.assign[a]),
        ))
    }

    /// Almost-sure equality.
    pub fn as_equal(&self, other: &Self) -> Result<bool> {
        Ok(self.disagreement_mass(other)?.approx_zero())
    }

    /// `sup_A P(self⁻¹(A) △ other⁻¹(A))` over all subsets `A` of the codomain.
    pub fn distance(&self, other: &Self) -> Result<S> {
        self.check_parallel(other)?;
        let k = self.dst.len();
        if k > MAX_DISTANCE_CODOMAIN {
            return Err(Error::CodomainTooLarge {
                size: k,
                cap: MAX_DISTANCE_CODOMAIN,
            });
        }
        // Only atoms where the maps differ can land in a symmetric difference.
        let differing: Vec<(usize, usize, S)> = (0..self.src.len())
            .filter(|&a| self.assign[a] != other.assign[a])
            .map(|a| (self.assign[a], other.assign[a], self.src.weight(a).clone()))
            .collect();
        if differing.is_empty() {
            return Ok(S::zero());
        }
        let mut best = S::zero();
        for mask in 0u32..(1u32 << k) {
            let mass = scalar::sum(differing.iter().filter_map(|(x, y, w)| {
                let inside_x = mask >> x & 1 == 1;
                let inside_y = mask >> y & 1 == 1;
                (inside_x != inside_y).then(|| w.clone())
            }));
            if mass > best {
                best = mass;
            }
        }
        Ok(best)
    }

    /// [`Self::distance`] multiplied by the hom-object scale factor `r`.
    pub fn distance_scaled(&self, other: &Self, r: &S) -> Result<S> {
        if *r <= S::zero() {
            return Err(Error::NonPositiveBound(r.to_literal()));
        }
        Ok(self.distance(other)? * r.clone())
    }

    /// Source atoms mapped to `b`.
    pub fn fiber(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.assign
            .iter()
            .enumerate()
            .filter(move |(_, &x)| x == b)
            .map(|(a, _)| a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    fn u(n: usize) -> SpaceRef<Q> {
        FiniteProbSpace::uniform(n).into_ref()
    }

    fn map(src: &SpaceRef<Q>, dst: &SpaceRef<Q>, assign: &[usize]) -> MeasurePreservingMap<Q> {
        MeasurePreservingMap::new(src.clone(), dst.clone(), assign.to_vec()).unwrap()
    }

    #[test]
    fn make_space_examples() {
        let s = FiniteProbSpace::new(vec!["a", "b"], vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(s.atoms(), ["a", "b"]);
        let s = FiniteProbSpace::new(vec!["a", "b"], vec![q(1, 4), q(3, 4)]).unwrap();
        assert_eq!(s.weight(1), &q(3, 4));
        assert!(matches!(
            FiniteProbSpace::new(vec!["a", "b"], vec![q(1, 4), q(1, 4)]),
            Err(Error::WeightSumMismatch { .. })
        ));
        assert!(matches!(
            FiniteProbSpace::new(vec!["a", "b"], vec![q(-1, 4), q(5, 4)]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            FiniteProbSpace::new(vec!["a", "a"], vec![q(1, 2), q(1, 2)]),
            Err(Error::DuplicateAtom(_))
        ));
    }

    #[test]
    fn float_space_uses_tolerance() {
        let w = vec![0.1f64, 0.2, 0.7];
        assert!(FiniteProbSpace::indexed(w).is_ok());
        assert!(FiniteProbSpace::indexed(vec![0.1f64, 0.2, 0.6]).is_err());
    }

    #[test]
    fn make_map_examples() {
        let (u4, u2) = (u(4), u(2));
        map(&u4, &u2, &[0, 0, 1, 1]);
        MeasurePreservingMap::identity(u4.clone());
        let skew = FiniteProbSpace::indexed(vec![q(1, 4), q(3, 4)]).unwrap().into_ref();
        map(&u4, &skew, &[0, 1, 1, 1]);
        let err = MeasurePreservingMap::new(u4.clone(), skew.clone(), vec![0, 0, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::NotMeasurePreserving { ref atom, .. } if atom == "0"));
    }

    #[test]
    fn from_labels_requires_total_assignment() {
        let (u4, u2) = (u(4), u(2));
        let m = MeasurePreservingMap::from_labels(
            u4.clone(),
            u2.clone(),
            [("0", "0"), ("1", "0"), ("2", "1"), ("3", "1")],
        )
        .unwrap();
        assert_eq!(m.assign(), [0, 0, 1, 1]);
        let err = MeasurePreservingMap::from_labels(u4, u2, [("0", "0")]).unwrap_err();
        assert!(matches!(err, Error::PartialAssignment(_)));
    }

    #[test]
    fn compose_examples() {
        let (u4, u2) = (u(4), u(2));
        let pairing = map(&u4, &u2, &[0, 0, 1, 1]);
        let id2 = MeasurePreservingMap::identity(u2.clone());
        assert_eq!(pairing.compose(&id2).unwrap(), pairing);
        let swap = map(&u2, &u2, &[1, 0]);
        assert_eq!(pairing.compose(&swap).unwrap().assign(), [1, 1, 0, 0]);
        assert!(matches!(
            pairing.compose(&pairing),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn as_equal_examples() {
        let (u4, u2) = (u(4), u(2));
        let pairing = map(&u4, &u2, &[0, 0, 1, 1]);
        assert!(pairing.as_equal(&pairing).unwrap());
        let swapped = map(&u4, &u2, &[1, 1, 0, 0]);
        assert!(!swapped.as_equal(&pairing).unwrap());
        assert_eq!(swapped.disagreement_mass(&pairing).unwrap(), q(1, 1));

        let null = FiniteProbSpace::indexed(vec![q(1, 2), q(1, 2), q(0, 1)]).unwrap().into_ref();
        let a = map(&null, &u2, &[0, 1, 0]);
        let b = map(&null, &u2, &[0, 1, 1]);
        assert!(a.as_equal(&b).unwrap());
    }

    #[test]
    fn distance_examples() {
        let (u4, u2) = (u(4), u(2));
        let f = map(&u4, &u2, &[0, 1, 0, 1]);
        let g = map(&u4, &u2, &[0, 0, 1, 1]);
        assert_eq!(f.distance(&f).unwrap(), q(0, 1));
        assert_eq!(f.distance(&g).unwrap(), q(1, 2));
        assert_eq!(f.distance_scaled(&g, &q(3, 1)).unwrap(), q(3, 2));
        assert!(f.distance(&g).unwrap() <= f.disagreement_mass(&g).unwrap());
    }

    #[test]
    fn distance_codomain_guard() {
        let big = u(21);
        let id = MeasurePreservingMap::identity(big);
        assert!(matches!(
            id.distance(&id),
            Err(Error::CodomainTooLarge { size: 21, .. })
        ));
    }
}
