//! Finite measures absolutely continuous with respect to a finite
//! probability space, and the density correspondence with random variables.

use crate::error::{Error, Result};
use crate::finprob::{same_space, MeasurePreservingMap, SpaceRef};
use crate::finrv::FiniteRandomVariable;
use crate::scalar::{self, Scalar};

/// Nonnegative masses on the atoms of a space, vanishing on null atoms.
/// Total mass is unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure<S> {
    space: SpaceRef<S>,
    mass: Vec<S>,
}

impl<S: Scalar> FiniteMeasure<S> {
    pub fn new(space: SpaceRef<S>, mass: Vec<S>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: mass.len(),
            });
        }
        for (i, m) in mass.iter().enumerate() {
            if *m < S::zero() {
                return Err(Error::NegativeWeight {
                    atom: space.atom(i).to_string(),
                    value: m.to_literal(),
                });
            }
            if !space.is_charged(i) && !m.approx_zero() {
                return Err(Error::NotAbsolutelyContinuous {
                    atom: space.atom(i).to_string(),
                    mass: m.to_literal(),
                });
            }
        }
        Ok(Self { space, mass })
    }

    /// The base probability measure itself.
    pub fn base(space: SpaceRef<S>) -> Self {
        let mass = space.weights().to_vec();
        Self { space, mass }
    }

    pub fn zero(space: SpaceRef<S>) -> Self {
        let mass = vec![S::zero(); space.len()];
        Self { space, mass }
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    pub fn total(&self) -> S {
        scalar::sum(self.mass.iter().cloned())
    }

    /// Mass of a set of atoms given by index.
    pub fn measure_of<I: IntoIterator<Item = usize>>(&self, atoms: I) -> S {
        scalar::sum(atoms.into_iter().map(|i| self.mass[i].clone()))
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Total variation distance; on a finite space the partition into atoms
    /// attains the supremum, so this is `Σ_a |μ_a − ν_a|`.
    pub fn tv_distance(&self, other: &Self) -> Result<S> {
        self.check_same_space(other)?;
        Ok(scalar::sum(
            self.mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| (a.clone() - b.clone()).abs()),
        ))
    }

    /// Image measure `μ ∘ s⁻¹`.
    pub fn pushforward(&self, s: &MeasurePreservingMap<S>) -> Result<Self> {
        if !same_space(&self.space, s.src()) {
            return Err(Error::SpaceMismatch);
        }
        let mut mass = vec![S::zero(); s.dst().len()];
        for (a, &b) in s.assign().iter().enumerate() {
            mass[b] = mass[b].clone() + self.mass[a].clone();
        }
        Ok(Self {
            space: s.dst().clone(),
            mass,
        })
    }

    /// Whether `μ ≤ r·P`; checking atoms suffices on a finite space.
    pub fn bound_check(&self, r: &S) -> bool {
        self.mass
            .iter()
            .zip(self.space.weights())
            .all(|(m, p)| m.approx_le(&(r.clone() * p.clone())))
    }

    /// `μ ∧ nP`, atomwise `min(μ_a, n·p_a)`.
    pub fn truncate(&self, n: &S) -> Result<Self> {
        if *n <= S::zero() {
            return Err(Error::NonPositiveBound(n.to_literal()));
        }
        let mass = self
            .mass
            .iter()
            .zip(self.space.weights())
            .map(|(m, p)| S::min_of(m.clone(), n.clone() * p.clone()))
            .collect();
        Ok(Self {
            space: self.space.clone(),
            mass,
        })
    }

    /// Measure with density `g`: `mass_a = g_a · p_a`.
    pub fn rho(g: &FiniteRandomVariable<S>) -> Self {
        let space = g.space().clone();
        let mass = g
            .values()
            .iter()
            .zip(space.weights())
            .map(|(v, p)| v.clone() * p.clone())
            .collect();
        Self { space, mass }
    }

    /// Density `dμ/dP`, zero on null atoms.
    pub fn rn_derivative(&self) -> FiniteRandomVariable<S> {
        let values = self
            .mass
            .iter()
            .zip(self.space.weights())
            .map(|(m, p)| {
                if *p > S::zero() {
                    m.clone() / p.clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        FiniteRandomVariable::canonical(self.space.clone(), values)
    }
}

/// Measure with density `g`.
pub fn rho<S: Scalar>(g: &FiniteRandomVariable<S>) -> FiniteMeasure<S> {
    FiniteMeasure::rho(g)
}

/// Radon-Nikodym derivative of `mu` with respect to its base space.
pub fn rn_derivative<S: Scalar>(mu: &FiniteMeasure<S>) -> FiniteRandomVariable<S> {
    mu.rn_derivative()
}
