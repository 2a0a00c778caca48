//! Nonnegative random variables on finite spaces: the L¹ metric, moments,
//! conditional expectation along a measure-preserving map, truncation.

use crate::error::{Error, Result};
use crate::finprob::{same_space, MeasurePreservingMap, SpaceRef};
use crate::scalar::{self, Scalar};

/// A `[0, ∞)`-valued function on the atoms of a finite space, stored in
/// canonical form: the value is zero on every zero-weight atom, so equality
/// of values coincides with almost-sure equality.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRandomVariable<S> {
    space: SpaceRef<S>,
    values: Vec<S>,
}

impl<S: Scalar> FiniteRandomVariable<S> {
    /// Validates nonnegativity and canonicalizes null atoms to zero.
    pub fn new(space: SpaceRef<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| *v < S::zero()) {
            return Err(Error::NegativeValue {
                atom: space.atom(i).to_string(),
                value: values[i].to_literal(),
            });
        }
        Ok(Self::canonical(space, values))
    }

    pub(crate) fn canonical(space: SpaceRef<S>, mut values: Vec<S>) -> Self {
        for (i, v) in values.iter_mut().enumerate() {
            if !space.is_charged(i) {
                *v = S::zero();
            }
        }
        Self { space, values }
    }

    pub fn constant(space: SpaceRef<S>, c: S) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![c; n])
    }

    pub fn space(&self) -> &SpaceRef<S> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &S {
        &self.values[i]
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    /// Largest value; the least `r` with `self ≤ r` almost surely.
    pub fn sup(&self) -> S {
        scalar::max_or_zero(self.values.iter().cloned())
    }

    /// True when `self ≤ r` on every positive-weight atom.
    pub fn is_bounded_by(&self, r: &S) -> bool {
        self.values.iter().all(|v| v.approx_le(r))
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `Σ_a p_a |f_a − g_a|`.
    pub fn l1_distance(&self, other: &Self) -> Result<S> {
        self.check_same_space(other)?;
        Ok(scalar::sum(
            self.space
                .weights()
                .iter()
                .zip(self.values.iter().zip(&other.values))
                .map(|(p, (f, g))| p.clone() * (f.clone() - g.clone()).abs()),
        ))
    }

    pub fn expectation(&self) -> S {
        scalar::sum(
            self.space
                .weights()
                .iter()
                .zip(&self.values)
                .map(|(p, f)| p.clone() * f.clone()),
        )
    }

    pub fn second_moment(&self) -> S {
        scalar::sum(
            self.space
                .weights()
                .iter()
                .zip(&self.values)
                .map(|(p, f)| p.clone() * f.clone() * f.clone()),
        )
    }

    /// `E[(f − g)²]`, computed without materializing the signed difference.
    pub fn mean_square_distance(&self, other: &Self) -> Result<S> {
        self.check_same_space(other)?;
        Ok(scalar::sum(
            self.space
                .weights()
                .iter()
                .zip(self.values.iter().zip(&other.values))
                .map(|(p, (f, g))| {
                    let d = f.clone() - g.clone();
                    p.clone() * d.clone() * d
                }),
        ))
    }

    /// Conditional expectation along `s`:
    /// `result_b = (1/q_b) Σ_{s(a)=b} p_a g_a`, and `0` where `q_b = 0`.
    pub fn cond_exp(&self, s: &MeasurePreservingMap<S>) -> Result<Self> {
        if !same_space(&self.space, s.src()) {
            return Err(Error::SpaceMismatch);
        }
        let dst = s.dst();
        let mut acc = vec![S::zero(); dst.len()];
        for (a, &b) in s.assign().iter().enumerate() {
            acc[b] = acc[b].clone() + self.space.weight(a).clone() * self.values[a].clone();
        }
        let values = acc
            .into_iter()
            .enumerate()
            .map(|(b, m)| {
                let q = dst.weight(b);
                if *q > S::zero() {
                    m / q.clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        Ok(Self::canonical(dst.clone(), values))
    }

    /// `self ∘ s`, a random variable on the source of `s`.
    pub fn pull_back(&self, s: &MeasurePreservingMap<S>) -> Result<Self> {
        if !same_space(&self.space, s.dst()) {
            return Err(Error::SpaceMismatch);
        }
        let values = s.assign().iter().map(|&b| self.values[b].clone()).collect();
        Ok(Self::canonical(s.src().clone(), values))
    }

    /// Pointwise `min(f, n)`.
    pub fn truncate(&self, n: &S) -> Result<Self> {
        if *n <= S::zero() {
            return Err(Error::NonPositiveBound(n.to_literal()));
        }
        let values = self
            .values
            .iter()
            .map(|v| S::min_of(v.clone(), n.clone()))
            .collect();
        Ok(Self {
            space: self.space.clone(),
            values,
        })
    }

    /// `Σ_{a ∈ s⁻¹(B)} p_a g_a − Σ_{b ∈ B} q_b E[g|s]_b` for the target subset
    /// encoded by `mask`; zero for every mask when `cond` is the conditional
    /// expectation of `self` along `s`.
    pub fn subset_residual(&self, cond: &Self, s: &MeasurePreservingMap<S>, mask: u64) -> S {
        let inside = |b: usize| mask >> b & 1 == 1;
        let lhs = scalar::sum(
            s.assign()
                .iter()
                .enumerate()
                .filter(|(_, &b)| inside(b))
                .map(|(a, _)| self.space.weight(a).clone() * self.values[a].clone()),
        );
        let rhs = scalar::sum(
            (0..cond.space.len())
                .filter(|&b| inside(b))
                .map(|b| cond.space.weight(b).clone() * cond.values[b].clone()),
        );
        lhs - rhs
    }
}
