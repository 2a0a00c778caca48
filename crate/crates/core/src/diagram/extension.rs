use std::sync::Arc;

use super::{DiagramRef, Martingale};
use crate::error::{Error, Result};
use crate::finmeas::FiniteMeasure;
use crate::finprob::same_space;

use crate::scalar::Scalar;

/// Measures `μ_i` on the index spaces, compatible under the connecting maps
/// and all bounded by `bound · P_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentMeasureFamily<S> {
    diagram: DiagramRef<S>,
    family: Vec<FiniteMeasure<S>>,
    bound: S,
}

impl<S: Scalar> ConsistentMeasureFamily<S> {
    pub fn new(diagram: DiagramRef<S>, family: Vec<FiniteMeasure<S>>, bound: S) -> Result<Self> {
        if bound <= S::zero() {
            return Err(Error::NonPositiveBound(bound.to_literal()));
        }
        if family.len() != diagram.len() {
            return Err(Error::IndexMismatch(format!(
                "family has {} members, diagram has {} indices",
                family.len(),
                diagram.len()
            )));
        }
        for (i, mu) in family.iter().enumerate() {
            if !same_space(mu.space(), diagram.space(i)) {
                return Err(Error::IndexMismatch(format!(
                    "measure {} does not live on the space of index {}",
                    i,
                    diagram.label(i)
                )));
            }
            if !mu.bound_check(&bound) {
                return Err(Error::BoundViolation {
                    atom: diagram.label(i).to_string(),
                    value: mu.total().to_literal(),
                    bound: bound.to_literal(),
                });
            }
        }
        for (i, j) in diagram.covering_pairs() {
            let pushed = family[j].pushforward(diagram.connect(i, j).expect("comparable pair"))?;
            let residual = pushed.tv_distance(&family[i])?;
            if !residual.approx_zero() {
                return Err(Error::Inconsistent {
                    residual: residual.to_literal(),
                });
            }
        }
        Ok(Self {
            diagram,
            family,
            bound,
        })
    }

    /// The family of restrictions `μ|_i = μ ∘ proj_i⁻¹` of a measure on the top.
    pub fn restrictions(mu: &FiniteMeasure<S>, diagram: &DiagramRef<S>, bound: S) -> Result<Self> {
        let top = diagram.require_top()?;
        if !same_space(mu.space(), top.space()) {
            return Err(Error::SpaceMismatch);
        }
        let family = (0..diagram.len())
            .map(|i| mu.pushforward(top.proj(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Arc::clone(diagram), family, bound)
    }

    pub fn diagram(&self) -> &DiagramRef<S> {
        &self.diagram
    }

    pub fn family(&self) -> &[FiniteMeasure<S>] {
        &self.family
    }

    pub fn member(&self, i: usize) -> &FiniteMeasure<S> {
        &self.family[i]
    }

    pub fn bound(&self) -> &S {
        &self.bound
    }
}

/// The unique measure on the top space restricting to every `μ_i`.
pub fn kolmogorov_extend<S: Scalar>(fam: &ConsistentMeasureFamily<S>) -> Result<FiniteMeasure<S>> {
    let d = &fam.diagram;
    let top = d.require_top()?;
    if let Some((a, b)) = d.unseparated_top_atoms() {
        return Err(Error::GenerationFailure(
            top.space().atom(a).to_string(),
            top.space().atom(b).to_string(),
        ));
    }
    let finest = d
        .finest()
        .ok_or_else(|| Error::InvalidDiagram("no greatest index".into()))?;
    let proj = top.proj(finest);
    let fine = &fam.family[finest];
    // The projection onto the greatest index separates top atoms, so each
    // top atom owns its image's mass outright.
    let mass = (0..top.space().len())
        .map(|a| fine.mass()[proj.image(a)].clone())
        .collect();
    let mu = FiniteMeasure::new(top.space().clone(), mass)?;
    for i in 0..d.len() {
        let residual = mu.pushforward(top.proj(i))?.tv_distance(&fam.family[i])?;
        if !residual.approx_zero() {
            return Err(Error::Inconsistent {
                residual: residual.to_literal(),
            });
        }
    }
    debug_assert!(mu.bound_check(&fam.bound));
    Ok(mu)
}

/// The martingale of Radon-Nikodym derivatives `dμ_i/dP_i`.
pub fn rn_family<S: Scalar>(fam: &ConsistentMeasureFamily<S>) -> Result<Martingale<S>> {
    let family = fam.family.iter().map(FiniteMeasure::rn_derivative).collect();
    Martingale::new(Arc::clone(&fam.diagram), family, fam.bound.clone())
}
