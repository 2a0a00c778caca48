//! Second-moment calculus for a refinement `Ω --f--> A --s--> B` with
//! `g = s ∘ f`: the conditional expectations of `X` along `f` and `g`,
//! pulled back to `Ω`, satisfy a family of exact identities.

use std::fmt;

use crate::error::{Error, Result};
use crate::finprob::{same_space, MeasurePreservingMap};
use crate::finrv::FiniteRandomVariable;
use crate::scalar::{self, Scalar};

/// `X` on `Ω` with a fine quotient `f: Ω → A` and a coarsening `s: A → B`.
#[derive(Debug, Clone)]
pub struct RefinementTriple<S> {
    pub x: FiniteRandomVariable<S>,
    pub fine: MeasurePreservingMap<S>,
    pub coarsen: MeasurePreservingMap<S>,
}

impl<S: Scalar> RefinementTriple<S> {
    pub fn new(
        x: FiniteRandomVariable<S>,
        fine: MeasurePreservingMap<S>,
        coarsen: MeasurePreservingMap<S>,
    ) -> Result<Self> {
        if !same_space(x.space(), fine.src()) || !same_space(fine.dst(), coarsen.src()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { x, fine, coarsen })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MomentItem {
    /// `s_g s_f = Σ_b q_g(b) Σ_{a ∈ s⁻¹b} q_f(a) 1_{f⁻¹a}` pointwise.
    ProductExpansion,
    /// `E[s_f s_g] = Σ_b q_g(b)² q_b`.
    CrossMoment,
    /// `s_g² = Σ_b q_g(b)² 1_{g⁻¹b}` and `s_f² = Σ_a q_f(a)² 1_{f⁻¹a}`.
    PointwiseSquares,
    /// `E[s_g²] = Σ_b q_g(b)² q_b` and `E[s_f²] = Σ_a q_f(a)² p_a`.
    SecondMoments,
    /// `E[s_g²] ≤ E[s_f²]`.
    Monotonicity,
    /// `E[s_f²] − E[s_g²] = E[(s_f − s_g)²]`.
    GapIdentity,
}

impl MomentItem {
    pub const ALL: [MomentItem; 6] = [
        MomentItem::ProductExpansion,
        MomentItem::CrossMoment,
        MomentItem::PointwiseSquares,
        MomentItem::SecondMoments,
        MomentItem::Monotonicity,
        MomentItem::GapIdentity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MomentItem::ProductExpansion => "product-expansion",
            MomentItem::CrossMoment => "cross-moment",
            MomentItem::PointwiseSquares => "pointwise-squares",
            MomentItem::SecondMoments => "second-moments",
            MomentItem::Monotonicity => "monotonicity",
            MomentItem::GapIdentity => "gap-identity",
        }
    }
}

impl fmt::Display for MomentItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One checked (in)equality. Pointwise items report the expectations of both
/// sides in `lhs`/`rhs` and hold when the sides agree on every charged atom.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck<S> {
    pub item: MomentItem,
    pub part: Option<&'static str>,
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

fn pointwise<S: Scalar>(
    item: MomentItem,
    part: Option<&'static str>,
    lhs: &FiniteRandomVariable<S>,
    rhs: &[S],
) -> MomentCheck<S> {
    let space = lhs.space();
    let holds = (0..space.len())
        .filter(|&w| space.is_charged(w))
        .all(|w| lhs.value(w).approx_eq(&rhs[w]));
    let rhs_mean = scalar::sum(
        rhs.iter()
            .zip(space.weights())
            .map(|(v, p)| v.clone() * p.clone()),
    );
    MomentCheck {
        item,
        part,
        lhs: lhs.expectation(),
        rhs: rhs_mean,
        holds,
    }
}

fn equality<S: Scalar>(item: MomentItem, part: Option<&'static str>, lhs: S, rhs: S) -> MomentCheck<S> {
    let holds = lhs.approx_eq(&rhs);
    MomentCheck {
        item,
        part,
        lhs,
        rhs,
        holds,
    }
}

fn product<S: Scalar>(x: &FiniteRandomVariable<S>, y: &FiniteRandomVariable<S>) -> FiniteRandomVariable<S> {
    let values = x
        .values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| a.clone() * b.clone())
        .collect();
    FiniteRandomVariable::canonical(x.space().clone(), values)
}

/// Evaluates all six items on a refinement triple.
pub fn moment_identities<S: Scalar>(t: &RefinementTriple<S>) -> Result<Vec<MomentCheck<S>>> {
    let (f, s) = (&t.fine, &t.coarsen);
    let g = f.compose(s)?;
    let (a_space, b_space) = (f.dst(), s.dst());
    let q_f = t.x.cond_exp(f)?;
    let q_g = t.x.cond_exp(&g)?;
    let s_f = q_f.pull_back(f)?;
    let s_g = q_g.pull_back(&g)?;
    let omega = t.x.space().len();

    // Σ_b q_g(b) Σ_{a ∈ s⁻¹b} q_f(a) 1_{f⁻¹a}, assembled fiber by fiber.
    let mut expansion = vec![S::zero(); omega];
    for b in 0..b_space.len() {
        for a in s.fiber(b) {
            for w in f.fiber(a) {
                expansion[w] = expansion[w].clone() + q_g.value(b).clone() * q_f.value(a).clone();
            }
        }
    }
    let coarse_sq: Vec<S> = (0..omega)
        .map(|w| {
            let b = g.image(w);
            q_g.value(b).clone() * q_g.value(b).clone()
        })
        .collect();
    let fine_sq: Vec<S> = (0..omega)
        .map(|w| {
            let a = f.image(w);
            q_f.value(a).clone() * q_f.value(a).clone()
        })
        .collect();
    let coarse_sum = scalar::sum(
        (0..b_space.len()).map(|b| q_g.value(b).clone() * q_g.value(b).clone() * b_space.weight(b).clone()),
    );
    let fine_sum = scalar::sum(
        (0..a_space.len()).map(|a| q_f.value(a).clone() * q_f.value(a).clone() * a_space.weight(a).clone()),
    );
    let (e_f2, e_g2) = (s_f.second_moment(), s_g.second_moment());
    let monotone = MomentCheck {
        item: MomentItem::Monotonicity,
        part: None,
        holds: e_g2.approx_le(&e_f2),
        lhs: e_g2.clone(),
        rhs: e_f2.clone(),
    };

    Ok(vec![
        pointwise(MomentItem::ProductExpansion, None, &product(&s_g, &s_f), &expansion),
        equality(
            MomentItem::CrossMoment,
            None,
            product(&s_f, &s_g).expectation(),
            coarse_sum.clone(),
        ),
        pointwise(MomentItem::PointwiseSquares, Some("coarse"), &product(&s_g, &s_g), &coarse_sq),
        pointwise(MomentItem::PointwiseSquares, Some("fine"), &product(&s_f, &s_f), &fine_sq),
        equality(MomentItem::SecondMoments, Some("coarse"), e_g2.clone(), coarse_sum),
        equality(MomentItem::SecondMoments, Some("fine"), e_f2.clone(), fine_sum),
        monotone,
        equality(
            MomentItem::GapIdentity,
            None,
            e_f2 - e_g2,
            s_f.mean_square_distance(&s_g)?,
        ),
    ])
}
