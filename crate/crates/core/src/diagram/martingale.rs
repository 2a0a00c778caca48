use std::sync::Arc;

use super::{DiagramRef, FiltrationDiagram};
use crate::error::{Error, Result};
use crate::finprob::same_space;
use crate::finrv::FiniteRandomVariable;
use crate::scalar::{self, Scalar};

/// A family `X_i` over a filtration diagram with `E[X_j | connect(i ≤ j)] = X_i`
/// and `X_i ≤ bound` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Martingale<S> {
    diagram: DiagramRef<S>,
    family: Vec<FiniteRandomVariable<S>>,
    bound: S,
    limit_second_moment: Option<S>,
}

/// Result of [`is_martingale`].
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleCheck<S> {
    pub holds: bool,
    /// Largest `l1_distance(E[X_j | connect(i ≤ j)], X_i)` over covering pairs.
    pub residual: S,
    /// Covering pair attaining the residual.
    pub worst_pair: Option<(usize, usize)>,
}

fn check_family<S: Scalar>(
    family: &[FiniteRandomVariable<S>],
    d: &FiltrationDiagram<S>,
) -> Result<()> {
    if family.len() != d.len() {
        return Err(Error::IndexMismatch(format!(
            "family has {} members, diagram has {} indices",
            family.len(),
            d.len()
        )));
    }
    for (i, x) in family.iter().enumerate() {
        if !same_space(x.space(), d.space(i)) {
            return Err(Error::IndexMismatch(format!(
                "member {} does not live on the space of index {}",
                i,
                d.label(i)
            )));
        }
    }
    Ok(())
}

/// Checks the martingale property on covering pairs; the tower property
/// extends it to every comparable pair.
pub fn is_martingale<S: Scalar>(
    family: &[FiniteRandomVariable<S>],
    d: &FiltrationDiagram<S>,
) -> Result<MartingaleCheck<S>> {
    check_family(family, d)?;
    let mut residual = S::zero();
    let mut worst_pair = None;
    for (i, j) in d.covering_pairs() {
        let map = d.connect(i, j).expect("diagram has every comparable pair");
        let r = family[j].cond_exp(map)?.l1_distance(&family[i])?;
        if r > residual {
            residual = r;
            worst_pair = Some((i, j));
        }
    }
    Ok(MartingaleCheck {
        holds: residual.approx_zero(),
        residual,
        worst_pair,
    })
}

impl<S: Scalar> Martingale<S> {
    /// Validates consistency and the bound.
    pub fn new(diagram: DiagramRef<S>, family: Vec<FiniteRandomVariable<S>>, bound: S) -> Result<Self> {
        if bound < S::zero() {
            return Err(Error::NonPositiveBound(bound.to_literal()));
        }
        let check = is_martingale(&family, &diagram)?;
        if !check.holds {
            return Err(Error::Inconsistent {
                residual: check.residual.to_literal(),
            });
        }
        for (i, x) in family.iter().enumerate() {
            if !x.is_bounded_by(&bound) {
                return Err(Error::BoundViolation {
                    atom: format!("{}:{}", diagram.label(i), i),
                    value: x.sup().to_literal(),
                    bound: bound.to_literal(),
                });
            }
        }
        Ok(Self {
            diagram,
            family,
            bound,
            limit_second_moment: None,
        })
    }

    /// Records `E[X²]` of an object beyond the diagram that the family
    /// approximates, such as the ground function of a dyadic experiment.
    /// Cauchy certificates then account for the gap between the finest level
    /// and that object.
    pub fn with_limit_second_moment(mut self, m: S) -> Self {
        self.limit_second_moment = Some(m);
        self
    }

    pub fn diagram(&self) -> &DiagramRef<S> {
        &self.diagram
    }

    pub fn family(&self) -> &[FiniteRandomVariable<S>] {
        &self.family
    }

    pub fn level(&self, i: usize) -> &FiniteRandomVariable<S> {
        &self.family[i]
    }

    pub fn bound(&self) -> &S {
        &self.bound
    }

    pub fn limit_second_moment(&self) -> Option<&S> {
        self.limit_second_moment.as_ref()
    }
}

/// `X_i = E[X | proj_i]` for every index.
pub fn induced_martingale<S: Scalar>(
    x: &FiniteRandomVariable<S>,
    d: &DiagramRef<S>,
) -> Result<Martingale<S>> {
    let top = d.require_top()?;
    if !same_space(x.space(), top.space()) {
        return Err(Error::SpaceMismatch);
    }
    let family = (0..d.len())
        .map(|i| x.cond_exp(top.proj(i)))
        .collect::<Result<Vec<_>>>()?;
    let m = Martingale {
        diagram: Arc::clone(d),
        family,
        bound: x.sup(),
        limit_second_moment: None,
    };
    debug_assert!(is_martingale(&m.family, d).map(|c| c.holds).unwrap_or(false) || !d.validate().is_valid());
    Ok(m)
}

/// `E[X_j²] − E[X_i²]` for `i ≤ j`, cross-checked against the mean-square
/// increment `E[(X_j − X_i ∘ connect(i ≤ j))²]` on `Ω_j`.
pub fn second_moment_gap<S: Scalar>(m: &Martingale<S>, i: usize, j: usize) -> Result<S> {
    let d = &m.diagram;
    if i >= d.len() || j >= d.len() || !d.leq(i, j) {
        return Err(Error::IndexMismatch(format!("{i} ≤ {j} does not hold")));
    }
    let map = d.connect(i, j).expect("comparable pair");
    let gap = m.family[j].second_moment() - m.family[i].second_moment();
    let increment = m.family[j].mean_square_distance(&m.family[i].pull_back(map)?)?;
    if !gap.approx_eq(&increment) {
        return Err(Error::Inconsistent {
            residual: (gap - increment).abs().to_literal(),
        });
    }
    Ok(gap)
}

/// A certified index along a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyCertificate<S> {
    /// Diagram index of the certified level.
    pub index: usize,
    /// Position of that level in the chain, coarsest first.
    pub position: usize,
    pub eps_sq: S,
    /// `(diagram index, remaining gap)` per chain level: the second-moment gap
    /// from that level to the end of the chain, plus the tail beyond it.
    pub remaining_gaps: Vec<(usize, S)>,
    /// Gap between the finest level and the recorded limit, zero if none.
    pub tail_gap: S,
}

/// Least chain position `k` such that every pair of levels at or after `k`
/// has second-moment gap at most `eps²`. Gaps are nonnegative and telescope,
/// so the worst pair from `k` on is `(k, end)`. By `d_L1(X_i, X_j)² ≤ gap(i, j)`
/// this certifies `l1_distance ≤ eps` between those levels.
pub fn cauchy_certificate<S: Scalar>(m: &Martingale<S>, eps: &S) -> Result<CauchyCertificate<S>> {
    if *eps <= S::zero() {
        return Err(Error::NonPositiveBound(eps.to_literal()));
    }
    let order = m.diagram.chain_order()?;
    let eps_sq = eps.clone() * eps.clone();
    let last = *order.last().expect("nonempty diagram");
    let last_sm = m.family[last].second_moment();
    let tail_gap = match &m.limit_second_moment {
        Some(lim) => (lim.clone() - last_sm.clone()).pos_part(),
        None => S::zero(),
    };
    let mut remaining_gaps = Vec::with_capacity(order.len());
    for &i in &order {
        let gap = second_moment_gap(m, i, last)? + tail_gap.clone();
        remaining_gaps.push((i, gap));
    }
    match remaining_gaps.iter().position(|(_, g)| g.approx_le(&eps_sq)) {
        Some(position) => Ok(CauchyCertificate {
            index: order[position],
            position,
            eps_sq,
            remaining_gaps,
            tail_gap,
        }),
        None => Err(Error::NoCertificate {
            tail_gap: tail_gap.to_literal(),
            eps_sq: eps_sq.to_literal(),
        }),
    }
}

/// The unique random variable on the top space inducing `m`.
///
/// Requires the generation condition: the projections jointly separate the
/// top atoms. Then the projection onto the greatest index is injective and
/// the limit is the finest level pulled back to the top.
pub fn martingale_limit<S: Scalar>(m: &Martingale<S>) -> Result<FiniteRandomVariable<S>> {
    let d = &m.diagram;
    let top = d.require_top()?;
    if let Some((a, b)) = d.unseparated_top_atoms() {
        return Err(Error::GenerationFailure(
            top.space().atom(a).to_string(),
            top.space().atom(b).to_string(),
        ));
    }
    let check = is_martingale(&m.family, d)?;
    if !check.holds {
        return Err(Error::Inconsistent {
            residual: check.residual.to_literal(),
        });
    }
    let finest = d
        .finest()
        .ok_or_else(|| Error::InvalidDiagram("no greatest index".into()))?;
    let x = m.family[finest].pull_back(top.proj(finest))?;
    let induced = induced_martingale(&x, d)?;
    let residual = scalar::max_or_zero(
        induced
            .family
            .iter()
            .zip(&m.family)
            .map(|(a, b)| a.l1_distance(b))
            .collect::<Result<Vec<_>>>()?,
    );
    if !residual.approx_zero() {
        return Err(Error::Inconsistent {
            residual: residual.to_literal(),
        });
    }
    Ok(x)
}

/// Level-wise distances between two martingales compared with the distance
/// of their limits.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport<S> {
    pub level_distances: Vec<S>,
    /// `max_i l1_distance(X_i, Y_i)`.
    pub sup: S,
    /// `l1_distance(X, Y)` of the limits.
    pub limit_distance: S,
    /// Allowed shortfall `limit_distance − sup`: how far each limit sits from
    /// its finest-level approximation.
    pub allowance: S,
    pub holds: bool,
}

impl<S: Scalar> IsometryReport<S> {
    pub(crate) fn from_parts(level_distances: Vec<S>, limit_distance: S, allowance: S) -> Self {
        let sup = scalar::max_or_zero(level_distances.iter().cloned());
        let holds = sup.approx_le(&limit_distance)
            && (limit_distance.clone() - sup.clone()).approx_le(&allowance);
        Self {
            level_distances,
            sup,
            limit_distance,
            allowance,
            holds,
        }
    }

    pub fn slack(&self) -> S {
        self.limit_distance.clone() - self.sup.clone()
    }
}

/// Compares `sup_i d(X_i, Y_i)` with `d(X, Y)` for two martingales on the
/// same diagram and random variables `x1`, `x2` on its top inducing them.
pub fn isometry_report<S: Scalar>(
    m1: &Martingale<S>,
    m2: &Martingale<S>,
    x1: &FiniteRandomVariable<S>,
    x2: &FiniteRandomVariable<S>,
) -> Result<IsometryReport<S>> {
    if !(Arc::ptr_eq(&m1.diagram, &m2.diagram) || m1.diagram == m2.diagram) {
        return Err(Error::DiagramMismatch);
    }
    let d = &m1.diagram;
    let top = d.require_top()?;
    for (m, x) in [(m1, x1), (m2, x2)] {
        let induced = induced_martingale(x, d)?;
        if induced.family != m.family
            && induced
                .family
                .iter()
                .zip(&m.family)
                .any(|(a, b)| !a.l1_distance(b).map(|r| r.approx_zero()).unwrap_or(false))
        {
            return Err(Error::Inconsistent {
                residual: "limit does not induce the martingale".into(),
            });
        }
    }
    let level_distances = m1
        .family
        .iter()
        .zip(&m2.family)
        .map(|(a, b)| a.l1_distance(b))
        .collect::<Result<Vec<_>>>()?;
    let limit_distance = x1.l1_distance(x2)?;
    let finest = d
        .finest()
        .ok_or_else(|| Error::InvalidDiagram("no greatest index".into()))?;
    let proj = top.proj(finest);
    let approx_gap = |x: &FiniteRandomVariable<S>| -> Result<S> {
        x.l1_distance(&x.cond_exp(proj)?.pull_back(proj)?)
    };
    let allowance = approx_gap(x1)? + approx_gap(x2)?;
    Ok(IsometryReport::from_parts(
        level_distances,
        limit_distance,
        allowance,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finprob::{FiniteProbSpace, MeasurePreservingMap, SpaceRef};
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: u64) -> Q {
        Q::from_ratio(n, d)
    }

    fn u(n: usize) -> SpaceRef<Q> {
        FiniteProbSpace::uniform(n).into_ref()
    }

    fn halving(n: usize) -> MeasurePreservingMap<Q> {
        MeasurePreservingMap::new(u(2 * n), u(n), (0..2 * n).map(|k| k / 2).collect()).unwrap()
    }

    fn chain_1_2_4() -> DiagramRef<Q> {
        FiltrationDiagram::chain(vec![halving(1), halving(2)])
            .unwrap()
            .into_ref()
    }

    fn rv(space: SpaceRef<Q>, v: &[Q]) -> FiniteRandomVariable<Q> {
        FiniteRandomVariable::new(space, v.to_vec()).unwrap()
    }

    fn x0123() -> FiniteRandomVariable<Q> {
        rv(u(4), &[q(0, 1), q(1, 1), q(2, 1), q(3, 1)])
    }

    #[test]
    fn induced_martingale_examples() {
        let d = chain_1_2_4();
        let m = induced_martingale(&x0123(), &d).unwrap();
        assert_eq!(m.level(0).values(), [q(3, 2)]);
        assert_eq!(m.level(1).values(), [q(1, 2), q(5, 2)]);
        assert_eq!(m.level(2), &x0123());
        let check = is_martingale(m.family(), &d).unwrap();
        assert!(check.holds);
        assert_eq!(check.residual, q(0, 1));

        let c = FiniteRandomVariable::constant(u(4), q(5, 3)).unwrap();
        let m = induced_martingale(&c, &d).unwrap();
        assert!(m.family().iter().all(|x| x.values().iter().all(|v| *v == q(5, 3))));
    }

    #[test]
    fn is_martingale_rejects_bad_families() {
        let d = chain_1_2_4();
        let consts: Vec<_> = [1, 2, 3]
            .iter()
            .map(|&c| FiniteRandomVariable::constant(d.space(c - 1).clone(), q(c as i64, 1)).unwrap())
            .collect();
        assert!(!is_martingale(&consts, &d).unwrap().holds);

        // Bump one atom of the finest level by ε; the residual sees ε times its weight.
        let m = induced_martingale(&x0123(), &d).unwrap();
        let mut family = m.family().to_vec();
        let eps = q(1, 10);
        family[2] = rv(u(4), &[q(0, 1) + eps.clone(), q(1, 1), q(2, 1), q(3, 1)]);
        let check = is_martingale(&family, &d).unwrap();
        assert!(!check.holds);
        assert!(check.residual >= eps * q(1, 4));
        assert_eq!(check.worst_pair, Some((1, 2)));

        assert!(matches!(
            is_martingale(&family[..2], &d),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn second_moment_gap_examples() {
        let d = chain_1_2_4();
        let m = induced_martingale(&x0123(), &d).unwrap();
        assert_eq!(second_moment_gap(&m, 1, 1).unwrap(), q(0, 1));
        assert_eq!(second_moment_gap(&m, 1, 2).unwrap(), q(1, 4));
        let total = second_moment_gap(&m, 0, 2).unwrap();
        assert_eq!(
            total,
            second_moment_gap(&m, 0, 1).unwrap() + second_moment_gap(&m, 1, 2).unwrap()
        );
        assert!(matches!(
            second_moment_gap(&m, 2, 1),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn certificates() {
        let d = chain_1_2_4();
        let c = FiniteRandomVariable::constant(u(4), q(2, 1)).unwrap();
        let m = induced_martingale(&c, &d).unwrap();
        let cert = cauchy_certificate(&m, &q(1, 1000)).unwrap();
        assert_eq!(cert.position, 0);

        let m = induced_martingale(&x0123(), &d).unwrap();
        // Remaining gaps: 5/4 (from the root), 1/4, 0.
        let cert = cauchy_certificate(&m, &q(4, 1)).unwrap();
        assert_eq!(cert.position, 0);
        let cert = cauchy_certificate(&m, &q(1, 2)).unwrap();
        assert_eq!(cert.position, 1);
        assert_eq!(cert.remaining_gaps[0].1, q(5, 4));
        let cert = cauchy_certificate(&m, &q(1, 4)).unwrap();
        assert_eq!(cert.position, 2);

        let m = m.with_limit_second_moment(q(4, 1));
        let err = cauchy_certificate(&m, &q(1, 4)).unwrap_err();
        assert!(matches!(err, Error::NoCertificate { ref tail_gap, .. } if tail_gap == "1/2"));
        assert!(cauchy_certificate(&m, &q(0, 1)).is_err());
    }

    #[test]
    fn limits() {
        let d = chain_1_2_4();
        let m = induced_martingale(&x0123(), &d).unwrap();
        assert_eq!(martingale_limit(&m).unwrap(), x0123());

        let family = vec![
            rv(u(1), &[q(3, 2)]),
            rv(u(2), &[q(1, 2), q(5, 2)]),
            x0123(),
        ];
        let m = Martingale::new(d.clone(), family, q(3, 1)).unwrap();
        assert_eq!(martingale_limit(&m).unwrap(), x0123());

        let c = FiniteRandomVariable::constant(u(4), q(7, 2)).unwrap();
        let m = induced_martingale(&c, &d).unwrap();
        assert_eq!(martingale_limit(&m).unwrap(), c);
    }

    #[test]
    fn limit_requires_generation() {
        // Master with 4 atoms seen only through the pairing to 2 atoms.
        let base = FiltrationDiagram::chain(vec![halving(1)]).unwrap();
        let pairing = halving(2);
        let to_one = pairing.compose(&halving(1)).unwrap();
        let d = FiltrationDiagram::new(
            base.labels().to_vec(),
            base.spaces().to_vec(),
            &[(0, 1)],
            vec![(0, 1, base.connect(0, 1).unwrap().clone())],
        )
        .unwrap()
        .with_master(u(4), vec![to_one, pairing])
        .unwrap()
        .into_ref();
        assert!(d.validate().violations.iter().any(|v| matches!(v, super::super::Violation::GenerationFailure { .. })));
        let m = induced_martingale(&x0123(), &d).unwrap();
        assert!(matches!(
            martingale_limit(&m),
            Err(Error::GenerationFailure(_, _))
        ));
        // The allowance in the isometry report is the loss at the finest level.
        let y = FiniteRandomVariable::constant(u(4), q(0, 1)).unwrap();
        let my = induced_martingale(&y, &d).unwrap();
        let r = isometry_report(&m, &my, &x0123(), &y).unwrap();
        assert_eq!(r.sup, q(3, 2));
        assert_eq!(r.limit_distance, q(3, 2));
        assert_eq!(r.allowance, q(1, 2));
        assert!(r.holds);
    }

    #[test]
    fn isometry_with_top_in_index_is_exact() {
        let d = chain_1_2_4();
        let x = x0123();
        let y = rv(u(4), &[q(3, 1), q(0, 1), q(1, 2), q(2, 1)]);
        let (mx, my) = (
            induced_martingale(&x, &d).unwrap(),
            induced_martingale(&y, &d).unwrap(),
        );
        let r = isometry_report(&mx, &mx, &x, &x).unwrap();
        assert_eq!((r.sup.clone(), r.limit_distance.clone()), (q(0, 1), q(0, 1)));
        let r = isometry_report(&mx, &my, &x, &y).unwrap();
        assert_eq!(r.sup, r.limit_distance);
        assert_eq!(r.allowance, q(0, 1));
        assert!(r.holds);

        let other = FiltrationDiagram::single(u(4)).into_ref();
        let mo = induced_martingale(&x, &other).unwrap();
        assert_eq!(
            isometry_report(&mx, &mo, &x, &x),
            Err(Error::DiagramMismatch)
        );
    }

    #[test]
    fn martingale_new_checks() {
        let d = chain_1_2_4();
        let m = induced_martingale(&x0123(), &d).unwrap();
        assert!(matches!(
            Martingale::new(d.clone(), m.family().to_vec(), q(2, 1)),
            Err(Error::BoundViolation { .. })
        ));
        let mut family = m.family().to_vec();
        family[0] = rv(u(1), &[q(1, 1)]);
        assert!(matches!(
            Martingale::new(d, family, q(3, 1)),
            Err(Error::Inconsistent { .. })
        ));
    }
}
