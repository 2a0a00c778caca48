//! Dyadic experiments on `[0, 1]`: the depth-`n` quotient has `2^n` equal
//! atoms, and a piecewise-affine ground function supplies martingale levels
//! and error terms in closed form.

use super::{DiagramRef, FiltrationDiagram, IsometryReport, Martingale};
use crate::error::{Error, Result};
use crate::finprob::{FiniteProbSpace, MeasurePreservingMap};
use crate::finrv::FiniteRandomVariable;
use crate::scalar::{self, Scalar};

/// Atom-count guard: depth `n` has `2^n` atoms.
pub const MAX_DYADIC_DEPTH: u32 = 24;

/// Affine piece on `[start, end]` with values `left` and `right` at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub start: S,
    pub end: S,
    pub left: S,
    pub right: S,
}

impl<S: Scalar> Segment<S> {
    pub fn new(start: S, end: S, left: S, right: S) -> Self {
        Self {
            start,
            end,
            left,
            right,
        }
    }

    fn at(&self, x: &S) -> S {
        let t = (x.clone() - self.start.clone()) / (self.end.clone() - self.start.clone());
        self.left.clone() + (self.right.clone() - self.left.clone()) * t
    }

    /// Overlap of this segment with `[a, b]`, if it has positive length.
    fn clip(&self, a: &S, b: &S) -> Option<(S, S)> {
        let lo = S::max_of(self.start.clone(), a.clone());
        let hi = S::min_of(self.end.clone(), b.clone());
        (lo < hi).then_some((lo, hi))
    }
}

/// `∫_a^b |g|` for `g` affine on `[a, b]` with end values `ga`, `gb`.
fn abs_affine_integral<S: Scalar>(len: S, ga: S, gb: S) -> S {
    let two = S::from_ratio(2, 1);
    if (ga >= S::zero()) == (gb >= S::zero()) || ga.is_zero() || gb.is_zero() {
        len * (ga + gb).abs() / two
    } else {
        // Sign change inside: two triangles meeting at the root.
        let (aa, ab) = (ga.abs(), gb.abs());
        len * (ga.clone() * ga + gb.clone() * gb) / (two * (aa + ab))
    }
}

/// A nonnegative piecewise-affine function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGround<S> {
    segments: Vec<Segment<S>>,
}

impl<S: Scalar> DyadicGround<S> {
    /// Segments must tile `[0, 1]` in order without gaps or overlaps.
    pub fn new(segments: Vec<Segment<S>>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::BadSegments("no segments".into()))?;
        if !first.start.is_zero() {
            return Err(Error::BadSegments("first segment must start at 0".into()));
        }
        for (k, s) in segments.iter().enumerate() {
            if s.start >= s.end {
                return Err(Error::BadSegments(format!("segment {k} is empty or reversed")));
            }
            if s.left < S::zero() || s.right < S::zero() {
                return Err(Error::BadSegments(format!("segment {k} has a negative value")));
            }
            if k > 0 && segments[k - 1].end != s.start {
                return Err(Error::BadSegments(format!(
                    "segment {k} does not start where segment {} ends",
                    k - 1
                )));
            }
        }
        if !segments.last().expect("nonempty").end.is_one() {
            return Err(Error::BadSegments("last segment must end at 1".into()));
        }
        Ok(Self { segments })
    }

    /// `f(ω) = ω`.
    pub fn identity() -> Self {
        Self {
            segments: vec![Segment::new(S::zero(), S::one(), S::zero(), S::one())],
        }
    }

    /// `f(ω) = 1 − ω`.
    pub fn reverse() -> Self {
        Self {
            segments: vec![Segment::new(S::zero(), S::one(), S::one(), S::zero())],
        }
    }

    pub fn constant(c: S) -> Result<Self> {
        Self::new(vec![Segment::new(S::zero(), S::one(), c.clone(), c)])
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    /// Supremum of the function, attained at a segment end.
    pub fn bound(&self) -> S {
        scalar::max_or_zero(
            self.segments
                .iter()
                .flat_map(|s| [s.left.clone(), s.right.clone()]),
        )
    }

    /// `∫_a^b f`.
    pub fn integral(&self, a: &S, b: &S) -> S {
        let two = S::from_ratio(2, 1);
        scalar::sum(self.segments.iter().filter_map(|s| {
            let (lo, hi) = s.clip(a, b)?;
            Some((hi.clone() - lo.clone()) * (s.at(&lo) + s.at(&hi)) / two.clone())
        }))
    }

    /// `∫_0^1 f²`.
    pub fn second_moment(&self) -> S {
        let three = S::from_ratio(3, 1);
        scalar::sum(self.segments.iter().map(|s| {
            let (l, r) = (s.left.clone(), s.right.clone());
            (s.end.clone() - s.start.clone()) * (l.clone() * l.clone() + l * r.clone() + r.clone() * r)
                / three.clone()
        }))
    }

    /// Averages of the function over the `2^n` dyadic intervals of depth `n`.
    pub fn level_averages(&self, n: u32) -> Vec<S> {
        let count = 1u64 << n;
        let width = S::from_ratio(1, count);
        (0..count)
            .map(|k| {
                let a = S::from_ratio(k as i64, count);
                let b = S::from_ratio(k as i64 + 1, count);
                self.integral(&a, &b) / width.clone()
            })
            .collect()
    }

    fn piece(&self, a: &S, b: &S) -> &Segment<S> {
        self.segments
            .iter()
            .find(|s| s.start <= *a && *b <= s.end)
            .expect("interval lies inside one segment")
    }

    /// `∫|f − g|` over `[0, 1]` for another ground function `g`.
    pub fn l1_distance(&self, other: &Self) -> S {
        let mut cuts: Vec<S> = self
            .segments
            .iter()
            .chain(&other.segments)
            .flat_map(|s| [s.start.clone(), s.end.clone()])
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("segment ends are comparable"));
        cuts.dedup();
        scalar::sum(cuts.windows(2).map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let (p, q) = (self.piece(a, b), other.piece(a, b));
            let ga = p.at(a) - q.at(a);
            let gb = p.at(b) - q.at(b);
            abs_affine_integral(b.clone() - a.clone(), ga, gb)
        }))
    }
}

/// A dyadic chain of depths `0..=N` together with the martingale of interval
/// averages of a ground function.
#[derive(Debug, Clone)]
pub struct DyadicExperiment<S> {
    pub diagram: DiagramRef<S>,
    pub martingale: Martingale<S>,
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DYADIC_DEPTH {
        return Err(Error::DepthTooLarge {
            depth,
            max: MAX_DYADIC_DEPTH,
        });
    }
    Ok(())
}

/// Builds the chain of dyadic quotients with halving connecting maps and the
/// level averages of `dg` as a martingale on it.
pub fn make_dyadic<S: Scalar>(dg: &DyadicGround<S>, depth: u32) -> Result<DyadicExperiment<S>> {
    check_depth(depth)?;
    let spaces: Vec<_> = (0..=depth)
        .map(|n| FiniteProbSpace::uniform(1usize << n).into_ref())
        .collect();
    let diagram = if depth == 0 {
        FiltrationDiagram::single(spaces[0].clone())
    } else {
        let coarsen = (0..depth as usize)
            .map(|n| {
                let fine = &spaces[n + 1];
                MeasurePreservingMap::new(
                    fine.clone(),
                    spaces[n].clone(),
                    (0..fine.len()).map(|k| k / 2).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        FiltrationDiagram::chain(coarsen)?
    }
    .into_ref();
    let family = (0..=depth)
        .map(|n| FiniteRandomVariable::new(spaces[n as usize].clone(), dg.level_averages(n)))
        .collect::<Result<Vec<_>>>()?;
    let martingale =
        Martingale::new(diagram.clone(), family, dg.bound())?.with_limit_second_moment(dg.second_moment());
    Ok(DyadicExperiment {
        diagram,
        martingale,
    })
}

/// `∫_0^1 |f − X_n|` where `X_n` is the depth-`n` average of `f`.
pub fn dyadic_error<S: Scalar>(dg: &DyadicGround<S>, n: u32) -> S {
    let count = 1u64 << n;
    let averages = dg.level_averages(n);
    scalar::sum((0..count).map(|k| {
        let a = S::from_ratio(k as i64, count);
        let b = S::from_ratio(k as i64 + 1, count);
        let c = &averages[k as usize];
        scalar::sum(dg.segments.iter().filter_map(|s| {
            let (lo, hi) = s.clip(&a, &b)?;
            let ga = s.at(&lo) - c.clone();
            let gb = s.at(&hi) - c.clone();
            Some(abs_affine_integral(hi - lo, ga, gb))
        }))
    }))
}

/// Isometry comparison for two ground functions truncated at `depth`: the
/// level distances never exceed `∫|f − g|`, and fall short of it by at most
/// the two truncation errors at the finest depth.
pub fn dyadic_isometry_report<S: Scalar>(
    f: &DyadicGround<S>,
    g: &DyadicGround<S>,
    depth: u32,
) -> Result<IsometryReport<S>> {
    check_depth(depth)?;
    let level_distances = (0..=depth)
        .map(|n| {
            let count = 1u64 << n;
            let width = S::from_ratio(1, count);
            scalar::sum(
                f.level_averages(n)
                    .into_iter()
                    .zip(g.level_averages(n))
                    .map(|(x, y)| width.clone() * (x - y).abs()),
            )
        })
        .collect();
    let allowance = dyadic_error(f, depth) + dyadic_error(g, depth);
    Ok(IsometryReport::from_parts(
        level_distances,
        f.l1_distance(g),
        allowance,
    ))
}
