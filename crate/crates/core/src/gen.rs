//! Seeded generators for random instances. The same seed always yields the
//! same sequence of instances on a given backend.
//!
//! Weights are multiples of `1/d` with `d ≤ 64`, values and distances are
//! small fractions, so exact arithmetic stays cheap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{DiagramRef, FiltrationDiagram, RefinementTriple};
use crate::finmeas::FiniteMeasure;
use crate::finprob::{FiniteProbSpace, MeasurePreservingMap, SpaceRef};
use crate::finrv::FiniteRandomVariable;
use crate::metcat::{Distance, FinPseudometricSpace, LipschitzMap, MetricRef};
use crate::scalar::Scalar;

pub const MAX_DENOMINATOR: u64 = 64;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// `n` nonnegative multiples of `1/d` summing to one, some possibly zero.
    pub fn weights<S: Scalar>(&mut self, n: usize) -> Vec<S> {
        let d = self.rng.gen_range(n as u64..=MAX_DENOMINATOR);
        let mut cuts: Vec<u64> = (0..n - 1).map(|_| self.rng.gen_range(0..=d)).collect();
        cuts.sort_unstable();
        let mut prev = 0;
        let mut out = Vec::with_capacity(n);
        for c in cuts.into_iter().chain([d]) {
            out.push(S::from_ratio((c - prev) as i64, d));
            prev = c;
        }
        out
    }

    /// Weights where every atom carries one or two units; ties are common,
    /// which makes distinct measure-preserving maps plentiful.
    pub fn tied_weights<S: Scalar>(&mut self, n: usize) -> Vec<S> {
        let units: Vec<u64> = (0..n).map(|_| self.rng.gen_range(1..=2)).collect();
        let d: u64 = units.iter().sum();
        units.into_iter().map(|u| S::from_ratio(u as i64, d)).collect()
    }

    pub fn space<S: Scalar>(&mut self, lo: usize, hi: usize) -> SpaceRef<S> {
        let n = self.size(lo, hi);
        FiniteProbSpace::indexed(self.weights(n))
            .expect("generated weights sum to one")
            .into_ref()
    }

    pub fn tied_space<S: Scalar>(&mut self, lo: usize, hi: usize) -> SpaceRef<S> {
        let n = self.size(lo, hi);
        FiniteProbSpace::indexed(self.tied_weights(n))
            .expect("generated weights sum to one")
            .into_ref()
    }

    /// A random partition of the atoms into at most `blocks` nonempty
    /// blocks, as a block index per atom numbered by first appearance.
    pub fn partition(&mut self, n: usize, blocks: usize) -> Vec<usize> {
        let raw: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..blocks.max(1))).collect();
        let mut renumber = Vec::new();
        raw.iter()
            .map(|&b| match renumber.iter().position(|&x| x == b) {
                Some(i) => i,
                None => {
                    renumber.push(b);
                    renumber.len() - 1
                }
            })
            .collect()
    }

    /// The quotient of `space` by a random partition into at most `blocks`
    /// blocks, weighted by block mass.
    pub fn quotient<S: Scalar>(&mut self, space: &SpaceRef<S>, blocks: usize) -> MeasurePreservingMap<S> {
        let assign = self.partition(space.len(), blocks);
        quotient_by(space, assign)
    }

    /// A permutation of the atoms that only swaps atoms of equal weight.
    pub fn weight_preserving_permutation<S: Scalar>(&mut self, space: &SpaceRef<S>) -> Vec<usize> {
        let n = space.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut done = vec![false; n];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let class: Vec<usize> = (i..n).filter(|&j| space.weight(j) == space.weight(i)).collect();
            let mut shuffled = class.clone();
            shuffled.shuffle(&mut self.rng);
            for (&a, &b) in class.iter().zip(&shuffled) {
                perm[a] = b;
                done[a] = true;
            }
        }
        perm
    }

    /// Two measure-preserving maps `Ω → B` with a common codomain of at most
    /// `max_codomain` atoms. The second is the first precomposed with a
    /// weight-preserving permutation of `Ω`, or else a rejection-sampled
    /// assignment.
    pub fn parallel_maps<S: Scalar>(
        &mut self,
        omega: &SpaceRef<S>,
        max_codomain: usize,
    ) -> (MeasurePreservingMap<S>, MeasurePreservingMap<S>) {
        let f1 = self.quotient(omega, max_codomain);
        let dst = f1.dst().clone();
        if self.rng.gen_bool(0.25) {
            for _ in 0..64 {
                let assign: Vec<usize> = (0..omega.len()).map(|_| self.rng.gen_range(0..dst.len())).collect();
                if let Ok(f2) = MeasurePreservingMap::new(omega.clone(), dst.clone(), assign) {
                    return (f1, f2);
                }
            }
        }
        let sigma = self.weight_preserving_permutation(omega);
        let assign = (0..omega.len()).map(|a| f1.image(sigma[a])).collect();
        let f2 = MeasurePreservingMap::new(omega.clone(), dst, assign).expect("permuting equal weights preserves measure");
        (f1, f2)
    }

    /// A random multiple of `1/16` in `[0, 1]`.
    pub fn unit<S: Scalar>(&mut self) -> S {
        S::from_ratio(self.rng.gen_range(0..=16), 16)
    }

    /// Values in `[0, r]`.
    pub fn bounded_rv<S: Scalar>(&mut self, space: &SpaceRef<S>, r: &S) -> FiniteRandomVariable<S> {
        let values = (0..space.len()).map(|_| r.clone() * self.unit::<S>()).collect();
        FiniteRandomVariable::new(space.clone(), values).expect("values are nonnegative")
    }

    /// A measure with `μ ≤ r·P`.
    pub fn bounded_measure<S: Scalar>(&mut self, space: &SpaceRef<S>, r: &S) -> FiniteMeasure<S> {
        let mass = space
            .weights()
            .iter()
            .map(|p| r.clone() * p.clone() * self.unit::<S>())
            .collect();
        FiniteMeasure::new(space.clone(), mass).expect("masses are nonnegative and absolutely continuous")
    }

    /// A bound in `{1/2, 1, 3/2, …, 4}`.
    pub fn bound<S: Scalar>(&mut self) -> S {
        S::from_ratio(self.rng.gen_range(1..=8), 2)
    }

    /// A chain of random coarsenings ending in `uniform(2^k)`, which is the
    /// top. Each coarser level merges blocks of the next finer one.
    pub fn refining_chain<S: Scalar>(&mut self, k: u32, levels: usize) -> DiagramRef<S> {
        let top = FiniteProbSpace::uniform(1 << k).into_ref();
        let mut coarsen = Vec::with_capacity(levels);
        let mut fine = top;
        for _ in 0..levels {
            let blocks = (fine.len() / 2).max(1);
            let m = self.quotient(&fine, blocks);
            fine = m.dst().clone();
            coarsen.push(m);
        }
        coarsen.reverse();
        if coarsen.is_empty() {
            return FiltrationDiagram::single(fine).into_ref();
        }
        FiltrationDiagram::chain(coarsen)
            .expect("composed quotients form a chain")
            .into_ref()
    }

    /// `X` on a space of at most `max_atoms` atoms with two quotient levels.
    pub fn refinement_triple<S: Scalar>(&mut self, max_atoms: usize) -> RefinementTriple<S> {
        let omega = self.space(2, max_atoms);
        let fine = self.quotient(&omega, omega.len());
        let coarsen = self.quotient(fine.dst(), fine.dst().len());
        let r = self.bound();
        let x = self.bounded_rv(&omega, &r);
        RefinementTriple::new(x, fine, coarsen).expect("generated triple is composable")
    }

    /// An extended pseudometric from shortest paths over a random graph
    /// with edge lengths in `{0, 1/2, …, 4}`; missing connections stay `∞`.
    pub fn metric_space<S: Scalar>(&mut self, lo: usize, hi: usize) -> MetricRef<S> {
        let n = self.size(lo, hi);
        let mut d = vec![vec![Distance::Infinite; n]; n];
        for i in 0..n {
            d[i][i] = Distance::zero();
            for j in i + 1..n {
                if self.rng.gen_bool(0.8) {
                    let w = Distance::Finite(S::from_ratio(self.rng.gen_range(0..=8), 2));
                    d[i][j] = w.clone();
                    d[j][i] = w;
                }
            }
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][m].clone() + d[m][j].clone();
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        FinPseudometricSpace::new(labels, d)
            .expect("shortest paths form a pseudometric")
            .into_ref()
    }

    /// A random 1-Lipschitz map by rejection, falling back to a constant map.
    pub fn lipschitz_map<S: Scalar>(&mut self, src: &MetricRef<S>, dst: &MetricRef<S>) -> LipschitzMap<S> {
        for _ in 0..32 {
            let assign = (0..src.len()).map(|_| self.rng.gen_range(0..dst.len())).collect();
            if let Ok(f) = LipschitzMap::new(src.clone(), dst.clone(), assign) {
                return f;
            }
        }
        let p = self.rng.gen_range(0..dst.len());
        LipschitzMap::constant(src.clone(), dst.clone(), p).expect("constant maps are 1-Lipschitz")
    }
}

/// The quotient map onto blocks `0..k` given a block index per atom.
pub fn quotient_by<S: Scalar>(space: &SpaceRef<S>, assign: Vec<usize>) -> MeasurePreservingMap<S> {
    let k = assign.iter().max().map_or(0, |&m| m + 1);
    let mut weights = vec![S::zero(); k];
    for (a, &b) in assign.iter().enumerate() {
        weights[b] = weights[b].clone() + space.weight(a).clone();
    }
    let labels: Vec<String> = (0..k).map(|b| format!("b{b}")).collect();
    let dst = FiniteProbSpace::new(labels, weights)
        .expect("block masses sum to one")
        .into_ref();
    MeasurePreservingMap::new(space.clone(), dst, assign).expect("quotients preserve measure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn generation_is_deterministic() {
        let draw = |seed| {
            let mut g = Gen::new(seed);
            let s = g.space::<Q>(2, 8);
            let (f1, f2) = g.parallel_maps(&s, 6);
            (s, f1, f2)
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7).0, draw(8).0);
    }

    #[test]
    fn generated_objects_are_valid() {
        let mut g = Gen::new(1);
        for _ in 0..200 {
            let s = g.space::<Q>(2, 8);
            assert!((2..=8).contains(&s.len()));
            let (f1, f2) = g.parallel_maps(&s, 6);
            assert!(f1.dst().len() <= 6);
            assert!(f1.check_measure_preserving().is_ok() && f2.check_measure_preserving().is_ok());
            let r = g.bound::<Q>();
            assert!(g.bounded_measure(&s, &r).bound_check(&r));
            assert!(g.bounded_rv(&s, &r).is_bounded_by(&r));
            let k = g.size(1, 6) as u32;
            let levels = g.size(0, 3);
            let d = g.refining_chain::<Q>(k, levels);
            assert!(d.validate().is_valid());
            assert!(d.unseparated_top_atoms().is_none());
            let x = g.metric_space::<Q>(1, 5);
            let y = g.metric_space::<Q>(1, 5);
            assert!(g.lipschitz_map(&x, &y).check_lipschitz().is_ok());
        }
    }

    #[test]
    fn permutations_find_distinct_maps() {
        let mut g = Gen::new(3);
        let distinct = (0..100)
            .filter(|_| {
                let s = g.tied_space::<Q>(4, 8);
                let (f1, f2) = g.parallel_maps(&s, 4);
                f1 != f2
            })
            .count();
        assert!(distinct > 30, "{distinct}");
    }
}
