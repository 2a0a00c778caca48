use std::collections::BTreeMap;

use super::{cmp_distance, same_metric, Distance, FinPseudometricSpace, LipschitzMap, MetricRef, MAX_PRODUCT_POINTS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Labels and coordinates of all tuples, first factor most significant.
pub(crate) fn tuples<S: Scalar>(factors: &[MetricRef<S>]) -> Result<Vec<Vec<usize>>> {
    let size = factors
        .iter()
        .try_fold(1usize, |acc, x| acc.checked_mul(x.len()))
        .unwrap_or(usize::MAX);
    if size > MAX_PRODUCT_POINTS {
        return Err(Error::ProductTooLarge {
            size,
            max: MAX_PRODUCT_POINTS,
        });
    }
    let mut out = vec![Vec::new()];
    for x in factors {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..x.len()).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

pub(crate) fn tuple_label<S: Scalar>(factors: &[MetricRef<S>], coords: &[usize]) -> String {
    if factors.len() == 1 {
        return factors[0].point_label(coords[0]).to_string();
    }
    let parts: Vec<&str> = factors
        .iter()
        .zip(coords)
        .map(|(x, &i)| x.point_label(i))
        .collect();
    format!("({})", parts.join(","))
}

fn check_parallel<S: Scalar>(f: &LipschitzMap<S>, g: &LipschitzMap<S>) -> Result<()> {
    if same_metric(f.src(), g.src()) && same_metric(f.dst(), g.dst()) {
        Ok(())
    } else {
        Err(Error::NotParallel)
    }
}

/// Product with the sup metric and its projections.
#[derive(Debug, Clone)]
pub struct ProductSpace<S> {
    pub space: MetricRef<S>,
    pub factors: Vec<MetricRef<S>>,
    pub coords: Vec<Vec<usize>>,
    pub projections: Vec<LipschitzMap<S>>,
}

pub fn product<S: Scalar>(factors: &[MetricRef<S>]) -> Result<ProductSpace<S>> {
    let coords = tuples(factors)?;
    let labels = coords.iter().map(|c| tuple_label(factors, c)).collect();
    let dist = coords
        .iter()
        .map(|u| {
            coords
                .iter()
                .map(|v| {
                    factors
                        .iter()
                        .enumerate()
                        .fold(Distance::zero(), |acc, (k, x)| acc.max(x.d(u[k], v[k]).clone()))
                })
                .collect()
        })
        .collect();
    let space = FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref();
    let projections = factors
        .iter()
        .enumerate()
        .map(|(k, x)| {
            LipschitzMap::new(
                space.clone(),
                x.clone(),
                coords.iter().map(|c| c[k]).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductSpace {
        space,
        factors: factors.to_vec(),
        coords,
        projections,
    })
}

impl<S: Scalar> ProductSpace<S> {
    /// The point with the given coordinates.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, x)| acc * x.len() + i)
    }

    /// The map `t ↦ (h_k(t))_k` induced by a cone `h_k: T → X_k`.
    pub fn tuple(&self, cone: &[LipschitzMap<S>]) -> Result<LipschitzMap<S>> {
        if cone.len() != self.factors.len() {
            return Err(Error::IndexMismatch(format!(
                "cone has {} legs, product has {} factors",
                cone.len(),
                self.factors.len()
            )));
        }
        let source = match cone.first() {
            Some(h) => h.src().clone(),
            None => return Err(Error::IndexMismatch("empty cone has no source".into())),
        };
        for (h, x) in cone.iter().zip(&self.factors) {
            if !same_metric(h.src(), &source) || !same_metric(h.dst(), x) {
                return Err(Error::DomainMismatch("cone legs do not match the factors".into()));
            }
        }
        let assign = (0..source.len())
            .map(|t| {
                let c: Vec<usize> = cone.iter().map(|h| h.image(t)).collect();
                self.index_of(&c)
            })
            .collect();
        LipschitzMap::new(source, self.space.clone(), assign)
    }
}

/// The subspace on which a parallel pair agrees.
#[derive(Debug, Clone)]
pub struct Equalizer<S> {
    pub space: MetricRef<S>,
    pub inclusion: LipschitzMap<S>,
    f: LipschitzMap<S>,
    g: LipschitzMap<S>,
}

pub fn equalizer<S: Scalar>(f: &LipschitzMap<S>, g: &LipschitzMap<S>) -> Result<Equalizer<S>> {
    check_parallel(f, g)?;
    let x = f.src();
    let keep: Vec<usize> = (0..x.len()).filter(|&i| f.image(i) == g.image(i)).collect();
    let labels = keep.iter().map(|&i| x.point_label(i).to_string()).collect();
    let dist = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| x.d(i, j).clone()).collect())
        .collect();
    let space = FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref();
    let inclusion = LipschitzMap::new(space.clone(), x.clone(), keep)?;
    Ok(Equalizer {
        space,
        inclusion,
        f: f.clone(),
        g: g.clone(),
    })
}

impl<S: Scalar> Equalizer<S> {
    /// The unique map `u` with `inclusion ∘ u = h`, for `h` equalizing the pair.
    pub fn factor(&self, h: &LipschitzMap<S>) -> Result<LipschitzMap<S>> {
        if !same_metric(h.dst(), self.f.src()) {
            return Err(Error::DomainMismatch("map does not land in the equalized space".into()));
        }
        let assign = (0..h.src().len())
            .map(|t| {
                let x = h.image(t);
                if self.f.image(x) != self.g.image(x) {
                    return Err(Error::NoFactorization(format!(
                        "{} is sent where the pair disagrees",
                        h.src().point_label(t)
                    )));
                }
                Ok(self
                    .inclusion
                    .assign()
                    .iter()
                    .position(|&e| e == x)
                    .expect("agreeing point is included"))
            })
            .collect::<Result<Vec<_>>>()?;
        LipschitzMap::new(h.src().clone(), self.space.clone(), assign)
    }
}

/// Disjoint union with infinite distance across components.
#[derive(Debug, Clone)]
pub struct Coproduct<S> {
    pub space: MetricRef<S>,
    pub inclusions: Vec<LipschitzMap<S>>,
}

pub fn coproduct<S: Scalar>(summands: &[MetricRef<S>]) -> Result<Coproduct<S>> {
    if summands.len() == 1 {
        let space = summands[0].clone();
        return Ok(Coproduct {
            inclusions: vec![LipschitzMap::identity(space.clone())],
            space,
        });
    }
    let owner: Vec<(usize, usize)> = summands
        .iter()
        .enumerate()
        .flat_map(|(k, x)| (0..x.len()).map(move |i| (k, i)))
        .collect();
    let labels = owner
        .iter()
        .map(|&(k, i)| format!("{k}:{}", summands[k].point_label(i)))
        .collect();
    let dist = owner
        .iter()
        .map(|&(k, i)| {
            owner
                .iter()
                .map(|&(l, j)| {
                    if k == l {
                        summands[k].d(i, j).clone()
                    } else {
                        Distance::Infinite
                    }
                })
                .collect()
        })
        .collect();
    let space = FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref();
    let mut offset = 0;
    let inclusions = summands
        .iter()
        .map(|x| {
            let assign = (offset..offset + x.len()).collect();
            offset += x.len();
            LipschitzMap::new(x.clone(), space.clone(), assign)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coproduct { space, inclusions })
}

impl<S: Scalar> Coproduct<S> {
    /// The map out of the coproduct induced by a cocone `h_k: X_k → Z`.
    pub fn copair(&self, cocone: &[LipschitzMap<S>]) -> Result<LipschitzMap<S>> {
        if cocone.len() != self.inclusions.len() {
            return Err(Error::IndexMismatch(format!(
                "cocone has {} legs, coproduct has {} summands",
                cocone.len(),
                self.inclusions.len()
            )));
        }
        let target = match cocone.first() {
            Some(h) => h.dst().clone(),
            None => return Err(Error::IndexMismatch("empty cocone has no target".into())),
        };
        let mut assign = vec![0; self.space.len()];
        for (h, inc) in cocone.iter().zip(&self.inclusions) {
            if !same_metric(h.src(), inc.src()) || !same_metric(h.dst(), &target) {
                return Err(Error::DomainMismatch("cocone legs do not match the summands".into()));
            }
            for (x, &p) in inc.assign().iter().enumerate() {
                assign[p] = h.image(x);
            }
        }
        LipschitzMap::new(self.space.clone(), target, assign)
    }
}

/// Quotient of the target by the equivalence generated by `f(x) ∼ g(x)`,
/// with the chain-infimum metric.
#[derive(Debug, Clone)]
pub struct Coequalizer<S> {
    pub space: MetricRef<S>,
    pub quotient: LipschitzMap<S>,
    /// Class pairs where the best single pair of representatives is farther
    /// apart than the chain infimum.
    pub one_step_differs: Vec<(usize, usize)>,
    f: LipschitzMap<S>,
    g: LipschitzMap<S>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

pub fn coequalizer<S: Scalar>(f: &LipschitzMap<S>, g: &LipschitzMap<S>) -> Result<Coequalizer<S>> {
    check_parallel(f, g)?;
    let y = f.dst();
    let n = y.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for x in 0..f.src().len() {
        let (a, b) = (find(&mut parent, f.image(x)), find(&mut parent, g.image(x)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    // Classes numbered by least member.
    let mut class_id = BTreeMap::new();
    let mut class_of = vec![0; n];
    for (i, c) in class_of.iter_mut().enumerate() {
        let root = find(&mut parent, i);
        let next = class_id.len();
        *c = *class_id.entry(root).or_insert(next);
    }
    let k = class_id.len();
    let members: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..n).filter(|&i| class_of[i] == c).collect())
        .collect();

    let mut one_step = vec![vec![Distance::Infinite; k]; k];
    for (a, row) in one_step.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = if a == b {
                Distance::zero()
            } else {
                members[a]
                    .iter()
                    .flat_map(|&i| members[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| y.d(i, j).clone())
                    .min_by(cmp_distance)
                    .expect("classes are nonempty")
            };
        }
    }
    let mut dist = one_step.clone();
    for m in 0..k {
        for a in 0..k {
            if !dist[a][m].is_finite() {
                continue;
            }
            for b in 0..k {
                let via = dist[a][m].clone() + dist[m][b].clone();
                if via < dist[a][b] {
                    dist[a][b] = via;
                }
            }
        }
    }
    let one_step_differs = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .filter(|&(a, b)| one_step[a][b] != dist[a][b])
        .collect();
    let labels = members
        .iter()
        .map(|ms| {
            if ms.len() == 1 {
                y.point_label(ms[0]).to_string()
            } else {
                let names: Vec<&str> = ms.iter().map(|&i| y.point_label(i)).collect();
                format!("{{{}}}", names.join(","))
            }
        })
        .collect();
    let space = FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref();
    let quotient = LipschitzMap::new(y.clone(), space.clone(), class_of)?;
    Ok(Coequalizer {
        space,
        quotient,
        one_step_differs,
        f: f.clone(),
        g: g.clone(),
    })
}

impl<S: Scalar> Coequalizer<S> {
    /// The unique map `u` with `u ∘ quotient = h`, for `h` coequalizing the pair.
    pub fn factor(&self, h: &LipschitzMap<S>) -> Result<LipschitzMap<S>> {
        if !same_metric(h.src(), self.f.dst()) {
            return Err(Error::DomainMismatch("map does not leave the coequalized space".into()));
        }
        for x in 0..self.f.src().len() {
            if h.image(self.f.image(x)) != h.image(self.g.image(x)) {
                return Err(Error::NoFactorization(format!(
                    "images of {} differ",
                    self.f.src().point_label(x)
                )));
            }
        }
        let mut assign = vec![0; self.space.len()];
        for (y, &c) in self.quotient.assign().iter().enumerate() {
            assign[c] = h.image(y);
        }
        LipschitzMap::new(self.space.clone(), h.dst().clone(), assign)
    }
}
