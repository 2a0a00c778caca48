use super::limits::{tuple_label, tuples};
use super::{same_metric, Distance, FinPseudometricSpace, LipschitzMap, MetricRef};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `X ⊗ Y`: pairs with the sum metric. The pair `(x, y)` has index
/// `x · |Y| + y`.
#[derive(Debug, Clone)]
pub struct TensorSpace<S> {
    pub space: MetricRef<S>,
    pub left: MetricRef<S>,
    pub right: MetricRef<S>,
}

impl<S: Scalar> TensorSpace<S> {
    pub fn index_of(&self, x: usize, y: usize) -> usize {
        x * self.right.len() + y
    }
}

pub fn tensor<S: Scalar>(x: &MetricRef<S>, y: &MetricRef<S>) -> Result<TensorSpace<S>> {
    let factors = [x.clone(), y.clone()];
    let coords = tuples(&factors)?;
    let labels = coords.iter().map(|c| tuple_label(&factors, c)).collect();
    let dist = coords
        .iter()
        .map(|u| {
            coords
                .iter()
                .map(|v| x.d(u[0], v[0]).clone() + y.d(u[1], v[1]).clone())
                .collect()
        })
        .collect();
    Ok(TensorSpace {
        space: FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref(),
        left: x.clone(),
        right: y.clone(),
    })
}

/// A finite family of 1-Lipschitz maps `X → Y` with the sup metric.
#[derive(Debug, Clone)]
pub struct HomSpace<S> {
    pub space: MetricRef<S>,
    pub src: MetricRef<S>,
    pub dst: MetricRef<S>,
    pub maps: Vec<LipschitzMap<S>>,
    /// For each pair of maps, a point of `X` where the sup is attained.
    pub witness: Vec<Vec<Option<usize>>>,
}

fn hom_with_labels<S: Scalar>(
    x: &MetricRef<S>,
    y: &MetricRef<S>,
    maps: Vec<LipschitzMap<S>>,
    labels: Vec<String>,
) -> Result<HomSpace<S>> {
    for f in &maps {
        if !same_metric(f.src(), x) || !same_metric(f.dst(), y) {
            return Err(Error::DomainMismatch("family member has the wrong source or target".into()));
        }
        f.check_lipschitz()?;
    }
    let k = maps.len();
    let mut dist = vec![vec![Distance::zero(); k]; k];
    let mut witness = vec![vec![None; k]; k];
    for a in 0..k {
        for b in 0..k {
            for p in 0..x.len() {
                let d = y.d(maps[a].image(p), maps[b].image(p));
                if witness[a][b].is_none() || *d > dist[a][b] {
                    dist[a][b] = d.clone();
                    witness[a][b] = Some(p);
                }
            }
        }
    }
    Ok(HomSpace {
        space: FinPseudometricSpace::new_unchecked(labels, dist)?.into_ref(),
        src: x.clone(),
        dst: y.clone(),
        maps,
        witness,
    })
}

/// The internal hom restricted to `family`; member `k` is labelled `k`.
pub fn hom<S: Scalar>(x: &MetricRef<S>, y: &MetricRef<S>, family: Vec<LipschitzMap<S>>) -> Result<HomSpace<S>> {
    let labels = (0..family.len()).map(|k| k.to_string()).collect();
    hom_with_labels(x, y, family, labels)
}

/// Transpose of `h: X ⊗ Y → Z`.
#[derive(Debug, Clone)]
pub struct Curried<S> {
    /// `h(x, -)` for each `x`, labelled by `x` in `hom`.
    pub hom: HomSpace<S>,
    /// `x ↦ h(x, -)` into the hom space.
    pub map: LipschitzMap<S>,
}

impl<S: Scalar> Curried<S> {
    pub fn family(&self) -> &[LipschitzMap<S>] {
        &self.hom.maps
    }
}

pub fn curry<S: Scalar>(t: &TensorSpace<S>, h: &LipschitzMap<S>) -> Result<Curried<S>> {
    if !same_metric(h.src(), &t.space) {
        return Err(Error::DomainMismatch("map is not defined on the tensor product".into()));
    }
    h.check_lipschitz()?;
    let (x, y) = (&t.left, &t.right);
    let family = (0..x.len())
        .map(|p| {
            let assign = (0..y.len()).map(|q| h.image(t.index_of(p, q))).collect();
            LipschitzMap::new(y.clone(), h.dst().clone(), assign)
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = hom_with_labels(y, h.dst(), family, x.points().to_vec())?;
    let map = LipschitzMap::new(x.clone(), hom.space.clone(), (0..x.len()).collect())?;
    Ok(Curried { hom, map })
}

/// `(x, y) ↦ family[x](y)`; fails unless the family varies 1-Lipschitz in `x`.
pub fn uncurry<S: Scalar>(t: &TensorSpace<S>, family: &[LipschitzMap<S>]) -> Result<LipschitzMap<S>> {
    if family.len() != t.left.len() {
        return Err(Error::LengthMismatch {
            expected: t.left.len(),
            actual: family.len(),
        });
    }
    let z = match family.first() {
        Some(f) => f.dst().clone(),
        None => FinPseudometricSpace::empty().into_ref(),
    };
    for f in family {
        if !same_metric(f.src(), &t.right) || !same_metric(f.dst(), &z) {
            return Err(Error::DomainMismatch("family member has the wrong source or target".into()));
        }
    }
    let assign = (0..t.left.len())
        .flat_map(|p| (0..t.right.len()).map(move |q| family[p].image(q)))
        .collect();
    LipschitzMap::new(t.space.clone(), z, assign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn fin(n: i64) -> Distance<Q> {
        Distance::Finite(Q::from_ratio(n, 1))
    }

    fn line(ps: &[i64]) -> MetricRef<Q> {
        FinPseudometricSpace::line(&ps.iter().map(|&p| Q::from_ratio(p, 1)).collect::<Vec<_>>()).into_ref()
    }

    #[test]
    fn tensor_examples() {
        let (x, y) = (line(&[0, 1]), line(&[0, 2]));
        let t = tensor(&x, &y).unwrap();
        assert_eq!(*t.space.d(t.index_of(0, 0), t.index_of(1, 1)), fin(3));
        assert!(t.space.is_pseudometric());
        let pt = FinPseudometricSpace::point().into_ref();
        let t = tensor(&x, &pt).unwrap();
        let proj = LipschitzMap::new(t.space.clone(), x.clone(), vec![0, 1]).unwrap();
        assert!(proj.is_isometric());
    }

    #[test]
    fn hom_examples() {
        let (x, y) = (line(&[0, 1, 2]), line(&[0, 5]));
        let c0 = LipschitzMap::constant(x.clone(), y.clone(), 0).unwrap();
        let c1 = LipschitzMap::constant(x.clone(), y.clone(), 1).unwrap();
        let h = hom(&x, &y, vec![c0.clone()]).unwrap();
        assert_eq!(h.space.len(), 1);
        let h = hom(&x, &y, vec![c0, c1]).unwrap();
        assert_eq!(*h.space.d(0, 1), fin(5));
        assert_eq!(h.witness[0][1], Some(0));

        let id = LipschitzMap::identity(x.clone());
        let flip = LipschitzMap::new(x.clone(), x.clone(), vec![2, 1, 0]).unwrap();
        let h = hom(&x, &x, vec![id, flip]).unwrap();
        assert_eq!(*h.space.d(0, 1), fin(2));
        assert_eq!(h.witness[0][1], Some(0));

        let expand = LipschitzMap::new_unchecked(line(&[0, 1]), line(&[0, 3]), vec![0, 1]).unwrap();
        assert!(matches!(
            hom(expand.src(), expand.dst(), vec![expand.clone()]),
            Err(Error::NotLipschitz { .. })
        ));
    }

    #[test]
    fn curry_examples() {
        let (x, y) = (line(&[0, 1]), line(&[0, 1, 3]));
        let t = tensor(&x, &y).unwrap();
        // Projection onto Y curries to identities.
        let proj = LipschitzMap::new(
            t.space.clone(),
            y.clone(),
            (0..2).flat_map(|_| 0..3).collect(),
        )
        .unwrap();
        let c = curry(&t, &proj).unwrap();
        assert!(c.family().iter().all(|f| *f == LipschitzMap::identity(y.clone())));
        assert_eq!(uncurry(&t, c.family()).unwrap(), proj);

        let z = line(&[7]);
        let constant = LipschitzMap::constant(t.space.clone(), z.clone(), 0).unwrap();
        let c = curry(&t, &constant).unwrap();
        assert!(c.family().iter().all(|f| f.assign() == [0, 0, 0]));
        assert_eq!(uncurry(&t, c.family()).unwrap(), constant);
    }

    #[test]
    fn uncurry_rejects_non_lipschitz_families() {
        // x ↦ constant map at x, with X twice as spread out as allowed.
        let (x, y, z) = (line(&[0, 1]), line(&[0]), line(&[0, 2]));
        let t = tensor(&x, &y).unwrap();
        let family = vec![
            LipschitzMap::constant(y.clone(), z.clone(), 0).unwrap(),
            LipschitzMap::constant(y, z, 1).unwrap(),
        ];
        assert!(matches!(uncurry(&t, &family), Err(Error::NotLipschitz { .. })));
    }
}
