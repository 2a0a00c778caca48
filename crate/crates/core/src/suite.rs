//! Randomized property suites. Each suite draws instances from a seeded
//! [`Gen`] and reports, per property, how many trials ran and which failed.

use serde::Serialize;

use crate::diagram::{
    induced_martingale, martingale_limit, moment_identities, second_moment_gap, MomentItem, RefinementTriple,
};
use crate::error::Result;
use crate::finmeas::FiniteMeasure;
use crate::finprob::{FiniteProbSpace, MeasurePreservingMap};
use crate::finrv::FiniteRandomVariable;
use crate::gen::Gen;
use crate::metcat::{self, LipschitzMap};
use crate::scalar::Scalar;

/// Failures kept verbatim per property; the rest are only counted.
const KEPT_FAILURES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub id: &'static str,
    pub description: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub examples: Vec<String>,
}

impl PropertyReport {
    fn new(id: &'static str, description: &'static str) -> Self {
        Self {
            id,
            description,
            trials: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < KEPT_FAILURES {
                self.examples.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub backend: &'static str,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.properties
            .iter()
            .filter(|p| !p.passed())
            .map(|p| p.id)
            .collect()
    }

    pub fn property(&self, id: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.id == id)
    }
}

fn moment_description(item: MomentItem) -> &'static str {
    match item {
        MomentItem::ProductExpansion => "s_g·s_f expands over the fibers of s and f",
        MomentItem::CrossMoment => "E[s_f s_g] equals Σ_b q_g(b)² q_b",
        MomentItem::PointwiseSquares => "squares of s_f and s_g are step functions of the squared levels",
        MomentItem::SecondMoments => "second moments are weighted sums of squared levels",
        MomentItem::Monotonicity => "coarsening does not increase the second moment",
        MomentItem::GapIdentity => "the second-moment gap equals the mean-square increment",
    }
}

/// Second-moment identities on random refinement triples, the worked
/// uniform-4 instance, and gap telescoping along random chains.
pub fn moments<S: Scalar>(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut g = Gen::new(seed);
    let mut props: Vec<PropertyReport> = MomentItem::ALL
        .iter()
        .map(|&item| PropertyReport::new(item.id(), moment_description(item)))
        .collect();
    let mut worked = PropertyReport::new("worked-instance", "uniform-4, pairing, X = (0,1,2,3): gap 1/4");
    let mut telescoping = PropertyReport::new(
        "gap-telescoping",
        "gaps add along chains and the total stays below r² − (E X)²",
    );

    for t in 0..trials {
        let triple = g.refinement_triple::<S>(8);
        for check in moment_identities(&triple)? {
            let p = &mut props[MomentItem::ALL.iter().position(|&i| i == check.item).expect("known item")];
            p.record(check.holds, || {
                format!(
                    "trial {t}{}: {} vs {}",
                    check.part.map(|s| format!(" ({s})")).unwrap_or_default(),
                    check.lhs,
                    check.rhs
                )
            });
        }

        let k = g.size(1, 5) as u32;
        let levels = g.size(2, 4);
        let d = g.refining_chain::<S>(k, levels);
        let r = g.bound::<S>();
        let top = d.top().expect("chain has a top").space().clone();
        let x = g.bounded_rv(&top, &r);
        let m = induced_martingale(&x, &d)?;
        let order = d.chain_order()?;
        let (first, last) = (order[0], order[order.len() - 1]);
        let total = second_moment_gap(&m, first, last)?;
        let stepwise = order
            .windows(2)
            .map(|w| second_moment_gap(&m, w[0], w[1]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(S::zero(), |a, b| a + b);
        let mean = x.expectation();
        let cap = r.clone() * r - mean.clone() * mean;
        telescoping.record(total.approx_eq(&stepwise) && total.approx_le(&cap), || {
            format!("trial {t}: total {total}, sum of steps {stepwise}, cap {cap}")
        });
    }

    let u4 = FiniteProbSpace::<S>::uniform(4).into_ref();
    let u2 = FiniteProbSpace::<S>::uniform(2).into_ref();
    let x = FiniteRandomVariable::new(u4.clone(), (0..4).map(|k| S::from_ratio(k, 1)).collect())?;
    let pairing = MeasurePreservingMap::new(u4.clone(), u2, vec![0, 0, 1, 1])?;
    let x1 = x.cond_exp(&pairing)?.pull_back(&pairing)?;
    let triple = RefinementTriple::new(x.clone(), MeasurePreservingMap::identity(u4), pairing)?;
    let gap = moment_identities(&triple)?
        .into_iter()
        .find(|c| c.item == MomentItem::GapIdentity)
        .expect("gap identity is always checked");
    let quarter = S::from_ratio(1, 4);
    let msq = x.mean_square_distance(&x1)?;
    worked.record(
        gap.holds && gap.lhs.approx_eq(&quarter) && msq.approx_eq(&quarter),
        || format!("gap {} vs {}, E[(X − X₁∘s)²] = {msq}", gap.lhs, gap.rhs),
    );

    props.push(worked);
    props.push(telescoping);
    Ok(SuiteReport {
        suite: "moments",
        backend: S::NAME,
        seed,
        properties: props,
    })
}

/// Density correspondence: round trips, isometry, and the naturality
/// square with conditional expectation.
pub fn naturality<S: Scalar>(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut g = Gen::new(seed);
    let mut roundtrip = PropertyReport::new("rn-roundtrip", "rho(dμ/dP) = μ and d(rho f)/dP = f");
    let mut isometry = PropertyReport::new("rho-isometry", "tv(rho f, rho g) = ‖f − g‖₁");
    let mut square = PropertyReport::new("naturality-square", "pushforward(rho g, s) = rho(E[g | s])");
    let mut defining = PropertyReport::new(
        "cond-exp-defining-property",
        "E[g | s] integrates like g over every pulled-back subset",
    );
    let mut bounded = PropertyReport::new("bound-preservation", "g ≤ r implies E[g | s] ≤ r");

    for t in 0..trials {
        let space = g.space::<S>(2, 8);
        let r = g.bound::<S>();
        let mu = g.bounded_measure(&space, &r);
        let back = FiniteMeasure::rho(&mu.rn_derivative());
        let f = g.bounded_rv(&space, &r);
        let f_back = FiniteMeasure::rho(&f).rn_derivative();
        let residual = back.tv_distance(&mu)? + f_back.l1_distance(&f)?;
        roundtrip.record(residual.approx_zero(), || format!("trial {t}: residual {residual}"));

        let h = g.bounded_rv(&space, &r);
        let tv = FiniteMeasure::rho(&f).tv_distance(&FiniteMeasure::rho(&h))?;
        let l1 = f.l1_distance(&h)?;
        isometry.record(tv.approx_eq(&l1), || format!("trial {t}: tv {tv}, l1 {l1}"));

        let s = g.quotient(&space, space.len());
        let cond = f.cond_exp(&s)?;
        let lhs = FiniteMeasure::rho(&f).pushforward(&s)?;
        let rhs = FiniteMeasure::rho(&cond);
        let gap = lhs.tv_distance(&rhs)?;
        square.record(gap.approx_zero(), || format!("trial {t}: square off by {gap}"));

        let worst = (0u64..1 << s.dst().len())
            .map(|mask| f.subset_residual(&cond, &s, mask))
            .fold(S::zero(), S::max_of);
        defining.record(worst.approx_zero(), || format!("trial {t}: residual {worst}"));
        bounded.record(cond.is_bounded_by(&r), || format!("trial {t}: sup {} above {r}", cond.sup()));
    }
    Ok(SuiteReport {
        suite: "naturality",
        backend: S::NAME,
        seed,
        properties: vec![roundtrip, isometry, square, defining, bounded],
    })
}

/// Lipschitz estimates in the map: composition, pushforward and
/// conditional expectation against the symmetric-difference distance.
pub fn lipschitz<S: Scalar>(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut g = Gen::new(seed);
    let mut composition = PropertyReport::new("map-composition", "d(g₁f₁, g₂f₂) ≤ d(g₁, g₂) + d(f₁, f₂)");
    let mut pushforward = PropertyReport::new("pushforward-lipschitz", "tv(f₁μ, f₂μ) ≤ r·d(f₁, f₂) for μ ≤ rP");
    let mut cond_exp = PropertyReport::new("cond-exp-lipschitz", "‖E[g | f₁] − E[g | f₂]‖₁ ≤ r·d(f₁, f₂) for g ≤ r");
    let mut disagreement = PropertyReport::new("distance-below-disagreement", "d(f₁, f₂) ≤ P(f₁ ≠ f₂)");

    for t in 0..trials {
        let omega = if t % 2 == 0 { g.tied_space::<S>(2, 8) } else { g.space::<S>(2, 8) };
        let (f1, f2) = g.parallel_maps(&omega, 6);
        let (g1, g2) = g.parallel_maps(f1.dst(), 6);
        let d_f = f1.distance(&f2)?;
        let d_g = g1.distance(&g2)?;
        let d_gf = f1.compose(&g1)?.distance(&f2.compose(&g2)?)?;
        composition.record(d_gf.approx_le(&(d_f.clone() + d_g.clone())), || {
            format!("trial {t}: {d_gf} > {d_f} + {d_g}")
        });

        let r = g.bound::<S>();
        let mu = g.bounded_measure(&omega, &r);
        let tv = mu.pushforward(&f1)?.tv_distance(&mu.pushforward(&f2)?)?;
        let allowed = r.clone() * d_f.clone();
        pushforward.record(tv.approx_le(&allowed), || format!("trial {t}: tv {tv} > {allowed}"));

        // The conditional expectations live on B; compare them there.
        let x = g.bounded_rv(&omega, &r);
        let l1 = x.cond_exp(&f1)?.l1_distance(&x.cond_exp(&f2)?)?;
        cond_exp.record(l1.approx_le(&allowed), || format!("trial {t}: l1 {l1} > {allowed}"));

        let mass = f1.disagreement_mass(&f2)?;
        disagreement.record(d_f.approx_le(&mass), || format!("trial {t}: d {d_f} > P(f₁ ≠ f₂) {mass}"));
    }
    Ok(SuiteReport {
        suite: "lipschitz",
        backend: S::NAME,
        seed,
        properties: vec![composition, pushforward, cond_exp, disagreement],
    })
}

/// Metric constructions on random spaces: axioms of every result, the
/// curry/uncurry round trip, and the product and coequalizer factorizations.
pub fn metric<S: Scalar>(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut g = Gen::new(seed);
    let mut axioms = PropertyReport::new(
        "construction-axioms",
        "products, coproducts, (co)equalizers, tensors, homs, scalings and reflections are pseudometrics",
    );
    let mut structure = PropertyReport::new(
        "structure-maps",
        "projections, inclusions and quotients are 1-Lipschitz; equalizer inclusions and coproduct inclusions are isometric",
    );
    let mut curry_rt = PropertyReport::new("curry-roundtrip", "uncurry(curry h) = h and curry h is 1-Lipschitz");
    let mut factor = PropertyReport::new(
        "universal-factorization",
        "cones factor through the product and coequalizing maps through the quotient",
    );

    for t in 0..trials {
        let x = g.metric_space::<S>(1, 4);
        let y = g.metric_space::<S>(1, 4);
        let f = g.lipschitz_map(&x, &y);
        let h = if t % 2 == 0 { f.clone() } else { g.lipschitz_map(&x, &y) };

        let prod = metcat::product(&[x.clone(), y.clone()])?;
        let coprod = metcat::coproduct(&[x.clone(), y.clone()])?;
        let eq = metcat::equalizer(&f, &h)?;
        let coeq = metcat::coequalizer(&f, &h)?;
        let ten = metcat::tensor(&x, &y)?;
        let homs = metcat::hom(&x, &y, vec![f.clone(), h.clone()])?;
        let scaled = metcat::scale(&x, &S::from_ratio(3, 2))?;
        let refl = metcat::reflect(&y);
        let spaces = [
            ("product", &*prod.space),
            ("coproduct", &*coprod.space),
            ("equalizer", &*eq.space),
            ("coequalizer", &*coeq.space),
            ("tensor", &*ten.space),
            ("hom", &*homs.space),
            ("scale", &scaled),
            ("reflect", &*refl.space),
        ];
        let bad: Vec<String> = spaces
            .iter()
            .filter_map(|(name, s)| s.first_violation().map(|v| format!("{name}: {v}")))
            .collect();
        axioms.record(bad.is_empty() && refl.space.is_separated(), || {
            format!("trial {t}: {}", bad.join("; "))
        });

        let lipschitz_ok = prod
            .projections
            .iter()
            .chain(&coprod.inclusions)
            .chain([&eq.inclusion, &coeq.quotient, &refl.quotient])
            .all(|m| m.lipschitz_violation().is_none());
        let isometric_ok = eq.inclusion.is_isometric() && coprod.inclusions.iter().all(LipschitzMap::is_isometric);
        structure.record(lipschitz_ok && isometric_ok, || format!("trial {t}: structure map check failed"));

        let z = g.metric_space::<S>(1, 3);
        let k = g.lipschitz_map(&ten.space, &z);
        let rt = metcat::curry(&ten, &k).and_then(|c| {
            c.map.check_lipschitz()?;
            metcat::uncurry(&ten, c.family())
        });
        curry_rt.record(matches!(&rt, Ok(back) if *back == k), || format!("trial {t}: {rt:?}"));

        let src = g.metric_space::<S>(1, 4);
        let a = g.lipschitz_map(&src, &x);
        let b = g.lipschitz_map(&src, &y);
        let tuple_ok = prod.tuple(&[a.clone(), b.clone()]).is_ok_and(|u| {
            u.compose(&prod.projections[0]).is_ok_and(|m| m == a)
                && u.compose(&prod.projections[1]).is_ok_and(|m| m == b)
        });
        let q = coeq.quotient.clone();
        let through = g.lipschitz_map(&coeq.space, &z);
        let w = q.compose(&through)?;
        let coeq_ok = coeq
            .factor(&w)
            .is_ok_and(|u| q.compose(&u).is_ok_and(|m| m == w));
        factor.record(tuple_ok && coeq_ok, || format!("trial {t}: tuple {tuple_ok}, coequalizer {coeq_ok}"));
    }
    Ok(SuiteReport {
        suite: "metric",
        backend: S::NAME,
        seed,
        properties: vec![axioms, structure, curry_rt, factor],
    })
}

/// Reconstruction of random bounded variables from their induced
/// martingales on refining chains.
pub fn reconstruction<S: Scalar>(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut g = Gen::new(seed);
    let mut limit = PropertyReport::new("martingale-limit", "the limit of the induced martingale of X is X");
    for t in 0..trials {
        let k = g.size(1, 6) as u32;
        let levels = g.size(1, 4);
        let d = g.refining_chain::<S>(k, levels);
        let r = g.bound::<S>();
        let top = d.top().expect("chain has a top").space().clone();
        let x = g.bounded_rv(&top, &r);
        let back = martingale_limit(&induced_martingale(&x, &d)?)?;
        let err = back.l1_distance(&x)?;
        limit.record(err.approx_zero(), || format!("trial {t}: l1 error {err}"));
    }
    Ok(SuiteReport {
        suite: "reconstruction",
        backend: S::NAME,
        seed,
        properties: vec![limit],
    })
}
