//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure or time overrun.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use catprob::diagram::{DyadicGround, MomentItem};
use catprob::gen::Gen;
use catprob::metcat::{coequalizer, FinPseudometricSpace, LipschitzMap};
use catprob::suite::{self, SuiteReport};
use catprob::{
    induced_martingale, kolmogorov_extend, make_dyadic, martingale_limit, rn_family, second_moment_gap,
    ConsistentMeasureFamily, Distance, FiniteMeasure, FiniteRandomVariable, Rational, Scalar,
};

type Q = Rational;

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
        }
    }
}

fn q(n: i64, d: u64) -> Q {
    Q::from_ratio(n, d)
}

fn suite_outcome(report: &SuiteReport) -> Outcome {
    let trials: usize = report.properties.iter().map(|p| p.trials).sum();
    if report.passed() {
        Outcome::new(true, format!("{} checks", trials))
    } else {
        let mut detail = format!("failed {:?}", report.failed_ids());
        for p in report.properties.iter().filter(|p| !p.passed()) {
            for e in &p.examples {
                detail.push_str(&format!("\n    {}: {e}", p.id));
            }
        }
        Outcome::new(false, detail)
    }
}

/// Every set partition of `0..n`, as block indices per element.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn go(i: usize, blocks: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur[i] = b;
            go(i + 1, blocks.max(b + 1), cur, out);
        }
    }
    go(0, 0, &mut cur, &mut out);
    out
}

/// `sup over partitions of Σ_A |μ(A) − ν(A)|`.
fn partition_tv(mu: &FiniteMeasure<Q>, nu: &FiniteMeasure<Q>) -> Q {
    let n = mu.mass().len();
    set_partitions(n)
        .into_iter()
        .map(|blocks| {
            let count = blocks.iter().max().map_or(0, |m| m + 1);
            (0..count)
                .map(|b| {
                    let atoms: Vec<usize> = (0..n).filter(|&a| blocks[a] == b).collect();
                    let d = mu.measure_of(atoms.iter().copied()) - nu.measure_of(atoms.iter().copied());
                    if d < q(0, 1) { -d } else { d }
                })
                .fold(q(0, 1), |a, b| a + b)
        })
        .max()
        .unwrap_or_else(|| q(0, 1))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rn_roundtrip() -> Outcome {
    let mut g = Gen::new(SEED);
    for t in 0..1000 {
        let space = g.space::<Q>(1, 8);
        let r = g.bound::<Q>();
        let mu = g.bounded_measure(&space, &r);
        if FiniteMeasure::rho(&mu.rn_derivative()) != mu {
            return Outcome::new(false, format!("exact instance {t}"));
        }
    }
    let mut g = Gen::new(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let space = g.space::<f64>(1, 8);
        let r = g.bound::<f64>();
        let mu = g.bounded_measure(&space, &r);
        let back = FiniteMeasure::rho(&mu.rn_derivative());
        worst = worst.max(max_abs_diff(back.mass(), mu.mass()));
    }
    Outcome::new(worst <= 1e-12, format!("exact 1000/1000, float residual {worst:e}"))
}

fn rho_isometry() -> Outcome {
    let mut g = Gen::new(SEED + 1);
    for t in 0..1000 {
        let space = g.space::<Q>(1, 8);
        let r = g.bound::<Q>();
        let (f, h) = (g.bounded_rv(&space, &r), g.bounded_rv(&space, &r));
        let tv = FiniteMeasure::rho(&f).tv_distance(&FiniteMeasure::rho(&h)).unwrap();
        if tv != f.l1_distance(&h).unwrap() {
            return Outcome::new(false, format!("pair {t}: tv {tv}"));
        }
    }
    let mut spaces = 0;
    for t in 0..400 {
        let space = g.space::<Q>(1, 4);
        let r = g.bound::<Q>();
        let (mu, nu) = (g.bounded_measure(&space, &r), g.bounded_measure(&space, &r));
        let (tv, sup) = (mu.tv_distance(&nu).unwrap(), partition_tv(&mu, &nu));
        if tv != sup {
            return Outcome::new(false, format!("partition check {t}: tv {tv}, sup {sup}"));
        }
        spaces += 1;
    }
    Outcome::new(true, format!("1000 pairs, {spaces} partition-enumeration checks"))
}

fn naturality_square() -> Outcome {
    let mut g = Gen::new(SEED + 2);
    for t in 0..1000 {
        let space = g.space::<Q>(1, 8);
        let r = g.bound::<Q>();
        let f = g.bounded_rv(&space, &r);
        let s = g.quotient(&space, space.len());
        let lhs = FiniteMeasure::rho(&f).pushforward(&s).unwrap();
        let rhs = FiniteMeasure::rho(&f.cond_exp(&s).unwrap());
        if lhs != rhs {
            return Outcome::new(false, format!("instance {t}"));
        }
    }
    Outcome::new(true, "1000 instances")
}

fn second_moments() -> Outcome {
    let report = suite::moments::<Q>(SEED + 3, 500).unwrap();
    let mut out = suite_outcome(&report);
    let items = MomentItem::ALL.iter().all(|i| report.property(i.id()).is_some_and(|p| p.trials >= 500));
    let worked = report.property("worked-instance").is_some_and(|p| p.trials == 1 && p.passed());
    out.ok &= items && worked;
    out.detail.push_str(", worked instance gap 1/4");
    out
}

fn dyadic_rate() -> Outcome {
    let ground = DyadicGround::<Q>::identity();
    for n in 0..=12u32 {
        let err = catprob::dyadic_error(&ground, n);
        let oracle = q(1, 1u64 << (n + 2));
        if err != oracle {
            return Outcome::new(false, format!("depth {n}: {err} ≠ {oracle}"));
        }
    }
    let fground = DyadicGround::<f64>::identity();
    let exp = make_dyadic(&fground, 12).unwrap();
    let order = exp.diagram.chain_order().unwrap();
    let levels: Vec<f64> = order
        .windows(2)
        .map(|w| second_moment_gap(&exp.martingale, w[0], w[1]).unwrap())
        .collect();
    let x0 = exp.martingale.level(order[0]).second_moment();
    // E[(f − X_12)²] for f(ω) = ω is the variance of a uniform interval of length 2^{-12}.
    let tail = 4f64.powi(-12) / 12.0;
    let total: f64 = levels.iter().sum::<f64>() + tail;
    let target = fground.second_moment() - x0;
    let residual = (total - target).abs();
    Outcome::new(
        residual <= 1e-12,
        format!("depths 0-12 exact, telescoping residual {residual:e}"),
    )
}

fn reconstruction() -> Outcome {
    let mut g = Gen::new(SEED + 5);
    for t in 0..500 {
        let k = g.size(0, 6) as u32;
        let levels = g.size(0, 4);
        let d = g.refining_chain::<Q>(k, levels);
        let r = g.bound::<Q>();
        let x = g.bounded_rv(d.top().unwrap().space(), &r);
        if martingale_limit(&induced_martingale(&x, &d).unwrap()).unwrap() != x {
            return Outcome::new(false, format!("instance {t}"));
        }
    }
    Outcome::new(true, "500 instances")
}

fn extension() -> Outcome {
    let mut g = Gen::new(SEED + 6);
    for t in 0..500 {
        let k = g.size(0, 6) as u32;
        let levels = g.size(0, 4);
        let d = g.refining_chain::<Q>(k, levels);
        let r = g.bound::<Q>();
        let mu = g.bounded_measure(d.top().unwrap().space(), &r);
        let fam = ConsistentMeasureFamily::restrictions(&mu, &d, r).unwrap();
        let ext = kolmogorov_extend(&fam).unwrap();
        if ext != mu {
            return Outcome::new(false, format!("instance {t}: extension differs"));
        }
        let lhs: FiniteRandomVariable<Q> = ext.rn_derivative();
        let rhs = martingale_limit(&rn_family(&fam).unwrap()).unwrap();
        if lhs != rhs {
            return Outcome::new(false, format!("instance {t}: square does not commute"));
        }
    }
    Outcome::new(true, "500 families")
}

fn lipschitz() -> Outcome {
    suite_outcome(&suite::lipschitz::<Q>(SEED + 7, 1000).unwrap())
}

fn metric() -> Outcome {
    let report = suite::metric::<Q>(SEED + 8, 200).unwrap();
    let mut out = suite_outcome(&report);
    let fin = |n: i64| Distance::Finite(q(n, 1));
    let y = FinPseudometricSpace::new(
        vec!["a", "b", "c"],
        vec![vec![fin(0), fin(2), fin(3)], vec![fin(2), fin(0), fin(1)], vec![fin(3), fin(1), fin(0)]],
    )
    .unwrap()
    .into_ref();
    let x = FinPseudometricSpace::point().into_ref();
    let f = LipschitzMap::constant(x.clone(), y.clone(), 0).unwrap();
    let h = LipschitzMap::constant(x, y, 1).unwrap();
    let c = coequalizer(&f, &h).unwrap();
    let d = c.space.d(c.quotient.image(0), c.quotient.image(2)).clone();
    out.ok &= d == fin(1) && c.space.is_pseudometric();
    out.detail.push_str(&format!(", d([a],[c]) = {}", d));
    out
}

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("density round trip", 5, rn_roundtrip),
        ("isometry of rho", 10, rho_isometry),
        ("naturality square", 5, naturality_square),
        ("second-moment identities", 5, second_moments),
        ("dyadic convergence rate", 10, dyadic_rate),
        ("martingale reconstruction", 10, reconstruction),
        ("extension and density square", 10, extension),
        ("Lipschitz estimates", 20, lipschitz),
        ("metric constructions", 5, metric),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let ok = out.ok && in_time;
        failed += usize::from(!ok);
        println!(
            "{} criterion {}: {name} ({}; {:.2}s of {limit}s)",
            if ok { "PASS" } else { "FAIL" },
            n + 1,
            out.detail,
            elapsed.as_secs_f64(),
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
