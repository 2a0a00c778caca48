//! Finite models of probability spaces, measures, random variables,
//! filtrations and extended pseudometric spaces.
//!
//! Everything is generic over a [`Scalar`]: [`Rational`] for exact
//! arithmetic, `f64` or `f32` for speed. The aliases below fix the backend.
//!
//! ```
//! use catprob::{ExactMeasure, ExactSpace, Rational, Scalar};
//!
//! let space = ExactSpace::uniform(2).into_ref();
//! let half = Rational::from_ratio(1, 2);
//! let mu = ExactMeasure::new(space, vec![half.clone(), Rational::from_ratio(3, 2)]).unwrap();
//! let density = mu.rn_derivative();
//! assert_eq!(density.values(), [Rational::from_ratio(1, 1), Rational::from_ratio(3, 1)]);
//! assert_eq!(catprob::rho(&density), mu);
//! ```

pub mod diagram;
pub mod error;
pub mod finmeas;
pub mod finprob;
pub mod finrv;
pub mod gen;
pub mod io;
pub mod metcat;
pub mod scalar;
pub mod suite;

pub use diagram::{
    cauchy_certificate, dyadic_error, induced_martingale, is_martingale, kolmogorov_extend, make_dyadic,
    martingale_limit, moment_identities, rn_family, second_moment_gap, ConsistentMeasureFamily, DyadicGround,
    FiltrationDiagram, Martingale,
};
pub use error::{Error, Result};
pub use finmeas::{rho, rn_derivative, FiniteMeasure};
pub use finprob::{FiniteProbSpace, MeasurePreservingMap, SpaceRef};
pub use finrv::FiniteRandomVariable;
pub use metcat::{Distance, FinPseudometricSpace, LipschitzMap};
pub use scalar::{Rational, Scalar};

pub type ExactSpace = FiniteProbSpace<Rational>;
pub type ExactMap = MeasurePreservingMap<Rational>;
pub type ExactMeasure = FiniteMeasure<Rational>;
pub type ExactRv = FiniteRandomVariable<Rational>;
pub type ExactDiagram = FiltrationDiagram<Rational>;
pub type ExactMartingale = Martingale<Rational>;
pub type ExactMetricSpace = FinPseudometricSpace<Rational>;

pub type FloatSpace = FiniteProbSpace<f64>;
pub type FloatMap = MeasurePreservingMap<f64>;
pub type FloatMeasure = FiniteMeasure<f64>;
pub type FloatRv = FiniteRandomVariable<f64>;
pub type FloatDiagram = FiltrationDiagram<f64>;
pub type FloatMartingale = Martingale<f64>;
pub type FloatMetricSpace = FinPseudometricSpace<f64>;
