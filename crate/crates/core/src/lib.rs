//! Fractional differential equations solved by decomposition into an
//! integer-order ODE plus inverse Abel-integral relations.

// `!(x > 0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decompose;
pub mod error;
pub mod fracops;
pub mod gamma;
pub mod oracle;
pub mod problem;
pub mod scalar;
pub mod series;
pub mod stepper;

pub use decompose::{build, classify, DecomposedSystem, Inversion, Subclass};
pub use error::{Error, Result};
pub use fracops::{DiscreteOperator, OperatorOrder};
pub use problem::{Forcing, FracTerm, PiecewiseForcing, Polynomial, ProblemSpec};
pub use scalar::Real;
pub use series::SampleSeries;
pub use stepper::{solve, EulerSweep, SolverConfig, Trajectory};

pub type Series = SampleSeries<f64>;
pub type Problem = ProblemSpec<f64>;
pub type System = DecomposedSystem<f64>;
pub type Config = SolverConfig<f64>;
pub type Solution = Trajectory<f64>;
