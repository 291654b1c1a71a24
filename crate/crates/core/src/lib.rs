//! Certified computations around weighted inequalities for the logarithmic
//! coefficients of univalent functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: exact rationals, rational polynomials and Sturm chains.
//! * [`weights`]: weight sequences `p_n`, their differences and convexity
//!   certificates.
//! * [`jacobi`]: exact Jacobi polynomials `P_j^{(α,β)}`.
//! * [`certifier`]: the `Q_k` positivity pipeline and the stored tables.
//! * [`debranges`]: the triangular linear ODE system behind `Q_k`.
//! * [`hpreal`] and [`constants`]: ball arithmetic and the sharp constants.
//! * [`series`]: truncated power series, logarithmic coefficients and the
//!   `U`-operator identities.
//! * [`radius`]: the radius equations and their curves.
//!
//! What is verified here is the certification machinery, the sharp constants,
//! the Koebe equality cases and finite-order instances of the coefficient
//! identities. Inequalities quantified over the whole class of univalent
//! functions are theorems, not something a computation can check.

pub mod certifier;
pub mod constants;
pub mod debranges;
mod error;
pub mod exactnum;
pub mod hpreal;
pub mod jacobi;
pub mod radius;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
pub use exactnum::{BigRational, RatPoly};
pub use hpreal::HpReal;
