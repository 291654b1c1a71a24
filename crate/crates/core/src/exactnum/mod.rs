//! Exact rational arithmetic, polynomials over the rationals, and certified
//! real-root counting with Sturm chains.

mod poly;
mod rational;
mod sturm;

pub use num_rational::BigRational;
pub use poly::RatPoly;
pub use rational::{format_rational, parse_rational, rat, rational_serde, rational_to_f64};
pub use sturm::{
    certify_positive, count_real_roots, count_roots_between, isolate_roots, Bound, IsolatedRoot,
    PositivityCertificate, RootCount, SturmChain, Witness,
};
