//! Hermite functions, Gauss–Hermite quadrature and truncated expansions.

pub mod expansion;
pub mod functions;
pub mod quadrature;
pub mod sampled;

pub use expansion::{analyze, check_degree, HermiteExpansion, Ladder};
pub use functions::{hermite_eval, hermite_function, hermite_functions, MAX_AXIS_DEGREE};
pub use quadrature::{gauss_hermite_rule, QuadratureRule};
pub use sampled::SampledFunction;
