//! Exact scalars and boundary functions on the flat torus.

mod boundary;
mod poly;
mod scalar;
mod zeta;

pub use boundary::{
    determinant, identity, invert_rational, is_positive_definite, quadratic_form, BoundaryFunction, BoundaryTensor,
    Frequency,
};
pub use poly::Poly;
pub use scalar::{gr, int, parse_rational, rat, rational_to_f64, ComplexScalar, GaussianRational, Rational, Scalar};
pub use zeta::{LaurentData, ZetaRational};
