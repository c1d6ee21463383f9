//! Exact polyhomogeneous expansions and scattering asymptotics for
//! asymptotically hyperbolic metrics (dx² + h(x))/x² on the flat torus.

pub mod algebra;
pub mod checks;
pub mod error;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod perturbation;
pub mod poisson;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
