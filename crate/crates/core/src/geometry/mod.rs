//! Metric data and the geometric operators built from it.

mod laplace;
mod metric;
mod normal_form;
mod operator;

pub use laplace::{
    half_density_conjugate, half_density_conjugate_by_substitution, half_density_potential, laplace_h, laplacian, tau,
    trace_dxh, Op,
};
pub use metric::{Correction, MetricExpansion};
pub use normal_form::{normal_form_solve, NormalForm};
pub use operator::{DifferentialOperatorSeries, OpKey};
