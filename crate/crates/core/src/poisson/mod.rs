//! Formal Poisson expansion, its poles in ζ, and scattering symbols.

mod einstein;
mod expansion;
mod symbols;

pub use einstein::{
    einstein_log_recursion, log_term_action, residue_trace_check, EinsteinLog, ResidueLevel, ResidueTraceReport,
};
pub use expansion::{exceptional_log_coefficient, gz_expand, gz_expand_with, PoissonExpansion, PoleEntry};
pub use symbols::{
    mode_symbol, mso_limit, mso_symbol, residue_relation_check, s_tilde_factorization, scattering_symbol,
    symbol_constant, symbol_residue_at_n, Provenance, ResidueRelation, ScalarValue, ScatteringValue,
};
