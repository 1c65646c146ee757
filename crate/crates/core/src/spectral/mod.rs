//! Truncated model of the gauge spectral triple: orthogonal bases, `D`, the
//! module trace through rank-one decompositions, singular-value profiles
//! and the exact condition evaluators.

mod checks;
mod profile;
mod theta;
mod truncation;

pub use truncation::{build_dirac, build_truncation, graph_model, path_generators, vertex_of, DiracOperator, Truncation};
pub use theta::{decompose_projection, semifinite_trace, vertex_block_traces, ThetaSum};
pub use profile::{singular_profile, vertex_masses, whole_masses, zeta_residue, BlockMasses, SpectralProfile};
pub use checks::{
    closedness_eval, commutant_probe, first_order_check, reality_check_1graph, spin_c_generation_check,
    ClosednessRecord, ClosednessRoute, CommutantReport, FirstOrderReport, RealityReport, SpinCReport,
};
