//! N-body choreographies on p-limaçon curves under harmonic potentials.
//!
//! Bodies `k = 0 … N-1` follow `q(t + 2πk/N)` on the curve
//! `q(t) = a(cos t, sin t) + b(cos pt, sin pt)` and interact through
//! `V = ½ Σ_{j<l} κ_{jl} |q_j - q_l|²` with couplings depending only on the
//! cyclic index separation. The crate decides which `(p, N)` admit such a
//! motion, solves for the couplings, and checks the result against two
//! independent integrators, the conserved quantities and a collision analysis.

pub mod admissibility;
pub mod cli;
pub mod coefficients;
pub mod collisions;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod kinematics;
pub mod report;
pub mod vec2;

pub use admissibility::{
    divisor_blockset, is_admissible, is_admissible_restricted, AdmissibilityDecision,
    RestrictedCase, Violation,
};
pub use coefficients::{
    build_matrix, det_mt, fold_matrix, residual, restricted_from_mass_charge, solve_couplings,
    solve_restricted, CoefficientMatrix, CouplingVector, RestrictedCoupling,
};
pub use collisions::{collision_ratios, has_collision, min_pair_distance, CollisionReport};
pub use constants::{
    closed_form_constants, drift_report, measure, partial_sums, potential_from_parts,
    potential_parts, ConservedReport, PartialSumReport, PotentialParts,
};
pub use dynamics::{accel, build_interaction, rk4_integrate, spectral_propagate, InteractionSpec};
pub use error::{ChoreoError, Result};
pub use kinematics::{
    analytic_accel, body_state, curve_point, eom_residual, initial_state, sample_trajectory,
    ChoreoConfig, CurveParams, SystemState, Trajectory,
};
pub use vec2::Vec2;
