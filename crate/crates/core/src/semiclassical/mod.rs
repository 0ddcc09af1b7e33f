//! Generalized propagators `U_chi(t)` and photon-resolved operators.

pub mod integrator;
pub mod jc;
mod propagators;
mod resolved;

pub use integrator::{matrix_power, propagate, Evolver, IntegratorSpec};
pub use propagators::{propagate_generalized, ChiSampling, GeneralizedPropagatorSet};
pub use resolved::{fock_projector_expectation, photon_resolved_operators, PhotonResolved};
