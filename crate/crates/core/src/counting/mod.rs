//! Moment generating functions, cumulants and quasiprobabilities of the
//! photon-number change in the counted mode.

mod cumulants;
pub mod invariants;
mod mgf;
mod quasi;

pub use cumulants::{complex_cumulants, cumulants, fornberg_weights, moments_to_cumulants, CumulantMethod};
pub use mgf::{
    asymptotic_statistics, dynamical_mgf, standard_fcs_mgf, standard_fcs_sampling, GeneratingFunctionSamples,
};
pub use quasi::{convolve, quasiprobabilities, redistribute, Quasiprobabilities, NEGATIVITY_TOL};
