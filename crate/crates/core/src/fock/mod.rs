//! Number-resolved reference dynamics for benchmarking the semiclassical theory.

pub mod chebyshev;
mod rabi;
mod two_mode;
mod window;

pub use rabi::{evolve_rabi_fock, RabiParams, SingleModeState};
pub use two_mode::{evolve_two_mode_jc, Block, BlockState, TwoModeJcParams, BLOCK_DROP_TOL, LEAKAGE_TOL};
pub use window::{gaussian_amplitudes, FockWindow, MIN_WIDTH_SIGMAS};

use crate::linalg::{self, CMat};

/// Either oracle state.
#[derive(Debug, Clone)]
pub enum FockEnsemble {
    SingleMode(SingleModeState),
    TwoMode(BlockState),
}

impl FockEnsemble {
    pub fn norm_sqr(&self) -> f64 {
        match self {
            FockEnsemble::SingleMode(s) => s.norm_sqr(),
            FockEnsemble::TwoMode(s) => s.norm_sqr(),
        }
    }

    pub fn photon_marginal(&self, mode: usize) -> (i64, Vec<f64>) {
        match self {
            FockEnsemble::SingleMode(s) => s.photon_marginal(),
            FockEnsemble::TwoMode(s) => s.photon_marginal(mode),
        }
    }

    pub fn reduced_matter_density(&self) -> CMat {
        match self {
            FockEnsemble::SingleMode(s) => s.reduced_matter_density(),
            FockEnsemble::TwoMode(s) => s.reduced_matter_density(),
        }
    }

    pub fn purity(&self) -> f64 {
        purity(&self.reduced_matter_density())
    }
}

pub fn purity(rho: &CMat) -> f64 {
    (rho * rho).trace().re
}

/// Cumulants `kappa_1..kappa_4` of a distribution `(first n, p)`.
pub fn distribution_cumulants(first: i64, p: &[f64]) -> [f64; 4] {
    let total: f64 = p.iter().sum();
    let mean = p.iter().enumerate().map(|(i, &x)| x * (first + i as i64) as f64).sum::<f64>() / total;
    let mut c = [0.0; 5];
    for (i, &x) in p.iter().enumerate() {
        let d = (first + i as i64) as f64 - mean;
        c[2] += x * d * d;
        c[3] += x * d * d * d;
        c[4] += x * d * d * d * d;
    }
    for v in c.iter_mut() {
        *v /= total;
    }
    [mean, c[2], c[3], c[4] - 3.0 * c[2] * c[2]]
}

/// Bloch vector `(<s_x>, <s_y>, <s_z>)` of a two-level density matrix.
pub fn bloch_vector(rho: &CMat) -> [f64; 3] {
    let e = |op: CMat| (op * rho).trace().re;
    [e(linalg::sigma_x()), e(linalg::sigma_y()), e(linalg::sigma_z())]
}
