use num_complex::Complex64 as C64;

use crate::error::{PrftError, Result};
use crate::floquet::FloquetSolution;
use crate::linalg::CVec;
use crate::semiclassical::{ChiSampling, GeneralizedPropagatorSet};

#[derive(Debug, Clone)]
pub struct GeneratingFunctionSamples {
    pub sampling: ChiSampling,
    pub mode: usize,
    pub t: f64,
    pub values: Vec<C64>,
}

impl GeneratingFunctionSamples {
    pub fn at_zero(&self) -> C64 {
        self.values[self.sampling.center()]
    }

    /// Value `j` sampling steps from zero.
    pub fn step(&self, j: i64) -> Option<C64> {
        self.sampling.index(j).map(|i| self.values[i])
    }
}

fn check_state(set: &GeneralizedPropagatorSet, psi: &CVec) -> Result<()> {
    if psi.len() != set.dim() {
        return Err(PrftError::DimensionMismatch(format!(
            "state of dimension {} for propagators of dimension {}",
            psi.len(),
            set.dim()
        )));
    }
    Ok(())
}

/// `M(chi) = 1/2 <U_phi^dag U_{phi+chi} + U_{phi-chi}^dag U_phi>` on the sampling of `set`.
pub fn dynamical_mgf(set: &GeneralizedPropagatorSet, time_index: usize, psi: &CVec) -> Result<GeneratingFunctionSamples> {
    check_state(set, psi)?;
    let us = set.at_time(time_index);
    let s = set.sampling;
    let base = set.base(time_index) * psi;
    let evolved: Vec<CVec> = us.iter().map(|u| u * psi).collect();
    let values: Vec<C64> = (0..s.len())
        .map(|j| 0.5 * (base.dotc(&evolved[j]) + evolved[s.mirror(j)].dotc(&base)))
        .collect();
    let out = GeneratingFunctionSamples { sampling: s, mode: set.mode, t: set.times[time_index], values };
    let m0 = out.at_zero();
    if (m0 - 1.0).norm() > 1e-12 * psi.norm_squared().max(1.0) {
        return Err(PrftError::Invariant(format!("M(0) = {m0}, expected 1")));
    }
    Ok(out)
}

/// Sampling needed for the propagators of [`standard_fcs_mgf`]: half the step of `target`.
pub fn standard_fcs_sampling(target: ChiSampling) -> Result<ChiSampling> {
    Ok(match target {
        ChiSampling::Grid(g) => ChiSampling::Grid(crate::system::CountingGrid::new(2 * g.len())?),
        ChiSampling::Stencil { h, half_width } => ChiSampling::Stencil { h: h / 2.0, half_width },
    })
}

/// Two-point projective surrogate `<U_{phi-chi/2}^dag U_{phi+chi/2}>`, from propagators
/// sampled with [`standard_fcs_sampling`].
pub fn standard_fcs_mgf(half_set: &GeneralizedPropagatorSet, time_index: usize, psi: &CVec) -> Result<GeneratingFunctionSamples> {
    check_state(half_set, psi)?;
    let us = half_set.at_time(time_index);
    let (target, pairs): (ChiSampling, Vec<(usize, usize)>) = match half_set.sampling {
        ChiSampling::Grid(g) => {
            let n = g.len() / 2;
            let target = ChiSampling::Grid(crate::system::CountingGrid::new(n)?);
            (target, (0..n).map(|j| (j, g.mirror(j))).collect())
        }
        ChiSampling::Stencil { h, half_width } => {
            let hs = half_set.sampling;
            let w = half_width as i64;
            let target = ChiSampling::Stencil { h: 2.0 * h, half_width };
            (target, (-w..=w).map(|j| (hs.index(j).unwrap(), hs.index(-j).unwrap())).collect())
        }
    };
    let values = pairs
        .into_iter()
        .map(|(plus, minus)| (&us[minus] * psi).dotc(&(&us[plus] * psi)))
        .collect();
    Ok(GeneratingFunctionSamples { sampling: target, mode: half_set.mode, t: half_set.times[time_index], values })
}

/// Long-time generating function from continued quasienergies:
/// `M = sum_mu w_mu / 2 (e^{i(E_mu(phi) - E_mu(phi+chi)) t} + e^{i(E_mu(phi-chi) - E_mu(phi)) t})`.
pub fn asymptotic_statistics(sol: &FloquetSolution, weights: &[f64], t: f64) -> Result<GeneratingFunctionSamples> {
    if weights.len() != sol.dim() {
        return Err(PrftError::DimensionMismatch(format!("{} weights for {} Floquet states", weights.len(), sol.dim())));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 || weights.iter().any(|&w| w < 0.0) {
        return Err(PrftError::InvalidInput(format!("Floquet weights must be a distribution, sum = {total}")));
    }
    let s = sol.sampling;
    let e0 = sol.reference_energies();
    let values = (0..s.len())
        .map(|j| {
            let ej = &sol.quasienergies[j];
            let em = &sol.quasienergies[s.mirror(j)];
            weights
                .iter()
                .enumerate()
                .map(|(mu, &w)| {
                    0.5 * w * (C64::from_polar(1.0, (e0[mu] - ej[mu]) * t) + C64::from_polar(1.0, (em[mu] - e0[mu]) * t))
                })
                .sum()
        })
        .collect();
    Ok(GeneratingFunctionSamples { sampling: s, mode: sol.mode, t, values })
}
