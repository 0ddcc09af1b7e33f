//! Consistency checks that hold for every driven system and initial state.

use num_complex::Complex64 as C64;

use crate::counting::cumulants::{cumulants, CumulantMethod};
use crate::counting::mgf::{dynamical_mgf, GeneratingFunctionSamples};
use crate::error::Result;
use crate::linalg::{self, CVec};
use crate::semiclassical::{propagate, propagate_generalized, ChiSampling, IntegratorSpec};
use crate::system::DrivenSystem;

/// `max |M(-chi) - M(chi)*|` over the sampling.
pub fn conjugation_defect(m: &GeneratingFunctionSamples) -> f64 {
    let s = m.sampling;
    (0..s.len())
        .map(|j| (m.values[s.mirror(j)] - m.values[j].conj()).norm())
        .fold(0.0, f64::max)
}

/// Counting-field step for mean transfers at time `t`: small enough that `log M`
/// stays on one branch for transfer rates up to order one per unit time.
pub fn mean_stencil(t: f64) -> ChiSampling {
    ChiSampling::Stencil { h: 1e-3 / (1.0 + t / 100.0), half_width: 8 }
}

/// Mean photon change of every mode, `[time][mode]`.
pub fn mean_photon_changes(sys: &DrivenSystem, psi: &CVec, times: &[f64], spec: &IntegratorSpec) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![vec![0.0; sys.n_modes()]; times.len()];
    for (ti, &t) in times.iter().enumerate() {
        for k in 0..sys.n_modes() {
            let set = propagate_generalized(sys, k, mean_stencil(t), &[t], spec)?;
            out[ti][k] = cumulants(&dynamical_mgf(&set, 0, psi)?, 1, CumulantMethod::FiniteDifference)?[0];
        }
    }
    Ok(out)
}

/// `sum_k w_k dn_k + <H(t)>_t - <H(0)>_0` for one time, given the evolved state and the
/// mean photon changes: the photon energy gained equals the work done on the matter system.
pub fn energy_current_defect(sys: &DrivenSystem, psi: &CVec, evolved: &CVec, t: f64, dn: &[f64]) -> f64 {
    let phases = sys.phases();
    let e0 = linalg::expectation(&sys.hamiltonian(0.0, &phases), psi).re;
    let et = linalg::expectation(&sys.hamiltonian(t, &phases), evolved).re;
    let photons: f64 = sys.modes().iter().zip(dn).map(|(m, d)| m.omega * d).sum();
    photons + et - e0
}

/// For rotating-wave two-level models: `sum_k dn_k + d<(1 + s_z)/2>`, which vanishes
/// because every absorbed photon raises the matter system once.
pub fn excitation_defect(psi: &CVec, evolved: &CVec, dn: &[f64]) -> f64 {
    dn.iter().sum::<f64>() + evolved[0].norm_sqr() - psi[0].norm_sqr()
}

pub fn energy_current_defects(sys: &DrivenSystem, psi: &CVec, times: &[f64], spec: &IntegratorSpec) -> Result<Vec<f64>> {
    let us = propagate(sys, &sys.phases(), times, spec)?;
    let means = mean_photon_changes(sys, psi, times, spec)?;
    Ok(times
        .iter()
        .zip(us.iter().zip(&means))
        .map(|(&t, (u, dn))| energy_current_defect(sys, psi, &(u * psi), t, dn))
        .collect())
}

pub fn excitation_defects(sys: &DrivenSystem, psi: &CVec, times: &[f64], spec: &IntegratorSpec) -> Result<Vec<f64>> {
    let us = propagate(sys, &sys.phases(), times, spec)?;
    let means = mean_photon_changes(sys, psi, times, spec)?;
    Ok(us.iter().zip(&means).map(|(u, dn)| excitation_defect(psi, &(u * psi), dn)).collect())
}

/// `|M(0) - 1|`.
pub fn normalisation_defect(m: &GeneratingFunctionSamples) -> f64 {
    (m.at_zero() - C64::new(1.0, 0.0)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::MatterState;

    #[test]
    fn energy_current_in_rabi_and_three_mode() {
        let spec = IntegratorSpec::default();
        let psi = MatterState::spin_up();
        let times = [0.7, 3.1, 12.0];
        let sys = DrivenSystem::rabi(1.0, 1.3, 0.8, 0.4).unwrap();
        for d in energy_current_defects(&sys, psi.vector(), &times, &spec).unwrap() {
            assert!(d.abs() < 1e-8, "{d}");
        }
        let sys = DrivenSystem::three_mode_rabi().unwrap();
        for d in energy_current_defects(&sys, psi.vector(), &times, &spec).unwrap() {
            assert!(d.abs() < 1e-8, "{d}");
        }
    }

    #[test]
    fn excitations_conserved_in_two_mode_jc() {
        let spec = IntegratorSpec::default();
        let sys = DrivenSystem::two_mode_jc(1.0, 0.9, [0.2, 0.1], [0.0, 1.0]).unwrap();
        let psi = MatterState::from_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        for d in excitation_defects(&sys, psi.vector(), &[0.5, 20.0, 150.0], &spec).unwrap() {
            assert!(d.abs() < 1e-8, "{d}");
        }
    }
}
