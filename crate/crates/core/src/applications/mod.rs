//! Decoherence times, GHZ-enhanced splittings and the remote-entanglement protocol.

mod protocol;
mod units;

pub use protocol::{protocol_analytic, protocol_simulate, ProtocolParams, ProtocolReport};
pub use units::{parse_quantity, Dimension, FrequencyConvention, Quantity, EPS0, HBAR};

use crate::error::{PrftError, Result};

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(PrftError::InvalidInput(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Matter purity of `c1|u1> + c2|u2>` after the conditioned photon distributions drift
/// apart at rates `d1`, `d2` from an initial number variance `variance`.
pub fn purity_prediction(c1: f64, c2: f64, d1: f64, d2: f64, variance: f64, t: f64) -> Result<f64> {
    positive("variance", variance)?;
    let (p1, p2) = (c1 * c1, c2 * c2);
    if ((p1 + p2) - 1.0).abs() > 1e-9 {
        return Err(PrftError::InvalidInput(format!("|c1|^2 + |c2|^2 = {} != 1", p1 + p2)));
    }
    let gap = d2 - d1;
    Ok(0.5 * (1.0 + (p1 - p2).powi(2)) + 2.0 * p1 * p2 * (-gap * gap * t * t / (2.0 * variance)).exp())
}

/// Mean photon number of a closed mode with field amplitude `e_field` in volume `volume`.
pub fn closed_mode_photons(e_field: f64, volume: f64, omega: f64) -> f64 {
    EPS0 * e_field * e_field * volume / (2.0 * HBAR * omega)
}

/// One driving mode of a closed system: angular frequency and the differences
/// `dE_mu/dphi_k - dE_nu/dphi_k` (rad/s) between the branches of a superposition.
#[derive(Debug, Clone)]
pub struct ClosedMode {
    pub omega: f64,
    pub derivative_gaps: Vec<f64>,
}

/// `min sqrt(n_k) / |dE'|` over modes and branch pairs.
pub fn coherence_time_closed(e_field: f64, volume: f64, modes: &[ClosedMode]) -> Result<f64> {
    positive("field amplitude", e_field)?;
    positive("volume", volume)?;
    let mut best = f64::INFINITY;
    for m in modes {
        positive("mode frequency", m.omega)?;
        let sigma = closed_mode_photons(e_field, volume, m.omega).sqrt();
        for &gap in &m.derivative_gaps {
            if gap != 0.0 {
                best = best.min(sigma / gap.abs());
            }
        }
    }
    Ok(best)
}

/// `P / (hbar w dE'^2)` for a travelling wave of power `power`.
pub fn coherence_time_traveling(power: f64, omega: f64, derivative_gap: f64) -> Result<f64> {
    positive("power", power)?;
    positive("frequency", omega)?;
    if derivative_gap == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(power / (HBAR * omega * derivative_gap * derivative_gap))
}

/// Collective splitting of an `n_atoms` GHZ state.
pub fn ghz_enhanced_splitting(n_atoms: usize, single: f64) -> f64 {
    n_atoms as f64 * single
}

/// Peak separation `N_A Omega_R t_p` of the photon-number peaks after one pulse.
pub fn peak_separation(n_atoms: usize, rabi: f64, pulse: f64) -> f64 {
    n_atoms as f64 * rabi * pulse
}

/// Width added by loss and re-amplification, `sqrt(2 gamma d P t_p / (hbar w))`.
pub fn loss_broadening(attenuation: f64, distance: f64, power: f64, pulse: f64, omega: f64) -> f64 {
    (2.0 * attenuation * distance * power * pulse / (HBAR * omega)).sqrt()
}

/// Rate at which separation equals broadening, `N_A^2 Omega_R^2 hbar w / (2 gamma P d)`.
/// `attenuation * distance` must be dimensionless.
pub fn transfer_rate(n_atoms: usize, rabi: f64, omega: f64, power: f64, attenuation: f64, distance: f64) -> Result<f64> {
    positive("rabi frequency", rabi)?;
    positive("frequency", omega)?;
    positive("power", power)?;
    positive("attenuation", attenuation)?;
    positive("distance", distance)?;
    if n_atoms == 0 {
        return Err(PrftError::InvalidInput("at least one atom is required".into()));
    }
    let na = n_atoms as f64;
    Ok(na * na * rabi * rabi * HBAR * omega / (2.0 * attenuation * power * distance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separation_equals_broadening_at_transfer_rate() {
        let (na, rabi, omega, p, g, d) = (12, 40e6, 2.0 * std::f64::consts::PI * 400e12, 10e-6, 0.051, 500.0);
        let f = transfer_rate(na, rabi, omega, p, g, d).unwrap();
        let tp = 1.0 / f;
        let sep = peak_separation(na, rabi, tp);
        let width = loss_broadening(g, d, p, tp, omega);
        assert!((sep - width).abs() < 1e-9 * sep);
    }

    #[test]
    fn closed_and_traveling_limits() {
        let t = coherence_time_traveling(1.0, 1e15, 1e6).unwrap();
        assert!((t - 1.0 / (HBAR * 1e15 * 1e12)).abs() < 1e-9 * t);
        let m = ClosedMode { omega: 1e15, derivative_gaps: vec![2e6, -4e6, 0.0] };
        let tc = coherence_time_closed(100.0, 1e-9, &[m]).unwrap();
        assert!((tc - closed_mode_photons(100.0, 1e-9, 1e15).sqrt() / 4e6).abs() < 1e-12 * tc);
    }
}
