//! Closed forms for one- and two-mode Jaynes-Cummings drives.
//!
//! In the frame rotating with `U0 = exp(-i w sz t / 2)` the generalized
//! Hamiltonian is time independent, `H = (h_z - w)/2 sz + s+ G + s- G*` with
//! `G = sum_k g_k e^{-i chi_k}`, so `U = cos(E t) - i sin(E t) sigma_chi`
//! with `E = sqrt((h_z - w)^2 + 16 |G|^2) / 2` and `sigma_chi = H / E`.

use num_complex::Complex64 as C64;

use crate::linalg::{self, CMat, I};

pub fn coupling_sum(g: &[f64], chi: &[f64]) -> C64 {
    g.iter().zip(chi).map(|(&gk, &ck)| C64::from_polar(gk, -ck)).sum()
}

pub fn rotating_hamiltonian(h_z: f64, omega: f64, big_g: C64) -> CMat {
    linalg::sigma_z() * C64::new((h_z - omega) / 2.0, 0.0)
        + linalg::sigma_plus() * big_g
        + linalg::sigma_minus() * big_g.conj()
}

pub fn energy(h_z: f64, omega: f64, g_abs: f64) -> f64 {
    0.5 * ((h_z - omega).powi(2) + 16.0 * g_abs * g_abs).sqrt()
}

/// Polar angle of the rotation axis: `tan(theta) = 4 |G| / (h_z - w)`.
pub fn mixing_angle(h_z: f64, omega: f64, g_abs: f64) -> f64 {
    (4.0 * g_abs).atan2(h_z - omega)
}

fn rotating_propagator(h_z: f64, omega: f64, big_g: C64, t: f64) -> CMat {
    let e = energy(h_z, omega, big_g.norm());
    let h = rotating_hamiltonian(h_z, omega, big_g);
    let (s, c) = (e * t).sin_cos();
    let axis = if e > 0.0 { h / C64::new(e, 0.0) } else { CMat::zeros(2, 2) };
    CMat::identity(2, 2) * C64::new(c, 0.0) - axis * (I * s)
}

/// Rotating-frame `U_chi(t)` of the single-mode drive.
pub fn jc_propagator(h_z: f64, omega: f64, g: f64, chi: f64, t: f64) -> CMat {
    rotating_propagator(h_z, omega, coupling_sum(&[g], &[chi]), t)
}

/// Rotating-frame `U_chi(t)` of the two-mode drive with a shared frequency.
pub fn two_mode_jc_propagator(h_z: f64, omega: f64, g: [f64; 2], chi: [f64; 2], t: f64) -> CMat {
    rotating_propagator(h_z, omega, coupling_sum(&g, &chi), t)
}

/// `exp(-i w sz t / 2) U`, the Schroedinger-picture propagator.
pub fn to_lab_frame(u: &CMat, omega: f64, t: f64) -> CMat {
    let p = C64::from_polar(1.0, -omega * t / 2.0);
    let mut out = u.clone();
    for j in 0..2 {
        out[(0, j)] *= p;
        out[(1, j)] *= p.conj();
    }
    out
}

/// Rotating-frame quasienergies `-E, +E` of the two-mode drive.
pub fn two_mode_quasienergies(h_z: f64, omega: f64, g: [f64; 2], chi: [f64; 2]) -> [f64; 2] {
    let e = energy(h_z, omega, coupling_sum(&g, &chi).norm());
    [-e, e]
}

/// `dE/dphi_1` of the `+E` branch: `4 g1 g2 sin(phi_2 - phi_1) / E`.
pub fn two_mode_energy_slope(h_z: f64, omega: f64, g: [f64; 2], phases: [f64; 2]) -> f64 {
    let e = energy(h_z, omega, coupling_sum(&g, &phases).norm());
    4.0 * g[0] * g[1] * (phases[1] - phases[0]).sin() / e
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn resonant_quarter_period() {
        // E = 2 g at resonance; at t = pi / (4 g) only the sigma_chi part survives
        let g = 0.3;
        let u = jc_propagator(1.0, 1.0, g, 0.0, PI / (4.0 * g));
        let expect = linalg::sigma_x() * (-I);
        assert!(linalg::max_abs(&(u - expect)) < 1e-14);
    }

    #[test]
    fn occupations() {
        let (hz, w, g, t) = (1.0, 0.7, 0.2, 3.3);
        let u = jc_propagator(hz, w, g, 0.0, t);
        let e = energy(hz, w, g);
        let th = mixing_angle(hz, w, g);
        let up = u.column(0);
        let p_stay = (e * t).cos().powi(2) + th.cos().powi(2) * (e * t).sin().powi(2);
        assert!((up[0].norm_sqr() - p_stay).abs() < 1e-14);
        assert!((up[1].norm_sqr() - th.sin().powi(2) * (e * t).sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let (hz, w, g) = (1.0, 0.9, [0.2, 0.13]);
        let ph = [0.3, 1.4];
        let d = 1e-5;
        let e = |p: f64| two_mode_quasienergies(hz, w, g, [p, ph[1]])[1];
        let fd = (e(ph[0] + d) - e(ph[0] - d)) / (2.0 * d);
        assert!((fd - two_mode_energy_slope(hz, w, g, ph)).abs() < 1e-9);
    }
}
