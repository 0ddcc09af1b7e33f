//! Driven matter system, photonic initial states and counting grids.
//!
//! Sign conventions used throughout the crate:
//! mode k contributes `g_k (L_k e^{-i(w_k t + p_k)} + h.c.)` to the semiclassical
//! Hamiltonian, where `L_k` is the matter operator multiplying the annihilator `a_k`.
//! For a hermitian coupling `L_k = H_k` this is `2 g_k H_k cos(w_k t + p_k)`; for a
//! rotating-wave coupling `L_k = sigma_+` it is the Jaynes-Cummings form.
//! The phase parameter `p_k` is the photonic phase `phi_k` plus the counting field.
//! A coherent photonic state with phase `phi` has Fock amplitudes `a_n ~ |a_n| e^{-i phi n}`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{PrftError, Result};
use crate::linalg::{self, CMat, CVec, I};

pub const MAX_MATTER_DIM: usize = 64;
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// `L = H_k`, hermitian; quantum coupling `H_k (a + a^dagger)`.
    Hermitian,
    /// Quantum coupling `L a + L^dagger a^dagger`.
    RotatingWave,
}

#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub omega: f64,
    /// Semiclassical coupling `g = g_tilde * alpha`.
    pub g: f64,
    pub phase: f64,
    pub op: CMat,
    pub kind: CouplingKind,
}

impl ModeSpec {
    pub fn hermitian(omega: f64, g: f64, phase: f64, h_k: CMat) -> Self {
        ModeSpec { omega, g, phase, op: h_k, kind: CouplingKind::Hermitian }
    }

    pub fn rotating_wave(omega: f64, g: f64, phase: f64, lowering: CMat) -> Self {
        ModeSpec { omega, g, phase, op: lowering, kind: CouplingKind::RotatingWave }
    }

    pub fn from_quantum(omega: f64, g_tilde: f64, alpha: f64, phase: f64, op: CMat, kind: CouplingKind) -> Self {
        ModeSpec { omega, g: g_tilde * alpha, phase, op, kind }
    }
}

#[derive(Debug, Clone)]
pub struct DrivenSystem {
    h0: CMat,
    modes: Vec<ModeSpec>,
}

impl DrivenSystem {
    pub fn new(h0: CMat, modes: Vec<ModeSpec>) -> Result<Self> {
        let d = h0.nrows();
        if d == 0 || d != h0.ncols() {
            return Err(PrftError::DimensionMismatch(format!("H0 is {}x{}", h0.nrows(), h0.ncols())));
        }
        if d > MAX_MATTER_DIM {
            return Err(PrftError::InvalidInput(format!("matter dimension {d} exceeds {MAX_MATTER_DIM}")));
        }
        if modes.is_empty() {
            return Err(PrftError::InvalidInput("at least one photonic mode is required".into()));
        }
        let defect = linalg::hermiticity_defect(&h0);
        if defect > HERMITICITY_TOL {
            return Err(PrftError::NonHermitian(format!("H0 defect {defect:e}")));
        }
        if h0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PrftError::InvalidInput("H0 has non-finite entries".into()));
        }
        for (k, m) in modes.iter().enumerate() {
            if m.op.nrows() != d || m.op.ncols() != d {
                return Err(PrftError::DimensionMismatch(format!(
                    "mode {k} operator is {}x{}, matter dimension is {d}",
                    m.op.nrows(),
                    m.op.ncols()
                )));
            }
            if !(m.omega > 0.0) || !m.omega.is_finite() {
                return Err(PrftError::InvalidInput(format!("mode {k}: omega must be positive, got {}", m.omega)));
            }
            if !m.g.is_finite() || !m.phase.is_finite() {
                return Err(PrftError::InvalidInput(format!("mode {k}: non-finite coupling or phase")));
            }
            if m.kind == CouplingKind::Hermitian {
                let defect = linalg::hermiticity_defect(&m.op);
                if defect > HERMITICITY_TOL {
                    return Err(PrftError::NonHermitian(format!("mode {k} coupling defect {defect:e}")));
                }
            }
        }
        Ok(DrivenSystem { h0, modes })
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn h0(&self) -> &CMat {
        &self.h0
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.phase).collect()
    }

    /// Phase parameters `phi + chi e_k`.
    pub fn shifted_phases(&self, mode: usize, chi: f64) -> Vec<f64> {
        let mut p = self.phases();
        p[mode] += chi;
        p
    }

    /// `H(t)` with explicit phase parameters in place of the photonic phases.
    pub fn hamiltonian(&self, t: f64, phases: &[f64]) -> CMat {
        let mut h = self.h0.clone();
        for (m, &p) in self.modes.iter().zip(phases) {
            let e = C64::from_polar(m.g, -(m.omega * t + p));
            h += &m.op * e + m.op.adjoint() * e.conj();
        }
        h
    }

    /// Explicit time derivative of `H(t)`.
    pub fn hamiltonian_dt(&self, t: f64, phases: &[f64]) -> CMat {
        let d = self.dim();
        let mut h = CMat::zeros(d, d);
        for (m, &p) in self.modes.iter().zip(phases) {
            let e = C64::from_polar(m.g, -(m.omega * t + p)) * (-I * m.omega);
            h += &m.op * e + m.op.adjoint() * e.conj();
        }
        h
    }

    /// Common period of all drive frequencies, if they are commensurate with
    /// denominators up to `max_den` at relative tolerance `tol`.
    pub fn common_period(&self, tol: f64, max_den: u64) -> Result<f64> {
        let omegas: Vec<f64> = self.modes.iter().map(|m| m.omega).collect();
        let wbar = common_frequency(&omegas, tol, max_den)?;
        Ok(2.0 * PI / wbar)
    }

    pub fn period(&self) -> Result<f64> {
        self.common_period(1e-9, 64)
    }

    /// Shortest drive period, used to bound the integrator step.
    pub fn shortest_period(&self) -> f64 {
        let wmax = self.modes.iter().map(|m| m.omega).fold(0.0, f64::max);
        2.0 * PI / wmax
    }

    /// Single-mode Jaynes-Cummings drive `h_z/2 sz + g (s+ e^{-i(wt+phi)} + h.c.)`.
    pub fn jc(h_z: f64, omega: f64, g: f64, phase: f64) -> Result<Self> {
        Self::new(
            linalg::sigma_z() * C64::new(h_z / 2.0, 0.0),
            vec![ModeSpec::rotating_wave(omega, g, phase, linalg::sigma_plus())],
        )
    }

    /// Semiclassical Rabi drive `h_z/2 sz + 2 g sx cos(wt + phi)`.
    pub fn rabi(h_z: f64, omega: f64, g: f64, phase: f64) -> Result<Self> {
        Self::new(
            linalg::sigma_z() * C64::new(h_z / 2.0, 0.0),
            vec![ModeSpec::hermitian(omega, g, phase, linalg::sigma_x())],
        )
    }

    pub fn two_mode_jc(h_z: f64, omega: f64, g: [f64; 2], phases: [f64; 2]) -> Result<Self> {
        Self::new(
            linalg::sigma_z() * C64::new(h_z / 2.0, 0.0),
            (0..2)
                .map(|k| ModeSpec::rotating_wave(omega, g[k], phases[k], linalg::sigma_plus()))
                .collect(),
        )
    }

    pub fn multi_mode_rabi(h_z: f64, omegas: &[f64], g: &[f64], phases: &[f64]) -> Result<Self> {
        if omegas.len() != g.len() || g.len() != phases.len() {
            return Err(PrftError::DimensionMismatch("mode parameter lists differ in length".into()));
        }
        Self::new(
            linalg::sigma_z() * C64::new(h_z / 2.0, 0.0),
            (0..omegas.len())
                .map(|k| ModeSpec::hermitian(omegas[k], g[k], phases[k], linalg::sigma_x()))
                .collect(),
        )
    }

    /// The three-mode Rabi benchmark, in units of `omega_1`.
    pub fn three_mode_rabi() -> Result<Self> {
        Self::multi_mode_rabi(2.1, &[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], &[0.5, 0.25, 0.5])
    }
}

/// Largest `w` with every `omegas[k] / w` an integer, found through rational
/// approximation of the frequency ratios.
pub fn common_frequency(omegas: &[f64], tol: f64, max_den: u64) -> Result<f64> {
    let w0 = omegas[0];
    let mut fracs = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let r = w / w0;
        let (p, q) = best_rational(r, max_den);
        if ((p as f64 / q as f64) - r).abs() > tol * r.abs().max(1.0) {
            return Err(PrftError::Incommensurate(format!(
                "ratio {r} has no rational approximation with denominator <= {max_den}"
            )));
        }
        fracs.push((p, q));
    }
    let l = fracs.iter().fold(1u64, |acc, &(_, q)| lcm(acc, q));
    let nums: Vec<u64> = fracs.iter().map(|&(p, q)| p * (l / q)).collect();
    let g = nums.iter().fold(0u64, |acc, &n| gcd(acc, n));
    Ok(w0 / l as f64 * g as f64)
}

fn best_rational(x: f64, max_den: u64) -> (u64, u64) {
    // continued fraction convergents
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut y = x;
    let mut best = (x.round().max(1.0) as u64, 1u64);
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as u64;
        let h2 = ai.saturating_mul(h1).saturating_add(h0);
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den || k2 == 0 {
            break;
        }
        best = (h2, k2);
        if (h2 as f64 / k2 as f64 - x).abs() < 1e-15 * x.abs() {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = y - a;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    best
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Normalised matter state.
#[derive(Debug, Clone)]
pub struct MatterState(CVec);

impl MatterState {
    pub fn new(v: CVec) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(PrftError::InvalidInput("matter state has zero or non-finite norm".into()));
        }
        Ok(MatterState(v / C64::new(n, 0.0)))
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVec::from_row_slice(amps))
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVec::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        MatterState(v)
    }

    pub fn spin_up() -> Self {
        Self::basis(2, 0)
    }

    pub fn spin_down() -> Self {
        Self::basis(2, 1)
    }

    pub fn vector(&self) -> &CVec {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Gaussian number-squeezed photonic mode: `|a_n|^2 ~ exp(-(n - mean)^2 / (2 variance))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonMode {
    pub mean: f64,
    pub variance: f64,
    pub phase: f64,
}

impl PhotonMode {
    pub fn coherent(mean: f64, phase: f64) -> Self {
        PhotonMode { mean, variance: mean, phase }
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance > 0.0) || !(self.mean > 0.0) {
            return Err(PrftError::InvalidInput(format!(
                "photonic mode needs positive mean and variance, got {} and {}",
                self.mean, self.variance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonicInitialState {
    pub modes: Vec<PhotonMode>,
}

impl PhotonicInitialState {
    /// Smallest standard deviation, which bounds the resolvable photon-number spread.
    pub fn min_sigma(&self) -> f64 {
        self.modes.iter().map(|m| m.sigma()).fold(f64::INFINITY, f64::min)
    }

    /// Initial number distribution of one mode on `mean +- width_sigmas * sigma`,
    /// returned as (first photon number, probabilities).
    pub fn number_distribution(&self, mode: usize, width_sigmas: f64) -> (i64, Vec<f64>) {
        let m = self.modes[mode];
        let s = m.sigma();
        let lo = ((m.mean - width_sigmas * s).floor() as i64).max(0);
        let hi = (m.mean + width_sigmas * s).ceil() as i64;
        let mut p: Vec<f64> = (lo..=hi)
            .map(|n| (-(n as f64 - m.mean).powi(2) / (2.0 * m.variance)).exp())
            .collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= z);
        (lo, p)
    }
}

/// Uniform grid `chi_j = 2 pi j / n` on the counting circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingGrid {
    n: usize,
}

impl CountingGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(PrftError::InvalidInput(format!("counting grid size must be even and >= 4, got {n}")));
        }
        Ok(CountingGrid { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.spacing() * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Index of `-chi_j`.
    pub fn mirror(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Largest photon transfer representable without aliasing.
    pub fn max_transfer(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    /// Smallest even grid resolving transfers up to `w` photons.
    pub fn for_transfer(w: usize) -> Self {
        let n = (2 * w + 2).next_power_of_two().max(4);
        CountingGrid { n }
    }
}

impl Default for CountingGrid {
    fn default() -> Self {
        CountingGrid { n: 256 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commensurate_frequencies() {
        let w = common_frequency(&[1.0, 2.0, 3.0], 1e-9, 64).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
        let w = common_frequency(&[2.0, 3.0], 1e-9, 64).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
        let w = common_frequency(&[1.5, 2.5], 1e-9, 64).unwrap();
        assert!((w - 0.5).abs() < 1e-14);
        assert!(common_frequency(&[1.0, 2f64.sqrt()], 1e-9, 64).is_err());
    }

    #[test]
    fn jc_hamiltonian_is_hermitian() {
        let s = DrivenSystem::two_mode_jc(1.0, 0.9, [0.2, 0.1], [0.3, 1.1]).unwrap();
        let h = s.hamiltonian(0.37, &s.phases());
        assert!(linalg::hermiticity_defect(&h) < 1e-15);
        // phase and time enter only through w t + p
        let p: Vec<f64> = s.phases().iter().map(|p| p + 0.9 * 0.2).collect();
        let h2 = s.hamiltonian(0.37 - 0.2, &p);
        assert!(linalg::max_abs(&(h - h2)) < 1e-14);
    }

    #[test]
    fn rabi_form() {
        let s = DrivenSystem::rabi(1.0, 2.0, 0.3, 0.4).unwrap();
        let t = 0.8;
        let h = s.hamiltonian(t, &s.phases());
        let expect = linalg::sigma_z() * C64::new(0.5, 0.0)
            + linalg::sigma_x() * C64::new(2.0 * 0.3 * (2.0 * t + 0.4).cos(), 0.0);
        assert!(linalg::max_abs(&(h - expect)) < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = CMat::from_row_slice(2, 2, &[C64::new(0., 0.), C64::new(1., 0.), C64::new(0., 0.), C64::new(0., 0.)]);
        assert!(DrivenSystem::new(bad.clone(), vec![ModeSpec::hermitian(1.0, 1.0, 0.0, linalg::sigma_x())]).is_err());
        assert!(DrivenSystem::new(linalg::sigma_z(), vec![ModeSpec::hermitian(1.0, 1.0, 0.0, bad)]).is_err());
        assert!(DrivenSystem::new(linalg::sigma_z(), vec![ModeSpec::hermitian(-1.0, 1.0, 0.0, linalg::sigma_x())]).is_err());
        assert!(CountingGrid::new(7).is_err());
    }
}
