//! Quantum Rabi model `h_z/2 s_z + w a^dag a + g_tilde s_x (a + a^dag)` on a photon window.
//!
//! The parity `(-1)^n s_z` is conserved, so the window splits into two chains
//! `|up, n> - |down, n + 1> - |up, n + 2> - ...` and its partner.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{PrftError, Result};
use crate::fock::chebyshev::{self, Chain};
use crate::fock::two_mode::check_leakage;
use crate::fock::window::{gaussian_amplitudes, FockWindow, MIN_WIDTH_SIGMAS};
use crate::linalg::{CMat, CVec};
use crate::system::PhotonMode;

const EDGE_SITES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub h_z: f64,
    pub omega: f64,
    pub g_tilde: f64,
    pub alpha: f64,
    pub semiclassical: bool,
}

impl RabiParams {
    pub fn exact(h_z: f64, omega: f64, g: f64, alpha: f64) -> Self {
        RabiParams { h_z, omega, g_tilde: g / alpha, alpha, semiclassical: false }
    }

    pub fn semiclassical(h_z: f64, omega: f64, g: f64) -> Self {
        RabiParams { h_z, omega, g_tilde: g, alpha: 1.0, semiclassical: true }
    }

    /// `<s', n + 1 | H | s, n>` for `s' = -s`.
    fn link(&self, n: i64) -> f64 {
        if self.semiclassical { self.g_tilde * self.alpha } else { self.g_tilde * ((n + 1) as f64).sqrt() }
    }
}

/// Amplitudes `amps[n - lo] = [psi(up, n), psi(down, n)]`.
#[derive(Debug, Clone)]
pub struct SingleModeState {
    pub window: FockWindow,
    pub amps: Vec<[C64; 2]>,
    pub t: f64,
}

impl SingleModeState {
    pub fn from_product(matter: &CVec, first: i64, a: &[C64], window: FockWindow) -> Result<Self> {
        if matter.len() != 2 {
            return Err(PrftError::DimensionMismatch("Rabi model needs a two-level matter state".into()));
        }
        if first < window.lo || first + a.len() as i64 - 1 > window.hi {
            return Err(PrftError::WindowTooSmall("photon support exceeds the evolution window".into()));
        }
        let mut amps = vec![[C64::new(0.0, 0.0); 2]; window.len()];
        for (i, &x) in a.iter().enumerate() {
            let site = (first + i as i64 - window.lo) as usize;
            amps[site] = [matter[0] * x, matter[1] * x];
        }
        Ok(SingleModeState { window, amps, t: 0.0 })
    }

    pub fn gaussian(matter: &CVec, mode: PhotonMode, pad: i64) -> Result<Self> {
        let w = FockWindow::gaussian(&mode, MIN_WIDTH_SIGMAS)?;
        let a = gaussian_amplitudes(&mode, w)?;
        Self::from_product(matter, w.lo, &a, w.padded(pad, pad)?)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).sum()
    }

    pub fn photon_marginal(&self) -> (i64, Vec<f64>) {
        (self.window.lo, self.amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).collect())
    }

    pub fn reduced_matter_density(&self) -> CMat {
        let mut rho = CMat::zeros(2, 2);
        for a in &self.amps {
            for r in 0..2 {
                for c in 0..2 {
                    rho[(r, c)] += a[r] * a[c].conj();
                }
            }
        }
        rho
    }

    fn edge_weights(&self) -> (f64, f64) {
        let k = EDGE_SITES.min(self.amps.len());
        let w = |s: &[[C64; 2]]| s.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).sum::<f64>();
        (w(&self.amps[..k]), w(&self.amps[self.amps.len() - k..]))
    }
}

/// Spin index carried by chain `parity` at window site `i`.
fn spin_at(parity: usize, i: usize) -> usize {
    (i + parity) % 2
}

fn chain(params: &RabiParams, window: FockWindow, parity: usize, center: f64) -> Chain {
    let len = window.len();
    let diag = (0..len)
        .map(|i| {
            let n = window.lo + i as i64;
            let sz = if spin_at(parity, i) == 0 { 1.0 } else { -1.0 };
            sz * params.h_z / 2.0 + params.omega * (n as f64 - center)
        })
        .collect();
    let off = (0..len - 1).map(|i| params.link(window.lo + i as i64)).collect();
    Chain { diag, off }
}

pub fn evolve_rabi_fock<F>(params: &RabiParams, state: &SingleModeState, times: &[f64], mut observe: F) -> Result<()>
where
    F: FnMut(&SingleModeState) -> Result<()>,
{
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < state.t) {
        return Err(PrftError::InvalidInput("times must be sorted and not before the state time".into()));
    }
    let w = state.window;
    let center = 0.5 * (w.lo + w.hi) as f64;
    let chains = [chain(params, w, 0, center), chain(params, w, 1, center)];
    let mut cur = state.clone();
    let mut parts: Vec<Vec<C64>> = (0..2)
        .map(|p| (0..w.len()).map(|i| cur.amps[i][spin_at(p, i)]).collect())
        .collect();
    for &t in times {
        let dt = t - cur.t;
        parts.par_iter_mut().enumerate().for_each(|(p, v)| chebyshev::evolve(&chains[p], v, dt));
        for (p, v) in parts.iter().enumerate() {
            for (i, &z) in v.iter().enumerate() {
                cur.amps[i][spin_at(p, i)] = z;
            }
        }
        cur.t = t;
        let (lo, hi) = cur.edge_weights();
        // with exact elements the vacuum is a true boundary
        let lo = if !params.semiclassical && w.lo == 0 { 0.0 } else { lo };
        check_leakage(lo, hi)?;
        observe(&cur)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, c};

    #[test]
    fn matches_dense_hamiltonian() {
        let p = RabiParams::exact(1.0, 1.3, 0.4, 3.0);
        let w = FockWindow::new(0, 24).unwrap();
        let matter = CVec::from_column_slice(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let a: Vec<C64> = (0..5).map(|n| c(1.0 / (n as f64 + 1.0), 0.1 * n as f64)).collect();
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let a: Vec<C64> = a.iter().map(|z| z / norm).collect();
        let s = SingleModeState::from_product(&matter, 2, &a, w).unwrap();
        // dense H on (n, s) with index 2n + s
        let d = 2 * w.len();
        let mut h = CMat::zeros(d, d);
        for n in 0..w.len() {
            h[(2 * n, 2 * n)] = c(0.5 + 1.3 * n as f64, 0.0);
            h[(2 * n + 1, 2 * n + 1)] = c(-0.5 + 1.3 * n as f64, 0.0);
            if n + 1 < w.len() {
                let x = p.g_tilde * ((n + 1) as f64).sqrt();
                for sp in 0..2 {
                    h[(2 * n + sp, 2 * (n + 1) + 1 - sp)] = c(x, 0.0);
                    h[(2 * (n + 1) + 1 - sp, 2 * n + sp)] = c(x, 0.0);
                }
            }
        }
        let mut psi0 = CVec::zeros(d);
        for n in 0..w.len() {
            psi0[2 * n] = s.amps[n][0];
            psi0[2 * n + 1] = s.amps[n][1];
        }
        let t = 1.7;
        let psi = linalg::expm_hermitian(&h, t) * psi0;
        evolve_rabi_fock(&p, &s, &[t], |st| {
            for n in 0..w.len() {
                // global phase from the shifted diagonal does not matter for densities
                assert!((st.amps[n][0].norm() - psi[2 * n].norm()).abs() < 1e-11);
            }
            let rho = st.reduced_matter_density();
            let mut rho_dense = CMat::zeros(2, 2);
            for n in 0..w.len() {
                for r in 0..2 {
                    for q in 0..2 {
                        rho_dense[(r, q)] += psi[2 * n + r] * psi[2 * n + q].conj();
                    }
                }
            }
            assert!(linalg::max_abs(&(rho - rho_dense)) < 1e-11);
            Ok(())
        })
        .unwrap();
    }
}
