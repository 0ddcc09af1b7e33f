//! Two-mode Jaynes-Cummings model in Fock space, block diagonal in the
//! excitation number `N = n1 + n2 + (1 + s_z) / 2`.
//!
//! Inside a block the states form a chain
//! `|dn, n1> - |up, n1> - |dn, n1 + 1> - ...` with `|dn, n1> = |down, n1, N - n1>`
//! and `|up, n1> = |up, n1, N - 1 - n1>`: mode 2 links `|dn, n1>` to `|up, n1>` and
//! mode 1 links `|up, n1>` to `|dn, n1 + 1>`.

use std::collections::HashMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{PrftError, Result};
use crate::fock::chebyshev::{self, Chain};
use crate::fock::window::{gaussian_amplitudes, FockWindow, MIN_WIDTH_SIGMAS};
use crate::linalg::{CMat, CVec};
use crate::system::PhotonMode;

pub const BLOCK_DROP_TOL: f64 = 1e-12;
pub const LEAKAGE_TOL: f64 = 1e-8;
const EDGE_SITES: usize = 4;

/// Quantum parameters; `semiclassical` replaces `sqrt(n_k)` by `alpha_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeJcParams {
    pub h_z: f64,
    pub omega: [f64; 2],
    pub g_tilde: [f64; 2],
    pub alpha: [f64; 2],
    pub semiclassical: bool,
}

impl TwoModeJcParams {
    /// Semiclassical-element model with effective couplings `g_k`.
    pub fn semiclassical(h_z: f64, omega: f64, g: [f64; 2]) -> Self {
        TwoModeJcParams { h_z, omega: [omega; 2], g_tilde: g, alpha: [1.0; 2], semiclassical: true }
    }

    /// Exact matrix elements with `g_tilde_k = g_k / alpha_k`.
    pub fn exact(h_z: f64, omega: f64, g: [f64; 2], alpha: [f64; 2]) -> Self {
        TwoModeJcParams {
            h_z,
            omega: [omega; 2],
            g_tilde: [g[0] / alpha[0], g[1] / alpha[1]],
            alpha,
            semiclassical: false,
        }
    }

    /// Amplitude `<up, n - 1 | H | down, n>` for mode `k` (sigma_+ carries the factor 2).
    fn link(&self, k: usize, n: i64) -> f64 {
        if n <= 0 && !self.semiclassical {
            return 0.0;
        }
        let m = if self.semiclassical { self.alpha[k] } else { (n as f64).sqrt() };
        2.0 * self.g_tilde[k] * m
    }

    fn chain(&self, n_ex: i64, lo: i64, len: usize) -> Chain {
        let mut diag = vec![0.0; 2 * len];
        let mut off = vec![0.0; 2 * len - 1];
        let [w1, w2] = self.omega;
        // semiclassical elements do not see the mode-2 vacuum
        let ok = |n2: i64| self.semiclassical || n2 >= 0;
        for i in 0..len {
            let n1 = lo + i as i64;
            let n2_dn = n_ex - n1;
            let n2_up = n_ex - 1 - n1;
            // energies relative to the block constant w2 * N
            if ok(n2_dn) {
                diag[2 * i] = -self.h_z / 2.0 + (w1 - w2) * n1 as f64;
                off[2 * i] = if ok(n2_up) { self.link(1, n2_dn) } else { 0.0 };
            }
            if ok(n2_up) {
                diag[2 * i + 1] = self.h_z / 2.0 + (w1 - w2) * n1 as f64 - w2;
                if 2 * i + 2 < 2 * len && ok(n_ex - (n1 + 1)) {
                    off[2 * i + 1] = self.link(0, n1 + 1);
                }
            }
        }
        Chain { diag, off }
    }
}

#[derive(Debug, Clone)]
pub struct Block {
    pub n_ex: i64,
    /// `[2i]` = `|down, lo + i>`, `[2i + 1]` = `|up, lo + i>`, without the phase `e^{-i w2 N t}`.
    pub amps: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct BlockState {
    pub window: FockWindow,
    pub blocks: Vec<Block>,
    pub t: f64,
    pub omega2: f64,
}

impl BlockState {
    /// Product state `matter (x) sum a1 |n1> (x) sum a2 |n2>`; `window` is the mode-1 range
    /// kept during evolution and must contain the mode-1 support.
    pub fn from_product(
        matter: &CVec,
        a1: (i64, &[C64]),
        a2: (i64, &[C64]),
        window: FockWindow,
        omega2: f64,
    ) -> Result<Self> {
        if matter.len() != 2 {
            return Err(PrftError::DimensionMismatch("two-mode JC needs a two-level matter state".into()));
        }
        let (f1, amp1) = a1;
        let (f2, amp2) = a2;
        if f1 < window.lo || f1 + amp1.len() as i64 - 1 > window.hi {
            return Err(PrftError::WindowTooSmall("mode-1 support exceeds the evolution window".into()));
        }
        let (up, dn) = (matter[0], matter[1]);
        let len = window.len();
        let n_lo = f1 + f2;
        let n_hi = f1 + amp1.len() as i64 - 1 + f2 + amp2.len() as i64;
        let a2_at = |n2: i64| -> C64 {
            let i = n2 - f2;
            if i < 0 || i as usize >= amp2.len() { C64::new(0.0, 0.0) } else { amp2[i as usize] }
        };
        let mut blocks = Vec::new();
        let mut total = 0.0;
        for n_ex in n_lo..=n_hi {
            let mut amps = vec![C64::new(0.0, 0.0); 2 * len];
            for (i1, &x1) in amp1.iter().enumerate() {
                let n1 = f1 + i1 as i64;
                let site = (n1 - window.lo) as usize;
                amps[2 * site] = dn * x1 * a2_at(n_ex - n1);
                amps[2 * site + 1] = up * x1 * a2_at(n_ex - 1 - n1);
            }
            let w: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if w > BLOCK_DROP_TOL {
                total += w;
                blocks.push(Block { n_ex, amps });
            }
        }
        let s = total.sqrt();
        for b in &mut blocks {
            b.amps.iter_mut().for_each(|z| *z /= s);
        }
        Ok(BlockState { window, blocks, t: 0.0, omega2 })
    }

    /// Gaussian number-squeezed modes on `+- 8 sigma`, with `pad` extra mode-1 states on each side.
    pub fn gaussian(matter: &CVec, modes: [PhotonMode; 2], pad: i64, omega2: f64) -> Result<Self> {
        let w1 = FockWindow::gaussian(&modes[0], MIN_WIDTH_SIGMAS)?;
        let w2 = FockWindow::gaussian(&modes[1], MIN_WIDTH_SIGMAS)?;
        let a1 = gaussian_amplitudes(&modes[0], w1)?;
        let a2 = gaussian_amplitudes(&modes[1], w2)?;
        Self::from_product(matter, (w1.lo, &a1), (w2.lo, &a2), w1.padded(pad, pad)?, omega2)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.amps.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Photon-number distribution of mode `k`; returns `(first n, p)`.
    pub fn photon_marginal(&self, k: usize) -> (i64, Vec<f64>) {
        let mut map: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
        for b in &self.blocks {
            for (idx, z) in b.amps.iter().enumerate() {
                let p = z.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let n1 = self.window.lo + (idx / 2) as i64;
                let n = if k == 0 { n1 } else { b.n_ex - n1 - (idx % 2) as i64 };
                *map.entry(n).or_insert(0.0) += p;
            }
        }
        dense(map)
    }

    /// Reduced matter density matrix in the basis (up, down).
    pub fn reduced_matter_density(&self) -> CMat {
        let index: HashMap<i64, usize> = self.blocks.iter().enumerate().map(|(i, b)| (b.n_ex, i)).collect();
        let mut rho = CMat::zeros(2, 2);
        let phase = C64::from_polar(1.0, -self.omega2 * self.t);
        for b in &self.blocks {
            for i in 0..self.window.len() {
                rho[(1, 1)] += b.amps[2 * i].norm_sqr();
                rho[(0, 0)] += b.amps[2 * i + 1].norm_sqr();
            }
            // |up, n1, n2> lives in block N, |down, n1, n2> in block N - 1
            if let Some(&j) = index.get(&(b.n_ex - 1)) {
                let lower = &self.blocks[j];
                for i in 0..self.window.len() {
                    rho[(0, 1)] += b.amps[2 * i + 1] * lower.amps[2 * i].conj() * phase;
                }
            }
        }
        rho[(1, 0)] = rho[(0, 1)].conj();
        rho
    }

    fn edge_weights(&self) -> (f64, f64) {
        let len = self.window.len();
        let k = EDGE_SITES.min(len);
        let mut lo = 0.0;
        let mut hi = 0.0;
        for b in &self.blocks {
            lo += b.amps[..2 * k].iter().map(|z| z.norm_sqr()).sum::<f64>();
            hi += b.amps[2 * (len - k)..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        (lo, hi)
    }
}

pub(crate) fn dense(map: std::collections::BTreeMap<i64, f64>) -> (i64, Vec<f64>) {
    let first = map.keys().next().copied().unwrap_or(0);
    let last = map.keys().next_back().copied().unwrap_or(-1);
    let mut p = vec![0.0; (last - first + 1).max(0) as usize];
    for (n, v) in map {
        p[(n - first) as usize] = v;
    }
    (first, p)
}

pub(crate) fn check_leakage(lo: f64, hi: f64) -> Result<()> {
    if lo > LEAKAGE_TOL {
        return Err(PrftError::Leakage { edge: "lower".into(), weight: lo });
    }
    if hi > LEAKAGE_TOL {
        return Err(PrftError::Leakage { edge: "upper".into(), weight: hi });
    }
    Ok(())
}

/// Evolves `state` through the sorted absolute `times`, calling `observe` at each.
pub fn evolve_two_mode_jc<F>(params: &TwoModeJcParams, state: &BlockState, times: &[f64], mut observe: F) -> Result<()>
where
    F: FnMut(&BlockState) -> Result<()>,
{
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < state.t) {
        return Err(PrftError::InvalidInput("times must be sorted and not before the state time".into()));
    }
    let len = state.window.len();
    let shared = params.semiclassical.then(|| params.chain(0, state.window.lo, len));
    let chains: Vec<Chain> = match &shared {
        Some(_) => Vec::new(),
        None => state.blocks.iter().map(|b| params.chain(b.n_ex, state.window.lo, len)).collect(),
    };
    let mut cur = state.clone();
    for &t in times {
        let dt = t - cur.t;
        cur.blocks.par_iter_mut().enumerate().for_each(|(i, b)| {
            let chain = shared.as_ref().unwrap_or_else(|| &chains[i]);
            chebyshev::evolve(chain, &mut b.amps, dt);
        });
        cur.t = t;
        let (lo, hi) = cur.edge_weights();
        let lo = if !params.semiclassical && cur.window.lo == 0 { 0.0 } else { lo };
        check_leakage(lo, hi)?;
        observe(&cur)?;
    }
    Ok(())
}
