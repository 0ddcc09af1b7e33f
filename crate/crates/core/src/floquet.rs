//! Floquet decomposition of one-period generalized propagators and
//! continuation of the quasienergy branches in the counting field.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{PrftError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::semiclassical::{propagate, propagate_generalized, ChiSampling, GeneralizedPropagatorSet, IntegratorSpec};
use crate::system::DrivenSystem;

pub const COLLISION_TOL: f64 = 1e-10;

/// Folds `e` into `(-w/2, w/2]`.
pub fn fold(e: f64, omega_bar: f64) -> f64 {
    let mut x = e - omega_bar * (e / omega_bar).round();
    if x <= -omega_bar / 2.0 {
        x += omega_bar;
    }
    if x > omega_bar / 2.0 {
        x -= omega_bar;
    }
    x
}

/// Quasienergies `-arg(lambda)/tau` folded into the first Brillouin zone, ascending,
/// with Floquet states as columns.
pub fn quasienergies(u_period: &CMat, period: f64) -> Result<(Vec<f64>, CMat)> {
    let omega_bar = 2.0 * PI / period;
    let (vals, vecs) = linalg::eig(u_period)?;
    let mut pairs: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .map(|(k, l)| (fold(-l.arg() / period, omega_bar), k))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let d = vals.len();
    let mut states = CMat::zeros(d, d);
    for (col, &(_, k)) in pairs.iter().enumerate() {
        states.set_column(col, &vecs.column(k));
    }
    check_collisions(&pairs.iter().map(|p| p.0).collect::<Vec<_>>(), omega_bar, "reference point")?;
    Ok((pairs.into_iter().map(|p| p.0).collect(), states))
}

fn check_collisions(e: &[f64], omega_bar: f64, where_: &str) -> Result<()> {
    for a in 0..e.len() {
        for b in (a + 1)..e.len() {
            let gap = fold(e[a] - e[b], omega_bar).abs();
            if gap < COLLISION_TOL * omega_bar.max(1.0) {
                return Err(PrftError::Degeneracy(format!(
                    "quasienergies {} and {} collide at {where_}; perturb the grid",
                    e[a], e[b]
                )));
            }
        }
    }
    Ok(())
}

/// Matches the eigenpairs of a neighbouring point to reference states by overlap and
/// unwraps each quasienergy to the branch closest to its reference value.
fn align(
    ref_e: &[f64],
    ref_states: &CMat,
    u_period: &CMat,
    period: f64,
    where_: &str,
) -> Result<(Vec<f64>, CMat)> {
    let omega_bar = 2.0 * PI / period;
    let (e, states) = quasienergies(u_period, period)
        .map_err(|err| match err {
            PrftError::Degeneracy(m) => PrftError::Degeneracy(format!("{m} ({where_})")),
            other => other,
        })?;
    let d = e.len();
    let mut overlaps: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for mu in 0..d {
        for nu in 0..d {
            overlaps.push((ref_states.column(mu).dotc(&states.column(nu)).norm_sqr(), mu, nu));
        }
    }
    overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut taken_ref = vec![false; d];
    let mut taken_new = vec![false; d];
    let mut assign = vec![usize::MAX; d];
    for &(_, mu, nu) in &overlaps {
        if !taken_ref[mu] && !taken_new[nu] {
            taken_ref[mu] = true;
            taken_new[nu] = true;
            assign[mu] = nu;
        }
    }
    let mut out_e = vec![0.0; d];
    let mut out_s = CMat::zeros(d, d);
    for mu in 0..d {
        let nu = assign[mu];
        let candidate = ref_e[mu] + fold(e[nu] - ref_e[mu], omega_bar);
        if (candidate - ref_e[mu]).abs() >= omega_bar / 4.0 {
            return Err(PrftError::Degeneracy(format!(
                "quasienergy branch {mu} jumps by {} at {where_}",
                candidate - ref_e[mu]
            )));
        }
        out_e[mu] = candidate;
        // fix the gauge so the overlap with the reference state is real positive
        let col: CVec = states.column(nu).into_owned();
        let ov = ref_states.column(mu).dotc(&col);
        let gauge = if ov.norm() > 0.0 { ov.conj() / ov.norm() } else { C64::new(1.0, 0.0) };
        out_s.set_column(mu, &(col * gauge));
    }
    Ok((out_e, out_s))
}

#[derive(Debug, Clone)]
pub struct FloquetSolution {
    pub period: f64,
    pub omega_bar: f64,
    pub mode: usize,
    pub base_phases: Vec<f64>,
    pub sampling: ChiSampling,
    /// `[j][mu]`, continued from `chi = 0` along the shortest path, so `E` is smooth around 0.
    pub quasienergies: Vec<Vec<f64>>,
    /// `[j]`, Floquet states as columns.
    pub states: Vec<CMat>,
}

impl FloquetSolution {
    pub fn reference_energies(&self) -> &[f64] {
        &self.quasienergies[self.sampling.center()]
    }

    pub fn reference_states(&self) -> &CMat {
        &self.states[self.sampling.center()]
    }

    pub fn dim(&self) -> usize {
        self.reference_energies().len()
    }

    /// `c_mu = <u_mu | psi>` in the reference Floquet basis.
    pub fn coefficients(&self, psi: &CVec) -> Vec<C64> {
        floquet_coefficients(self.reference_states(), psi)
    }
}

pub fn floquet_coefficients(states: &CMat, psi: &CVec) -> Vec<C64> {
    (0..states.ncols()).map(|mu| states.column(mu).dotc(psi)).collect()
}

/// Decomposes `U_{phi + chi_j}(tau)` taken from `set` at `time_index`, which must be one period.
pub fn floquet_decompose(set: &GeneralizedPropagatorSet, time_index: usize, period: f64) -> Result<FloquetSolution> {
    let t = set.times[time_index];
    if (t - period).abs() > 1e-9 * period {
        return Err(PrftError::InvalidInput(format!("propagators at t = {t} are not one period {period}")));
    }
    let sampling = set.sampling;
    let n = sampling.len();
    let center = sampling.center();
    let (e0, s0) = quasienergies(set.get(time_index, center), period)?;
    let mut energies = vec![Vec::new(); n];
    let mut states = vec![CMat::zeros(0, 0); n];
    energies[center] = e0.clone();
    states[center] = s0.clone();

    let (forward, backward): (i64, i64) = match sampling {
        ChiSampling::Grid(g) => (g.len() as i64 / 2, g.len() as i64 / 2 - 1),
        ChiSampling::Stencil { half_width, .. } => (half_width as i64, half_width as i64),
    };
    for (dir, steps) in [(1i64, forward), (-1i64, backward)] {
        let (mut pe, mut ps) = (e0.clone(), s0.clone());
        for s in 1..=steps {
            let j = sampling.index(dir * s).expect("index within sampling");
            let where_ = format!("chi = {}", dir as f64 * s as f64 * sampling.step());
            let (e, st) = align(&pe, &ps, set.get(time_index, j), period, &where_)?;
            energies[j] = e.clone();
            states[j] = st.clone();
            pe = e;
            ps = st;
        }
    }
    Ok(FloquetSolution {
        period,
        omega_bar: 2.0 * PI / period,
        mode: set.mode,
        base_phases: set.base_phases.clone(),
        sampling,
        quasienergies: energies,
        states,
    })
}

pub fn floquet_decompose_system(
    sys: &DrivenSystem,
    mode: usize,
    sampling: ChiSampling,
    spec: &IntegratorSpec,
) -> Result<FloquetSolution> {
    let period = sys.period()?;
    let set = propagate_generalized(sys, mode, sampling, &[period], spec)?;
    floquet_decompose(&set, 0, period)
}

#[derive(Debug, Clone)]
pub struct QuasienergyDerivatives {
    pub order: usize,
    pub values: Vec<f64>,
    pub error: Vec<f64>,
    pub reference_energies: Vec<f64>,
    pub reference_states: CMat,
}

/// `d^n E_mu / d phi_k^n` at the photonic phases, `n` in {1, 2}, by central
/// differences with one Richardson step (`delta` and `delta/2`).
pub fn quasienergy_phase_derivatives(
    sys: &DrivenSystem,
    mode: usize,
    order: usize,
    delta: f64,
    spec: &IntegratorSpec,
) -> Result<QuasienergyDerivatives> {
    if !(1..=2).contains(&order) {
        return Err(PrftError::InvalidInput(format!("derivative order {order} not supported")));
    }
    if mode >= sys.n_modes() {
        return Err(PrftError::InvalidInput(format!("mode {mode} out of range")));
    }
    let period = sys.period()?;
    let shifts = [0.0, -delta, -delta / 2.0, delta / 2.0, delta];
    let us: Vec<CMat> = shifts
        .par_iter()
        .map(|&s| propagate(sys, &sys.shifted_phases(mode, s), &[period], spec).map(|mut v| v.pop().unwrap()))
        .collect::<Result<_>>()?;
    let (e0, s0) = quasienergies(&us[0], period)?;
    let mut e = vec![e0.clone()];
    for (k, u) in us.iter().enumerate().skip(1) {
        e.push(align(&e0, &s0, u, period, &format!("phase shift {}", shifts[k]))?.0);
    }
    let d = e0.len();
    let mut values = vec![0.0; d];
    let mut error = vec![0.0; d];
    for mu in 0..d {
        let (em, emh, eph, ep) = (e[1][mu], e[2][mu], e[3][mu], e[4][mu]);
        let (coarse, fine) = if order == 1 {
            ((ep - em) / (2.0 * delta), (eph - emh) / delta)
        } else {
            (
                (ep - 2.0 * e0[mu] + em) / (delta * delta),
                (eph - 2.0 * e0[mu] + emh) / (delta * delta / 4.0),
            )
        };
        let rich = (4.0 * fine - coarse) / 3.0;
        values[mu] = rich;
        error[mu] = (rich - fine).abs();
    }
    Ok(QuasienergyDerivatives { order, values, error, reference_energies: e0, reference_states: s0 })
}
