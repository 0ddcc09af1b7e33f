//! Executes one (expanded) scenario and collects tables, scalar results and
//! invariant checks in memory.

use std::time::Instant;

use prft::applications::{
    self, parse_quantity, ClosedMode, Dimension, FrequencyConvention, ProtocolParams, Quantity,
};
use prft::counting::invariants::{self, mean_stencil};
use prft::counting::{
    convolve, cumulants, dynamical_mgf, quasiprobabilities, standard_fcs_mgf, standard_fcs_sampling,
    CumulantMethod,
};
use prft::floquet::{floquet_coefficients, quasienergy_phase_derivatives, QuasienergyDerivatives};
use prft::fock::{
    self, evolve_rabi_fock, evolve_two_mode_jc, gaussian_amplitudes, BlockState, FockWindow,
    RabiParams, SingleModeState, TwoModeJcParams, MIN_WIDTH_SIGMAS,
};
use prft::linalg::{self, c, CMat, CVec};
use prft::semiclassical::{photon_resolved_operators, propagate, propagate_generalized, ChiSampling};
use prft::system::{PhotonMode, PhotonicInitialState};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::output::{CumulantRow, PnRow, PurityRow, QuasiRow};
use crate::scenario::{
    complex_list, CoherenceSpec, CumulantMethodSpec, Elements, InitialStateSpec, ModelSpec, Scenario, Task,
};
use crate::validate::validate;

pub const NORMALISATION_TOL: f64 = 1e-12;
pub const CONJUGATION_TOL: f64 = 1e-12;
pub const QUASI_SUM_TOL: f64 = 1e-8;
pub const PARSEVAL_TOL: f64 = 1e-10;
/// relative to `1 + |photon energy change|`
pub const ENERGY_CURRENT_TOL: f64 = 1e-7;
/// relative to `1 + |photon number change|`
pub const EXCITATION_TOL: f64 = 1e-7;
pub const ORACLE_NORM_TOL: f64 = 1e-9;
/// kept quasiprobabilities and probabilities
const TABLE_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct RunResult {
    pub cumulants: Vec<CumulantRow>,
    pub quasi: Vec<QuasiRow>,
    pub pn: Vec<PnRow>,
    pub purity: Vec<PurityRow>,
    pub summary: Map<String, Value>,
    pub invariants: Vec<InvariantCheck>,
    /// tolerance breaches and failed invariants
    pub failures: Vec<String>,
    pub timings: Vec<(String, f64)>,
}

impl RunResult {
    fn check(&mut self, name: &str, defect: f64, tolerance: f64) {
        let defect = if defect.is_nan() { f64::INFINITY } else { defect };
        match self.invariants.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.max_defect = c.max_defect.max(defect);
                c.pass = c.max_defect <= c.tolerance;
            }
            None => self.invariants.push(InvariantCheck {
                name: name.to_string(),
                max_defect: defect,
                tolerance,
                pass: defect <= tolerance,
            }),
        }
    }

    fn time(&mut self, name: &str, start: Instant) {
        self.timings.push((name.to_string(), start.elapsed().as_secs_f64()));
    }
}

/// Runs a scenario without variants.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunResult, CliError> {
    let issues = validate(s);
    if !issues.is_empty() {
        return Err(CliError::Validation(issues));
    }
    if !s.variants.is_empty() {
        return Err(CliError::Validation(vec!["expand variants before running".into()]));
    }
    let mut r = RunResult::default();
    r.summary.insert("scenario".into(), json!(s.name));
    if s.tasks.iter().any(|t| t.needs_model()) {
        run_model(s, &mut r)?;
    }
    if s.tasks.iter().any(|t| !t.needs_model()) {
        run_applications(s, opts, &mut r)?;
    }
    let failed: Vec<String> = r
        .invariants
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("invariant {}: defect {:e} exceeds {:e}", c.name, c.max_defect, c.tolerance))
        .collect();
    r.failures.extend(failed);
    r.summary.insert("invariants".into(), serde_json::to_value(&r.invariants).expect("serialisable"));
    r.summary.insert("failures".into(), json!(r.failures));
    Ok(r)
}

fn matter_state(spec: &InitialStateSpec, d: usize, floquet: Option<&QuasienergyDerivatives>) -> CVec {
    let v = if let Some(b) = spec.basis {
        CVec::from_fn(d, |i, _| c(if i == b { 1.0 } else { 0.0 }, 0.0))
    } else if let Some(a) = &spec.amplitudes {
        CVec::from_vec(complex_list(a))
    } else {
        let states = &floquet.expect("validated: Floquet data present").reference_states;
        match (spec.floquet, &spec.floquet_coefficients) {
            (Some(mu), _) => states.column(mu).into_owned(),
            (None, Some(cs)) => states * CVec::from_vec(complex_list(cs)),
            _ => unreachable!("validated initial state"),
        }
    };
    let n = v.norm();
    v.unscale(n)
}

struct OracleTrace {
    kappa: Vec<[f64; 2]>,
    bloch: Vec<[f64; 3]>,
    marginal: Vec<(i64, Vec<f64>)>,
    purity: Vec<f64>,
    norm: Vec<f64>,
}

/// Reduced observables of one oracle snapshot.
struct Snapshot {
    marginal: (i64, Vec<f64>),
    rho: CMat,
    norm: f64,
}

fn single(st: &SingleModeState) -> Snapshot {
    Snapshot { marginal: st.photon_marginal(), rho: st.reduced_matter_density(), norm: st.norm_sqr() }
}

fn two(st: &BlockState, mode: usize) -> Snapshot {
    Snapshot { marginal: st.photon_marginal(mode), rho: st.reduced_matter_density(), norm: st.norm_sqr() }
}

fn phased(p: &PhotonMode, phase: f64) -> PhotonMode {
    PhotonMode { phase, ..*p }
}

fn run_oracle(model: &ModelSpec, s: &Scenario, psi: &CVec, times: &[f64], pad: i64) -> Result<OracleTrace, CliError> {
    let mode = s.counted_mode();
    let exact = s.oracle.elements == Elements::Exact;
    // the first snapshot is the initial state, the cumulant reference
    let mut snaps = Vec::with_capacity(times.len() + 1);
    match *model {
        ModelSpec::Rabi { h_z, omega, g, phase } => {
            let p = phased(&s.photons[0], phase);
            let params =
                if exact { RabiParams::exact(h_z, omega, g, p.mean.sqrt()) } else { RabiParams::semiclassical(h_z, omega, g) };
            let st = SingleModeState::gaussian(psi, p, pad)?;
            snaps.push(single(&st));
            evolve_rabi_fock(&params, &st, times, |x| {
                snaps.push(single(x));
                Ok(())
            })?;
        }
        ModelSpec::Jc { h_z, omega, g, phase } => {
            // second mode uncoupled and empty
            let p = phased(&s.photons[0], phase);
            let alpha = p.mean.sqrt();
            let params = TwoModeJcParams {
                h_z,
                omega: [omega; 2],
                g_tilde: if exact { [g / alpha, 0.0] } else { [g, 0.0] },
                alpha: [if exact { alpha } else { 1.0 }, 1.0],
                semiclassical: !exact,
            };
            let w = FockWindow::gaussian(&p, MIN_WIDTH_SIGMAS)?;
            let a = gaussian_amplitudes(&p, w)?;
            let vacuum = [c(1.0, 0.0)];
            let st = BlockState::from_product(psi, (w.lo, &a), (0, &vacuum), w.padded(pad, pad)?, omega)?;
            snaps.push(two(&st, mode));
            evolve_two_mode_jc(&params, &st, times, |x| {
                snaps.push(two(x, mode));
                Ok(())
            })?;
        }
        ModelSpec::TwoModeJc { h_z, omega, g, phases } => {
            let modes = [phased(&s.photons[0], phases[0]), phased(&s.photons[1], phases[1])];
            let params = if exact {
                TwoModeJcParams::exact(h_z, omega, g, [modes[0].mean.sqrt(), modes[1].mean.sqrt()])
            } else {
                TwoModeJcParams::semiclassical(h_z, omega, g)
            };
            let st = BlockState::gaussian(psi, modes, pad, omega)?;
            snaps.push(two(&st, mode));
            evolve_two_mode_jc(&params, &st, times, |x| {
                snaps.push(two(x, mode));
                Ok(())
            })?;
        }
        _ => return Err(CliError::Validation(vec![format!("no oracle for model '{}'", model.kind())])),
    }
    let c0 = fock::distribution_cumulants(snaps[0].marginal.0, &snaps[0].marginal.1);
    let mut trace = OracleTrace { kappa: vec![], bloch: vec![], marginal: vec![], purity: vec![], norm: vec![] };
    for sn in snaps.into_iter().skip(1) {
        let k = fock::distribution_cumulants(sn.marginal.0, &sn.marginal.1);
        trace.kappa.push([k[0] - c0[0], k[1] - c0[1]]);
        trace.bloch.push(fock::bloch_vector(&sn.rho));
        trace.purity.push(fock::purity(&sn.rho));
        trace.norm.push(sn.norm);
        trace.marginal.push(sn.marginal);
    }
    Ok(trace)
}

fn run_model(s: &Scenario, r: &mut RunResult) -> Result<(), CliError> {
    let model = s.model.as_ref().expect("validated");
    let sys = model.build().map_err(|e| CliError::Validation(vec![e]))?;
    let spec = s.integrator_spec();
    let times = s.time_values();
    let mode = s.counted_mode();
    let d = sys.dim();
    r.summary.insert("model".into(), json!(model.kind()));

    let uses_floquet = s.initial_states.iter().any(|st| st.floquet.is_some() || st.floquet_coefficients.is_some());
    let floquet = if uses_floquet || s.has(Task::Floquet) || s.has(Task::Purity) {
        let start = Instant::now();
        let first = quasienergy_phase_derivatives(&sys, mode, 1, 1e-3, &spec)?;
        let second = quasienergy_phase_derivatives(&sys, mode, 2, 1e-2, &spec)?;
        let period = sys.period()?;
        r.summary.insert(
            "floquet".into(),
            json!({
                "period": period,
                "mode": mode,
                "quasienergies": first.reference_energies,
                "first_derivatives": first.values,
                "first_derivative_error": first.error,
                "second_derivatives": second.values,
            }),
        );
        r.time("floquet", start);
        Some(first)
    } else {
        None
    };
    let states: Vec<(String, CVec)> =
        s.initial_states.iter().map(|st| (st.label.clone(), matter_state(st, d, floquet.as_ref()))).collect();

    let start = Instant::now();
    let base = propagate(&sys, &sys.phases(), &times, &spec)?;
    let drift = base.iter().map(linalg::unitarity_defect).fold(0.0, f64::max);
    r.summary.insert("max_unitarity_defect".into(), json!(drift));
    r.time("propagate", start);

    // counting-field propagators on the full grid
    let grid_set = match s.counting_grid() {
        Some(g) => {
            let start = Instant::now();
            let g = g.map_err(|e| CliError::Validation(vec![e]))?;
            let set = propagate_generalized(&sys, mode, ChiSampling::Grid(g), &times, &spec)?;
            for ti in 0..times.len() {
                let res = photon_resolved_operators(&set, ti)?;
                r.check("parseval", res.parseval_defect(), PARSEVAL_TOL);
            }
            r.time("counting_grid", start);
            Some(set)
        }
        None => None,
    };
    let method = match s.counting.as_ref().map(|c| c.cumulant_method) {
        Some(CumulantMethodSpec::FiniteDifference) => CumulantMethod::FiniteDifference,
        _ => CumulantMethod::Spectral,
    };
    let needs_stencil = grid_set.is_none() || method == CumulantMethod::FiniteDifference || s.has(Task::StandardFcs);
    let stencil_sets = if needs_stencil {
        let start = Instant::now();
        let sets = times
            .iter()
            .map(|&t| {
                let st = mean_stencil(t);
                let dyn_set = propagate_generalized(&sys, mode, st, &[t], &spec)?;
                let half = if s.has(Task::StandardFcs) {
                    Some(propagate_generalized(&sys, mode, standard_fcs_sampling(st)?, &[t], &spec)?)
                } else {
                    None
                };
                Ok((dyn_set, half))
            })
            .collect::<prft::Result<Vec<_>>>()?;
        r.time("counting_stencils", start);
        Some(sets)
    } else {
        None
    };

    let photons = PhotonicInitialState { modes: s.photons.clone() };
    let wants_pn = s.has(Task::Redistribute) || s.has(Task::OracleCompare);
    let initial_p = (wants_pn && !s.photons.is_empty()).then(|| photons.number_distribution(mode, MIN_WIDTH_SIGMAS));

    let start = Instant::now();
    let mut max_kappa1: f64 = 0.0;
    let mut max_kappa2: f64 = 0.0;
    // negative tails of p_n are reported, not clipped
    let mut min_p: f64 = 0.0;
    let mut rows: Vec<Vec<CumulantRow>> = Vec::new();
    let mut prft_pn: Vec<Vec<(i64, Vec<f64>)>> = Vec::new();
    for (label, psi) in &states {
        let mut state_rows = Vec::new();
        let mut state_pn = Vec::new();
        let means = invariants::mean_photon_changes(&sys, psi, &times, &spec)?;
        for (ti, &t) in times.iter().enumerate() {
            let evolved = &base[ti] * psi;
            let dn = &means[ti];
            let energy_scale = 1.0 + sys.modes().iter().zip(dn).map(|(m, x)| (m.omega * x).abs()).sum::<f64>();
            let e = invariants::energy_current_defect(&sys, psi, &evolved, t, dn);
            r.check("energy_current", e.abs() / energy_scale, ENERGY_CURRENT_TOL);
            if model.conserves_excitations() {
                let scale = 1.0 + dn.iter().map(|x| x.abs()).sum::<f64>();
                r.check("excitation_number", invariants::excitation_defect(psi, &evolved, dn).abs() / scale, EXCITATION_TOL);
            }

            let mut row = CumulantRow::new(label, t, mode);
            if d == 2 {
                let b = [linalg::sigma_x(), linalg::sigma_y(), linalg::sigma_z()]
                    .map(|op| linalg::expectation(&op, &evolved).re);
                (row.sx, row.sy, row.sz) = (Some(b[0]), Some(b[1]), Some(b[2]));
            }
            if let Some(set) = &grid_set {
                let m = dynamical_mgf(set, ti, psi)?;
                r.check("mgf_normalisation", invariants::normalisation_defect(&m), NORMALISATION_TOL);
                r.check("conjugation_symmetry", invariants::conjugation_defect(&m), CONJUGATION_TOL);
                let q = quasiprobabilities(&m)?;
                r.check("quasiprobability_sum", (q.total() - 1.0).abs(), QUASI_SUM_TOL);
                if method == CumulantMethod::Spectral {
                    let k = cumulants(&m, 4, CumulantMethod::Spectral)?;
                    (row.k1, row.k2, row.k3, row.k4) = (Some(k[0]), Some(k[1]), Some(k[2]), Some(k[3]));
                }
                if s.has(Task::Quasiprob) {
                    r.quasi.extend(q.transfers().filter(|(_, x)| x.abs() > TABLE_FLOOR).map(|(dn, x)| QuasiRow {
                        state: label.clone(),
                        t,
                        dn,
                        q: x,
                    }));
                }
                if let Some((lo, p0)) = &initial_p {
                    let (first, p) = convolve(&q, *lo, p0);
                    min_p = min_p.min(p.iter().copied().fold(0.0, f64::min));
                    state_pn.push((first, p));
                }
            }
            if let Some(sets) = &stencil_sets {
                let (dyn_set, half) = &sets[ti];
                let m = dynamical_mgf(dyn_set, 0, psi)?;
                r.check("mgf_normalisation", invariants::normalisation_defect(&m), NORMALISATION_TOL);
                r.check("conjugation_symmetry", invariants::conjugation_defect(&m), CONJUGATION_TOL);
                if method == CumulantMethod::FiniteDifference || grid_set.is_none() {
                    let k = cumulants(&m, 2, CumulantMethod::FiniteDifference)?;
                    (row.k1, row.k2) = (Some(k[0]), Some(k[1]));
                }
                if let Some(half) = half {
                    let k = cumulants(&standard_fcs_mgf(half, 0, psi)?, 2, CumulantMethod::FiniteDifference)?;
                    (row.fcs_k1, row.fcs_k2) = (Some(k[0]), Some(k[1]));
                }
            }
            max_kappa1 = max_kappa1.max(row.k1.unwrap_or(0.0).abs());
            max_kappa2 = max_kappa2.max(row.k2.unwrap_or(0.0));
            state_rows.push(row);
        }
        rows.push(state_rows);
        prft_pn.push(state_pn);
    }
    r.time("counting", start);
    if initial_p.is_some() {
        r.summary.insert("pn_most_negative".into(), json!(min_p));
    }

    // Fock-space reference
    let run_oracle_now = s.has(Task::OracleCompare) || (s.has(Task::Purity) && model.has_oracle());
    let mut oracle: Vec<Option<OracleTrace>> = states.iter().map(|_| None).collect();
    if run_oracle_now {
        let start = Instant::now();
        let t_max = times.last().copied().unwrap_or(0.0);
        let floquet_drift = floquet.as_ref().map_or(0.0, |f| f.values.iter().fold(0.0f64, |a, v| a.max(v.abs())) * t_max);
        let drift = max_kappa1.max(floquet_drift) + 6.0 * max_kappa2.max(0.0).sqrt();
        let pad = s.oracle.pad.unwrap_or(40 + drift.ceil() as i64);
        r.summary.insert("oracle_pad".into(), json!(pad));
        for (i, (_, psi)) in states.iter().enumerate() {
            let tr = run_oracle(model, s, psi, &times, pad)?;
            for n in &tr.norm {
                r.check("oracle_norm", (n - 1.0).abs(), ORACLE_NORM_TOL);
            }
            oracle[i] = Some(tr);
        }
        r.time("oracle", start);
    }

    // tables and comparisons
    let tol = &s.tolerances;
    let mut dev = Deviations::default();
    for (i, (label, psi)) in states.iter().enumerate() {
        for (ti, &t) in times.iter().enumerate() {
            let row = &mut rows[i][ti];
            if let Some(tr) = &oracle[i] {
                let [k1, k2] = tr.kappa[ti];
                let b = tr.bloch[ti];
                row.oracle_k1 = Some(k1);
                row.oracle_k2 = Some(k2);
                if d == 2 {
                    (row.oracle_sx, row.oracle_sy, row.oracle_sz) = (Some(b[0]), Some(b[1]), Some(b[2]));
                }
                if s.has(Task::OracleCompare) {
                    if let (Some(p1), Some(p2)) = (row.k1, row.k2) {
                        dev.kappa(1, p1, k1, tol.kappa1_abs, tol.kappa_rel, label, t);
                        dev.kappa(2, p2, k2, tol.kappa2_abs, tol.kappa2_rel.or(tol.kappa_rel), label, t);
                    }
                    if d == 2 {
                        let pb = [row.sx.unwrap(), row.sy.unwrap(), row.sz.unwrap()];
                        let e = (0..3).map(|k| (pb[k] - b[k]).abs()).fold(0.0, f64::max);
                        dev.bloch(e, tol.bloch_abs, label, t);
                    }
                }
            }
            if s.has(Task::Redistribute) || s.has(Task::OracleCompare) {
                if let Some((lo, p)) = prft_pn[i].get(ti) {
                    let om = oracle[i].as_ref().map(|tr| &tr.marginal[ti]);
                    let lookup = |n: i64| -> Option<f64> {
                        om.map(|(olo, op)| {
                            let k = n - olo;
                            if k < 0 || k as usize >= op.len() { 0.0 } else { op[k as usize] }
                        })
                    };
                    if let Some((olo, op)) = om {
                        let hi = (lo + p.len() as i64).max(olo + op.len() as i64);
                        let l1: f64 = ((*lo).min(*olo)..hi)
                            .map(|n| {
                                let k = n - lo;
                                let pp = if k < 0 || k as usize >= p.len() { 0.0 } else { p[k as usize] };
                                (pp - lookup(n).unwrap_or(0.0)).abs()
                            })
                            .sum();
                        if s.has(Task::OracleCompare) {
                            dev.pn(l1, tol.pn_l1, label, t);
                        }
                    }
                    if s.has(Task::Redistribute) {
                        r.pn.extend(p.iter().enumerate().filter(|(_, x)| x.abs() > TABLE_FLOOR).map(|(k, &x)| {
                            let n = lo + k as i64;
                            PnRow { state: label.clone(), t, n, p: x, oracle_p: lookup(n) }
                        }));
                    }
                }
            }
            if s.has(Task::Purity) {
                let f = floquet.as_ref().expect("purity runs the Floquet analysis");
                let cs = floquet_coefficients(&f.reference_states, psi);
                let variance = s.photons[mode].variance;
                let predicted = applications::purity_prediction(
                    cs[0].norm(),
                    cs[1].norm(),
                    f.values[0],
                    f.values[1],
                    variance,
                    t,
                )?;
                let measured = oracle[i].as_ref().map(|tr| tr.purity[ti]);
                if let Some(m) = measured {
                    dev.purity((predicted - m).abs(), tol.purity_abs, label, t);
                }
                r.purity.push(PurityRow { state: label.clone(), t, purity_prft: predicted, purity_oracle: measured });
            }
        }
    }
    if s.has(Task::Cumulants) || s.has(Task::OracleCompare) || s.has(Task::StandardFcs) {
        r.cumulants = rows.into_iter().flatten().collect();
    }
    if run_oracle_now {
        r.summary.insert("oracle_deviation".into(), dev.summary());
    }
    r.failures.extend(dev.failures);
    Ok(())
}

#[derive(Default)]
struct Deviations {
    kappa1: f64,
    kappa2: f64,
    bloch: f64,
    pn_l1: f64,
    purity: f64,
    failures: Vec<String>,
}

impl Deviations {
    #[allow(clippy::too_many_arguments)]
    fn kappa(&mut self, order: usize, prft: f64, oracle: f64, abs: Option<f64>, rel: Option<f64>, label: &str, t: f64) {
        let e = (prft - oracle).abs();
        let slot = if order == 1 { &mut self.kappa1 } else { &mut self.kappa2 };
        *slot = slot.max(e);
        if abs.is_some() || rel.is_some() {
            let bound = abs.unwrap_or(0.0).max(rel.unwrap_or(0.0) * oracle.abs());
            if e > bound {
                self.failures.push(format!("kappa{order} of '{label}' at t = {t}: |{prft} - {oracle}| > {bound}"));
            }
        }
    }

    fn bloch(&mut self, e: f64, bound: Option<f64>, label: &str, t: f64) {
        self.bloch = self.bloch.max(e);
        if bound.is_some_and(|b| e > b) {
            self.failures.push(format!("Bloch vector of '{label}' at t = {t} deviates by {e}"));
        }
    }

    fn pn(&mut self, e: f64, bound: Option<f64>, label: &str, t: f64) {
        self.pn_l1 = self.pn_l1.max(e);
        if bound.is_some_and(|b| e > b) {
            self.failures.push(format!("p_n of '{label}' at t = {t}: L1 distance {e}"));
        }
    }

    fn purity(&mut self, e: f64, bound: Option<f64>, label: &str, t: f64) {
        self.purity = self.purity.max(e);
        if bound.is_some_and(|b| e > b) {
            self.failures.push(format!("purity of '{label}' at t = {t} deviates by {e}"));
        }
    }

    fn summary(&self) -> Value {
        json!({
            "kappa1_max_abs": self.kappa1,
            "kappa2_max_abs": self.kappa2,
            "bloch_max_abs": self.bloch,
            "pn_max_l1": self.pn_l1,
            "purity_max_abs": self.purity,
        })
    }
}

fn si(q: &Quantity, dim: Dimension) -> Result<f64, CliError> {
    parse_quantity(q, dim).map_err(|e| CliError::Validation(vec![e.to_string()]))
}

const CONVENTIONS: [(FrequencyConvention, &str); 2] =
    [(FrequencyConvention::Cyclic, "cyclic"), (FrequencyConvention::Angular, "angular")];

fn run_applications(s: &Scenario, opts: &RunOptions, r: &mut RunResult) -> Result<(), CliError> {
    let a = s.applications.as_ref().expect("validated");
    let conv = a.convention;
    let conv_name = if conv == FrequencyConvention::Cyclic { "cyclic" } else { "angular" };
    if s.has(Task::CoherenceTime) {
        let mut entry = Map::new();
        entry.insert("convention".into(), json!(conv_name));
        for (c, name) in CONVENTIONS {
            let tc = match a.coherence.as_ref().expect("validated") {
                CoherenceSpec::Traveling { frequency, power, derivative_gaps } => {
                    let omega = c.angular(si(frequency, Dimension::Frequency)?);
                    let p = si(power, Dimension::Power)?;
                    let mut best = f64::INFINITY;
                    for g in derivative_gaps {
                        best = best.min(applications::coherence_time_traveling(p, omega, si(g, Dimension::Frequency)?)?);
                    }
                    best
                }
                CoherenceSpec::Closed { field, volume, modes } => {
                    let modes = modes
                        .iter()
                        .map(|m| {
                            Ok(ClosedMode {
                                omega: c.angular(si(&m.frequency, Dimension::Frequency)?),
                                derivative_gaps: m
                                    .derivative_gaps
                                    .iter()
                                    .map(|g| si(g, Dimension::Frequency))
                                    .collect::<Result<_, CliError>>()?,
                            })
                        })
                        .collect::<Result<Vec<_>, CliError>>()?;
                    applications::coherence_time_closed(
                        si(field, Dimension::ElectricField)?,
                        si(volume, Dimension::Volume)?,
                        &modes,
                    )?
                }
            };
            // infinite coherence (identical derivatives) is reported as null
            entry.insert(format!("t_c_{name}"), json!(tc.is_finite().then_some(tc)));
            if c == conv {
                entry.insert("t_c".into(), json!(tc.is_finite().then_some(tc)));
            }
        }
        r.summary.insert("coherence_time".into(), Value::Object(entry));
    }
    let transfer_inputs = |n_atoms: usize, rabi: &Quantity, freq: &Quantity, power: &Quantity, att: &Quantity, dist: &Quantity| {
        Ok::<_, CliError>((
            n_atoms,
            si(rabi, Dimension::Frequency)?,
            si(freq, Dimension::Frequency)?,
            si(power, Dimension::Power)?,
            si(att, Dimension::InverseLength)?,
            si(dist, Dimension::Length)?,
        ))
    };
    if s.has(Task::TransferRate) {
        let t = a.transfer.as_ref().expect("validated");
        let (na, rabi, nu, p, gamma, dist) =
            transfer_inputs(t.n_atoms, &t.rabi, &t.frequency, &t.power, &t.attenuation, &t.distance)?;
        let mut entry = Map::new();
        entry.insert("convention".into(), json!(conv_name));
        for (c, name) in CONVENTIONS {
            let omega = c.angular(nu);
            let f = applications::transfer_rate(na, rabi, omega, p, gamma, dist)?;
            let tp = 1.0 / f;
            let sep = applications::peak_separation(na, rabi, tp);
            let width = applications::loss_broadening(gamma, dist, p, tp, omega);
            entry.insert(format!("f_{name}"), json!(f));
            if c == conv {
                entry.insert("f".into(), json!(f));
                entry.insert("pulse".into(), json!(tp));
                entry.insert("separation".into(), json!(sep));
                entry.insert("broadening".into(), json!(width));
                let defect = (sep - width).abs() / sep;
                entry.insert("identity_defect".into(), json!(defect));
                r.check("separation_equals_broadening", defect, 1e-9);
            }
        }
        r.summary.insert("transfer_rate".into(), Value::Object(entry));
    }
    if s.has(Task::Protocol) {
        let start = Instant::now();
        let ps = a.protocol.as_ref().expect("validated");
        let (na, rabi, nu, p, gamma, dist) =
            transfer_inputs(ps.n_atoms, &ps.rabi, &ps.frequency, &ps.power, &ps.attenuation, &ps.distance)?;
        let omega = conv.angular(nu);
        let mut entry = Map::new();
        if gamma > 0.0 && dist > 0.0 {
            let f = applications::transfer_rate(na, rabi, omega, p, gamma, dist)?;
            let tp = 1.0 / f;
            let sep = applications::peak_separation(na, rabi, tp);
            let width = applications::loss_broadening(gamma, dist, p, tp, omega);
            let defect = (sep - width).abs() / sep;
            entry.insert("identity_defect".into(), json!(defect));
            r.check("separation_equals_broadening", defect, 1e-9);
        }
        let pulse = match &ps.pulse {
            Some(q) => si(q, Dimension::Time)?,
            None => 1.0 / applications::transfer_rate(na, rabi, omega, p, gamma, dist)?,
        };
        let params = ProtocolParams {
            n_atoms: na,
            rabi,
            omega,
            power: p,
            attenuation: gamma,
            distance: dist,
            pulse,
            shot_noise: ps.shot_noise,
        };
        let seed = opts.seed.unwrap_or(s.seed);
        let rep = applications::protocol_simulate(&params, ps.trials, seed)?;
        let (success, mis) = applications::protocol_analytic(&params);
        let se = (success * (1.0 - success) / ps.trials as f64).sqrt();
        entry.insert("seed".into(), json!(seed));
        entry.insert("pulse".into(), json!(pulse));
        entry.insert("trials".into(), json!(rep.trials));
        entry.insert("success_rate".into(), json!(rep.success_rate));
        entry.insert("misclassification".into(), json!(rep.misclassification));
        entry.insert("fidelity_proxy".into(), json!(rep.fidelity_proxy));
        entry.insert("separation".into(), json!(rep.separation));
        entry.insert("width".into(), json!(rep.width));
        entry.insert("analytic_success".into(), json!(success));
        entry.insert("analytic_misclassification".into(), json!(mis));
        entry.insert("success_standard_error".into(), json!(se));
        r.summary.insert("protocol".into(), Value::Object(entry));
        r.time("protocol", start);
    }
    Ok(())
}
