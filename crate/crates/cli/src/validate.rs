//! Static checks of a scenario: schema-level consistency and physics preconditions
//! (commensurability, counting-grid aliasing, window sizes) without running anything.

use std::f64::consts::TAU;

use prft::applications::{parse_quantity, Dimension, Quantity};
use prft::fock::MIN_WIDTH_SIGMAS;

use crate::scenario::{ApplicationsSpec, CoherenceSpec, Scenario, Task};

/// All problems found; empty when the scenario can run.
pub fn validate(s: &Scenario) -> Vec<String> {
    let mut issues = Vec::new();
    if !s.variants.is_empty() {
        match s.expand() {
            Ok(list) => {
                for (label, v) in list {
                    let label = label.unwrap_or_default();
                    issues.extend(validate_one(&v).into_iter().map(|e| format!("variant '{label}': {e}")));
                }
            }
            Err(e) => issues.push(e.to_string()),
        }
        return issues;
    }
    validate_one(s)
}

fn validate_one(s: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    if s.tasks.is_empty() {
        out.push("no tasks given".to_string());
    }
    if s.tasks.iter().any(|t| t.needs_model()) {
        model_checks(s, &mut out);
    }
    if s.tasks.iter().any(|t| !t.needs_model()) {
        match &s.applications {
            Some(a) => application_checks(s, a, &mut out),
            None => out.push("application tasks need an 'applications' block".into()),
        }
    }
    out
}

fn model_checks(s: &Scenario, out: &mut Vec<String>) {
    let Some(model) = &s.model else {
        out.push("model tasks need a 'model' block".into());
        return;
    };
    let sys = match model.build() {
        Ok(sys) => sys,
        Err(e) => {
            out.push(format!("model: {e}"));
            return;
        }
    };
    let times = s.time_values();
    if times.is_empty() {
        out.push("model tasks need a non-empty 'times' grid".into());
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        out.push("times must be finite, non-negative and sorted".into());
    }
    if s.initial_states.is_empty() {
        out.push("at least one initial state is required".into());
    }
    let d = sys.dim();
    let mut needs_floquet = s.has(Task::Floquet) || s.has(Task::Purity);
    for st in &s.initial_states {
        let chosen = [st.basis.is_some(), st.floquet.is_some(), st.floquet_coefficients.is_some(), st.amplitudes.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen != 1 {
            out.push(format!("initial state '{}': choose exactly one of basis, floquet, floquet_coefficients, amplitudes", st.label));
        }
        if st.basis.is_some_and(|b| b >= d) || st.floquet.is_some_and(|b| b >= d) {
            out.push(format!("initial state '{}': index out of range for dimension {d}", st.label));
        }
        for v in [&st.floquet_coefficients, &st.amplitudes].into_iter().flatten() {
            if v.len() != d {
                out.push(format!("initial state '{}': {} coefficients for dimension {d}", st.label, v.len()));
            } else if v.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum::<f64>() == 0.0 {
                out.push(format!("initial state '{}': zero vector", st.label));
            }
        }
        needs_floquet |= st.floquet.is_some() || st.floquet_coefficients.is_some();
    }
    if needs_floquet {
        if let Err(e) = sys.period() {
            out.push(format!("commensurability: Floquet analysis needs commensurate drive frequencies ({e})"));
        }
    }
    let mode = s.counted_mode();
    if mode >= sys.n_modes() {
        out.push(format!("counting mode {mode} out of range for {} drive modes", sys.n_modes()));
    }
    let grid_tasks = [Task::Cumulants, Task::Quasiprob, Task::Redistribute, Task::OracleCompare, Task::StandardFcs];
    if grid_tasks.iter().any(|&t| s.has(t)) {
        match s.counting_grid() {
            None => out.push("counting tasks need a 'counting' block".into()),
            Some(Err(e)) => out.push(format!("counting: {e}")),
            Some(Ok(g)) => {
                if let Some(w) = s.counting.as_ref().and_then(|c| c.window) {
                    let h = g.len() / 2;
                    let usable = h - h / 4;
                    if w >= usable {
                        out.push(format!(
                            "aliasing: a {}-point counting grid resolves photon changes below {usable}, but the window is {w}",
                            g.len()
                        ));
                    }
                }
            }
        }
    }
    let photon_tasks = [Task::Redistribute, Task::OracleCompare, Task::Purity];
    if photon_tasks.iter().any(|&t| s.has(t)) {
        if s.photons.len() != sys.n_modes() {
            out.push(format!("{} photon modes given for {} drive modes", s.photons.len(), sys.n_modes()));
        }
        let phases = sys.phases();
        for (k, p) in s.photons.iter().enumerate() {
            let wrapped = phases.get(k).map(|&ph| (p.phase - ph).rem_euclid(TAU));
            if wrapped.is_some_and(|d| d.min(TAU - d) > 1e-9) {
                out.push(format!("photon mode {k}: phase {} differs from the drive phase {}", p.phase, phases[k]));
            }
            if let Err(e) = p.validate() {
                out.push(format!("photon mode {k}: {e}"));
            } else if p.mean < MIN_WIDTH_SIGMAS * p.sigma() {
                out.push(format!(
                    "photon mode {k}: window mean - {MIN_WIDTH_SIGMAS} sigma reaches below the vacuum; raise the mean or lower the variance"
                ));
            }
        }
    }
    if s.has(Task::OracleCompare) && !model.has_oracle() {
        out.push(format!("oracle_compare: no Fock-space oracle for model '{}'", model.kind()));
    }
    if s.has(Task::Purity) && d != 2 {
        out.push("purity: the closed-form prediction needs a two-level matter system".into());
    }
    if s.oracle.pad.is_some_and(|p| p < 0) {
        out.push("oracle pad must be non-negative".into());
    }
}

fn quantity(out: &mut Vec<String>, name: &str, q: &Quantity, dim: Dimension, allow_zero: bool) {
    match parse_quantity(q, dim) {
        Ok(v) if v > 0.0 || (allow_zero && v == 0.0) => {}
        Ok(v) => out.push(format!("{name}: must be positive, got {v}")),
        Err(e) => out.push(format!("{name}: {e}")),
    }
}

fn application_checks(s: &Scenario, a: &ApplicationsSpec, out: &mut Vec<String>) {
    if s.has(Task::CoherenceTime) {
        match &a.coherence {
            None => out.push("coherence_time needs applications.coherence".into()),
            Some(CoherenceSpec::Traveling { frequency, power, derivative_gaps }) => {
                quantity(out, "coherence.frequency", frequency, Dimension::Frequency, false);
                quantity(out, "coherence.power", power, Dimension::Power, false);
                if derivative_gaps.is_empty() {
                    out.push("coherence: at least one state pair is required".into());
                }
                for g in derivative_gaps {
                    quantity(out, "coherence.derivative_gaps", g, Dimension::Frequency, true);
                }
            }
            Some(CoherenceSpec::Closed { field, volume, modes }) => {
                quantity(out, "coherence.field", field, Dimension::ElectricField, false);
                quantity(out, "coherence.volume", volume, Dimension::Volume, false);
                if modes.iter().all(|m| m.derivative_gaps.is_empty()) {
                    out.push("coherence: at least one state pair is required".into());
                }
                for m in modes {
                    quantity(out, "coherence.modes.frequency", &m.frequency, Dimension::Frequency, false);
                    for g in &m.derivative_gaps {
                        quantity(out, "coherence.modes.derivative_gaps", g, Dimension::Frequency, true);
                    }
                }
            }
        }
    }
    if s.has(Task::TransferRate) {
        match &a.transfer {
            None => out.push("transfer_rate needs applications.transfer".into()),
            Some(t) => {
                if t.n_atoms == 0 {
                    out.push("transfer.n_atoms must be at least 1".into());
                }
                quantity(out, "transfer.rabi", &t.rabi, Dimension::Frequency, false);
                quantity(out, "transfer.frequency", &t.frequency, Dimension::Frequency, false);
                quantity(out, "transfer.power", &t.power, Dimension::Power, false);
                quantity(out, "transfer.attenuation", &t.attenuation, Dimension::InverseLength, false);
                quantity(out, "transfer.distance", &t.distance, Dimension::Length, false);
            }
        }
    }
    if s.has(Task::Protocol) {
        match &a.protocol {
            None => out.push("protocol needs applications.protocol".into()),
            Some(p) => {
                if p.n_atoms == 0 {
                    out.push("protocol.n_atoms must be at least 1".into());
                }
                if p.trials == 0 {
                    out.push("protocol.trials must be at least 1".into());
                }
                // the acceptance window is half the peak separation, so it must not vanish
                quantity(out, "protocol.rabi", &p.rabi, Dimension::Frequency, false);
                quantity(out, "protocol.frequency", &p.frequency, Dimension::Frequency, false);
                quantity(out, "protocol.power", &p.power, Dimension::Power, false);
                quantity(out, "protocol.attenuation", &p.attenuation, Dimension::InverseLength, true);
                quantity(out, "protocol.distance", &p.distance, Dimension::Length, true);
                match &p.pulse {
                    Some(q) => quantity(out, "protocol.pulse", q, Dimension::Time, false),
                    None => {
                        if parse_quantity(&p.attenuation, Dimension::InverseLength).is_ok_and(|v| v == 0.0)
                            || parse_quantity(&p.distance, Dimension::Length).is_ok_and(|v| v == 0.0)
                        {
                            out.push("protocol.pulse is required without loss (the transfer rate diverges)".into());
                        }
                    }
                }
            }
        }
    }
}
