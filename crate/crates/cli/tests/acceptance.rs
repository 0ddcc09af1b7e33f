//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs the bundled scenarios through the library (no subprocess) and reads the
//! tables and summaries from memory.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;
use std::time::Instant;

use prft::fock::{evolve_two_mode_jc, BlockState, FockWindow, TwoModeJcParams};
use prft::linalg::c;
use prft::semiclassical::{fock_projector_expectation, photon_resolved_operators, propagate_generalized, ChiSampling, IntegratorSpec};
use prft::{CountingGrid, CVec, DrivenSystem};
use prft_cli::output::CumulantRow;
use prft_cli::{library, run_scenario, scenario, RunOptions, RunResult};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs a bundled scenario, one result per variant.
fn run_bundled(name: &str) -> Vec<(String, RunResult)> {
    let s = scenario::parse_str(library::get(name).expect("bundled scenario")).expect("parses");
    s.expand()
        .expect("expands")
        .into_iter()
        .map(|(label, sc)| {
            let r = run_scenario(&sc, &RunOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
            (label.unwrap_or_else(|| name.to_string()), r)
        })
        .collect()
}

type Runs = Rc<Vec<(String, RunResult)>>;

/// Each bundled scenario runs at most once per suite.
#[derive(Default)]
struct Cache(RefCell<HashMap<&'static str, Runs>>);

impl Cache {
    fn get(&self, name: &'static str) -> Runs {
        if let Some(r) = self.0.borrow().get(name) {
            return r.clone();
        }
        let r = Rc::new(run_bundled(name));
        self.0.borrow_mut().insert(name, r.clone());
        r
    }
}

fn rows<'a>(r: &'a RunResult, state: &str) -> Vec<&'a CumulantRow> {
    r.cumulants.iter().filter(|row| row.state == state).collect()
}

fn summary_f64(r: &RunResult, path: &[&str]) -> f64 {
    let mut v = &r.summary[path[0]];
    for key in &path[1..] {
        v = &v[*key];
    }
    v.as_f64().unwrap_or_else(|| panic!("summary {path:?} missing"))
}

/// Least-squares slope through the origin.
fn slope(points: &[(f64, f64)]) -> f64 {
    let num: f64 = points.iter().map(|(t, y)| t * y).sum();
    let den: f64 = points.iter().map(|(t, _)| t * t).sum();
    num / den
}

fn criterion_1() -> Outcome {
    // |up> (x) |n> in the Jaynes-Cummings model: the PRFT with g = g_tilde sqrt(n + 1)
    let start = Instant::now();
    let (h_z, omega, g_tilde, n) = (1.0, 0.9, 0.05, 20i64);
    let g = g_tilde * ((n + 1) as f64).sqrt();
    let times: Vec<f64> = (0..=100).map(|k| 0.5 * k as f64).collect();
    let sys = DrivenSystem::jc(h_z, omega, g, 0.0).unwrap();
    let spec = IntegratorSpec::default();
    let set = propagate_generalized(&sys, 0, ChiSampling::Grid(CountingGrid::new(16).unwrap()), &times, &spec).unwrap();
    let up = CVec::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
    let one = [c(1.0, 0.0)];
    let params = TwoModeJcParams { h_z, omega: [omega; 2], g_tilde: [g_tilde, 0.0], alpha: [1.0; 2], semiclassical: false };
    let state = BlockState::from_product(&up, (n, &one), (0, &one), FockWindow::new(n - 12, n + 12).unwrap(), omega).unwrap();
    let mut oracle = Vec::new();
    evolve_two_mode_jc(&params, &state, &times, |s| {
        oracle.push(s.photon_marginal(0));
        Ok(())
    })
    .unwrap();
    let (mut identity, mut pointwise) = (0.0f64, 0.0f64);
    for (ti, (olo, op)) in oracle.iter().enumerate() {
        let res = photon_resolved_operators(&set, ti).unwrap();
        let (lo, p) = fock_projector_expectation(&res, &up, n, &one).unwrap();
        let at = |first: i64, v: &[f64], k: i64| v.get((k - first) as usize).copied().unwrap_or(0.0);
        identity = identity.max((at(lo, &p, n) + at(lo, &p, n + 1) - 1.0).abs());
        for k in lo.min(*olo)..=(lo + p.len() as i64).max(olo + op.len() as i64) {
            pointwise = pointwise.max((at(lo, &p, k) - at(*olo, op, k)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        identity <= 1e-12 && pointwise <= 1e-8 && secs < 1.0,
        format!("P_n + P_n+1 - 1 max {identity:.1e} (<= 1e-12), PRFT vs Fock max {pointwise:.1e} (<= 1e-8), {secs:.2} s"),
    )
}

fn criterion_2(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let runs = cache.get("fig2a");
    let secs = start.elapsed().as_secs_f64();
    let r = &runs[0].1;
    let (mut k1, mut k2, mut bloch) = (true, true, true);
    let (mut d1, mut d2, mut db) = (0.0f64, 0.0f64, 0.0f64);
    for row in &r.cumulants {
        let (p1, o1) = (row.k1.unwrap(), row.oracle_k1.unwrap());
        let (p2, o2) = (row.k2.unwrap(), row.oracle_k2.unwrap());
        d1 = d1.max((p1 - o1).abs());
        d2 = d2.max((p2 - o2).abs());
        k1 &= (p1 - o1).abs() <= (0.01 * o1.abs()).max(0.5);
        k2 &= (p2 - o2).abs() <= (0.01 * o2.abs()).max(1.0);
        for (p, o) in [(row.sx, row.oracle_sx), (row.sy, row.oracle_sy), (row.sz, row.oracle_sz)] {
            let e = (p.unwrap() - o.unwrap()).abs();
            db = db.max(e);
            bloch &= e <= 0.01;
        }
    }
    outcome(
        k1 && k2 && bloch && secs < 120.0,
        format!(
            "max |dk1| {d1:.3} (<= 0.5), max |dk2| {d2:.3} (<= 1), max |d sigma| {db:.4} (<= 0.01), {secs:.1} s; \
             the sqrt(n) couplings add (sigma^2 / nbar) g dk1/dg to the variance, which the fixed-coupling theory omits"
        ),
    )
}

fn min_q(r: &RunResult, t: f64) -> f64 {
    r.quasi.iter().filter(|q| (q.t - t).abs() < 1e-9).map(|q| q.q).fold(f64::INFINITY, f64::min)
}

fn criterion_3(cache: &Cache) -> Outcome {
    let (low, high) = (cache.get("fig2b_low"), cache.get("fig2b_high"));
    let (low, high) = (&low[0].1, &high[0].1);
    let common = 1.2 * 2.0 * PI;
    let (ql, qh) = (min_q(low, common), min_q(high, common));
    let literal_high = min_q(high, 1.2 * 2.0 * PI / 10.0);
    let sums_ok = [low, high].iter().all(|r| {
        r.invariants.iter().any(|c| c.name == "quasiprobability_sum" && c.max_defect <= 1e-8)
    });
    outcome(
        ql < 0.0 && qh < 0.0 && qh < ql && sums_ok,
        format!(
            "t = 1.2 (2 pi / h_z): min q {ql:.4} (omega = g = 1) vs {qh:.4} (omega = g = 10); \
             at t = 1.2 (2 pi / omega) the strong case gives {literal_high:.4}; sum q within 1e-8: {sums_ok}"
        ),
    )
}

fn criterion_4(cache: &Cache) -> Outcome {
    let runs = cache.get("fig3");
    let fig3 = &runs[0].1;
    let d = &fig3.summary["floquet"]["first_derivatives"];
    let e_prime = [d[0].as_f64().unwrap(), d[1].as_f64().unwrap()];
    let mut ok = true;
    let mut notes = Vec::new();
    for (mu, label) in ["u1", "u2"].iter().enumerate() {
        let rs = rows(fig3, label);
        let prft: Vec<(f64, f64)> = rs.iter().map(|r| (r.t, r.k1.unwrap())).collect();
        let oracle: Vec<(f64, f64)> = rs.iter().map(|r| (r.t, r.oracle_k1.unwrap())).collect();
        let (sp, so) = (slope(&prft), slope(&oracle));
        let vs_floquet = (sp + e_prime[mu]).abs() / e_prime[mu].abs();
        let vs_oracle = (sp - so).abs() / so.abs();
        let k2_max = rs.iter().map(|r| r.k2.unwrap().abs()).fold(0.0, f64::max);
        ok &= vs_floquet <= 0.01 && vs_oracle <= 0.02 && k2_max < 1.0;
        notes.push(format!("{label}: slope {sp:.5} vs -E' {:.5} vs oracle {so:.5}, max k2 {k2_max:.3}", -e_prime[mu]));
    }
    let sup = rows(fig3, "superposition");
    let k1_max = sup.iter().map(|r| r.k1.unwrap().abs()).fold(0.0, f64::max);
    let last = sup.last().unwrap();
    let k2_rel = (last.k2.unwrap() - last.oracle_k2.unwrap()).abs() / last.oracle_k2.unwrap();
    ok &= k1_max < 2.0 && k2_rel <= 0.05;
    notes.push(format!("superposition: max |k1| {k1_max:.3}, k2(1200) rel. dev. {k2_rel:.1e}"));
    // closed form 4 g1 g2 sin(phi2 - phi1) / E against half of it
    let (g1, g2, dphi) = (0.2f64, 0.2f64, PI / 2.0);
    let big_g = (g1 * g1 + g2 * g2 + 2.0 * g1 * g2 * dphi.cos()).sqrt();
    let e = 2.0 * big_g;
    let full = 4.0 * g1 * g2 * dphi.sin() / e;
    let oracle_rate = slope(&rows(fig3, "u1").iter().map(|r| (r.t, r.oracle_k1.unwrap())).collect::<Vec<_>>()).abs();
    notes.push(format!(
        "flux prefactor: oracle |rate| {oracle_rate:.5} selects 4 g1 g2 sin/E = {full:.5} over {:.5}",
        full / 2.0
    ));
    outcome(ok, notes.join("; "))
}

fn criterion_5(cache: &Cache) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["fig4a", "fig4b"] {
        for (label, r) in cache.get(name).iter() {
            let dev = r.purity.iter().map(|p| (p.purity_prft - p.purity_oracle.unwrap()).abs()).fold(0.0, f64::max);
            ok &= dev <= 0.05;
            let mut note = format!("{name}/{label} max dev {dev:.4}");
            if name == "fig4a" {
                let lowest = r.purity.iter().map(|p| p.purity_oracle.unwrap().min(p.purity_prft)).fold(1.0, f64::min);
                ok &= lowest >= 0.99;
                note += &format!(", min Floquet purity {lowest:.4}");
            }
            notes.push(note);
        }
    }
    outcome(ok, notes.join("; "))
}

fn criterion_6(cache: &Cache) -> Outcome {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (label, r) in cache.get("fig7_grid").iter() {
        let mut local = 0.0f64;
        for t in [300.0, 600.0] {
            let at: Vec<_> = r.pn.iter().filter(|p| (p.t - t).abs() < 1e-9).collect();
            let l1: f64 = at.iter().map(|p| (p.p - p.oracle_p.unwrap()).abs()).sum();
            local = local.max(l1);
        }
        worst = worst.max(local);
        notes.push(format!("{label} {local:.4}"));
    }
    outcome(worst < 0.02, format!("max L1 {worst:.4} (< 0.02): {}", notes.join(", ")))
}

fn criterion_7(cache: &Cache) -> Outcome {
    let runs = cache.get("fig3");
    let fig3 = &runs[0].1;
    let rs = rows(fig3, "u1");
    let last = rs.last().unwrap();
    let (fcs2, k2) = (last.fcs_k2.unwrap(), last.k2.unwrap());
    let k1_rel = rs
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| (r.fcs_k1.unwrap() - r.k1.unwrap()).abs() / r.k1.unwrap().abs())
        .fold(0.0, f64::max);
    outcome(
        fcs2 > 10.0 && k2 < 1.0 && k1_rel <= 1e-6,
        format!(
            "t = {}: projective k2 {fcs2:.4} (needs > 10), PRFT k2 {k2:.4} (< 1), k1 rel. dev. {k1_rel:.1e} (<= 1e-6); \
             the second derivatives of both generating functions coincide for unitary dynamics",
            last.t
        ),
    )
}

fn criterion_8(cache: &Cache) -> Outcome {
    let runs = cache.get("fig5");
    let r = &runs[0].1;
    let u1 = rows(r, "u1");
    let u2 = rows(r, "u2");
    let sup = rows(r, "superposition");
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for rs in [&u1, &u2] {
        for row in rs.iter().filter(|r| r.t > 0.0) {
            let ratio = row.k2.unwrap().abs() / row.k1.unwrap().powi(2);
            worst_ratio = worst_ratio.max(ratio);
        }
    }
    ok &= worst_ratio < 0.05;
    let s1 = slope(&u1.iter().map(|r| (r.t, r.k1.unwrap())).collect::<Vec<_>>());
    let s2 = slope(&u2.iter().map(|r| (r.t, r.k1.unwrap())).collect::<Vec<_>>());
    // linearity: residual of the fit relative to the largest value
    let lin = |rs: &[&CumulantRow], s: f64| {
        let scale = rs.iter().map(|r| r.k1.unwrap().abs()).fold(0.0, f64::max);
        rs.iter().map(|r| (r.k1.unwrap() - s * r.t).abs()).fold(0.0, f64::max) / scale
    };
    let (l1, l2) = (lin(&u1, s1), lin(&u2, s2));
    ok &= s1 * s2 < 0.0 && l1 < 0.01 && l2 < 0.01;
    let k1_sup = sup.iter().map(|r| r.k1.unwrap().abs()).fold(0.0, f64::max);
    let k1_scale = u1.iter().map(|r| r.k1.unwrap().abs()).fold(0.0, f64::max);
    let k2_at = |t: f64| sup.iter().find(|r| (r.t - t).abs() < 1e-9).unwrap().k2.unwrap();
    let exponent = (k2_at(1000.0) / k2_at(500.0)).ln() / 2f64.ln();
    ok &= k1_sup < 0.01 * k1_scale && (exponent - 2.0).abs() < 0.1;
    outcome(
        ok,
        format!(
            "Floquet max |k2|/k1^2 {worst_ratio:.1e} (< 0.05), slopes {s1:.4} / {s2:.4} (nonlinearity {l1:.1e} / {l2:.1e}); \
             superposition max |k1| {k1_sup:.3}, k2 growth exponent {exponent:.3}"
        ),
    )
}

fn criterion_9(cache: &Cache) -> Outcome {
    let (transfer, optical, radio) =
        (cache.get("transfer_500km"), cache.get("coherence_optical"), cache.get("coherence_radio"));
    let (transfer, optical, radio) = (&transfer[0].1, &optical[0].1, &radio[0].1);
    let f = summary_f64(transfer, &["transfer_rate", "f"]);
    let f_ang = summary_f64(transfer, &["transfer_rate", "f_angular"]);
    let to = summary_f64(optical, &["coherence_time", "t_c_cyclic"]);
    let to_ang = summary_f64(optical, &["coherence_time", "t_c_angular"]);
    let tr = summary_f64(radio, &["coherence_time", "t_c_cyclic"]);
    let tr_ang = summary_f64(radio, &["coherence_time", "t_c_angular"]);
    let within10 = |x: f64, target: f64| x / target <= 10.0 && target / x <= 10.0;
    outcome(
        (f / 122.0 - 1.0).abs() <= 0.05 && within10(to, 5e-3) && within10(tr, 3e18),
        format!(
            "f {f:.1} Hz (angular {f_ang:.1}); optical t_c {to:.3e} s (angular {to_ang:.3e}); \
             radio t_c {tr:.3e} s (angular {tr_ang:.3e}); 2 pi convention declared"
        ),
    )
}

fn criterion_10(cache: &Cache) -> Outcome {
    let (desk, transfer) = (cache.get("protocol_desk"), cache.get("transfer_500km"));
    let (desk, transfer) = (&desk[0].1, &transfer[0].1);
    let success = summary_f64(desk, &["protocol", "success_rate"]);
    let trials = summary_f64(desk, &["protocol", "trials"]);
    let identity = summary_f64(transfer, &["transfer_rate", "identity_defect"]);
    outcome(
        (success - 0.5).abs() <= 0.005 && trials >= 1e5 && identity <= 1e-9,
        format!("success {success:.5} over {trials} trials, separation/broadening defect {identity:.1e}"),
    )
}

fn criterion_11(cache: &Cache) -> Outcome {
    let mut failing = Vec::new();
    let mut checked = 0;
    for name in library::names() {
        for (label, r) in cache.get(name).iter() {
            for c in &r.invariants {
                checked += 1;
                if !c.pass {
                    failing.push(format!("{label}: {} {:.1e}", c.name, c.max_defect));
                }
            }
        }
    }
    let detail = if failing.is_empty() {
        format!("{checked} checks green across {} scenarios", library::names().count())
    } else {
        failing.join("; ")
    };
    outcome(failing.is_empty(), detail)
}

fn main() {
    // flags passed by `cargo test` are ignored
    let cache = Cache::default();
    let criteria: [(&str, fn(&Cache) -> Outcome); 11] = [
        ("JC exact identity", |_| criterion_1()),
        ("Rabi benchmark", criterion_2),
        ("quasiprobability negativity", criterion_3),
        ("two-mode JC fluxes", criterion_4),
        ("purity", criterion_5),
        ("benchmark grid", criterion_6),
        ("standard-FCS contrast", criterion_7),
        ("three-mode Rabi", criterion_8),
        ("applications numbers", criterion_9),
        ("protocol desk simulation", criterion_10),
        ("invariant suite", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check(&cache);
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
