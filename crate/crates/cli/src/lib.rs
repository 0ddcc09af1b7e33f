//! Scenario runner for the photon-resolved Floquet counting library.

pub mod error;
pub mod library;
pub mod output;
pub mod run;
pub mod scenario;
pub mod validate;

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

pub use error::CliError;
pub use run::{run_scenario, RunOptions, RunResult};
pub use scenario::Scenario;

/// What `execute` wrote and computed for each expanded scenario.
#[derive(Debug)]
pub struct Execution {
    pub runs: Vec<(Option<String>, PathBuf, RunResult)>,
}

impl Execution {
    pub fn failures(&self) -> Vec<String> {
        self.runs
            .iter()
            .flat_map(|(label, _, r)| {
                r.failures.iter().map(move |f| match label {
                    Some(l) => format!("[{l}] {f}"),
                    None => f.clone(),
                })
            })
            .collect()
    }
}

fn write_run(dir: &Path, s: &Scenario, r: &RunResult, seed: Option<u64>) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut table = |name: &str, written: Result<(), CliError>| -> Result<(), CliError> {
        written?;
        files.push(name.to_string());
        Ok(())
    };
    if !r.cumulants.is_empty() {
        table(output::CUMULANTS_CSV, output::write_csv(&dir.join(output::CUMULANTS_CSV), &r.cumulants))?;
    }
    if !r.quasi.is_empty() {
        table(output::QUASIPROB_CSV, output::write_csv(&dir.join(output::QUASIPROB_CSV), &r.quasi))?;
    }
    if !r.pn.is_empty() {
        table(output::PN_CSV, output::write_csv(&dir.join(output::PN_CSV), &r.pn))?;
    }
    if !r.purity.is_empty() {
        table(output::PURITY_CSV, output::write_csv(&dir.join(output::PURITY_CSV), &r.purity))?;
    }
    output::write_json(&dir.join(output::SUMMARY_JSON), &Value::Object(r.summary.clone()))?;
    files.push(output::SUMMARY_JSON.into());
    let timings: Map<String, Value> = r.timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    files.push(output::MANIFEST_JSON.into());
    let manifest = json!({
        "scenario": s,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed.unwrap_or(s.seed),
        "threads": rayon::current_num_threads(),
        "timings_s": timings,
        "files": files,
    });
    output::write_json(&dir.join(output::MANIFEST_JSON), &manifest)?;
    Ok(files)
}

/// Validates, runs every variant and writes its outputs under `out_dir`
/// (variants into subdirectories named by their label). Returns a tolerance error
/// after writing everything if any check failed.
pub fn execute(s: &Scenario, out_dir: &Path, opts: &RunOptions) -> Result<Execution, CliError> {
    let issues = validate::validate(s);
    if !issues.is_empty() {
        return Err(CliError::Validation(issues));
    }
    let mut runs = Vec::new();
    for (label, sc) in s.expand()? {
        let dir = match &label {
            Some(l) => out_dir.join(l),
            None => out_dir.to_path_buf(),
        };
        let r = run_scenario(&sc, opts)?;
        write_run(&dir, &sc, &r, opts.seed)?;
        runs.push((label, dir, r));
    }
    let exec = Execution { runs };
    let failures = exec.failures();
    if failures.is_empty() { Ok(exec) } else { Err(CliError::Tolerance(failures)) }
}

/// A bundled scenario name or a path to a JSON file.
pub fn resolve(name_or_path: &str) -> Result<Scenario, CliError> {
    match library::get(name_or_path) {
        Some(text) => scenario::parse_str(text),
        None => scenario::load(Path::new(name_or_path)),
    }
}
