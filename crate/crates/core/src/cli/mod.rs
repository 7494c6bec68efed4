//! Scene files, run reports and the `verify`, `gen-quadric` and `sweep`
//! commands. Each command returns its process exit code.

mod report;
mod scene_file;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub use report::{
    exit_code_for, run, EngineSelfTest, RunReport, SampleFundamentals, SampleGeometry,
    SkippedSample, Timing, EXIT_DEGENERATE, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, MAX_SKIP_FRACTION,
    REPORT_VERSION,
};
pub use scene_file::{
    default_direction, quadric_scene_file, AllKeyword, ChartParams, PerturbedFileParams, SceneFile,
    SceneSpec, SuiteSelection, SCENE_VERSION,
};

use crate::error::{Error, Result};
use crate::hypersurface::{DEFAULT_NUM_SAMPLES, DEFAULT_SAMPLE_BOX};
use crate::paracomplex::random_quadric_spec;
use crate::theorems::{quadric_scene, Mode, TheoremId};

/// Flags of the `verify` command.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub json: Option<PathBuf>,
    pub diagnostic: bool,
    pub no_timing: bool,
}

/// Loads a scene file, runs it and writes the summary (and JSON report).
pub fn cmd_verify(
    path: &Path,
    options: &VerifyOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let file = match SceneFile::load(path) {
        Ok(file) => file,
        Err(e) => return fail(err, path, &e),
    };
    let mode = if options.diagnostic {
        Mode::Diagnostic
    } else {
        Mode::Enforced
    };
    let report = match run(&file, mode, !options.no_timing) {
        Ok(report) => report,
        Err(e) => return fail(err, path, &e),
    };
    if let Some(json) = &options.json {
        if let Err(e) = std::fs::write(json, report.to_json_pretty()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", json.display());
            return EXIT_INPUT;
        }
    }
    if let Err(e) = report.write_summary(out) {
        let _ = writeln!(err, "error: {e}");
    }
    report.exit_code
}

fn fail(err: &mut dyn Write, path: &Path, error: &Error) -> i32 {
    let _ = writeln!(err, "error: {}: {error}", path.display());
    exit_code_for(error)
}

/// Builds the scene file emitted by `gen-quadric`.
pub fn gen_quadric_file(n: usize, seed: u64) -> Result<SceneFile> {
    let spec = random_quadric_spec(n, seed)?;
    let scene = quadric_scene(spec, DEFAULT_NUM_SAMPLES, seed)?;
    quadric_scene_file(&scene, seed, DEFAULT_SAMPLE_BOX)
}

/// Writes a random anticommuting quadric scene to `out_path`.
pub fn cmd_gen_quadric(
    n: usize,
    seed: u64,
    out_path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let file = match gen_quadric_file(n, seed) {
        Ok(file) => file,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = std::fs::write(out_path, file.to_json_pretty()) {
        let _ = writeln!(err, "error: cannot write {}: {e}", out_path.display());
        return EXIT_INPUT;
    }
    let _ = writeln!(out, "wrote {} (n = {n}, seed = {seed})", out_path.display());
    EXIT_PASS
}

/// One row of a parameter sweep; residuals are maxima over samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metric: f64,
    pub s_plus_id: f64,
    pub tau: f64,
    pub normality_operational: f64,
    pub exit_code: i32,
}

/// Scene file with `epsilon` replaced; a quadric scene becomes a perturbed one.
pub fn with_epsilon(base: &SceneFile, epsilon: f64) -> Result<SceneFile> {
    let mut file = base.clone();
    match file.scene.family.as_str() {
        "perturbed_transversal" => {}
        "quadric_radial" => file.scene.family = "perturbed_transversal".into(),
        other => {
            return Err(Error::Scene(format!(
                "family `{other}` has no epsilon parameter (use perturbed_transversal or quadric_radial)"
            )))
        }
    }
    let Value::Object(params) = &mut file.scene.params else {
        return Err(Error::Scene("scene.params must be an object".into()));
    };
    params.insert("epsilon".into(), Value::from(epsilon));
    file.suites = SuiteSelection::default();
    Ok(file)
}

/// Runs the scene in diagnostic mode once per value.
pub fn sweep_rows(base: &SceneFile, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Scene("--values: empty list".into()));
    }
    values
        .iter()
        .map(|&value| {
            let report = run(&with_epsilon(base, value)?, Mode::Diagnostic, false)?;
            let max_of = |id: TheoremId, name: &str| {
                report
                    .suite(id)
                    .and_then(|s| s.max_of(name))
                    .unwrap_or(f64::NAN)
            };
            Ok(SweepRow {
                value,
                metric: report
                    .geometry
                    .iter()
                    .map(|g| g.metric_residual)
                    .fold(0.0, f64::max),
                s_plus_id: max_of(TheoremId::ShapeAndTau, "s_plus_id"),
                tau: max_of(TheoremId::ShapeAndTau, "tau"),
                normality_operational: max_of(TheoremId::Equivalence, "normality_operational"),
                exit_code: report.exit_code,
            })
        })
        .collect()
}

/// Prints a table of residuals against the swept parameter.
pub fn cmd_sweep(
    path: &Path,
    param: &str,
    values: &[f64],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if param != "epsilon" {
        let _ = writeln!(
            err,
            "error: unsupported sweep parameter `{param}` (only epsilon)"
        );
        return EXIT_INPUT;
    }
    let rows = SceneFile::load(path).and_then(|base| sweep_rows(&base, values));
    let rows = match rows {
        Ok(rows) => rows,
        Err(e) => return fail(err, path, &e),
    };
    let _ = writeln!(
        out,
        "{:>12} {:>12} {:>12} {:>12} {:>12} {:>6}",
        "epsilon", "metric", "s_plus_id", "tau", "normality", "exit"
    );
    for row in &rows {
        let _ = writeln!(
            out,
            "{:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>6}",
            row.value, row.metric, row.s_plus_id, row.tau, row.normality_operational, row.exit_code
        );
    }
    EXIT_PASS
}
