use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::scene_file::{SceneFile, SceneSpec};
use crate::error::{Error, Result};
use crate::hypersurface::{FundamentalResiduals, Tolerances};
use crate::theorems::{
    evaluate_samples, partition_samples, run_suite, Mode, SampleContext, SuiteStatus, TheoremId,
    TheoremReport,
};

pub const REPORT_VERSION: u32 = 1;

/// Largest fraction of samples that may be skipped as degenerate.
pub const MAX_SKIP_FRACTION: f64 = 0.1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Exit code for an error raised before or while building a scene.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::BasePointNotFound(_) | Error::Generation(_) => EXIT_DEGENERATE,
        e if e.is_degeneracy() => EXIT_DEGENERATE,
        Error::HypothesisNotMet(_) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

/// Full result of one `verify` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub scene: SceneSpec,
    pub tolerances: Tolerances,
    pub suites_selected: Vec<TheoremId>,
    pub mode: Mode,
    pub engine_self_test: EngineSelfTest,
    pub skipped_samples: Vec<SkippedSample>,
    pub geometry: Vec<SampleGeometry>,
    pub suites: Vec<TheoremReport>,
    pub passed: bool,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSelfTest {
    pub passed: bool,
    pub tolerance: f64,
    pub max: FundamentalResiduals,
    pub per_sample: Vec<SampleFundamentals>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFundamentals {
    pub sample: usize,
    pub residuals: FundamentalResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSample {
    pub sample: usize,
    pub reason: String,
}

/// Induced quantities at one sample; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGeometry {
    pub sample: usize,
    pub point: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub shape_operator: Vec<Vec<f64>>,
    pub tau: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub j_tangency: f64,
    pub metric_residual: f64,
}

/// Wall-clock seconds; omitted with `--no-timing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub evaluation: f64,
    pub suites: BTreeMap<String, f64>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl SampleGeometry {
    fn new(sample: usize, ctx: &SampleContext) -> SampleGeometry {
        let ind = &ctx.geometry.induced;
        SampleGeometry {
            sample,
            point: ctx.geometry.u.clone(),
            h: rows(&ind.h),
            shape_operator: rows(&ind.s),
            tau: ind.tau.iter().copied().collect(),
            xi: ctx.structure.xi.iter().copied().collect(),
            eta: ctx.structure.eta.iter().copied().collect(),
            j_tangency: ctx.structure.j_tangency,
            metric_residual: ctx.metric.metric_residual,
        }
    }
}

fn engine_self_test(samples: &[(usize, SampleContext)], tolerance: f64) -> EngineSelfTest {
    let mut max = FundamentalResiduals {
        gauss: 0.0,
        codazzi_h: 0.0,
        codazzi_s: 0.0,
        ricci: 0.0,
    };
    let per_sample: Vec<SampleFundamentals> = samples
        .iter()
        .map(|(index, ctx)| {
            let r = ctx.fundamentals;
            max.gauss = max.gauss.max(r.gauss);
            max.codazzi_h = max.codazzi_h.max(r.codazzi_h);
            max.codazzi_s = max.codazzi_s.max(r.codazzi_s);
            max.ricci = max.ricci.max(r.ricci);
            SampleFundamentals {
                sample: *index,
                residuals: r,
            }
        })
        .collect();
    EngineSelfTest {
        passed: !samples.is_empty() && max.max() <= tolerance,
        tolerance,
        max,
        per_sample,
    }
}

/// Builds the scene, evaluates every sample and runs the selected suites.
pub fn run(file: &SceneFile, mode: Mode, timing: bool) -> Result<RunReport> {
    let scene = file.build()?;
    let start = Instant::now();
    let (samples, skipped) = partition_samples(evaluate_samples(&scene))?;
    let evaluation = start.elapsed().as_secs_f64();

    let selected = file.suites.ids();
    let mut suite_times = BTreeMap::new();
    let mut suites = Vec::with_capacity(selected.len());
    if !samples.is_empty() {
        for &id in &selected {
            let start = Instant::now();
            suites.push(run_suite(id, &scene, &samples, mode));
            suite_times.insert(id.code().to_string(), start.elapsed().as_secs_f64());
        }
    }

    let self_test = engine_self_test(&samples, scene.tolerances.engine);
    let total = scene.samples.len();
    let too_degenerate =
        samples.is_empty() || skipped.len() as f64 > MAX_SKIP_FRACTION * total as f64;
    let passed = self_test.passed && suites.iter().all(|s| s.passed);
    let exit_code = if too_degenerate {
        EXIT_DEGENERATE
    } else if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };

    let mut echo = file.scene.clone();
    echo.num_samples = total;
    echo.samples = Some(scene.samples.clone());
    Ok(RunReport {
        version: REPORT_VERSION,
        scene: echo,
        tolerances: scene.tolerances,
        suites_selected: selected,
        mode,
        engine_self_test: self_test,
        skipped_samples: skipped
            .into_iter()
            .map(|(sample, e)| SkippedSample {
                sample,
                reason: e.to_string(),
            })
            .collect(),
        geometry: samples
            .iter()
            .map(|(i, ctx)| SampleGeometry::new(*i, ctx))
            .collect(),
        suites,
        passed: passed && !too_degenerate,
        exit_code,
        timing: timing.then_some(Timing {
            evaluation,
            suites: suite_times,
        }),
    })
}

impl RunReport {
    pub fn suite(&self, id: TheoremId) -> Option<&TheoremReport> {
        self.suites.iter().find(|s| s.theorem_id == id)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    /// Human-readable summary.
    pub fn write_summary(&self, out: &mut dyn Write) -> io::Result<()> {
        let total = self.scene.num_samples;
        writeln!(
            out,
            "scene: {} (n = {}), {} samples, {} skipped, mode {:?}",
            self.scene.family,
            self.scene.n,
            total,
            self.skipped_samples.len(),
            self.mode
        )?;
        for skipped in &self.skipped_samples {
            writeln!(
                out,
                "  skipped sample {}: {}",
                skipped.sample, skipped.reason
            )?;
        }
        let st = &self.engine_self_test;
        writeln!(
            out,
            "engine self-test: {}  gauss {:.2e}  codazzi_h {:.2e}  codazzi_s {:.2e}  ricci {:.2e}",
            verdict(st.passed),
            st.max.gauss,
            st.max.codazzi_h,
            st.max.codazzi_s,
            st.max.ricci
        )?;
        if self.scene.n == 0 {
            if let Some(g) = self.geometry.first() {
                writeln!(
                    out,
                    "sample {}: h = {:.12}  S = {:.12}  tau = {:.12}",
                    g.sample, g.h[0][0], g.shape_operator[0][0], g.tau[0]
                )?;
            }
        }
        for suite in &self.suites {
            let status = match suite.status {
                SuiteStatus::Ran if suite.vacuous => format!("{} (vacuous)", verdict(suite.passed)),
                SuiteStatus::Ran => verdict(suite.passed).to_string(),
                SuiteStatus::HypothesisNotMet => "FAIL (hypothesis not met)".to_string(),
                SuiteStatus::NotApplicable => "n/a".to_string(),
            };
            write!(out, "{:<16} {:<26}", suite.theorem_id.code(), status)?;
            let has_checks = suite.per_sample.iter().any(|s| !s.checks.is_empty());
            if suite.status == SuiteStatus::Ran && has_checks {
                write!(out, " max residual {:.2e}", suite.max_residual)?;
                let failing: Vec<&str> = failing_checks(suite);
                if !failing.is_empty() {
                    write!(out, "  failing: {}", failing.join(", "))?;
                }
            }
            if let Some(reason) = &suite.hypothesis_failure {
                write!(out, " {reason}")?;
            }
            writeln!(out)?;
        }
        if let Some(timing) = &self.timing {
            let suites: f64 = timing.suites.values().sum();
            writeln!(
                out,
                "time: evaluation {:.3}s, suites {:.3}s",
                timing.evaluation, suites
            )?;
        }
        writeln!(
            out,
            "overall: {} (exit {})",
            verdict(self.passed),
            self.exit_code
        )
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

fn failing_checks(suite: &TheoremReport) -> Vec<&str> {
    let mut names: Vec<&str> = suite
        .per_sample
        .iter()
        .flat_map(|s| s.checks.iter())
        .filter(|c| !c.passed())
        .map(|c| c.name.as_str())
        .collect();
    names.sort_unstable();
    names.dedup();
    names
}
