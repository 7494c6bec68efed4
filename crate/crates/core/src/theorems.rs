//! Residual batteries, one per structural result, evaluated over the samples
//! of a scene.
//!
//! Each battery is a list of [`Check`]s. Results that hold only for metric
//! structures are gated: in [`Mode::Enforced`] the suite is skipped (and
//! reported as such) unless the hypothesis holds at every sample, while
//! [`Mode::Diagnostic`] runs it regardless so that negative evidence can be
//! collected.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::{
    derived_tensors, fundamental_residuals, DerivedTensors, Family, FundamentalResiduals,
    ImmersionScene, PointGeometry, QuadricChart, Tolerances, DEFAULT_SAMPLE_BOX,
};
use crate::jet::{self, Jet};
use crate::paracomplex::{anticommutator_residual, quadric_residual, QuadricSpec};
use crate::paracontact::{
    bracket, covariant, field_value, induced_structure, MetricReport, ParacontactData, Signature,
};
use crate::tensor::{max_abs, Tensor3};

/// Identifiers of the verification suites, as they appear in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// Six identities relating `∇`, `h`, `S`, `τ` to `(φ, ξ, η)` on any frame.
    #[serde(rename = "TW_WZORY")]
    StructureIdentities,
    /// Their restrictions to `D`-fields, including Lie brackets.
    #[serde(rename = "COR_WZORY")]
    DistributionIdentities,
    /// Normality via Nijenhuis tensor versus `SφZ - φSZ + τ(Z)ξ = 0`.
    #[serde(rename = "PROP_NORMAL")]
    NormalityCriterion,
    /// `η = h(·, ξ)`, `S(D) ⊂ D`, `Sξ = -ξ + Z₀`, `τ(Z) = -h(Z, φZ₀)`.
    #[serde(rename = "LEM_EST")]
    ShapeOnXi,
    /// Cubic-form identities on `D`.
    #[serde(rename = "LEM_CUBIC")]
    CubicFormIdentities,
    /// `S = -Id` and `τ = 0`.
    #[serde(rename = "THM_STAU")]
    ShapeAndTau,
    /// Metric implies para(-1)-contact and para(-1)-Sasakian.
    #[serde(rename = "THM_EQUIV")]
    Equivalence,
    /// Metric implies vanishing cubic form.
    #[serde(rename = "THM_QUADRIC_FWD")]
    QuadricForward,
    /// Quadrics with `J̃A = -AJ̃` and `C = x` carry a metric structure.
    #[serde(rename = "THM_QUADRIC_CONV")]
    QuadricConverse,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::StructureIdentities,
        TheoremId::DistributionIdentities,
        TheoremId::NormalityCriterion,
        TheoremId::ShapeOnXi,
        TheoremId::CubicFormIdentities,
        TheoremId::ShapeAndTau,
        TheoremId::Equivalence,
        TheoremId::QuadricForward,
        TheoremId::QuadricConverse,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TheoremId::StructureIdentities => "TW_WZORY",
            TheoremId::DistributionIdentities => "COR_WZORY",
            TheoremId::NormalityCriterion => "PROP_NORMAL",
            TheoremId::ShapeOnXi => "LEM_EST",
            TheoremId::CubicFormIdentities => "LEM_CUBIC",
            TheoremId::ShapeAndTau => "THM_STAU",
            TheoremId::Equivalence => "THM_EQUIV",
            TheoremId::QuadricForward => "THM_QUADRIC_FWD",
            TheoremId::QuadricConverse => "THM_QUADRIC_CONV",
        }
    }

    pub fn hypothesis(self) -> Hypothesis {
        match self {
            TheoremId::StructureIdentities
            | TheoremId::DistributionIdentities
            | TheoremId::NormalityCriterion => Hypothesis::JTangent,
            TheoremId::ShapeOnXi
            | TheoremId::CubicFormIdentities
            | TheoremId::ShapeAndTau
            | TheoremId::Equivalence
            | TheoremId::QuadricForward => Hypothesis::Metric,
            TheoremId::QuadricConverse => Hypothesis::None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.code() == s)
            .ok_or_else(|| Error::Scene(format!("unknown suite `{s}`")))
    }
}

/// What a suite assumes about the scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    None,
    /// `C` is `J̃`-tangent.
    JTangent,
    /// `J̃`-tangent and `(φ, ξ, η, h)` is an almost paracontact metric structure.
    Metric,
}

/// Whether hypothesis gates are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Enforced,
    Diagnostic,
}

/// One named residual, with the tolerance it is held to (none = informational).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Check {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance: Some(tolerance),
        }
    }

    pub fn info(name: &str, value: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|t| self.value <= t)
    }
}

/// The checks of one suite at one sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub checks: Vec<Check>,
    #[serde(default)]
    pub vacuous: bool,
}

impl Battery {
    fn push(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check::new(name, value, tolerance));
    }

    fn info(&mut self, name: &str, value: f64) {
        self.checks.push(Check::info(name, value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Largest residual among toleranced checks.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.tolerance.is_some())
            .fold(0.0, |acc, c| acc.max(c.value))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }
}

/// Everything computed at one sample: geometry, structure, derived tensors.
#[derive(Debug, Clone)]
pub struct SampleContext {
    pub n: usize,
    pub geometry: PointGeometry,
    pub structure: ParacontactData,
    pub derived: DerivedTensors,
    pub fundamentals: FundamentalResiduals,
    /// Structure report at `α = -1`.
    pub metric: MetricReport,
}

impl SampleContext {
    pub fn evaluate(scene: &ImmersionScene, u: &[f64]) -> Result<SampleContext> {
        let geometry = PointGeometry::evaluate(scene, u)?;
        let structure = induced_structure(&geometry);
        let derived = derived_tensors(&geometry.induced);
        let fundamentals = fundamental_residuals(&geometry.induced, &derived);
        let metric = MetricReport::evaluate(&geometry, &structure, -1.0)?;
        Ok(SampleContext {
            n: scene.n,
            geometry,
            structure,
            derived,
            fundamentals,
            metric,
        })
    }

    pub fn expected_signature(&self) -> Signature {
        Signature {
            positive: self.n + 1,
            negative: self.n,
        }
    }

    /// Reason the hypothesis fails at this sample, if it does.
    pub fn hypothesis_failure(&self, hypothesis: Hypothesis, tol: &Tolerances) -> Option<String> {
        let tangency = self.structure.j_tangency;
        match hypothesis {
            Hypothesis::None => None,
            _ if tangency > tol.engine => {
                Some(format!("C is not J̃-tangent (residual {tangency:e})"))
            }
            Hypothesis::JTangent => None,
            Hypothesis::Metric => {
                if self.metric.metric_residual > tol.engine {
                    Some(format!(
                        "structure is not metric (residual {:e})",
                        self.metric.metric_residual
                    ))
                } else if self.metric.signature != self.expected_signature() {
                    Some(format!("h has signature {:?}", self.metric.signature))
                } else {
                    None
                }
            }
        }
    }

    fn h(&self) -> &DMatrix<f64> {
        &self.geometry.induced.h
    }

    fn h_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(self.h() * y))
    }

    fn q_of(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        contract3(&self.derived.q, x, y, z)
    }

    /// `D` basis plus pairwise sums, for identities quadratic in one argument.
    fn d_vectors_with_sums(&self) -> Vec<DVector<f64>> {
        let basis = &self.structure.d_basis;
        let mut out = basis.clone();
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                out.push(&basis[a] + &basis[b]);
            }
        }
        out
    }
}

fn contract3(t: &Tensor3, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
    let m = t.dim();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                acc += t[(i, j, k)] * x[i] * y[j] * z[k];
            }
        }
    }
    acc
}

fn unit(m: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(m, |k, _| if k == i { 1.0 } else { 0.0 })
}

/// Identities on coordinate frame fields `X = e_i`, `Y = e_j` (so `[X, Y] = 0`).
pub fn verify_structure_identities(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let ind = &ctx.geometry.induced;
    let pd = &ctx.structure;
    let m = ind.dim;
    let h_phi = &ind.h * &pd.phi;
    let nabla_phi = |i: usize, j: usize, k: usize| {
        let mut v = pd.d_phi[(i, k, j)];
        for p in 0..m {
            v += ind.gamma[(k, i, p)] * pd.phi[(p, j)];
        }
        v
    };
    let mut r = [0.0_f64; 6];
    for i in 0..m {
        for j in 0..m {
            let eta_nabla: f64 = (0..m).map(|k| pd.eta[k] * ind.gamma[(k, i, j)]).sum();
            let rhs = h_phi[(i, j)] + pd.d_eta_raw[(i, j)] + pd.eta[j] * ind.tau[i];
            r[0] = r[0].max((eta_nabla - rhs).abs());

            for k in 0..m {
                let lhs: f64 = (0..m).map(|p| pd.phi[(k, p)] * ind.gamma[(p, i, j)]).sum();
                let rhs = nabla_phi(i, j, k) - pd.eta[j] * ind.s[(k, i)] - ind.h[(i, j)] * pd.xi[k];
                r[1] = r[1].max((lhs - rhs).abs());

                let bracket_part = nabla_phi(i, j, k) - nabla_phi(j, i, k)
                    + pd.eta[i] * ind.s[(k, j)]
                    - pd.eta[j] * ind.s[(k, i)];
                r[3] = r[3].max(bracket_part.abs());
            }

            let eta_bracket = h_phi[(i, j)] - h_phi[(j, i)] + pd.d_eta_raw[(i, j)]
                - pd.d_eta_raw[(j, i)]
                + pd.eta[j] * ind.tau[i]
                - pd.eta[i] * ind.tau[j];
            r[2] = r[2].max(eta_bracket.abs());
        }
        let nabla_xi: f64 = (0..m)
            .map(|k| {
                let gx: f64 = (0..m).map(|p| ind.gamma[(k, i, p)] * pd.xi[p]).sum();
                pd.eta[k] * (pd.d_xi[(i, k)] + gx)
            })
            .sum();
        r[4] = r[4].max((nabla_xi - ind.tau[i]).abs());
        let eta_s: f64 = (0..m).map(|k| pd.eta[k] * ind.s[(k, i)]).sum();
        let h_xi: f64 = (0..m).map(|p| ind.h[(i, p)] * pd.xi[p]).sum();
        r[5] = r[5].max((eta_s + h_xi).abs());
    }
    let names = [
        "eta_nabla_xy",
        "phi_nabla_xy",
        "eta_bracket",
        "phi_bracket",
        "eta_nabla_xi",
        "eta_s",
    ];
    let mut battery = Battery::default();
    for (name, value) in names.iter().zip(r) {
        battery.push(name, value, tol.engine);
    }
    battery
}

/// Restrictions to `D`-fields, with Lie brackets from the fields' jets.
pub fn verify_distribution_identities(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let ind = &ctx.geometry.induced;
    let pd = &ctx.structure;
    let fields = &pd.d_basis_fields;
    let mut battery = Battery {
        vacuous: fields.is_empty(),
        ..Battery::default()
    };
    if fields.is_empty() {
        return battery;
    }
    let xi = &pd.xi;
    let phi_fields: Vec<Vec<Jet>> = fields.iter().map(|w| pd.phi_field(w)).collect();
    let mut r = [0.0_f64; 5];
    for (a, z_field) in fields.iter().enumerate() {
        let z = field_value(z_field);
        let phi_z = pd.phi_of(&z);
        for (b, w_field) in fields.iter().enumerate() {
            let w = field_value(w_field);
            let phi_w = pd.phi_of(&w);
            let nabla_zw = covariant(ind, &z, w_field);
            r[0] = r[0].max((pd.eta_of(&nabla_zw) - ctx.h_of(&z, &phi_w)).abs());

            let lhs = pd.phi_of(&nabla_zw);
            let rhs = covariant(ind, &z, &phi_fields[b]) - xi * ctx.h_of(&z, &w);
            r[2] = r[2].max(max_abs((lhs - rhs).as_slice()));

            let eta_br = pd.eta_of(&bracket(z_field, w_field));
            r[3] = r[3].max((eta_br - ctx.h_of(&z, &phi_w) + ctx.h_of(&w, &phi_z)).abs());
        }
        let nabla_xi_z = covariant(ind, xi, z_field);
        r[1] = r[1].max((pd.eta_of(&nabla_xi_z) - ctx.h_of(xi, &phi_z)).abs());

        let eta_br = pd.eta_of(&bracket(z_field, &pd.xi_field));
        let tau_z = ind.tau.dot(&z);
        r[4] = r[4].max((eta_br + ctx.h_of(xi, &phi_z) - tau_z).abs());
        let _ = a;
    }
    let names = [
        "eta_nabla_zw",
        "eta_nabla_xi_z",
        "phi_nabla_zw",
        "eta_bracket_zw",
        "eta_bracket_z_xi",
    ];
    for (name, value) in names.iter().zip(r) {
        battery.push(name, value, tol.theorem);
    }
    battery
}

/// Normality two ways; the battery checks that both verdicts agree.
pub fn verify_normality_criterion(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let normality = ctx.metric.normality;
    let agree = (normality.nijenhuis <= tol.theorem) == (normality.operational <= tol.theorem);
    let mut battery = Battery::default();
    battery.info("nijenhuis", normality.nijenhuis);
    battery.info("operational", normality.operational);
    battery.push("verdicts_disagree", if agree { 0.0 } else { 1.0 }, 0.5);
    battery
}

/// `Z₀ := Sξ + ξ`.
pub fn extract_z0(ctx: &SampleContext) -> DVector<f64> {
    let ind = &ctx.geometry.induced;
    &ind.s * &ctx.structure.xi + &ctx.structure.xi
}

pub fn verify_shape_on_xi(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let ind = &ctx.geometry.induced;
    let pd = &ctx.structure;
    let mut battery = Battery {
        vacuous: pd.d_basis.is_empty(),
        ..Battery::default()
    };
    let eta_h_xi = &pd.eta - &ind.h * &pd.xi;
    battery.push("eta_equals_h_xi", max_abs(eta_h_xi.as_slice()), tol.theorem);

    let z0 = extract_z0(ctx);
    battery.push("z0_in_d", pd.eta_of(&z0).abs(), tol.theorem);
    battery.info("z0_norm", max_abs(z0.as_slice()));

    let phi_z0 = pd.phi_of(&z0);
    let mut s_preserves = 0.0_f64;
    let mut tau_on_d = 0.0_f64;
    for z in &pd.d_basis {
        s_preserves = s_preserves.max(pd.eta_of(&(&ind.s * z)).abs());
        tau_on_d = tau_on_d.max((ind.tau.dot(z) + ctx.h_of(z, &phi_z0)).abs());
    }
    if !pd.d_basis.is_empty() {
        battery.push("s_preserves_d", s_preserves, tol.theorem);
        battery.push("tau_on_d", tau_on_d, tol.theorem);
    }
    battery
}

pub fn verify_cubic_form_identities(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let ind = &ctx.geometry.induced;
    let pd = &ctx.structure;
    let basis = &pd.d_basis;
    let mut battery = Battery {
        vacuous: basis.is_empty(),
        ..Battery::default()
    };
    if basis.is_empty() {
        return battery;
    }
    let m = ind.dim;
    let mut phi_symmetry = 0.0_f64;
    for i in 0..m {
        let x = unit(m, i);
        for w in basis {
            for z in basis {
                let v = ctx.q_of(&x, w, z) + ctx.q_of(&x, &pd.phi_of(w), &pd.phi_of(z));
                phi_symmetry = phi_symmetry.max(v.abs());
            }
        }
    }
    let mut on_d = 0.0_f64;
    for w1 in basis {
        for w2 in basis {
            for w3 in basis {
                on_d = on_d.max(ctx.q_of(w1, w2, w3).abs());
            }
        }
    }
    let mut xi_ww = 0.0_f64;
    for w in ctx.d_vectors_with_sums() {
        let q = ctx.q_of(&pd.xi, &w, &w);
        let sw = &ind.s * &w;
        let phi_w = pd.phi_of(&w);
        let s_phi_w = &ind.s * &phi_w;
        xi_ww = xi_ww
            .max((q + ctx.h_of(&sw, &phi_w)).abs())
            .max((q - ctx.h_of(&s_phi_w, &w)).abs());
    }
    battery.push("q_phi_antisymmetry", phi_symmetry, tol.theorem);
    battery.push("q_on_d", on_d, tol.theorem);
    battery.push("q_xi_ww", xi_ww, tol.theorem);
    battery
}

pub fn verify_shape_and_tau(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let ind = &ctx.geometry.induced;
    let m = ind.dim;
    let s_plus_id = &ind.s + DMatrix::<f64>::identity(m, m);
    let mut battery = Battery::default();
    battery.push("s_plus_id", max_abs(s_plus_id.as_slice()), tol.theorem);
    battery.push("tau", max_abs(ind.tau.as_slice()), tol.theorem);
    // intermediate identity h(SW, φW) = 0 on D, reported only
    let h_sw_phiw = ctx
        .d_vectors_with_sums()
        .iter()
        .map(|w| ctx.h_of(&(&ind.s * w), &ctx.structure.phi_of(w)).abs())
        .fold(0.0, f64::max);
    battery.info("h_sw_phiw", h_sw_phiw);
    battery
}

pub fn verify_equivalence(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let report = &ctx.metric;
    let mut battery = Battery::default();
    battery.push("metric", report.metric_residual, tol.engine);
    battery.push(
        "contact_alpha_minus_one",
        report.contact_residual,
        tol.theorem,
    );
    battery.push(
        "sasakian_alpha_minus_one",
        report.sasakian_residual,
        tol.theorem,
    );
    battery.push(
        "normality_nijenhuis",
        report.normality.nijenhuis,
        tol.theorem,
    );
    battery.push(
        "normality_operational",
        report.normality.operational,
        tol.theorem,
    );
    battery
}

pub fn verify_quadric_forward(ctx: &SampleContext, tol: &Tolerances) -> Battery {
    let mut battery = Battery::default();
    battery.push("q_max", ctx.derived.q.max_abs(), tol.theorem);
    battery
}

/// Converse battery at one sample of a scene lying on `quadric` with `C = x`.
pub fn verify_quadric_converse_sample(
    ctx: &SampleContext,
    quadric: &QuadricSpec,
    tol: &Tolerances,
) -> Battery {
    let f = jet::values(&ctx.geometry.immersion.f);
    let on_quadric = quadric_residual(quadric, &f).map_or(f64::INFINITY, f64::abs);
    let anticommutator = anticommutator_residual(quadric.a()).unwrap_or(f64::INFINITY);
    let report = &ctx.metric;
    let stau = verify_shape_and_tau(ctx, tol);
    let mut battery = Battery::default();
    battery.push("anticommutator", anticommutator, tol.engine);
    battery.push("on_quadric", on_quadric, tol.engine);
    battery.push("j_tangency", report.j_tangency_residual, tol.engine);
    battery.push("metric", report.metric_residual, tol.engine);
    let signature_defect = if report.signature == ctx.expected_signature() {
        0.0
    } else {
        1.0
    };
    battery.push("signature_defect", signature_defect, 0.5);
    battery.push(
        "s_plus_id",
        stau.get("s_plus_id").unwrap_or(f64::INFINITY),
        tol.theorem,
    );
    battery.push("tau", stau.get("tau").unwrap_or(f64::INFINITY), tol.theorem);
    battery.push("q_max", ctx.derived.q.max_abs(), tol.theorem);
    battery.push(
        "contact_alpha_minus_one",
        report.contact_residual,
        tol.theorem,
    );
    battery.push(
        "sasakian_alpha_minus_one",
        report.sasakian_residual,
        tol.theorem,
    );
    battery.push(
        "normality_nijenhuis",
        report.normality.nijenhuis,
        tol.theorem,
    );
    battery.push(
        "normality_operational",
        report.normality.operational,
        tol.theorem,
    );
    battery
}

/// Quadric the converse applies to: `C = x` on a centred quadric.
fn converse_quadric(scene: &ImmersionScene) -> Option<QuadricSpec> {
    match &scene.family {
        Family::QuadricRadial(chart) => Some(chart.quadric.clone()),
        Family::Hyperbola => scene.family.quadric(),
        Family::PerturbedTransversal(p) if p.epsilon == 0.0 => Some(p.chart.quadric.clone()),
        _ => None,
    }
}

/// Runs one suite at one sample, honouring the gate in enforced mode.
pub fn verify_sample(
    id: TheoremId,
    scene: &ImmersionScene,
    ctx: &SampleContext,
    mode: Mode,
) -> Result<Battery> {
    let tol = &scene.tolerances;
    if mode == Mode::Enforced {
        if let Some(reason) = ctx.hypothesis_failure(id.hypothesis(), tol) {
            return Err(Error::HypothesisNotMet(reason));
        }
    }
    Ok(match id {
        TheoremId::StructureIdentities => verify_structure_identities(ctx, tol),
        TheoremId::DistributionIdentities => verify_distribution_identities(ctx, tol),
        TheoremId::NormalityCriterion => verify_normality_criterion(ctx, tol),
        TheoremId::ShapeOnXi => verify_shape_on_xi(ctx, tol),
        TheoremId::CubicFormIdentities => verify_cubic_form_identities(ctx, tol),
        TheoremId::ShapeAndTau => verify_shape_and_tau(ctx, tol),
        TheoremId::Equivalence => verify_equivalence(ctx, tol),
        TheoremId::QuadricForward => verify_quadric_forward(ctx, tol),
        TheoremId::QuadricConverse => {
            let quadric = converse_quadric(scene).ok_or_else(|| {
                Error::HypothesisNotMet("scene is not a quadric with C = x".into())
            })?;
            verify_quadric_converse_sample(ctx, &quadric, tol)
        }
    })
}

/// Whether a suite ran, and if not, why.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Ran,
    HypothesisNotMet,
    NotApplicable,
}

/// Battery results of one sample inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub sample: usize,
    pub max_residual: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Outcome of one suite over all admissible samples of a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub status: SuiteStatus,
    pub passed: bool,
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_failure: Option<String>,
    pub max_residual: f64,
    pub per_sample: Vec<SampleResult>,
}

impl TheoremReport {
    /// Largest value of a named check across samples.
    pub fn max_of(&self, name: &str) -> Option<f64> {
        self.per_sample
            .iter()
            .flat_map(|s| s.checks.iter())
            .filter(|c| c.name == name)
            .map(|c| c.value)
            .reduce(f64::max)
    }
}

/// Runs a suite over pre-evaluated samples `(index, context)`.
pub fn run_suite(
    id: TheoremId,
    scene: &ImmersionScene,
    samples: &[(usize, SampleContext)],
    mode: Mode,
) -> TheoremReport {
    let mut report = TheoremReport {
        theorem_id: id,
        status: SuiteStatus::Ran,
        passed: true,
        vacuous: false,
        hypothesis_failure: None,
        max_residual: 0.0,
        per_sample: Vec::new(),
    };
    if id == TheoremId::QuadricConverse && converse_quadric(scene).is_none() {
        report.status = SuiteStatus::NotApplicable;
        return report;
    }
    if mode == Mode::Enforced {
        let failure = samples.iter().find_map(|(index, ctx)| {
            ctx.hypothesis_failure(id.hypothesis(), &scene.tolerances)
                .map(|reason| format!("sample {index}: {reason}"))
        });
        if let Some(reason) = failure {
            report.status = SuiteStatus::HypothesisNotMet;
            report.passed = false;
            report.hypothesis_failure = Some(reason);
            return report;
        }
    }
    let batteries: Vec<(usize, Battery)> = samples
        .par_iter()
        .map(|(index, ctx)| {
            let battery =
                verify_sample(id, scene, ctx, Mode::Diagnostic).expect("gate already evaluated");
            (*index, battery)
        })
        .collect();
    report.vacuous = !batteries.is_empty() && batteries.iter().all(|(_, b)| b.vacuous);
    for (index, battery) in batteries {
        let passed = battery.passed();
        let max_residual = battery.max_residual();
        report.passed &= passed;
        report.max_residual = report.max_residual.max(max_residual);
        report.per_sample.push(SampleResult {
            sample: index,
            max_residual,
            passed,
            checks: battery.checks,
        });
    }
    report
}

/// Evaluates every sample of a scene in parallel, in sample order.
pub fn evaluate_samples(scene: &ImmersionScene) -> Vec<(usize, Result<SampleContext>)> {
    scene
        .samples
        .par_iter()
        .enumerate()
        .map(|(index, u)| (index, SampleContext::evaluate(scene, u)))
        .collect()
}

/// Sample indices paired with the degeneracy that ruled them out.
pub type SkippedSamples = Vec<(usize, Error)>;

/// Splits sample evaluations into usable contexts and degeneracies.
///
/// Non-degeneracy errors are returned as `Err`.
pub fn partition_samples(
    evaluated: Vec<(usize, Result<SampleContext>)>,
) -> Result<(Vec<(usize, SampleContext)>, SkippedSamples)> {
    let mut good = Vec::new();
    let mut skipped = Vec::new();
    for (index, result) in evaluated {
        match result {
            Ok(ctx) => good.push((index, ctx)),
            Err(e) if e.is_degeneracy() => skipped.push((index, e)),
            Err(e) => return Err(e),
        }
    }
    Ok((good, skipped))
}

/// Builds a radial quadric scene with `C = x` and runs the converse battery.
pub fn verify_quadric_converse(
    spec: &QuadricSpec,
    num_samples: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let scene = quadric_scene(spec.clone(), num_samples, seed)?;
    let (samples, _) = partition_samples(evaluate_samples(&scene))?;
    Ok(run_suite(
        TheoremId::QuadricConverse,
        &scene,
        &samples,
        Mode::Diagnostic,
    ))
}

/// Radial quadric scene with default box and tolerances.
pub fn quadric_scene(spec: QuadricSpec, num_samples: usize, seed: u64) -> Result<ImmersionScene> {
    let n = spec.n();
    let chart = QuadricChart::generate(spec, seed)?;
    ImmersionScene::with_random_samples(
        Family::QuadricRadial(chart),
        n,
        seed,
        num_samples,
        DEFAULT_SAMPLE_BOX,
        Tolerances::default(),
    )
}
