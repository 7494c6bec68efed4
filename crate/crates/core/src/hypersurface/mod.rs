//! Immersions `f: M → R^{2n+2}` with a transversal field `C`, and the data
//! they induce.
//!
//! Differentiating along the chart splits into tangent and transversal
//! parts:
//!
//! ```text
//! ∂_i ∂_j f = Γ^k_ij e_k + h_ij C
//! ∂_i C     = -S^k_i e_k + τ_i C
//! ```
//!
//! with `e_i = ∂_i f`. Everything is carried in jet arithmetic, so the first
//! chart derivatives of `Γ`, `h`, `S`, `τ` come out of the same computation.

mod polynomial;
mod quadric;

pub use polynomial::{Polynomial, Term};
pub use quadric::{find_base_point, tangent_basis, QuadricChart, BASE_POINT_ATTEMPTS};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{self, Jet, JetMatrix};
use crate::paracomplex::{apply_j_jets, QuadricSpec};
use crate::tensor::{max_abs_matrix, Tensor3, Tensor4};

/// Frames with a larger condition number are rejected.
pub const MAX_FRAME_CONDITION: f64 = 1e8;

/// Relative floor on `|det h|` below which a sample is degenerate.
pub const METRIC_DET_FLOOR: f64 = 1e-10;

/// Radial-chart samples need `q(y) > MIN_RAY_QUADRATIC`.
pub const MIN_RAY_QUADRATIC: f64 = 0.1;

/// Shortest projected perturbation direction that is still normalized.
pub const MIN_PERTURBATION_NORM: f64 = 1e-6;

pub const DEFAULT_SAMPLE_BOX: f64 = 0.4;
pub const DEFAULT_NUM_SAMPLES: usize = 20;

/// Residual thresholds of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Engine-level identities (fundamental equations, structure axioms).
    pub engine: f64,
    /// Lemma and theorem batteries.
    pub theorem: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            engine: 1e-8,
            theorem: 1e-6,
        }
    }
}

/// Graph `u ↦ (u, height(u))` with a polynomial transversal field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub height: Polynomial,
    pub transversal: Vec<Polynomial>,
}

/// Quadric chart with `C = x + ε W`, `W` the normalized projection of a
/// fixed direction onto the `J̃`-invariant distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedParams {
    #[serde(flatten)]
    pub chart: QuadricChart,
    pub epsilon: f64,
    pub direction: Vec<f64>,
}

/// The immersion families the engine knows how to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    QuadricRadial(QuadricChart),
    ExplicitGraph(GraphParams),
    Hyperbola,
    PerturbedTransversal(PerturbedParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::QuadricRadial(_) => "quadric_radial",
            Family::ExplicitGraph(_) => "explicit_graph",
            Family::Hyperbola => "hyperbola",
            Family::PerturbedTransversal(_) => "perturbed_transversal",
        }
    }

    /// Quadric the immersion lies on, when there is one.
    pub fn quadric(&self) -> Option<QuadricSpec> {
        match self {
            Family::QuadricRadial(chart) => Some(chart.quadric.clone()),
            Family::PerturbedTransversal(p) => Some(p.chart.quadric.clone()),
            Family::Hyperbola => Some(QuadricSpec::hyperbola(1.0).expect("valid hyperbola")),
            Family::ExplicitGraph(_) => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let m = 2 * n + 1;
        match self {
            Family::Hyperbola if n != 0 => {
                Err(Error::Scene("the hyperbola family needs n = 0".into()))
            }
            Family::Hyperbola => Ok(()),
            Family::QuadricRadial(chart) => check_chart(chart, n),
            Family::PerturbedTransversal(p) => {
                check_chart(&p.chart, n)?;
                if p.direction.len() != m + 1 {
                    return Err(Error::Scene(format!(
                        "perturbation direction has length {}, expected {}",
                        p.direction.len(),
                        m + 1
                    )));
                }
                if !p.epsilon.is_finite() {
                    return Err(Error::Scene("epsilon must be finite".into()));
                }
                Ok(())
            }
            Family::ExplicitGraph(g) => {
                g.height.validate(m)?;
                if g.transversal.len() != m + 1 {
                    return Err(Error::Scene(format!(
                        "transversal field has {} components, expected {}",
                        g.transversal.len(),
                        m + 1
                    )));
                }
                g.transversal.iter().try_for_each(|p| p.validate(m))
            }
        }
    }
}

fn check_chart(chart: &QuadricChart, n: usize) -> Result<()> {
    if chart.quadric.n() != n {
        return Err(Error::Scene(format!(
            "quadric has n = {} but the scene declares n = {n}",
            chart.quadric.n()
        )));
    }
    chart.validate()
}

/// An immersion family with its sample points and tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionScene {
    pub family: Family,
    pub n: usize,
    pub samples: Vec<Vec<f64>>,
    pub tolerances: Tolerances,
}

impl ImmersionScene {
    /// Scene with explicit samples; checks dimensions and parameters.
    pub fn new(
        family: Family,
        n: usize,
        samples: Vec<Vec<f64>>,
        tolerances: Tolerances,
    ) -> Result<Self> {
        family.validate(n)?;
        let m = 2 * n + 1;
        if let Some(bad) = samples.iter().find(|u| u.len() != m) {
            return Err(Error::Scene(format!(
                "sample of dimension {} in a {m}-dimensional chart",
                bad.len()
            )));
        }
        if !(tolerances.engine > 0.0 && tolerances.theorem > 0.0) {
            return Err(Error::Scene("tolerances must be positive".into()));
        }
        Ok(ImmersionScene {
            family,
            n,
            samples,
            tolerances,
        })
    }

    /// Scene with `num_samples` admissible points drawn from `[-half_width, half_width]^{2n+1}`.
    pub fn with_random_samples(
        family: Family,
        n: usize,
        seed: u64,
        num_samples: usize,
        half_width: f64,
        tolerances: Tolerances,
    ) -> Result<Self> {
        let mut scene = ImmersionScene::new(family, n, Vec::new(), tolerances)?;
        scene.samples = scene.draw_samples(seed, num_samples, half_width)?;
        Ok(scene)
    }

    pub fn chart_dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.n + 2
    }

    /// Whether `u` is inside the usable part of the chart.
    pub fn is_admissible(&self, u: &[f64]) -> bool {
        let chart = match &self.family {
            Family::QuadricRadial(chart) => Some(chart),
            Family::PerturbedTransversal(p) => Some(&p.chart),
            _ => None,
        };
        if let Some(chart) = chart {
            if !(chart.ray_quadratic(u) > MIN_RAY_QUADRATIC) {
                return false;
            }
        }
        eval_immersion(self, u)
            .and_then(|imm| Frame::new(&imm.f, &imm.c))
            .is_ok()
    }

    /// Rejection sampling of admissible chart points.
    pub fn draw_samples(
        &self,
        seed: u64,
        num_samples: usize,
        half_width: f64,
    ) -> Result<Vec<Vec<f64>>> {
        if num_samples == 0 {
            return Err(Error::Scene("num_samples must be at least 1".into()));
        }
        if !(half_width > 0.0) {
            return Err(Error::Scene("sample_box must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(num_samples);
        let max_draws = 1000 * num_samples;
        for _ in 0..max_draws {
            let u: Vec<f64> = (0..self.chart_dim())
                .map(|_| rng.gen_range(-half_width..=half_width))
                .collect();
            if self.is_admissible(&u) {
                samples.push(u);
                if samples.len() == num_samples {
                    return Ok(samples);
                }
            }
        }
        Err(Error::Generation(format!(
            "only {} of {num_samples} admissible samples after {max_draws} draws",
            samples.len()
        )))
    }
}

/// Jets of `f` and `C` at a chart point, one jet per ambient coordinate.
#[derive(Debug, Clone)]
pub struct ImmersionJets {
    pub f: Vec<Jet>,
    pub c: Vec<Jet>,
}

/// Evaluates `f` and `C` at `u` in order-3 jet arithmetic.
pub fn eval_immersion(scene: &ImmersionScene, u: &[f64]) -> Result<ImmersionJets> {
    if u.len() != scene.chart_dim() {
        return Err(Error::Shape(format!(
            "chart point of dimension {} for a {}-dimensional chart",
            u.len(),
            scene.chart_dim()
        )));
    }
    let vars = Jet::seed_point(u);
    match &scene.family {
        Family::Hyperbola => {
            let f = vec![vars[0].cosh(), vars[0].sinh()];
            Ok(ImmersionJets { c: f.clone(), f })
        }
        Family::QuadricRadial(chart) => {
            let f = chart.immersion(&vars)?;
            Ok(ImmersionJets { c: f.clone(), f })
        }
        Family::PerturbedTransversal(p) => {
            let f = p.chart.immersion(&vars)?;
            let w = d_projection(&p.chart.quadric, &f, &p.direction)?;
            let c = f
                .iter()
                .zip(&w)
                .map(|(x, wk)| x + &(wk * p.epsilon))
                .collect();
            Ok(ImmersionJets { f, c })
        }
        Family::ExplicitGraph(g) => {
            let mut f = vars.clone();
            f.push(g.height.eval_jet(&vars));
            let c = g.transversal.iter().map(|p| p.eval_jet(&vars)).collect();
            Ok(ImmersionJets { f, c })
        }
    }
}

/// Euclidean projection of `direction` onto `{v : ⟨Ax, v⟩ = 0 = ⟨J̃Ax, v⟩}`,
/// which is the `J̃`-invariant part of the tangent space of the quadric at `x`,
/// normalized to unit length so that `ε` measures the relative tilt of `C`.
fn d_projection(quadric: &QuadricSpec, x: &[Jet], direction: &[f64]) -> Result<Vec<Jet>> {
    let ax = quadric.apply_jet(x);
    let jax = apply_j_jets(&ax);
    let d: Vec<Jet> = direction.iter().map(|&v| x[0].constant_like(v)).collect();
    let g11 = jet::dot(&ax, &ax);
    let g12 = jet::dot(&ax, &jax);
    let g22 = jet::dot(&jax, &jax);
    let r1 = jet::dot(&d, &ax);
    let r2 = jet::dot(&d, &jax);
    let det = &(&g11 * &g22) - &(&g12 * &g12);
    if det.value().abs() < 1e-12 * g11.value() * g22.value() {
        return Err(Error::DegenerateFrame("Ax is a J̃-eigenvector".into()));
    }
    let inv_det = det.recip()?;
    let alpha = &(&(&r1 * &g22) - &(&r2 * &g12)) * &inv_det;
    let beta = &(&(&g11 * &r2) - &(&g12 * &r1)) * &inv_det;
    let w: Vec<Jet> = d
        .iter()
        .zip(ax.iter().zip(&jax))
        .map(|(dk, (a, ja))| dk - &(&(a * &alpha) + &(ja * &beta)))
        .collect();
    let ww = jet::dot(&w, &w);
    if ww.value() < MIN_PERTURBATION_NORM * MIN_PERTURBATION_NORM {
        return Err(Error::DegenerateFrame(
            "perturbation direction is orthogonal to D".into(),
        ));
    }
    let inv_len = ww.sqrt()?.recip()?;
    Ok(w.iter().map(|wk| wk * &inv_len).collect())
}

/// The frame `B = [e_1 … e_{2n+1} | C]` and its jet inverse.
#[derive(Debug, Clone)]
pub struct Frame {
    columns: Vec<Vec<Jet>>,
    inverse: JetMatrix,
    condition: f64,
}

impl Frame {
    pub fn new(f: &[Jet], c: &[Jet]) -> Result<Frame> {
        let dim = f.len();
        if c.len() != dim || dim < 2 {
            return Err(Error::Shape(format!(
                "f has {} and C has {} components",
                dim,
                c.len()
            )));
        }
        let m = f[0].num_vars();
        if m + 1 != dim {
            return Err(Error::Shape(format!("{m} chart variables in R^{dim}")));
        }
        let mut columns: Vec<Vec<Jet>> = (0..m)
            .map(|i| f.iter().map(|fk| fk.derivative(i)).collect())
            .collect();
        columns.push(c.to_vec());
        let rows: JetMatrix = (0..dim)
            .map(|k| columns.iter().map(|col| col[k].clone()).collect())
            .collect();
        let sv = jet::value_matrix(&rows).singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(condition < MAX_FRAME_CONDITION) {
            return Err(Error::DegenerateFrame(format!(
                "condition number {condition:e}"
            )));
        }
        let inverse = jet::invert(&rows)?;
        Ok(Frame {
            columns,
            inverse,
            condition,
        })
    }

    pub fn chart_dim(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Tangent vector `e_i = ∂_i f` (order-2 jets).
    pub fn tangent(&self, i: usize) -> &[Jet] {
        &self.columns[i]
    }

    pub fn transversal(&self) -> &[Jet] {
        &self.columns[self.chart_dim()]
    }

    /// Splits `v = Σ aⁱ e_i + b C`.
    pub fn decompose(&self, v: &[Jet]) -> (Vec<Jet>, Jet) {
        let mut coords = jet::mat_vec(&self.inverse, v);
        let b = coords.pop().expect("frame has a transversal column");
        (coords, b)
    }

    /// Value-level decomposition of a plain ambient vector.
    pub fn decompose_value(&self, v: &[f64]) -> (Vec<f64>, f64) {
        let mut coords: Vec<f64> = self
            .inverse
            .iter()
            .map(|row| row.iter().zip(v).map(|(r, x)| r.value() * x).sum())
            .collect();
        let b = coords.pop().expect("frame has a transversal column");
        (coords, b)
    }

    /// `Σ aⁱ e_i + b C` at the base point.
    pub fn reassemble(&self, tangent: &[f64], transversal: f64) -> Vec<f64> {
        let dim = self.columns.len();
        (0..dim)
            .map(|k| {
                self.columns[..dim - 1]
                    .iter()
                    .zip(tangent)
                    .map(|(col, a)| col[k].value() * a)
                    .sum::<f64>()
                    + self.columns[dim - 1][k].value() * transversal
            })
            .collect()
    }
}

/// Decomposes `v` against the frame of `(f, C)`.
pub fn frame_decompose(f: &[Jet], c: &[Jet], v: &[f64]) -> Result<(Vec<f64>, f64)> {
    Ok(Frame::new(f, c)?.decompose_value(v))
}

/// Pointwise `Γ`, `h`, `S`, `τ` and their first chart derivatives.
#[derive(Debug, Clone)]
pub struct InducedData {
    pub dim: usize,
    /// `gamma[(k, i, j)] = Γ^k_ij`
    pub gamma: Tensor3,
    pub h: DMatrix<f64>,
    /// `s[(k, i)] = S^k_i`, so that `S e_i = S^k_i e_k`
    pub s: DMatrix<f64>,
    pub tau: DVector<f64>,
    /// `d_gamma[(l, k, i, j)] = ∂_l Γ^k_ij`
    pub d_gamma: Tensor4,
    /// `d_h[(l, i, j)] = ∂_l h_ij`
    pub d_h: Tensor3,
    /// `d_s[(l, k, i)] = ∂_l S^k_i`
    pub d_s: Tensor3,
    /// `d_tau[(l, i)] = ∂_l τ_i`
    pub d_tau: DMatrix<f64>,
}

impl InducedData {
    pub fn from_frame(imm: &ImmersionJets, frame: &Frame) -> InducedData {
        let m = frame.chart_dim();
        let mut gamma = Tensor3::zeros(m);
        let mut d_gamma = Tensor4::zeros(m);
        let mut h = DMatrix::zeros(m, m);
        let mut d_h = Tensor3::zeros(m);
        for i in 0..m {
            let e_i: Vec<Jet> = imm.f.iter().map(|fk| fk.derivative(i)).collect();
            for j in i..m {
                let second: Vec<Jet> = e_i.iter().map(|x| x.derivative(j)).collect();
                let (tangent, normal) = frame.decompose(&second);
                for (k, g) in tangent.iter().enumerate() {
                    gamma[(k, i, j)] = g.value();
                    gamma[(k, j, i)] = g.value();
                    for l in 0..m {
                        d_gamma[(l, k, i, j)] = g.d1(l);
                        d_gamma[(l, k, j, i)] = g.d1(l);
                    }
                }
                h[(i, j)] = normal.value();
                h[(j, i)] = normal.value();
                for l in 0..m {
                    d_h[(l, i, j)] = normal.d1(l);
                    d_h[(l, j, i)] = normal.d1(l);
                }
            }
        }

        let mut s = DMatrix::zeros(m, m);
        let mut d_s = Tensor3::zeros(m);
        let mut tau = DVector::zeros(m);
        let mut d_tau = DMatrix::zeros(m, m);
        for i in 0..m {
            let dc: Vec<Jet> = imm.c.iter().map(|ck| ck.derivative(i)).collect();
            let (tangent, normal) = frame.decompose(&dc);
            for (k, a) in tangent.iter().enumerate() {
                s[(k, i)] = -a.value();
                for l in 0..m {
                    d_s[(l, k, i)] = -a.d1(l);
                }
            }
            tau[i] = normal.value();
            for l in 0..m {
                d_tau[(l, i)] = normal.d1(l);
            }
        }

        InducedData {
            dim: m,
            gamma,
            h,
            s,
            tau,
            d_gamma,
            d_h,
            d_s,
            d_tau,
        }
    }

    /// `Err(DegenerateMetric)` when `h` is numerically singular.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let det = self.h.determinant();
        let scale = max_abs_matrix(&self.h)
            .max(f64::MIN_POSITIVE)
            .powi(self.dim as i32);
        if det.abs() < METRIC_DET_FLOOR * scale || det == 0.0 {
            return Err(Error::DegenerateMetric(det.abs()));
        }
        Ok(())
    }

    /// `h(X, Y)` for tangent coordinate vectors.
    pub fn h_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.h * y))
    }
}

/// Immersion jets, frame and induced data at one chart point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub u: Vec<f64>,
    pub immersion: ImmersionJets,
    pub frame: Frame,
    pub induced: InducedData,
}

impl PointGeometry {
    /// Evaluates the point and rejects degenerate `h`.
    pub fn evaluate(scene: &ImmersionScene, u: &[f64]) -> Result<PointGeometry> {
        let geometry = PointGeometry::evaluate_unchecked(scene, u)?;
        geometry.induced.check_nondegenerate()?;
        Ok(geometry)
    }

    /// Evaluates the point without the nondegeneracy check on `h`.
    pub fn evaluate_unchecked(scene: &ImmersionScene, u: &[f64]) -> Result<PointGeometry> {
        let immersion = eval_immersion(scene, u)?;
        let frame = Frame::new(&immersion.f, &immersion.c)?;
        let induced = InducedData::from_frame(&immersion, &frame);
        Ok(PointGeometry {
            u: u.to_vec(),
            immersion,
            frame,
            induced,
        })
    }
}

/// Induced data at `u`; degenerate `h` is an error.
pub fn induced_data(scene: &ImmersionScene, u: &[f64]) -> Result<InducedData> {
    Ok(PointGeometry::evaluate(scene, u)?.induced)
}

/// Curvature, `∇h`, cubic form and `dτ` at a point.
#[derive(Debug, Clone)]
pub struct DerivedTensors {
    /// `r_curv[(l, i, j, k)] = R^l_ijk`, with `R(e_i, e_j) e_k = R^l_ijk e_l`
    pub r_curv: Tensor4,
    /// `nabla_h[(i, j, k)] = (∇_i h)_jk`
    pub nabla_h: Tensor3,
    /// `q[(i, j, k)] = Q(e_i, e_j, e_k)`
    pub q: Tensor3,
    /// `dτ_ij = ½(∂_i τ_j - ∂_j τ_i)`
    pub dtau: DMatrix<f64>,
}

impl DerivedTensors {
    /// Largest defect of `Q` under any permutation of its indices.
    pub fn q_symmetry_defect(&self) -> f64 {
        let m = self.q.dim();
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let base = self.q[(i, j, k)];
                    for other in [
                        self.q[(j, i, k)],
                        self.q[(i, k, j)],
                        self.q[(k, j, i)],
                        self.q[(j, k, i)],
                        self.q[(k, i, j)],
                    ] {
                        worst = worst.max((base - other).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn derived_tensors(induced: &InducedData) -> DerivedTensors {
    let m = induced.dim;
    let g = &induced.gamma;
    let dg = &induced.d_gamma;
    let h = &induced.h;
    let r_curv = Tensor4::from_fn(m, |l, i, j, k| {
        let mut value = dg[(i, l, j, k)] - dg[(j, l, i, k)];
        for p in 0..m {
            value += g[(l, i, p)] * g[(p, j, k)] - g[(l, j, p)] * g[(p, i, k)];
        }
        value
    });
    let nabla_h = Tensor3::from_fn(m, |i, j, k| {
        let mut value = induced.d_h[(i, j, k)];
        for p in 0..m {
            value -= g[(p, i, j)] * h[(p, k)] + g[(p, i, k)] * h[(j, p)];
        }
        value
    });
    let q = Tensor3::from_fn(m, |i, j, k| nabla_h[(i, j, k)] + induced.tau[i] * h[(j, k)]);
    let dtau = DMatrix::from_fn(m, m, |i, j| {
        0.5 * (induced.d_tau[(i, j)] - induced.d_tau[(j, i)])
    });
    DerivedTensors {
        r_curv,
        nabla_h,
        q,
        dtau,
    }
}

/// Max-norm residuals of the Gauss, Codazzi (h and S) and Ricci equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalResiduals {
    pub gauss: f64,
    pub codazzi_h: f64,
    pub codazzi_s: f64,
    pub ricci: f64,
}

impl FundamentalResiduals {
    pub fn max(&self) -> f64 {
        self.gauss
            .max(self.codazzi_h)
            .max(self.codazzi_s)
            .max(self.ricci)
    }
}

pub fn fundamental_residuals(
    induced: &InducedData,
    derived: &DerivedTensors,
) -> FundamentalResiduals {
    let m = induced.dim;
    let (h, s, tau, g) = (&induced.h, &induced.s, &induced.tau, &induced.gamma);
    let mut gauss = 0.0_f64;
    let mut codazzi_h = 0.0_f64;
    let mut codazzi_s = 0.0_f64;
    let mut ricci = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                codazzi_h = codazzi_h.max((derived.q[(i, j, k)] - derived.q[(j, i, k)]).abs());
                // here k plays the role of the upper index l
                let nabla_s = |a: usize, b: usize| {
                    let mut v = induced.d_s[(a, k, b)];
                    for p in 0..m {
                        v += g[(k, a, p)] * s[(p, b)] - s[(k, p)] * g[(p, a, b)];
                    }
                    v
                };
                let cs = nabla_s(i, j) - tau[i] * s[(k, j)] - nabla_s(j, i) + tau[j] * s[(k, i)];
                codazzi_s = codazzi_s.max(cs.abs());
                for l in 0..m {
                    let expected = h[(j, k)] * s[(l, i)] - h[(i, k)] * s[(l, j)];
                    gauss = gauss.max((derived.r_curv[(l, i, j, k)] - expected).abs());
                }
            }
            let hs = (0..m)
                .map(|p| h[(i, p)] * s[(p, j)] - h[(j, p)] * s[(p, i)])
                .sum::<f64>();
            ricci = ricci.max((hs - 2.0 * derived.dtau[(i, j)]).abs());
        }
    }
    FundamentalResiduals {
        gauss,
        codazzi_h,
        codazzi_s,
        ricci,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paracomplex::quadric_residual;

    fn hyperbola_scene(t: f64) -> ImmersionScene {
        ImmersionScene::new(Family::Hyperbola, 0, vec![vec![t]], Tolerances::default()).unwrap()
    }

    fn fixed_n1_chart() -> QuadricChart {
        let spec = QuadricSpec::from_blocks(
            DMatrix::identity(2, 2),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        )
        .unwrap();
        QuadricChart::through(spec, vec![1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn hyperbola_jets_at_zero() {
        let imm = eval_immersion(&hyperbola_scene(0.0), &[0.0]).unwrap();
        assert_eq!(imm.f[0].value(), 1.0);
        assert_eq!(imm.f[1].value(), 0.0);
        assert_eq!(imm.f[0].partial(&[1]).unwrap(), 0.0);
        assert_eq!(imm.f[1].partial(&[1]).unwrap(), 1.0);
        assert_eq!(imm.f[0].partial(&[2]).unwrap(), 1.0);
        assert_eq!(imm.f[1].partial(&[2]).unwrap(), 0.0);
    }

    #[test]
    fn hyperbola_induced_data() {
        for t in [-0.3, 0.0, 0.25] {
            let geo = PointGeometry::evaluate(&hyperbola_scene(t), &[t]).unwrap();
            let ind = &geo.induced;
            assert!(ind.gamma[(0, 0, 0)].abs() < 1e-12);
            assert!((ind.h[(0, 0)] - 1.0).abs() < 1e-12);
            assert!((ind.s[(0, 0)] + 1.0).abs() < 1e-12);
            assert!(ind.tau[0].abs() < 1e-12);

            let second: Vec<f64> = geo
                .immersion
                .f
                .iter()
                .map(|x| x.partial(&[2]).unwrap())
                .collect();
            let (a, b) = geo.frame.decompose_value(&second);
            assert!(a[0].abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_of_frame_vectors() {
        let chart = fixed_n1_chart();
        let scene = ImmersionScene::new(
            Family::QuadricRadial(chart),
            1,
            vec![],
            Tolerances::default(),
        )
        .unwrap();
        let geo = PointGeometry::evaluate(&scene, &[0.1, -0.05, 0.2]).unwrap();
        let c: Vec<f64> = jet::values(geo.frame.transversal());
        let (a, b) = geo.frame.decompose_value(&c);
        assert!(a.iter().all(|x| x.abs() < 1e-14) && (b - 1.0).abs() < 1e-14);
        let e1: Vec<f64> = jet::values(geo.frame.tangent(0));
        let (a, b) = geo.frame.decompose_value(&e1);
        assert!(
            (a[0] - 1.0).abs() < 1e-14
                && a[1].abs() < 1e-14
                && a[2].abs() < 1e-14
                && b.abs() < 1e-14
        );
    }

    #[test]
    fn frame_round_trip() {
        let chart = fixed_n1_chart();
        let scene = ImmersionScene::new(
            Family::QuadricRadial(chart),
            1,
            vec![],
            Tolerances::default(),
        )
        .unwrap();
        let geo = PointGeometry::evaluate(&scene, &[0.2, 0.1, -0.3]).unwrap();
        let v = [0.3, -1.2, 2.5, 0.7];
        let (a, b) = geo.frame.decompose_value(&v);
        let back = geo.frame.reassemble(&a, b);
        for (x, y) in v.iter().zip(&back) {
            assert!((x - y).abs() <= 1e-12 * 2.5);
        }
    }

    #[test]
    fn quadric_at_base_point() {
        let chart = fixed_n1_chart();
        let spec = chart.quadric.clone();
        let scene = ImmersionScene::new(
            Family::QuadricRadial(chart),
            1,
            vec![],
            Tolerances::default(),
        )
        .unwrap();
        let imm = eval_immersion(&scene, &[0.0; 3]).unwrap();
        let f = jet::values(&imm.f);
        assert_eq!(f, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(quadric_residual(&spec, &f).unwrap().abs() <= 1e-14);
    }

    #[test]
    fn quadric_has_zero_tau() {
        let chart = fixed_n1_chart();
        let scene = ImmersionScene::with_random_samples(
            Family::QuadricRadial(chart),
            1,
            3,
            10,
            DEFAULT_SAMPLE_BOX,
            Tolerances::default(),
        )
        .unwrap();
        for u in &scene.samples {
            let ind = induced_data(&scene, u).unwrap();
            assert!(ind.tau.amax() < 1e-12);
        }
    }

    #[test]
    fn degenerate_graph_is_reported() {
        // f = (u, v, w, u² - v²), C = (0, 0, 0, 1)
        let height = Polynomial(vec![
            Term {
                coeff: 1.0,
                powers: vec![2, 0, 0],
            },
            Term {
                coeff: -1.0,
                powers: vec![0, 2, 0],
            },
        ]);
        let zero = Polynomial::default();
        let params = GraphParams {
            height,
            transversal: vec![
                zero.clone(),
                zero.clone(),
                zero,
                Polynomial::constant(1.0, 3),
            ],
        };
        let scene = ImmersionScene::new(
            Family::ExplicitGraph(params),
            1,
            vec![],
            Tolerances::default(),
        )
        .unwrap();
        let u = [0.2, -0.1, 0.3];
        assert!(matches!(
            induced_data(&scene, &u),
            Err(Error::DegenerateMetric(_))
        ));
        let geo = PointGeometry::evaluate_unchecked(&scene, &u).unwrap();
        let h = &geo.induced.h;
        assert!((h[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((h[(1, 1)] + 2.0).abs() < 1e-14);
        assert!(h[(0, 1)].abs() < 1e-14);
        assert!(h.row(2).amax() < 1e-14);
    }

    #[test]
    fn chart_leak() {
        let chart = fixed_n1_chart();
        let scene = ImmersionScene::new(
            Family::QuadricRadial(chart),
            1,
            vec![],
            Tolerances::default(),
        )
        .unwrap();
        // walking far along a direction where VᵀAV is negative leaves the chart
        let far = [0.0, 0.0, 5.0];
        let q = match &scene.family {
            Family::QuadricRadial(c) => c.ray_quadratic(&far),
            _ => unreachable!(),
        };
        if q <= 0.0 {
            assert!(matches!(
                eval_immersion(&scene, &far),
                Err(Error::ChartLeak(_))
            ));
        } else {
            let far = [5.0, 5.0, 0.0];
            assert!(eval_immersion(&scene, &far).is_ok() || !scene.is_admissible(&far));
        }
    }

    #[test]
    fn hyperbola_tensors_vanish() {
        let scene = hyperbola_scene(0.1);
        let ind = induced_data(&scene, &[0.1]).unwrap();
        let der = derived_tensors(&ind);
        assert!(der.r_curv.max_abs() < 1e-14);
        assert!(der.q.max_abs() < 1e-12);
        assert_eq!(der.dtau[(0, 0)], 0.0);
        let res = fundamental_residuals(&ind, &der);
        assert!(res.max() < 1e-12);
    }

    #[test]
    fn scene_validation() {
        assert!(ImmersionScene::new(Family::Hyperbola, 1, vec![], Tolerances::default()).is_err());
        assert!(ImmersionScene::new(
            Family::Hyperbola,
            0,
            vec![vec![0.0, 1.0]],
            Tolerances::default()
        )
        .is_err());
        let bad_tol = Tolerances {
            engine: 0.0,
            theorem: 1e-6,
        };
        assert!(ImmersionScene::new(Family::Hyperbola, 0, vec![], bad_tol).is_err());
    }
}
