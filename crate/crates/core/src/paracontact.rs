//! The almost paracontact structure `(φ, ξ, η)` induced by a `J̃`-tangent
//! transversal field, and the structure-level residuals built on it.
//!
//! Splitting `J̃X = φX + η(X) C` for tangent `X` gives `φ` and `η`;
//! `ξ = J̃C` is tangent exactly when `C` is `J̃`-tangent, and
//! [`ParacontactData::j_tangency`] records how far that fails.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::{InducedData, PointGeometry};
use crate::jet::{self, Jet};
use crate::paracomplex::apply_j_jets;
use crate::tensor::{max_abs, max_abs_matrix, Tensor3};

/// Relative threshold for the sign count of `h`'s eigenvalues.
pub const SIGNATURE_THRESHOLD: f64 = 1e-10;

/// Relative threshold for the `±1` eigenvalue counts of `φ`.
const EIGEN_SPLIT_THRESHOLD: f64 = 1e-8;

/// Pointwise `ξ`, `η`, `φ`, a basis of `D = ker η`, and first derivatives.
#[derive(Debug, Clone)]
pub struct ParacontactData {
    pub dim: usize,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    /// `phi[(k, i)] = φ^k_i`
    pub phi: DMatrix<f64>,
    /// `dη_ij = ½(∂_i η_j - ∂_j η_i)`
    pub d_eta: DMatrix<f64>,
    pub d_basis: Vec<DVector<f64>>,
    /// `d_eta_raw[(l, i)] = ∂_l η_i`
    pub d_eta_raw: DMatrix<f64>,
    /// `d_phi[(l, k, i)] = ∂_l φ^k_i`
    pub d_phi: Tensor3,
    /// `d_xi[(l, k)] = ∂_l ξ^k`
    pub d_xi: DMatrix<f64>,
    /// `|b|` in `J̃C = (tangent) + b C`.
    pub j_tangency: f64,
    pub xi_field: Vec<Jet>,
    pub eta_jets: Vec<Jet>,
    /// `phi_jets[k][i]`
    pub phi_jets: Vec<Vec<Jet>>,
    pub d_basis_fields: Vec<Vec<Jet>>,
}

/// Builds `(φ, ξ, η)` from the frame at a point.
pub fn induced_structure(geometry: &PointGeometry) -> ParacontactData {
    let frame = &geometry.frame;
    let m = frame.chart_dim();

    let mut phi_jets: Vec<Vec<Jet>> = vec![Vec::with_capacity(m); m];
    let mut eta_jets = Vec::with_capacity(m);
    for i in 0..m {
        let (tangent, normal) = frame.decompose(&apply_j_jets(frame.tangent(i)));
        for (k, t) in tangent.into_iter().enumerate() {
            phi_jets[k].push(t);
        }
        eta_jets.push(normal);
    }
    let (xi_field, normal) = frame.decompose(&apply_j_jets(frame.transversal()));
    let j_tangency = normal.value().abs();

    let xi = DVector::from_vec(jet::values(&xi_field));
    let eta = DVector::from_vec(jet::values(&eta_jets));
    let phi = DMatrix::from_fn(m, m, |k, i| phi_jets[k][i].value());
    let d_eta_raw = DMatrix::from_fn(m, m, |l, i| eta_jets[i].d1(l));
    let d_eta = DMatrix::from_fn(m, m, |i, j| 0.5 * (d_eta_raw[(i, j)] - d_eta_raw[(j, i)]));
    let d_phi = Tensor3::from_fn(m, |l, k, i| phi_jets[k][i].d1(l));
    let d_xi = DMatrix::from_fn(m, m, |l, k| xi_field[k].d1(l));

    // Z_a = e_a - η(e_a) ξ spans ker η with the single relation Σ ξ^a Z_a = 0;
    // dropping the index with the largest |ξ^a| leaves a basis.
    let pivot = xi.iamax();
    let d_basis_fields: Vec<Vec<Jet>> = (0..m)
        .filter(|&a| a != pivot)
        .map(|a| {
            (0..m)
                .map(|k| {
                    let delta = xi_field[k].constant_like(if a == k { 1.0 } else { 0.0 });
                    &delta - &(&eta_jets[a] * &xi_field[k])
                })
                .collect()
        })
        .collect();
    let d_basis = d_basis_fields.iter().map(|z| field_value(z)).collect();

    ParacontactData {
        dim: m,
        xi,
        eta,
        phi,
        d_eta,
        d_basis,
        d_eta_raw,
        d_phi,
        d_xi,
        j_tangency,
        xi_field,
        eta_jets,
        phi_jets,
        d_basis_fields,
    }
}

impl ParacontactData {
    /// `η(X)`.
    pub fn eta_of(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    /// `φX`.
    pub fn phi_of(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    /// `φ` applied to a jet vector field.
    pub fn phi_field(&self, field: &[Jet]) -> Vec<Jet> {
        self.phi_jets
            .iter()
            .map(|row| jet::dot(row, field))
            .collect()
    }

    /// Residuals of the almost paracontact axioms.
    pub fn axioms(&self) -> AxiomResiduals {
        let m = self.dim;
        let identity = DMatrix::<f64>::identity(m, m);
        let phi_squared = &self.phi * &self.phi - &identity + &self.xi * self.eta.transpose();
        let plus = nullity(&(&self.phi - &identity));
        let minus = nullity(&(&self.phi + &identity));
        AxiomResiduals {
            phi_squared: max_abs_matrix(&phi_squared),
            eta_xi: (self.eta.dot(&self.xi) - 1.0).abs(),
            phi_xi: max_abs((&self.phi * &self.xi).as_slice()),
            eta_phi: max_abs((self.eta.transpose() * &self.phi).as_slice()),
            eigen_plus: plus,
            eigen_minus: minus,
        }
    }
}

fn nullity(a: &DMatrix<f64>) -> usize {
    let sv = a.singular_values();
    let scale = sv.max().max(1.0);
    sv.iter()
        .filter(|&&s| s < EIGEN_SPLIT_THRESHOLD * scale)
        .count()
}

/// Defects of `φ² = Id - ξ⊗η`, `η(ξ) = 1`, `φξ = 0`, `η∘φ = 0`, and the
/// dimensions of the `±1` eigenspaces of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomResiduals {
    pub phi_squared: f64,
    pub eta_xi: f64,
    pub phi_xi: f64,
    pub eta_phi: f64,
    pub eigen_plus: usize,
    pub eigen_minus: usize,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.phi_squared
            .max(self.eta_xi)
            .max(self.phi_xi)
            .max(self.eta_phi)
    }

    /// `φ` has eigenvalues `+1` and `-1` with multiplicity `n` each.
    pub fn eigen_split_ok(&self, n: usize) -> bool {
        self.eigen_plus == n && self.eigen_minus == n
    }
}

/// Value of a jet vector field at the base point.
pub fn field_value(field: &[Jet]) -> DVector<f64> {
    DVector::from_vec(jet::values(field))
}

/// `X(g) = X^l ∂_l g`.
pub fn directional(x: &DVector<f64>, g: &Jet) -> f64 {
    x.iter().enumerate().map(|(l, xl)| xl * g.d1(l)).sum()
}

/// `∇_X Y` for a vector `X` and a jet field `Y`.
pub fn covariant(induced: &InducedData, x: &DVector<f64>, y: &[Jet]) -> DVector<f64> {
    let m = induced.dim;
    DVector::from_fn(m, |k, _| {
        let mut v = directional(x, &y[k]);
        for l in 0..m {
            for p in 0..m {
                v += induced.gamma[(k, l, p)] * x[l] * y[p].value();
            }
        }
        v
    })
}

/// Lie bracket `[X, Y]` of two jet fields.
pub fn bracket(x: &[Jet], y: &[Jet]) -> DVector<f64> {
    let xv = field_value(x);
    let yv = field_value(y);
    DVector::from_fn(x.len(), |k, _| {
        directional(&xv, &y[k]) - directional(&yv, &x[k])
    })
}

/// Inertia of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

pub fn signature(h: &DMatrix<f64>) -> Signature {
    let eigen = SymmetricEigen::new(h.clone());
    let scale = max_abs(eigen.eigenvalues.as_slice());
    let threshold = SIGNATURE_THRESHOLD * scale;
    Signature {
        positive: eigen.eigenvalues.iter().filter(|&&l| l > threshold).count(),
        negative: eigen
            .eigenvalues
            .iter()
            .filter(|&&l| l < -threshold)
            .count(),
    }
}

/// `max |h(φe_i, φe_j) + h(e_i, e_j) - η_i η_j|` and the signature of `h`.
pub fn metric_residual(pd: &ParacontactData, h: &DMatrix<f64>) -> (f64, Signature) {
    let defect = pd.phi.transpose() * h * &pd.phi + h - &pd.eta * pd.eta.transpose();
    (max_abs_matrix(&defect), signature(h))
}

/// Transversal coefficient of `J̃C`.
pub fn j_tangency_residual(pd: &ParacontactData) -> f64 {
    pd.j_tangency
}

/// Normality defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityResiduals {
    /// `max |N^k_ij - 2 dη_ij ξ^k|`.
    pub nijenhuis: f64,
    /// `max_Z |SφZ - φSZ + τ(Z)ξ|` over the `D` basis, coordinate max-norm.
    pub operational: f64,
}

impl NormalityResiduals {
    pub fn max(&self) -> f64 {
        self.nijenhuis.max(self.operational)
    }
}

/// Nijenhuis tensor `N^k_ij` of `φ` in coordinates.
pub fn nijenhuis(pd: &ParacontactData) -> Tensor3 {
    let m = pd.dim;
    let (phi, dphi) = (&pd.phi, &pd.d_phi);
    Tensor3::from_fn(m, |k, i, j| {
        let mut v = 0.0;
        for l in 0..m {
            v += phi[(l, i)] * dphi[(l, k, j)]
                - phi[(l, j)] * dphi[(l, k, i)]
                - phi[(k, l)] * (dphi[(i, l, j)] - dphi[(j, l, i)]);
        }
        v
    })
}

pub fn normality_residuals(pd: &ParacontactData, induced: &InducedData) -> NormalityResiduals {
    let m = pd.dim;
    let n_tensor = nijenhuis(pd);
    let mut nij = 0.0_f64;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                nij = nij.max((n_tensor[(k, i, j)] - 2.0 * pd.d_eta[(i, j)] * pd.xi[k]).abs());
            }
        }
    }
    let operational = pd
        .d_basis
        .iter()
        .map(|z| {
            let v = &induced.s * (&pd.phi * z) - &pd.phi * (&induced.s * z)
                + &pd.xi * induced.tau.dot(z);
            max_abs(v.as_slice())
        })
        .fold(0.0, f64::max);
    NormalityResiduals {
        nijenhuis: nij,
        operational,
    }
}

/// `max |dη_ij - α h(e_i, φe_j)|`.
pub fn contact_residual(pd: &ParacontactData, h: &DMatrix<f64>, alpha: f64) -> f64 {
    let defect = &pd.d_eta - (h * &pd.phi) * alpha;
    max_abs_matrix(&defect)
}

/// Christoffel symbols `gamma_hat[(k, i, j)]` of the Levi-Civita connection of `h`.
pub fn levi_civita(h: &DMatrix<f64>, d_h: &Tensor3) -> Result<Tensor3> {
    let m = h.nrows();
    let h_inv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric(h.determinant().abs()))?;
    Ok(Tensor3::from_fn(m, |k, i, j| {
        0.5 * (0..m)
            .map(|l| h_inv[(k, l)] * (d_h[(i, j, l)] + d_h[(j, i, l)] - d_h[(l, i, j)]))
            .sum::<f64>()
    }))
}

/// `max |(∇̂_i h)_jk|`; zero up to roundoff for the Levi-Civita connection.
pub fn metric_compatibility_residual(h: &DMatrix<f64>, d_h: &Tensor3, gamma_hat: &Tensor3) -> f64 {
    let m = h.nrows();
    let t = Tensor3::from_fn(m, |i, j, k| {
        let mut v = d_h[(i, j, k)];
        for p in 0..m {
            v -= gamma_hat[(p, i, j)] * h[(p, k)] + gamma_hat[(p, i, k)] * h[(j, p)];
        }
        v
    });
    t.max_abs()
}

/// `max |(∇̂_i φ)^k_j - α(-h_ij ξ^k + η_j δ^k_i)|`.
pub fn sasakian_residual(pd: &ParacontactData, induced: &InducedData, alpha: f64) -> Result<f64> {
    let gamma_hat = levi_civita(&induced.h, &induced.d_h)?;
    Ok(sasakian_residual_with(pd, induced, &gamma_hat, alpha))
}

fn sasakian_residual_with(
    pd: &ParacontactData,
    induced: &InducedData,
    gamma_hat: &Tensor3,
    alpha: f64,
) -> f64 {
    let m = pd.dim;
    let mut worst = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut nabla_phi = pd.d_phi[(i, k, j)];
                for l in 0..m {
                    nabla_phi += gamma_hat[(k, i, l)] * pd.phi[(l, j)]
                        - gamma_hat[(l, i, j)] * pd.phi[(k, l)];
                }
                let delta = if i == k { 1.0 } else { 0.0 };
                let rhs = alpha * (-induced.h[(i, j)] * pd.xi[k] + pd.eta[j] * delta);
                worst = worst.max((nabla_phi - rhs).abs());
            }
        }
    }
    worst
}

/// Unit spanning vector of `D^⊥ = {X : h(X, Z) = 0 for all Z ∈ D}`.
///
/// Diagnostic only: computed as the least eigenvector of `MᵀM` with the
/// rows of `M` equal to `(hZ_a)ᵀ`.
pub fn d_perp(pd: &ParacontactData, h: &DMatrix<f64>) -> DVector<f64> {
    let m = pd.dim;
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for z in &pd.d_basis {
        let row = h * z;
        gram += &row * row.transpose();
    }
    let eigen = SymmetricEigen::new(gram);
    let idx = eigen.eigenvalues.imin();
    eigen.eigenvectors.column(idx).into_owned()
}

/// Structure-level summary at one point for a given `α`.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub metric_residual: f64,
    pub signature: Signature,
    pub j_tangency_residual: f64,
    pub normality: NormalityResiduals,
    pub alpha: f64,
    pub contact_residual: f64,
    pub sasakian_residual: f64,
    pub levi_civita: Tensor3,
}

impl MetricReport {
    pub fn evaluate(
        geometry: &PointGeometry,
        pd: &ParacontactData,
        alpha: f64,
    ) -> Result<MetricReport> {
        let induced = &geometry.induced;
        let (metric, sig) = metric_residual(pd, &induced.h);
        let gamma_hat = levi_civita(&induced.h, &induced.d_h)?;
        Ok(MetricReport {
            metric_residual: metric,
            signature: sig,
            j_tangency_residual: pd.j_tangency,
            normality: normality_residuals(pd, induced),
            alpha,
            contact_residual: contact_residual(pd, &induced.h, alpha),
            sasakian_residual: sasakian_residual_with(pd, induced, &gamma_hat, alpha),
            levi_civita: gamma_hat,
        })
    }
}
