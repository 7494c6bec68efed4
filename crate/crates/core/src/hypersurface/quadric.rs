use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::paracomplex::QuadricSpec;

/// Random directions tried before giving up on a base point.
pub const BASE_POINT_ATTEMPTS: usize = 1000;

// Among admissible directions, the best of this many candidates is kept.
const BASE_POINT_CANDIDATES: usize = 64;

/// Radial chart `u ↦ y/√(yᵀAy)` with `y = x₀ + Σ uⁱ vᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadricChart {
    pub quadric: QuadricSpec,
    pub base_point: Vec<f64>,
    pub tangent_basis: Vec<Vec<f64>>,
}

impl QuadricChart {
    /// Chart through a seeded base point with an orthonormal tangent basis.
    pub fn generate(quadric: QuadricSpec, seed: u64) -> Result<Self> {
        let base_point = find_base_point(&quadric, seed)?;
        let tangent_basis = tangent_basis(&quadric, &base_point)?;
        Ok(QuadricChart {
            quadric,
            base_point,
            tangent_basis,
        })
    }

    /// Chart through a given base point on the quadric.
    pub fn through(quadric: QuadricSpec, base_point: Vec<f64>) -> Result<Self> {
        let tangent_basis = tangent_basis(&quadric, &base_point)?;
        let chart = QuadricChart {
            quadric,
            base_point,
            tangent_basis,
        };
        chart.validate()?;
        Ok(chart)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.quadric.ambient_dim();
        if self.base_point.len() != dim {
            return Err(Error::Scene(format!(
                "base point has length {}, expected {dim}",
                self.base_point.len()
            )));
        }
        let on_quadric = self.quadric.quadratic_form(&self.base_point) - 1.0;
        if on_quadric.abs() > 1e-9 {
            return Err(Error::Scene(format!(
                "base point is off the quadric (xᵀAx - 1 = {on_quadric:e})"
            )));
        }
        if self.tangent_basis.len() != dim - 1 || self.tangent_basis.iter().any(|v| v.len() != dim)
        {
            return Err(Error::Scene(format!(
                "tangent basis must hold {} vectors of length {dim}",
                dim - 1
            )));
        }
        let normal = self.quadric.apply(&self.base_point);
        let scale = norm(&normal);
        for (i, v) in self.tangent_basis.iter().enumerate() {
            let dot: f64 = v.iter().zip(&normal).map(|(a, b)| a * b).sum();
            if dot.abs() > 1e-9 * scale * norm(v).max(1.0) {
                return Err(Error::Scene(format!(
                    "tangent vector {i} is not tangent at the base point"
                )));
            }
        }
        let basis = DMatrix::from_fn(dim, dim - 1, |r, c| self.tangent_basis[c][r]);
        let sv = basis.singular_values();
        if sv.min() < 1e-9 * sv.max() {
            return Err(Error::Scene("tangent basis is linearly dependent".into()));
        }
        Ok(())
    }

    pub fn chart_dim(&self) -> usize {
        self.tangent_basis.len()
    }

    /// The ray point `y(u)` as plain numbers.
    pub fn ray_point(&self, u: &[f64]) -> Vec<f64> {
        let mut y = self.base_point.clone();
        for (ui, v) in u.iter().zip(&self.tangent_basis) {
            for (yk, vk) in y.iter_mut().zip(v) {
                *yk += ui * vk;
            }
        }
        y
    }

    /// `q(y(u)) = y(u)ᵀ A y(u)`.
    pub fn ray_quadratic(&self, u: &[f64]) -> f64 {
        self.quadric.quadratic_form(&self.ray_point(u))
    }

    /// Immersion `x(u)` in jet arithmetic.
    pub fn immersion(&self, u: &[Jet]) -> Result<Vec<Jet>> {
        let y: Vec<Jet> = self
            .base_point
            .iter()
            .enumerate()
            .map(|(k, &x0)| {
                let mut acc = u[0].constant_like(x0);
                for (ui, v) in u.iter().zip(&self.tangent_basis) {
                    if v[k] != 0.0 {
                        acc = acc + ui * v[k];
                    }
                }
                acc
            })
            .collect();
        let q = self.quadric.quadratic_form_jet(&y);
        if !(q.value() > 0.0) {
            return Err(Error::ChartLeak(q.value()));
        }
        let inv_norm = q.sqrt()?.recip()?;
        Ok(y.iter().map(|yk| yk * &inv_norm).collect())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Seeded search for `x₀` with `x₀ᵀAx₀ = 1`.
///
/// Directions are drawn uniformly from the cube and normalized; among the
/// first admissible candidates the one with the largest `q(d)/|d|²` wins,
/// which keeps `x₀` short and the chart well conditioned.
pub fn find_base_point(quadric: &QuadricSpec, seed: u64) -> Result<Vec<f64>> {
    let dim = quadric.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut admissible = 0;
    for _ in 0..BASE_POINT_ATTEMPTS {
        let d: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let len = norm(&d);
        if len < 1e-3 {
            continue;
        }
        let d: Vec<f64> = d.iter().map(|x| x / len).collect();
        let q = quadric.quadratic_form(&d);
        if q > 1e-6 {
            admissible += 1;
            if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
                best = Some((q, d));
            }
            if admissible == BASE_POINT_CANDIDATES {
                break;
            }
        }
    }
    let (q, d) = best.ok_or(Error::BasePointNotFound(BASE_POINT_ATTEMPTS))?;
    let scale = q.sqrt();
    Ok(d.iter().map(|x| x / scale).collect())
}

/// Orthonormal basis of `{v : (Ax₀)·v = 0}` from a Householder reflection.
pub fn tangent_basis(quadric: &QuadricSpec, base_point: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dim = quadric.ambient_dim();
    if base_point.len() != dim {
        return Err(Error::Shape(format!(
            "base point of length {} in R^{dim}",
            base_point.len()
        )));
    }
    let normal = DVector::from_vec(quadric.apply(base_point));
    let len = normal.norm();
    if len == 0.0 {
        return Err(Error::DegenerateFrame("Ax₀ vanishes".into()));
    }
    let w = normal / len;
    let pivot = w.iamax();
    let sign = if w[pivot] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = w.clone();
    v[pivot] -= sign;
    let vv = v.dot(&v);
    let reflection = if vv == 0.0 {
        DMatrix::identity(dim, dim)
    } else {
        DMatrix::identity(dim, dim) - (&v * v.transpose()) * (2.0 / vv)
    };
    Ok((0..dim)
        .filter(|&c| c != pivot)
        .map(|c| reflection.column(c).iter().copied().collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paracomplex::random_quadric_spec;

    #[test]
    fn base_point_is_on_quadric_and_deterministic() {
        for n in 0..3 {
            for seed in 0..10 {
                let spec = random_quadric_spec(n, seed).unwrap();
                let x0 = find_base_point(&spec, seed).unwrap();
                assert!((spec.quadratic_form(&x0) - 1.0).abs() < 1e-12);
                assert_eq!(x0, find_base_point(&spec, seed).unwrap());
            }
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let spec = random_quadric_spec(2, 5).unwrap();
        let chart = QuadricChart::generate(spec, 5).unwrap();
        chart.validate().unwrap();
        let normal = chart.quadric.apply(&chart.base_point);
        for (i, a) in chart.tangent_basis.iter().enumerate() {
            let dn: f64 = a.iter().zip(&normal).map(|(x, y)| x * y).sum();
            assert!(dn.abs() < 1e-12);
            for (j, b) in chart.tangent_basis.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_definite_quadric_has_no_base_point() {
        let spec = QuadricSpec::from_matrix_unchecked(-DMatrix::<f64>::identity(4, 4)).unwrap();
        assert_eq!(
            find_base_point(&spec, 1),
            Err(Error::BasePointNotFound(BASE_POINT_ATTEMPTS))
        );
    }

    #[test]
    fn immersion_stays_on_quadric() {
        let spec = random_quadric_spec(1, 11).unwrap();
        let chart = QuadricChart::generate(spec, 11).unwrap();
        let u = [0.1, -0.2, 0.05];
        let x = chart.immersion(&Jet::seed_point(&u)).unwrap();
        let xv: Vec<f64> = x.iter().map(Jet::value).collect();
        assert!((chart.quadric.quadratic_form(&xv) - 1.0).abs() < 1e-13);
    }
}
