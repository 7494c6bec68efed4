//! The canonical paracomplex structure on `R^{2n+2}` and centred
//! hyperquadrics `xᵀAx = 1` whose matrix anticommutes with it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Determinant floor for randomly drawn specs.
pub const RANDOM_DET_FLOOR: f64 = 1e-6;

/// Relative determinant floor for any accepted spec.
pub const SPEC_DET_FLOOR: f64 = 1e-9;

const MAX_REDRAWS: usize = 1000;

/// A point or vector of `R^{2n+2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AmbientVector(Vec<f64>);

impl AmbientVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 || !entries.len().is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "ambient vectors need even length >= 2, got {}",
                entries.len()
            )));
        }
        Ok(AmbientVector(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n` such that the vector lives in `R^{2n+2}`.
    pub fn n(&self) -> usize {
        self.0.len() / 2 - 1
    }

    pub fn apply_j(&self) -> AmbientVector {
        AmbientVector(swap_halves(&self.0))
    }
}

impl TryFrom<Vec<f64>> for AmbientVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        AmbientVector::new(v)
    }
}

impl From<AmbientVector> for Vec<f64> {
    fn from(v: AmbientVector) -> Vec<f64> {
        v.0
    }
}

fn swap_halves<T: Clone>(v: &[T]) -> Vec<T> {
    let half = v.len() / 2;
    v[half..].iter().chain(&v[..half]).cloned().collect()
}

/// `J̃(x, y) = (y, x)` on a raw slice.
pub fn apply_j(v: &[f64]) -> Result<Vec<f64>> {
    if !v.len().is_multiple_of(2) || v.is_empty() {
        return Err(Error::Shape(format!(
            "J̃ needs even length, got {}",
            v.len()
        )));
    }
    Ok(swap_halves(v))
}

/// `J̃` applied to a vector of jets.
pub fn apply_j_jets(v: &[Jet]) -> Vec<Jet> {
    assert!(v.len().is_multiple_of(2), "J̃ needs even length");
    swap_halves(v)
}

/// Matrix of `J̃` on `R^{dim}`.
pub fn j_matrix(dim: usize) -> DMatrix<f64> {
    let half = dim / 2;
    DMatrix::from_fn(
        dim,
        dim,
        |i, j| if (i + half) % dim == j { 1.0 } else { 0.0 },
    )
}

/// Max-norm of `J̃A + AJ̃`.
pub fn anticommutator_residual(a: &DMatrix<f64>) -> Result<f64> {
    if !a.is_square() || !a.nrows().is_multiple_of(2) || a.nrows() == 0 {
        return Err(Error::Shape(format!(
            "expected an even square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let j = j_matrix(a.nrows());
    let sum = &j * a + a * &j;
    Ok(sum.amax())
}

/// A centred hyperquadric `xᵀAx = 1` with `A = [[P, R], [-R, -P]]`.
///
/// `P` is symmetric and `R` (called `r_skew` to keep it apart from the
/// curvature tensor) is antisymmetric, so `A` is symmetric and anticommutes
/// with `J̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadricSpecRaw", into = "QuadricSpecRaw")]
pub struct QuadricSpec {
    n: usize,
    p: DMatrix<f64>,
    r_skew: DMatrix<f64>,
    a: DMatrix<f64>,
    unchecked: bool,
}

impl QuadricSpec {
    /// Builds the block matrix; `p` must be exactly symmetric and `r_skew`
    /// exactly antisymmetric.
    pub fn from_blocks(p: DMatrix<f64>, r_skew: DMatrix<f64>) -> Result<Self> {
        let k = p.nrows();
        if k == 0 || !p.is_square() || r_skew.shape() != (k, k) {
            return Err(Error::Shape(format!(
                "P is {:?} and R_skew is {:?}; both must be (n+1)x(n+1)",
                p.shape(),
                r_skew.shape()
            )));
        }
        if p != p.transpose() {
            return Err(Error::Shape("P is not symmetric".into()));
        }
        if r_skew != -r_skew.transpose() {
            return Err(Error::Shape("R_skew is not antisymmetric".into()));
        }
        let a = block_matrix(&p, &r_skew);
        let spec = QuadricSpec {
            n: k - 1,
            p,
            r_skew,
            a,
            unchecked: false,
        };
        if !spec.is_nondegenerate(SPEC_DET_FLOOR) {
            return Err(Error::Shape(format!(
                "det A = {:e} is numerically zero",
                spec.det()
            )));
        }
        Ok(spec)
    }

    /// Wraps an arbitrary even square matrix without enforcing the block form.
    ///
    /// Used by diagnostic runs to feed counterexamples (e.g. the sphere
    /// `A = I`) through the same pipeline.
    pub fn from_matrix_unchecked(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || !a.nrows().is_multiple_of(2) || a.nrows() == 0 {
            return Err(Error::Shape(format!(
                "A must be even square, got {:?}",
                a.shape()
            )));
        }
        let k = a.nrows() / 2;
        Ok(QuadricSpec {
            n: k - 1,
            p: a.view((0, 0), (k, k)).into_owned(),
            r_skew: a.view((0, k), (k, k)).into_owned(),
            a,
            unchecked: true,
        })
    }

    /// Hyperbola `p (x² - y²) = 1` (n = 0).
    pub fn hyperbola(p: f64) -> Result<Self> {
        QuadricSpec::from_blocks(DMatrix::from_element(1, 1, p), DMatrix::zeros(1, 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn r_skew(&self) -> &DMatrix<f64> {
        &self.r_skew
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// True when built through [`QuadricSpec::from_matrix_unchecked`].
    pub fn is_unchecked(&self) -> bool {
        self.unchecked
    }

    pub fn det(&self) -> f64 {
        self.a.determinant()
    }

    fn is_nondegenerate(&self, floor: f64) -> bool {
        let scale = self.a.amax().max(1.0).powi(self.a.nrows() as i32);
        self.det().abs() > floor * scale
    }

    /// `xᵀAx` for a plain vector.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let dim = self.a.nrows();
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += x[i] * self.a[(i, j)] * x[j];
            }
        }
        acc
    }

    /// `yᵀAy` in jet arithmetic.
    pub fn quadratic_form_jet(&self, y: &[Jet]) -> Jet {
        let dim = self.a.nrows();
        let mut acc = y[0].constant_like(0.0);
        for i in 0..dim {
            let mut row = y[0].constant_like(0.0);
            for j in 0..dim {
                let a_ij = self.a[(i, j)];
                if a_ij != 0.0 {
                    row = row + &y[j] * a_ij;
                }
            }
            acc = acc + &y[i] * &row;
        }
        acc
    }

    /// `Ax`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.a.nrows();
        (0..dim)
            .map(|i| (0..dim).map(|j| self.a[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `Ax` in jet arithmetic.
    pub fn apply_jet(&self, x: &[Jet]) -> Vec<Jet> {
        let dim = self.a.nrows();
        (0..dim)
            .map(|i| {
                let mut acc = x[0].constant_like(0.0);
                for j in 0..dim {
                    let a_ij = self.a[(i, j)];
                    if a_ij != 0.0 {
                        acc = acc + &x[j] * a_ij;
                    }
                }
                acc
            })
            .collect()
    }
}

fn block_matrix(p: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let k = p.nrows();
    DMatrix::from_fn(2 * k, 2 * k, |i, j| match (i < k, j < k) {
        (true, true) => p[(i, j)],
        (true, false) => r[(i, j - k)],
        (false, true) => -r[(i - k, j)],
        (false, false) => -p[(i - k, j - k)],
    })
}

#[derive(Serialize, Deserialize)]
struct QuadricSpecRaw {
    n: usize,
    p: Vec<Vec<f64>>,
    r_skew: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_unchecked: Option<Vec<Vec<f64>>>,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape(format!("{what}: ragged rows")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

impl TryFrom<QuadricSpecRaw> for QuadricSpec {
    type Error = Error;
    fn try_from(raw: QuadricSpecRaw) -> Result<Self> {
        let spec = match raw.a_unchecked {
            Some(a) => QuadricSpec::from_matrix_unchecked(from_rows(&a, "a_unchecked")?)?,
            None => QuadricSpec::from_blocks(
                from_rows(&raw.p, "p")?,
                from_rows(&raw.r_skew, "r_skew")?,
            )?,
        };
        if spec.n != raw.n {
            return Err(Error::Shape(format!(
                "quadric declares n = {} but its blocks have n = {}",
                raw.n, spec.n
            )));
        }
        Ok(spec)
    }
}

impl From<QuadricSpec> for QuadricSpecRaw {
    fn from(spec: QuadricSpec) -> Self {
        QuadricSpecRaw {
            n: spec.n,
            p: to_rows(&spec.p),
            r_skew: to_rows(&spec.r_skew),
            a_unchecked: spec.unchecked.then(|| to_rows(&spec.a)),
        }
    }
}

/// Draws a reproducible random spec with entries uniform in `[-1, 1]`.
pub fn random_quadric_spec(n: usize, seed: u64) -> Result<QuadricSpec> {
    let k = n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let raw_p = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..=1.0));
        let raw_r = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..=1.0));
        let p = DMatrix::from_fn(k, k, |i, j| (raw_p[(i, j)] + raw_p[(j, i)]) / 2.0);
        let r = DMatrix::from_fn(k, k, |i, j| (raw_r[(i, j)] - raw_r[(j, i)]) / 2.0);
        let a = block_matrix(&p, &r);
        if a.determinant().abs() > RANDOM_DET_FLOOR {
            return QuadricSpec::from_blocks(p, r);
        }
    }
    Err(Error::Generation(format!(
        "no spec with |det A| > {RANDOM_DET_FLOOR:e} after {MAX_REDRAWS} draws"
    )))
}

/// `xᵀAx - 1`.
pub fn quadric_residual(spec: &QuadricSpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.ambient_dim() {
        return Err(Error::Shape(format!(
            "point of length {} for a quadric in R^{}",
            x.len(),
            spec.ambient_dim()
        )));
    }
    Ok(spec.quadratic_form(x) - 1.0)
}
