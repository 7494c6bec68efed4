//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α g / α!` of a scalar
//! function `g` of `num_vars` chart variables at a base point, for every
//! multi-index `α` of total degree at most [`MAX_ORDER`]. Arithmetic on jets
//! is truncated polynomial arithmetic, so composing jets gives exact partial
//! derivatives (up to floating point) of the composed function.
//!
//! Each jet also carries the order up to which its coefficients are valid.
//! Taking a chart derivative with [`Jet::derivative`] lowers that order by
//! one; binary operations return the smaller of the two orders. This is how
//! the geometry modules get first derivatives of quantities that are
//! themselves built from second derivatives of an immersion.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Highest total degree stored in a jet.
pub const MAX_ORDER: usize = 3;

/// Smallest constant term accepted as a divisor.
pub const DIV_EPS: f64 = 1e-300;

/// Monomial enumeration and product tables for a fixed variable count.
#[derive(Debug)]
pub struct Layout {
    num_vars: usize,
    exponents: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    // monomials of degree <= d occupy 0..degree_end[d]
    degree_end: [usize; MAX_ORDER + 1],
    // (lhs, rhs, out) triples grouped by the degree of `out`
    products: [Vec<(u32, u32, u32)>; MAX_ORDER + 1],
    // shift[v][beta] = (index of beta + e_v, beta_v + 1), for |beta| < MAX_ORDER
    shift: Vec<Vec<(u32, f64)>>,
    factorials: Vec<f64>,
}

impl Layout {
    fn build(num_vars: usize) -> Layout {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut degree_end = [0; MAX_ORDER + 1];
        for degree in 0..=MAX_ORDER {
            let mut current = Vec::new();
            push_monomials(num_vars, degree, &mut vec![0u8; num_vars], 0, &mut current);
            exponents.extend(current);
            degree_end[degree] = exponents.len();
        }
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let degree = |e: &[u8]| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut products: [Vec<(u32, u32, u32)>; MAX_ORDER + 1] = Default::default();
        for (a, ea) in exponents.iter().enumerate() {
            for (b, eb) in exponents.iter().enumerate() {
                let d = degree(ea) + degree(eb);
                if d > MAX_ORDER {
                    continue;
                }
                let sum: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let out = index[&sum];
                products[d].push((a as u32, b as u32, out as u32));
            }
        }

        let lower = degree_end[MAX_ORDER - 1];
        let shift = (0..num_vars)
            .map(|v| {
                exponents[..lower]
                    .iter()
                    .map(|e| {
                        let mut raised = e.clone();
                        raised[v] += 1;
                        (index[&raised] as u32, f64::from(raised[v]))
                    })
                    .collect()
            })
            .collect();

        let factorials = exponents
            .iter()
            .map(|e| e.iter().map(|&k| factorial(k as usize)).product())
            .collect();

        Layout {
            num_vars,
            exponents,
            index,
            degree_end,
            products,
            shift,
            factorials,
        }
    }

    /// Shared layout for `num_vars` variables.
    pub fn get(num_vars: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet layout cache poisoned");
        guard
            .entry(num_vars)
            .or_insert_with(|| Arc::new(Layout::build(num_vars)))
            .clone()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of stored coefficients, `C(num_vars + 3, 3)`.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Exponent vectors in storage order.
    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exponents
    }

    fn lookup(&self, alpha: &[usize]) -> Result<usize> {
        if alpha.len() != self.num_vars {
            return Err(Error::Shape(format!(
                "multi-index of length {} for {} variables",
                alpha.len(),
                self.num_vars
            )));
        }
        let total: usize = alpha.iter().sum();
        if total > MAX_ORDER {
            return Err(Error::OrderExceeded(total));
        }
        let key: Vec<u8> = alpha.iter().map(|&a| a as u8).collect();
        Ok(self.index[&key])
    }
}

fn push_monomials(
    num_vars: usize,
    remaining: usize,
    current: &mut Vec<u8>,
    var: usize,
    out: &mut Vec<Vec<u8>>,
) {
    if num_vars == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == num_vars - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_monomials(num_vars, remaining - k, current, var + 1, out);
    }
    current[var] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Arithmetic operation selector for [`Jet::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Built-in analytic functions for [`Jet::analytic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analytic {
    Sqrt,
    Cosh,
    Sinh,
    Exp,
}

/// Truncated Taylor expansion of order at most 3 in `num_vars` variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    order: u8,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.layout.num_vars)
            .field("order", &self.order)
            .field(
                "coeffs",
                &&self.coeffs[..self.layout.degree_end[self.order as usize]],
            )
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.num_vars == other.layout.num_vars
            && self.order == other.order
            && self.coeffs == other.coeffs
    }
}

impl Jet {
    fn zeros_with(layout: Arc<Layout>, order: usize) -> Jet {
        let len = layout.len();
        Jet {
            layout,
            order: order as u8,
            coeffs: vec![0.0; len],
        }
    }

    /// Constant function.
    pub fn constant(value: f64, num_vars: usize) -> Jet {
        let mut jet = Jet::zeros_with(Layout::get(num_vars), MAX_ORDER);
        jet.coeffs[0] = value;
        jet
    }

    /// Constant sharing this jet's layout and order.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut jet = Jet::zeros_with(self.layout.clone(), self.order as usize);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `u^index` at a base point where it equals `value`.
    pub fn variable(index: usize, value: f64, num_vars: usize) -> Result<Jet> {
        if index >= num_vars {
            return Err(Error::IndexOutOfRange { index, num_vars });
        }
        let mut jet = Jet::constant(value, num_vars);
        jet.coeffs[1 + index] = 1.0;
        Ok(jet)
    }

    /// Coordinate jets for every chart variable at the point `u`.
    pub fn seed_point(u: &[f64]) -> Vec<Jet> {
        let m = u.len();
        u.iter()
            .enumerate()
            .map(|(i, &value)| Jet::variable(i, value, m).expect("index in range"))
            .collect()
    }

    /// Builds a jet from raw Taylor coefficients in layout order.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        let layout = Layout::get(num_vars);
        if coeffs.len() != layout.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for a layout of {}",
                coeffs.len(),
                layout.len()
            )));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderExceeded(order));
        }
        let mut jet = Jet {
            layout,
            order: order as u8,
            coeffs,
        };
        jet.truncate();
        Ok(jet)
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    /// Degree up to which the coefficients are valid.
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// First partial `∂_i g`.
    pub fn d1(&self, i: usize) -> f64 {
        debug_assert!(self.order >= 1, "first partial of an order-0 jet");
        self.coeffs[1 + i]
    }

    /// Taylor coefficient `∂^α g / α!`.
    pub fn coeff(&self, alpha: &[usize]) -> Result<f64> {
        let idx = self.layout.lookup(alpha)?;
        Ok(self.coeffs[idx])
    }

    /// Partial derivative `∂^α g` at the base point.
    pub fn partial(&self, alpha: &[usize]) -> Result<f64> {
        let total: usize = alpha.iter().sum();
        if total > self.order as usize {
            return Err(Error::OrderExceeded(total));
        }
        let idx = self.layout.lookup(alpha)?;
        Ok(self.coeffs[idx] * self.layout.factorials[idx])
    }

    /// Jet of the chart derivative `∂_var g`, valid to one order less.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        assert!(var < self.layout.num_vars, "variable index out of range");
        let order = self.order as usize - 1;
        let mut out = Jet::zeros_with(self.layout.clone(), order);
        let end = self.layout.degree_end[order];
        for (beta, &(src, factor)) in self.layout.shift[var][..end].iter().enumerate() {
            out.coeffs[beta] = factor * self.coeffs[src as usize];
        }
        out
    }

    /// Same coefficients, validity lowered to `order`.
    pub fn truncated(&self, order: usize) -> Jet {
        let mut out = self.clone();
        out.order = out.order.min(order as u8);
        out.truncate();
        out
    }

    fn truncate(&mut self) {
        let end = self.layout.degree_end[self.order as usize];
        self.coeffs[end..].iter_mut().for_each(|c| *c = 0.0);
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.layout.num_vars != other.layout.num_vars {
            return Err(Error::VarMismatch(
                self.layout.num_vars,
                other.layout.num_vars,
            ));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(
            self.layout.num_vars, other.layout.num_vars,
            "jets over different variable counts"
        );
        let mut out = Jet {
            layout: self.layout.clone(),
            order: self.order.min(other.order),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        };
        out.truncate();
        out
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        assert_eq!(
            self.layout.num_vars, other.layout.num_vars,
            "jets over different variable counts"
        );
        let order = self.order.min(other.order) as usize;
        let mut out = Jet::zeros_with(self.layout.clone(), order);
        for table in &self.layout.products[..=order] {
            for &(a, b, c) in table {
                out.coeffs[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// `g - g(base)`: the nilpotent part.
    fn nilpotent(&self) -> Jet {
        let mut t = self.clone();
        t.coeffs[0] = 0.0;
        t
    }

    /// Evaluates `Σ_k series[k] t^k` at `t = self - self(base)`.
    fn compose(&self, series: [f64; MAX_ORDER + 1]) -> Jet {
        let t = self.nilpotent();
        let mut acc = self.constant_like(series[MAX_ORDER]);
        for &c in series[..MAX_ORDER].iter().rev() {
            acc = acc.mul_jet(&t);
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Multiplicative inverse by Taylor inversion around the constant term.
    pub fn recip(&self) -> Result<Jet> {
        let b0 = self.value();
        if !(b0.abs() > DIV_EPS) {
            return Err(Error::DegenerateJet(
                "division by a jet with zero constant term",
            ));
        }
        let r = 1.0 / b0;
        Ok(self.compose([r, -r * r, r * r * r, -r * r * r * r]))
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_jet(&other.recip()?))
    }

    /// Binary arithmetic with compatibility and degeneracy checks.
    pub fn arith(&self, other: &Jet, op: ArithOp) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(match op {
            ArithOp::Add => self + other,
            ArithOp::Sub => self - other,
            ArithOp::Mul => self * other,
            ArithOp::Div => self.checked_div(other)?,
        })
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0 > 0.0) {
            return Err(Error::DegenerateJet(
                "square root of a non-positive constant term",
            ));
        }
        let s = a0.sqrt();
        Ok(self.compose([
            s,
            0.5 / s,
            -0.125 / (s * s * s),
            0.0625 / (s * s * s * s * s),
        ]))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0])
    }

    pub fn cosh(&self) -> Jet {
        let (c, s) = (self.value().cosh(), self.value().sinh());
        self.compose([c, s, c / 2.0, s / 6.0])
    }

    pub fn sinh(&self) -> Jet {
        let (c, s) = (self.value().cosh(), self.value().sinh());
        self.compose([s, c, s / 2.0, c / 6.0])
    }

    pub fn analytic(&self, function: Analytic) -> Result<Jet> {
        match function {
            Analytic::Sqrt => self.sqrt(),
            Analytic::Cosh => Ok(self.cosh()),
            Analytic::Sinh => Ok(self.sinh()),
            Analytic::Exp => Ok(self.exp()),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
forward_binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
forward_binop!(Mul, mul, |a, b| a.mul_jet(b));

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Inner product `Σ a_i b_i` of two jet vectors.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len());
    let mut terms = a.iter().zip(b).map(|(x, y)| x * y);
    let first = terms.next().expect("dot product of empty vectors");
    terms.fold(first, |acc, t| acc + t)
}

/// Values of a jet vector.
pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

/// Matrix of jets, row-major `rows[i][j]`.
pub type JetMatrix = Vec<Vec<Jet>>;

/// Matrix-vector product over jets.
pub fn mat_vec(a: &JetMatrix, v: &[Jet]) -> Vec<Jet> {
    a.iter().map(|row| dot(row, v)).collect()
}

fn mat_mul(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let column: Vec<Jet> = b.iter().map(|r| r[j].clone()).collect();
                    dot(row, &column)
                })
                .collect()
        })
        .collect()
}

/// Value matrix of a jet matrix.
pub fn value_matrix(a: &JetMatrix) -> DMatrix<f64> {
    let rows = a.len();
    let cols = a[0].len();
    DMatrix::from_fn(rows, cols, |i, j| a[i][j].value())
}

/// Inverse of a square jet matrix.
///
/// With `B = B0 + E` and `E` nilpotent, the iteration
/// `X <- B0⁻¹ - B0⁻¹ E X` started from `B0⁻¹` is exact after as many steps
/// as the jets' order.
pub fn invert(b: &JetMatrix) -> Result<JetMatrix> {
    let dim = b.len();
    if b.iter().any(|row| row.len() != dim) || dim == 0 {
        return Err(Error::Shape(
            "jet matrix inverse needs a non-empty square matrix".into(),
        ));
    }
    let num_vars = b[0][0].num_vars();
    let order = b.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let b0 = value_matrix(b);
    let b0_inv = b0
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFrame("singular matrix".into()))?;
    let constant: JetMatrix = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Jet::constant(b0_inv[(i, j)], num_vars).truncated(order))
                .collect()
        })
        .collect();
    let nil: JetMatrix = b
        .iter()
        .map(|row| row.iter().map(Jet::nilpotent).collect())
        .collect();
    let lead = mat_mul(&constant, &nil);
    let mut x = constant.clone();
    for _ in 0..order {
        let correction = mat_mul(&lead, &x);
        x = constant
            .iter()
            .zip(&correction)
            .map(|(c_row, k_row)| c_row.iter().zip(k_row).map(|(c, k)| c - k).collect())
            .collect();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn layout_sizes() {
        assert_eq!(Layout::get(1).len(), 4);
        assert_eq!(Layout::get(3).len(), 20);
        assert_eq!(Layout::get(5).len(), 56);
        assert_eq!(Layout::get(0).len(), 1);
    }

    #[test]
    fn seed_variable_examples() {
        let u = Jet::variable(0, 2.0, 1).unwrap();
        assert_eq!(u.coeffs(), &[2.0, 1.0, 0.0, 0.0]);

        let v = Jet::variable(1, 0.0, 3).unwrap();
        assert_eq!(v.value(), 0.0);
        assert_eq!(v.coeff(&[0, 1, 0]).unwrap(), 1.0);
        assert_eq!(v.coeff(&[1, 0, 0]).unwrap(), 0.0);

        let w = Jet::variable(0, 5.0, 2).unwrap();
        assert_eq!(w.partial(&[2, 0]).unwrap(), 0.0);
    }

    #[test]
    fn seed_variable_out_of_range() {
        assert_eq!(
            Jet::variable(3, 0.0, 3),
            Err(Error::IndexOutOfRange {
                index: 3,
                num_vars: 3
            })
        );
    }

    #[test]
    fn square_of_variable() {
        let u = Jet::variable(0, 3.0, 1).unwrap();
        let sq = &u * &u;
        assert_eq!(sq.coeffs(), &[9.0, 6.0, 1.0, 0.0]);
        assert_eq!(sq.partial(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn geometric_series_division() {
        // 1/(1+u) = 1 - u + u^2 - u^3 + ...
        let one = Jet::constant(1.0, 1);
        let denom = &one + &Jet::variable(0, 0.0, 1).unwrap();
        let q = one.arith(&denom, ArithOp::Div).unwrap();
        let expected = [1.0, -1.0, 1.0, -1.0];
        for (c, e) in q.coeffs().iter().zip(expected) {
            assert!(close(*c, e, 1e-15));
        }
    }

    #[test]
    fn add_sub_identity() {
        let a = Jet::from_coeffs(2, 3, (0..10).map(|i| i as f64 * 0.3 - 1.0).collect()).unwrap();
        let b = Jet::from_coeffs(2, 3, (0..10).map(|i| (i as f64).sin()).collect()).unwrap();
        let r = a
            .arith(&b.arith(&b, ArithOp::Sub).unwrap(), ArithOp::Add)
            .unwrap();
        assert_eq!(r, a);
    }

    #[test]
    fn division_by_zero_constant() {
        let u = Jet::variable(0, 0.0, 1).unwrap();
        let one = Jet::constant(1.0, 1);
        assert!(matches!(one.checked_div(&u), Err(Error::DegenerateJet(_))));
    }

    #[test]
    fn var_mismatch() {
        let a = Jet::constant(1.0, 1);
        let b = Jet::constant(1.0, 2);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(Error::VarMismatch(1, 2)));
    }

    #[test]
    fn sqrt_binomial_series() {
        let x = Jet::constant(1.0, 1) + Jet::variable(0, 0.0, 1).unwrap();
        let s = x.analytic(Analytic::Sqrt).unwrap();
        let expected = [1.0, 0.5, -0.125, 0.0625];
        for (c, e) in s.coeffs().iter().zip(expected) {
            assert!(close(*c, e, 1e-15));
        }
    }

    #[test]
    fn sqrt_of_constant_and_nonpositive() {
        let s = Jet::constant(4.0, 2).sqrt().unwrap();
        assert_eq!(s.value(), 2.0);
        assert!(s.coeffs()[1..].iter().all(|&c| c == 0.0));
        assert!(matches!(
            Jet::constant(0.0, 1).sqrt(),
            Err(Error::DegenerateJet(_))
        ));
        assert!(matches!(
            Jet::constant(-1.0, 1).sqrt(),
            Err(Error::DegenerateJet(_))
        ));
    }

    #[test]
    fn cosh_series_at_zero() {
        let t = Jet::variable(0, 0.0, 1).unwrap();
        let c = t.cosh();
        let expected = [1.0, 0.0, 0.5, 0.0];
        for (c, e) in c.coeffs().iter().zip(expected) {
            assert!(close(*c, e, 1e-15));
        }
    }

    #[test]
    fn partial_of_product() {
        let u = Jet::variable(0, 0.7, 2).unwrap();
        let v = Jet::variable(1, -0.2, 2).unwrap();
        assert_eq!((&u * &v).partial(&[1, 1]).unwrap(), 1.0);
        assert_eq!((&u * &u).partial(&[2, 0]).unwrap(), 2.0);
    }

    #[test]
    fn partial_rejects_high_order() {
        let u = Jet::variable(0, 0.7, 2).unwrap();
        assert_eq!(u.partial(&[2, 2]), Err(Error::OrderExceeded(4)));
        assert!(matches!(u.partial(&[1]), Err(Error::Shape(_))));
    }

    #[test]
    fn derivative_lowers_order() {
        // g = u^2 v at (2, 3)
        let u = Jet::variable(0, 2.0, 2).unwrap();
        let v = Jet::variable(1, 3.0, 2).unwrap();
        let g = &(&u * &u) * &v;
        let du = g.derivative(0);
        assert_eq!(du.order(), 2);
        // d/du = 2uv = 12, d/dv of that = 2u = 4, d2/du2 = 2v = 6
        assert_eq!(du.value(), 12.0);
        assert_eq!(du.partial(&[0, 1]).unwrap(), 4.0);
        assert_eq!(du.partial(&[1, 0]).unwrap(), 6.0);
        assert_eq!(du.partial(&[1, 1]).unwrap(), 2.0);
        assert!(du.partial(&[2, 1]).is_err());
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let u = Jet::variable(0, 1.0, 1).unwrap();
        let cube = &(&u * &u) * &u;
        let low = cube.derivative(0); // 3u^2, order 2
        let prod = &low * &u;
        assert_eq!(prod.order(), 2);
        assert_eq!(prod.coeffs()[3], 0.0);
    }

    #[test]
    fn jet_matrix_inverse() {
        let u = Jet::seed_point(&[0.3, -0.1]);
        let one = Jet::constant(1.0, 2);
        let b: JetMatrix = vec![
            vec![&one + &u[0], &u[0] * &u[1]],
            vec![u[1].cosh(), &one * 2.0 - &u[1]],
        ];
        let inv = invert(&b).unwrap();
        let prod = mat_mul(&b, &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((entry.value() - target).abs() < 1e-14);
                assert!(entry.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
            }
        }
    }
}
