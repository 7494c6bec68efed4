use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// One monomial `coeff · Π u_i^{powers[i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// Polynomial in the chart variables, as a list of terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(pub Vec<Term>);

impl Polynomial {
    pub fn constant(c: f64, num_vars: usize) -> Self {
        Polynomial(vec![Term {
            coeff: c,
            powers: vec![0; num_vars],
        }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn validate(&self, num_vars: usize) -> Result<()> {
        for term in &self.0 {
            if term.powers.len() != num_vars {
                return Err(Error::Scene(format!(
                    "polynomial term has {} exponents, expected {num_vars}",
                    term.powers.len()
                )));
            }
            if !term.coeff.is_finite() {
                return Err(Error::Scene("non-finite polynomial coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|t| {
                t.coeff
                    * t.powers
                        .iter()
                        .zip(u)
                        .map(|(&p, &x)| x.powi(p as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Evaluates the polynomial on coordinate jets.
    pub fn eval_jet(&self, u: &[Jet]) -> Jet {
        let mut acc = u[0].constant_like(0.0);
        for term in &self.0 {
            let mut monomial = u[0].constant_like(term.coeff);
            for (var, &power) in term.powers.iter().enumerate() {
                for _ in 0..power {
                    monomial = &monomial * &u[var];
                }
            }
            acc = acc + monomial;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_evaluation_matches_hand_derivatives() {
        // p = 2 u^2 v - v^3 + 1 at (1, 2)
        let p = Polynomial(vec![
            Term {
                coeff: 2.0,
                powers: vec![2, 1],
            },
            Term {
                coeff: -1.0,
                powers: vec![0, 3],
            },
            Term {
                coeff: 1.0,
                powers: vec![0, 0],
            },
        ]);
        let jet = p.eval_jet(&Jet::seed_point(&[1.0, 2.0]));
        assert_eq!(jet.value(), p.eval(&[1.0, 2.0]));
        assert_eq!(jet.partial(&[1, 0]).unwrap(), 8.0);
        assert_eq!(jet.partial(&[0, 1]).unwrap(), 2.0 - 12.0);
        assert_eq!(jet.partial(&[1, 1]).unwrap(), 4.0);
        assert_eq!(jet.partial(&[0, 3]).unwrap(), -6.0);
        assert_eq!(jet.partial(&[2, 1]).unwrap(), 4.0);
    }

    #[test]
    fn validate_checks_arity() {
        let p = Polynomial(vec![Term {
            coeff: 1.0,
            powers: vec![1],
        }]);
        assert!(p.validate(2).is_err());
        assert!(p.validate(1).is_ok());
    }
}
