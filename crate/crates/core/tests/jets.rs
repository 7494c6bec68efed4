use jtangent::jet::{self, Analytic, Jet};
use proptest::prelude::*;

// all multi-indices of total degree <= 3 in 2 variables
fn multi_indices() -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for d in 0..=3 {
        for a in 0..=d {
            out.push([a, d - a]);
        }
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// f = x^2 y + sinh(x), g = exp(y - x) + 2, smooth and nonvanishing
fn pair(x: f64, y: f64) -> (Jet, Jet) {
    let u = Jet::seed_point(&[x, y]);
    let f = &(&u[0] * &u[0]) * &u[1] + u[0].sinh();
    let g = (&u[1] - &u[0]).exp() + u[0].constant_like(2.0);
    (f, g)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn product_obeys_leibniz(x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let (f, g) = pair(x, y);
        let fg = &f * &g;
        for alpha in multi_indices() {
            let mut expected = 0.0;
            for b0 in 0..=alpha[0] {
                for b1 in 0..=alpha[1] {
                    expected += binom(alpha[0], b0) * binom(alpha[1], b1)
                        * f.partial(&[b0, b1]).unwrap()
                        * g.partial(&[alpha[0] - b0, alpha[1] - b1]).unwrap();
                }
            }
            prop_assert!(close(fg.partial(&alpha).unwrap(), expected, 1e-12), "{alpha:?}");
        }
    }

    #[test]
    fn division_undoes_multiplication(x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let (f, g) = pair(x, y);
        let back = (&f * &g).checked_div(&g).unwrap();
        for alpha in multi_indices() {
            prop_assert!(close(back.partial(&alpha).unwrap(), f.partial(&alpha).unwrap(), 1e-11));
        }
    }

    #[test]
    fn first_partials_match_central_differences(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let value = |x: f64, y: f64| pair(x, y).0.checked_div(&pair(x, y).1).unwrap().value();
        let q = pair(x, y).0.checked_div(&pair(x, y).1).unwrap();
        let h = 1e-5;
        let dx = (value(x + h, y) - value(x - h, y)) / (2.0 * h);
        let dy = (value(x, y + h) - value(x, y - h)) / (2.0 * h);
        prop_assert!(close(q.d1(0), dx, 1e-6));
        prop_assert!(close(q.d1(1), dy, 1e-6));
    }

    #[test]
    fn analytic_identities(x in 0.1f64..3.0) {
        let u = Jet::seed_point(&[x]);
        let s = u[0].analytic(Analytic::Sqrt).unwrap();
        let c = u[0].analytic(Analytic::Cosh).unwrap();
        let sh = u[0].analytic(Analytic::Sinh).unwrap();
        let one = &c * &c - &sh * &sh;
        let square = &s * &s;
        let exp_pair = u[0].exp() * (-&u[0]).exp();
        for k in 0..=3 {
            let unit = if k == 0 { 1.0 } else { 0.0 };
            prop_assert!(close(one.partial(&[k]).unwrap(), unit, 1e-10));
            prop_assert!(close(exp_pair.partial(&[k]).unwrap(), unit, 1e-12));
            let id = [x, 1.0, 0.0, 0.0][k];
            prop_assert!(close(square.partial(&[k]).unwrap(), id, 1e-12));
        }
    }
}

#[test]
fn derivative_lowers_order_and_matches_partials() {
    let (f, _) = pair(0.4, -0.2);
    let fx = f.derivative(0);
    assert_eq!(fx.order(), 2);
    assert_eq!(fx.derivative(1).order(), 1);
    assert!(close(
        fx.partial(&[1, 1]).unwrap(),
        f.partial(&[2, 1]).unwrap(),
        1e-14
    ));
    assert!(fx.partial(&[3, 0]).is_err());
}

#[test]
#[allow(clippy::needless_range_loop)]
fn jet_matrix_inverse_has_identity_jets() {
    let u = Jet::seed_point(&[0.3, 0.6]);
    let b = vec![
        vec![u[0].cosh(), &u[0] * &u[1]],
        vec![u[1].sinh(), u[0].exp() + u[1].constant_like(1.0)],
    ];
    let inv = jet::invert(&b).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let entry = jet::dot(&b[i], &[inv[0][j].clone(), inv[1][j].clone()]);
            for alpha in multi_indices() {
                let expected = if alpha == [0, 0] && i == j { 1.0 } else { 0.0 };
                assert!((entry.partial(&alpha).unwrap() - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn singular_inverse_is_degenerate() {
    let u = Jet::seed_point(&[0.3]);
    let b = vec![
        vec![u[0].clone(), u[0].clone()],
        vec![u[0].clone(), u[0].clone()],
    ];
    assert!(jet::invert(&b).unwrap_err().is_degeneracy());
}
