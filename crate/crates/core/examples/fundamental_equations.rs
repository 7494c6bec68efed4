//! Engine self-test: Gauss, Codazzi and Ricci residuals on a random quadric
//! chart and on a polynomial graph with a non-trivial transversal field.

use jtangent::hypersurface::{
    derived_tensors, fundamental_residuals, Family, GraphParams, ImmersionScene, PointGeometry,
    Polynomial, Term, Tolerances,
};
use jtangent::paracomplex::random_quadric_spec;
use jtangent::theorems::quadric_scene;

fn report(label: &str, scene: &ImmersionScene) -> jtangent::Result<()> {
    let mut worst = 0.0_f64;
    for u in &scene.samples {
        let geo = PointGeometry::evaluate_unchecked(scene, u)?;
        let derived = derived_tensors(&geo.induced);
        worst = worst.max(fundamental_residuals(&geo.induced, &derived).max());
    }
    println!(
        "{label:<28} {} samples, worst residual {worst:.3e}",
        scene.samples.len()
    );
    Ok(())
}

fn main() -> jtangent::Result<()> {
    let quadric = quadric_scene(random_quadric_spec(2, 42)?, 20, 42)?;
    report("quadric_radial n=2", &quadric)?;

    // graph of u0^2 - u1 u2 + u0 u1 u2 over R^3 with C = (u1, 0, 0, 1 + u0^2)
    let t = |coeff: f64, powers: [u32; 3]| Term {
        coeff,
        powers: powers.to_vec(),
    };
    let params = GraphParams {
        height: Polynomial(vec![
            t(1.0, [2, 0, 0]),
            t(-1.0, [0, 1, 1]),
            t(1.0, [1, 1, 1]),
        ]),
        transversal: vec![
            Polynomial(vec![t(1.0, [0, 1, 0])]),
            Polynomial::default(),
            Polynomial::default(),
            Polynomial(vec![t(1.0, [0, 0, 0]), t(1.0, [2, 0, 0])]),
        ],
    };
    let graph = ImmersionScene::with_random_samples(
        Family::ExplicitGraph(params),
        1,
        9,
        20,
        0.4,
        Tolerances::default(),
    )?;
    report("explicit_graph n=1", &graph)?;
    Ok(())
}
