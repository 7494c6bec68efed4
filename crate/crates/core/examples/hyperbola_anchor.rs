//! The hyperbola `t ↦ (cosh t, sinh t)` with `C = x` has closed-form induced
//! data: `Γ = 0`, `h = 1`, `S = -1`, `τ = 0`, `ξ = ∂t`.

use jtangent::hypersurface::{Family, ImmersionScene, PointGeometry, Tolerances};
use jtangent::paracontact::{induced_structure, MetricReport};

fn main() -> jtangent::Result<()> {
    let points: Vec<Vec<f64>> = [-1.0, -0.25, 0.0, 0.5, 1.2]
        .iter()
        .map(|&t| vec![t])
        .collect();
    let scene = ImmersionScene::new(Family::Hyperbola, 0, points.clone(), Tolerances::default())?;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "t", "Gamma", "h", "S", "tau", "xi", "eta"
    );
    for u in &points {
        let geo = PointGeometry::evaluate(&scene, u)?;
        let pd = induced_structure(&geo);
        let ind = &geo.induced;
        println!(
            "{:>6.2} {:>10.2e} {:>10.6} {:>10.6} {:>10.2e} {:>10.6} {:>10.6}",
            u[0],
            ind.gamma[(0, 0, 0)],
            ind.h[(0, 0)],
            ind.s[(0, 0)],
            ind.tau[0],
            pd.xi[0],
            pd.eta[0]
        );
        let report = MetricReport::evaluate(&geo, &pd, -1.0)?;
        assert!(report.metric_residual < 1e-12);
    }
    Ok(())
}
