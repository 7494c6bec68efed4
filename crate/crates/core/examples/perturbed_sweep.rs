//! Tilting the transversal field `C = x + εW` inside the `J̃`-invariant
//! distribution keeps `C` `J̃`-tangent but destroys the metric property;
//! residuals scale linearly with `ε`.

use jtangent::cli::{sweep_rows, SceneFile};

const SCENE: &str = include_str!("../scenes/perturbed.json");

fn main() -> jtangent::Result<()> {
    let base = SceneFile::from_json(SCENE)?;
    let rows = sweep_rows(&base, &[0.2, 0.1, 0.01, 0.001, 0.0])?;
    println!(
        "{:>8} {:>11} {:>11} {:>11} {:>11}",
        "epsilon", "metric", "S+Id", "tau", "normality"
    );
    for row in rows {
        println!(
            "{:>8} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            row.value, row.metric, row.s_plus_id, row.tau, row.normality_operational
        );
    }
    Ok(())
}
