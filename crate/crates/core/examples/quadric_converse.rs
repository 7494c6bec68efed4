//! Random quadrics `xᵀAx = 1` with `J̃A = -AJ̃` and `C = x` carry a metric
//! para(-1)-Sasakian structure. A sphere, which breaks the anticommutation,
//! does not even make `C` `J̃`-tangent.

use nalgebra::DMatrix;

use jtangent::paracomplex::{random_quadric_spec, QuadricSpec};
use jtangent::theorems::verify_quadric_converse;

fn main() -> jtangent::Result<()> {
    for n in 0..3 {
        for seed in 0..3 {
            let spec = random_quadric_spec(n, seed)?;
            let report = verify_quadric_converse(&spec, 10, seed)?;
            println!(
                "n={n} seed={seed} det={:>9.4} passed={} max residual {:.2e}",
                spec.det(),
                report.passed,
                report.max_residual
            );
        }
    }

    let sphere = QuadricSpec::from_matrix_unchecked(DMatrix::identity(4, 4))?;
    let report = verify_quadric_converse(&sphere, 10, 0)?;
    println!(
        "sphere: passed={} j_tangency {:.3} anticommutator {:.3}",
        report.passed,
        report.max_of("j_tangency").unwrap_or(f64::NAN),
        report.max_of("anticommutator").unwrap_or(f64::NAN)
    );
    Ok(())
}
