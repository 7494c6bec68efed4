//! Every suite on one metric scene, printing each check's worst value.

use jtangent::paracomplex::random_quadric_spec;
use jtangent::theorems::{
    evaluate_samples, partition_samples, quadric_scene, run_suite, Mode, TheoremId,
};

fn main() -> jtangent::Result<()> {
    let scene = quadric_scene(random_quadric_spec(2, 5)?, 12, 5)?;
    let (samples, skipped) = partition_samples(evaluate_samples(&scene))?;
    println!("{} samples, {} skipped", samples.len(), skipped.len());

    for id in TheoremId::ALL {
        let report = run_suite(id, &scene, &samples, Mode::Enforced);
        println!("{id} passed={} vacuous={}", report.passed, report.vacuous);
        if let Some(first) = report.per_sample.first() {
            for check in &first.checks {
                let worst = report.max_of(&check.name).unwrap_or(f64::NAN);
                match check.tolerance {
                    Some(tol) => println!("    {:<26} {worst:.3e} (tol {tol:.0e})", check.name),
                    None => println!("    {:<26} {worst:.3e} (info)", check.name),
                }
            }
        }
    }
    Ok(())
}
