//! Generates a quadric scene file, runs it and prints the summary.

use jtangent::cli::{gen_quadric_file, run};
use jtangent::theorems::Mode;

fn main() -> jtangent::Result<()> {
    let file = gen_quadric_file(1, 7)?;
    let json = file.to_json_pretty();
    println!("scene file: {} bytes", json.len());

    let report = run(&file, Mode::Enforced, false)?;
    report
        .write_summary(&mut std::io::stdout())
        .expect("stdout");
    Ok(())
}
