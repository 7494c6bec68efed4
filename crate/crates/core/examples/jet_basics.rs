//! Truncated Taylor jets: seed a point, push it through arithmetic and
//! analytic functions, read back partial derivatives.

use jtangent::jet::Jet;

fn main() -> jtangent::Result<()> {
    let u = Jet::seed_point(&[0.3, -0.7]);
    // f(x, y) = exp(x) * sqrt(1 + y^2) / (2 - x y)
    let radicand = &u[1] * &u[1] + u[1].constant_like(1.0);
    let denom = u[0].constant_like(2.0) - &u[0] * &u[1];
    let f = (u[0].exp() * radicand.sqrt()?).checked_div(&denom)?;

    println!("f          = {:.12}", f.value());
    for alpha in [[1, 0], [0, 1], [2, 0], [1, 1], [0, 3], [2, 1]] {
        println!("d^{alpha:?} f = {:.12}", f.partial(&alpha)?);
    }

    let fx = f.derivative(0);
    println!(
        "order of f = {}, order of df/dx = {}",
        f.order(),
        fx.order()
    );
    println!("d/dy (df/dx) = {:.12}", fx.d1(1));
    Ok(())
}
