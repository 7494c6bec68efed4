#![allow(dead_code)]

use std::path::PathBuf;

use jtangent::jet;
use jtangent::theorems::SampleContext;

pub fn scene_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenes")
        .join(name)
}

/// Quantities that do not depend on the chart: `S` restricted to `ξ`,
/// `h(ξ, ξ)`, `η(ξ)`, `τ(ξ)`, `ξ` as an ambient vector and the residuals.
pub fn chart_invariants(ctx: &SampleContext) -> Vec<(&'static str, f64)> {
    let ind = &ctx.geometry.induced;
    let pd = &ctx.structure;
    let xi = &pd.xi;
    let s_xi = &ind.s * xi;
    let shape_on_xi = s_xi.dot(xi) / xi.dot(xi);
    let f = &ctx.geometry.immersion.f;
    let ambient: Vec<f64> = (0..f.len())
        .map(|k| (0..xi.len()).map(|i| f[k].d1(i) * xi[i]).sum())
        .collect();
    vec![
        ("shape_on_xi", shape_on_xi),
        ("h_xi_xi", ind.h_of(xi, xi)),
        ("eta_xi", pd.eta_of(xi)),
        ("tau_xi", ind.tau.dot(xi)),
        ("point_0", jet::values(f)[0]),
        ("point_1", jet::values(f)[1]),
        ("xi_ambient_0", ambient[0]),
        ("xi_ambient_1", ambient[1]),
        ("j_tangency", pd.j_tangency),
        ("metric", ctx.metric.metric_residual),
        ("contact", ctx.metric.contact_residual),
        ("sasakian", ctx.metric.sasakian_residual),
        ("nijenhuis", ctx.metric.normality.nijenhuis),
        ("gauss", ctx.fundamentals.gauss),
        ("codazzi_h", ctx.fundamentals.codazzi_h),
        ("codazzi_s", ctx.fundamentals.codazzi_s),
        ("ricci", ctx.fundamentals.ricci),
    ]
}
