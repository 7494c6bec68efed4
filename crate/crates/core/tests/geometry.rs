mod common;

use nalgebra::DMatrix;

use jtangent::hypersurface::{
    Family, GraphParams, ImmersionScene, PerturbedParams, Polynomial, QuadricChart, Term,
    Tolerances,
};
use jtangent::paracomplex::{random_quadric_spec, QuadricSpec};
use jtangent::theorems::{
    evaluate_samples, partition_samples, quadric_scene, run_suite, verify_sample, Mode,
    SampleContext, SuiteStatus, TheoremId,
};
use jtangent::Error;

fn fixed_spec() -> QuadricSpec {
    QuadricSpec::from_blocks(
        DMatrix::identity(2, 2),
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
    )
    .unwrap()
}

fn perturbed(epsilon: f64) -> ImmersionScene {
    let chart = QuadricChart::through(fixed_spec(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let family = Family::PerturbedTransversal(PerturbedParams {
        chart,
        epsilon,
        direction: vec![0.3, -0.5, 0.7, 0.2],
    });
    ImmersionScene::with_random_samples(family, 1, 3, 20, 0.4, Tolerances::default()).unwrap()
}

fn contexts(scene: &ImmersionScene) -> Vec<(usize, SampleContext)> {
    let (good, skipped) = partition_samples(evaluate_samples(scene)).unwrap();
    assert!(skipped.is_empty());
    good
}

#[test]
fn hyperbola_agrees_with_n0_quadric_chart() {
    let ts = [-0.8, -0.3, 0.0, 0.25, 0.9];
    let hyperbola = ImmersionScene::new(
        Family::Hyperbola,
        0,
        ts.iter().map(|&t| vec![t]).collect(),
        Tolerances::default(),
    )
    .unwrap();
    // the radial chart through (1, 0) has u = tanh t
    let chart =
        QuadricChart::through(QuadricSpec::hyperbola(1.0).unwrap(), vec![1.0, 0.0]).unwrap();
    let quadric = ImmersionScene::new(
        Family::QuadricRadial(chart),
        0,
        ts.iter().map(|&t: &f64| vec![t.tanh()]).collect(),
        Tolerances::default(),
    )
    .unwrap();
    for ((_, a), (_, b)) in contexts(&hyperbola).iter().zip(&contexts(&quadric)) {
        for ((name, x), (_, y)) in common::chart_invariants(a)
            .iter()
            .zip(common::chart_invariants(b))
        {
            assert!((x - y).abs() <= 1e-10, "{name}: {x} vs {y}");
        }
    }
}

#[test]
fn perturbed_family_is_tangent_but_not_metric() {
    let scene = perturbed(0.1);
    let samples = contexts(&scene);
    for (_, ctx) in &samples {
        assert!(ctx.structure.j_tangency < 1e-12);
        assert!(ctx.metric.metric_residual > 1e-3);
        assert!(ctx.fundamentals.max() < 1e-10);
    }
    let tw = run_suite(
        TheoremId::StructureIdentities,
        &scene,
        &samples,
        Mode::Enforced,
    );
    assert!(tw.passed);
    let stau = run_suite(TheoremId::ShapeAndTau, &scene, &samples, Mode::Enforced);
    assert_eq!(stau.status, SuiteStatus::HypothesisNotMet);
    let diag = run_suite(TheoremId::ShapeAndTau, &scene, &samples, Mode::Diagnostic);
    assert!(!diag.passed && diag.max_of("s_plus_id").unwrap() > 1e-2);
    assert!(matches!(
        verify_sample(TheoremId::ShapeOnXi, &scene, &samples[0].1, Mode::Enforced),
        Err(Error::HypothesisNotMet(_))
    ));
}

#[test]
fn zero_perturbation_reproduces_the_quadric() {
    let eps0 = perturbed(0.0);
    let Family::PerturbedTransversal(p) = &eps0.family else {
        unreachable!()
    };
    let plain = ImmersionScene::new(
        Family::QuadricRadial(p.chart.clone()),
        1,
        eps0.samples.clone(),
        Tolerances::default(),
    )
    .unwrap();
    let (a, b) = (contexts(&eps0), contexts(&plain));
    for id in TheoremId::ALL {
        let ra = run_suite(id, &eps0, &a, Mode::Enforced);
        let rb = run_suite(id, &plain, &b, Mode::Enforced);
        assert_eq!(ra, rb, "{id}");
        assert!(ra.passed);
    }
}

#[test]
fn residuals_shrink_with_epsilon() {
    let worst = |eps: f64| {
        contexts(&perturbed(eps))
            .iter()
            .map(|(_, c)| c.metric.metric_residual)
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (worst(0.1), worst(0.01), worst(0.001));
    // each decade at least a factor of 5
    assert!(a > 5.0 * b && b > 5.0 * c && c > 0.0, "{a:e} {b:e} {c:e}");
}

#[test]
fn h_phi_is_antisymmetric_on_metric_scenes() {
    let scene = quadric_scene(random_quadric_spec(2, 8).unwrap(), 5, 8).unwrap();
    for (_, ctx) in contexts(&scene) {
        let h_phi = &ctx.geometry.induced.h * &ctx.structure.phi;
        let sym = &h_phi + h_phi.transpose();
        assert!(sym.amax() < 1e-10);
        assert!(h_phi.amax() > 1e-2);
        // dη = -h(·, φ·)
        assert!((&ctx.structure.d_eta + &h_phi).amax() < 1e-10);
    }
}

fn graph_scene(
    height: Polynomial,
    transversal: Vec<Polynomial>,
    samples: Vec<Vec<f64>>,
) -> ImmersionScene {
    ImmersionScene::new(
        Family::ExplicitGraph(GraphParams {
            height,
            transversal,
        }),
        0,
        samples,
        Tolerances::default(),
    )
    .unwrap()
}

#[test]
fn non_tangent_transversal_fails_the_gate() {
    // graph of u^2 with C = (0, 1): J̃C = (1, 0) is not tangent
    let scene = graph_scene(
        Polynomial(vec![Term {
            coeff: 1.0,
            powers: vec![2],
        }]),
        vec![Polynomial::default(), Polynomial::constant(1.0, 1)],
        vec![vec![0.3], vec![-0.2]],
    );
    let samples = contexts(&scene);
    assert!(samples[0].1.structure.j_tangency > 0.1);
    assert!(samples[0].1.fundamentals.max() < 1e-12);
    for id in [TheoremId::StructureIdentities, TheoremId::Equivalence] {
        let report = run_suite(id, &scene, &samples, Mode::Enforced);
        assert_eq!(report.status, SuiteStatus::HypothesisNotMet);
        assert!(!report.passed);
    }
}

#[test]
fn flat_points_are_skipped_as_degenerate() {
    // h = 6u vanishes at u = 0
    let scene = graph_scene(
        Polynomial(vec![Term {
            coeff: 1.0,
            powers: vec![3],
        }]),
        vec![Polynomial::default(), Polynomial::constant(1.0, 1)],
        vec![vec![0.0], vec![0.5]],
    );
    let (good, skipped) = partition_samples(evaluate_samples(&scene)).unwrap();
    assert_eq!(good.len(), 1);
    assert_eq!(skipped.len(), 1);
    assert!(matches!(skipped[0].1, Error::DegenerateMetric(_)));
}
