//! Finite-difference solver calibration against closed forms, convergence
//! order, agreement of the discretized separated equations with the
//! algebraic spectrum, and exact equivalence of the three energy formulas.

use std::time::Instant;

use num::BigRational;
use superalg_core::numeric::{
    cartesian_spectrum, compare_closed_forms, cylindrical_spectrum, default_equivalence_points,
    default_equivalence_tuples, fd_eigensolve, formula_equivalence, Method, NumericProblem,
    PotentialKind,
};
use superalg_core::qalg::{algebraic_spectrum, ModelParamsNumeric};

fn point_a() -> ModelParamsNumeric {
    ModelParamsNumeric::new([
        BigRational::from_integer(1.into()),
        BigRational::from_integer(0.into()),
        BigRational::new(3.into(), 4.into()),
        BigRational::new(3.into(), 4.into()),
    ])
    .unwrap()
}

fn solve(pot: PotentialKind, levels: u32, grid: usize) -> Vec<f64> {
    let problem = NumericProblem::with_default_domain(pot, levels, grid);
    fd_eigensolve(&problem, levels as usize)
        .unwrap()
        .eigenvalues
}

#[test]
fn calibration_harmonic_oscillator() {
    // V = x^2, eigenvalues 2k + 1
    let vals = solve(
        PotentialKind::ShiftedOscillator { c1: 0.25, c2: 0.0 },
        3,
        4000,
    );
    for (k, expect) in [1.0, 3.0, 5.0].iter().enumerate() {
        assert!(
            (vals[k] - expect).abs() < 1e-4,
            "level {k}: {} vs {expect}",
            vals[k]
        );
    }
}

#[test]
fn calibration_singular_oscillator() {
    // V = x^2 + (3/4)/x^2 on the half line, eigenvalues 4k + 4
    let vals = solve(
        PotentialKind::SingularOscillator {
            omega2: 1.0,
            alpha: 0.75,
        },
        3,
        4000,
    );
    for (k, expect) in [4.0, 8.0, 12.0].iter().enumerate() {
        assert!(
            (vals[k] - expect).abs() < 1e-3,
            "level {k}: {} vs {expect}",
            vals[k]
        );
    }
}

#[test]
fn calibration_trigonometric_well() {
    // V = (3/4)/sin^2 + (3/4)/cos^2 on (0, pi/2), eigenvalues (2k + 3)^2
    let vals = solve(
        PotentialKind::TrigonometricWell {
            c_a: 0.75,
            c_b: 0.75,
        },
        3,
        4000,
    );
    for (k, expect) in [9.0, 25.0, 49.0].iter().enumerate() {
        assert!(
            (vals[k] - expect).abs() < 1e-3,
            "level {k}: {} vs {expect}",
            vals[k]
        );
    }
}

#[test]
fn second_order_convergence_on_grid_doubling() {
    // the three-point stencil converges at h^2: error ratios near 4
    for pot in [
        PotentialKind::ShiftedOscillator { c1: 0.25, c2: 0.0 },
        PotentialKind::SingularOscillator {
            omega2: 1.0,
            alpha: 0.75,
        },
        PotentialKind::TrigonometricWell {
            c_a: 0.75,
            c_b: 0.75,
        },
    ] {
        let ground: Vec<f64> = [1000, 2000, 4000]
            .iter()
            .map(|&g| solve(pot, 1, g)[0])
            .collect();
        let d1 = (ground[1] - ground[0]).abs();
        let d2 = (ground[2] - ground[1]).abs();
        let factor = d1 / d2;
        assert!(
            (3.0..=5.0).contains(&factor),
            "convergence factor {factor} outside [3, 5] for {pot:?}"
        );
    }
}

#[test]
fn separated_equations_match_their_closed_forms() {
    let rows = compare_closed_forms(&point_a(), 3, 4000).unwrap();
    assert_eq!(rows.len(), 5 * 3);
    for row in &rows {
        assert!(
            row.abs_error < 1e-3,
            "{} level {}: error {}",
            row.equation,
            row.level,
            row.abs_error
        );
    }
}

#[test]
fn discretized_spectra_match_the_algebraic_ladder() {
    // lowest five levels at grid 8000, both separations, within 5e-3
    let start = Instant::now();
    let p = point_a();
    let alg = algebraic_spectrum(&p, 4);
    let cart = cartesian_spectrum(&p, 4, Method::FiniteDifference { grid_points: 8000 }).unwrap();
    let cyl = cylindrical_spectrum(&p, 4, Method::FiniteDifference { grid_points: 8000 }).unwrap();
    assert_eq!(alg.len(), 5);
    assert_eq!(cart.len(), 5);
    assert_eq!(cyl.len(), 5);
    let mut max_delta: f64 = 0.0;
    for i in 0..5 {
        let e = alg[i].energy_f64;
        max_delta = max_delta
            .max((cart[i].e - e).abs())
            .max((cyl[i].e - e).abs());
        // both separations count the same degeneracies
        assert_eq!(cart[i].multiplicity, alg[i].multiplicity);
        assert_eq!(cyl[i].multiplicity, alg[i].multiplicity);
    }
    assert!(max_delta < 5e-3, "max deviation {max_delta}");
    assert!(
        start.elapsed().as_secs() < 60,
        "oracle comparison took {:?}",
        start.elapsed()
    );
}

#[test]
fn analytic_separated_spectra_are_exact() {
    let p = point_a();
    let alg = algebraic_spectrum(&p, 4);
    let cart = cartesian_spectrum(&p, 4, Method::Analytic).unwrap();
    let cyl = cylindrical_spectrum(&p, 4, Method::Analytic).unwrap();
    for i in 0..5 {
        assert!((cart[i].e - alg[i].energy_f64).abs() < 1e-9);
        assert!((cyl[i].e - alg[i].energy_f64).abs() < 1e-9);
        assert_eq!(cart[i].error, 0.0);
        assert_eq!(cyl[i].error, 0.0);
    }
}

#[test]
fn energy_formula_equivalence_over_rational_points() {
    let points = default_equivalence_points();
    let tuples = default_equivalence_tuples();
    assert_eq!(points.len(), 20);
    assert_eq!(tuples.len(), 10);
    let rep = formula_equivalence(&points, &tuples).unwrap();
    assert_eq!(rep.points_checked, 20);
    assert_eq!(rep.tuples_checked, 10);

    // the cylindrical identification is exact as printed
    assert!(rep.cylindrical_exact);

    // the paraboloidal identification as printed is uniformly high by one
    // oscillator quantum; shifting 2*mu by one restores exact equality
    assert!(!rep.paraboloidal_stated_exact);
    assert_eq!(rep.paraboloidal_offset.as_deref(), Some("(2)*m1"));
    assert!(rep.paraboloidal_corrected_exact);

    // integer separation labels split the spectrum by parity of p1 + p2
    assert!(rep.cylindrical_parity_consistent);
    assert!(rep.paraboloidal_parity_consistent);
}
