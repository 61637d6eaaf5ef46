//! Deformed-oscillator spectrum oracles: closed-form level enumeration at
//! three calibration parameter points, finite-unirrep solutions of the
//! structure-function constraints, and proportionality of the generic
//! template against the factored closed forms.

use num::BigRational;
use superalg_core::qalg::{
    algebraic_spectrum, build_phi1, build_phi2, eigen_a1_principal, eigen_a2_principal,
    mean_value_identity, solve_unirrep_constraints, structure_function_proportionality,
    ModelParamsNumeric, Scalar, Subalgebra,
};

fn params(c: [(i64, i64); 4]) -> ModelParamsNumeric {
    ModelParamsNumeric::new(c.map(|(n, d)| BigRational::new(n.into(), d.into()))).unwrap()
}

fn point_a() -> ModelParamsNumeric {
    params([(1, 1), (0, 1), (3, 4), (3, 4)])
}

#[test]
fn spectrum_linear_level_formulas() {
    // (1, 0, 3/4, 3/4): E_N = 4N + 10
    let spec = algebraic_spectrum(&point_a(), 5);
    let energies: Vec<&str> = spec.iter().map(|l| l.energy.as_str()).collect();
    assert_eq!(energies, ["10", "14", "18", "22", "26", "30"]);

    // (1, 4, 3/4, 3/4): same ladder shifted down by c2^2/(16 c1) = 1
    let spec = algebraic_spectrum(&params([(1, 1), (4, 1), (3, 4), (3, 4)]), 5);
    let energies: Vec<&str> = spec.iter().map(|l| l.energy.as_str()).collect();
    assert_eq!(energies, ["9", "13", "17", "21", "25", "29"]);

    // (4, 0, 0, 0): spacing 4*m1 = 8, ground level 6*m1 + 2*m1 = 16
    let spec = algebraic_spectrum(&params([(4, 1), (0, 1), (0, 1), (0, 1)]), 5);
    let energies: Vec<&str> = spec.iter().map(|l| l.energy.as_str()).collect();
    assert_eq!(energies, ["16", "24", "32", "40", "48", "56"]);
}

#[test]
fn spectrum_multiplicities_and_tuple_constraint() {
    let spec = algebraic_spectrum(&point_a(), 5);
    let mult: Vec<usize> = spec.iter().map(|l| l.multiplicity).collect();
    // level N collects (N+1)(N+2)/2 admissible tuples
    assert_eq!(mult, [1, 3, 6, 10, 15, 21]);
    for (n, level) in spec.iter().enumerate() {
        assert_eq!(level.tuples.len(), level.multiplicity);
        for &[p1, p2, n1, n2] in &level.tuples {
            assert!(n1 <= p1 && n2 <= p2);
            assert_eq!(i64::from(p1) - i64::from(p2), i64::from(n1) - i64::from(n2));
            assert_eq!((p1 + p2 + n1 + n2) as usize, 2 * n);
        }
    }
}

#[test]
fn two_route_energies_average_to_the_level() {
    for p in [
        point_a(),
        params([(1, 1), (4, 1), (3, 4), (3, 4)]),
        params([(4, 1), (0, 1), (0, 1), (0, 1)]),
        params([(2, 1), (1, 3), (1, 2), (5, 4)]),
    ] {
        assert!(mean_value_identity(&p));
    }
}

#[test]
fn singlet_unirreps_at_the_ground_level() {
    // p = 0 at E = 10: four sign branches, central eigenvalues 4, 8, 12, 16
    let p = point_a();
    let e = Scalar::integer(10);
    let phi = build_phi1(&p);
    let sols = solve_unirrep_constraints(&phi, &p, 0, Some(&e));
    assert_eq!(sols.len(), 4);

    let mut ez: Vec<i64> = Vec::new();
    for s in &sols {
        assert_eq!(s.dimension, 1);
        assert!(
            s.positivity_verified,
            "p = 0 has no interior points to fail"
        );
        let z = s.central_eigen.as_ref().unwrap().eval(&e);
        // every solved point keeps phi exactly zero at the lattice ends
        let u = s.u.eval(&e);
        assert!(phi.eval(&u, &e, &z).is_zero());
        assert!(phi.eval(&u.add(&Scalar::integer(1)), &e, &z).is_zero());
        let exact = z.as_exact().unwrap();
        assert!(exact.is_integer());
        ez.push(exact.to_integer().try_into().unwrap());
    }
    ez.sort();
    assert_eq!(ez, [4, 8, 12, 16]);

    // the physical branch (1, -1, -1) sits at e(A2) = 4, which is the
    // principal one-dimensional eigenvalue 2*m1 + m1*m3 at n2 = 0
    let phys = sols
        .iter()
        .find(|s| s.sign_choices == Some((1, -1, -1)))
        .expect("physical sign family present");
    let z = phys.central_eigen.as_ref().unwrap().eval(&e);
    assert!(z.eq_scalar(&Scalar::integer(4)));
    assert!(z.eq_scalar(&eigen_a2_principal(&p, 0, 1)));
}

#[test]
fn dimension_four_unirreps_have_a_positive_branch() {
    // p = 3 at the N = 3 level (E = 22): phi(k) > 0 for k = 1..3 must hold
    // on at least one sign branch of each structure function
    let p = point_a();
    let e = Scalar::integer(22);

    let phi1 = build_phi1(&p);
    let sols1 = solve_unirrep_constraints(&phi1, &p, 3, Some(&e));
    assert_eq!(sols1.len(), 4);
    let pos1: Vec<_> = sols1.iter().filter(|s| s.positivity_verified).collect();
    assert_eq!(pos1.len(), 1);
    assert_eq!(pos1[0].sign_choices, Some((1, -1, -1)));
    assert_eq!(pos1[0].u.to_string(), "1/2");
    assert_eq!(
        pos1[0].central_eigen.as_ref().unwrap().to_string(),
        "E - 18"
    );

    let phi2 = build_phi2(&p);
    let sols2 = solve_unirrep_constraints(&phi2, &p, 3, Some(&e));
    assert_eq!(sols2.len(), 8);
    let pos2: Vec<_> = sols2.iter().filter(|s| s.positivity_verified).collect();
    assert_eq!(pos2.len(), 2);
    let families: Vec<_> = pos2.iter().map(|s| s.sign_choices.unwrap()).collect();
    assert!(families.contains(&(-1, -1, -1)));
    assert!(families.contains(&(1, 1, 1)));

    // interior positivity, checked directly on the positive branch
    let s = pos1[0];
    let z = s.central_eigen.as_ref().unwrap().eval(&e);
    let u = s.u.eval(&e);
    for k in 1..=3 {
        let v = phi1.eval(&u.add(&Scalar::integer(k)), &e, &z);
        assert!(v.is_positive(), "phi1(u + {k}) should be positive, got {v}");
    }
}

#[test]
fn unirrep_families_match_published_eigenvalues_symbolically() {
    // with E left symbolic, every solution lands in a published sign family
    // and the central eigenvalue stays affine in E
    let p = point_a();
    for (phi, expected) in [(build_phi1(&p), 4), (build_phi2(&p), 8)] {
        let sols = solve_unirrep_constraints(&phi, &p, 3, None);
        assert_eq!(sols.len(), expected);
        for s in &sols {
            assert!(s.sign_choices.is_some(), "unmatched family: u = {}", s.u);
            assert!(s.central_eigen.is_some());
        }
    }

    // principal one-dimensional eigenvalues at the probe point: e(A1) is
    // 2*m1*(2*n1 + 1) - shift, e(A2) = 2*m1*(2*n2 + 1) + eps1*m1*m3
    assert!(eigen_a1_principal(&p, 0).eq_scalar(&Scalar::integer(2)));
    assert!(eigen_a1_principal(&p, 1).eq_scalar(&Scalar::integer(6)));
    assert!(eigen_a2_principal(&p, 0, 1).eq_scalar(&Scalar::integer(4)));
    assert!(eigen_a2_principal(&p, 0, -1).eq_scalar(&Scalar::integer(0)));
}

#[test]
fn generic_template_is_an_exact_multiple_of_the_factored_form() {
    let p = point_a();
    for sub in [Subalgebra::Q1, Subalgebra::Q2] {
        let rep = structure_function_proportionality(&p, sub).unwrap();
        assert!(rep.exact_multiple, "{sub:?}");
        assert!(rep.ratio_is_exact, "{sub:?}");
        assert_eq!(rep.ratio.as_deref(), Some("16"), "{sub:?}");
    }
    // degrees: nu^3 for the first subalgebra, nu^4 for the second
    let r1 = structure_function_proportionality(&p, Subalgebra::Q1).unwrap();
    assert_eq!((r1.generic_degree, r1.factored_degree), (3, 3));
    let r2 = structure_function_proportionality(&p, Subalgebra::Q2).unwrap();
    assert_eq!((r2.generic_degree, r2.factored_degree), (4, 4));
}
