//! Exact-algebra oracles for the model: vanishing brackets, the closure
//! audit of all 27 published relations, Casimir commutation and central
//! forms, functional independence, and the commutation diagram. Every frozen
//! string below was derived independently in exact arithmetic.

use superalg_core::model::{
    audit_symmetry_algebra, casimir_audit, commutativity_diagram, fit_structure_constants,
    integral_independence_rank, verify_zero_relations, ModelOperators, Verdict,
};

fn ops() -> ModelOperators {
    ModelOperators::build()
}

#[test]
fn zero_relations_hold_symbolically() {
    let ops = ops();
    let report = verify_zero_relations(&ops).unwrap();
    // eight vanishing brackets plus the [x1,x2] sanity row
    assert_eq!(report.summary.relations, 9);
    assert_eq!(report.summary.mismatches, 0);
    for r in &report.relations {
        assert_eq!(
            r.residual, "0",
            "{} is not the zero operator",
            r.relation_id
        );
    }
}

#[test]
fn integrals_are_formally_self_adjoint() {
    let ops = ops();
    for name in ["H", "A1", "A2", "B1", "B2", "F"] {
        let g = ops.expect(name);
        assert!(
            g.sub(&g.formal_adjoint()).is_zero(),
            "{name} is not formally self-adjoint"
        );
    }
}

#[test]
fn integrals_have_expected_momentum_degree() {
    let ops = ops();
    for name in ["H", "A1", "A2", "B1", "B2", "F"] {
        assert_eq!(ops.expect(name).momentum_degree().unwrap(), 2, "{name}");
    }
    for name in ["C1", "C2", "D"] {
        assert_eq!(ops.expect(name).momentum_degree().unwrap(), 3, "{name}");
    }
}

#[test]
fn cubic_integrals_arise_as_commutators() {
    let ops = ops();
    for (name, src) in [("C1", "[A1, B1]"), ("C2", "[A2, B2]"), ("D", "[B1, B2]")] {
        let direct = ops.lower_src(src).unwrap();
        assert!(
            ops.expect(name).sub(&direct).is_zero(),
            "{name} differs from {src}"
        );
    }
}

#[test]
fn subalgebra_one_bracket_fits_term_for_term() {
    let ops = ops();
    let target = ops.lower_src("[A1, C1]").unwrap();
    let fit = fit_structure_constants(&ops, &target, &["A1", "B1", "A2", "H", "1"], 1).unwrap();
    assert!(fit.is_exact());
    assert_eq!(
        fit.combination_string(),
        "(4*c2)*A1 + (16*c1)*B1 + (4*c2)*A2 + (-4*c2)*H"
    );
}

#[test]
fn subalgebra_two_bracket_fits_term_for_term() {
    let ops = ops();
    let target = ops.lower_src("[A2, C2]").unwrap();
    let fit =
        fit_structure_constants(&ops, &target, &["A2^2", "A1*A2", "H*A2", "B2", "1"], 1).unwrap();
    assert!(fit.is_exact());
    assert_eq!(
        fit.combination_string(),
        "(8)*A2^2 + (8)*A1*A2 + (-8)*H*A2 + (16*c1)*B2 + (8*c1)"
    );
}

#[test]
fn closure_audit_matches_frozen_summary() {
    let ops = ops();
    let report = audit_symmetry_algebra(&ops).unwrap();
    assert_eq!(report.summary.relations, 27);
    assert_eq!(report.summary.exact_matches, 23);
    assert_eq!(report.summary.mismatches, 4);
    assert_eq!(report.summary.closure_failures, 0);
    assert!(report.all_closed());

    // the four subalgebra brackets all match the print verbatim
    for id in ["[A1,C1]", "[B1,C1]", "[A2,C2]", "[B2,C2]"] {
        let row = report
            .relations
            .iter()
            .find(|r| r.relation_id == id)
            .unwrap();
        assert_eq!(row.verdict, Verdict::ExactMatch, "{id}");
        assert_eq!(row.residual, "0", "{id}");
    }
}

#[test]
fn closure_audit_pins_the_four_misprints() {
    let ops = ops();
    let report = audit_symmetry_algebra(&ops).unwrap();
    let row = |id: &str| {
        report
            .relations
            .iter()
            .find(|r| r.relation_id == id)
            .unwrap()
    };

    // three prints reconcile once mixed products are read symmetrized
    for id in ["[A1,D]", "[E1,B2]", "[C2,B1]"] {
        let r = row(id);
        assert_eq!(r.verdict, Verdict::Mismatch, "{id}");
        assert!(
            r.symmetrized_match,
            "{id} should reconcile under symmetrization"
        );
        assert!(r.closure_exact, "{id} must still close");
    }
    assert_eq!(
        row("[A1,D]").corrected_rhs.as_deref(),
        Some("(-8)*A1*F + (8)*A2*B1 + (-8)*A2*F + (8)*F*H")
    );
    assert_eq!(
        row("[C2,B1]").corrected_rhs.as_deref(),
        Some("(2*c2) + (4*c2)*B2 + (-8)*A1*F + (-8)*A2*F + (8)*F*H")
    );

    // one genuine misprint: a dropped factor of H on the B2 term
    let r = row("[E3,B2]");
    assert_eq!(r.verdict, Verdict::Mismatch);
    assert!(!r.symmetrized_match);
    assert!(r.closure_exact);
    assert_eq!(
        r.corrected_rhs.as_deref(),
        Some(
            "(8-16*c3)*A1 + (16-16*c4-16*c3)*A2 + (-8+16*c3)*H + (-8)*A1*B2 + \
             (-16)*A2*B2 + (8)*B2*H"
        )
    );

    // matching count: everything except the single genuine misprint
    let symmetrized_ok = report
        .relations
        .iter()
        .filter(|r| r.symmetrized_match)
        .count();
    assert_eq!(symmetrized_ok, 26);
}

#[test]
fn casimirs_commute_and_central_forms_check() {
    let ops = ops();
    let rep = casimir_audit(&ops).unwrap();
    assert!(rep.k1_commutes);

    // the printed second Casimir fails against B2; the witness pinpoints a
    // swapped parameter in one coefficient
    assert!(!rep.k2_printed_commutes);
    assert_eq!(
        rep.k2_printed_residual,
        "[K2, B2] = (32*c3-32*c2)*A1*C2 + (-32*c3+32*c2)*H*C2"
    );

    // the corrected Casimir from the generic construction commutes exactly
    assert!(rep.k2_corrected_commutes);
    assert_eq!(
        rep.k2_corrected.as_deref(),
        Some(
            "C2^2 + (-8)*{A2^2, B2} + ((-8)*A1 + (8)*H)*{A2, B2} + (-16*c1)*B2^2 + \
             (-16*c1)*B2 + (80-16*c4-16*c3)*A2^2 + ((80-32*c3)*A1 + (-80+32*c3)*H)*A2"
        )
    );

    // both published central forms are exactly reproduced
    assert!(rep.k1_central_exact);
    assert!(rep.k2_central_exact);
    assert_eq!(
        rep.k1_central_form,
        "(-3*c2^2+4*c2^2*c4) + (128*c1)*H + (-128*c1)*A2"
    );
    assert_eq!(
        rep.k2_central_form,
        "(-32*c1+48*c1*c4+48*c1*c3-64*c1*c3*c4) + (-12+16*c3)*H^2 + (24-32*c3)*H*A1 + \
         (-12+16*c3)*A1^2"
    );
}

#[test]
fn seven_of_the_integrals_are_independent() {
    assert_eq!(integral_independence_rank(&ops()), 7);
}

#[test]
fn commutation_diagram_is_verified() {
    let edges = commutativity_diagram(&ops()).unwrap();
    assert_eq!(edges.len(), 15);
    assert!(edges.iter().all(|e| e.verified));
    assert_eq!(edges.iter().filter(|e| e.commutes).count(), 8);
}
