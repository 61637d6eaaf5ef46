//! The concrete model: a three-dimensional quantum Hamiltonian with an
//! anisotropic oscillator, a linear term, and two inverse-square barriers,
//!
//!   H = p1^2 + p2^2 + p3^2 + c1 (4 x1^2 + x2^2 + x3^2) + c2 x1
//!       + c3 / x2^2 + c4 / x3^2,
//!
//! its sixteen named integrals of motion, and the quadratic symmetry algebra
//! they generate. The claimed closure relations are stored as text and
//! audited against exact recomputation; structure constants are recovered
//! independently by span fitting, so every printed relation is either
//! confirmed or accompanied by a corrected right-hand side.

use crate::fit::{fit_span, fit_span_batch, span_rank, FitBasis, StructureFit};
use crate::parse::{lower_with, parse, ExprAst, ExprError, ExprKind, ResolvedSymbol, SymbolClass};
use crate::scalar::GaussianRational;
use crate::weyl::OperatorExpr;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// The sixteen named operators, in presentation order.
pub const GENERATOR_NAMES: [&str; 16] = [
    "H", "A1", "A2", "B1", "B2", "F", "J1", "J2", "J3", "C1", "C2", "D", "E1", "E2", "E3", "E4",
];

/// Defining expressions. Later entries may reference earlier names; the
/// commutator-defined integrals are built exactly from the quadratic ones.
/// A3 = H - A1 - A2 is carried along for convenience.
const DEFINITIONS: [(&str, &str); 17] = [
    ("J1", "x2*p3 - x3*p2"),
    ("J2", "x3*p1 - x1*p3"),
    ("J3", "x1*p2 - x2*p1"),
    (
        "H",
        "p1^2 + p2^2 + p3^2 + c1*(4*x1^2 + x2^2 + x3^2) + c2*x1 + c3*x2^-2 + c4*x3^-2",
    ),
    ("A1", "p1^2 + 4*c1*x1^2 + c2*x1"),
    ("A2", "p2^2 + c1*x2^2 + c3*x2^-2"),
    ("A3", "p3^2 + c1*x3^2 + c4*x3^-2"),
    (
        "B1",
        "J2*p3 + p3*J2 + 2*c1*x1*x3^2 + 1/2*c2*x3^2 - 2*c4*x1*x3^-2",
    ),
    ("B2", "J1^2 + c3*x3^2*x2^-2 + c4*x2^2*x3^-2"),
    (
        "F",
        "p2*J3 + J3*p2 - 2*c1*x1*x2^2 - 1/2*c2*x2^2 + 2*c3*x1*x2^-2",
    ),
    ("C1", "[A1, B1]"),
    ("C2", "[A2, B2]"),
    ("D", "[B1, B2]"),
    ("E1", "[A1, F]"),
    ("E2", "[A2, F]"),
    ("E3", "[B1, F]"),
    ("E4", "[B2, F]"),
];

/// Brackets asserted to vanish identically.
pub const ZERO_RELATIONS: [&str; 8] = [
    "[A1, H]", "[A2, H]", "[B1, H]", "[B2, H]", "[H, F]", "[A1, A2]", "[A1, B2]", "[A2, B1]",
];

/// One claimed closure relation: bracket on the left, published polynomial
/// in the generators on the right. Product order in the text is preserved
/// literally when lowering.
#[derive(Debug, Clone, Copy)]
pub struct RelationSpec {
    pub id: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
}

/// The full set of published closure claims: twenty-four brackets landing in
/// the span of degree-two polynomials in {A1, A2, B1, B2, F, H}, then three
/// brackets among the cubic integrals {C1, C2, D} with coefficients linear
/// in the six quadratic ones.
pub const SYMMETRY_RELATIONS: [RelationSpec; 27] = [
    RelationSpec {
        id: "[A1,C1]",
        lhs: "[A1, C1]",
        rhs: "4*c2*A1 + 16*c1*B1 + 4*c2*(A2 - H)",
    },
    RelationSpec {
        id: "[B1,C1]",
        lhs: "[B1, C1]",
        rhs: "24*A1^2 + 32*(A2 - H)*A1 - 4*c2*B1 + 8*H^2 - 16*H*A2 - 8*c1*(4*c4 - 3) + 8*A2^2",
    },
    RelationSpec {
        id: "[A2,C2]",
        lhs: "[A2, C2]",
        rhs: "8*A2^2 + 8*(A1 - H)*A2 + 8*c1*(2*B2 + 1)",
    },
    RelationSpec {
        id: "[B2,C2]",
        lhs: "[B2, C2]",
        rhs: "-16*(c3 + c4 - 1)*A2 - 8*{A2, B2} - 8*(A1 - H)*B2 - 8*(2*c3 - 1)*A1 + 8*(2*c3 - 1)*H",
    },
    RelationSpec {
        id: "[A1,D]",
        lhs: "[A1, D]",
        rhs: "8*A2*B1 - 8*F*A1 - 8*A2*F + 8*H*F",
    },
    RelationSpec {
        id: "[C1,F]",
        lhs: "[C1, F]",
        rhs: "8*H*A2 - 8*A2*A1 - 8*A2^2 - 16*c1*B2 - 8*c1",
    },
    RelationSpec {
        id: "[C1,B2]",
        lhs: "[C1, B2]",
        rhs: "8*A2*B1 - 8*A1*F - 8*A2*F + 8*H*F",
    },
    RelationSpec {
        id: "[E1,A2]",
        lhs: "[E1, A2]",
        rhs: "16*c1*F + 4*c2*A2",
    },
    RelationSpec {
        id: "[E1,B2]",
        lhs: "[E1, B2]",
        rhs: "8*H*F - 8*F*A1 - 8*A2*F + 8*B1*A2",
    },
    RelationSpec {
        id: "[E1,F]",
        lhs: "[E1, F]",
        rhs: "16*A2*A1 - 4*c2*F - 8*A2^2 + 8*c1*(4*c3 - 3)",
    },
    RelationSpec {
        id: "[E1,A1]",
        lhs: "[E1, A1]",
        rhs: "-16*c1*F - 4*c2*A2",
    },
    RelationSpec {
        id: "[C2,B1]",
        lhs: "[C2, B1]",
        rhs: "4*c2*B2 - 8*F*A2 - 8*A1*F + 8*H*F + 2*c2",
    },
    RelationSpec {
        id: "[E2,A2]",
        lhs: "[E2, A2]",
        rhs: "-4*c2*A2 - 16*c1*F",
    },
    RelationSpec {
        id: "[E2,B1]",
        lhs: "[E2, B1]",
        rhs: "8*A2^2 + 8*(A1 - H)*A2 + 16*c1*B2 + 8*c1",
    },
    RelationSpec {
        id: "[E2,B2]",
        lhs: "[E2, B2]",
        rhs: "8*A2*F + 8*A1*F - 8*H*F - 8*B1*A2",
    },
    RelationSpec {
        id: "[E2,F]",
        lhs: "[E2, F]",
        rhs: "8*A2^2 - 16*A1*A2 + 4*c2*F - 8*c1*(4*c3 - 3)",
    },
    RelationSpec {
        id: "[B1,D]",
        lhs: "[B1, D]",
        rhs: "8*F*B1 - 8*(A2 + 3*A1 - H)*B2 - 8*(2*c4 - 1)*A2 - 12*A1 + 4*H",
    },
    RelationSpec {
        id: "[D,B2]",
        lhs: "[D, B2]",
        rhs: "8*(B1*B2 + B2*B1) + 8*F*B2 + 8*(2*c3 - 1)*B1 + 8*(2*c4 - 1)*F - 8*B1*B2",
    },
    RelationSpec {
        id: "[E3,B1]",
        lhs: "[E3, B1]",
        rhs: "8*(A1 + A2 - H)*F - 4*c2*B2 - 2*c2",
    },
    RelationSpec {
        id: "[E3,B2]",
        lhs: "[E3, B2]",
        rhs: "8*F*B1 - 8*(2*c3 - 1)*A1 - 16*(c3 + c4 - 1)*A2 + 8*(2*c3 - 1)*H - 8*A1*B2 - 16*A2*B2 + 8*B2 - 8*B1*F",
    },
    RelationSpec {
        id: "[E3,F]",
        lhs: "[E3, F]",
        rhs: "8*A2*B1 - 4*c2*B2 - 2*c2",
    },
    RelationSpec {
        id: "[E4,A1]",
        lhs: "[E4, A1]",
        rhs: "-8*(A1 + A2 - H)*F + 8*B1*A2",
    },
    RelationSpec {
        id: "[E4,B2]",
        lhs: "[E4, B2]",
        rhs: "-8*(B2*F + F*B2) + 8*F*B2 - 8*(2*c4 - 1)*F - 8*B1*B2 - 8*(2*c3 - 1)*B1",
    },
    RelationSpec {
        id: "[E4,F]",
        lhs: "[E4, F]",
        rhs: "-8*(2*A1 - A2)*B2 + 8*B1*F - 4*(4*c3 - 3)*H + 4*(4*c3 - 5)*A1 + 8*(2*c3 - 1)*A2",
    },
    RelationSpec {
        id: "[C1,C2]",
        lhs: "[C1, C2]",
        rhs: "8*A2*C1 - 4*c2*C2 - 16*c1*D",
    },
    RelationSpec {
        id: "[C1,D]",
        lhs: "[C1, D]",
        rhs: "8*F*C1 - 8*A2*C2 - 24*A1*C2 + 8*H*C2 + 4*c2*D",
    },
    RelationSpec {
        id: "[C2,D]",
        lhs: "[C2, D]",
        rhs: "-8*B2*C1 - 8*F*C2 + 8*A2*D - 8*(2*c3 - 1)*C1",
    },
];

/// The published Casimir of the first three-generator subalgebra.
pub const CASIMIR_1_SRC: &str = "C1^2 - 4*c2*{A1, B1} - 16*c1*B1^2 - 8*c2*(A2 - H)*B1 + 16*A1^3 \
     + 32*(A2 - H)*A1^2 + (128*c1 + 16*H^2 - 32*H*A2 - 16*c1*(4*c4 - 3) + 16*A2^2)*A1";

/// The published Casimir of the second subalgebra, exactly as printed.
pub const CASIMIR_2_SRC: &str =
    "C2^2 - 8*{A2^2, B2} - 8*(A1 - H)*{A2, B2} - 16*c1*B2^2 - 16*c1*B2 \
     - 16*(c3 + c4 - 5)*A2^2 - 16*(2*c2 - 5)*(A1 - H)*A2";

/// Published central-element forms of the two Casimirs.
pub const CASIMIR_1_CENTRAL_SRC: &str = "128*c1*H - 128*c1*A2 - 3*c2^2 + 4*c2^2*c4";
pub const CASIMIR_2_CENTRAL_SRC: &str =
    "4*(4*c3 - 3)*(H - A1)^2 - 16*(2*c1 - 3*c1*c3 - 3*c1*c4 + 4*c1*c3*c4)";

/// All named operators, built exactly.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    map: BTreeMap<String, OperatorExpr>,
}

impl ModelOperators {
    /// Builds every named operator from its defining expression. Panics only
    /// on a malformed definition table; a too-small parameter-degree cap
    /// surfaces as an error through `try_build`.
    pub fn build() -> Self {
        Self::try_build().unwrap_or_else(|e| panic!("building model operators: {e}"))
    }

    /// Fallible constructor: the definitions are static, but lowering them
    /// can exceed a caller-configured parameter-degree cap.
    pub fn try_build() -> Result<Self, ExprError> {
        let mut map: BTreeMap<String, OperatorExpr> = BTreeMap::new();
        for (name, src) in DEFINITIONS {
            let ast = parse(src)?;
            let expr = {
                let resolve = |sym: &str| resolve_in(&map, sym);
                lower_with(&ast, &resolve)?
            };
            map.insert(name.to_string(), expr);
        }
        Ok(ModelOperators { map })
    }

    pub fn get(&self, name: &str) -> Option<&OperatorExpr> {
        self.map.get(name)
    }

    pub fn expect(&self, name: &str) -> &OperatorExpr {
        self.get(name)
            .unwrap_or_else(|| panic!("unknown operator {name}"))
    }

    /// Lowers an expression over generators, parameters, and canonical
    /// variables. Literal product order is preserved.
    pub fn lower_src(&self, src: &str) -> Result<OperatorExpr, ExprError> {
        let ast = parse(src)?;
        let resolve = |sym: &str| resolve_in(&self.map, sym);
        lower_with(&ast, &resolve)
    }

    /// Lowers with every product of two noncentral factors read as the
    /// symmetrized combination (a*b -> {a,b}/2). Detects whether a printed
    /// relation was meant up to symmetrization.
    pub fn lower_src_symmetrized(&self, src: &str) -> Result<OperatorExpr, ExprError> {
        let ast = parse(src)?;
        self.lower_sym(&ast)
    }

    fn lower_sym(&self, ast: &ExprAst) -> Result<OperatorExpr, ExprError> {
        let resolve = |sym: &str| resolve_in(&self.map, sym);
        match &ast.kind {
            ExprKind::Mul(a, b) => {
                let ea = self.lower_sym(a)?;
                let eb = self.lower_sym(b)?;
                if is_pure_coefficient(&ea) || is_pure_coefficient(&eb) {
                    Ok(ea.checked_mul(&eb)?)
                } else {
                    Ok(ea
                        .anticommutator(&eb)?
                        .scale(&GaussianRational::from_ratio(1, 2)))
                }
            }
            ExprKind::Add(a, b) => Ok(self.lower_sym(a)?.add(&self.lower_sym(b)?)),
            ExprKind::Sub(a, b) => Ok(self.lower_sym(a)?.sub(&self.lower_sym(b)?)),
            ExprKind::Neg(a) => Ok(self.lower_sym(a)?.neg()),
            ExprKind::Pow(base, exp, _) if *exp >= 0 => {
                // powers of a single factor need no reordering choice
                Ok(self.lower_sym(base)?.checked_pow(*exp as u32)?)
            }
            ExprKind::Commutator(a, b) => Ok(self.lower_sym(a)?.commutator(&self.lower_sym(b)?)?),
            ExprKind::Anticommutator(a, b) => {
                Ok(self.lower_sym(a)?.anticommutator(&self.lower_sym(b)?)?)
            }
            _ => lower_with(ast, &resolve),
        }
    }
}

/// Builds all named operators; alias for `ModelOperators::build`.
pub fn build_generators() -> ModelOperators {
    ModelOperators::build()
}

fn resolve_in(map: &BTreeMap<String, OperatorExpr>, sym: &str) -> Option<ResolvedSymbol> {
    if let Some(expr) = map.get(sym) {
        return Some(ResolvedSymbol {
            class: SymbolClass::Derived,
            expr: expr.clone(),
        });
    }
    crate::parse::standard_symbols(sym)
}

/// True when the expression is a multiple of the identity monomial.
fn is_pure_coefficient(e: &OperatorExpr) -> bool {
    e.terms().all(|(m, _)| m.is_one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactMatch,
    Mismatch,
}

/// Audit outcome for one published relation.
#[derive(Debug, Clone, Serialize)]
pub struct RelationAudit {
    pub relation_id: String,
    /// Exact residual lhs - rhs in canonical text form; "0" when they agree.
    pub residual: String,
    pub verdict: Verdict,
    /// Independent span fit of the bracket, shown when the print mismatches
    /// and the bracket still closes in the algebra.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_rhs: Option<String>,
    /// Whether reading each product of noncentral factors as {a,b}/2
    /// reconciles the print.
    pub symmetrized_match: bool,
    /// Whether the bracket lies exactly in the admissible span.
    pub closure_exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub relations: usize,
    pub exact_matches: usize,
    pub mismatches: usize,
    pub closure_failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema: u32,
    pub relations: Vec<RelationAudit>,
    pub summary: AuditSummary,
}

impl AuditReport {
    pub fn all_closed(&self) -> bool {
        self.summary.closure_failures == 0
    }
}

/// Verifies the eight vanishing brackets, plus one canonical sanity row.
/// Every residual must be zero.
pub fn verify_zero_relations(ops: &ModelOperators) -> Result<AuditReport, ExprError> {
    let mut relations = Vec::new();
    let rows = ZERO_RELATIONS.iter().copied().chain(["[x1, x2]"]);
    for src in rows {
        let val = ops.lower_src(src)?;
        let exact = val.is_zero();
        relations.push(RelationAudit {
            relation_id: src.replace(' ', ""),
            residual: val.to_string(),
            verdict: if exact {
                Verdict::ExactMatch
            } else {
                Verdict::Mismatch
            },
            corrected_rhs: None,
            symmetrized_match: exact,
            closure_exact: exact,
        });
    }
    let exact = relations
        .iter()
        .filter(|r| r.verdict == Verdict::ExactMatch)
        .count();
    let n = relations.len();
    Ok(AuditReport {
        schema: 1,
        relations,
        summary: AuditSummary {
            relations: n,
            exact_matches: exact,
            mismatches: n - exact,
            closure_failures: n - exact,
        },
    })
}

/// Names of basis elements spanning degree-two polynomials in the quadratic
/// integrals (with the identity first), used for closure fits.
fn quadratic_basis_names() -> Vec<String> {
    let gens = ["A1", "A2", "B1", "B2", "F", "H"];
    let mut names = vec!["1".to_string()];
    names.extend(gens.iter().map(|g| g.to_string()));
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i..] {
            if a == b {
                names.push(format!("{a}^2"));
            } else {
                names.push(format!("{a}*{b}"));
            }
        }
    }
    names
}

/// Adds the cubic integrals and their products with the quadratic ones.
fn cubic_basis_names() -> Vec<String> {
    let mut names = quadratic_basis_names();
    for c in ["C1", "C2", "D"] {
        names.push(c.to_string());
        for g in ["A1", "A2", "B1", "B2", "F", "H"] {
            names.push(format!("{g}*{c}"));
        }
    }
    names
}

fn basis_from_names(
    ops: &ModelOperators,
    names: &[String],
    max_param_degree: u32,
) -> Result<FitBasis, ExprError> {
    let mut exprs = Vec::with_capacity(names.len());
    for n in names {
        exprs.push(ops.lower_src_symmetrized(n)?);
    }
    Ok(FitBasis {
        names: names.to_vec(),
        exprs,
        max_param_degree,
    })
}

/// Audits every published closure relation: recomputes the bracket, takes
/// the exact residual against the print, and independently fits the bracket
/// in the admissible span (weights of parameter degree <= 1). Mismatched
/// prints that still close come back with a corrected right-hand side.
pub fn audit_symmetry_algebra(ops: &ModelOperators) -> Result<AuditReport, ExprError> {
    // recompute brackets and printed forms in parallel; exact arithmetic
    let computed: Vec<(usize, OperatorExpr, OperatorExpr, bool)> = SYMMETRY_RELATIONS
        .par_iter()
        .enumerate()
        .map(|(idx, rel)| {
            let lhs = ops.lower_src(rel.lhs)?;
            let rhs = ops.lower_src(rel.rhs)?;
            let rhs_sym = ops.lower_src_symmetrized(rel.rhs)?;
            let sym_match = lhs.sub(&rhs_sym).is_zero();
            Ok((idx, lhs, rhs, sym_match))
        })
        .collect::<Result<Vec<_>, ExprError>>()?;

    // one shared elimination per basis family
    let quad_names = quadratic_basis_names();
    let cubic_names = cubic_basis_names();
    let quad_basis = basis_from_names(ops, &quad_names, 1)?;
    let cubic_basis = basis_from_names(ops, &cubic_names, 1)?;
    let is_cubic: Vec<bool> = SYMMETRY_RELATIONS
        .iter()
        .map(|r| matches!(r.id, "[C1,C2]" | "[C1,D]" | "[C2,D]"))
        .collect();
    let quad_targets: Vec<&OperatorExpr> = computed
        .iter()
        .filter(|(idx, ..)| !is_cubic[*idx])
        .map(|(_, lhs, ..)| lhs)
        .collect();
    let cubic_targets: Vec<&OperatorExpr> = computed
        .iter()
        .filter(|(idx, ..)| is_cubic[*idx])
        .map(|(_, lhs, ..)| lhs)
        .collect();
    let mut quad_fits = fit_span_batch(&quad_basis, &quad_targets).into_iter();
    let mut cubic_fits = fit_span_batch(&cubic_basis, &cubic_targets).into_iter();

    let mut relations = Vec::new();
    for (idx, lhs, rhs, sym_match) in &computed {
        let rel = &SYMMETRY_RELATIONS[*idx];
        let fit: StructureFit = if is_cubic[*idx] {
            cubic_fits.next().expect("one fit per cubic relation")
        } else {
            quad_fits.next().expect("one fit per quadratic relation")
        };
        let residual = lhs.sub(rhs);
        let exact = residual.is_zero();
        relations.push(RelationAudit {
            relation_id: rel.id.to_string(),
            residual: residual.to_string(),
            verdict: if exact {
                Verdict::ExactMatch
            } else {
                Verdict::Mismatch
            },
            corrected_rhs: if !exact && fit.is_exact() {
                Some(fit.combination_string())
            } else {
                None
            },
            symmetrized_match: *sym_match,
            closure_exact: fit.is_exact(),
        });
    }
    let n = relations.len();
    let exact = relations
        .iter()
        .filter(|r| r.verdict == Verdict::ExactMatch)
        .count();
    let closure_failures = relations.iter().filter(|r| !r.closure_exact).count();
    Ok(AuditReport {
        schema: 1,
        relations,
        summary: AuditSummary {
            relations: n,
            exact_matches: exact,
            mismatches: n - exact,
            closure_failures,
        },
    })
}

/// Fits a target operator in the span of named basis elements with
/// parameter-polynomial weights. Basis names may use generator names;
/// products in them are read literally.
pub fn fit_structure_constants(
    ops: &ModelOperators,
    target: &OperatorExpr,
    basis_names: &[&str],
    max_param_degree: u32,
) -> Result<StructureFit, ExprError> {
    let names: Vec<String> = basis_names.iter().map(|s| s.to_string()).collect();
    let mut exprs = Vec::with_capacity(names.len());
    for n in &names {
        exprs.push(ops.lower_src(n)?);
    }
    let basis = FitBasis {
        names,
        exprs,
        max_param_degree,
    };
    Ok(fit_span(&basis, target))
}

/// Casimir audit: commutation of each published Casimir with its subalgebra
/// generators, a corrected second Casimir recovered from the generic
/// three-generator construction, and verification of the central forms.
#[derive(Debug, Clone, Serialize)]
pub struct CasimirReport {
    pub schema: u32,
    pub k1_commutes: bool,
    pub k2_printed_commutes: bool,
    /// Witness bracket for the failure: the first generator the printed
    /// second Casimir fails to commute with, or "0" when it commutes.
    pub k2_printed_residual: String,
    /// Corrected K2 from the generic construction, in text form, when the
    /// printed one fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2_corrected: Option<String>,
    pub k2_corrected_commutes: bool,
    /// K1 minus its published central form is exactly zero.
    pub k1_central_exact: bool,
    /// Corrected K2 minus the published central form is exactly zero.
    pub k2_central_exact: bool,
    /// K1 re-derived over central monomials {1, H, A2, ...} by exact fit.
    pub k1_central_form: String,
    /// Corrected K2 re-derived over central monomials {1, H, A1, ...}.
    pub k2_central_form: String,
}

/// Builds the published first Casimir.
pub fn casimir_q1(ops: &ModelOperators) -> Result<OperatorExpr, ExprError> {
    ops.lower_src(CASIMIR_1_SRC)
}

/// Builds the published second Casimir, exactly as printed.
pub fn casimir_q2_printed(ops: &ModelOperators) -> Result<OperatorExpr, ExprError> {
    ops.lower_src(CASIMIR_2_SRC)
}

/// Runs the full Casimir audit. The corrected second Casimir comes from
/// instantiating the generic quadratic-algebra Casimir with the fitted
/// structure constants, independent of the printed text.
pub fn casimir_audit(ops: &ModelOperators) -> Result<CasimirReport, ExprError> {
    let k1 = casimir_q1(ops)?;
    let a1 = ops.expect("A1");
    let b1 = ops.expect("B1");
    let a2 = ops.expect("A2");
    let b2 = ops.expect("B2");

    let k1_commutes = k1.commutator(a1)?.is_zero() && k1.commutator(b1)?.is_zero();

    let k2_printed = casimir_q2_printed(ops)?;
    let k2_res_a2 = k2_printed.commutator(a2)?;
    let k2_res_b2 = k2_printed.commutator(b2)?;
    let k2_printed_commutes = k2_res_a2.is_zero() && k2_res_b2.is_zero();
    let k2_printed_residual = if k2_printed_commutes {
        "0".to_string()
    } else {
        // witness: fit the failing bracket in the cubic span so the report
        // stays readable; fall back to the raw normal form
        let (gen, res) = if !k2_res_a2.is_zero() {
            ("A2", &k2_res_a2)
        } else {
            ("B2", &k2_res_b2)
        };
        let basis = basis_from_names(ops, &cubic_basis_names(), 1)?;
        let fit = fit_span(&basis, res);
        if fit.is_exact() {
            format!("[K2, {gen}] = {}", fit.combination_string())
        } else {
            format!("[K2, {gen}] = {res}")
        }
    };

    let k2_generic = crate::qalg::realized_generic_casimir(ops, crate::qalg::Subalgebra::Q2)?;
    let k2_corrected_commutes =
        k2_generic.commutator(a2)?.is_zero() && k2_generic.commutator(b2)?.is_zero();

    let k1_central = ops.lower_src(CASIMIR_1_CENTRAL_SRC)?;
    let k1_central_exact = k1.sub(&k1_central).is_zero();
    let k2_central = ops.lower_src(CASIMIR_2_CENTRAL_SRC)?;
    let k2_central_exact = k2_generic.sub(&k2_central).is_zero();
    let k1_central_form = casimir_central_fit(ops, &k1, "A2").combination_string();
    let k2_central_form = casimir_central_fit(ops, &k2_generic, "A1").combination_string();

    Ok(CasimirReport {
        schema: 1,
        k1_commutes,
        k2_printed_commutes,
        k2_printed_residual,
        k2_corrected: if k2_printed_commutes {
            None
        } else {
            Some(crate::qalg::generic_casimir_src(
                crate::qalg::Subalgebra::Q2,
            ))
        },
        k2_corrected_commutes,
        k1_central_exact,
        k2_central_exact,
        k1_central_form,
        k2_central_form,
    })
}

/// Expresses a Casimir over central monomials {1, H, Z, H^2, H*Z, Z^2}
/// (Z = the other subalgebra's generator) with parameter-polynomial weights
/// of exponent cap 2. Cap 2 is required: the first Casimir's central form
/// carries a c2^2*c4 term.
pub fn casimir_central_fit(
    ops: &ModelOperators,
    casimir: &OperatorExpr,
    central: &str,
) -> StructureFit {
    let names: Vec<String> = vec![
        "1".into(),
        "H".into(),
        central.into(),
        "H^2".into(),
        format!("H*{central}"),
        format!("{central}^2"),
    ];
    let exprs: Vec<OperatorExpr> = names
        .iter()
        .map(|n| ops.lower_src(n).expect("central basis lowers"))
        .collect();
    let basis = FitBasis {
        names,
        exprs,
        max_param_degree: 2,
    };
    fit_span(&basis, casimir)
}

/// Rank of the span of the six quadratic integrals together with the
/// identity; equals seven exactly when they are linearly independent over
/// constant scalars.
pub fn integral_independence_rank(ops: &ModelOperators) -> usize {
    let names = ["1", "H", "A1", "A2", "B1", "B2", "F"];
    let basis = FitBasis {
        names: names.iter().map(|s| s.to_string()).collect(),
        exprs: names
            .iter()
            .map(|n| ops.lower_src(n).expect("generator lowers"))
            .collect(),
        max_param_degree: 0,
    };
    span_rank(&basis)
}

/// One edge of the commutation diagram among the six quadratic integrals.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramEdge {
    pub a: String,
    pub b: String,
    /// True when the pair is claimed (and verified) to commute.
    pub commutes: bool,
    /// Whether exact recomputation agrees with the claim.
    pub verified: bool,
}

/// Verifies the published commutation diagram: dashed pairs commute, all
/// other pairs among the six integrals do not.
pub fn commutativity_diagram(ops: &ModelOperators) -> Result<Vec<DiagramEdge>, ExprError> {
    let gens = ["H", "A1", "A2", "B1", "B2", "F"];
    let dashed: &[(&str, &str)] = &[
        ("A1", "B2"),
        ("A1", "A2"),
        ("A2", "B1"),
        ("A1", "H"),
        ("A2", "H"),
        ("B1", "H"),
        ("B2", "H"),
        ("F", "H"),
    ];
    let mut edges = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let claimed_zero = dashed
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a));
            let bracket = ops.expect(a).commutator(ops.expect(b))?;
            edges.push(DiagramEdge {
                a: a.to_string(),
                b: b.to_string(),
                commutes: claimed_zero,
                verified: bracket.is_zero() == claimed_zero,
            });
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_splits_into_one_dimensional_parts() {
        let ops = ModelOperators::build();
        let resid = ops.lower_src("H - A1 - A2 - A3").unwrap();
        assert!(resid.is_zero());
    }

    #[test]
    fn generators_are_formally_self_adjoint() {
        let ops = ModelOperators::build();
        for name in GENERATOR_NAMES {
            if name.starts_with('C') || name.starts_with('D') || name.starts_with('E') {
                continue; // commutators of self-adjoint operators are skew
            }
            let g = ops.expect(name);
            assert_eq!(&g.formal_adjoint(), g, "{name} should be self-adjoint");
        }
    }

    #[test]
    fn bracket_defined_integrals_are_skew_adjoint() {
        let ops = ModelOperators::build();
        for name in ["C1", "C2", "D", "E1", "E2", "E3", "E4"] {
            let g = ops.expect(name);
            assert_eq!(g.formal_adjoint(), g.neg(), "{name} should be skew-adjoint");
        }
    }
}
