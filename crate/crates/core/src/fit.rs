//! Exact linear span-fitting over Q(i).
//!
//! Given a target operator and a basis of operator expressions, finds
//! coefficients (polynomials in c1..c4 up to a degree bound) expressing the
//! target in the span, by Gauss-Jordan elimination on the sparse linear
//! system whose rows are (Weyl monomial, parameter monomial) pairs. All
//! arithmetic is exact; an inconsistent system yields a nonzero residual in
//! the result rather than an error.

use crate::param::{Coefficient, ParamMonomial};
use crate::scalar::GaussianRational;
use crate::weyl::{OperatorExpr, WeylMonomial};
use std::collections::BTreeMap;

/// One fitted expansion: `target = sum_k weights[k] * basis[k] + residual`.
#[derive(Debug, Clone)]
pub struct StructureFit {
    pub basis_names: Vec<String>,
    pub weights: Vec<Coefficient>,
    pub residual: OperatorExpr,
}

impl StructureFit {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    /// Number of basis elements with nonzero weight.
    pub fn support(&self) -> usize {
        self.weights.iter().filter(|w| !w.is_zero()).count()
    }

    /// Renders the fitted combination in parseable text form, e.g.
    /// "(4*c2)*A1 + (16*c1)*B1". Zero weights are omitted.
    pub fn combination_string(&self) -> String {
        let mut parts = Vec::new();
        for (name, w) in self.basis_names.iter().zip(&self.weights) {
            if w.is_zero() {
                continue;
            }
            if name == "1" {
                parts.push(format!("({w})"));
            } else if w.is_one() {
                parts.push(name.clone());
            } else {
                parts.push(format!("({w})*{name}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// A named basis for span fitting.
#[derive(Debug, Clone)]
pub struct FitBasis {
    pub names: Vec<String>,
    pub exprs: Vec<OperatorExpr>,
    /// Max individual exponent in the unknown parameter-polynomial weights
    /// (per parameter, not total degree): cap 1 admits c1*c3, cap 2 admits
    /// c2^2*c4.
    pub max_param_degree: u32,
}

type Row = BTreeMap<usize, GaussianRational>;

/// Sparse exact Gauss-Jordan over Q(i) with deterministic pivoting
/// (first column in order; among candidate rows, fewest nonzeros then
/// lowest index). Unknown columns are ordered (basis element, weight
/// monomial) lexicographically, so free variables default to zero and ties
/// resolve toward earlier basis elements and lower-degree weights.
struct Eliminator {
    rows: Vec<Row>,
    ncols: usize,
    /// pivot_row[c] = row index owning column c's pivot
    pivot_row: Vec<Option<usize>>,
}

impl Eliminator {
    fn reduce(mut rows: Vec<Row>, ncols: usize) -> Self {
        let mut pivot_row = vec![None; ncols];
        let mut used = vec![false; rows.len()];
        for col in 0..ncols {
            let mut best: Option<(usize, usize)> = None; // (nnz, row)
            for (r, row) in rows.iter().enumerate() {
                if used[r] || !row.contains_key(&col) {
                    continue;
                }
                let nnz = row.len();
                if best.is_none_or(|(bn, br)| (nnz, r) < (bn, br)) {
                    best = Some((nnz, r));
                }
            }
            let Some((_, r)) = best else { continue };
            used[r] = true;
            pivot_row[col] = Some(r);
            // normalize pivot to 1
            let inv = rows[r][&col].inv().expect("pivot is nonzero");
            let prow: Row = rows[r]
                .iter()
                .map(|(c, v)| (*c, v * &inv))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            rows[r] = prow.clone();
            // eliminate from every other row
            for (rr, row) in rows.iter_mut().enumerate() {
                if rr == r {
                    continue;
                }
                let Some(f) = row.get(&col).cloned() else {
                    continue;
                };
                for (c, v) in &prow {
                    let delta = &f * v;
                    let entry = row.entry(*c).or_insert_with(GaussianRational::zero);
                    let next = &*entry - &delta;
                    if next.is_zero() {
                        row.remove(c);
                    } else {
                        *entry = next;
                    }
                }
            }
        }
        Eliminator {
            rows,
            ncols,
            pivot_row,
        }
    }

    /// Reads off the candidate solution for one appended target column; free
    /// variables are zero. On an inconsistent system this is only a
    /// projection; callers detect that through the reconstructed residual.
    fn solve_target(&self, target_col: usize) -> Vec<GaussianRational> {
        let mut sol = vec![GaussianRational::zero(); self.ncols];
        for (c, pr) in self.pivot_row.iter().enumerate() {
            if let Some(r) = pr {
                if let Some(v) = self.rows[*r].get(&target_col) {
                    sol[c] = v.clone();
                }
            }
        }
        sol
    }

    fn has_free_columns(&self) -> bool {
        self.pivot_row.iter().any(Option::is_none)
    }
}

struct Assembled {
    rows: Vec<Row>,
    ncols: usize,
    weight_monomials: Vec<ParamMonomial>,
}

/// Builds the sparse system: one unknown per (basis element, weight
/// monomial); one row per (Weyl monomial, parameter monomial) appearing in
/// any basis column or target. Targets occupy columns ncols..ncols+k.
fn assemble(basis: &FitBasis, targets: &[&OperatorExpr]) -> Assembled {
    let weight_monomials = ParamMonomial::all_with_max_exponent(basis.max_param_degree);
    let n_mu = weight_monomials.len();
    let ncols = basis.exprs.len() * n_mu;

    let mut row_index: BTreeMap<(WeylMonomial, ParamMonomial), usize> = BTreeMap::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut row_of = |key: (WeylMonomial, ParamMonomial), rows: &mut Vec<Row>| -> usize {
        *row_index.entry(key).or_insert_with(|| {
            rows.push(Row::new());
            rows.len() - 1
        })
    };

    for (b, expr) in basis.exprs.iter().enumerate() {
        for (w, coeff) in expr.terms() {
            for (mu_b, g) in coeff.iter() {
                for (mi, mu_w) in weight_monomials.iter().enumerate() {
                    // cap irrelevant here: row keys only need a well-defined
                    // exponent sum, which cannot overflow at these degrees
                    let mu = ParamMonomial::from_exps({
                        let mut e = [0u32; 4];
                        for (ek, (b, w)) in e.iter_mut().zip(mu_b.exps().iter().zip(mu_w.exps())) {
                            *ek = b + w;
                        }
                        e
                    });
                    let r = row_of((*w, mu), &mut rows);
                    let col = b * n_mu + mi;
                    let entry = rows[r].entry(col).or_insert_with(GaussianRational::zero);
                    let next = &*entry + g;
                    if next.is_zero() {
                        rows[r].remove(&col);
                    } else {
                        *entry = next;
                    }
                }
            }
        }
    }
    for (t, target) in targets.iter().enumerate() {
        for (w, coeff) in target.terms() {
            for (mu, g) in coeff.iter() {
                let r = row_of((*w, *mu), &mut rows);
                rows[r].insert(ncols + t, g.clone());
            }
        }
    }
    Assembled {
        rows,
        ncols,
        weight_monomials,
    }
}

fn weights_from_solution(
    basis: &FitBasis,
    monomials: &[ParamMonomial],
    sol: &[GaussianRational],
) -> Vec<Coefficient> {
    let n_mu = monomials.len();
    (0..basis.exprs.len())
        .map(|b| {
            let mut c = Coefficient::zero();
            for (mi, mu) in monomials.iter().enumerate() {
                c.add_term(*mu, sol[b * n_mu + mi].clone());
            }
            c
        })
        .collect()
}

fn residual_of(target: &OperatorExpr, basis: &FitBasis, weights: &[Coefficient]) -> OperatorExpr {
    let mut acc = target.clone();
    for (expr, w) in basis.exprs.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        let scaled = expr
            .checked_scale(w)
            .expect("fit weights stay within the parameter degree cap");
        acc = acc.sub(&scaled);
    }
    acc
}

/// Fits several targets against one shared basis with a single elimination.
pub fn fit_span_batch(basis: &FitBasis, targets: &[&OperatorExpr]) -> Vec<StructureFit> {
    let asm = assemble(basis, targets);
    let elim = Eliminator::reduce(asm.rows, asm.ncols);
    let underdetermined = elim.has_free_columns();
    targets
        .iter()
        .enumerate()
        .map(|(t, target)| {
            let sol = elim.solve_target(asm.ncols + t);
            let mut weights = weights_from_solution(basis, &asm.weight_monomials, &sol);
            let mut residual = residual_of(target, basis, &weights);
            if residual.is_zero() && underdetermined {
                minimize_support(basis, target, &mut weights, &mut residual);
            }
            StructureFit {
                basis_names: basis.names.clone(),
                weights,
                residual,
            }
        })
        .collect()
}

/// Fits one target in the span of the basis.
pub fn fit_span(basis: &FitBasis, target: &OperatorExpr) -> StructureFit {
    fit_span_batch(basis, &[target])
        .pop()
        .expect("one fit per target")
}

/// Rank of the basis span: the number of pivot columns after elimination.
/// With `max_param_degree` 0 this is plain linear independence over
/// constant scalars.
pub fn span_rank(basis: &FitBasis) -> usize {
    let asm = assemble(basis, &[]);
    let elim = Eliminator::reduce(asm.rows, asm.ncols);
    elim.pivot_row.iter().flatten().count()
}

/// Greedy support reduction: try dropping basis elements from the back; keep
/// a drop when the remaining span still fits exactly. Deterministic, and a
/// no-op for full-rank systems (their solution is unique).
fn minimize_support(
    basis: &FitBasis,
    target: &OperatorExpr,
    weights: &mut [Coefficient],
    residual: &mut OperatorExpr,
) {
    let mut active: Vec<usize> = (0..basis.exprs.len())
        .filter(|&b| !weights[b].is_zero())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for drop_pos in (0..active.len()).rev() {
            let mut trial: Vec<usize> = active.clone();
            trial.remove(drop_pos);
            let sub_basis = FitBasis {
                names: trial.iter().map(|&b| basis.names[b].clone()).collect(),
                exprs: trial.iter().map(|&b| basis.exprs[b].clone()).collect(),
                max_param_degree: basis.max_param_degree,
            };
            let asm = assemble(&sub_basis, &[target]);
            let elim = Eliminator::reduce(asm.rows, asm.ncols);
            let sol = elim.solve_target(asm.ncols);
            let sub_weights = weights_from_solution(&sub_basis, &asm.weight_monomials, &sol);
            if residual_of(target, &sub_basis, &sub_weights).is_zero() {
                for w in weights.iter_mut() {
                    *w = Coefficient::zero();
                }
                for (k, &b) in trial.iter().enumerate() {
                    weights[b] = sub_weights[k].clone();
                }
                active = trial;
                changed = true;
                break;
            }
        }
    }
    *residual = residual_of(target, basis, weights);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_and_lower;

    fn basis_of(names_srcs: &[(&str, &str)], deg: u32) -> FitBasis {
        FitBasis {
            names: names_srcs.iter().map(|(n, _)| n.to_string()).collect(),
            exprs: names_srcs
                .iter()
                .map(|(_, s)| parse_and_lower(s).unwrap())
                .collect(),
            max_param_degree: deg,
        }
    }

    #[test]
    fn exact_fit_with_param_weights() {
        // target = 4*c2*X + 16*c1*P over basis {X, P}
        let basis = basis_of(&[("X", "x1^2"), ("P", "p1^2")], 1);
        let target = parse_and_lower("4*c2*x1^2 + 16*c1*p1^2").unwrap();
        let fit = fit_span(&basis, &target);
        assert!(fit.is_exact());
        assert_eq!(fit.weights[0].to_string(), "4*c2");
        assert_eq!(fit.weights[1].to_string(), "16*c1");
        assert_eq!(fit.combination_string(), "(4*c2)*X + (16*c1)*P");
    }

    #[test]
    fn inconsistent_fit_reports_residual() {
        let basis = basis_of(&[("X", "x1^2")], 1);
        let target = parse_and_lower("x1^2 + p2").unwrap();
        let fit = fit_span(&basis, &target);
        assert!(!fit.is_exact());
        assert_eq!(fit.residual, parse_and_lower("p2").unwrap());
    }

    #[test]
    fn underdetermined_prefers_small_support() {
        // x1 lies in span{x1, x1 + x2, x2}; minimal answer uses x1 alone.
        let basis = basis_of(&[("a", "x1"), ("b", "x1 + x2"), ("c", "x2")], 0);
        let target = parse_and_lower("x1").unwrap();
        let fit = fit_span(&basis, &target);
        assert!(fit.is_exact());
        assert_eq!(fit.support(), 1);
        assert!(fit.weights[0].is_one());
    }

    #[test]
    fn batch_shares_elimination() {
        let basis = basis_of(&[("X", "x1"), ("P", "p1")], 1);
        let t1 = parse_and_lower("c1*x1").unwrap();
        let t2 = parse_and_lower("p1 - x1").unwrap();
        let fits = fit_span_batch(&basis, &[&t1, &t2]);
        assert!(fits[0].is_exact() && fits[1].is_exact());
        assert_eq!(fits[0].weights[0].to_string(), "c1");
        assert_eq!(fits[1].weights[1].to_string(), "1");
    }
}
