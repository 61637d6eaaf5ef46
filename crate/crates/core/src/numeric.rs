//! Finite-difference cross-checks for the separated one-dimensional
//! eigenproblems, and the energy-formula equivalence audit.
//!
//! Cartesian separation gives a shifted oscillator on the first axis and
//! singular oscillators on the other two; cylindrical separation gives the
//! same shifted oscillator along the axis, a singular angular well on
//! (0, pi/2), and a radial equation that substitution G = rho^(-1/2) g turns
//! into another singular oscillator with barrier strength A - 1/4.
//!
//! All solvers use the symmetric three-point stencil with Dirichlet walls
//! and Sturm-sequence bisection, so eigenvalues come out sorted and none are
//! missed. Error estimates are Richardson differences against the half-size
//! grid.

use crate::error::DomainError;
use crate::qalg::{round_sig12, ModelParamsNumeric, Scalar};
use serde::Serialize;
use std::collections::BTreeMap;

/// Lower bound on usable grids; below this the stencil error is not in the
/// asymptotic regime and Richardson estimates mislead.
pub const MIN_GRID: usize = 64;

/// One-dimensional potentials appearing in the separated equations.
#[derive(Debug, Clone, Copy)]
pub enum PotentialKind {
    /// V(x) = 4 c1 x^2 + c2 x on the whole line.
    ShiftedOscillator { c1: f64, c2: f64 },
    /// V(x) = omega2 x^2 + alpha / x^2 on the half line, Dirichlet at 0.
    /// alpha = 0 keeps the wall, selecting the odd sector.
    SingularOscillator { omega2: f64, alpha: f64 },
    /// V(t) = c_a / sin^2 t + c_b / cos^2 t on (0, pi/2).
    TrigonometricWell { c_a: f64, c_b: f64 },
}

impl PotentialKind {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PotentialKind::ShiftedOscillator { c1, c2 } => 4.0 * c1 * x * x + c2 * x,
            PotentialKind::SingularOscillator { omega2, alpha } => omega2 * x * x + alpha / (x * x),
            PotentialKind::TrigonometricWell { c_a, c_b } => {
                let (s, c) = x.sin_cos();
                c_a / (s * s) + c_b / (c * c)
            }
        }
    }

    /// Exact eigenvalue of level k, where available:
    /// shifted oscillator  2 sqrt(c1) (2k+1) - c2^2/(16 c1),
    /// singular oscillator sqrt(omega2) (4k + 2 + sqrt(1 + 4 alpha)),
    /// trigonometric well  (2k + g_a + g_b + 1)^2 with g = sqrt(1+4c)/2.
    pub fn closed_form(&self, k: u32) -> Option<f64> {
        let kf = f64::from(k);
        match *self {
            PotentialKind::ShiftedOscillator { c1, c2 } => {
                (c1 > 0.0).then(|| 2.0 * c1.sqrt() * (2.0 * kf + 1.0) - c2 * c2 / (16.0 * c1))
            }
            PotentialKind::SingularOscillator { omega2, alpha } => (omega2 > 0.0
                && 1.0 + 4.0 * alpha >= 0.0)
                .then(|| omega2.sqrt() * (4.0 * kf + 2.0 + (1.0 + 4.0 * alpha).sqrt())),
            PotentialKind::TrigonometricWell { c_a, c_b } => {
                if 1.0 + 4.0 * c_a < 0.0 || 1.0 + 4.0 * c_b < 0.0 {
                    return None;
                }
                let ga = 0.5 * (1.0 + 4.0 * c_a).sqrt();
                let gb = 0.5 * (1.0 + 4.0 * c_b).sqrt();
                Some((2.0 * kf + ga + gb + 1.0) * (2.0 * kf + ga + gb + 1.0))
            }
        }
    }

    /// Domain wide enough that the first `levels` eigenfunctions are
    /// negligible at the walls.
    pub fn default_domain(&self, levels: u32) -> (f64, f64) {
        let top = levels.saturating_sub(1);
        match *self {
            PotentialKind::ShiftedOscillator { c1, c2 } => {
                let center = -c2 / (8.0 * c1);
                let lam = self.closed_form(top).unwrap_or(0.0) + c2 * c2 / (16.0 * c1);
                let w = ((lam + 60.0) / (4.0 * c1)).sqrt();
                (center - w, center + w)
            }
            PotentialKind::SingularOscillator { omega2, .. } => {
                let lam = self.closed_form(top).unwrap_or(4.0 * f64::from(top) + 3.0);
                (0.0, ((lam + 60.0) / omega2).sqrt())
            }
            PotentialKind::TrigonometricWell { .. } => (0.0, std::f64::consts::FRAC_PI_2),
        }
    }
}

/// Symmetric tridiagonal matrix with Sturm-sequence eigenvalue extraction.
pub struct SturmTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    /// Pivot floor: small enough not to perturb counts, large enough that
    /// off_sq / pivmin cannot overflow.
    pivmin: f64,
}

impl SturmTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let emax = off_sq.iter().cloned().fold(1.0_f64, f64::max);
        let pivmin = emax * (f64::MIN_POSITIVE / f64::EPSILON);
        SturmTridiagonal {
            diag,
            off,
            off_sq,
            pivmin,
        }
    }

    /// Number of eigenvalues below sigma, from the signs of the LDL^T
    /// pivots of T - sigma I. A pivot hitting zero (sigma exactly on a
    /// Ritz value) is floored to -pivmin so it counts as crossed.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            q = if i == 0 {
                self.diag[0] - sigma
            } else {
                (self.diag[i] - sigma) - self.off_sq[i - 1] / q
            };
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The idx-th eigenvalue (ascending, 0-based) by bisection.
    pub fn eigenvalue(&self, idx: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // interval at floating-point resolution
            }
            if self.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest(&self, k: usize) -> Vec<f64> {
        (0..k).map(|i| self.eigenvalue(i)).collect()
    }
}

/// A discretized eigenproblem: -g'' + V g = lambda g with Dirichlet walls.
#[derive(Debug, Clone)]
pub struct NumericProblem {
    pub potential: PotentialKind,
    pub domain: (f64, f64),
    pub grid_points: usize,
}

impl NumericProblem {
    pub fn with_default_domain(potential: PotentialKind, levels: u32, grid_points: usize) -> Self {
        NumericProblem {
            potential,
            domain: potential.default_domain(levels),
            grid_points,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    /// Richardson differences against the half-size grid, one per level.
    pub error_estimates: Vec<f64>,
    pub grid_used: usize,
}

fn assemble(problem: &NumericProblem, n: usize) -> SturmTridiagonal {
    let (lo, hi) = problem.domain;
    let h = (hi - lo) / (n as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let diag = (1..=n)
        .map(|i| 2.0 * inv_h2 + problem.potential.eval(lo + h * i as f64))
        .collect();
    let off = vec![-inv_h2; n - 1];
    SturmTridiagonal::new(diag, off)
}

/// Lowest k eigenvalues on the problem's grid, with error estimates from the
/// half-size grid.
pub fn fd_eigensolve(problem: &NumericProblem, k: usize) -> Result<EigResult, DomainError> {
    let n = problem.grid_points;
    if n < MIN_GRID {
        return Err(DomainError::InvalidParams(format!(
            "grid must have at least {MIN_GRID} points, got {n}"
        )));
    }
    if k == 0 || k > n / 4 {
        return Err(DomainError::InvalidParams(format!(
            "requested {k} levels; need 1 <= levels <= grid/4 = {}",
            n / 4
        )));
    }
    let (lo, hi) = problem.domain;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(DomainError::NonFinite(format!("bad domain ({lo}, {hi})")));
    }
    let fine = assemble(problem, n).lowest(k);
    let coarse = assemble(problem, n / 2).lowest(k);
    let errors = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (f - c).abs())
        .collect();
    Ok(EigResult {
        eigenvalues: fine,
        error_estimates: errors,
        grid_used: n,
    })
}

// ---------------------------------------------------------------------------
// separated model equations

/// Angular separation constant A(n) = (2n + g3 + g4 + 1)^2 with g = m/2;
/// exact whenever the m's are rational.
pub fn angular_constant(params: &ModelParamsNumeric, n: u32) -> Scalar {
    let s = Scalar::integer(2 * i64::from(n) + 1)
        .add(&params.m3().scale(1, 2))
        .add(&params.m4().scale(1, 2));
    s.mul(&s)
}

/// How the one-dimensional factors are solved.
#[derive(Debug, Clone, Copy)]
pub enum Method {
    Analytic,
    FiniteDifference { grid_points: usize },
}

/// One grouped energy level of a separated spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct NumericLevel {
    #[serde(rename = "E")]
    pub e: f64,
    pub tuples: Vec<[u32; 3]>,
    pub multiplicity: usize,
    /// Largest accumulated Richardson estimate among the tuples; zero for
    /// analytic evaluation.
    pub error: f64,
}

struct Axis {
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn axis_closed_form(pot: PotentialKind, levels: u32) -> Result<Axis, DomainError> {
    let values = (0..levels)
        .map(|k| {
            pot.closed_form(k)
                .ok_or_else(|| DomainError::Unsupported("no closed form for potential".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Axis {
        errors: vec![0.0; values.len()],
        values,
    })
}

fn axis_fd(pot: PotentialKind, levels: u32, grid: usize) -> Result<Axis, DomainError> {
    let problem = NumericProblem::with_default_domain(pot, levels, grid);
    let r = fd_eigensolve(&problem, levels as usize)?;
    Ok(Axis {
        values: r.eigenvalues,
        errors: r.error_estimates,
    })
}

fn axis(pot: PotentialKind, levels: u32, method: Method) -> Result<Axis, DomainError> {
    match method {
        Method::Analytic => axis_closed_form(pot, levels),
        Method::FiniteDifference { grid_points } => axis_fd(pot, levels, grid_points),
    }
}

fn group_levels(sums: impl Iterator<Item = ([u32; 3], f64, f64)>) -> Vec<NumericLevel> {
    // group by total quantum number; every separated form of this model is
    // degenerate exactly along that total
    let mut by_n: BTreeMap<u32, (Vec<[u32; 3]>, f64, f64)> = BTreeMap::new();
    for (tuple, e, err) in sums {
        let n = tuple.iter().sum();
        let entry = by_n.entry(n).or_insert_with(|| (Vec::new(), 0.0, 0.0));
        entry.0.push(tuple);
        entry.1 += e;
        entry.2 = entry.2.max(err);
    }
    by_n.into_values()
        .map(|(tuples, total, err)| NumericLevel {
            e: round_sig12(total / tuples.len() as f64),
            multiplicity: tuples.len(),
            tuples,
            error: err,
        })
        .collect()
}

/// Cartesian-separated spectrum up to total quantum number nmax:
/// E = l1(j) + l2(k) + l3(l) over j + k + l <= nmax.
pub fn cartesian_spectrum(
    params: &ModelParamsNumeric,
    nmax: u32,
    method: Method,
) -> Result<Vec<NumericLevel>, DomainError> {
    let [c1, c2, c3, c4] = params.c_f64();
    let levels = nmax + 1;
    let a1 = axis(PotentialKind::ShiftedOscillator { c1, c2 }, levels, method)?;
    let a2 = axis(
        PotentialKind::SingularOscillator {
            omega2: c1,
            alpha: c3,
        },
        levels,
        method,
    )?;
    let a3 = axis(
        PotentialKind::SingularOscillator {
            omega2: c1,
            alpha: c4,
        },
        levels,
        method,
    )?;
    let mut sums = Vec::new();
    for j in 0..=nmax {
        for k in 0..=(nmax - j) {
            for l in 0..=(nmax - j - k) {
                sums.push((
                    [j, k, l],
                    a1.values[j as usize] + a2.values[k as usize] + a3.values[l as usize],
                    a1.errors[j as usize] + a2.errors[k as usize] + a3.errors[l as usize],
                ));
            }
        }
    }
    Ok(group_levels(sums.into_iter()))
}

/// Cylindrical-separated spectrum up to total quantum number nmax:
/// E = lz(j) + lrho(k; A(n)) over j + k + n <= nmax. The angular constant
/// enters the radial equation as barrier strength A - 1/4 after the
/// half-power substitution.
pub fn cylindrical_spectrum(
    params: &ModelParamsNumeric,
    nmax: u32,
    method: Method,
) -> Result<Vec<NumericLevel>, DomainError> {
    let [c1, c2, _, _] = params.c_f64();
    let levels = nmax + 1;
    let az = axis(PotentialKind::ShiftedOscillator { c1, c2 }, levels, method)?;
    let mut radial: Vec<Axis> = Vec::with_capacity(levels as usize);
    for n in 0..levels {
        let a = angular_constant(params, n).to_f64();
        let pot = PotentialKind::SingularOscillator {
            omega2: c1,
            alpha: a - 0.25,
        };
        radial.push(match method {
            Method::Analytic => {
                // lrho = m1 (4k + 2 + 2 sqrt(A)), the alpha = A - 1/4 closed form
                let m1 = c1.sqrt();
                Axis {
                    values: (0..levels)
                        .map(|k| m1 * (4.0 * f64::from(k) + 2.0 + 2.0 * a.sqrt()))
                        .collect(),
                    errors: vec![0.0; levels as usize],
                }
            }
            Method::FiniteDifference { grid_points } => axis_fd(pot, levels, grid_points)?,
        });
    }
    let mut sums = Vec::new();
    for j in 0..=nmax {
        for k in 0..=(nmax - j) {
            for n in 0..=(nmax - j - k) {
                sums.push((
                    [j, k, n],
                    az.values[j as usize] + radial[n as usize].values[k as usize],
                    az.errors[j as usize] + radial[n as usize].errors[k as usize],
                ));
            }
        }
    }
    Ok(group_levels(sums.into_iter()))
}

// ---------------------------------------------------------------------------
// closed-form cross-check

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub equation: String,
    pub level: u32,
    pub finite_difference: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    pub richardson_estimate: f64,
}

/// Solves every separated one-dimensional equation of the model both ways
/// and tabulates the agreement.
pub fn compare_closed_forms(
    params: &ModelParamsNumeric,
    levels: u32,
    grid: usize,
) -> Result<Vec<CompareRow>, DomainError> {
    let [c1, c2, c3, c4] = params.c_f64();
    let a0 = angular_constant(params, 0).to_f64();
    let cases: Vec<(String, PotentialKind)> = vec![
        (
            "axis-1 shifted oscillator".into(),
            PotentialKind::ShiftedOscillator { c1, c2 },
        ),
        (
            "axis-2 singular oscillator".into(),
            PotentialKind::SingularOscillator {
                omega2: c1,
                alpha: c3,
            },
        ),
        (
            "axis-3 singular oscillator".into(),
            PotentialKind::SingularOscillator {
                omega2: c1,
                alpha: c4,
            },
        ),
        (
            "angular trigonometric well".into(),
            PotentialKind::TrigonometricWell { c_a: c3, c_b: c4 },
        ),
        (
            "radial equation at n=0".into(),
            PotentialKind::SingularOscillator {
                omega2: c1,
                alpha: a0 - 0.25,
            },
        ),
    ];
    let mut rows = Vec::new();
    for (name, pot) in cases {
        let problem = NumericProblem::with_default_domain(pot, levels, grid);
        let r = fd_eigensolve(&problem, levels as usize)?;
        for k in 0..levels {
            let exact = pot
                .closed_form(k)
                .ok_or_else(|| DomainError::Unsupported("no closed form".into()))?;
            let fd = r.eigenvalues[k as usize];
            rows.push(CompareRow {
                equation: name.clone(),
                level: k,
                finite_difference: round_sig12(fd),
                closed_form: round_sig12(exact),
                abs_error: round_sig12((fd - exact).abs()),
                richardson_estimate: round_sig12(r.error_estimates[k as usize]),
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// energy-formula equivalence

/// The cylindrical composite energy written through the separation route:
/// E = 2m1(2 tau + 1) + m1(4(n-a) + 2) + m1m3 + m1m4 - shift, taken at
/// 2 tau and 2(n-a) integral (the formula itself is affine, so half-integer
/// labels evaluate fine).
fn cylindrical_route(params: &ModelParamsNumeric, two_tau: i64, two_nma: i64) -> Scalar {
    Scalar::integer(2 * two_tau + 2 * two_nma + 4)
        .mul(&params.m1())
        .add(&params.m1m3())
        .add(&params.m1m4())
        .sub(&Scalar::Exact(params.shift()))
}

/// The paraboloidal composite energy:
/// E = 4(mu + 1)m1 + 2(2 eta + g3 + g4 + 1)m1 - shift.
fn paraboloidal_route(params: &ModelParamsNumeric, two_mu: i64, two_eta: i64) -> Scalar {
    Scalar::integer(2 * two_mu + 2 * two_eta + 6)
        .mul(&params.m1())
        .add(&params.m1m3())
        .add(&params.m1m4())
        .sub(&Scalar::Exact(params.shift()))
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub schema: u32,
    pub points_checked: usize,
    pub tuples_checked: usize,
    /// Algebraic energy == cylindrical route under 2 tau = p1 + p2 + 1,
    /// 2(n - a) = n1 + n2, at every point and tuple.
    pub cylindrical_exact: bool,
    /// Paraboloidal route under the stated identification
    /// 2 mu = p1 + p2 + 1, 2 eta = n1 + n2.
    pub paraboloidal_stated_exact: bool,
    /// When the stated identification misses, the uniform difference
    /// (route minus algebraic) in units of m1, if it is uniform.
    pub paraboloidal_offset: Option<String>,
    /// Exactness after the corrected identification 2 mu = p1 + p2.
    pub paraboloidal_corrected_exact: bool,
    /// tau and n - a are integers exactly when p1 + p2 is odd.
    pub cylindrical_parity_consistent: bool,
    /// mu and eta (corrected) are integers exactly when p1 + p2 is even.
    pub paraboloidal_parity_consistent: bool,
}

/// Parameter points with every derived root rational, so all three routes
/// evaluate exactly.
pub fn default_equivalence_points() -> Vec<[num::BigRational; 4]> {
    let q = |n: i64, d: i64| num::BigRational::new(n.into(), d.into());
    // (c1, c2, c3 num/den, c4 num/den)
    type PointRow = (i64, i64, (i64, i64), (i64, i64));
    let pts: [PointRow; 20] = [
        (1, 0, (3, 4), (3, 4)),
        (1, 4, (3, 4), (3, 4)),
        (4, 0, (0, 1), (0, 1)),
        (1, 0, (0, 1), (0, 1)),
        (1, 1, (0, 1), (3, 4)),
        (1, -2, (2, 1), (3, 4)),
        (1, 3, (2, 1), (2, 1)),
        (4, 4, (3, 4), (2, 1)),
        (4, -4, (15, 4), (0, 1)),
        (4, 8, (6, 1), (3, 4)),
        (9, 0, (3, 4), (15, 4)),
        (9, 6, (2, 1), (6, 1)),
        (9, -3, (0, 1), (2, 1)),
        (1, 0, (3, 4), (0, 1)),
        (1, 1, (2, 1), (15, 4)),
        (1, -1, (6, 1), (6, 1)),
        (1, 2, (15, 4), (3, 4)),
        (4, 1, (6, 1), (15, 4)),
        (9, -1, (15, 4), (15, 4)),
        (4, 2, (0, 1), (6, 1)),
    ];
    pts.iter()
        .map(|&(c1, c2, c3, c4)| [q(c1, 1), q(c2, 1), q(c3.0, c3.1), q(c4.0, c4.1)])
        .collect()
}

/// Quantum-number tuples obeying p1 - p2 = n1 - n2 and n_i <= p_i.
pub fn default_equivalence_tuples() -> Vec<[u32; 4]> {
    vec![
        [0, 0, 0, 0],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 1, 0, 0],
        [1, 1, 1, 1],
        [2, 0, 2, 0],
        [2, 1, 1, 0],
        [1, 2, 0, 1],
        [2, 2, 0, 0],
        [2, 2, 2, 2],
    ]
}

/// Checks the algebraic, cylindrical, and paraboloidal energy formulas
/// against each other over exact rational points. The cylindrical
/// identification matches outright; the stated paraboloidal one is off by a
/// uniform 2*m1, and shifting it by one unit of mu repairs it. Integrality
/// of the separation labels splits by the parity of p1 + p2: odd totals are
/// the cylindrical sector, even totals the paraboloidal one.
pub fn formula_equivalence(
    points: &[[num::BigRational; 4]],
    tuples: &[[u32; 4]],
) -> Result<EquivalenceReport, DomainError> {
    let mut cylindrical_exact = true;
    let mut stated_exact = true;
    let mut corrected_exact = true;
    let mut offsets_uniform = true;
    let mut offset: Option<Scalar> = None; // in units of m1
    let mut cyl_parity = true;
    let mut par_parity = true;

    for point in points {
        let params = ModelParamsNumeric::new(point.clone())?;
        for t in tuples {
            let [p1, p2, n1, n2] = *t;
            if n1 > p1 || n2 > p2 || i64::from(p1) - i64::from(p2) != i64::from(n1) - i64::from(n2)
            {
                return Err(DomainError::InvalidParams(format!(
                    "tuple {t:?} violates the admissibility constraints"
                )));
            }
            let e_alg = crate::qalg::energy_mean(&params, p1, p2, n1, n2);
            let pp = i64::from(p1) + i64::from(p2);
            let nn = i64::from(n1) + i64::from(n2);

            let e_cyl = cylindrical_route(&params, pp + 1, nn);
            if !e_cyl.eq_scalar(&e_alg) {
                cylindrical_exact = false;
            }

            let e_par_stated = paraboloidal_route(&params, pp + 1, nn);
            if !e_par_stated.eq_scalar(&e_alg) {
                stated_exact = false;
                let diff = e_par_stated.sub(&e_alg).div(&params.m1());
                match &offset {
                    None => offset = Some(diff),
                    Some(prev) => {
                        if !prev.eq_scalar(&diff) {
                            offsets_uniform = false;
                        }
                    }
                }
            }

            let e_par_corrected = paraboloidal_route(&params, pp, nn);
            if !e_par_corrected.eq_scalar(&e_alg) {
                corrected_exact = false;
            }

            // parity bookkeeping: labels are integral iff their doubles are even
            let cyl_integral = (pp + 1) % 2 == 0 && nn % 2 == 1;
            if cyl_integral != (pp % 2 == 1) {
                cyl_parity = false;
            }
            let par_integral = pp % 2 == 0 && nn % 2 == 0;
            if par_integral != (pp % 2 == 0) {
                par_parity = false;
            }
        }
    }

    let offset_str = match (&offset, offsets_uniform) {
        (Some(v), true) => Some(format!("({v})*m1")),
        (Some(_), false) => Some("nonuniform".to_string()),
        (None, _) => None,
    };
    Ok(EquivalenceReport {
        schema: 1,
        points_checked: points.len(),
        tuples_checked: tuples.len(),
        cylindrical_exact,
        paraboloidal_stated_exact: stated_exact,
        paraboloidal_offset: offset_str,
        paraboloidal_corrected_exact: corrected_exact,
        cylindrical_parity_consistent: cyl_parity,
        paraboloidal_parity_consistent: par_parity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn params(c1: i64, c2: i64, c3: (i64, i64), c4: (i64, i64)) -> ModelParamsNumeric {
        ModelParamsNumeric::new([
            BigRational::from_integer(c1.into()),
            BigRational::from_integer(c2.into()),
            BigRational::new(c3.0.into(), c3.1.into()),
            BigRational::new(c4.0.into(), c4.1.into()),
        ])
        .unwrap()
    }

    #[test]
    fn sturm_counts_box_modes() {
        // -u'' on (0, pi): eigenvalues k^2
        let n = 2000;
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        let t = SturmTridiagonal::new(vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1]);
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(5.0), 2);
        for (k, expect) in [1.0, 4.0, 9.0].iter().enumerate() {
            assert!((t.eigenvalue(k) - expect).abs() < 1e-3);
        }
    }

    #[test]
    fn shifted_oscillator_levels() {
        let pot = PotentialKind::ShiftedOscillator { c1: 1.0, c2: 4.0 };
        // 2(2k+1) - 1
        assert_eq!(pot.closed_form(0), Some(1.0));
        assert_eq!(pot.closed_form(2), Some(9.0));
        let problem = NumericProblem::with_default_domain(pot, 3, 2000);
        let r = fd_eigensolve(&problem, 3).unwrap();
        for (k, expect) in [1.0, 5.0, 9.0].iter().enumerate() {
            assert!(
                (r.eigenvalues[k] - expect).abs() < 5e-3,
                "level {k}: {} vs {expect}",
                r.eigenvalues[k]
            );
        }
    }

    #[test]
    fn singular_oscillator_levels() {
        // alpha = 3/4: sqrt(1+3) = 2: lambda = 4k + 4
        let pot = PotentialKind::SingularOscillator {
            omega2: 1.0,
            alpha: 0.75,
        };
        assert_eq!(pot.closed_form(0), Some(4.0));
        let problem = NumericProblem::with_default_domain(pot, 3, 3000);
        let r = fd_eigensolve(&problem, 3).unwrap();
        for (k, expect) in [4.0, 8.0, 12.0].iter().enumerate() {
            assert!((r.eigenvalues[k] - expect).abs() < 5e-3);
        }
    }

    #[test]
    fn vanishing_barrier_keeps_the_wall() {
        // alpha = 0 with Dirichlet at 0: odd sector, lambda = 4k + 3
        let pot = PotentialKind::SingularOscillator {
            omega2: 1.0,
            alpha: 0.0,
        };
        assert_eq!(pot.closed_form(1), Some(7.0));
        let problem = NumericProblem::with_default_domain(pot, 3, 2000);
        let r = fd_eigensolve(&problem, 3).unwrap();
        for (k, expect) in [3.0, 7.0, 11.0].iter().enumerate() {
            assert!((r.eigenvalues[k] - expect).abs() < 5e-3);
        }
    }

    #[test]
    fn trigonometric_well_levels() {
        // c = 0 on both walls: plain box on (0, pi/2): 4(k+1)^2
        let free = PotentialKind::TrigonometricWell { c_a: 0.0, c_b: 0.0 };
        assert_eq!(free.closed_form(0), Some(4.0));
        assert_eq!(free.closed_form(2), Some(36.0));
        // c = 3/4 on both: (2k+3)^2
        let pot = PotentialKind::TrigonometricWell {
            c_a: 0.75,
            c_b: 0.75,
        };
        let problem = NumericProblem::with_default_domain(pot, 3, 3000);
        let r = fd_eigensolve(&problem, 3).unwrap();
        for (k, expect) in [9.0, 25.0, 49.0].iter().enumerate() {
            assert!((r.eigenvalues[k] - expect).abs() < 5e-3);
        }
    }

    #[test]
    fn radial_reduction_matches_angular_constant() {
        // params (1,0,3/4,3/4): A(0) = 9, radial levels 4k + 8
        let p = params(1, 0, (3, 4), (3, 4));
        let a0 = angular_constant(&p, 0);
        assert_eq!(a0.to_string(), "9");
        let pot = PotentialKind::SingularOscillator {
            omega2: 1.0,
            alpha: 8.75,
        };
        assert_eq!(pot.closed_form(0), Some(8.0));
        let problem = NumericProblem::with_default_domain(pot, 2, 3000);
        let r = fd_eigensolve(&problem, 2).unwrap();
        assert!((r.eigenvalues[0] - 8.0).abs() < 5e-3);
        assert!((r.eigenvalues[1] - 12.0).abs() < 5e-3);
    }

    #[test]
    fn solver_rejects_bad_requests() {
        let pot = PotentialKind::ShiftedOscillator { c1: 1.0, c2: 0.0 };
        let small = NumericProblem::with_default_domain(pot, 1, 32);
        assert!(fd_eigensolve(&small, 1).is_err());
        let ok = NumericProblem::with_default_domain(pot, 1, 128);
        assert!(fd_eigensolve(&ok, 64).is_err());
        assert!(fd_eigensolve(&ok, 0).is_err());
    }

    #[test]
    fn convergence_is_second_order() {
        let pot = PotentialKind::ShiftedOscillator { c1: 1.0, c2: 0.0 };
        let exact = 2.0;
        let err_at = |n: usize| {
            let problem = NumericProblem::with_default_domain(pot, 1, n);
            (fd_eigensolve(&problem, 1).unwrap().eigenvalues[0] - exact).abs()
        };
        let ratio = err_at(500) / err_at(1000);
        assert!(
            (2.5..6.0).contains(&ratio),
            "halving h should quarter the error, ratio {ratio}"
        );
    }

    #[test]
    fn cartesian_spectrum_reference() {
        let p = params(1, 0, (3, 4), (3, 4));
        let levels = cartesian_spectrum(&p, 3, Method::Analytic).unwrap();
        assert_eq!(levels.len(), 4);
        let expect_e = [10.0, 14.0, 18.0, 22.0];
        let expect_mult = [1, 3, 6, 10];
        for (i, l) in levels.iter().enumerate() {
            assert!((l.e - expect_e[i]).abs() < 1e-12);
            assert_eq!(l.multiplicity, expect_mult[i]);
        }
        // ground splits as 2 + 3 + 3 when the barriers vanish
        let p = params(1, 0, (0, 1), (0, 1));
        let levels = cartesian_spectrum(&p, 0, Method::Analytic).unwrap();
        assert!((levels[0].e - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cylindrical_matches_cartesian() {
        let p = params(1, 4, (3, 4), (2, 1));
        let cart = cartesian_spectrum(&p, 3, Method::Analytic).unwrap();
        let cyl = cylindrical_spectrum(&p, 3, Method::Analytic).unwrap();
        assert_eq!(cart.len(), cyl.len());
        for (a, b) in cart.iter().zip(&cyl) {
            assert!((a.e - b.e).abs() < 1e-9, "{} vs {}", a.e, b.e);
            assert_eq!(a.multiplicity, b.multiplicity);
        }
    }

    #[test]
    fn cylindrical_fd_agrees_with_analytic() {
        let p = params(1, 0, (3, 4), (3, 4));
        let exact = cylindrical_spectrum(&p, 2, Method::Analytic).unwrap();
        let fd =
            cylindrical_spectrum(&p, 2, Method::FiniteDifference { grid_points: 2000 }).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a.e - b.e).abs() < 2e-2, "{} vs {}", a.e, b.e);
            assert!(b.error > 0.0);
        }
    }

    #[test]
    fn equivalence_report_reference() {
        let r = formula_equivalence(&default_equivalence_points(), &default_equivalence_tuples())
            .unwrap();
        assert!(r.cylindrical_exact);
        assert!(!r.paraboloidal_stated_exact);
        assert_eq!(r.paraboloidal_offset.as_deref(), Some("(2)*m1"));
        assert!(r.paraboloidal_corrected_exact);
        assert!(r.cylindrical_parity_consistent);
        assert!(r.paraboloidal_parity_consistent);
    }

    #[test]
    fn compare_rows_cover_all_equations() {
        let p = params(1, 0, (3, 4), (3, 4));
        let rows = compare_closed_forms(&p, 2, 1200).unwrap();
        assert_eq!(rows.len(), 10);
        for row in &rows {
            assert!(
                row.abs_error < 5e-2,
                "{} level {}: fd {} vs exact {}",
                row.equation,
                row.level,
                row.finite_difference,
                row.closed_form
            );
        }
    }
}
