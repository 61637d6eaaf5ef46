//! superalg: exact audits and spectra for the four-parameter superintegrable
//! model.
//!
//! Exit codes: 0 when every audited claim holds, 1 when the emitted report
//! documents discrepancies against the published forms (the report is still
//! the successful output), 2 for usage or configuration errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use superalg_core::model::{self, ModelOperators, Verdict};
use superalg_core::numeric::{self, Method};
use superalg_core::param::rational_from_str;
use superalg_core::qalg::{self, ModelParamsNumeric, Scalar, Subalgebra};
use superalg_core::set_param_degree_cap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Separation {
    Cartesian,
    Cylindrical,
}

#[derive(Parser)]
#[command(
    name = "superalg",
    version,
    about = "Exact operator audits and spectra for a 3D four-parameter superintegrable model",
    after_help = "Exit codes: 0 all checks pass; 1 audited mismatches present (report emitted); 2 usage error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Model parameter c1 (rational like 1, 3/4, or 0.75).
    #[arg(long, global = true, default_value = "1")]
    c1: String,

    /// Model parameter c2.
    #[arg(long, global = true, default_value = "0")]
    c2: String,

    /// Model parameter c3.
    #[arg(long, global = true, default_value = "3/4")]
    c3: String,

    /// Model parameter c4.
    #[arg(long, global = true, default_value = "3/4")]
    c4: String,

    /// Read the parameters in double precision instead of exactly.
    #[arg(long, global = true)]
    float: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the eight vanishing commutators among the quadratic integrals.
    VerifyZero,
    /// Audit all 27 published symmetry-algebra relations against exact
    /// recomputation, with independent span fits.
    AuditAlgebra,
    /// Audit both Casimir operators, their commutation, and central forms.
    Casimir,
    /// Exact algebraic spectrum from the deformed-oscillator realization.
    SpectrumAlgebraic {
        /// Largest total quantum number.
        #[arg(long, default_value_t = 5)]
        nmax: u32,
    },
    /// Spectrum from separated 1D equations, finite-difference or analytic.
    SpectrumNumeric {
        /// Coordinate separation to use.
        #[arg(long, value_enum)]
        method: Separation,
        /// Largest total quantum number.
        #[arg(long, default_value_t = 5)]
        nmax: u32,
        /// Interior grid points for the finite-difference solver.
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        /// Use the closed-form level formulas instead of finite differences.
        #[arg(long)]
        analytic: bool,
        /// Emit a grid-refinement study of the ground level instead of the
        /// spectrum.
        #[arg(long)]
        convergence: bool,
        /// Comma-separated grid sizes for --convergence.
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
        grids: Vec<usize>,
    },
    /// Three-way diff of the algebraic, Cartesian, and cylindrical spectra.
    Compare {
        /// Number of lowest levels to compare.
        #[arg(long, default_value_t = 5)]
        levels: u32,
        /// Agreement tolerance on every pairwise difference.
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
        /// Interior grid points for the finite-difference spectra.
        #[arg(long, default_value_t = 8000)]
        grid: usize,
    },
    /// Factored structure function of one subalgebra and its representation
    /// constraints.
    StructureFunction {
        /// Subalgebra: 1 or 2.
        #[arg(long)]
        sub: u8,
        /// Energy eigenvalue; omitted keeps E symbolic.
        #[arg(long = "E")]
        e: Option<String>,
        /// Representation label p (dimension p+1).
        #[arg(long)]
        p: Option<u32>,
        /// Scan p = 0..=pmax instead of a single p.
        #[arg(long)]
        scan: bool,
        /// Largest p for --scan.
        #[arg(long, default_value_t = 3)]
        pmax: u32,
    },
    /// Normal-order an operator expression over the model generators.
    Eval {
        /// Expression, e.g. "[A1, B1]" or "p1^2 + 4*c1*x1^2 + c2*x1".
        expr: String,
        /// Commute the expression with this one first.
        #[arg(long)]
        commutator_with: Option<String>,
    },
    /// Check the closed-form energy identifications against the algebraic
    /// spectrum over exact rational parameter points.
    EquivalenceCheck,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors, 0 on --help/--version
        Err(e) => e.exit(),
    };
    if let Ok(v) = std::env::var("SUPERALG_MAX_PARAM_DEGREE") {
        match v.parse::<u32>() {
            Ok(cap) => set_param_degree_cap(cap),
            Err(_) => {
                eprintln!(
                    "error: SUPERALG_MAX_PARAM_DEGREE must be a nonnegative integer, got {v:?}"
                );
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    let (text, code) = match &cli.command {
        Command::VerifyZero => verify_zero(cli)?,
        Command::AuditAlgebra => audit_algebra(cli)?,
        Command::Casimir => casimir(cli)?,
        Command::SpectrumAlgebraic { nmax } => spectrum_algebraic(cli, *nmax)?,
        Command::SpectrumNumeric {
            method,
            nmax,
            grid,
            analytic,
            convergence,
            grids,
        } => spectrum_numeric(cli, *method, *nmax, *grid, *analytic, *convergence, grids)?,
        Command::Compare { levels, tol, grid } => compare(cli, *levels, *tol, *grid)?,
        Command::StructureFunction {
            sub,
            e,
            p,
            scan,
            pmax,
        } => structure_function(cli, *sub, e.as_deref(), *p, *scan, *pmax)?,
        Command::Eval {
            expr,
            commutator_with,
        } => eval(cli, expr, commutator_with.as_deref())?,
        Command::EquivalenceCheck => equivalence_check(cli)?,
    };
    emit(cli, &text)?;
    Ok(code)
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn params_of(cli: &Cli) -> Result<ModelParamsNumeric, String> {
    let raw = [&cli.c1, &cli.c2, &cli.c3, &cli.c4];
    if cli.float {
        let mut c = [0f64; 4];
        for (k, s) in raw.iter().enumerate() {
            c[k] =
                parse_f64_param(s).ok_or_else(|| format!("c{} is not a number: {s:?}", k + 1))?;
        }
        return ModelParamsNumeric::from_f64(c).map_err(|e| e.to_string());
    }
    let mut c = Vec::with_capacity(4);
    for (k, s) in raw.iter().enumerate() {
        c.push(rational_from_str(s).ok_or_else(|| format!("c{} is not a rational: {s:?}", k + 1))?);
    }
    ModelParamsNumeric::new([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
        .map_err(|e| e.to_string())
}

fn parse_f64_param(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().or_else(|| {
        use num::ToPrimitive;
        rational_from_str(s).and_then(|r| r.to_f64())
    })
}

/// Parameter echo for reports: exact rationals in num/den form.
fn params_echo(params: &ModelParamsNumeric) -> [String; 4] {
    let c = params.c();
    [
        c[0].to_string(),
        c[1].to_string(),
        c[2].to_string(),
        c[3].to_string(),
    ]
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// verify-zero

#[derive(Serialize)]
struct VerifyZeroReport {
    schema: u32,
    relations: usize,
    failed: usize,
    detail: Vec<model::RelationAudit>,
}

/// Rows that do not reproduce their printed form exactly.
fn failed_relations(rows: &[model::RelationAudit]) -> usize {
    rows.iter()
        .filter(|r| r.verdict != Verdict::ExactMatch)
        .count()
}

/// Exit code for an audit: any documented discrepancy makes it 1.
fn audit_exit_code(summary: &model::AuditSummary) -> u8 {
    u8::from(summary.mismatches > 0 || summary.closure_failures > 0)
}

fn verify_zero(cli: &Cli) -> Result<(String, u8), String> {
    let ops = ModelOperators::try_build().map_err(|e| e.to_string())?;
    let report = model::verify_zero_relations(&ops).map_err(|e| e.to_string())?;
    let failed = failed_relations(&report.relations);
    // the [x1,x2] sanity row is a probe, not one of the published relations
    let relations = report
        .relations
        .iter()
        .filter(|r| r.relation_id != "[x1,x2]")
        .count();
    let code = u8::from(failed > 0);
    let wrapped = VerifyZeroReport {
        schema: 1,
        relations,
        failed,
        detail: report.relations,
    };
    let text = match cli.format {
        Format::Json => to_json(&wrapped)?,
        Format::Csv => {
            let mut out = String::from("relation,verdict\n");
            for r in &wrapped.detail {
                out.push_str(&csv_line(&[
                    r.relation_id.clone(),
                    verdict_str(r.verdict).into(),
                ]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &wrapped.detail {
                let _ = writeln!(out, "{:10} {}", r.relation_id, verdict_str(r.verdict));
            }
            let _ = write!(
                out,
                "{} relations, {} failed",
                wrapped.relations, wrapped.failed
            );
            out
        }
    };
    Ok((text, code))
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::ExactMatch => "exact-match",
        Verdict::Mismatch => "mismatch",
    }
}

// ---------------------------------------------------------------------------
// audit-algebra

fn audit_algebra(cli: &Cli) -> Result<(String, u8), String> {
    let ops = ModelOperators::try_build().map_err(|e| e.to_string())?;
    let report = model::audit_symmetry_algebra(&ops).map_err(|e| e.to_string())?;
    let code = audit_exit_code(&report.summary);
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out =
                String::from("relation,verdict,symmetrized_match,closure_exact,corrected_rhs\n");
            for r in &report.relations {
                out.push_str(&csv_line(&[
                    r.relation_id.clone(),
                    verdict_str(r.verdict).into(),
                    r.symmetrized_match.to_string(),
                    r.closure_exact.to_string(),
                    r.corrected_rhs.clone().unwrap_or_default(),
                ]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &report.relations {
                let mut line = format!("{:10} {}", r.relation_id, verdict_str(r.verdict));
                if r.verdict == Verdict::Mismatch {
                    if r.symmetrized_match {
                        line.push_str(" (matches under symmetrized products)");
                    }
                    if let Some(c) = &r.corrected_rhs {
                        let _ = write!(line, "\n           corrected: {c}");
                    }
                }
                let _ = writeln!(out, "{line}");
            }
            let s = &report.summary;
            let _ = write!(
                out,
                "{} relations: {} exact, {} mismatched, {} closure failures",
                s.relations, s.exact_matches, s.mismatches, s.closure_failures
            );
            out
        }
    };
    Ok((text, code))
}

// ---------------------------------------------------------------------------
// casimir

fn casimir(cli: &Cli) -> Result<(String, u8), String> {
    let ops = ModelOperators::try_build().map_err(|e| e.to_string())?;
    let report = model::casimir_audit(&ops).map_err(|e| e.to_string())?;
    let clean = report.k1_commutes
        && report.k2_printed_commutes
        && report.k1_central_exact
        && report.k2_central_exact;
    let code = u8::from(!clean);
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("check,value\n");
            let rows: [(&str, String); 8] = [
                ("k1_commutes", report.k1_commutes.to_string()),
                (
                    "k2_printed_commutes",
                    report.k2_printed_commutes.to_string(),
                ),
                ("k2_printed_residual", report.k2_printed_residual.clone()),
                (
                    "k2_corrected",
                    report.k2_corrected.clone().unwrap_or_default(),
                ),
                (
                    "k2_corrected_commutes",
                    report.k2_corrected_commutes.to_string(),
                ),
                ("k1_central_exact", report.k1_central_exact.to_string()),
                ("k2_central_exact", report.k2_central_exact.to_string()),
                ("k1_central_form", report.k1_central_form.clone()),
            ];
            for (k, v) in rows {
                out.push_str(&csv_line(&[k.to_string(), v]));
                out.push('\n');
            }
            out.push_str(&csv_line(&[
                "k2_central_form".to_string(),
                report.k2_central_form.clone(),
            ]));
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "[K1, A1] = [K1, B1] = 0: {}", report.k1_commutes);
            let _ = writeln!(out, "printed K2 commutes: {}", report.k2_printed_commutes);
            if !report.k2_printed_commutes {
                let _ = writeln!(out, "  witness: {}", report.k2_printed_residual);
                if let Some(c) = &report.k2_corrected {
                    let _ = writeln!(out, "  corrected K2: {c}");
                }
                let _ = writeln!(
                    out,
                    "  corrected K2 commutes: {}",
                    report.k2_corrected_commutes
                );
            }
            let _ = writeln!(
                out,
                "K1 equals its central form exactly: {}",
                report.k1_central_exact
            );
            let _ = writeln!(
                out,
                "K2 equals its central form exactly: {}",
                report.k2_central_exact
            );
            let _ = writeln!(out, "K1 central fit: {}", report.k1_central_form);
            let _ = write!(out, "K2 central fit: {}", report.k2_central_form);
            out
        }
    };
    Ok((text, code))
}

// ---------------------------------------------------------------------------
// spectra

#[derive(Serialize)]
struct AlgebraicSpectrumReport {
    schema: u32,
    params: [String; 4],
    levels: Vec<qalg::SpectrumLevel>,
}

fn tuples4_str(tuples: &[[u32; 4]]) -> String {
    tuples
        .iter()
        .map(|t| format!("{} {} {} {}", t[0], t[1], t[2], t[3]))
        .collect::<Vec<_>>()
        .join("; ")
}

fn tuples3_str(tuples: &[[u32; 3]]) -> String {
    tuples
        .iter()
        .map(|t| format!("{} {} {}", t[0], t[1], t[2]))
        .collect::<Vec<_>>()
        .join("; ")
}

fn spectrum_algebraic(cli: &Cli, nmax: u32) -> Result<(String, u8), String> {
    let params = params_of(cli)?;
    let levels = qalg::algebraic_spectrum(&params, nmax);
    let report = AlgebraicSpectrumReport {
        schema: 1,
        params: params_echo(&params),
        levels,
    };
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("E,E_float,multiplicity,tuples\n");
            for l in &report.levels {
                out.push_str(&csv_line(&[
                    l.energy.clone(),
                    format!("{}", l.energy_f64),
                    l.multiplicity.to_string(),
                    tuples4_str(&l.tuples),
                ]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "E = {:<22} ({:>12}) multiplicity {:<3} tuples (p1 p2 n1 n2): {}",
                    l.energy,
                    l.energy_f64,
                    l.multiplicity,
                    tuples4_str(&l.tuples)
                );
            }
            out.pop();
            out
        }
    };
    Ok((text, 0))
}

#[derive(Serialize)]
struct NumericSpectrumReport {
    schema: u32,
    params: [String; 4],
    method: String,
    solver: String,
    levels: Vec<numeric::NumericLevel>,
}

#[derive(Serialize)]
struct ConvergenceRow {
    grid: usize,
    eigenvalue: f64,
    error: f64,
}

#[derive(Serialize)]
struct ConvergenceReport {
    schema: u32,
    params: [String; 4],
    method: String,
    study: Vec<ConvergenceRow>,
}

fn separated_spectrum(
    params: &ModelParamsNumeric,
    sep: Separation,
    nmax: u32,
    method: Method,
) -> Result<Vec<numeric::NumericLevel>, String> {
    match sep {
        Separation::Cartesian => numeric::cartesian_spectrum(params, nmax, method),
        Separation::Cylindrical => numeric::cylindrical_spectrum(params, nmax, method),
    }
    .map_err(|e| e.to_string())
}

fn spectrum_numeric(
    cli: &Cli,
    sep: Separation,
    nmax: u32,
    grid: usize,
    analytic: bool,
    convergence: bool,
    grids: &[usize],
) -> Result<(String, u8), String> {
    let params = params_of(cli)?;
    let sep_name = match sep {
        Separation::Cartesian => "cartesian",
        Separation::Cylindrical => "cylindrical",
    };
    if convergence {
        let mut study = Vec::new();
        for &g in grids {
            let levels =
                separated_spectrum(&params, sep, 0, Method::FiniteDifference { grid_points: g })?;
            let ground = levels.first().ok_or("empty spectrum")?;
            study.push(ConvergenceRow {
                grid: g,
                eigenvalue: ground.e,
                error: ground.error,
            });
        }
        let report = ConvergenceReport {
            schema: 1,
            params: params_echo(&params),
            method: sep_name.to_string(),
            study,
        };
        let text = match cli.format {
            Format::Json => to_json(&report)?,
            Format::Csv => {
                let mut out = String::from("grid,eigenvalue,error\n");
                for r in &report.study {
                    out.push_str(&csv_line(&[
                        r.grid.to_string(),
                        format!("{}", r.eigenvalue),
                        format!("{}", r.error),
                    ]));
                    out.push('\n');
                }
                out
            }
            Format::Text => {
                let mut out = String::from("grid      eigenvalue             error\n");
                for r in &report.study {
                    let _ = writeln!(out, "{:<9} {:<22} {}", r.grid, r.eigenvalue, r.error);
                }
                out.pop();
                out
            }
        };
        return Ok((text, 0));
    }

    let method = if analytic {
        Method::Analytic
    } else {
        Method::FiniteDifference { grid_points: grid }
    };
    let levels = separated_spectrum(&params, sep, nmax, method)?;
    let report = NumericSpectrumReport {
        schema: 1,
        params: params_echo(&params),
        method: sep_name.to_string(),
        solver: if analytic {
            "analytic".into()
        } else {
            format!("finite-difference grid {grid}")
        },
        levels,
    };
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("E,multiplicity,error,tuples\n");
            for l in &report.levels {
                out.push_str(&csv_line(&[
                    format!("{}", l.e),
                    l.multiplicity.to_string(),
                    format!("{}", l.error),
                    tuples3_str(&l.tuples),
                ]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "E = {:<22} multiplicity {:<3} est. error {:<12} tuples: {}",
                    l.e,
                    l.multiplicity,
                    l.error,
                    tuples3_str(&l.tuples)
                );
            }
            out.pop();
            out
        }
    };
    Ok((text, 0))
}

// ---------------------------------------------------------------------------
// compare

#[derive(Serialize)]
struct CompareLevelRow {
    level: u32,
    algebraic: f64,
    cartesian: f64,
    cylindrical: f64,
    max_delta: f64,
}

#[derive(Serialize)]
struct CompareReport {
    schema: u32,
    params: [String; 4],
    grid: usize,
    tolerance: f64,
    rows: Vec<CompareLevelRow>,
    max_abs_delta: f64,
    within_tolerance: bool,
}

fn compare(cli: &Cli, levels: u32, tol: f64, grid: usize) -> Result<(String, u8), String> {
    if levels == 0 {
        return Err("--levels must be positive".into());
    }
    let params = params_of(cli)?;
    let nmax = levels - 1;
    let alg = qalg::algebraic_spectrum(&params, nmax);
    let fd = Method::FiniteDifference { grid_points: grid };
    let cart = separated_spectrum(&params, Separation::Cartesian, nmax, fd)?;
    let cyl = separated_spectrum(&params, Separation::Cylindrical, nmax, fd)?;
    let mut rows = Vec::new();
    let mut max_abs = 0f64;
    for n in 0..=nmax {
        let a = alg[n as usize].energy_f64;
        let c = cart[n as usize].e;
        let y = cyl[n as usize].e;
        let d = (a - c).abs().max((a - y).abs()).max((c - y).abs());
        max_abs = max_abs.max(d);
        rows.push(CompareLevelRow {
            level: n,
            algebraic: a,
            cartesian: c,
            cylindrical: y,
            max_delta: qalg::round_sig12(d),
        });
    }
    let report = CompareReport {
        schema: 1,
        params: params_echo(&params),
        grid,
        tolerance: tol,
        max_abs_delta: qalg::round_sig12(max_abs),
        within_tolerance: max_abs <= tol,
        rows,
    };
    let code = u8::from(!report.within_tolerance);
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("level,algebraic,cartesian,cylindrical,max_delta\n");
            for r in &report.rows {
                out.push_str(&csv_line(&[
                    r.level.to_string(),
                    format!("{}", r.algebraic),
                    format!("{}", r.cartesian),
                    format!("{}", r.cylindrical),
                    format!("{}", r.max_delta),
                ]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::from(
                "level  algebraic        cartesian        cylindrical      max |delta|\n",
            );
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{:<6} {:<16} {:<16} {:<16} {}",
                    r.level, r.algebraic, r.cartesian, r.cylindrical, r.max_delta
                );
            }
            let _ = write!(
                out,
                "max |delta| = {} ({} tolerance {})",
                report.max_abs_delta,
                if report.within_tolerance {
                    "within"
                } else {
                    "EXCEEDS"
                },
                report.tolerance
            );
            out
        }
    };
    Ok((text, code))
}

// ---------------------------------------------------------------------------
// structure-function

#[derive(Serialize)]
struct FamilyReport {
    p: u32,
    dimension: u32,
    solutions: Vec<qalg::UnirrepSolutionReport>,
}

#[derive(Serialize)]
struct StructureFunctionReport {
    schema: u32,
    params: [String; 4],
    subalgebra: u8,
    energy: String,
    prefactor: String,
    brackets: Vec<String>,
    families: Vec<FamilyReport>,
    proportionality: qalg::ProportionalityReport,
}

fn bracket_str(b: &qalg::LinearBracket) -> String {
    let mut s = format!("({})*nu", b.slope);
    if !b.k0.is_zero() {
        let _ = write!(s, " + ({})", b.k0);
    }
    if !b.ke.is_zero() {
        let _ = write!(s, " + ({})*E", b.ke);
    }
    if !b.kz.is_zero() {
        let _ = write!(s, " + ({})*eZ", b.kz);
    }
    s
}

fn structure_function(
    cli: &Cli,
    sub: u8,
    e: Option<&str>,
    p: Option<u32>,
    scan: bool,
    pmax: u32,
) -> Result<(String, u8), String> {
    let subalgebra = match sub {
        1 => Subalgebra::Q1,
        2 => Subalgebra::Q2,
        _ => return Err("--sub must be 1 or 2".into()),
    };
    let params = params_of(cli)?;
    let phi = match subalgebra {
        Subalgebra::Q1 => qalg::build_phi1(&params),
        Subalgebra::Q2 => qalg::build_phi2(&params),
    };
    let e_scalar: Option<Scalar> = match e {
        None => None,
        Some(s) => Some(if cli.float {
            Scalar::Approx(
                s.parse::<f64>()
                    .map_err(|_| format!("-E is not a float: {s:?}"))?,
            )
        } else {
            Scalar::Exact(
                rational_from_str(s).ok_or_else(|| format!("-E is not a rational: {s:?}"))?,
            )
        }),
    };
    let ps: Vec<u32> = if scan {
        (0..=pmax).collect()
    } else {
        vec![p.unwrap_or(0)]
    };
    let families: Vec<FamilyReport> = ps
        .iter()
        .map(|&pp| FamilyReport {
            p: pp,
            dimension: pp + 1,
            solutions: qalg::solve_unirrep_constraints(&phi, &params, pp, e_scalar.as_ref())
                .iter()
                .map(|s| s.report())
                .collect(),
        })
        .collect();
    let proportionality =
        qalg::structure_function_proportionality(&params, subalgebra).map_err(|e| e.to_string())?;
    let code = u8::from(!proportionality.exact_multiple);
    let report = StructureFunctionReport {
        schema: 1,
        params: params_echo(&params),
        subalgebra: sub,
        energy: e.map(str::to_string).unwrap_or_else(|| "symbolic".into()),
        prefactor: phi.prefactor.to_string(),
        brackets: phi.brackets.iter().map(bracket_str).collect(),
        families,
        proportionality,
    };
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("p,dimension,u,central_eigen,sign_choices,positivity\n");
            for f in &report.families {
                for s in &f.solutions {
                    out.push_str(&csv_line(&[
                        f.p.to_string(),
                        f.dimension.to_string(),
                        s.u.clone(),
                        s.central_eigen.clone().unwrap_or_default(),
                        s.sign_choices
                            .map(|(a, b, c)| format!("({a},{b},{c})"))
                            .unwrap_or_default(),
                        s.positivity_verified.to_string(),
                    ]));
                    out.push('\n');
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "phi_{} = ({}) * product of:",
                report.subalgebra, report.prefactor
            );
            for b in &report.brackets {
                let _ = writeln!(out, "  [{b}]");
            }
            let _ = writeln!(out, "energy: {}", report.energy);
            for f in &report.families {
                let _ = writeln!(out, "p = {} (dimension {}):", f.p, f.dimension);
                if f.solutions.is_empty() {
                    let _ = writeln!(out, "  no solutions");
                }
                for s in &f.solutions {
                    let signs = s
                        .sign_choices
                        .map(|(a, b, c)| format!(" signs ({a},{b},{c})"))
                        .unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "  u = {:<28} eZ = {:<28}{} positive interior: {}",
                        s.u,
                        s.central_eigen.clone().unwrap_or_else(|| "-".into()),
                        signs,
                        s.positivity_verified
                    );
                }
            }
            let pr = &report.proportionality;
            let _ = write!(
                out,
                "generic-vs-factored proportionality: ratio {} exact multiple {}",
                pr.ratio.clone().unwrap_or_else(|| "-".into()),
                pr.exact_multiple
            );
            out
        }
    };
    Ok((text, code))
}

// ---------------------------------------------------------------------------
// eval

#[derive(Serialize)]
struct EvalReport {
    schema: u32,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    commutator_with: Option<String>,
    normal_form: String,
    is_zero: bool,
    momentum_degree: Option<u32>,
    formally_self_adjoint: bool,
}

fn eval(cli: &Cli, expr: &str, with: Option<&str>) -> Result<(String, u8), String> {
    let ops = ModelOperators::try_build().map_err(|e| e.to_string())?;
    let a = ops.lower_src(expr).map_err(|e| e.to_string())?;
    let value = match with {
        Some(b_src) => {
            let b = ops.lower_src(b_src).map_err(|e| e.to_string())?;
            a.commutator(&b).map_err(|e| e.to_string())?
        }
        None => a,
    };
    let report = EvalReport {
        schema: 1,
        input: expr.to_string(),
        commutator_with: with.map(str::to_string),
        normal_form: value.to_string(),
        is_zero: value.is_zero(),
        momentum_degree: value.momentum_degree().ok(),
        formally_self_adjoint: value.sub(&value.formal_adjoint()).is_zero(),
    };
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in [
                ("normal_form", report.normal_form.clone()),
                ("is_zero", report.is_zero.to_string()),
                (
                    "momentum_degree",
                    report
                        .momentum_degree
                        .map(|d| d.to_string())
                        .unwrap_or_default(),
                ),
                (
                    "formally_self_adjoint",
                    report.formally_self_adjoint.to_string(),
                ),
            ] {
                out.push_str(&csv_line(&[k.to_string(), v]));
                out.push('\n');
            }
            out
        }
        Format::Text => report.normal_form.clone(),
    };
    Ok((text, 0))
}

// ---------------------------------------------------------------------------
// equivalence-check

fn equivalence_check(cli: &Cli) -> Result<(String, u8), String> {
    let points = numeric::default_equivalence_points();
    let tuples = numeric::default_equivalence_tuples();
    let report = numeric::formula_equivalence(&points, &tuples).map_err(|e| e.to_string())?;
    let clean = report.cylindrical_exact
        && report.paraboloidal_stated_exact
        && report.cylindrical_parity_consistent
        && report.paraboloidal_parity_consistent;
    let code = u8::from(!clean);
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("check,value\n");
            for (k, v) in [
                ("points_checked", report.points_checked.to_string()),
                ("tuples_checked", report.tuples_checked.to_string()),
                ("cylindrical_exact", report.cylindrical_exact.to_string()),
                (
                    "paraboloidal_stated_exact",
                    report.paraboloidal_stated_exact.to_string(),
                ),
                (
                    "paraboloidal_offset",
                    report.paraboloidal_offset.clone().unwrap_or_default(),
                ),
                (
                    "paraboloidal_corrected_exact",
                    report.paraboloidal_corrected_exact.to_string(),
                ),
                (
                    "cylindrical_parity_consistent",
                    report.cylindrical_parity_consistent.to_string(),
                ),
                (
                    "paraboloidal_parity_consistent",
                    report.paraboloidal_parity_consistent.to_string(),
                ),
            ] {
                out.push_str(&csv_line(&[k.to_string(), v]));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{} parameter points x {} tuples, exact arithmetic",
                report.points_checked, report.tuples_checked
            );
            let _ = writeln!(
                out,
                "cylindrical identification exact: {}",
                report.cylindrical_exact
            );
            let _ = writeln!(
                out,
                "paraboloidal identification as stated exact: {}",
                report.paraboloidal_stated_exact
            );
            if let Some(off) = &report.paraboloidal_offset {
                let _ = writeln!(out, "  uniform offset of the stated form: {off}");
                let _ = writeln!(
                    out,
                    "  corrected identification (2*mu = p1 + p2) exact: {}",
                    report.paraboloidal_corrected_exact
                );
            }
            let _ = writeln!(
                out,
                "cylindrical parity bookkeeping consistent: {}",
                report.cylindrical_parity_consistent
            );
            let _ = write!(
                out,
                "paraboloidal parity bookkeeping consistent: {}",
                report.paraboloidal_parity_consistent
            );
            out
        }
    };
    Ok((text, code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic_rows(flags: &[bool]) -> Vec<model::RelationAudit> {
        flags
            .iter()
            .enumerate()
            .map(|(i, &exact)| model::RelationAudit {
                relation_id: format!("[S{i},T{i}]"),
                residual: if exact { "0".into() } else { "(1)".into() },
                verdict: if exact {
                    Verdict::ExactMatch
                } else {
                    Verdict::Mismatch
                },
                corrected_rhs: (!exact).then(|| "(1)*H".into()),
                symmetrized_match: exact,
                closure_exact: true,
            })
            .collect()
    }

    proptest! {
        #[test]
        fn failure_count_drives_the_exit_code(flags in prop::collection::vec(any::<bool>(), 1..40)) {
            let rows = synthetic_rows(&flags);
            let failed = failed_relations(&rows);
            prop_assert_eq!(failed, flags.iter().filter(|&&b| !b).count());
            prop_assert_eq!(u8::from(failed > 0), u8::from(flags.iter().any(|&b| !b)));
        }

        #[test]
        fn audit_code_is_one_exactly_on_discrepancies(
            mismatches in 0usize..30,
            closure_failures in 0usize..30,
        ) {
            let summary = model::AuditSummary {
                relations: 27,
                exact_matches: 27usize.saturating_sub(mismatches),
                mismatches,
                closure_failures,
            };
            let expect = u8::from(mismatches > 0 || closure_failures > 0);
            prop_assert_eq!(audit_exit_code(&summary), expect);
        }
    }
}
