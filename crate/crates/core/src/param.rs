//! The coefficient ring Q(i)[c1, c2, c3, c4].
//!
//! Coefficients are sparse polynomials in the four model parameters with
//! Gaussian-rational weights. A global degree cap bounds the total parameter
//! degree of any monomial produced by multiplication; breaching it is a hard
//! error rather than silent truncation.

use crate::error::WeylError;
use crate::scalar::GaussianRational;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

pub const PARAM_COUNT: usize = 4;
pub const DEFAULT_PARAM_DEGREE_CAP: u32 = 6;

static PARAM_DEGREE_CAP: AtomicU32 = AtomicU32::new(DEFAULT_PARAM_DEGREE_CAP);

/// Current global cap on total parameter degree.
pub fn param_degree_cap() -> u32 {
    PARAM_DEGREE_CAP.load(Ordering::Relaxed)
}

/// Overrides the global degree cap (the CLI wires `SUPERALG_MAX_PARAM_DEGREE`
/// through here). Affects subsequent multiplications process-wide.
pub fn set_param_degree_cap(cap: u32) {
    PARAM_DEGREE_CAP.store(cap, Ordering::Relaxed);
}

/// c1^e1 c2^e2 c3^e3 c4^e4. Ordering is lexicographic on the exponent vector,
/// so the constant monomial sorts first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ParamMonomial {
    exps: [u32; PARAM_COUNT],
}

impl ParamMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// The single parameter c_{idx+1}.
    pub fn param(idx: usize) -> Self {
        assert!(idx < PARAM_COUNT);
        let mut exps = [0; PARAM_COUNT];
        exps[idx] = 1;
        ParamMonomial { exps }
    }

    pub fn from_exps(exps: [u32; PARAM_COUNT]) -> Self {
        ParamMonomial { exps }
    }

    pub fn exps(&self) -> &[u32; PARAM_COUNT] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; PARAM_COUNT]
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Product, enforcing the global degree cap.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, WeylError> {
        let mut exps = [0u32; PARAM_COUNT];
        for (e, (a, b)) in exps.iter_mut().zip(self.exps.iter().zip(&other.exps)) {
            *e = a + b;
        }
        let m = ParamMonomial { exps };
        let cap = param_degree_cap();
        let degree = m.total_degree();
        if degree > cap {
            return Err(WeylError::DegreeCapExceeded { degree, cap });
        }
        Ok(m)
    }

    /// Exact division; None when any exponent would go negative.
    pub fn try_div(&self, other: &Self) -> Option<Self> {
        let mut exps = [0u32; PARAM_COUNT];
        for (e, (a, b)) in exps.iter_mut().zip(self.exps.iter().zip(&other.exps)) {
            *e = a.checked_sub(*b)?;
        }
        Some(ParamMonomial { exps })
    }

    /// All monomials of total degree <= max, in increasing `Ord` order.
    pub fn all_up_to_degree(max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for e1 in 0..=max {
            for e2 in 0..=(max - e1) {
                for e3 in 0..=(max - e1 - e2) {
                    for e4 in 0..=(max - e1 - e2 - e3) {
                        out.push(ParamMonomial {
                            exps: [e1, e2, e3, e4],
                        });
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// All monomials with every individual exponent <= max, in increasing
    /// `Ord` order. This is the cap that matches the model's structure
    /// constants: c1*c3 sits at exponent cap 1, c2^2*c4 at cap 2.
    pub fn all_with_max_exponent(max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for e1 in 0..=max {
            for e2 in 0..=max {
                for e3 in 0..=max {
                    for e4 in 0..=max {
                        out.push(ParamMonomial {
                            exps: [e1, e2, e3, e4],
                        });
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (k, &e) in self.exps.iter().enumerate() {
            if e == 1 {
                parts.push(format!("c{}", k + 1));
            } else if e > 1 {
                parts.push(format!("c{}^{}", k + 1, e));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial in c1..c4 over Q(i). Canonical form: no zero weights.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Coefficient {
    terms: BTreeMap<ParamMonomial, GaussianRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_scalar(GaussianRational::one())
    }

    pub fn from_scalar(g: GaussianRational) -> Self {
        let mut c = Coefficient::default();
        c.add_term(ParamMonomial::one(), g);
        c
    }

    pub fn integer(n: i64) -> Self {
        Self::from_scalar(GaussianRational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_scalar(GaussianRational::from_ratio(num, den))
    }

    pub fn imaginary_unit() -> Self {
        Self::from_scalar(GaussianRational::i())
    }

    /// The parameter c_{idx+1} as a coefficient.
    pub fn param(idx: usize) -> Self {
        let mut c = Coefficient::default();
        c.add_term(ParamMonomial::param(idx), GaussianRational::one());
        c
    }

    pub fn term(m: ParamMonomial, g: GaussianRational) -> Self {
        let mut c = Coefficient::default();
        c.add_term(m, g);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&ParamMonomial::one())
                .is_some_and(|g| g.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamMonomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// Weight of the constant monomial, if the coefficient is a pure scalar.
    pub fn as_scalar(&self) -> Option<&GaussianRational> {
        if self.terms.len() == 1 {
            self.terms.get(&ParamMonomial::one())
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: ParamMonomial, g: GaussianRational) {
        if g.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(g);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &g;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, g) in &other.terms {
            out.add_term(*m, g.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, g) in &other.terms {
            out.add_term(*m, -g);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Coefficient::default();
        for (m, g) in &self.terms {
            out.terms.insert(*m, -g);
        }
        out
    }

    pub fn scale(&self, g: &GaussianRational) -> Self {
        if g.is_zero() {
            return Coefficient::zero();
        }
        let mut out = Coefficient::default();
        for (m, w) in &self.terms {
            let prod = w * g;
            if !prod.is_zero() {
                out.terms.insert(*m, prod);
            }
        }
        out
    }

    /// Product, enforcing the parameter-degree cap.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, WeylError> {
        let mut out = Coefficient::default();
        for (ma, ga) in &self.terms {
            for (mb, gb) in &other.terms {
                let m = ma.checked_mul(mb)?;
                out.add_term(m, ga * gb);
            }
        }
        Ok(out)
    }

    pub fn conj(&self) -> Self {
        let mut out = Coefficient::default();
        for (m, g) in &self.terms {
            out.terms.insert(*m, g.conj());
        }
        out
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(ParamMonomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Exact evaluation at rational parameter values.
    pub fn eval(&self, values: &[BigRational; PARAM_COUNT]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, g) in &self.terms {
            let mut v = BigRational::one();
            for (k, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    v *= &values[k];
                }
            }
            acc = &acc + &g.scale_rational(&v);
        }
        acc
    }

    /// Float evaluation; returns (re, im).
    pub fn eval_f64(&self, values: &[f64; PARAM_COUNT]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, g) in &self.terms {
            let mut v = 1.0;
            for (k, &e) in m.exps().iter().enumerate() {
                v *= values[k].powi(e as i32);
            }
            let (gr, gi) = g.to_f64_parts();
            re += gr * v;
            im += gi * v;
        }
        (re, im)
    }
}

impl GaussianRational {
    /// Scales both components by a rational. Lives here so Coefficient::eval
    /// can stay allocation-light.
    pub fn scale_rational(&self, r: &BigRational) -> GaussianRational {
        GaussianRational::new(self.re() * r, self.im() * r)
    }
}

/// Renders one `g * monomial` product as a parser-compatible factor string.
/// `g` == 1 or -1 elides the scalar; a mixed complex scalar is parenthesized.
fn term_str(m: &ParamMonomial, g: &GaussianRational) -> String {
    if m.is_one() {
        return g.to_string();
    }
    if g.is_one() {
        return m.to_string();
    }
    if (-g).is_one() {
        return format!("-{m}");
    }
    let gs = if g.is_real() || g.re().is_zero() {
        g.to_string()
    } else {
        format!("({g})")
    };
    format!("{gs}*{m}")
}

impl fmt::Display for Coefficient {
    /// Sum of term strings in monomial order; round-trips through the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (idx, (m, g)) in self.terms.iter().enumerate() {
            let t = term_str(m, g);
            if idx > 0 && !t.starts_with('-') {
                out.push('+');
            }
            out.push_str(&t);
        }
        write!(f, "{out}")
    }
}

/// Parses a decimal or rational literal ("0.75", "3/4", "-2") into an exact
/// rational.
pub fn rational_from_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let r = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let int: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let num: BigInt = frac.parse().ok()?;
        let den = num::pow::pow(BigInt::from(10), frac.len());
        BigRational::from_integer(int) + BigRational::new(num, den)
    } else {
        let n: BigInt = body.parse().ok()?;
        BigRational::from_integer(n)
    };
    Some(if neg { -r } else { r })
}
