//! Normal-ordered elements of the Weyl algebra in three canonical pairs,
//! with Laurent powers allowed in the position variables.
//!
//! Convention: [x_j, p_k] = i delta_jk (hbar = 1, mass = 1). Every expression
//! is stored normal-ordered, all position factors to the left of all momentum
//! factors, so equality of operators is equality of the term maps. The single
//! reordering identity, valid for any integer n (negative included), is
//!
//!   p^m x^n = sum_{k=0..m} C(m,k) (-i)^k n(n-1)...(n-k+1) x^{n-k} p^{m-k}.

use crate::error::WeylError;
use crate::param::{Coefficient, PARAM_COUNT};
use crate::scalar::GaussianRational;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// x1^a1 x2^a2 x3^a3 p1^b1 p2^b2 p3^b3 with a in Z^3 (Laurent), b in N^3.
/// Ordering is lexicographic on (x, p); used for canonical term order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WeylMonomial {
    pub x: [i32; 3],
    pub p: [u32; 3],
}

impl WeylMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::default()
    }

    pub fn x_pow(coord: usize, exp: i32) -> Self {
        assert!(coord < 3);
        let mut m = Self::default();
        m.x[coord] = exp;
        m
    }

    pub fn p_pow(coord: usize, exp: u32) -> Self {
        assert!(coord < 3);
        let mut m = Self::default();
        m.p[coord] = exp;
        m
    }

    /// Total momentum degree b1 + b2 + b3.
    pub fn momentum_degree(&self) -> u32 {
        self.p.iter().sum()
    }
}

impl fmt::Display for WeylMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, &e) in self.x.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x{}", j + 1)),
                _ => parts.push(format!("x{}^{}", j + 1, e)),
            }
        }
        for (j, &e) in self.p.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("p{}", j + 1)),
                _ => parts.push(format!("p{}^{}", j + 1, e)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Falling factorial n(n-1)...(n-k+1) as an exact rational scalar.
fn falling_factorial(n: i32, k: u32) -> GaussianRational {
    let mut acc = BigInt::from(1);
    for j in 0..k as i64 {
        acc *= BigInt::from(n as i64 - j);
    }
    GaussianRational::from_real(BigRational::from_integer(acc))
}

fn binomial(m: u32, k: u32) -> GaussianRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc *= BigRational::new(BigInt::from(m - j), BigInt::from(j + 1));
    }
    GaussianRational::from_real(acc)
}

/// Per-coordinate reordering table for p^m x^n: pairs (k, scalar_k) with
/// scalar_k = C(m,k) (-i)^k n^(k); zero scalars are dropped.
fn reorder_steps(p_exp: u32, x_exp: i32) -> Vec<(u32, GaussianRational)> {
    let mut out = Vec::with_capacity(p_exp as usize + 1);
    for k in 0..=p_exp {
        if x_exp >= 0 && k as i32 > x_exp {
            break; // falling factorial vanished and stays zero
        }
        let s =
            &(&binomial(p_exp, k) * &GaussianRational::neg_i_pow(k)) * &falling_factorial(x_exp, k);
        if !s.is_zero() {
            out.push((k, s));
        }
    }
    out
}

/// Normal-ordered operator: map from monomial to coefficient, no zero
/// coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<WeylMonomial, Coefficient>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_coefficient(Coefficient::one())
    }

    pub fn from_coefficient(c: Coefficient) -> Self {
        let mut e = Self::default();
        e.add_term(WeylMonomial::one(), c);
        e
    }

    pub fn constant(n: i64) -> Self {
        Self::from_coefficient(Coefficient::integer(n))
    }

    pub fn scalar(g: GaussianRational) -> Self {
        Self::from_coefficient(Coefficient::from_scalar(g))
    }

    /// The model parameter c_{idx+1} times the identity.
    pub fn param(idx: usize) -> Self {
        Self::from_coefficient(Coefficient::param(idx))
    }

    pub fn position(coord: usize) -> Self {
        Self::monomial(WeylMonomial::x_pow(coord, 1), Coefficient::one())
    }

    pub fn momentum(coord: usize) -> Self {
        Self::monomial(WeylMonomial::p_pow(coord, 1), Coefficient::one())
    }

    pub fn position_pow(coord: usize, exp: i32) -> Self {
        Self::monomial(WeylMonomial::x_pow(coord, exp), Coefficient::one())
    }

    pub fn monomial(m: WeylMonomial, c: Coefficient) -> Self {
        let mut e = Self::default();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, m: &WeylMonomial) -> Option<&Coefficient> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
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
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            out.terms.insert(*m, c.neg());
        }
        out
    }

    /// Scales by an exact scalar (never raises parameter degree).
    pub fn scale(&self, g: &GaussianRational) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let sc = c.scale(g);
            if !sc.is_zero() {
                out.terms.insert(*m, sc);
            }
        }
        out
    }

    /// Scales by a coefficient; may raise parameter degree, hence checked.
    pub fn checked_scale(&self, c: &Coefficient) -> Result<Self, WeylError> {
        let mut out = Self::default();
        for (m, w) in &self.terms {
            out.add_term(*m, w.checked_mul(c)?);
        }
        Ok(out)
    }

    /// Adds coeff * x^{ax} p^{ap} * x^{bx} p^{bp}, normal-ordered, into self.
    fn accumulate_product(
        &mut self,
        coeff: &Coefficient,
        ax: [i32; 3],
        ap: [u32; 3],
        bx: [i32; 3],
        bp: [u32; 3],
    ) {
        let steps: [Vec<(u32, GaussianRational)>; 3] = [
            reorder_steps(ap[0], bx[0]),
            reorder_steps(ap[1], bx[1]),
            reorder_steps(ap[2], bx[2]),
        ];
        for (k1, s1) in &steps[0] {
            for (k2, s2) in &steps[1] {
                let s12 = s1 * s2;
                for (k3, s3) in &steps[2] {
                    let ks = [*k1, *k2, *k3];
                    let mut m = WeylMonomial::default();
                    for j in 0..3 {
                        m.x[j] = ax[j] + bx[j] - ks[j] as i32;
                        m.p[j] = ap[j] + bp[j] - ks[j];
                    }
                    self.add_term(m, coeff.scale(&(&s12 * s3)));
                }
            }
        }
    }

    /// Exact product in normal order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, WeylError> {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let base = ca.checked_mul(cb)?;
                if base.is_zero() {
                    continue;
                }
                out.accumulate_product(&base, ma.x, ma.p, mb.x, mb.p);
            }
        }
        Ok(out)
    }

    /// [self, other] = self*other - other*self.
    pub fn commutator(&self, other: &Self) -> Result<Self, WeylError> {
        Ok(self.checked_mul(other)?.sub(&other.checked_mul(self)?))
    }

    /// {self, other} = self*other + other*self.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, WeylError> {
        Ok(self.checked_mul(other)?.add(&other.checked_mul(self)?))
    }

    /// self^exp for small nonnegative exponents.
    pub fn checked_pow(&self, exp: u32) -> Result<Self, WeylError> {
        if exp > 16 {
            return Err(WeylError::ExponentOutOfRange(exp as i64));
        }
        let mut acc = Self::identity();
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Formal adjoint: conjugate coefficients, reverse each word, re-order.
    /// x and p are self-adjoint, so (x^a p^b)^† = p^b x^a.
    pub fn formal_adjoint(&self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            out.accumulate_product(&c.conj(), [0; 3], m.p, m.x, [0; 3]);
        }
        out
    }

    /// Substitutes exact rational values for all four parameters.
    pub fn substitute_params(&self, values: &[BigRational; PARAM_COUNT]) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            out.add_term(*m, Coefficient::from_scalar(c.eval(values)));
        }
        out
    }

    /// Max total momentum degree across terms; undefined for zero.
    pub fn momentum_degree(&self) -> Result<u32, WeylError> {
        self.terms
            .keys()
            .map(WeylMonomial::momentum_degree)
            .max()
            .ok_or(WeylError::ZeroExpression)
    }

    /// Max parameter degree across coefficients.
    pub fn max_param_degree(&self) -> u32 {
        self.terms
            .values()
            .map(Coefficient::max_total_degree)
            .max()
            .unwrap_or(0)
    }
}

/// Normal-orders the single word p_j^m x_j^n (j = coord) as an expression.
pub fn normal_order_word(coord: usize, p_exp: u32, x_exp: i32) -> OperatorExpr {
    assert!(coord < 3);
    let mut ap = [0u32; 3];
    ap[coord] = p_exp;
    let mut bx = [0i32; 3];
    bx[coord] = x_exp;
    let mut out = OperatorExpr::default();
    out.accumulate_product(&Coefficient::one(), [0; 3], ap, bx, [0; 3]);
    out
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::add(self, rhs)
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::sub(self, rhs)
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr::neg(self)
    }
}

/// Panicking product for tests and contexts where the cap is known safe.
impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        self.checked_mul(rhs)
            .expect("parameter degree cap exceeded in operator product")
    }
}

impl fmt::Display for OperatorExpr {
    /// Canonical text form: "(coeff)*mono" terms joined by " + ", zero is
    /// "0". Round-trips exactly through the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}
