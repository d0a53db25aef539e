//! Dense univariate polynomials over a pluggable coefficient ring.
//!
//! `UniPoly<C>` stores coefficients in ascending degree with no trailing
//! zeros; the zero polynomial has an empty coefficient vector. Every
//! polynomial carries a zero exemplar of its coefficient ring so that
//! out-of-range coefficient reads and empty constructions stay total, and a
//! variable tag so that polynomials in t and in θ cannot be mixed silently.
//! Multiplication switches from the schoolbook rule to Karatsuba above a
//! fixed size threshold.

use std::fmt;

use crate::error::AlgebraError;

/// Variable tag carried by every polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Var {
    T,
    Theta,
    X,
    Z,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::Theta => "θ",
            Var::X => "x",
            Var::Z => "z",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Coefficient ring operations used by `UniPoly`.
///
/// `zero_like`/`one_like` mint identities tied to the same underlying
/// context (field tables, variable tags) as `self`.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
}

/// Coefficient rings that are fields, enabling division-based algorithms.
pub trait CoeffField: Coeff {
    fn inv_ref(&self) -> Result<Self, AlgebraError>;

    fn div_ref(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul_ref(&rhs.inv_ref()?))
    }
}

const KARATSUBA_MIN: usize = 32;

#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly<C: Coeff> {
    var: Var,
    zero: C,
    coeffs: Vec<C>,
}

impl<C: Coeff> UniPoly<C> {
    // ---- Constructors ----

    pub fn zero(var: Var, exemplar: &C) -> Self {
        UniPoly {
            var,
            zero: exemplar.zero_like(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(var: Var, exemplar: &C) -> Self {
        Self::constant(var, exemplar.one_like())
    }

    pub fn constant(var: Var, c: C) -> Self {
        let zero = c.zero_like();
        let coeffs = if c.is_zero() { Vec::new() } else { vec![c] };
        UniPoly { var, zero, coeffs }
    }

    /// The monomial c * v^deg.
    pub fn monomial(var: Var, c: C, deg: usize) -> Self {
        let zero = c.zero_like();
        if c.is_zero() {
            return UniPoly {
                var,
                zero,
                coeffs: Vec::new(),
            };
        }
        let mut coeffs = Vec::with_capacity(deg + 1);
        coeffs.resize(deg, zero.clone());
        coeffs.push(c);
        UniPoly { var, zero, coeffs }
    }

    /// The bare variable v as a degree-one polynomial.
    pub fn variable(var: Var, exemplar: &C) -> Self {
        Self::monomial(var, exemplar.one_like(), 1)
    }

    /// Build from an ascending coefficient vector, trimming trailing zeros.
    pub fn from_vec(var: Var, zero: C, coeffs: Vec<C>) -> Self {
        let mut p = UniPoly { var, zero, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(C::is_zero) {
            self.coeffs.pop();
        }
    }

    // ---- Accessors ----

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    /// Coefficient of v^i; the zero of the ring beyond the degree.
    pub fn coeff(&self, i: usize) -> &C {
        self.coeffs.get(i).unwrap_or(&self.zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    /// Same coefficients under a different variable tag.
    pub fn with_var(&self, var: Var) -> Self {
        UniPoly {
            var,
            zero: self.zero.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    // ---- Arithmetic ----

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add_ref(rhs.coeff(i)));
        }
        UniPoly::from_vec(self.var, self.zero.clone(), coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).sub_ref(rhs.coeff(i)));
        }
        UniPoly::from_vec(self.var, self.zero.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(C::neg_ref).collect();
        UniPoly {
            var: self.var,
            zero: self.zero.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.var, &self.zero);
        }
        let coeffs = mul_slices(&self.coeffs, &rhs.coeffs, &self.zero);
        UniPoly::from_vec(self.var, self.zero.clone(), coeffs)
    }

    /// Multiply every coefficient by c.
    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return UniPoly::zero(self.var, &self.zero);
        }
        let coeffs = self.coeffs.iter().map(|a| a.mul_ref(c)).collect();
        UniPoly::from_vec(self.var, self.zero.clone(), coeffs)
    }

    /// Multiply by v^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + k);
        coeffs.resize(k, self.zero.clone());
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly {
            var: self.var,
            zero: self.zero.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = UniPoly::one(self.var, &self.zero);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Evaluate at a point of another ring, lifting coefficients through
    /// the given embedding.
    pub fn eval_map<D: Coeff>(&self, x: &D, lift: impl Fn(&C) -> D) -> D {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(&lift(c));
        }
        acc
    }

    /// Apply f to every coefficient, producing a polynomial over another ring.
    pub fn map<D: Coeff>(&self, var: Var, zero: D, f: impl Fn(&C) -> D) -> UniPoly<D> {
        let coeffs = self.coeffs.iter().map(f).collect();
        UniPoly::from_vec(var, zero, coeffs)
    }

    fn check_var(&self, rhs: &Self) {
        assert_eq!(
            self.var, rhs.var,
            "polynomials in different variables combined"
        );
    }
}

impl<C: CoeffField> UniPoly<C> {
    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, rhs: &Self) -> Result<(Self, Self), AlgebraError> {
        self.check_var(rhs);
        let d = rhs.degree().ok_or(AlgebraError::DivisionByZero)?;
        let lead_inv = rhs.leading().unwrap().inv_ref()?;
        let mut rem = self.clone();
        if self.degree().is_none_or(|n| n < d) {
            return Ok((UniPoly::zero(self.var, &self.zero), rem));
        }
        let n = self.degree().unwrap();
        let mut quot = vec![self.zero.clone(); n - d + 1];
        while let Some(m) = rem.degree() {
            if m < d {
                break;
            }
            let factor = rem.leading().unwrap().mul_ref(&lead_inv);
            let shift = m - d;
            quot[shift] = factor.clone();
            // rem -= factor * v^shift * rhs
            let mut coeffs = rem.coeffs;
            for (j, rc) in rhs.coeffs.iter().enumerate() {
                let idx = shift + j;
                coeffs[idx] = coeffs[idx].sub_ref(&factor.mul_ref(rc));
            }
            rem = UniPoly::from_vec(self.var, self.zero.clone(), coeffs);
        }
        Ok((
            UniPoly::from_vec(self.var, self.zero.clone(), quot),
            rem,
        ))
    }

    pub fn rem(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        Ok(self.divrem(rhs)?.1)
    }

    /// Division that must leave no remainder.
    pub fn exact_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.divrem(rhs)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.make_monic().expect("nonzero polynomial")
        }
    }

    /// Scale so the leading coefficient is one.
    pub fn make_monic(&self) -> Result<Self, AlgebraError> {
        let lead = self.leading().ok_or(AlgebraError::DivisionByZero)?;
        if lead.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&lead.inv_ref()?))
    }
}

fn mul_slices<C: Coeff>(a: &[C], b: &[C], zero: &C) -> Vec<C> {
    if a.len().min(b.len()) < KARATSUBA_MIN {
        return mul_school(a, b, zero);
    }
    mul_karatsuba(a, b, zero)
}

fn mul_school<C: Coeff>(a: &[C], b: &[C], zero: &C) -> Vec<C> {
    let mut out = vec![zero.clone(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
        }
    }
    out
}

fn mul_karatsuba<C: Coeff>(a: &[C], b: &[C], zero: &C) -> Vec<C> {
    let n = a.len().max(b.len());
    let half = n / 2;
    if a.len() <= half || b.len() <= half {
        return mul_school(a, b, zero);
    }
    let (a0, a1) = a.split_at(half);
    let (b0, b1) = b.split_at(half);
    let low = mul_slices(a0, b0, zero);
    let high = mul_slices(a1, b1, zero);
    let a_sum = add_slices(a0, a1, zero);
    let b_sum = add_slices(b0, b1, zero);
    let mut mid = mul_slices(&a_sum, &b_sum, zero);
    for (i, c) in low.iter().enumerate() {
        mid[i] = mid[i].sub_ref(c);
    }
    for (i, c) in high.iter().enumerate() {
        mid[i] = mid[i].sub_ref(c);
    }
    let mut out = vec![zero.clone(); a.len() + b.len() - 1];
    for (i, c) in low.into_iter().enumerate() {
        out[i] = out[i].add_ref(&c);
    }
    for (i, c) in mid.into_iter().enumerate() {
        out[half + i] = out[half + i].add_ref(&c);
    }
    for (i, c) in high.into_iter().enumerate() {
        out[2 * half + i] = out[2 * half + i].add_ref(&c);
    }
    out
}

fn add_slices<C: Coeff>(a: &[C], b: &[C], zero: &C) -> Vec<C> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(zero);
        let y = b.get(i).unwrap_or(zero);
        out.push(x.add_ref(y));
    }
    out
}

// ---- Operator sugar ----

impl<C: Coeff> std::ops::Add for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn add(self, rhs: Self) -> UniPoly<C> {
        UniPoly::add(self, rhs)
    }
}

impl<C: Coeff> std::ops::Sub for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn sub(self, rhs: Self) -> UniPoly<C> {
        UniPoly::sub(self, rhs)
    }
}

impl<C: Coeff> std::ops::Mul for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn mul(self, rhs: Self) -> UniPoly<C> {
        UniPoly::mul(self, rhs)
    }
}

impl<C: Coeff> std::ops::Neg for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn neg(self) -> UniPoly<C> {
        UniPoly::neg(self)
    }
}

// ---- Coefficient ring instances ----

impl Coeff for super::fq::FqElem {
    fn is_zero(&self) -> bool {
        FqElem::is_zero(self)
    }
    fn is_one(&self) -> bool {
        FqElem::is_one(self)
    }
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
}

use super::fq::FqElem;

impl CoeffField for FqElem {
    fn inv_ref(&self) -> Result<Self, AlgebraError> {
        self.inv()
    }
}

impl<C: Coeff> Coeff for UniPoly<C> {
    fn is_zero(&self) -> bool {
        UniPoly::is_zero(self)
    }
    fn is_one(&self) -> bool {
        UniPoly::is_one(self)
    }
    fn zero_like(&self) -> Self {
        UniPoly::zero(self.var, &self.zero)
    }
    fn one_like(&self) -> Self {
        UniPoly::one(self.var, &self.zero)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
}

/// Polynomials over F_q: the workhorse scalar type.
pub type FqPoly = UniPoly<FqElem>;

impl FqPoly {
    /// Substitute v -> v^(q^m); valid over F_q since coefficients are fixed
    /// by the q-power map.
    pub fn dilate_exponents(&self, factor: usize) -> Self {
        if self.is_zero() || factor == 1 {
            return self.clone();
        }
        let deg = self.degree().unwrap();
        let mut coeffs = vec![self.zero; deg * factor + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * factor] = *c;
        }
        UniPoly {
            var: self.var,
            zero: self.zero,
            coeffs,
        }
    }

    /// Evaluate at a polynomial over the same field in another variable.
    pub fn eval_poly(&self, x: &FqPoly) -> FqPoly {
        self.eval_map(x, |c| UniPoly::constant(x.var(), *c))
    }
}

// ---- Display ----

fn fmt_poly<C: Coeff>(
    p: &UniPoly<C>,
    f: &mut fmt::Formatter<'_>,
    show: impl Fn(&C) -> String,
) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    let mut first = true;
    for (i, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        let cs = show(c);
        let needs_parens = cs.contains('+') || cs.contains(' ');
        if i == 0 {
            if needs_parens {
                write!(f, "({cs})")?;
            } else {
                write!(f, "{cs}")?;
            }
            continue;
        }
        if c.is_one() {
            // coefficient elided
        } else if needs_parens {
            write!(f, "({cs})*")?;
        } else {
            write!(f, "{cs}*")?;
        }
        if i == 1 {
            write!(f, "{}", p.var)?;
        } else {
            write!(f, "{}^{}", p.var, i)?;
        }
    }
    Ok(())
}

impl<C: Coeff + fmt::Display> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self, f, |c| c.to_string())
    }
}

impl<C: Coeff> fmt::Debug for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self, f, |c| format!("{c:?}"))
    }
}
