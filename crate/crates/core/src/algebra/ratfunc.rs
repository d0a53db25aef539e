//! Rational functions over F_q in one variable.
//!
//! Stored reduced: the denominator is monic and coprime to the numerator;
//! zero is 0/1. These serve both as the fraction field F_q(t) for solver
//! coefficients and as F_q(θ) entries in ratio vectors.

use std::fmt;

use super::fq::FqElem;
use super::poly::{Coeff, CoeffField, FqPoly, UniPoly, Var};
use crate::error::AlgebraError;

#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: FqPoly,
    den: FqPoly,
}

impl RatFunc {
    /// Build num/den, reducing to lowest terms with a monic denominator.
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        assert_eq!(num.var(), den.var(), "mixed-variable rational function");
        let mut r = RatFunc { num, den };
        r.reduce()?;
        Ok(r)
    }

    pub fn from_poly(num: FqPoly) -> Self {
        let den = FqPoly::one(num.var(), num.zero_coeff());
        RatFunc { num, den }
    }

    pub fn from_elem(var: Var, c: FqElem) -> Self {
        RatFunc::from_poly(UniPoly::constant(var, c))
    }

    pub fn zero(var: Var, exemplar: FqElem) -> Self {
        RatFunc::from_poly(UniPoly::zero(var, &exemplar))
    }

    fn reduce(&mut self) -> Result<(), AlgebraError> {
        if self.num.is_zero() {
            self.den = FqPoly::one(self.den.var(), self.den.zero_coeff());
            return Ok(());
        }
        let g = self.num.gcd(&self.den);
        if g.degree().is_some_and(|d| d > 0) {
            self.num = self.num.exact_div(&g)?;
            self.den = self.den.exact_div(&g)?;
        }
        let lead_inv = self.den.leading().unwrap().inv()?;
        if !lead_inv.is_one() {
            self.num = self.num.scale(&lead_inv);
            self.den = self.den.scale(&lead_inv);
        }
        Ok(())
    }

    pub fn num(&self) -> &FqPoly {
        &self.num
    }

    pub fn den(&self) -> &FqPoly {
        &self.den
    }

    pub fn var(&self) -> Var {
        self.num.var()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("denominators are nonzero")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("denominators are nonzero")
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn scale_poly(&self, p: &FqPoly) -> Self {
        RatFunc::new(&self.num * p, self.den.clone()).expect("denominator unchanged")
    }

    /// The polynomial this ratio reduces to, if the denominator is one.
    pub fn as_polynomial(&self) -> Result<&FqPoly, AlgebraError> {
        if self.is_polynomial() {
            Ok(&self.num)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }
}

impl Coeff for RatFunc {
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn is_one(&self) -> bool {
        RatFunc::is_one(self)
    }
    fn zero_like(&self) -> Self {
        RatFunc {
            num: UniPoly::zero(self.num.var(), self.num.zero_coeff()),
            den: FqPoly::one(self.den.var(), self.den.zero_coeff()),
        }
    }
    fn one_like(&self) -> Self {
        RatFunc {
            num: FqPoly::one(self.num.var(), self.num.zero_coeff()),
            den: FqPoly::one(self.den.var(), self.den.zero_coeff()),
        }
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

impl CoeffField for RatFunc {
    fn inv_ref(&self) -> Result<Self, AlgebraError> {
        self.inv()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::Fq;

    #[test]
    fn reduction_and_field_ops() {
        let f3 = Fq::get(3, 1).unwrap();
        let t = FqPoly::variable(Var::T, &f3.zero());
        let one = FqPoly::one(Var::T, &f3.zero());
        // (t^2 - 1)/(t - 1) reduces to t + 1.
        let num = &(&t * &t) - &one;
        let den = &t - &one;
        let r = RatFunc::new(num, den).unwrap();
        assert_eq!(r.num(), &(&t + &one));
        assert!(r.is_polynomial());
        let x = RatFunc::new(one.clone(), t.clone()).unwrap();
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), RatFunc::from_poly(one.clone()));
        assert_eq!(x.sub(&x), RatFunc::zero(Var::T, f3.zero()));
    }

    #[test]
    fn denominators_stay_monic() {
        let f5 = Fq::get(5, 1).unwrap();
        let t = FqPoly::variable(Var::T, &f5.zero());
        let two = f5.elem(2).unwrap();
        // t / (2 t^2) = 3 / t over F_5.
        let r = RatFunc::new(t.clone(), (&t * &t).scale(&two)).unwrap();
        assert_eq!(r.den(), &t);
        assert_eq!(r.num(), &FqPoly::constant(Var::T, f5.elem(3).unwrap()));
    }
}
