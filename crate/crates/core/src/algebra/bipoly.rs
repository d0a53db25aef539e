//! Bivariate polynomials in t and θ over F_q, stored t-major.
//!
//! A `BiPoly` is a sequence indexed by t-degree whose entries are
//! polynomials in θ. The Frobenius twist raises θ (and only θ) to the
//! q-th power; on F_q[θ] coefficients that is exponent dilation, since
//! elements of F_q are fixed by x -> x^q. Negative twists are rejected:
//! every algorithm here is arranged so that only forward twists occur.
//!
//! The falling basis of exponent conversions expresses an element in powers
//! of (t - θ); twisting does not commute with that basis, so conversions
//! are always performed on the t-power form.

use std::fmt;

use super::fq::{Fq, FqElem};
use super::poly::{FqPoly, UniPoly, Var};
use crate::error::AlgebraError;

#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    fq: &'static Fq,
    inner: UniPoly<FqPoly>,
}

impl BiPoly {
    // ---- Constructors ----

    pub fn zero(fq: &'static Fq) -> Self {
        let th_zero = FqPoly::zero(Var::Theta, &fq.zero());
        BiPoly {
            fq,
            inner: UniPoly::zero(Var::T, &th_zero),
        }
    }

    pub fn one(fq: &'static Fq) -> Self {
        BiPoly::from_theta_poly(FqPoly::one(Var::Theta, &fq.zero()))
    }

    /// Embed a polynomial in θ as a t-degree-zero element.
    pub fn from_theta_poly(p: FqPoly) -> Self {
        assert_eq!(p.var(), Var::Theta, "expected a θ-polynomial");
        let fq = field_of(&p);
        BiPoly {
            fq,
            inner: UniPoly::constant(Var::T, p),
        }
    }

    /// Lift a polynomial in t to a bivariate element.
    pub fn from_t_poly(p: &FqPoly) -> Self {
        assert_eq!(p.var(), Var::T, "expected a t-polynomial");
        let fq = field_of(p);
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| UniPoly::constant(Var::Theta, *c))
            .collect();
        BiPoly::from_t_coeffs(fq, coeffs)
    }

    /// Build from θ-polynomial coefficients of ascending t-degree.
    pub fn from_t_coeffs(fq: &'static Fq, coeffs: Vec<FqPoly>) -> Self {
        let th_zero = FqPoly::zero(Var::Theta, &fq.zero());
        BiPoly {
            fq,
            inner: UniPoly::from_vec(Var::T, th_zero, coeffs),
        }
    }

    /// The monomial t.
    pub fn t(fq: &'static Fq) -> Self {
        let th_zero = FqPoly::zero(Var::Theta, &fq.zero());
        BiPoly {
            fq,
            inner: UniPoly::variable(Var::T, &th_zero),
        }
    }

    /// The monomial θ.
    pub fn theta(fq: &'static Fq) -> Self {
        BiPoly::from_theta_poly(FqPoly::variable(Var::Theta, &fq.zero()))
    }

    /// t - θ, the recurring pivot element.
    pub fn t_minus_theta(fq: &'static Fq) -> Self {
        &BiPoly::t(fq) - &BiPoly::theta(fq)
    }

    // ---- Accessors ----

    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn deg_t(&self) -> Option<usize> {
        self.inner.degree()
    }

    /// Largest θ-degree over all t-coefficients (`None` for zero).
    pub fn sup_degree(&self) -> Option<usize> {
        self.inner
            .coeffs()
            .iter()
            .filter_map(|c| c.degree())
            .max()
    }

    /// Coefficient of t^i as a θ-polynomial.
    pub fn t_coeff(&self, i: usize) -> &FqPoly {
        self.inner.coeff(i)
    }

    pub fn t_coeffs(&self) -> &[FqPoly] {
        self.inner.coeffs()
    }

    /// Coefficient of θ^r as a t-polynomial over F_q.
    pub fn theta_coeff(&self, r: usize) -> FqPoly {
        let coeffs: Vec<FqElem> = self
            .inner
            .coeffs()
            .iter()
            .map(|c| *c.coeff(r))
            .collect();
        UniPoly::from_vec(Var::T, self.fq.zero(), coeffs)
    }

    /// View as a polynomial in θ whose coefficients are t-polynomials.
    pub fn theta_major(&self) -> UniPoly<FqPoly> {
        let t_zero = FqPoly::zero(Var::T, &self.fq.zero());
        let sup = match self.sup_degree() {
            None => return UniPoly::zero(Var::Theta, &t_zero),
            Some(s) => s,
        };
        let coeffs = (0..=sup).map(|r| self.theta_coeff(r)).collect();
        UniPoly::from_vec(Var::Theta, t_zero, coeffs)
    }

    /// Rebuild from a θ-major view.
    pub fn from_theta_major(fq: &'static Fq, p: &UniPoly<FqPoly>) -> Self {
        assert_eq!(p.var(), Var::Theta);
        let deg_t = p.coeffs().iter().filter_map(|c| c.degree()).max();
        let mut rows: Vec<FqPoly> = Vec::new();
        if let Some(dt) = deg_t {
            for i in 0..=dt {
                let coeffs: Vec<FqElem> = p.coeffs().iter().map(|c| *c.coeff(i)).collect();
                rows.push(UniPoly::from_vec(Var::Theta, fq.zero(), coeffs));
            }
        }
        BiPoly::from_t_coeffs(fq, rows)
    }

    // ---- Arithmetic ----

    pub fn add(&self, rhs: &Self) -> Self {
        BiPoly {
            fq: self.fq,
            inner: self.inner.add(&rhs.inner),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        BiPoly {
            fq: self.fq,
            inner: self.inner.sub(&rhs.inner),
        }
    }

    pub fn neg(&self) -> Self {
        BiPoly {
            fq: self.fq,
            inner: self.inner.neg(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        BiPoly {
            fq: self.fq,
            inner: self.inner.mul(&rhs.inner),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        BiPoly {
            fq: self.fq,
            inner: self.inner.pow(k),
        }
    }

    /// Multiply by a θ-polynomial.
    pub fn scale_theta(&self, c: &FqPoly) -> Self {
        assert_eq!(c.var(), Var::Theta);
        BiPoly {
            fq: self.fq,
            inner: self.inner.scale(c),
        }
    }

    /// Multiply by an element of F_q.
    pub fn scale_elem(&self, c: &FqElem) -> Self {
        self.scale_theta(&UniPoly::constant(Var::Theta, *c))
    }

    /// The m-th Frobenius twist: θ -> θ^(q^m), t fixed. Negative twists
    /// never materialize in any algorithm here and are an error.
    pub fn frobenius_twist(&self, m: i64) -> Result<Self, AlgebraError> {
        if m < 0 {
            return Err(AlgebraError::NegativeTwist(m));
        }
        if m == 0 || self.is_zero() {
            return Ok(self.clone());
        }
        let factor = (self.fq.q() as usize).pow(m as u32);
        let rows = self
            .inner
            .coeffs()
            .iter()
            .map(|c| c.dilate_exponents(factor))
            .collect();
        Ok(BiPoly::from_t_coeffs(self.fq, rows))
    }

    /// Substitute t = θ, collapsing to a θ-polynomial.
    pub fn eval_t_at_theta(&self) -> FqPoly {
        let theta = FqPoly::variable(Var::Theta, &self.fq.zero());
        self.inner.eval(&theta)
    }

    /// Long division in t that must be exact.
    pub fn exact_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        let d = rhs.deg_t().ok_or(AlgebraError::DivisionByZero)?;
        let mut rem = self.inner.clone();
        let th_zero = FqPoly::zero(Var::Theta, &self.fq.zero());
        let n = match rem.degree() {
            None => return Ok(BiPoly::zero(self.fq)),
            Some(n) if n < d => return Err(AlgebraError::InexactDivision),
            Some(n) => n,
        };
        let lead = rhs.inner.leading().unwrap();
        let mut quot = vec![th_zero.clone(); n - d + 1];
        while let Some(m) = rem.degree() {
            if m < d {
                break;
            }
            let factor = rem.leading().unwrap().exact_div(lead)?;
            let shift = m - d;
            let mut coeffs = rem.coeffs().to_vec();
            for (j, rc) in rhs.inner.coeffs().iter().enumerate() {
                coeffs[shift + j] = coeffs[shift + j].sub(&factor.mul(rc));
            }
            rem = UniPoly::from_vec(Var::T, th_zero.clone(), coeffs);
            quot[shift] = factor;
        }
        if rem.is_zero() {
            Ok(BiPoly {
                fq: self.fq,
                inner: UniPoly::from_vec(Var::T, th_zero, quot),
            })
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    // ---- Falling basis ----

    /// Coefficients u_k with self = Σ u_k (t - θ)^k, ascending k.
    ///
    /// Computed by repeated synthetic division at the root θ; each step
    /// only shifts and adds θ-polynomials.
    pub fn to_falling_basis(&self) -> Vec<FqPoly> {
        let mut rows: Vec<FqPoly> = self.inner.coeffs().to_vec();
        let mut out = Vec::with_capacity(rows.len());
        while !rows.is_empty() {
            // Divide Σ rows[i] t^i by (t - θ): Horner from the top.
            let mut quot = vec![FqPoly::zero(Var::Theta, &self.fq.zero()); rows.len() - 1];
            let mut acc = rows[rows.len() - 1].clone();
            for i in (0..rows.len() - 1).rev() {
                quot[i] = acc.clone();
                // remainder accumulator: acc*θ + rows[i]
                acc = acc.shift_up(1).add(&rows[i]);
            }
            out.push(acc);
            while quot.last().is_some_and(FqPoly::is_zero) {
                quot.pop();
            }
            rows = quot;
        }
        while out.last().is_some_and(FqPoly::is_zero) {
            out.pop();
        }
        out
    }

    /// Rebuild from falling-basis coefficients (ascending powers of t - θ).
    pub fn from_falling_basis(fq: &'static Fq, coeffs: &[FqPoly]) -> Self {
        let pivot = BiPoly::t_minus_theta(fq);
        let mut acc = BiPoly::zero(fq);
        for u in coeffs.iter().rev() {
            acc = acc.mul(&pivot).add(&BiPoly::from_theta_poly(u.clone()));
        }
        acc
    }
}

fn field_of(p: &FqPoly) -> &'static Fq {
    p.zero_coeff().field()
}

impl std::ops::Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: Self) -> BiPoly {
        BiPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: Self) -> BiPoly {
        BiPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: Self) -> BiPoly {
        BiPoly::mul(self, rhs)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner)
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_poly(fq: &'static Fq, digits: &[u64]) -> FqPoly {
        let coeffs = digits.iter().map(|&d| fq.elem(d).unwrap()).collect();
        UniPoly::from_vec(Var::Theta, fq.zero(), coeffs)
    }

    #[test]
    fn twist_dilates_theta_only() {
        let f2 = Fq::get(2, 1).unwrap();
        // f = (θ^2 + θ) t + 1
        let f = BiPoly::from_t_coeffs(
            f2,
            vec![theta_poly(f2, &[1]), theta_poly(f2, &[0, 1, 1])],
        );
        let tw = f.frobenius_twist(1).unwrap();
        assert_eq!(tw.t_coeff(1), &theta_poly(f2, &[0, 0, 1, 0, 1]));
        assert_eq!(tw.t_coeff(0), &theta_poly(f2, &[1]));
        assert!(f.frobenius_twist(-1).is_err());
        assert_eq!(f.frobenius_twist(0).unwrap(), f);
    }

    #[test]
    fn falling_basis_round_trip() {
        let f3 = Fq::get(3, 1).unwrap();
        let f = BiPoly::from_t_coeffs(
            f3,
            vec![
                theta_poly(f3, &[2, 1]),
                theta_poly(f3, &[0, 2]),
                theta_poly(f3, &[1]),
                theta_poly(f3, &[0, 0, 1]),
            ],
        );
        let u = f.to_falling_basis();
        let back = BiPoly::from_falling_basis(f3, &u);
        assert_eq!(back, f);
        // Degree in (t - θ) matches degree in t.
        assert_eq!(u.len() - 1, f.deg_t().unwrap());
    }

    #[test]
    fn falling_basis_of_t_squared() {
        // t^2 = (t-θ)^2 + 2θ(t-θ) + θ^2; over F_2 the middle term is 0.
        let f2 = Fq::get(2, 1).unwrap();
        let t = BiPoly::t(f2);
        let u = (&t * &t).to_falling_basis();
        assert_eq!(u.len(), 3);
        assert_eq!(u[0], theta_poly(f2, &[0, 0, 1]));
        assert!(u[1].is_zero());
        assert!(u[2].is_one());
    }

    #[test]
    fn exact_division() {
        let f2 = Fq::get(2, 1).unwrap();
        let a = BiPoly::t_minus_theta(f2);
        let sq = a.pow(5);
        assert_eq!(sq.exact_div(&a.pow(2)).unwrap(), a.pow(3));
        let t = BiPoly::t(f2);
        assert!(sq.exact_div(&(&t * &t)).is_err());
    }
}
