//! Truncated Laurent series in 1/θ over F_q, with explicit precision.
//!
//! A series is Σ_{j >= lead} c_j θ^(-j) with coefficients stored from
//! exponent `lead` (of 1/θ) upward; every exponent below `prec_end` is
//! exactly known, and exponents past the stored window are known to be
//! zero. Values that are exactly representable (polynomials, ratios carry
//! the sentinel "infinite" precision. All operations propagate the sound
//! precision of their result; reading a coefficient at or beyond the
//! precision horizon is an error, never a silent zero.

use std::fmt;

use super::fq::{Fq, FqElem};
use super::poly::FqPoly;
use crate::error::AlgebraError;

/// Sentinel precision for exactly known values.
pub const INF_PREC: i64 = i64::MAX / 4;

fn sat(p: i64) -> i64 {
    p.min(INF_PREC)
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    fq: &'static Fq,
    /// Exponent of 1/θ for coeffs[0]; equals prec_end when no coefficient
    /// is visibly nonzero.
    lead: i64,
    coeffs: Vec<FqElem>,
    /// Coefficients at exponents strictly below this are exact.
    prec_end: i64,
}

impl LaurentSeries {
    // ---- Constructors ----

    pub fn new(
        fq: &'static Fq,
        lead: i64,
        coeffs: Vec<FqElem>,
        prec_end: i64,
    ) -> Self {
        let mut s = LaurentSeries {
            fq,
            lead,
            coeffs,
            prec_end: sat(prec_end),
        };
        s.normalize();
        s
    }

    /// Zero to the stated precision.
    pub fn zero_prec(fq: &'static Fq, prec_end: i64) -> Self {
        let prec_end = sat(prec_end);
        LaurentSeries {
            fq,
            lead: prec_end,
            coeffs: Vec::new(),
            prec_end,
        }
    }

    /// Exact series of a polynomial in θ (degree d gives leading exponent -d).
    pub fn from_theta_poly(p: &FqPoly) -> Self {
        let fq = p.zero_coeff().field();
        match p.degree() {
            None => LaurentSeries::zero_prec(fq, INF_PREC),
            Some(d) => {
                let coeffs: Vec<FqElem> = p.coeffs().iter().rev().copied().collect();
                LaurentSeries::new(fq, -(d as i64), coeffs, INF_PREC)
            }
        }
    }

    pub fn from_elem(c: FqElem) -> Self {
        let fq = c.field();
        if c.is_zero() {
            LaurentSeries::zero_prec(fq, INF_PREC)
        } else {
            LaurentSeries::new(fq, 0, vec![c], INF_PREC)
        }
    }

    /// The monomial θ^k (k may be negative for powers of 1/θ).
    pub fn theta_pow(fq: &'static Fq, k: i64) -> Self {
        LaurentSeries::new(fq, -k, vec![fq.one()], INF_PREC)
    }

    fn normalize(&mut self) {
        assert!(
            self.coeffs.len() < (1 << 28),
            "series window unexpectedly large"
        );
        // Drop any stored coefficients at or beyond the precision horizon.
        if self.prec_end < INF_PREC {
            let max_len = (self.prec_end - self.lead).max(0) as usize;
            self.coeffs.truncate(max_len);
        }
        let lead_zeros = self
            .coeffs
            .iter()
            .take_while(|c| c.is_zero())
            .count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.lead += lead_zeros as i64;
        }
        while self.coeffs.last().is_some_and(FqElem::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lead = self.prec_end;
        }
    }

    // ---- Accessors ----

    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    /// Valuation: exponent of the first visibly nonzero coefficient.
    /// `None` when the series is zero to its precision.
    pub fn val(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lead)
        }
    }

    pub fn prec_end(&self) -> i64 {
        self.prec_end
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec_end == INF_PREC
    }

    /// Coefficient of θ^(-e), if e is within the precision horizon.
    pub fn coeff_at(&self, e: i64) -> Result<FqElem, AlgebraError> {
        if e >= self.prec_end {
            return Err(AlgebraError::InsufficientPrecision {
                need: e,
                have: self.prec_end,
            });
        }
        if e < self.lead || e >= self.lead + self.coeffs.len() as i64 {
            return Ok(self.fq.zero());
        }
        Ok(self.coeffs[(e - self.lead) as usize])
    }

    /// Valuation floor: the series is O(θ^(-v)) for this v even when no
    /// coefficient is visibly nonzero.
    fn val_floor(&self) -> i64 {
        self.val().unwrap_or(self.prec_end)
    }

    // ---- Arithmetic ----

    pub fn add(&self, rhs: &Self) -> Self {
        let prec = self.prec_end.min(rhs.prec_end);
        let lo = self.lead.min(rhs.lead).min(prec);
        if lo >= prec {
            return LaurentSeries::zero_prec(self.fq, prec);
        }
        let n = (prec.min(sat(self.top().max(rhs.top()))) - lo).max(0) as usize;
        let mut coeffs = vec![self.fq.zero(); n];
        for (slot, e) in coeffs.iter_mut().zip(lo..) {
            let a = self.stored(e);
            let b = rhs.stored(e);
            *slot = a.add(&b);
        }
        LaurentSeries::new(self.fq, lo, coeffs, prec)
    }

    fn top(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    /// Stored-or-implied-zero coefficient; caller guarantees e < prec_end.
    fn stored(&self, e: i64) -> FqElem {
        if e < self.lead || e >= self.top() {
            self.fq.zero()
        } else {
            self.coeffs[(e - self.lead) as usize]
        }
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            fq: self.fq,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(FqElem::neg).collect(),
            prec_end: self.prec_end,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &FqElem) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero_prec(self.fq, self.prec_end);
        }
        LaurentSeries {
            fq: self.fq,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
            prec_end: self.prec_end,
        }
    }

    /// Horizon of the error term O(θ^-p)·O(θ^-shift); an exact operand
    /// (p = INF_PREC) contributes no error at all.
    fn err_end(p: i64, shift: i64) -> i64 {
        if p >= INF_PREC {
            INF_PREC
        } else {
            sat(p.saturating_add(shift))
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // Error terms: O(θ^-p1)*y and x*O(θ^-p2) dominate the horizon.
        let prec = Self::err_end(self.prec_end, rhs.val_floor())
            .min(Self::err_end(rhs.prec_end, self.val_floor()));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LaurentSeries::zero_prec(self.fq, prec);
        }
        let lo = self.lead + rhs.lead;
        if lo >= prec {
            return LaurentSeries::zero_prec(self.fq, prec);
        }
        let n = (prec - lo).min((self.coeffs.len() + rhs.coeffs.len() - 1) as i64) as usize;
        let mut coeffs = vec![self.fq.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let jmax = n.saturating_sub(i).min(rhs.coeffs.len());
            for (j, b) in rhs.coeffs[..jmax].iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        LaurentSeries::new(self.fq, lo, coeffs, prec)
    }

    /// Inverse, truncated at the requested horizon when the input is exact.
    ///
    /// A series with valuation v known to precision p has an inverse sound
    /// to precision p - 2v; the result carries the smaller of that and the
    /// request.
    pub fn inv_to(&self, target_end: i64) -> Result<Self, AlgebraError> {
        if self.coeffs.is_empty() {
            return Err(if self.is_exact() {
                AlgebraError::DivisionByZero
            } else {
                AlgebraError::InsufficientPrecision {
                    need: self.prec_end,
                    have: self.prec_end,
                }
            });
        }
        let v = self.lead;
        let sound_end = sat(self.prec_end.saturating_sub(2 * v));
        let prec = sat(target_end).min(sound_end);
        let out_lead = -v;
        if out_lead >= prec {
            return Ok(LaurentSeries::zero_prec(self.fq, prec));
        }
        let rel = (prec - out_lead) as usize;
        // Write self = c θ^(-v) (1 + u); invert 1 + u by the convolution
        // recurrence w_0 = 1, w_k = -Σ_{j=1..k} u_j w_{k-j}.
        let c_inv = self.coeffs[0].inv()?;
        let u = |j: usize| -> FqElem {
            if j < self.coeffs.len() {
                self.coeffs[j].mul(&c_inv)
            } else {
                self.fq.zero()
            }
        };
        let mut w = Vec::with_capacity(rel);
        w.push(self.fq.one());
        for k in 1..rel {
            let mut acc = self.fq.zero();
            for j in 1..=k {
                let uj = u(j);
                if !uj.is_zero() {
                    acc = acc.add(&uj.mul(&w[k - j]));
                }
            }
            w.push(acc.neg());
        }
        let coeffs = w.into_iter().map(|x| x.mul(&c_inv)).collect();
        Ok(LaurentSeries::new(self.fq, out_lead, coeffs, prec))
    }

    pub fn div_to(&self, rhs: &Self, target_end: i64) -> Result<Self, AlgebraError> {
        Ok(self.mul(&rhs.inv_to(target_end.saturating_sub(self.val_floor().min(0)))?)
            .truncate_to(target_end))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = LaurentSeries::from_elem(self.fq.one());
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

    /// Lower the precision horizon (no-op if already at or below it).
    pub fn truncate_to(&self, prec_end: i64) -> Self {
        let prec_end = sat(prec_end);
        if prec_end >= self.prec_end {
            return self.clone();
        }
        LaurentSeries::new(self.fq, self.lead, self.coeffs.clone(), prec_end)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let e = -(self.lead + j as i64);
            match e {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "θ")?,
                1 => write!(f, "{c}*θ")?,
                _ if c.is_one() => write!(f, "θ^{e}")?,
                _ => write!(f, "{c}*θ^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        if self.prec_end < INF_PREC {
            write!(f, " + O(θ^{})", -self.prec_end)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{UniPoly, Var};

    fn theta_poly(fq: &'static Fq, digits: &[u64]) -> FqPoly {
        let coeffs = digits.iter().map(|&d| fq.elem(d).unwrap()).collect();
        UniPoly::from_vec(Var::Theta, fq.zero(), coeffs)
    }

    #[test]
    fn poly_series_round_trip() {
        let f2 = Fq::get(2, 1).unwrap();
        let p = theta_poly(f2, &[1, 1, 0, 1]); // θ^3 + θ + 1
        let s = LaurentSeries::from_theta_poly(&p);
        assert_eq!(s.val(), Some(-3));
        assert!(s.is_exact());
        assert_eq!(s.coeff_at(-3).unwrap(), f2.one());
        assert_eq!(s.coeff_at(-2).unwrap(), f2.zero());
        assert_eq!(s.coeff_at(100).unwrap(), f2.zero());
    }

    #[test]
    fn inverse_of_theta_squared_plus_theta() {
        // 1/(θ^2+θ) = θ^-2 + θ^-3 + θ^-4 + ... over F_2.
        let f2 = Fq::get(2, 1).unwrap();
        let p = LaurentSeries::from_theta_poly(&theta_poly(f2, &[0, 1, 1]));
        let inv = p.inv_to(10).unwrap();
        assert_eq!(inv.prec_end(), 10);
        assert_eq!(inv.val(), Some(2));
        for e in 2..10 {
            assert_eq!(inv.coeff_at(e).unwrap(), f2.one(), "exponent {e}");
        }
        assert!(inv.coeff_at(10).is_err());
        // Check x * (1/x) = 1 to precision.
        let prod = p.mul(&inv);
        assert_eq!(prod.coeff_at(0).unwrap(), f2.one());
        assert!(prod
            .coeffs
            .iter()
            .skip(1)
            .all(FqElem::is_zero));
    }

    #[test]
    fn precision_propagates_through_mul() {
        let f3 = Fq::get(3, 1).unwrap();
        // x = θ + 1 + O(θ^-5), y = θ^2 + O(θ^-3)
        let x = LaurentSeries::new(f3, -1, vec![f3.one(), f3.one()], 5);
        let y = LaurentSeries::new(f3, -2, vec![f3.one()], 3);
        let xy = x.mul(&y);
        // Horizons: p1 + v2 = 5 - 2 = 3, p2 + v1 = 3 - 1 = 2.
        assert_eq!(xy.prec_end(), 2);
        assert_eq!(xy.val(), Some(-3));
    }

    #[test]
    fn zero_to_precision_absorbs() {
        let f2 = Fq::get(2, 1).unwrap();
        let z = LaurentSeries::zero_prec(f2, 4);
        let x = LaurentSeries::from_elem(f2.one());
        assert!(z.add(&x).coeff_at(0).is_ok());
        assert_eq!(z.add(&x).prec_end(), 4);
        let prod = z.mul(&x);
        assert!(prod.is_zero_to_prec());
        assert_eq!(prod.prec_end(), 4);
    }
}
