//! Product-formula vectors among one weight's double zeta values and the
//! matching power of the period, and the count of independent relations
//! they span.
//!
//! For r + s = n with r, s ≥ 1 both divisible by q − 1, expanding the
//! product ζ(r)ζ(s) through the degree split of its double sum and
//! replacing each single zeta value by its ratio to a period power leaves
//! a vanishing combination
//!   (γ_n − γ_r γ_s)·π̃^n + Σ_{(i,j)} c_{i,j}·ζ(i, j) = 0,
//! where the sum runs over the weight-n index pairs, the period
//! coefficient lies in F_q(θ), and
//!   c_{i,j} = [(i,j) = (r,s)] + [(i,j) = (s,r)]
//!           + (−1)^{s−1} C(j−1, s−1) + (−1)^{r−1} C(j−1, r−1)  (mod p).
//!
//! Representation invariants: zeta slots follow the `even_index_pairs`
//! order of the weight; the period slot is a reduced rational function of
//! θ; slot coefficients live in the prime subfield. The relation count of
//! a weight is the rank over F_q(θ) of its vectors, defined only when
//! q − 1 divides the weight.

use crate::algebra::{FqElem, PolyMatrix, RatFunc, Var};
use crate::carlitz::CarlitzContext;
use crate::error::CarlitzError;
use crate::fmodule::even_index_pairs;

/// Coefficients of one vanishing combination: the period slot and one slot
/// per index pair of the weight.
#[derive(Debug, Clone)]
pub struct ChenVector {
    weight: usize,
    pi_slot: RatFunc,
    zeta_slots: Vec<FqElem>,
}

impl ChenVector {
    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Coefficient of the n-th period power, as a rational function of θ.
    pub fn pi_coefficient(&self) -> &RatFunc {
        &self.pi_slot
    }

    /// Coefficient at each index pair, in `even_index_pairs` order.
    pub fn zeta_coefficients(&self) -> &[FqElem] {
        &self.zeta_slots
    }

    pub fn is_zero(&self) -> bool {
        self.pi_slot.is_zero() && self.zeta_slots.iter().all(FqElem::is_zero)
    }
}

/// (−1)^bottom C(top, bottom) in the prime subfield.
fn signed_binomial(fq: &'static crate::algebra::Fq, top: usize, bottom: usize) -> FqElem {
    let c = fq.binomial(top as u64, bottom as u64);
    if bottom % 2 == 1 {
        c.neg()
    } else {
        c
    }
}

/// The vector obtained from the product ζ(r)ζ(s); requires both entries
/// divisible by q − 1 and a calibrated ratio table.
pub fn chen_vector(
    ctx: &CarlitzContext,
    r: usize,
    s: usize,
) -> Result<ChenVector, CarlitzError> {
    if r == 0 || s == 0 {
        return Err(CarlitzError::IndexOutOfRange(0));
    }
    let fq = ctx.field();
    let q = fq.q();
    for m in [r, s] {
        if (m as u64) % (q - 1) != 0 {
            return Err(CarlitzError::NotAEven {
                m: m as u64,
                divisor: q - 1,
            });
        }
    }
    let n = r + s;
    let pi_slot = ctx
        .euler_ratio(n)?
        .sub(&ctx.euler_ratio(r)?.mul(&ctx.euler_ratio(s)?));
    let zeta_slots = even_index_pairs(fq, n)
        .into_iter()
        .map(|(i, j)| {
            let mut c = signed_binomial(fq, j - 1, s - 1).add(&signed_binomial(fq, j - 1, r - 1));
            if (i, j) == (r, s) {
                c = c.add(&fq.one());
            }
            if (i, j) == (s, r) {
                c = c.add(&fq.one());
            }
            c
        })
        .collect();
    Ok(ChenVector {
        weight: n,
        pi_slot,
        zeta_slots,
    })
}

/// All distinct product vectors of one weight, one per unordered pair
/// {r, s} with both entries divisible by q − 1.
pub fn chen_vectors(
    ctx: &CarlitzContext,
    n: usize,
) -> Result<Vec<ChenVector>, CarlitzError> {
    let q = ctx.field().q() as usize;
    (1..=n / 2)
        .filter(|r| r % (q - 1) == 0)
        .map(|r| chen_vector(ctx, r, n - r))
        .collect()
}

/// Rank over F_q(θ) of the weight's product vectors: the number of
/// independent relations with prime-field zeta coefficients. Defined only
/// for weights divisible by q − 1.
pub fn fp_linear_count(ctx: &CarlitzContext, n: usize) -> Result<usize, CarlitzError> {
    if n == 0 {
        return Err(CarlitzError::IndexOutOfRange(0));
    }
    let fq = ctx.field();
    let q = fq.q();
    if (n as u64) % (q - 1) != 0 {
        return Err(CarlitzError::NotAEven {
            m: n as u64,
            divisor: q - 1,
        });
    }
    let vectors = chen_vectors(ctx, n)?;
    if vectors.is_empty() {
        return Ok(0);
    }
    let ncols = 1 + vectors[0].zeta_slots.len();
    let rows = vectors
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(ncols);
            row.push(v.pi_slot.clone());
            row.extend(
                v.zeta_slots
                    .iter()
                    .map(|c| RatFunc::from_elem(Var::Theta, *c)),
            );
            crate::algebra::clear_denominators(fq, Var::Theta, &row)
        })
        .collect();
    Ok(PolyMatrix::new(fq, ncols, rows).rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;

    fn calibrated(p: u64) -> &'static CarlitzContext {
        let ctx = CarlitzContext::get(Fq::get(p, 1).unwrap());
        ctx.set_calibration(ctx.field().one()).unwrap();
        ctx
    }

    #[test]
    fn counts_low_weights_q2() {
        let ctx = calibrated(2);
        let expect = [(2, 0), (3, 1), (4, 1), (5, 1), (6, 2), (7, 2), (8, 2)];
        for (n, count) in expect {
            assert_eq!(fp_linear_count(ctx, n).unwrap(), count, "weight {n}");
        }
    }

    #[test]
    fn counts_low_weights_q3() {
        let ctx = calibrated(3);
        for (n, count) in [(2, 0), (4, 0), (6, 0), (8, 1)] {
            assert_eq!(fp_linear_count(ctx, n).unwrap(), count, "weight {n}");
        }
        assert!(matches!(
            fp_linear_count(ctx, 5),
            Err(CarlitzError::NotAEven { m: 5, divisor: 2 })
        ));
    }

    #[test]
    fn weight_two_vector_vanishes_q2() {
        let ctx = calibrated(2);
        assert!(chen_vector(ctx, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn weight_four_vector_vanishes_q3() {
        let ctx = calibrated(3);
        let v = chen_vector(ctx, 2, 2).unwrap();
        assert!(v.is_zero(), "slots {:?}", v.zeta_coefficients());
    }

    #[test]
    fn weight_three_vector_q2() {
        let ctx = calibrated(2);
        let v = chen_vector(ctx, 1, 2).unwrap();
        // Slots follow pairs (1,2), (2,1); the second cancels mod 2 and the
        // period coefficient stays nonzero.
        let fq = ctx.field();
        assert_eq!(v.zeta_coefficients(), &[fq.one(), fq.zero()]);
        assert!(!v.pi_coefficient().is_zero());
    }

    #[test]
    fn uncalibrated_context_is_rejected() {
        let ctx = CarlitzContext::get(Fq::get(5, 1).unwrap());
        assert!(matches!(
            chen_vector(ctx, 4, 4),
            Err(CarlitzError::Uncalibrated)
        ));
    }
}
