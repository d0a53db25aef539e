//! Two-block twisted-module reduction: normal forms modulo the image of
//! (twist − 1) and the special points they produce.
//!
//! The module attached to an index pair (s1, s2) has two generators m_1, m_2
//! with twist relations σm_1 = (t−θ)^n m_1 and
//! σm_2 = H_{s1−1}^{(−1)}(t−θ)^n m_1 + (t−θ)^{s2} m_2, where n = s1+s2.
//! A residue basis is (t−θ)^{n−1}m_1, …, m_1, (t−θ)^{s2−1}m_2, …, m_2,
//! so d = n + s2 coordinates.
//!
//! Representation invariants:
//! - Elements are stored in the t-power basis (BiPoly); the falling
//!   (t−θ)-basis is materialized only transiently inside reduction splits,
//!   because twisting is coefficient-wise only in the t-power basis.
//! - Only forward twists are applied: every rewrite uses the congruence
//!   g·σx ≡ g^{(1)}·x, so coefficients stay in F_q[θ][t] throughout.
//! - Reduction order is fixed: the m_2 block runs to exhaustion before the
//!   m_1 block (the m_2 rule feeds the m_1 block, never conversely).

use crate::algebra::{BiPoly, Fq, FqPoly, Var};
use crate::carlitz::{CarlitzContext, TensorPoint};
use crate::error::ModuleError;

/// Index data for the two-block module: s1, s2 ≥ 1, n = s1+s2, d = n+s2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ModuleShape {
    fq: &'static Fq,
    s1: usize,
    s2: usize,
}

/// An element g1·m_1 + g2·m_2 with g1, g2 ∈ F_q[t,θ].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleElement {
    g1: BiPoly,
    g2: BiPoly,
}

/// The unique reduced representative of an element's class, as d coordinates
/// over F_q[θ] in the residue basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalForm {
    shape: ModuleShape,
    coords: Vec<FqPoly>,
}

// ---- Shape ----

impl ModuleShape {
    pub fn new(fq: &'static Fq, s1: usize, s2: usize) -> Result<Self, ModuleError> {
        if s1 == 0 || s2 == 0 {
            return Err(ModuleError::BadIndexPair { s1: s1 as u64, s2: s2 as u64 });
        }
        Ok(ModuleShape { fq, s1, s2 })
    }

    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    /// The tensor power n = s1 + s2 carried by the first block.
    pub fn n(&self) -> usize {
        self.s1 + self.s2
    }

    /// Total coordinate count d = n + s2.
    pub fn dim(&self) -> usize {
        self.n() + self.s2
    }
}

// ---- Elements ----

impl ModuleElement {
    pub fn new(g1: BiPoly, g2: BiPoly) -> Self {
        ModuleElement { g1, g2 }
    }

    /// The element g·m_1.
    pub fn from_g1(fq: &'static Fq, g1: BiPoly) -> Self {
        ModuleElement { g1, g2: BiPoly::zero(fq) }
    }

    pub fn zero(fq: &'static Fq) -> Self {
        ModuleElement { g1: BiPoly::zero(fq), g2: BiPoly::zero(fq) }
    }

    pub fn g1(&self) -> &BiPoly {
        &self.g1
    }

    pub fn g2(&self) -> &BiPoly {
        &self.g2
    }

    pub fn add(&self, rhs: &Self) -> Self {
        ModuleElement { g1: self.g1.add(&rhs.g1), g2: self.g2.add(&rhs.g2) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        ModuleElement { g1: self.g1.sub(&rhs.g1), g2: self.g2.sub(&rhs.g2) }
    }

    pub fn neg(&self) -> Self {
        ModuleElement { g1: self.g1.neg(), g2: self.g2.neg() }
    }

    /// Multiplies both blocks by a scalar a ∈ F_q[t] (the module action input).
    pub fn scale_t(&self, a: &FqPoly) -> Self {
        assert_eq!(a.var(), Var::T);
        let m = BiPoly::from_t_poly(a);
        ModuleElement { g1: self.g1.mul(&m), g2: self.g2.mul(&m) }
    }
}

// ---- Reduction ----

/// Splits g = qq·(t−θ)^power + r along the falling basis and rewrites
/// qq·(t−θ)^power into qq^{(1)} until the degree drops below `power`.
/// Returns the final falling coefficients (length ≤ power).
fn reduce_block(
    fq: &'static Fq,
    g: &BiPoly,
    power: usize,
    mut on_quotient: impl FnMut(&BiPoly),
) -> Result<Vec<FqPoly>, ModuleError> {
    let mut cur = g.clone();
    loop {
        let u = cur.to_falling_basis();
        if u.len() <= power {
            return Ok(u);
        }
        let qq = BiPoly::from_falling_basis(fq, &u[power..]);
        let r = BiPoly::from_falling_basis(fq, &u[..power]);
        let qq1 = qq.frobenius_twist(1).map_err(crate::error::CarlitzError::from)?;
        on_quotient(&qq1);
        cur = r.add(&qq1);
    }
}

/// Reduces an element to its normal form: the m_2 block first (each pass
/// feeds −qq^{(1)}·H_{s1−1} into the m_1 block), then the m_1 block.
pub fn normalize(
    ctx: &CarlitzContext,
    shape: &ModuleShape,
    elem: &ModuleElement,
) -> Result<NormalForm, ModuleError> {
    let fq = shape.fq;
    let h = ctx.anderson_thakur(shape.s1 - 1)?.into_poly();
    let mut g1 = elem.g1.clone();

    let u2 = reduce_block(fq, &elem.g2, shape.s2, |qq1| {
        g1 = g1.sub(&qq1.mul(&h));
    })?;
    let u1 = reduce_block(fq, &g1, shape.n(), |_| {})?;

    let n = shape.n();
    let s2 = shape.s2;
    let zero = FqPoly::zero(Var::Theta, &fq.zero());
    let mut coords = vec![zero; shape.dim()];
    for j in 1..=n {
        if n - j < u1.len() {
            coords[j - 1] = u1[n - j].clone();
        }
    }
    for j in 1..=s2 {
        if s2 - j < u2.len() {
            coords[n + j - 1] = u2[s2 - j].clone();
        }
    }
    Ok(NormalForm { shape: *shape, coords })
}

// ---- Normal forms ----

impl NormalForm {
    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    /// All d coordinates, first block then second block.
    pub fn coords(&self) -> &[FqPoly] {
        &self.coords
    }

    /// The n coordinates carried by the m_1 block.
    pub fn first_block(&self) -> &[FqPoly] {
        &self.coords[..self.shape.n()]
    }

    /// The s2 coordinates carried by the m_2 block.
    pub fn second_block(&self) -> &[FqPoly] {
        &self.coords[self.shape.n()..]
    }

    pub fn second_block_is_zero(&self) -> bool {
        self.second_block().iter().all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Rebuilds the canonical element representing this class:
    /// g1 = Σ_j a_j (t−θ)^{n−j}, g2 = Σ_j a_{n+j} (t−θ)^{s2−j}.
    pub fn lift(&self) -> ModuleElement {
        let fq = self.shape.fq;
        let n = self.shape.n();
        let s2 = self.shape.s2;
        let f1: Vec<FqPoly> = (0..n).map(|i| self.coords[n - 1 - i].clone()).collect();
        let f2: Vec<FqPoly> = (0..s2).map(|i| self.coords[n + s2 - 1 - i].clone()).collect();
        ModuleElement {
            g1: BiPoly::from_falling_basis(fq, &f1),
            g2: BiPoly::from_falling_basis(fq, &f2),
        }
    }

    /// Interprets the first block as a tensor point; requires the second
    /// block to vanish (the class then lies in the embedded tensor power).
    pub fn tensor_point(&self) -> Result<TensorPoint, ModuleError> {
        if !self.second_block_is_zero() {
            return Err(ModuleError::NonzeroSecondBlock);
        }
        Ok(TensorPoint::new(self.shape.fq, self.first_block().to_vec()))
    }
}

/// The F_q[t]-action on normal forms: multiply a lift by a and renormalize.
pub fn act(
    ctx: &CarlitzContext,
    a: &FqPoly,
    x: &NormalForm,
) -> Result<NormalForm, ModuleError> {
    normalize(ctx, &x.shape, &x.lift().scale_t(a))
}

/// Embeds a tensor point of power n = s1+s2 into the module (zero m_2 block).
pub fn embed_tensor(shape: &ModuleShape, z: &TensorPoint) -> ModuleElement {
    assert_eq!(z.dim(), shape.n(), "tensor power must match the shape");
    let f1: Vec<FqPoly> = (0..shape.n())
        .map(|i| z.coords()[shape.n() - 1 - i].clone())
        .collect();
    ModuleElement::from_g1(shape.fq, BiPoly::from_falling_basis(shape.fq, &f1))
}

// ---- Special points ----

/// Index pairs (s1, s2) of weight n with s2 divisible by q − 1, in
/// ascending s1 order. This is the canonical slot order for one weight.
pub fn even_index_pairs(fq: &'static Fq, n: usize) -> Vec<(usize, usize)> {
    let q = fq.q() as usize;
    (1..n)
        .filter(|s1| (n - s1) % (q - 1) == 0)
        .map(|s1| (s1, n - s1))
        .collect()
}

/// v_n: the tensor-power normal form of H_{n−1} (single-block reduction).
pub fn special_point_vn(ctx: &CarlitzContext, n: usize) -> Result<TensorPoint, ModuleError> {
    if n == 0 {
        return Err(ModuleError::BadIndexPair { s1: 0, s2: 0 });
    }
    let fq = ctx.field();
    let h = ctx.anderson_thakur(n - 1)?.into_poly();
    let u = reduce_block(fq, &h, n, |_| {})?;
    let zero = FqPoly::zero(Var::Theta, &fq.zero());
    let mut coords = vec![zero; n];
    for j in 1..=n {
        if n - j < u.len() {
            coords[j - 1] = u[n - j].clone();
        }
    }
    Ok(TensorPoint::new(fq, coords))
}

/// v_s: the normal form of −H_{s1−1}H_{s2−1}·m_1 + H_{s2−1}·m_2.
pub fn special_point_vs(
    ctx: &CarlitzContext,
    s1: usize,
    s2: usize,
) -> Result<NormalForm, ModuleError> {
    let shape = ModuleShape::new(ctx.field(), s1, s2)?;
    let h1 = ctx.anderson_thakur(s1 - 1)?.into_poly();
    let h2 = ctx.anderson_thakur(s2 - 1)?.into_poly();
    let elem = ModuleElement::new(h1.mul(&h2).neg(), h2);
    normalize(ctx, &shape, &elem)
}

/// Ξ_s: the tensor point α_{s2}(t)·v_s; the second block of the product must
/// vanish identically, which is asserted, never repaired.
pub fn xi_point(
    ctx: &CarlitzContext,
    s1: usize,
    s2: usize,
) -> Result<TensorPoint, ModuleError> {
    let q = ctx.field().q();
    if s2 == 0 || (s2 as u64) % (q - 1) != 0 {
        return Err(ModuleError::SecondIndexNotEven { s2: s2 as u64, divisor: q - 1 });
    }
    let vs = special_point_vs(ctx, s1, s2)?;
    let alpha = ctx.alpha_for(s2)?;
    let scaled = act(ctx, &alpha, &vs)?;
    scaled.tensor_point()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::carlitz_action;

    fn f2() -> &'static Fq {
        Fq::get(2, 1).unwrap()
    }

    fn f3() -> &'static Fq {
        Fq::get(3, 1).unwrap()
    }

    fn theta_poly(fq: &'static Fq, coeffs: &[i64]) -> FqPoly {
        FqPoly::from_vec(
            Var::Theta,
            fq.zero(),
            coeffs.iter().map(|&c| fq.from_int(c)).collect(),
        )
    }

    fn coords_of(nf: &NormalForm) -> Vec<FqPoly> {
        nf.coords().to_vec()
    }

    #[test]
    fn worked_examples_weight_two() {
        let fq = f2();
        let ctx = CarlitzContext::get(fq);
        let shape = ModuleShape::new(fq, 1, 1).unwrap();
        // normalize(m_1 + m_2) = (0, 1, 1).
        let e = ModuleElement::new(BiPoly::one(fq), BiPoly::one(fq));
        let nf = normalize(ctx, &shape, &e).unwrap();
        assert_eq!(
            coords_of(&nf),
            vec![theta_poly(fq, &[]), theta_poly(fq, &[1]), theta_poly(fq, &[1])]
        );
        // normalize((t²+t)(m_1 + m_2)) = (0, 1, 0).
        let a = FqPoly::from_vec(Var::T, fq.zero(), vec![fq.zero(), fq.one(), fq.one()]);
        let nf2 = normalize(ctx, &shape, &e.scale_t(&a)).unwrap();
        assert_eq!(
            coords_of(&nf2),
            vec![theta_poly(fq, &[]), theta_poly(fq, &[1]), theta_poly(fq, &[])]
        );
        assert!(nf2.second_block_is_zero());
    }

    #[test]
    fn special_points_small() {
        let fq = f2();
        let ctx = CarlitzContext::get(fq);
        // v_1 = (1).
        let v1 = special_point_vn(ctx, 1).unwrap();
        assert_eq!(v1.coords(), &[theta_poly(fq, &[1])]);
        // v_2 = (0, 1): H_1 = 1 is already reduced.
        let v2 = special_point_vn(ctx, 2).unwrap();
        assert_eq!(v2.coords(), &[theta_poly(fq, &[]), theta_poly(fq, &[1])]);
        // v_n = (0,…,0,1) whenever n ≤ q−1 (here vacuous beyond n=1 for q=2);
        // check it for q=3, n=2.
        let ctx3 = CarlitzContext::get(f3());
        let v2_q3 = special_point_vn(ctx3, 2).unwrap();
        assert_eq!(
            v2_q3.coords(),
            &[theta_poly(f3(), &[]), theta_poly(f3(), &[1])]
        );
    }

    #[test]
    fn vs_example_q3() {
        let ctx = CarlitzContext::get(f3());
        // s = (1,2): both H factors are 1, already reduced: (0,0,−1,0,1).
        let vs = special_point_vs(ctx, 1, 2).unwrap();
        let fq = f3();
        assert_eq!(
            coords_of(&vs),
            vec![
                theta_poly(fq, &[]),
                theta_poly(fq, &[]),
                theta_poly(fq, &[-1]),
                theta_poly(fq, &[]),
                theta_poly(fq, &[1]),
            ]
        );
    }

    #[test]
    fn xi_weight_two_q2() {
        let fq = f2();
        let ctx = CarlitzContext::get(fq);
        let xi = xi_point(ctx, 1, 1).unwrap();
        assert_eq!(xi.coords(), &[theta_poly(fq, &[]), theta_poly(fq, &[1])]);
        // Ξ_{(1,1)} is killed by α² = (t²+t)².
        let alpha = ctx.alpha_for(1).unwrap();
        assert!(carlitz_action(&alpha.pow(2), &xi).is_zero());
        // Parity guard: (q−1) ∤ s2 is rejected for q=3.
        let ctx3 = CarlitzContext::get(f3());
        assert!(matches!(
            xi_point(ctx3, 1, 1),
            Err(ModuleError::SecondIndexNotEven { .. })
        ));
    }

    #[test]
    fn normalize_rule_restated() {
        // normalize(b·(t−θ)^n·m_1) = normalize(b^{(1)}·m_1) for a sample b.
        let fq = f2();
        let ctx = CarlitzContext::get(fq);
        let shape = ModuleShape::new(fq, 2, 1).unwrap();
        let b = BiPoly::from_theta_poly(theta_poly(fq, &[1, 1, 0, 1]))
            .add(&BiPoly::t(fq).mul(&BiPoly::theta(fq)));
        let tmt = BiPoly::t_minus_theta(fq).pow(shape.n() as u64);
        let lhs = normalize(ctx, &shape, &ModuleElement::from_g1(fq, b.mul(&tmt))).unwrap();
        let rhs = normalize(
            ctx,
            &shape,
            &ModuleElement::from_g1(fq, b.frobenius_twist(1).unwrap()),
        )
        .unwrap();
        assert_eq!(coords_of(&lhs), coords_of(&rhs));
    }
}
