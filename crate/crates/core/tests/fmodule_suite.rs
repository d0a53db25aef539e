//! Integration suite for the two-block reduction engine: agreement with the
//! direct tensor action, well-definedness of the induced scalar action,
//! vanishing of rewrite-rule kernels, linearity, and second-block descent
//! for every even-index pair in range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dzv_core::algebra::{BiPoly, Fq, FqPoly, Var};
use dzv_core::carlitz::{carlitz_action, CarlitzContext, TensorPoint};
use dzv_core::fmodule::{
    act, embed_tensor, normalize, special_point_vn, xi_point, ModuleElement, ModuleShape,
};

fn random_elem(fq: &'static Fq, rng: &mut ChaCha8Rng) -> dzv_core::algebra::FqElem {
    fq.elem(rng.random_range(0..fq.q())).unwrap()
}

fn random_theta_poly(fq: &'static Fq, rng: &mut ChaCha8Rng, max_deg: usize) -> FqPoly {
    let deg = rng.random_range(0..=max_deg);
    FqPoly::from_vec(
        Var::Theta,
        fq.zero(),
        (0..=deg).map(|_| random_elem(fq, rng)).collect(),
    )
}

fn random_t_poly(fq: &'static Fq, rng: &mut ChaCha8Rng, max_deg: usize) -> FqPoly {
    let deg = rng.random_range(0..=max_deg);
    FqPoly::from_vec(
        Var::T,
        fq.zero(),
        (0..=deg).map(|_| random_elem(fq, rng)).collect(),
    )
}

fn random_bipoly(fq: &'static Fq, rng: &mut ChaCha8Rng, deg_t: usize, deg_theta: usize) -> BiPoly {
    let coeffs = (0..=rng.random_range(0..=deg_t))
        .map(|_| random_theta_poly(fq, rng, deg_theta))
        .collect();
    BiPoly::from_t_coeffs(fq, coeffs)
}

fn random_point(fq: &'static Fq, rng: &mut ChaCha8Rng, n: usize, deg: usize) -> TensorPoint {
    TensorPoint::new(fq, (0..n).map(|_| random_theta_poly(fq, rng, deg)).collect())
}

/// Keystone: the reduction path computes the same t-action as the direct
/// coordinate step, for every split of the tensor power into a shape.
#[test]
fn reduction_action_matches_tensor_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for s1 in 1..=4usize {
            for s2 in 1..=4usize {
                let shape = ModuleShape::new(fq, s1, s2).unwrap();
                for _ in 0..6 {
                    let z = random_point(fq, &mut rng, shape.n(), 3);
                    let a = random_t_poly(fq, &mut rng, 8);
                    let via_reduction =
                        normalize(ctx, &shape, &embed_tensor(&shape, &z).scale_t(&a)).unwrap();
                    assert!(via_reduction.second_block_is_zero());
                    let direct = carlitz_action(&a, &z);
                    assert_eq!(
                        via_reduction.first_block(),
                        direct.coords(),
                        "paths disagree at q={p}, s=({s1},{s2})"
                    );
                }
            }
        }
    }
}

/// The scalar action descends to normal forms: acting twice equals acting by
/// the product.
#[test]
fn action_well_defined_on_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for (s1, s2) in [(1, 1), (2, 1), (1, 2), (2, 3)] {
            let shape = ModuleShape::new(fq, s1, s2).unwrap();
            for _ in 0..5 {
                let v = ModuleElement::new(
                    random_bipoly(fq, &mut rng, 4, 3),
                    random_bipoly(fq, &mut rng, 4, 3),
                );
                let x = normalize(ctx, &shape, &v).unwrap();
                let a = random_t_poly(fq, &mut rng, 4);
                let b = random_t_poly(fq, &mut rng, 4);
                let stepwise = act(ctx, &a, &act(ctx, &b, &x).unwrap()).unwrap();
                let combined = act(ctx, &a.mul(&b), &x).unwrap();
                assert_eq!(stepwise.coords(), combined.coords());
            }
        }
    }
}

/// Elements of the rewrite kernel vanish: b·(t−θ)^n·m_1 − b^{(1)}·m_1 and
/// b·(t−θ)^{s2}·m_2 − b^{(1)}·m_2 + b^{(1)}·H_{s1−1}·m_1 normalize to zero.
#[test]
fn rewrite_kernels_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for (s1, s2) in [(1, 1), (2, 2), (3, 1), (1, 3)] {
            let shape = ModuleShape::new(fq, s1, s2).unwrap();
            let h = ctx.anderson_thakur(s1 - 1).unwrap().into_poly();
            for _ in 0..5 {
                let b = random_bipoly(fq, &mut rng, 3, 3);
                let b1 = b.frobenius_twist(1).unwrap();

                let tmt_n = BiPoly::t_minus_theta(fq).pow(shape.n() as u64);
                let first = ModuleElement::from_g1(fq, b.mul(&tmt_n).sub(&b1));
                assert!(normalize(ctx, &shape, &first).unwrap().is_zero());

                let tmt_s2 = BiPoly::t_minus_theta(fq).pow(s2 as u64);
                let second = ModuleElement::new(b1.mul(&h), b.mul(&tmt_s2).sub(&b1));
                assert!(normalize(ctx, &shape, &second).unwrap().is_zero());
            }
        }
    }
}

/// Reduction is additive and F_q-linear coordinate-wise.
#[test]
fn normalize_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        let shape = ModuleShape::new(fq, 2, 2).unwrap();
        for _ in 0..8 {
            let x = ModuleElement::new(
                random_bipoly(fq, &mut rng, 5, 3),
                random_bipoly(fq, &mut rng, 5, 3),
            );
            let y = ModuleElement::new(
                random_bipoly(fq, &mut rng, 5, 3),
                random_bipoly(fq, &mut rng, 5, 3),
            );
            let c = random_elem(fq, &mut rng);
            let lhs = normalize(ctx, &shape, &x.add(&y)).unwrap();
            let nx = normalize(ctx, &shape, &x).unwrap();
            let ny = normalize(ctx, &shape, &y).unwrap();
            let sum: Vec<FqPoly> = nx
                .coords()
                .iter()
                .zip(ny.coords())
                .map(|(a, b)| a.add(b))
                .collect();
            assert_eq!(lhs.coords(), &sum[..]);

            let scaled_elem = ModuleElement::new(x.g1().scale_elem(&c), x.g2().scale_elem(&c));
            let lhs_scaled = normalize(ctx, &shape, &scaled_elem).unwrap();
            let rhs_scaled: Vec<FqPoly> = nx.coords().iter().map(|p| p.scale(&c)).collect();
            assert_eq!(lhs_scaled.coords(), &rhs_scaled[..]);
        }
    }
}

/// Every even-index pair in the sweep descends: the second block of
/// α·v_s vanishes, so Ξ_s is a genuine tensor point.
#[test]
fn xi_descends_for_even_pairs() {
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for n in 2..=10usize {
            for s1 in 1..n {
                let s2 = n - s1;
                if (s2 as u64) % (p - 1) != 0 {
                    continue;
                }
                let xi = xi_point(ctx, s1, s2).unwrap();
                assert_eq!(xi.dim(), n);
            }
        }
    }
}

/// H_{n−1} reduces to the canonical unit point in the degenerate regime.
#[test]
fn vn_degenerate_regime() {
    for p in [2u64, 3, 5] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for n in 1..(p as usize).max(2) {
            let v = special_point_vn(ctx, n).unwrap();
            for (i, c) in v.coords().iter().enumerate() {
                if i + 1 == n {
                    assert!(c.is_one());
                } else {
                    assert!(c.is_zero());
                }
            }
        }
    }
}
