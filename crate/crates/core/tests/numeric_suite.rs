//! Integration suite for the analytic oracle: the exact and series power-sum
//! routes against each other, truncation stability, calibration of the Euler
//! ratio, numeric vanishing of the product-formula vectors, a closed-form
//! cross identity, and end-to-end verification of relation certificates with
//! a corrupted-certificate negative control.

use dzv_core::algebra::{Fq, FqPoly, LaurentSeries, RatFunc, UniPoly, Var};
use dzv_core::carlitz::CarlitzContext;
use dzv_core::chen::chen_vectors;
use dzv_core::fmodule::{even_index_pairs, special_point_vn, xi_point};
use dzv_core::numeric::{
    calibrate, pi_power, power_sum, ratfunc_series, verify_relation, Verification, ZetaEvaluator,
    ZetaIndex,
};
use dzv_core::siegel::{RelationBasis, SiegelSystem};

fn contexts() -> Vec<&'static CarlitzContext> {
    [(2u64, 1u32), (3, 1)]
        .into_iter()
        .map(|(p, e)| CarlitzContext::get(Fq::get(p, e).unwrap()))
        .collect()
}

/// Solve for all relations among the weight-n pair points.
fn pair_relations(
    ctx: &'static CarlitzContext,
    n: usize,
) -> (Vec<ZetaIndex>, RelationBasis) {
    let fq = ctx.field();
    let pairs = even_index_pairs(fq, n);
    let points = pairs
        .iter()
        .map(|&(s1, s2)| xi_point(ctx, s1, s2).unwrap())
        .collect::<Vec<_>>();
    let labels = pairs
        .iter()
        .map(|&(s1, s2)| ZetaIndex::Double(s1 as u64, s2 as u64))
        .collect::<Vec<_>>();
    let basis = SiegelSystem::new(fq, n, points).unwrap().solve().unwrap();
    (labels, basis)
}

#[test]
fn dual_route_power_sums_agree() {
    for ctx in contexts() {
        let evaluator = ZetaEvaluator::new(ctx, 3).unwrap();
        for d in 0..=3usize {
            for k in 1..=5u64 {
                let exact = power_sum(ctx, d, k).unwrap();
                let expanded = ratfunc_series(&exact, 60).unwrap();
                let series = evaluator.power_sum_series(d, k, 60);
                assert!(
                    expanded.sub(&series).is_zero_to_prec(),
                    "routes disagree at q={} d={d} k={k}",
                    ctx.field().q()
                );
            }
        }
    }
}

#[test]
fn zeta_values_are_truncation_stable() {
    for ctx in contexts() {
        let shallow = ZetaEvaluator::new(ctx, 6).unwrap();
        let deep = ZetaEvaluator::new(ctx, 8).unwrap();
        let indices = [
            ZetaIndex::Single(1),
            ZetaIndex::Single(4),
            ZetaIndex::Double(1, 1),
            ZetaIndex::Double(2, 3),
            ZetaIndex::Double(3, 2),
        ];
        for index in indices {
            let a = shallow.evaluate(&index).unwrap();
            let b = deep.evaluate(&index).unwrap();
            // Every coefficient claimed at the shallow depth must survive.
            let diff = a.series().sub(b.series()).truncate_to(a.precision());
            assert!(
                diff.is_zero_to_prec(),
                "claimed coefficients changed with depth at q={} {index:?}",
                ctx.field().q()
            );
            assert!(a.precision() < b.precision());
        }
    }
}

#[test]
fn calibration_finds_the_unit_constant() {
    for ctx in contexts() {
        let fq = ctx.field();
        let q = fq.q();
        let kappa = calibrate(ctx, 6).unwrap();
        assert!(kappa.is_one(), "calibration constant at q={q}");

        // With the constant fixed, the exact ratio reproduces the numeric
        // zeta value at every small A-even index.
        let evaluator = ZetaEvaluator::new(ctx, 6).unwrap();
        for m in [q - 1, 2 * (q - 1), 3 * (q - 1)] {
            let z = evaluator.zeta_single(m).unwrap();
            let gamma = ctx.euler_ratio(m as usize).unwrap();
            let pp = pi_power(fq, m, z.precision() + 2 * m as i64 + 8).unwrap();
            let lhs = ratfunc_series(&gamma, z.precision() + 2 * m as i64).unwrap().mul(&pp);
            assert!(
                lhs.sub(z.series()).is_zero_to_prec(),
                "ratio times period power misses ζ({m}) at q={q}"
            );
        }
    }
}

#[test]
fn product_formula_vectors_vanish_numerically() {
    for ctx in contexts() {
        let fq = ctx.field();
        let q = fq.q();
        ctx.set_calibration(fq.one()).unwrap();
        let evaluator = ZetaEvaluator::new(ctx, 6).unwrap();
        for n in (2..=8u64).filter(|n| n % (q - 1) == 0) {
            let pairs = even_index_pairs(fq, n as usize);
            for vector in chen_vectors(ctx, n as usize).unwrap() {
                let mut total = LaurentSeries::zero_prec(fq, evaluator.tail_bound(1));
                for (&(s1, s2), c) in pairs.iter().zip(vector.zeta_coefficients()) {
                    if c.is_zero() {
                        continue;
                    }
                    let z = evaluator.zeta_double(s1 as u64, s2 as u64).unwrap();
                    total = total.add(&z.series().scale(c));
                }
                if !vector.pi_coefficient().is_zero() {
                    let reach = total.prec_end() + 3 * n as i64 + 8;
                    let pi_n = pi_power(fq, n, reach).unwrap();
                    let slot = ratfunc_series(vector.pi_coefficient(), reach).unwrap();
                    total = total.add(&slot.mul(&pi_n));
                }
                assert!(
                    total.prec_end() >= 10,
                    "vanishing check needs visible margin at q={q} n={n}"
                );
                assert!(
                    total.is_zero_to_prec(),
                    "product-formula vector fails numerically at q={q} n={n}"
                );
            }
        }
    }
}

#[test]
fn inverse_l_squares_sum_to_scaled_double_zeta() {
    // Over F_2: Σ_{i≥0} 1/L_i² = (θ²+θ)·ζ_A(1,1).
    let f2 = Fq::get(2, 1).unwrap();
    let ctx = CarlitzContext::get(f2);
    let evaluator = ZetaEvaluator::new(ctx, 8).unwrap();
    let z = evaluator.zeta_double(1, 1).unwrap();
    let prec = z.precision();
    let scale = UniPoly::from_vec(
        Var::Theta,
        f2.zero(),
        vec![f2.zero(), f2.one(), f2.one()],
    );
    let rhs = LaurentSeries::from_theta_poly(&scale).mul(z.series());
    let mut lhs = LaurentSeries::zero_prec(f2, prec);
    let mut i = 0;
    loop {
        let li = ctx.l_theta(i);
        if 2 * li.degree().unwrap_or(0) as i64 >= prec {
            break;
        }
        let inv = LaurentSeries::from_theta_poly(&li).inv_to(prec).unwrap();
        lhs = lhs.add(&inv.mul(&inv));
        i += 1;
    }
    assert!(lhs.sub(&rhs).is_zero_to_prec());
}

#[test]
fn certificates_verify_at_even_weight_q2() {
    let f2 = Fq::get(2, 1).unwrap();
    let ctx = CarlitzContext::get(f2);

    // Weight 2: the lone pair point is torsion and its annihilator induces
    // a proportionality to the squared period.
    let (labels, basis) = pair_relations(ctx, 2);
    assert_eq!(basis.relation_rank(), 1);
    let relation = &basis.relations()[0];
    match verify_relation(ctx, &labels, relation.a(), 10).unwrap() {
        Verification::Proportional { c0, margin } => {
            assert!(!c0.is_zero(), "weight-2 proportionality constant");
            assert!(margin >= 10);
        }
        other => panic!("expected a proportionality at weight 2, got {other:?}"),
    }

    // The zero combination passes trivially.
    let zero = vec![FqPoly::zero(Var::T, &f2.zero())];
    assert!(verify_relation(ctx, &labels, &zero, 4).unwrap().is_pass());

    // Weight 5: every discovered relation verifies.
    let (labels, basis) = pair_relations(ctx, 5);
    assert_eq!(basis.relation_rank(), 2);
    for relation in basis.relations() {
        let verdict = verify_relation(ctx, &labels, relation.a(), 12).unwrap();
        assert!(verdict.is_pass(), "weight-5 certificate: {verdict:?}");
    }

    // Corrupting one coefficient must be caught: no weight-5 double zeta
    // is a rational multiple of the period power.
    let mut corrupted = basis.relations()[0].a().to_vec();
    let slot = corrupted.iter().position(|a| !a.is_zero()).unwrap();
    corrupted[slot] = corrupted[slot].add(&FqPoly::one(Var::T, &f2.zero()));
    match verify_relation(ctx, &labels, &corrupted, 12).unwrap() {
        Verification::Failed { .. } => {}
        other => panic!("corrupted certificate slipped through: {other:?}"),
    }
}

#[test]
fn certificates_verify_at_odd_weight_q3() {
    // Weight 7 pairs carry no relations on their own; the single relation
    // appears once the diagonal point joins the family, and its combination
    // must vanish outright since the period power leaves the completion.
    let f3 = Fq::get(3, 1).unwrap();
    let ctx = CarlitzContext::get(f3);
    let pairs = even_index_pairs(f3, 7);
    let mut points = vec![special_point_vn(ctx, 7).unwrap()];
    points.extend(pairs.iter().map(|&(s1, s2)| xi_point(ctx, s1, s2).unwrap()));
    let mut labels = vec![ZetaIndex::Single(7)];
    labels.extend(
        pairs
            .iter()
            .map(|&(s1, s2)| ZetaIndex::Double(s1 as u64, s2 as u64)),
    );
    let basis = SiegelSystem::new(f3, 7, points).unwrap().solve().unwrap();
    assert_eq!(basis.relation_rank(), 1);
    let relation = &basis.relations()[0];
    assert!(
        !relation.a()[0].is_zero(),
        "the weight-7 relation must involve the diagonal point"
    );

    match verify_relation(ctx, &labels, relation.a(), 8).unwrap() {
        Verification::Zero { margin } => assert!(margin >= 10),
        other => panic!("expected exact vanishing at weight 7, got {other:?}"),
    }

    let mut corrupted = relation.a().to_vec();
    let slot = corrupted.iter().position(|a| !a.is_zero()).unwrap();
    corrupted[slot] = corrupted[slot].add(&FqPoly::one(Var::T, &f3.zero()));
    match verify_relation(ctx, &labels, &corrupted, 8).unwrap() {
        Verification::Failed { .. } => {}
        other => panic!("corrupted certificate slipped through: {other:?}"),
    }
}

#[test]
fn exact_route_rejects_infeasible_requests() {
    let f2 = Fq::get(2, 1).unwrap();
    let ctx = CarlitzContext::get(f2);
    assert!(power_sum(ctx, 40, 1).is_err());
    let _ = RatFunc::zero(Var::Theta, f2.zero());
}
