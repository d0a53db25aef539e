//! Integration suite for the relation solver: exhaustive completeness on
//! small random instances, independent certificate validation through the
//! twisted functional equation, rank invariances, and the rank profile of
//! the special-point sets at low weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dzv_core::algebra::{BiPoly, Fq, FqPoly, PolyMatrix, Var};
use dzv_core::carlitz::{carlitz_action, CarlitzContext, TensorPoint};
use dzv_core::fmodule::{special_point_vn, xi_point};
use dzv_core::siegel::{assoc_poly, SiegelSystem};

fn random_theta_poly(fq: &'static Fq, rng: &mut ChaCha8Rng, max_deg: usize) -> FqPoly {
    let deg = rng.random_range(0..=max_deg);
    FqPoly::from_vec(
        Var::Theta,
        fq.zero(),
        (0..=deg).map(|_| fq.elem(rng.random_range(0..fq.q())).unwrap()).collect(),
    )
}

fn random_point(fq: &'static Fq, rng: &mut ChaCha8Rng, n: usize, deg: usize) -> TensorPoint {
    TensorPoint::new(fq, (0..n).map(|_| random_theta_poly(fq, rng, deg)).collect())
}

/// Index-pair points of one weight, ordered by first index.
fn xi_family(ctx: &'static CarlitzContext, n: usize) -> Vec<TensorPoint> {
    let q = ctx.field().q() as usize;
    (1..n)
        .filter(|s1| (n - s1) % (q - 1) == 0)
        .map(|s1| xi_point(ctx, s1, n - s1).unwrap())
        .collect()
}

fn rank_of(fq: &'static Fq, rows: Vec<Vec<FqPoly>>, ncols: usize) -> usize {
    PolyMatrix::new(fq, ncols, rows).rank()
}

/// Exhaustive check on small instances: every scalar tuple of bounded degree
/// that sends the points to zero must lie in the span of the returned basis.
#[test]
fn complete_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let coeffs_per_scalar = 4usize; // degree at most 3 in t
    for set in 0..100usize {
        let p: u64 = if set % 2 == 0 { 2 } else { 3 };
        let fq = Fq::get(p, 1).unwrap();
        let max_points = if p == 2 { 3 } else { 2 };
        let n = rng.random_range(1..=3usize);
        let m = rng.random_range(1..=max_points);
        let points: Vec<TensorPoint> =
            (0..m).map(|_| random_point(fq, &mut rng, n, 2)).collect();

        let basis = SiegelSystem::new(fq, n, points.clone())
            .unwrap()
            .solve()
            .unwrap();
        assert!(!basis.anomalous(), "anomalous nullspace on set {set}");
        let cert_rows: Vec<Vec<FqPoly>> =
            basis.relations().iter().map(|r| r.a().to_vec()).collect();
        let cert_rank = rank_of(fq, cert_rows.clone(), m);
        assert_eq!(cert_rank, basis.relation_rank());

        // Precompute the action of each t-power on each point; a candidate
        // tuple is then an F_q-combination of these.
        let t = FqPoly::variable(Var::T, &fq.zero());
        let powers: Vec<Vec<TensorPoint>> = points
            .iter()
            .map(|z| {
                (0..coeffs_per_scalar)
                    .map(|j| carlitz_action(&t.pow(j as u64), z))
                    .collect()
            })
            .collect();

        let digits = coeffs_per_scalar * m;
        let total = (p as u64).pow(digits as u32);
        for code in 1..total {
            let mut rem = code;
            let mut sum = TensorPoint::zero(fq, n);
            let mut scalars: Vec<FqPoly> = Vec::with_capacity(m);
            for pw in powers.iter() {
                let mut coeffs = Vec::with_capacity(coeffs_per_scalar);
                for term in pw.iter() {
                    let c = fq.elem(rem % p).unwrap();
                    rem /= p;
                    coeffs.push(c);
                    if !c.is_zero() {
                        sum = sum.add(&term.scale_elem(&c));
                    }
                }
                scalars.push(FqPoly::from_vec(Var::T, fq.zero(), coeffs));
            }
            if !sum.is_zero() {
                continue;
            }
            let mut rows = cert_rows.clone();
            rows.push(scalars);
            assert_eq!(
                rank_of(fq, rows, m),
                cert_rank,
                "brute-force relation outside the basis span, set {set}"
            );
        }
    }
}

/// Certificates satisfy the twisted functional equation directly:
/// (δ + Σ a_i f_i)(t − θ^q)^n = δ^(1), checked with two-variable arithmetic
/// rather than through the coordinate action.
#[test]
fn certificates_satisfy_functional_equation() {
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for n in 2..=7usize {
            let mut points = vec![special_point_vn(ctx, n).unwrap()];
            points.extend(xi_family(ctx, n));
            let sys = SiegelSystem::new(fq, n, points.clone()).unwrap();
            let basis = sys.solve().unwrap();
            assert!(!basis.anomalous());

            let twisted = BiPoly::t_minus_theta(fq)
                .frobenius_twist(1)
                .unwrap()
                .pow(n as u64);
            let theta = BiPoly::theta(fq);
            for rel in basis.relations() {
                let mut combined = BiPoly::from_t_coeffs(fq, Vec::new());
                for (a, z) in rel.a().iter().zip(&points) {
                    combined = combined.add(&assoc_poly(z).mul(&BiPoly::from_t_poly(a)));
                }
                let mut delta = BiPoly::from_t_coeffs(fq, Vec::new());
                for (j, c) in rel.delta().iter().enumerate() {
                    delta = delta.add(&BiPoly::from_t_poly(c).mul(&theta.pow(j as u64)));
                }
                let lhs = delta.add(&combined).mul(&twisted);
                let rhs = delta.frobenius_twist(1).unwrap();
                assert_eq!(lhs, rhs, "q={p}, weight {n}");
            }
        }
    }
}

/// Rank is invariant under permuting the points and under scaling any point
/// by a nonzero constant; adjoining a point moves the ranks by at most one.
#[test]
fn rank_invariances() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        for _ in 0..6 {
            let n = rng.random_range(1..=3usize);
            let m = rng.random_range(2..=3usize);
            let points: Vec<TensorPoint> =
                (0..m).map(|_| random_point(fq, &mut rng, n, 2)).collect();
            let base = SiegelSystem::new(fq, n, points.clone())
                .unwrap()
                .solve()
                .unwrap();

            let mut perm = points.clone();
            perm.reverse();
            let permuted = SiegelSystem::new(fq, n, perm).unwrap().solve().unwrap();
            assert_eq!(permuted.relation_rank(), base.relation_rank());

            let mut scaled = points.clone();
            let c = fq.elem(rng.random_range(1..fq.q())).unwrap();
            scaled[0] = scaled[0].scale_elem(&c);
            let scaled = SiegelSystem::new(fq, n, scaled).unwrap().solve().unwrap();
            assert_eq!(scaled.relation_rank(), base.relation_rank());

            let mut extended = points.clone();
            extended.push(random_point(fq, &mut rng, n, 2));
            let ext = SiegelSystem::new(fq, n, extended).unwrap().solve().unwrap();
            let dr = ext.relation_rank() - base.relation_rank();
            assert!(dr <= 1, "relation rank jumped by {dr}");
            assert!(ext.point_rank() >= base.point_rank());
            assert!(ext.point_rank() <= base.point_rank() + 1);
        }
    }
}

/// Relation ranks of the index-pair point families at low weights.
#[test]
fn xi_family_rank_profile() {
    let f2 = Fq::get(2, 1).unwrap();
    let ctx2 = CarlitzContext::get(f2);
    for (n, expect) in [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 4), (8, 5)] {
        let family = xi_family(ctx2, n);
        assert_eq!(family.len(), n - 1);
        let basis = SiegelSystem::new(f2, n, family).unwrap().solve().unwrap();
        assert_eq!(basis.relation_rank(), expect, "q=2, weight {n}");
        assert!(!basis.anomalous());
    }

    let f3 = Fq::get(3, 1).unwrap();
    let ctx3 = CarlitzContext::get(f3);
    for (n, expect) in [(3, 0), (4, 0), (5, 0), (6, 1), (7, 0), (8, 1)] {
        let family = xi_family(ctx3, n);
        assert_eq!(family.len(), (n - 1) / 2);
        let basis = SiegelSystem::new(f3, n, family).unwrap().solve().unwrap();
        assert_eq!(basis.relation_rank(), expect, "q=3, weight {n}");
        assert!(!basis.anomalous());
    }
}

/// Torsion of the direct point matches the parity of the weight through 12.
#[test]
fn direct_point_torsion_parity_deep() {
    for p in [2u64, 3] {
        let fq = Fq::get(p, 1).unwrap();
        let ctx = CarlitzContext::get(fq);
        for n in 1..=12usize {
            let v = special_point_vn(ctx, n).unwrap();
            let basis = SiegelSystem::new(fq, n, vec![v]).unwrap().solve().unwrap();
            let expect = if n as u64 % (p - 1) == 0 { 1 } else { 0 };
            assert_eq!(basis.relation_rank(), expect, "q={p}, weight {n}");
        }
    }
}
