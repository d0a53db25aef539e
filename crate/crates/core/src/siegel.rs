//! Relation finding for tensor-power points.
//!
//! A tuple (a_1, ..., a_m) of scalars sends points v_1, ..., v_m of the n-th
//! tensor power to zero, Σ_i [a_i]_n(v_i) = 0, exactly when the combined
//! polynomial F = Σ_i a_i f_i (with f_i the polynomial attached to v_i by
//! `assoc_poly`) satisfies a twisted functional equation: there is a
//! θ-polynomial δ with t-polynomial coefficients such that
//! (δ + F)·(t − θ^q)^n = δ^(1). The θ-degree of any such δ is bounded
//! effectively, so matching θ-coefficients on both sides gives a finite
//! linear system over F_q[t] in the unknowns (c_0, ..., c_{ℓ-1}, a_1, ...,
//! a_m), where δ = Σ_j c_j θ^j. The relation space is the projection of the
//! system's nullspace onto the a-coordinates.
//!
//! Representation invariants: system columns are ordered δ-coefficients
//! first, then one column per point; rows are indexed by θ-degree starting
//! at zero. Certificates are reduced row-echelon representatives over
//! F_q(t), scaled to primitive polynomial vectors by whole-vector content
//! removal only, so each kept (a, δ) pair still solves the equation. Every
//! certificate is re-verified through the direct coordinate action before
//! it is returned.

use crate::algebra::{
    clear_denominators, remove_content, BiPoly, Fq, FqPoly, PolyMatrix, RatFunc, Var,
};
use crate::carlitz::{carlitz_action, TensorPoint};
use crate::error::SolveError;

/// The polynomial attached to a point: f = Σ_j v_j (t − θ)^{n−j} for
/// coordinates (v_1, ..., v_n).
pub fn assoc_poly(z: &TensorPoint) -> BiPoly {
    let fq = z.field();
    let tmt = BiPoly::t_minus_theta(fq);
    let mut f = BiPoly::from_t_coeffs(fq, Vec::new());
    for c in z.coords() {
        f = f.mul(&tmt).add(&BiPoly::from_theta_poly(c.clone()));
    }
    f
}

/// One basis relation: the scalar tuple together with the θ-coefficients
/// (low to high) of a δ witnessing it.
#[derive(Debug, Clone)]
pub struct Relation {
    a: Vec<FqPoly>,
    delta: Vec<FqPoly>,
}

impl Relation {
    /// Scalar applied to each point, in point order.
    pub fn a(&self) -> &[FqPoly] {
        &self.a
    }

    /// θ-coefficients of the witness δ, constant coefficient first.
    pub fn delta(&self) -> &[FqPoly] {
        &self.delta
    }
}

/// Solved relation space for one point set.
#[derive(Debug, Clone)]
pub struct RelationBasis {
    point_count: usize,
    relations: Vec<Relation>,
    anomalous: bool,
}

impl RelationBasis {
    /// Number of points the system was built over.
    pub fn point_count(&self) -> usize {
        self.point_count
    }

    /// Dimension of the relation space over F_q(t).
    pub fn relation_rank(&self) -> usize {
        self.relations.len()
    }

    /// Dimension of the span of the points: point count minus relation rank.
    pub fn point_rank(&self) -> usize {
        self.point_count - self.relations.len()
    }

    /// Reduced basis of the relation space, one certificate per dimension.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// True if the nullspace contained a vector with zero scalar part but
    /// nonzero δ. No such solution should exist; the flag surfaces one
    /// without masking the relation count.
    pub fn anomalous(&self) -> bool {
        self.anomalous
    }
}

/// Linear system whose nullspace projection is the relation space of a
/// point set.
pub struct SiegelSystem {
    fq: &'static Fq,
    weight: usize,
    points: Vec<TensorPoint>,
    assoc: Vec<BiPoly>,
    delta_cols: usize,
    nrows: usize,
}

impl SiegelSystem {
    // ---- Constructors ----

    /// Build the system for points of the `weight`-th tensor power.
    pub fn new(
        fq: &'static Fq,
        weight: usize,
        points: Vec<TensorPoint>,
    ) -> Result<Self, SolveError> {
        assert!(weight >= 1, "weight must be at least 1");
        for z in &points {
            if z.dim() != weight {
                return Err(SolveError::MixedWeights(weight, z.dim()));
            }
        }
        let q = fq.q() as usize;
        let n = weight;
        let assoc: Vec<BiPoly> = points.iter().map(assoc_poly).collect();
        let deg_f = assoc
            .iter()
            .filter_map(|f| f.sup_degree())
            .max()
            .unwrap_or(0);
        let delta_cols = (deg_f + 1).max(n * q / (q - 1) + 1);
        let nrows = 1 + (delta_cols - 1 + n * q).max((delta_cols - 1) * q);
        Ok(SiegelSystem {
            fq,
            weight,
            points,
            assoc,
            delta_cols,
            nrows,
        })
    }

    // ---- Accessors ----

    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn points(&self) -> &[TensorPoint] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// Number of δ-coefficient columns (the bound ℓ on deg_θ δ plus one).
    pub fn delta_cols(&self) -> usize {
        self.delta_cols
    }

    /// Number of θ-coefficient rows the system matches.
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Assemble the coefficient matrix, δ columns first, over F_q[t].
    fn build_matrix(&self) -> PolyMatrix {
        let fq = self.fq;
        let q = fq.q() as usize;
        let n = self.weight;
        let ell = self.delta_cols;
        let m = self.points.len();
        let ncols = ell + m;
        let zero = FqPoly::zero(Var::T, &fq.zero());
        let mut rows = vec![vec![zero; ncols]; self.nrows];

        // δ columns: c_j θ^j (t − θ^q)^n spreads over rows j + qk with
        // coefficient (−1)^k C(n,k) t^{n−k}; the twist δ^(1) puts −1 at
        // row jq. Coinciding rows accumulate.
        for j in 0..ell {
            for k in 0..=n {
                let mut c = fq.binomial(n as u64, k as u64);
                if k % 2 == 1 {
                    c = c.neg();
                }
                if c.is_zero() {
                    continue;
                }
                let term = FqPoly::monomial(Var::T, c, n - k);
                let row = j + q * k;
                rows[row][j] = rows[row][j].add(&term);
            }
            let one = FqPoly::one(Var::T, &fq.zero());
            rows[q * j][j] = rows[q * j][j].sub(&one);
        }

        // Point columns: row r of column i is the θ^r-coefficient of
        // f_i (t − θ^q)^n.
        let twisted = BiPoly::t_minus_theta(fq)
            .frobenius_twist(1)
            .expect("positive twist")
            .pow(n as u64);
        for (i, f) in self.assoc.iter().enumerate() {
            let g = f.mul(&twisted);
            for (r, row) in rows.iter_mut().enumerate() {
                row[ell + i] = g.theta_coeff(r);
            }
        }
        PolyMatrix::new(fq, ncols, rows)
    }

    /// Solve for the full relation space and return a verified basis.
    pub fn solve(&self) -> Result<RelationBasis, SolveError> {
        let m = self.points.len();
        if m == 0 {
            return Ok(RelationBasis {
                point_count: 0,
                relations: Vec::new(),
                anomalous: false,
            });
        }
        let ell = self.delta_cols;
        let kernel = self.build_matrix().nullspace();

        // Reorder each kernel vector scalars-first so echelon pivots land in
        // the a-block exactly when the scalar part is nonzero.
        let reordered: Vec<Vec<FqPoly>> = kernel
            .into_iter()
            .map(|v| {
                let mut w = Vec::with_capacity(v.len());
                w.extend_from_slice(&v[ell..]);
                w.extend_from_slice(&v[..ell]);
                w
            })
            .collect();
        let mut mat = PolyMatrix::new(self.fq, ell + m, reordered);
        let pivots = mat.echelonize();
        let anomalous = pivots.iter().any(|&c| c >= m);

        let mut relations = Vec::new();
        for row in reduced_rows(self.fq, mat.rows(), &pivots, m) {
            let rel = Relation {
                a: row[..m].to_vec(),
                delta: row[m..].to_vec(),
            };
            let mut sum = TensorPoint::zero(self.fq, self.weight);
            for (a, z) in rel.a.iter().zip(&self.points) {
                sum = sum.add(&carlitz_action(a, z));
            }
            if !sum.is_zero() {
                return Err(SolveError::CertificateCheckFailed {
                    index: relations.len(),
                });
            }
            relations.push(rel);
        }
        Ok(RelationBasis {
            point_count: m,
            relations,
            anomalous,
        })
    }
}

/// Back-substitute the echelon rows whose pivots sit in the first `lead`
/// columns into reduced form over F_q(t), then clear each row back to a
/// primitive polynomial vector.
fn reduced_rows(
    fq: &'static Fq,
    rows: &[Vec<FqPoly>],
    pivots: &[usize],
    lead: usize,
) -> Vec<Vec<FqPoly>> {
    let keep: Vec<usize> = (0..pivots.len()).filter(|&i| pivots[i] < lead).collect();
    let var = Var::T;
    let mut work: Vec<Vec<RatFunc>> = keep
        .iter()
        .map(|&i| rows[i].iter().map(|p| RatFunc::from_poly(p.clone())).collect())
        .collect();
    for idx in (0..keep.len()).rev() {
        let pc = pivots[keep[idx]];
        let inv = work[idx][pc].inv().expect("pivot is nonzero");
        for x in work[idx].iter_mut() {
            *x = x.mul(&inv);
        }
        for upper in 0..idx {
            if work[upper][pc].is_zero() {
                continue;
            }
            let f = work[upper][pc].clone();
            let row = work[idx].clone();
            for (dst, src) in work[upper].iter_mut().zip(&row) {
                *dst = dst.sub(&f.mul(src));
            }
        }
    }
    work.iter()
        .map(|row| {
            let mut cleared = clear_denominators(fq, var, row);
            remove_content(&mut cleared);
            cleared
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;
    use crate::carlitz::CarlitzContext;
    use crate::fmodule::{special_point_vn, xi_point};

    fn theta_poly(fq: &'static Fq, digits: &[u64]) -> FqPoly {
        let coeffs = digits.iter().map(|&d| fq.elem(d).unwrap()).collect();
        FqPoly::from_vec(Var::Theta, fq.zero(), coeffs)
    }

    #[test]
    fn assoc_poly_examples() {
        let f2 = Fq::get(2, 1).unwrap();
        let unit = TensorPoint::new(f2, vec![theta_poly(f2, &[0]), theta_poly(f2, &[1])]);
        assert_eq!(assoc_poly(&unit), BiPoly::from_theta_poly(theta_poly(f2, &[1])));

        let e1 = TensorPoint::new(f2, vec![theta_poly(f2, &[1]), theta_poly(f2, &[0])]);
        assert_eq!(assoc_poly(&e1), BiPoly::t_minus_theta(f2));

        // (1, θ² + θ + 1) maps to (t − θ) + θ² + θ + 1 = t + θ² + 1 over F_2.
        let z = TensorPoint::new(f2, vec![theta_poly(f2, &[1]), theta_poly(f2, &[1, 1, 1])]);
        let expect = BiPoly::t(f2).add(&BiPoly::from_theta_poly(theta_poly(f2, &[1, 0, 1])));
        assert_eq!(assoc_poly(&z), expect);
    }

    #[test]
    fn system_shape_weight_two() {
        let f2 = Fq::get(2, 1).unwrap();
        let unit = TensorPoint::new(f2, vec![theta_poly(f2, &[0]), theta_poly(f2, &[1])]);
        let sys = SiegelSystem::new(f2, 2, vec![unit]).unwrap();
        assert_eq!(sys.delta_cols(), 5);
        assert_eq!(sys.nrows(), 9);
    }

    #[test]
    fn unit_point_weight_two_relation() {
        let f2 = Fq::get(2, 1).unwrap();
        let unit = TensorPoint::new(f2, vec![theta_poly(f2, &[0]), theta_poly(f2, &[1])]);
        let basis = SiegelSystem::new(f2, 2, vec![unit])
            .unwrap()
            .solve()
            .unwrap();
        assert_eq!(basis.relation_rank(), 1);
        assert_eq!(basis.point_rank(), 0);
        assert!(!basis.anomalous());
        // Annihilator is generated by (t² + t)²  = t⁴ + t², with witness
        // δ = θ⁴ + t⁴.
        let rel = &basis.relations()[0];
        let t = FqPoly::variable(Var::T, &f2.zero());
        let expect_a = t.pow(4).add(&t.pow(2));
        assert_eq!(rel.a(), &[expect_a]);
        assert_eq!(rel.delta().len(), 5);
        assert_eq!(rel.delta()[0], t.pow(4));
        assert!(rel.delta()[1].is_zero());
        assert!(rel.delta()[2].is_zero());
        assert!(rel.delta()[3].is_zero());
        assert!(rel.delta()[4].is_one());
    }

    #[test]
    fn torsion_detection_matches_parity() {
        // v_n is torsion exactly when q − 1 divides n.
        for p in [2u64, 3] {
            let fq = Fq::get(p, 1).unwrap();
            let ctx = CarlitzContext::get(fq);
            for n in 1..=6usize {
                let v = special_point_vn(ctx, n).unwrap();
                let basis = SiegelSystem::new(fq, n, vec![v]).unwrap().solve().unwrap();
                let expect = if n as u64 % (p - 1) == 0 { 1 } else { 0 };
                assert_eq!(basis.relation_rank(), expect, "q={p}, n={n}");
                assert!(!basis.anomalous());
            }
        }
    }

    #[test]
    fn two_point_rank_weight_three_q2() {
        // Weight 3 at q = 2: exactly one of the two index-pair points is
        // torsion, so the pair carries a one-dimensional relation space.
        let f2 = Fq::get(2, 1).unwrap();
        let ctx = CarlitzContext::get(f2);
        let xi12 = xi_point(ctx, 1, 2).unwrap();
        let xi21 = xi_point(ctx, 2, 1).unwrap();
        let both = SiegelSystem::new(f2, 3, vec![xi12.clone(), xi21.clone()])
            .unwrap()
            .solve()
            .unwrap();
        assert_eq!(both.point_count(), 2);
        assert_eq!(both.relation_rank(), 1);
        assert_eq!(both.point_rank(), 1);

        // At q = 2 the direct point is itself torsion at every weight, so
        // adjoining it adds exactly one relation.
        let v3 = special_point_vn(ctx, 3).unwrap();
        let with_direct = SiegelSystem::new(f2, 3, vec![v3, xi12, xi21])
            .unwrap()
            .solve()
            .unwrap();
        assert_eq!(with_direct.relation_rank(), both.relation_rank() + 1);
        assert_eq!(with_direct.point_rank(), both.point_rank());
    }
}
