//! Exact linear algebra: dense elimination over F_q and fraction-free
//! elimination over F_q[v] with content control.
//!
//! The polynomial solver works over the polynomial ring and never forms
//! fractions during elimination: rows are combined by cross-multiplication
//! with the gcd of the two colliding entries factored out, and each updated
//! row is divided by the gcd of its entries. Pivots are chosen by lowest
//! degree, which keeps unit pivots (degree zero) in play first and bounds
//! entry growth on the structured systems built here.

use super::fq::{Fq, FqElem};
use super::poly::FqPoly;
use super::ratfunc::RatFunc;

// ---- Dense elimination over F_q ----

/// Nullspace basis of the matrix `rows` (each row of length `ncols`) over
/// F_q, as vectors of length `ncols`.
pub fn fq_nullspace(fq: &'static Fq, rows: &[Vec<FqElem>], ncols: usize) -> Vec<Vec<FqElem>> {
    let mut m: Vec<Vec<FqElem>> = rows.to_vec();
    let nrows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for col in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][col].inv().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in 0..ncols {
                    let sub = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![fq.zero(); ncols];
        v[free] = fq.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = m[i][free].neg();
        }
        basis.push(v);
    }
    basis
}

// ---- Fraction-free elimination over F_q[v] ----

pub struct PolyMatrix {
    fq: &'static Fq,
    ncols: usize,
    rows: Vec<Vec<FqPoly>>,
}

impl PolyMatrix {
    pub fn new(fq: &'static Fq, ncols: usize, rows: Vec<Vec<FqPoly>>) -> Self {
        for row in &rows {
            assert_eq!(row.len(), ncols, "ragged matrix row");
        }
        PolyMatrix { fq, ncols, rows }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<FqPoly>] {
        &self.rows
    }

    /// Row echelon form in place; returns the pivot columns in order.
    /// After return, pivot i sits at `rows[i][pivots[i]]`.
    pub fn echelonize(&mut self) -> Vec<usize> {
        let nrows = self.rows.len();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..self.ncols {
            // Lowest-degree nonzero entry as pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in r..nrows {
                if let Some(d) = self.rows[i][col].degree() {
                    if best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((i, d));
                    }
                }
            }
            let Some((pr, _)) = best else {
                continue;
            };
            self.rows.swap(r, pr);
            for j in r + 1..nrows {
                if self.rows[j][col].is_zero() {
                    continue;
                }
                let a = self.rows[r][col].clone();
                let b = self.rows[j][col].clone();
                let g = a.gcd(&b);
                let am = a.exact_div(&g).expect("gcd divides");
                let bm = b.exact_div(&g).expect("gcd divides");
                for k in 0..self.ncols {
                    let lhs = self.rows[j][k].mul(&am);
                    let rhs = self.rows[r][k].mul(&bm);
                    self.rows[j][k] = lhs.sub(&rhs);
                }
                debug_assert!(self.rows[j][col].is_zero());
                remove_content(&mut self.rows[j]);
            }
            pivots.push(col);
            r += 1;
            if r == nrows {
                break;
            }
        }
        pivots
    }

    pub fn rank(mut self) -> usize {
        self.echelonize().len()
    }

    /// Nullspace basis over the fraction field, returned with denominators
    /// cleared and content removed, one vector per free column.
    pub fn nullspace(mut self) -> Vec<Vec<FqPoly>> {
        let pivots = self.echelonize();
        let var = poly_var(&self);
        let zero_rat = RatFunc::zero(var, self.fq.zero());
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivots.contains(&free) {
                continue;
            }
            let mut x = vec![zero_rat.clone(); self.ncols];
            x[free] = RatFunc::from_poly(FqPoly::one(var, &self.fq.zero()));
            for i in (0..pivots.len()).rev() {
                let pc = pivots[i];
                let mut s = zero_rat.clone();
                for j in pc + 1..self.ncols {
                    if x[j].is_zero() || self.rows[i][j].is_zero() {
                        continue;
                    }
                    s = s.add(&x[j].scale_poly(&self.rows[i][j]));
                }
                let piv = RatFunc::from_poly(self.rows[i][pc].clone());
                x[pc] = s.neg().div(&piv).expect("pivot is nonzero");
            }
            basis.push(clear_denominators(self.fq, var, &x));
        }
        basis
    }
}

fn poly_var(m: &PolyMatrix) -> super::poly::Var {
    m.rows
        .first()
        .and_then(|r| r.first())
        .map(|p| p.var())
        .unwrap_or(super::poly::Var::T)
}

/// Divide a row by the gcd of its entries (and normalize the first nonzero
/// entry to be monic) so entries stay primitive.
pub fn remove_content(row: &mut [FqPoly]) {
    let mut g: Option<FqPoly> = None;
    for p in row.iter() {
        if p.is_zero() {
            continue;
        }
        g = Some(match g {
            None => p.clone(),
            Some(acc) => acc.gcd(p),
        });
        if g.as_ref().is_some_and(|g| g.degree() == Some(0)) {
            break;
        }
    }
    let Some(g) = g else {
        return;
    };
    // The gcd is monic; fold in the leading coefficient of the first
    // nonzero entry so that entry comes out monic after division.
    let lead = row
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading())
        .copied()
        .expect("nonzero row");
    let divisor = g.scale(&lead);
    if divisor.is_one() {
        return;
    }
    for p in row.iter_mut() {
        if !p.is_zero() {
            *p = p.exact_div(&divisor).expect("content divides");
        }
    }
}

/// Multiply a rational vector by the least common multiple of its
/// denominators and remove polynomial content, yielding a primitive
/// polynomial vector.
pub fn clear_denominators(
    fq: &'static Fq,
    var: super::poly::Var,
    x: &[RatFunc],
) -> Vec<FqPoly> {
    let one = FqPoly::one(var, &fq.zero());
    let mut lcm = one.clone();
    for r in x {
        if r.is_zero() {
            continue;
        }
        let den = r.den();
        let g = lcm.gcd(den);
        lcm = lcm.exact_div(&g).expect("gcd divides").mul(den);
    }
    let mut out: Vec<FqPoly> = x
        .iter()
        .map(|r| {
            if r.is_zero() {
                FqPoly::zero(var, &fq.zero())
            } else {
                let extra = lcm.exact_div(r.den()).expect("den divides lcm");
                r.num().mul(&extra)
            }
        })
        .collect();
    remove_content(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{UniPoly, Var};

    fn tpoly(fq: &'static Fq, digits: &[u64]) -> FqPoly {
        let coeffs = digits.iter().map(|&d| fq.elem(d).unwrap()).collect();
        UniPoly::from_vec(Var::T, fq.zero(), coeffs)
    }

    #[test]
    fn fq_nullspace_small() {
        let f2 = Fq::get(2, 1).unwrap();
        // x + y = 0, y + z = 0 over F_2: nullspace spanned by (1,1,1).
        let rows = vec![
            vec![f2.one(), f2.one(), f2.zero()],
            vec![f2.zero(), f2.one(), f2.one()],
        ];
        let ns = fq_nullspace(f2, &rows, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![f2.one(), f2.one(), f2.one()]);
    }

    #[test]
    fn poly_rank_and_nullspace() {
        let f2 = Fq::get(2, 1).unwrap();
        let t = tpoly(f2, &[0, 1]);
        let one = tpoly(f2, &[1]);
        // [ t    1   ]        nullspace: (1, t) up to scale? rows: t*x + y = 0,
        // [ t^2  t   ]        second row is t times the first: rank 1.
        let rows = vec![
            vec![t.clone(), one.clone()],
            vec![t.mul(&t), t.clone()],
        ];
        let m = PolyMatrix::new(f2, 2, rows.clone());
        assert_eq!(PolyMatrix::new(f2, 2, rows).rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        // y = -t x: vector proportional to (1, t).
        assert_eq!(ns[0][0], one);
        assert_eq!(ns[0][1], t);
    }

    #[test]
    fn content_removal_keeps_vectors_primitive() {
        let f3 = Fq::get(3, 1).unwrap();
        let t = tpoly(f3, &[0, 1]);
        let mut row = vec![t.mul(&t), t.clone().scale(&f3.elem(2).unwrap())];
        remove_content(&mut row);
        assert_eq!(row[0], t);
        assert_eq!(row[1], tpoly(f3, &[2]));
    }
}
