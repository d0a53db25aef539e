//! Carlitz-module arithmetic over F_q[θ]: the factorial product tables D_i,
//! L_i, Γ_m, the shtuka-side polynomials G_i and H_n, the action of F_q[t] on
//! points of the n-th tensor power, logarithm bottom rows, and the
//! zeta-to-pi-power ratio series.
//!
//! Representation invariants:
//! - All tables are memoized per field inside a `CarlitzContext`, which is
//!   interned per field and shared process-wide (`CarlitzContext::get`).
//! - H_n is produced over F_q(t)[θ] and cleared to F_q[t,θ] by multiplying
//!   with Γ_{n+1}(t); inexact clearing is a hard error, never a truncation.
//! - Tensor points carry coordinates in F_q[θ] (variable θ), index 0 holding
//!   the first coordinate; the t-action keeps coordinates integral.

use std::sync::{Mutex, OnceLock, RwLock};

use crate::algebra::{BiPoly, Fq, FqElem, FqPoly, RatFunc, UniPoly, Var};
use crate::error::CarlitzError;

/// A point of the n-th tensor power of the Carlitz module with coordinates
/// in F_q[θ]; the tensor power n is the coordinate count.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorPoint {
    fq: &'static Fq,
    coords: Vec<FqPoly>,
}

/// The weight-indexed interpolation polynomial H_n in F_q[t,θ], together
/// with its index.
#[derive(Clone, PartialEq, Eq)]
pub struct ATPolynomial {
    index: usize,
    poly: BiPoly,
}

/// Shared arithmetic context for one base field: memoized product tables and
/// the calibration constant for the zeta-to-pi-power ratio.
///
/// All tables are append-only under a read-mostly lock discipline: readers
/// take the read lock; a missing prefix is filled once under the write lock.
pub struct CarlitzContext {
    fq: &'static Fq,
    d_theta: RwLock<Vec<FqPoly>>,
    d_t: RwLock<Vec<FqPoly>>,
    l_theta: RwLock<Vec<FqPoly>>,
    g_cache: RwLock<Vec<BiPoly>>,
    /// h_n = H_n/Γ_{n+1}(t), θ-major with coefficients in F_q(t).
    h_cache: RwLock<Vec<UniPoly<RatFunc>>>,
    at_cache: RwLock<Vec<BiPoly>>,
    /// Coefficients of the multiplicative inverse of Σ_i z^{q^i−1}/D_i.
    euler_cache: RwLock<Vec<RatFunc>>,
    calibration: OnceLock<FqElem>,
}

static REGISTRY: OnceLock<Mutex<Vec<&'static CarlitzContext>>> = OnceLock::new();

// ---- Construction and interning ----

impl CarlitzContext {
    /// Returns the interned context for `fq`, creating it on first use.
    pub fn get(fq: &'static Fq) -> &'static CarlitzContext {
        let registry = REGISTRY.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = registry.lock().unwrap();
        if let Some(ctx) = guard.iter().find(|c| std::ptr::eq(c.fq, fq)) {
            return ctx;
        }
        let ctx: &'static CarlitzContext = Box::leak(Box::new(CarlitzContext {
            fq,
            d_theta: RwLock::new(Vec::new()),
            d_t: RwLock::new(Vec::new()),
            l_theta: RwLock::new(Vec::new()),
            g_cache: RwLock::new(Vec::new()),
            h_cache: RwLock::new(Vec::new()),
            at_cache: RwLock::new(Vec::new()),
            euler_cache: RwLock::new(Vec::new()),
            calibration: OnceLock::new(),
        }));
        guard.push(ctx);
        ctx
    }

    /// The base field.
    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    fn q(&self) -> usize {
        self.fq.q() as usize
    }

    // ---- Product tables ----

    /// D_i(θ) = (θ^{q^i} − θ)·D_{i−1}^q, D_0 = 1.
    pub fn d_theta(&self, i: usize) -> FqPoly {
        self.product_table(&self.d_theta, Var::Theta, i)
    }

    /// D_i(t): the same product with t in place of θ.
    pub fn d_t(&self, i: usize) -> FqPoly {
        self.product_table(&self.d_t, Var::T, i)
    }

    fn product_table(&self, lock: &RwLock<Vec<FqPoly>>, var: Var, i: usize) -> FqPoly {
        {
            let tbl = lock.read().unwrap();
            if i < tbl.len() {
                return tbl[i].clone();
            }
        }
        let zero = self.fq.zero();
        let one = self.fq.one();
        let mut tbl = lock.write().unwrap();
        if tbl.is_empty() {
            tbl.push(FqPoly::one(var, &zero));
        }
        while tbl.len() <= i {
            let k = tbl.len();
            let qk = self.q().pow(k as u32);
            let head = FqPoly::monomial(var, one, qk).sub(&FqPoly::variable(var, &zero));
            let next = head.mul(&tbl[k - 1].dilate_exponents(self.q()));
            tbl.push(next);
        }
        tbl[i].clone()
    }

    /// L_i(θ) = (θ − θ^q)···(θ − θ^{q^i}), L_0 = 1.
    pub fn l_theta(&self, i: usize) -> FqPoly {
        {
            let tbl = self.l_theta.read().unwrap();
            if i < tbl.len() {
                return tbl[i].clone();
            }
        }
        let zero = self.fq.zero();
        let one = self.fq.one();
        let mut tbl = self.l_theta.write().unwrap();
        if tbl.is_empty() {
            tbl.push(FqPoly::one(Var::Theta, &zero));
        }
        while tbl.len() <= i {
            let k = tbl.len();
            let qk = self.q().pow(k as u32);
            let factor =
                FqPoly::variable(Var::Theta, &zero).sub(&FqPoly::monomial(Var::Theta, one, qk));
            let next = factor.mul(&tbl[k - 1]);
            tbl.push(next);
        }
        tbl[i].clone()
    }

    /// Γ_m(θ) = ∏ D_i^{n_i} with (n_i) the base-q digits of m−1; Γ_1 = 1.
    pub fn gamma_theta(&self, m: u64) -> Result<FqPoly, CarlitzError> {
        self.gamma_with(m, |i| self.d_theta(i))
    }

    /// Γ_m(t): the same product over D_i(t).
    pub fn gamma_t(&self, m: u64) -> Result<FqPoly, CarlitzError> {
        self.gamma_with(m, |i| self.d_t(i))
    }

    fn gamma_with(&self, m: u64, d: impl Fn(usize) -> FqPoly) -> Result<FqPoly, CarlitzError> {
        if m == 0 {
            return Err(CarlitzError::IndexOutOfRange(0));
        }
        let mut rem = m - 1;
        let q = self.fq.q();
        let mut acc = FqPoly::one(d(0).var(), &self.fq.zero());
        let mut i = 0usize;
        while rem > 0 {
            let digit = rem % q;
            if digit > 0 {
                acc = acc.mul(&d(i).pow(digit));
            }
            rem /= q;
            i += 1;
        }
        Ok(acc)
    }

    /// G_i(θ) = ∏_{j=1}^{i} (t^{q^i} − θ^{q^j}) in F_q[t,θ]; G_0 = 1.
    pub fn g_poly(&self, i: usize) -> BiPoly {
        {
            let tbl = self.g_cache.read().unwrap();
            if i < tbl.len() {
                return tbl[i].clone();
            }
        }
        let one = self.fq.one();
        let mut tbl = self.g_cache.write().unwrap();
        while tbl.len() <= i {
            let k = tbl.len();
            let qk = self.q().pow(k as u32);
            let mut acc = BiPoly::one(self.fq);
            let t_pow = BiPoly::from_t_poly(&FqPoly::monomial(Var::T, one, qk));
            for j in 1..=k {
                let qj = self.q().pow(j as u32);
                let theta_pow = BiPoly::from_theta_poly(FqPoly::monomial(Var::Theta, one, qj));
                acc = acc.mul(&t_pow.sub(&theta_pow));
            }
            tbl.push(acc);
        }
        tbl[i].clone()
    }

    // ---- The polynomials H_n ----

    /// b_i = G_i(θ)/D_i(t), θ-major with rational-in-t coefficients.
    fn b_coeff(&self, i: usize) -> UniPoly<RatFunc> {
        let den = self.d_t(i);
        let g = self.g_poly(i).theta_major();
        let zero = RatFunc::zero(Var::T, self.fq.zero());
        g.map(Var::Theta, zero, |c| {
            RatFunc::new(c.clone(), den.clone()).expect("table denominators are nonzero")
        })
    }

    /// Fills h_0..h_n; h_n = Σ_{q^i ≤ n} b_i·h_{n−q^i}, h_0 = 1.
    fn ensure_h(&self, n: usize) {
        {
            let tbl = self.h_cache.read().unwrap();
            if n < tbl.len() {
                return;
            }
        }
        let one = RatFunc::from_elem(Var::T, self.fq.one());
        let zero = RatFunc::zero(Var::T, self.fq.zero());
        let mut tbl = self.h_cache.write().unwrap();
        if tbl.is_empty() {
            tbl.push(UniPoly::constant(Var::Theta, one));
        }
        while tbl.len() <= n {
            let k = tbl.len();
            let mut acc = UniPoly::zero(Var::Theta, &zero);
            let mut i = 0usize;
            loop {
                let qi = self.q().checked_pow(i as u32).expect("index overflow");
                if qi > k {
                    break;
                }
                acc = acc.add(&self.b_coeff(i).mul(&tbl[k - qi]));
                i += 1;
            }
            tbl.push(acc);
        }
    }

    /// H_n = Γ_{n+1}(t)·h_n, cleared exactly into F_q[t,θ].
    pub fn anderson_thakur(&self, n: usize) -> Result<ATPolynomial, CarlitzError> {
        {
            let tbl = self.at_cache.read().unwrap();
            if n < tbl.len() {
                return Ok(ATPolynomial { index: n, poly: tbl[n].clone() });
            }
        }
        self.ensure_h(n);
        let mut tbl = self.at_cache.write().unwrap();
        while tbl.len() <= n {
            let k = tbl.len();
            let h = self.h_cache.read().unwrap()[k].clone();
            let gamma = self.gamma_t(k as u64 + 1)?;
            let mut theta_major: Vec<FqPoly> = Vec::with_capacity(h.coeffs().len());
            for c in h.coeffs() {
                let cleared = c.scale_poly(&gamma);
                let poly = cleared
                    .as_polynomial()
                    .map_err(|_| CarlitzError::ClearingFailed { degree: k })?;
                theta_major.push(poly.clone());
            }
            let inner = UniPoly::from_vec(
                Var::Theta,
                FqPoly::zero(Var::T, &self.fq.zero()),
                theta_major,
            );
            tbl.push(BiPoly::from_theta_major(self.fq, &inner));
        }
        Ok(ATPolynomial { index: n, poly: tbl[n].clone() })
    }

    /// Number of H indices currently memoized (contiguous from 0).
    pub fn anderson_thakur_count(&self) -> usize {
        self.at_cache.read().unwrap().len()
    }

    /// Installs H_0..H_{prefix.len()-1} from an external store into the memo
    /// tables, reconstructing h_i = H_i/Γ_{i+1}(t) for the recurrence.
    /// H_0 must be 1 and entries already memoized must agree with the seeded
    /// values; content beyond those checks is trusted. Returns how many
    /// entries were newly installed.
    pub fn seed_anderson_thakur(&self, prefix: &[BiPoly]) -> Result<usize, CarlitzError> {
        if prefix.is_empty() {
            return Ok(0);
        }
        if prefix[0] != BiPoly::one(self.fq) {
            return Err(CarlitzError::SeedMismatch { index: 0 });
        }
        // Gammas before the locks: gamma_t takes its own tables.
        let mut gammas = Vec::with_capacity(prefix.len());
        for i in 0..prefix.len() {
            gammas.push(self.gamma_t(i as u64 + 1)?);
        }
        // Lock order matches anderson_thakur: at table, then h table.
        let mut at_tbl = self.at_cache.write().unwrap();
        let mut h_tbl = self.h_cache.write().unwrap();
        let mut installed = 0;
        for (i, poly) in prefix.iter().enumerate() {
            if i < at_tbl.len() {
                if at_tbl[i] != *poly {
                    return Err(CarlitzError::SeedMismatch { index: i });
                }
                continue;
            }
            if i >= h_tbl.len() {
                let zero = RatFunc::zero(Var::T, self.fq.zero());
                let theta_major = poly.theta_major();
                let mut coeffs = Vec::with_capacity(theta_major.coeffs().len());
                for c in theta_major.coeffs() {
                    coeffs.push(RatFunc::new(c.clone(), gammas[i].clone())?);
                }
                h_tbl.push(UniPoly::from_vec(Var::Theta, zero, coeffs));
            }
            at_tbl.push(poly.clone());
            installed += 1;
        }
        Ok(installed)
    }

    /// Checks (Σ_{n<bound} H_n/Γ_{n+1}(t)·x^n)·(1 − Σ G_i(θ)/D_i(t)·x^{q^i}) ≡ 1
    /// mod x^bound, re-multiplying the finished H_n rather than replaying the
    /// production recurrence's intermediate state.
    pub fn generating_identity_holds(&self, bound: usize) -> Result<bool, CarlitzError> {
        let zero = RatFunc::zero(Var::T, self.fq.zero());
        let mut w: Vec<UniPoly<RatFunc>> = Vec::with_capacity(bound);
        for n in 0..bound {
            let h = self.anderson_thakur(n)?.poly.theta_major();
            let gamma = self.gamma_t(n as u64 + 1)?;
            w.push(h.map(Var::Theta, zero.clone(), |c| {
                RatFunc::new(c.clone(), gamma.clone()).expect("gamma is nonzero")
            }));
        }
        for n in 0..bound {
            let mut acc = w[n].clone();
            let mut i = 0usize;
            loop {
                let qi = self.q().pow(i as u32);
                if qi > n {
                    break;
                }
                acc = acc.sub(&self.b_coeff(i).mul(&w[n - qi]));
                i += 1;
            }
            let ok = if n == 0 { acc.is_one() } else { acc.is_zero() };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ---- Torsion scalars ----

    /// The annihilator scalar attached to an even second index: with h maximal
    /// such that (q^h−1) | s2 and s2/(q^h−1) = p^ℓ·m, p ∤ m, returns
    /// (t^{q^h} − t)^{p^ℓ} in F_q[t].
    pub fn alpha_for(&self, s2: usize) -> Result<FqPoly, CarlitzError> {
        let q = self.q();
        if s2 == 0 || s2 % (q - 1) != 0 {
            return Err(CarlitzError::NotAEven { m: s2 as u64, divisor: q as u64 - 1 });
        }
        let mut h = 1usize;
        let mut best = 1usize;
        loop {
            let qh = match q.checked_pow(h as u32) {
                Some(v) if v - 1 <= s2 => v,
                _ => break,
            };
            if s2 % (qh - 1) == 0 {
                best = h;
            }
            h += 1;
        }
        let qh = q.pow(best as u32);
        let mut m = s2 / (qh - 1);
        let p = self.fq.p() as usize;
        let mut pl = 1u64;
        while m % p == 0 {
            m /= p;
            pl *= p as u64;
        }
        let zero = self.fq.zero();
        let one = self.fq.one();
        let base = FqPoly::monomial(Var::T, one, qh).sub(&FqPoly::variable(Var::T, &zero));
        Ok(base.pow(pl))
    }

    // ---- Logarithm bottom rows ----

    /// The bottom row of the i-th logarithm coefficient matrix for the n-th
    /// tensor power: entries (−1)^{n−ℓ}(θ^{q^i}−θ)^{n−ℓ}/L_i^n for ℓ = 1..n.
    /// Requires i ≥ 1 (the i = 0 matrix is the identity).
    pub fn log_bottom_row(&self, i: usize, n: usize) -> Vec<RatFunc> {
        assert!(i >= 1 && n >= 1, "log_bottom_row requires i >= 1, n >= 1");
        let zero = self.fq.zero();
        let one = self.fq.one();
        let qi = self.q().pow(i as u32);
        let base = FqPoly::monomial(Var::Theta, one, qi).sub(&FqPoly::variable(Var::Theta, &zero));
        let li_n = self.l_theta(i).pow(n as u64);
        (1..=n)
            .map(|l| {
                let mut num = base.pow((n - l) as u64);
                if (n - l) % 2 == 1 {
                    num = num.neg();
                }
                RatFunc::new(num, li_n.clone()).expect("L_i is nonzero")
            })
            .collect()
    }

    // ---- Zeta-to-pi-power ratios ----

    /// Coefficient of z^m in the series inverse of Σ_{i≥0} z^{q^i−1}/D_i(θ),
    /// before the global calibration constant is applied.
    pub fn euler_ratio_raw(&self, m: usize) -> Result<RatFunc, CarlitzError> {
        let q = self.q();
        if m == 0 || m % (q - 1) != 0 {
            return Err(CarlitzError::NotAEven { m: m as u64, divisor: q as u64 - 1 });
        }
        {
            let tbl = self.euler_cache.read().unwrap();
            if m < tbl.len() {
                return Ok(tbl[m].clone());
            }
        }
        let one = RatFunc::from_elem(Var::Theta, self.fq.one());
        let mut tbl = self.euler_cache.write().unwrap();
        if tbl.is_empty() {
            tbl.push(one);
        }
        while tbl.len() <= m {
            let k = tbl.len();
            // u_j = 1/D_i(θ) when j = q^i − 1 with i ≥ 1, else 0:
            // w_k = −Σ_j u_j·w_{k−j}.
            let mut acc = RatFunc::zero(Var::Theta, self.fq.zero());
            let mut i = 1usize;
            loop {
                let j = match q.checked_pow(i as u32) {
                    Some(v) if v - 1 <= k => v - 1,
                    _ => break,
                };
                let u = RatFunc::new(
                    FqPoly::one(Var::Theta, &self.fq.zero()),
                    self.d_theta(i),
                )
                .expect("D_i is nonzero");
                acc = acc.add(&u.mul(&tbl[k - j]));
                i += 1;
            }
            tbl.push(acc.neg());
        }
        Ok(tbl[m].clone())
    }

    /// γ_m with ζ_A(m) = γ_m·π̃^m, for (q−1) | m; requires prior calibration.
    pub fn euler_ratio(&self, m: usize) -> Result<RatFunc, CarlitzError> {
        let raw = self.euler_ratio_raw(m)?;
        let kappa = self.calibration.get().ok_or(CarlitzError::Uncalibrated)?;
        Ok(raw.scale_poly(&FqPoly::constant(Var::Theta, *kappa)))
    }

    /// Stores the calibration constant; re-setting to a different value is an
    /// error, re-setting to the same value is a no-op.
    pub fn set_calibration(&self, kappa: FqElem) -> Result<(), CarlitzError> {
        let stored = self.calibration.get_or_init(|| kappa);
        if *stored != kappa {
            return Err(CarlitzError::CalibrationMismatch {
                first: stored.digit(),
                second: kappa.digit(),
            });
        }
        Ok(())
    }

    /// The stored calibration constant, if any.
    pub fn calibration(&self) -> Option<FqElem> {
        self.calibration.get().copied()
    }
}

// ---- Tensor points and the t-action ----

impl TensorPoint {
    /// Wraps coordinates (variable θ) as a point of the len-th tensor power.
    pub fn new(fq: &'static Fq, coords: Vec<FqPoly>) -> Self {
        assert!(!coords.is_empty(), "tensor power must be positive");
        for c in &coords {
            debug_assert_eq!(c.var(), Var::Theta);
        }
        TensorPoint { fq, coords }
    }

    /// The origin of the n-th tensor power.
    pub fn zero(fq: &'static Fq, n: usize) -> Self {
        let z = FqPoly::zero(Var::Theta, &fq.zero());
        TensorPoint { fq, coords: vec![z; n] }
    }

    /// The base field.
    pub fn field(&self) -> &'static Fq {
        self.fq
    }

    /// The tensor power n.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates, first coordinate at index 0.
    pub fn coords(&self) -> &[FqPoly] {
        &self.coords
    }

    /// Largest θ-degree over all coordinates; None for the origin.
    pub fn sup_degree(&self) -> Option<usize> {
        self.coords.iter().filter_map(|c| c.degree()).max()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim());
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a.add(b))
            .collect();
        TensorPoint { fq: self.fq, coords }
    }

    pub fn neg(&self) -> Self {
        TensorPoint { fq: self.fq, coords: self.coords.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Scales every coordinate by a field constant.
    pub fn scale_elem(&self, c: &FqElem) -> Self {
        TensorPoint { fq: self.fq, coords: self.coords.iter().map(|p| p.scale(c)).collect() }
    }
}

impl std::fmt::Debug for TensorPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, ")")
    }
}

impl ATPolynomial {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }

    pub fn into_poly(self) -> BiPoly {
        self.poly
    }

    /// Largest θ-degree over the t-coefficients; None when H_n is constant 0
    /// (never produced) or θ-free.
    pub fn sup_degree(&self) -> Option<usize> {
        self.poly.sup_degree()
    }
}

/// One application of the t-action on the n-th tensor power:
/// (z_1,…,z_n) ↦ (θz_1 + z_2, …, θz_{n−1} + z_n, θz_n + z_1^q).
pub fn t_step(z: &TensorPoint) -> TensorPoint {
    let fq = z.field();
    let n = z.dim();
    let theta = FqPoly::variable(Var::Theta, &fq.zero());
    let q = fq.q() as usize;
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let shifted = theta.mul(&z.coords()[i]);
        let tail = if i + 1 < n {
            z.coords()[i + 1].clone()
        } else {
            z.coords()[0].dilate_exponents(q)
        };
        coords.push(shifted.add(&tail));
    }
    TensorPoint::new(fq, coords)
}

/// The action of a ∈ F_q[t] on a tensor point, by Horner iteration of the
/// single t-step; constants act as scalars.
pub fn carlitz_action(a: &FqPoly, z: &TensorPoint) -> TensorPoint {
    assert_eq!(a.var(), Var::T, "action scalars live in F_q[t]");
    let Some(d) = a.degree() else {
        return TensorPoint::zero(z.field(), z.dim());
    };
    let mut acc = z.scale_elem(a.coeff(d));
    for i in (0..d).rev() {
        acc = t_step(&acc);
        let term = z.scale_elem(a.coeff(i));
        acc = acc.add(&term);
    }
    acc
}
