//! Analytic oracle in the completion F_q((1/θ)): power sums over monic
//! polynomials, single and double zeta values, powers of the period, Padé
//! reconstruction of rational numbers from series, and the independent
//! verification of relation certificates.
//!
//! Power sums travel two routes. The exact route enumerates all q^d monic
//! polynomials of degree d and returns the sum of inverse k-th powers as a
//! reduced rational function; it is feasible only for small d and serves as
//! a cross-check oracle. The series route sums truncated inverses directly
//! in F_q((1/θ)). Its precision claims rest on the tail bound
//! val S_d(k) >= k*d + (q-1)*d*(d+1)/2 (summing over all coefficient tuples
//! kills every monomial with an exponent not divisible by q-1), so a sum
//! truncated at depth d_max is sound through 1/θ-exponent
//! k*(d_max+1) + (q-1)*(d_max+1)*(d_max+2)/2 exclusive.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::algebra::{
    fq_nullspace, Fq, FqElem, FqPoly, LaurentSeries, RatFunc, UniPoly, Var, INF_PREC,
};
use crate::carlitz::CarlitzContext;
use crate::error::{AlgebraError, CarlitzError, NumericError};

/// Reconstruction requires this many series coefficients beyond the unknowns.
const RECONSTRUCT_MARGIN: i64 = 10;
/// Verification may report Failed only when the precision supported at
/// least this degree budget for the reconstruction; below it, a miss is
/// Inconclusive (the caller raises the depth).
const MIN_FAIL_BOUND: i64 = 24;
/// A series must vanish through at least this many exponents to count as zero.
const ZERO_MARGIN: i64 = 10;
/// Cap on the total number of monic polynomials a series evaluation may visit.
const MAX_MONIC_ENUMERATION: u128 = 1 << 24;
/// Cap on q^d for the exact power-sum route.
const MAX_EXACT_ENUMERATION: u128 = 1 << 14;
/// Cap on the estimated coefficient work of the exact power-sum route.
const MAX_EXACT_WORK: u128 = 1 << 30;

// ---- Index tuples ----

/// Index of a zeta value: a single index n or an ordered pair (s1, s2).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ZetaIndex {
    Single(u64),
    Double(u64, u64),
}

impl ZetaIndex {
    /// Total weight: n for a single index, s1 + s2 for a pair.
    pub fn weight(&self) -> u64 {
        match self {
            ZetaIndex::Single(n) => *n,
            ZetaIndex::Double(s1, s2) => s1 + s2,
        }
    }
}

/// A zeta value evaluated to explicit precision at a truncation depth.
#[derive(Clone, Debug)]
pub struct ZetaEvaluation {
    index: ZetaIndex,
    depth: usize,
    value: LaurentSeries,
}

impl ZetaEvaluation {
    pub fn index(&self) -> ZetaIndex {
        self.index
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn series(&self) -> &LaurentSeries {
        &self.value
    }

    /// Guaranteed precision: every 1/θ-coefficient below this is exact.
    pub fn precision(&self) -> i64 {
        self.value.prec_end()
    }
}

// ---- Series-route evaluator ----

/// Evaluates power sums and zeta values as truncated Laurent series at a
/// fixed truncation depth, memoizing each S_d(k).
pub struct ZetaEvaluator {
    ctx: &'static CarlitzContext,
    depth: usize,
    cache: Mutex<HashMap<(usize, u64), LaurentSeries>>,
}

impl ZetaEvaluator {
    // ---- Constructors ----

    pub fn new(ctx: &'static CarlitzContext, depth: usize) -> Result<Self, NumericError> {
        let q = ctx.field().q() as u128;
        let mut total: u128 = 0;
        let mut max_depth = 0u64;
        let mut layer: u128 = 1;
        for d in 0..=depth {
            total = total.saturating_add(layer);
            if total > MAX_MONIC_ENUMERATION {
                return Err(NumericError::DepthTooLarge {
                    got: depth as u64,
                    max: max_depth,
                });
            }
            max_depth = d as u64;
            layer = layer.saturating_mul(q);
        }
        Ok(ZetaEvaluator {
            ctx,
            depth,
            cache: Mutex::new(HashMap::new()),
        })
    }

    // ---- Accessors ----

    pub fn field(&self) -> &'static Fq {
        self.ctx.field()
    }

    pub fn context(&self) -> &'static CarlitzContext {
        self.ctx
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Sound precision for a sum truncated at this depth whose leading
    /// index is k: omitted strata have valuation at least this.
    pub fn tail_bound(&self, k: u64) -> i64 {
        let q = self.field().q();
        let d1 = self.depth as u64 + 1;
        (k * d1 + (q - 1) * d1 * (d1 + 1) / 2) as i64
    }

    // ---- Power sums ----

    /// S_d(k) = Σ 1/a^k over monic a of degree d, to the given precision.
    pub fn power_sum_series(&self, d: usize, k: u64, prec_end: i64) -> LaurentSeries {
        assert!(k >= 1, "power sum index must be positive");
        if let Some(s) = self.cache.lock().unwrap().get(&(d, k)) {
            if s.prec_end() >= prec_end {
                return s.truncate_to(prec_end);
            }
        }
        let s = self.compute_power_sum(d, k, prec_end);
        self.cache.lock().unwrap().insert((d, k), s.clone());
        s
    }

    fn compute_power_sum(&self, d: usize, k: u64, prec_end: i64) -> LaurentSeries {
        let fq = self.field();
        let p = fq.p();
        // Frobenius drop: S_d(pk') = S_d(k')^p.
        if k > p && k % p == 0 {
            return self.power_sum_series(d, k / p, prec_end).pow(p);
        }
        let mut acc = LaurentSeries::zero_prec(fq, prec_end);
        for a in monic_polys(fq, d) {
            let inv = LaurentSeries::from_theta_poly(&a.pow(k))
                .inv_to(prec_end)
                .expect("a monic polynomial is a unit in the completion");
            acc = acc.add(&inv);
        }
        acc
    }

    // ---- Zeta values ----

    /// ζ_A(k) truncated at this depth, sound to tail_bound(k).
    pub fn zeta_single(&self, k: u64) -> Result<ZetaEvaluation, NumericError> {
        if k == 0 {
            return Err(CarlitzError::IndexOutOfRange(0).into());
        }
        let prec = self.tail_bound(k);
        let mut acc = LaurentSeries::zero_prec(self.field(), prec);
        for d in 0..=self.depth {
            acc = acc.add(&self.power_sum_series(d, k, prec));
        }
        Ok(ZetaEvaluation {
            index: ZetaIndex::Single(k),
            depth: self.depth,
            value: acc,
        })
    }

    /// ζ_A(s1, s2) truncated at this depth, sound to tail_bound(s1).
    pub fn zeta_double(&self, s1: u64, s2: u64) -> Result<ZetaEvaluation, NumericError> {
        if s1 == 0 || s2 == 0 {
            return Err(CarlitzError::IndexOutOfRange(0).into());
        }
        let prec = self.tail_bound(s1);
        let fq = self.field();
        let mut inner = LaurentSeries::zero_prec(fq, prec);
        let mut acc = LaurentSeries::zero_prec(fq, prec);
        for i1 in 1..=self.depth {
            inner = inner.add(&self.power_sum_series(i1 - 1, s2, prec));
            acc = acc.add(&self.power_sum_series(i1, s1, prec).mul(&inner));
        }
        Ok(ZetaEvaluation {
            index: ZetaIndex::Double(s1, s2),
            depth: self.depth,
            value: acc,
        })
    }

    pub fn evaluate(&self, index: &ZetaIndex) -> Result<ZetaEvaluation, NumericError> {
        match index {
            ZetaIndex::Single(n) => self.zeta_single(*n),
            ZetaIndex::Double(s1, s2) => self.zeta_double(*s1, *s2),
        }
    }
}

/// All monic polynomials in θ of the given degree, in base-q counting order.
fn monic_polys(fq: &'static Fq, d: usize) -> impl Iterator<Item = FqPoly> {
    let elems: Vec<FqElem> = fq.elements().collect();
    let q = fq.q() as u128;
    let total = q.pow(d as u32);
    (0..total).map(move |code| {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            coeffs.push(elems[(c % q) as usize]);
            c /= q;
        }
        coeffs.push(elems[0].field().one());
        UniPoly::from_vec(Var::Theta, elems[0].field().zero(), coeffs)
    })
}

// ---- Exact power sums ----

/// S_d(k) as a reduced rational function, by enumerating all q^d monic
/// polynomials of degree d and summing (L_d/a)^k over the common
/// denominator L_d^k. Feasible only for small d; see the series route for
/// production sums.
pub fn power_sum(ctx: &CarlitzContext, d: usize, k: u64) -> Result<RatFunc, NumericError> {
    let fq = ctx.field();
    if k == 0 {
        return Err(CarlitzError::IndexOutOfRange(0).into());
    }
    let q = fq.q() as u128;
    let count = q.pow(d as u32);
    if count > MAX_EXACT_ENUMERATION {
        let mut max = 0u64;
        while q.pow(max as u32 + 1) <= MAX_EXACT_ENUMERATION {
            max += 1;
        }
        return Err(NumericError::DepthTooLarge {
            got: d as u64,
            max,
        });
    }
    let ld = ctx.l_theta(d);
    let deg_ld = ld.degree().unwrap_or(0) as u128;
    let work = count * (k as u128 * deg_ld.max(1)).pow(2);
    if work > MAX_EXACT_WORK {
        return Err(NumericError::EnumerationTooLarge(work));
    }
    let mut num = FqPoly::zero(Var::Theta, &fq.zero());
    for a in monic_polys(fq, d) {
        num = num.add(&ld.exact_div(&a)?.pow(k));
    }
    Ok(RatFunc::new(num, ld.pow(k))?)
}

// ---- Period powers ----

/// π̃^n for (q-1) | n, to the requested precision. The base power is
/// π̃^(q-1) = (-θ)^q · Π_{i≥1} (1 - θ^(1-q^i))^-(q-1), whose root-of-unity
/// ambiguity cancels; other n are rejected since π̃^n lies outside F_q((1/θ)).
pub fn pi_power(fq: &'static Fq, n: u64, prec_end: i64) -> Result<LaurentSeries, NumericError> {
    let q = fq.q();
    if n % (q - 1) != 0 {
        return Err(CarlitzError::NotAEven {
            m: n,
            divisor: q - 1,
        }
        .into());
    }
    if n == 0 {
        return Ok(LaurentSeries::from_elem(fq.one()).truncate_to(prec_end));
    }
    let e = n / (q - 1);
    // Work at a relative precision wide enough to survive the e-th power.
    let rel = prec_end.saturating_add((q * (e + 1)) as i64 + 8).min(INF_PREC);
    let mut den = LaurentSeries::from_elem(fq.one()).truncate_to(rel);
    let mut step: u64 = q;
    loop {
        let shift = step - 1;
        if shift as i64 > rel {
            break;
        }
        // shift = q^i - 1, so the factor is 1 - θ^(1-q^i) = 1 - θ^(-shift).
        let factor = LaurentSeries::from_elem(fq.one())
            .sub(&LaurentSeries::theta_pow(fq, -(shift as i64)));
        den = den.mul(&factor.pow(q - 1)).truncate_to(rel);
        step = match step.checked_mul(q) {
            Some(next) => next,
            None => break,
        };
    }
    let base_poly = FqPoly::monomial(Var::Theta, fq.one().neg(), 1).pow(q);
    let base = LaurentSeries::from_theta_poly(&base_poly).mul(&den.inv_to(rel)?);
    let result = base.pow(e).truncate_to(prec_end);
    debug_assert!(result.prec_end() >= prec_end.min(INF_PREC));
    Ok(result)
}

// ---- Rational reconstruction ----

/// Expand a rational function of θ as a Laurent series in 1/θ.
pub fn ratfunc_series(f: &RatFunc, prec_end: i64) -> Result<LaurentSeries, AlgebraError> {
    assert_eq!(f.var(), Var::Theta, "series expansion is in 1/θ");
    let num = LaurentSeries::from_theta_poly(f.num());
    let den = LaurentSeries::from_theta_poly(f.den());
    num.div_to(&den, prec_end)
}

/// Recover N/D with deg N ≤ deg_num, deg D ≤ deg_den from a series, by a
/// linear solve on coefficients; demands at least RECONSTRUCT_MARGIN
/// coefficients beyond the unknown count and re-verifies the candidate by
/// expanding it against the full input precision.
pub fn rational_reconstruct(
    x: &LaurentSeries,
    deg_num: usize,
    deg_den: usize,
) -> Result<RatFunc, AlgebraError> {
    let fq = x.field();
    let unknowns = (deg_num + deg_den + 2) as i64;
    if x.is_zero_to_prec() {
        if x.prec_end() < RECONSTRUCT_MARGIN {
            return Err(AlgebraError::InsufficientPrecision {
                need: RECONSTRUCT_MARGIN,
                have: x.prec_end(),
            });
        }
        return Ok(RatFunc::zero(Var::Theta, fq.zero()));
    }
    let xval = x.val().expect("nonzero to precision");
    // Exact inputs have unbounded precision; a window of unknowns + margin
    // past the constant term determines them completely.
    let eff_prec = x
        .prec_end()
        .min(xval.max(0) + unknowns + RECONSTRUCT_MARGIN + 16);
    if eff_prec - xval < unknowns + RECONSTRUCT_MARGIN {
        return Err(AlgebraError::InsufficientPrecision {
            need: xval + unknowns + RECONSTRUCT_MARGIN,
            have: eff_prec,
        });
    }
    // Unknown layout: D coefficients d_0..d_deg_den, then N coefficients.
    // Row at exponent e states Σ_i d_i·x_{e+i} - n_{-e} = 0.
    let e_lo = (xval - deg_den as i64).min(-(deg_num as i64));
    let e_hi = eff_prec - 1 - deg_den as i64;
    let ncols = deg_den + 1 + deg_num + 1;
    let mut rows = Vec::with_capacity((e_hi - e_lo + 1) as usize);
    for e in e_lo..=e_hi {
        let mut row = vec![fq.zero(); ncols];
        for (i, slot) in row.iter_mut().take(deg_den + 1).enumerate() {
            *slot = x
                .coeff_at(e + i as i64)
                .expect("row window sits inside the precision horizon");
        }
        if -e >= 0 && -e <= deg_num as i64 {
            row[deg_den + 1 + (-e) as usize] = fq.one().neg();
        }
        rows.push(row);
    }
    let kernel = fq_nullspace(fq, &rows, ncols);
    let verify_prec = if x.is_exact() { eff_prec } else { x.prec_end() };
    for v in &kernel {
        let den = UniPoly::from_vec(Var::Theta, fq.zero(), v[..=deg_den].to_vec());
        if den.is_zero() {
            continue;
        }
        let num = UniPoly::from_vec(Var::Theta, fq.zero(), v[deg_den + 1..].to_vec());
        let candidate = RatFunc::new(num, den)?;
        let expanded = ratfunc_series(&candidate, verify_prec)?;
        if expanded.sub(x).is_zero_to_prec() {
            return Ok(candidate);
        }
    }
    Err(AlgebraError::ReconstructionFailed { deg_num, deg_den })
}

// ---- Calibration ----

/// Fix the Euler-ratio constant numerically: reconstruct ζ_A(m)/π̃^m at
/// m = q-1 and 2(q-1), divide by the raw ratio, demand the same constant
/// both times, and store it on the context.
pub fn calibrate(ctx: &'static CarlitzContext, depth: usize) -> Result<FqElem, NumericError> {
    let q = ctx.field().q();
    let m0 = q - 1;
    let first = calibration_constant(ctx, depth, m0)?;
    let second = calibration_constant(ctx, depth, 2 * m0)?;
    if first != second {
        return Err(CarlitzError::CalibrationMismatch {
            first: m0,
            second: 2 * m0,
        }
        .into());
    }
    ctx.set_calibration(first)?;
    Ok(first)
}

fn calibration_constant(
    ctx: &'static CarlitzContext,
    depth: usize,
    m: u64,
) -> Result<FqElem, NumericError> {
    let fq = ctx.field();
    let q = fq.q();
    let evaluator = ZetaEvaluator::new(ctx, depth)?;
    let z = evaluator.zeta_single(m)?;
    let gain = (q * m / (q - 1)) as i64;
    let pp = pi_power(fq, m, z.precision() + gain + 4)?;
    let u = z.series().div_to(&pp, z.precision() + gain)?;
    // Informative coefficients run from the valuation to the horizon.
    let avail = u.prec_end() - u.val().unwrap_or(0);
    let bound = (((avail - RECONSTRUCT_MARGIN - 2) / 2).max(0) as usize).min(60);
    let gamma = rational_reconstruct(&u, bound, bound)?;
    let raw = ctx.euler_ratio_raw(m as usize)?;
    let mismatch = || CarlitzError::CalibrationMismatch { first: m, second: m };
    let ratio = gamma.div(&raw).map_err(|_| mismatch())?;
    let poly = ratio.as_polynomial().map_err(|_| mismatch())?;
    match poly.degree() {
        None | Some(0) => Ok(*poly.coeff(0)),
        Some(_) => Err(mismatch().into()),
    }
}

// ---- Relation verification ----

/// Outcome of checking one relation certificate against the zeta values.
#[derive(Clone, Debug)]
pub enum Verification {
    /// A-even weight: the combination equals c0·π̃^n, reconstructed and
    /// re-verified against the stated margin.
    Proportional { c0: RatFunc, margin: i64 },
    /// A-odd weight: the combination vanishes through the stated precision.
    Zero { margin: i64 },
    Failed { detail: String },
    Inconclusive { detail: String },
}

impl Verification {
    pub fn is_pass(&self) -> bool {
        matches!(
            self,
            Verification::Proportional { .. } | Verification::Zero { .. }
        )
    }
}

/// The coefficient in θ that a certificate scalar a(t) induces on the zeta
/// value behind a point: a(θ) times the digit factorials of the index, and
/// for a pair additionally the torsion multiplier attached to the second
/// index.
pub fn induced_coefficient(
    ctx: &CarlitzContext,
    label: &ZetaIndex,
    a: &FqPoly,
) -> Result<FqPoly, NumericError> {
    let eta = a.with_var(Var::Theta);
    let factor = match label {
        ZetaIndex::Single(m) => ctx.gamma_theta(*m)?,
        ZetaIndex::Double(s1, s2) => ctx
            .gamma_theta(*s1)?
            .mul(&ctx.gamma_theta(*s2)?)
            .mul(&ctx.alpha_for(*s2 as usize)?.with_var(Var::Theta)),
    };
    Ok(eta.mul(&factor))
}

/// Check one linear combination of zeta values numerically. Each label
/// pairs with a coefficient a(t) from a certificate; the combination
///   L = Σ a(θ)·Γ_n·ζ_A(n)  +  Σ a(θ)·α_s(θ)·Γ_{s1}Γ_{s2}·ζ_A(s1,s2)
/// must equal c0·π̃^n for A-even weight (c0 reconstructed) and vanish for
/// A-odd weight. Insufficient precision reports Inconclusive, never Failed;
/// Failed at A-even weight means no rational c0 fit within a degree budget
/// of at least MIN_FAIL_BOUND, so raising the depth raises the budget.
pub fn verify_relation(
    ctx: &'static CarlitzContext,
    labels: &[ZetaIndex],
    coefficients: &[FqPoly],
    depth: usize,
) -> Result<Verification, NumericError> {
    let evaluator = ZetaEvaluator::new(ctx, depth)?;
    verify_relation_with(&evaluator, labels, coefficients)
}

/// `verify_relation` against a caller-held evaluator, so one memoized set
/// of power sums serves many certificates.
pub fn verify_relation_with(
    evaluator: &ZetaEvaluator,
    labels: &[ZetaIndex],
    coefficients: &[FqPoly],
) -> Result<Verification, NumericError> {
    assert_eq!(
        labels.len(),
        coefficients.len(),
        "one coefficient per zeta label"
    );
    assert!(!labels.is_empty(), "a relation names at least one value");
    let ctx = evaluator.context();
    let fq = ctx.field();
    let q = fq.q();
    let n = labels[0].weight();
    assert!(
        labels.iter().all(|l| l.weight() == n),
        "labels must share one weight"
    );
    let mut total = LaurentSeries::zero_prec(fq, INF_PREC);
    for (label, a) in labels.iter().zip(coefficients) {
        if a.is_zero() {
            continue;
        }
        let coeff = induced_coefficient(ctx, label, a)?;
        let z = evaluator.evaluate(label)?;
        total = total.add(&LaurentSeries::from_theta_poly(&coeff).mul(z.series()));
    }
    let a_even = n % (q - 1) == 0;
    if total.is_zero_to_prec() {
        if total.prec_end() < ZERO_MARGIN {
            return Ok(Verification::Inconclusive {
                detail: format!(
                    "combination vanishes but only {} coefficients are visible",
                    total.prec_end()
                ),
            });
        }
        return Ok(if a_even {
            Verification::Proportional {
                c0: RatFunc::zero(Var::Theta, fq.zero()),
                margin: total.prec_end(),
            }
        } else {
            Verification::Zero {
                margin: total.prec_end(),
            }
        });
    }
    if !a_even {
        return Ok(Verification::Failed {
            detail: format!(
                "weight {n} combination should vanish but has valuation {}",
                total.val().expect("nonzero to precision")
            ),
        });
    }
    let gain = (q * n / (q - 1)) as i64;
    let pp = pi_power(fq, n, total.prec_end().saturating_add(gain + 4))?;
    let u = total.div_to(&pp, total.prec_end().saturating_add(gain))?;
    let avail = u.prec_end() - u.val().unwrap_or(0);
    let bound = ((avail - RECONSTRUCT_MARGIN - 2) / 2).min(150);
    if bound < MIN_FAIL_BOUND {
        return Ok(Verification::Inconclusive {
            detail: format!(
                "only {avail} coefficients available; degree budget {bound} is \
                 below the floor {MIN_FAIL_BOUND} for a decisive verdict"
            ),
        });
    }
    match rational_reconstruct(&u, bound as usize, bound as usize) {
        Ok(c0) => Ok(Verification::Proportional {
            c0,
            margin: avail - (2 * bound + 2),
        }),
        Err(AlgebraError::InsufficientPrecision { need, have }) => {
            Ok(Verification::Inconclusive {
                detail: format!("reconstruction needs precision {need}, have {have}"),
            })
        }
        Err(AlgebraError::ReconstructionFailed { deg_num, deg_den }) => {
            Ok(Verification::Failed {
                detail: format!(
                    "no rational multiple of the period power fits \
                     (degree bounds {deg_num}/{deg_den}, {avail} coefficients)"
                ),
            })
        }
        Err(e) => Err(e.into()),
    }
}
