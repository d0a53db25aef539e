//! Per-weight orchestration: assemble the index pairs, build their special
//! points, solve for the relation module, derive the span dimension and the
//! per-pair proportionality flags, and re-verify certificates numerically.
//!
//! The reported dimension is that of the space spanned by the weight-n
//! double zeta values together with the n-th power of the period. It equals
//! n - |V| + r, where V is the set of index pairs whose second entry is
//! divisible by q - 1 and r is the rank of the span of their special
//! points: pairs outside V never participate in relations, and every
//! independent relation among the points removes one dimension.
//!
//! Reports are deterministic: wall-clock timing is carried in memory but
//! excluded from serialization, so repeated runs (cold or warm cache) emit
//! identical bytes.

use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Fq;
use crate::carlitz::{CarlitzContext, TensorPoint};
use crate::chen::fp_linear_count;
use crate::error::{CarlitzError, NumericError, PipelineError};
use crate::fmodule::{even_index_pairs, special_point_vn, xi_point};
use crate::numeric::{
    calibrate, induced_coefficient, verify_relation_with, Verification, ZetaEvaluator, ZetaIndex,
};
use crate::siegel::{RelationBasis, SiegelSystem};

mod cache;
pub use cache::CacheStore;

/// Numeric verification runs by default through this weight.
pub const DEFAULT_VERIFY_LIMIT: usize = 12;
/// Truncation depth used to fix the calibration constant.
const CALIBRATION_DEPTH: usize = 6;
/// Monic-enumeration budget that picks the default truncation depth.
const DEPTH_BUDGET: u128 = 20_000;

/// Truncation depth used when none is requested: the largest depth whose
/// top-degree monic enumeration stays within a fixed budget.
pub fn default_depth(q: u64) -> usize {
    let q = q as u128;
    let mut d = 2usize;
    let mut pow = q.pow(3);
    while pow <= DEPTH_BUDGET {
        d += 1;
        pow = pow.saturating_mul(q);
    }
    d
}

// ---- Options ----

/// Knobs for a weight computation; every unset field falls back to a
/// deterministic default derived from the field.
#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Force numeric verification on or off; unset follows the weight limit.
    pub verify: Option<bool>,
    /// Weight through which verification defaults to on.
    pub verify_limit: Option<usize>,
    /// Truncation depth for the numeric route.
    pub depth: Option<usize>,
    /// Directory for persistent intermediates.
    pub cache_dir: Option<PathBuf>,
}

// ---- Reports ----

/// Proportionality flag for one index pair: whether its double zeta is a
/// rational-function multiple of the single zeta of the same weight.
#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub s1: usize,
    pub s2: usize,
    pub zeta_like: bool,
}

/// One relation certificate in reportable form. `a` holds the scalars in t
/// applied to the labeled values; `zeta_coefficients` the coefficients in θ
/// they induce on the zeta values themselves; `delta` the witness, constant
/// θ-power first.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub points: Vec<String>,
    pub a: Vec<String>,
    pub zeta_coefficients: Vec<String>,
    pub delta: Vec<String>,
    /// Numeric verdict; None when verification did not run.
    pub verified: Option<bool>,
    /// Reconstructed constant onto the period power, when one was computed.
    pub c0: Option<String>,
}

/// Everything measured at one weight.
#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    pub q: u64,
    pub weight: usize,
    pub v_size: usize,
    pub relation_rank: usize,
    pub point_rank: usize,
    pub dimension: usize,
    /// Count of certificates linear over the prime field; None at weights
    /// not divisible by q - 1, where the notion is undefined.
    pub fp_linear: Option<usize>,
    /// Flagged pairs that are not componentwise p-th multiples: a pair of
    /// p-th multiples repeats a lower-weight proportionality through the
    /// p-th power map, so only new witnesses are counted. The per-pair
    /// flags in `pairs` are unfiltered.
    pub zeta_like: usize,
    pub pairs: Vec<PairReport>,
    pub certificates: Vec<CertificateReport>,
    /// Largest coordinate degree among the special points.
    pub sup_degree: Option<usize>,
    /// Wall-clock milliseconds; excluded from serialized output so repeated
    /// runs emit identical bytes.
    #[serde(skip)]
    pub elapsed_ms: u64,
}

/// A weight report together with the exact objects behind it.
#[derive(Debug)]
pub struct WeightAnalysis {
    report: WeightReport,
    labels: Vec<ZetaIndex>,
    points: Vec<TensorPoint>,
    basis: RelationBasis,
}

impl WeightAnalysis {
    pub fn report(&self) -> &WeightReport {
        &self.report
    }

    pub fn into_report(self) -> WeightReport {
        self.report
    }

    /// Zeta labels of the points, in pair order.
    pub fn labels(&self) -> &[ZetaIndex] {
        &self.labels
    }

    /// The special points, in pair order.
    pub fn points(&self) -> &[TensorPoint] {
        &self.points
    }

    /// The solved relation module.
    pub fn basis(&self) -> &RelationBasis {
        &self.basis
    }
}

/// One row of a table sweep; failures are isolated per weight.
pub struct WeightOutcome {
    pub weight: usize,
    pub result: Result<WeightReport, PipelineError>,
}

// ---- Contexts ----

/// Interned context for the field of order q.
pub fn context_for_order(q: u64) -> Result<&'static CarlitzContext, PipelineError> {
    Ok(CarlitzContext::get(Fq::from_order(q)?))
}

/// Interned context for the field of order p^e.
pub fn context_for(p: u64, e: u32) -> Result<&'static CarlitzContext, PipelineError> {
    Ok(CarlitzContext::get(Fq::get(p, e)?))
}

// ---- Weight computation ----

/// Computes the full report for one weight.
pub fn dimension(
    ctx: &'static CarlitzContext,
    n: usize,
    opts: &PipelineOptions,
) -> Result<WeightAnalysis, PipelineError> {
    if n < 2 {
        return Err(PipelineError::BadRequest(format!(
            "weight must be at least 2, got {n}"
        )));
    }
    let start = Instant::now();
    let fq = ctx.field();
    let q = fq.q();
    let pairs = even_index_pairs(fq, n);
    debug_assert_eq!(pairs.len(), (n - 1) / (q as usize - 1));

    let store = match &opts.cache_dir {
        Some(dir) => Some(CacheStore::open(dir)?),
        None => None,
    };
    let seeded = match &store {
        Some(store) => seed_h(ctx, store)?,
        None => 0,
    };
    let mut points = Vec::with_capacity(pairs.len());
    for &(s1, s2) in &pairs {
        points.push(load_or_build_xi(ctx, store.as_ref(), s1, s2)?);
    }

    let labels: Vec<ZetaIndex> = pairs
        .iter()
        .map(|&(s1, s2)| ZetaIndex::Double(s1 as u64, s2 as u64))
        .collect();
    let sup_degree = points.iter().filter_map(TensorPoint::sup_degree).max();
    let basis = SiegelSystem::new(fq, n, points.clone())?.solve()?;
    if basis.anomalous() {
        return Err(PipelineError::MathAssertion {
            weight: n as u64,
            detail: "nullspace vector with zero scalar part".into(),
        });
    }
    let relation_rank = basis.relation_rank();
    let point_rank = basis.point_rank();
    let dimension = n - pairs.len() + point_rank;
    if dimension < 1 || dimension > n {
        return Err(PipelineError::MathAssertion {
            weight: n as u64,
            detail: format!("span dimension {dimension} escapes [1, {n}]"),
        });
    }

    let a_even = (n as u64) % (q - 1) == 0;
    let fp_linear = if a_even {
        ensure_calibrated(ctx)?;
        Some(fp_linear_count(ctx, n)?)
    } else {
        None
    };

    // Per-pair proportionality: at weights divisible by q - 1 the single
    // zeta is a multiple of the period power, so the pair qualifies exactly
    // when its point is torsion; otherwise it must span a line with the
    // weight-n point, which cannot itself be torsion.
    let vn = if a_even {
        None
    } else {
        Some(special_point_vn(ctx, n)?)
    };
    let mut pair_reports = Vec::with_capacity(pairs.len());
    for (idx, &(s1, s2)) in pairs.iter().enumerate() {
        let set = match &vn {
            None => vec![points[idx].clone()],
            Some(v) => vec![v.clone(), points[idx].clone()],
        };
        let sub = SiegelSystem::new(fq, n, set)?.solve()?;
        pair_reports.push(PairReport {
            s1,
            s2,
            zeta_like: sub.relation_rank() == 1,
        });
    }
    // A flagged pair whose entries are both p-th multiples carries the p-th
    // power of a lower-weight proportionality (Frobenius), so the count
    // keeps only the pairs that witness a new one.
    let p = fq.p() as usize;
    let zeta_like = pair_reports
        .iter()
        .filter(|r| r.zeta_like && !(r.s1 % p == 0 && r.s2 % p == 0))
        .count();

    let verify = opts
        .verify
        .unwrap_or(n <= opts.verify_limit.unwrap_or(DEFAULT_VERIFY_LIMIT));
    let evaluator = if verify && relation_rank > 0 {
        let depth = opts.depth.unwrap_or_else(|| default_depth(q));
        Some(shared_evaluator(ctx, depth)?)
    } else {
        None
    };
    let mut certificates = Vec::with_capacity(relation_rank);
    for rel in basis.relations() {
        let mut verified = None;
        let mut c0 = None;
        if let Some(eval) = evaluator {
            match verify_relation_with(eval, &labels, rel.a())? {
                Verification::Proportional { c0: constant, .. } => {
                    verified = Some(true);
                    c0 = Some(constant.to_string());
                }
                Verification::Zero { .. } => verified = Some(true),
                Verification::Failed { detail } => {
                    return Err(PipelineError::VerificationFailed {
                        weight: n as u64,
                        detail,
                    });
                }
                Verification::Inconclusive { detail } => {
                    return Err(PipelineError::VerificationInconclusive {
                        weight: n as u64,
                        detail,
                    });
                }
            }
        }
        let mut zeta_coefficients = Vec::with_capacity(labels.len());
        for (label, a) in labels.iter().zip(rel.a()) {
            zeta_coefficients.push(induced_coefficient(ctx, label, a)?.to_string());
        }
        certificates.push(CertificateReport {
            points: labels.iter().map(index_label).collect(),
            a: rel.a().iter().map(|p| p.to_string()).collect(),
            zeta_coefficients,
            delta: rel.delta().iter().map(|p| p.to_string()).collect(),
            verified,
            c0,
        });
    }

    // Persist every interpolation polynomial materialized so far.
    if let Some(store) = &store {
        for i in seeded..ctx.anderson_thakur_count() {
            store.store_h(fq, i, ctx.anderson_thakur(i)?.poly())?;
        }
    }

    let report = WeightReport {
        q,
        weight: n,
        v_size: pairs.len(),
        relation_rank,
        point_rank,
        dimension,
        fp_linear,
        zeta_like,
        pairs: pair_reports,
        certificates,
        sup_degree,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(WeightAnalysis {
        report,
        labels,
        points,
        basis,
    })
}

/// Reports for every weight in [n_min, n_max], computed in parallel across
/// the current thread pool; one bad row does not abort the sweep.
pub fn table(
    ctx: &'static CarlitzContext,
    n_min: usize,
    n_max: usize,
    opts: &PipelineOptions,
) -> Result<Vec<WeightOutcome>, PipelineError> {
    if n_min < 2 || n_min > n_max {
        return Err(PipelineError::BadRequest(format!(
            "weight range [{n_min}, {n_max}] is invalid"
        )));
    }
    Ok((n_min..=n_max)
        .into_par_iter()
        .map(|n| WeightOutcome {
            weight: n,
            result: dimension(ctx, n, opts).map(WeightAnalysis::into_report),
        })
        .collect())
}

// ---- Emission ----

/// Column header matching `csv_row`.
pub const CSV_HEADER: &str = "weight,dimension,fp_linear,zeta_like,V_size,rank,relations";

/// One comma-separated row: rank is the rank of the span of the points and
/// relations the count of independent relations; fp_linear is empty at
/// weights where the prime-field count is undefined.
pub fn csv_row(report: &WeightReport) -> String {
    let fp = report
        .fp_linear
        .map_or(String::new(), |v| v.to_string());
    format!(
        "{},{},{},{},{},{},{}",
        report.weight,
        report.dimension,
        fp,
        report.zeta_like,
        report.v_size,
        report.point_rank,
        report.relation_rank
    )
}

// ---- Shared state ----

/// Makes sure the zeta-ratio constant is fixed, deriving it numerically on
/// first use; concurrent derivations agree or fail loudly.
fn ensure_calibrated(ctx: &'static CarlitzContext) -> Result<(), PipelineError> {
    if ctx.calibration().is_none() {
        calibrate(ctx, CALIBRATION_DEPTH)?;
    }
    Ok(())
}

/// Process-wide evaluator per (field, depth): power sums are memoized once
/// and shared across weights, certificates, and calls.
fn shared_evaluator(
    ctx: &'static CarlitzContext,
    depth: usize,
) -> Result<&'static ZetaEvaluator, NumericError> {
    static POOL: OnceLock<Mutex<Vec<(&'static CarlitzContext, usize, &'static ZetaEvaluator)>>> =
        OnceLock::new();
    let pool = POOL.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = pool.lock().unwrap();
    if let Some((_, _, eval)) = guard
        .iter()
        .find(|(c, d, _)| std::ptr::eq(*c, ctx) && *d == depth)
    {
        return Ok(eval);
    }
    let eval: &'static ZetaEvaluator = Box::leak(Box::new(ZetaEvaluator::new(ctx, depth)?));
    guard.push((ctx, depth, eval));
    Ok(eval)
}

// ---- Cache glue ----

/// Pulls contiguous interpolation polynomials from the store into the
/// context memo. Returns how many indices the store supplied.
fn seed_h(ctx: &CarlitzContext, store: &CacheStore) -> Result<usize, PipelineError> {
    let fq = ctx.field();
    let mut prefix = Vec::new();
    while let Some(poly) = store.load_h(fq, prefix.len())? {
        prefix.push(poly);
    }
    let count = prefix.len();
    ctx.seed_anderson_thakur(&prefix).map_err(|e| match e {
        CarlitzError::SeedMismatch { index } => PipelineError::CacheMismatch {
            path: store
                .root()
                .join(format!("h-q{}-i{index}.json", fq.q()))
                .display()
                .to_string(),
            detail: "stored polynomial disagrees with the memoized table".into(),
        },
        other => PipelineError::Carlitz(other),
    })?;
    Ok(count)
}

fn load_or_build_xi(
    ctx: &CarlitzContext,
    store: Option<&CacheStore>,
    s1: usize,
    s2: usize,
) -> Result<TensorPoint, PipelineError> {
    let fq = ctx.field();
    if let Some(store) = store {
        if let Some(point) = store.load_xi(fq, s1, s2)? {
            return Ok(point);
        }
        let point = xi_point(ctx, s1, s2)?;
        store.store_xi(fq, s1, s2, &point)?;
        return Ok(point);
    }
    Ok(xi_point(ctx, s1, s2)?)
}

fn index_label(label: &ZetaIndex) -> String {
    match label {
        ZetaIndex::Single(m) => format!("zeta({m})"),
        ZetaIndex::Double(s1, s2) => format!("zeta({s1},{s2})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_depth_tracks_the_enumeration_budget() {
        assert_eq!(default_depth(2), 14);
        assert_eq!(default_depth(3), 9);
        assert_eq!(default_depth(5), 6);
        // Very large fields never go below the floor.
        assert_eq!(default_depth(1 << 30), 2);
    }

    #[test]
    fn csv_row_leaves_undefined_counts_blank() {
        let report = WeightReport {
            q: 3,
            weight: 7,
            v_size: 3,
            relation_rank: 0,
            point_rank: 3,
            dimension: 7,
            fp_linear: None,
            zeta_like: 1,
            pairs: Vec::new(),
            certificates: Vec::new(),
            sup_degree: Some(12),
            elapsed_ms: 5,
        };
        assert_eq!(csv_row(&report), "7,7,,1,3,3,0");
        assert_eq!(
            CSV_HEADER.split(',').count(),
            csv_row(&report).split(',').count()
        );
    }

    #[test]
    fn rejects_degenerate_requests() {
        let ctx = context_for_order(2).unwrap();
        let opts = PipelineOptions::default();
        assert!(matches!(
            dimension(ctx, 1, &opts),
            Err(PipelineError::BadRequest(_))
        ));
        assert!(matches!(
            table(ctx, 5, 3, &opts),
            Err(PipelineError::BadRequest(_))
        ));
        assert!(matches!(
            table(ctx, 1, 3, &opts),
            Err(PipelineError::BadRequest(_))
        ));
    }
}
