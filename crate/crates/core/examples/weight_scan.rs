//! Scan a few weights over F_2(θ): build the special points, solve for all
//! linear relations, derive the dimension count, and verify each discovered
//! certificate against the numeric zeta values.
//!
//! Run with: cargo run --example weight_scan

use dzv_core::algebra::Fq;
use dzv_core::carlitz::CarlitzContext;
use dzv_core::chen::fp_linear_count;
use dzv_core::fmodule::{even_index_pairs, xi_point};
use dzv_core::numeric::{verify_relation, ZetaIndex};
use dzv_core::siegel::SiegelSystem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fq = Fq::get(2, 1)?;
    let ctx = CarlitzContext::get(fq);
    ctx.set_calibration(fq.one())?;

    println!("q = {}: weight, pairs, relation rank, dimension, fp-linear", fq.q());
    for n in 2..=6usize {
        let pairs = even_index_pairs(fq, n);
        let points = pairs
            .iter()
            .map(|&(s1, s2)| xi_point(ctx, s1, s2))
            .collect::<Result<Vec<_>, _>>()?;
        let labels: Vec<ZetaIndex> = pairs
            .iter()
            .map(|&(s1, s2)| ZetaIndex::Double(s1 as u64, s2 as u64))
            .collect();
        let basis = SiegelSystem::new(fq, n, points)?.solve()?;
        let dimension = n - basis.relation_rank();
        let fp = fp_linear_count(ctx, n)?;
        println!(
            "  n = {n}: |V| = {}, rank = {}, dim = {dimension}, fp = {fp}",
            pairs.len(),
            basis.relation_rank()
        );
        for (i, relation) in basis.relations().iter().enumerate() {
            let verdict = verify_relation(ctx, &labels, relation.a(), 10)?;
            println!("    certificate {i}: pass = {}", verdict.is_pass());
        }
    }
    Ok(())
}
