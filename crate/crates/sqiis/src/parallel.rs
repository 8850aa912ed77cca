use rayon::prelude::*;
use sqiis_core::eval::{evaluate_original, originals};
use sqiis_core::{EvalReport, Result, RuleBase};

/// Same result as [`sqiis_core::run_evaluation`], with originals spread over
/// the rayon pool. Aggregation sorts, so the report does not depend on
/// scheduling.
pub fn run_evaluation_parallel(rb: &RuleBase, size_min: usize, size_max: usize) -> Result<EvalReport> {
    let per_original = originals(rb.tag_count(), size_min, size_max)?
        .into_par_iter()
        .map(|q| evaluate_original(rb, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_results(per_original))
}
