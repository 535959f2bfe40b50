use super::select::{select_global_cached, select_merge_runnalls};
use super::{check_target, Action, MergeMethod, ReductionTrace};
use crate::dissim::{kld_gm_numeric, CachedOriginal, Measure, QuadratureConfig};
use crate::error::Result;
use crate::merge::kld_barycenter;
use crate::mixture::{GaussianMixture, SubMixture};

/// Greedy merge-or-prune reduction with every choice costed by `measure`
/// against the original.
pub fn greedy_reduce(
    original: &GaussianMixture,
    target: usize,
    measure: Measure,
    method: &MergeMethod,
) -> Result<(GaussianMixture, ReductionTrace)> {
    check_target(original, target)?;
    let cached = CachedOriginal::new(original);
    let cfg = QuadratureConfig::default();
    let mut current = original.clone();
    let mut steps = Vec::new();
    while current.size() > target {
        let action = select_global_cached(&cached, &current, measure, method)?;
        current = action.apply(&current)?;
        steps.push(action);
    }
    let final_cost = cached.eval(&current, measure, &cfg)?;
    Ok((
        current,
        ReductionTrace {
            measure,
            steps,
            final_cost,
        },
    ))
}

/// Williams' reduction: ISE-costed selection over all merges and prunes.
/// With [`MergeMethod::KldBarycenter`] this is the original scheme; with an
/// ISE BSGA merge every step is ISE-consistent.
pub fn williams_reduce(
    original: &GaussianMixture,
    target: usize,
    method: &MergeMethod,
) -> Result<(GaussianMixture, ReductionTrace)> {
    greedy_reduce(original, target, Measure::Ise, method)
}

/// Runnalls' reduction: repeatedly moment-merges the pair with the smallest
/// KLD bound. Never prunes. The final cost is the numeric KLD to the
/// original under the default quadrature settings.
pub fn runnalls_reduce(
    original: &GaussianMixture,
    target: usize,
) -> Result<(GaussianMixture, ReductionTrace)> {
    check_target(original, target)?;
    let mut current = original.clone();
    let mut steps = Vec::new();
    while current.size() > target {
        let (i, j, cost) = select_merge_runnalls(&current)?;
        let (merged, _) = kld_barycenter(&SubMixture::pair(&current, i, j)?)?;
        let action = Action::Merge { i, j, cost, merged };
        current = action.apply(&current)?;
        steps.push(action);
    }
    let final_cost = kld_gm_numeric(original, &current, &QuadratureConfig::default())?.value;
    Ok((
        current,
        ReductionTrace {
            measure: Measure::Kld,
            steps,
            final_cost,
        },
    ))
}
