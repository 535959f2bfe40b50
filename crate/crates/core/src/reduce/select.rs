use rayon::prelude::*;

use super::{Action, MergeMethod};
use crate::dissim::{gaussian_dissimilarity, kld_gaussians, CachedOriginal, Measure, QuadratureConfig};
use crate::error::{GmrError, Result};
use crate::merge::runnalls_bound;
use crate::mixture::GaussianMixture;

#[derive(Debug, Clone, Copy)]
enum Candidate {
    Merge(usize, usize),
    Prune(usize),
}

/// All candidates in tie-breaking order: merges by `(i, j)`, then prunes.
fn candidates(size: usize) -> Vec<Candidate> {
    let merges = (0..size).flat_map(|i| (i + 1..size).map(move |j| Candidate::Merge(i, j)));
    merges.chain((0..size).map(Candidate::Prune)).collect()
}

fn pairs(size: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..size).flat_map(move |i| (i + 1..size).map(move |j| (i, j)))
}

fn require_pair(current: &GaussianMixture) -> Result<()> {
    if current.size() < 2 {
        return Err(GmrError::InvalidSelection(
            "selection needs at least two components".into(),
        ));
    }
    Ok(())
}

/// Evaluates `D(original ‖ candidate)` for every pair merge and every single
/// prune of `current` and returns the cheapest action.
///
/// Ties go to merges before prunes, then to the smallest index pair.
pub fn select_action_global(
    original: &GaussianMixture,
    current: &GaussianMixture,
    measure: Measure,
    method: &MergeMethod,
) -> Result<Action> {
    select_global_cached(&CachedOriginal::new(original), current, measure, method)
}

pub(crate) fn select_global_cached(
    cached: &CachedOriginal<'_>,
    current: &GaussianMixture,
    measure: Measure,
    method: &MergeMethod,
) -> Result<Action> {
    if measure == Measure::Kld {
        return Err(GmrError::UnsupportedMeasure("KLD for global selection"));
    }
    require_pair(current)?;
    cached.original().check_same_dim(current)?;
    let cfg = QuadratureConfig::default();
    let evaluated: Vec<Result<(Action, f64)>> = candidates(current.size())
        .into_par_iter()
        .map(|candidate| match candidate {
            Candidate::Merge(i, j) => {
                let merged = method.merged_component(current, i, j)?;
                let reduced = current.with_merged(i, j, merged.clone())?;
                let cost = cached.eval(&reduced, measure, &cfg)?;
                Ok((Action::Merge { i, j, cost, merged }, cost))
            }
            Candidate::Prune(index) => {
                let reduced = current.without(index)?;
                let cost = cached.eval(&reduced, measure, &cfg)?;
                Ok((Action::Prune { index, cost }, cost))
            }
        })
        .collect();

    let mut best: Option<(Action, f64)> = None;
    for entry in evaluated {
        let (action, cost) = entry?;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((action, cost));
        }
    }
    Ok(best.expect("at least one candidate").0)
}

/// Pair of components with the least mutual dissimilarity. KLD is
/// symmetrized by taking the smaller direction; ties go to the smallest pair.
pub fn select_merge_local(current: &GaussianMixture, pair_measure: Measure) -> Result<(usize, usize)> {
    require_pair(current)?;
    let mut best: Option<((usize, usize), f64)> = None;
    for (i, j) in pairs(current.size()) {
        let (a, b) = (current.component(i), current.component(j));
        let cost = match pair_measure {
            Measure::Kld => kld_gaussians(a, b)?.min(kld_gaussians(b, a)?),
            m => gaussian_dissimilarity(a, b, m)?,
        };
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some(((i, j), cost));
        }
    }
    Ok(best.expect("at least one pair").0)
}

/// Pair with the smallest Runnalls bound, with that bound.
pub fn select_merge_runnalls(current: &GaussianMixture) -> Result<(usize, usize, f64)> {
    require_pair(current)?;
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, j) in pairs(current.size()) {
        let bound = runnalls_bound(current, i, j)?;
        if best.is_none_or(|(_, _, b)| bound < b) {
            best = Some((i, j, bound));
        }
    }
    Ok(best.expect("at least one pair"))
}
