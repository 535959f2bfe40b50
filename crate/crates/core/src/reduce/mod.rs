//! Greedy model-order reduction by pruning and pairwise merging.

mod pipeline;
mod prune;
mod select;

use serde::{Deserialize, Serialize};

use crate::dissim::Measure;
use crate::error::{GmrError, Result};
use crate::gaussian::Gaussian;
use crate::merge::{bsga, kld_barycenter, BsgaOptions};
use crate::mixture::{GaussianMixture, SubMixture};

pub use pipeline::{greedy_reduce, runnalls_reduce, williams_reduce};
pub use prune::{prune, PruneCriterion};
pub use select::{select_action_global, select_merge_local, select_merge_runnalls};

/// How a selected pair is replaced by one Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub enum MergeMethod {
    /// Moment-preserving merge.
    KldBarycenter,
    /// Best single Gaussian of the normalized pair under `measure`.
    Bsga {
        measure: Measure,
        options: BsgaOptions,
    },
}

impl MergeMethod {
    pub fn bsga(measure: Measure) -> Self {
        MergeMethod::Bsga {
            measure,
            options: BsgaOptions::multistart(),
        }
    }

    /// Replacement for components `i` and `j` of `gm`.
    pub fn merged_component(&self, gm: &GaussianMixture, i: usize, j: usize) -> Result<Gaussian> {
        let sub = SubMixture::pair(gm, i, j)?;
        match self {
            MergeMethod::KldBarycenter => Ok(kld_barycenter(&sub)?.0),
            MergeMethod::Bsga { measure, options } => Ok(bsga(&sub, *measure, options)?.gaussian),
        }
    }
}

/// Replaces components `i` and `j` by their merge; the result sits at
/// `min(i, j)` with weight `wᵢ + wⱼ`.
pub fn merge_pair(gm: &GaussianMixture, i: usize, j: usize, method: &MergeMethod) -> Result<GaussianMixture> {
    gm.check_index(i)?;
    gm.check_index(j)?;
    if i == j {
        return Err(GmrError::InvalidPair { i, j });
    }
    gm.with_merged(i, j, method.merged_component(gm, i, j)?)
}

/// One size-reducing step. Indices refer to the mixture the step was
/// applied to (0-based); merges store `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Prune {
        index: usize,
        cost: f64,
    },
    Merge {
        i: usize,
        j: usize,
        cost: f64,
        merged: Gaussian,
    },
}

impl Action {
    pub fn cost(&self) -> f64 {
        match self {
            Action::Prune { cost, .. } | Action::Merge { cost, .. } => *cost,
        }
    }

    pub fn is_prune(&self) -> bool {
        matches!(self, Action::Prune { .. })
    }

    pub fn apply(&self, gm: &GaussianMixture) -> Result<GaussianMixture> {
        match self {
            Action::Prune { index, .. } => gm.without(*index),
            Action::Merge { i, j, merged, .. } => gm.with_merged(*i, *j, merged.clone()),
        }
    }

    /// Human-readable rendering with 1-based indices, e.g. `merge 3+4`.
    pub fn describe(&self) -> String {
        match self {
            Action::Prune { index, .. } => format!("prune {}", index + 1),
            Action::Merge { i, j, .. } => format!("merge {}+{}", i + 1, j + 1),
        }
    }

    pub fn record(&self) -> StepRecord {
        match self {
            Action::Prune { index, cost } => StepRecord {
                kind: StepKind::Prune,
                i: *index,
                j: None,
                cost: *cost,
            },
            Action::Merge { i, j, cost, .. } => StepRecord {
                kind: StepKind::Merge,
                i: *i,
                j: Some(*j),
                cost: *cost,
            },
        }
    }
}

/// Ordered actions of a reduction and the final dissimilarity to the original.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrace {
    pub measure: Measure,
    pub steps: Vec<Action>,
    pub final_cost: f64,
}

impl ReductionTrace {
    /// Re-applies every step to `original`.
    pub fn replay(&self, original: &GaussianMixture) -> Result<GaussianMixture> {
        self.steps
            .iter()
            .try_fold(original.clone(), |gm, action| action.apply(&gm))
    }

    pub fn record(&self) -> TraceRecord {
        TraceRecord {
            measure: self.measure,
            steps: self.steps.iter().map(Action::record).collect(),
            final_cost: self.final_cost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Merge,
    Prune,
}

/// On-disk form of one step; prunes carry their index in `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    #[serde(rename = "type")]
    pub kind: StepKind,
    pub i: usize,
    pub j: Option<usize>,
    pub cost: f64,
}

/// On-disk form of a [`ReductionTrace`]. Merged Gaussians are not stored;
/// [`TraceRecord::replay`] recomputes them with the pipeline's merge method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub measure: Measure,
    pub steps: Vec<StepRecord>,
    pub final_cost: f64,
}

impl TraceRecord {
    pub fn replay(&self, original: &GaussianMixture, method: &MergeMethod) -> Result<GaussianMixture> {
        let mut gm = original.clone();
        for step in &self.steps {
            gm = match (step.kind, step.j) {
                (StepKind::Prune, None) => gm.without(step.i)?,
                (StepKind::Merge, Some(j)) => merge_pair(&gm, step.i, j, method)?,
                _ => {
                    return Err(GmrError::Format(format!(
                        "{:?} step with j = {:?}",
                        step.kind, step.j
                    )))
                }
            };
        }
        Ok(gm)
    }
}

pub(crate) fn check_target(gm: &GaussianMixture, target: usize) -> Result<()> {
    if target == 0 || target >= gm.size() {
        return Err(GmrError::InvalidTarget {
            target,
            size: gm.size(),
        });
    }
    Ok(())
}
