use super::Action;
use crate::dissim::{CachedOriginal, Measure, QuadratureConfig};
use crate::error::{GmrError, Result};
use crate::mixture::GaussianMixture;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruneCriterion {
    /// Remove every component with weight below `τ`.
    Threshold(f64),
    /// Remove the `k` lightest components; `k = 0` is a no-op.
    KSmallest(usize),
    /// Remove the lightest components while their total mass stays `≤ ρ`.
    MassBudget(f64),
    /// Remove the one component whose removal keeps `D(original ‖ ·)` lowest.
    CostBased(Measure),
}

impl PruneCriterion {
    pub const DEFAULT_MASS_BUDGET: f64 = 0.05;

    pub fn validate(&self) -> Result<()> {
        match *self {
            PruneCriterion::Threshold(tau) if !(tau >= 0.0 && tau.is_finite()) => Err(
                GmrError::InvalidConfig(format!("threshold must be finite and >= 0, got {tau}")),
            ),
            PruneCriterion::MassBudget(rho) if !(rho > 0.0 && rho < 1.0) => Err(
                GmrError::InvalidConfig(format!("mass budget must lie in (0, 1), got {rho}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Applies `criterion` to `gm`, returning the renormalized mixture and one
/// `Prune` action per removed component.
///
/// Multiple removals are recorded from the highest index down so that each
/// recorded index is valid for the mixture it was applied to. Weight-based
/// criteria record the removed (renormalized) weight as the cost;
/// `CostBased` records `D(original ‖ result)` and needs `original`.
pub fn prune(
    gm: &GaussianMixture,
    criterion: PruneCriterion,
    original: Option<&GaussianMixture>,
) -> Result<(GaussianMixture, Vec<Action>)> {
    criterion.validate()?;
    let mut remove: Vec<usize> = match criterion {
        PruneCriterion::Threshold(tau) => (0..gm.size()).filter(|&k| gm.weight(k) < tau).collect(),
        PruneCriterion::KSmallest(k) => lightest(gm).into_iter().take(k).collect(),
        PruneCriterion::MassBudget(rho) => {
            let mut mass = 0.0;
            lightest(gm)
                .into_iter()
                .take_while(|&k| {
                    mass += gm.weight(k);
                    mass <= rho
                })
                .collect()
        }
        PruneCriterion::CostBased(measure) => {
            let original = original.ok_or_else(|| {
                GmrError::InvalidConfig("cost-based pruning needs the original mixture".into())
            })?;
            return prune_by_cost(gm, measure, original);
        }
    };
    if remove.len() >= gm.size() {
        return Err(GmrError::PruneEmptiesMixture);
    }
    remove.sort_unstable_by(|a, b| b.cmp(a));

    let mut current = gm.clone();
    let mut actions = Vec::with_capacity(remove.len());
    for index in remove {
        let cost = current.weight(index);
        current = current.without(index)?;
        actions.push(Action::Prune { index, cost });
    }
    Ok((current, actions))
}

/// Indices ordered by increasing weight, ties by index.
fn lightest(gm: &GaussianMixture) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gm.size()).collect();
    order.sort_by(|&a, &b| gm.weight(a).total_cmp(&gm.weight(b)).then(a.cmp(&b)));
    order
}

fn prune_by_cost(
    gm: &GaussianMixture,
    measure: Measure,
    original: &GaussianMixture,
) -> Result<(GaussianMixture, Vec<Action>)> {
    if gm.size() < 2 {
        return Err(GmrError::PruneEmptiesMixture);
    }
    let cached = CachedOriginal::new(original);
    let cfg = QuadratureConfig::default();
    let mut best: Option<(usize, f64, GaussianMixture)> = None;
    for k in 0..gm.size() {
        let candidate = gm.without(k)?;
        let cost = cached.eval(&candidate, measure, &cfg)?;
        if best.as_ref().is_none_or(|(_, c, _)| cost < *c) {
            best = Some((k, cost, candidate));
        }
    }
    let (index, cost, pruned) = best.expect("at least two candidates");
    Ok((pruned, vec![Action::Prune { index, cost }]))
}
