//! Joint refinement of every parameter of a reduced mixture.

use crate::descent::{minimize, DescentConfig};
use crate::dissim::gradient::block_gradients;
use crate::dissim::{dissimilarity, self_likeness, Measure, QuadratureConfig};
use crate::error::{GmrError, Result};
use crate::mixture::{GaussianMixture, ZERO_WEIGHT_THRESHOLD};
use crate::param::Layout;

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub mixture: GaussianMixture,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `D(original ‖ g)` over all weights, means and covariances of
/// `g`, starting from `start` and keeping its size.
///
/// Components whose weight decays below the zero-weight threshold are only
/// removed after the descent, by mixture validation.
pub fn refine(
    original: &GaussianMixture,
    start: &GaussianMixture,
    measure: Measure,
    cfg: &DescentConfig,
) -> Result<RefineResult> {
    if measure == Measure::Kld {
        return Err(GmrError::UnsupportedMeasure("KLD refinement"));
    }
    original.check_same_dim(start)?;
    // The pinned last logit makes descent paths depend on component order;
    // running on a canonical order makes the result permutation-equivariant.
    let order = canonical_order(start);
    let start = &start.permuted(&order)?;
    let jhh = self_likeness(original);
    let layout = Layout::of(start);
    let outcome = minimize(
        |theta| {
            let g = layout.decode(theta).ok()?;
            let blocks = block_gradients(original, &g, Some(jhh));
            let (value, grad) = match measure {
                Measure::Ise => (blocks.ise(), blocks.ise_gradient()),
                _ => (blocks.nise(), blocks.nise_gradient()),
            };
            Some((value, layout.pull_back(theta, &grad)))
        },
        layout.encode(start),
        cfg,
    )?;
    let initial_cost = outcome.history[0];
    let mut restore = vec![0; order.len()];
    for (pos, &k) in order.iter().enumerate() {
        restore[k] = pos;
    }
    let refined = layout.decode(&outcome.x)?.permuted(&restore)?;
    let (mixture, final_cost) = if refined.weights().iter().any(|&w| w < ZERO_WEIGHT_THRESHOLD) {
        let pruned = GaussianMixture::new(refined.weights().to_vec(), refined.components().to_vec())?;
        let cost = dissimilarity(original, &pruned, measure, &QuadratureConfig::default())?;
        (pruned, cost)
    } else {
        (refined, outcome.value)
    };
    Ok(RefineResult {
        mixture,
        initial_cost,
        final_cost,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// Component indices sorted by mean, then covariance, then weight.
fn canonical_order(gm: &GaussianMixture) -> Vec<usize> {
    let key = |k: usize| {
        let c = gm.component(k);
        c.mean()
            .iter()
            .chain(c.cov().iter())
            .copied()
            .chain(std::iter::once(gm.weight(k)))
            .collect::<Vec<f64>>()
    };
    let mut order: Vec<usize> = (0..gm.size()).collect();
    order.sort_by(|&a, &b| {
        key(a)
            .iter()
            .zip(key(b).iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
}
