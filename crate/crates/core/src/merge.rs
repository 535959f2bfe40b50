//! Single-Gaussian replacements for sub-mixtures.
//!
//! The KLD barycenter (moment-preserving merge) has a closed form and
//! coincides with the KLD best single Gaussian approximation (BSGA). ISE and
//! NISE BSGAs and barycenters are found by descent over `(μ, log-Cholesky Σ)`.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::descent::{minimize, DescentConfig, DescentOutcome};
use crate::dissim::gradient::block_gradients;
use crate::dissim::{
    gaussian_dissimilarity, kld_gm_numeric, self_likeness, Measure, MixtureGradient,
    QuadratureConfig,
};
use crate::error::{GmrError, Result};
use crate::gaussian::Gaussian;
use crate::mixture::{pooled, GaussianMixture, SubMixture};
use crate::param::Layout;

/// Outcome of a single-Gaussian fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BsgaResult {
    pub gaussian: Gaussian,
    /// Dissimilarity at `gaussian`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Start point of the winning run.
    pub initial: Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsgaOptions {
    pub descent: DescentConfig,
    /// Also start from every component of the sub-mixture and keep the best.
    pub multistart: bool,
    /// Replaces the default KLD-barycenter start.
    pub init: Option<Gaussian>,
    /// Used only to report the KLD objective.
    pub quadrature: QuadratureConfig,
}

impl Default for BsgaOptions {
    fn default() -> Self {
        Self {
            descent: DescentConfig::default(),
            multistart: false,
            init: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl BsgaOptions {
    pub fn multistart() -> Self {
        Self {
            multistart: true,
            ..Self::default()
        }
    }
}

/// Moment-preserving merge: pooled mean and covariance of the selected
/// components, with weight `w̃ᵀ1`.
pub fn kld_barycenter(sub: &SubMixture<'_>) -> Result<(Gaussian, f64)> {
    let (mean, cov) = pooled(sub.iter());
    Ok((Gaussian::new(mean, cov)?, sub.total_weight()))
}

/// Best single Gaussian approximation of the normalized sub-mixture.
pub fn bsga(sub: &SubMixture<'_>, measure: Measure, opts: &BsgaOptions) -> Result<BsgaResult> {
    let target = sub.normalized();
    let (barycenter, _) = kld_barycenter(sub)?;
    if measure == Measure::Kld {
        let objective =
            kld_gm_numeric(&target, &GaussianMixture::single(barycenter.clone()), &opts.quadrature)?
                .value;
        return Ok(BsgaResult {
            gaussian: barycenter.clone(),
            objective,
            iterations: 0,
            converged: true,
            initial: barycenter,
        });
    }
    let jhh = self_likeness(&target);
    let starts = start_points(sub, barycenter, opts)?;
    fit_best(&starts, &opts.descent, |q| {
        let g = GaussianMixture::single(q.clone());
        let blocks = block_gradients(&target, &g, Some(jhh));
        match measure {
            Measure::Ise => (blocks.ise(), blocks.ise_gradient()),
            _ => (blocks.nise(), blocks.nise_gradient()),
        }
    })
}

/// `Σᵢ w̄ᵢ D(𝒩(·|μ̄ᵢ,Σ̄ᵢ) ‖ q)`
pub fn pairwise_barycenter_objective(
    sub: &SubMixture<'_>,
    measure: Measure,
    q: &Gaussian,
) -> Result<f64> {
    let total = sub.total_weight();
    sub.iter()
        .map(|(w, c)| Ok(w / total * gaussian_dissimilarity(c, q, measure)?))
        .sum()
}

/// Minimizer of [`pairwise_barycenter_objective`]; closed form for KLD.
pub fn pairwise_barycenter(
    sub: &SubMixture<'_>,
    measure: Measure,
    opts: &BsgaOptions,
) -> Result<BsgaResult> {
    let (barycenter, _) = kld_barycenter(sub)?;
    if measure == Measure::Kld {
        let objective = pairwise_barycenter_objective(sub, measure, &barycenter)?;
        return Ok(BsgaResult {
            gaussian: barycenter.clone(),
            objective,
            iterations: 0,
            converged: true,
            initial: barycenter,
        });
    }
    let total = sub.total_weight();
    let singles: Vec<(f64, GaussianMixture, f64)> = sub
        .iter()
        .map(|(w, c)| {
            let f = GaussianMixture::single(c.clone());
            let jhh = self_likeness(&f);
            (w / total, f, jhh)
        })
        .collect();
    let starts = start_points(sub, barycenter, opts)?;
    fit_best(&starts, &opts.descent, |q| {
        let g = GaussianMixture::single(q.clone());
        let mut value = 0.0;
        let mut grad = MixtureGradient::zeros(1, q.dim());
        for (w, f, jhh) in &singles {
            let blocks = block_gradients(f, &g, Some(*jhh));
            let (v, d) = match measure {
                Measure::Ise => (blocks.ise(), blocks.ise_gradient()),
                _ => (blocks.nise(), blocks.nise_gradient()),
            };
            value += w * v;
            grad = grad.combine(1.0, &d, *w);
        }
        (value, grad)
    })
}

/// Runnalls' upper bound on `KL(gm ‖ gm with i,j moment-merged)`:
/// `½[(wᵢ+wⱼ) log|Σₘ| − wᵢ log|Σᵢ| − wⱼ log|Σⱼ|]`.
pub fn runnalls_bound(gm: &GaussianMixture, i: usize, j: usize) -> Result<f64> {
    gm.check_index(i)?;
    gm.check_index(j)?;
    let sub = SubMixture::pair(gm, i, j)?;
    let (merged, w) = kld_barycenter(&sub)?;
    let bound = 0.5
        * (w * merged.log_det()
            - gm.weight(i) * gm.component(i).log_det()
            - gm.weight(j) * gm.component(j).log_det());
    Ok(bound.max(0.0))
}

fn start_points(
    sub: &SubMixture<'_>,
    barycenter: Gaussian,
    opts: &BsgaOptions,
) -> Result<Vec<Gaussian>> {
    let mut starts = Vec::new();
    match &opts.init {
        Some(init) => {
            sub.parent().check_dim(init.dim())?;
            starts.push(init.clone());
            if opts.multistart {
                starts.push(barycenter);
            }
        }
        None => starts.push(barycenter),
    }
    if opts.multistart {
        starts.extend(sub.iter().map(|(_, c)| c.clone()));
    }
    Ok(starts)
}

/// Runs one descent per start (in parallel) and keeps the lowest objective;
/// exact ties go to the lexicographically smallest mean.
fn fit_best<F>(starts: &[Gaussian], cfg: &DescentConfig, eval: F) -> Result<BsgaResult>
where
    F: Fn(&Gaussian) -> (f64, MixtureGradient) + Sync,
{
    let runs: Vec<Result<BsgaResult>> = starts
        .par_iter()
        .map(|start| fit_single(start, cfg, &eval))
        .collect();
    let mut best: Option<BsgaResult> = None;
    for run in runs {
        let run = run?;
        let better = match &best {
            None => true,
            Some(b) => {
                run.objective < b.objective
                    || (run.objective == b.objective
                        && lexicographic_less(run.gaussian.mean(), b.gaussian.mean()))
            }
        };
        if better {
            best = Some(run);
        }
    }
    best.ok_or_else(|| GmrError::InvalidSelection("no start points".into()))
}

fn lexicographic_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

fn fit_single<F>(start: &Gaussian, cfg: &DescentConfig, eval: &F) -> Result<BsgaResult>
where
    F: Fn(&Gaussian) -> (f64, MixtureGradient),
{
    let start_gm = GaussianMixture::single(start.clone());
    let layout = Layout::of(&start_gm);
    let DescentOutcome {
        x,
        value,
        iterations,
        converged,
        ..
    } = minimize(
        |theta| {
            let q = layout.decode(theta).ok()?;
            let (v, grad) = eval(q.component(0));
            Some((v, layout.pull_back(theta, &grad)))
        },
        layout.encode(&start_gm),
        cfg,
    )?;
    let fitted = layout.decode(&x)?;
    Ok(BsgaResult {
        gaussian: fitted.component(0).clone(),
        objective: value,
        iterations,
        converged,
        initial: start.clone(),
    })
}

/// Descent trace for tests: objective values after each accepted step.
#[cfg(test)]
pub(crate) fn bsga_history(sub: &SubMixture<'_>, measure: Measure, start: &Gaussian) -> Vec<f64> {
    let target = sub.normalized();
    let layout = Layout::of(&GaussianMixture::single(start.clone()));
    minimize(
        |theta| {
            let q = layout.decode(theta).ok()?;
            let blocks = block_gradients(&target, &q, None);
            let (v, g) = match measure {
                Measure::Ise => (blocks.ise(), blocks.ise_gradient()),
                _ => (blocks.nise(), blocks.nise_gradient()),
            };
            Some((v, layout.pull_back(theta, &g)))
        },
        layout.encode(&GaussianMixture::single(start.clone())),
        &DescentConfig::default(),
    )
    .unwrap()
    .history
}
