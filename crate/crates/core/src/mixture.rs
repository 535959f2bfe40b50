//! Gaussian mixtures, sub-mixture views and the validation rules applied to
//! every mixture entering the library.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GmrError, Result};
use crate::gaussian::Gaussian;

/// Input weights may miss the simplex by less than this before being rejected.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// Components lighter than this are dropped on validation.
pub const ZERO_WEIGHT_THRESHOLD: f64 = 1e-12;

/// A convex combination of Gaussian densities sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    components: Vec<Gaussian>,
}

impl GaussianMixture {
    /// Validates raw weights and components.
    ///
    /// Weights must be finite and nonnegative and sum to 1 within
    /// [`WEIGHT_SUM_TOLERANCE`]. Components below [`ZERO_WEIGHT_THRESHOLD`] are
    /// dropped and the survivors renormalized.
    pub fn new(weights: Vec<f64>, components: Vec<Gaussian>) -> Result<Self> {
        if components.is_empty() {
            return Err(GmrError::EmptyMixture);
        }
        if weights.len() != components.len() {
            return Err(GmrError::LengthMismatch {
                weights: weights.len(),
                components: components.len(),
            });
        }
        let d = components[0].dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != d) {
            return Err(GmrError::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(GmrError::InvalidWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() >= WEIGHT_SUM_TOLERANCE {
            return Err(GmrError::WeightSum { sum });
        }

        let (weights, components): (Vec<f64>, Vec<Gaussian>) = weights
            .into_iter()
            .zip(components)
            .filter(|(w, _)| *w >= ZERO_WEIGHT_THRESHOLD)
            .unzip();
        if components.is_empty() {
            return Err(GmrError::EmptyMixture);
        }
        // Sums already within round-off of 1 are left alone so that
        // re-validating a normalized mixture reproduces it bit for bit.
        let kept: f64 = weights.iter().sum();
        let weights = if (kept - 1.0).abs() <= weights.len() as f64 * f64::EPSILON {
            weights
        } else {
            weights.into_iter().map(|w| w / kept).collect()
        };
        Ok(Self {
            weights,
            components,
        })
    }

    /// Validates raw `(mean, covariance)` parameters; a non-SPD covariance is
    /// reported with the index of its component.
    pub fn from_parameters(
        weights: Vec<f64>,
        params: Vec<(DVector<f64>, DMatrix<f64>)>,
    ) -> Result<Self> {
        let components = params
            .into_iter()
            .enumerate()
            .map(|(index, (mean, cov))| {
                Gaussian::new(mean, cov).map_err(|e| match e {
                    GmrError::NotPositiveDefinite { .. } => GmrError::NotPositiveDefinite { index },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights, components)
    }

    /// 1-d convenience constructor from parallel weight, mean and variance slices.
    pub fn univariate(weights: &[f64], means: &[f64], variances: &[f64]) -> Result<Self> {
        if means.len() != weights.len() || variances.len() != weights.len() {
            return Err(GmrError::LengthMismatch {
                weights: weights.len(),
                components: means.len().min(variances.len()),
            });
        }
        let components = means
            .iter()
            .zip(variances)
            .enumerate()
            .map(|(index, (&m, &v))| {
                Gaussian::univariate(m, v).map_err(|_| GmrError::NotPositiveDefinite { index })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights.to_vec(), components)
    }

    pub fn single(component: Gaussian) -> Self {
        Self {
            weights: vec![1.0],
            components: vec![component],
        }
    }

    /// Assembles a mixture whose weights are already on the simplex.
    pub(crate) fn from_parts(weights: Vec<f64>, components: Vec<Gaussian>) -> Self {
        debug_assert_eq!(weights.len(), components.len());
        debug_assert!(!components.is_empty());
        Self {
            weights,
            components,
        }
    }

    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn components(&self) -> &[Gaussian] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Gaussian {
        &self.components[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Gaussian)> + Clone {
        self.weights.iter().copied().zip(self.components.iter())
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        self.components[0].check_dim(found)
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        self.check_dim(other.dim())
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.size() {
            return Err(GmrError::IndexOutOfRange {
                index,
                size: self.size(),
            });
        }
        Ok(())
    }

    /// Mixture density `Σ wᵢ 𝒩(x|μᵢ,Σᵢ)`.
    pub fn pdf(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    /// Log-density via log-sum-exp; finite far into the tails.
    pub fn ln_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(log_sum_exp(
            self.iter().map(|(w, c)| w.ln() + c.ln_pdf_unchecked(x)),
        ))
    }

    pub(crate) fn ln_pdf_1d(&self, x: f64) -> f64 {
        log_sum_exp(self.iter().map(|(w, c)| w.ln() + c.ln_pdf_1d(x)))
    }

    /// Mean and covariance of the mixture as a whole.
    pub fn pooled_moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        pooled(self.iter())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.size() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        self.components[pick].sample(rng)
    }

    /// Removes component `index` and renormalizes the remaining weights.
    pub fn without(&self, index: usize) -> Result<Self> {
        self.check_index(index)?;
        if self.size() == 1 {
            return Err(GmrError::PruneEmptiesMixture);
        }
        let remaining: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != index)
            .map(|(_, w)| w)
            .sum();
        if remaining <= 0.0 {
            return Err(GmrError::PruneEmptiesMixture);
        }
        let (weights, components) = self
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != index)
            .map(|(_, (w, c))| (w / remaining, c.clone()))
            .unzip();
        Ok(Self::from_parts(weights, components))
    }

    /// Replaces components `i` and `j` by `merged` with weight `wᵢ + wⱼ`.
    ///
    /// The merged component takes position `min(i, j)`; `max(i, j)` is removed
    /// and all other components keep their relative order.
    pub fn with_merged(&self, i: usize, j: usize, merged: Gaussian) -> Result<Self> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(GmrError::InvalidPair { i, j });
        }
        self.check_dim(merged.dim())?;
        let (lo, hi) = (i.min(j), i.max(j));
        let mut weights = self.weights.clone();
        let mut components = self.components.clone();
        weights[lo] = self.weights[i] + self.weights[j];
        components[lo] = merged;
        weights.remove(hi);
        components.remove(hi);
        Ok(Self::from_parts(weights, components))
    }

    /// Reorders components so that position `k` holds component `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.size()];
        if perm.len() != self.size() {
            return Err(GmrError::InvalidSelection("permutation length".into()));
        }
        for &p in perm {
            self.check_index(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(GmrError::InvalidSelection("repeated index in permutation".into()));
            }
        }
        Ok(Self::from_parts(
            perm.iter().map(|&p| self.weights[p]).collect(),
            perm.iter().map(|&p| self.components[p].clone()).collect(),
        ))
    }

    /// `[min μ − kσ_max, max μ + kσ_max]` over the first coordinate.
    pub fn support_1d(&self, sigmas: f64) -> (f64, f64) {
        support_1d([self], sigmas)
    }
}

/// Interval covering every component of the given mixtures with `sigmas`
/// standard deviations of the widest component to spare.
pub(crate) fn support_1d<'a>(
    mixtures: impl IntoIterator<Item = &'a GaussianMixture>,
    sigmas: f64,
) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut var_max: f64 = 0.0;
    for gm in mixtures {
        for c in gm.components() {
            lo = lo.min(c.mean()[0]);
            hi = hi.max(c.mean()[0]);
            var_max = var_max.max(c.cov()[(0, 0)]);
        }
    }
    let pad = sigmas * var_max.sqrt();
    (lo - pad, hi + pad)
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Weighted pooled mean and covariance, normalized by the total weight.
pub(crate) fn pooled<'a>(
    items: impl Iterator<Item = (f64, &'a Gaussian)> + Clone,
) -> (DVector<f64>, DMatrix<f64>) {
    let total: f64 = items.clone().map(|(w, _)| w).sum();
    let (_, first) = items.clone().next().expect("pooled moments of an empty set");
    let d = first.dim();
    let mut mean = DVector::zeros(d);
    for (w, c) in items.clone() {
        mean.axpy(w / total, c.mean(), 1.0);
    }
    let mut cov = DMatrix::zeros(d, d);
    for (w, c) in items {
        let diff = c.mean() - &mean;
        cov += (c.cov() + &diff * diff.transpose()) * (w / total);
    }
    let cov = (&cov + cov.transpose()) * 0.5;
    (mean, cov)
}

/// A selection of components of a parent mixture, keeping the parent's
/// (unnormalized) weights.
#[derive(Debug, Clone)]
pub struct SubMixture<'a> {
    parent: &'a GaussianMixture,
    indices: Vec<usize>,
}

impl<'a> SubMixture<'a> {
    /// `indices` must be strictly increasing and within range.
    pub fn new(parent: &'a GaussianMixture, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(GmrError::InvalidSelection("empty selection".into()));
        }
        for &i in &indices {
            parent.check_index(i)?;
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GmrError::InvalidSelection(
                "indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { parent, indices })
    }

    /// Selects a pair in either order.
    pub fn pair(parent: &'a GaussianMixture, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(GmrError::InvalidPair { i, j });
        }
        Self::new(parent, vec![i.min(j), i.max(j)])
    }

    pub fn whole(parent: &'a GaussianMixture) -> Self {
        Self {
            parent,
            indices: (0..parent.size()).collect(),
        }
    }

    pub fn parent(&self) -> &GaussianMixture {
        self.parent
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.parent.dim()
    }

    pub fn unnormalized_weights(&self) -> Vec<f64> {
        self.indices.iter().map(|&i| self.parent.weight(i)).collect()
    }

    /// `w̃ᵀ1`
    pub fn total_weight(&self) -> f64 {
        self.indices.iter().map(|&i| self.parent.weight(i)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Gaussian)> + Clone {
        self.indices
            .iter()
            .map(move |&i| (self.parent.weight(i), self.parent.component(i)))
    }

    /// The selected components as a mixture with weights `w̄ = w̃ / (w̃ᵀ1)`.
    pub fn normalized(&self) -> GaussianMixture {
        let total = self.total_weight();
        GaussianMixture::from_parts(
            self.iter().map(|(w, _)| w / total).collect(),
            self.iter().map(|(_, c)| c.clone()).collect(),
        )
    }
}
