//! Unconstrained coordinates for mixtures.
//!
//! Weights go through a softmax whose last logit is pinned to 0. Each
//! covariance is `Σ = L Lᵀ` with `L` lower triangular; the diagonal of `L` is
//! stored as its logarithm and the strict lower triangle is free.
//!
//! Coordinate layout: `N−1` logits, then for each component its mean
//! followed by the rows of `L` (lower triangle, row-major).

use nalgebra::{DMatrix, DVector};

use crate::dissim::MixtureGradient;
use crate::error::Result;
use crate::gaussian::Gaussian;
use crate::mixture::GaussianMixture;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Layout {
    pub size: usize,
    pub dim: usize,
}

impl Layout {
    pub fn of(gm: &GaussianMixture) -> Self {
        Self {
            size: gm.size(),
            dim: gm.dim(),
        }
    }

    fn logits(&self) -> usize {
        self.size - 1
    }

    fn gaussian_len(&self) -> usize {
        self.dim + self.dim * (self.dim + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.logits() + self.size * self.gaussian_len()
    }

    fn offset(&self, k: usize) -> usize {
        self.logits() + k * self.gaussian_len()
    }

    pub fn encode(&self, gm: &GaussianMixture) -> DVector<f64> {
        let mut theta = DVector::zeros(self.len());
        let last = gm.weight(self.size - 1).ln();
        for k in 0..self.logits() {
            theta[k] = gm.weight(k).ln() - last;
        }
        for (k, c) in gm.components().iter().enumerate() {
            encode_gaussian(c, &mut theta.as_mut_slice()[self.offset(k)..]);
        }
        theta
    }

    pub fn weights(&self, theta: &DVector<f64>) -> Vec<f64> {
        let max = theta
            .iter()
            .take(self.logits())
            .copied()
            .fold(0.0f64, f64::max);
        let mut w: Vec<f64> = (0..self.size)
            .map(|k| {
                let a = if k < self.logits() { theta[k] } else { 0.0 };
                (a - max).exp()
            })
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }

    fn cholesky(&self, theta: &DVector<f64>, k: usize) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim;
        let block = &theta.as_slice()[self.offset(k)..self.offset(k) + self.gaussian_len()];
        let mean = DVector::from_column_slice(&block[..d]);
        let mut l = DMatrix::zeros(d, d);
        let mut idx = d;
        for r in 0..d {
            for c in 0..=r {
                l[(r, c)] = if r == c { block[idx].exp() } else { block[idx] };
                idx += 1;
            }
        }
        (mean, l)
    }

    /// Maps coordinates back to a mixture; fails when a covariance overflows
    /// or loses definiteness numerically.
    pub fn decode(&self, theta: &DVector<f64>) -> Result<GaussianMixture> {
        let weights = self.weights(theta);
        let components = (0..self.size)
            .map(|k| {
                let (mean, l) = self.cholesky(theta, k);
                Gaussian::from_cholesky(mean, l)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GaussianMixture::from_parts(weights, components))
    }

    /// Chain rule from mixture-parameter partials to coordinate partials.
    pub fn pull_back(&self, theta: &DVector<f64>, grad: &MixtureGradient) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(self.len());

        let w = self.weights(theta);
        let mean_grad: f64 = w.iter().zip(grad.weights.iter()).map(|(a, b)| a * b).sum();
        for k in 0..self.logits() {
            out[k] = w[k] * (grad.weights[k] - mean_grad);
        }

        for k in 0..self.size {
            let (_, l) = self.cholesky(theta, k);
            // dD = tr(G dΣ) with Σ = LLᵀ gives ∂D/∂L = 2GL.
            let dl = &grad.covs[k] * &l * 2.0;
            let base = self.offset(k);
            for i in 0..d {
                out[base + i] = grad.means[k][i];
            }
            let mut idx = base + d;
            for r in 0..d {
                for c in 0..=r {
                    out[idx] = if r == c { dl[(r, c)] * l[(r, c)] } else { dl[(r, c)] };
                    idx += 1;
                }
            }
        }
        out
    }
}

fn encode_gaussian(g: &Gaussian, out: &mut [f64]) {
    let d = g.dim();
    out[..d].copy_from_slice(g.mean().as_slice());
    let l = g.chol();
    let mut idx = d;
    for r in 0..d {
        for c in 0..=r {
            out[idx] = if r == c { l[(r, c)].ln() } else { l[(r, c)] };
            idx += 1;
        }
    }
}
