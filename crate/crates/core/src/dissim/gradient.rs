//! Analytic gradients of ISE and NISE with respect to the reduced mixture.
//!
//! With `φ = 𝒩(δ|0,S)` for a pair term, `∂φ/∂δ = −φS⁻¹δ` and
//! `∂φ/∂S = (φ/2)(S⁻¹δδᵀS⁻¹ − S⁻¹)`. Covariance partials are reported as
//! the symmetric matrix `G` with `dD = tr(G dΣ)` for symmetric `dΣ`.

use nalgebra::{DMatrix, DVector};

use super::likeness::PairTerm;
use super::{ise_from_blocks, nise_from_blocks};
use crate::error::Result;
use crate::mixture::GaussianMixture;

/// Partial derivatives over the parameters of a reduced mixture.
///
/// Weight partials treat every weight as a free coordinate; the simplex
/// constraint is handled by the caller's parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureGradient {
    pub weights: DVector<f64>,
    pub means: Vec<DVector<f64>>,
    pub covs: Vec<DMatrix<f64>>,
}

impl MixtureGradient {
    pub fn zeros(size: usize, dim: usize) -> Self {
        Self {
            weights: DVector::zeros(size),
            means: vec![DVector::zeros(dim); size],
            covs: vec![DMatrix::zeros(dim, dim); size],
        }
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            weights: &self.weights * a + &other.weights * b,
            means: self
                .means
                .iter()
                .zip(&other.means)
                .map(|(x, y)| x * a + y * b)
                .collect(),
            covs: self
                .covs
                .iter()
                .zip(&other.covs)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    /// Largest absolute partial over the mean and covariance blocks.
    pub fn max_abs_location_scale(&self) -> f64 {
        self.means
            .iter()
            .map(|m| m.amax())
            .chain(self.covs.iter().map(|c| c.amax()))
            .fold(0.0, f64::max)
    }
}

/// Block values and their gradients with respect to the reduced mixture.
pub(crate) struct BlockGradients {
    pub jhh: f64,
    pub jhr: f64,
    pub jrr: f64,
    pub d_jhr: MixtureGradient,
    pub d_jrr: MixtureGradient,
}

/// `jhh` may be supplied when the hypothesis side is cached.
pub(crate) fn block_gradients(
    f: &GaussianMixture,
    g: &GaussianMixture,
    jhh: Option<f64>,
) -> BlockGradients {
    let nr = g.size();
    let d = g.dim();
    let jhh = jhh.unwrap_or_else(|| super::self_likeness(f));
    let mut d_jhr = MixtureGradient::zeros(nr, d);
    let mut d_jrr = MixtureGradient::zeros(nr, d);
    let mut jhr = 0.0;
    let mut jrr = 0.0;

    for (k, (wk, ck)) in g.iter().enumerate() {
        // Cross terms: δ = μᵢʰ − μₖ, so ∂φ/∂μₖ = +φS⁻¹δ.
        for (wi, ci) in f.iter() {
            let t = PairTerm::new(ci, ck);
            jhr += wi * wk * t.value;
            d_jhr.weights[k] += wi * t.value;
            d_jhr.means[k].axpy(wi * wk * t.value, &t.s_inv_delta, 1.0);
            d_jhr.covs[k] += t.d_cov() * (wi * wk);
        }
        // Self terms: δ = μₖ − μₗ, so ∂φ/∂μₖ = −φS⁻¹δ; every (k,l) pair
        // appears twice in wᵀHw, including l = k through S = 2Σₖ.
        for (l, (wl, cl)) in g.iter().enumerate() {
            let t = PairTerm::new(ck, cl);
            jrr += wk * wl * t.value;
            d_jrr.weights[k] += 2.0 * wl * t.value;
            if l != k {
                d_jrr.means[k].axpy(-2.0 * wk * wl * t.value, &t.s_inv_delta, 1.0);
            }
            d_jrr.covs[k] += t.d_cov() * (2.0 * wk * wl);
        }
    }

    BlockGradients {
        jhh,
        jhr,
        jrr,
        d_jhr,
        d_jrr,
    }
}

impl BlockGradients {
    pub fn ise(&self) -> f64 {
        ise_from_blocks(self.jhh, self.jhr, self.jrr)
    }

    pub fn nise(&self) -> f64 {
        nise_from_blocks(self.jhh, self.jhr, self.jrr)
    }

    pub fn ise_gradient(&self) -> MixtureGradient {
        self.d_jhr.combine(-2.0, &self.d_jrr, 1.0)
    }

    /// Quotient rule on `1 − 2Jhr/(Jhh + Jrr)`.
    pub fn nise_gradient(&self) -> MixtureGradient {
        let denom = self.jhh + self.jrr;
        let a = -2.0 / denom;
        let b = 2.0 * self.jhr / (denom * denom);
        self.d_jhr.combine(a, &self.d_jrr, b)
    }
}

/// Gradient of `ise(f, g)` over the parameters of `g`.
pub fn ise_gradient(f: &GaussianMixture, g: &GaussianMixture) -> Result<MixtureGradient> {
    f.check_same_dim(g)?;
    Ok(block_gradients(f, g, None).ise_gradient())
}

/// Gradient of `nise(f, g)` over the parameters of `g`.
pub fn nise_gradient(f: &GaussianMixture, g: &GaussianMixture) -> Result<MixtureGradient> {
    f.check_same_dim(g)?;
    Ok(block_gradients(f, g, None).nise_gradient())
}
