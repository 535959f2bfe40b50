//! Dissimilarity measures between Gaussian mixtures.
//!
//! ISE and NISE have closed forms built from the likeness blocks
//! `Jhh`, `Jhr`, `Jrr`; their gradients with respect to the second
//! (reduced) mixture are analytic. KLD has a closed form only between two
//! Gaussians and is otherwise integrated numerically.

pub(crate) mod gradient;
mod kld;
mod likeness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GmrError, Result};
use crate::gaussian::Gaussian;
use crate::mixture::GaussianMixture;

pub use gradient::{ise_gradient, nise_gradient, MixtureGradient};
pub use kld::{kld_gaussians, kld_gm_numeric, KldEstimate, KldMethod};
pub use likeness::{
    cross_likeness, gaussian_product_integral, likeness, self_likeness, LikenessMatrices,
};

/// Negative results of Gram-form subtractions above this are round-off.
pub const ROUNDOFF_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Kld,
    Ise,
    Nise,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Kld => "kld",
            Measure::Ise => "ise",
            Measure::Nise => "nise",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = GmrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kld" => Ok(Measure::Kld),
            "ise" => Ok(Measure::Ise),
            "nise" => Ok(Measure::Nise),
            other => Err(GmrError::InvalidConfig(format!("unknown measure {other:?}"))),
        }
    }
}

/// Controls numeric KLD evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Integration range padding beyond the extreme means, in units of the
    /// largest component standard deviation.
    pub support_sigmas: f64,
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            support_sigmas: 12.0,
            max_subdivisions: 1_000_000,
            mc_samples: 200_000,
            seed: 42,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(GmrError::InvalidConfig("abs_tol must be > 0".into()));
        }
        if !(self.support_sigmas >= 6.0) {
            return Err(GmrError::InvalidConfig("support_sigmas must be >= 6".into()));
        }
        if self.mc_samples < 1_000 {
            return Err(GmrError::InvalidConfig("mc_samples must be >= 1000".into()));
        }
        Ok(())
    }
}

/// Integral squared error `Jhh − 2Jhr + Jrr`.
pub fn ise(f: &GaussianMixture, g: &GaussianMixture) -> Result<f64> {
    f.check_same_dim(g)?;
    let jhh = self_likeness(f);
    Ok(ise_from_blocks(jhh, cross_likeness(f, g), self_likeness(g)))
}

/// Normalized ISE `1 − 2Jhr/(Jhh + Jrr)`, in `[0, 1)`.
pub fn nise(f: &GaussianMixture, g: &GaussianMixture) -> Result<f64> {
    f.check_same_dim(g)?;
    let jhh = self_likeness(f);
    Ok(nise_from_blocks(jhh, cross_likeness(f, g), self_likeness(g)))
}

pub(crate) fn ise_from_blocks(jhh: f64, jhr: f64, jrr: f64) -> f64 {
    clamp_roundoff(jhh - 2.0 * jhr + jrr, jhh + jrr)
}

pub(crate) fn nise_from_blocks(jhh: f64, jhr: f64, jrr: f64) -> f64 {
    // Same value as 1 − 2Jhr/(Jhh+Jrr), without the cancellation near zero.
    let denom = jhh + jrr;
    clamp_roundoff((jhh - 2.0 * jhr + jrr) / denom, 1.0)
}

fn clamp_roundoff(value: f64, scale: f64) -> f64 {
    if value < 0.0 {
        debug_assert!(
            value >= -ROUNDOFF_CLAMP * scale.max(1.0),
            "negative squared distance {value:e}"
        );
        0.0
    } else {
        value
    }
}

/// Evaluates `D(f ‖ g)` for any supported measure; KLD is numeric.
pub fn dissimilarity(
    f: &GaussianMixture,
    g: &GaussianMixture,
    measure: Measure,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match measure {
        Measure::Ise => ise(f, g),
        Measure::Nise => nise(f, g),
        Measure::Kld => Ok(kld_gm_numeric(f, g, cfg)?.value),
    }
}

/// `D(original ‖ ·)` with the self-likeness of `original` computed once.
#[derive(Debug, Clone)]
pub struct CachedOriginal<'a> {
    original: &'a GaussianMixture,
    jhh: f64,
}

impl<'a> CachedOriginal<'a> {
    pub fn new(original: &'a GaussianMixture) -> Self {
        Self {
            original,
            jhh: self_likeness(original),
        }
    }

    pub fn original(&self) -> &'a GaussianMixture {
        self.original
    }

    pub fn jhh(&self) -> f64 {
        self.jhh
    }

    /// Same bits as [`ise`], [`nise`] or [`dissimilarity`] on the pair.
    pub fn eval(&self, g: &GaussianMixture, measure: Measure, cfg: &QuadratureConfig) -> Result<f64> {
        self.original.check_same_dim(g)?;
        match measure {
            Measure::Ise => Ok(ise_from_blocks(
                self.jhh,
                cross_likeness(self.original, g),
                self_likeness(g),
            )),
            Measure::Nise => Ok(nise_from_blocks(
                self.jhh,
                cross_likeness(self.original, g),
                self_likeness(g),
            )),
            Measure::Kld => Ok(kld_gm_numeric(self.original, g, cfg)?.value),
        }
    }
}

/// Closed-form dissimilarity between two single Gaussians.
pub fn gaussian_dissimilarity(a: &Gaussian, b: &Gaussian, measure: Measure) -> Result<f64> {
    let fa = GaussianMixture::single(a.clone());
    let fb = GaussianMixture::single(b.clone());
    match measure {
        Measure::Kld => kld_gaussians(a, b),
        Measure::Ise => ise(&fa, &fb),
        Measure::Nise => nise(&fa, &fb),
    }
}
