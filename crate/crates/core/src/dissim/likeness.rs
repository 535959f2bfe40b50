use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::gaussian::{Gaussian, LN_2PI};
use crate::mixture::GaussianMixture;

/// Gram matrices of Gaussian product integrals between a hypothesis mixture
/// `f` and a reduced mixture `g`, with the weighted scalars built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct LikenessMatrices {
    pub hhh: DMatrix<f64>,
    pub hhr: DMatrix<f64>,
    pub hrr: DMatrix<f64>,
    pub jhh: f64,
    pub jhr: f64,
    pub jrr: f64,
}

/// `∫ 𝒩(x|μa,Σa) 𝒩(x|μb,Σb) dx = 𝒩(μa | μb, Σa + Σb)`.
pub fn gaussian_product_integral(a: &Gaussian, b: &Gaussian) -> Result<f64> {
    a.check_dim(b.dim())?;
    Ok(product_value(a, b))
}

pub(crate) fn product_value(a: &Gaussian, b: &Gaussian) -> f64 {
    if a.dim() == 1 {
        let s = a.cov()[(0, 0)] + b.cov()[(0, 0)];
        let delta = a.mean()[0] - b.mean()[0];
        return (-0.5 * (LN_2PI + s.ln() + delta * delta / s)).exp();
    }
    PairTerm::new(a, b).value
}

/// Product integral of a pair together with the pieces needed for its
/// derivatives: `δ = μa − μb`, `S = Σa + Σb`, `φ = 𝒩(δ | 0, S)`.
#[derive(Debug, Clone)]
pub(crate) struct PairTerm {
    pub value: f64,
    /// `S⁻¹ δ`
    pub s_inv_delta: DVector<f64>,
    pub s_inv: DMatrix<f64>,
}

impl PairTerm {
    pub fn new(a: &Gaussian, b: &Gaussian) -> Self {
        let d = a.dim();
        let s = a.cov() + b.cov();
        let delta = a.mean() - b.mean();
        let chol = s
            .cholesky()
            .expect("sum of positive definite matrices is positive definite");
        let s_inv_delta = chol.solve(&delta);
        let s_inv = chol.inverse();
        let s_inv = (&s_inv + s_inv.transpose()) * 0.5;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let quad = delta.dot(&s_inv_delta);
        let value = (-0.5 * (d as f64 * LN_2PI + log_det + quad)).exp();
        Self {
            value,
            s_inv_delta,
            s_inv,
        }
    }

    /// `∂φ/∂S = (φ/2)(S⁻¹δδᵀS⁻¹ − S⁻¹)`, symmetric.
    pub fn d_cov(&self) -> DMatrix<f64> {
        let outer = &self.s_inv_delta * self.s_inv_delta.transpose();
        (outer - &self.s_inv) * (0.5 * self.value)
    }
}

fn gram(f: &GaussianMixture, g: &GaussianMixture) -> DMatrix<f64> {
    DMatrix::from_fn(f.size(), g.size(), |i, k| {
        product_value(f.component(i), g.component(k))
    })
}

fn weighted(f: &GaussianMixture, h: &DMatrix<f64>, g: &GaussianMixture) -> f64 {
    // Row-by-row accumulation in index order keeps results reproducible.
    f.weights()
        .iter()
        .enumerate()
        .map(|(i, wi)| {
            wi * g
                .weights()
                .iter()
                .enumerate()
                .map(|(k, wk)| h[(i, k)] * wk)
                .sum::<f64>()
        })
        .sum()
}

/// Fills `Hhh`, `Hhr`, `Hrr` and the scalars `J = wᵀ H w`.
pub fn likeness(f: &GaussianMixture, g: &GaussianMixture) -> Result<LikenessMatrices> {
    f.check_same_dim(g)?;
    let hhh = gram(f, f);
    let hhr = gram(f, g);
    let hrr = gram(g, g);
    let jhh = weighted(f, &hhh, f);
    let jhr = weighted(f, &hhr, g);
    let jrr = weighted(g, &hrr, g);
    Ok(LikenessMatrices {
        hhh,
        hhr,
        hrr,
        jhh,
        jhr,
        jrr,
    })
}

/// `∫ f² dx`
pub fn self_likeness(f: &GaussianMixture) -> f64 {
    cross_likeness(f, f)
}

/// `∫ f g dx`; dimensions are assumed to match.
pub fn cross_likeness(f: &GaussianMixture, g: &GaussianMixture) -> f64 {
    f.iter()
        .map(|(wi, ci)| {
            wi * g
                .iter()
                .map(|(wk, ck)| product_value(ci, ck) * wk)
                .sum::<f64>()
        })
        .sum()
}
