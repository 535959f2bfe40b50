#![allow(dead_code)]

use gmr_core::{Gaussian, GaussianMixture};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Covariance `AAᵀ + floor·I` with `A` entries in `[-1, 1]`.
pub fn random_gaussian<R: Rng>(rng: &mut R, d: usize, spread: f64, floor: f64) -> Gaussian {
    let mean = DVector::from_fn(d, |_, _| rng.random_range(-spread..spread));
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let cov = &a * a.transpose() + DMatrix::identity(d, d) * floor;
    Gaussian::new(mean, cov).unwrap()
}

pub fn random_mixture<R: Rng>(rng: &mut R, n: usize, d: usize) -> GaussianMixture {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let components = (0..n).map(|_| random_gaussian(rng, d, 3.0, 0.2)).collect();
    GaussianMixture::new(weights, components).unwrap()
}

/// The five-component 1-d test mixture used by the reduction examples.
pub fn test_gm() -> GaussianMixture {
    GaussianMixture::univariate(
        &[0.083, 0.167, 0.25, 0.333, 0.167],
        &[1.0, 2.0, 3.0, 4.0, 10.0],
        &[0.1, 20.0, 2.0, 2.0, 2.0],
    )
    .unwrap()
}

/// Two-component case study with means −1 and `mu2`.
pub fn case_study(mu2: f64) -> GaussianMixture {
    GaussianMixture::univariate(&[0.45, 0.55], &[-1.0, mu2], &[0.15, 0.15]).unwrap()
}

pub fn pdf_1d(gm: &GaussianMixture, x: f64) -> f64 {
    gm.pdf(&DVector::from_element(1, x)).unwrap()
}

pub fn var(g: &Gaussian) -> f64 {
    g.cov()[(0, 0)]
}

pub fn mean(g: &Gaussian) -> f64 {
    g.mean()[0]
}

/// Largest relative deviation between the analytic gradient of `measure`
/// (ISE or NISE) at `g` and central differences with step `h`.
///
/// Weight partials are checked along simplex directions `e_k − e_last`;
/// covariance partials along symmetric unit perturbations, for which the
/// directional derivative is `G_rr` or `2G_rc`. Entries far below the
/// gradient's overall scale are compared against that scale instead of
/// their own magnitude.
pub fn gradient_max_rel_error(
    f: &GaussianMixture,
    g: &GaussianMixture,
    measure: gmr_core::Measure,
    h: f64,
) -> f64 {
    use gmr_core::dissim::{ise_gradient, nise_gradient};
    use gmr_core::Measure;

    let value = |q: &GaussianMixture| match measure {
        Measure::Ise => gmr_core::ise(f, q).unwrap(),
        Measure::Nise => gmr_core::nise(f, q).unwrap(),
        Measure::Kld => unreachable!("no closed-form KLD gradient"),
    };
    let grad = match measure {
        Measure::Ise => ise_gradient(f, g).unwrap(),
        _ => nise_gradient(f, g).unwrap(),
    };
    let n = g.size();
    let d = g.dim();
    let rebuild = |weights: Vec<f64>, comps: Vec<Gaussian>| GaussianMixture::new(weights, comps).unwrap();

    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let shift = |s: f64| {
            let mut w = g.weights().to_vec();
            w[k] += s;
            w[n - 1] -= s;
            rebuild(w, g.components().to_vec())
        };
        let fd = (value(&shift(h)) - value(&shift(-h))) / (2.0 * h);
        pairs.push((grad.weights[k] - grad.weights[n - 1], fd));
    }
    for k in 0..n {
        for i in 0..d {
            let shift = |s: f64| {
                let mut comps = g.components().to_vec();
                let mut mean = comps[k].mean().clone();
                mean[i] += s;
                comps[k] = Gaussian::new(mean, comps[k].cov().clone()).unwrap();
                rebuild(g.weights().to_vec(), comps)
            };
            let fd = (value(&shift(h)) - value(&shift(-h))) / (2.0 * h);
            pairs.push((grad.means[k][i], fd));
        }
        for r in 0..d {
            for c in 0..=r {
                let shift = |s: f64| {
                    let mut comps = g.components().to_vec();
                    let mut cov = comps[k].cov().clone();
                    cov[(r, c)] += s;
                    if r != c {
                        cov[(c, r)] += s;
                    }
                    comps[k] = Gaussian::new(comps[k].mean().clone(), cov).unwrap();
                    rebuild(g.weights().to_vec(), comps)
                };
                let fd = (value(&shift(h)) - value(&shift(-h))) / (2.0 * h);
                let an = if r == c {
                    grad.covs[k][(r, c)]
                } else {
                    2.0 * grad.covs[k][(r, c)]
                };
                pairs.push((an, fd));
            }
        }
    }
    let scale = pairs.iter().map(|(a, _)| a.abs()).fold(0.0, f64::max);
    pairs
        .iter()
        .map(|(an, fd)| (an - fd).abs() / an.abs().max(fd.abs()).max(1e-3 * scale).max(1e-12))
        .fold(0.0, f64::max)
}

/// ISE by adaptive quadrature of `(f − g)²` over the joint support.
pub fn ise_by_quadrature(f: &GaussianMixture, g: &GaussianMixture, abs_tol: f64) -> f64 {
    let (lo_f, hi_f) = f.support_1d(12.0);
    let (lo_g, hi_g) = g.support_1d(12.0);
    let (lo, hi) = (lo_f.min(lo_g), hi_f.max(hi_g));
    let narrowest = f
        .components()
        .iter()
        .chain(g.components())
        .map(|c| c.cov()[(0, 0)].sqrt())
        .fold(f64::INFINITY, f64::min);
    let panels = ((hi - lo) / narrowest).ceil() as usize;
    gmr_core::quadrature::integrate(
        |x| (pdf_1d(f, x) - pdf_1d(g, x)).powi(2),
        lo,
        hi,
        abs_tol,
        panels,
        1_000_000,
    )
    .unwrap()
    .value
}
