mod common;

use common::{case_study, mean, random_gaussian, random_mixture, rng, var};
use gmr_core::dissim::kld_gm_numeric;
use gmr_core::merge::{pairwise_barycenter, pairwise_barycenter_objective};
use gmr_core::reduce::{merge_pair, MergeMethod};
use gmr_core::{
    bsga, ise, kld_barycenter, runnalls_bound, BsgaOptions, Gaussian, GaussianMixture, Measure,
    QuadratureConfig, SubMixture,
};
use rand::seq::index::sample;
use rand::Rng;

#[test]
fn barycenter_replacement_preserves_moments() {
    let mut r = rng(17);
    for _ in 0..100 {
        let n = r.random_range(2..=6);
        let d = r.random_range(1..=3);
        let gm = random_mixture(&mut r, n, d);
        let k = r.random_range(1..=n);
        let mut picked = sample(&mut r, n, k).into_vec();
        picked.sort_unstable();
        let sub = SubMixture::new(&gm, picked.clone()).unwrap();
        let (merged, w) = kld_barycenter(&sub).unwrap();

        let mut weights = vec![w];
        let mut comps = vec![merged];
        for i in (0..n).filter(|i| !picked.contains(i)) {
            weights.push(gm.weight(i));
            comps.push(gm.component(i).clone());
        }
        let replaced = GaussianMixture::new(weights, comps).unwrap();
        let (m0, c0) = gm.pooled_moments();
        let (m1, c1) = replaced.pooled_moments();
        assert!((m0 - m1).amax() < 1e-10);
        assert!((c0 - c1).amax() < 1e-10);
    }
}

/// Gradient descent on `(μ, log σ²)` with central-difference gradients of the
/// numerically integrated KLD objective.
fn kld_descent_1d(target: &GaussianMixture, start: (f64, f64)) -> (f64, f64) {
    let cfg = QuadratureConfig {
        abs_tol: 1e-13,
        ..Default::default()
    };
    let objective = |m: f64, s: f64| {
        let q = GaussianMixture::single(Gaussian::univariate(m, s.exp()).unwrap());
        kld_gm_numeric(target, &q, &cfg).unwrap().value
    };
    let h = 1e-4;
    let (mut m, mut s) = (start.0, start.1.ln());
    let mut value = objective(m, s);
    for _ in 0..2000 {
        let gm = (objective(m + h, s) - objective(m - h, s)) / (2.0 * h);
        let gs = (objective(m, s + h) - objective(m, s - h)) / (2.0 * h);
        let norm2 = gm * gm + gs * gs;
        if norm2.sqrt() < 1e-8 {
            break;
        }
        let mut t = 1.0;
        loop {
            let (m1, s1) = (m - t * gm, s - t * gs);
            let v1 = objective(m1, s1);
            if v1 <= value - 1e-4 * t * norm2 {
                m = m1;
                s = s1;
                value = v1;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return (m, s.exp());
            }
        }
    }
    (m, s.exp())
}

#[test]
fn kld_descent_lands_on_the_barycenter() {
    let mut r = rng(23);
    let mut targets = vec![case_study(2.0), case_study(4.0)];
    for _ in 0..3 {
        let n = r.random_range(1..=3);
        targets.push(random_mixture(&mut r, n, 1));
    }
    for target in &targets {
        let (bary, _) = kld_barycenter(&SubMixture::whole(target)).unwrap();
        for start in [(-3.0, 0.5), (5.0, 10.0), (0.0, 1.0)] {
            let (m, v) = kld_descent_1d(target, start);
            assert!((m - mean(&bary)).abs() < 1e-6, "mean {m} vs {}", mean(&bary));
            assert!((v - var(&bary)).abs() < 1e-6, "var {v} vs {}", var(&bary));
        }
    }
}

#[test]
fn ise_pairwise_objective_differs_by_a_constant() {
    let mut r = rng(29);
    for _ in 0..30 {
        let n = r.random_range(1..=5);
        let d = r.random_range(1..=3);
        let gm = random_mixture(&mut r, n, d);
        let sub = SubMixture::whole(&gm);
        let target = sub.normalized();
        let mut offsets = Vec::new();
        for _ in 0..5 {
            let q = random_gaussian(&mut r, d, 3.0, 0.2);
            let pairwise = pairwise_barycenter_objective(&sub, Measure::Ise, &q).unwrap();
            let single = ise(&target, &GaussianMixture::single(q)).unwrap();
            offsets.push(pairwise - single);
        }
        let spread = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - offsets.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-10, "spread {spread:e}");
    }
}

#[test]
fn ise_barycenter_and_bsga_coincide() {
    let mut r = rng(31);
    for _ in 0..10 {
        let n = r.random_range(2..=4);
        let gm = random_mixture(&mut r, n, 1);
        let sub = SubMixture::whole(&gm);
        let opts = BsgaOptions::multistart();
        let a = bsga(&sub, Measure::Ise, &opts).unwrap();
        let b = pairwise_barycenter(&sub, Measure::Ise, &opts).unwrap();
        assert!((mean(&a.gaussian) - mean(&b.gaussian)).abs() < 1e-6);
        assert!((var(&a.gaussian) - var(&b.gaussian)).abs() < 1e-6);
    }
}

#[test]
fn nise_barycenter_differs_from_nise_bsga() {
    let gm = case_study(1.0);
    let sub = SubMixture::whole(&gm);
    let opts = BsgaOptions::multistart();
    let fit = bsga(&sub, Measure::Nise, &opts).unwrap();
    let bary = pairwise_barycenter(&sub, Measure::Nise, &opts).unwrap();
    assert!((mean(&fit.gaussian) - mean(&bary.gaussian)).abs() > 0.01);
}

#[test]
fn nise_fit_is_tighter_than_ise_fit() {
    for mu2 in [2.0, 4.0, 10.0] {
        let gm = case_study(mu2);
        let sub = SubMixture::whole(&gm);
        let opts = BsgaOptions::multistart();
        let i = bsga(&sub, Measure::Ise, &opts).unwrap();
        let n = bsga(&sub, Measure::Nise, &opts).unwrap();
        assert!(n.gaussian.log_det() < i.gaussian.log_det(), "mu2 = {mu2}");
    }
}

#[test]
fn case_study_fits() {
    for mu2 in [1.0, 2.0, 4.0, 10.0] {
        let gm = case_study(mu2);
        let (bary, _) = kld_barycenter(&SubMixture::whole(&gm)).unwrap();
        assert_eq!(mean(&bary), 0.45 * -1.0 + 0.55 * mu2);
    }
    for mu2 in [4.0, 10.0] {
        let gm = case_study(mu2);
        let sub = SubMixture::whole(&gm);
        for measure in [Measure::Ise, Measure::Nise] {
            let fit = bsga(&sub, measure, &BsgaOptions::multistart()).unwrap();
            assert!((mean(&fit.gaussian) - mu2).abs() < 0.5, "{measure} mu2 = {mu2}");
        }
    }
}

#[test]
fn explicit_init_is_honoured() {
    let gm = case_study(4.0);
    let sub = SubMixture::whole(&gm);
    let opts = BsgaOptions {
        init: Some(gm.component(1).clone()),
        ..Default::default()
    };
    let fit = bsga(&sub, Measure::Ise, &opts).unwrap();
    assert_eq!(&fit.initial, gm.component(1));
    assert!((mean(&fit.gaussian) - 4.0).abs() < 0.5);
}

#[test]
fn runnalls_bound_dominates_kld_increase() {
    let mut r = rng(37);
    let cfg = QuadratureConfig::default();
    for _ in 0..100 {
        let n = r.random_range(2..=5);
        let gm = random_mixture(&mut r, n, 1);
        let i = r.random_range(0..n);
        let j = (i + r.random_range(1..n)) % n;
        let merged = merge_pair(&gm, i, j, &MergeMethod::KldBarycenter).unwrap();
        let increase = kld_gm_numeric(&gm, &merged, &cfg).unwrap().value;
        let bound = runnalls_bound(&gm, i, j).unwrap();
        assert!(bound >= increase - 1e-6, "bound {bound} < kld {increase}");
    }
}
