mod common;

use common::{random_mixture, rng, test_gm};
use gmr_core::reduce::{
    greedy_reduce, merge_pair, prune, select_action_global, select_merge_local, MergeMethod,
    PruneCriterion, TraceRecord,
};
use gmr_core::{
    ise, nise, runnalls_reduce, williams_reduce, Action, GaussianMixture, Measure,
};
use rand::seq::SliceRandom;
use rand::Rng;

fn check_output(gm: &GaussianMixture, target: usize) {
    assert_eq!(gm.size(), target);
    assert!((gm.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for c in gm.components() {
        assert!(c.cov().clone().cholesky().is_some());
    }
}

#[test]
fn pipelines_produce_valid_mixtures_and_replayable_traces() {
    let mut r = rng(41);
    for _ in 0..10 {
        let n = r.random_range(3..=6);
        let d = r.random_range(1..=2);
        let gm = random_mixture(&mut r, n, d);
        let target = r.random_range(1..n);

        let runs = [
            williams_reduce(&gm, target, &MergeMethod::KldBarycenter).unwrap(),
            greedy_reduce(&gm, target, Measure::Nise, &MergeMethod::KldBarycenter).unwrap(),
            runnalls_reduce(&gm, target).unwrap(),
        ];
        for (reduced, trace) in &runs {
            check_output(reduced, target);
            assert_eq!(trace.steps.len(), n - target);
            assert_eq!(&trace.replay(&gm).unwrap(), reduced);
            let mut size = n;
            let mut current = gm.clone();
            for step in &trace.steps {
                current = step.apply(&current).unwrap();
                size -= 1;
                assert_eq!(current.size(), size);
            }
        }
        assert_eq!(runs[0].1.final_cost, ise(&gm, &runs[0].0).unwrap());
        assert_eq!(runs[1].1.final_cost, nise(&gm, &runs[1].0).unwrap());
    }
}

#[test]
fn global_selection_matches_brute_force() {
    let mut r = rng(43);
    for _ in 0..20 {
        let n = r.random_range(2..=6);
        let original = random_mixture(&mut r, n + 1, 1);
        let current = random_mixture(&mut r, n, 1);
        for measure in [Measure::Ise, Measure::Nise] {
            let cost = |g: &GaussianMixture| match measure {
                Measure::Ise => ise(&original, g).unwrap(),
                _ => nise(&original, g).unwrap(),
            };
            let mut best = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    let merged = merge_pair(&current, i, j, &MergeMethod::KldBarycenter).unwrap();
                    best = best.min(cost(&merged));
                }
                best = best.min(cost(&current.without(i).unwrap()));
            }
            let action =
                select_action_global(&original, &current, measure, &MergeMethod::KldBarycenter).unwrap();
            assert_eq!(action.cost(), best);
        }
    }
}

#[test]
fn duplicate_pair_is_merged_first() {
    let gm = GaussianMixture::univariate(&[0.3, 0.2, 0.2, 0.3], &[0.0, 2.0, 2.0, 5.0], &[1.0, 0.5, 0.5, 1.0])
        .unwrap();
    let (_, trace) = runnalls_reduce(&gm, 3).unwrap();
    assert!(matches!(trace.steps[0], Action::Merge { i: 1, j: 2, .. }));
    let action = select_action_global(&gm, &gm, Measure::Ise, &MergeMethod::KldBarycenter).unwrap();
    assert!(matches!(action, Action::Merge { i: 1, j: 2, .. }));
    assert!(action.cost() < 1e-12);
}

#[test]
fn local_selection_examples() {
    let gm = GaussianMixture::univariate(&[0.3, 0.3, 0.4], &[0.0, 0.1, 5.0], &[1.0, 1.0, 1.0]).unwrap();
    assert_eq!(select_merge_local(&gm, Measure::Kld).unwrap(), (0, 1));
    assert_eq!(select_merge_local(&gm, Measure::Ise).unwrap(), (0, 1));

    // Relabelling the components relabels the chosen pair.
    let mut r = rng(47);
    for _ in 0..20 {
        let n = r.random_range(2..=6);
        let gm = random_mixture(&mut r, n, 2);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let permuted = gm.permuted(&perm).unwrap();
        for measure in [Measure::Kld, Measure::Ise] {
            let (i, j) = select_merge_local(&gm, measure).unwrap();
            let (a, b) = select_merge_local(&permuted, measure).unwrap();
            let mut mapped = [perm[a], perm[b]];
            mapped.sort_unstable();
            assert_eq!(mapped, [i, j]);
        }
    }
}

#[test]
fn golden_traces_on_the_test_mixture() {
    let gm = test_gm();
    let render = |steps: &[Action]| steps.iter().map(Action::describe).collect::<Vec<_>>();

    let (reduced, trace) = williams_reduce(&gm, 2, &MergeMethod::KldBarycenter).unwrap();
    assert_eq!(render(&trace.steps), ["merge 3+4", "prune 2", "merge 1+2"]);
    assert!((trace.final_cost - 0.0059636).abs() < 1e-5);
    check_output(&reduced, 2);

    let method = MergeMethod::bsga(Measure::Ise);
    let (consistent, trace) = williams_reduce(&gm, 2, &method).unwrap();
    assert_eq!(render(&trace.steps), ["merge 3+4", "merge 2+3", "merge 1+2"]);
    assert!(trace.final_cost < 0.0059636);

    let (runnalls, _) = runnalls_reduce(&gm, 2).unwrap();
    let cfg = gmr_core::QuadratureConfig::default();
    let kld = |g: &GaussianMixture| gmr_core::dissim::kld_gm_numeric(&gm, g, &cfg).unwrap().value;
    assert!(kld(&runnalls) < kld(&consistent));
    assert!(ise(&gm, &consistent).unwrap() < ise(&gm, &runnalls).unwrap());
}

#[test]
fn trace_file_replays_exactly() {
    let gm = test_gm();
    let (reduced, trace) = williams_reduce(&gm, 2, &MergeMethod::KldBarycenter).unwrap();
    let text = gmr_core::io::to_json(&trace.record()).unwrap();
    let record: TraceRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(record, trace.record());
    assert_eq!(record.replay(&gm, &MergeMethod::KldBarycenter).unwrap(), reduced);
}

#[test]
fn threshold_prune_example() {
    let gm = test_gm();
    let (pruned, actions) = prune(&gm, PruneCriterion::Threshold(0.1), None).unwrap();
    assert_eq!(actions.len(), 1);
    for k in 0..4 {
        assert_eq!(pruned.weight(k), gm.weight(k + 1) / 0.917);
    }
}
