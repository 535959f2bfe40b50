//! Data, plots and manifests for the case-study and reduction figures.

use std::fs;
use std::path::Path;

use gmr_core::dissim::{kld_gm_numeric, CachedOriginal};
use gmr_core::io::{save_mixture, to_json};
use gmr_core::reduce::MergeMethod;
use gmr_core::{
    bsga, ise, kld_barycenter, nise, runnalls_reduce, williams_reduce, Action, BsgaOptions,
    Gaussian, GaussianMixture, Measure, QuadratureConfig, ReductionTrace, SubMixture,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{density, gaussian_json, linspace, write_csv, write_json};
use crate::svg;

pub const CASE_WEIGHTS: [f64; 2] = [0.45, 0.55];
pub const CASE_VARIANCES: [f64; 2] = [0.15, 0.15];
pub const CASE_MU1: f64 = -1.0;
/// Second mean of the two-component case studies, figures 1 to 4.
pub const CASE_MU2: [f64; 4] = [1.0, 2.0, 4.0, 10.0];

pub const TEST_WEIGHTS: [f64; 5] = [0.083, 0.167, 0.25, 0.333, 0.167];
pub const TEST_MEANS: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 10.0];
pub const TEST_VARIANCES: [f64; 5] = [0.1, 20.0, 2.0, 2.0, 2.0];

pub const DENSITY_POINTS: usize = 2048;
const DENSITY_SIGMAS: f64 = 6.0;
const SURFACE_MU2: f64 = 2.0;
const SURFACE_POINTS: usize = 200;
const SURFACE_MU_RANGE: (f64, f64) = (-4.0, 6.0);
const SURFACE_SIGMA_MAX: f64 = 15.0;
/// Every n-th surface row and column is drawn in the SVG heatmaps.
const HEATMAP_STRIDE: usize = 2;

const CASES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

pub fn case_mixture(mu2: f64) -> GaussianMixture {
    GaussianMixture::univariate(&CASE_WEIGHTS, &[CASE_MU1, mu2], &CASE_VARIANCES)
        .expect("case-study parameters are valid")
}

pub fn test_mixture() -> GaussianMixture {
    GaussianMixture::univariate(&TEST_WEIGHTS, &TEST_MEANS, &TEST_VARIANCES)
        .expect("test mixture parameters are valid")
}

pub fn run(case: &str, outdir: &Path) -> Result<(), CliError> {
    let selected: Vec<&str> = match case {
        "all" => CASES.to_vec(),
        c if CASES.contains(&c) => vec![c],
        other => {
            return Err(CliError::invalid(format!(
                "unknown case {other:?}; expected one of {} or all",
                CASES.join(", ")
            )))
        }
    };
    fs::create_dir_all(outdir)?;
    for id in selected {
        let files = match id {
            "fig5" => surface(outdir)?,
            "fig6" => williams_figure(outdir, 6)?,
            "fig7" => williams_figure(outdir, 7)?,
            "fig8" => comparison(outdir)?,
            _ => {
                let k: usize = id[3..].parse().expect("case id ends in a digit");
                bsga_figure(outdir, k)?
            }
        };
        println!("{id}: {}", files.join(", "));
    }
    Ok(())
}

fn std_dev(g: &Gaussian) -> f64 {
    g.cov()[(0, 0)].sqrt()
}

/// Grid over the original's extreme means padded by six of the largest
/// standard deviations among `shown`.
fn density_grid(original: &GaussianMixture, shown: &[&GaussianMixture]) -> Vec<f64> {
    let sigma = shown
        .iter()
        .flat_map(|gm| gm.components().iter().map(std_dev))
        .fold(0.0, f64::max);
    let means = original.components().iter().map(|c| c.mean()[0]);
    let lo = means.clone().fold(f64::INFINITY, f64::min);
    let hi = means.fold(f64::NEG_INFINITY, f64::max);
    linspace(
        lo - DENSITY_SIGMAS * sigma,
        hi + DENSITY_SIGMAS * sigma,
        DENSITY_POINTS,
    )
}

fn scores(original: &GaussianMixture, reduced: &GaussianMixture) -> Result<Value, CliError> {
    let kld = kld_gm_numeric(original, reduced, &QuadratureConfig::default())?;
    Ok(json!({
        "ise": ise(original, reduced)?,
        "nise": nise(original, reduced)?,
        "kld": kld.value,
        "kld_error": kld.error,
    }))
}

fn fit_json(original: &GaussianMixture, g: &Gaussian) -> Result<Value, CliError> {
    let mut v = json!({ "mean": g.mean()[0], "variance": g.cov()[(0, 0)] });
    v["scores"] = scores(original, &GaussianMixture::single(g.clone()))?;
    Ok(v)
}

fn bsga_figure(outdir: &Path, k: usize) -> Result<Vec<String>, CliError> {
    let id = format!("fig{k}");
    let mu2 = CASE_MU2[k - 1];
    let gm = case_mixture(mu2);
    let sub = SubMixture::whole(&gm);
    let (kld_fit, _) = kld_barycenter(&sub)?;
    let multistart = BsgaOptions::multistart();
    let ise_fit = bsga(&sub, Measure::Ise, &multistart)?;
    let nise_fit = bsga(&sub, Measure::Nise, &multistart)?;
    let ise_local = bsga(&sub, Measure::Ise, &BsgaOptions::default())?;

    let fits = [
        GaussianMixture::single(kld_fit.clone()),
        GaussianMixture::single(ise_fit.gaussian.clone()),
        GaussianMixture::single(nise_fit.gaussian.clone()),
    ];
    let xs = density_grid(&gm, &[&gm, &fits[0], &fits[1], &fits[2]]);
    let columns = [
        density(&gm, &xs),
        density(&fits[0], &xs),
        density(&fits[1], &xs),
        density(&fits[2], &xs),
    ];
    let names = ["original", "kld", "ise", "nise"];

    let csv_name = format!("{id}_density.csv");
    let mut headers = vec!["x"];
    headers.extend(names);
    let mut cols: Vec<&[f64]> = vec![&xs];
    cols.extend(columns.iter().map(Vec::as_slice));
    write_csv(&outdir.join(&csv_name), &headers, &cols)?;

    let svg_name = format!("{id}.svg");
    let series: Vec<(&str, &[f64])> = names
        .iter()
        .zip(columns.iter())
        .map(|(n, c)| (*n, c.as_slice()))
        .collect();
    let title = format!("BSGAs for means {CASE_MU1} and {mu2}");
    fs::write(
        outdir.join(&svg_name),
        svg::line_plot(&title, "x", &xs, &series, &[]),
    )?;

    let manifest_name = format!("{id}_manifest.json");
    let files = vec![csv_name, svg_name, manifest_name.clone()];
    let manifest = json!({
        "case": id,
        "inputs": {
            "weights": CASE_WEIGHTS,
            "means": [CASE_MU1, mu2],
            "variances": CASE_VARIANCES,
        },
        "grid": { "points": DENSITY_POINTS, "lo": xs[0], "hi": xs[xs.len() - 1] },
        "density_columns": names,
        "fits": {
            "kld": fit_json(&gm, &kld_fit)?,
            "ise": fit_json(&gm, &ise_fit.gaussian)?,
            "nise": fit_json(&gm, &nise_fit.gaussian)?,
        },
        "ise_from_kld_start": {
            "fit": fit_json(&gm, &ise_local.gaussian)?,
            "converged": ise_local.converged,
            "iterations": ise_local.iterations,
        },
        "files": files,
    });
    write_json(&outdir.join(&manifest_name), &manifest)?;
    Ok(files)
}

/// Interior grid points strictly below all eight neighbours.
pub fn grid_local_minima(values: &[f64], nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut minima = Vec::new();
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let v = values[iy * nx + ix];
            let lower = (-1i64..=1)
                .flat_map(|a| (-1i64..=1).map(move |b| (a, b)))
                .filter(|&(a, b)| (a, b) != (0, 0))
                .all(|(a, b)| {
                    let jy = (iy as i64 + a) as usize;
                    let jx = (ix as i64 + b) as usize;
                    v < values[jy * nx + jx]
                });
            if lower {
                minima.push((ix, iy));
            }
        }
    }
    minima
}

fn surface(outdir: &Path) -> Result<Vec<String>, CliError> {
    let gm = case_mixture(SURFACE_MU2);
    let cached = CachedOriginal::new(&gm);
    let cfg = QuadratureConfig::default();
    let mus = linspace(SURFACE_MU_RANGE.0, SURFACE_MU_RANGE.1, SURFACE_POINTS);
    let sigmas: Vec<f64> = (0..SURFACE_POINTS)
        .map(|j| SURFACE_SIGMA_MAX * (j + 1) as f64 / SURFACE_POINTS as f64)
        .collect();

    let n = SURFACE_POINTS * SURFACE_POINTS;
    let (mut mu_col, mut sigma_col) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut ise_col, mut nise_col) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for &s in &sigmas {
        for &m in &mus {
            let q = GaussianMixture::single(Gaussian::univariate(m, s)?);
            mu_col.push(m);
            sigma_col.push(s);
            ise_col.push(cached.eval(&q, Measure::Ise, &cfg)?);
            nise_col.push(cached.eval(&q, Measure::Nise, &cfg)?);
        }
    }
    let csv_name = "fig5_surface.csv".to_string();
    write_csv(
        &outdir.join(&csv_name),
        &["mu", "sigma", "ise", "nise"],
        &[&mu_col, &sigma_col, &ise_col, &nise_col],
    )?;

    let mut minima_json = serde_json::Map::new();
    let mut files = vec![csv_name];
    for (name, values) in [("ise", &ise_col), ("nise", &nise_col)] {
        let minima: Vec<(f64, f64, f64)> = grid_local_minima(values, SURFACE_POINTS, SURFACE_POINTS)
            .into_iter()
            .map(|(ix, iy)| (mus[ix], sigmas[iy], values[iy * SURFACE_POINTS + ix]))
            .collect();
        minima_json.insert(
            name.into(),
            minima
                .iter()
                .map(|&(m, s, v)| json!({ "mu": m, "sigma": s, "value": v }))
                .collect(),
        );

        let xs: Vec<f64> = mus.iter().copied().step_by(HEATMAP_STRIDE).collect();
        let ys: Vec<f64> = sigmas.iter().copied().step_by(HEATMAP_STRIDE).collect();
        let sub: Vec<f64> = (0..SURFACE_POINTS)
            .step_by(HEATMAP_STRIDE)
            .flat_map(|iy| {
                (0..SURFACE_POINTS)
                    .step_by(HEATMAP_STRIDE)
                    .map(move |ix| values[iy * SURFACE_POINTS + ix])
            })
            .collect();
        let markers: Vec<(f64, f64)> = minima.iter().map(|&(m, s, _)| (m, s)).collect();
        let svg_name = format!("fig5_{name}.svg");
        let title = format!("{} of a single Gaussian, means {CASE_MU1} and {SURFACE_MU2}", name.to_uppercase());
        fs::write(
            outdir.join(&svg_name),
            svg::heatmap(&title, "mu", "sigma", &xs, &ys, &sub, &markers),
        )?;
        files.push(svg_name);
    }

    let manifest_name = "fig5_manifest.json".to_string();
    files.push(manifest_name.clone());
    let manifest = json!({
        "case": "fig5",
        "inputs": {
            "weights": CASE_WEIGHTS,
            "means": [CASE_MU1, SURFACE_MU2],
            "variances": CASE_VARIANCES,
        },
        "grid": {
            "mu": { "lo": mus[0], "hi": mus[SURFACE_POINTS - 1], "points": SURFACE_POINTS },
            "sigma": { "lo": sigmas[0], "hi": sigmas[SURFACE_POINTS - 1], "points": SURFACE_POINTS },
        },
        "local_minima": minima_json,
        "files": files,
    });
    write_json(&outdir.join(&manifest_name), &manifest)?;
    Ok(files)
}

fn rendered(trace: &ReductionTrace) -> Vec<String> {
    trace.steps.iter().map(Action::describe).collect()
}

fn williams_figure(outdir: &Path, k: usize) -> Result<Vec<String>, CliError> {
    let id = format!("fig{k}");
    let gm = test_mixture();
    let (method, label) = if k == 6 {
        (MergeMethod::KldBarycenter, "williams")
    } else {
        (MergeMethod::bsga(Measure::Ise), "williams-ise")
    };
    let (reduced, trace) = williams_reduce(&gm, 2, &method)?;

    let xs = density_grid(&gm, &[&gm, &reduced]);
    let original_density = density(&gm, &xs);
    let reduced_density = density(&reduced, &xs);
    let csv_name = format!("{id}_density.csv");
    write_csv(
        &outdir.join(&csv_name),
        &["x", "original", "reduced"],
        &[&xs, &original_density, &reduced_density],
    )?;
    let mixture_name = format!("{id}_reduced.json");
    save_mixture(outdir.join(&mixture_name), &reduced)?;
    let trace_name = format!("{id}_trace.json");
    fs::write(outdir.join(&trace_name), to_json(&trace.record())?)?;

    let svg_name = format!("{id}.svg");
    let notes = vec![format!("ISE {:.7}", trace.final_cost)];
    fs::write(
        outdir.join(&svg_name),
        svg::line_plot(
            &format!("{label} reduction of the test mixture to 2 components"),
            "x",
            &xs,
            &[("original", &original_density), (label, &reduced_density)],
            &notes,
        ),
    )?;

    let manifest_name = format!("{id}_manifest.json");
    let files = vec![csv_name, mixture_name, trace_name, svg_name, manifest_name.clone()];
    let manifest = json!({
        "case": id,
        "pipeline": label,
        "inputs": { "weights": TEST_WEIGHTS, "means": TEST_MEANS, "variances": TEST_VARIANCES },
        "target": 2,
        "trace": rendered(&trace),
        "score": trace.final_cost,
        "scores": scores(&gm, &reduced)?,
        "reduced": reduced.components().iter().zip(reduced.weights()).map(|(c, w)| {
            let mut v = gaussian_json(c);
            v["weight"] = json!(w);
            v
        }).collect::<Vec<_>>(),
        "files": files,
    });
    write_json(&outdir.join(&manifest_name), &manifest)?;
    Ok(files)
}

fn comparison(outdir: &Path) -> Result<Vec<String>, CliError> {
    let gm = test_mixture();
    let (williams, williams_trace) = williams_reduce(&gm, 2, &MergeMethod::bsga(Measure::Ise))?;
    let (runnalls, runnalls_trace) = runnalls_reduce(&gm, 2)?;
    let williams_scores = scores(&gm, &williams)?;
    let runnalls_scores = scores(&gm, &runnalls)?;

    let xs = density_grid(&gm, &[&gm, &williams, &runnalls]);
    let columns = [density(&gm, &xs), density(&williams, &xs), density(&runnalls, &xs)];
    let csv_name = "fig8_density.csv".to_string();
    write_csv(
        &outdir.join(&csv_name),
        &["x", "original", "williams_ise", "runnalls"],
        &[&xs, &columns[0], &columns[1], &columns[2]],
    )?;
    let note = |name: &str, s: &Value| {
        format!(
            "{name}: ISE {:.5}, KLD {:.4}",
            s["ise"].as_f64().unwrap_or(f64::NAN),
            s["kld"].as_f64().unwrap_or(f64::NAN)
        )
    };
    let svg_name = "fig8.svg".to_string();
    fs::write(
        outdir.join(&svg_name),
        svg::line_plot(
            "ISE-consistent Williams vs Runnalls, 5 to 2 components",
            "x",
            &xs,
            &[
                ("original", &columns[0]),
                ("williams-ise", &columns[1]),
                ("runnalls", &columns[2]),
            ],
            &[note("williams-ise", &williams_scores), note("runnalls", &runnalls_scores)],
        ),
    )?;

    let manifest_name = "fig8_manifest.json".to_string();
    let files = vec![csv_name, svg_name, manifest_name.clone()];
    let manifest = json!({
        "case": "fig8",
        "inputs": { "weights": TEST_WEIGHTS, "means": TEST_MEANS, "variances": TEST_VARIANCES },
        "target": 2,
        "williams_ise": { "trace": rendered(&williams_trace), "scores": williams_scores },
        "runnalls": { "trace": rendered(&runnalls_trace), "scores": runnalls_scores },
        "files": files,
    });
    write_json(&outdir.join(&manifest_name), &manifest)?;
    Ok(files)
}
