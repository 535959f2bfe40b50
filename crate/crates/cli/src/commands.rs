use gmr_core::descent::DescentConfig;
use gmr_core::dissim::{kld_gaussians, kld_gm_numeric, KldMethod};
use gmr_core::io::{format_g17, save_mixture};
use gmr_core::reduce::MergeMethod;
use gmr_core::{
    bsga as fit_bsga, ise, nise, refine as refine_mixture, runnalls_reduce, williams_reduce,
    BsgaOptions, GaussianMixture, Measure, QuadratureConfig, ReductionTrace, SubMixture,
};
use serde_json::json;

use crate::error::{CliError, DIMENSION_MISMATCH, NOT_CONVERGED};
use crate::output::{gaussian_json, json_text, load};
use crate::{BsgaArgs, DissimArgs, Pipeline, ReduceArgs, RefineArgs};

fn same_dim(f: &GaussianMixture, g: &GaussianMixture) -> Result<(), CliError> {
    if f.dim() != g.dim() {
        return Err(CliError::new(
            DIMENSION_MISMATCH,
            format!("dimension mismatch: {} vs {}", f.dim(), g.dim()),
        ));
    }
    Ok(())
}

pub fn dissim(a: &DissimArgs) -> Result<(), CliError> {
    let f = load(&a.f)?;
    let g = load(&a.g)?;
    same_dim(&f, &g)?;
    let measure = Measure::from(a.measure);
    let report = match measure {
        Measure::Ise => json!({ "measure": "ise", "value": ise(&f, &g)?, "method": "closed-form" }),
        Measure::Nise => json!({ "measure": "nise", "value": nise(&f, &g)?, "method": "closed-form" }),
        Measure::Kld if a.closed_form => {
            if f.size() != 1 || g.size() != 1 {
                return Err(CliError::invalid(
                    "--closed-form KLD needs single-Gaussian inputs",
                ));
            }
            let value = kld_gaussians(f.component(0), g.component(0))?;
            json!({ "measure": "kld", "value": value, "method": "closed-form" })
        }
        Measure::Kld => {
            let cfg = QuadratureConfig {
                abs_tol: a.abs_tol,
                mc_samples: a.mc_samples,
                seed: a.seed,
                ..Default::default()
            };
            let est = kld_gm_numeric(&f, &g, &cfg)?;
            let method = match est.method {
                KldMethod::Quadrature => "quadrature",
                KldMethod::MonteCarlo => "monte-carlo",
            };
            json!({ "measure": "kld", "value": est.value, "error": est.error, "method": method })
        }
    };
    print!("{}", json_text(&report));
    Ok(())
}

fn print_trace(trace: &ReductionTrace, start_size: usize) {
    let mut size = start_size;
    for (k, step) in trace.steps.iter().enumerate() {
        println!(
            "step {}: {} ({} -> {} components), cost {}",
            k + 1,
            step.describe(),
            size,
            size - 1,
            format_g17(step.cost())
        );
        size -= 1;
    }
}

pub fn reduce(a: &ReduceArgs) -> Result<(), CliError> {
    let original = load(&a.input)?;
    let (reduced, trace) = match a.pipeline {
        Pipeline::Williams => williams_reduce(&original, a.target, &MergeMethod::KldBarycenter)?,
        Pipeline::WilliamsIse => williams_reduce(&original, a.target, &MergeMethod::bsga(Measure::Ise))?,
        Pipeline::Runnalls => runnalls_reduce(&original, a.target)?,
    };
    print_trace(&trace, original.size());
    println!("final ISE: {}", format_g17(ise(&original, &reduced)?));
    println!("final NISE: {}", format_g17(nise(&original, &reduced)?));
    if a.kld {
        let est = kld_gm_numeric(&original, &reduced, &QuadratureConfig::default())?;
        println!(
            "final KLD: {} (error {})",
            format_g17(est.value),
            format_g17(est.error)
        );
    }
    if let Some(path) = &a.out {
        save_mixture(path, &reduced)?;
    }
    if let Some(path) = &a.trace {
        std::fs::write(path, gmr_core::io::to_json(&trace.record())?)?;
    }
    Ok(())
}

pub fn bsga(a: &BsgaArgs) -> Result<(), CliError> {
    let gm = load(&a.input)?;
    let init = if a.init == "kld" {
        None
    } else {
        let path = std::path::Path::new(&a.init);
        let file = load(path)?;
        same_dim(&gm, &file)?;
        if file.size() != 1 {
            return Err(CliError::invalid(format!(
                "{}: --init needs a single-Gaussian file",
                path.display()
            )));
        }
        Some(file.component(0).clone())
    };
    let measure = Measure::from(a.measure);
    let opts = BsgaOptions {
        multistart: a.multistart,
        init,
        ..Default::default()
    };
    let fit = fit_bsga(&SubMixture::whole(&gm), measure, &opts)?;
    let mut report = gaussian_json(&fit.gaussian);
    report["measure"] = json!(measure.name());
    report["objective"] = json!(fit.objective);
    report["iterations"] = json!(fit.iterations);
    report["converged"] = json!(fit.converged);
    report["initial"] = gaussian_json(&fit.initial);
    print!("{}", json_text(&report));
    if a.strict && !fit.converged {
        return Err(CliError::new(NOT_CONVERGED, "descent did not converge"));
    }
    Ok(())
}

pub fn refine(a: &RefineArgs) -> Result<(), CliError> {
    let original = load(&a.original)?;
    let start = load(&a.start)?;
    same_dim(&original, &start)?;
    let r = refine_mixture(&original, &start, a.measure.into(), &DescentConfig::default())?;
    if let Some(path) = &a.out {
        save_mixture(path, &r.mixture)?;
    }
    let report = json!({
        "measure": Measure::from(a.measure).name(),
        "initial_cost": r.initial_cost,
        "final_cost": r.final_cost,
        "iterations": r.iterations,
        "converged": r.converged,
        "size": r.mixture.size(),
    });
    print!("{}", json_text(&report));
    if a.strict && !r.converged {
        return Err(CliError::new(NOT_CONVERGED, "refinement did not converge"));
    }
    Ok(())
}
