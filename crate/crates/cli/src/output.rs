use std::fs;
use std::path::Path;

use gmr_core::io::{format_g17, load_mixture, to_json};
use gmr_core::{Gaussian, GaussianMixture};
use nalgebra::DVector;
use serde_json::{json, Value};

use crate::error::CliError;

pub fn load(path: &Path) -> Result<GaussianMixture, CliError> {
    load_mixture(path).map_err(|e| CliError::input(path, e))
}

pub fn json_text(value: &Value) -> String {
    to_json(value).expect("JSON values serialize")
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    fs::write(path, json_text(value))?;
    Ok(())
}

pub fn gaussian_json(g: &Gaussian) -> Value {
    let d = g.dim();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..d).map(|c| g.cov()[(r, c)]).collect())
        .collect();
    json!({ "mean": g.mean().as_slice(), "cov": cov })
}

/// Writes equally long columns under `headers`, numbers at 17 digits.
pub fn write_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(headers)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| format_g17(c[r])))?;
    }
    w.flush()?;
    Ok(())
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

pub fn density(gm: &GaussianMixture, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| gm.pdf(&DVector::from_element(1, x)).expect("1-d mixture"))
        .collect()
}
