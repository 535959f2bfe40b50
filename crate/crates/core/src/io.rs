//! JSON files for mixtures and reduction traces.
//!
//! Mixture file: `{"d": 2, "weights": [..], "components": [{"mean": [..],
//! "cov": [[..], ..]}, ..]}` with covariances as row-major nested arrays
//! (1×1 in one dimension). Numbers are written with 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{GmrError, Result};
use crate::mixture::GaussianMixture;

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
struct MixtureFile {
    d: usize,
    weights: Vec<f64>,
    components: Vec<ComponentFile>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
struct ComponentFile {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl From<&GaussianMixture> for MixtureFile {
    fn from(gm: &GaussianMixture) -> Self {
        let d = gm.dim();
        Self {
            d,
            weights: gm.weights().to_vec(),
            components: gm
                .components()
                .iter()
                .map(|c| ComponentFile {
                    mean: c.mean().iter().copied().collect(),
                    cov: (0..d)
                        .map(|r| (0..d).map(|k| c.cov()[(r, k)]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

impl MixtureFile {
    fn into_mixture(self) -> Result<GaussianMixture> {
        let d = self.d;
        if d == 0 {
            return Err(GmrError::ZeroDimension);
        }
        let params = self
            .components
            .into_iter()
            .map(|c| {
                if c.mean.len() != d {
                    return Err(GmrError::DimensionMismatch {
                        expected: d,
                        found: c.mean.len(),
                    });
                }
                let rows = c.cov.len();
                if rows != d || c.cov.iter().any(|row| row.len() != d) {
                    let cols = c.cov.iter().map(Vec::len).find(|&n| n != d).unwrap_or(d);
                    return Err(GmrError::NonSquareCovariance { rows, cols });
                }
                let cov = DMatrix::from_fn(d, d, |r, k| c.cov[r][k]);
                Ok((DVector::from_vec(c.mean), cov))
            })
            .collect::<Result<Vec<_>>>()?;
        GaussianMixture::from_parameters(self.weights, params)
    }
}

/// Parses and validates a mixture file.
pub fn mixture_from_json(text: &str) -> Result<GaussianMixture> {
    serde_json::from_str::<MixtureFile>(text)?.into_mixture()
}

pub fn mixture_to_json(gm: &GaussianMixture) -> String {
    to_json(&MixtureFile::from(gm)).expect("mixture parameters are finite")
}

pub fn load_mixture(path: impl AsRef<Path>) -> Result<GaussianMixture> {
    mixture_from_json(&fs::read_to_string(path)?)
}

pub fn save_mixture(path: impl AsRef<Path>, gm: &GaussianMixture) -> Result<()> {
    fs::write(path, mixture_to_json(gm))?;
    Ok(())
}

/// Pretty-printed JSON with 17 significant digits per number and a trailing
/// newline. Non-finite numbers are written as `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// `%.17g`-style rendering: positional for exponents in `[-5, 17)`,
/// scientific otherwise, trailing zeros removed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Default)]
struct Digits17 {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}
