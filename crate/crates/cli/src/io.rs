//! Input files and output sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bilgamma::finance::PricingInputs;
use bilgamma::{BgParams, GammaSumModel, LinearCombinationModel, QuadratureSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A model file: bilateral components or a gamma-driven sum.
#[derive(Debug, Clone)]
pub enum Model {
    Bilateral(LinearCombinationModel),
    GammaDriven(GammaSumModel),
}

impl Model {
    pub fn bilateral(&self, what: &str) -> CliResult<&LinearCombinationModel> {
        match self {
            Model::Bilateral(m) => Ok(m),
            Model::GammaDriven(_) => Err(CliError::Config(format!("{what} needs a bilateral model (`components`)"))),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Loads `{"components": [...]}` or `{"terms": [...]}`; every parameter is validated.
pub fn load_model(path: &Path) -> CliResult<Model> {
    let text = read(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    let has = |key: &str| value.get(key).is_some();
    if has("components") {
        Ok(Model::Bilateral(parse(path, &text)?))
    } else if has("terms") {
        Ok(Model::GammaDriven(parse(path, &text)?))
    } else {
        Err(CliError::Config(format!(
            "{}: a model file needs a `components` or a `terms` array",
            path.display()
        )))
    }
}

/// Loads a bilateral gamma target `{"alpha", "p", "beta", "q"}`.
pub fn load_target(path: &Path) -> CliResult<BgParams> {
    parse(path, &read(path)?)
}

/// Pricing request: the fields of [`PricingInputs`], an optional model path
/// (relative to the request file) and optional quadrature tolerances.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingFile {
    pub s0: f64,
    pub strike: f64,
    pub rate: f64,
    #[serde(default)]
    pub dividend: f64,
    #[serde(default)]
    pub t_now: f64,
    pub maturity: f64,
    #[serde(default)]
    pub spot_at_t: Option<f64>,
    #[serde(default)]
    pub discount_horizon: Option<f64>,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Option<QuadratureSpec>,
}

/// A validated pricing request.
#[derive(Debug, Clone)]
pub struct PricingRequest {
    pub inputs: PricingInputs,
    pub model: Option<PathBuf>,
    pub tolerances: Option<QuadratureSpec>,
}

pub fn load_pricing(path: &Path) -> CliResult<PricingRequest> {
    let f: PricingFile = parse(path, &read(path)?)?;
    let inputs = PricingInputs {
        s0: f.s0,
        strike: f.strike,
        rate: f.rate,
        dividend: f.dividend,
        t_now: f.t_now,
        maturity: f.maturity,
        spot_at_t: f.spot_at_t,
        discount_horizon: f.discount_horizon,
    };
    inputs
        .validate()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(spec) = &f.tolerances {
        spec.validate()
            .map_err(|e| CliError::Config(format!("{}: tolerances: {e}", path.display())))?;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(PricingRequest {
        inputs,
        model: f.model.map(|m| if m.is_absolute() { m } else { base.join(m) }),
        tolerances: f.tolerances,
    })
}

/// A file if a path is given, standard output otherwise.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Config(format!("writing JSON: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// CSV with a header row; `None` cells are left empty.
pub fn write_csv(path: Option<&Path>, header: &[String], rows: &[Vec<Option<f64>>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_both_model_forms() {
        let b = file(r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "q": 1, "w1": 1, "w2": 1}]}"#);
        assert!(matches!(load_model(b.path()).unwrap(), Model::Bilateral(_)));
        let g = file(r#"{"terms": [{"alpha": 4, "p": 1.5, "w": 1}]}"#);
        assert!(matches!(load_model(g.path()).unwrap(), Model::GammaDriven(_)));
        let neither = file(r#"{"parts": []}"#);
        assert!(matches!(load_model(neither.path()), Err(CliError::Config(_))));
    }

    #[test]
    fn malformed_model_names_the_field() {
        let f = file(r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "q": 1, "w1": 1, "w2": 0}]}"#);
        let msg = load_model(f.path()).unwrap_err().to_string();
        assert!(msg.contains("`w2`"), "{msg}");
        let missing = file(r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "w1": 1, "w2": 1}]}"#);
        let msg = load_model(missing.path()).unwrap_err().to_string();
        assert!(msg.contains("`q`"), "{msg}");
    }

    #[test]
    fn pricing_file_resolves_the_model_path_and_validates() {
        let f = file(r#"{"s0": 1, "strike": 1.1, "rate": 0.02, "maturity": 1, "model": "m.json"}"#);
        let req = load_pricing(f.path()).unwrap();
        assert_eq!(req.model.unwrap(), f.path().parent().unwrap().join("m.json"));
        assert_eq!(req.inputs.spot(), 1.0);
        let bad = file(r#"{"s0": 1, "strike": 1.1, "rate": 0.01, "dividend": 0.02, "maturity": 1}"#);
        assert!(matches!(load_pricing(bad.path()), Err(CliError::Config(_))));
        let typo = file(r#"{"s0": 1, "strke": 1.1, "rate": 0.01, "maturity": 1}"#);
        assert!(load_pricing(typo.path()).unwrap_err().to_string().contains("strke"));
    }
}
