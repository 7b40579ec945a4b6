//! Reading instances, allocations, prices and intensities from the command line.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::Args;
use endowed::instances::InstanceSpec;
use endowed::{Allocation, Instance, PriceVector, Rational};

use crate::CliError;

/// Where the instance comes from: a JSON file or a named generator.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Instance JSON file, or `-` for standard input.
    #[arg(long, short = 'i', value_name = "PATH", conflicts_with = "generator")]
    pub instance: Option<PathBuf>,

    /// Generator name instead of a file (see `endowed generate --help`).
    #[arg(long = "gen", short = 'g', value_name = "NAME")]
    pub generator: Option<String>,

    /// Generator parameter, repeatable.
    #[arg(long = "param", short = 'p', value_name = "KEY=VALUE", requires = "generator")]
    pub params: Vec<String>,

    /// Seed for random generators.
    #[arg(long, requires = "generator")]
    pub seed: Option<u64>,
}

impl Source {
    pub fn load(&self) -> Result<Instance, CliError> {
        match (&self.instance, &self.generator) {
            (Some(path), _) => parse_instance(&read_source(path)?),
            (None, Some(name)) => spec(name, &self.params, self.seed)?.resolve().map_err(CliError::from),
            (None, None) => Err(CliError::Input("no instance given: pass --instance PATH or --gen NAME".into())),
        }
    }
}

pub fn spec(name: &str, params: &[String], seed: Option<u64>) -> Result<InstanceSpec, CliError> {
    let mut spec = InstanceSpec::new(name);
    for raw in params {
        spec.push_param(raw)?;
    }
    spec.seed = seed;
    Ok(spec)
}

fn read_source(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed instance JSON: {e}")))
}

/// `@path` reads the value from a file; anything else is taken literally.
fn inline_or_file(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => read_source(Path::new(path)),
        None => Ok(raw.to_string()),
    }
}

/// JSON owner array (`[0,0,1,-1]`) or the same without brackets.
pub fn parse_allocation(raw: &str) -> Result<Allocation, CliError> {
    let text = inline_or_file(raw)?;
    let text = text.trim();
    let json = if text.starts_with('[') { text.to_string() } else { format!("[{text}]") };
    serde_json::from_str(&json).map_err(|e| CliError::Input(format!("malformed allocation {text:?}: {e}")))
}

/// JSON array of `"p/q"` strings, or a bare comma-separated list.
pub fn parse_prices(raw: &str) -> Result<PriceVector, CliError> {
    let text = inline_or_file(raw)?;
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed prices {text:?}: {e}")));
    }
    let prices = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PriceVector::new(prices)?)
}

pub fn parse_rational(raw: &str) -> Result<Rational, CliError> {
    Ok(raw.parse::<Rational>()?)
}

/// Allocation, prices and intensity bundled in one JSON file.
#[derive(serde::Deserialize)]
pub struct CertificateFile {
    pub allocation: Option<Allocation>,
    pub prices: Option<PriceVector>,
    pub alpha: Option<Rational>,
}

pub fn parse_certificate(path: &Path) -> Result<CertificateFile, CliError> {
    let text = read_source(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed certificate JSON: {e}")))
}
