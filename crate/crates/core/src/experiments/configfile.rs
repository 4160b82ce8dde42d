//! Flat key-value experiment configuration files.
//!
//! One `key = value` pair per line, `#` comments, blank lines ignored.
//! Documented keys:
//!
//! ```text
//! experiment = rate            # comma list of consistency|rate|gc|occupation
//! chain      = ar1             # rw | ar1 | lazy
//! sd         = 1.0             # increment sd (rw, ar1)
//! rho        = 0.5             # autoregression coefficient (ar1)
//! hold       = 0.5             # hold probability (lazy)
//! l          = 1.0             # slowly varying constant
//! x0         = 0.0             # window center
//! delta      = 0.5             # window half-width
//! link       = neg_arctan      # neg_identity | neg_arctan | exp_decay
//! sigma      = 1.0             # noise standard deviation
//! n_grid     = 1024,2048,4096  # strictly increasing sample sizes
//! reps       = 200             # replications per sample size
//! seed       = 7               # base seed
//! out        = report          # output file stem
//! format     = both            # csv | json | both
//! ```

use std::collections::BTreeMap;

use super::report::ExperimentKind;
use super::{ExperimentError, LinkFn, ScenarioConfig};
use crate::chains::ChainSpec;
use crate::window::Window;

/// Which report files to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

/// A parsed experiment configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFile {
    pub experiments: Vec<ExperimentKind>,
    pub scenario: ScenarioConfig,
    pub out_stem: String,
    pub format: OutputFormat,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "chain",
    "sd",
    "rho",
    "hold",
    "l",
    "x0",
    "delta",
    "link",
    "sigma",
    "n_grid",
    "reps",
    "seed",
    "out",
    "format",
];

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

fn parse_field<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ExperimentError>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| bad(format!("key '{key}': {e}"))),
    }
}

/// Parse a configuration file body.
pub fn parse_config_str(text: &str) -> Result<ExperimentFile, ExperimentError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(bad(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(bad(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
    }

    let experiments: Vec<ExperimentKind> = map
        .get("experiment")
        .ok_or_else(|| bad("missing key 'experiment'"))?
        .split(',')
        .map(|name| {
            let name = name.trim();
            ExperimentKind::from_name(name)
                .ok_or_else(|| bad(format!("unknown experiment '{name}'")))
        })
        .collect::<Result<_, _>>()?;
    if experiments.is_empty() {
        return Err(bad("key 'experiment' names no experiments"));
    }

    let sd = parse_field(&map, "sd")?.unwrap_or(1.0);
    let rho = parse_field(&map, "rho")?.unwrap_or(0.5);
    let hold = parse_field(&map, "hold")?.unwrap_or(0.5);
    let l: f64 = parse_field(&map, "l")?.unwrap_or(1.0);
    let chain = match map
        .get("chain")
        .ok_or_else(|| bad("missing key 'chain'"))?
        .as_str()
    {
        "rw" => ChainSpec::gaussian_random_walk(sd)?,
        "ar1" => ChainSpec::ar1(rho, sd)?,
        "lazy" => ChainSpec::lazy_srw(hold)?,
        other => return Err(bad(format!("unknown chain '{other}'"))),
    }
    .with_slowly_varying(l)?;

    let x0 = parse_field(&map, "x0")?.unwrap_or(0.0);
    let delta = parse_field(&map, "delta")?.unwrap_or(0.5);
    let window = Window::new(x0, delta).map_err(|e| bad(e.to_string()))?;

    let link_name = map.get("link").map(String::as_str).unwrap_or("neg_arctan");
    let link =
        LinkFn::from_name(link_name).ok_or_else(|| bad(format!("unknown link '{link_name}'")))?;

    let n_grid: Vec<usize> = map
        .get("n_grid")
        .ok_or_else(|| bad("missing key 'n_grid'"))?
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|e| bad(format!("n_grid entry '{}': {e}", tok.trim())))
        })
        .collect::<Result<_, _>>()?;

    let scenario = ScenarioConfig {
        chain,
        window,
        link,
        noise_sd: parse_field(&map, "sigma")?.unwrap_or(1.0),
        n_grid,
        reps: parse_field(&map, "reps")?.ok_or_else(|| bad("missing key 'reps'"))?,
        seed: parse_field(&map, "seed")?.unwrap_or(0),
    };
    scenario.validate()?;

    let format = match map.get("format").map(String::as_str).unwrap_or("both") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        "both" => OutputFormat::Both,
        other => return Err(bad(format!("unknown format '{other}'"))),
    };

    Ok(ExperimentFile {
        experiments,
        scenario,
        out_stem: map.get("out").cloned().unwrap_or_else(|| "report".into()),
        format,
    })
}
