//! Flag/file configuration merge and resolution of operators and initial
//! conditions. Config files are flat TOML key-value files mirroring the
//! CLI flags 1:1; explicit flags win on conflict.

use anyhow::{anyhow, bail, Context, Result};
use epdiff_core::operators::{InertiaOperator, MultiplierSymbol};
use epdiff_core::solver::InitialCondition;
use epdiff_core::Error;
use num_complex::Complex64;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Union of config-file keys; each subcommand reads the ones it knows.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub operator: Option<String>,
    pub s: Option<f64>,
    pub order: Option<f64>,
    pub n: Option<usize>,
    pub cfl: Option<f64>,
    pub dt_max: Option<f64>,
    pub dt: Option<f64>,
    pub t: Option<f64>,
    pub u0: Option<String>,
    pub output: Option<PathBuf>,
    pub snapshot_every: Option<usize>,
    pub allow_degenerate: Option<bool>,
    pub no_probes: Option<bool>,
    pub fields: Option<usize>,
    pub adversarial: Option<bool>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub steps: Option<usize>,
    pub depth: Option<usize>,
    pub k: Option<usize>,
}

pub fn load_file(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config file {}", p.display()))
        }
    }
}

/// Resolve an operator name (catalogue entry, `sobolev` with `--s`, or a
/// CSV path of tabulated `k,a(k)` pairs) into a symbol.
pub fn resolve_symbol(name: &str, s: Option<f64>, order: Option<f64>) -> Result<MultiplierSymbol> {
    if name == "sobolev" {
        return Ok(MultiplierSymbol::sobolev(s.unwrap_or(3.0)));
    }
    if let Some(sym) = MultiplierSymbol::builtin(name) {
        return Ok(sym);
    }
    let path = Path::new(name);
    if path.exists() {
        let pairs = read_symbol_table(path)?;
        return Ok(MultiplierSymbol::from_table(
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "table".into()),
            &pairs,
            order,
        )?);
    }
    bail!(
        "unknown operator '{name}' (catalogue: burgers, camassa_holm, mclm, \
         weil_petersson, one_minus_HD3, sobolev_32, sobolev with --s, or a CSV path)"
    )
}

fn read_symbol_table(path: &Path) -> Result<Vec<(i64, f64)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading symbol table {}", path.display()))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(kc), Some(ac)) = (cols.next(), cols.next()) else {
            bail!("{}:{}: expected 'k,a(k)'", path.display(), lineno + 1);
        };
        let Ok(k) = kc.parse::<i64>() else {
            // tolerate a header row
            if lineno == 0 {
                continue;
            }
            bail!("{}:{}: bad frequency '{kc}'", path.display(), lineno + 1);
        };
        let a: f64 = ac
            .parse()
            .with_context(|| format!("{}:{}: bad value '{ac}'", path.display(), lineno + 1))?;
        pairs.push((k, a));
    }
    Ok(pairs)
}

/// Build the operator, certifying when possible. Degenerate symbols need
/// the explicit opt-in and get the projected quotient inverse.
pub fn build_operator(
    symbol: MultiplierSymbol,
    bandwidth: usize,
    allow_degenerate: bool,
) -> Result<InertiaOperator> {
    match InertiaOperator::certified(symbol.clone(), bandwidth) {
        Ok(op) => Ok(op),
        Err(_) => match InertiaOperator::positive(symbol.clone(), bandwidth) {
            Ok(op) => Ok(op),
            Err(Error::Degenerate { name, k }) if allow_degenerate => {
                let op = InertiaOperator::degenerate_projected(symbol, bandwidth)?;
                eprintln!(
                    "note: operator '{name}' is degenerate (a({k}) = 0); \
                     running the projected quotient flow on kernel complement {:?}",
                    op.kernel()
                );
                Ok(op)
            }
            Err(Error::Degenerate { name, k }) => Err(anyhow!(
                "operator '{name}' is degenerate: a({k}) = 0; \
                 pass --allow-degenerate to run the projected quotient flow"
            )),
            Err(e) => Err(e.into()),
        },
    }
}

/// Parse an initial-condition spec: `sin`, `minus_sin`, `random:p:seed`,
/// or a path to a JSON coefficient dump (the snapshot schema).
pub fn parse_initial(spec: &str) -> Result<InitialCondition> {
    match spec {
        "sin" => Ok(InitialCondition::Sin),
        "minus_sin" => Ok(InitialCondition::MinusSin),
        s if s.starts_with("random:") => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                bail!("random initial condition must be 'random:p:seed', got '{s}'");
            }
            let p: f64 = parts[1].parse().context("decay exponent p")?;
            let seed: u64 = parts[2].parse().context("seed")?;
            Ok(InitialCondition::Random { p, seed })
        }
        path if Path::new(path).exists() => {
            #[derive(Deserialize)]
            struct Dump {
                #[allow(dead_code)]
                #[serde(default)]
                t: f64,
                #[allow(dead_code)]
                bandwidth: usize,
                coeffs: Vec<[f64; 2]>,
            }
            let text = std::fs::read_to_string(path)?;
            let dump: Dump =
                serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
            let coeffs: Vec<Complex64> = dump
                .coeffs
                .iter()
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            Ok(InitialCondition::Coefficients(coeffs))
        }
        other => bail!(
            "unknown initial condition '{other}' (sin, minus_sin, random:p:seed, or a JSON file)"
        ),
    }
}
