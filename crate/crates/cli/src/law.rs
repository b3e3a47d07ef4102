//! Law documents: shorthand `gamma(2,1)`, inline JSON, a JSON file, or a
//! CSV table of `(x, density)` rows with signed `x`.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use levyfactor::catalogue::{get_law, law_info, LawSpec, ParamValue, Params};
use levyfactor::exponent::{exponent_from_triple, Triple};
use levyfactor::{LevyExponent, LogMoment, SpectralDensity};

/// Laws accepted only by the Monte Carlo check, with their parameter order.
const SIMULATION_ONLY: &[(&str, &[&str])] = &[("levy_area", &["u"])];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawDocument {
    pub law: String,
    #[serde(default)]
    pub params: Params,
    pub table: Option<TableSource>,
    /// Overrides the logarithmic-moment flag: "yes", "no" or "unknown".
    pub log_moment: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TableSource {
    Rows(Vec<[f64; 2]>),
    File(String),
}

pub enum Law {
    Catalogue(Box<LawSpec>),
    Table {
        exponent: LevyExponent,
        spectral: SpectralDensity,
    },
}

impl Law {
    pub fn name(&self) -> &str {
        match self {
            Law::Catalogue(spec) => &spec.name,
            Law::Table { .. } => "table",
        }
    }

    pub fn exponent(&self) -> &LevyExponent {
        match self {
            Law::Catalogue(spec) => &spec.exponent,
            Law::Table { exponent, .. } => exponent,
        }
    }

    pub fn spectral(&self) -> Option<&SpectralDensity> {
        match self {
            Law::Catalogue(spec) => spec.spectral.as_ref(),
            Law::Table { spectral, .. } => Some(spectral),
        }
    }
}

impl LawDocument {
    /// Parses a command-line law argument.
    pub fn parse(arg: &str) -> Result<Self> {
        let arg = arg.trim();
        if arg.starts_with('{') {
            return Self::from_json(arg, None);
        }
        let path = Path::new(arg);
        if path.is_file() {
            let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
            if arg.ends_with(".csv") {
                return Ok(LawDocument {
                    law: "table".into(),
                    params: Params::new(),
                    table: Some(TableSource::File(arg.into())),
                    log_moment: None,
                });
            }
            return Self::from_json(&text, path.parent());
        }
        shorthand(arg)
    }

    fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut doc: LawDocument = serde_json::from_str(text).context("malformed law document")?;
        if let (Some(TableSource::File(f)), Some(base)) = (&doc.table, base) {
            if Path::new(f).is_relative() {
                doc.table = Some(TableSource::File(base.join(f).to_string_lossy().into_owned()));
            }
        }
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        self.log_moment_override()?;
        match (self.law.as_str(), &self.table) {
            ("table", None) => bail!("law \"table\" needs a \"table\" entry"),
            ("table", Some(_)) if !self.params.is_empty() => bail!("a table law takes no params"),
            (name, Some(_)) if name != "table" => bail!("give either a named law or a table, not both"),
            _ => Ok(()),
        }
    }

    pub fn is_table(&self) -> bool {
        self.law == "table"
    }

    fn log_moment_override(&self) -> Result<Option<LogMoment>> {
        Ok(match self.log_moment.as_deref() {
            None => None,
            Some("yes") => Some(LogMoment::Yes),
            Some("no") => Some(LogMoment::No),
            Some("unknown") => Some(LogMoment::Unknown),
            Some(other) => bail!("log_moment must be yes, no or unknown, got `{other}`"),
        })
    }

    /// Builds the catalogue entry or the tabulated law.
    pub fn resolve(&self) -> Result<Law> {
        let flag = self.log_moment_override()?;
        let Some(table) = &self.table else {
            let mut spec = get_law(&self.law, &self.params)?;
            if let Some(flag) = flag {
                spec.exponent = spec.exponent.with_log_moment(flag);
                spec.log_moment = flag;
            }
            return Ok(Law::Catalogue(Box::new(spec)));
        };
        let rows = match table {
            TableSource::Rows(rows) => rows.clone(),
            TableSource::File(path) => read_table(path)?,
        };
        let (x, y): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|[x, y]| (x, y)).unzip();
        let spectral = SpectralDensity::from_signed_table(&x, &y)?;
        let exponent = exponent_from_triple(&Triple::new(0.0, 0.0, Some(spectral.clone())))?;
        // a table has bounded support, so every logarithmic moment is finite
        let exponent = exponent.with_log_moment(flag.unwrap_or(LogMoment::Yes));
        Ok(Law::Table { exponent, spectral })
    }
}

fn read_table(path: &str) -> Result<Vec<[f64; 2]>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening table {path}"))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{path}: row {}", i + 1))?;
        if record.len() != 2 {
            bail!("{path}: row {} has {} columns, expected x,density", i + 1, record.len());
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push([v[0], v[1]]),
            // a header line
            Err(_) if i == 0 => continue,
            Err(e) => bail!("{path}: row {}: {e}", i + 1),
        }
    }
    if rows.is_empty() {
        bail!("{path}: no rows");
    }
    Ok(rows)
}

fn param_order(name: &str) -> Result<Vec<String>> {
    if let Some((_, order)) = SIMULATION_ONLY.iter().find(|(n, _)| *n == name) {
        return Ok(order.iter().map(|s| s.to_string()).collect());
    }
    Ok(law_info(name)?.params.iter().map(|p| p.name.to_string()).collect())
}

/// `name`, `name(1.5, 2)` or `name(alpha=1.5, lambda=2)`.
fn shorthand(arg: &str) -> Result<LawDocument> {
    let (name, inner) = match arg.find('(') {
        Some(open) => {
            let body = arg[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| anyhow!("unbalanced parentheses in `{arg}`"))?;
            (arg[..open].trim(), Some(body))
        }
        None => (arg, None),
    };
    if name == "table" {
        let path = inner.ok_or_else(|| anyhow!("use table(path/to/file.csv)"))?;
        return Ok(LawDocument {
            law: "table".into(),
            params: Params::new(),
            table: Some(TableSource::File(path.trim().into())),
            log_moment: None,
        });
    }
    let order = param_order(name)?;
    let mut params = Params::new();
    let items: Vec<&str> = inner
        .map(|b| b.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
        .unwrap_or_default();
    let list_law = order.len() == 1 && name == "laplace_series";
    if list_law && !items.is_empty() {
        let values = items
            .iter()
            .map(|s| s.trim_start_matches("a=").parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("bad coefficient list in `{arg}`"))?;
        params.insert("a".into(), ParamValue::List(values));
    } else {
        if items.len() > order.len() {
            bail!(
                "`{name}` takes at most {} parameters ({})",
                order.len(),
                order.join(", ")
            );
        }
        for (i, item) in items.iter().enumerate() {
            let (key, value) = match item.split_once('=') {
                Some((k, v)) => (k.trim().to_string(), v.trim()),
                None => (order[i].clone(), *item),
            };
            let v: f64 = value
                .parse()
                .with_context(|| format!("bad number `{value}` in `{arg}`"))?;
            params.insert(key, ParamValue::Real(v));
        }
    }
    Ok(LawDocument {
        law: name.to_string(),
        params,
        table: None,
        log_moment: None,
    })
}
