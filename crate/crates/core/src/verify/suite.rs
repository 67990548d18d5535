use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::chain::{chain_grid, verify_chain, ChainReport};
use super::constants::{estimate_reduction_constants, ConstantsReport};
use super::ensemble::{digest_text, EnsembleSpec};
use super::properties::*;
use crate::error::{Error, Result};
use crate::funcrep::io::parse_index_spec;
use crate::funcrep::IndexFunction;
use crate::level::{certify_essential_decrease, PhiQuery};
use crate::norms::NormSpec;

pub const DEFAULT_CONFIG: &str = include_str!("../../config/default-suite.toml");

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub hardy_littlewood: usize,
    pub associativity: usize,
    pub dominance: usize,
    /// Instances per order m ∈ {1, 2, 3}.
    pub doubling: usize,
    pub decomposition: usize,
    pub down_norm: usize,
    pub left_continuity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEntry {
    pub index: String,
    pub orders: Vec<u32>,
    pub exponents: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsEntry {
    pub index: String,
    pub order: u32,
    pub x: String,
    pub y: String,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub chain_grid: usize,
    pub max_skip_fraction: f64,
    pub ensemble: EnsembleSpec,
    pub checks: ChecksConfig,
    pub chain: Vec<ChainEntry>,
    pub constants: Vec<ConstantsEntry>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            tolerance: 5e-3,
            chain_grid: 4096,
            max_skip_fraction: 0.2,
            ensemble: EnsembleSpec::default(),
            checks: ChecksConfig::default(),
            chain: vec![],
            constants: vec![],
        }
    }
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<SuiteConfig> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("suite config: {e}")))
    }

    fn resolve_index(spec: &str, base: &Path) -> Result<IndexFunction> {
        match spec.strip_prefix("step:") {
            Some(p) if Path::new(p).is_relative() => parse_index_spec(&format!("step:{}", base.join(p).display())),
            _ => parse_index_spec(spec),
        }
    }

    /// Parses every index and rejects (I, m) pairs without an essential-decrease certificate.
    pub fn validate(&self, base: &Path) -> Result<()> {
        self.ensemble.validate()?;
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) || self.chain_grid < 2 {
            return Err(Error::InvalidArgument("tolerance must lie in (0, 1) and chain_grid ≥ 2".into()));
        }
        let pairs = self
            .chain
            .iter()
            .flat_map(|c| c.orders.iter().map(move |&m| (&c.index, m)))
            .chain(self.constants.iter().map(|c| (&c.index, c.order)));
        for (spec, m) in pairs {
            let idx = Self::resolve_index(spec, base)?;
            certify_essential_decrease(&PhiQuery::new(idx, m)?, 1.0)
                .map_err(|e| Error::NoCertificate(format!("configuration rejected for {spec} with m = {m}: {e}")))?;
        }
        for c in &self.chain {
            for &p in &c.exponents {
                NormSpec::lp(p)?;
            }
        }
        for c in &self.constants {
            c.x.parse::<NormSpec>()?;
            c.y.parse::<NormSpec>()?;
        }
        Ok(())
    }
}

/// One line of the suite report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub inputs_digest: String,
    pub values: BTreeMap<String, f64>,
    pub slacks: BTreeMap<String, f64>,
    pub pass: bool,
    pub skipped: Option<String>,
    pub detail: Option<String>,
}

/// Non-finite numbers are written as strings so the report stays valid JSON.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn map(m: &BTreeMap<String, f64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
}

impl CheckRecord {
    fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "inputs_digest": self.inputs_digest,
            "values": map(&self.values),
            "slacks": map(&self.slacks),
            "pass": self.pass,
            "skipped": self.skipped,
            "detail": self.detail,
        })
    }

    fn from_property(s: PropertySummary, seed: u64) -> CheckRecord {
        let mut values = s.values;
        values.insert("instances".into(), s.instances as f64);
        values.insert("failures".into(), s.failures as f64);
        values.insert("skipped".into(), s.skipped as f64);
        CheckRecord {
            inputs_digest: digest_text(&format!("{}:{seed}:{}", s.id, s.instances)),
            id: s.id,
            values,
            slacks: BTreeMap::new(),
            pass: s.pass,
            skipped: None,
            detail: s.detail,
        }
    }

    fn from_chain(r: &ChainReport) -> CheckRecord {
        let values = BTreeMap::from([
            ("down".into(), r.down),
            ("assoc".into(), r.assoc),
            ("assoc_g".into(), r.assoc_g),
            ("factor".into(), r.factor),
            ("ratio".into(), r.ratio),
            ("plateaus".into(), r.plateaus as f64),
        ]);
        let slacks = BTreeMap::from([
            ("down_le_assoc".into(), r.slacks[0]),
            ("assoc_le_assoc_g".into(), r.slacks[1]),
            ("assoc_g_le_factor_down".into(), r.slacks[2]),
        ]);
        CheckRecord {
            id: format!("chain[{} m={} p={}]", r.index, r.order, r.p),
            inputs_digest: digest_text(&format!("{}|{}|{}|{}", r.index, r.order, r.p, r.f_digest)),
            values,
            slacks,
            pass: r.pass || r.skipped.is_some(),
            skipped: r.skipped.clone(),
            detail: None,
        }
    }

    fn from_constants(r: &ConstantsReport) -> CheckRecord {
        let values = BTreeMap::from([
            ("c_emp".into(), r.c_emp),
            ("cprime_emp".into(), r.cprime_emp),
            ("ratio".into(), r.ratio),
            ("bound".into(), r.bound),
            ("samples".into(), r.samples as f64),
            ("skipped".into(), r.skipped as f64),
            ("inconsistent".into(), r.inconsistent as f64),
            ("identity_max_err".into(), r.identity_max_err),
        ]);
        let slack = if r.degenerate { 0.0 } else { 1.0 - r.c_emp / (r.bound * r.cprime_emp) };
        CheckRecord {
            id: format!("constants[{} m={} X={} Y={}]", r.index, r.order, r.x, r.y),
            inputs_digest: r.ensemble_digest.clone(),
            values,
            slacks: BTreeMap::from([("c_le_bound_cprime".into(), slack)]),
            pass: r.pass,
            skipped: None,
            detail: r.degenerate.then(|| "every sample has an infinite Y-norm, together with its rearrangement".to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub config_digest: String,
    pub records: Vec<CheckRecord>,
    pub warnings: Vec<String>,
    pub skipped: usize,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "config_digest": self.config_digest,
            "pass": self.pass,
            "checks": self.records.len(),
            "failures": self.failures(),
            "skipped": self.skipped,
            "warnings": self.warnings,
            "records": self.records.iter().map(CheckRecord::to_json).collect::<Vec<_>>(),
        });
        super::json::to_json(&v)
    }
}

/// Reads a TOML config and runs it; relative `step:` paths resolve against the config's directory.
pub fn run_suite(path: &Path) -> Result<SuiteReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let cfg = SuiteConfig::parse(&text)?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_suite_config(&cfg, &base)
}

pub fn run_suite_config(cfg: &SuiteConfig, base: &Path) -> Result<SuiteReport> {
    cfg.validate(base)?;
    let seed = cfg.seed;
    let c = &cfg.checks;
    let mut records = Vec::new();
    let mut props = Vec::new();
    if c.hardy_littlewood > 0 {
        props.push(hardy_littlewood_property(seed, c.hardy_littlewood));
    }
    if c.associativity > 0 {
        props.push(associativity_property(seed, c.associativity));
    }
    if c.dominance > 0 {
        props.push(dominance_property(seed, c.dominance));
    }
    if c.doubling > 0 {
        for m in 1..=3 {
            props.push(doubling_property(seed, m, c.doubling));
        }
    }
    if c.decomposition > 0 {
        props.push(decomposition_property(seed, c.decomposition));
    }
    if c.down_norm > 0 {
        props.extend(down_norm_property(seed, c.down_norm));
    }
    if c.left_continuity > 0 {
        props.push(left_continuity_property(seed, c.left_continuity));
    }
    records.extend(props.into_iter().map(|s| CheckRecord::from_property(s, seed)));

    let ens = EnsembleSpec { seed, ..cfg.ensemble.clone() };
    let (mut chains, mut skipped) = (0usize, 0usize);
    for entry in &cfg.chain {
        let idx = SuiteConfig::resolve_index(&entry.index, base)?;
        let e = EnsembleSpec { count: entry.samples, ..ens.clone() };
        for &m in &entry.orders {
            for &p in &entry.exponents {
                for f in e.samples() {
                    let grid = chain_grid(&f, &idx, cfg.chain_grid)?;
                    let r = verify_chain(&idx, m, p, &f, &grid, cfg.tolerance)?;
                    chains += 1;
                    skipped += r.is_skipped() as usize;
                    records.push(CheckRecord::from_chain(&r));
                }
            }
        }
    }
    for entry in &cfg.constants {
        let idx = SuiteConfig::resolve_index(&entry.index, base)?;
        let e = EnsembleSpec { count: entry.samples, ..ens.clone() };
        let r = estimate_reduction_constants(&e, &idx, entry.order, entry.x.parse()?, entry.y.parse()?, cfg.tolerance)?;
        records.push(CheckRecord::from_constants(&r));
    }

    let mut warnings = Vec::new();
    let mut pass = records.iter().all(|r| r.pass);
    if chains > 0 && skipped as f64 > cfg.max_skip_fraction * chains as f64 {
        warnings.push(format!(
            "configuration warning: {skipped} of {chains} chain samples skipped (limit {:.0}%)",
            100.0 * cfg.max_skip_fraction
        ));
        pass = false;
    }
    let cfg_text = toml::to_string(cfg).unwrap_or_default();
    Ok(SuiteReport { config_digest: digest_text(&cfg_text), records, warnings, skipped, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_passes() {
        let cfg = SuiteConfig::parse("").unwrap();
        let r = run_suite_config(&cfg, Path::new(".")).unwrap();
        assert!(r.pass && r.records.is_empty());
        assert!(r.to_json().contains("\"records\": []"));
    }

    #[test]
    fn default_config_validates() {
        let cfg = SuiteConfig::parse(DEFAULT_CONFIG).unwrap();
        cfg.validate(Path::new(".")).unwrap();
        assert_eq!(cfg.checks.hardy_littlewood, 1000);
        assert_eq!(cfg.chain_grid, 4096);
    }

    #[test]
    fn uncertified_pair_is_rejected() {
        let cfg = SuiteConfig::parse("[[chain]]\nindex = \"power:c=1,alpha=0\"\norders = [2]\nexponents = [2]\n").unwrap();
        match run_suite_config(&cfg, Path::new(".")) {
            Err(Error::NoCertificate(msg)) => assert!(msg.contains("alpha=0") && msg.contains("m = 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(SuiteConfig::parse("bogus = 1").is_err());
    }

    #[test]
    fn small_run_is_deterministic_and_counts_skips() {
        let text = r#"
            chain_grid = 256
            [checks]
            hardy_littlewood = 10
            [[chain]]
            index = "power:c=1,alpha=2"
            orders = [1]
            exponents = [2]
            samples = 2
        "#;
        let cfg = SuiteConfig::parse(text).unwrap();
        let a = run_suite_config(&cfg, Path::new(".")).unwrap();
        let b = run_suite_config(&cfg, Path::new(".")).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.skipped, 2);
        assert!(!a.pass && a.warnings[0].starts_with("configuration warning"));
        assert!(a.to_json().contains("\"inf\""));
    }
}
