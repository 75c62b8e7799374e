//! Run configuration: the TOML file schema, command-line overrides, and the
//! provenance hash identifying an effective parameterization.
//!
//! Overrides are dotted `key=value` pairs merged into the parsed TOML before
//! deserialization, so they accept the same syntax as the file, including
//! arrays. Unknown keys are rejected.
//!
//! The provenance hash digests the effective parameters together with the
//! content (not the paths) of the referenced data files: two configs hash
//! equal exactly when every number and every input byte agrees.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::climate::{ClimateInit, ClimateParams};
use crate::error::{EngineError, Result};
use crate::impact::{BmaImpact, ImpactSelection};
use crate::liability::DebtSettings;
use crate::scc::SccSettings;
use crate::scenario::{load_scenario, sidecar_path, Scenario};

/// Grid expansion mode for sensitivity runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GridMode {
    /// Vary one axis at a time around the default point.
    #[default]
    #[serde(rename = "one-at-a-time")]
    OneAtATime,
    /// Full cross product of all axis values.
    #[serde(rename = "cartesian")]
    Cartesian,
}

/// Sensitivity axes, each an explicit value list. Empty lists mean the axis
/// is not varied.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub mode: GridMode,
    pub scenario: Vec<PathBuf>,
    pub convergence: Vec<bool>,
    pub prtp: Vec<f64>,
    pub emuc: Vec<f64>,
    pub income_elasticity: Vec<f64>,
    pub climate_sensitivity: Vec<f64>,
    pub impact_function: Vec<String>,
    pub impact_scale: Vec<f64>,
}

impl GridSpec {
    pub fn is_empty(&self) -> bool {
        self.scenario.is_empty()
            && self.convergence.is_empty()
            && self.prtp.is_empty()
            && self.emuc.is_empty()
            && self.income_elasticity.is_empty()
            && self.climate_sensitivity.is_empty()
            && self.impact_function.is_empty()
            && self.impact_scale.is_empty()
    }

    /// The standard one-at-a-time grid exercised by the reporting pipeline.
    pub fn standard() -> GridSpec {
        GridSpec {
            mode: GridMode::OneAtATime,
            prtp: vec![0.010, 0.015, 0.030],
            income_elasticity: vec![0.36, 0.0, -0.36, -0.72, -1.44],
            climate_sensitivity: vec![1.5, 3.0, 4.5],
            impact_function: vec!["newbold".into(), "bma".into(), "nordhaus".into()],
            ..GridSpec::default()
        }
    }
}

/// The complete effective configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario CSV path; its `.toml` sidecar is loaded alongside.
    pub scenario: PathBuf,
    /// Historical emissions CSV, needed by the debt computation.
    pub history: Option<PathBuf>,
    /// Warming/impact observations CSV, needed by fitting.
    pub meta: Option<PathBuf>,
    /// Pure rate of time preference per year.
    pub prtp: f64,
    /// Elasticity of marginal utility of consumption.
    pub emuc: f64,
    /// Income elasticity of relative climate impacts.
    pub income_elasticity: f64,
    /// Impact model: "bma" or a single form name.
    pub impact: ImpactSelection,
    /// Multiplier on the impact model, for high/low damage variants.
    pub impact_scale: f64,
    pub pulse_year: i32,
    pub pulse_size_mtc: f64,
    /// Damages are summed through this year; no extrapolation beyond it.
    pub horizon_year: i32,
    /// Year at which liability positions are struck.
    pub evaluation_year: i32,
    /// Overrides the scenario sidecar's income-convergence flag when set.
    pub convergence: Option<bool>,
    pub climate: ClimateParams,
    pub initial: ClimateInit,
    pub grid: Option<GridSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: PathBuf::new(),
            history: None,
            meta: None,
            prtp: 0.015,
            emuc: 1.5,
            income_elasticity: -0.36,
            impact: ImpactSelection::Average,
            impact_scale: 1.0,
            pulse_year: 2015,
            pulse_size_mtc: 10.0,
            horizon_year: 2300,
            evaluation_year: 2015,
            convergence: None,
            climate: ClimateParams::default(),
            initial: ClimateInit::default(),
            grid: None,
        }
    }
}

impl RunConfig {
    /// Scenario-independent validation; year consistency against the loaded
    /// scenario is checked by the operations that need it.
    pub fn validate(&self) -> Result<()> {
        if self.scenario.as_os_str().is_empty() {
            return Err(EngineError::Config(
                "no scenario file configured (set `scenario`)".into(),
            ));
        }
        if !(0.0..=0.10).contains(&self.prtp) {
            return Err(EngineError::Config(format!(
                "prtp must lie in [0, 0.10] (got {})",
                self.prtp
            )));
        }
        if !(self.emuc > 0.0) || self.emuc > 5.0 {
            return Err(EngineError::Config(format!(
                "emuc must lie in (0, 5] (got {})",
                self.emuc
            )));
        }
        if !self.income_elasticity.is_finite() || self.income_elasticity.abs() > 5.0 {
            return Err(EngineError::Config(format!(
                "income_elasticity must be finite and within [-5, 5] (got {})",
                self.income_elasticity
            )));
        }
        if !(self.impact_scale > 0.0) || !self.impact_scale.is_finite() {
            return Err(EngineError::Config(format!(
                "impact_scale must be positive (got {})",
                self.impact_scale
            )));
        }
        if !(self.pulse_size_mtc > 0.0) {
            return Err(EngineError::Config(format!(
                "pulse_size_mtc must be positive (got {})",
                self.pulse_size_mtc
            )));
        }
        if self.pulse_year >= self.horizon_year {
            return Err(EngineError::Config(format!(
                "pulse_year {} must precede horizon_year {}",
                self.pulse_year, self.horizon_year
            )));
        }
        self.climate.validate()?;
        self.initial.validate(&self.climate)?;
        Ok(())
    }

    /// The discounting and pulse settings implied by this config.
    pub fn scc_settings(&self) -> SccSettings {
        SccSettings {
            prtp: self.prtp,
            emuc: self.emuc,
            income_elasticity: self.income_elasticity,
            pulse_year: self.pulse_year,
            pulse_size_mtc: self.pulse_size_mtc,
            horizon_year: self.horizon_year,
        }
    }

    pub fn debt_settings(&self) -> DebtSettings {
        DebtSettings {
            prtp: self.prtp,
            emuc: self.emuc,
            income_elasticity: self.income_elasticity,
            pulse_size_mtc: self.pulse_size_mtc,
            evaluation_year: self.evaluation_year,
        }
    }

    pub fn resolve_impact(&self) -> Result<BmaImpact> {
        self.impact.resolve(self.impact_scale)
    }

    /// Load the scenario and apply income convergence if the sidecar (or
    /// this config's override) asks for it. Returns the ready scenario and
    /// the effective convergence flag.
    pub fn load_scenario_effective(&self) -> Result<(Scenario, bool)> {
        let raw = load_scenario(&self.scenario)?;
        let convergence = self.convergence.unwrap_or(raw.convergence());
        let scenario = if convergence {
            let horizon = raw.end_year() - raw.start_year();
            raw.apply_convergence(horizon)?
        } else {
            raw
        };
        Ok((scenario, convergence))
    }

    /// Provenance hash of the effective parameters plus the content of every
    /// referenced data file.
    pub fn effective_hash(&self) -> Result<String> {
        let scenario_sha = file_sha256(&self.scenario)?;
        let sidecar_sha = file_sha256(&sidecar_path(&self.scenario))?;
        let history_sha = self.history.as_deref().map(file_sha256).transpose()?;
        let meta_sha = self.meta.as_deref().map(file_sha256).transpose()?;

        let mut value = serde_json::to_value(self)
            .map_err(|e| EngineError::Config(format!("config not hashable: {e}")))?;
        let obj = value.as_object_mut().unwrap();
        obj.remove("scenario");
        obj.remove("history");
        obj.remove("meta");
        obj.insert("scenario_sha256".into(), scenario_sha.into());
        obj.insert("sidecar_sha256".into(), sidecar_sha.into());
        obj.insert("history_sha256".into(), history_sha.into());
        obj.insert("meta_sha256".into(), meta_sha.into());

        // serde_json maps iterate in sorted key order, so the digest input
        // is canonical.
        let canonical = serde_json::to_string(&value)
            .map_err(|e| EngineError::Config(format!("config not hashable: {e}")))?;
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        Ok(hex_digest(hasher))
    }
}

fn hex_digest(hasher: Sha256) -> String {
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| EngineError::io(path.display().to_string(), e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_digest(hasher))
}

/// Parse an override value with TOML syntax; bare words fall back to
/// strings so paths and form names need no quoting.
fn parse_override_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut current = table;
    loop {
        let part = parts.next().ok_or_else(|| {
            EngineError::Config(format!("empty override key in {key:?}"))
        })?;
        if part.is_empty() {
            return Err(EngineError::Config(format!(
                "override key {key:?} has an empty segment"
            )));
        }
        if parts.peek().is_none() {
            current.insert(part.to_string(), parse_override_value(value));
            return Ok(());
        }
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry.as_table_mut().ok_or_else(|| {
            EngineError::Config(format!(
                "override key {key:?}: segment {part:?} is not a table"
            ))
        })?;
    }
}

/// Load a config file, apply `key=value` overrides, resolve data paths
/// relative to the config file, and validate. A missing `path` starts from
/// built-in defaults with paths resolved against the working directory.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let (mut table, base_dir) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| EngineError::io(p.display().to_string(), e))?;
            let table = text.parse::<toml::Table>().map_err(|e| {
                EngineError::Config(format!("{}: invalid config: {e}", p.display()))
            })?;
            let dir = p.parent().unwrap_or(Path::new(".")).to_path_buf();
            (table, dir)
        }
        None => (toml::Table::new(), PathBuf::from(".")),
    };
    for (key, value) in overrides {
        apply_override(&mut table, key, value)?;
    }
    let mut config: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e| EngineError::Config(format!("invalid config: {e}")))?;

    let resolve = |p: &mut PathBuf| {
        if p.is_relative() && !p.as_os_str().is_empty() {
            *p = base_dir.join(&*p);
        }
    };
    resolve(&mut config.scenario);
    if let Some(h) = config.history.as_mut() {
        resolve(h);
    }
    if let Some(m) = config.meta.as_mut() {
        resolve(m);
    }
    if let Some(grid) = config.grid.as_mut() {
        for s in grid.scenario.iter_mut() {
            resolve(s);
        }
    }
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("run.toml");
        std::fs::File::create(&path)
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
        path
    }

    #[test]
    fn defaults_plus_scenario_override_validate() {
        let config = load_config(None, &[("scenario".into(), "s.csv".into())]).unwrap();
        assert_eq!(config.prtp, 0.015);
        assert_eq!(config.emuc, 1.5);
        assert_eq!(config.income_elasticity, -0.36);
        assert_eq!(config.pulse_size_mtc, 10.0);
        assert_eq!(config.horizon_year, 2300);
        assert_eq!(config.impact, ImpactSelection::Average);
        assert!(config.scenario.ends_with("s.csv"));
    }

    #[test]
    fn file_values_parse_and_paths_resolve_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"
scenario = "data/world.csv"
history = "data/history.csv"
prtp = 0.01
impact = "nordhaus"

[climate]
climate_sensitivity_c = 4.5

[grid]
prtp = [0.01, 0.015, 0.03]
"#,
        );
        let config = load_config(Some(&path), &[]).unwrap();
        assert_eq!(config.prtp, 0.01);
        assert_eq!(config.climate.climate_sensitivity_c, 4.5);
        assert_eq!(config.scenario, dir.path().join("data/world.csv"));
        assert_eq!(config.history, Some(dir.path().join("data/history.csv")));
        assert_eq!(config.grid.as_ref().unwrap().prtp, vec![0.01, 0.015, 0.03]);
        match config.impact {
            ImpactSelection::Single(form) => assert_eq!(form.name(), "Quadratic"),
            other => panic!("unexpected impact {other:?}"),
        }
    }

    #[test]
    fn overrides_win_over_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "scenario = \"s.csv\"\nprtp = 0.01\n");
        let config = load_config(
            Some(&path),
            &[
                ("prtp".into(), "0.03".into()),
                ("climate.climate_sensitivity_c".into(), "1.5".into()),
                ("convergence".into(), "false".into()),
            ],
        )
        .unwrap();
        assert_eq!(config.prtp, 0.03);
        assert_eq!(config.climate.climate_sensitivity_c, 1.5);
        assert_eq!(config.convergence, Some(false));
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "scenario = \"s.csv\"\nprtpp = 0.01\n");
        assert!(load_config(Some(&path), &[]).is_err());
        let path2 = write_config(dir.path(), "scenario = \"s.csv\"\n");
        let err = load_config(Some(&path2), &[("no_such_key".into(), "1".into())]);
        assert!(err.is_err());
    }

    #[test]
    fn out_of_range_values_rejected() {
        for (key, value) in [
            ("prtp", "0.5"),
            ("prtp", "-0.01"),
            ("emuc", "0"),
            ("emuc", "9"),
            ("impact_scale", "0"),
            ("pulse_size_mtc", "-1"),
            ("income_elasticity", "8"),
        ] {
            let result = load_config(
                None,
                &[
                    ("scenario".into(), "s.csv".into()),
                    (key.into(), value.into()),
                ],
            );
            assert!(result.is_err(), "{key}={value} accepted");
        }
    }

    #[test]
    fn unknown_impact_name_rejected() {
        let result = load_config(
            None,
            &[
                ("scenario".into(), "s.csv".into()),
                ("impact".into(), "gompertz".into()),
            ],
        );
        assert!(result.is_err());
    }

    #[test]
    fn array_overrides_parse_as_toml() {
        let config = load_config(
            None,
            &[
                ("scenario".into(), "s.csv".into()),
                (
                    "climate.box_shares".into(),
                    "[0.2, 0.2, 0.2, 0.2, 0.2]".into(),
                ),
            ],
        )
        .unwrap();
        assert_eq!(config.climate.box_shares, [0.2; 5]);
    }

    #[test]
    fn hash_changes_with_parameters_and_data_content() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("s.csv"), "header\n1\n").unwrap();
        std::fs::write(dir.path().join("s.toml"), "id = \"x\"\nconvergence = false\n").unwrap();
        let base = load_config(
            None,
            &[(
                "scenario".into(),
                dir.path().join("s.csv").display().to_string(),
            )],
        )
        .unwrap();
        let h1 = base.effective_hash().unwrap();
        assert_eq!(h1.len(), 64);
        // Same everything hashes identically.
        assert_eq!(base.effective_hash().unwrap(), h1);
        // A parameter change changes the hash.
        let mut changed = base.clone();
        changed.prtp = 0.016;
        assert_ne!(changed.effective_hash().unwrap(), h1);
        // A data content change changes the hash even with the same path.
        std::fs::write(dir.path().join("s.csv"), "header\n2\n").unwrap();
        assert_ne!(base.effective_hash().unwrap(), h1);
    }

    #[test]
    fn grid_spec_standard_is_one_at_a_time() {
        let g = GridSpec::standard();
        assert_eq!(g.mode, GridMode::OneAtATime);
        assert!(!g.is_empty());
        assert_eq!(g.impact_function.len(), 3);
    }
}
