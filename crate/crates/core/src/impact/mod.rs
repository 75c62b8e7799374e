//! Global impact functions, their Bayesian model average, and income-based
//! downscaling to countries.
//!
//! Every functional form maps warming above preindustrial (degrees C) to a
//! global impact as a fraction of gross world output; negative values are
//! damages. Parameters are stored in percent-of-GDP units, matching the
//! published coefficient tables, and divided by 100 on evaluation.

pub mod fit;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{EngineError, Result};

/// Warming range over which every form is defined, degrees C.
pub const MIN_WARMING_C: f64 = -1.0;
pub const MAX_WARMING_C: f64 = 10.0;

/// SSR floor that keeps likelihood weights finite when a form fits the data
/// exactly.
pub const SSR_FLOOR: f64 = 1e-300;

/// The thirteen impact functional forms, in canonical (likelihood table)
/// order. The last three are fixed published parameterizations: they are
/// evaluated and weighted but never refitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImpactForm {
    Parabolic,
    Threshold,
    PiecewiseLinear,
    Quadratic,
    HazardT6,
    HazardT7,
    Linear,
    Cubic,
    Quartic,
    Exponential,
    QuadraticBarrage,
    QuadraticHoward,
    HazardWeitzman,
}

impl ImpactForm {
    pub const ALL: [ImpactForm; 13] = [
        ImpactForm::Parabolic,
        ImpactForm::Threshold,
        ImpactForm::PiecewiseLinear,
        ImpactForm::Quadratic,
        ImpactForm::HazardT6,
        ImpactForm::HazardT7,
        ImpactForm::Linear,
        ImpactForm::Cubic,
        ImpactForm::Quartic,
        ImpactForm::Exponential,
        ImpactForm::QuadraticBarrage,
        ImpactForm::QuadraticHoward,
        ImpactForm::HazardWeitzman,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ImpactForm::Parabolic => "Parabolic",
            ImpactForm::Threshold => "Threshold",
            ImpactForm::PiecewiseLinear => "PiecewiseLinear",
            ImpactForm::Quadratic => "Quadratic",
            ImpactForm::HazardT6 => "HazardT6",
            ImpactForm::HazardT7 => "HazardT7",
            ImpactForm::Linear => "Linear",
            ImpactForm::Cubic => "Cubic",
            ImpactForm::Quartic => "Quartic",
            ImpactForm::Exponential => "Exponential",
            ImpactForm::QuadraticBarrage => "QuadraticBarrage",
            ImpactForm::QuadraticHoward => "QuadraticHoward",
            ImpactForm::HazardWeitzman => "HazardWeitzman",
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            ImpactForm::Parabolic => 2,
            ImpactForm::Threshold => 3,
            ImpactForm::PiecewiseLinear => 4,
            ImpactForm::Quadratic => 1,
            ImpactForm::HazardT6 => 2,
            ImpactForm::HazardT7 => 2,
            ImpactForm::Linear => 1,
            ImpactForm::Cubic => 1,
            ImpactForm::Quartic => 1,
            ImpactForm::Exponential => 1,
            ImpactForm::QuadraticBarrage => 1,
            ImpactForm::QuadraticHoward => 1,
            ImpactForm::HazardWeitzman => 3,
        }
    }

    /// Fixed published parameterizations, exempt from fitting.
    pub fn is_fixed(&self) -> bool {
        matches!(
            self,
            ImpactForm::QuadraticBarrage | ImpactForm::QuadraticHoward | ImpactForm::HazardWeitzman
        )
    }

    /// Published central parameters, percent of GDP per degree-power.
    pub fn table_parameters(&self) -> Vec<f64> {
        match self {
            ImpactForm::Parabolic => vec![-0.45, -0.082],
            // (a, c, p): zero at and below -c, a*(T+c)^p above.
            ImpactForm::Threshold => vec![-0.49, 0.21, 1.3],
            // (a, knot, b, switch): a*T up to switch, a*knot - b*T beyond.
            ImpactForm::PiecewiseLinear => vec![0.46, 0.74, 0.90, 0.90],
            ImpactForm::Quadratic => vec![-0.17],
            ImpactForm::HazardT6 => vec![-0.19, 1.10e-5],
            ImpactForm::HazardT7 => vec![-0.18, 1.55e-6],
            ImpactForm::Linear => vec![-0.79],
            ImpactForm::Cubic => vec![-0.028],
            ImpactForm::Quartic => vec![-0.0039],
            ImpactForm::Exponential => vec![0.0078],
            ImpactForm::QuadraticBarrage => vec![-0.35],
            ImpactForm::QuadraticHoward => vec![-0.86],
            // (a, b, p): a*T^2 + b*max(T,0)^p.
            ImpactForm::HazardWeitzman => vec![-0.24, -0.00051, 6.754],
        }
    }

    /// Published model likelihood in percent, used as the default average
    /// weight before normalization.
    pub fn table_likelihood_pct(&self) -> f64 {
        match self {
            ImpactForm::Parabolic => 19.65,
            ImpactForm::Threshold => 18.01,
            ImpactForm::PiecewiseLinear => 14.31,
            ImpactForm::Quadratic => 13.15,
            ImpactForm::HazardT6 => 11.12,
            ImpactForm::HazardT7 => 11.02,
            ImpactForm::Linear => 10.68,
            ImpactForm::Cubic => 1.60,
            ImpactForm::Quartic => 0.37,
            ImpactForm::Exponential => 0.09,
            ImpactForm::QuadraticBarrage => 7.1e-4,
            ImpactForm::QuadraticHoward => 5.8e-20,
            ImpactForm::HazardWeitzman => 4.3e-47,
        }
    }
}

impl fmt::Display for ImpactForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImpactForm {
    type Err = EngineError;

    /// Case-insensitive form name, plus proponent-name aliases.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let form = match lower.as_str() {
            "parabolic" => ImpactForm::Parabolic,
            "threshold" | "newbold" => ImpactForm::Threshold,
            "piecewiselinear" | "piecewise-linear" | "piecewise_linear" => {
                ImpactForm::PiecewiseLinear
            }
            "quadratic" | "nordhaus" => ImpactForm::Quadratic,
            "hazardt6" | "hazard-t6" | "hazard_t6" => ImpactForm::HazardT6,
            "hazardt7" | "hazard-t7" | "hazard_t7" => ImpactForm::HazardT7,
            "linear" => ImpactForm::Linear,
            "cubic" => ImpactForm::Cubic,
            "quartic" => ImpactForm::Quartic,
            "exponential" => ImpactForm::Exponential,
            "quadraticbarrage" | "barrage" => ImpactForm::QuadraticBarrage,
            "quadratichoward" | "howard" => ImpactForm::QuadraticHoward,
            "hazardweitzman" | "weitzman" => ImpactForm::HazardWeitzman,
            _ => {
                return Err(EngineError::Config(format!(
                    "unknown impact function {s:?}"
                )))
            }
        };
        Ok(form)
    }
}

/// A concrete impact function: a form plus its coefficient vector, in
/// percent-of-GDP units.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactFunction {
    form: ImpactForm,
    params: Vec<f64>,
}

impl ImpactFunction {
    pub fn new(form: ImpactForm, params: Vec<f64>) -> Result<Self> {
        if params.len() != form.param_count() {
            return Err(EngineError::Config(format!(
                "{} takes {} parameters, got {}",
                form.name(),
                form.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(EngineError::Config(format!(
                "{} parameters must be finite",
                form.name()
            )));
        }
        Ok(ImpactFunction { form, params })
    }

    /// The published central parameterization of `form`.
    pub fn table_default(form: ImpactForm) -> Self {
        ImpactFunction {
            params: form.table_parameters(),
            form,
        }
    }

    pub fn form(&self) -> ImpactForm {
        self.form
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Global impact as a fraction of gross world output at warming `t_c`
    /// degrees C. Errors outside the supported warming range.
    pub fn evaluate(&self, t_c: f64) -> Result<f64> {
        check_warming_range(t_c)?;
        Ok(self.evaluate_unchecked(t_c))
    }

    /// Evaluation without the range check, in fraction-of-GDP units. Used by
    /// fitting, where candidate warmings come from the validated dataset.
    pub(crate) fn evaluate_unchecked(&self, t: f64) -> f64 {
        let p = &self.params;
        let pct = match self.form {
            ImpactForm::Parabolic => p[0] * t + p[1] * t * t,
            ImpactForm::Threshold => {
                let (a, c, pow) = (p[0], p[1], p[2]);
                if t <= -c {
                    0.0
                } else {
                    a * (t + c).powf(pow)
                }
            }
            ImpactForm::PiecewiseLinear => {
                let (a, knot, b, switch) = (p[0], p[1], p[2], p[3]);
                if t <= switch {
                    a * t
                } else {
                    a * knot - b * t
                }
            }
            ImpactForm::Quadratic | ImpactForm::QuadraticBarrage | ImpactForm::QuadraticHoward => {
                p[0] * t * t
            }
            ImpactForm::HazardT6 => p[0] * t * t + p[1] * t.powi(6),
            ImpactForm::HazardT7 => p[0] * t * t + p[1] * t.powi(7),
            ImpactForm::Linear => p[0] * t,
            ImpactForm::Cubic => p[0] * t.powi(3),
            ImpactForm::Quartic => p[0] * t.powi(4),
            ImpactForm::Exponential => p[0] * (1.0 - t.exp()),
            // Fractional power of a negative base is undefined; cooling
            // contributes no hazard term.
            ImpactForm::HazardWeitzman => p[0] * t * t + p[1] * t.max(0.0).powf(p[2]),
        };
        pct / 100.0
    }
}

fn check_warming_range(t_c: f64) -> Result<()> {
    if !t_c.is_finite() || t_c < MIN_WARMING_C || t_c > MAX_WARMING_C {
        return Err(EngineError::Numerical(format!(
            "warming {t_c} C outside supported range [{MIN_WARMING_C}, {MAX_WARMING_C}]"
        )));
    }
    Ok(())
}

/// A weighted average of impact functions, with an overall scale multiplier
/// for high/low impact sensitivity variants.
#[derive(Debug, Clone, PartialEq)]
pub struct BmaImpact {
    members: Vec<(ImpactFunction, f64)>,
    scale: f64,
}

impl BmaImpact {
    pub fn new(members: Vec<(ImpactFunction, f64)>, scale: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(EngineError::Config(
                "impact average needs at least one member".into(),
            ));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(EngineError::Config(format!(
                "impact scale must be positive (got {scale})"
            )));
        }
        let sum: f64 = members.iter().map(|(_, w)| *w).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(EngineError::Config(format!(
                "impact weights must sum to 1 (got {sum})"
            )));
        }
        if members.iter().any(|(_, w)| *w < 0.0 || !w.is_finite()) {
            return Err(EngineError::Config("impact weights must be >= 0".into()));
        }
        Ok(BmaImpact { members, scale })
    }

    /// All thirteen published parameterizations weighted by their published
    /// likelihoods.
    pub fn table_average(scale: f64) -> Result<Self> {
        let total: f64 = ImpactForm::ALL.iter().map(|f| f.table_likelihood_pct()).sum();
        let members = ImpactForm::ALL
            .iter()
            .map(|&f| (ImpactFunction::table_default(f), f.table_likelihood_pct() / total))
            .collect();
        BmaImpact::new(members, scale)
    }

    /// A single function as a degenerate average, so run code handles both
    /// cases uniformly.
    pub fn single(function: ImpactFunction, scale: f64) -> Result<Self> {
        BmaImpact::new(vec![(function, 1.0)], scale)
    }

    pub fn members(&self) -> &[(ImpactFunction, f64)] {
        &self.members
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Weighted impact fraction at warming `t_c`.
    pub fn evaluate(&self, t_c: f64) -> Result<f64> {
        check_warming_range(t_c)?;
        let mut acc = 0.0;
        for (f, w) in &self.members {
            if *w != 0.0 {
                acc += w * f.evaluate_unchecked(t_c);
            }
        }
        Ok(self.scale * acc)
    }
}

/// Which impact model a run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum ImpactSelection {
    /// Likelihood-weighted average of all thirteen parameterizations.
    Average,
    /// One form at its published central parameters.
    Single(ImpactForm),
}

impl ImpactSelection {
    pub fn resolve(&self, scale: f64) -> Result<BmaImpact> {
        match self {
            ImpactSelection::Average => BmaImpact::table_average(scale),
            ImpactSelection::Single(form) => {
                BmaImpact::single(ImpactFunction::table_default(*form), scale)
            }
        }
    }
}

impl FromStr for ImpactSelection {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bma" | "average" | "bayes-average" => Ok(ImpactSelection::Average),
            other => Ok(ImpactSelection::Single(other.parse()?)),
        }
    }
}

impl fmt::Display for ImpactSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImpactSelection::Average => f.write_str("bma"),
            ImpactSelection::Single(form) => f.write_str(form.name()),
        }
    }
}

impl serde::Serialize for ImpactSelection {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ImpactSelection {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// Split a global impact rate across countries by relative income.
///
/// Vulnerability scales as (income / world average income)^elasticity; a
/// multiplicative calibration factor restores the global dollar total each
/// year. With negative elasticity poorer countries bear a higher rate.
///
/// `income` is USD per person, `gdp` USD per year, `population` persons.
/// Returns per-country impact fractions of gross national output.
pub fn downscale(
    global_impact: f64,
    income: &[f64],
    gdp: &[f64],
    population: &[f64],
    elasticity: f64,
) -> Result<Vec<f64>> {
    let n = income.len();
    if gdp.len() != n || population.len() != n || n == 0 {
        return Err(EngineError::Data(
            "downscaling needs equal-length nonempty income, gdp and population".into(),
        ));
    }
    let total_gdp: f64 = gdp.iter().sum();
    let total_pop: f64 = population.iter().sum();
    if !(total_gdp > 0.0) || !(total_pop > 0.0) {
        return Err(EngineError::Numerical(
            "downscaling is degenerate: world output or population is zero".into(),
        ));
    }
    if global_impact == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let world_income = total_gdp / total_pop;
    let vulnerability: Vec<f64> = income
        .iter()
        .map(|&y| (y / world_income).powf(elasticity))
        .collect();
    let weighted: f64 = vulnerability.iter().zip(gdp).map(|(v, y)| v * y).sum();
    if !(weighted > 0.0) || !weighted.is_finite() {
        return Err(EngineError::Numerical(format!(
            "downscaling calibration is degenerate (weighted output {weighted})"
        )));
    }
    let k = total_gdp / weighted;
    Ok(vulnerability
        .iter()
        .map(|v| k * global_impact * v)
        .collect())
}

/// Warming/impact observations for fitting, in degrees C and percent of GDP.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaDataset {
    observations: Vec<(f64, f64)>,
}

impl MetaDataset {
    pub fn new(observations: Vec<(f64, f64)>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(EngineError::Data(format!(
                "meta dataset needs at least 2 observations (got {})",
                observations.len()
            )));
        }
        for &(t, i) in &observations {
            if !t.is_finite() || !i.is_finite() {
                return Err(EngineError::Data(format!(
                    "meta dataset observation ({t}, {i}) is not finite"
                )));
            }
        }
        Ok(MetaDataset { observations })
    }

    /// Load from CSV with header `warming_c,impact_pct_gdp`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| EngineError::Data(format!("{display}: {e}")))?;

        #[derive(serde::Deserialize)]
        struct Row {
            warming_c: f64,
            impact_pct_gdp: f64,
        }

        let mut observations = Vec::new();
        for record in reader.deserialize::<Row>() {
            let row = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                EngineError::Parse {
                    path: display.clone(),
                    line,
                    message: format!("malformed observation: {e}"),
                }
            })?;
            observations.push((row.warming_c, row.impact_pct_gdp));
        }
        MetaDataset::new(observations)
    }

    pub fn observations(&self) -> &[(f64, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}
