//! Python bindings for the engine: scenario access, trajectories, social
//! costs of carbon, liability accounting, historical debt, and damage
//! function fitting, all returning plain Python structures.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use scc_core::climate::{ClimateInit, ClimateParams};
use scc_core::economy::EconomyPath;
use scc_core::impact::fit::{bma_weights, fit_functions};
use scc_core::impact::{BmaImpact, ImpactSelection, MetaDataset};
use scc_core::liability as lia;
use scc_core::liability::DebtSettings;
use scc_core::scc::{self, SccContext, SccSettings};
use scc_core::scenario::{load_history, load_scenario};
use scc_core::trajectory::{self, Pulse};
use scc_core::units::TC_PER_MTC;
use scc_core::EngineError;

fn err(e: EngineError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A world on an annual grid: population, income, and carbon intensity per
/// country, with the gross economy precomputed.
#[pyclass(frozen)]
struct Scenario {
    inner: scc_core::Scenario,
    economy: EconomyPath,
}

impl Scenario {
    fn wrap(inner: scc_core::Scenario) -> Self {
        let economy = EconomyPath::from_scenario(&inner);
        Scenario { inner, economy }
    }

    fn country_index(&self, code: &str) -> PyResult<usize> {
        self.inner
            .countries()
            .iter()
            .position(|c| c.as_str() == code)
            .ok_or_else(|| PyValueError::new_err(format!("unknown country {code:?}")))
    }

}

#[pymethods]
impl Scenario {
    /// Load a scenario CSV (with its TOML sidecar next to it).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Scenario::wrap(load_scenario(path).map_err(err)?))
    }

    /// The bundled twenty-country world, 1950 to 2300.
    #[staticmethod]
    fn synthetic() -> Self {
        Scenario::wrap(scc_core::synthetic::synthetic_world())
    }

    #[getter]
    fn id(&self) -> &str {
        self.inner.id()
    }

    #[getter]
    fn start_year(&self) -> i32 {
        self.inner.start_year()
    }

    #[getter]
    fn end_year(&self) -> i32 {
        self.inner.end_year()
    }

    #[getter]
    fn countries(&self) -> Vec<String> {
        self.inner.countries().iter().map(|c| c.to_string()).collect()
    }

    fn population_millions(&self, country: &str, year: i32) -> PyResult<f64> {
        let c = self.country_index(country)?;
        let t = self.inner.year_index(year).map_err(err)?;
        Ok(self.inner.population(c, t))
    }

    fn income_per_capita(&self, country: &str, year: i32) -> PyResult<f64> {
        let c = self.country_index(country)?;
        let t = self.inner.year_index(year).map_err(err)?;
        Ok(self.inner.income(c, t))
    }

    fn emissions_mtc(&self, country: &str, year: i32) -> PyResult<f64> {
        let c = self.country_index(country)?;
        let t = self.inner.year_index(year).map_err(err)?;
        Ok(self.economy.state(c, t).emissions_mtc)
    }

    fn global_gdp(&self, year: i32) -> PyResult<f64> {
        let t = self.inner.year_index(year).map_err(err)?;
        Ok(self.economy.global_gdp(t))
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(id={:?}, {} countries, {}-{})",
            self.inner.id(),
            self.inner.num_countries(),
            self.inner.start_year(),
            self.inner.end_year(),
        )
    }
}

fn build_impact(impact: &str, impact_scale: f64) -> PyResult<BmaImpact> {
    let selection: ImpactSelection = impact.parse().map_err(err)?;
    selection.resolve(impact_scale).map_err(err)
}

fn build_climate(climate_sensitivity: f64) -> ClimateParams {
    ClimateParams {
        climate_sensitivity_c: climate_sensitivity,
        ..ClimateParams::default()
    }
}

/// National and global social cost of carbon for one pulse year.
#[pyclass(frozen)]
struct SccResult {
    table: scc::SccTable,
    codes: Vec<String>,
}

#[pymethods]
impl SccResult {
    #[getter]
    fn pulse_year(&self) -> i32 {
        self.table.pulse_year
    }

    #[getter]
    fn global_scc(&self) -> f64 {
        self.table.global_scc()
    }

    /// Per-country SCC in 2005 USD per tonne of carbon.
    fn national(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.table.scc(c)))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SccResult(pulse_year={}, global_scc={:.4})",
            self.table.pulse_year,
            self.table.global_scc(),
        )
    }
}

/// The net positions from pricing every country's emissions at every other
/// country's social cost.
#[pyclass(frozen)]
struct Liability {
    report: lia::LiabilityReport,
    codes: Vec<String>,
}

#[pymethods]
impl Liability {
    fn harm_done(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.report.harm_done(c)))
            .collect()
    }

    fn damage_suffered(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.report.damage_suffered(c)))
            .collect()
    }

    fn net_liability(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.report.net_liability(c)))
            .collect()
    }

    #[getter]
    fn zero_sum_residual(&self) -> f64 {
        self.report.zero_sum_residual()
    }
}

/// Interest-compounded obligations from past emissions.
#[pyclass(frozen)]
struct Debt {
    ledger: lia::DebtLedger,
    codes: Vec<String>,
}

#[pymethods]
impl Debt {
    fn gross_debt(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.ledger.gross_debt(c)))
            .collect()
    }

    fn net_debt(&self) -> HashMap<String, f64> {
        self.codes
            .iter()
            .enumerate()
            .map(|(c, code)| (code.clone(), self.ledger.net_debt(c)))
            .collect()
    }

    /// Debt per tonne emitted in `year`, compounded to the evaluation year.
    fn marginal_debt_per_tc(&self, year: i32) -> PyResult<f64> {
        if year < self.ledger.first_emission_year() {
            return Err(PyValueError::new_err(format!(
                "no emission record for {year}"
            )));
        }
        Ok(self.ledger.marginal_debt_per_tc(year))
    }

    #[getter]
    fn first_emission_year(&self) -> i32 {
        self.ledger.first_emission_year()
    }
}

/// Annual global state: concentration, warming, emissions, world damages.
#[pyclass(frozen)]
struct Trajectory {
    traj: trajectory::WorldTrajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn years(&self) -> Vec<i32> {
        (0..self.traj.num_years())
            .map(|t| self.traj.start_year() + t as i32)
            .collect()
    }

    #[getter]
    fn concentration_ppm(&self) -> Vec<f64> {
        (0..self.traj.num_years())
            .map(|t| self.traj.concentration_ppm(t))
            .collect()
    }

    #[getter]
    fn temperature_c(&self) -> Vec<f64> {
        (0..self.traj.num_years())
            .map(|t| self.traj.temperature_c(t))
            .collect()
    }

    #[getter]
    fn global_impact_fraction(&self) -> Vec<f64> {
        (0..self.traj.num_years())
            .map(|t| self.traj.global_impact_fraction(t))
            .collect()
    }

    /// Fit quality of warming on cumulative emissions, near 1 when warming
    /// is proportional to the cumulative carbon emitted.
    #[getter]
    fn matthews_r_squared(&self) -> f64 {
        self.traj.matthews_r_squared()
    }
}

/// Simulate the world, optionally with an emission pulse in one year.
#[pyfunction]
#[pyo3(signature = (scenario, impact = "bma", impact_scale = 1.0,
                    climate_sensitivity = 3.0, income_elasticity = -0.36,
                    pulse_year = None, pulse_size_mtc = 10.0))]
fn run_trajectory(
    scenario: &Scenario,
    impact: &str,
    impact_scale: f64,
    climate_sensitivity: f64,
    income_elasticity: f64,
    pulse_year: Option<i32>,
    pulse_size_mtc: f64,
) -> PyResult<Trajectory> {
    let impact = build_impact(impact, impact_scale)?;
    let traj = trajectory::run_trajectory(
        &scenario.inner,
        &scenario.economy,
        &build_climate(climate_sensitivity),
        &ClimateInit::default(),
        &impact,
        income_elasticity,
        pulse_year.map(|year| Pulse {
            year,
            size_mtc: pulse_size_mtc,
        }),
    )
    .map_err(err)?;
    Ok(Trajectory { traj })
}

/// Marginal damages of an emission pulse, discounted at national Ramsey
/// rates: the social cost of carbon per country plus the global sum.
#[pyfunction]
#[pyo3(signature = (scenario, prtp = 0.015, emuc = 1.5, income_elasticity = -0.36,
                    pulse_year = 2015, pulse_size_mtc = 10.0, horizon_year = 2300,
                    impact = "bma", impact_scale = 1.0, climate_sensitivity = 3.0))]
#[allow(clippy::too_many_arguments)]
fn compute_scc(
    scenario: &Scenario,
    prtp: f64,
    emuc: f64,
    income_elasticity: f64,
    pulse_year: i32,
    pulse_size_mtc: f64,
    horizon_year: i32,
    impact: &str,
    impact_scale: f64,
    climate_sensitivity: f64,
) -> PyResult<SccResult> {
    let impact = build_impact(impact, impact_scale)?;
    let climate = build_climate(climate_sensitivity);
    let init = ClimateInit::default();
    let ctx = SccContext {
        scenario: &scenario.inner,
        economy: &scenario.economy,
        climate: &climate,
        init: &init,
        impact: &impact,
    };
    let settings = SccSettings {
        prtp,
        emuc,
        income_elasticity,
        pulse_year,
        pulse_size_mtc,
        horizon_year,
    };
    let table = scc::compute_scc(&ctx, &settings).map_err(err)?;
    Ok(SccResult {
        table,
        codes: scenario.countries(),
    })
}

/// Price each country's emissions at the others' social costs, striking
/// emissions and GDP in the result's pulse year.
#[pyfunction]
fn blame_matrix(scenario: &Scenario, scc: &SccResult) -> PyResult<Liability> {
    let year = scc.table.pulse_year;
    let t = scenario.inner.year_index(year).map_err(err)?;
    let n = scenario.inner.num_countries();
    let emissions: Vec<f64> = (0..n)
        .map(|c| scenario.economy.state(c, t).emissions_mtc * TC_PER_MTC)
        .collect();
    let gdp: Vec<f64> = (0..n)
        .map(|c| scenario.economy.state(c, t).gdp_gross)
        .collect();
    let report = lia::blame_matrix(&scc.table, &emissions, &gdp, year).map_err(err)?;
    Ok(Liability {
        report,
        codes: scenario.countries(),
    })
}

/// Climate debt accumulated over a historical emissions record, compounded
/// to the evaluation year at national Ramsey rates.
#[pyfunction]
#[pyo3(signature = (scenario, history_path, prtp = 0.015, emuc = 1.5,
                    income_elasticity = -0.36, pulse_size_mtc = 10.0,
                    evaluation_year = 2015, impact = "bma", impact_scale = 1.0,
                    climate_sensitivity = 3.0))]
#[allow(clippy::too_many_arguments)]
fn historical_debt(
    scenario: &Scenario,
    history_path: PathBuf,
    prtp: f64,
    emuc: f64,
    income_elasticity: f64,
    pulse_size_mtc: f64,
    evaluation_year: i32,
    impact: &str,
    impact_scale: f64,
    climate_sensitivity: f64,
) -> PyResult<Debt> {
    let history = load_history(history_path).map_err(err)?;
    let impact = build_impact(impact, impact_scale)?;
    let settings = DebtSettings {
        prtp,
        emuc,
        income_elasticity,
        pulse_size_mtc,
        evaluation_year,
    };
    let ledger = lia::historical_debt(
        &scenario.inner,
        &scenario.economy,
        &build_climate(climate_sensitivity),
        &ClimateInit::default(),
        &impact,
        &history,
        &settings,
    )
    .map_err(err)?;
    Ok(Debt {
        ledger,
        codes: scenario.countries(),
    })
}

/// GDP damage fraction at a given warming for one impact function or the
/// weighted average ("bma").
#[pyfunction]
#[pyo3(signature = (impact, warming_c, impact_scale = 1.0))]
fn evaluate_impact(impact: &str, warming_c: f64, impact_scale: f64) -> PyResult<f64> {
    let impact = build_impact(impact, impact_scale)?;
    impact.evaluate(warming_c).map_err(err)
}

/// Fit the whole damage-function family to a warming-impact observation CSV.
/// Returns one dict per form: name, params, ssr, weight, fitted.
#[pyfunction]
fn fit_impact_functions(py: Python<'_>, meta_path: PathBuf) -> PyResult<Vec<Py<PyAny>>> {
    let data = MetaDataset::load(meta_path).map_err(err)?;
    let report = fit_functions(&data).map_err(err)?;
    let weights = bma_weights(&report.fits, data.len()).map_err(err)?;
    let mut rows = Vec::new();
    for ((function, weight), fit) in weights.members().iter().zip(&report.fits) {
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("form", function.form().name())?;
        dict.set_item("params", function.params().to_vec())?;
        dict.set_item("ssr", fit.ssr)?;
        dict.set_item("weight", weight)?;
        dict.set_item("fitted", fit.fitted)?;
        rows.push(dict.into_any().unbind());
    }
    Ok(rows)
}

#[pymodule]
fn sccpy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<SccResult>()?;
    m.add_class::<Liability>()?;
    m.add_class::<Debt>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(run_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(compute_scc, m)?)?;
    m.add_function(wrap_pyfunction!(blame_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(historical_debt, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_impact, m)?)?;
    m.add_function(wrap_pyfunction!(fit_impact_functions, m)?)?;
    Ok(())
}
