//! Annual world trajectory: emissions drive the carbon stock, concentration
//! drives temperature, temperature drives impacts, impacts are downscaled to
//! countries and turned into dollar damages.
//!
//! Damages never feed back on output or emissions, so a trajectory is a pure
//! function of (scenario, climate parameters, impact model, pulse).
//!
//! Timing convention: the scenario start year is the initial condition
//! (configured concentration and temperature, no step applied); from the
//! second year on, each year's emissions enter the atmosphere and affect that
//! same year's concentration, temperature and impacts.

use crate::climate::{
    step_carbon, step_temperature, CarbonCycleState, ClimateInit, ClimateParams, TemperatureState,
};
use crate::economy::EconomyPath;
use crate::error::{EngineError, Result};
use crate::impact::{downscale, BmaImpact};
use crate::scenario::{CountryId, Scenario};
use crate::units::{mtc_to_gtc, PERSONS_PER_MILLION};

/// An extra emission burst added to one year's global emissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub year: i32,
    pub size_mtc: f64,
}

/// One full model run: climate state, impact rates and dollar damages for
/// every country and year of the scenario.
#[derive(Debug, Clone)]
pub struct WorldTrajectory {
    start_year: i32,
    countries: Vec<CountryId>,
    concentration_ppm: Vec<f64>,
    temperature_c: Vec<f64>,
    /// Global emissions per year, MtC, pulse included.
    global_emissions_mtc: Vec<f64>,
    /// Cumulative emissions since the start year, GtC, pulse included.
    cumulative_emissions_gtc: Vec<f64>,
    global_impact_fraction: Vec<f64>,
    /// impact_fraction[c][t]: national impact as a fraction of gross GDP.
    impact_fraction: Vec<Vec<f64>>,
    /// damages_usd[c][t] = -impact_fraction * gross GDP; positive = harm.
    damages_usd: Vec<Vec<f64>>,
}

impl WorldTrajectory {
    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn num_years(&self) -> usize {
        self.temperature_c.len()
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn concentration_ppm(&self, t: usize) -> f64 {
        self.concentration_ppm[t]
    }

    pub fn temperature_c(&self, t: usize) -> f64 {
        self.temperature_c[t]
    }

    pub fn global_emissions_mtc(&self, t: usize) -> f64 {
        self.global_emissions_mtc[t]
    }

    pub fn cumulative_emissions_gtc(&self, t: usize) -> f64 {
        self.cumulative_emissions_gtc[t]
    }

    pub fn global_impact_fraction(&self, t: usize) -> f64 {
        self.global_impact_fraction[t]
    }

    pub fn impact_fraction(&self, c: usize, t: usize) -> f64 {
        self.impact_fraction[c][t]
    }

    /// Dollar damages for country `c` at year index `t`, USD/yr. Positive
    /// values are losses; beneficial warming years are negative.
    pub fn damages_usd(&self, c: usize, t: usize) -> f64 {
        self.damages_usd[c][t]
    }

    /// Coefficient of determination of a straight-line fit of temperature on
    /// cumulative emissions. Near 1 when warming is effectively proportional
    /// to the cumulative carbon emitted.
    pub fn matthews_r_squared(&self) -> f64 {
        let n = self.num_years() as f64;
        let xs = &self.cumulative_emissions_gtc;
        let ys = &self.temperature_c;
        let mean_x: f64 = xs.iter().sum::<f64>() / n;
        let mean_y: f64 = ys.iter().sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut syy = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            sxx += (x - mean_x) * (x - mean_x);
            sxy += (x - mean_x) * (y - mean_y);
            syy += (y - mean_y) * (y - mean_y);
        }
        if sxx == 0.0 || syy == 0.0 {
            return 1.0;
        }
        (sxy * sxy) / (sxx * syy)
    }
}

/// Run the model over the scenario grid, optionally with an emission pulse.
///
/// The pulse year must lie strictly after the start year (the start year is
/// the initial condition and takes no emission step) and within the scenario.
pub fn run_trajectory(
    scenario: &Scenario,
    economy: &EconomyPath,
    climate: &ClimateParams,
    init: &ClimateInit,
    impact: &BmaImpact,
    income_elasticity: f64,
    pulse: Option<Pulse>,
) -> Result<WorldTrajectory> {
    climate.validate()?;
    init.validate(climate)?;
    if let Some(p) = pulse {
        if p.year <= scenario.start_year() || p.year > scenario.end_year() {
            return Err(EngineError::Config(format!(
                "pulse year {} must lie in ({}, {}]",
                p.year,
                scenario.start_year(),
                scenario.end_year()
            )));
        }
        if !(p.size_mtc > 0.0) {
            return Err(EngineError::Config(format!(
                "pulse size must be positive (got {} MtC)",
                p.size_mtc
            )));
        }
    }

    let ny = scenario.num_years();
    let nc = scenario.num_countries();
    let mut traj = WorldTrajectory {
        start_year: scenario.start_year(),
        countries: scenario.countries().to_vec(),
        concentration_ppm: Vec::with_capacity(ny),
        temperature_c: Vec::with_capacity(ny),
        global_emissions_mtc: Vec::with_capacity(ny),
        cumulative_emissions_gtc: Vec::with_capacity(ny),
        global_impact_fraction: Vec::with_capacity(ny),
        impact_fraction: vec![Vec::with_capacity(ny); nc],
        damages_usd: vec![Vec::with_capacity(ny); nc],
    };

    let mut carbon = CarbonCycleState::from_initial_concentration(init, climate);
    let mut temperature = TemperatureState {
        temperature_c: init.temperature_c,
    };
    let mut cumulative_gtc = 0.0;

    let mut income = vec![0.0_f64; nc];
    let mut gdp = vec![0.0_f64; nc];
    let mut population = vec![0.0_f64; nc];

    for t in 0..ny {
        let year = scenario.start_year() + t as i32;
        let mut emissions_mtc = economy.global_emissions_mtc(t);
        if let Some(p) = pulse {
            if p.year == year {
                emissions_mtc += p.size_mtc;
            }
        }
        if t > 0 {
            carbon = step_carbon(&carbon, mtc_to_gtc(emissions_mtc), climate);
            let concentration = carbon.concentration_ppm(climate);
            temperature = step_temperature(&temperature, concentration, climate);
        }
        cumulative_gtc += mtc_to_gtc(emissions_mtc);

        let concentration = carbon.concentration_ppm(climate);
        traj.concentration_ppm.push(concentration);
        traj.temperature_c.push(temperature.temperature_c);
        traj.global_emissions_mtc.push(emissions_mtc);
        traj.cumulative_emissions_gtc.push(cumulative_gtc);

        let global_fraction = impact.evaluate(temperature.temperature_c).map_err(|e| {
            EngineError::Numerical(format!("impact evaluation failed in {year}: {e}"))
        })?;
        traj.global_impact_fraction.push(global_fraction);

        for c in 0..nc {
            let s = economy.state(c, t);
            income[c] = s.income_per_capita;
            gdp[c] = s.gdp_gross;
            population[c] = s.population_millions * PERSONS_PER_MILLION;
        }
        let national = downscale(global_fraction, &income, &gdp, &population, income_elasticity)?;
        for c in 0..nc {
            let fraction = national[c];
            if fraction <= -1.0 {
                return Err(EngineError::EconomyAnnihilated {
                    country: traj.countries[c].to_string(),
                    year,
                    impact: fraction,
                });
            }
            traj.impact_fraction[c].push(fraction);
            traj.damages_usd[c].push(-fraction * gdp[c]);
        }
    }
    Ok(traj)
}
